//! Charge-basis levels of the box versus offset charge, compared with the
//! two-level approximation.
//!
//! Run with `cargo run --example qubit_spectrum`.

use cpb_fridge::io::config::linspace;
use cpb_fridge::qubit_model::{charge_spectrum, mixing_angle, qubit_frequency, GateCharge, QubitParams};

fn main() {
    let six = QubitParams::measured_device();
    let two = QubitParams::two_level(six.ec, six.ej).expect("valid two-level parameters");
    println!("E_C = {:.2} GHz, E_J = {:.2} GHz, {} charge states", six.ec / 1e9, six.ej / 1e9, six.n_states());
    println!("{:>6} {:>12} {:>12} {:>10} {:>10}", "ng", "f01 [GHz]", "2-lvl [GHz]", "f12 [GHz]", "theta");
    for ng in linspace(0.0, 1.0, 11) {
        let g = GateCharge(ng);
        let s = charge_spectrum(&six, g).expect("diagonalization");
        let f01 = s.transition(1).unwrap();
        let f12 = s.transition(2).unwrap() - f01;
        println!(
            "{ng:>6.2} {:>12.4} {:>12.4} {:>10.4} {:>10.4}",
            f01 / 1e9,
            qubit_frequency(&two, g) / 1e9,
            f12 / 1e9,
            mixing_angle(&two, g)
        );
    }
}
