//! Vacuum-Rabi splittings of the qubit with each resonator, found by
//! diagonalizing the coupled qubit + two-resonator Hamiltonian.
//!
//! Run with `cargo run --release --example avoided_crossing`.

use cpb_fridge::qubit_model::{find_avoided_crossing, CoupledSystem, ResonatorRole};

fn main() {
    let sys = CoupledSystem::measured_device();
    println!("Hilbert space dimension: {}", sys.basis().dim());
    for (role, lo, hi) in [(ResonatorRole::Cold, 0.4, 0.5), (ResonatorRole::Hot, 0.25, 0.5)] {
        let res = sys.resonator(role);
        let x = find_avoided_crossing(&sys, role, lo, hi, 201).expect("crossing in range");
        // Near resonance the transverse coupling is g0 sin(theta) with sin(theta) = E_J / f_r.
        let expected = 2.0 * res.g0 * sys.qubit.ej / res.f_r;
        println!(
            "{role:?}: f_r = {:.3} GHz, ng* = {:.4}, gap = {:.1} MHz (2 g0 E_J / f_r = {:.1} MHz)",
            res.f_r / 1e9,
            x.ng.value(),
            x.gap / 1e6,
            expected / 1e6
        );
    }
}
