//! The trapezoidal gate-charge drive and how adiabatic it is at different
//! drive frequencies.
//!
//! Run with `cargo run --example drive_waveform`.

use cpb_fridge::drive::{max_adiabaticity, qubit_frequency_of_t};
use cpb_fridge::qubit_model::QubitParams;
use cpb_fridge::{DriveProtocol, Waveform};

fn main() {
    let q = QubitParams::two_level(6.8e9, 3.5e9).expect("qubit");
    let p = DriveProtocol::between_frequencies(&q, 4.718e9, 8.001e9, 1e8, Waveform::Trapezoid { a: 2.0 })
        .expect("protocol");
    println!("ng swings between {:.4} and {:.4}", p.ng_c, p.ng_h);
    println!("{:>8} {:>8} {:>10}", "t/tau", "q", "f_Q [GHz]");
    for k in 0..=8 {
        let t = k as f64 / 8.0 * p.period();
        println!("{:>8.3} {:>8.4} {:>10.4}", t / p.period(), p.q(t), qubit_frequency_of_t(&q, &p, t) / 1e9);
    }
    for f in [1e6, 1e8, 1e9, 3e9] {
        let metric = max_adiabaticity(&q, &p.with_f_drive(f), 4096);
        println!("f_drive = {f:.0e} Hz: max |dtheta/dt| / omega_Q = {metric:.3e}");
    }
    let sine = DriveProtocol { waveform: Waveform::Sine, ..p };
    println!("sine at t = tau/8: q = {:.4} (trapezoid {:.4})", sine.q(p.period() / 8.0), p.q(p.period() / 8.0));
}
