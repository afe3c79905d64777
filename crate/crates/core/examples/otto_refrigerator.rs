//! Cooling power of the driven qubit refrigerator versus drive frequency,
//! with and without quasiparticle poisoning of the couplings.
//!
//! Run with `cargo run --release --example otto_refrigerator`.

use cpb_fridge::io::config::logspace;
use cpb_fridge::otto::{sweep_drive_frequency, OttoConfig};

fn main() {
    let cfg = OttoConfig::refrigerator(1e8).expect("reference refrigerator");
    let grid = logspace(1e7, 2.3e9, 12);
    let clean = sweep_drive_frequency(&grid, &cfg).expect("sweep");
    let poisoned = sweep_drive_frequency(&grid, &cfg.with_poisoning(0.61, 0.66)).expect("sweep");
    println!("{:>12} {:>14} {:>14} {:>12}", "f [Hz]", "Q_c [aW]", "poisoned [aW]", "P [aW]");
    for (a, b) in clean.iter().zip(&poisoned) {
        let (ra, rb) = (a.result.as_ref().unwrap(), b.result.as_ref().unwrap());
        println!(
            "{:>12.3e} {:>14.3} {:>14.3} {:>12.3}",
            a.f_drive,
            ra.q_dot_cold_avg * 1e18,
            rb.q_dot_cold_avg * 1e18,
            ra.work_avg * 1e18
        );
    }
}
