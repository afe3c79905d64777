//! Thermal transition rates and peak cooling power under the two ways of
//! making the coupling dimensionless.
//!
//! Run with `cargo run --release --example rate_normalization`.

use cpb_fridge::io::config::logspace;
use cpb_fridge::otto::{sweep_drive_frequency, OttoConfig, RateNormalization};

fn main() {
    let base = OttoConfig::refrigerator(1e8).expect("refrigerator");
    let grid = logspace(1e7, 2.3e9, 30);
    for norm in [RateNormalization::ReferenceTime { tau: 1e-9 }, RateNormalization::QubitFrequency] {
        let cfg = OttoConfig { normalization: norm, ..base };
        let r = cfg.rates(cfg.cold.resonator.f_r);
        let points = sweep_drive_frequency(&grid, &cfg).expect("sweep");
        let (f, q) = points
            .iter()
            .map(|p| (p.f_drive, p.result.as_ref().map_or(f64::NAN, |r| r.q_dot_cold_avg)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        println!("{norm:?}");
        println!("  cold-bath rates at f_c: down {:.3e} 1/s, up {:.3e} 1/s", r.gamma_c_down, r.gamma_c_up);
        println!("  peak cooling power {:.3} aW at {:.3} GHz", q * 1e18, f / 1e9);
    }
}
