//! Synthetic one-tone transmission map and the dispersive shifts it implies.
//!
//! Run with `cargo run --release --example one_tone_map`.

use cpb_fridge::io::config::linspace;
use cpb_fridge::qubit_model::{CoupledSystem, ResonatorRole};
use cpb_fridge::spectroscopy::{dispersive_shift, effective_coupling_from_shift, one_tone_map, NotchQuality};

/// Effective transverse couplings at the sweet spot used by the readout model.
const G_EFF: [(ResonatorRole, f64); 2] = [(ResonatorRole::Cold, 76e6), (ResonatorRole::Hot, 125e6)];

fn main() {
    let sys = CoupledSystem::measured_device();
    let notch = NotchQuality::default();
    let ng = linspace(0.3, 0.7, 9);
    let f = linspace(7.95e9, 8.05e9, 201);
    let map = one_tone_map(&sys, notch, &ng, &f).expect("one-tone map");

    println!("hot-resonator dip position versus offset charge");
    for (i, n) in map.ng.iter().enumerate() {
        let col = map.column_at(i);
        let j = (0..col.len()).min_by(|&a, &b| col[a].total_cmp(&col[b])).unwrap();
        println!("  ng = {n:.2}: |S21| min {:.3} at {:.4} GHz", col[j], map.freq[j] / 1e9);
    }

    // The full-model shift includes counter-rotating and higher-level terms,
    // so it exceeds the two-level g^2 / delta estimate.
    for (role, g) in G_EFF {
        let full = dispersive_shift(&sys, role).expect("dispersive shift");
        let delta = sys.resonator(role).f_r - sys.qubit.ej;
        let chi = g * g / delta;
        let back = effective_coupling_from_shift(chi, delta).expect("coupling");
        println!(
            "{role:?}: full-model chi = {:.2} MHz; g^2/delta = {:.2} MHz -> g = {:.1} MHz",
            full / 1e6,
            chi / 1e6,
            back / 1e6
        );
    }
}
