//! Cross-checks of the Bloch-equation refrigerator: a lab-frame Lindblad
//! integration and the quasistatic rate-equation and ideal Otto limits.
//!
//! Run with `cargo run --release --example bloch_vs_lindblad`.

use cpb_fridge::otto::oracle::{ideal_otto_cold_heat, integrate_lindblad, rate_equation_cold_heat};
use cpb_fridge::otto::{find_steady_cycle, integrate_cycle, BlochState, OttoConfig};
use cpb_fridge::Waveform;

fn main() {
    let cfg = OttoConfig::refrigerator(1e7).expect("refrigerator");
    let lind = integrate_lindblad(&BlochState::GROUND, &cfg, 1, 0.02, 8).expect("Lindblad run");
    let bloch = integrate_cycle(BlochState::GROUND, &cfg, 1).expect("Bloch run");
    let (_, end) = lind.last().unwrap();
    println!("after one cycle: z_Bloch = {:.9}, z_Lindblad = {:.9}", bloch.end.z, end.z);

    let mut slow = cfg.with_f_drive(1e5);
    slow.cold.resonator.q_total = 1000.0;
    slow.hot.resonator.q_total = 1000.0;
    slow.protocol.waveform = Waveform::Trapezoid { a: 20.0 };
    let r = find_steady_cycle(&slow).expect("steady cycle");
    let ideal = ideal_otto_cold_heat(4.718e9, 8.001e9, 0.3, 0.3);
    let rate = rate_equation_cold_heat(&slow, 20_000, 10_000);
    println!("heat per cycle at 100 kHz:");
    println!("  Bloch         {:.4e} J", r.cold_heat_per_cycle());
    println!("  rate equation {rate:.4e} J");
    println!("  ideal Otto    {ideal:.4e} J");
}
