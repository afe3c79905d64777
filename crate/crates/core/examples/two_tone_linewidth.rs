//! Power-broadened two-tone linewidths and extrapolation to zero pump power
//! to recover the dephasing rate.
//!
//! Run with `cargo run --example two_tone_linewidth`.

use std::f64::consts::PI;

use cpb_fridge::io::RunConfig;
use cpb_fridge::spectroscopy::{
    extrapolate_gamma2, linewidth_model, measure_linewidths, synthetic_linewidth_series, DecoherenceRates,
};

fn main() {
    let cfg = RunConfig::default();
    let tt = cfg.two_tone_config();
    let rates = DecoherenceRates::new(2.0 * PI * 20e6, 2.0 * PI * 24e6).expect("rates");
    let g_h = 2.0 * PI * 125e6;

    println!("{:>10} {:>10} {:>14}", "P [fW]", "n_p", "HWHM [MHz]");
    for &p in &tt.p_pump_grid {
        let hw = linewidth_model(tt.photons(p), g_h, &rates);
        println!("{:>10.2} {:>10.4} {:>14.3}", p * 1e15, tt.photons(p), hw / 1e6);
    }

    let series = synthetic_linewidth_series(&tt, g_h, &rates, 0.01, 7).expect("series");
    let from_series = extrapolate_gamma2(&series).expect("extrapolation");
    let fitted = measure_linewidths(&cfg.qubit_params(), &tt, 0.5, g_h, &rates, 0.01, 7).expect("fits");
    let from_fits = extrapolate_gamma2(&fitted).expect("extrapolation");
    println!("input Gamma2/2pi = 24 MHz");
    println!("from linewidth series: {:.3} MHz", from_series / (2.0 * PI) / 1e6);
    println!("from Lorentzian fits:  {:.3} MHz", from_fits / (2.0 * PI) / 1e6);
}
