//! Levenberg-Marquardt Lorentzian fit of a noisy resonance.
//!
//! Run with `cargo run --example lorentzian_fit`.

use cpb_fridge::io::config::linspace;
use cpb_fridge::spectroscopy::{fit_lorentzian, lorentzian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let (center, fwhm, amplitude, offset) = (3.5e9, 48e6, 0.4, 0.02);
    let x = linspace(3.3e9, 3.7e9, 401);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y: Vec<f64> = x
        .iter()
        .map(|&f| lorentzian(f, center, fwhm, amplitude, offset) + 0.01 * rng.gen_range(-1.0..1.0))
        .collect();
    let fit = fit_lorentzian(&x, &y).expect("fit converges");
    println!("center    {:.4} GHz (true {:.4})", fit.center / 1e9, center / 1e9);
    println!("FWHM      {:.3} MHz (true {:.3})", fit.fwhm / 1e6, fwhm / 1e6);
    println!("amplitude {:.4} (true {amplitude})", fit.amplitude);
    println!("offset    {:.4} (true {offset})", fit.offset);
    println!("{} iterations, residual norm {:.3e}", fit.iterations, fit.residual_norm);
}
