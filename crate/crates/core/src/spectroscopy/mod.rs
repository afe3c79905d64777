//! One-tone and two-tone spectroscopy: synthetic transmission maps from the
//! coupled Hamiltonian, dispersive-shift analysis, the driven two-level
//! steady state and linewidth model, and the fits used to extract rates.
//!
//! Rates are angular (rad/s); frequencies are in Hz.

mod fit;

pub use fit::{
    fit_lorentzian, fit_lorentzian_with, lorentzian, weighted_line_fit, FitSettings, LineFit,
    LorentzianFit,
};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubit_model::{
    qubit_frequency, CoupledSystem, GateCharge, ModelError, QubitParams, ResonatorRole,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectroscopyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("{name} grid is not strictly monotone at index {index}")]
    NotMonotone { name: &'static str, index: usize },
    #[error("dispersive approximation invalid: |detuning| {detuning:.4e} Hz <= 5 g = {limit:.4e} Hz")]
    DispersiveRegimeViolation { detuning: f64, limit: f64 },
    #[error("chi * delta is negative ({chi:.4e} Hz * {delta:.4e} Hz)")]
    NegativeProduct { chi: f64, delta: f64 },
    #[error("Lorentzian fit did not converge within {iterations} iterations")]
    FitDiverged { iterations: usize },
    #[error("data are constant; nothing to fit")]
    DegenerateData,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("extrapolated squared linewidth is negative ({intercept:.4e} Hz^2)")]
    NegativeIntercept { intercept: f64 },
    #[error("pure dephasing rate would be negative: Gamma2 {gamma2:.4e} < Gamma1/2 = {half_gamma1:.4e} rad/s")]
    NegativeDephasing { gamma2: f64, half_gamma1: f64 },
    #[error("invalid spectroscopy input: {0}")]
    Invalid(String),
}

pub(crate) fn check_monotone(name: &'static str, grid: &[f64]) -> Result<(), SpectroscopyError> {
    if grid.len() < 2 {
        return Ok(());
    }
    let up = grid[1] > grid[0];
    for k in 1..grid.len() {
        let ok = if up { grid[k] > grid[k - 1] } else { grid[k] < grid[k - 1] };
        if !ok || !grid[k].is_finite() {
            return Err(SpectroscopyError::NotMonotone { name, index: k });
        }
    }
    Ok(())
}

/// Notch-type resonator seen through a common feedline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchResonance {
    pub f_r: f64,
    pub q_loaded: f64,
    pub q_coupling: f64,
}

impl NotchResonance {
    pub fn new(f_r: f64, q_loaded: f64, q_coupling: f64) -> Result<Self, SpectroscopyError> {
        let n = Self { f_r, q_loaded, q_coupling };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<(), SpectroscopyError> {
        if !(self.f_r > 0.0 && self.q_loaded > 0.0 && self.q_coupling > 0.0) {
            return Err(SpectroscopyError::Invalid("notch f_r and quality factors must be > 0".into()));
        }
        if self.q_coupling < self.q_loaded {
            return Err(SpectroscopyError::Invalid(format!(
                "q_coupling {} cannot be below q_loaded {}",
                self.q_coupling, self.q_loaded
            )));
        }
        Ok(())
    }

    /// `1 / Q_i = 1 / Q_l - 1 / Q_c`; infinite for a lossless resonator.
    pub fn q_internal(&self) -> f64 {
        let inv = 1.0 / self.q_loaded - 1.0 / self.q_coupling;
        if inv <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / inv
        }
    }

    pub fn is_overcoupled(&self) -> bool {
        self.q_coupling < self.q_internal()
    }

    /// Full dip depth `1 - |S21|_min = Q_l / Q_c`.
    pub fn depth(&self) -> f64 {
        (self.q_loaded / self.q_coupling).clamp(0.0, 1.0)
    }

    /// Full width at half depth, `f_r / Q_l`.
    pub fn linewidth(&self) -> f64 {
        self.f_r / self.q_loaded
    }

    pub fn s21(&self, f: f64) -> Complex64 {
        notch_response(f, self.f_r, self.q_loaded, self.depth())
    }
}

/// `1 - depth / (1 + 2 j Q_l (f - f_0) / f_0)`; `|S21| <= 1` for depth in `[0, 1]`.
pub fn notch_response(f: f64, f0: f64, q_loaded: f64, depth: f64) -> Complex64 {
    let x = 2.0 * q_loaded * (f - f0) / f0;
    Complex64::new(1.0, 0.0) - depth / Complex64::new(1.0, x)
}

/// Loaded and coupling quality factors of the two readout notches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NotchQuality {
    pub q_loaded: f64,
    pub q_coupling: f64,
}

impl Default for NotchQuality {
    /// Overcoupled resonator with `Q_l = 1000`, `Q_c = 1250` (`Q_i = 5000`).
    fn default() -> Self {
        Self { q_loaded: 1000.0, q_coupling: 1250.0 }
    }
}

/// `values[(i, j)]` belongs to `ng[i]` and `freq[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    pub ng: Vec<f64>,
    pub freq: Vec<f64>,
    pub values: DMatrix<f64>,
}

impl SpectralMap {
    pub fn column_at(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }
}

/// `|S21|` over an offset-charge by frequency grid. Every dressed transition
/// out of the ground state is drawn as a notch of width `f / Q_l` whose depth
/// is scaled by its weight on the bare one-photon state of each resonator.
pub fn one_tone_map(
    sys: &CoupledSystem,
    notch: NotchQuality,
    ng_grid: &[f64],
    f_grid: &[f64],
) -> Result<SpectralMap, SpectroscopyError> {
    check_monotone("ng", ng_grid)?;
    check_monotone("frequency", f_grid)?;
    NotchResonance::new(sys.hot.f_r, notch.q_loaded, notch.q_coupling)?;
    let rows: Result<Vec<Vec<f64>>, SpectroscopyError> = ng_grid
        .par_iter()
        .map(|&ng| one_tone_column(sys, notch, GateCharge(ng), f_grid))
        .collect();
    let rows = rows?;
    let values = DMatrix::from_fn(ng_grid.len(), f_grid.len(), |i, j| rows[i][j]);
    Ok(SpectralMap { ng: ng_grid.to_vec(), freq: f_grid.to_vec(), values })
}

/// Dressed transitions with their one-photon weights `(frequency, w_cold, w_hot)`.
pub fn photonic_transitions(
    sys: &CoupledSystem,
    g: GateCharge,
) -> Result<Vec<(f64, f64, f64)>, SpectroscopyError> {
    let eig = sys.diagonalize(g)?;
    let basis = sys.basis();
    let cold = basis.index(0, 1, 0);
    let hot = basis.index(0, 0, 1);
    let e0 = eig.values[0];
    Ok((1..eig.dim())
        .map(|k| {
            (
                eig.values[k] - e0,
                eig.vectors[(cold, k)].norm_sqr(),
                eig.vectors[(hot, k)].norm_sqr(),
            )
        })
        .collect())
}

fn one_tone_column(
    sys: &CoupledSystem,
    notch: NotchQuality,
    g: GateCharge,
    f_grid: &[f64],
) -> Result<Vec<f64>, SpectroscopyError> {
    let lines = photonic_transitions(sys, g)?;
    let depth = (notch.q_loaded / notch.q_coupling).clamp(0.0, 1.0);
    Ok(f_grid
        .iter()
        .map(|&f| {
            let mut s = Complex64::new(1.0, 0.0);
            for &(f0, wc, wh) in &lines {
                let w = wc + wh;
                if w > 1e-6 && f0 > 0.0 {
                    s *= notch_response(f, f0, notch.q_loaded, (w * depth).min(1.0));
                }
            }
            s.norm().clamp(0.0, 1.0)
        })
        .collect())
}

/// Map of the opposite charge parity: the even map evaluated at `N_g + 1/2`.
pub fn odd_parity_map(
    sys: &CoupledSystem,
    notch: NotchQuality,
    ng_grid: &[f64],
    f_grid: &[f64],
) -> Result<SpectralMap, SpectroscopyError> {
    let shifted: Vec<f64> = ng_grid.iter().map(|ng| ng + 0.5).collect();
    let mut m = one_tone_map(sys, notch, &shifted, f_grid)?;
    m.ng = ng_grid.to_vec();
    Ok(m)
}

/// Time-averaged spectrum under parity switching: `p_even * even + (1 - p_even) * odd`.
pub fn parity_mix(
    even: &DMatrix<f64>,
    odd: &DMatrix<f64>,
    p_even: f64,
) -> Result<DMatrix<f64>, SpectroscopyError> {
    if even.shape() != odd.shape() {
        return Err(SpectroscopyError::ShapeMismatch {
            expected: even.nrows() * even.ncols(),
            got: odd.nrows() * odd.ncols(),
        });
    }
    if !(0.0..=1.0).contains(&p_even) {
        return Err(SpectroscopyError::Invalid(format!("p_even must lie in [0, 1], got {p_even}")));
    }
    Ok(even.zip_map(odd, |e, o| p_even * e + (1.0 - p_even) * o))
}

/// Resonator pull at the degeneracy point with the qubit in its ground state,
/// from full-Hamiltonian eigenvalues: dressed minus bare frequency (Hz).
pub fn dispersive_shift(sys: &CoupledSystem, role: ResonatorRole) -> Result<f64, SpectroscopyError> {
    let res = sys.resonator(role);
    let detuning = res.f_r - sys.qubit.ej;
    let limit = 5.0 * res.g0;
    if detuning.abs() <= limit {
        return Err(SpectroscopyError::DispersiveRegimeViolation { detuning, limit });
    }
    let lines = photonic_transitions(sys, GateCharge::DEGENERACY)?;
    let pick = |&(_, wc, wh): &(f64, f64, f64)| match role {
        ResonatorRole::Cold => wc,
        ResonatorRole::Hot => wh,
    };
    let best = lines
        .iter()
        .max_by(|a, b| pick(a).total_cmp(&pick(b)))
        .ok_or_else(|| SpectroscopyError::Invalid("empty spectrum".into()))?;
    Ok(best.0 - res.f_r)
}

/// `g = sqrt(chi * Delta)`.
pub fn effective_coupling_from_shift(chi: f64, delta: f64) -> Result<f64, SpectroscopyError> {
    let prod = chi * delta;
    if prod < 0.0 {
        return Err(SpectroscopyError::NegativeProduct { chi, delta });
    }
    Ok(prod.sqrt())
}

/// Longitudinal, transverse and pure-dephasing rates (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceRates {
    pub gamma1_down: f64,
    pub gamma2_down: f64,
    pub gamma_phi: f64,
}

impl DecoherenceRates {
    /// Derives `Gamma_phi = Gamma_2 - Gamma_1 / 2`, which must be non-negative.
    pub fn new(gamma1_down: f64, gamma2_down: f64) -> Result<Self, SpectroscopyError> {
        if !(gamma1_down > 0.0 && gamma2_down > 0.0) {
            return Err(SpectroscopyError::Invalid("rates must be > 0".into()));
        }
        let gamma_phi = gamma2_down - 0.5 * gamma1_down;
        if gamma_phi < 0.0 {
            return Err(SpectroscopyError::NegativeDephasing {
                gamma2: gamma2_down,
                half_gamma1: 0.5 * gamma1_down,
            });
        }
        Ok(Self { gamma1_down, gamma2_down, gamma_phi })
    }
}

fn saturation(n_p: f64, g_h: f64, rates: &DecoherenceRates) -> f64 {
    4.0 * n_p * g_h * g_h / (rates.gamma1_down * rates.gamma2_down)
}

/// Excited-state population of the pumped qubit. `g_h` in rad/s. The detuning
/// enters as `2 pi (f_q - f_pump) / Gamma_2` so the half width matches
/// [`linewidth_model`].
pub fn steady_state_population(
    f_q: f64,
    f_pump: f64,
    n_p: f64,
    g_h: f64,
    rates: &DecoherenceRates,
) -> f64 {
    let s = saturation(n_p, g_h, rates);
    let d = 2.0 * PI * (f_q - f_pump) / rates.gamma2_down;
    0.5 * s / (1.0 + d * d + s)
}

/// Power-broadened half width at half maximum `delta f` (Hz) of the
/// population line: `2 pi delta f = Gamma_2 sqrt(1 + 4 n_p g^2 / (Gamma_1 Gamma_2))`.
pub fn linewidth_model(n_p: f64, g_h: f64, rates: &DecoherenceRates) -> f64 {
    rates.gamma2_down * (1.0 + saturation(n_p, g_h, rates)).sqrt() / (2.0 * PI)
}

/// One point of a squared-linewidth versus pump-power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthPoint {
    /// Pump power (W, or any consistent unit).
    pub p_pump: f64,
    /// `(delta f)^2` in Hz^2.
    pub linewidth_sq: f64,
    pub weight: f64,
}

/// Extrapolates `(delta f)^2` linearly to zero pump power and returns
/// `Gamma_2 = 2 pi sqrt(intercept)` (rad/s).
pub fn extrapolate_gamma2(points: &[LinewidthPoint]) -> Result<f64, SpectroscopyError> {
    if points.len() < 3 {
        return Err(SpectroscopyError::TooFewSamples { needed: 3, got: points.len() });
    }
    let x: Vec<f64> = points.iter().map(|p| p.p_pump).collect();
    let y: Vec<f64> = points.iter().map(|p| p.linewidth_sq).collect();
    let w: Vec<f64> = points.iter().map(|p| p.weight).collect();
    let line = weighted_line_fit(&x, &y, &w)?;
    if line.intercept < 0.0 {
        return Err(SpectroscopyError::NegativeIntercept { intercept: line.intercept });
    }
    Ok(2.0 * PI * line.intercept.sqrt())
}

/// Two-tone experiment: fixed probe, swept pump frequency, offset charge and power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoToneConfig {
    pub f_probe: f64,
    pub pump_grid: Vec<f64>,
    pub ng_grid: Vec<f64>,
    /// Photons per watt of pump power, `n_p = scale * P_pump`.
    pub pump_photon_scale: f64,
    pub p_pump_grid: Vec<f64>,
}

impl TwoToneConfig {
    pub fn validate(&self) -> Result<(), SpectroscopyError> {
        check_monotone("pump", &self.pump_grid)?;
        check_monotone("ng", &self.ng_grid)?;
        check_monotone("pump power", &self.p_pump_grid)?;
        if !(self.pump_photon_scale > 0.0 && self.pump_photon_scale.is_finite()) {
            return Err(SpectroscopyError::Invalid("pump_photon_scale must be > 0".into()));
        }
        if self.p_pump_grid.iter().any(|&p| p < 0.0) {
            return Err(SpectroscopyError::Invalid("pump powers must be >= 0".into()));
        }
        Ok(())
    }

    pub fn photons(&self, p_pump: f64) -> f64 {
        self.pump_photon_scale * p_pump
    }
}

/// Excited population over `ng_grid` x `pump_grid` at pump power `p_pump`.
pub fn two_tone_map(
    q: &QubitParams,
    cfg: &TwoToneConfig,
    p_pump: f64,
    g_h: f64,
    rates: &DecoherenceRates,
) -> Result<SpectralMap, SpectroscopyError> {
    cfg.validate()?;
    let n_p = cfg.photons(p_pump);
    let values = DMatrix::from_fn(cfg.ng_grid.len(), cfg.pump_grid.len(), |i, j| {
        let f_q = qubit_frequency(q, GateCharge(cfg.ng_grid[i]));
        steady_state_population(f_q, cfg.pump_grid[j], n_p, g_h, rates)
    });
    Ok(SpectralMap { ng: cfg.ng_grid.clone(), freq: cfg.pump_grid.clone(), values })
}

/// Population trace versus pump frequency at one offset charge and power.
pub fn pump_trace(
    q: &QubitParams,
    cfg: &TwoToneConfig,
    ng: f64,
    p_pump: f64,
    g_h: f64,
    rates: &DecoherenceRates,
) -> Vec<f64> {
    let f_q = qubit_frequency(q, GateCharge(ng));
    let n_p = cfg.photons(p_pump);
    cfg.pump_grid.iter().map(|&f| steady_state_population(f_q, f, n_p, g_h, rates)).collect()
}

/// Fits every pump trace at `ng` with a Lorentzian and converts the full
/// width to the half width used by [`linewidth_model`]. Optional
/// multiplicative noise of relative size `noise` (uniform) is seeded.
pub fn measure_linewidths(
    q: &QubitParams,
    cfg: &TwoToneConfig,
    ng: f64,
    g_h: f64,
    rates: &DecoherenceRates,
    noise: f64,
    seed: u64,
) -> Result<Vec<LinewidthPoint>, SpectroscopyError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cfg.p_pump_grid
        .iter()
        .map(|&p| {
            let mut trace = pump_trace(q, cfg, ng, p, g_h, rates);
            if noise > 0.0 {
                let peak = trace.iter().cloned().fold(0.0, f64::max);
                for v in &mut trace {
                    *v += noise * peak * rng.gen_range(-1.0..1.0);
                }
            }
            let fit = fit_lorentzian(&cfg.pump_grid, &trace)?;
            let hw = fit.hwhm();
            Ok(LinewidthPoint { p_pump: p, linewidth_sq: hw * hw, weight: 1.0 })
        })
        .collect()
}

/// `(delta f)^2` straight from the linewidth model with seeded relative noise.
pub fn synthetic_linewidth_series(
    cfg: &TwoToneConfig,
    g_h: f64,
    rates: &DecoherenceRates,
    noise: f64,
    seed: u64,
) -> Result<Vec<LinewidthPoint>, SpectroscopyError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(cfg
        .p_pump_grid
        .iter()
        .map(|&p| {
            let df = linewidth_model(cfg.photons(p), g_h, rates);
            let eps = if noise > 0.0 { noise * rng.gen_range(-1.0..1.0) } else { 0.0 };
            LinewidthPoint { p_pump: p, linewidth_sq: df * df * (1.0 + eps), weight: 1.0 }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit_model::ResonatorParams;

    fn rates() -> DecoherenceRates {
        DecoherenceRates::new(2.0 * PI * 20e6, 2.0 * PI * 24e6).unwrap()
    }

    #[test]
    fn notch_depth_and_coupling_regime() {
        let n = NotchResonance::new(8.001e9, 1000.0, 1250.0).unwrap();
        assert!((n.q_internal() - 5000.0).abs() < 1e-9);
        assert!(n.is_overcoupled());
        assert!((n.s21(8.001e9).norm() - 0.2).abs() < 1e-12);
        let half = n.s21(8.001e9 + 0.5 * n.linewidth()).norm_sqr();
        // Half-depth in |S21|^2 of the notch occurs at +-linewidth/2.
        let dmin = (1.0 - n.depth()).powi(2);
        assert!((half - 0.5 * (1.0 + dmin)).abs() < 1e-12);
        assert!(NotchResonance::new(1e9, 100.0, 50.0).is_err());
    }

    #[test]
    fn population_limits() {
        let r = rates();
        let g = 2.0 * PI * 125e6;
        assert_eq!(steady_state_population(3.5e9, 3.5e9, 0.0, g, &r), 0.0);
        let sat = steady_state_population(3.5e9, 3.5e9, 1e12, g, &r);
        assert!((sat - 0.5).abs() < 1e-9);
        let on = steady_state_population(3.5e9, 3.5e9, 1e-3, g, &r);
        let off = steady_state_population(3.5e9, 3.52e9, 1e-3, g, &r);
        assert!(on > off);
        assert!(steady_state_population(3.5e9, 3.5e9, 2e-3, g, &r) > on);
    }

    #[test]
    fn half_maximum_matches_linewidth() {
        let r = rates();
        let g = 2.0 * PI * 125e6;
        for &n_p in &[0.0, 1e-4, 3e-3] {
            let df = linewidth_model(n_p, g, &r);
            if n_p == 0.0 {
                assert_eq!(2.0 * PI * df, r.gamma2_down);
                continue;
            }
            let peak = steady_state_population(3.5e9, 3.5e9, n_p, g, &r);
            let edge = steady_state_population(3.5e9, 3.5e9 + df, n_p, g, &r);
            assert!((edge - 0.5 * peak).abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn linewidth_squared_affine_in_photons() {
        let r = rates();
        let g = 2.0 * PI * 125e6;
        let sq = |n: f64| linewidth_model(n, g, &r).powi(2);
        let (a, b, c) = (sq(0.0), sq(1e-3), sq(2e-3));
        assert!(((c - b) - (b - a)).abs() < 1e-9 * c);
        assert!((a - (24e6f64).powi(2)).abs() < 1e-6 * a);
    }

    #[test]
    fn dephasing_must_be_nonnegative() {
        assert!(matches!(
            DecoherenceRates::new(10.0, 4.0),
            Err(SpectroscopyError::NegativeDephasing { .. })
        ));
        let r = DecoherenceRates::new(10.0, 5.0).unwrap();
        assert_eq!(r.gamma_phi, 0.0);
    }

    #[test]
    fn coupling_from_shift() {
        assert_eq!(effective_coupling_from_shift(0.0, 4.5e9).unwrap(), 0.0);
        assert!(matches!(
            effective_coupling_from_shift(-1e6, 4.5e9),
            Err(SpectroscopyError::NegativeProduct { .. })
        ));
        let g = effective_coupling_from_shift(-2e6, -1e9).unwrap();
        assert!((g - (2e15f64).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn zero_coupling_gives_zero_shift() {
        let sys = CoupledSystem::new(
            QubitParams::measured_device(),
            ResonatorParams::measured_cold().with_g0(0.0),
            ResonatorParams::measured_hot().with_g0(0.0),
        );
        assert!(dispersive_shift(&sys, ResonatorRole::Hot).unwrap().abs() < 1.0);
        assert!(dispersive_shift(&sys, ResonatorRole::Cold).unwrap().abs() < 1.0);
    }

    #[test]
    fn dispersive_check_rejects_strong_coupling() {
        let sys = CoupledSystem::new(
            QubitParams::measured_device(),
            ResonatorParams::measured_cold().with_g0(400e6),
            ResonatorParams::measured_hot(),
        );
        assert!(matches!(
            dispersive_shift(&sys, ResonatorRole::Cold),
            Err(SpectroscopyError::DispersiveRegimeViolation { .. })
        ));
    }

    #[test]
    fn decoupled_map_has_fixed_dips() {
        let sys = CoupledSystem::new(
            QubitParams::measured_device(),
            ResonatorParams::measured_cold().with_g0(0.0),
            ResonatorParams::measured_hot().with_g0(0.0),
        );
        let f = vec![4.718e9, 6.0e9, 8.001e9];
        let m = one_tone_map(&sys, NotchQuality::default(), &[0.3, 0.4, 0.5], &f).unwrap();
        for i in 0..3 {
            assert!((m.values[(i, 0)] - 0.2).abs() < 1e-4);
            assert!((m.values[(i, 2)] - 0.2).abs() < 1e-4);
            assert!(m.values[(i, 1)] > 0.99);
        }
    }

    #[test]
    fn parity_mix_bookkeeping() {
        let e = DMatrix::from_element(2, 3, 0.2);
        let o = DMatrix::from_element(2, 3, 1.0);
        assert_eq!(parity_mix(&e, &o, 1.0).unwrap(), e);
        let half = parity_mix(&e, &o, 0.5).unwrap();
        assert!((half[(0, 0)] - 0.6).abs() < 1e-15);
        assert!(matches!(
            parity_mix(&e, &DMatrix::zeros(3, 2), 0.5),
            Err(SpectroscopyError::ShapeMismatch { .. })
        ));
        assert!(parity_mix(&e, &o, 1.5).is_err());
    }

    #[test]
    fn extrapolation_inverts_model_and_ignores_power_unit() {
        let r = rates();
        let g = 2.0 * PI * 125e6;
        let cfg = TwoToneConfig {
            f_probe: 8.001e9,
            pump_grid: vec![3.4e9, 3.5e9, 3.6e9],
            ng_grid: vec![0.5],
            pump_photon_scale: 1e12,
            p_pump_grid: vec![1e-16, 5e-16, 1e-15, 2e-15, 4e-15],
        };
        let pts = synthetic_linewidth_series(&cfg, g, &r, 0.0, 0).unwrap();
        let g2 = extrapolate_gamma2(&pts).unwrap();
        assert!((g2 - r.gamma2_down).abs() < 1e-9 * r.gamma2_down);
        for &c in &[1e3, 7.3e-5, 1e18] {
            let scaled: Vec<LinewidthPoint> =
                pts.iter().map(|p| LinewidthPoint { p_pump: p.p_pump * c, ..*p }).collect();
            let g2s = extrapolate_gamma2(&scaled).unwrap();
            assert!((g2s - g2).abs() <= 1e-12 * g2);
        }
        assert!(matches!(extrapolate_gamma2(&pts[..2]), Err(SpectroscopyError::TooFewSamples { .. })));
        let neg: Vec<LinewidthPoint> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&p| LinewidthPoint { p_pump: p, linewidth_sq: 10.0 * p - 5.0, weight: 1.0 })
            .collect();
        assert!(matches!(extrapolate_gamma2(&neg), Err(SpectroscopyError::NegativeIntercept { .. })));
    }
}
