//! Cyclically driven qubit between two resonator-filtered thermal baths,
//! operated as a quantum Otto refrigerator.
//!
//! The qubit state is a Bloch vector in the instantaneous eigenbasis
//! (`z = +1` excited). Rates are in 1/s, powers in W, heat is positive when it
//! leaves a bath and enters the qubit.

mod integrate;
pub mod oracle;

pub use integrate::{
    find_steady_cycle, integrate_cycle, steps_per_period, sweep_drive_frequency, CycleIntegration,
    IntegratorSettings, SweepPoint,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drive::{DriveError, DriveProtocol, Waveform};
use crate::qubit_model::{qubit_frequency, qubit_frequency_slope, ModelError, QubitParams, ResonatorParams};
use crate::units::{reduced_energy, BOLTZMANN, PLANCK};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OttoError {
    #[error("invalid engine parameter: {0}")]
    Invalid(String),
    #[error("{needed} RK4 steps per period needed, above the cap of {cap}")]
    StepSizeTooCoarse { needed: usize, cap: usize },
    #[error("no periodic steady state after {cycles} cycles (last boundary change {last_change:.3e})")]
    NotConverged { cycles: usize, last_change: f64 },
    #[error("non-finite Bloch vector at t = {t:.6e} s")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Drive(#[from] DriveError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the coupling entering the Purcell-filtered rate is made dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RateNormalization {
    /// `g_hat = 2 pi g tau` with a reference time `tau` (s).
    ReferenceTime { tau: f64 },
    /// `g_hat = 2 pi g / omega_Q`.
    QubitFrequency,
}

impl Default for RateNormalization {
    fn default() -> Self {
        RateNormalization::ReferenceTime { tau: 1e-9 }
    }
}

/// A resistor-terminated resonator acting as a thermal bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    /// Resistor temperature (K).
    pub temperature: f64,
    pub resonator: ResonatorParams,
    /// Effective qubit-resonator coupling `g / 2 pi` (Hz).
    pub coupling: f64,
    /// Coupling reduction from quasiparticle poisoning, in `(0, 1]`.
    pub g_eff_scale: f64,
}

impl BathParams {
    pub fn new(
        temperature: f64,
        resonator: ResonatorParams,
        coupling: f64,
        g_eff_scale: f64,
    ) -> Result<Self, OttoError> {
        let b = Self { temperature, resonator, coupling, g_eff_scale };
        b.validate()?;
        Ok(b)
    }

    /// Cold bath of the refrigerator: 4.718 GHz, `Q = 2`, `g / 2 pi = 76 MHz`, 300 mK.
    pub fn cold_default() -> Self {
        Self {
            temperature: 0.3,
            resonator: ResonatorParams::measured_cold(),
            coupling: 76e6,
            g_eff_scale: 1.0,
        }
    }

    /// Hot bath: 8.001 GHz, `Q = 2`, `g / 2 pi = 125 MHz`, 300 mK.
    pub fn hot_default() -> Self {
        Self {
            temperature: 0.3,
            resonator: ResonatorParams::measured_hot(),
            coupling: 125e6,
            g_eff_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), OttoError> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(OttoError::Invalid(format!("temperature must be > 0, got {}", self.temperature)));
        }
        if !(self.g_eff_scale > 0.0 && self.g_eff_scale <= 1.0) {
            return Err(OttoError::Invalid(format!("g_eff_scale must lie in (0, 1], got {}", self.g_eff_scale)));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(OttoError::Invalid(format!("coupling must be >= 0, got {}", self.coupling)));
        }
        self.resonator.validate()?;
        Ok(())
    }

    /// Lorentzian filter `1 / (1 + Q^2 (w_r / w_Q - w_Q / w_r)^2)`, in `(0, 1]`.
    pub fn filter(&self, f_q: f64) -> f64 {
        let r = self.resonator.f_r / f_q - f_q / self.resonator.f_r;
        let q = self.resonator.q_total;
        1.0 / (1.0 + q * q * r * r)
    }
}

/// Relaxation rate into bath `bath` (1/s) at qubit frequency `f_q`:
/// `(g_hat / 4 pi) L(w_Q) w_Q / (1 - exp(-h f_Q / k T))`.
pub fn transition_rate_down(bath: &BathParams, f_q: f64, norm: RateNormalization) -> f64 {
    let omega = 2.0 * PI * f_q;
    let s2 = bath.g_eff_scale * bath.g_eff_scale;
    let g_hat = match norm {
        RateNormalization::ReferenceTime { tau } => 2.0 * PI * bath.coupling * tau * s2,
        RateNormalization::QubitFrequency => 2.0 * PI * bath.coupling * s2 / omega,
    };
    let x = reduced_energy(f_q, bath.temperature);
    g_hat / (4.0 * PI) * bath.filter(f_q) * omega / -(-x).exp_m1()
}

/// Excitation rate, `Gamma_down * exp(-h f_Q / k T)`.
pub fn transition_rate_up(bath: &BathParams, f_q: f64, norm: RateNormalization) -> f64 {
    transition_rate_down(bath, f_q, norm) * (-reduced_energy(f_q, bath.temperature)).exp()
}

/// Up and down rates from both baths at one instant (1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub gamma_c_down: f64,
    pub gamma_c_up: f64,
    pub gamma_h_down: f64,
    pub gamma_h_up: f64,
}

impl RateSet {
    pub fn at(cold: &BathParams, hot: &BathParams, f_q: f64, norm: RateNormalization) -> Self {
        let cd = transition_rate_down(cold, f_q, norm);
        let hd = transition_rate_down(hot, f_q, norm);
        Self {
            gamma_c_down: cd,
            gamma_c_up: cd * (-reduced_energy(f_q, cold.temperature)).exp(),
            gamma_h_down: hd,
            gamma_h_up: hd * (-reduced_energy(f_q, hot.temperature)).exp(),
        }
    }

    /// `Gamma_down + Gamma_up` summed over baths.
    pub fn total(&self) -> f64 {
        self.gamma_c_down + self.gamma_c_up + self.gamma_h_down + self.gamma_h_up
    }

    /// `Gamma_down - Gamma_up` summed over baths.
    pub fn imbalance(&self) -> f64 {
        self.gamma_c_down - self.gamma_c_up + self.gamma_h_down - self.gamma_h_up
    }

    /// Largest relative deviation from detailed balance over the two baths.
    pub fn detailed_balance_error(&self, f_q: f64, t_cold: f64, t_hot: f64) -> f64 {
        let err = |down: f64, up: f64, t: f64| {
            if down == 0.0 {
                return if up == 0.0 { 0.0 } else { f64::INFINITY };
            }
            let b = (-reduced_energy(f_q, t)).exp();
            ((up / down) - b).abs() / b
        };
        err(self.gamma_c_down, self.gamma_c_up, t_cold).max(err(self.gamma_h_down, self.gamma_h_up, t_hot))
    }
}

/// Heat current out of one bath (W) for qubit frequency `f_q` and inversion `z`:
/// `-(h f_Q / 2) ((G_down + G_up) z + (G_down - G_up))`.
pub fn heat_current(down: f64, up: f64, f_q: f64, z: f64) -> f64 {
    -0.5 * PLANCK * f_q * ((down + up) * z + (down - up))
}

/// `f_h / f_c > T_h / T_c`.
pub fn cooling_condition(f_c: f64, f_h: f64, t_c: f64, t_h: f64) -> bool {
    f_h / f_c > t_h / t_c
}

/// Equilibrium inversion `-(G_down - G_up) / (G_down + G_up)` for one frequency
/// and temperature: `-tanh(h f / 2 k T)`.
pub fn equilibrium_inversion(f_q: f64, temperature: f64) -> f64 {
    -(0.5 * reduced_energy(f_q, temperature)).tanh()
}

/// Qubit state in the instantaneous eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochState {
    pub const GROUND: BlochState = BlochState { x: 0.0, y: 0.0, z: -1.0 };
    pub const EXCITED: BlochState = BlochState { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(&self, o: &BlochState) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.z - o.z).powi(2)).sqrt()
    }

    pub(crate) fn axpy(&self, h: f64, d: &BlochState) -> BlochState {
        BlochState { x: self.x + h * d.x, y: self.y + h * d.y, z: self.z + h * d.z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Instantaneous drive quantities at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    /// Qubit frequency (Hz).
    pub f_q: f64,
    /// `d f_Q / dt` (Hz/s).
    pub f_q_rate: f64,
    /// Eigenbasis rotation rate `d theta / dt` (rad/s).
    pub theta_rate: f64,
}

pub fn drive_sample(q: &QubitParams, p: &DriveProtocol, t: f64) -> DriveSample {
    let ng = p.ng(t);
    let dng = p.dng_dt(t);
    let f_q = qubit_frequency(q, ng);
    DriveSample {
        f_q,
        f_q_rate: qubit_frequency_slope(q, ng) * dng,
        theta_rate: 8.0 * q.ec * q.ej * dng / (f_q * f_q),
    }
}

/// Everything needed to run the refrigerator at one drive frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OttoConfig {
    pub qubit: QubitParams,
    pub cold: BathParams,
    pub hot: BathParams,
    pub protocol: DriveProtocol,
    pub normalization: RateNormalization,
    pub integrator: IntegratorSettings,
    pub initial: BlochState,
}

impl OttoConfig {
    /// Measured device with `Q_c = Q_h = 2`, `T_c = T_h = 300 mK`, `a = 2`,
    /// driven between the two resonator frequencies.
    pub fn refrigerator(f_drive: f64) -> Result<Self, OttoError> {
        let qubit = QubitParams::two_level(6.8e9, 3.5e9)?;
        let cold = BathParams::cold_default();
        let hot = BathParams::hot_default();
        let protocol = DriveProtocol::between_frequencies(
            &qubit,
            cold.resonator.f_r,
            hot.resonator.f_r,
            f_drive,
            Waveform::Trapezoid { a: 2.0 },
        )?;
        Ok(Self {
            qubit,
            cold,
            hot,
            protocol,
            normalization: RateNormalization::default(),
            integrator: IntegratorSettings::default(),
            initial: BlochState::GROUND,
        })
    }

    pub fn with_f_drive(self, f_drive: f64) -> Self {
        Self { protocol: self.protocol.with_f_drive(f_drive), ..self }
    }

    pub fn with_poisoning(self, cold_scale: f64, hot_scale: f64) -> Self {
        Self {
            cold: BathParams { g_eff_scale: cold_scale, ..self.cold },
            hot: BathParams { g_eff_scale: hot_scale, ..self.hot },
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), OttoError> {
        self.qubit.validate()?;
        self.cold.validate()?;
        self.hot.validate()?;
        if !(self.protocol.f_drive > 0.0) {
            return Err(OttoError::Invalid("f_drive must be > 0".into()));
        }
        self.integrator.validate()?;
        if !(self.initial.is_finite() && self.initial.norm() <= 1.0 + 1e-12) {
            return Err(OttoError::Invalid("initial Bloch vector must lie in the unit ball".into()));
        }
        Ok(())
    }

    pub fn rates(&self, f_q: f64) -> RateSet {
        RateSet::at(&self.cold, &self.hot, f_q, self.normalization)
    }
}

/// Bloch-equation right-hand side at time `t`:
///
/// `x' = -G/2 x - w y - c z`, `y' = w x - G/2 y`, `z' = c x - G z - D`
///
/// with `G = sum(G_down + G_up)`, `D = sum(G_down - G_up)`, `w = 2 pi f_Q` and
/// `c = 8 E_C E_J dN_g/dt / (h f_Q)^2` (the basis rotation rate).
pub fn bloch_rhs(s: &BlochState, t: f64, cfg: &OttoConfig) -> BlochState {
    let d = drive_sample(&cfg.qubit, &cfg.protocol, t);
    bloch_rhs_with(s, &d, &cfg.rates(d.f_q))
}

pub(crate) fn bloch_rhs_with(s: &BlochState, d: &DriveSample, r: &RateSet) -> BlochState {
    let g = r.total();
    let dd = r.imbalance();
    let w = 2.0 * PI * d.f_q;
    let c = d.theta_rate;
    BlochState {
        x: -0.5 * g * s.x - w * s.y - c * s.z,
        y: w * s.x - 0.5 * g * s.y,
        z: c * s.x - g * s.z - dd,
    }
}

/// Cycle-averaged steady-state performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleResult {
    pub f_drive: f64,
    /// Heat drawn from the cold bath (W); positive means cooling.
    pub q_dot_cold_avg: f64,
    /// Heat drawn from the hot bath (W).
    pub q_dot_hot_avg: f64,
    /// Power delivered to the qubit by the drive (W).
    pub work_avg: f64,
    /// `-(Q_c / T_c + Q_h / T_h)` (W/K); non-negative by the second law.
    pub entropy_rate: f64,
    /// `|Q_c + Q_h + P - dE/tau| / max(|Q_c|, |Q_h|, |P|)` over the last cycle.
    pub first_law_residual: f64,
    /// Largest relative detailed-balance deviation seen on the last cycle.
    pub detailed_balance_error: f64,
    pub max_bloch_norm: f64,
    pub steps_per_period: usize,
    pub cycles_to_converge: usize,
    pub converged: bool,
    pub final_state: BlochState,
}

impl CycleResult {
    /// Heat drawn from the cold bath per cycle (J).
    pub fn cold_heat_per_cycle(&self) -> f64 {
        self.q_dot_cold_avg / self.f_drive
    }

    pub fn require_converged(self) -> Result<Self, OttoError> {
        if self.converged {
            Ok(self)
        } else {
            Err(OttoError::NotConverged { cycles: self.cycles_to_converge, last_change: f64::NAN })
        }
    }

    /// `Q_c / T_c + Q_h / T_h <= slack * |Q_c| / T_c`.
    pub fn satisfies_second_law(&self, t_cold: f64, t_hot: f64, slack: f64) -> bool {
        self.q_dot_cold_avg / t_cold + self.q_dot_hot_avg / t_hot
            <= slack * self.q_dot_cold_avg.abs() / t_cold
    }
}

/// Thermal energy scale `k_B T` in joules; handy for reporting.
pub fn thermal_energy(temperature: f64) -> f64 {
    BOLTZMANN * temperature
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cold() -> BathParams {
        BathParams::cold_default()
    }

    #[test]
    fn filter_peaks_on_resonance() {
        let b = cold();
        assert_eq!(b.filter(b.resonator.f_r), 1.0);
        assert!(b.filter(6e9) < 1.0 && b.filter(6e9) > 0.0);
    }

    #[test]
    fn zero_temperature_limit_is_spontaneous_emission() {
        let mut b = cold();
        b.temperature = 1e-4;
        let f = 4.718e9;
        let norm = RateNormalization::default();
        let expected = 2.0 * PI * 76e6 * 1e-9 / (4.0 * PI) * 2.0 * PI * f;
        assert!((transition_rate_down(&b, f, norm) - expected).abs() < 1e-9 * expected);
        assert_eq!(transition_rate_up(&b, f, norm), 0.0);
    }

    #[test]
    fn detailed_balance_ratios() {
        let norm = RateNormalization::default();
        let mut b = cold();
        let f = 4.718e9;
        let ratio = transition_rate_up(&b, f, norm) / transition_rate_down(&b, f, norm);
        let kb_over_h = 2.083_661_9e10;
        assert!((ratio - (-f / (kb_over_h * 0.3)).exp()).abs() < 1e-6);
        assert!((ratio - 0.4701).abs() < 1e-4);
        b.temperature = PLANCK * f / (BOLTZMANN * 2f64.ln());
        let r = transition_rate_up(&b, f, norm) / transition_rate_down(&b, f, norm);
        assert!((r - 0.5).abs() < 1e-12);
        b.temperature = 1e9;
        let r = transition_rate_up(&b, f, norm) / transition_rate_down(&b, f, norm);
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qubit_frequency_normalization_scale() {
        let b = cold();
        let g = transition_rate_down(&b, 4.718e9, RateNormalization::QubitFrequency);
        assert!(g > 5e7 && g < 9e7, "{g}");
    }

    #[test]
    fn poisoning_scales_rates_quadratically() {
        let norm = RateNormalization::default();
        let b = cold();
        let s = BathParams { g_eff_scale: 0.61, ..b };
        for &f in &[4.0e9, 4.718e9, 8.001e9] {
            let r = transition_rate_down(&s, f, norm) / transition_rate_down(&b, f, norm);
            assert!((r - 0.61 * 0.61).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_current_signs() {
        let b = cold();
        let norm = RateNormalization::default();
        let f = 4.718e9;
        let (d, u) = (transition_rate_down(&b, f, norm), transition_rate_up(&b, f, norm));
        let z_eq = -(d - u) / (d + u);
        assert!(heat_current(d, u, f, z_eq).abs() < 1e-30);
        assert!((z_eq - equilibrium_inversion(f, 0.3)).abs() < 1e-12);
        let q = heat_current(d, u, f, -1.0);
        assert!((q - PLANCK * f * u).abs() < 1e-12 * q);
    }

    #[test]
    fn cooling_condition_cases() {
        assert!(cooling_condition(4.718e9, 8.001e9, 0.3, 0.3));
        assert!(!cooling_condition(4.0e9, 8.0e9, 0.3, 0.6));
        assert!(!cooling_condition(4.718e9, 8.001e9, 0.3, 0.6));
    }

    #[test]
    fn static_rhs_fixed_point() {
        let cfg = OttoConfig::refrigerator(1e7).unwrap();
        let d = DriveSample { f_q: 6e9, f_q_rate: 0.0, theta_rate: 0.0 };
        let r = cfg.rates(6e9);
        let z_eq = -r.imbalance() / r.total();
        let v = bloch_rhs_with(&BlochState::new(0.0, 0.0, z_eq), &d, &r);
        assert!(v.z.abs() < 1e-9 * r.total());
        let v = bloch_rhs_with(&BlochState::new(0.3, 0.0, z_eq), &d, &r);
        assert!((v.x + 0.15 * r.total()).abs() < 1e-6 * r.total());
        assert!((v.y - 0.3 * 2.0 * PI * 6e9).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_baths() {
        assert!(BathParams::new(-1.0, ResonatorParams::measured_cold(), 76e6, 1.0).is_err());
        assert!(BathParams::new(0.3, ResonatorParams::measured_cold(), 76e6, 0.0).is_err());
        assert!(BathParams::new(0.3, ResonatorParams::measured_cold(), 76e6, 1.2).is_err());
    }
}
