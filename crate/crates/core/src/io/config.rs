//! Strict TOML run configuration.
//!
//! Every section is optional and defaults to the measured device, so an empty
//! file reproduces the reference refrigerator sweep. Unknown keys are rejected.

use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::quantity::{Capacitance, Frequency, Inductance, Power, Resistance, Temperature, Time};
use crate::drive::{DriveProtocol, Waveform};
use crate::filter::LclFilter;
use crate::otto::{BathParams, IntegratorSettings, OttoConfig, RateNormalization};
use crate::qubit_model::{CoupledSystem, QubitParams, ResonatorParams, ResonatorRole};
use crate::spectroscopy::{DecoherenceRates, NotchQuality, TwoToneConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config value `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(field: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Validation { field: field.to_string(), message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    OneTone,
    TwoTone,
    #[default]
    OttoSweep,
    Filter,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::Spectrum, Experiment::OneTone, Experiment::TwoTone, Experiment::OttoSweep, Experiment::Filter];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::OneTone => "one_tone",
            Experiment::TwoTone => "two_tone",
            Experiment::OttoSweep => "otto_sweep",
            Experiment::Filter => "filter",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitSection {
    pub ec: Frequency,
    pub ej: Frequency,
    /// Charge window used by the spectrum and one-tone presets.
    pub n_min: i32,
    pub n_max: i32,
}

impl Default for QubitSection {
    fn default() -> Self {
        Self { ec: Frequency::new(6.8e9), ej: Frequency::new(3.5e9), n_min: -2, n_max: 3 }
    }
}

/// Resonator and bath parameters. `HOT` only selects the defaults of
/// missing keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound = "R: BathDefaults")]
pub struct ResonatorSection<R> {
    pub f_r: Frequency,
    /// Loaded quality factor of the bath filter.
    pub q_total: f64,
    /// Bare coupling `g0 / 2 pi`.
    pub g0: Frequency,
    /// Effective coupling `g / 2 pi` used in the bath rates.
    pub coupling: Frequency,
    pub temperature: Temperature,
    pub g_eff_scale: f64,
    pub n_fock: usize,
    #[serde(skip)]
    role: PhantomData<R>,
}

/// Supplies the defaults of one bath.
pub trait BathDefaults {
    const ROLE: ResonatorRole;
    fn bath() -> BathParams;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColdRole;
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HotRole;

impl BathDefaults for ColdRole {
    const ROLE: ResonatorRole = ResonatorRole::Cold;
    fn bath() -> BathParams {
        BathParams::cold_default()
    }
}

impl BathDefaults for HotRole {
    const ROLE: ResonatorRole = ResonatorRole::Hot;
    fn bath() -> BathParams {
        BathParams::hot_default()
    }
}

pub type ColdSection = ResonatorSection<ColdRole>;
pub type HotSection = ResonatorSection<HotRole>;

impl<R: BathDefaults> Default for ResonatorSection<R> {
    fn default() -> Self {
        Self::from_bath(R::bath())
    }
}

impl<R: BathDefaults> ResonatorSection<R> {
    fn from_bath(b: BathParams) -> Self {
        Self {
            role: PhantomData,
            f_r: Frequency::new(b.resonator.f_r),
            q_total: b.resonator.q_total,
            g0: Frequency::new(b.resonator.g0),
            coupling: Frequency::new(b.coupling),
            temperature: Temperature::new(b.temperature),
            g_eff_scale: b.g_eff_scale,
            n_fock: b.resonator.n_fock,
        }
    }

    pub fn resonator(&self) -> ResonatorParams {
        let role = R::ROLE;
        ResonatorParams {
            f_r: self.f_r.value(),
            q_total: self.q_total,
            g0: self.g0.value(),
            n_fock: self.n_fock,
            role,
        }
    }

    pub fn bath(&self) -> BathParams {
        BathParams {
            temperature: self.temperature.value(),
            resonator: self.resonator(),
            coupling: self.coupling.value(),
            g_eff_scale: self.g_eff_scale,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveformKind {
    #[default]
    Trapezoid,
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub waveform: WaveformKind,
    /// Trapezoid sharpness.
    pub a: f64,
    pub samples_per_period: usize,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { waveform: WaveformKind::Trapezoid, a: 2.0, samples_per_period: 64 }
    }
}

impl DriveSection {
    pub fn waveform(&self) -> Waveform {
        match self.waveform {
            WaveformKind::Trapezoid => Waveform::Trapezoid { a: self.a },
            WaveformKind::Sine => Waveform::Sine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub ng_min: f64,
    pub ng_max: f64,
    pub ng_points: usize,
    /// Number of charge-basis levels reported.
    pub levels: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { ng_min: 0.0, ng_max: 1.0, ng_points: 201, levels: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OneToneSection {
    pub ng_min: f64,
    pub ng_max: f64,
    pub ng_points: usize,
    pub f_min: Frequency,
    pub f_max: Frequency,
    pub f_points: usize,
    pub q_loaded: f64,
    pub q_coupling: f64,
    /// Direct resonator-resonator coupling.
    pub g_tilde: Frequency,
    /// Weight of the even charge parity in the time-averaged map.
    pub p_even: f64,
}

impl Default for OneToneSection {
    fn default() -> Self {
        let n = NotchQuality::default();
        Self {
            ng_min: 0.25,
            ng_max: 0.75,
            ng_points: 51,
            f_min: Frequency::new(4.5e9),
            f_max: Frequency::new(8.3e9),
            f_points: 951,
            q_loaded: n.q_loaded,
            q_coupling: n.q_coupling,
            g_tilde: Frequency::new(0.0),
            p_even: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoToneSection {
    pub f_probe: Frequency,
    pub pump_min: Frequency,
    pub pump_max: Frequency,
    pub pump_points: usize,
    /// Offset charge of the pump traces.
    pub ng: f64,
    /// Photons per watt of pump power.
    pub pump_photon_scale: f64,
    pub powers: Vec<Power>,
    /// `Gamma_1 / 2 pi`.
    pub gamma1: Frequency,
    /// `Gamma_2 / 2 pi`.
    pub gamma2: Frequency,
    /// Relative amplitude of the uniform trace noise.
    pub noise: f64,
}

impl Default for TwoToneSection {
    fn default() -> Self {
        Self {
            f_probe: Frequency::new(8.001e9),
            pump_min: Frequency::new(3.3e9),
            pump_max: Frequency::new(3.7e9),
            pump_points: 401,
            ng: 0.5,
            pump_photon_scale: 1.5e12,
            powers: [2e-15, 4e-15, 6e-15, 8e-15, 10e-15].into_iter().map(Power::new).collect(),
            gamma1: Frequency::new(20e6),
            gamma2: Frequency::new(24e6),
            noise: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationKind {
    #[default]
    ReferenceTime,
    QubitFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OttoSection {
    pub f_min: Frequency,
    pub f_max: Frequency,
    /// Log-spaced drive frequencies.
    pub points: usize,
    pub normalization: NormalizationKind,
    /// Reference time for the `reference_time` normalization.
    pub rate_tau: Time,
    pub max_phase_step: f64,
    pub tolerance: f64,
    pub max_cycles: usize,
}

impl Default for OttoSection {
    fn default() -> Self {
        let s = IntegratorSettings::default();
        Self {
            f_min: Frequency::new(1e6),
            f_max: Frequency::new(2.3e9),
            points: 60,
            normalization: NormalizationKind::ReferenceTime,
            rate_tau: Time::new(1e-9),
            max_phase_step: s.max_phase_step,
            tolerance: s.tolerance,
            max_cycles: s.max_cycles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSection {
    pub inductance: Inductance,
    pub capacitance: Capacitance,
    pub z0: Resistance,
    pub f_min: Frequency,
    pub f_max: Frequency,
    pub points: usize,
}

impl Default for FilterSection {
    fn default() -> Self {
        let f = LclFilter::gate_line();
        Self {
            inductance: Inductance::new(f.inductance),
            capacitance: Capacitance::new(f.capacitance),
            z0: Resistance::new(f.z0),
            f_min: Frequency::new(0.1e9),
            f_max: Frequency::new(14e9),
            points: 1391,
        }
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub qubit: QubitSection,
    pub cold: ColdSection,
    pub hot: HotSection,
    pub drive: DriveSection,
    pub spectrum: SpectrumSection,
    pub one_tone: OneToneSection,
    pub two_tone: TwoToneSection,
    pub otto_sweep: OttoSection,
    pub filter: FilterSection,
}


/// Parses and validates a TOML document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        ConfigError::Parse { line, column, message: e.message().to_string() }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

/// 1-based line and column of byte offset `pos`.
fn line_col(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn check_grid(field: &str, lo: f64, hi: f64, points: usize) -> Result<(), ConfigError> {
    if points < 2 {
        return Err(invalid(field, format!("need at least 2 points, got {points}")));
    }
    if !(lo < hi) {
        return Err(invalid(field, format!("range must be increasing, got {lo} .. {hi}")));
    }
    Ok(())
}

/// `points` evenly spaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

/// `points` log-spaced values in `[lo, hi]`, endpoints exact.
pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == points => hi,
            _ => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect()
}

impl RunConfig {
    /// Canonical TOML text; the config hash is computed from it.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }

    /// First 12 hex digits of the SHA-256 of [`RunConfig::to_toml`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(digest)[..12].to_string()
    }

    pub fn qubit_params(&self) -> QubitParams {
        QubitParams { ec: self.qubit.ec.value(), ej: self.qubit.ej.value(), n_min: self.qubit.n_min, n_max: self.qubit.n_max }
    }

    pub fn coupled_system(&self) -> CoupledSystem {
        let mut sys = CoupledSystem::new(
            self.qubit_params(),
            self.cold.resonator(),
            self.hot.resonator(),
        );
        sys.g_tilde = self.one_tone.g_tilde.value();
        sys
    }

    pub fn notch_quality(&self) -> NotchQuality {
        NotchQuality { q_loaded: self.one_tone.q_loaded, q_coupling: self.one_tone.q_coupling }
    }

    pub fn one_tone_grids(&self) -> (Vec<f64>, Vec<f64>) {
        let o = &self.one_tone;
        (linspace(o.ng_min, o.ng_max, o.ng_points), linspace(o.f_min.value(), o.f_max.value(), o.f_points))
    }

    pub fn two_tone_config(&self) -> TwoToneConfig {
        let t = &self.two_tone;
        TwoToneConfig {
            f_probe: t.f_probe.value(),
            pump_grid: linspace(t.pump_min.value(), t.pump_max.value(), t.pump_points),
            ng_grid: vec![t.ng],
            pump_photon_scale: t.pump_photon_scale,
            p_pump_grid: t.powers.iter().map(|p| p.value()).collect(),
        }
    }

    /// Rates in rad/s.
    pub fn decoherence_rates(&self) -> Result<DecoherenceRates, ConfigError> {
        let tau = 2.0 * std::f64::consts::PI;
        DecoherenceRates::new(tau * self.two_tone.gamma1.value(), tau * self.two_tone.gamma2.value())
            .map_err(|e| invalid("two_tone.gamma2", e))
    }

    /// Two-level refrigerator driven between the two resonator frequencies.
    /// The sweep replaces `f_drive`.
    pub fn otto_config(&self) -> Result<OttoConfig, ConfigError> {
        let qubit = QubitParams::two_level(self.qubit.ec.value(), self.qubit.ej.value())
            .map_err(|e| invalid("qubit", e))?;
        let cold = self.cold.bath();
        let hot = self.hot.bath();
        let mut protocol = DriveProtocol::between_frequencies(
            &qubit,
            cold.resonator.f_r,
            hot.resonator.f_r,
            self.otto_sweep.f_min.value(),
            self.drive.waveform(),
        )
        .map_err(|e| invalid("drive", e))?;
        protocol.samples_per_period = self.drive.samples_per_period;
        let o = &self.otto_sweep;
        let normalization = match o.normalization {
            NormalizationKind::ReferenceTime => RateNormalization::ReferenceTime { tau: o.rate_tau.value() },
            NormalizationKind::QubitFrequency => RateNormalization::QubitFrequency,
        };
        let integrator = IntegratorSettings {
            max_phase_step: o.max_phase_step,
            tolerance: o.tolerance,
            max_cycles: o.max_cycles,
            ..IntegratorSettings::default()
        };
        let cfg = OttoConfig {
            qubit,
            cold,
            hot,
            protocol,
            normalization,
            integrator,
            initial: crate::otto::BlochState::GROUND,
        };
        cfg.validate().map_err(|e| invalid("otto_sweep", e))?;
        Ok(cfg)
    }

    pub fn otto_grid(&self) -> Vec<f64> {
        logspace(self.otto_sweep.f_min.value(), self.otto_sweep.f_max.value(), self.otto_sweep.points)
    }

    pub fn lcl_filter(&self) -> Result<LclFilter, ConfigError> {
        let f = &self.filter;
        LclFilter::new(f.inductance.value(), f.capacitance.value(), f.z0.value()).map_err(|e| invalid("filter", e))
    }

    pub fn filter_grid(&self) -> Vec<f64> {
        linspace(self.filter.f_min.value(), self.filter.f_max.value(), self.filter.points)
    }

    /// Checks every section, naming the first offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.qubit_params().validate().map_err(|e| invalid("qubit", e))?;
        self.cold.bath().validate().map_err(|e| invalid("cold", e))?;
        self.hot.bath().validate().map_err(|e| invalid("hot", e))?;
        if !(self.cold.f_r.value() < self.hot.f_r.value()) {
            return Err(invalid("cold.f_r", "cold resonator must lie below the hot resonator"));
        }
        if self.drive.samples_per_period < 64 {
            return Err(invalid("drive.samples_per_period", "must be >= 64"));
        }
        if !(self.drive.a > 0.0 && self.drive.a.is_finite()) {
            return Err(invalid("drive.a", "sharpness must be > 0"));
        }

        let s = &self.spectrum;
        check_grid("spectrum.ng", s.ng_min, s.ng_max, s.ng_points)?;
        if s.levels == 0 || s.levels > self.qubit_params().n_states() {
            return Err(invalid("spectrum.levels", "must lie between 1 and the number of charge states"));
        }

        let o = &self.one_tone;
        check_grid("one_tone.ng", o.ng_min, o.ng_max, o.ng_points)?;
        check_grid("one_tone.f", o.f_min.value(), o.f_max.value(), o.f_points)?;
        if !(0.0..=1.0).contains(&o.p_even) {
            return Err(invalid("one_tone.p_even", "must lie in [0, 1]"));
        }
        if !(o.g_tilde.value() >= 0.0) {
            return Err(invalid("one_tone.g_tilde", "must be >= 0"));
        }
        crate::spectroscopy::NotchResonance::new(self.hot.f_r.value(), o.q_loaded, o.q_coupling)
            .map_err(|e| invalid("one_tone.q_loaded", e))?;

        let t = &self.two_tone;
        check_grid("two_tone.pump", t.pump_min.value(), t.pump_max.value(), t.pump_points)?;
        if t.pump_points < 5 {
            return Err(invalid("two_tone.pump_points", "need at least 5 points for a fit"));
        }
        if t.powers.len() < 3 {
            return Err(invalid("two_tone.powers", "need at least 3 pump powers"));
        }
        if !(0.0..0.5).contains(&t.noise) {
            return Err(invalid("two_tone.noise", "must lie in [0, 0.5)"));
        }
        self.two_tone_config().validate().map_err(|e| invalid("two_tone", e))?;
        self.decoherence_rates()?;

        let ot = &self.otto_sweep;
        if !(ot.f_min.value() > 0.0) {
            return Err(invalid("otto_sweep.f_min", "must be > 0"));
        }
        if ot.points < 2 || !(ot.f_min.value() < ot.f_max.value()) {
            return Err(invalid("otto_sweep", "need at least 2 increasing drive frequencies"));
        }
        if !(ot.rate_tau.value() > 0.0) {
            return Err(invalid("otto_sweep.rate_tau", "must be > 0"));
        }
        self.otto_config()?;

        let f = &self.filter;
        check_grid("filter.f", f.f_min.value(), f.f_max.value(), f.points)?;
        if !(f.f_min.value() > 0.0) {
            return Err(invalid("filter.f_min", "must be > 0"));
        }
        self.lcl_filter()?;
        Ok(())
    }
}
