//! Gate-charge drive waveform, the resulting qubit frequency trajectory and an
//! adiabaticity diagnostic.
//!
//! Phase convention: `t = 0` sits at the hot endpoint (`q = 1`, `N_g = N_g,h`)
//! and half a period later the qubit is at the cold endpoint.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubit_model::{
    gate_charge_for_frequency, qubit_frequency, qubit_frequency_slope, ChargeBranch, GateCharge,
    ModelError, QubitParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DriveError {
    #[error("invalid drive protocol: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Shape of the normalized waveform `q(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Waveform {
    /// `q = (1 + tanh(a cos(2 pi f t)) / tanh(a)) / 2`.
    Trapezoid { a: f64 },
    /// `q = (1 + cos(2 pi f t)) / 2`; debugging aid.
    Sine,
}

impl Default for Waveform {
    fn default() -> Self {
        Waveform::Trapezoid { a: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveProtocol {
    pub f_drive: f64,
    pub waveform: Waveform,
    pub ng_c: f64,
    pub ng_h: f64,
    pub samples_per_period: usize,
}

impl DriveProtocol {
    pub fn new(
        f_drive: f64,
        waveform: Waveform,
        ng_c: f64,
        ng_h: f64,
        samples_per_period: usize,
    ) -> Result<Self, DriveError> {
        if ng_c == ng_h {
            return Err(DriveError::Invalid("ng_c and ng_h must differ".into()));
        }
        let p = Self { f_drive, waveform, ng_c, ng_h, samples_per_period };
        p.check_common()?;
        Ok(p)
    }

    /// Zero-amplitude protocol that parks the qubit at `ng` while keeping the
    /// drive period as the integration clock.
    pub fn stationary(f_drive: f64, ng: f64, samples_per_period: usize) -> Result<Self, DriveError> {
        let p = Self {
            f_drive,
            waveform: Waveform::default(),
            ng_c: ng,
            ng_h: ng,
            samples_per_period,
        };
        p.check_common()?;
        Ok(p)
    }

    /// Endpoints chosen so the qubit frequency swings between `f_cold` and
    /// `f_hot` on the `N_g < 1/2` branch.
    pub fn between_frequencies(
        qubit: &QubitParams,
        f_cold: f64,
        f_hot: f64,
        f_drive: f64,
        waveform: Waveform,
    ) -> Result<Self, DriveError> {
        let ng_c = gate_charge_for_frequency(qubit, f_cold, ChargeBranch::BelowHalf)?;
        let ng_h = gate_charge_for_frequency(qubit, f_hot, ChargeBranch::BelowHalf)?;
        Self::new(f_drive, waveform, ng_c.0, ng_h.0, 64)
    }

    fn check_common(&self) -> Result<(), DriveError> {
        if !(self.f_drive > 0.0 && self.f_drive.is_finite()) {
            return Err(DriveError::Invalid(format!("f_drive must be > 0, got {}", self.f_drive)));
        }
        if let Waveform::Trapezoid { a } = self.waveform {
            if !(a > 0.0 && a.is_finite()) {
                return Err(DriveError::Invalid(format!("sharpness a must be > 0, got {a}")));
            }
        }
        if !(self.ng_c.is_finite() && self.ng_h.is_finite()) {
            return Err(DriveError::Invalid("endpoints must be finite".into()));
        }
        if self.samples_per_period < 64 {
            return Err(DriveError::Invalid(format!(
                "samples_per_period must be >= 64, got {}",
                self.samples_per_period
            )));
        }
        Ok(())
    }

    pub fn with_f_drive(self, f_drive: f64) -> Self {
        Self { f_drive, ..self }
    }

    pub fn period(&self) -> f64 {
        1.0 / self.f_drive
    }

    pub fn is_stationary(&self) -> bool {
        self.ng_c == self.ng_h
    }

    /// Normalized waveform `q(t)` in `[0, 1]`.
    pub fn q(&self, t: f64) -> f64 {
        q_waveform(self, t)
    }

    /// `dq/dt` in 1/s.
    pub fn dq_dt(&self, t: f64) -> f64 {
        let omega = 2.0 * PI * self.f_drive;
        let phase = omega * t;
        match self.waveform {
            Waveform::Trapezoid { a } => {
                let th = (a * phase.cos()).tanh();
                -0.5 * (1.0 - th * th) * a * phase.sin() * omega / a.tanh()
            }
            Waveform::Sine => -0.5 * omega * phase.sin(),
        }
    }

    pub fn ng(&self, t: f64) -> GateCharge {
        ng_of_t(self, t)
    }

    pub fn dng_dt(&self, t: f64) -> f64 {
        dng_dt(self, t)
    }

    /// Offset charges over one period, `samples_per_period` points from `t = 0`.
    pub fn sample_ng(&self) -> Vec<(f64, f64)> {
        let n = self.samples_per_period;
        (0..n)
            .map(|k| {
                let t = self.period() * k as f64 / n as f64;
                (t, self.ng(t).0)
            })
            .collect()
    }
}

pub fn q_waveform(p: &DriveProtocol, t: f64) -> f64 {
    let phase = 2.0 * PI * p.f_drive * t;
    match p.waveform {
        Waveform::Trapezoid { a } => 0.5 * (1.0 + (a * phase.cos()).tanh() / a.tanh()),
        Waveform::Sine => 0.5 * (1.0 + phase.cos()),
    }
}

pub fn ng_of_t(p: &DriveProtocol, t: f64) -> GateCharge {
    GateCharge(p.ng_c + (p.ng_h - p.ng_c) * q_waveform(p, t))
}

pub fn dng_dt(p: &DriveProtocol, t: f64) -> f64 {
    (p.ng_h - p.ng_c) * p.dq_dt(t)
}

pub fn qubit_frequency_of_t(q: &QubitParams, p: &DriveProtocol, t: f64) -> f64 {
    qubit_frequency(q, ng_of_t(p, t))
}

/// `d f_Q / dt` in Hz/s.
pub fn qubit_frequency_rate(q: &QubitParams, p: &DriveProtocol, t: f64) -> f64 {
    qubit_frequency_slope(q, ng_of_t(p, t)) * dng_dt(p, t)
}

/// Rotation rate of the instantaneous eigenbasis, `8 E_C E_J dN_g/dt / (hbar omega_Q)^2`
/// in rad/s (equal to `d theta / dt`).
pub fn basis_rotation_rate(q: &QubitParams, p: &DriveProtocol, t: f64) -> f64 {
    let f_q = qubit_frequency_of_t(q, p, t);
    8.0 * q.ec * q.ej * dng_dt(p, t) / (f_q * f_q)
}

/// Ratio of the basis rotation rate to the qubit angular frequency. Values
/// well below one mean the qubit follows its instantaneous eigenstates.
pub fn adiabaticity_metric(q: &QubitParams, p: &DriveProtocol, t: f64) -> f64 {
    let f_q = qubit_frequency_of_t(q, p, t);
    basis_rotation_rate(q, p, t).abs() / (2.0 * PI * f_q)
}

/// Largest [`adiabaticity_metric`] over `samples` points of one period.
pub fn max_adiabaticity(q: &QubitParams, p: &DriveProtocol, samples: usize) -> f64 {
    (0..samples.max(1))
        .map(|k| adiabaticity_metric(q, p, p.period() * k as f64 / samples as f64))
        .fold(0.0, f64::max)
}
