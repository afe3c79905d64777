//! ABCD (chain) matrices of two-port networks and the LCL gate-line filter.
//!
//! The capacitor impedance is the physical `1 / (j omega C)`. Magnitudes of
//! `S21` are insensitive to that sign choice.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("shunt element with zero impedance short-circuits the network")]
    ShuntShortCircuit,
    #[error("S21 denominator vanishes for this network")]
    SingularNetwork,
    #[error("invalid filter parameter: {0}")]
    Invalid(String),
}

/// `[[a, b], [c, d]]` with `b` in ohm and `c` in siemens.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortAbcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPortAbcd {
    pub const IDENTITY: TwoPortAbcd = TwoPortAbcd {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }
}

impl Mul for TwoPortAbcd {
    type Output = TwoPortAbcd;

    fn mul(self, r: TwoPortAbcd) -> TwoPortAbcd {
        TwoPortAbcd {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

pub fn series_element(z: Complex64) -> TwoPortAbcd {
    TwoPortAbcd { b: z, ..TwoPortAbcd::IDENTITY }
}

pub fn shunt_element(z: Complex64) -> Result<TwoPortAbcd, FilterError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(FilterError::ShuntShortCircuit);
    }
    Ok(TwoPortAbcd { c: z.inv(), ..TwoPortAbcd::IDENTITY })
}

/// Ordered product, first element nearest port 1.
pub fn cascade<'a, I>(elements: I) -> TwoPortAbcd
where
    I: IntoIterator<Item = &'a TwoPortAbcd>,
{
    elements.into_iter().fold(TwoPortAbcd::IDENTITY, |acc, e| acc * *e)
}

/// `S21 = 2 / (A + B/Z0 + C Z0 + D)` for equal real reference impedances.
pub fn s21(net: &TwoPortAbcd, z0: f64) -> Result<Complex64, FilterError> {
    let den = net.a + net.b / z0 + net.c * z0 + net.d;
    if den.norm() == 0.0 || !den.is_finite() {
        return Err(FilterError::SingularNetwork);
    }
    Ok(Complex64::new(2.0, 0.0) / den)
}

pub fn to_db(s: Complex64) -> f64 {
    20.0 * s.norm().log10()
}

/// Series L, shunt C, series L low-pass section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LclFilter {
    /// Each series inductance (H).
    pub inductance: f64,
    /// Shunt capacitance (F).
    pub capacitance: f64,
    /// Reference impedance (ohm).
    pub z0: f64,
}

impl LclFilter {
    pub fn new(inductance: f64, capacitance: f64, z0: f64) -> Result<Self, FilterError> {
        for (name, v) in [("inductance", inductance), ("capacitance", capacitance), ("z0", z0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FilterError::Invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self { inductance, capacitance, z0 })
    }

    /// 5.9 nH, 1.7 pF, 50 ohm.
    pub fn gate_line() -> Self {
        Self { inductance: 5.9e-9, capacitance: 1.7e-12, z0: 50.0 }
    }

    pub fn z_l(&self, f: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * f * self.inductance)
    }

    pub fn z_c(&self, f: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * PI * f * self.capacitance).inv()
    }

    /// ABCD matrix of the three-element cascade at `f`.
    pub fn abcd(&self, f: f64) -> Result<TwoPortAbcd, FilterError> {
        let l = series_element(self.z_l(f));
        let c = shunt_element(self.z_c(f))?;
        Ok(cascade(&[l, c, l]))
    }
}

/// Closed-form transmission
/// `2 Z0 Zc / (2 Z0 (ZL + Zc) + 2 ZL Zc + ZL^2 + Z0^2)`.
pub fn lcl_s21(f: f64, filt: &LclFilter) -> Complex64 {
    let zl = filt.z_l(f);
    let zc = filt.z_c(f);
    let z0 = filt.z0;
    let num = zc * (2.0 * z0);
    let den = (zl + zc) * (2.0 * z0) + zl * zc * 2.0 + zl * zl + z0 * z0;
    num / den
}

/// `sqrt(2 / (L C)) / (2 pi)` in Hz.
pub fn lcl_cutoff(filt: &LclFilter) -> f64 {
    (2.0 / (filt.inductance * filt.capacitance)).sqrt() / (2.0 * PI)
}
