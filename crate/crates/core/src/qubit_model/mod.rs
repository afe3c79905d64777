//! Cooper-pair box and coupled qubit + two-resonator Hamiltonians.
//!
//! Energies are `E/h` in Hz throughout. The charge basis uses the convention
//! `sigma_z |0> = +|0>`. In the two-level eigenbasis used for the coupled
//! Hamiltonian, index 0 is the ground state and `sigma_z = diag(+1, -1)`, so
//! `H_Q = -(f_Q / 2) sigma_z` and the interaction reads
//! `g_0 (a + a^dag) [1 - 2 N_g - cos(theta) sigma_z + sin(theta) sigma_x]`.

mod eigen;

pub use eigen::{
    eigensolve_hermitian, eigensolve_hermitian_with, eigensolve_symmetric, Eigen, EigenError,
    JacobiSettings,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{ELEMENTARY_CHARGE, PLANCK};

/// Default cap on the dimension of the coupled Hamiltonian.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("target frequency {target:.6e} Hz is below the qubit frequency floor E_J/h = {floor:.6e} Hz")]
    TargetBelowMinimum { target: f64, floor: f64 },
    #[error("Hamiltonian dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Charging and Josephson energies (as frequencies) with the charge-state window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    /// `E_C / h` in Hz.
    pub ec: f64,
    /// `E_J / h` in Hz.
    pub ej: f64,
    pub n_min: i32,
    pub n_max: i32,
}

impl QubitParams {
    pub fn new(ec: f64, ej: f64, n_min: i32, n_max: i32) -> Result<Self, ModelError> {
        let q = Self { ec, ej, n_min, n_max };
        q.validate()?;
        Ok(q)
    }

    /// Six charge states `N = -2..=3`, enough to converge the lowest three levels.
    pub fn charge_qubit(ec: f64, ej: f64) -> Result<Self, ModelError> {
        Self::new(ec, ej, -2, 3)
    }

    /// Only `|0>` and `|1>`.
    pub fn two_level(ec: f64, ej: f64) -> Result<Self, ModelError> {
        Self::new(ec, ej, 0, 1)
    }

    /// `E_C/h = 6.8 GHz`, `E_J/h = 3.5 GHz`, six charge states.
    pub fn measured_device() -> Self {
        Self { ec: 6.8e9, ej: 3.5e9, n_min: -2, n_max: 3 }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.ec > 0.0 && self.ec.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("ec must be > 0, got {}", self.ec)));
        }
        if !(self.ej > 0.0 && self.ej.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("ej must be > 0, got {}", self.ej)));
        }
        if self.n_max <= self.n_min {
            return Err(ModelError::InvalidParameter(format!(
                "charge window needs at least two states, got {}..={}",
                self.n_min, self.n_max
            )));
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    /// Same energies with the charge window moved by `shift` states.
    pub fn shifted_window(&self, shift: i32) -> Self {
        Self { n_min: self.n_min + shift, n_max: self.n_max + shift, ..*self }
    }
}

/// Dimensionless gate-induced offset charge `N_g = C_gate V_gate / 2e`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GateCharge(pub f64);

impl GateCharge {
    pub const DEGENERACY: GateCharge = GateCharge(0.5);

    pub fn value(self) -> f64 {
        self.0
    }

    /// Offset charge from a gate capacitance (F) and voltage (V).
    pub fn from_gate(c_gate: f64, v_gate: f64) -> Self {
        GateCharge(c_gate * v_gate / (2.0 * ELEMENTARY_CHARGE))
    }
}

impl From<f64> for GateCharge {
    fn from(v: f64) -> Self {
        GateCharge(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonatorRole {
    Cold,
    Hot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonatorParams {
    pub f_r: f64,
    /// Loaded quality factor.
    pub q_total: f64,
    /// Bare coupling `g_0 / 2 pi` in Hz.
    pub g0: f64,
    /// Photon-number truncation (number of Fock states kept).
    pub n_fock: usize,
    pub role: ResonatorRole,
}

impl ResonatorParams {
    pub fn new(
        f_r: f64,
        q_total: f64,
        g0: f64,
        n_fock: usize,
        role: ResonatorRole,
    ) -> Result<Self, ModelError> {
        let r = Self { f_r, q_total, g0, n_fock, role };
        r.validate()?;
        Ok(r)
    }

    /// Low-frequency resonator of the measured device: 4.718 GHz, `g_0/2pi = 140 MHz`.
    pub fn measured_cold() -> Self {
        Self { f_r: 4.718e9, q_total: 2.0, g0: 140e6, n_fock: 5, role: ResonatorRole::Cold }
    }

    /// High-frequency resonator of the measured device: 8.001 GHz, `g_0/2pi = 250 MHz`.
    pub fn measured_hot() -> Self {
        Self { f_r: 8.001e9, q_total: 2.0, g0: 250e6, n_fock: 5, role: ResonatorRole::Hot }
    }

    pub fn with_g0(self, g0: f64) -> Self {
        Self { g0, ..self }
    }

    pub fn with_n_fock(self, n_fock: usize) -> Self {
        Self { n_fock, ..self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.f_r > 0.0 && self.f_r.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("f_r must be > 0, got {}", self.f_r)));
        }
        if !(self.q_total > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "q_total must be > 0, got {}",
                self.q_total
            )));
        }
        if !(self.g0 >= 0.0 && self.g0.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("g0 must be >= 0, got {}", self.g0)));
        }
        if self.n_fock < 2 {
            return Err(ModelError::InvalidParameter(format!(
                "n_fock must be >= 2, got {}",
                self.n_fock
            )));
        }
        Ok(())
    }
}

/// Capacitive coupler geometry entering the bare coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingGeometry {
    /// Coupler-island capacitance `C_i` (F).
    pub c_coupler: f64,
    /// Total island capacitance `C_Sigma` (F).
    pub c_sigma: f64,
    /// Gate capacitance (F).
    pub c_gate: f64,
    /// Resonator length `l_i` (m).
    pub resonator_length: f64,
    /// Capacitance per unit length (F/m).
    pub cap_per_length: f64,
}

impl CouplingGeometry {
    pub fn new(
        c_coupler: f64,
        c_sigma: f64,
        c_gate: f64,
        resonator_length: f64,
        cap_per_length: f64,
    ) -> Result<Self, ModelError> {
        let g = Self { c_coupler, c_sigma, c_gate, resonator_length, cap_per_length };
        for (name, v) in [
            ("c_coupler", c_coupler),
            ("c_sigma", c_sigma),
            ("c_gate", c_gate),
            ("resonator_length", resonator_length),
            ("cap_per_length", cap_per_length),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if c_coupler >= c_sigma {
            return Err(ModelError::InvalidParameter(format!(
                "c_coupler ({c_coupler:e}) must be smaller than c_sigma ({c_sigma:e})"
            )));
        }
        Ok(g)
    }

    /// `C_i / C_Sigma`.
    pub fn capacitance_ratio(&self) -> f64 {
        self.c_coupler / self.c_sigma
    }
}

/// Energy levels relative to the ground state, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub labels: Option<Vec<String>>,
}

impl Spectrum {
    pub fn from_levels(mut levels: Vec<f64>) -> Self {
        levels.sort_by(f64::total_cmp);
        let e0 = levels.first().copied().unwrap_or(0.0);
        Spectrum { eigenvalues: levels.into_iter().map(|e| e - e0).collect(), labels: None }
    }

    pub fn transition(&self, k: usize) -> Option<f64> {
        self.eigenvalues.get(k).copied()
    }
}

/// Tridiagonal charge-basis Hamiltonian (Hz): `4 E_C (N - N_g)^2` on the
/// diagonal and `-E_J/2` between neighbouring charge states.
pub fn build_charge_hamiltonian(q: &QubitParams, g: GateCharge) -> DMatrix<f64> {
    let n = q.n_states();
    let mut h = DMatrix::zeros(n, n);
    for (k, charge) in (q.n_min..=q.n_max).enumerate() {
        let d = charge as f64 - g.0;
        h[(k, k)] = 4.0 * q.ec * d * d;
        if k + 1 < n {
            h[(k, k + 1)] = -q.ej / 2.0;
            h[(k + 1, k)] = -q.ej / 2.0;
        }
    }
    h
}

/// Full charge-basis spectrum relative to the ground level.
pub fn charge_spectrum(q: &QubitParams, g: GateCharge) -> Result<Spectrum, ModelError> {
    let e = eigensolve_symmetric(&build_charge_hamiltonian(q, g))?;
    Ok(Spectrum::from_levels(e.values))
}

/// Two-level qubit frequency `sqrt(16 E_C^2 (1 - 2 N_g)^2 + E_J^2)` in Hz.
pub fn qubit_frequency(q: &QubitParams, g: GateCharge) -> f64 {
    let u = 4.0 * q.ec * (1.0 - 2.0 * g.0);
    u.hypot(q.ej)
}

/// Derivative of [`qubit_frequency`] with respect to `N_g` (Hz per unit charge).
pub fn qubit_frequency_slope(q: &QubitParams, g: GateCharge) -> f64 {
    let u = 1.0 - 2.0 * g.0;
    -32.0 * q.ec * q.ec * u / qubit_frequency(q, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeBranch {
    BelowHalf,
    AboveHalf,
}

/// Offset charge at which the two-level qubit frequency equals `f_target`.
pub fn gate_charge_for_frequency(
    q: &QubitParams,
    f_target: f64,
    branch: ChargeBranch,
) -> Result<GateCharge, ModelError> {
    if !(f_target >= q.ej) {
        return Err(ModelError::TargetBelowMinimum { target: f_target, floor: q.ej });
    }
    let root = (f_target * f_target - q.ej * q.ej).sqrt() / (4.0 * q.ec);
    let ng = match branch {
        ChargeBranch::BelowHalf => 0.5 * (1.0 - root),
        ChargeBranch::AboveHalf => 0.5 * (1.0 + root),
    };
    Ok(GateCharge(ng))
}

/// Mixing angle `theta = atan2(E_J, 4 E_C (1 - 2 N_g))`, in `(0, pi)`.
pub fn mixing_angle(q: &QubitParams, g: GateCharge) -> f64 {
    q.ej.atan2(4.0 * q.ec * (1.0 - 2.0 * g.0))
}

/// Bare coupling `e (C_i / C_Sigma) sqrt(h f_r / (l c))`, returned as a
/// frequency (the energy divided by `h`).
pub fn bare_coupling(geom: &CouplingGeometry, f_r: f64) -> f64 {
    let v_zpf = (PLANCK * f_r / (geom.resonator_length * geom.cap_per_length)).sqrt();
    ELEMENTARY_CHARGE * geom.capacitance_ratio() * v_zpf / PLANCK
}

/// Product basis `|qubit> (x) |n_cold> (x) |n_hot>` of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductBasis {
    pub n_cold: usize,
    pub n_hot: usize,
}

impl ProductBasis {
    pub fn dim(&self) -> usize {
        2 * self.n_cold * self.n_hot
    }

    /// `qubit`: 0 = ground, 1 = excited.
    pub fn index(&self, qubit: usize, n_c: usize, n_h: usize) -> usize {
        (qubit * self.n_cold + n_c) * self.n_hot + n_h
    }

    pub fn decompose(&self, idx: usize) -> (usize, usize, usize) {
        let n_h = idx % self.n_hot;
        let rest = idx / self.n_hot;
        (rest / self.n_cold, rest % self.n_cold, n_h)
    }
}

/// Coupled qubit + cold + hot resonator model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledSystem {
    pub qubit: QubitParams,
    pub cold: ResonatorParams,
    pub hot: ResonatorParams,
    /// Direct resonator-resonator coupling `g~` (Hz).
    pub g_tilde: f64,
    pub dimension_cap: usize,
}

impl CoupledSystem {
    pub fn new(qubit: QubitParams, cold: ResonatorParams, hot: ResonatorParams) -> Self {
        Self { qubit, cold, hot, g_tilde: 0.0, dimension_cap: DEFAULT_DIMENSION_CAP }
    }

    /// Parameters of the measured device with `g~ = 0`.
    pub fn measured_device() -> Self {
        Self::new(
            QubitParams::measured_device(),
            ResonatorParams::measured_cold(),
            ResonatorParams::measured_hot(),
        )
    }

    pub fn basis(&self) -> ProductBasis {
        ProductBasis { n_cold: self.cold.n_fock, n_hot: self.hot.n_fock }
    }

    pub fn resonator(&self, role: ResonatorRole) -> &ResonatorParams {
        match role {
            ResonatorRole::Cold => &self.cold,
            ResonatorRole::Hot => &self.hot,
        }
    }

    pub fn hamiltonian(&self, g: GateCharge) -> Result<DMatrix<Complex64>, ModelError> {
        build_full_hamiltonian_with_cap(
            &self.qubit,
            &self.cold,
            &self.hot,
            g,
            self.g_tilde,
            self.dimension_cap,
        )
    }

    pub fn diagonalize(&self, g: GateCharge) -> Result<Eigen, ModelError> {
        Ok(eigensolve_hermitian(&self.hamiltonian(g)?)?)
    }

    /// Transition frequencies out of the dressed ground state.
    pub fn spectrum(&self, g: GateCharge) -> Result<Spectrum, ModelError> {
        Ok(Spectrum::from_levels(self.diagonalize(g)?.values))
    }
}

pub fn build_full_hamiltonian(
    q: &QubitParams,
    res_c: &ResonatorParams,
    res_h: &ResonatorParams,
    g: GateCharge,
    g_tilde: f64,
) -> Result<DMatrix<Complex64>, ModelError> {
    build_full_hamiltonian_with_cap(q, res_c, res_h, g, g_tilde, DEFAULT_DIMENSION_CAP)
}

/// Qubit (two-level, eigenbasis) + two resonators + interaction terms.
pub fn build_full_hamiltonian_with_cap(
    q: &QubitParams,
    res_c: &ResonatorParams,
    res_h: &ResonatorParams,
    g: GateCharge,
    g_tilde: f64,
    cap: usize,
) -> Result<DMatrix<Complex64>, ModelError> {
    q.validate()?;
    res_c.validate()?;
    res_h.validate()?;
    let basis = ProductBasis { n_cold: res_c.n_fock, n_hot: res_h.n_fock };
    let dim = res_c
        .n_fock
        .checked_mul(res_h.n_fock)
        .and_then(|d| d.checked_mul(2))
        .unwrap_or(usize::MAX);
    if dim > cap {
        return Err(ModelError::DimensionOverflow { dim, cap });
    }

    let f_q = qubit_frequency(q, g);
    let theta = mixing_angle(q, g);
    let (sin_t, cos_t) = theta.sin_cos();
    let offset = 1.0 - 2.0 * g.0;
    // Qubit operator of the interaction in the eigenbasis (index 0 = ground).
    let coupling_op = [[offset - cos_t, sin_t], [sin_t, offset + cos_t]];
    let qubit_energy = [-0.5 * f_q, 0.5 * f_q];

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..2 {
        for nc in 0..basis.n_cold {
            for nh in 0..basis.n_hot {
                let i = basis.index(s, nc, nh);
                h[(i, i)] += qubit_energy[s] + res_c.f_r * nc as f64 + res_h.f_r * nh as f64;

                for (s2, &op) in coupling_op[s].iter().enumerate() {
                    // a_c^dag: |nc> -> |nc+1>
                    if nc + 1 < basis.n_cold {
                        let j = basis.index(s2, nc + 1, nh);
                        let amp = res_c.g0 * op * ((nc + 1) as f64).sqrt();
                        h[(j, i)] += amp;
                        h[(i, j)] += amp;
                    }
                    if nh + 1 < basis.n_hot {
                        let j = basis.index(s2, nc, nh + 1);
                        let amp = res_h.g0 * op * ((nh + 1) as f64).sqrt();
                        h[(j, i)] += amp;
                        h[(i, j)] += amp;
                    }
                }

                // g~ (a_c^dag a_h + h.c.)
                if g_tilde != 0.0 && nh >= 1 && nc + 1 < basis.n_cold {
                    let j = basis.index(s, nc + 1, nh - 1);
                    let amp = g_tilde * ((nc + 1) as f64).sqrt() * (nh as f64).sqrt();
                    h[(j, i)] += amp;
                    h[(i, j)] += amp;
                }
            }
        }
    }
    Ok(h.map(|x| Complex64::new(x, 0.0)))
}

/// Minimum splitting of the two dressed levels around one resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidedCrossing {
    pub ng: GateCharge,
    pub gap: f64,
    /// Mean of the two dressed transition frequencies at the minimum.
    pub center: f64,
}

/// Splitting of the two dressed levels that carry the most weight on the bare
/// single-excitation pair `|g, 1_role>`, `|e, 0>` at offset charge `g`.
/// Returns `(gap, mean transition frequency)`.
pub fn dressed_splitting(
    sys: &CoupledSystem,
    role: ResonatorRole,
    g: GateCharge,
) -> Result<(f64, f64), ModelError> {
    let eig = sys.diagonalize(g)?;
    let basis = sys.basis();
    let photon = match role {
        ResonatorRole::Cold => basis.index(0, 1, 0),
        ResonatorRole::Hot => basis.index(0, 0, 1),
    };
    let excited = basis.index(1, 0, 0);
    let mut weights: Vec<(f64, usize)> = (1..eig.dim())
        .map(|k| {
            let w = eig.vectors[(photon, k)].norm_sqr() + eig.vectors[(excited, k)].norm_sqr();
            (w, k)
        })
        .collect();
    weights.sort_by(|a, b| b.0.total_cmp(&a.0));
    let e0 = eig.values[0];
    let a = eig.values[weights[0].1] - e0;
    let b = eig.values[weights[1].1] - e0;
    Ok(((a - b).abs(), 0.5 * (a + b)))
}

/// Locate the avoided crossing with the `role` resonator by a grid sweep
/// over `[ng_lo, ng_hi]` followed by golden-section refinement.
pub fn find_avoided_crossing(
    sys: &CoupledSystem,
    role: ResonatorRole,
    ng_lo: f64,
    ng_hi: f64,
    points: usize,
) -> Result<AvoidedCrossing, ModelError> {
    if points < 3 || !(ng_hi > ng_lo) {
        return Err(ModelError::InvalidParameter(
            "avoided-crossing sweep needs >= 3 points over a non-empty range".into(),
        ));
    }
    let step = (ng_hi - ng_lo) / (points - 1) as f64;
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..points {
        let (gap, _) = dressed_splitting(sys, role, GateCharge(ng_lo + step * k as f64))?;
        if gap < best.0 {
            best = (gap, k);
        }
    }
    let k = best.1;
    let mut a = ng_lo + step * k.saturating_sub(1) as f64;
    let mut b = ng_lo + step * (k + 1).min(points - 1) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let gap_at = |x: f64| dressed_splitting(sys, role, GateCharge(x)).map(|v| v.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    while (b - a) > 1e-10 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap_at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap_at(x2)?;
        }
    }
    let ng = GateCharge(0.5 * (a + b));
    let (gap, center) = dressed_splitting(sys, role, ng)?;
    Ok(AvoidedCrossing { ng, gap, center })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn device_two_level() -> QubitParams {
        QubitParams::two_level(6.8e9, 3.5e9).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn charge_hamiltonian_at_degeneracy() {
        let h = build_charge_hamiltonian(&device_two_level(), GateCharge(0.5));
        assert_eq!(h[(0, 0)], 6.8e9);
        assert_eq!(h[(1, 1)], 6.8e9);
        assert_eq!(h[(0, 1)], -1.75e9);
        assert_eq!(h[(1, 0)], -1.75e9);
        let s = charge_spectrum(&device_two_level(), GateCharge(0.5)).unwrap();
        assert!(rel(s.eigenvalues[1], 3.5e9) < 1e-12);
    }

    #[test]
    fn six_states_close_to_two_level_at_degeneracy() {
        let s = charge_spectrum(&QubitParams::measured_device(), GateCharge(0.5)).unwrap();
        assert!(rel(s.eigenvalues[1], 3.5e9) < 0.01, "{}", s.eigenvalues[1]);
    }

    #[test]
    fn qubit_frequency_examples() {
        let q = device_two_level();
        assert_eq!(qubit_frequency(&q, GateCharge(0.5)), 3.5e9);
        // sqrt(27.2^2 + 3.5^2) GHz
        assert!(rel(qubit_frequency(&q, GateCharge(0.0)), 27.424_259_333e9) < 1e-9);
        assert!(rel(qubit_frequency(&q, GateCharge(0.4418)), 4.718e9) < 1e-3);
    }

    #[test]
    fn gate_charge_inversion() {
        let q = device_two_level();
        let c = gate_charge_for_frequency(&q, 4.718e9, ChargeBranch::BelowHalf).unwrap();
        assert!((c.0 - 0.4418).abs() < 1e-4, "{}", c.0);
        let h = gate_charge_for_frequency(&q, 8.001e9, ChargeBranch::BelowHalf).unwrap();
        assert!((h.0 - 0.3677).abs() < 1e-4, "{}", h.0);
        assert_eq!(gate_charge_for_frequency(&q, 3.5e9, ChargeBranch::AboveHalf).unwrap().0, 0.5);
        assert!(matches!(
            gate_charge_for_frequency(&q, 3.0e9, ChargeBranch::BelowHalf),
            Err(ModelError::TargetBelowMinimum { .. })
        ));
    }

    #[test]
    fn mixing_angle_examples() {
        let q = device_two_level();
        let t = mixing_angle(&q, GateCharge(0.5));
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let h = gate_charge_for_frequency(&q, 8.001e9, ChargeBranch::BelowHalf).unwrap();
        assert!((mixing_angle(&q, h).sin() - 3.5 / 8.001).abs() < 1e-12);
        let c = gate_charge_for_frequency(&q, 4.718e9, ChargeBranch::BelowHalf).unwrap();
        assert!((mixing_angle(&q, c).sin() - 0.7418).abs() < 1e-4);
    }

    #[test]
    fn bare_coupling_scalings() {
        let geom = CouplingGeometry::new(460e-18, 2.7e-15, 5e-18, 3.7e-3, 1.6e-10).unwrap();
        assert!((geom.capacitance_ratio() - 0.1704).abs() < 1e-4);
        let g = bare_coupling(&geom, 8e9);
        let doubled = CouplingGeometry { c_coupler: 920e-18, ..geom };
        assert!(rel(bare_coupling(&doubled, 8e9), 2.0 * g) < 1e-14);
        assert!(rel(bare_coupling(&geom, 32e9), 2.0 * g) < 1e-14);
        assert!(CouplingGeometry::new(3e-15, 2.7e-15, 5e-18, 3.7e-3, 1.6e-10).is_err());
    }

    #[test]
    fn decoupled_limit_is_sum_of_ladders() {
        let q = device_two_level();
        let c = ResonatorParams::measured_cold().with_g0(0.0).with_n_fock(3);
        let h = ResonatorParams::measured_hot().with_g0(0.0).with_n_fock(3);
        let g = GateCharge(0.42);
        let sys = CoupledSystem::new(q, c, h);
        let spec = sys.spectrum(g).unwrap();
        let f_q = qubit_frequency(&q, g);
        let mut expected = Vec::new();
        for s in 0..2 {
            for nc in 0..3 {
                for nh in 0..3 {
                    expected.push(f_q * s as f64 + c.f_r * nc as f64 + h.f_r * nh as f64);
                }
            }
        }
        expected.sort_by(f64::total_cmp);
        for (a, b) in spec.eigenvalues.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn full_hamiltonian_is_hermitian() {
        let mut sys = CoupledSystem::measured_device();
        sys.g_tilde = 20e6;
        let h = sys.hamiltonian(GateCharge(0.41)).unwrap();
        assert!((&h - h.adjoint()).norm() <= 1e-12 * h.norm());
        assert_eq!(h.nrows(), 50);
    }

    #[test]
    fn dimension_cap_enforced() {
        let mut sys = CoupledSystem::measured_device();
        sys.dimension_cap = 49;
        assert!(matches!(
            sys.hamiltonian(GateCharge(0.5)),
            Err(ModelError::DimensionOverflow { dim: 50, cap: 49 })
        ));
    }

    /// The eigenbasis construction must agree with the same operators written
    /// in the charge basis: `H_Q` from the two-state charge Hamiltonian and the
    /// interaction `g_0 (a + a^dag) (1 - 2 N_g - sigma_z^charge)`.
    #[test]
    fn eigenbasis_form_matches_charge_basis_form() {
        let q = device_two_level();
        let c = ResonatorParams::measured_cold().with_n_fock(4);
        let h = ResonatorParams::measured_hot().with_n_fock(4);
        for &ng in &[0.37, 0.44, 0.5, 0.58] {
            let g = GateCharge(ng);
            let ours = CoupledSystem::new(q, c, h).spectrum(g).unwrap();

            let hq = build_charge_hamiltonian(&q, g);
            let basis = ProductBasis { n_cold: 4, n_hot: 4 };
            let mut m = DMatrix::<f64>::zeros(32, 32);
            let sz = [1.0, -1.0];
            for s in 0..2 {
                for nc in 0..4 {
                    for nh in 0..4 {
                        let i = basis.index(s, nc, nh);
                        for s2 in 0..2 {
                            m[(basis.index(s2, nc, nh), i)] += hq[(s2, s)];
                        }
                        m[(i, i)] += c.f_r * nc as f64 + h.f_r * nh as f64;
                        let op = 1.0 - 2.0 * ng - sz[s];
                        if nc + 1 < 4 {
                            let j = basis.index(s, nc + 1, nh);
                            m[(i, j)] += c.g0 * op * ((nc + 1) as f64).sqrt();
                            m[(j, i)] += c.g0 * op * ((nc + 1) as f64).sqrt();
                        }
                        if nh + 1 < 4 {
                            let j = basis.index(s, nc, nh + 1);
                            m[(i, j)] += h.g0 * op * ((nh + 1) as f64).sqrt();
                            m[(j, i)] += h.g0 * op * ((nh + 1) as f64).sqrt();
                        }
                    }
                }
            }
            let theirs = Spectrum::from_levels(m.symmetric_eigen().eigenvalues.iter().copied().collect());
            for (a, b) in ours.eigenvalues.iter().zip(&theirs.eigenvalues) {
                assert!((a - b).abs() < 1e-2, "ng={ng}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn avoided_crossing_gaps() {
        let sys = CoupledSystem::measured_device();
        let hot = find_avoided_crossing(&sys, ResonatorRole::Hot, 0.25, 0.5, 201).unwrap();
        let expected_hot = 2.0 * 250e6 * 3.5 / 8.001;
        assert!(rel(hot.gap, expected_hot) < 0.03, "hot gap {}", hot.gap);
        let cold = find_avoided_crossing(&sys, ResonatorRole::Cold, 0.4, 0.5, 201).unwrap();
        let sin_c = 3.5 / 4.718;
        assert!(rel(cold.gap, 2.0 * 140e6 * sin_c) < 0.03, "cold gap {}", cold.gap);
    }

    #[test]
    fn crossing_gap_linear_in_coupling() {
        let base = CoupledSystem::measured_device();
        let gap_for = |g0: f64| {
            let mut s = base;
            s.hot = s.hot.with_g0(g0);
            find_avoided_crossing(&s, ResonatorRole::Hot, 0.25, 0.5, 101).unwrap().gap
        };
        let g100 = gap_for(100e6);
        for g0 in [50e6, 200e6, 300e6] {
            let ratio = gap_for(g0) / g100;
            assert!(rel(ratio, g0 / 100e6) < 0.01, "g0={g0}: ratio {ratio}");
        }
    }

    #[test]
    fn qubit_frequency_minimum_at_degeneracy() {
        let q = device_two_level();
        let floor = qubit_frequency(&q, GateCharge(0.5));
        assert_eq!(floor, q.ej);
        for k in 0..=100 {
            assert!(qubit_frequency(&q, GateCharge(k as f64 / 100.0)) >= floor);
        }
    }

    #[test]
    fn frequency_slope_matches_finite_difference() {
        let q = device_two_level();
        for &ng in &[0.1, 0.37, 0.44, 0.61] {
            let h = 1e-6;
            let fd = (qubit_frequency(&q, GateCharge(ng + h)) - qubit_frequency(&q, GateCharge(ng - h))) / (2.0 * h);
            assert!(rel(qubit_frequency_slope(&q, GateCharge(ng)), fd) < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn charge_periodicity(ng in -1.0f64..1.0) {
            let q = QubitParams::measured_device();
            let a = charge_spectrum(&q, GateCharge(ng)).unwrap();
            let b = charge_spectrum(&q.shifted_window(1), GateCharge(ng + 1.0)).unwrap();
            let scale = a.eigenvalues.last().unwrap().abs();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn mirror_symmetry_about_degeneracy(delta in 0.0f64..0.5) {
            // The window -2..=3 is itself symmetric about N = 1/2.
            let q = QubitParams::measured_device();
            let a = charge_spectrum(&q, GateCharge(0.5 + delta)).unwrap();
            let b = charge_spectrum(&q, GateCharge(0.5 - delta)).unwrap();
            let scale = a.eigenvalues.last().unwrap().abs();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                prop_assert!((x - y).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn two_level_consistency(delta in -0.2f64..0.2) {
            let q = QubitParams::measured_device();
            let g = GateCharge(0.5 + delta);
            let s = charge_spectrum(&q, g).unwrap();
            prop_assert!(rel(s.eigenvalues[1], qubit_frequency(&q, g)) < 0.02);
        }

        #[test]
        fn sin_theta_identity(ng in -2.0f64..3.0) {
            let q = device_two_level();
            let g = GateCharge(ng);
            let lhs = mixing_angle(&q, g).sin() * qubit_frequency(&q, g);
            prop_assert!(rel(lhs, q.ej) < 1e-12);
            let t = mixing_angle(&q, g);
            prop_assert!(t > 0.0 && t < std::f64::consts::PI);
        }

        #[test]
        fn gate_charge_round_trip(f in 3.5e9f64..30e9, above in any::<bool>()) {
            let q = device_two_level();
            let branch = if above { ChargeBranch::AboveHalf } else { ChargeBranch::BelowHalf };
            let g = gate_charge_for_frequency(&q, f, branch).unwrap();
            prop_assert!(rel(qubit_frequency(&q, g), f) < 1e-9);
        }
    }
}
