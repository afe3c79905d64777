//! Independent references for the Bloch engine: a lab-frame density-matrix
//! Lindblad integrator in the charge basis, a coherence-free rate equation and
//! the ideal Otto-cycle heat.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::{drive_sample, heat_current, BlochState, OttoConfig, OttoError};
use crate::qubit_model::mixing_angle;
use crate::units::{thermal_excited_population, PLANCK};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-level density matrix in the charge basis `{|0>, |1>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(pub Matrix2<Complex64>);

impl DensityMatrix2 {
    /// Checks unit trace, Hermiticity and positivity.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self, OttoError> {
        let tr = m.trace();
        if (tr - c(1.0)).norm() > 1e-10 {
            return Err(OttoError::Invalid(format!("trace {tr} differs from 1")));
        }
        if (m - m.adjoint()).norm() > 1e-12 {
            return Err(OttoError::Invalid("density matrix is not Hermitian".into()));
        }
        let d = DensityMatrix2(m);
        if d.min_eigenvalue() < -1e-9 {
            return Err(OttoError::Invalid("density matrix has a negative eigenvalue".into()));
        }
        Ok(d)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = &self.0;
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
    }

    /// Builds the state whose eigenbasis Bloch vector at mixing angle `theta` is `s`.
    pub fn from_bloch(s: &BlochState, theta: f64) -> Self {
        let (g, e) = eigenvectors(theta);
        let rho_ee = c(0.5 * (1.0 + s.z));
        let rho_gg = c(0.5 * (1.0 - s.z));
        let rho_eg = Complex64::new(0.5 * s.x, -0.5 * s.y);
        let m = e * e.adjoint() * rho_ee
            + g * g.adjoint() * rho_gg
            + e * g.adjoint() * rho_eg
            + g * e.adjoint() * rho_eg.conj();
        DensityMatrix2(m)
    }

    /// Bloch vector in the eigenbasis at mixing angle `theta`.
    pub fn to_bloch(&self, theta: f64) -> BlochState {
        bloch_components(&self.0, theta)
    }
}

fn bloch_components(m: &Matrix2<Complex64>, theta: f64) -> BlochState {
    let (g, e) = eigenvectors(theta);
    let ee = (e.adjoint() * m * e)[(0, 0)].re;
    let gg = (g.adjoint() * m * g)[(0, 0)].re;
    let eg = (e.adjoint() * m * g)[(0, 0)];
    BlochState { x: 2.0 * eg.re, y: -2.0 * eg.im, z: ee - gg }
}

/// Instantaneous ground and excited states in the charge basis. The excited
/// state's phase makes `d theta / dt` enter the Bloch equations as `+c x` in `z'`.
pub fn eigenvectors(theta: f64) -> (Vector2<Complex64>, Vector2<Complex64>) {
    let (s, co) = (0.5 * theta).sin_cos();
    (Vector2::new(c(co), c(s)), Vector2::new(c(s), c(-co)))
}

/// `H / hbar = -pi f_Q (cos(theta) sigma_z + sin(theta) sigma_x)` (rad/s).
fn lab_hamiltonian(f_q: f64, theta: f64) -> Matrix2<Complex64> {
    let (s, co) = theta.sin_cos();
    let k = -PI * f_q;
    Matrix2::new(c(k * co), c(k * s), c(k * s), c(-k * co))
}

/// Lindblad right-hand side with jump operators between the instantaneous
/// eigenstates, `sigma_- = |g><e|`.
pub fn lindblad_oracle(rho: &Matrix2<Complex64>, t: f64, cfg: &OttoConfig) -> Matrix2<Complex64> {
    let ng = cfg.protocol.ng(t);
    let d = drive_sample(&cfg.qubit, &cfg.protocol, t);
    let theta = mixing_angle(&cfg.qubit, ng);
    let r = cfg.rates(d.f_q);
    let down = r.gamma_c_down + r.gamma_h_down;
    let up = r.gamma_c_up + r.gamma_h_up;
    let (g, e) = eigenvectors(theta);
    let sm = g * e.adjoint();
    let sp = e * g.adjoint();
    let h = lab_hamiltonian(d.f_q, theta);
    let i = Complex64::new(0.0, 1.0);
    let dissipator = |l: &Matrix2<Complex64>| {
        let ld = l.adjoint();
        let ldl = ld * l;
        l * rho * ld - (ldl * rho + rho * ldl) * c(0.5)
    };
    (h * rho - rho * h) * (-i) + dissipator(&sp) * c(up) + dissipator(&sm) * c(down)
}

/// Integrates the lab-frame density matrix over `cycles` drive periods with
/// fixed-step RK4 (`2 pi f_Q,max dt <= max_phase_step`, step count rounded up
/// to a multiple of `records_per_cycle`) and returns the eigenbasis Bloch
/// vector at `records_per_cycle` evenly spaced instants of every period.
pub fn integrate_lindblad(
    initial: &BlochState,
    cfg: &OttoConfig,
    cycles: usize,
    max_phase_step: f64,
    records_per_cycle: usize,
) -> Result<Vec<(f64, BlochState)>, OttoError> {
    let per = records_per_cycle.max(1);
    let settings = super::IntegratorSettings { max_phase_step, ..cfg.integrator };
    let needed = super::steps_per_period(&OttoConfig { integrator: settings, ..*cfg })?;
    let n = needed.div_ceil(per) * per;
    let stride = n / per;
    let period = cfg.protocol.period();
    let dt = period / n as f64;
    let theta_at = |t: f64| mixing_angle(&cfg.qubit, cfg.protocol.ng(t));
    let mut rho = DensityMatrix2::from_bloch(initial, theta_at(0.0)).0;
    let mut out = vec![(0.0, *initial)];
    for cycle in 0..cycles {
        for k in 0..n {
            // Phase restarts every period so t stays bounded.
            let t = k as f64 * dt;
            let k1 = lindblad_oracle(&rho, t, cfg);
            let k2 = lindblad_oracle(&(rho + k1 * c(0.5 * dt)), t + 0.5 * dt, cfg);
            let k3 = lindblad_oracle(&(rho + k2 * c(0.5 * dt)), t + 0.5 * dt, cfg);
            let k4 = lindblad_oracle(&(rho + k3 * c(dt)), t + dt, cfg);
            rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
            if (k + 1) % stride == 0 {
                let j = (k + 1) / stride;
                let local = period * j as f64 / per as f64;
                out.push((cycle as f64 * period + local, bloch_components(&rho, theta_at(local))));
            }
        }
    }
    Ok(out)
}

/// Coherence-free population dynamics `z' = -G z - D` along the same drive,
/// iterated to its periodic steady state. Returns the cold-bath heat per
/// cycle (J).
pub fn rate_equation_cold_heat(cfg: &OttoConfig, steps: usize, max_cycles: usize) -> f64 {
    let period = cfg.protocol.period();
    let dt = period / steps as f64;
    let mut z = -1.0;
    let mut last = f64::NAN;
    for _ in 0..max_cycles {
        let z0 = z;
        let mut qc = 0.0;
        for k in 0..steps {
            let t = k as f64 * dt;
            let f = |t: f64, z: f64| {
                let d = drive_sample(&cfg.qubit, &cfg.protocol, t);
                let r = cfg.rates(d.f_q);
                (-r.total() * z - r.imbalance(), heat_current(r.gamma_c_down, r.gamma_c_up, d.f_q, z))
            };
            let (a1, q1) = f(t, z);
            let (a2, q2) = f(t + 0.5 * dt, z + 0.5 * dt * a1);
            let (a3, q3) = f(t + 0.5 * dt, z + 0.5 * dt * a2);
            let (a4, q4) = f(t + dt, z + dt * a3);
            z += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            qc += dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
        }
        last = qc;
        if (z - z0).abs() < 1e-12 {
            break;
        }
    }
    last
}

/// Heat drawn from the cold bath per cycle by an ideal Otto cycle that fully
/// thermalizes at each stroke: `h f_c (p_eq(f_c, T_c) - p_eq(f_h, T_h))`.
pub fn ideal_otto_cold_heat(f_c: f64, f_h: f64, t_c: f64, t_h: f64) -> f64 {
    PLANCK * f_c * (thermal_excited_population(f_c, t_c) - thermal_excited_population(f_h, t_h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_round_trip() {
        let s = BlochState::new(0.3, -0.2, 0.5);
        for &th in &[0.2, 1.0, 2.9] {
            let rho = DensityMatrix2::from_bloch(&s, th);
            let back = rho.to_bloch(th);
            assert!(back.distance(&s) < 1e-14);
            assert!(DensityMatrix2::new(rho.0).is_ok());
        }
    }

    #[test]
    fn invalid_density_matrices() {
        let bad = Matrix2::new(c(0.7), c(0.0), c(0.0), c(0.7));
        assert!(DensityMatrix2::new(bad).is_err());
        let neg = Matrix2::new(c(1.2), c(0.0), c(0.0), c(-0.2));
        assert!(DensityMatrix2::new(neg).is_err());
    }

    #[test]
    fn lindblad_is_traceless_and_hermitian() {
        let cfg = OttoConfig::refrigerator(1e7).unwrap();
        let rho = DensityMatrix2::from_bloch(&BlochState::new(0.2, 0.1, -0.4), 1.1).0;
        for &t in &[0.0, 1.3e-8, 7.7e-8] {
            let d = lindblad_oracle(&rho, t, &cfg);
            assert!(d.trace().norm() < 1e-12 * d.norm());
            assert!((d - d.adjoint()).norm() < 1e-12 * d.norm());
        }
    }

    #[test]
    fn maximally_mixed_with_equal_rates_is_stationary() {
        let mut cfg = OttoConfig::refrigerator(1e7).unwrap();
        cfg.cold.temperature = 1e12;
        cfg.hot.temperature = 1e12;
        cfg.protocol = crate::drive::DriveProtocol::stationary(1e7, 0.4, 64).unwrap();
        let rho = Matrix2::identity() * c(0.5);
        let d = lindblad_oracle(&rho, 0.0, &cfg);
        assert!(d.norm() < 1e-6 * cfg.rates(5e9).total());
    }

    #[test]
    fn ground_state_without_excitation_only_rotates() {
        let mut cfg = OttoConfig::refrigerator(1e7).unwrap();
        cfg.cold.temperature = 1e-6;
        cfg.hot.temperature = 1e-6;
        let t = 0.0;
        let theta = mixing_angle(&cfg.qubit, cfg.protocol.ng(t));
        let rho = DensityMatrix2::from_bloch(&BlochState::GROUND, theta).0;
        let d = lindblad_oracle(&rho, t, &cfg);
        // The ground state commutes with H and nothing pumps it up.
        assert!(d.norm() < 1e-6);
    }

    #[test]
    fn ideal_heat_positive_when_cooling_condition_holds() {
        assert!(ideal_otto_cold_heat(4.718e9, 8.001e9, 0.3, 0.3) > 0.0);
        assert!(ideal_otto_cold_heat(4.0e9, 8.0e9, 0.3, 0.6) <= 1e-40);
    }
}
