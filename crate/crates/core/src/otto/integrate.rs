//! Fixed-step RK4 over drive periods, periodic steady-state search and
//! drive-frequency sweeps.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bloch_rhs_with, drive_sample, heat_current, BlochState, CycleResult, OttoConfig, OttoError};
use crate::drive::max_adiabaticity;
use crate::qubit_model::{qubit_frequency, GateCharge};
use crate::units::PLANCK;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    /// Upper bound on `2 pi f_Q,max dt`.
    pub max_phase_step: f64,
    pub max_steps_per_period: usize,
    /// Steady state once the Bloch vector at the cycle boundary moves less than this.
    pub tolerance: f64,
    pub max_cycles: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { max_phase_step: 0.1, max_steps_per_period: 50_000_000, tolerance: 1e-9, max_cycles: 100_000 }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<(), OttoError> {
        if !(self.max_phase_step > 0.0 && self.max_phase_step <= 1.0) {
            return Err(OttoError::Invalid(format!(
                "max_phase_step must lie in (0, 1], got {}",
                self.max_phase_step
            )));
        }
        if !(self.tolerance > 0.0) || self.max_cycles == 0 {
            return Err(OttoError::Invalid("tolerance and max_cycles must be positive".into()));
        }
        Ok(())
    }
}

/// RK4 steps per drive period: at least `samples_per_period`, and enough to
/// keep `2 pi f_Q dt <= max_phase_step` at the highest qubit frequency.
pub fn steps_per_period(cfg: &OttoConfig) -> Result<usize, OttoError> {
    let p = &cfg.protocol;
    // f_Q is convex in N_g, so its maximum over the stroke sits at an endpoint.
    let f_max = qubit_frequency(&cfg.qubit, GateCharge(p.ng_c))
        .max(qubit_frequency(&cfg.qubit, GateCharge(p.ng_h)));
    let needed = (2.0 * PI * f_max / p.f_drive / cfg.integrator.max_phase_step).ceil();
    let cap = cfg.integrator.max_steps_per_period;
    if !(needed <= cap as f64) {
        return Err(OttoError::StepSizeTooCoarse {
            needed: if needed.is_finite() { needed as usize } else { usize::MAX },
            cap,
        });
    }
    Ok((needed as usize).max(p.samples_per_period))
}

/// One period of evolution with the cycle-integrated energy flows (J).
#[derive(Debug, Clone, PartialEq)]
pub struct CycleIntegration {
    pub start: BlochState,
    pub end: BlochState,
    pub q_cold: f64,
    pub q_hot: f64,
    pub work: f64,
    pub energy_start: f64,
    pub energy_end: f64,
    pub max_norm: f64,
    pub detailed_balance_error: f64,
    pub steps: usize,
    /// `(t, state)` every `record_stride` steps, including both endpoints.
    pub trajectory: Vec<(f64, BlochState)>,
}

struct Stage {
    deriv: BlochState,
    q_cold: f64,
    q_hot: f64,
    power: f64,
}

fn stage(cfg: &OttoConfig, s: &BlochState, t: f64, db_err: &mut f64) -> Stage {
    let d = drive_sample(&cfg.qubit, &cfg.protocol, t);
    let r = cfg.rates(d.f_q);
    *db_err = db_err.max(r.detailed_balance_error(d.f_q, cfg.cold.temperature, cfg.hot.temperature));
    Stage {
        deriv: bloch_rhs_with(s, &d, &r),
        q_cold: heat_current(r.gamma_c_down, r.gamma_c_up, d.f_q, s.z),
        q_hot: heat_current(r.gamma_h_down, r.gamma_h_up, d.f_q, s.z),
        // Tr(rho dH/dt) in Bloch variables.
        power: 0.5 * PLANCK * (d.f_q_rate * s.z + d.f_q * d.theta_rate * s.x),
    }
}

fn energy(cfg: &OttoConfig, s: &BlochState, t: f64) -> f64 {
    0.5 * PLANCK * drive_sample(&cfg.qubit, &cfg.protocol, t).f_q * s.z
}

/// Integrates one drive period from `t = 0`. `record_stride = 0` keeps only
/// the endpoints.
pub fn integrate_cycle(
    initial: BlochState,
    cfg: &OttoConfig,
    record_stride: usize,
) -> Result<CycleIntegration, OttoError> {
    let n = steps_per_period(cfg)?;
    integrate_cycle_steps(initial, cfg, n, record_stride)
}

pub(crate) fn integrate_cycle_steps(
    initial: BlochState,
    cfg: &OttoConfig,
    n: usize,
    record_stride: usize,
) -> Result<CycleIntegration, OttoError> {
    let period = cfg.protocol.period();
    let dt = period / n as f64;
    let mut s = initial;
    let (mut qc, mut qh, mut w) = (0.0, 0.0, 0.0);
    let mut max_norm = s.norm();
    let mut db_err = 0.0f64;
    let mut trajectory = vec![(0.0, s)];

    for k in 0..n {
        let t = k as f64 * dt;
        let k1 = stage(cfg, &s, t, &mut db_err);
        let k2 = stage(cfg, &s.axpy(0.5 * dt, &k1.deriv), t + 0.5 * dt, &mut db_err);
        let k3 = stage(cfg, &s.axpy(0.5 * dt, &k2.deriv), t + 0.5 * dt, &mut db_err);
        let k4 = stage(cfg, &s.axpy(dt, &k3.deriv), t + dt, &mut db_err);
        let h6 = dt / 6.0;
        s = BlochState {
            x: s.x + h6 * (k1.deriv.x + 2.0 * k2.deriv.x + 2.0 * k3.deriv.x + k4.deriv.x),
            y: s.y + h6 * (k1.deriv.y + 2.0 * k2.deriv.y + 2.0 * k3.deriv.y + k4.deriv.y),
            z: s.z + h6 * (k1.deriv.z + 2.0 * k2.deriv.z + 2.0 * k3.deriv.z + k4.deriv.z),
        };
        qc += h6 * (k1.q_cold + 2.0 * k2.q_cold + 2.0 * k3.q_cold + k4.q_cold);
        qh += h6 * (k1.q_hot + 2.0 * k2.q_hot + 2.0 * k3.q_hot + k4.q_hot);
        w += h6 * (k1.power + 2.0 * k2.power + 2.0 * k3.power + k4.power);
        if !s.is_finite() {
            return Err(OttoError::NonFinite { t: t + dt });
        }
        max_norm = max_norm.max(s.norm());
        if record_stride > 0 && (k + 1) % record_stride == 0 && k + 1 != n {
            trajectory.push(((k + 1) as f64 * dt, s));
        }
    }
    trajectory.push((period, s));

    Ok(CycleIntegration {
        start: initial,
        end: s,
        q_cold: qc,
        q_hot: qh,
        work: w,
        energy_start: energy(cfg, &initial, 0.0),
        energy_end: energy(cfg, &s, period),
        max_norm,
        detailed_balance_error: db_err,
        steps: n,
        trajectory,
    })
}

/// Repeats [`integrate_cycle`] until the boundary state stops moving and
/// averages the last cycle. A run that hits the cycle cap is still returned,
/// with `converged = false`.
pub fn find_steady_cycle(cfg: &OttoConfig) -> Result<CycleResult, OttoError> {
    cfg.validate()?;
    let n = steps_per_period(cfg)?;
    let mut s = cfg.initial;
    let mut cycles = 0;
    let mut max_norm = s.norm();
    loop {
        let c = integrate_cycle_steps(s, cfg, n, 0)?;
        cycles += 1;
        max_norm = max_norm.max(c.max_norm);
        let change = c.end.distance(&s);
        let converged = change < cfg.integrator.tolerance;
        if converged || cycles >= cfg.integrator.max_cycles {
            return Ok(summarize(cfg, &c, cycles, converged, max_norm));
        }
        s = c.end;
    }
}

fn summarize(
    cfg: &OttoConfig,
    c: &CycleIntegration,
    cycles: usize,
    converged: bool,
    max_norm: f64,
) -> CycleResult {
    let f = cfg.protocol.f_drive;
    let (qc, qh, w) = (c.q_cold * f, c.q_hot * f, c.work * f);
    let de = (c.energy_end - c.energy_start) * f;
    let scale = qc.abs().max(qh.abs()).max(w.abs());
    let first_law_residual = if scale > 0.0 { (qc + qh + w - de).abs() / scale } else { 0.0 };
    CycleResult {
        f_drive: f,
        q_dot_cold_avg: qc,
        q_dot_hot_avg: qh,
        work_avg: w,
        entropy_rate: -(qc / cfg.cold.temperature + qh / cfg.hot.temperature),
        first_law_residual,
        detailed_balance_error: c.detailed_balance_error,
        max_bloch_norm: max_norm,
        steps_per_period: c.steps,
        cycles_to_converge: cycles,
        converged,
        final_state: c.end,
    }
}

/// One point of a drive-frequency sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub f_drive: f64,
    /// Largest adiabaticity metric over the period.
    pub max_adiabaticity: f64,
    pub result: Result<CycleResult, OttoError>,
}

/// Independent steady cycles for every drive frequency, in grid order. A
/// failing point is reported in place and the sweep carries on.
pub fn sweep_drive_frequency(f_grid: &[f64], cfg: &OttoConfig) -> Result<Vec<SweepPoint>, OttoError> {
    for k in 1..f_grid.len() {
        if !(f_grid[k] > f_grid[k - 1]) {
            return Err(OttoError::Invalid(format!("drive grid not increasing at index {k}")));
        }
    }
    Ok(f_grid
        .par_iter()
        .map(|&f| {
            let c = cfg.with_f_drive(f);
            SweepPoint {
                f_drive: f,
                max_adiabaticity: max_adiabaticity(&c.qubit, &c.protocol, 1024),
                result: find_steady_cycle(&c),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::DriveProtocol;

    #[test]
    fn step_count_scales_with_frequency() {
        let cfg = OttoConfig::refrigerator(1e7).unwrap();
        let n = steps_per_period(&cfg).unwrap();
        let expected = (2.0 * PI * 8.001e9 / 1e7 / 0.1).ceil() as usize;
        assert!((n as i64 - expected as i64).abs() <= 1, "{n} vs {expected}");
        let fast = cfg.with_f_drive(1e10);
        assert_eq!(steps_per_period(&fast).unwrap(), 64);
        let slow = cfg.with_f_drive(1.0);
        assert!(matches!(steps_per_period(&slow), Err(OttoError::StepSizeTooCoarse { .. })));
    }

    #[test]
    fn static_protocol_relaxes_to_equilibrium() {
        let mut cfg = OttoConfig::refrigerator(1e8).unwrap();
        cfg.protocol = DriveProtocol::stationary(1e8, cfg.protocol.ng_c, 64).unwrap();
        let r = find_steady_cycle(&cfg).unwrap();
        assert!(r.converged);
        let rates = cfg.rates(4.718e9);
        let z_eq = -rates.imbalance() / rates.total();
        assert!((r.final_state.z - z_eq).abs() < 1e-8);
        assert!(r.q_dot_cold_avg.abs() < 1e-24 && r.q_dot_hot_avg.abs() < 1e-24);
        assert!(r.work_avg.abs() < 1e-24);
    }

    #[test]
    fn recorded_trajectory_endpoints() {
        let cfg = OttoConfig::refrigerator(1e9).unwrap();
        let c = integrate_cycle(BlochState::GROUND, &cfg, 10).unwrap();
        assert_eq!(c.trajectory.first().unwrap().1, BlochState::GROUND);
        assert_eq!(c.trajectory.last().unwrap().1, c.end);
        assert!((c.trajectory.last().unwrap().0 - 1e-9).abs() < 1e-24);
        assert!(c.max_norm <= 1.0 + 1e-9);
    }

    #[test]
    fn sweep_keeps_order_and_rejects_unsorted_grid() {
        let cfg = OttoConfig::refrigerator(1e8).unwrap();
        let pts = sweep_drive_frequency(&[3e8, 1e9, 2e9], &cfg).unwrap();
        assert_eq!(pts.iter().map(|p| p.f_drive).collect::<Vec<_>>(), vec![3e8, 1e9, 2e9]);
        assert!(pts.iter().all(|p| p.result.is_ok() && p.max_adiabaticity > 0.0));
        assert!(sweep_drive_frequency(&[1e9, 3e8], &cfg).is_err());
    }
}
