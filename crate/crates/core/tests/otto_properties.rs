//! Property checks of the Bloch-equation refrigerator against independent
//! references: step refinement, initial-state independence, the lab-frame
//! Lindblad generator and thermodynamic bounds.

use cpb_fridge::io::config::logspace;
use cpb_fridge::otto::oracle::{lindblad_oracle, DensityMatrix2};
use cpb_fridge::otto::{
    bloch_rhs, cooling_condition, find_steady_cycle, sweep_drive_frequency, BlochState, OttoConfig, RateSet,
};
use cpb_fridge::qubit_model::mixing_angle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn base(f_drive: f64) -> OttoConfig {
    OttoConfig::refrigerator(f_drive).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn halving_the_step_changes_cooling_power_below_1e_minus_4() {
    let cfg = base(1e7);
    let coarse = find_steady_cycle(&cfg).unwrap();
    let mut fine_cfg = cfg;
    fine_cfg.integrator.max_phase_step = 0.05;
    let fine = find_steady_cycle(&fine_cfg).unwrap();
    assert!(fine.steps_per_period.abs_diff(2 * coarse.steps_per_period) <= 2);
    let d = rel(coarse.q_dot_cold_avg, fine.q_dot_cold_avg);
    assert!(d < 1e-4, "relative change {d:e}");
}

#[test]
fn steady_cycle_forgets_the_initial_state() {
    let starts = [BlochState::GROUND, BlochState::EXCITED, BlochState::new(0.5, -0.3, 0.2)];
    for f in [1e7, 5e8] {
        let runs: Vec<_> = starts
            .iter()
            .map(|&s| find_steady_cycle(&OttoConfig { initial: s, ..base(f) }).unwrap())
            .collect();
        for r in &runs[1..] {
            assert!(r.converged);
            let d = r.final_state.distance(&runs[0].final_state);
            assert!(d < 1e-8, "f = {f:e}: boundary states differ by {d:e}");
            assert!(rel(r.q_dot_cold_avg, runs[0].q_dot_cold_avg) < 1e-8);
        }
    }
}

#[test]
fn bloch_vector_stays_in_the_unit_ball() {
    for f in [1e6, 1e8, 1.3e9, 2.3e9] {
        for s in [BlochState::GROUND, BlochState::EXCITED, BlochState::new(0.6, 0.0, -0.8)] {
            let r = find_steady_cycle(&OttoConfig { initial: s, ..base(f) }).unwrap();
            assert!(r.max_bloch_norm <= 1.0 + 1e-9, "f = {f:e}: |s| = {}", r.max_bloch_norm);
        }
    }
}

/// `d/dt` of the eigenbasis Bloch vector of a lab-frame density matrix: the
/// Lindblad generator mapped into the moving basis plus the basis rotation,
/// taken by a central difference in the mixing angle.
fn mapped_derivative(s: &BlochState, t: f64, cfg: &OttoConfig) -> BlochState {
    let theta = mixing_angle(&cfg.qubit, cfg.protocol.ng(t));
    let rho = DensityMatrix2::from_bloch(s, theta);
    let drho = DensityMatrix2(lindblad_oracle(&rho.0, t, cfg)).to_bloch(theta);
    let dt = 1e-6 / cfg.protocol.f_drive;
    let theta_rate = (mixing_angle(&cfg.qubit, cfg.protocol.ng(t + dt))
        - mixing_angle(&cfg.qubit, cfg.protocol.ng(t - dt)))
        / (2.0 * dt);
    let h = 1e-5;
    let plus = rho.to_bloch(theta + h);
    let minus = rho.to_bloch(theta - h);
    BlochState {
        x: drho.x + theta_rate * (plus.x - minus.x) / (2.0 * h),
        y: drho.y + theta_rate * (plus.y - minus.y) / (2.0 * h),
        z: drho.z + theta_rate * (plus.z - minus.z) / (2.0 * h),
    }
}

#[test]
fn bloch_rhs_matches_mapped_lindblad_generator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..100 {
        let f = [1e6, 1e8, 2e9][k % 3];
        let cfg = base(f);
        let t = rng.gen_range(0.0..1.0) * cfg.protocol.period();
        let s = loop {
            let s = BlochState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if s.norm() <= 1.0 {
                break s;
            }
        };
        let a = bloch_rhs(&s, t, &cfg);
        let b = mapped_derivative(&s, t, &cfg);
        let scale = a.norm().max(b.norm());
        let d = a.distance(&b) / scale;
        assert!(d < 1e-8, "point {k}: relative mismatch {d:e}");
    }
}

#[test]
fn second_law_holds_across_drive_frequencies() {
    let grid = logspace(1e6, 2.3e9, 12);
    for (t_c, t_h) in [(0.3, 0.3), (0.3, 0.6), (0.25, 0.3)] {
        let mut cfg = base(1e6);
        cfg.cold.temperature = t_c;
        cfg.hot.temperature = t_h;
        for p in sweep_drive_frequency(&grid, &cfg).unwrap() {
            let r = p.result.unwrap();
            assert!(r.satisfies_second_law(t_c, t_h, 1e-3), "T_c {t_c} T_h {t_h} f {:e}", p.f_drive);
            assert!(r.entropy_rate >= -1e-3 * r.q_dot_cold_avg.abs() / t_c);
        }
    }
}

#[test]
fn poisoning_scales_every_rate_by_its_square() {
    let cfg = base(1e7);
    for s in [0.3, 0.61, 0.9] {
        let scaled = cfg.with_poisoning(s, s);
        for f in [4.0e9, 5.5e9, 8.0e9] {
            let a = cfg.rates(f);
            let b: RateSet = scaled.rates(f);
            for (x, y) in [
                (a.gamma_c_down, b.gamma_c_down),
                (a.gamma_c_up, b.gamma_c_up),
                (a.gamma_h_down, b.gamma_h_down),
                (a.gamma_h_up, b.gamma_h_up),
            ] {
                assert!(rel(y, s * s * x) < 1e-12);
            }
        }
    }
}

#[test]
fn peak_cooling_power_scales_with_squared_coupling() {
    // Rate-limited band: from where cooling is set by the rates up to the
    // first oscillation of the fast-drive regime.
    let grid = logspace(1e8, 2.3e9, 24);
    let peak = |cfg: &OttoConfig| {
        sweep_drive_frequency(&grid, cfg)
            .unwrap()
            .into_iter()
            .map(|p| p.result.unwrap().q_dot_cold_avg)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let cfg = base(1e8);
    let p1 = peak(&cfg);
    for s in [0.9, 0.8, 0.7] {
        let ratio = peak(&cfg.with_poisoning(s, s)) / p1;
        let dev = rel(ratio, s * s);
        println!("s = {s}: peak ratio {ratio:.4}, s^2 = {:.4}, deviation {:.1}%", s * s, 100.0 * dev);
        assert!(dev < 0.15, "s = {s}: ratio {ratio} vs {}", s * s);
    }
}

#[test]
fn no_cooling_in_the_slow_limit_when_the_condition_fails() {
    let mut cfg = base(1e5);
    cfg.hot.temperature = 0.6;
    assert!(!cooling_condition(cfg.cold.resonator.f_r, cfg.hot.resonator.f_r, 0.3, 0.6));
    for f in [1e5, 1e6] {
        let r = find_steady_cycle(&cfg.with_f_drive(f)).unwrap();
        assert!(r.q_dot_cold_avg <= 0.0, "f = {f:e}: Q_c = {:e}", r.q_dot_cold_avg);
    }
    let ok = base(1e5);
    assert!(cooling_condition(ok.cold.resonator.f_r, ok.hot.resonator.f_r, 0.3, 0.3));
    assert!(find_steady_cycle(&ok).unwrap().q_dot_cold_avg > 0.0);
}

#[test]
fn detailed_balance_is_exact_along_the_cycle() {
    for f in [1e6, 1e9] {
        let r = find_steady_cycle(&base(f)).unwrap();
        assert!(r.detailed_balance_error <= 1e-12, "{:e}", r.detailed_balance_error);
    }
}
