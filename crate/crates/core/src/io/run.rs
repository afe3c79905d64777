//! Experiment presets and output files.

use std::path::{Path, PathBuf};

use thiserror::Error;

use super::config::{ConfigError, Experiment, RunConfig};
use super::plot::{render_line_plot, PlotError, PlotSpec};
use super::table::{Column, ResultTable, TableError};
use crate::filter::{lcl_cutoff, lcl_s21, s21, to_db, FilterError};
use crate::otto::{sweep_drive_frequency, OttoError};
use crate::qubit_model::{
    build_charge_hamiltonian, eigensolve_symmetric, qubit_frequency, EigenError, GateCharge, ModelError,
    ResonatorRole,
};
use crate::spectroscopy::{
    dispersive_shift, effective_coupling_from_shift, extrapolate_gamma2, linewidth_model, measure_linewidths,
    odd_parity_map, one_tone_map, parity_mix, SpectroscopyError,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures, 1 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Output { .. } => 1,
        }
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Numerical(e.to_string())
            }
        }
    )*};
}
numerical_from!(EigenError, ModelError, SpectroscopyError, OttoError, FilterError, TableError, PlotError);

/// Table and plot produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub config_hash: String,
    pub table: ResultTable,
    pub svg: String,
    /// Points that failed without aborting the run (flagged rows in the table).
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    pub fn stem(&self) -> String {
        format!("{}_{}", self.experiment.name(), self.config_hash)
    }
}

/// Runs `cfg.experiment` on the current rayon pool.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    cfg.validate()?;
    let hash = cfg.hash();
    let (table, svg, failures) = match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg, &hash)?,
        Experiment::OneTone => one_tone(cfg, &hash)?,
        Experiment::TwoTone => two_tone(cfg, &hash)?,
        Experiment::OttoSweep => otto_sweep(cfg, &hash)?,
        Experiment::Filter => filter(cfg, &hash)?,
    };
    Ok(ExperimentOutput { experiment: cfg.experiment, config_hash: hash, table, svg, failures })
}

/// Runs on a dedicated pool of `threads` workers (all cores when `None`).
pub fn run_with_threads(cfg: &RunConfig, threads: Option<usize>) -> Result<ExperimentOutput, RunError> {
    match threads {
        None => run_experiment(cfg),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| RunError::Config(ConfigError::Validation { field: "threads".into(), message: e.to_string() }))?;
            pool.install(|| run_experiment(cfg))
        }
    }
}

/// Writes `<experiment>_<hash>.csv` and `.svg` into `dir`.
pub fn write_outputs(out: &ExperimentOutput, dir: &Path) -> Result<(PathBuf, PathBuf), RunError> {
    let io_err = |p: &Path, e: std::io::Error| RunError::Output { path: p.display().to_string(), message: e.to_string() };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let csv = dir.join(format!("{}.csv", out.stem()));
    let svg = dir.join(format!("{}.svg", out.stem()));
    std::fs::write(&csv, out.table.to_csv()).map_err(|e| io_err(&csv, e))?;
    std::fs::write(&svg, &out.svg).map_err(|e| io_err(&svg, e))?;
    Ok((csv, svg))
}

type Produced = (ResultTable, String, Vec<String>);

fn spectrum(cfg: &RunConfig, hash: &str) -> Result<Produced, RunError> {
    let q = cfg.qubit_params();
    let s = &cfg.spectrum;
    let mut cols = vec![Column::new("ng", "1")];
    let names: Vec<String> = (0..s.levels).map(|k| format!("E{k}")).collect();
    cols.extend(names.iter().map(|n| Column::new(n, "Hz")));
    cols.push(Column::new("f_q_two_level", "Hz"));
    let mut t = ResultTable::new("spectrum", hash, cols);
    t.note("energy_reference", "E/h of the charge Hamiltonian");
    for ng in super::config::linspace(s.ng_min, s.ng_max, s.ng_points) {
        let mut levels = eigensolve_symmetric(&build_charge_hamiltonian(&q, GateCharge(ng)))?.values;
        levels.sort_by(f64::total_cmp);
        let mut row = vec![ng];
        row.extend(&levels[..s.levels]);
        row.push(qubit_frequency(&q, GateCharge(ng)));
        t.push_row(row)?;
    }
    let ys: Vec<&str> = names.iter().map(String::as_str).collect();
    let spec = PlotSpec::new("Charge-basis energy levels", "ng", &ys).labels("offset charge N_g", "E/h (GHz)").scale_y(1e-9);
    let svg = render_line_plot(&t, &spec)?;
    Ok((t, svg, Vec::new()))
}

fn one_tone(cfg: &RunConfig, hash: &str) -> Result<Produced, RunError> {
    let sys = cfg.coupled_system();
    let notch = cfg.notch_quality();
    let (ng, f) = cfg.one_tone_grids();
    let even = one_tone_map(&sys, notch, &ng, &f)?;
    let p_even = cfg.one_tone.p_even;
    let mixed = if p_even < 1.0 {
        let odd = odd_parity_map(&sys, notch, &ng, &f)?;
        parity_mix(&even.values, &odd.values, p_even)?
    } else {
        even.values.clone()
    };
    let mut t = ResultTable::new(
        "one_tone",
        hash,
        vec![Column::new("ng", "1"), Column::new("f", "Hz"), Column::new("s21", "1"), Column::new("s21_even", "1")],
    );
    t.note("p_even", p_even);
    for role in [ResonatorRole::Cold, ResonatorRole::Hot] {
        let res = sys.resonator(role);
        let key = if role == ResonatorRole::Cold { "cold" } else { "hot" };
        match dispersive_shift(&sys, role) {
            Ok(chi) => {
                t.note(&format!("chi_{key} [Hz]"), format!("{chi:e}"));
                if let Ok(g) = effective_coupling_from_shift(chi, res.f_r - sys.qubit.ej) {
                    t.note(&format!("g_from_chi_{key} [Hz]"), format!("{g:e}"));
                }
            }
            Err(e) => t.note(&format!("chi_{key}"), e),
        }
    }
    for (i, &n) in ng.iter().enumerate() {
        for (j, &fj) in f.iter().enumerate() {
            t.push_row(vec![n, fj, mixed[(i, j)], even.values[(i, j)]])?;
        }
    }
    // Plot three cuts: both ends of the charge window and the point nearest 1/2.
    let mid = (0..ng.len()).min_by(|&a, &b| (ng[a] - 0.5).abs().total_cmp(&(ng[b] - 0.5).abs())).unwrap_or(0);
    let picks = [0, mid, ng.len() - 1];
    let names: Vec<String> = picks.iter().map(|&i| format!("ng={:.3}", ng[i])).collect();
    let mut cols = vec![Column::new("f", "Hz")];
    cols.extend(names.iter().map(|n| Column::new(n, "1")));
    let mut cut = ResultTable::new("one_tone", hash, cols);
    for (j, &fj) in f.iter().enumerate() {
        let mut row = vec![fj];
        row.extend(picks.iter().map(|&i| mixed[(i, j)]));
        cut.push_row(row)?;
    }
    let ys: Vec<&str> = names.iter().map(String::as_str).collect();
    let spec = PlotSpec::new("One-tone transmission", "f", &ys).labels("probe frequency (Hz)", "|S21|");
    let svg = render_line_plot(&cut, &spec)?;
    Ok((t, svg, Vec::new()))
}

fn two_tone(cfg: &RunConfig, hash: &str) -> Result<Produced, RunError> {
    let q = cfg.qubit_params();
    let tt = cfg.two_tone_config();
    let rates = cfg.decoherence_rates()?;
    let g_h = 2.0 * std::f64::consts::PI * cfg.hot.coupling.value() * cfg.hot.g_eff_scale;
    let points = measure_linewidths(&q, &tt, cfg.two_tone.ng, g_h, &rates, cfg.two_tone.noise, cfg.seed)?;
    let gamma2 = extrapolate_gamma2(&points)?;
    let mut t = ResultTable::new(
        "two_tone",
        hash,
        vec![
            Column::new("p_pump", "W"),
            Column::new("n_p", "1"),
            Column::new("linewidth_sq", "Hz^2"),
            Column::new("linewidth_sq_model", "Hz^2"),
        ],
    );
    let tau = 2.0 * std::f64::consts::PI;
    t.note("gamma2_input_over_2pi [Hz]", format!("{:e}", rates.gamma2_down / tau));
    t.note("gamma2_extracted_over_2pi [Hz]", format!("{:e}", gamma2 / tau));
    t.note("f_q_at_ng [Hz]", format!("{:e}", qubit_frequency(&q, GateCharge(cfg.two_tone.ng))));
    for p in &points {
        let n_p = tt.photons(p.p_pump);
        let model = linewidth_model(n_p, g_h, &rates);
        t.push_row(vec![p.p_pump, n_p, p.linewidth_sq, model * model])?;
    }
    let spec = PlotSpec::new("Power-broadened linewidth", "p_pump", &["linewidth_sq", "linewidth_sq_model"])
        .labels("pump power (W)", "(delta f)^2 (MHz^2)")
        .scale_y(1e-12);
    let svg = render_line_plot(&t, &spec)?;
    Ok((t, svg, Vec::new()))
}

fn otto_sweep(cfg: &RunConfig, hash: &str) -> Result<Produced, RunError> {
    let base = cfg.otto_config()?;
    let grid = cfg.otto_grid();
    let points = sweep_drive_frequency(&grid, &base)?;
    let mut t = ResultTable::new(
        "otto_sweep",
        hash,
        vec![
            Column::new("f_drive", "Hz"),
            Column::new("q_dot_cold", "W"),
            Column::new("q_dot_hot", "W"),
            Column::new("work", "W"),
            Column::new("entropy_rate", "W/K"),
            Column::new("first_law_residual", "1"),
            Column::new("max_adiabaticity", "1"),
            Column::new("steps_per_period", "1"),
            Column::new("cycles", "1"),
            Column::new("converged", "1"),
            Column::new("ok", "1"),
        ],
    );
    let mut failures = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for p in &points {
        match &p.result {
            Ok(r) => {
                if r.converged && best.is_none_or(|(_, q)| r.q_dot_cold_avg > q) {
                    best = Some((p.f_drive, r.q_dot_cold_avg));
                }
                t.push_row(vec![
                    p.f_drive,
                    r.q_dot_cold_avg,
                    r.q_dot_hot_avg,
                    r.work_avg,
                    r.entropy_rate,
                    r.first_law_residual,
                    p.max_adiabaticity,
                    r.steps_per_period as f64,
                    r.cycles_to_converge as f64,
                    if r.converged { 1.0 } else { 0.0 },
                    1.0,
                ])?;
            }
            Err(e) => {
                failures.push(format!("f_drive = {:e} Hz: {e}", p.f_drive));
                let mut row = vec![f64::NAN; t.columns.len()];
                row[0] = p.f_drive;
                row[6] = p.max_adiabaticity;
                row[9] = 0.0;
                row[10] = 0.0;
                t.push_row(row)?;
            }
        }
    }
    if let Some((f, q)) = best {
        t.note("peak_q_dot_cold [W]", format!("{q:e}"));
        t.note("peak_f_drive [Hz]", format!("{f:e}"));
    }
    t.note("failed_points", failures.len());
    let spec = PlotSpec::new("Otto refrigerator heat currents", "f_drive", &["q_dot_cold", "q_dot_hot"])
        .log_x()
        .labels("drive frequency (Hz)", "heat current (aW)")
        .scale_y(1e18);
    let svg = render_line_plot(&t, &spec)?;
    Ok((t, svg, failures))
}

fn filter(cfg: &RunConfig, hash: &str) -> Result<Produced, RunError> {
    let filt = cfg.lcl_filter()?;
    let mut t = ResultTable::new(
        "filter",
        hash,
        vec![
            Column::new("f", "Hz"),
            Column::new("s21_mag", "1"),
            Column::new("s21_db", "dB"),
            Column::new("s21_abcd_db", "dB"),
        ],
    );
    t.note("cutoff [Hz]", format!("{:e}", lcl_cutoff(&filt)));
    for f in cfg.filter_grid() {
        let closed = lcl_s21(f, &filt);
        let abcd = s21(&filt.abcd(f)?, filt.z0)?;
        t.push_row(vec![f, closed.norm(), to_db(closed), to_db(abcd)])?;
    }
    let spec = PlotSpec::new("LCL gate-line filter", "f", &["s21_db"]).labels("frequency (Hz)", "|S21| (dB)");
    let svg = render_line_plot(&t, &spec)?;
    Ok((t, svg, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config;

    #[test]
    fn filter_preset_is_deterministic() {
        let mut cfg = parse_config("[filter]\npoints = 50\n").unwrap();
        cfg.experiment = Experiment::Filter;
        let a = run_experiment(&cfg).unwrap();
        let b = run_with_threads(&cfg, Some(2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.table.rows.len(), 50);
        assert!(a.stem().starts_with("filter_"));
    }

    #[test]
    fn spectrum_preset_levels_are_ordered() {
        let mut cfg = RunConfig { experiment: Experiment::Spectrum, ..RunConfig::default() };
        cfg.spectrum.ng_points = 11;
        let out = run_experiment(&cfg).unwrap();
        for row in &out.table.rows {
            assert!(row[1] <= row[2] && row[2] <= row[3]);
        }
    }

    #[test]
    fn exit_codes() {
        let c = RunError::Config(ConfigError::Validation { field: "x".into(), message: "y".into() });
        assert_eq!(c.exit_code(), 2);
        assert_eq!(RunError::Numerical("z".into()).exit_code(), 3);
    }
}
