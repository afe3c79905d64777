//! End-to-end checks of the `cpbfridge` binary: file naming, headers,
//! determinism and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cpbfridge-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpbfridge")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn outputs(dir: &Path, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn filter_run_writes_named_csv_and_svg() {
    let dir = scratch("filter");
    let out = dir.join("out");
    let cfg = write_config(&dir, "[filter]\npoints = 200\nf_max = \"10 GHz\"\n");
    let o = run(&["filter", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csvs = outputs(&out, "csv");
    assert_eq!(csvs.len(), 1);
    let stem = csvs[0].file_stem().unwrap().to_str().unwrap().to_string();
    let hash = stem.strip_prefix("filter_").expect("name is <experiment>_<hash>");
    assert_eq!(hash.len(), 12);
    assert!(out.join(format!("{stem}.svg")).exists());

    let text = fs::read_to_string(&csvs[0]).unwrap();
    assert!(text.starts_with("# experiment: filter\n"));
    assert!(text.contains(&format!("# config_hash: {hash}")));
    assert!(text.contains("# units: f [Hz], s21_mag [1], s21_db [dB]"));
    let body = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(body, 201, "header line plus one row per grid point");
    let svg = fs::read_to_string(out.join(format!("{stem}.svg"))).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = scratch("determinism");
    let cfg = write_config(&dir, "[two_tone]\nnoise = 0.02\n");
    let mut texts = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.join(format!("out{k}"));
        let o = run(&["two_tone", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9", "--threads", threads]);
        assert!(o.status.success());
        let files = outputs(&out, "csv");
        texts.push((fs::read(&files[0]).unwrap(), fs::read(files[0].with_extension("svg")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);

    // A different seed changes the noise and therefore the hash.
    let out = dir.join("seed10");
    assert!(run(&["two_tone", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "10"]).status.success());
    assert_ne!(fs::read(&outputs(&out, "csv")[0]).unwrap(), texts[0].0);
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = scratch("config-errors");
    for body in ["[qubit]\nec = 6.8\n", "[qubit]\nec = \"6.8 mK\"\n", "bogus = 1\n", "[cold]\ng_eff_scale = 1.5\n"] {
        let cfg = write_config(&dir, body);
        let o = run(&["spectrum", "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "config {body:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
    let o = run(&["spectrum", "--config", dir.join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["spectrum", "--threads", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_code_3_and_flags_rows() {
    let dir = scratch("numerical");
    let out = dir.join("out");
    // Drive periods this long need more RK4 steps than the per-period cap.
    let cfg = write_config(&dir, "[otto_sweep]\nf_min = \"1 kHz\"\nf_max = \"2 kHz\"\npoints = 3\n");
    let o = run(&["otto_sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let text = fs::read_to_string(&outputs(&out, "csv")[0]).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 3, "failed points still get a row");
    assert!(rows.iter().all(|r| r.ends_with(",0e0") && r.contains("nan")));
    assert!(text.contains("# failed_points: 3"));
}
