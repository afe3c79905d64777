//! Parse a TOML run configuration, run a preset and write the CSV and SVG
//! outputs, as the command-line tool does.
//!
//! Run with `cargo run --example config_and_outputs [output-dir]`.

use cpb_fridge::io::{parse_config, run_experiment, write_outputs};

const CONFIG: &str = r#"
experiment = "filter"
seed = 5

[filter]
inductance = "5.9 nH"
capacitance = "1.7 pF"
f_min = "100 MHz"
f_max = "14 GHz"
points = 300
"#;

fn main() {
    let cfg = parse_config(CONFIG).expect("valid configuration");
    println!("config hash {}", cfg.hash());
    let out = run_experiment(&cfg).expect("run");
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("cpbfridge-example"));
    let (csv, svg) = write_outputs(&out, &dir).expect("write outputs");
    println!("wrote {}", csv.display());
    println!("wrote {}", svg.display());
    for line in out.table.to_csv().lines().take(6) {
        println!("  {line}");
    }

    match parse_config("[filter]\ninductance = \"5.9 pF\"\n") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected as expected: {e}"),
    }
}
