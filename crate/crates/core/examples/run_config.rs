//! Runs an experiment from a JSON configuration and writes its artifacts.
//!
//! `cargo run --example run_config -- path/to/config.json out/`

use std::path::PathBuf;

use gibbs_coupling::harness::{exit_code, run, ExperimentConfig, Format};

fn main() {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => ExperimentConfig::load(path).expect("config"),
        None => ExperimentConfig::from_json(
            r#"{"experiment": "gap", "group": {"family": "cyclic", "n": 8, "gens": [1, -1]}}"#,
        )
        .unwrap(),
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("gap-run"));
    let result = run(&cfg, &out, Format::Csv);
    if let Ok(summary) = &result {
        for f in &summary.files {
            println!("{}", f.display());
        }
        for a in &summary.output.assertions {
            println!("{} {}", if a.passed { "ok" } else { "FAILED" }, a.name);
        }
    }
    std::process::exit(exit_code(&result));
}
