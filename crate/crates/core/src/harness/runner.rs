//! Dispatch from a configuration to the experiment code, and the artifact
//! writing around it.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Experiment, ExperimentConfig, Format};
use super::coupon::coupon_collector_experiment;
use super::oracle;
use super::output::{write_file, write_manifest, Records, Row, RunManifest, RunStatus};
use super::{matrix_recipe, simplex_recipe, DEFAULT_C};
use crate::coupling::{
    cayley_connectedness, matrix_connectedness, run_nonmarkovian_coupling, CayleyPairs,
    RunOptions, UniformPairs,
};
use crate::error::{Error, Result};
use crate::group::build_cyclic;
use crate::kernel::{
    base_walk_kernel, comparison_kernel, comparison_report, edge_walk_kernel, spectral_summary,
};
use crate::matrix::{self, msample_stationary, MatrixState};
use crate::rng::{derive_seed, replica_rng};
use crate::simplex::{self, sample_stationary, SimplexState};
use crate::{COUPLING_TOL, SPECTRAL_TOL};

/// A named check; a failed one makes the run exit with status 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Assertion {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Records,
    pub summary: Value,
    pub assertions: Vec<Assertion>,
    /// Additional files written next to the results, as `(name, contents)`.
    pub extra_files: Vec<(String, String)>,
    /// Lines meant for standard output.
    pub stdout: Vec<String>,
}

impl ExperimentOutput {
    fn new(records: Records, summary: Value) -> Self {
        ExperimentOutput {
            records,
            summary,
            assertions: Vec::new(),
            extra_files: Vec::new(),
            stdout: Vec::new(),
        }
    }

    fn check(mut self, name: &str, passed: bool, detail: String) -> Self {
        self.assertions.push(Assertion::new(name, passed, detail));
        self
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Runs the experiment named in `cfg` and returns its records without
/// touching the filesystem.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Gap => gap(cfg),
        Experiment::Compare => compare(cfg),
        Experiment::SRecursion => s_recursion(cfg),
        Experiment::ContractSimplex => contract_simplex(cfg),
        Experiment::ContractMatrix => contract_matrix(cfg),
        Experiment::IdentityMatrix => identity_matrix(cfg),
        Experiment::CoupleSimplex => couple_simplex(cfg),
        Experiment::CoupleMatrix => couple_matrix(cfg),
        Experiment::Connect => connect(cfg),
        Experiment::Largeness => largeness(cfg),
        Experiment::LowerboundSimplex => lowerbound_simplex(cfg),
        Experiment::LowerboundMatrix => lowerbound_matrix(cfg),
        Experiment::Oracle => oracle_suite(cfg),
    }
}

fn gap(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let base = base_walk_kernel(&cayley);
    let edge = edge_walk_kernel(&cayley);
    let comp = comparison_kernel(&cayley)?;
    let mut rows = Vec::new();
    let mut summaries = serde_json::Map::new();
    for (name, k) in [("base", &base), ("edge", &edge), ("comparison", &comp)] {
        let s = spectral_summary(k)?;
        for (i, e) in s.eigenvalues.iter().enumerate() {
            rows.push(Row::stat(format!("{name}.eigenvalue.{i}"), *e));
        }
        rows.push(Row::stat(format!("{name}.gap"), s.gap));
        summaries.insert(name.to_string(), to_value(&s));
    }
    let sb = spectral_summary(&base)?;
    let sc = spectral_summary(&comp)?;
    let n = cayley.order();
    let mut out = ExperimentOutput::new(Records::Rows(rows), Value::Object(summaries))
        .check(
            "leading eigenvalue is 1",
            (sb.eigenvalues[0] - 1.0).abs() <= SPECTRAL_TOL,
            format!("{}", sb.eigenvalues[0]),
        )
        .check(
            "comparison gap >= base gap / 8",
            sc.gap >= sb.gap / 8.0 - SPECTRAL_TOL,
            format!("{} vs {}", sc.gap, sb.gap / 8.0),
        );
    if n >= 4 {
        let lowest = *sb.eigenvalues.last().unwrap();
        out = out.check(
            "base walk eigenvalues nonnegative",
            lowest >= -SPECTRAL_TOL,
            format!("{lowest}"),
        );
    }
    out.extra_files = vec![
        ("kernel_base.csv".into(), base.to_csv()),
        ("kernel_edge.csv".into(), edge.to_csv()),
        ("kernel_comparison.csv".into(), comp.to_csv()),
    ];
    Ok(out)
}

fn compare(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let r = comparison_report(&cayley, cfg.replicas, cfg.seed)?;
    let rows = vec![
        Row::stat("min_dirichlet_ratio", r.min_dirichlet_ratio),
        Row::stat("max_measure_ratio", r.max_measure_ratio),
        Row::stat("gap", r.gap),
        Row::stat("base_gap", r.base_gap),
    ];
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r))
        .check("dirichlet ratio >= 1/4", r.dirichlet_ok(), format!("{}", r.min_dirichlet_ratio))
        .check("measure ratio <= 2", r.measure_ok(), format!("{}", r.max_measure_ratio))
        .check("gap >= base gap / 8", r.gap_ok(), format!("{} vs {}", r.gap, r.base_gap)))
}

fn s_recursion(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let n = cayley.order();
    let mut rng = replica_rng(cfg.seed, u64::MAX);
    let x = sample_stationary(n, &mut rng);
    let y = sample_stationary(n, &mut rng);
    let r = simplex::check_s_recursion(&x, &y, &cayley, cfg.replicas, cfg.seed)?;
    let mut rows = Vec::new();
    for h in 0..n {
        rows.push(Row::stat(format!("estimate.{h}"), r.estimates[h]));
        rows.push(Row::stat(format!("target.{h}"), r.targets[h]));
        rows.push(Row::stat(format!("std_error.{h}"), r.std_errors[h]));
    }
    let ok = r.ok();
    let detail = format!("max |z| = {}", r.max_z);
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r)).check(
        "one-step S expectation within 4 SE",
        ok,
        detail,
    ))
}

const CHECKPOINTS: usize = 10;

fn contract_simplex(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let n = cayley.order();
    let gap = spectral_summary(&base_walk_kernel(&cayley))?.gap;
    let horizon = cfg.t.unwrap_or((240.0 / gap).ceil() as usize);
    let x0 = SimplexState::point_mass(n, cayley.group().identity());
    let r = simplex::contraction_experiment(&cayley, &x0, horizon, cfg.replicas, CHECKPOINTS, cfg.seed)?;
    let mut rows = Vec::new();
    for (p, col) in r.points.iter().zip(&r.samples) {
        for (rep, v) in col.iter().enumerate() {
            rows.push(Row::replica(Some(p.t), rep, "sq_distance", *v));
        }
        rows.push(Row::at(p.t, "mean_sq_distance", p.mean_sq_distance));
        rows.push(Row::at(p.t, "std_error", p.std_error));
        rows.push(Row::at(p.t, "bound", p.bound));
    }
    let (ok, mono) = (r.bound_holds(), r.monotone_within_error());
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r))
        .check("E|X-Y|^2 below 4n exp(-floor(t gap/8))", ok, String::new())
        .check("E|X-Y|^2 non-increasing within 4 SE", mono, String::new()))
}

fn contract_matrix(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_or(10);
    let horizon = cfg.t.unwrap_or(40 * n);
    let r = matrix::mcontraction_experiment(n, horizon, cfg.replicas, CHECKPOINTS, cfg.seed)?;
    let mut rows = Vec::new();
    for p in &r.points {
        rows.push(Row::at(p.t, "mean_sq_distance", p.mean_sq_distance));
        if let (Some(ratio), Some(se)) = (p.ratio, p.ratio_se) {
            rows.push(Row::at(p.t, "ratio", ratio));
            rows.push(Row::at(p.t, "ratio_se", se));
        }
    }
    rows.push(Row::stat("bound", r.bound));
    rows.push(Row::stat("slope", r.slope));
    let ok = r.ratios_ok();
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r)).check(
        "per-step ratio <= 1 - 2/(3n) + 4 SE",
        ok,
        format!("bound {}", r.bound),
    ))
}

fn identity_matrix(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_or(10);
    let residual = matrix::identity_sweep(n, cfg.replicas, cfg.seed)?;
    Ok(ExperimentOutput::new(
        Records::Rows(vec![Row::stat("max_identity_residual", residual)]),
        json!({ "n": n, "pairs": cfg.replicas, "max_identity_residual": residual }),
    )
    .check("identity residual <= 1e-10", matrix::identity_ok(residual), format!("{residual}")))
}

fn coupling_summary(res: &crate::coupling::RunResult, t1: usize, t2: usize) -> Value {
    let count = |f: &dyn Fn(&crate::coupling::CouplingOutcome) -> bool| {
        res.outcomes.iter().filter(|o| f(o)).count()
    };
    json!({
        "T1": t1,
        "T2": t2,
        "replicas": res.outcomes.len(),
        "coupling_frequency": res.coupling_frequency(),
        "not_connected": count(&|o| !o.connected),
        "subset_failed": count(&|o| o.connected && o.subset_failures > 0),
        "max_final_gap_coupled": res.outcomes.iter().filter(|o| o.coupled).map(|o| o.max_final_gap).fold(0.0, f64::max),
    })
}

fn coupling_checks(out: ExperimentOutput, res: &crate::coupling::RunResult) -> ExperimentOutput {
    let w = res.outcomes.iter().map(|o| o.max_w_gap).fold(0.0, f64::max);
    out.check(
        "coupled replicas meet within 1e-8",
        res.final_coupling_holds(COUPLING_TOL),
        String::new(),
    )
    .check("subset steps equalize block mass within 1e-12", w <= 1e-12, format!("{w:e}"))
}

fn couple_simplex(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let n = cayley.order();
    let gap = spectral_summary(&base_walk_kernel(&cayley))?.gap;
    let (r1, r2) = simplex_recipe(n, gap, cfg.threshold("C", DEFAULT_C));
    let (t1, t2) = (cfg.t1.unwrap_or(r1), cfg.t2.unwrap_or(r2));
    let x0 = SimplexState::point_mass(n, cayley.group().identity());
    let opts = RunOptions::new(t1, t2, cfg.replicas, cfg.seed);
    let res = run_nonmarkovian_coupling(
        &CayleyPairs { cayley: &cayley },
        &x0,
        |rng| Ok(sample_stationary(n, rng)),
        &opts,
    )?;
    let summary = coupling_summary(&res, t1, t2);
    let out = ExperimentOutput::new(Records::Outcomes(res.outcomes.clone()), summary);
    Ok(coupling_checks(out, &res))
}

fn couple_matrix(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_or(16);
    let (r1, r2) = matrix_recipe(n, cfg.threshold("C", DEFAULT_C));
    let (t1, t2) = (cfg.t1.unwrap_or(r1), cfg.t2.unwrap_or(r2));
    let opts = RunOptions::new(t1, t2, cfg.replicas, cfg.seed);
    let res = run_nonmarkovian_coupling(
        &UniformPairs { n },
        &MatrixState::extreme(n),
        |rng| msample_stationary(n, rng),
        &opts,
    )?;
    let summary = coupling_summary(&res, t1, t2);
    let out = ExperimentOutput::new(Records::Outcomes(res.outcomes.clone()), summary);
    Ok(coupling_checks(out, &res))
}

fn connect(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let r = match &cfg.group {
        Some(_) => cayley_connectedness(&cfg.cayley()?, cfg.threshold("C", 1.0), cfg.replicas, cfg.seed)?,
        None => matrix_connectedness(cfg.n_or(64), cfg.threshold("epsilon", 0.5), cfg.replicas, cfg.seed),
    };
    let mut rows: Vec<Row> = r
        .taus
        .iter()
        .enumerate()
        .map(|(rep, t)| Row::replica(None, rep, "tau", t.map_or(f64::INFINITY, |t| t as f64)))
        .collect();
    rows.push(Row::stat("threshold", r.threshold));
    rows.push(Row::stat("tail", r.tail));
    rows.push(Row::stat("bound", r.bound));
    let ok = r.bound_holds();
    let detail = format!("P[tau > {}] = {} vs {}", r.threshold, r.tail, r.bound);
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r)).check(
        "connection tail below bound",
        ok,
        detail,
    ))
}

fn largeness(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_or(20);
    let k = cfg.threshold("k", 1.0);
    let steps = cfg.t.unwrap_or(1_000_000);
    let window = cfg.t2.unwrap_or(n * n);
    let mut rng = replica_rng(cfg.seed, u64::MAX);
    let x0 = msample_stationary(n, &mut rng)?;
    let mono = matrix::monotone_couple_run(&x0, steps, k, derive_seed(cfg.seed, u64::MAX - 1));
    let (domination_ok, mono_value, detail) = match mono {
        Ok(r) => (true, to_value(&r), format!("min gap {}", r.min_domination_gap)),
        Err(Error::DominationViolated { t, i, gap }) => (
            false,
            json!({ "violation": { "t": t, "i": i, "gap": gap } }),
            format!("t = {t}, i = {i}, gap = {gap}"),
        ),
        Err(e) => return Err(e),
    };
    let large = matrix::largeness_experiment(n, window, k, cfg.replicas, cfg.seed)?;
    let mut rows: Vec<Row> = large
        .min_entries
        .iter()
        .zip(&large.max_entries)
        .enumerate()
        .flat_map(|(rep, (lo, hi))| {
            [
                Row::replica(None, rep, "min_entry", *lo),
                Row::replica(None, rep, "max_entry", *hi),
            ]
        })
        .collect();
    rows.push(Row::stat("threshold", large.threshold));
    rows.push(Row::stat("frequency_inside", large.frequency_inside));
    rows.push(Row::stat("target", large.target));
    let mut summary = json!({ "monotone": mono_value, "matrix_largeness": to_value(&large) });
    if let Some(g) = &cfg.group {
        let cayley = g.build()?;
        let s = simplex::largeness_experiment(&cayley, window, k, cfg.replicas, cfg.seed);
        summary["simplex_largeness"] = to_value(&s);
    }
    Ok(ExperimentOutput::new(Records::Rows(rows), summary).check(
        "matrix column dominates simplex chain",
        domination_ok,
        detail,
    ))
}

fn lowerbound_simplex(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let cayley = cfg.cayley()?;
    let n = cayley.order();
    let d = cfg.threshold("d", 4.0 / n as f64);
    let horizon = cfg.t.unwrap_or(50);
    let r = simplex::lower_bound_experiment(&cayley, horizon, d, cfg.replicas, CHECKPOINTS + 1, cfg.seed)?;
    let mut rows = Vec::new();
    for p in &r.points {
        rows.push(Row::at(p.t, "mean_inner_product", p.mean));
        rows.push(Row::at(p.t, "std_error", p.std_error));
        rows.push(Row::at(p.t, "exact_inner_product", p.exact));
        rows.push(Row::at(p.t, "tail", p.tail));
        rows.push(Row::at(p.t, "tail_bound", p.tail_bound));
    }
    rows.push(Row::stat("slope", r.slope));
    rows.push(Row::stat("expected_slope", r.expected_slope));
    rows.push(Row::stat("stationary_tail", r.stationary_tail));
    rows.push(Row::stat("tv_lower_bound", r.tv_lower_bound));
    let start_ok = (r.points[0].mean - r.x0_dot_v).abs() <= 1e-12;
    let moment_ok = r.stationary_moment_ok();
    let detail = format!("{} vs {}", r.stationary_second_moment, 2.0 / (n * n) as f64);
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r))
        .check("E<X_0, v> = <mu, v>", start_ok, String::new())
        .check("E<Y, v>^2 <= 2/n^2 within 4 SE", moment_ok, detail))
}

fn lowerbound_matrix(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let n = cfg.n_or(200);
    let c = cfg.threshold("c", 0.0);
    let r = coupon_collector_experiment(n, c, cfg.replicas, cfg.seed);
    let rows = vec![
        Row::at(r.t, "miss_probability", r.miss_probability),
        Row::at(r.t, "std_error", r.std_error),
        Row::at(r.t, "target", r.target),
    ];
    Ok(ExperimentOutput::new(Records::Rows(rows), to_value(&r)))
}

fn oracle_suite(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let suite = cfg.suite.as_deref().unwrap_or_default();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    match suite {
        "kernel-enumeration" => {
            let cayley = match &cfg.group {
                Some(g) => g.build()?,
                None => build_cyclic(4, &[1, 3])?,
            };
            for (a, row) in oracle::kernel_enumeration(&cayley).iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|v| oracle::fmt12(*v)).collect();
                lines.push(format!("row {a}: [{}]", cells.join(", ")));
                for (b, v) in row.iter().enumerate() {
                    rows.push(Row::stat(format!("p.{a}.{b}"), *v));
                }
            }
        }
        "acceptance-rate" => {
            let n = cfg.n_or(3);
            if n < 3 {
                return Err(Error::Config("acceptance-rate needs n >= 3".into()));
            }
            let v = oracle::acceptance_rate(n);
            lines.push(format!("acceptance-rate(n={n}) = {}", oracle::fmt12(v)));
            rows.push(Row::stat("acceptance_rate", v));
        }
        "schedule-enumeration" => {
            let n = cfg.n_or(3);
            let len = cfg.t.unwrap_or(4);
            if !(2..=5).contains(&n) || len > 12 {
                return Err(Error::Config("schedule-enumeration needs 2 <= n <= 5 and T <= 12".into()));
            }
            let v = oracle::schedule_enumeration(n, len);
            lines.push(format!("P[tau <= {len}] (n={n}) = {}", oracle::fmt12(v)));
            rows.push(Row::at(len, "p_connected", v));
        }
        "marginal-density" => {
            let n = cfg.n_or(3);
            if !(3..=20).contains(&n) {
                return Err(Error::Config("marginal-density needs 3 <= n <= 20".into()));
            }
            for p in oracle::marginal_density(n, 21) {
                lines.push(format!("f({}) = {}", oracle::fmt12(p.u), oracle::fmt12(p.density)));
                rows.push(Row::stat(format!("density.{}", p.u), p.density));
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown oracle suite {other:?}; expected one of {:?}",
                oracle::SUITES
            )))
        }
    }
    let mut out = ExperimentOutput::new(Records::Rows(rows), json!({ "suite": suite, "lines": lines }));
    out.stdout = lines;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: ExperimentOutput,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.output.assertions.iter().all(|a| a.passed)
    }
}

/// Executes `cfg` and writes `manifest.json`, `results.{csv,jsonl}`,
/// `summary.json` and any extra files into `dir`. The manifest is written
/// first with status `running` and rewritten at the end.
pub fn run(cfg: &ExperimentConfig, dir: &Path, format: Format) -> Result<RunSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let started = Instant::now();
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let mut manifest = RunManifest {
        status: RunStatus::Running,
        experiment: cfg.experiment.name().to_string(),
        config: cfg.clone(),
        seed: cfg.seed,
        derived_seeds: (0..cfg.replicas as u64).map(|i| derive_seed(cfg.seed, i)).collect(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms,
        wall_clock_seconds: None,
        outputs: Vec::new(),
        assertions_passed: None,
    };
    let manifest_path = write_manifest(dir, &manifest)?;
    let output = match execute(cfg) {
        Ok(o) => o,
        Err(e) => {
            manifest.status = RunStatus::Failed;
            manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
            write_manifest(dir, &manifest)?;
            return Err(e);
        }
    };
    let mut files = vec![manifest_path];
    let results = dir.join(format!("results.{}", format.extension()));
    write_file(&results, &output.records.encode(format)?)?;
    files.push(results);
    let summary = json!({ "summary": output.summary, "assertions": to_value(&output.assertions) });
    let summary_path = dir.join("summary.json");
    write_file(
        &summary_path,
        &(serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))? + "\n"),
    )?;
    files.push(summary_path);
    for (name, contents) in &output.extra_files {
        let p = dir.join(name);
        write_file(&p, contents)?;
        files.push(p);
    }
    manifest.outputs = files
        .iter()
        .skip(1)
        .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .collect();
    manifest.status = RunStatus::Complete;
    manifest.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    manifest.assertions_passed = Some(output.assertions.iter().all(|a| a.passed));
    write_manifest(dir, &manifest)?;
    Ok(RunSummary { output, files })
}

/// Process exit status for a run result: 0 ok, 1 configuration error,
/// 2 failed assertion or violated invariant.
pub fn exit_code(result: &Result<RunSummary>) -> i32 {
    match result {
        Ok(s) if s.passed() => 0,
        Ok(_) => 2,
        Err(
            Error::Config(_)
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::InvariantViolation(_)
            | Error::SizeLimitExceeded(_)
            | Error::InvalidParameter(_),
        ) => 1,
        Err(_) => 2,
    }
}
