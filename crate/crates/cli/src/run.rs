//! Experiment orchestration.
//!
//! Grid points are computed in a fixed order and every parallel step
//! collects its results by index, so the tables depend only on the spec and
//! the seed, not on the number of workers.

use std::collections::BTreeMap;
use std::time::Instant;

use jtcran::charfn::AnalyticModel;
use jtcran::coverage::{coverage_points, mean_se_with_error};
use jtcran::montecarlo::{empirical_coverage, interference_ratio, simulate_sinr};
use jtcran::stats::mean_var;
use jtcran::validation::{campbell_ratio, run_suite, Check};
use jtcran::Error;

use crate::config::{ExperimentKind, ExperimentSpec};
use crate::error::{CliError, Result};
use crate::output::{num, prepare_output, write_all, Manifest, Table};

/// Tables and diagnostics of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub diagnostics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl RunOutput {
    fn new() -> Self {
        RunOutput {
            tables: Vec::new(),
            diagnostics: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    fn record_max(&mut self, key: &str, value: f64) {
        let e = self.diagnostics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(value);
    }

    /// Gating checks that failed.
    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.gating && !c.passed).collect()
    }
}

/// Result of [`execute`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: RunOutput,
    pub manifest: Manifest,
    pub written: Vec<std::path::PathBuf>,
}

/// Computes the tables of `spec` on a pool of `spec.mc.workers` threads
/// (all cores when 0).
pub fn compute(spec: &ExperimentSpec) -> Result<RunOutput> {
    spec.validate()?;
    let job = || match spec.kind {
        ExperimentKind::CoverageCurve => coverage_curves(spec),
        ExperimentKind::SeMap => se_map(spec),
        ExperimentKind::InterferenceRatioMap => ratio_map(spec),
        ExperimentKind::ValidationSuite => validation_suite(spec),
    };
    if spec.mc.workers == 0 {
        return job();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.mc.workers)
        .build()
        .map_err(|e| CliError::Config(format!("mc.workers: {e}")))?;
    pool.install(job)
}

/// Runs `spec`, writes its tables and manifest, and reports failing gates
/// as [`CliError::Gate`] after everything is written.
pub fn execute(spec: &ExperimentSpec) -> Result<RunSummary> {
    let start = Instant::now();
    prepare_output(&spec.output)?;
    let output = compute(spec)?;
    let manifest = Manifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: spec.mc.master_seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: output.tables.iter().map(Table::file_name).collect(),
        diagnostics: output.diagnostics.clone(),
        spec: spec.clone(),
    };
    let written = write_all(&spec.output, &output.tables, &manifest)?;
    Ok(RunSummary {
        output,
        manifest,
        written,
    })
}

fn at(e: Error, point: String) -> CliError {
    CliError::Numeric(e.in_context(point))
}

fn coverage_curves(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    let thetas: Vec<f64> = spec.sweep.theta_db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let mut curves = Table::new("coverage", &["antennas", "theta_db", "value", "error", "source"]);
    let mut gaps = Table::new("coverage_gaps", &["antennas", "value", "error", "source"]);
    for &m in &spec.sweep.antennas {
        let params = spec.params.with_antennas(m);
        let model = AnalyticModel::new(params, spec.truncation, spec.analytic).map_err(|e| at(e, format!("M = {m}")))?;
        let points = coverage_points(&model, &thetas).map_err(|e| at(e, format!("M = {m}")))?;
        for (db, p) in spec.sweep.theta_db.iter().zip(&points) {
            curves.push(vec![m.to_string(), num(*db), num(p.coverage), num(p.quad_error), "analytic".into()]);
            out.record_max("analytic_max_quad_error", p.quad_error);
            out.record_max("analytic_max_neglected_mass", p.neglected_mass);
            out.record_max("analytic_max_cf_residual", p.cf_residual);
        }
        if spec.mc.enabled {
            let samples = simulate_sinr(&params, &spec.mc.sim()).map_err(|e| at(e, format!("M = {m}")))?;
            let emp = empirical_coverage(&samples, &thetas, "empirical");
            let (lo, hi) = (emp.lower.as_ref().expect("bands"), emp.upper.as_ref().expect("bands"));
            let mut widest = 0.0f64;
            let mut gap = 0.0f64;
            for (k, db) in spec.sweep.theta_db.iter().enumerate() {
                let half = 0.5 * (hi[k] - lo[k]);
                widest = widest.max(half);
                gap = gap.max((emp.values[k] - points[k].coverage).abs());
                curves.push(vec![m.to_string(), num(*db), num(emp.values[k]), num(half), "empirical".into()]);
            }
            gaps.push(vec![m.to_string(), num(gap), num(widest), "analytic_vs_empirical".into()]);
            out.record_max("empirical_max_half_width", widest);
            out.record_max("max_gap", gap);
        }
    }
    out.tables.push(curves);
    if !gaps.rows.is_empty() {
        out.tables.push(gaps);
    }
    Ok(out)
}

fn se_map(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    let mut t = Table::new("se_map", &["lambda_r", "lambda_u", "value", "error", "source"]);
    for &lr in &spec.sweep.lambda_r {
        for &lu in &spec.sweep.lambda_u {
            let params = spec.params.with_densities(lr, lu);
            let point = || format!("lambda_r = {lr}, lambda_u = {lu}");
            let model = AnalyticModel::new(params, spec.truncation, spec.analytic).map_err(|e| at(e, point()))?;
            let (value, error) = mean_se_with_error(&model, spec.se_grid).map_err(|e| at(e, point()))?;
            t.push(vec![num(lr), num(lu), num(value), num(error), "analytic".into()]);
            out.record_max("analytic_max_se_error", error);
            if spec.mc.enabled {
                let samples = simulate_sinr(&params, &spec.mc.sim()).map_err(|e| at(e, point()))?;
                let se: Vec<f64> = samples.sinr().iter().map(|s| s.ln_1p() / std::f64::consts::LN_2).collect();
                let (mean, var) = mean_var(&se);
                let std_error = (var / se.len() as f64).sqrt();
                t.push(vec![num(lr), num(lu), num(mean), num(std_error), "empirical".into()]);
                out.record_max("empirical_max_std_error", std_error);
            }
        }
    }
    out.tables.push(t);
    Ok(out)
}

fn ratio_map(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    let mut t = Table::new("interference_ratio", &["lambda_r", "lambda_u", "value", "error", "source"]);
    let sim = spec.mc.sim();
    for &lr in &spec.sweep.lambda_r {
        for &lu in &spec.sweep.lambda_u {
            let params = spec.params.with_densities(lr, lu);
            let point = || format!("lambda_r = {lr}, lambda_u = {lu}");
            let est = interference_ratio(&params, &sim).map_err(|e| at(e, point()))?;
            t.push(vec![num(lr), num(lu), num(est.ratio), num(est.std_error), "empirical".into()]);
            let window = sim.window_for(&params).map_err(|e| at(e, point()))?.radius;
            t.push(vec![num(lr), num(lu), num(campbell_ratio(&params, window)), "0".into(), "campbell".into()]);
            out.record_max("empirical_max_std_error", est.std_error);
            out.record_max("max_zero_outer_fraction", est.zero_outer as f64 / est.realizations as f64);
        }
    }
    out.tables.push(t);
    Ok(out)
}

fn validation_suite(spec: &ExperimentSpec) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    let only = (!spec.validation.only.is_empty()).then_some(spec.validation.only.as_slice());
    let mut checks = run_suite(&spec.suite_settings(), only)?;
    if only.is_none_or(|ids| ids.contains(&8)) {
        checks.push(determinism_check(spec.mc.master_seed)?);
    }
    checks.sort_by_key(|c| (c.id, !c.gating));
    let mut t = Table::new(
        "validation",
        &["id", "check", "value", "tolerance", "status", "gating", "detail", "source"],
    );
    for c in &checks {
        t.push(vec![
            c.id.to_string(),
            c.name.clone(),
            num(c.metric),
            num(c.tolerance),
            if c.passed { "pass" } else { "fail" }.into(),
            c.gating.to_string(),
            c.detail.clone(),
            "validation".into(),
        ]);
        out.diagnostics.insert(format!("check_{}_{}_seconds", c.id, if c.gating { "gate" } else { "diag" }), c.seconds);
    }
    out.tables.push(t);
    out.checks = checks;
    Ok(out)
}

/// Runs a small coverage experiment with one and with three workers and
/// compares the CSV bytes.
pub fn determinism_check(master_seed: u64) -> Result<Check> {
    let start = Instant::now();
    let mut spec = ExperimentSpec::defaults(ExperimentKind::CoverageCurve);
    spec.sweep.antennas = vec![1, 2];
    spec.sweep.theta_db = vec![-5.0, 5.0, 15.0];
    spec.mc.realizations = 600;
    spec.mc.master_seed = master_seed;
    let render = |workers: usize| -> Result<Vec<(String, Vec<u8>)>> {
        let spec = ExperimentSpec {
            mc: crate::config::McSpec { workers, ..spec.mc },
            ..spec.clone()
        };
        Ok(compute(&spec)?.tables.iter().map(|t| (t.file_name(), t.to_csv())).collect())
    };
    let (a, b) = (render(1)?, render(3)?);
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    let bytes: usize = a.iter().map(|(_, v)| v.len()).sum();
    let detail = format!("{} tables, {bytes} bytes, 1 vs 3 workers", a.len());
    Ok(Check {
        id: 8,
        name: "determinism across worker counts".into(),
        passed: differing == 0,
        gating: true,
        metric: differing as f64,
        tolerance: 0.0,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}
