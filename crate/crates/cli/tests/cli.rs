use std::path::Path;
use std::process::{Command, Output};

use jtcran_cli::output::Manifest;
use jtcran_cli::{compute, ExperimentKind, ExperimentSpec};

fn jtcran(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_jtcran"));
    cmd.args(args).env_remove("CRAN_JT_SEED");
    if let Some(s) = seed {
        cmd.env("CRAN_JT_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn small_coverage(dir: &Path) -> String {
    format!(
        "kind = \"coverage_curve\"\noutput = {:?}\n[sweep]\nantennas = [1, 2]\ntheta_db = [-5.0, 10.0]\n[mc]\nrealizations = 300\n",
        dir.join("out")
    )
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("spec.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_tables_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &small_coverage(tmp.path()));
    let out = jtcran(&["run", &cfg], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("out/coverage.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("antennas,theta_db,value,error,source"));
    // 2 antennas x 2 thresholds x 2 sources.
    assert_eq!(lines.count(), 8);
    let gaps = std::fs::read_to_string(tmp.path().join("out/coverage_gaps.csv")).unwrap();
    assert!(gaps.starts_with("antennas,value,error,source\n"));
    let manifest = Manifest::from_toml(&std::fs::read_to_string(tmp.path().join("out/manifest.toml")).unwrap()).unwrap();
    assert_eq!(manifest.spec.sweep.antennas, vec![1, 2]);
    assert_eq!(manifest.spec.mc.realizations, 300);
    assert!(manifest.diagnostics.contains_key("analytic_max_quad_error"));
    assert!(manifest.diagnostics.contains_key("empirical_max_half_width"));
}

#[test]
fn manifest_spec_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &small_coverage(tmp.path()));
    assert!(jtcran(&["run", &cfg], Some("17")).status.success());
    let first = std::fs::read(tmp.path().join("out/coverage.csv")).unwrap();
    let manifest = std::fs::read_to_string(tmp.path().join("out/manifest.toml")).unwrap();
    let spec = Manifest::from_toml(&manifest).unwrap().spec;
    assert_eq!(spec.mc.master_seed, 17);
    // The echoed spec parses back to itself and reruns to the same bytes.
    assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    let again = compute(&spec).unwrap();
    assert_eq!(again.tables[0].to_csv(), first);
}

#[test]
fn worker_count_does_not_change_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &small_coverage(tmp.path()));
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let dir = tmp.path().join(format!("w{w}"));
        let out = jtcran(&["run", &cfg, "--workers", w, "--output", dir.to_str().unwrap()], None);
        assert!(out.status.success());
        outputs.push((
            std::fs::read(dir.join("coverage.csv")).unwrap(),
            std::fs::read(dir.join("coverage_gaps.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_variable_changes_empirical_rows_only() {
    let tmp = tempfile::tempdir().unwrap();
    let text = small_coverage(tmp.path());
    let base: ExperimentSpec = ExperimentSpec::from_toml(&text).unwrap();
    let a = compute(&base.clone().with_seed_override(Some("1")).unwrap()).unwrap();
    let b = compute(&base.with_seed_override(Some("2")).unwrap()).unwrap();
    let rows = |t: &jtcran_cli::output::Table, src: &str| -> Vec<Vec<String>> {
        t.rows.iter().filter(|r| r[4] == src).cloned().collect()
    };
    assert_eq!(rows(&a.tables[0], "analytic"), rows(&b.tables[0], "analytic"));
    assert_ne!(rows(&a.tables[0], "empirical"), rows(&b.tables[0], "empirical"));
}

#[test]
fn config_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "kind = \"se_map\"\n[mc]\nrealisations = 10\n");
    let out = jtcran(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("realisations") && err.contains("line 3"), "{err}");
    assert_eq!(jtcran(&["run", "/nonexistent/spec.toml"], None).status.code(), Some(1));
    let cfg = write_config(tmp.path(), &small_coverage(tmp.path()));
    assert_eq!(jtcran(&["run", &cfg], Some("seven")).status.code(), Some(1));
    let cfg = write_config(tmp.path(), "kind = \"se_map\"\n[truncation]\nquad_rel_tol = 1e-300\n");
    assert_eq!(jtcran(&["run", &cfg], None).status.code(), Some(1));
}

#[test]
fn numeric_failures_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    // Series capped well before their tails fall under the mass budget.
    let text = format!(
        "kind = \"coverage_curve\"\noutput = {:?}\n[sweep]\nantennas = [1]\ntheta_db = [0.0]\n[mc]\nenabled = false\n[truncation]\nmax_terms = 3\n",
        tmp.path().join("out")
    );
    let cfg = write_config(tmp.path(), &text);
    let out = jtcran(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("M = 1"));
}

#[test]
fn show_defaults_parses_back() {
    for kind in ["coverage_curve", "se_map", "interference_ratio_map", "validation_suite"] {
        let out = jtcran(&["show-defaults", "--kind", kind], None);
        assert!(out.status.success());
        let spec = ExperimentSpec::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(spec.kind.name(), kind);
    }
    let spec = ExperimentSpec::defaults(ExperimentKind::SeMap);
    assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
}

#[test]
fn validate_prints_one_line_per_check() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("v");
    let out = jtcran(&["validate", "--quick", "--only", "1,2,7,8", "--output", dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 4, "{stdout}");
    assert!(lines.iter().all(|l| l.starts_with("[PASS]")), "{stdout}");
    let csv = std::fs::read_to_string(dir.join("validation.csv")).unwrap();
    assert!(csv.starts_with("id,check,value,tolerance,status,gating,detail,source\n"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            jtcran_cli::parse_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert_eq!(n, 5);
}
