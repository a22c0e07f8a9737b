use std::fs;
use std::path::Path;
use std::process::Command;

use picheck::config::{builtin_config, parse_config, to_toml};
use picheck::{output_files, run, write_outputs, CliError, Verdict};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_picheck"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn minimal_snap_gets_documented_defaults() {
    let loaded = parse_config("[model]\nbuiltin = \"snap\"\nd_A = 4\n", true).unwrap();
    let m = &loaded.config.model;
    assert_eq!(m.n, Some(2));
    assert_eq!(m.omega, Some(1.0));
    assert_eq!(m.chi, Some(0.5));
    assert_eq!(m.phases.as_deref(), Some(&[0.0, std::f64::consts::FRAC_PI_2][..]));
    assert_eq!(loaded.config.numerics.pass_tol, 1e-7);
    assert_eq!(loaded.config.numerics.fail_tol, 1e-4);
    assert!(loaded.config.checks.is_empty());
}

#[test]
fn pass_tol_must_be_below_fail_tol() {
    let text = "[model]\nbuiltin = \"snap\"\n[numerics]\npass_tol = 1e-3\nfail_tol = 1e-3\n";
    let err = parse_config(text, false).unwrap_err();
    assert!(matches!(&err, CliError::Invalid { field, .. } if field == "numerics.pass_tol"), "{err}");
}

#[test]
fn non_positive_tolerance_rejected() {
    let text = "[model]\nbuiltin = \"snap\"\n[numerics]\nzero_tol = 0.0\n";
    assert!(matches!(parse_config(text, false), Err(CliError::Invalid { .. })));
}

#[test]
fn path_outside_ancilla_rejected() {
    let text = "[model]\nbuiltin = \"snap\"\nd_A = 3\n[[checks]]\nkind = \"pi_order\"\npaths = [[1, 4]]\n";
    let err = parse_config(text, false).unwrap_err();
    assert!(err.to_string().contains("checks[0].paths"), "{err}");
    let text = "[model]\nbuiltin = \"snap\"\nd_A = 3\n[[checks]]\nkind = \"pi_order\"\npaths = [[0, 2]]\n";
    assert!(parse_config(text, false).is_err());
}

#[test]
fn parse_error_reports_line_and_column() {
    let err = parse_config("[model]\nbuiltin = \"snap\"\nd_A = = 4\n", false).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 3"), "{msg}");
    assert!(msg.contains("column"), "{msg}");
}

#[test]
fn unknown_keys_warn_or_fail() {
    let text = "[model]\nbuiltin = \"snap\"\ncolour = 1\n[[checks]]\nkind = \"cocycle\"\npaths = [[1, 2]]\n";
    let loaded = parse_config(text, false).unwrap();
    assert_eq!(loaded.warnings.len(), 2, "{:?}", loaded.warnings);
    assert!(parse_config(text, true).is_err());
}

#[test]
fn unknown_builtin_and_check_rejected() {
    assert!(parse_config("[model]\nbuiltin = \"cat\"\n", false).is_err());
    assert!(parse_config("[model]\nbuiltin = \"snap\"\n[[checks]]\nkind = \"magic\"\n", false).is_err());
}

#[test]
fn et_config_echo_round_trips() {
    let loaded = parse_config("[model]\nbuiltin = \"error_transparent\"\nd_A = 3\n", true).unwrap();
    let echo = to_toml(&loaded.config);
    let again = parse_config(&echo, true).unwrap();
    assert_eq!(again.config, loaded.config);
    assert_eq!(to_toml(&again.config), echo);
}

#[test]
fn builtin_configs_validate_strictly() {
    for name in ["snap", "error_transparent"] {
        let cfg = builtin_config(name).unwrap();
        let text = to_toml(&cfg);
        let loaded = parse_config(&text, true).unwrap();
        assert_eq!(loaded.config, cfg);
    }
    assert!(builtin_config("nope").is_err());
}

#[test]
fn explicit_model_runs() {
    // Identity family on two levels; H = σ_x ⊗ I is in the full algebra.
    let text = r#"
[model]
builtin = "explicit"
d_A = 2
d_B = 1
hamiltonian = [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
jumps = [[[[0.1, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]]

[[checks]]
kind = "cocycle"

[[checks]]
kind = "theorem1"
"#;
    let loaded = parse_config(text, true).unwrap();
    let report = run(&loaded.config, loaded.warnings).unwrap();
    assert_eq!(report.outcomes.len(), 2);
    assert!(report.outcomes.iter().all(|o| o.verdict == Verdict::Pass), "{:?}", report.outcomes);
}

#[test]
fn empty_checks_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[model]\nbuiltin = \"snap\"\nd_A = 3\n");
    let status = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("out")).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert_eq!(summary, "check,verdict,worst_residual,seconds\n");
}

#[test]
fn validate_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "g.toml", "[model]\nbuiltin = \"snap\"\n");
    let bad = write(dir.path(), "b.toml", "[model]\nbuiltin = \"snap\"\n[numerics]\npass_tol = 1.0\n");
    assert_eq!(bin().arg("validate").arg(&good).output().unwrap().status.code(), Some(0));
    assert_eq!(bin().arg("validate").arg(&bad).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("validate").arg(dir.path().join("missing.toml")).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["builtin", "nope", "--print-config"]).output().unwrap().status.code(), Some(2));
    let out = bin().arg("run").arg(&good).env("PICHECK_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn print_config_is_runnable() {
    let out = bin().args(["builtin", "error_transparent", "--print-config"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(parse_config(&text, true).is_ok());
}

fn parse_f64(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn order_csv_round_trips_report_values() {
    let text = r#"
[model]
builtin = "error_transparent"
variant = "broken"

[[checks]]
kind = "pi_order"
name = "et paths"
"#;
    let loaded = parse_config(text, true).unwrap();
    let cfg = loaded.config.clone();
    let report = run(&cfg, loaded.warnings).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&report, dir.path(), &output_files(&cfg)).unwrap();
    let data = report.outcomes[0].orders.as_ref().unwrap();

    let mut rdr = csv::Reader::from_path(dir.path().join("pi_order_1_et_paths.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["path_i", "path_r", "k", "residual", "c_real", "c_imag", "verdict"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let mut n = 0;
    for p in &data.report.paths {
        let e = &p.entries[0];
        for k in 0..e.residuals.len() {
            let row = &rows[n];
            assert_eq!(row[0].parse::<usize>().unwrap(), p.i + 1);
            assert_eq!(row[1].parse::<usize>().unwrap(), p.r + 1);
            assert_eq!(row[2].parse::<usize>().unwrap(), k);
            assert_eq!(parse_f64(&row[3]).to_bits(), e.residuals[k].to_bits());
            assert_eq!(parse_f64(&row[4]).to_bits(), e.constants[k].re.to_bits());
            assert_eq!(parse_f64(&row[5]).to_bits(), e.constants[k].im.to_bits());
            assert_eq!(&row[6], p.order.to_string());
            n += 1;
        }
    }
    assert_eq!(n, rows.len());
    // EXACT paths keep every residual within pass_tol.
    for row in rows.iter().filter(|r| &r[6] == "EXACT") {
        assert!(parse_f64(&row[3]) <= cfg.numerics.pass_tol);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let text = r#"
[model]
builtin = "error_transparent"

[[checks]]
kind = "lemma1"
draws = 5

[[checks]]
kind = "xi"
draws = 5

[[checks]]
kind = "pi_order"
"#;
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", text);
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let status = bin()
            .arg("run")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("PICHECK_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        reports.push((
            fs::read(out.join("report.txt")).unwrap(),
            fs::read(out.join("summary.csv")).unwrap(),
            fs::read(out.join("pi_order_3.csv")).unwrap(),
        ));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn seed_changes_generic_times() {
    let text = "[model]\nbuiltin = \"error_transparent\"\n[[checks]]\nkind = \"pi_order\"\n";
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", text);
    let mut texts = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(seed);
        let status = bin().arg("run").arg(&cfg).args(["--seed", seed]).arg("--out").arg(&out).output().unwrap().status;
        assert_eq!(status.code(), Some(0));
        texts.push(fs::read_to_string(out.join("report.txt")).unwrap());
    }
    assert!(texts[0].contains("seed: 1"));
    assert_ne!(texts[0], texts[1]);
}

#[test]
fn no_temporary_files_left_behind() {
    let text = "[model]\nbuiltin = \"error_transparent\"\n[[checks]]\nkind = \"nas\"\n";
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", text);
    let out = dir.path().join("out");
    assert_eq!(bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap().status.code(), Some(0));
    let names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
    assert!(names.contains(&"config.toml".to_string()));
}
