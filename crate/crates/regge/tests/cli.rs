//! End-to-end runs of the `regge` binary: preset listing, table synthesis,
//! the full pipeline (run twice and byte-compared), theta-grid handling, and
//! the exit-code / stderr contract for bad inputs.

use std::path::Path;
use std::process::{Command, Output};

fn regge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn regge")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} exited with {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
}

fn read_bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn read_text(path: &Path) -> String {
    String::from_utf8(read_bytes(path)).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Generate a preset table under `dir` and return the CSV path.
fn synth(dir: &Path, preset: &str) -> std::path::PathBuf {
    let out = regge(dir, &["synth", "--preset", preset, "--out", "synth"]);
    assert_ok(&out, "synth");
    let csv = dir.join("synth").join(format!("{preset}.csv"));
    assert!(csv.is_file(), "missing synthesized table {}", csv.display());
    assert!(
        dir.join("synth").join(format!("{preset}.ledger.json")).is_file(),
        "missing pole/zero ledger"
    );
    csv
}

#[test]
fn synth_list_prints_the_preset_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = regge(dir.path(), &["synth", "--list", "--out", "o"]);
    assert_ok(&out, "synth --list");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = stdout.lines().collect();
    for expected in [
        "fold_j20_0p",
        "fold_j40_3p",
        "extraction_two_pole",
        "tail_single_pole",
        "decomposition_two_pole",
        "trajectory_linear",
        "trajectory_curved",
        "drift_complex_beta",
        "trajectory_offset_13",
    ] {
        assert!(names.contains(&expected), "catalog is missing `{expected}`: {names:?}");
    }
    assert_eq!(names.len(), 13, "catalog size changed: {names:?}");
}

#[test]
fn dcs_covers_the_requested_grid_including_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let table = synth(dir.path(), "fold_j20_0p");
    let out = regge(
        dir.path(),
        &[
            "dcs",
            "--input",
            table.to_str().unwrap(),
            "--theta-grid",
            "0:180:1",
            "--out",
            "d",
        ],
    );
    assert_ok(&out, "dcs");
    let text = read_text(&dir.path().join("d").join("dcs.csv"));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E_meV,theta_deg,sigma"));
    let rows: Vec<&str> = lines.collect();
    // one energy in the preset, 181 angles from 0 to 180 inclusive
    assert_eq!(rows.len(), 181, "unexpected row count");
    assert!(rows[0].contains(",0,") || rows[0].contains(",0.0,"), "first row: {}", rows[0]);
    let last = rows.last().unwrap();
    assert!(last.contains(",180,") || last.contains(",180.0,"), "last row: {last}");
    for row in &rows {
        let sigma: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(sigma.is_finite() && sigma >= 0.0, "bad sigma in row {row}");
    }
}

#[test]
fn pipeline_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let table = synth(dir.path(), "drift_complex_beta");
    let table = table.to_str().unwrap();
    // Coarse grids keep the run fast; the defaults are exercised elsewhere.
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "phi_step_deg = 30.0\n# comment lines are allowed\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    for run in ["run1", "run2"] {
        let common = ["--input", table, "--config", cfg, "--theta-grid", "30:150:30", "--out", run];
        for sub in ["pipeline", "trajectories", "ce-poles"] {
            let mut args = vec![sub];
            args.extend_from_slice(&common);
            assert_ok(&regge(dir.path(), &args), &format!("{sub} into {run}"));
        }
    }

    let artifacts = [
        "unfold.csv",
        "dcs.csv",
        "fold_dcs.csv",
        "poles.csv",
        "trajectories.csv",
        "ce_poles.csv",
        "decompose.csv",
        "summary.json",
        "trajectory_fits.json",
        "ce_compare.json",
    ];
    for name in artifacts {
        let a = read_bytes(&dir.path().join("run1").join(name));
        let b = read_bytes(&dir.path().join("run2").join(name));
        assert!(!a.is_empty(), "{name} is empty");
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&read_text(&dir.path().join("run1").join("summary.json"))).unwrap();
    assert_eq!(summary["jmax"], 40);
    assert_eq!(summary["energies_mev"].as_array().unwrap().len(), 6);
    let outputs: Vec<&str> =
        summary["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    for name in
        ["unfold.csv", "dcs.csv", "fold_dcs.csv", "poles.csv", "trajectories.csv", "ce_poles.csv", "decompose.csv"]
    {
        assert!(outputs.contains(&name), "summary outputs missing {name}: {outputs:?}");
    }
    // fold column layout: per energy and angle, direct and folded cross
    // sections plus their relative difference
    let fold = read_text(&dir.path().join("run1").join("fold_dcs.csv"));
    assert!(fold.starts_with("E_meV,theta_deg,sigma_direct,sigma_fold,rel_diff\n"));
    assert_eq!(fold.lines().count(), 1 + 6 * 5, "6 energies x 5 angles");
}

#[test]
fn validation_failures_exit_2_and_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();

    // malformed table
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "not,a,table\n1,2,3\n").unwrap();
    let out = regge(dir.path(), &["dcs", "--input", bad.to_str().unwrap(), "--out", "o"]);
    assert_eq!(out.status.code(), Some(2), "malformed table should be a validation error");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("stage `load-input` failed"), "stderr: {err}");

    // no input at all
    let out = regge(dir.path(), &["poles", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("stage `load-input` failed"), "stderr: {err}");

    // unknown preset
    let out = regge(dir.path(), &["synth", "--preset", "nope", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2), "unknown preset should be a validation error");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("stage `synth` failed") && err.contains("unknown preset"), "stderr: {err}");

    // --preset and --model are mutually exclusive
    let model = dir.path().join("m.json");
    std::fs::write(&model, "{}").unwrap();
    let out = regge(
        dir.path(),
        &["synth", "--preset", "fold_j20_0p", "--model", model.to_str().unwrap(), "--out", "o"],
    );
    assert_eq!(out.status.code(), Some(2));

    // degenerate theta grid
    let table = synth(dir.path(), "fold_j20_0p");
    let out = regge(
        dir.path(),
        &["dcs", "--input", table.to_str().unwrap(), "--theta-grid", "0:180:0", "--out", "o"],
    );
    assert_eq!(out.status.code(), Some(2), "zero-step grid should be a validation error");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("stage `theta-grid` failed"), "stderr: {err}");
}

#[test]
fn unreachable_quadrature_tolerance_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let table = synth(dir.path(), "fold_j20_0p");
    let cfg = dir.path().join("strict.cfg");
    // full default phi range (the unfold grid must reach 3 pi), coarse step,
    // and a tolerance no quadrature can meet
    std::fs::write(&cfg, "quad_tol = 1e-18\nphi_step_deg = 180\n").unwrap();
    let out = regge(
        dir.path(),
        &[
            "unfold",
            "--input",
            table.to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "o",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "unreachable tolerance should be a numerical error");
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("stage `unfold` failed"), "stderr: {err}");
}
