use std::path::Path;
use std::process::{Command, Output};

use darboux::goursat::TrianglePoint;
use darboux::oracle::khan_penrose;

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .env_remove("DARBOUX_QUAD_RTOL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as (fields) with the header checked.
fn rows(text: &str, header: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const EVAL_HEADER: &str = "x,y,V,Vx,Vy,Vxy,notes";

#[test]
fn zero_data_two_by_two_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = zero\ngrid.nx = 2\ngrid.ny = 2\ngrid.x_min = 0.1\ngrid.x_max = 0.3\ngrid.y_min = 0.1\ngrid.y_max = 0.3\n",
        &["evaluate"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), EVAL_HEADER);
    assert_eq!(r.len(), 4);
    for row in &r {
        for v in &row[2..6] {
            assert_eq!(num(v), 0.0);
        }
        assert_eq!(row[6], "");
    }
}

#[test]
fn khan_penrose_grid_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\ngrid.nx = 3\ngrid.ny = 3\ngrid.x_min = 0.1\ngrid.x_max = 0.4\ngrid.y_min = 0.1\ngrid.y_max = 0.4\n",
        &["evaluate"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), EVAL_HEADER);
    assert_eq!(r.len(), 9);
    for row in &r {
        let exact = khan_penrose(TrianglePoint::new(num(&row[0]), num(&row[1])).unwrap()).unwrap();
        for (got, want) in row[2..6].iter().zip([exact.v, exact.vx, exact.vy, exact.vxy]) {
            assert!((num(got) - want).abs() <= 1e-8 * (1.0 + want.abs()), "{got} vs {want}");
        }
    }
}

#[test]
fn diagonal_rows_are_flagged_and_order_is_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = poly:1,0.5\ngrid.nx = 3\ngrid.ny = 3\ngrid.x_min = 0\ngrid.x_max = 0.6\ngrid.y_min = 0\ngrid.y_max = 0.6\n",
        &["evaluate", "--threads", "3"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), EVAL_HEADER);
    let coords: Vec<(f64, f64)> = r.iter().map(|row| (num(&row[0]), num(&row[1]))).collect();
    let mut sorted = coords.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(coords, sorted);
    let last = r.last().unwrap();
    assert_eq!(last[6], "skipped_diagonal");
    assert!(last[2..6].iter().all(String::is_empty));
    // polynomial data keep the gradient on the axes; V_xy is not defined there
    let axis = &r[1];
    assert_eq!(num(&axis[0]), 0.0);
    assert!(!axis[3].is_empty() && !axis[4].is_empty());
    assert_eq!(axis[6], "axis: Vxy undefined");
    for row in &r {
        let empty = row[2..6].iter().any(String::is_empty);
        assert_eq!(empty, !row[6].is_empty(), "every blank cell is explained: {row:?}");
    }
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "data = khan_penrose\ngrid.nx = 4\ngrid.ny = 4\ngrid.x_min = 0.05\ngrid.x_max = 0.5\ngrid.y_min = 0.05\ngrid.y_max = 0.5\n";
    let a = run(dir.path(), cfg, &["evaluate", "--threads", "1"]);
    let b = run(dir.path(), cfg, &["evaluate", "--threads", "4"]);
    let c = run(dir.path(), cfg, &["evaluate", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    // 17 significant digits in scientific form
    let first = &rows(&text, EVAL_HEADER)[0];
    let mantissa = first[2].trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("field.csv");
    let o = run(
        dir.path(),
        "grid.nx = 1\ngrid.ny = 1\ngrid.x_min = 0.2\ngrid.y_min = 0.2\n",
        &["evaluate", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows(&text, EVAL_HEADER).len(), 1);
}

#[test]
fn json_format_emits_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\ngrid.nx = 1\ngrid.ny = 2\ngrid.x_min = 0.2\ngrid.y_min = 0.2\ngrid.y_max = 0.3\n",
        &["evaluate", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    let exact = khan_penrose(TrianglePoint::new(0.2, 0.3).unwrap()).unwrap();
    assert!((arr[1]["V"].as_f64().unwrap() - exact.v).abs() < 1e-8);
}

#[test]
fn expand_khan_penrose_at_half() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\nexpand.x = 0.5\nexpand.order = 2\n",
        &["expand"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), "x,j,f_j,g_j,g_swapped_j");
    assert_eq!(r.len(), 3);
    assert!((num(&r[0][2]) - 2.0).abs() < 1e-8);
    assert!((num(&r[0][3]) + 4f64.ln()).abs() < 1e-8);
    assert!((num(&r[2][3]) - 1.5).abs() < 1e-8);
    assert_eq!(r[1][1], "1");
}

#[test]
fn expand_order_zero_gives_one_row_per_abscissa() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\nexpand.x = 0.25,0.5,0.75\nexpand.order = 0\n",
        &["expand"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), "x,j,f_j,g_j,g_swapped_j");
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|row| row[1] == "0"));
}

#[test]
fn expand_zero_data_and_eps_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("coef.csv");
    let o = run(
        dir.path(),
        "data = zero\nexpand.x = 0.4\nexpand.order = 2\nexpand.eps = 0.001,0.01\n",
        &["expand", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&std::fs::read_to_string(&out).unwrap(), "x,j,f_j,g_j,g_swapped_j");
    assert!(r.iter().all(|row| row[2..].iter().all(|v| num(v) == 0.0)));
    let ev = std::fs::read_to_string(dir.path().join("coef_eps.csv")).unwrap();
    let e = rows(&ev, "x,eps,V,expansion,remainder,notes");
    assert_eq!(e.len(), 2);
    assert!(e.iter().all(|row| num(&row[4]) == 0.0));
}

#[test]
fn expand_eps_table_remainder_is_small_for_khan_penrose() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\nexpand.x = 0.5\nexpand.order = 2\nexpand.eps = 0.001,0.01\n",
        &["expand", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ev = v["evaluations"].as_array().unwrap();
    assert_eq!(ev.len(), 2);
    for row in ev {
        let eps = row["eps"].as_f64().unwrap();
        assert!(row["remainder"].as_f64().unwrap().abs() < 10.0 * eps.powi(3));
    }
}

#[test]
fn weyl_zero_data_is_pure_psi2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = zero\nweyl.x = 0.3,0.6\nweyl.eps = 0.01,0.1\nweyl.method = direct\nprofile.n1 = 1\nprofile.n2 = 1\n",
        &["weyl"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), "x,y,psi0,psi2,psi4,method,notes");
    assert_eq!(r.len(), 4);
    for row in &r {
        let eps = 1.0 - num(&row[0]) - num(&row[1]);
        assert_eq!(num(&row[2]), 0.0);
        assert_eq!(num(&row[4]), 0.0);
        let want = -1.0 / (eps * eps);
        assert!((num(&row[3]) - want).abs() < 1e-10 * want.abs());
        assert_eq!(row[5], "direct");
    }
}

#[test]
fn weyl_series_tracks_direct_for_khan_penrose() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\nweyl.x = 0.5\nweyl.eps = 0.001\nweyl.order = 2\nweyl.method = both\n",
        &["weyl"],
    );
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o), "x,y,psi0,psi2,psi4,method,notes");
    assert_eq!(r.len(), 2);
    assert_eq!((r[0][5].as_str(), r[1][5].as_str()), ("direct", "series"));
    for (dk, sk) in r[0][2..5].iter().zip(&r[1][2..5]) {
        let (d, s) = (num(dk), num(sk));
        assert!((d - s).abs() <= 1e-2 * d.abs(), "{d} vs {s}");
    }
}

#[test]
fn verify_abel_passes_with_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), "", &["verify", "--suite", "abel"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["name"].is_string() && c["measured"].is_number() && c["pass"].is_boolean());
        assert!(c["max"].is_number() || c["min"].is_number());
    }
}

#[test]
fn verify_catches_a_corrupted_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "verify.suite = asymptotics\nverify.fault = c1_sign\n",
        &["verify"],
    );
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn config_errors_exit_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), "grid.nx = 2\ngrid.ny = -1\n", &["evaluate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("grid.ny"), "{err}");

    let o = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["evaluate", "--config", "/nonexistent/run.cfg"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["frobnicate"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["evaluate", "--format", "xml"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rtol_environment_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "grid.nx = 1\ngrid.ny = 1\ngrid.x_min = 0.2\ngrid.y_min = 0.2\n").unwrap();
    let bad = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["evaluate", "--config", cfg.to_str().unwrap()])
        .env("DARBOUX_QUAD_RTOL", "-1")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(["evaluate", "--config", cfg.to_str().unwrap()])
        .env("DARBOUX_QUAD_RTOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_three_and_names_the_point() {
    // a budget of one subdivision cannot resolve the Khan-Penrose field
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "data = khan_penrose\nquad.max_subdivisions = 1\nquad.base_nodes = 4\nquad.rel_tol = 1e-14\nquad.abs_tol = 1e-16\ngrid.nx = 1\ngrid.ny = 1\ngrid.x_min = 0.45\ngrid.y_min = 0.45\n",
        &["evaluate"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("(x, y) = (0.45, 0.45)"), "{err}");
}
