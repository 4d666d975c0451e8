use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_keplergls"))
}

fn csv_row(line: &str) -> Vec<f64> {
    // map output rows carry a trailing (usually empty) error column
    line.split(',').filter(|c| !c.is_empty()).map(|c| c.parse().unwrap()).collect()
}

#[test]
fn integrate_circular_orbit_closes() {
    let out = bin()
        .args(["integrate", "--r", "1,0,0", "--p", "0,1,0", "--t-final", "6.283185307179586", "--n-samples", "100"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,rx,ry,rz,px,py,pz,E,Lx,Ly,Lz,ex,ey,ez");
    assert_eq!(lines.len(), 101);
    let first = csv_row(lines[1]);
    let last = csv_row(lines[100]);
    for i in 1..14 {
        assert!((first[i] - last[i]).abs() < 1e-9, "col {i}: {} vs {}", first[i], last[i]);
    }
}

#[test]
fn integrate_single_sample_echoes_input() {
    let out = bin()
        .args(["integrate", "--r", "2,0,0", "--p", "0,0.6,0", "--n-samples", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let row = csv_row(lines[1]);
    assert_eq!(row[0], 0.0);
    assert_eq!(row[1], 2.0);
    assert_eq!(row[5], 0.6);
    assert!((row[7] + 0.32).abs() < 1e-14); // E
    assert!((row[11] + 0.28).abs() < 1e-14); // eps_x
}

#[test]
fn integrate_collision_orbit_fails_with_diagnostic() {
    let out = bin()
        .args(["integrate", "--r", "1,0,0", "--p", "-0.5,0,0", "--t-final", "5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("collision"), "stderr: {err}");
}

#[test]
fn map_gls_then_inverse_recovers_points() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    std::fs::write(
        &pts,
        "rx,ry,rz,px,py,pz\n1,0,0,0,1,0\n2,0,0,0,0.6,0\n1,0,0,0,2,0\n2,0,0,0,1,0\n",
    )
    .unwrap();
    let fwd = dir.path().join("fwd.csv");
    let out = bin()
        .args(["map", "--which", "gls"])
        .arg("--input")
        .arg(&pts)
        .arg("--out")
        .arg(&fwd)
        .output()
        .unwrap();
    assert!(out.status.success());
    // last input row has E = 0: the error column must be populated
    let fwd_text = std::fs::read_to_string(&fwd).unwrap();
    let fwd_lines: Vec<&str> = fwd_text.lines().collect();
    assert_eq!(fwd_lines.len(), 5);
    assert!(fwd_lines[4].starts_with(",,"), "zero-energy row: {}", fwd_lines[4]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("1 row(s) failed"), "stderr: {err}");

    // drop the failed row and invert the rest
    let kept: Vec<&str> = [0usize, 1, 2, 3].iter().map(|&i| fwd_lines[i]).collect();
    let back_in = dir.path().join("back_in.csv");
    std::fs::write(
        &back_in,
        kept.iter()
            .map(|l| {
                // om..w columns + zeta, strip residual and error columns
                l.split(',').take(9).collect::<Vec<_>>().join(",")
            })
            .collect::<Vec<_>>()
            .join("\n"),
    )
    .unwrap();
    let out = bin()
        .args(["map", "--which", "gls-inverse"])
        .arg("--input")
        .arg(&back_in)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(csv_row).collect();
    let expect = [[1.0, 0.0, 0.0, 0.0, 1.0, 0.0], [2.0, 0.0, 0.0, 0.0, 0.6, 0.0], [1.0, 0.0, 0.0, 0.0, 2.0, 0.0]];
    for (row, exp) in rows.iter().zip(expect.iter()) {
        for i in 0..6 {
            assert!((row[i] - exp[i]).abs() < 1e-9, "{row:?} vs {exp:?}");
        }
    }
}

#[test]
fn check_conservation_passes_and_is_deterministic() {
    let run = || {
        bin()
            .args(["check", "--suite", "conservation", "--samples", "5"])
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(reports[0]["name"], "conservation");
    assert_eq!(reports[0]["pass"], true);
    assert!(reports[0]["max_residual"].as_f64().unwrap() < 1e-9);
    let b = run();
    assert_eq!(a.stdout, b.stdout, "outputs must be byte-identical for a fixed config and seed");
}

#[test]
fn check_unknown_suite_is_a_usage_error() {
    let out = bin().args(["check", "--suite", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "m = 1.0\nk = 1.0\ntol = 1e-12  # integrator\nseed = 7\n").unwrap();
    let out = bin()
        .args(["check", "--suite", "conservation", "--samples", "3", "--seed", "11"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // bad config value is a usage error
    std::fs::write(&cfg, "tol = not-a-number\n").unwrap();
    let out = bin()
        .args(["check", "--suite", "conservation"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn brackets_table_has_fifteen_small_residuals() {
    let out = bin().args(["brackets", "--r", "2,0,0", "--p", "0,0.6,0"]).output().unwrap();
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 15);
    for row in rows {
        assert!(row["residual"].as_f64().unwrap() < 1e-6, "{row}");
    }
}

#[test]
fn flow_preserves_hamiltonian_and_w_norm() {
    let out = bin()
        .args(["flow", "--r", "2,0,0", "--p", "0,0.6,0", "--s-final", "3.0", "--n-samples", "40"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(csv_row).collect();
    assert_eq!(rows.len(), 40);
    for row in &rows {
        assert!((row[9] - rows[0][9]).abs() < 1e-12, "H drift {row:?}");
        assert!((row[10] - rows[0][10]).abs() < 1e-12, "|W| drift {row:?}");
    }
}
