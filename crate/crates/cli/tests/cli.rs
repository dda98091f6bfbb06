use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavity-duo")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Header and numeric rows of a CSV produced by the tool.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# cavity-duo v1"));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let c = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[c].parse().unwrap()).collect()
}

#[test]
fn evolve_purity_floor_is_one_half() {
    let text = run_ok(&["evolve", "--n", "0", "--alpha", "pi/4", "--kappa", "0", "--ising", "0", "--tmax", "10", "--dt", "0.01"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 1001);
    let purity = column(&header, &rows, "purity");
    let min = purity.iter().copied().fold(f64::INFINITY, f64::min);
    // Never below the floor; the grid misses the exact minimum time by
    // at most dt/2, which costs at most a few 1e−7 in purity.
    assert!(min >= 0.5 - 1e-9, "min purity {min}");
    assert!(min - 0.5 < 1e-6, "min purity {min}");
}

#[test]
fn evolve_csv_layout_is_stable() {
    let text = run_ok(&["evolve", "--tmax", "0.02"]);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    let expected = "t,re_b1,im_b1,re_b2,im_b2,re_b3,im_b3,re_b4,im_b4,purity,concurrence";
    assert_eq!(header.join(","), expected);
    assert_eq!(rows.len(), 3);
    for row in &rows {
        for cell in row {
            let v: f64 = cell.parse().unwrap();
            assert!(v.is_finite());
            let mantissa = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{cell}");
        }
    }
}

#[test]
fn cpplane_trajectory_lies_on_closed_curve() {
    let text = run_ok(&["cpplane", "--n", "0", "--alpha", "pi/4", "--kappa", "0", "--ising", "0"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header.join(","), "series,param,purity,concurrence");
    let mut seen = 0;
    for row in rows.iter().filter(|r| r[0] == "trajectory") {
        let p: f64 = row[2].parse().unwrap();
        let c: f64 = row[3].parse().unwrap();
        let root = (2.0 * p - 1.0).max(0.0).sqrt();
        let d = (c - (1.0 + root) / 2.0).abs().min((c - (1.0 - root) / 2.0).abs());
        assert!(d < 1e-9, "P={p} C={c}");
        seen += 1;
    }
    assert_eq!(seen, 2001);
    for series in ["c_minus_alpha", "c_plus_alpha", "c_minus_bell", "mems", "werner", "limit_minus"] {
        assert!(rows.iter().any(|r| r[0] == series), "missing {series}");
    }
}

#[test]
fn spectrum_reports_method_and_residuals() {
    let text = run_ok(&["spectrum", "--n", "3", "--kappa", "0.4", "--ising", "-0.3", "--delta1", "0.2", "--g2", "0.7"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header.join(","), "j,energy,v1,v2,v3,v4,residual,method");
    assert_eq!(rows.len(), 4);
    let energies = column(&header, &rows, "energy");
    assert!(energies.iter().sum::<f64>().abs() < 1e-12);
    assert!(column(&header, &rows, "residual").iter().all(|&r| r < 1e-12));
    assert!(rows.iter().all(|r| r[7] == "closed_form"));

    // The resonant symmetric case is degenerate and falls back.
    let (_, rows) = parse_csv(&run_ok(&["spectrum", "--n", "2"]));
    assert!(rows.iter().all(|r| r[7] == "iterative_fallback"));
    let (_, rows) = parse_csv(&run_ok(&["spectrum", "--n", "-1", "--ising", "0.5"]));
    assert_eq!(rows.len(), 1);
}

#[test]
fn json_output_has_columns() {
    let text = run_ok(&["evolve", "--tmax", "0.05", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["version"], "cavity-duo v1");
    assert_eq!(v["columns"].as_array().unwrap().len(), 11);
    assert_eq!(v["purity"].as_array().unwrap().len(), 6);
}

#[test]
fn validate_with_seed_42_passes() {
    let out = run(&["validate", "--seed", "42"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() >= 10);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "cpplane".to_owned(),
            "--n".into(),
            "1".into(),
            "--alpha".into(),
            "pi/20".into(),
            "--kappa".into(),
            "1.5".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    for p in [&a, &b] {
        let args = args(p);
        run_ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# free evolution\nn = 1\nalpha = pi/20\nkappa = 1.5\ntmax = 0.1\n").unwrap();
    let cfg = cfg.display().to_string();
    let from_file = run_ok(&["evolve", "--config", &cfg]);
    let explicit = run_ok(&["evolve", "--n", "1", "--alpha", "pi/20", "--kappa", "1.5", "--tmax", "0.1"]);
    assert_eq!(from_file, explicit);
    let overridden = run_ok(&["evolve", "--config", &cfg, "--kappa", "0"]);
    let explicit = run_ok(&["evolve", "--n", "1", "--alpha", "pi/20", "--tmax", "0.1"]);
    assert_eq!(overridden, explicit);
}

#[test]
fn malformed_flags_get_one_line_each() {
    let out = run(&["evolve", "--kappa", "abc", "--dt", "0", "--format", "xml", "--alpha", "pi/"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 4, "{stderr}");
    for flag in ["--kappa", "--dt", "--format", "--alpha"] {
        assert!(stderr.contains(flag));
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "kappa = 1\nwhatever = 2\n").unwrap();
    let out = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unknown key `whatever`"));

    assert!(!run(&["evolve", "--alpha", "0.1", "--init", "ground"]).status.success());
    assert!(!run(&["evolve", "--bogus", "1"]).status.success());
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // The α-family needs two sector states; n = −1 has one.
    let res = run(&["evolve", "--n", "-1", "--out", out.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn sweep_writes_points_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = out.to_str().unwrap();
    run_ok(&["sweep", "--kappa", "0,1.5", "--alpha", "pi/4,pi/20", "--tmax", "1", "--jobs", "2", "--out", o]);
    let mut names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["index.csv", "point_0000.csv", "point_0001.csv", "point_0002.csv", "point_0003.csv"]);
    let (header, rows) = parse_csv(&fs::read_to_string(out.join("index.csv")).unwrap());
    assert_eq!(rows.len(), 4);
    assert_eq!(column(&header, &rows, "kappa"), [0.0, 1.5, 0.0, 1.5]);

    // Each point matches a single run with the same parameters.
    let single = run_ok(&["evolve", "--kappa", "1.5", "--alpha", "pi/20", "--tmax", "1"]);
    assert_eq!(fs::read_to_string(out.join("point_0003.csv")).unwrap(), single);

    // A failing point means no files at all.
    let bad = dir.path().join("bad");
    let res = run(&["sweep", "--n", "0,-1", "--tmax", "1", "--out", bad.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(!bad.exists());
}
