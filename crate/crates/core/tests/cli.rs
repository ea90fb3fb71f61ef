use std::process::Command;

use adiabus::cli::{emit_plot_script, parse_config, run_experiment, CliError, PlotTemplate, RunManifest};

fn read(dir: &std::path::Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn worker_count_does_not_change_output() {
    let cfg = parse_config(r#"{"experiment":"gap-scan","N":[7],"J2":[0.1,0.5,0.9],"s":[0,0.5,1]}"#).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = run_experiment(&cfg, a.path(), 1).unwrap();
    let mb = run_experiment(&cfg, b.path(), 5).unwrap();
    assert_eq!(ma.files, mb.files);
    for f in &ma.files {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    let csv = read(a.path(), "gap-scan_N7.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "s,param,gap");
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[1].starts_with("0,0.1,"));
    assert!(lines[9].starts_with("1,0.9,"));
}

#[test]
fn failing_points_do_not_stop_the_sweep() {
    let cfg = parse_config(r#"{"experiment":"degeneracy-check","N":[5,6,7],"J2":[0.2]}"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let m = run_experiment(&cfg, dir.path(), 3).unwrap();
    let statuses: Vec<&str> = m.points.iter().map(|p| p.status.as_str()).collect();
    assert_eq!(statuses, ["ok", "odd-length-required", "ok"]);
    assert_eq!(m.failed_points(), 1);
    let csv = read(dir.path(), "degeneracy-check_N7_J20.2.csv");
    assert_eq!(csv.lines().next(), Some("level,energy,pair_split"));
    assert_eq!(csv.lines().count(), 7);
    for line in csv.lines().skip(1) {
        let split: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(split < 1e-9, "{line}");
    }
}

#[test]
fn not_reached_points_leave_blank_cells() {
    let cfg = parse_config(
        r#"{"experiment":"anneal-time","N":[9],"J2":[0.0,0.7],"search":{"tau_cap":3.0}}"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path(), 2).unwrap();
    let csv = read(dir.path(), "anneal-time.csv");
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "N,param,tau_star,fidelity,status");
    assert!(rows[1].ends_with(",reached"));
    assert_eq!(rows[2], "9,0.7,,,not-reached");
}

#[test]
fn manifest_echo_reparses() {
    let cfg = parse_config(
        r#"{"experiment":"transport","protocol":"simultaneous","N":[5],"J2":[0.2],"tau":[20],
            "bloch":[[1,0,0]],"output":{"prefix":"t","manifest":"run.json","plots":false}}"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&cfg, dir.path(), 1).unwrap();
    let m: RunManifest = serde_json::from_str(&read(dir.path(), "run.json")).unwrap();
    assert_eq!(m.points.len(), 1);
    assert_eq!(m.files, ["t_N5_J20.2.csv"]);
    assert_eq!(parse_config(&m.config.to_string()).unwrap(), cfg);
    let csv = read(dir.path(), "t_N5_J20.2.csv");
    assert_eq!(csv.lines().next(), Some("bx_in,by_in,bz_in,tau,bx_out,by_out,bz_out,qubit_fidelity"));
}

#[test]
fn plot_templates_check_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    std::fs::write(&csv, "s,param,gap\n0,0,1\n").unwrap();
    assert!(emit_plot_script(&csv, PlotTemplate::GapMap).unwrap().contains("set logscale cb"));
    assert!(matches!(emit_plot_script(&csv, PlotTemplate::AnnealTime), Err(CliError::SchemaMismatch { .. })));
}

#[test]
fn binary_runs_a_config_and_reports_config_errors() {
    let exe = env!("CARGO_BIN_EXE_adiabus");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"N":[5],"J2":[0.0,0.3]}"#).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(exe)
        .args(["anneal-time", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--workers", "2", "--seed", "17"])
        .output()
        .unwrap();
    assert!(status.status.success());
    let m: RunManifest = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(m.workers, 2);
    assert_eq!(m.config["seed"], 17);
    assert!(out.join("anneal-time_anneal_time.gp").exists());

    let plot = Command::new(exe)
        .args(["plot", "--template", "time-scaling", "--csv"])
        .arg(out.join("anneal-time.csv"))
        .output()
        .unwrap();
    assert!(plot.status.success());
    assert!(out.join("anneal-time_time_scaling.gp").exists());

    std::fs::write(&cfg, r#"{"N":[5],"J2":[0.0],"protocol":"teleport2"}"#).unwrap();
    let bad = Command::new(exe).args(["anneal-time", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`protocol`"));

    std::fs::write(&cfg, r#"{"experiment":"gap-scan","N":[5],"J2":[0.0]}"#).unwrap();
    let mismatch = Command::new(exe).args(["anneal-time", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn env_override_sets_worker_count() {
    let exe = env!("CARGO_BIN_EXE_adiabus");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"N":[5],"J2":[0.0],"workers":1}"#).unwrap();
    let status = Command::new(exe)
        .env("ADIABUS_WORKERS", "3")
        .args(["anneal-time", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let m: RunManifest = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(m.workers, 3);
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        count += 1;
    }
    assert!(count >= 10);
}
