use std::process::{Command, Output};

fn netshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(args)
        .env_remove("NETSHARE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn asymmetric_schedule_gives_one_row_per_position() {
    let out = netshare(&[
        "simulate",
        "--n",
        "2",
        "--m",
        "2",
        "--mode",
        "asymmetric",
        "--schedule",
        "0.55,0.6,0.65",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,j_1,j_2,s_value,bound,violated");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
    assert!(!text.contains('\r'));
}

#[test]
fn sharp_run_prints_two_root_two() {
    let out = netshare(&["simulate", "--n", "2", "--m", "2", "--sharp"]);
    assert_eq!(
        stdout(&out),
        "k,j_1,j_2,s_value,bound,violated\n1,2.00000000,2.00000000,2.82842712,2.00000000,true\n"
    );
}

#[test]
fn symmetric_schedules_broadcast_or_per_edge() {
    let broadcast = netshare(&["simulate", "--n", "3", "--mode", "sym", "--schedule", "0.9,0.95"]);
    let explicit = netshare(&[
        "simulate",
        "--n",
        "3",
        "--mode",
        "sym",
        "--schedule",
        "0.9,0.95",
        "--schedule",
        "0.9,0.95",
        "--schedule",
        "0.9,0.95",
    ]);
    assert!(broadcast.status.success());
    assert_eq!(stdout(&broadcast), stdout(&explicit));
    let mismatch =
        netshare(&["simulate", "--n", "3", "--mode", "sym", "--schedule", "0.9", "--schedule", "0.9"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(netshare(&["simulate", "--n", "2"]).status.code(), Some(2));
    assert_eq!(netshare(&["sos-check", "--count", "0"]).status.code(), Some(2));
    assert_eq!(netshare(&["simulate", "--schedule", "1.5"]).status.code(), Some(2));
    assert_eq!(netshare(&["sweep", "--lambda-min", "0.8", "--lambda-max", "0.2"]).status.code(), Some(2));
    assert_eq!(netshare(&["critical", "--sweep-n", "9..2"]).status.code(), Some(2));
    assert_eq!(netshare(&["--no-such-flag"]).status.code(), Some(2));
    let out = netshare(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn resource_caps_exit_three() {
    assert_eq!(netshare(&["compare", "--n", "4"]).status.code(), Some(3));
    assert_eq!(netshare(&["simulate", "--m", "11", "--sharp"]).status.code(), Some(3));
    assert_eq!(netshare(&["critical", "--n", "40"]).status.code(), Some(3));
}

#[test]
fn critical_rows_match_the_schedule() {
    let out = netshare(&["critical", "--n", "2", "--m", "2", "--mode", "asymmetric"]);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows[..6].iter().all(|r| r.ends_with(",true")));
    assert!(rows[6].starts_with("2,2,asymmetric,7,1.135"));
    assert!(rows[6].ends_with(",false"));

    let tri = stdout(&netshare(&["critical", "--n", "3", "--mode", "asymmetric"]));
    assert_eq!(tri.lines().filter(|l| l.ends_with(",true")).count(), 14);

    let sweep = stdout(&netshare(&["critical", "--sweep-n", "3,6,9", "--m", "3", "--mode", "asymmetric"]));
    for n in ["3", "6", "9"] {
        assert!(sweep.lines().any(|l| l.starts_with(&format!("{n},3,asymmetric,1,"))));
    }
}

#[test]
fn max_observers_grid() {
    let out = stdout(&netshare(&["max-observers", "--n", "1..4", "--m", "2", "--mode", "asymmetric"]));
    assert_eq!(
        out,
        "n,m,mode,max_observers\n1,2,asymmetric,2\n2,2,asymmetric,6\n3,2,asymmetric,14\n4,2,asymmetric,30\n"
    );
}

#[test]
fn sweep_is_ordered_and_thread_count_independent() {
    let args = [
        "sweep",
        "--n",
        "2",
        "--mode",
        "sym",
        "--lambda-min",
        "0.5",
        "--lambda-max",
        "1",
        "--steps",
        "6",
        "--positions",
        "3",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(args)
        .env("NETSHARE_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(args)
        .env("NETSHARE_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    assert_eq!(text.lines().count(), 1 + 6 * 3);
    assert!(text.lines().nth(1).unwrap().starts_with("0.500000000,1,"));

    let bad = Command::new(env!("CARGO_BIN_EXE_netshare"))
        .args(args)
        .env("NETSHARE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sos_check_is_seed_deterministic() {
    let a = netshare(&["sos-check", "--count", "50", "--seed", "9"]);
    let b = netshare(&["sos-check", "--count", "50", "--seed", "9"]);
    let c = netshare(&["sos-check", "--count", "50", "--seed", "1000"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let table = stdout(&netshare(&["sos-check", "--count", "1", "--optimal", "--format", "table"]));
    assert!(table.contains("min_gamma"));
    assert!(table.lines().any(|l| l.contains("max_s2") && l.contains("2.82842712")));
}

#[test]
fn config_file_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let dest = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        r#"{"command": "simulate", "n": 3, "m": 2, "mode": "asymmetric", "schedules": [[0.4, 0.5]]}"#,
    )
    .unwrap();
    let out = netshare(&["--config", cfg.to_str().unwrap(), "--output", dest.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&dest).unwrap();
    assert_eq!(written.lines().count(), 3);

    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(netshare(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn compare_reports_without_failing() {
    let out = netshare(&["compare", "--n", "2", "--m", "2", "--mode", "asymmetric", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("k,analytic,simulated,quoted,delta_simulated,delta_quoted,flag\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",ok")).count(), 7);

    let m3 = stdout(&netshare(&["compare", "--n", "2", "--m", "3", "--mode", "asymmetric"]));
    assert!(m3.contains("DISCREPANCY"));
    assert!(m3.contains("sqrt(pi/2)"));
}
