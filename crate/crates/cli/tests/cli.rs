use std::fs;
use std::process::{Command, Output};

fn taks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taks")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bounds_examples() {
    let o = taks(&["bounds", "--n", "10", "--k", "3", "--t", "100"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("theorem1 regret bound: 107.191325"), "{s}");
    assert!(s.contains("risk ceiling kT:       300"), "{s}");

    let s = stdout(&taks(&["bounds", "--n", "10", "--k", "10", "--t", "5"]));
    assert!(s.contains("theorem1 regret bound: n/a"), "{s}");
    assert!(s.contains("risk ceiling kT:       50"), "{s}");

    let o = taks(&["bounds", "--n", "100", "--k", "30", "--t", "400", "--alpha", "1"]);
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("corollary2")).expect("corollary line");
    let v: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
    assert!(v >= 30.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "epochs = ten\n").unwrap();
    assert_eq!(taks(&["train", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(taks(&["train", "--noise", "sym:1.5"]).status.code(), Some(1));
    assert_eq!(taks(&["bounds", "--n", "5", "--k", "6", "--t", "3"]).status.code(), Some(1));

    let missing = dir.path().join("missing.cfg");
    fs::write(&missing, format!("train_path = {}\n", dir.path().join("nope.csv").display())).unwrap();
    let out = dir.path().join("out");
    let o = taks(&["train", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let mode = dir.path().join("mode.cfg");
    fs::write(&mode, "mode = simulate\n").unwrap();
    assert_eq!(taks(&["train", "--config", mode.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    let file_out = dir.path().join("from_file");
    fs::write(
        &cfg,
        format!("stream = planted\nn = 40\nk_frac = 0.5\nepochs = 10\nseeds = 0..3\nselectors = naive\nout = {}\n", file_out.display()),
    )
    .unwrap();
    let flag_out = dir.path().join("from_flag");
    let o = taks(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        flag_out.to_str().unwrap(),
        "--seed",
        "7",
        "--selector",
        "fpl",
        "--k-frac",
        "0.25",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!file_out.exists());
    assert!(stdout(&o).contains("k = 10"), "{}", stdout(&o));
    let csv = fs::read_to_string(flag_out.join("simulate_fpl.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 10);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("7,")));
}
