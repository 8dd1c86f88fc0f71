use std::process::{Command, Output};

use sandwich_game::sweep::CSV_HEADER;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sandwich-game"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn sweep_writes_csv_with_header() {
    let out = run(&["sweep", "--alpha-steps", "4", "--s-steps", "3", "--omega", "0.01,0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 2 * 4 * 3);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        "omega = 0.05\nfee = 0.003\n[alpha]\nmin = 0.01\nmax = 0.2\nsteps = 5\n[s]\nmin = 0.01\nmax = 0.1\nsteps = 2\n",
    )
    .unwrap();
    let csv_path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--s-steps",
        "3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5 * 3);
    assert!(rows.iter().all(|r| r.get(2) == Some("0.05")));
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    let axes = "[alpha]\nmin = 0.01\nmax = 0.2\nsteps = 5\n[s]\nmin = 0.01\nmax = 0.1\nsteps = 2\n";
    std::fs::write(&config, format!("omega = 1.5\n{axes}")).unwrap();
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("omega"));

    std::fs::write(&config, format!("omgea = 0.1\n{axes}")).unwrap();
    assert_eq!(run(&["sweep", "--config", config.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["sweep", "--config", "/nonexistent/sweep.toml"]).status.code(), Some(1));
    assert_eq!(run(&["point", "--alpha", "0.05", "--s", "0.01", "--omega", "2"]).status.code(), Some(1));
    assert_eq!(run(&["point", "--alpha", "oops"]).status.code(), Some(1));
}

#[test]
fn verify_passes_and_help_is_clean() {
    let out = run(&["verify", "--configs", "50", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn point_json() {
    let out = run(&["point", "--alpha", "0.05", "--s", "0.01", "--omega", "0.01", "--epsilon", "0.01,0.1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"]["nash"], "PoolW");
    assert_eq!(v["epsilon"].as_array().unwrap().len(), 2);
}

#[test]
fn figures_write_six_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["figures", "--out-dir", dir.path().to_str().unwrap(), "--alpha-steps", "5", "--s-steps", "4"]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["fig2a", "fig2b", "fig3a", "fig3b", "appendixA_k10", "appendixA_k3"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 1 + 5 * 4, "{name}");
    }
}
