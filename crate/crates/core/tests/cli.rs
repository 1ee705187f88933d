use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chanlife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanlife")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

const SMALL_GRID: &str = "nodes = 12
edge_prob = 0.4
iterations = 2
omega_sat = 60000
capacity_sat = 600000
base_rate_per_day = 1.0
sc = [0.0, 0.5]
sk = [1.0, 4.0]
";

#[test]
fn predict_balanced_channel() {
    let o = chanlife(&["predict", "--p", "0.5", "--a", "20", "--b", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("400"));
}

#[test]
fn predict_with_funds_and_rates_reports_days() {
    let o = chanlife(&[
        "predict", "--fund-a", "1200000", "--fund-b", "1200000", "--omega", "60000", "--rate-ab", "2", "--rate-ba", "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("400"), "{text}");
    assert!(text.contains("100"), "{text}");
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(chanlife(&["predict", "--p", "1.1", "--a", "2", "--b", "2"]).status.code(), Some(2));
    assert_eq!(chanlife(&["predict", "--p", "0", "--a", "2", "--b", "2"]).status.code(), Some(2));
    assert_eq!(chanlife(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn missing_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    fs::write(&cfg, SMALL_GRID.replace("edge_prob = 0.4\n", "")).unwrap();
    let out = dir.path().join("out");
    let o = chanlife(&["evaluate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("edge_prob"), "{}", stderr(&o));
}

#[test]
fn evaluate_is_reproducible_from_seed_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.toml");
    fs::write(&cfg, SMALL_GRID).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = chanlife(&["evaluate", "--config", cfg.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let first = run("a");
    let second = run("b");
    let table = fs::read(first.join("table.csv")).unwrap();
    assert_eq!(table, fs::read(second.join("table.csv")).unwrap());
    assert!(header(&first.join("table.csv")).starts_with("sc\\sk_mean_relative_error"));

    let replayed = dir.path().join("c");
    let o = chanlife(&[
        "replay",
        "--manifest",
        first.join("manifest.json").to_str().unwrap(),
        "--out",
        replayed.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(table, fs::read(replayed.join("table.csv")).unwrap());
    assert_eq!(
        fs::read(first.join("channels.csv")).unwrap(),
        fs::read(replayed.join("channels.csv")).unwrap()
    );
}

#[test]
fn simulate_without_seed_records_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    let o = chanlife(&[
        "simulate", "--nodes", "10", "--edge-prob", "0.4", "--sc", "0.2", "--sk", "3", "--horizon", "20", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["seed"].is_u64());

    let again = dir.path().join("again");
    let o = chanlife(&[
        "replay",
        "--manifest",
        out.join("manifest.json").to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for file in ["network.csv", "events.csv", "channels.csv", "summary.json"] {
        assert_eq!(fs::read(out.join(file)).unwrap(), fs::read(again.join(file)).unwrap(), "{file}");
    }
    assert!(header(&out.join("events.csv")).contains("time_days"));
    assert!(header(&out.join("events.csv")).contains("amount_sat"));
}

#[test]
fn unbalancing_central_channels_hurts_more() {
    let dir = tempfile::tempdir().unwrap();
    let rate = |strategy: &str| {
        let out = dir.path().join(strategy);
        let o = chanlife(&[
            "unbalance", "--strategy", strategy, "--fraction", "0.15", "--payments", "3000", "--seeds", "5", "--seed",
            "3", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let text = fs::read_to_string(out.join("unbalance.csv")).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers().unwrap().clone();
        let col = headers.iter().position(|h| h == "success_rate").expect("success_rate column");
        let rates: Vec<f64> = rdr.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
        rates.iter().sum::<f64>() / rates.len() as f64
    };
    assert!(rate("top") < rate("random"));
}

#[test]
fn sweep_and_snapshot_headers_carry_units() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep");
    let o = chanlife(&["sweep", "--out", sweep.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for entry in fs::read_dir(&sweep).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            assert!(header(&path).contains("_payments"), "{}", path.display());
        }
    }

    let snap = dir.path().join("snap.csv");
    fs::write(&snap, "channel_id,node_a,node_b,capacity_sat\nc1,x,y,2400000\nc2,y,z,1200000\nc3,z,w,4800000\n").unwrap();
    let out = dir.path().join("snapout");
    let o = chanlife(&["snapshot", "--file", snap.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let h = header(&out.join("channels.csv"));
    for unit in ["capacity_sat", "expected_payments", "expected_days"] {
        assert!(h.contains(unit), "{h}");
    }
}

#[test]
fn malformed_snapshot_row_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("snap.csv");
    fs::write(&snap, "channel_id,node_a,node_b,capacity_sat\nc1,x,y,2400000\nc2,y,y,1200000\n").unwrap();
    let o = chanlife(&["snapshot", "--file", snap.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains('3'), "{}", stderr(&o));
}
