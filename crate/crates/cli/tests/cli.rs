use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use docelkit::fixtures::running_example;
use docelkit::ocel_io::write_ocel_json;
use serde_json::Value;
use tempfile::TempDir;

fn docelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_docelkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn ok(args: &[&str]) -> String {
    let out = docelkit(args);
    assert_eq!(
        code(&out),
        0,
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn running_example_json(tmp: &TempDir) -> std::path::PathBuf {
    let path = tmp.path().join("running.json");
    fs::write(&path, write_ocel_json(&running_example())).unwrap();
    path
}

#[test]
fn convert_running_example() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let out = tmp.path().join("bundle");
    let report = tmp.path().join("report.json");
    let stdout = ok(&["convert", p(&input), "--out", p(&out), "--report", p(&report)]);
    assert!(stdout.contains("Value -> Orders"), "{stdout}");

    let table = fs::read_to_string(out.join("dyn_Value.csv")).unwrap();
    assert_eq!(table.lines().count(), 4, "{table}");
    assert!(table.starts_with("ValueID,ObjectID,EventID,Value\n"));

    let report: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(report["matches"][0]["attr"], "Value");
    assert_eq!(report["matches"][0]["object_type"], "Orders");
}

#[test]
fn convert_json_summary() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let out = tmp.path().join("bundle");
    let stdout = ok(&["convert", p(&input), "--out", p(&out), "--json"]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["rows"]["Value"], 3);
    assert_eq!(v["matches"].as_array().unwrap().len(), 1);
}

#[test]
fn convert_csv_pair() {
    let tmp = TempDir::new().unwrap();
    let (events, objects) = docelkit::ocel_io::write_ocel_csv(&running_example()).unwrap();
    let ev = tmp.path().join("events.csv");
    let ob = tmp.path().join("objects.csv");
    fs::write(&ev, events).unwrap();
    fs::write(&ob, objects).unwrap();
    let out = tmp.path().join("bundle");
    ok(&["convert", "--events", p(&ev), "--objects", p(&ob), "--out", p(&out)]);
    assert!(out.join("dyn_Value.csv").exists());

    // a lone CSV file is rejected with a hint
    let res = docelkit(&["convert", p(&ev), "--out", p(&out)]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("--events"));
}

#[test]
fn no_event_attributes_gives_no_tables() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("bare.json");
    fs::write(
        &input,
        r#"{
  "ocel:global-log": {"ocel:attribute-names": [], "ocel:object-types": ["A"]},
  "ocel:events": {
    "e1": {"ocel:activity": "x", "ocel:timestamp": "2024-01-01T00:00:00Z", "ocel:omap": ["a1"], "ocel:vmap": {}}
  },
  "ocel:objects": {"a1": {"ocel:type": "A", "ocel:ovmap": {}}}
}"#,
    )
    .unwrap();
    let out = tmp.path().join("bundle");
    let stdout = ok(&["convert", p(&input), "--out", p(&out)]);
    assert!(stdout.contains("no dynamic attributes"));
    let names: Vec<String> = dir_files(&out).into_iter().map(|(n, _)| n).collect();
    assert!(names.iter().all(|n| !n.starts_with("dyn_")), "{names:?}");
}

#[test]
fn generate_shipping_has_three_tables() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("gold");
    ok(&["generate", "shipping-method", "--orders", "100", "--seed", "1", "--out", p(&out)]);
    let tables: Vec<String> = dir_files(&out)
        .into_iter()
        .map(|(n, _)| n)
        .filter(|n| n.starts_with("dyn_"))
        .collect();
    assert_eq!(
        tables,
        ["dyn_Refund.csv", "dyn_Shipping Method.csv", "dyn_Value.csv"]
    );
}

#[test]
fn generate_zero_orders() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("gold");
    let stdout = ok(&["generate", "order-to-delivery", "--orders", "0", "--out", p(&out)]);
    assert!(stdout.contains("generated 0 events"));
}

#[test]
fn generate_is_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        ok(&["generate", "order-to-delivery", "--orders", "10", "--seed", "3", "--out", p(out)]);
    }
    assert_eq!(dir_files(&a), dir_files(&b));
}

#[test]
fn generate_config_and_flag_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("params.json");
    fs::write(&cfg, r#"{"num_orders": 50, "seed": 9}"#).unwrap();
    let out = tmp.path().join("gold");
    let stdout = ok(&[
        "generate", "shipping-method", "--config", p(&cfg), "--orders", "5", "--out", p(&out), "--json",
    ]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["objects"]["Orders"], 5);

    fs::write(&cfg, r#"{"num_orders": 5, "p_refund": 1.5}"#).unwrap();
    let res = docelkit(&["generate", "shipping-method", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(code(&res), 1);
}

#[test]
fn round_trip_recovers_gold() {
    let tmp = TempDir::new().unwrap();
    let gold = tmp.path().join("gold");
    let flat = tmp.path().join("flat.json");
    let pred = tmp.path().join("pred");
    ok(&[
        "generate", "shipping-method", "--orders", "100", "--seed", "0", "--out", p(&gold), "--ocel",
        p(&flat),
    ]);
    ok(&["convert", p(&flat), "--out", p(&pred), "--reserved", "resource"]);
    let stdout = ok(&["evaluate", p(&gold), p(&pred), "--json"]);
    let reports: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert_eq!(reports.len(), 3);
    for r in &reports {
        assert_eq!(r["fp"], 0, "{r}");
        assert_eq!(r["fn"], 0, "{r}");
        assert_eq!(r["f1"], 1.0, "{r}");
    }

    // converting the gold bundle directly gives the same result
    let pred2 = tmp.path().join("pred2");
    ok(&["convert", p(&gold), "--out", p(&pred2)]);
    assert_eq!(dir_files(&pred), dir_files(&pred2));
}

#[test]
fn no_reserved_picks_up_resource() {
    let tmp = TempDir::new().unwrap();
    let gold = tmp.path().join("gold");
    let flat = tmp.path().join("flat.json");
    let pred = tmp.path().join("pred");
    ok(&[
        "generate", "shipping-method", "--orders", "100", "--out", p(&gold), "--ocel", p(&flat),
    ]);
    ok(&["convert", p(&flat), "--out", p(&pred), "--no-reserved"]);
    assert!(pred.join("dyn_Resource.csv").exists());
    let stdout = ok(&["evaluate", p(&gold), p(&pred), "--json", "--mode", "propagate-fp"]);
    let reports: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["fp"], 1);
    assert_eq!(reports[1]["recall"], 1.0);
}

#[test]
fn evaluate_self_and_corrupted_row() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let gold = tmp.path().join("gold");
    ok(&["convert", p(&input), "--out", p(&gold)]);

    let table = ok(&["evaluate", p(&gold), p(&gold)]);
    assert!(table.contains("1.00"), "{table}");

    let pred = tmp.path().join("pred");
    fs::create_dir(&pred).unwrap();
    for (name, bytes) in dir_files(&gold) {
        fs::write(pred.join(name), bytes).unwrap();
    }
    let dyn_path = pred.join("dyn_Value.csv");
    let text = fs::read_to_string(&dyn_path).unwrap();
    fs::write(&dyn_path, text.replace("v2,o2,e3,60", "v2,o2,e3,61")).unwrap();

    let report = tmp.path().join("eval.json");
    ok(&["evaluate", p(&gold), p(&pred), "--mode", "no-propagate-fp", "--report", p(&report)]);
    let reports: Vec<Value> = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(reports[0]["level"], "matching");
    assert_eq!(reports[0]["tp"], 1);
    assert_eq!(reports[1]["tp"], 2);
    assert_eq!(reports[1]["fp"], 1);
    assert_eq!(reports[1]["fn"], 1);
}

#[test]
fn malformed_input_exits_1() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("bad.json");
    fs::write(&input, "{ not json").unwrap();
    let res = docelkit(&["convert", p(&input), "--out", p(&tmp.path().join("o"))]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).starts_with("error:"));

    let res = docelkit(&["convert", p(&tmp.path().join("missing.json")), "--out", "o"]);
    assert_eq!(code(&res), 1);

    let res = docelkit(&["evaluate", p(tmp.path()), p(tmp.path())]);
    assert_eq!(code(&res), 1);
}

#[test]
fn unwritable_output_exits_2() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let res = docelkit(&["convert", p(&input), "--out", p(&blocker.join("sub"))]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));

    let res = docelkit(&["generate", "shipping-method", "--orders", "2", "--out", p(&blocker.join("sub"))]);
    assert_eq!(code(&res), 2);
}

#[test]
fn config_errors_exit_1() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"bogus": true}"#).unwrap();
    let res = docelkit(&["convert", p(&input), "--out", "o", "--config", p(&cfg)]);
    assert_eq!(code(&res), 1);
    assert!(String::from_utf8_lossy(&res.stderr).contains("bogus"));

    fs::write(&cfg, r#"{"tau": -1}"#).unwrap();
    let res = docelkit(&["convert", p(&input), "--out", "o", "--config", p(&cfg)]);
    assert_eq!(code(&res), 1);

    let res = docelkit(&["convert", p(&input), "--out", "o", "--similarity", "magic"]);
    assert_eq!(code(&res), 1);
}

#[test]
fn config_file_supplies_defaults() {
    let tmp = TempDir::new().unwrap();
    let input = running_example_json(&tmp);
    let out = tmp.path().join("from-config");
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        serde_json::json!({"out": out, "tau": 0.2, "json": true}).to_string(),
    )
    .unwrap();
    let stdout = ok(&["convert", p(&input), "--config", p(&cfg)]);
    assert!(serde_json::from_str::<Value>(&stdout).is_ok());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn usage_errors() {
    assert_eq!(code(&docelkit(&["bogus"])), 1);
    assert_eq!(code(&docelkit(&["convert", "x.json"])), 1); // no --out
    assert_eq!(code(&docelkit(&["--help"])), 0);
    assert_eq!(code(&docelkit(&["convert", "--reserved", "a", "--no-reserved", "x.json"])), 1);
}
