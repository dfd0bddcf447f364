use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use docelkit::detect::detect;
use docelkit::docel_io::{read_docel, write_docel, BundleSummary};
use docelkit::evaluate::{eval_assignment, eval_matching, registry_matches, render_table, EvalReport};
use docelkit::generate::{
    flatten_to_ocel_with, generate_order_to_delivery, generate_shipping_method, FlattenStyle,
    O2DParams, ShipParams,
};
use docelkit::model::{validate_ocel, DocelLog, OcelLog};
use docelkit::ocel_io::{parse_ocel_csv, parse_ocel_json, write_ocel_json};
use docelkit::transform;

use crate::config::{self, ConvertFile, EvaluateFile};
use crate::{ConvertArgs, EvaluateArgs, Failure, GenerateArgs, Mode, Process};

fn input_err(what: impl std::fmt::Display) -> Failure {
    Failure::Input(what.to_string())
}

fn output_err(what: impl std::fmt::Display) -> Failure {
    Failure::Output(what.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

fn style(sparse: bool) -> FlattenStyle {
    if sparse {
        FlattenStyle::Sparse
    } else {
        FlattenStyle::Repeat
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(output_err)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| output_err(format!("cannot write {}: {e}", path.display())))
}

/// Writes to stdout, ignoring a closed pipe (e.g. output piped into `head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(value: &impl Serialize) {
    emit(&format!("{}\n", serde_json::to_string_pretty(value).expect("in-memory JSON")));
}

/// Loads the input log: a JSON-OCEL file, a CSV pair, or a DOCEL bundle
/// (flattened before conversion).
fn load_input(args: &ConvertArgs, sparse: bool) -> Result<OcelLog, Failure> {
    if let (Some(ev), Some(ob)) = (&args.events, &args.objects) {
        return parse_ocel_csv(&read(ev)?, &read(ob)?).map_err(input_err);
    }
    let Some(path) = &args.input else {
        return Err(input_err("no input given (pass a file, a bundle directory, or --events/--objects)"));
    };
    if path.is_dir() {
        let docel = read_docel(path).map_err(input_err)?;
        return Ok(flatten_to_ocel_with(&docel, style(sparse)));
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("json" | "jsonocel") => parse_ocel_json(&read(path)?).map_err(input_err),
        Some("csv") => Err(input_err(
            "CSV input needs both tables: use --events FILE --objects FILE",
        )),
        _ => Err(input_err(format!(
            "cannot tell the format of {} (expected .json, .jsonocel, or a bundle directory)",
            path.display()
        ))),
    }
}

pub fn convert(args: ConvertArgs) -> Result<(), Failure> {
    let file: ConvertFile = config::load(args.config.as_deref())?;
    let cfg = config::detector(&args.detector, &file)?;
    let sparse = args.sparse || file.sparse == Some(true);
    let json_out = args.json || file.json == Some(true);
    let report = args.report.clone().or(file.report.clone());
    let out = args
        .out
        .clone()
        .or(file.out.clone())
        .ok_or_else(|| input_err("--out is required"))?;

    let log = load_input(&args, sparse)?;
    let violations = validate_ocel(&log);
    if !violations.is_empty() {
        let shown: Vec<String> = violations.iter().take(10).map(|v| v.to_string()).collect();
        return Err(input_err(format!(
            "input log is invalid ({} violations): {}",
            violations.len(),
            shown.join("; ")
        )));
    }

    let detection = detect(&log, &cfg).map_err(input_err)?;
    let docel = transform(&log, &detection.matches).map_err(input_err)?;
    let summary = write_docel(&docel, &out).map_err(output_err)?;
    if let Some(path) = &report {
        write_json(path, &detection)?;
    }

    if json_out {
        print_json(&json!({
            "out": out,
            "events": summary.events,
            "objects": summary.objects,
            "matches": detection.matches,
            "rows": summary.dynamic_rows,
        }));
    } else {
        let mut text = format!(
            "converted {} events, {} objects -> {}\n",
            summary.events,
            summary.objects,
            out.display()
        );
        if detection.matches.is_empty() {
            text.push_str("no dynamic attributes detected\n");
        }
        for m in &detection.matches {
            text.push_str(&format!(
                "  {} -> {} ({}), {} rows\n",
                m.attr, m.object_type, m.method, summary.dynamic_rows[&m.attr]
            ));
        }
        emit(&text);
    }
    Ok(())
}

fn generated(args: &GenerateArgs) -> Result<DocelLog, Failure> {
    match args.process {
        Process::OrderToDelivery => {
            let mut p: O2DParams = config::load(args.config.as_deref())?;
            if let Some(n) = args.orders {
                p.num_orders = n;
            }
            if let Some(s) = args.seed {
                p.seed = s;
            }
            generate_order_to_delivery(&p).map_err(input_err)
        }
        Process::ShippingMethod => {
            let mut p: ShipParams = config::load(args.config.as_deref())?;
            if let Some(n) = args.orders {
                p.num_orders = n;
            }
            if let Some(s) = args.seed {
                p.seed = s;
            }
            generate_shipping_method(&p).map_err(input_err)
        }
    }
}

fn object_counts(log: &DocelLog) -> BTreeMap<&str, usize> {
    let mut counts: BTreeMap<&str, usize> =
        log.object_types.iter().map(|t| (t.as_str(), 0)).collect();
    for o in log.objects.values() {
        *counts.entry(o.object_type.as_str()).or_default() += 1;
    }
    counts
}

pub fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let out: PathBuf = args.out.clone().ok_or_else(|| input_err("--out is required"))?;
    let gold = generated(&args)?;
    let summary: BundleSummary = write_docel(&gold, &out).map_err(output_err)?;
    if let Some(path) = &args.ocel {
        let flat = flatten_to_ocel_with(&gold, style(args.sparse));
        std::fs::write(path, write_ocel_json(&flat))
            .map_err(|e| output_err(format!("cannot write {}: {e}", path.display())))?;
    }

    let counts = object_counts(&gold);
    if args.json {
        print_json(&json!({
            "out": out,
            "ocel": args.ocel,
            "events": summary.events,
            "objects": counts,
            "rows": summary.dynamic_rows,
        }));
    } else {
        let mut text = format!("generated {} events -> {}\n", summary.events, out.display());
        for (t, n) in &counts {
            text.push_str(&format!("  {t}: {n} objects\n"));
        }
        for (a, n) in &summary.dynamic_rows {
            text.push_str(&format!("  {a}: {n} rows\n"));
        }
        emit(&text);
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let file: EvaluateFile = config::load(args.config.as_deref())?;
    let mode = args.mode.or(file.mode).unwrap_or(Mode::Both);
    let report = args.report.clone().or(file.report.clone());
    let json_out = args.json || file.json == Some(true);

    let gold = read_docel(&args.gold)
        .map_err(|e| input_err(format!("gold bundle {}: {e}", args.gold.display())))?;
    let pred = read_docel(&args.pred)
        .map_err(|e| input_err(format!("predicted bundle {}: {e}", args.pred.display())))?;

    let mut reports: Vec<EvalReport> = vec![eval_matching(&gold, &registry_matches(&pred))];
    if mode != Mode::NoPropagateFp {
        reports.push(eval_assignment(&gold, &pred, true));
    }
    if mode != Mode::PropagateFp {
        reports.push(eval_assignment(&gold, &pred, false));
    }

    if let Some(path) = &report {
        write_json(path, &reports)?;
    }
    if json_out {
        print_json(&reports);
    } else {
        emit(&render_table(&reports));
    }
    Ok(())
}
