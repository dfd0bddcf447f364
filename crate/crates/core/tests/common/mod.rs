//! Independent checkers shared by the integration tests. They recompute
//! properties from the raw logs instead of calling into the library's own
//! bookkeeping.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use docelkit::model::{AttributeValue, DocelLog, Match, OcelLog};

pub type Rows = Vec<(String, String, AttributeValue)>;

/// Per attribute: the bound type and the rows as (eid, oid, value), in order.
pub fn tables_without_vids(log: &DocelLog) -> BTreeMap<String, (String, Rows)> {
    log.dynamic_tables
        .iter()
        .map(|(a, t)| {
            let rows = t
                .rows
                .iter()
                .map(|r| (r.eid.clone(), r.oid.clone(), r.value.clone()))
                .collect();
            (a.clone(), (t.object_type.clone(), rows))
        })
        .collect()
}

fn instances_of<'a>(log: &'a OcelLog, eid_objects: &'a [String], t: &str) -> Vec<&'a str> {
    eid_objects
        .iter()
        .filter(|o| log.objects.get(*o).is_some_and(|x| x.object_type == t))
        .map(String::as_str)
        .collect()
}

/// Every event carrying a matched attribute references exactly one instance
/// of the matched type.
pub fn cooccurrence_sound(log: &OcelLog, matches: &[Match]) -> Result<(), String> {
    for m in matches {
        for e in &log.events {
            if !e.attributes.contains_key(&m.attr) {
                continue;
            }
            let objs: Vec<String> = e.objects.iter().cloned().collect();
            let n = instances_of(log, &objs, &m.object_type).len();
            if n != 1 {
                return Err(format!(
                    "{} -> {}: event {} references {n} instances",
                    m.attr, m.object_type, e.eid
                ));
            }
        }
    }
    Ok(())
}

/// Some instance of the matched type sees two different values.
pub fn dynamism(log: &OcelLog, matches: &[Match]) -> Result<(), String> {
    for m in matches {
        let mut seen: HashMap<String, Vec<&AttributeValue>> = HashMap::new();
        for e in &log.events {
            let Some(v) = e.attributes.get(&m.attr) else { continue };
            let objs: Vec<String> = e.objects.iter().cloned().collect();
            for oid in instances_of(log, &objs, &m.object_type) {
                seen.entry(oid.to_string()).or_default().push(v);
            }
        }
        if !seen.values().any(|vs| vs.iter().any(|v| *v != vs[0])) {
            return Err(format!("{} -> {} never changes", m.attr, m.object_type));
        }
    }
    Ok(())
}

/// Rows of one object follow event order and never repeat the previous value.
pub fn rows_monotone(log: &DocelLog) -> Result<(), String> {
    let pos: HashMap<&str, usize> = log
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.eid.as_str(), i))
        .collect();
    for (attr, table) in &log.dynamic_tables {
        let mut last: HashMap<&str, (usize, &AttributeValue)> = HashMap::new();
        for r in &table.rows {
            let p = *pos
                .get(r.eid.as_str())
                .ok_or_else(|| format!("{attr}: unknown event {}", r.eid))?;
            if let Some((lp, lv)) = last.get(r.oid.as_str()) {
                if *lp >= p {
                    return Err(format!("{attr}/{}: rows out of order at {}", r.oid, r.vid));
                }
                if *lv == &r.value {
                    return Err(format!("{attr}/{}: repeated value at {}", r.oid, r.vid));
                }
            }
            last.insert(r.oid.as_str(), (p, &r.value));
        }
    }
    Ok(())
}

/// Replays the input: for every matched attribute, each occurrence is either
/// a row (new value for its object) or a suppressed repeat, row values equal
/// the input values, and the attribute is gone from the output events.
pub fn conservation(input: &OcelLog, output: &DocelLog, matches: &[Match]) -> Result<(), String> {
    for m in matches {
        let table = output
            .dynamic_tables
            .get(&m.attr)
            .ok_or_else(|| format!("no table for {}", m.attr))?;
        let rows: HashMap<&str, (&str, &AttributeValue)> = table
            .rows
            .iter()
            .map(|r| (r.eid.as_str(), (r.oid.as_str(), &r.value)))
            .collect();
        let mut occurrences = 0;
        let mut suppressed = 0;
        let mut last: HashMap<String, AttributeValue> = HashMap::new();
        for e in &input.events {
            let Some(v) = e.attributes.get(&m.attr) else { continue };
            occurrences += 1;
            let objs: Vec<String> = e.objects.iter().cloned().collect();
            let inst = instances_of(input, &objs, &m.object_type);
            let oid = inst[0];
            let changed = last.get(oid) != Some(v);
            match (changed, rows.get(e.eid.as_str())) {
                (true, Some((roid, rv))) if *roid == oid && *rv == v => {}
                (false, None) => suppressed += 1,
                other => return Err(format!("{} at {}: {:?}", m.attr, e.eid, other)),
            }
            last.insert(oid.to_string(), v.clone());
        }
        if occurrences != table.rows.len() + suppressed {
            return Err(format!(
                "{}: {occurrences} occurrences != {} rows + {suppressed} suppressed",
                m.attr,
                table.rows.len()
            ));
        }
        if output.events.iter().any(|e| e.attributes.contains_key(&m.attr)) {
            return Err(format!("{} still on events", m.attr));
        }
    }
    Ok(())
}

/// The same log with value ids renamed to `x<n>` in reverse order.
pub fn rename_vids(log: &DocelLog) -> DocelLog {
    let mut out = log.clone();
    for table in out.dynamic_tables.values_mut() {
        let n = table.rows.len();
        for (i, r) in table.rows.iter_mut().enumerate() {
            r.vid = format!("x{}", n - i);
        }
    }
    out
}
