//! Materializes dynamic-attribute tables from a match set and strips the
//! matched attributes from the events.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{AttributeValue, DocelLog, DynamicAttributeRow, DynamicTable, Match, OcelLog};

/// Renders the `n`-th (1-based) value id of a table.
pub fn value_id(n: usize) -> String {
    format!("v{n}")
}

/// Last recorded value per object and the next value id for one attribute.
#[derive(Debug, Default)]
struct AssignmentState<'a> {
    last: HashMap<&'a str, &'a AttributeValue>,
    next_vid: usize,
}

impl<'a> AssignmentState<'a> {
    /// Returns a fresh vid when `value` differs from the last value recorded
    /// for `oid`, or `None` when the occurrence repeats it.
    fn record(&mut self, oid: &'a str, value: &'a AttributeValue) -> Option<String> {
        if self.last.get(oid).is_some_and(|prev| *prev == value) {
            return None;
        }
        self.last.insert(oid, value);
        self.next_vid += 1;
        Some(value_id(self.next_vid))
    }
}

/// One row per event that sets a new value of `m.attr` on its unique
/// `m.object_type` instance. The first observation of every instance counts
/// as a change.
pub fn build_attribute_table(log: &OcelLog, m: &Match) -> Result<Vec<DynamicAttributeRow>> {
    let mut state = AssignmentState::default();
    let mut rows = Vec::new();
    let mut events: Vec<_> = log.events.iter().collect();
    events.sort_by(|a, b| a.order(b));
    for e in events {
        let Some(value) = e.attributes.get(&m.attr) else {
            continue;
        };
        let instances: Vec<&String> = e
            .objects
            .iter()
            .filter(|oid| log.object_type_of(oid) == Some(m.object_type.as_str()))
            .collect();
        let [oid] = instances.as_slice() else {
            return Err(Error::CooccurrenceViolated {
                attr: m.attr.clone(),
                object_type: m.object_type.clone(),
                eid: e.eid.clone(),
                count: instances.len(),
            });
        };
        if let Some(vid) = state.record(oid.as_str(), value) {
            rows.push(DynamicAttributeRow {
                vid,
                eid: e.eid.clone(),
                oid: (*oid).clone(),
                name: m.attr.clone(),
                value: value.clone(),
            });
        }
    }
    Ok(rows)
}

/// Builds the DOCEL log: one dynamic table per match, matched attributes
/// removed from every event, objects untouched.
pub fn transform(log: &OcelLog, matches: &[Match]) -> Result<DocelLog> {
    let mut seen = BTreeSet::new();
    for m in matches {
        if !seen.insert(m.attr.as_str()) {
            return Err(Error::DuplicateMatch(m.attr.clone()));
        }
    }

    let mut dynamic_tables = BTreeMap::new();
    for m in matches {
        let rows = build_attribute_table(log, m)?;
        dynamic_tables.insert(
            m.attr.clone(),
            DynamicTable {
                object_type: m.object_type.clone(),
                rows,
            },
        );
    }

    let mut events = log.events.clone();
    crate::model::sort_events(&mut events);
    for e in &mut events {
        e.attributes.retain(|name, _| !seen.contains(name.as_str()));
    }

    Ok(DocelLog {
        events,
        objects: log.objects.clone(),
        object_types: log.object_types.clone(),
        event_attr_names: log
            .event_attr_names
            .iter()
            .filter(|a| !seen.contains(a.as_str()))
            .cloned()
            .collect(),
        dynamic_tables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running_example;
    use crate::model::MatchMethod;

    #[test]
    fn running_example_table() {
        let log = running_example();
        let rows = build_attribute_table(
            &log,
            &Match::new("Value", "Orders", MatchMethod::UniqueCandidate),
        )
        .unwrap();
        let got: Vec<(&str, &str, &str, i64)> = rows
            .iter()
            .map(|r| {
                let AttributeValue::Integer(v) = r.value else { panic!() };
                (r.vid.as_str(), r.eid.as_str(), r.oid.as_str(), v)
            })
            .collect();
        assert_eq!(
            got,
            [("v1", "e1", "o1", 100), ("v2", "e3", "o2", 60), ("v3", "e5", "o1", 70)]
        );
    }

    #[test]
    fn foreign_match_violates_cooccurrence() {
        let log = running_example();
        let err = build_attribute_table(&log, &Match::new("Value", "Items", MatchMethod::NameBased))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::CooccurrenceViolated { ref eid, count: 2, .. } if eid == "e1"
        ));
    }

    #[test]
    fn duplicate_attribute_in_matches() {
        let log = running_example();
        let m = Match::new("Value", "Orders", MatchMethod::UniqueCandidate);
        assert!(matches!(
            transform(&log, &[m.clone(), m]),
            Err(Error::DuplicateMatch(_))
        ));
    }

    #[test]
    fn empty_match_list_is_identity() {
        let log = running_example();
        let docel = transform(&log, &[]).unwrap();
        assert_eq!(docel.events, log.events);
        assert_eq!(docel.objects, log.objects);
        assert_eq!(docel.event_attr_names, log.event_attr_names);
        assert!(docel.dynamic_tables.is_empty());
    }
}
