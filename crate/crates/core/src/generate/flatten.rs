use std::collections::{BTreeMap, HashMap};

use crate::model::{AttributeValue, DocelLog, OcelLog};

/// How dynamic values are written onto events when flattening.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FlattenStyle {
    /// Values appear on change events and are repeated on later events that
    /// reference exactly one instance of the attribute's type.
    #[default]
    Repeat,
    /// Values appear only on the events that changed them.
    Sparse,
}

pub fn flatten_to_ocel(gold: &DocelLog) -> OcelLog {
    flatten_to_ocel_with(gold, FlattenStyle::Repeat)
}

/// Degrades a DOCEL log to OCEL: every dynamic row becomes an event attribute
/// on its event and the object linkage is dropped.
pub fn flatten_to_ocel_with(gold: &DocelLog, style: FlattenStyle) -> OcelLog {
    // eid -> attr -> value set on that event
    let mut changes: HashMap<&str, BTreeMap<&str, &AttributeValue>> = HashMap::new();
    for (attr, table) in &gold.dynamic_tables {
        for row in &table.rows {
            changes
                .entry(row.eid.as_str())
                .or_default()
                .insert(attr.as_str(), &row.value);
        }
    }
    // which row changed which object, for tracking current values
    let mut changed_oid: HashMap<(&str, &str), &str> = HashMap::new();
    for (attr, table) in &gold.dynamic_tables {
        for row in &table.rows {
            changed_oid.insert((row.eid.as_str(), attr.as_str()), row.oid.as_str());
        }
    }

    let mut current: HashMap<(&str, &str), &AttributeValue> = HashMap::new();
    let mut events = Vec::with_capacity(gold.events.len());
    for e in &gold.events {
        let mut ev = e.clone();
        let explicit = changes.get(e.eid.as_str());
        for (attr, table) in &gold.dynamic_tables {
            let attr = attr.as_str();
            if let Some(v) = explicit.and_then(|m| m.get(attr)) {
                ev.attributes.insert(attr.to_string(), (*v).clone());
                let oid = changed_oid[&(e.eid.as_str(), attr)];
                current.insert((attr, oid), v);
                continue;
            }
            if style == FlattenStyle::Sparse || ev.attributes.contains_key(attr) {
                continue;
            }
            let mut of_type = e.objects.iter().filter(|oid| {
                gold.objects
                    .get(oid.as_str())
                    .is_some_and(|o| o.object_type == table.object_type)
            });
            if let (Some(oid), None) = (of_type.next(), of_type.next()) {
                if let Some(v) = current.get(&(attr, oid.as_str())) {
                    ev.attributes.insert(attr.to_string(), (*v).clone());
                }
            }
        }
        events.push(ev);
    }

    let mut log = OcelLog::new(events, gold.objects.values().cloned());
    log.object_types.extend(gold.object_types.iter().cloned());
    log.event_attr_names.extend(gold.event_attr_names.iter().cloned());
    log.event_attr_names
        .extend(gold.dynamic_tables.keys().cloned());
    log
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::transform;
    use crate::fixtures::running_example;
    use crate::model::Match;
    use crate::model::MatchMethod;

    fn running_docel() -> DocelLog {
        let m = Match::new("Value", "Orders", MatchMethod::UniqueCandidate);
        transform(&running_example(), &[m]).unwrap()
    }

    #[test]
    fn reproduces_running_example() {
        let flat = flatten_to_ocel(&running_docel());
        let expected = running_example();
        assert_eq!(flat.events, expected.events);
        assert_eq!(flat.objects, expected.objects);
    }

    #[test]
    fn sparse_keeps_only_changes() {
        let flat = flatten_to_ocel_with(&running_docel(), FlattenStyle::Sparse);
        let with_value: Vec<&str> = flat
            .events
            .iter()
            .filter(|e| e.attributes.contains_key("Value"))
            .map(|e| e.eid.as_str())
            .collect();
        assert_eq!(with_value, ["e1", "e3", "e5"]);
    }

    #[test]
    fn no_tables_keeps_events() {
        let mut d = running_docel();
        d.dynamic_tables.clear();
        let flat = flatten_to_ocel(&d);
        assert_eq!(flat.events, d.events);
    }
}
