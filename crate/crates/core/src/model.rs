//! Domain types shared by every stage: OCEL and DOCEL logs, attribute values,
//! matches, and the structural validation rules for both log shapes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

pub type Timestamp = DateTime<Utc>;

/// Kind tag of an [`AttributeValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    String,
    Integer,
    Real,
    Boolean,
    Timestamp,
}

/// A typed attribute value.
///
/// Equality is kind-strict: values of different kinds never compare equal.
/// Reals compare through their canonical rendering, so two reals are equal
/// exactly when they print the same.
#[derive(Debug, Clone)]
pub enum AttributeValue {
    String(String),
    Integer(i64),
    Real(f64),
    Boolean(bool),
    Timestamp(Timestamp),
}

impl AttributeValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            AttributeValue::String(_) => ValueKind::String,
            AttributeValue::Integer(_) => ValueKind::Integer,
            AttributeValue::Real(_) => ValueKind::Real,
            AttributeValue::Boolean(_) => ValueKind::Boolean,
            AttributeValue::Timestamp(_) => ValueKind::Timestamp,
        }
    }

    /// Canonical text form. Reals always carry a `.` or an exponent so they
    /// never read back as integers.
    pub fn canonical(&self) -> String {
        match self {
            AttributeValue::String(s) => s.clone(),
            AttributeValue::Integer(i) => i.to_string(),
            AttributeValue::Real(x) => canonical_real(*x),
            AttributeValue::Boolean(b) => b.to_string(),
            AttributeValue::Timestamp(ts) => format_timestamp(ts),
        }
    }

    /// Infers a value from untyped text (CSV cells). Empty text is absent.
    pub fn infer(text: &str) -> Option<AttributeValue> {
        if text.is_empty() {
            return None;
        }
        let trimmed = text.trim();
        match trimmed {
            "true" | "True" | "TRUE" => return Some(AttributeValue::Boolean(true)),
            "false" | "False" | "FALSE" => return Some(AttributeValue::Boolean(false)),
            _ => {}
        }
        if looks_integral(trimmed) {
            if let Ok(i) = trimmed.parse::<i64>() {
                return Some(AttributeValue::Integer(i));
            }
        }
        if looks_real(trimmed) {
            if let Ok(x) = trimmed.parse::<f64>() {
                if x.is_finite() {
                    return Some(AttributeValue::Real(x));
                }
            }
        }
        if let Some(ts) = parse_timestamp(trimmed) {
            return Some(AttributeValue::Timestamp(ts));
        }
        Some(AttributeValue::String(text.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            AttributeValue::String(s) => serde_json::Value::String(s.clone()),
            AttributeValue::Integer(i) => serde_json::Value::from(*i),
            AttributeValue::Real(x) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            AttributeValue::Boolean(b) => serde_json::Value::Bool(*b),
            AttributeValue::Timestamp(ts) => serde_json::Value::String(format_timestamp(ts)),
        }
    }

    fn as_real(&self) -> Option<f64> {
        match self {
            AttributeValue::Integer(i) => Some(*i as f64),
            AttributeValue::Real(x) => Some(*x),
            _ => None,
        }
    }
}

impl PartialEq for AttributeValue {
    fn eq(&self, other: &Self) -> bool {
        use AttributeValue::*;
        match (self, other) {
            (String(a), String(b)) => a == b,
            (Integer(a), Integer(b)) => a == b,
            (Real(a), Real(b)) => canonical_real(*a) == canonical_real(*b),
            (Boolean(a), Boolean(b)) => a == b,
            (Timestamp(a), Timestamp(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for AttributeValue {}

impl Hash for AttributeValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind().hash(state);
        self.canonical().hash(state);
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl From<&str> for AttributeValue {
    fn from(s: &str) -> Self {
        AttributeValue::String(s.to_string())
    }
}

impl From<String> for AttributeValue {
    fn from(s: String) -> Self {
        AttributeValue::String(s)
    }
}

impl From<i64> for AttributeValue {
    fn from(i: i64) -> Self {
        AttributeValue::Integer(i)
    }
}

impl From<f64> for AttributeValue {
    fn from(x: f64) -> Self {
        AttributeValue::Real(x)
    }
}

impl From<bool> for AttributeValue {
    fn from(b: bool) -> Self {
        AttributeValue::Boolean(b)
    }
}

fn canonical_real(x: f64) -> String {
    // -0.0 and 0.0 are the same quantity
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

fn looks_integral(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn looks_real(s: &str) -> bool {
    s.bytes().any(|b| b.is_ascii_digit())
        && s
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'))
}

/// Renders a timestamp as RFC 3339 in UTC (`2023-05-20T09:07:00Z`).
pub fn format_timestamp(ts: &Timestamp) -> String {
    ts.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

/// Parses ISO-8601 date-times with optional seconds, fractional seconds and
/// offset. Values without an offset are taken as UTC.
pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    const WITH_OFFSET: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f%#z",
        "%Y-%m-%d %H:%M:%S%.f%#z",
        "%Y-%m-%dT%H:%M%#z",
        "%Y-%m-%d %H:%M%#z",
    ];
    const NAIVE: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];

    let s = text.trim();
    if s.len() < 16 {
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    for fmt in WITH_OFFSET {
        if let Ok(dt) = DateTime::parse_from_str(s, fmt) {
            return Some(dt.with_timezone(&Utc));
        }
    }
    let naive = s.strip_suffix(['Z', 'z']).unwrap_or(s);
    for fmt in NAIVE {
        if let Ok(dt) = NaiveDateTime::parse_from_str(naive, fmt) {
            return Some(dt.and_utc());
        }
    }
    None
}

/// Unifies the kinds of all values recorded under one attribute name.
///
/// Integer and real cells mixed together become reals. Otherwise the majority
/// kind wins and cells of any other kind fall back to strings holding their
/// canonical text. Ties go to the string kind.
pub fn unify_kinds<'a>(values: impl IntoIterator<Item = &'a mut AttributeValue>) {
    let mut values: Vec<&mut AttributeValue> = values.into_iter().collect();
    let mut counts: BTreeMap<ValueKind, usize> = BTreeMap::new();
    for v in &values {
        *counts.entry(v.kind()).or_default() += 1;
    }
    if counts.len() <= 1 {
        return;
    }
    if counts.keys().all(|k| matches!(k, ValueKind::Integer | ValueKind::Real)) {
        for v in values.iter_mut() {
            if let Some(x) = v.as_real() {
                **v = AttributeValue::Real(x);
            }
        }
        return;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    let winners: Vec<ValueKind> = counts
        .iter()
        .filter(|(_, &c)| c == top)
        .map(|(&k, _)| k)
        .collect();
    let majority = if winners.len() == 1 {
        winners[0]
    } else {
        ValueKind::String
    };
    for v in values.iter_mut() {
        if v.kind() != majority {
            **v = AttributeValue::String(v.canonical());
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectInstance {
    pub oid: String,
    pub object_type: String,
    pub attributes: BTreeMap<String, AttributeValue>,
}

impl ObjectInstance {
    pub fn new(oid: impl Into<String>, object_type: impl Into<String>) -> Self {
        ObjectInstance {
            oid: oid.into(),
            object_type: object_type.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub eid: String,
    pub activity: String,
    pub timestamp: Timestamp,
    pub objects: BTreeSet<String>,
    pub attributes: BTreeMap<String, AttributeValue>,
}

impl Event {
    pub fn new(eid: impl Into<String>, activity: impl Into<String>, timestamp: Timestamp) -> Self {
        Event {
            eid: eid.into(),
            activity: activity.into(),
            timestamp,
            objects: BTreeSet::new(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_objects<I, S>(mut self, oids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.objects.extend(oids.into_iter().map(Into::into));
        self
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<AttributeValue>) -> Self {
        self.attributes.insert(name.into(), value.into());
        self
    }

    /// Total order used everywhere events are iterated: timestamp, then id.
    pub fn order(&self, other: &Event) -> Ordering {
        self.timestamp
            .cmp(&other.timestamp)
            .then_with(|| self.eid.cmp(&other.eid))
    }
}

pub(crate) fn sort_events(events: &mut [Event]) {
    events.sort_by(|a, b| a.order(b));
}

/// An object-centric event log.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OcelLog {
    /// Sorted by (timestamp, eid).
    pub events: Vec<Event>,
    pub objects: BTreeMap<String, ObjectInstance>,
    pub object_types: BTreeSet<String>,
    pub event_attr_names: BTreeSet<String>,
    pub meta: BTreeMap<String, String>,
}

impl OcelLog {
    /// Builds a log, sorting events and deriving the type and attribute
    /// registries from the data.
    pub fn new(events: Vec<Event>, objects: impl IntoIterator<Item = ObjectInstance>) -> Self {
        let mut log = OcelLog {
            events,
            objects: objects.into_iter().map(|o| (o.oid.clone(), o)).collect(),
            object_types: BTreeSet::new(),
            event_attr_names: BTreeSet::new(),
            meta: default_meta(),
        };
        log.normalize();
        log
    }

    /// Re-sorts events and extends the registries with everything observed.
    pub fn normalize(&mut self) {
        sort_events(&mut self.events);
        self.object_types
            .extend(self.objects.values().map(|o| o.object_type.clone()));
        for e in &self.events {
            self.event_attr_names.extend(e.attributes.keys().cloned());
        }
    }

    pub fn object_type_of(&self, oid: &str) -> Option<&str> {
        self.objects.get(oid).map(|o| o.object_type.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty() && self.objects.is_empty()
    }
}

pub(crate) fn default_meta() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("version".to_string(), "1.0".to_string()),
        ("ordering".to_string(), "timestamp".to_string()),
    ])
}

/// One recorded value of a dynamic object attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DynamicAttributeRow {
    pub vid: String,
    pub eid: String,
    pub oid: String,
    pub name: String,
    pub value: AttributeValue,
}

/// Value table of one dynamic attribute, bound to a single object type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicTable {
    pub object_type: String,
    pub rows: Vec<DynamicAttributeRow>,
}

/// Data-aware object-centric log: events, objects, and one value table per
/// dynamic attribute.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocelLog {
    pub events: Vec<Event>,
    pub objects: BTreeMap<String, ObjectInstance>,
    pub object_types: BTreeSet<String>,
    pub event_attr_names: BTreeSet<String>,
    pub dynamic_tables: BTreeMap<String, DynamicTable>,
}

impl DocelLog {
    /// The dynamic-attribute registry: attribute name to object type.
    pub fn registry(&self) -> BTreeMap<String, String> {
        self.dynamic_tables
            .iter()
            .map(|(a, t)| (a.clone(), t.object_type.clone()))
            .collect()
    }

    pub fn row_count(&self) -> usize {
        self.dynamic_tables.values().map(|t| t.rows.len()).sum()
    }

    pub fn event(&self, eid: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.eid == eid)
    }
}

/// Provenance of a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMethod {
    UniqueCandidate,
    RelationBased,
    NameBased,
}

impl fmt::Display for MatchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMethod::UniqueCandidate => "unique-candidate",
            MatchMethod::RelationBased => "relation-based",
            MatchMethod::NameBased => "name-based",
        })
    }
}

/// An attribute recognised as a dynamic attribute of one object type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Match {
    pub attr: String,
    pub object_type: String,
    pub method: MatchMethod,
}

impl Match {
    pub fn new(attr: impl Into<String>, object_type: impl Into<String>, method: MatchMethod) -> Self {
        Match {
            attr: attr.into(),
            object_type: object_type.into(),
            method,
        }
    }
}

/// A broken structural invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateEventId { eid: String },
    DanglingReference { eid: String, oid: String },
    UnregisteredType { oid: String, object_type: String },
    UnregisteredAttribute { eid: String, name: String },
    ObjectKeyMismatch { key: String, oid: String },
    EventsOutOfOrder { eid: String },
    AttributeBothDynamicAndEvent { name: String },
    UnknownDynamicType { name: String, object_type: String },
    DuplicateValueId { name: String, vid: String },
    RowUnknownEvent { name: String, vid: String, eid: String },
    RowUnknownObject { name: String, vid: String, oid: String },
    RowWrongType { name: String, vid: String, oid: String },
    RowObjectNotReferenced { name: String, vid: String, eid: String, oid: String },
    RowsOutOfOrder { name: String, oid: String, vid: String },
    RowRepeatsValue { name: String, oid: String, vid: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateEventId { eid } => write!(f, "duplicate event id `{eid}`"),
            DanglingReference { eid, oid } => {
                write!(f, "event `{eid}` references unknown object `{oid}`")
            }
            UnregisteredType { oid, object_type } => {
                write!(f, "object `{oid}` has unregistered type `{object_type}`")
            }
            UnregisteredAttribute { eid, name } => {
                write!(f, "event `{eid}` carries unregistered attribute `{name}`")
            }
            ObjectKeyMismatch { key, oid } => {
                write!(f, "object stored under `{key}` has id `{oid}`")
            }
            EventsOutOfOrder { eid } => write!(f, "event `{eid}` is out of (timestamp, id) order"),
            AttributeBothDynamicAndEvent { name } => {
                write!(f, "`{name}` is both a dynamic attribute and an event attribute")
            }
            UnknownDynamicType { name, object_type } => {
                write!(f, "dynamic attribute `{name}` is bound to unknown type `{object_type}`")
            }
            DuplicateValueId { name, vid } => write!(f, "`{name}`: duplicate value id `{vid}`"),
            RowUnknownEvent { name, vid, eid } => {
                write!(f, "`{name}` row `{vid}` cites unknown event `{eid}`")
            }
            RowUnknownObject { name, vid, oid } => {
                write!(f, "`{name}` row `{vid}` cites unknown object `{oid}`")
            }
            RowWrongType { name, vid, oid } => {
                write!(f, "`{name}` row `{vid}` cites object `{oid}` of another type")
            }
            RowObjectNotReferenced { name, vid, eid, oid } => write!(
                f,
                "`{name}` row `{vid}`: event `{eid}` does not reference object `{oid}`"
            ),
            RowsOutOfOrder { name, oid, vid } => {
                write!(f, "`{name}` rows for `{oid}` out of event order at `{vid}`")
            }
            RowRepeatsValue { name, oid, vid } => {
                write!(f, "`{name}` row `{vid}` repeats the previous value of `{oid}`")
            }
        }
    }
}

fn validate_base(
    events: &[Event],
    objects: &BTreeMap<String, ObjectInstance>,
    object_types: &BTreeSet<String>,
    event_attr_names: &BTreeSet<String>,
    out: &mut Vec<Violation>,
) {
    for (key, obj) in objects {
        if key != &obj.oid {
            out.push(Violation::ObjectKeyMismatch {
                key: key.clone(),
                oid: obj.oid.clone(),
            });
        }
        if !object_types.contains(&obj.object_type) {
            out.push(Violation::UnregisteredType {
                oid: obj.oid.clone(),
                object_type: obj.object_type.clone(),
            });
        }
    }
    let mut seen = HashSet::new();
    for (i, e) in events.iter().enumerate() {
        if !seen.insert(e.eid.as_str()) {
            out.push(Violation::DuplicateEventId { eid: e.eid.clone() });
        }
        if i > 0 && events[i - 1].order(e) != Ordering::Less && events[i - 1].eid != e.eid {
            out.push(Violation::EventsOutOfOrder { eid: e.eid.clone() });
        }
        for oid in &e.objects {
            if !objects.contains_key(oid) {
                out.push(Violation::DanglingReference {
                    eid: e.eid.clone(),
                    oid: oid.clone(),
                });
            }
        }
        for name in e.attributes.keys() {
            if !event_attr_names.contains(name) {
                out.push(Violation::UnregisteredAttribute {
                    eid: e.eid.clone(),
                    name: name.clone(),
                });
            }
        }
    }
}

/// Lists every broken OCEL invariant; an empty list means the log is valid.
pub fn validate_ocel(log: &OcelLog) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_base(
        &log.events,
        &log.objects,
        &log.object_types,
        &log.event_attr_names,
        &mut out,
    );
    out
}

/// Lists every broken DOCEL invariant, including those of the dynamic tables.
pub fn validate_docel(log: &DocelLog) -> Vec<Violation> {
    let mut out = Vec::new();
    validate_base(
        &log.events,
        &log.objects,
        &log.object_types,
        &log.event_attr_names,
        &mut out,
    );

    let position: HashMap<&str, usize> = log
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.eid.as_str(), i))
        .collect();

    for (name, table) in &log.dynamic_tables {
        if log.event_attr_names.contains(name)
            || log.events.iter().any(|e| e.attributes.contains_key(name))
        {
            out.push(Violation::AttributeBothDynamicAndEvent { name: name.clone() });
        }
        if !log.object_types.contains(&table.object_type) {
            out.push(Violation::UnknownDynamicType {
                name: name.clone(),
                object_type: table.object_type.clone(),
            });
        }
        let mut vids = HashSet::new();
        let mut last: HashMap<&str, (usize, &AttributeValue)> = HashMap::new();
        for row in &table.rows {
            if !vids.insert(row.vid.as_str()) {
                out.push(Violation::DuplicateValueId {
                    name: name.clone(),
                    vid: row.vid.clone(),
                });
            }
            match log.objects.get(&row.oid) {
                None => out.push(Violation::RowUnknownObject {
                    name: name.clone(),
                    vid: row.vid.clone(),
                    oid: row.oid.clone(),
                }),
                Some(o) if o.object_type != table.object_type => {
                    out.push(Violation::RowWrongType {
                        name: name.clone(),
                        vid: row.vid.clone(),
                        oid: row.oid.clone(),
                    })
                }
                Some(_) => {}
            }
            let Some(&pos) = position.get(row.eid.as_str()) else {
                out.push(Violation::RowUnknownEvent {
                    name: name.clone(),
                    vid: row.vid.clone(),
                    eid: row.eid.clone(),
                });
                continue;
            };
            if !log.events[pos].objects.contains(&row.oid) {
                out.push(Violation::RowObjectNotReferenced {
                    name: name.clone(),
                    vid: row.vid.clone(),
                    eid: row.eid.clone(),
                    oid: row.oid.clone(),
                });
            }
            if let Some((prev_pos, prev_value)) = last.get(row.oid.as_str()) {
                if *prev_pos >= pos {
                    out.push(Violation::RowsOutOfOrder {
                        name: name.clone(),
                        oid: row.oid.clone(),
                        vid: row.vid.clone(),
                    });
                }
                if *prev_value == &row.value {
                    out.push(Violation::RowRepeatsValue {
                        name: name.clone(),
                        oid: row.oid.clone(),
                        vid: row.vid.clone(),
                    });
                }
            }
            last.insert(row.oid.as_str(), (pos, &row.value));
        }
    }
    out
}
