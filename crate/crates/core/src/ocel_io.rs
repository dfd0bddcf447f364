//! JSON-OCEL 1.0 and tabular (CSV) readers and writers for [`OcelLog`].

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{
    format_timestamp, parse_timestamp, unify_kinds, AttributeValue, Event, ObjectInstance,
    OcelLog,
};

pub const KEY_GLOBAL_LOG: &str = "ocel:global-log";
pub const KEY_GLOBAL_EVENT: &str = "ocel:global-event";
pub const KEY_GLOBAL_OBJECT: &str = "ocel:global-object";
pub const KEY_EVENTS: &str = "ocel:events";
pub const KEY_OBJECTS: &str = "ocel:objects";

const KEY_ATTRIBUTE_NAMES: &str = "ocel:attribute-names";
const KEY_OBJECT_TYPES: &str = "ocel:object-types";
const KEY_ACTIVITY: &str = "ocel:activity";
const KEY_TIMESTAMP: &str = "ocel:timestamp";
const KEY_OMAP: &str = "ocel:omap";
const KEY_VMAP: &str = "ocel:vmap";
const KEY_TYPE: &str = "ocel:type";
const KEY_OVMAP: &str = "ocel:ovmap";

pub const COL_ID: &str = "ID";
pub const COL_ACTIVITY: &str = "Activity";
pub const COL_TIMESTAMP: &str = "Timestamp";
pub const COL_OBJECT_ID: &str = "ObjectID";
pub const COL_TYPE: &str = "Type";

/// Separator of object ids inside one CSV cell.
pub const OID_SEPARATOR: char = ';';

fn missing(key: &str, path: &str) -> Error {
    Error::MissingKey {
        key: key.to_string(),
        path: path.to_string(),
    }
}

fn json_value(v: &Value, path: &str) -> Result<Option<AttributeValue>> {
    Ok(match v {
        Value::Null => None,
        Value::Bool(b) => Some(AttributeValue::Boolean(*b)),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(AttributeValue::Integer(i))
            } else {
                Some(AttributeValue::Real(n.as_f64().ok_or_else(|| {
                    Error::InvalidValue {
                        path: path.to_string(),
                        reason: format!("number {n} is not representable"),
                    }
                })?))
            }
        }
        Value::String(s) if s.is_empty() => None,
        Value::String(s) => Some(match parse_timestamp(s) {
            Some(ts) => AttributeValue::Timestamp(ts),
            None => AttributeValue::String(s.clone()),
        }),
        Value::Array(_) | Value::Object(_) => {
            return Err(Error::InvalidValue {
                path: path.to_string(),
                reason: "nested values are not supported".to_string(),
            })
        }
    })
}

fn json_attributes(
    v: Option<&Value>,
    path: &str,
) -> Result<BTreeMap<String, AttributeValue>> {
    let mut out = BTreeMap::new();
    let Some(v) = v else { return Ok(out) };
    let map = v.as_object().ok_or_else(|| Error::InvalidValue {
        path: path.to_string(),
        reason: "expected an object".to_string(),
    })?;
    for (name, value) in map {
        if let Some(value) = json_value(value, &format!("{path}/{name}"))? {
            out.insert(name.clone(), value);
        }
    }
    Ok(out)
}

fn string_list(v: Option<&Value>, path: &str) -> Result<Vec<String>> {
    let Some(v) = v else { return Ok(Vec::new()) };
    let arr = v.as_array().ok_or_else(|| Error::InvalidValue {
        path: path.to_string(),
        reason: "expected an array".to_string(),
    })?;
    arr.iter()
        .map(|x| match x {
            Value::String(s) => Ok(s.clone()),
            other => Err(Error::InvalidValue {
                path: path.to_string(),
                reason: format!("expected a string, found {other}"),
            }),
        })
        .collect()
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::InvalidValue {
        path: path.to_string(),
        reason: "expected an object".to_string(),
    })
}

/// Parses a JSON-OCEL document.
pub fn parse_ocel_json(bytes: &[u8]) -> Result<OcelLog> {
    let doc: Value = serde_json::from_slice(bytes)?;
    let root = as_object(&doc, "/")?;

    // missing version/ordering entries fall back to the defaults
    let mut log = OcelLog {
        meta: crate::model::default_meta(),
        ..OcelLog::default()
    };

    if let Some(global) = root.get(KEY_GLOBAL_LOG) {
        let path = format!("/{KEY_GLOBAL_LOG}");
        let global = as_object(global, &path)?;
        for (key, value) in global {
            match key.as_str() {
                KEY_ATTRIBUTE_NAMES => log.event_attr_names.extend(string_list(
                    Some(value),
                    &format!("{path}/{key}"),
                )?),
                KEY_OBJECT_TYPES => log
                    .object_types
                    .extend(string_list(Some(value), &format!("{path}/{key}"))?),
                _ => {
                    if let Value::String(s) = value {
                        let short = key.strip_prefix("ocel:").unwrap_or(key);
                        log.meta.insert(short.to_string(), s.clone());
                    }
                }
            }
        }
    }

    let objects = root
        .get(KEY_OBJECTS)
        .ok_or_else(|| missing(KEY_OBJECTS, "/"))?;
    for (oid, obj) in as_object(objects, &format!("/{KEY_OBJECTS}"))? {
        let path = format!("/{KEY_OBJECTS}/{oid}");
        let obj = as_object(obj, &path)?;
        let object_type = obj
            .get(KEY_TYPE)
            .and_then(Value::as_str)
            .ok_or_else(|| missing(KEY_TYPE, &path))?;
        let attributes = json_attributes(obj.get(KEY_OVMAP), &format!("{path}/{KEY_OVMAP}"))?;
        log.objects.insert(
            oid.clone(),
            ObjectInstance {
                oid: oid.clone(),
                object_type: object_type.to_string(),
                attributes,
            },
        );
    }

    let events = root.get(KEY_EVENTS).ok_or_else(|| missing(KEY_EVENTS, "/"))?;
    for (eid, ev) in as_object(events, &format!("/{KEY_EVENTS}"))? {
        let path = format!("/{KEY_EVENTS}/{eid}");
        let ev = as_object(ev, &path)?;
        let activity = ev
            .get(KEY_ACTIVITY)
            .and_then(Value::as_str)
            .ok_or_else(|| missing(KEY_ACTIVITY, &path))?;
        let ts_text = ev
            .get(KEY_TIMESTAMP)
            .and_then(Value::as_str)
            .ok_or_else(|| missing(KEY_TIMESTAMP, &path))?;
        let timestamp = parse_timestamp(ts_text).ok_or_else(|| Error::InvalidTimestamp {
            value: ts_text.to_string(),
            path: format!("{path}/{KEY_TIMESTAMP}"),
        })?;
        let omap = ev.get(KEY_OMAP).ok_or_else(|| missing(KEY_OMAP, &path))?;
        let oids = string_list(Some(omap), &format!("{path}/{KEY_OMAP}"))?;
        for oid in &oids {
            if !log.objects.contains_key(oid) {
                return Err(Error::UnknownObjectReference {
                    eid: eid.clone(),
                    oid: oid.clone(),
                });
            }
        }
        let vmap = ev.get(KEY_VMAP).ok_or_else(|| missing(KEY_VMAP, &path))?;
        let attributes = json_attributes(Some(vmap), &format!("{path}/{KEY_VMAP}"))?;
        log.events.push(Event {
            eid: eid.clone(),
            activity: activity.to_string(),
            timestamp,
            objects: oids.into_iter().collect(),
            attributes,
        });
    }

    unify_event_kinds(&mut log.events);
    unify_object_kinds(log.objects.values_mut());
    log.normalize();
    Ok(log)
}

pub(crate) fn unify_event_kinds(events: &mut [Event]) {
    let names: BTreeSet<String> = events
        .iter()
        .flat_map(|e| e.attributes.keys().cloned())
        .collect();
    for name in names {
        unify_kinds(events.iter_mut().filter_map(|e| e.attributes.get_mut(&name)));
    }
}

pub(crate) fn unify_object_kinds<'a>(objects: impl Iterator<Item = &'a mut ObjectInstance>) {
    let mut objects: Vec<&mut ObjectInstance> = objects.collect();
    let names: BTreeSet<String> = objects
        .iter()
        .flat_map(|o| o.attributes.keys().cloned())
        .collect();
    for name in names {
        unify_kinds(
            objects
                .iter_mut()
                .filter_map(|o| o.attributes.get_mut(&name)),
        );
    }
}

fn attribute_map(attrs: &BTreeMap<String, AttributeValue>) -> Value {
    Value::Object(
        attrs
            .iter()
            .map(|(k, v)| (k.clone(), v.to_json()))
            .collect(),
    )
}

struct EventsInLogOrder<'a>(&'a [Event]);

impl Serialize for EventsInLogOrder<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for e in self.0 {
            let mut body = Map::new();
            body.insert(KEY_ACTIVITY.into(), Value::String(e.activity.clone()));
            body.insert(
                KEY_OMAP.into(),
                Value::Array(e.objects.iter().cloned().map(Value::String).collect()),
            );
            body.insert(
                KEY_TIMESTAMP.into(),
                Value::String(format_timestamp(&e.timestamp)),
            );
            body.insert(KEY_VMAP.into(), attribute_map(&e.attributes));
            map.serialize_entry(&e.eid, &body)?;
        }
        map.end()
    }
}

struct JsonDocument<'a>(&'a OcelLog);

impl Serialize for JsonDocument<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let log = self.0;
        let mut global_log = Map::new();
        for (k, v) in &log.meta {
            global_log.insert(format!("ocel:{k}"), Value::String(v.clone()));
        }
        global_log.insert(
            KEY_ATTRIBUTE_NAMES.into(),
            Value::Array(log.event_attr_names.iter().cloned().map(Value::String).collect()),
        );
        global_log.insert(
            KEY_OBJECT_TYPES.into(),
            Value::Array(log.object_types.iter().cloned().map(Value::String).collect()),
        );
        let objects: Map<String, Value> = log
            .objects
            .values()
            .map(|o| {
                let mut body = Map::new();
                body.insert(KEY_OVMAP.into(), attribute_map(&o.attributes));
                body.insert(KEY_TYPE.into(), Value::String(o.object_type.clone()));
                (o.oid.clone(), Value::Object(body))
            })
            .collect();

        // top-level keys in sorted order
        let mut map = serializer.serialize_map(Some(5))?;
        map.serialize_entry(KEY_EVENTS, &EventsInLogOrder(&log.events))?;
        map.serialize_entry(
            KEY_GLOBAL_EVENT,
            &serde_json::json!({ KEY_ACTIVITY: "__INVALID__" }),
        )?;
        map.serialize_entry(KEY_GLOBAL_LOG, &global_log)?;
        map.serialize_entry(
            KEY_GLOBAL_OBJECT,
            &serde_json::json!({ KEY_TYPE: "__INVALID__" }),
        )?;
        map.serialize_entry(KEY_OBJECTS, &objects)?;
        map.end()
    }
}

/// Serializes a log as JSON-OCEL. Keys are sorted and events appear in
/// (timestamp, eid) order, so equal logs give identical bytes.
pub fn write_ocel_json(log: &OcelLog) -> Vec<u8> {
    let mut events = log.events.clone();
    crate::model::sort_events(&mut events);
    let sorted = OcelLog {
        events,
        ..log.clone()
    };
    let mut out = serde_json::to_vec_pretty(&JsonDocument(&sorted))
        .expect("serializing an in-memory JSON tree cannot fail");
    out.push(b'\n');
    out
}

/// Parses the events table and the objects table of a CSV rendering.
pub fn parse_ocel_csv(events_csv: &[u8], objects_csv: &[u8]) -> Result<OcelLog> {
    let mut objects = read_objects_table(objects_csv, "objects.csv", None)?;
    unify_object_kinds(objects.iter_mut());
    let object_types: BTreeSet<String> = objects.iter().map(|o| o.object_type.clone()).collect();
    let objects: BTreeMap<String, ObjectInstance> =
        objects.into_iter().map(|o| (o.oid.clone(), o)).collect();

    let table = read_events_table(events_csv, "events.csv", &object_types, &objects)?;
    let mut log = OcelLog {
        events: table.events,
        objects,
        object_types,
        event_attr_names: table.attribute_columns.into_iter().collect(),
        ..OcelLog::default()
    };
    log.meta = crate::model::default_meta();
    log.normalize();
    Ok(log)
}

/// Renders the log as an (events, objects) CSV pair.
pub fn write_ocel_csv(log: &OcelLog) -> Result<(Vec<u8>, Vec<u8>)> {
    let events = write_events_table(&log.events, &log.object_types, &log.event_attr_names, &log.objects)?;
    let objects = write_objects_table(log.objects.values(), true)?;
    Ok((events, objects))
}

pub(crate) struct EventsTable {
    pub events: Vec<Event>,
    pub attribute_columns: Vec<String>,
}

fn header_index(headers: &csv::StringRecord, name: &str, file: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingHeader {
            file: file.to_string(),
            header: name.to_string(),
        })
}

fn csv_reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes)
}

pub(crate) fn read_events_table(
    bytes: &[u8],
    file: &str,
    object_types: &BTreeSet<String>,
    objects: &BTreeMap<String, ObjectInstance>,
) -> Result<EventsTable> {
    let mut reader = csv_reader(bytes);
    let headers = reader.headers().map_err(|e| Error::csv(file, e))?.clone();
    let id_col = header_index(&headers, COL_ID, file)?;
    let act_col = header_index(&headers, COL_ACTIVITY, file)?;
    let ts_col = header_index(&headers, COL_TIMESTAMP, file)?;

    let mut type_cols = Vec::new();
    let mut attr_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if i == id_col || i == act_col || i == ts_col {
            continue;
        }
        if object_types.contains(h) {
            type_cols.push(i);
        } else {
            attr_cols.push((i, h.to_string()));
        }
    }

    let mut events = Vec::new();
    let mut seen = HashSet::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::csv(file, e))?;
        let eid = record[id_col].to_string();
        if !seen.insert(eid.clone()) {
            return Err(Error::DuplicateEventId(eid));
        }
        let ts_text = &record[ts_col];
        let timestamp = parse_timestamp(ts_text).ok_or_else(|| Error::InvalidTimestamp {
            value: ts_text.to_string(),
            path: format!("{file}:{}", line + 2),
        })?;
        let mut event = Event::new(eid, &record[act_col], timestamp);
        for &i in &type_cols {
            for oid in record[i].split(OID_SEPARATOR) {
                let oid = oid.trim();
                if oid.is_empty() {
                    continue;
                }
                if !objects.contains_key(oid) {
                    return Err(Error::UnknownObjectReference {
                        eid: event.eid.clone(),
                        oid: oid.to_string(),
                    });
                }
                event.objects.insert(oid.to_string());
            }
        }
        for (i, name) in &attr_cols {
            if let Some(v) = AttributeValue::infer(&record[*i]) {
                event.attributes.insert(name.clone(), v);
            }
        }
        events.push(event);
    }
    unify_event_kinds(&mut events);
    crate::model::sort_events(&mut events);
    Ok(EventsTable {
        events,
        attribute_columns: attr_cols.into_iter().map(|(_, n)| n).collect(),
    })
}

/// Reads an objects table. With `fixed_type` set, the table has no `Type`
/// column and every row belongs to that type.
pub(crate) fn read_objects_table(
    bytes: &[u8],
    file: &str,
    fixed_type: Option<&str>,
) -> Result<Vec<ObjectInstance>> {
    let mut reader = csv_reader(bytes);
    let headers = reader.headers().map_err(|e| Error::csv(file, e))?.clone();
    let id_col = header_index(&headers, COL_OBJECT_ID, file)?;
    let type_col = match fixed_type {
        Some(_) => None,
        None => Some(header_index(&headers, COL_TYPE, file)?),
    };
    let attr_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != id_col && Some(*i) != type_col)
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(file, e))?;
        let oid = record[id_col].to_string();
        if !seen.insert(oid.clone()) {
            return Err(Error::DuplicateObjectId(oid));
        }
        let object_type = match (fixed_type, type_col) {
            (Some(t), _) => t.to_string(),
            (None, Some(i)) => record[i].to_string(),
            (None, None) => unreachable!(),
        };
        let mut obj = ObjectInstance::new(oid, object_type);
        for (i, name) in &attr_cols {
            if let Some(v) = AttributeValue::infer(&record[*i]) {
                obj.attributes.insert(name.clone(), v);
            }
        }
        out.push(obj);
    }
    Ok(out)
}

fn finish(writer: csv::Writer<Vec<u8>>, file: &str) -> Result<Vec<u8>> {
    writer
        .into_inner()
        .map_err(|e| Error::io(file, e.into_error()))
}

pub(crate) fn write_events_table(
    events: &[Event],
    object_types: &BTreeSet<String>,
    attr_names: &BTreeSet<String>,
    objects: &BTreeMap<String, ObjectInstance>,
) -> Result<Vec<u8>> {
    if let Some(clash) = attr_names.iter().find(|a| {
        object_types.contains(*a) || [COL_ID, COL_ACTIVITY, COL_TIMESTAMP].contains(&a.as_str())
    }) {
        return Err(Error::InvalidLog(format!(
            "event attribute `{clash}` collides with a reserved column name"
        )));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![COL_ID, COL_ACTIVITY, COL_TIMESTAMP];
    header.extend(object_types.iter().map(String::as_str));
    header.extend(attr_names.iter().map(String::as_str));
    writer
        .write_record(&header)
        .map_err(|e| Error::csv("events.csv", e))?;

    let mut sorted: Vec<&Event> = events.iter().collect();
    sorted.sort_by(|a, b| a.order(b));
    for e in sorted {
        let mut row = vec![e.eid.clone(), e.activity.clone(), format_timestamp(&e.timestamp)];
        for t in object_types {
            let oids: Vec<&str> = e
                .objects
                .iter()
                .filter(|oid| objects.get(*oid).is_some_and(|o| &o.object_type == t))
                .map(String::as_str)
                .collect();
            row.push(oids.join(&OID_SEPARATOR.to_string()));
        }
        for a in attr_names {
            row.push(e.attributes.get(a).map(|v| v.canonical()).unwrap_or_default());
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::csv("events.csv", e))?;
    }
    finish(writer, "events.csv")
}

pub(crate) fn write_objects_table<'a>(
    objects: impl Iterator<Item = &'a ObjectInstance>,
    with_type: bool,
) -> Result<Vec<u8>> {
    let objects: Vec<&ObjectInstance> = objects.collect();
    let names: BTreeSet<&str> = objects
        .iter()
        .flat_map(|o| o.attributes.keys().map(String::as_str))
        .collect();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec![COL_OBJECT_ID];
    if with_type {
        header.push(COL_TYPE);
    }
    header.extend(names.iter().copied());
    writer
        .write_record(&header)
        .map_err(|e| Error::csv("objects.csv", e))?;
    for o in objects {
        let mut row = vec![o.oid.clone()];
        if with_type {
            row.push(o.object_type.clone());
        }
        for n in &names {
            row.push(o.attributes.get(*n).map(|v| v.canonical()).unwrap_or_default());
        }
        writer
            .write_record(&row)
            .map_err(|e| Error::csv("objects.csv", e))?;
    }
    finish(writer, "objects.csv")
}
