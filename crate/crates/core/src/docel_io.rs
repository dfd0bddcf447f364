//! DOCEL logs on disk: a directory holding `manifest.json`, `events.csv`,
//! one `objects_<type>.csv` per object type and one `dyn_<attr>.csv` per
//! dynamic attribute.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttributeValue, DocelLog, DynamicAttributeRow, DynamicTable, unify_kinds};
use crate::ocel_io::{
    read_events_table, read_objects_table, unify_object_kinds, write_events_table,
    write_objects_table, COL_OBJECT_ID,
};

pub const DOCEL_VERSION: &str = "1.0";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const EVENTS_FILE: &str = "events.csv";

pub const COL_VALUE_ID: &str = "ValueID";
pub const COL_EVENT_ID: &str = "EventID";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub docel_version: String,
    pub object_types: Vec<String>,
    pub dynamic_attributes: BTreeMap<String, String>,
    pub event_attributes: Vec<String>,
}

impl Manifest {
    pub fn for_log(log: &DocelLog) -> Self {
        Manifest {
            docel_version: DOCEL_VERSION.to_string(),
            object_types: log.object_types.iter().cloned().collect(),
            dynamic_attributes: log.registry(),
            event_attributes: log.event_attr_names.iter().cloned().collect(),
        }
    }
}

/// What [`write_docel`] put on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleSummary {
    pub manifest: Manifest,
    pub events: usize,
    pub objects: usize,
    pub dynamic_rows: BTreeMap<String, usize>,
}

/// Escapes a name for use inside a file name. Characters outside
/// `[A-Za-z0-9 _.-]` become `%XX` per UTF-8 byte.
pub fn file_component(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() || matches!(ch, ' ' | '_' | '-' | '.') {
            out.push(ch);
        } else {
            let mut buf = [0u8; 4];
            for b in ch.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        }
    }
    out
}

pub fn objects_file(object_type: &str) -> String {
    format!("objects_{}.csv", file_component(object_type))
}

pub fn dynamic_file(attr: &str) -> String {
    format!("dyn_{}.csv", file_component(attr))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_file(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    match fs::read(&path) {
        Ok(b) => Ok(b),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingTable(name.to_string()))
        }
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Rows of one table in the order of their referenced events.
fn rows_in_event_order<'a>(
    table: &'a DynamicTable,
    position: &HashMap<&str, usize>,
) -> Vec<&'a DynamicAttributeRow> {
    let mut rows: Vec<&DynamicAttributeRow> = table.rows.iter().collect();
    rows.sort_by_key(|r| position.get(r.eid.as_str()).copied().unwrap_or(usize::MAX));
    rows
}

/// Writes `log` as a bundle into `dest`, creating the directory if needed.
pub fn write_docel(log: &DocelLog, dest: &Path) -> Result<BundleSummary> {
    fs::create_dir_all(dest).map_err(|e| Error::io(dest, e))?;
    let manifest = Manifest::for_log(log);

    let manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    write_file(&dest.join(MANIFEST_FILE), &manifest_bytes)?;

    let events = write_events_table(
        &log.events,
        &log.object_types,
        &log.event_attr_names,
        &log.objects,
    )?;
    write_file(&dest.join(EVENTS_FILE), &events)?;

    for t in &log.object_types {
        let bytes = write_objects_table(
            log.objects.values().filter(|o| &o.object_type == t),
            false,
        )?;
        write_file(&dest.join(objects_file(t)), &bytes)?;
    }

    let mut sorted_events: Vec<_> = log.events.iter().collect();
    sorted_events.sort_by(|a, b| a.order(b));
    let position: HashMap<&str, usize> = sorted_events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.eid.as_str(), i))
        .collect();

    let mut dynamic_rows = BTreeMap::new();
    for (attr, table) in &log.dynamic_tables {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let file = dynamic_file(attr);
        writer
            .write_record([COL_VALUE_ID, COL_OBJECT_ID, COL_EVENT_ID, attr.as_str()])
            .map_err(|e| Error::csv(&file, e))?;
        for row in rows_in_event_order(table, &position) {
            writer
                .write_record([
                    row.vid.as_str(),
                    row.oid.as_str(),
                    row.eid.as_str(),
                    row.value.canonical().as_str(),
                ])
                .map_err(|e| Error::csv(&file, e))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::io(dest.join(&file), e.into_error()))?;
        write_file(&dest.join(&file), &bytes)?;
        dynamic_rows.insert(attr.clone(), table.rows.len());
    }

    Ok(BundleSummary {
        manifest,
        events: log.events.len(),
        objects: log.objects.len(),
        dynamic_rows,
    })
}

/// Reads a bundle written by [`write_docel`] (or laid out the same way).
pub fn read_docel(src: &Path) -> Result<DocelLog> {
    let manifest: Manifest = serde_json::from_slice(&read_file(src, MANIFEST_FILE)?)?;
    let object_types: BTreeSet<String> = manifest.object_types.iter().cloned().collect();

    for (attr, t) in &manifest.dynamic_attributes {
        if !object_types.contains(t) {
            return Err(Error::ManifestMismatch(format!(
                "dynamic attribute `{attr}` is bound to undeclared type `{t}`"
            )));
        }
    }
    let expected: BTreeSet<String> = manifest
        .dynamic_attributes
        .keys()
        .map(|a| dynamic_file(a))
        .collect();
    let entries = fs::read_dir(src).map_err(|e| Error::io(src, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(src, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with("dyn_") && name.ends_with(".csv") && !expected.contains(&name) {
            return Err(Error::ManifestMismatch(format!(
                "dynamic table `{name}` is not registered in the manifest"
            )));
        }
    }

    let mut objects = Vec::new();
    for t in &object_types {
        let file = objects_file(t);
        objects.extend(read_objects_table(&read_file(src, &file)?, &file, Some(t))?);
    }
    unify_object_kinds(objects.iter_mut());
    let mut object_map = BTreeMap::new();
    for o in objects {
        if object_map.contains_key(&o.oid) {
            return Err(Error::DuplicateObjectId(o.oid));
        }
        object_map.insert(o.oid.clone(), o);
    }

    let table = read_events_table(
        &read_file(src, EVENTS_FILE)?,
        EVENTS_FILE,
        &object_types,
        &object_map,
    )?;
    let mut event_attr_names: BTreeSet<String> =
        manifest.event_attributes.iter().cloned().collect();
    event_attr_names.extend(table.attribute_columns.iter().cloned());
    if let Some(clash) = manifest
        .dynamic_attributes
        .keys()
        .find(|a| event_attr_names.contains(*a))
    {
        return Err(Error::ManifestMismatch(format!(
            "`{clash}` is registered both as dynamic and as event attribute"
        )));
    }

    let events_by_id: HashMap<&str, &crate::model::Event> =
        table.events.iter().map(|e| (e.eid.as_str(), e)).collect();

    let mut dynamic_tables = BTreeMap::new();
    for (attr, t) in &manifest.dynamic_attributes {
        let file = dynamic_file(attr);
        let bytes = read_file(src, &file)?;
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let headers = reader.headers().map_err(|e| Error::csv(&file, e))?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingHeader {
                    file: file.clone(),
                    header: name.to_string(),
                })
        };
        let (vid_col, oid_col, eid_col, val_col) =
            (col(COL_VALUE_ID)?, col(COL_OBJECT_ID)?, col(COL_EVENT_ID)?, col(attr)?);

        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::csv(&file, e))?;
            let (vid, oid, eid) = (&record[vid_col], &record[oid_col], &record[eid_col]);
            let Some(event) = events_by_id.get(eid) else {
                return Err(Error::ReferentialIntegrity(format!(
                    "{file}: row `{vid}` cites unknown event `{eid}`"
                )));
            };
            match object_map.get(oid) {
                None => {
                    return Err(Error::ReferentialIntegrity(format!(
                        "{file}: row `{vid}` cites unknown object `{oid}`"
                    )))
                }
                Some(o) if &o.object_type != t => {
                    return Err(Error::ReferentialIntegrity(format!(
                        "{file}: row `{vid}` cites `{oid}` of type `{}`, expected `{t}`",
                        o.object_type
                    )))
                }
                Some(_) => {}
            }
            if !event.objects.contains(oid) {
                return Err(Error::ReferentialIntegrity(format!(
                    "{file}: row `{vid}` pairs event `{eid}` with unreferenced object `{oid}`"
                )));
            }
            let value = AttributeValue::infer(&record[val_col]).ok_or_else(|| {
                Error::InvalidValue {
                    path: format!("{file}/{vid}"),
                    reason: "empty value cell".to_string(),
                }
            })?;
            rows.push(DynamicAttributeRow {
                vid: vid.to_string(),
                eid: eid.to_string(),
                oid: oid.to_string(),
                name: attr.clone(),
                value,
            });
        }
        unify_kinds(rows.iter_mut().map(|r| &mut r.value));
        dynamic_tables.insert(
            attr.clone(),
            DynamicTable {
                object_type: t.clone(),
                rows,
            },
        );
    }

    Ok(DocelLog {
        events: table.events,
        objects: object_map,
        object_types,
        event_attr_names,
        dynamic_tables,
    })
}
