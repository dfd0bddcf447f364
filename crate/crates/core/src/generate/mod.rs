//! Seeded simulators for the order-to-delivery and shipping-method processes.
//! Both emit gold DOCEL logs; [`flatten_to_ocel`] degrades them to OCEL.

mod flatten;
mod order_to_delivery;
pub mod rng;
mod shipping_method;
pub mod wordlists;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AttributeValue, DocelLog, DynamicAttributeRow, DynamicTable, Event, ObjectInstance, Timestamp,
};
use rng::SimRng;

pub use flatten::{flatten_to_ocel, flatten_to_ocel_with, FlattenStyle};
pub use order_to_delivery::{generate_order_to_delivery, O2DParams};
pub use shipping_method::{generate_shipping_method, ShipParams};

/// Uniform waiting time between consecutive events, in whole seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapRange {
    pub min_secs: u64,
    pub max_secs: u64,
}

impl Default for GapRange {
    /// One minute to two days.
    fn default() -> Self {
        GapRange {
            min_secs: 60,
            max_secs: 2 * 24 * 3600,
        }
    }
}

impl GapRange {
    fn check(&self) -> Result<()> {
        if self.min_secs == 0 || self.min_secs > self.max_secs {
            return Err(Error::InvalidParams(format!(
                "inter_event_gap must satisfy 0 < min_secs <= max_secs, got {}..{}",
                self.min_secs, self.max_secs
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> Duration {
        Duration::seconds(rng.range(self.min_secs, self.max_secs) as i64)
    }
}

pub fn default_start_time() -> Timestamp {
    Utc.with_ymd_and_hms(2023, 5, 1, 8, 0, 0)
        .single()
        .expect("valid constant")
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

pub(crate) fn money(cents: i64) -> AttributeValue {
    AttributeValue::Real(cents as f64 / 100.0)
}

pub(crate) fn kilograms(grams: i64) -> AttributeValue {
    AttributeValue::Real(grams as f64 / 1000.0)
}

/// An event before ids are assigned.
struct PendingEvent {
    timestamp: Timestamp,
    seq: usize,
    activity: &'static str,
    objects: Vec<String>,
    attributes: BTreeMap<String, AttributeValue>,
    changes: Vec<(&'static str, String, AttributeValue)>,
}

/// A per-trace clock: each call to `tick` advances by one sampled gap.
struct Clock {
    now: Timestamp,
}

impl Clock {
    fn tick(&mut self, gap: &GapRange, rng: &mut SimRng) -> Timestamp {
        self.now += gap.sample(rng);
        self.now
    }
}

/// Collects events, objects and dynamic-attribute changes, then assigns event
/// ids in (timestamp, creation) order and value ids per attribute table.
struct LogBuilder {
    events: Vec<PendingEvent>,
    objects: Vec<ObjectInstance>,
    object_types: BTreeSet<String>,
    event_attr_names: BTreeSet<String>,
    dynamic: BTreeMap<String, String>,
    labels: BTreeMap<String, String>,
}

impl LogBuilder {
    fn new(
        object_types: &[&str],
        event_attrs: &[&str],
        dynamic: &[(&str, &str)],
        labels: &BTreeMap<String, String>,
    ) -> Self {
        LogBuilder {
            events: Vec::new(),
            objects: Vec::new(),
            object_types: object_types.iter().map(|s| s.to_string()).collect(),
            event_attr_names: event_attrs.iter().map(|s| s.to_string()).collect(),
            dynamic: dynamic
                .iter()
                .map(|(a, t)| (a.to_string(), t.to_string()))
                .collect(),
            labels: labels.clone(),
        }
    }

    fn object(&mut self, obj: ObjectInstance) {
        self.objects.push(obj);
    }

    fn event(
        &mut self,
        timestamp: Timestamp,
        activity: &'static str,
        objects: &[&str],
    ) -> &mut PendingEvent {
        let seq = self.events.len();
        self.events.push(PendingEvent {
            timestamp,
            seq,
            activity,
            objects: objects.iter().map(|s| s.to_string()).collect(),
            attributes: BTreeMap::new(),
            changes: Vec::new(),
        });
        self.events.last_mut().expect("just pushed")
    }

    fn finish(mut self) -> DocelLog {
        self.events
            .sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then(a.seq.cmp(&b.seq)));
        // keep timestamps strictly increasing so (ts, eid) order equals creation order
        for i in 1..self.events.len() {
            let prev = self.events[i - 1].timestamp;
            if self.events[i].timestamp <= prev {
                self.events[i].timestamp = prev + Duration::seconds(1);
            }
        }

        let mut tables: BTreeMap<String, DynamicTable> = self
            .dynamic
            .iter()
            .map(|(a, t)| {
                (
                    a.clone(),
                    DynamicTable {
                        object_type: t.clone(),
                        rows: Vec::new(),
                    },
                )
            })
            .collect();

        let mut events = Vec::with_capacity(self.events.len());
        for (i, p) in self.events.into_iter().enumerate() {
            let eid = format!("e{}", i + 1);
            for (attr, oid, value) in p.changes {
                let table = tables.get_mut(attr).expect("change on a registered attribute");
                let vid = crate::assign::value_id(table.rows.len() + 1);
                table.rows.push(DynamicAttributeRow {
                    vid,
                    eid: eid.clone(),
                    oid,
                    name: attr.to_string(),
                    value,
                });
            }
            let activity = self
                .labels
                .get(p.activity)
                .cloned()
                .unwrap_or_else(|| p.activity.to_string());
            events.push(Event {
                eid,
                activity,
                timestamp: p.timestamp,
                objects: p.objects.into_iter().collect(),
                attributes: p.attributes,
            });
        }

        DocelLog {
            events,
            objects: self
                .objects
                .into_iter()
                .map(|o| (o.oid.clone(), o))
                .collect(),
            object_types: self.object_types,
            event_attr_names: self.event_attr_names,
            dynamic_tables: tables,
        }
    }
}

impl PendingEvent {
    fn attr(&mut self, name: &str, value: impl Into<AttributeValue>) -> &mut Self {
        self.attributes.insert(name.to_string(), value.into());
        self
    }

    fn change(&mut self, attr: &'static str, oid: &str, value: AttributeValue) -> &mut Self {
        self.changes.push((attr, oid.to_string(), value));
        self
    }
}
