//! The two-order running example: six events over orders and items with an
//! order `Value` that changes once for `o1`. Dates carry year 2023.

use chrono::{TimeZone, Utc};

use crate::model::{Event, ObjectInstance, OcelLog, Timestamp};

fn at(month: u32, day: u32, hour: u32, minute: u32) -> Timestamp {
    Utc.with_ymd_and_hms(2023, month, day, hour, minute, 0)
        .single()
        .expect("fixture timestamps are valid")
}

pub fn running_example() -> OcelLog {
    let events = vec![
        Event::new("e1", "Create order", at(5, 20, 9, 7))
            .with_objects(["o1", "i1", "i2"])
            .with_attr("Value", 100i64),
        Event::new("e2", "Pick items", at(5, 23, 14, 20))
            .with_objects(["o1", "i1", "i2"])
            .with_attr("Value", 100i64),
        Event::new("e3", "Create order", at(6, 3, 19, 17))
            .with_objects(["o2", "i3"])
            .with_attr("Value", 60i64),
        Event::new("e4", "Pick items", at(6, 4, 15, 20))
            .with_objects(["o2", "i3"])
            .with_attr("Value", 60i64),
        Event::new("e5", "Update order", at(6, 4, 18, 11))
            .with_objects(["o1", "i1"])
            .with_attr("Value", 70i64),
        Event::new("e6", "Remove item", at(6, 5, 11, 48))
            .with_objects(["o1", "i2"])
            .with_attr("Value", 70i64),
    ];
    let objects = [
        ObjectInstance::new("o1", "Orders"),
        ObjectInstance::new("o2", "Orders"),
        ObjectInstance::new("i1", "Items").with_attr("Weight", 24i64),
        ObjectInstance::new("i2", "Items").with_attr("Weight", 99i64),
        ObjectInstance::new("i3", "Items").with_attr("Weight", 10i64),
    ];
    OcelLog::new(events, objects)
}
