//! Detection of dynamic object attributes in object-centric event logs and
//! conversion to the data-aware DOCEL format, with synthetic log generators
//! and an evaluation harness.

pub mod assign;
pub mod detect;
pub mod docel_io;
pub mod error;
pub mod evaluate;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod ocel_io;
pub mod similarity;

pub use assign::transform;
pub use detect::{detect, detect_matches, DetectorConfig};
pub use error::{Error, Result};
pub use model::{
    AttributeValue, DocelLog, DynamicAttributeRow, DynamicTable, Event, Match, MatchMethod,
    ObjectInstance, OcelLog, Timestamp, ValueKind,
};

/// Detects dynamic attributes and moves them into value tables.
pub fn convert(log: &OcelLog, cfg: &DetectorConfig) -> Result<(DocelLog, Vec<Match>)> {
    let matches = detect_matches(log, cfg)?;
    let docel = transform(log, &matches)?;
    Ok((docel, matches))
}
