//! Dynamic object attribute detection.
//!
//! For every event attribute this decides whether it actually describes an
//! object of some type. A type is a candidate when every occurrence of the
//! attribute is accompanied by exactly one instance of that type and the
//! attribute is seen to change within the lifecycle of some instance. Several
//! candidates are narrowed first by 1:N relations between the candidate types
//! and then by name similarity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AttributeValue, Match, MatchMethod, OcelLog};
use crate::similarity::{LexicalSimilarity, SimilarityProvider};

pub const DEFAULT_TAU: f64 = 0.1;

pub const DEFAULT_RESERVED_NAMES: [&str; 4] =
    ["resource", "org:resource", "org:role", "lifecycle:transition"];

#[derive(Debug, Clone)]
pub struct DetectorConfig {
    /// Margin by which the best name score must beat every other candidate.
    pub tau: f64,
    /// Attribute names never matched, compared case-insensitively.
    pub reserved_names: BTreeSet<String>,
    pub similarity: Arc<dyn SimilarityProvider>,
    pub name_matching_enabled: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            tau: DEFAULT_TAU,
            reserved_names: DEFAULT_RESERVED_NAMES.iter().map(|s| s.to_string()).collect(),
            similarity: Arc::new(LexicalSimilarity),
            name_matching_enabled: true,
        }
    }
}

impl DetectorConfig {
    pub fn is_reserved(&self, attr: &str) -> bool {
        self.reserved_names
            .iter()
            .any(|r| r.to_lowercase() == attr.to_lowercase())
    }

    pub fn with_reserved<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.reserved_names = names.into_iter().map(Into::into).collect();
        self
    }

    pub fn without_name_matching(mut self) -> Self {
        self.name_matching_enabled = false;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be non-negative, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Outcome of the checks for one (attribute, object type) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TypeAudit {
    pub cooccurrence: bool,
    /// `None` when co-occurrence already failed.
    pub changes: Option<bool>,
    pub removed_by_relation: bool,
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub attr: String,
    pub candidates: BTreeSet<String>,
    pub audit: BTreeMap<String, TypeAudit>,
}

/// Per-attribute trace of the detection run, as written by `--report`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeReport {
    pub attr: String,
    pub object_type: Option<String>,
    pub method: Option<MatchMethod>,
    pub reserved: bool,
    pub candidates: BTreeSet<String>,
    pub after_relation: BTreeSet<String>,
    /// Types that satisfy co-occurrence but never show a change.
    pub static_for: BTreeSet<String>,
    pub audit: BTreeMap<String, TypeAudit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub matches: Vec<Match>,
    pub reports: Vec<AttributeReport>,
}

/// Objects of each event grouped by type, built once per log.
struct TypeIndex<'a> {
    log: &'a OcelLog,
    per_event: Vec<HashMap<&'a str, Vec<&'a str>>>,
}

impl<'a> TypeIndex<'a> {
    fn new(log: &'a OcelLog) -> Self {
        let per_event = log
            .events
            .iter()
            .map(|e| {
                let mut by_type: HashMap<&str, Vec<&str>> = HashMap::new();
                for oid in &e.objects {
                    if let Some(t) = log.object_type_of(oid) {
                        by_type.entry(t).or_default().push(oid.as_str());
                    }
                }
                by_type
            })
            .collect();
        TypeIndex { log, per_event }
    }

    fn instances(&self, event: usize, object_type: &str) -> &[&'a str] {
        self.per_event[event]
            .get(object_type)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    fn occurrences<'s>(
        &'s self,
        attr: &'s str,
    ) -> impl Iterator<Item = (usize, &'a AttributeValue)> + 's {
        self.log
            .events
            .iter()
            .enumerate()
            .filter_map(move |(i, e)| e.attributes.get(attr).map(|v| (i, v)))
    }

    fn cooccurs(&self, attr: &str, object_type: &str) -> bool {
        let mut seen = false;
        for (i, _) in self.occurrences(attr) {
            if self.instances(i, object_type).len() != 1 {
                return false;
            }
            seen = true;
        }
        seen
    }

    fn changes(&self, attr: &str, object_type: &str) -> bool {
        let mut first: HashMap<&str, &AttributeValue> = HashMap::new();
        for (i, v) in self.occurrences(attr) {
            if let [oid] = self.instances(i, object_type) {
                match first.get(oid) {
                    Some(prev) if *prev != v => return true,
                    Some(_) => {}
                    None => {
                        first.insert(oid, v);
                    }
                }
            }
        }
        false
    }

    /// True when some instance of `object_type` appears, anywhere in the log,
    /// together with two different instances of `other`.
    fn one_to_many(&self, object_type: &str, other: &str) -> bool {
        let mut partner: HashMap<&str, &str> = HashMap::new();
        for i in 0..self.per_event.len() {
            let others = self.instances(i, other);
            if others.is_empty() {
                continue;
            }
            for oid in self.instances(i, object_type) {
                for o in others {
                    match partner.get(oid) {
                        Some(p) if p != o => return true,
                        Some(_) => {}
                        None => {
                            partner.insert(oid, o);
                        }
                    }
                }
            }
        }
        false
    }
}

fn check_known(log: &OcelLog, attr: &str, object_type: &str) -> Result<()> {
    if !log.event_attr_names.contains(attr) {
        return Err(Error::UnknownAttribute(attr.to_string()));
    }
    if !log.object_types.contains(object_type) {
        return Err(Error::UnknownObjectType(object_type.to_string()));
    }
    Ok(())
}

/// True iff every event carrying `attr` references exactly one instance of
/// `object_type`. False when `attr` never occurs.
pub fn check_cooccurrence(log: &OcelLog, attr: &str, object_type: &str) -> Result<bool> {
    check_known(log, attr, object_type)?;
    Ok(TypeIndex::new(log).cooccurs(attr, object_type))
}

/// True iff two events referencing the same instance of `object_type` carry
/// different values for `attr`. Requires co-occurrence to hold.
pub fn check_changes(log: &OcelLog, attr: &str, object_type: &str) -> Result<bool> {
    check_known(log, attr, object_type)?;
    let index = TypeIndex::new(log);
    if !index.cooccurs(attr, object_type) {
        return Err(Error::PreconditionViolated(format!(
            "`{attr}` does not co-occur with exactly one `{object_type}`"
        )));
    }
    Ok(index.changes(attr, object_type))
}

fn candidates_with(index: &TypeIndex<'_>, attr: &str) -> CandidateSet {
    let mut audit = BTreeMap::new();
    let mut candidates = BTreeSet::new();
    for t in &index.log.object_types {
        let cooccurrence = index.cooccurs(attr, t);
        let changes = cooccurrence.then(|| index.changes(attr, t));
        if changes == Some(true) {
            candidates.insert(t.clone());
        }
        audit.insert(
            t.clone(),
            TypeAudit {
                cooccurrence,
                changes,
                ..TypeAudit::default()
            },
        );
    }
    CandidateSet {
        attr: attr.to_string(),
        candidates,
        audit,
    }
}

/// Object types passing both the co-occurrence and the observed-change check.
pub fn candidate_types(log: &OcelLog, attr: &str, cfg: &DetectorConfig) -> Result<CandidateSet> {
    if cfg.is_reserved(attr) {
        return Err(Error::ReservedAttribute(attr.to_string()));
    }
    Ok(candidates_with(&TypeIndex::new(log), attr))
}

fn relation_with(index: &TypeIndex<'_>, cs: &CandidateSet) -> CandidateSet {
    let mut out = cs.clone();
    if cs.candidates.len() < 2 {
        return out;
    }
    let removed: BTreeSet<String> = cs
        .candidates
        .iter()
        .filter(|t| {
            cs.candidates
                .iter()
                .filter(|o| o != t)
                .any(|o| index.one_to_many(t, o))
        })
        .cloned()
        .collect();
    if removed.len() == cs.candidates.len() {
        // mutual 1:N evidence decides nothing
        return out;
    }
    for t in &removed {
        out.candidates.remove(t);
        out.audit.entry(t.clone()).or_default().removed_by_relation = true;
    }
    out
}

/// Drops every candidate type one of whose instances co-occurs with two
/// different instances of another candidate type. If that would drop all of
/// them, the set is returned unchanged.
pub fn relation_disambiguate(log: &OcelLog, cs: &CandidateSet) -> CandidateSet {
    relation_with(&TypeIndex::new(log), cs)
}

/// Picks the candidate whose name is more similar to `attr` than every other
/// candidate by more than `cfg.tau`, if there is one.
pub fn name_disambiguate(
    attr: &str,
    cs: &mut CandidateSet,
    cfg: &DetectorConfig,
) -> Result<Option<String>> {
    if !cfg.name_matching_enabled || cs.candidates.is_empty() {
        return Ok(None);
    }
    let mut scores = Vec::with_capacity(cs.candidates.len());
    for t in &cs.candidates {
        let s = cfg.similarity.similarity(attr, t)?;
        cs.audit.entry(t.clone()).or_default().similarity = Some(s);
        scores.push((t, s));
    }
    let winner = scores.iter().find(|(t, s)| {
        scores
            .iter()
            .filter(|(o, _)| o != t)
            .all(|(_, other)| *s > other + cfg.tau)
    });
    Ok(winner.map(|(t, _)| (*t).clone()))
}

fn detect_attribute(
    index: &TypeIndex<'_>,
    attr: &str,
    cfg: &DetectorConfig,
) -> Result<AttributeReport> {
    let initial = candidates_with(index, attr);
    let static_for = initial
        .audit
        .iter()
        .filter(|(_, a)| a.changes == Some(false))
        .map(|(t, _)| t.clone())
        .collect();

    let (mut narrowed, outcome) = match initial.candidates.len() {
        0 => (initial.clone(), None),
        1 => {
            let t = initial.candidates.iter().next().cloned();
            (initial.clone(), t.map(|t| (t, MatchMethod::UniqueCandidate)))
        }
        _ => {
            let narrowed = relation_with(index, &initial);
            if narrowed.candidates.len() == 1 {
                let t = narrowed.candidates.iter().next().cloned();
                (narrowed, t.map(|t| (t, MatchMethod::RelationBased)))
            } else {
                (narrowed, None)
            }
        }
    };
    let after_relation = narrowed.candidates.clone();
    let outcome = match outcome {
        Some(o) => Some(o),
        None if narrowed.candidates.len() > 1 => {
            name_disambiguate(attr, &mut narrowed, cfg)?.map(|t| (t, MatchMethod::NameBased))
        }
        None => None,
    };

    Ok(AttributeReport {
        attr: attr.to_string(),
        object_type: outcome.as_ref().map(|(t, _)| t.clone()),
        method: outcome.as_ref().map(|(_, m)| *m),
        reserved: false,
        candidates: initial.candidates,
        after_relation,
        static_for,
        audit: narrowed.audit,
    })
}

/// Runs detection over every event attribute and keeps the full trace.
pub fn detect(log: &OcelLog, cfg: &DetectorConfig) -> Result<Detection> {
    cfg.check()?;
    let index = TypeIndex::new(log);
    let mut matches = Vec::new();
    let mut reports = Vec::new();
    for attr in &log.event_attr_names {
        if cfg.is_reserved(attr) {
            reports.push(AttributeReport {
                attr: attr.clone(),
                object_type: None,
                method: None,
                reserved: true,
                candidates: BTreeSet::new(),
                after_relation: BTreeSet::new(),
                static_for: BTreeSet::new(),
                audit: BTreeMap::new(),
            });
            continue;
        }
        let report = detect_attribute(&index, attr, cfg)?;
        if let (Some(t), Some(m)) = (&report.object_type, report.method) {
            matches.push(Match::new(attr.clone(), t.clone(), m));
        }
        reports.push(report);
    }
    Ok(Detection { matches, reports })
}

/// The match set: at most one match per attribute, ordered by attribute name.
pub fn detect_matches(log: &OcelLog, cfg: &DetectorConfig) -> Result<Vec<Match>> {
    detect(log, cfg).map(|d| d.matches)
}
