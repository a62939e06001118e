//! The system model: object snapshots and events grouped into time-ordered
//! instances, the graph view used by matching, and the LSH text format.

mod graph;
mod lsh;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::value::{AttrSet, Value};

pub use graph::{build_system_graph, EdgeIdx, GraphEdge, GraphNode, NodeIdx, SystemGraph};
pub use lsh::{parse_history, parse_record, render_history, render_record, render_value, Record};

/// A point in time. Only the order matters.
pub type Time = i64;

/// The state of one object at one time. `attrs` always holds `id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectSnapshot {
    pub object: String,
    pub time: Time,
    pub attrs: AttrSet,
}

impl ObjectSnapshot {
    /// Builds a snapshot, adding the `id` attribute.
    pub fn new(object: impl Into<String>, time: Time, mut attrs: AttrSet) -> Self {
        let object = object.into();
        attrs.insert("id".into(), Value::str(object.clone()));
        ObjectSnapshot { object, time, attrs }
    }
}

/// An event from `src` to `dst`. `attrs` always holds `id` and `time`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemEvent {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub time: Time,
    pub attrs: AttrSet,
}

impl SystemEvent {
    /// Builds an event, adding the `id` and `time` attributes.
    pub fn new(
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
        time: Time,
        mut attrs: AttrSet,
    ) -> Self {
        let id = id.into();
        attrs.insert("id".into(), Value::str(id.clone()));
        attrs.insert("time".into(), Value::int(time));
        SystemEvent {
            id,
            src: src.into(),
            dst: dst.into(),
            time,
            attrs,
        }
    }
}

/// Everything recorded at one time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub snapshots: Vec<ObjectSnapshot>,
    pub events: Vec<SystemEvent>,
}

impl Instance {
    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty() && self.events.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate event id '{0}'")]
    DuplicateEvent(String),
    #[error("event '{event}' refers to object '{object}' which has no snapshot at or before time {time}")]
    UnknownEndpoint { event: String, object: String, time: Time },
    #[error("object '{object}' has no snapshot at or before time {time}")]
    NoSnapshot { object: String, time: Time },
    #[error("object '{object}' already has a snapshot at time {time}")]
    DuplicateSnapshot { object: String, time: Time },
}

/// A time-ordered sequence of instances.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SystemHistory {
    instances: BTreeMap<Time, Instance>,
}

impl SystemHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a snapshot. A second snapshot of the same object at the same
    /// time is merged into the first, later attribute values winning.
    pub fn add_snapshot(&mut self, s: ObjectSnapshot) {
        let inst = self.instances.entry(s.time).or_default();
        match inst.snapshots.iter_mut().find(|o| o.object == s.object) {
            Some(existing) => existing.attrs.extend(s.attrs),
            None => inst.snapshots.push(s),
        }
    }

    pub fn add_event(&mut self, e: SystemEvent) {
        self.instances.entry(e.time).or_default().events.push(e);
    }

    /// Checks that event ids are unique and every event endpoint has a
    /// snapshot at or before the event.
    pub fn validate(&self) -> Result<(), HistoryError> {
        let mut ids = BTreeSet::new();
        let mut first_seen: BTreeMap<&str, Time> = BTreeMap::new();
        for (&t, inst) in &self.instances {
            for s in &inst.snapshots {
                first_seen.entry(&s.object).or_insert(t);
            }
        }
        for e in self.events() {
            if !ids.insert(e.id.as_str()) {
                return Err(HistoryError::DuplicateEvent(e.id.clone()));
            }
            for obj in [&e.src, &e.dst] {
                if first_seen.get(obj.as_str()).is_none_or(|&t| t > e.time) {
                    return Err(HistoryError::UnknownEndpoint {
                        event: e.id.clone(),
                        object: obj.clone(),
                        time: e.time,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn instances(&self) -> impl Iterator<Item = (Time, &Instance)> {
        self.instances.iter().map(|(&t, i)| (t, i))
    }

    pub fn instance(&self, t: Time) -> Option<&Instance> {
        self.instances.get(&t)
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &ObjectSnapshot> {
        self.instances.values().flat_map(|i| i.snapshots.iter())
    }

    pub fn events(&self) -> impl Iterator<Item = &SystemEvent> {
        self.instances.values().flat_map(|i| i.events.iter())
    }
}
