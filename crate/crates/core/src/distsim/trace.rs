use std::collections::BTreeMap;

use crate::history::{parse_record, render_record, Record, SystemHistory};
use crate::value::Value;

use super::{DistsimError, Topology};

/// One observation: an LSH record and who reported it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub observed_by: String,
    pub record: Record,
    /// Position in the trace.
    pub arrival: usize,
}

/// Reports in arrival order. Every snapshot carries `name` equal to its
/// host, which is what lets remote engines evaluate name-only predicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub reports: Vec<Report>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    /// Everything the trace reports, merged into one history. Repeated
    /// event reports collapse to one.
    pub fn to_history(&self) -> SystemHistory {
        let mut h = SystemHistory::new();
        let mut seen = std::collections::HashSet::new();
        let mut ordered: Vec<&Report> = self.reports.iter().collect();
        ordered.sort_by_key(|r| (r.record.time(), r.arrival));
        for r in ordered {
            match &r.record {
                Record::Snapshot(s) => h.add_snapshot(s.clone()),
                Record::Event(e) => {
                    if seen.insert(e.id.clone()) {
                        h.add_event(e.clone());
                    }
                }
            }
        }
        h
    }

    /// The trace text, one `@tag record` per line in arrival order.
    pub fn render(&self) -> String {
        self.reports
            .iter()
            .map(|r| format!("@{} {}\n", r.observed_by, render_record(&r.record)))
            .collect()
    }
}

/// Parses `@<department-or-host> <LSH record>` lines against a topology.
///
/// Rejected: unknown tags, records naming hosts outside the topology, a
/// snapshot whose `name` differs from its host, two different events
/// sharing an id, and any history the union of the records would not make
/// valid (such as an event before its endpoint's first snapshot).
pub fn parse_trace(text: &str, topo: &Topology) -> Result<Trace, DistsimError> {
    let mut reports = Vec::new();
    let mut events: BTreeMap<String, Record> = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| DistsimError::Trace {
            line: i + 1,
            message: m,
        };
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let rest = body
            .strip_prefix('@')
            .ok_or_else(|| err("expected '@<department-or-host>'".into()))?;
        let (tag, rec) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| err("missing record".into()))?;
        if topo.department_index(tag).is_none() && !topo.is_host(tag) {
            return Err(err(format!("unknown observer '{tag}'")));
        }
        let mut record = parse_record(rec)
            .map_err(err)?
            .ok_or_else(|| err("missing record".into()))?;
        match &mut record {
            Record::Snapshot(s) => {
                if !topo.is_host(&s.object) {
                    return Err(err(format!("unknown host '{}'", s.object)));
                }
                let name = Value::str(s.object.clone());
                match s.attrs.get("name") {
                    Some(v) if *v != name => {
                        return Err(err(format!("name of host '{}' must be the host name", s.object)))
                    }
                    _ => {
                        s.attrs.insert("name".into(), name);
                    }
                }
            }
            Record::Event(e) => {
                for h in [&e.src, &e.dst] {
                    if !topo.is_host(h) {
                        return Err(err(format!("unknown host '{h}'")));
                    }
                }
            }
        }
        if let Record::Event(e) = &record {
            match events.get(&e.id) {
                Some(prev) if *prev != record => {
                    return Err(err(format!("event id '{}' reused for a different event", e.id)));
                }
                Some(_) => {}
                None => {
                    events.insert(e.id.clone(), record.clone());
                }
            }
        }
        let arrival = reports.len();
        reports.push(Report {
            observed_by: tag.to_string(),
            record,
            arrival,
        });
    }
    let trace = Trace { reports };
    trace.to_history().validate().map_err(|e| DistsimError::Trace {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(trace)
}
