//! Hierarchical enforcement over a tree of department engines.
//!
//! Each host belongs to one department. Snapshots go to the host's
//! department; events go to the departments of both endpoints. An engine
//! that sees an event but not one endpoint's state records that endpoint as
//! owed (a [`ContingentCondition`]) unless the node predicate only needs
//! `id` and `name`. Matches travel towards the root, combining in each
//! engine's pool, until one is complete and owes nothing; then its
//! requirements are checked and an [`Alert`] raised if any fail.

mod contingent;
mod engine;
mod locality;
mod pool;
mod topology;
mod trace;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::history::{HistoryError, Record, Time};
use crate::lang::PolicyGraph;
use crate::matcher::MatchError;

pub use contingent::{combine_contingent, ContingentCondition, ContingentMatch, End};
pub use engine::{Alert, EngineState, Message, StepOutput};
pub use locality::{anchored_host, classify_locality, EdgeLocality, Locality, NodeLocality};
pub use pool::{Pool, PoolMode};
pub use topology::{parse_topology, Department, Topology};
pub use trace::{parse_trace, Report, Trace};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DistsimError {
    #[error("topology: {0}")]
    Topology(String),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error("department '{department}' got a report for time {time} after processing it")]
    Late { department: String, time: Time },
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Departments that should receive a record.
pub fn recipients(topo: &Topology, r: &Record) -> BTreeSet<usize> {
    let hosts: Vec<&str> = match r {
        Record::Snapshot(s) => vec![&s.object],
        Record::Event(e) => vec![&e.src, &e.dst],
    };
    hosts.into_iter().filter_map(|h| topo.home_of(h)).collect()
}

/// Runs every engine over the trace and returns the alerts in the order
/// raised.
///
/// Reports are buffered per engine first, so arrival order does not
/// matter. Then, one time step at a time, each engine ingests that step's
/// reports and messages are passed up until no engine has work left.
/// Engines take turns in department-name order.
pub fn run_simulation(
    topo: &Topology,
    policies: &[PolicyGraph],
    trace: &Trace,
    mode: PoolMode,
) -> Result<Vec<Alert>, DistsimError> {
    for p in policies {
        crate::matcher::ensure_lint_clean(p)?;
    }
    let mut engines: Vec<EngineState> = (0..topo.departments().len())
        .map(|d| EngineState::new(topo, d, policies, mode))
        .collect();
    let mut order: Vec<usize> = (0..engines.len()).collect();
    order.sort_by(|&a, &b| topo.department(a).name.cmp(&topo.department(b).name));

    let mut times = BTreeSet::new();
    for r in &trace.reports {
        times.insert(r.record.time());
        for d in recipients(topo, &r.record) {
            engines[d].deliver(r.record.clone())?;
        }
    }

    let mut alerts = Vec::new();
    for t in times {
        let mut inbox: Vec<Vec<Message>> = vec![Vec::new(); engines.len()];
        for &d in &order {
            inbox[d] = engines[d].ingest_reports(t)?;
        }
        loop {
            let mut idle = true;
            for &d in &order {
                if inbox[d].is_empty() {
                    continue;
                }
                idle = false;
                let msgs = std::mem::take(&mut inbox[d]);
                let out = engines[d].engine_step(t, msgs);
                alerts.extend(out.alerts);
                if let Some(parent) = topo.department(d).parent {
                    inbox[parent].extend(out.upward);
                }
            }
            if idle {
                break;
            }
        }
    }
    Ok(alerts)
}
