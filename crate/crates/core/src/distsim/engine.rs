use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::eval::{eval_pred, merge_all, merge_conds, VarBindings, VarConditions};
use crate::history::{ObjectSnapshot, Record, SystemEvent, SystemGraph, Time};
use crate::lang::{EdgeId, ElementId, Expr, NodeId, PolicyGraph, SemanticPiece};
use crate::matcher::{PartialMatch, PsMap};
use crate::value::{AttrSet, Value};

use super::{
    classify_locality, combine_contingent, ContingentCondition, ContingentMatch, DistsimError, End, Locality, Pool,
    PoolMode, Topology,
};

/// A contingent match of the policy at `policy` in the shared policy list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub policy: usize,
    pub matched: ContingentMatch,
}

/// A violated policy, raised by the engine that completed the match.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alert {
    pub policy: String,
    pub department: String,
    pub matched: PartialMatch,
    pub failed: Vec<ElementId>,
    /// The time step during which the match completed.
    pub time: Time,
}

impl fmt::Display for Alert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<_> = self.failed.iter().map(|e| e.to_string()).collect();
        write!(
            f,
            "{} @{} t={}: {} fails {}",
            self.policy,
            self.department,
            self.time,
            self.matched,
            failed.join(", ")
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutput {
    pub alerts: Vec<Alert>,
    /// Messages for the parent department. Empty at the root.
    pub upward: Vec<Message>,
}

#[derive(Clone, Debug)]
struct PolicyState {
    policy: PolicyGraph,
    locality: Locality,
    pool: Pool,
    alerted: HashSet<(PsMap, VarBindings)>,
}

/// One department's engine.
#[derive(Clone, Debug)]
pub struct EngineState {
    pub department: String,
    has_parent: bool,
    home: BTreeSet<String>,
    scope: BTreeSet<String>,
    policies: Vec<PolicyState>,
    /// Snapshots of home hosts.
    graph: SystemGraph,
    buffer: BTreeMap<Time, Vec<Record>>,
    seen_events: HashSet<String>,
    /// Every time at or below this has been ingested.
    done_through: Option<Time>,
}

fn id_name(host: &str) -> AttrSet {
    let v = Value::str(host);
    AttrSet::from([("id".to_string(), v.clone()), ("name".to_string(), v)])
}

fn needs_local_state(domain: &Expr) -> bool {
    domain.attrs().iter().any(|a| a != "id" && a != "name")
}

impl EngineState {
    pub fn new(topo: &Topology, dept: usize, policies: &[PolicyGraph], mode: PoolMode) -> Self {
        let scope = topo.scope(dept);
        let known: BTreeSet<String> = topo.hosts().map(str::to_string).collect();
        let d = topo.department(dept);
        EngineState {
            department: d.name.clone(),
            has_parent: d.parent.is_some(),
            home: d.hosts.iter().cloned().collect(),
            policies: policies
                .iter()
                .map(|p| PolicyState {
                    policy: p.clone(),
                    locality: classify_locality(p, &scope, &known),
                    pool: Pool::new(p, mode),
                    alerted: HashSet::new(),
                })
                .collect(),
            scope,
            graph: SystemGraph::new(),
            buffer: BTreeMap::new(),
            seen_events: HashSet::new(),
            done_through: None,
        }
    }

    pub fn locality(&self, policy: usize) -> &Locality {
        &self.policies[policy].locality
    }

    pub fn pool(&self, policy: usize) -> &Pool {
        &self.policies[policy].pool
    }

    /// Queues a report. Reports for a time already ingested are rejected.
    pub fn deliver(&mut self, r: Record) -> Result<(), DistsimError> {
        let t = r.time();
        if self.done_through.is_some_and(|d| t <= d) {
            return Err(DistsimError::Late {
                department: self.department.clone(),
                time: t,
            });
        }
        self.buffer.entry(t).or_default().push(r);
        Ok(())
    }

    /// Earliest buffered time, if any.
    pub fn next_time(&self) -> Option<Time> {
        self.buffer.keys().next().copied()
    }

    /// Folds every buffered report up to `upto` into the local state, time
    /// by time, and returns the single-piece contingent matches of the new
    /// elements.
    pub fn ingest_reports(&mut self, upto: Time) -> Result<Vec<Message>, DistsimError> {
        let later = self.buffer.split_off(&(upto + 1));
        let ready = std::mem::replace(&mut self.buffer, later);
        self.done_through = Some(self.done_through.map_or(upto, |d| d.max(upto)));
        let mut out = Vec::new();
        for (_, batch) in ready {
            let mut snaps: BTreeMap<String, ObjectSnapshot> = BTreeMap::new();
            let mut events: BTreeMap<String, SystemEvent> = BTreeMap::new();
            for r in batch {
                match r {
                    Record::Snapshot(s) => match snaps.get_mut(&s.object) {
                        Some(m) => m.attrs.extend(s.attrs),
                        None => {
                            snaps.insert(s.object.clone(), s);
                        }
                    },
                    Record::Event(e) => {
                        if self.seen_events.insert(e.id.clone()) {
                            events.insert(e.id.clone(), e);
                        }
                    }
                }
            }
            let snaps: Vec<ObjectSnapshot> = snaps.into_values().collect();
            self.graph.append(snaps.clone(), Vec::new())?;
            for (i, ps) in self.policies.iter().enumerate() {
                let p = &ps.policy;
                for piece in p.semantic_pieces() {
                    match piece {
                        SemanticPiece::Edge(e) => {
                            for ev in events.values() {
                                if let Some(m) = self.edge_single(p, e, ev) {
                                    out.push(Message { policy: i, matched: m });
                                }
                            }
                        }
                        SemanticPiece::IsolatedNode(n) => {
                            for s in &snaps {
                                if let Some(m) = self.node_single(p, n, s) {
                                    out.push(Message { policy: i, matched: m });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn edge_single(&self, p: &PolicyGraph, e: EdgeId, ev: &SystemEvent) -> Option<ContingentMatch> {
        let pe = p.edge(e);
        if pe.src == pe.dst && ev.src != ev.dst {
            return None;
        }
        let none = VarBindings::new();
        let edge = eval_pred(&pe.domain, &ev.attrs, &none);
        if edge.is_false() {
            return None;
        }
        let mut parts = vec![edge];
        let mut contingents = BTreeSet::new();
        for (end, node, host) in [(End::Source, pe.src, &ev.src), (End::Destination, pe.dst, &ev.dst)] {
            let domain = &p.node(node).domain;
            let attrs = if self.home.contains(host) {
                self.graph.effective_attrs(host, ev.time).ok()?
            } else if needs_local_state(domain) {
                contingents.insert(ContingentCondition { edge: e, end });
                continue;
            } else {
                id_name(host)
            };
            parts.push(eval_pred(domain, &attrs, &none));
        }
        let conds = merge_all(parts.iter());
        if !conds.may_be_sat() {
            return None;
        }
        let mut ps = PsMap::default();
        ps.edge_map.insert(e, ev.id.clone());
        ps.incidental
            .entry(pe.src)
            .or_default()
            .insert((ev.src.clone(), ev.time));
        ps.incidental
            .entry(pe.dst)
            .or_default()
            .insert((ev.dst.clone(), ev.time));
        let mut carried = BTreeMap::new();
        if !pe.requirement.is_true() {
            carried.insert(e, eval_pred(&pe.requirement, &ev.attrs, &none));
        }
        Some(ContingentMatch {
            base: PartialMatch { ps, conds },
            contingents,
            carried,
        })
    }

    fn node_single(&self, p: &PolicyGraph, n: NodeId, s: &ObjectSnapshot) -> Option<ContingentMatch> {
        let attrs = self.graph.effective_attrs(&s.object, s.time).ok()?;
        let conds = eval_pred(&p.node(n).domain, &attrs, &VarBindings::new());
        if !conds.may_be_sat() {
            return None;
        }
        let mut ps = PsMap::default();
        ps.node_map.insert(n, (s.object.clone(), s.time));
        Some(ContingentMatch {
            base: PartialMatch { ps, conds },
            ..ContingentMatch::empty()
        })
    }

    /// Processes new contingent matches, local or from children. Each is
    /// combined with the pool; every result is then alerted on, forwarded,
    /// retained, or dropped.
    pub fn engine_step(&mut self, time: Time, incoming: Vec<Message>) -> StepOutput {
        let mut out = StepOutput::default();
        for msg in incoming {
            let i = msg.policy;
            let m = msg.matched;
            if self.policies[i].pool.contains(&m) {
                continue;
            }
            let mut fresh: Vec<ContingentMatch> = vec![m.clone()];
            let mut seen: HashSet<ContingentMatch> = HashSet::from([m.clone()]);
            for other in self.policies[i].pool.candidates(&m) {
                if let Some(c) = combine_contingent(&m, other) {
                    if !self.policies[i].pool.contains(&c) && seen.insert(c.clone()) {
                        fresh.push(c);
                    }
                }
            }
            for r in fresh {
                self.settle(i, r, time, &mut out);
            }
        }
        out
    }

    fn settle(&mut self, i: usize, m: ContingentMatch, time: Time, out: &mut StepOutput) {
        let ps = &mut self.policies[i];
        let p = &ps.policy;
        if !m.is_contingent() && m.base.is_complete(p) {
            if !m.base.conds.is_true() {
                return;
            }
            let failed = failed_requirements(p, &m);
            if !failed.is_empty() && ps.alerted.insert((m.base.ps.clone(), m.base.conds.bindings.clone())) {
                out.alerts.push(Alert {
                    policy: p.name.clone(),
                    department: self.department.clone(),
                    matched: m.base,
                    failed,
                    time,
                });
            }
            return;
        }
        let pieces = p.semantic_pieces();
        let bound = |piece: &SemanticPiece| match piece {
            SemanticPiece::Edge(e) => m.base.ps.edge_map.contains_key(e),
            SemanticPiece::IsolatedNode(n) => m.base.ps.node_map.contains_key(n),
        };
        if self.has_parent && pieces.iter().filter(|k| ps.locality.must_bind(**k)).all(bound) {
            out.upward.push(Message {
                policy: i,
                matched: m.clone(),
            });
        }
        let only_non_local_left = pieces
            .iter()
            .filter(|k| !bound(k))
            .all(|k| ps.locality.is_non_local(*k));
        let owed_here = m.contingents.iter().any(|c| {
            let pe = p.edge(c.edge);
            let node = if c.end == End::Source { pe.src } else { pe.dst };
            m.base.ps.object_of(node).is_some_and(|h| self.scope.contains(h))
        });
        if only_non_local_left && !owed_here {
            return;
        }
        ps.pool.insert(m);
    }
}

/// Requirement check for a complete match: node requirements against the
/// bindings alone, edge requirements through their carried residuals.
fn failed_requirements(p: &PolicyGraph, m: &ContingentMatch) -> Vec<ElementId> {
    let b = &m.base.conds.bindings;
    let bound = VarConditions::new(b.clone(), Expr::t());
    let mut failed = Vec::new();
    for (id, n) in p.nodes() {
        if !n.requirement.is_true() && !eval_pred(&n.requirement, &AttrSet::new(), b).is_true() {
            failed.push(ElementId::Node(id));
        }
    }
    for (id, e) in p.edges() {
        if e.requirement.is_true() {
            continue;
        }
        let holds = match m.carried.get(&id) {
            Some(c) => merge_conds(c, &bound).is_true(),
            None => false,
        };
        if !holds {
            failed.push(ElementId::Edge(id));
        }
    }
    failed
}
