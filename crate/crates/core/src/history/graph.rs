use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::RangeInclusive;

use crate::value::AttrSet;

use super::{HistoryError, Instance, ObjectSnapshot, SystemEvent, SystemHistory, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIdx(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIdx(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphNode {
    pub snapshot: ObjectSnapshot,
    pub epoch: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub event: SystemEvent,
    pub epoch: u64,
}

/// The graph view of a history: snapshots as nodes, events as edges. Grows
/// only by [`SystemGraph::append`]; each non-empty append opens a new epoch
/// and stamps its items with it.
#[derive(Clone, Debug, Default)]
pub struct SystemGraph {
    nodes: Vec<GraphNode>,
    edges: Vec<GraphEdge>,
    // node indices per object, ordered by time
    by_object: HashMap<String, Vec<NodeIdx>>,
    by_event: HashMap<String, EdgeIdx>,
    epoch: u64,
}

/// Builds the graph of all snapshots and events whose time lies in `times`
/// (all of them if `None`), at epoch 0.
pub fn build_system_graph(h: &SystemHistory, times: Option<RangeInclusive<Time>>) -> SystemGraph {
    let mut g = SystemGraph::new();
    for (t, inst) in h.instances() {
        if times.as_ref().is_some_and(|r| !r.contains(&t)) {
            continue;
        }
        for s in &inst.snapshots {
            g.insert_node(s.clone(), 0);
        }
        for e in &inst.events {
            g.insert_edge(e.clone(), 0);
        }
    }
    g
}

impl SystemGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// The epoch of the most recent non-empty append (0 before any).
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Adds a batch under a fresh epoch and returns it. An empty batch is a
    /// no-op returning the current epoch. Snapshots of one object at one
    /// time within the batch are merged. The batch is rejected as a whole
    /// on a duplicate event id, a snapshot clashing with an existing one,
    /// or an event endpoint with no snapshot anywhere.
    pub fn append(&mut self, snapshots: Vec<ObjectSnapshot>, events: Vec<SystemEvent>) -> Result<u64, HistoryError> {
        if snapshots.is_empty() && events.is_empty() {
            return Ok(self.epoch);
        }
        let mut merged: BTreeMap<(String, Time), ObjectSnapshot> = BTreeMap::new();
        for s in snapshots {
            if self.snapshot_at(&s.object, s.time).is_some() {
                return Err(HistoryError::DuplicateSnapshot {
                    object: s.object,
                    time: s.time,
                });
            }
            match merged.get_mut(&(s.object.clone(), s.time)) {
                Some(m) => m.attrs.extend(s.attrs),
                None => {
                    merged.insert((s.object.clone(), s.time), s);
                }
            }
        }
        let batch_objects: HashSet<&str> = merged.keys().map(|(o, _)| o.as_str()).collect();
        let mut batch_events = HashSet::new();
        for e in &events {
            if self.by_event.contains_key(&e.id) || !batch_events.insert(e.id.as_str()) {
                return Err(HistoryError::DuplicateEvent(e.id.clone()));
            }
            for obj in [&e.src, &e.dst] {
                if !self.by_object.contains_key(obj) && !batch_objects.contains(obj.as_str()) {
                    return Err(HistoryError::UnknownEndpoint {
                        event: e.id.clone(),
                        object: obj.clone(),
                        time: e.time,
                    });
                }
            }
        }
        self.epoch += 1;
        let epoch = self.epoch;
        for s in merged.into_values() {
            self.insert_node(s, epoch);
        }
        for e in events {
            self.insert_edge(e, epoch);
        }
        Ok(epoch)
    }

    /// Appends one history instance.
    pub fn append_instance(&mut self, inst: &Instance) -> Result<u64, HistoryError> {
        self.append(inst.snapshots.clone(), inst.events.clone())
    }

    fn insert_node(&mut self, s: ObjectSnapshot, epoch: u64) {
        let idx = NodeIdx(self.nodes.len());
        let list = self.by_object.entry(s.object.clone()).or_default();
        let pos = list.partition_point(|n| self.nodes[n.0].snapshot.time <= s.time);
        list.insert(pos, idx);
        self.nodes.push(GraphNode { snapshot: s, epoch });
    }

    fn insert_edge(&mut self, e: SystemEvent, epoch: u64) {
        self.by_event.insert(e.id.clone(), EdgeIdx(self.edges.len()));
        self.edges.push(GraphEdge { event: e, epoch });
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeIdx, &GraphNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeIdx(i), n))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeIdx, &GraphEdge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeIdx(i), e))
    }

    pub fn node(&self, i: NodeIdx) -> &GraphNode {
        &self.nodes[i.0]
    }

    pub fn edge(&self, i: EdgeIdx) -> &GraphEdge {
        &self.edges[i.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<&GraphEdge> {
        self.by_event.get(id).map(|&i| &self.edges[i.0])
    }

    pub fn snapshot_at(&self, object: &str, time: Time) -> Option<&ObjectSnapshot> {
        self.by_object
            .get(object)?
            .iter()
            .map(|n| &self.nodes[n.0].snapshot)
            .find(|s| s.time == time)
    }

    pub fn objects(&self) -> impl Iterator<Item = &str> {
        self.by_object.keys().map(String::as_str)
    }

    /// The state of `object` at `time`: every snapshot at or before `time`
    /// applied in time order, later values overriding earlier ones.
    pub fn effective_attrs(&self, object: &str, time: Time) -> Result<AttrSet, HistoryError> {
        let no_snapshot = || HistoryError::NoSnapshot {
            object: object.to_string(),
            time,
        };
        let list = self.by_object.get(object).ok_or_else(no_snapshot)?;
        let mut out = AttrSet::new();
        let mut any = false;
        for n in list {
            let s = &self.nodes[n.0].snapshot;
            if s.time > time {
                break;
            }
            any = true;
            out.extend(s.attrs.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        if any {
            Ok(out)
        } else {
            Err(no_snapshot())
        }
    }

    /// Effective attributes of a node at its own time.
    pub fn node_attrs(&self, i: NodeIdx) -> AttrSet {
        let s = &self.nodes[i.0].snapshot;
        self.effective_attrs(&s.object, s.time)
            .expect("a node has its own snapshot")
    }

    /// Effective attributes of an event's source and destination at the
    /// event's time.
    pub fn endpoint_attrs(&self, i: EdgeIdx) -> Result<(AttrSet, AttrSet), HistoryError> {
        let e = &self.edges[i.0].event;
        Ok((
            self.effective_attrs(&e.src, e.time)?,
            self.effective_attrs(&e.dst, e.time)?,
        ))
    }

    /// The history holding everything in this graph.
    pub fn to_history(&self) -> SystemHistory {
        let mut h = SystemHistory::new();
        for n in &self.nodes {
            h.add_snapshot(n.snapshot.clone());
        }
        for e in &self.edges {
            h.add_event(e.event.clone());
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::parse_history;
    use crate::value::Value;

    const H1: &str = "\
snapshot 4 Ujoe class=\"user\" name=\"joe\" team=\"team1\"
snapshot 4 Uchris class=\"user\" name=\"chris\" team=\"team2\"
snapshot 4 P57 class=\"purchase\"
event 4 req_4 Ujoe -> P57 name=\"request\"
snapshot 38 Uchris team=\"team1\"
snapshot 38 Ujoe office=\"B12\"
snapshot 40 P57 state=\"approved\"
event 40 appr_40 Uchris -> P57 name=\"approve\"
";

    fn s1() -> SystemGraph {
        build_system_graph(&parse_history(H1).unwrap(), None)
    }

    #[test]
    fn whole_history() {
        let g = s1();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.epoch(), 0);
        assert!(g.edges().all(|(_, e)| e.epoch == 0));
        assert!(build_system_graph(&SystemHistory::new(), None).node_count() == 0);
    }

    #[test]
    fn time_range() {
        let g = build_system_graph(&parse_history(H1).unwrap(), Some(5..=39));
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert!(g.nodes().all(|(_, n)| n.snapshot.time == 38));
    }

    #[test]
    fn effective_attributes() {
        let g = s1();
        let joe4 = g.effective_attrs("Ujoe", 4).unwrap();
        assert_eq!(joe4["team"], Value::str("team1"));
        assert_eq!(joe4["id"], Value::str("Ujoe"));
        assert!(!joe4.contains_key("office"));
        let joe39 = g.effective_attrs("Ujoe", 39).unwrap();
        assert_eq!(joe39["office"], Value::str("B12"));
        assert_eq!(joe39["team"], Value::str("team1"));
        assert!(matches!(
            g.effective_attrs("Ujoe", 3),
            Err(HistoryError::NoSnapshot { .. })
        ));
        assert_eq!(g.effective_attrs("Uchris", 40).unwrap()["team"], Value::str("team1"));
    }

    #[test]
    fn appends_and_epochs() {
        let mut g = s1();
        let e = SystemEvent::new("x", "Ujoe", "P57", 41, AttrSet::new());
        assert_eq!(g.append(vec![], vec![e]).unwrap(), 1);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.append(vec![], vec![]).unwrap(), 1);
        let e2 = SystemEvent::new("y", "Ujoe", "P57", 42, AttrSet::new());
        assert_eq!(g.append(vec![], vec![e2]).unwrap(), 2);
        assert_eq!(g.edge_by_id("x").unwrap().epoch, 1);
        assert_eq!(g.edge_by_id("y").unwrap().epoch, 2);
        let dup = SystemEvent::new("y", "Ujoe", "P57", 43, AttrSet::new());
        assert!(matches!(
            g.append(vec![], vec![dup]),
            Err(HistoryError::DuplicateEvent(_))
        ));
        let orphan = SystemEvent::new("z", "nobody", "P57", 43, AttrSet::new());
        assert!(matches!(
            g.append(vec![], vec![orphan]),
            Err(HistoryError::UnknownEndpoint { .. })
        ));
        assert_eq!(g.epoch(), 2);
    }

    #[test]
    fn late_snapshot_is_ordered() {
        let mut g = s1();
        let mut a = AttrSet::new();
        a.insert("team".into(), Value::str("team9"));
        g.append(vec![ObjectSnapshot::new("Ujoe", 10, a)], vec![]).unwrap();
        assert_eq!(g.effective_attrs("Ujoe", 39).unwrap()["team"], Value::str("team9"));
        assert_eq!(g.effective_attrs("Ujoe", 5).unwrap()["team"], Value::str("team1"));
    }
}
