use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::eval::{merge_conds, render_bindings, VarConditions};
use crate::history::Time;
use crate::lang::{edge_label, EdgeId, NodeId, PolicyGraph};

/// A system node: an object at the time of one of its snapshots.
pub type SnapshotRef = (String, Time);

/// Which system elements the policy elements of a match are bound to.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PsMap {
    /// Policy edge to event id. One-to-one.
    pub edge_map: BTreeMap<EdgeId, String>,
    /// Isolated policy node to snapshot. One-to-one.
    pub node_map: BTreeMap<NodeId, SnapshotRef>,
    /// Endpoint nodes of bound edges to the snapshots the events touched.
    /// All entries for one policy node name the same object.
    pub incidental: BTreeMap<NodeId, BTreeSet<SnapshotRef>>,
}

impl PsMap {
    pub fn is_empty(&self) -> bool {
        self.edge_map.is_empty() && self.node_map.is_empty()
    }

    /// The object a policy node is matched to, if any.
    pub fn object_of(&self, n: NodeId) -> Option<&str> {
        if let Some((o, _)) = self.node_map.get(&n) {
            return Some(o);
        }
        self.incidental.get(&n)?.iter().next().map(|(o, _)| o.as_str())
    }

    /// Combines two ps maps if they agree: shared keys map alike, the
    /// union stays one-to-one, and shared policy nodes name one object.
    pub fn unify(&self, other: &PsMap) -> Option<PsMap> {
        let edge_map = union_injective(&self.edge_map, &other.edge_map)?;
        let node_map = union_injective(&self.node_map, &other.node_map)?;
        let mut incidental = self.incidental.clone();
        for (n, refs) in &other.incidental {
            match incidental.get_mut(n) {
                Some(mine) => {
                    let (a, b) = (mine.iter().next()?, refs.iter().next()?);
                    if a.0 != b.0 {
                        return None;
                    }
                    mine.extend(refs.iter().cloned());
                }
                None => {
                    incidental.insert(*n, refs.clone());
                }
            }
        }
        Some(PsMap {
            edge_map,
            node_map,
            incidental,
        })
    }

    /// Renders as `e1->req_4, e2->appr_40, pw->(file1@3)`.
    pub fn describe(&self, p: &PolicyGraph) -> String {
        let mut parts: Vec<String> = self
            .edge_map
            .iter()
            .map(|(e, ev)| format!("{}->{ev}", edge_label(*e)))
            .collect();
        parts.extend(
            self.node_map
                .iter()
                .map(|(n, (o, t))| format!("{}->({o}@{t})", p.node(*n).name)),
        );
        parts.join(", ")
    }
}

fn union_injective<K: Ord + Clone, V: Ord + Clone>(a: &BTreeMap<K, V>, b: &BTreeMap<K, V>) -> Option<BTreeMap<K, V>> {
    let mut out = a.clone();
    let mut used: BTreeSet<&V> = a.values().collect();
    for (k, v) in b {
        match a.get(k) {
            Some(w) if w == v => {}
            Some(_) => return None,
            None => {
                if !used.insert(v) {
                    return None;
                }
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

/// A ps map over some of a policy's pieces plus the variable conditions
/// under which it holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialMatch {
    pub ps: PsMap,
    pub conds: VarConditions,
}

impl PartialMatch {
    /// The match of nothing: empty ps map, `⟨{}, true⟩`.
    pub fn empty() -> Self {
        PartialMatch {
            ps: PsMap::default(),
            conds: VarConditions::truth(),
        }
    }

    /// Unifies two partial matches: ps maps must agree and the merged
    /// conditions must still be satisfiable.
    pub fn unify(&self, other: &PartialMatch) -> Option<PartialMatch> {
        let ps = self.ps.unify(&other.ps)?;
        let conds = merge_conds(&self.conds, &other.conds);
        conds.may_be_sat().then_some(PartialMatch { ps, conds })
    }

    /// Covers every semantic piece of `p`.
    pub fn is_complete(&self, p: &PolicyGraph) -> bool {
        self.ps.edge_map.len() == p.edge_count()
            && (0..p.node_count())
                .map(NodeId)
                .filter(|&n| p.is_isolated(n))
                .all(|n| self.ps.node_map.contains_key(&n))
    }
}

impl fmt::Display for PartialMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self
            .ps
            .edge_map
            .iter()
            .map(|(e, ev)| format!("{}->{ev}", edge_label(*e)))
            .collect();
        let nodes: Vec<_> = self
            .ps
            .node_map
            .iter()
            .map(|(n, (o, t))| format!("node#{}->({o}@{t})", n.0))
            .collect();
        write!(
            f,
            "[{}] {}",
            edges.into_iter().chain(nodes).collect::<Vec<_>>().join(", "),
            render_bindings(&self.conds.bindings)
        )?;
        if !self.conds.is_true() {
            write!(f, " if {}", self.conds.condition)?;
        }
        Ok(())
    }
}
