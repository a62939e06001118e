use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::history::SystemGraph;
use crate::lang::{EdgeId, NodeId, PolicyGraph, SemanticPiece};
use crate::value::Value;

use super::types::{PartialMatch, SnapshotRef};

/// Search order for [`grow_matches`]: connected components by descending
/// piece count, each kept together and sorted by ascending initial-match
/// count; isolated nodes last, also by ascending count. Ties fall back to
/// element id order.
pub fn order_pieces(p: &PolicyGraph, counts: &BTreeMap<SemanticPiece, usize>) -> Vec<SemanticPiece> {
    let count = |piece: &SemanticPiece| counts.get(piece).copied().unwrap_or(0);
    let mut groups: Vec<Vec<SemanticPiece>> = p
        .components()
        .into_iter()
        .filter_map(|nodes| {
            let members: BTreeSet<NodeId> = nodes.into_iter().collect();
            let edges: Vec<_> = p
                .edges()
                .filter(|(_, e)| members.contains(&e.src))
                .map(|(id, _)| SemanticPiece::Edge(id))
                .collect();
            (!edges.is_empty()).then_some(edges)
        })
        .collect();
    // stable: equal sizes keep smallest-node-id order
    groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
    let mut out = Vec::new();
    for mut g in groups {
        g.sort_by_key(|piece| (count(piece), *piece));
        out.extend(g);
    }
    let mut isolated: Vec<_> = p
        .semantic_pieces()
        .into_iter()
        .filter(|piece| matches!(piece, SemanticPiece::IsolatedNode(_)))
        .collect();
    isolated.sort_by_key(|piece| (count(piece), *piece));
    out.extend(isolated);
    out
}

/// Event id to the value of the same-event attribute, for events that have
/// it. Events without the attribute are each their own set.
type PieceKey = (Vec<(EdgeId, Result<Value, String>)>, BTreeMap<NodeId, SnapshotRef>);

#[derive(Clone, Debug, Default)]
pub struct SameEventSets {
    set_of: BTreeMap<String, Value>,
}

impl SameEventSets {
    pub fn new(g: &SystemGraph, attr: &str) -> Self {
        let set_of = g
            .edges()
            .filter_map(|(_, e)| Some((e.event.id.clone(), e.event.attrs.get(attr)?.clone())))
            .collect();
        SameEventSets { set_of }
    }

    fn key(&self, m: &PartialMatch) -> PieceKey {
        let edges =
            m.ps.edge_map
                .iter()
                .map(|(e, ev)| (*e, self.set_of.get(ev).cloned().ok_or_else(|| ev.clone())))
                .collect();
        (edges, m.ps.node_map.clone())
    }

    /// Keeps the first match of each (edge to set, isolated node map) key.
    pub fn dedup(&self, matches: Vec<PartialMatch>) -> Vec<PartialMatch> {
        let mut seen = HashSet::new();
        matches.into_iter().filter(|m| seen.insert(self.key(m))).collect()
    }
}

/// Complete matches plus the number of unifications tried.
#[derive(Clone, Debug, Default)]
pub struct Grown {
    pub matches: Vec<PartialMatch>,
    pub attempts: u64,
}

/// Depth-first growth: at each level every initial match of the next piece
/// is tried against the accumulated match, and branches that fail to unify
/// are cut. Returns every complete match.
pub fn grow_matches(
    initial: &BTreeMap<SemanticPiece, Vec<PartialMatch>>,
    order: &[SemanticPiece],
    same_event: Option<&SameEventSets>,
) -> Grown {
    let empty = Vec::new();
    let lists: Vec<&Vec<PartialMatch>> = order.iter().map(|p| initial.get(p).unwrap_or(&empty)).collect();
    let mut out = Grown::default();
    if !order.is_empty() {
        grow(&lists, 0, &PartialMatch::empty(), &mut out);
    }
    if let Some(sets) = same_event {
        out.matches = sets.dedup(out.matches);
    }
    out
}

fn grow(lists: &[&Vec<PartialMatch>], level: usize, acc: &PartialMatch, out: &mut Grown) {
    if level == lists.len() {
        out.matches.push(acc.clone());
        return;
    }
    for m in lists[level] {
        out.attempts += 1;
        if let Some(u) = acc.unify(m) {
            grow(lists, level + 1, &u, out);
        }
    }
}
