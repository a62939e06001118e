use std::collections::{BTreeMap, BTreeSet};

use crate::eval::{eval_pred, merge_all, VarBindings, VarConditions};
use crate::history::{EdgeIdx, NodeIdx, SystemGraph, Time};
use crate::lang::{EdgeId, Expr, NodeId, PolicyGraph, SemanticPiece};
use crate::value::AttrSet;

use super::types::{PartialMatch, PsMap};

/// A system element suggested for a piece.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Candidate {
    Event(String),
    Snapshot(String, Time),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchOptions {
    /// Per-piece candidate lists, taken as exhaustive. Pieces without an
    /// entry are matched against everything.
    pub hints: Option<BTreeMap<SemanticPiece, Vec<Candidate>>>,
    /// Events sharing this attribute's value form one set; matches that
    /// differ only by which member of a set an edge took are reported once.
    pub same_event_attr: Option<String>,
    /// Only system elements stamped with a later epoch are considered.
    pub new_only: Option<u64>,
}

/// Node domain matching: [`eval_pred`] under another name.
pub fn match_node(pred: &Expr, attrs: &AttrSet, b: &VarBindings) -> VarConditions {
    eval_pred(pred, attrs, b)
}

/// Edge domain matching: [`eval_pred`] under another name.
pub fn match_edge(pred: &Expr, attrs: &AttrSet, b: &VarBindings) -> VarConditions {
    eval_pred(pred, attrs, b)
}

/// Matches a policy edge and its endpoint nodes against one event, with
/// endpoint states taken at the event's time. `None` if an endpoint has no
/// state yet.
pub fn match_edge_area(
    p: &PolicyGraph,
    e: EdgeId,
    g: &SystemGraph,
    ev: EdgeIdx,
    b: &VarBindings,
) -> Option<VarConditions> {
    let pe = p.edge(e);
    let event = &g.edge(ev).event;
    if pe.src == pe.dst && event.src != event.dst {
        return None;
    }
    let (src_attrs, dst_attrs) = g.endpoint_attrs(ev).ok()?;
    let edge = match_edge(&pe.domain, &event.attrs, b);
    if edge.is_false() {
        return Some(edge);
    }
    let src = match_node(&p.node(pe.src).domain, &src_attrs, b);
    let dst = match_node(&p.node(pe.dst).domain, &dst_attrs, b);
    Some(merge_all([&edge, &src, &dst]))
}

/// The single-piece matches with satisfiable conditions, for every piece.
pub fn initial_matches(
    p: &PolicyGraph,
    g: &SystemGraph,
    opts: &MatchOptions,
) -> BTreeMap<SemanticPiece, Vec<PartialMatch>> {
    let fresh = |epoch: u64| opts.new_only.is_none_or(|w| epoch > w);
    let hint = |piece: SemanticPiece| opts.hints.as_ref().and_then(|h| h.get(&piece));
    let none = VarBindings::new();
    let mut out = BTreeMap::new();
    for piece in p.semantic_pieces() {
        let mut list = Vec::new();
        match piece {
            SemanticPiece::Edge(e) => {
                let candidates: Vec<EdgeIdx> = match hint(piece) {
                    Some(h) => {
                        let wanted: BTreeSet<&str> = h
                            .iter()
                            .filter_map(|c| match c {
                                Candidate::Event(id) => Some(id.as_str()),
                                Candidate::Snapshot(..) => None,
                            })
                            .collect();
                        g.edges()
                            .filter(|(_, ge)| wanted.contains(ge.event.id.as_str()))
                            .map(|(i, _)| i)
                            .collect()
                    }
                    None => g.edges().map(|(i, _)| i).collect(),
                };
                for ev in candidates {
                    if !fresh(g.edge(ev).epoch) {
                        continue;
                    }
                    let Some(conds) = match_edge_area(p, e, g, ev, &none) else {
                        continue;
                    };
                    if !conds.may_be_sat() {
                        continue;
                    }
                    let event = &g.edge(ev).event;
                    let pe = p.edge(e);
                    let mut ps = PsMap::default();
                    ps.edge_map.insert(e, event.id.clone());
                    ps.incidental
                        .entry(pe.src)
                        .or_default()
                        .insert((event.src.clone(), event.time));
                    ps.incidental
                        .entry(pe.dst)
                        .or_default()
                        .insert((event.dst.clone(), event.time));
                    list.push(PartialMatch { ps, conds });
                }
            }
            SemanticPiece::IsolatedNode(n) => {
                let candidates: Vec<NodeIdx> = match hint(piece) {
                    Some(h) => g
                        .nodes()
                        .filter(|(_, gn)| {
                            h.contains(&Candidate::Snapshot(gn.snapshot.object.clone(), gn.snapshot.time))
                        })
                        .map(|(i, _)| i)
                        .collect(),
                    None => g.nodes().map(|(i, _)| i).collect(),
                };
                for ni in candidates {
                    if !fresh(g.node(ni).epoch) {
                        continue;
                    }
                    if let Some(m) = isolated_node_match(p, n, g, ni) {
                        list.push(m);
                    }
                }
            }
        }
        out.insert(piece, list);
    }
    out
}

fn isolated_node_match(p: &PolicyGraph, n: NodeId, g: &SystemGraph, ni: NodeIdx) -> Option<PartialMatch> {
    let conds = match_node(&p.node(n).domain, &g.node_attrs(ni), &VarBindings::new());
    if !conds.may_be_sat() {
        return None;
    }
    let s = &g.node(ni).snapshot;
    let mut ps = PsMap::default();
    ps.node_map.insert(n, (s.object.clone(), s.time));
    Some(PartialMatch { ps, conds })
}
