use std::collections::{BTreeMap, BTreeSet};

use crate::lang::{BinOp, EdgeId, Expr, NodeId, PolicyGraph, SemanticPiece};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeLocality {
    Local,
    NonLocal,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLocality {
    Local,
    NonLocal,
    HalfLocal,
    General,
}

/// Where a policy's elements can be matched, as seen from one engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Locality {
    pub nodes: BTreeMap<NodeId, NodeLocality>,
    pub edges: BTreeMap<EdgeId, EdgeLocality>,
}

impl Locality {
    /// Whether a match must bind this piece before leaving the engine:
    /// local isolated nodes, and local or half-local edges.
    pub fn must_bind(&self, piece: SemanticPiece) -> bool {
        match piece {
            SemanticPiece::IsolatedNode(n) => self.nodes[&n] == NodeLocality::Local,
            SemanticPiece::Edge(e) => matches!(self.edges[&e], EdgeLocality::Local | EdgeLocality::HalfLocal),
        }
    }

    /// Whether no element this engine will ever see can match the piece.
    pub fn is_non_local(&self, piece: SemanticPiece) -> bool {
        match piece {
            SemanticPiece::IsolatedNode(n) => self.nodes[&n] == NodeLocality::NonLocal,
            SemanticPiece::Edge(e) => self.edges[&e] == EdgeLocality::NonLocal,
        }
    }
}

/// The host a node domain pins down with a conjunctive `name="h"` or
/// `id="h"`, if any.
pub fn anchored_host(domain: &Expr) -> Option<&str> {
    domain.conjuncts().into_iter().find_map(|c| {
        let Expr::Binary(BinOp::Eq, l, r) = c.unparen() else {
            return None;
        };
        let (l, r) = (l.unparen(), r.unparen());
        let (attr, lit) = match (l, r) {
            (Expr::Attr(a), other) | (other, Expr::Attr(a)) => (a, other),
            _ => return None,
        };
        if attr != "name" && attr != "id" {
            return None;
        }
        match lit {
            Expr::Literal(Value::Str(h)) => Some(h.as_str()),
            _ => None,
        }
    })
}

/// Node locality from anchors: local if the anchored host is in `scope`,
/// non-local if it is a known host elsewhere, general otherwise. An edge is
/// local or non-local when both ends are, half-local when one end is local
/// and the other non-local, and general in every other case.
pub fn classify_locality(p: &PolicyGraph, scope: &BTreeSet<String>, known_hosts: &BTreeSet<String>) -> Locality {
    let nodes: BTreeMap<NodeId, NodeLocality> = p
        .nodes()
        .map(|(id, n)| {
            let loc = match anchored_host(&n.domain) {
                Some(h) if scope.contains(h) => NodeLocality::Local,
                Some(h) if known_hosts.contains(h) => NodeLocality::NonLocal,
                _ => NodeLocality::General,
            };
            (id, loc)
        })
        .collect();
    let edges = p
        .edges()
        .map(|(id, e)| {
            use NodeLocality as N;
            let loc = match (nodes[&e.src], nodes[&e.dst]) {
                (N::Local, N::Local) => EdgeLocality::Local,
                (N::NonLocal, N::NonLocal) => EdgeLocality::NonLocal,
                (N::Local, N::NonLocal) | (N::NonLocal, N::Local) => EdgeLocality::HalfLocal,
                _ => EdgeLocality::General,
            };
            (id, loc)
        })
        .collect();
    Locality { nodes, edges }
}
