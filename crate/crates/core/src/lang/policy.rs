use std::collections::BTreeSet;
use std::fmt;

use super::expr::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// A node or edge of a policy graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    Node(NodeId),
    Edge(EdgeId),
}

/// The unit of matching: an edge together with its endpoints, or a node
/// with no incident edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemanticPiece {
    Edge(EdgeId),
    IsolatedNode(NodeId),
}

impl SemanticPiece {
    pub fn element(self) -> ElementId {
        match self {
            SemanticPiece::Edge(e) => ElementId::Edge(e),
            SemanticPiece::IsolatedNode(n) => ElementId::Node(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyNode {
    pub name: String,
    pub domain: Expr,
    pub requirement: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub domain: Expr,
    pub requirement: Expr,
}

/// A policy: a directed graph whose nodes and edges each carry a domain
/// predicate and a requirement predicate.
///
/// Node ids index `nodes`, edge ids index `edges`. Edges are labelled
/// `e1`, `e2`, ... in declaration order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyGraph {
    pub name: String,
    nodes: Vec<PolicyNode>,
    edges: Vec<PolicyEdge>,
    vars: BTreeSet<String>,
}

impl PolicyGraph {
    pub fn new(name: impl Into<String>) -> Self {
        PolicyGraph {
            name: name.into(),
            nodes: Vec::new(),
            edges: Vec::new(),
            vars: BTreeSet::new(),
        }
    }

    pub fn add_node(&mut self, name: impl Into<String>, domain: Expr, requirement: Expr) -> NodeId {
        self.vars.extend(domain.vars());
        self.vars.extend(requirement.vars());
        self.nodes.push(PolicyNode {
            name: name.into(),
            domain,
            requirement,
        });
        NodeId(self.nodes.len() - 1)
    }

    /// Panics if either endpoint is not a node of this graph.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, domain: Expr, requirement: Expr) -> EdgeId {
        assert!(
            src.0 < self.nodes.len() && dst.0 < self.nodes.len(),
            "edge endpoint out of range"
        );
        self.vars.extend(domain.vars());
        self.vars.extend(requirement.vars());
        self.edges.push(PolicyEdge {
            src,
            dst,
            domain,
            requirement,
        });
        EdgeId(self.edges.len() - 1)
    }

    pub(crate) fn set_node_predicates(&mut self, id: NodeId, domain: Expr, requirement: Expr) {
        let node = &mut self.nodes[id.0];
        node.domain = domain;
        node.requirement = requirement;
        self.recompute_vars();
    }

    fn recompute_vars(&mut self) {
        let mut vars = BTreeSet::new();
        for n in &self.nodes {
            vars.extend(n.domain.vars());
            vars.extend(n.requirement.vars());
        }
        for e in &self.edges {
            vars.extend(e.domain.vars());
            vars.extend(e.requirement.vars());
        }
        self.vars = vars;
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &PolicyNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &PolicyEdge)> {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), e))
    }

    pub fn node(&self, id: NodeId) -> &PolicyNode {
        &self.nodes[id.0]
    }

    pub fn edge(&self, id: EdgeId) -> &PolicyEdge {
        &self.edges[id.0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name).map(NodeId)
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.vars
    }

    pub fn is_isolated(&self, n: NodeId) -> bool {
        !self.edges.iter().any(|e| e.src == n || e.dst == n)
    }

    pub fn domain(&self, el: ElementId) -> &Expr {
        match el {
            ElementId::Node(n) => &self.node(n).domain,
            ElementId::Edge(e) => &self.edge(e).domain,
        }
    }

    pub fn requirement(&self, el: ElementId) -> &Expr {
        match el {
            ElementId::Node(n) => &self.node(n).requirement,
            ElementId::Edge(e) => &self.edge(e).requirement,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.nodes.len())
            .map(|i| ElementId::Node(NodeId(i)))
            .chain((0..self.edges.len()).map(|i| ElementId::Edge(EdgeId(i))))
    }

    /// Human-readable element label: the node name, or `e<n>` for edges.
    pub fn label(&self, el: ElementId) -> String {
        match el {
            ElementId::Node(n) => self.node(n).name.clone(),
            ElementId::Edge(e) => edge_label(e),
        }
    }

    /// One piece per edge, then one per isolated node.
    pub fn semantic_pieces(&self) -> Vec<SemanticPiece> {
        let mut out: Vec<_> = (0..self.edges.len()).map(|i| SemanticPiece::Edge(EdgeId(i))).collect();
        out.extend(
            (0..self.nodes.len())
                .map(NodeId)
                .filter(|&n| self.is_isolated(n))
                .map(SemanticPiece::IsolatedNode),
        );
        out
    }

    /// Connected components over nodes, as sorted node-id lists, ordered by
    /// their smallest node id.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.src.0), find(&mut parent, e.dst.0));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<NodeId>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(NodeId(i));
        }
        groups.into_values().collect()
    }
}

pub fn edge_label(e: EdgeId) -> String {
    format!("e{}", e.0 + 1)
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Node(n) => write!(f, "node#{}", n.0),
            ElementId::Edge(e) => f.write_str(&edge_label(*e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_and_isolation() {
        let mut p = PolicyGraph::new("t");
        let a = p.add_node("a", Expr::t(), Expr::t());
        let b = p.add_node("b", Expr::t(), Expr::t());
        let c = p.add_node("c", Expr::t(), Expr::t());
        let e = p.add_edge(a, b, Expr::t(), Expr::t());
        assert_eq!(
            p.semantic_pieces(),
            vec![SemanticPiece::Edge(e), SemanticPiece::IsolatedNode(c)]
        );
        assert_eq!(p.components(), vec![vec![a, b], vec![c]]);
    }

    #[test]
    fn single_isolated_node() {
        let mut p = PolicyGraph::new("t");
        let n = p.add_node("n", Expr::t(), Expr::t());
        assert_eq!(p.semantic_pieces(), vec![SemanticPiece::IsolatedNode(n)]);
    }

    #[test]
    fn vars_track_predicates() {
        let mut p = PolicyGraph::new("t");
        let n = p.add_node("n", Expr::eq(Expr::attr("a"), Expr::var("X")), Expr::var("Y"));
        assert_eq!(p.vars().iter().cloned().collect::<Vec<_>>(), vec!["X", "Y"]);
        p.set_node_predicates(n, Expr::t(), Expr::t());
        assert!(p.vars().is_empty());
    }
}
