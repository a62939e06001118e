//! Reference semantics written straight from the definitions, sharing no
//! code with the library beyond the data types.

use std::collections::{BTreeMap, BTreeSet};

use lasco_core::history::{SystemHistory, Time};
use lasco_core::lang::{BinOp, EdgeId, ElementId, Expr, NodeId, PolicyGraph};
use lasco_core::{AttrSet, Number, Value, VarBindings};

/// Three-valued evaluation: `None` is the undefined marker.
pub fn eval(e: &Expr, attrs: &AttrSet, b: &VarBindings) -> Option<Value> {
    match e {
        Expr::Literal(v) => Some(v.clone()),
        Expr::Attr(a) => attrs.get(a).cloned(),
        Expr::Var(v) => b.get(v).cloned(),
        Expr::Paren(x) => eval(x, attrs, b),
        Expr::Not(x) => match eval(x, attrs, b)? {
            Value::Bool(v) => Some(Value::Bool(!v)),
            _ => None,
        },
        Expr::Binary(BinOp::Or, l, r) => {
            let as_bool = |v: Option<Value>| match v {
                Some(Value::Bool(x)) => Some(x),
                _ => None,
            };
            match (as_bool(eval(l, attrs, b)), as_bool(eval(r, attrs, b))) {
                (Some(x), Some(y)) => Some(Value::Bool(x || y)),
                (Some(x), None) | (None, Some(x)) => Some(Value::Bool(x)),
                (None, None) => None,
            }
        }
        Expr::Binary(op, l, r) => {
            let (x, y) = (eval(l, attrs, b)?, eval(r, attrs, b)?);
            binop(*op, &x, &y)
        }
    }
}

fn num(v: &Value) -> Option<f64> {
    match v {
        Value::Num(n) => Some(n.get()),
        _ => None,
    }
}

fn binop(op: BinOp, x: &Value, y: &Value) -> Option<Value> {
    let b = |v: bool| Some(Value::Bool(v));
    match op {
        BinOp::And => match (x, y) {
            (Value::Bool(p), Value::Bool(q)) => b(*p && *q),
            _ => None,
        },
        BinOp::Or => unreachable!(),
        BinOp::Eq => b(x == y),
        BinOp::Ne => b(x != y),
        BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => {
            let ord = match (x, y) {
                (Value::Num(_), Value::Num(_)) => num(x)?.partial_cmp(&num(y)?)?,
                (Value::Str(p), Value::Str(q)) => p.as_bytes().cmp(q.as_bytes()),
                _ => return None,
            };
            b(match op {
                BinOp::Lt => ord.is_lt(),
                BinOp::Gt => ord.is_gt(),
                BinOp::Le => ord.is_le(),
                _ => ord.is_ge(),
            })
        }
        BinOp::In => match (x, y) {
            (Value::Set(_), _) => None,
            (v, Value::Set(s)) => b(s.iter().any(|m| m == v)),
            _ => None,
        },
        BinOp::PCont | BinOp::Cont => match (x, y) {
            (Value::Set(p), Value::Set(q)) => {
                let sub = p.iter().all(|m| q.contains(m));
                b(if op == BinOp::PCont { sub && p != q } else { sub })
            }
            _ => None,
        },
        BinOp::Union | BinOp::Intersect => match (x, y) {
            (Value::Set(p), Value::Set(q)) => {
                let s: BTreeSet<Value> = if op == BinOp::Union {
                    p.iter().chain(q).cloned().collect()
                } else {
                    p.iter().filter(|m| q.contains(m)).cloned().collect()
                };
                Some(Value::Set(s))
            }
            _ => None,
        },
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod => {
            let (p, q) = (num(x)?, num(y)?);
            let v = match op {
                BinOp::Add => p + q,
                BinOp::Sub => p - q,
                BinOp::Mul => p * q,
                BinOp::Div if q != 0.0 => p / q,
                BinOp::Mod if q != 0.0 => p % q,
                _ => return None,
            };
            Number::new(v).map(Value::Num)
        }
    }
}

pub fn holds(e: &Expr, attrs: &AttrSet, b: &VarBindings) -> bool {
    eval(e, attrs, b) == Some(Value::Bool(true))
}

/// State of every object at every time it was observed or touched by an
/// event: all snapshots at or before that time, later ones overriding.
pub fn state_at(h: &SystemHistory, object: &str, t: Time) -> Option<AttrSet> {
    let mut snaps: Vec<_> = h.snapshots().filter(|s| s.object == object && s.time <= t).collect();
    if snaps.is_empty() {
        return None;
    }
    snaps.sort_by_key(|s| s.time);
    let mut out = AttrSet::new();
    for s in snaps {
        for (k, v) in &s.attrs {
            out.insert(k.clone(), v.clone());
        }
    }
    Some(out)
}

/// A match as (edge to event id, isolated node to snapshot, bindings).
pub type MatchKey = (BTreeMap<EdgeId, String>, BTreeMap<NodeId, (String, Time)>, VarBindings);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleResult {
    pub matches: BTreeSet<MatchKey>,
    pub violations: BTreeMap<MatchKey, Vec<ElementId>>,
}

fn collect_values(e: &Expr, out: &mut BTreeSet<Value>) {
    match e {
        Expr::Literal(v) => {
            out.insert(v.clone());
        }
        Expr::Paren(x) | Expr::Not(x) => collect_values(x, out),
        Expr::Binary(_, l, r) => {
            collect_values(l, out);
            collect_values(r, out);
        }
        _ => {}
    }
}

/// Every match of the policy by exhaustive search: one-to-one assignments
/// of edges to events and isolated nodes to snapshots, each policy node
/// standing for one object, crossed with every binding of the policy's
/// variables to a value seen in the history or the policy.
pub fn brute_force(p: &PolicyGraph, h: &SystemHistory) -> OracleResult {
    let events: Vec<_> = h.events().collect();
    let snaps: Vec<(String, Time)> = h.snapshots().map(|s| (s.object.clone(), s.time)).collect();
    let edges: Vec<EdgeId> = p.edges().map(|(id, _)| id).collect();
    let isolated: Vec<NodeId> = p.nodes().map(|(id, _)| id).filter(|&n| p.is_isolated(n)).collect();

    let mut values = BTreeSet::new();
    for s in h.snapshots() {
        values.extend(s.attrs.values().cloned());
    }
    for e in &events {
        values.extend(e.attrs.values().cloned());
    }
    for el in p.elements() {
        collect_values(p.domain(el), &mut values);
    }
    let vars: Vec<String> = p.vars().iter().cloned().collect();
    let values: Vec<Value> = values.into_iter().collect();
    let mut bindings: Vec<VarBindings> = vec![VarBindings::new()];
    for v in &vars {
        bindings = bindings
            .into_iter()
            .flat_map(|b| {
                values.iter().map(move |val| {
                    let mut nb = b.clone();
                    nb.insert(v.clone(), val.clone());
                    nb
                })
            })
            .collect();
    }

    let mut out = OracleResult::default();
    let mut edge_pick: Vec<usize> = Vec::new();
    assign_edges(&events.len(), edges.len(), &mut edge_pick, &mut |ep| {
        // one object per policy node
        let mut obj: BTreeMap<NodeId, &str> = BTreeMap::new();
        for (i, &e) in edges.iter().enumerate() {
            let ev = events[ep[i]];
            let pe = p.edge(e);
            for (n, o) in [(pe.src, ev.src.as_str()), (pe.dst, ev.dst.as_str())] {
                if *obj.entry(n).or_insert(o) != o {
                    return;
                }
            }
        }
        let mut node_pick = Vec::new();
        assign_edges(&snaps.len(), isolated.len(), &mut node_pick, &mut |np| {
            for b in &bindings {
                if !domain_holds(p, h, &edges, &events, ep, &isolated, &snaps, np, b) {
                    continue;
                }
                let key: MatchKey = (
                    edges
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| (e, events[ep[i]].id.clone()))
                        .collect(),
                    isolated
                        .iter()
                        .enumerate()
                        .map(|(i, &n)| (n, snaps[np[i]].clone()))
                        .collect(),
                    b.clone(),
                );
                let failed = failed(p, &edges, &events, ep, b);
                if !failed.is_empty() {
                    out.violations.insert(key.clone(), failed);
                }
                out.matches.insert(key);
            }
        });
    });
    out
}

/// Calls `f` with every injective choice of `k` indices below `n`.
fn assign_edges(n: &usize, k: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in 0..*n {
        if pick.contains(&i) {
            continue;
        }
        pick.push(i);
        assign_edges(n, k, pick, f);
        pick.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn domain_holds(
    p: &PolicyGraph,
    h: &SystemHistory,
    edges: &[EdgeId],
    events: &[&lasco_core::history::SystemEvent],
    ep: &[usize],
    isolated: &[NodeId],
    snaps: &[(String, Time)],
    np: &[usize],
    b: &VarBindings,
) -> bool {
    for (i, &e) in edges.iter().enumerate() {
        let ev = events[ep[i]];
        let pe = p.edge(e);
        if !holds(&pe.domain, &ev.attrs, b) {
            return false;
        }
        for (n, o) in [(pe.src, &ev.src), (pe.dst, &ev.dst)] {
            match state_at(h, o, ev.time) {
                Some(s) if holds(&p.node(n).domain, &s, b) => {}
                _ => return false,
            }
        }
    }
    for (i, &n) in isolated.iter().enumerate() {
        let (o, t) = &snaps[np[i]];
        match state_at(h, o, *t) {
            Some(s) if holds(&p.node(n).domain, &s, b) => {}
            _ => return false,
        }
    }
    true
}

fn failed(
    p: &PolicyGraph,
    edges: &[EdgeId],
    events: &[&lasco_core::history::SystemEvent],
    ep: &[usize],
    b: &VarBindings,
) -> Vec<ElementId> {
    let mut out = Vec::new();
    for (id, n) in p.nodes() {
        if !holds(&n.requirement, &AttrSet::new(), b) {
            out.push(ElementId::Node(id));
        }
    }
    for (i, &e) in edges.iter().enumerate() {
        if !holds(&p.edge(e).requirement, &events[ep[i]].attrs, b) {
            out.push(ElementId::Edge(e));
        }
    }
    out
}
