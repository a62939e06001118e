//! Text and structured renderings of violations and alerts.
//!
//! Structured output is JSON lines, one object per report, keys sorted:
//!
//! ```text
//! {"bindings":{"A":"team1","R":"team1"},"edges":{"e1":"req_4","e2":"appr_40"},
//!  "failed":["n3"],"kind":"violation","nodes":{},"policy":"P1"}
//! ```
//!
//! `edges` maps policy edges to event ids and `nodes` maps isolated policy
//! nodes to `{"object", "time"}`; together with `bindings` they identify the
//! match. Alerts add `"department"` and `"time"`.

use lasco_core::distsim::Alert;
use lasco_core::eval::render_bindings;
use lasco_core::lang::ElementId;
use lasco_core::matcher::PartialMatch;
use lasco_core::{PolicyGraph, Value};
use serde_json::{json, Map, Value as Json};

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Num(n) => match n.as_i64() {
            Some(i) => json!(i),
            None => json!(n.get()),
        },
        Value::Str(s) => Json::String(s.clone()),
        Value::Set(items) => Json::Array(items.iter().map(value_json).collect()),
    }
}

fn failed_labels(p: &PolicyGraph, failed: &[ElementId]) -> Vec<String> {
    failed.iter().map(|el| p.label(*el)).collect()
}

fn match_fields(p: &PolicyGraph, m: &PartialMatch, failed: &[ElementId]) -> Map<String, Json> {
    let edges: Map<String, Json> =
        m.ps.edge_map
            .iter()
            .map(|(e, ev)| (p.label(ElementId::Edge(*e)), json!(ev)))
            .collect();
    let nodes: Map<String, Json> =
        m.ps.node_map
            .iter()
            .map(|(n, (o, t))| (p.label(ElementId::Node(*n)), json!({"object": o, "time": t})))
            .collect();
    let bindings: Map<String, Json> = m
        .conds
        .bindings
        .iter()
        .map(|(k, v)| (k.clone(), value_json(v)))
        .collect();
    let mut out = Map::new();
    out.insert("policy".into(), json!(p.name));
    out.insert("edges".into(), Json::Object(edges));
    out.insert("nodes".into(), Json::Object(nodes));
    out.insert("bindings".into(), Json::Object(bindings));
    out.insert("failed".into(), json!(failed_labels(p, failed)));
    out
}

pub fn violation_text(p: &PolicyGraph, m: &PartialMatch, failed: &[ElementId]) -> String {
    format!(
        "violation {}: {} {} fails {}",
        p.name,
        m.ps.describe(p),
        render_bindings(&m.conds.bindings),
        failed_labels(p, failed).join(", ")
    )
}

pub fn violation_json(p: &PolicyGraph, m: &PartialMatch, failed: &[ElementId]) -> String {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("violation"));
    obj.extend(match_fields(p, m, failed));
    Json::Object(obj).to_string()
}

pub fn alert_text(p: &PolicyGraph, a: &Alert) -> String {
    format!(
        "alert {} @{} t={}: {} {} fails {}",
        p.name,
        a.department,
        a.time,
        a.matched.ps.describe(p),
        render_bindings(&a.matched.conds.bindings),
        failed_labels(p, &a.failed).join(", ")
    )
}

pub fn alert_json(p: &PolicyGraph, a: &Alert) -> String {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!("alert"));
    obj.extend(match_fields(p, &a.matched, &a.failed));
    obj.insert("department".into(), json!(a.department));
    obj.insert("time".into(), json!(a.time));
    Json::Object(obj).to_string()
}
