//! Seeded random policies, histories, topologies and traces.

use lasco_core::distsim::{parse_topology, parse_trace, Topology, Trace};
use lasco_core::history::{render_record, ObjectSnapshot, Record, SystemEvent, SystemHistory};
use lasco_core::lang::{lint_policy, BinOp};
use lasco_core::{parse_policy_file, AttrSet, Expr, PolicyGraph, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<'a>(r: &mut Rng8, xs: &[&'a str]) -> &'a str {
    xs.choose(r).unwrap()
}

fn node_domain(r: &mut Rng8, hosts: &[String]) -> String {
    let mut opts = vec![
        "True".to_string(),
        "a = 1".into(),
        "a >= 1".into(),
        "b = \"x\"".into(),
        "a = $X".into(),
        "b = $Y".into(),
        "missing = 1 || b = \"y\"".into(),
        "a = $X && b != \"y\"".into(),
    ];
    for h in hosts {
        opts.push(format!("name = \"{h}\""));
        opts.push(format!("id = \"{h}\" && a != 2"));
        opts.push(format!("name = \"{h}\" && a = $X"));
    }
    opts.choose(r).unwrap().clone()
}

fn edge_domain(r: &mut Rng8) -> &'static str {
    pick(
        r,
        &[
            "True",
            "op = \"r\"",
            "op = $Y",
            "q < 1",
            "!(op = \"w\")",
            "q = $X",
            "nope = 1 || op = \"w\"",
        ],
    )
}

fn node_requirement(r: &mut Rng8) -> &'static str {
    pick(r, &["True", "True", "$X != 1", "$X = $Y", "$X > 0", "!($Y = \"x\")"])
}

fn edge_requirement(r: &mut Rng8) -> &'static str {
    pick(
        r,
        &[
            "True",
            "True",
            "q = 0",
            "op != \"w\"",
            "$X != q",
            "q < $X || op = \"r\"",
        ],
    )
}

/// A lint-clean policy of one to three semantic pieces. With `hosts`,
/// node domains may anchor on host names.
pub fn policy(r: &mut Rng8, hosts: &[String]) -> PolicyGraph {
    loop {
        let pieces = r.gen_range(1..=3);
        let edges = r.gen_range(0..=pieces);
        let isolated = pieces - edges;
        let mut names: Vec<String> = Vec::new();
        let mut edge_lines = Vec::new();
        for _ in 0..edges {
            let end = |names: &mut Vec<String>, r: &mut Rng8| {
                if !names.is_empty() && r.gen_bool(0.5) {
                    names.choose(r).unwrap().clone()
                } else {
                    let n = format!("n{}", names.len());
                    names.push(n.clone());
                    n
                }
            };
            let s = end(&mut names, r);
            let d = end(&mut names, r);
            edge_lines.push(format!("{s} -> {d}\t{}\t{}", edge_domain(r), edge_requirement(r)));
        }
        for _ in 0..isolated {
            names.push(format!("n{}", names.len()));
        }
        let mut text = String::new();
        for n in &names {
            text.push_str(&format!("{n}\t{}\t{}\n", node_domain(r, hosts), node_requirement(r)));
        }
        for l in edge_lines {
            text.push_str(&l);
            text.push('\n');
        }
        let p = parse_policy_file(&text).expect("generated policy parses").remove(0);
        if lint_policy(&p).iter().all(|d| !d.is_error()) {
            return p;
        }
    }
}

fn object_attrs(r: &mut Rng8) -> AttrSet {
    let mut a = AttrSet::new();
    if r.gen_bool(0.85) {
        a.insert("a".into(), Value::int(r.gen_range(0..3)));
    }
    if r.gen_bool(0.85) {
        a.insert("b".into(), Value::str(*["x", "y"].choose(r).unwrap()));
    }
    a
}

fn event_attrs(r: &mut Rng8) -> AttrSet {
    let mut a = AttrSet::new();
    a.insert("op".into(), Value::str(*["r", "w"].choose(r).unwrap()));
    if r.gen_bool(0.8) {
        a.insert("q".into(), Value::int(r.gen_range(0..2)));
    }
    a
}

/// A valid history: every object has a snapshot at time 1; later times
/// may update some objects; events fall at any time.
pub fn history(r: &mut Rng8, objects: &[String], max_times: i64, max_events: usize) -> SystemHistory {
    let mut h = SystemHistory::new();
    let times = r.gen_range(1..=max_times);
    for o in objects {
        h.add_snapshot(ObjectSnapshot::new(o.clone(), 1, object_attrs(r)));
    }
    for t in 2..=times {
        for o in objects {
            if r.gen_bool(0.3) {
                h.add_snapshot(ObjectSnapshot::new(o.clone(), t, object_attrs(r)));
            }
        }
    }
    for i in 0..r.gen_range(0..=max_events) {
        let src = objects.choose(r).unwrap().clone();
        let dst = objects.choose(r).unwrap().clone();
        let t = r.gen_range(1..=times);
        h.add_event(SystemEvent::new(format!("e{i}"), src, dst, t, event_attrs(r)));
    }
    h.validate().expect("generated history is valid");
    h
}

pub fn objects(r: &mut Rng8, prefix: &str, max: usize) -> Vec<String> {
    (0..r.gen_range(1..=max)).map(|i| format!("{prefix}{i}")).collect()
}

/// A tree of up to four departments with the hosts spread over them.
pub fn topology(r: &mut Rng8, hosts: &[String]) -> Topology {
    let n = r.gen_range(1..=4);
    let parent: Vec<Option<usize>> = (0..n).map(|i| (i > 0).then(|| r.gen_range(0..i))).collect();
    let mut home: Vec<Vec<&String>> = vec![Vec::new(); n];
    for h in hosts {
        home[r.gen_range(0..n)].push(h);
    }
    fn emit(d: usize, depth: usize, parent: &[Option<usize>], home: &[Vec<&String>], out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}D{d}\n"));
        for h in &home[d] {
            out.push_str(&format!("{pad}  host {h}\n"));
        }
        for c in (0..parent.len()).filter(|&c| parent[c] == Some(d)) {
            emit(c, depth + 1, parent, home, out);
        }
    }
    let mut text = String::new();
    emit(0, 0, &parent, &home, &mut text);
    parse_topology(&text).expect("generated topology parses")
}

/// The history as a trace: each snapshot reported once and each event
/// once or twice, tagged by an endpoint or its department, in shuffled
/// arrival order.
pub fn trace(r: &mut Rng8, topo: &Topology, h: &SystemHistory) -> Trace {
    let tag = |r: &mut Rng8, host: &str| -> String {
        if r.gen_bool(0.5) {
            host.to_string()
        } else {
            let d = topo.home_of(host).unwrap();
            topo.department(d).name.clone()
        }
    };
    let mut lines = Vec::new();
    for s in h.snapshots() {
        let t = tag(r, &s.object);
        lines.push(format!("@{t} {}", render_record(&Record::Snapshot(s.clone()))));
    }
    for e in h.events() {
        for _ in 0..r.gen_range(1..=2) {
            let end = if r.gen_bool(0.5) { e.src.clone() } else { e.dst.clone() };
            let t = tag(r, &end);
            lines.push(format!("@{t} {}", render_record(&Record::Event(e.clone()))));
        }
    }
    lines.shuffle(r);
    parse_trace(&lines.join("\n"), topo).expect("generated trace parses")
}

const PRED_ATTRS: [&str; 4] = ["a", "b", "c", "d"];

fn leaf(r: &mut Rng8) -> Expr {
    match r.gen_range(0..6) {
        0 | 1 => Expr::attr(*PRED_ATTRS.choose(r).unwrap()),
        2 => Expr::lit(Value::int(r.gen_range(-1..3))),
        3 => Expr::lit(Value::str(*["x", "y"].choose(r).unwrap())),
        4 => Expr::lit(Value::Bool(r.gen_bool(0.5))),
        _ => Expr::var(*["X", "Y"].choose(r).unwrap()),
    }
}

/// A random expression tree over attributes `a` to `d`, variables `$X`
/// and `$Y`, and small literals. Kinds are not checked, so many
/// subexpressions are undefined.
pub fn predicate(r: &mut Rng8, depth: u32) -> Expr {
    if depth == 0 || r.gen_bool(0.25) {
        return leaf(r);
    }
    if r.gen_bool(0.1) {
        return Expr::not(predicate(r, depth - 1));
    }
    let ops = [
        BinOp::And,
        BinOp::Or,
        BinOp::Or,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Ge,
        BinOp::Add,
        BinOp::Mod,
    ];
    let op = *ops.choose(r).unwrap();
    Expr::bin(op, predicate(r, depth - 1), predicate(r, depth - 1))
}

/// Values for all four predicate attributes; each is then dropped with
/// probability one half.
pub fn sparse_attrs(r: &mut Rng8) -> AttrSet {
    let mut out = AttrSet::new();
    for a in PRED_ATTRS {
        if r.gen_bool(0.5) {
            continue;
        }
        let v = match r.gen_range(0..3) {
            0 => Value::int(r.gen_range(-1..3)),
            1 => Value::str(*["x", "y"].choose(r).unwrap()),
            _ => Value::Bool(r.gen_bool(0.5)),
        };
        out.insert(a.to_string(), v);
    }
    out
}
