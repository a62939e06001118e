//! Workloads for the matcher benchmarks.

use lasco_core::distsim::{parse_topology, parse_trace, Topology, Trace};
use lasco_core::history::{ObjectSnapshot, SystemEvent, SystemHistory};
use lasco_core::{parse_policy_file, AttrSet, PolicyGraph, Value};

fn attrs(pairs: &[(&str, Value)]) -> AttrSet {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn class_name(i: usize) -> String {
    if i == 0 {
        "Ana".into()
    } else {
        format!("Ana{}", i + 1)
    }
}

/// A chain of `hops` edges, each matching a call of `r` from one class to
/// the next.
pub fn chain_policy(hops: usize) -> PolicyGraph {
    let mut text = String::new();
    for i in 0..=hops {
        text.push_str(&format!("n{i}\tclass=\"{}\"\n", class_name(i)));
    }
    for i in 0..hops {
        text.push_str(&format!("n{i} -> n{}\tmethod=\"r\"\n", i + 1));
    }
    parse_policy_file(&text).expect("chain policy parses").remove(0)
}

/// `iterations` passes down a call chain of `hops` classes. Every pass adds
/// one parallel edge per hop, so a chain policy has `iterations^hops`
/// matches.
pub fn call_chain(hops: usize, iterations: usize) -> SystemHistory {
    let mut h = SystemHistory::new();
    for i in 0..=hops {
        h.add_snapshot(ObjectSnapshot::new(
            class_name(i),
            1,
            attrs(&[("class", Value::str(class_name(i)))]),
        ));
    }
    let mut t = 1;
    for _ in 0..iterations {
        for i in 0..hops {
            t += 1;
            let a = attrs(&[("method", Value::str("r"))]);
            h.add_event(SystemEvent::new(
                format!("call{t}"),
                class_name(i),
                class_name(i + 1),
                t,
                a,
            ));
        }
    }
    h
}

/// Two unconnected always-true edges: `m(m-1)` matches over `m` events.
pub fn pair_policy() -> PolicyGraph {
    parse_policy_file("a -> b\nc -> d")
        .expect("pair policy parses")
        .remove(0)
}

/// `m` events between two objects.
pub fn parallel_events(m: usize) -> SystemHistory {
    let mut h = SystemHistory::new();
    h.add_snapshot(ObjectSnapshot::new("X", 1, AttrSet::new()));
    h.add_snapshot(ObjectSnapshot::new("Y", 1, AttrSet::new()));
    for i in 0..m {
        h.add_event(SystemEvent::new(
            format!("c{i}"),
            "X",
            "Y",
            1 + i as i64,
            AttrSet::new(),
        ));
    }
    h
}

/// Request/approval traffic for a team-based separation-of-duty policy:
/// `users` users in `teams` teams, each filing one request. Even requests
/// are approved by a teammate, so half of them violate.
pub fn purchase_workload(users: usize, teams: usize) -> (PolicyGraph, SystemHistory) {
    let p = parse_policy_file(
        "n1\tclass=\"user\" && team=$R\n\
         n2\tclass=\"purchase\"\n\
         n3\tclass=\"user\" && team=$A\t$A != $R\n\
         n1 -> n2\tname=\"request\"\n\
         n3 -> n2\tname=\"approve\"\n",
    )
    .expect("purchase policy parses")
    .remove(0);
    let mut h = SystemHistory::new();
    for u in 0..users {
        let team = Value::str(format!("team{}", u % teams));
        h.add_snapshot(ObjectSnapshot::new(
            format!("U{u}"),
            1,
            attrs(&[("class", Value::str("user")), ("team", team)]),
        ));
        h.add_snapshot(ObjectSnapshot::new(
            format!("P{u}"),
            1,
            attrs(&[("class", Value::str("purchase"))]),
        ));
    }
    for u in 0..users {
        let req = attrs(&[("name", Value::str("request"))]);
        h.add_event(SystemEvent::new(
            format!("req{u}"),
            format!("U{u}"),
            format!("P{u}"),
            2,
            req,
        ));
        let approver = if u % 2 == 0 {
            (u + teams) % users
        } else {
            (u + 1) % users
        };
        let appr = attrs(&[("name", Value::str("approve"))]);
        h.add_event(SystemEvent::new(
            format!("appr{u}"),
            format!("U{approver}"),
            format!("P{u}"),
            3,
            appr,
        ));
    }
    (p, h)
}

/// A two-level topology with `depts` leaf departments of `hosts_per`
/// hosts each, and a trace where host `k` of each department contacts host
/// `k` of the next department every step. The policy flags a marked host
/// reaching any host that then talks NFS.
pub fn distsim_workload(depts: usize, hosts_per: usize, steps: usize) -> (Topology, Vec<PolicyGraph>, Trace) {
    let host = |d: usize, k: usize| format!("h{d}_{k}");
    let mut topo = String::from("root\n");
    for d in 0..depts {
        topo.push_str(&format!("  D{d}\n"));
        for k in 0..hosts_per {
            topo.push_str(&format!("    host {}\n", host(d, k)));
        }
    }
    let topo = parse_topology(&topo).expect("bench topology parses");
    let mut trace = String::new();
    for d in 0..depts {
        for k in 0..hosts_per {
            let mark = if d == 0 && k == 0 { " alert=\"RootKit\"" } else { "" };
            trace.push_str(&format!("@{} snapshot 1 {}{mark}\n", host(d, k), host(d, k)));
        }
    }
    let mut n = 0;
    for t in 2..2 + steps as i64 {
        for d in 0..depts {
            for k in 0..hosts_per {
                let (src, dst) = (host(d, k), host((d + 1) % depts, k));
                let proto = if n % 7 == 0 { "NFS" } else { "telnet" };
                trace.push_str(&format!("@{src} event {t} c{n} {src} -> {dst} protocol=\"{proto}\"\n"));
                n += 1;
            }
        }
    }
    let trace = parse_trace(&trace, &topo).expect("bench trace parses");
    let policies =
        parse_policy_file("h\talert=\"RootKit\"\ns\tTrue\no\tTrue\nh -> s\ns -> o\tTrue\tprotocol != \"NFS\"\n")
            .expect("bench policy parses");
    (topo, policies, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use lasco_core::history::build_system_graph;
    use lasco_core::matcher::{find_matches, find_violations, MatchOptions};

    #[test]
    fn workload_sizes() {
        let opts = MatchOptions::default();
        let g = build_system_graph(&call_chain(2, 5), None);
        assert_eq!(find_matches(&chain_policy(2), &g, &opts).unwrap().len(), 25);
        let g = build_system_graph(&parallel_events(6), None);
        assert_eq!(find_matches(&pair_policy(), &g, &opts).unwrap().len(), 30);
        let (p, h) = purchase_workload(6, 3);
        let g = build_system_graph(&h, None);
        assert_eq!(find_violations(&p, &g, &opts).unwrap().len(), 3);
        let (topo, ps, trace) = distsim_workload(3, 2, 2);
        assert_eq!(topo.departments().len(), 4);
        assert_eq!(ps.len(), 1);
        assert_eq!(trace.reports.len(), 6 + 12);
    }
}
