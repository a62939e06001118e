//! Shared support for integration tests: reference oracles, generators and
//! fixture access.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::collections::BTreeSet;
use std::path::PathBuf;

use lasco_core::distsim::Alert;
use lasco_core::history::Time;
use lasco_core::lang::{EdgeId, ElementId, NodeId};
use lasco_core::matcher::{PartialMatch, ViolationReport};
use lasco_core::VarBindings;
use std::collections::BTreeMap;

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

/// Every file in a fixture directory with the given extension, sorted.
pub fn fixtures_in(dir: &str, ext: &str) -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(fixture_path(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

pub fn match_key(m: &PartialMatch) -> oracle::MatchKey {
    (m.ps.edge_map.clone(), m.ps.node_map.clone(), m.conds.bindings.clone())
}

pub type ViolationKey = (
    BTreeMap<EdgeId, String>,
    BTreeMap<NodeId, (String, Time)>,
    VarBindings,
    Vec<ElementId>,
);

pub fn violation_keys(vs: &[ViolationReport]) -> BTreeSet<ViolationKey> {
    vs.iter()
        .map(|v| {
            let (e, n, b) = match_key(&v.matched);
            (e, n, b, v.failed.clone())
        })
        .collect()
}

pub fn alert_keys(alerts: &[Alert]) -> BTreeSet<ViolationKey> {
    alerts
        .iter()
        .map(|a| {
            let (e, n, b) = match_key(&a.matched);
            (e, n, b, a.failed.clone())
        })
        .collect()
}
