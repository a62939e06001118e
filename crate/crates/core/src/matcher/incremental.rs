use std::collections::{BTreeMap, HashSet};

use crate::history::SystemGraph;
use crate::lang::{PolicyGraph, SemanticPiece};

use super::check::{complete_matches, ensure_lint_clean, to_reports, MatchError, ViolationReport};
use super::initial::{initial_matches, MatchOptions};
use super::types::{PartialMatch, PsMap};

/// Initial matches seen so far for one policy over one growing graph.
#[derive(Clone, Debug, Default)]
pub struct MatchCache {
    policy: Option<PolicyGraph>,
    watermark: Option<u64>,
    initial: BTreeMap<SemanticPiece, Vec<PartialMatch>>,
}

impl MatchCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The last graph epoch folded into the cache.
    pub fn watermark(&self) -> Option<u64> {
        self.watermark
    }

    fn reset_for(&mut self, p: &PolicyGraph) {
        if self.policy.as_ref() != Some(p) {
            *self = MatchCache {
                policy: Some(p.clone()),
                ..Default::default()
            };
        }
    }
}

/// Violations among the complete matches that use at least one element
/// added since the previous call with this cache.
///
/// Only elements from epochs past the watermark get initial matches. Each
/// piece then takes a turn with its list cut down to the new matches while
/// every other piece keeps its full list; the union is deduplicated. A
/// different policy discards the cache.
pub fn find_violations_incremental(
    p: &PolicyGraph,
    g: &SystemGraph,
    cache: &mut MatchCache,
    opts: &MatchOptions,
) -> Result<Vec<ViolationReport>, MatchError> {
    ensure_lint_clean(p)?;
    cache.reset_for(p);
    let fresh_opts = MatchOptions {
        new_only: cache.watermark,
        ..opts.clone()
    };
    let fresh = initial_matches(p, g, &fresh_opts);
    let first_run = cache.watermark.is_none();
    cache.watermark = Some(g.epoch());
    for (piece, list) in &fresh {
        cache.initial.entry(*piece).or_default().extend(list.iter().cloned());
    }
    if first_run {
        let matches = complete_matches(p, g, &cache.initial, opts);
        return Ok(to_reports(p, g, matches));
    }

    let mut seen: HashSet<PsMap> = HashSet::new();
    let mut matches = Vec::new();
    for (piece, new_list) in &fresh {
        if new_list.is_empty() {
            continue;
        }
        let mut lists = cache.initial.clone();
        lists.insert(*piece, new_list.clone());
        for m in complete_matches(p, g, &lists, opts) {
            if seen.insert(m.ps.clone()) {
                matches.push(m);
            }
        }
    }
    Ok(to_reports(p, g, matches))
}
