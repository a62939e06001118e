use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::eval::{eval_pred, VarBindings};
use crate::history::SystemGraph;
use crate::lang::{lint_policy, ElementId, PolicyDiagnostic, PolicyGraph, SemanticPiece};
use crate::value::AttrSet;

use super::grow::{grow_matches, order_pieces, SameEventSets};
use super::initial::{initial_matches, MatchOptions};
use super::types::PartialMatch;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("policy '{policy}' has lint errors: {}", render_errors(.errors))]
    Lint {
        policy: String,
        errors: Vec<PolicyDiagnostic>,
    },
}

fn render_errors(errors: &[PolicyDiagnostic]) -> String {
    errors.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// A complete match that fails at least one requirement predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ViolationReport {
    pub policy: String,
    pub matched: PartialMatch,
    /// Elements whose requirement predicate did not hold.
    pub failed: Vec<ElementId>,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<_> = self.failed.iter().map(|e| e.to_string()).collect();
        write!(f, "{}: {} fails {}", self.policy, self.matched, failed.join(", "))
    }
}

pub(crate) fn ensure_lint_clean(p: &PolicyGraph) -> Result<(), MatchError> {
    let errors: Vec<_> = lint_policy(p).into_iter().filter(|d| d.is_error()).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(MatchError::Lint {
            policy: p.name.clone(),
            errors,
        })
    }
}

/// Grows complete matches from per-piece initial lists and keeps those
/// whose conditions reduce to true.
pub(crate) fn complete_matches(
    p: &PolicyGraph,
    g: &SystemGraph,
    initial: &BTreeMap<SemanticPiece, Vec<PartialMatch>>,
    opts: &MatchOptions,
) -> Vec<PartialMatch> {
    let counts = initial.iter().map(|(k, v)| (*k, v.len())).collect();
    let order = order_pieces(p, &counts);
    let sets = opts.same_event_attr.as_deref().map(|a| SameEventSets::new(g, a));
    let grown = grow_matches(initial, &order, sets.as_ref());
    grown
        .matches
        .into_iter()
        .filter(|m| {
            // the anchor rule binds every variable, so a complete match's
            // condition always folds to a literal
            debug_assert!(m.conds.condition.vars().is_empty(), "unbound variables in {}", m.conds);
            m.conds.is_true()
        })
        .collect()
}

/// Every complete match of the policy's domain against the graph.
pub fn find_matches(p: &PolicyGraph, g: &SystemGraph, opts: &MatchOptions) -> Result<Vec<PartialMatch>, MatchError> {
    ensure_lint_clean(p)?;
    let initial = initial_matches(p, g, opts);
    Ok(complete_matches(p, g, &initial, opts))
}

/// Elements of a complete match whose requirement does not evaluate to
/// true. Edge requirements see the event's attributes and the bindings;
/// node requirements see the bindings only.
pub fn failed_requirements(p: &PolicyGraph, g: &SystemGraph, m: &PartialMatch) -> Vec<ElementId> {
    let b: &VarBindings = &m.conds.bindings;
    let none = AttrSet::new();
    let mut failed = Vec::new();
    for (id, n) in p.nodes() {
        if !n.requirement.is_true() && !eval_pred(&n.requirement, &none, b).is_true() {
            failed.push(ElementId::Node(id));
        }
    }
    for (id, e) in p.edges() {
        if e.requirement.is_true() {
            continue;
        }
        let attrs =
            m.ps.edge_map
                .get(&id)
                .and_then(|ev| g.edge_by_id(ev))
                .map(|ge| &ge.event.attrs)
                .unwrap_or(&none);
        if !eval_pred(&e.requirement, attrs, b).is_true() {
            failed.push(ElementId::Edge(id));
        }
    }
    failed
}

pub(crate) fn to_reports(p: &PolicyGraph, g: &SystemGraph, matches: Vec<PartialMatch>) -> Vec<ViolationReport> {
    matches
        .into_iter()
        .filter_map(|m| {
            let failed = failed_requirements(p, g, &m);
            (!failed.is_empty()).then(|| ViolationReport {
                policy: p.name.clone(),
                matched: m,
                failed,
            })
        })
        .collect()
}

/// The complete matches that fail a requirement. Fails only if the policy
/// has lint errors.
pub fn find_violations(
    p: &PolicyGraph,
    g: &SystemGraph,
    opts: &MatchOptions,
) -> Result<Vec<ViolationReport>, MatchError> {
    let matches = find_matches(p, g, opts)?;
    Ok(to_reports(p, g, matches))
}

/// True if any policy of the composition is violated.
pub fn check_composition(ps: &[PolicyGraph], g: &SystemGraph) -> Result<bool, MatchError> {
    for p in ps {
        if !find_violations(p, g, &MatchOptions::default())?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}
