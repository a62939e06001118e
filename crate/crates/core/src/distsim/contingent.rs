use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::eval::VarConditions;
use crate::lang::{edge_label, EdgeId};
use crate::matcher::PartialMatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Source,
    Destination,
}

/// An endpoint of a bound edge whose node predicate is still unevaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContingentCondition {
    pub edge: EdgeId,
    pub end: End,
}

impl fmt::Display for ContingentCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = match self.end {
            End::Source => "src",
            End::Destination => "dst",
        };
        write!(f, "{}.{end}", edge_label(self.edge))
    }
}

/// A partial match that may still owe endpoint evaluations, plus the
/// residual requirement condition of each bound edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContingentMatch {
    pub base: PartialMatch,
    pub contingents: BTreeSet<ContingentCondition>,
    /// Edge requirements evaluated against the event's attributes with no
    /// bindings. Node requirements need no attributes and are evaluated at
    /// completion instead.
    pub carried: BTreeMap<EdgeId, VarConditions>,
}

impl ContingentMatch {
    pub fn empty() -> Self {
        ContingentMatch {
            base: PartialMatch::empty(),
            contingents: BTreeSet::new(),
            carried: BTreeMap::new(),
        }
    }

    pub fn is_contingent(&self) -> bool {
        !self.contingents.is_empty()
    }

    fn discharged_by(&self, other: &ContingentMatch) -> BTreeSet<ContingentCondition> {
        self.contingents
            .iter()
            .filter(|c| !other.base.ps.edge_map.contains_key(&c.edge) || other.contingents.contains(c))
            .copied()
            .collect()
    }
}

impl fmt::Display for ContingentMatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if self.is_contingent() {
            let cs: Vec<_> = self.contingents.iter().map(|c| c.to_string()).collect();
            write!(f, " pending {}", cs.join(", "))?;
        }
        Ok(())
    }
}

/// Merges two contingent matches of one policy.
///
/// A condition on one side is dropped when the other side binds the same
/// edge without owing the same end, since that side evaluated it. The bases
/// are then unified; the surviving conditions and the carried requirement
/// conditions are unioned.
pub fn combine_contingent(a: &ContingentMatch, b: &ContingentMatch) -> Option<ContingentMatch> {
    let base = a.base.unify(&b.base)?;
    let mut contingents = a.discharged_by(b);
    contingents.extend(b.discharged_by(a));
    let mut carried = a.carried.clone();
    for (e, c) in &b.carried {
        // one edge is bound to one event, so both sides hold the same residual
        carried.entry(*e).or_insert_with(|| c.clone());
    }
    Some(ContingentMatch {
        base,
        contingents,
        carried,
    })
}
