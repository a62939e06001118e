//! Policy matching: initial matches per semantic piece, depth-first growth
//! into complete matches, requirement checking, and incremental checking
//! over a growing system graph.

mod check;
mod grow;
mod incremental;
mod initial;
mod types;

pub(crate) use check::ensure_lint_clean;
pub use check::{check_composition, failed_requirements, find_matches, find_violations, MatchError, ViolationReport};
pub use grow::{grow_matches, order_pieces, Grown, SameEventSets};
pub use incremental::{find_violations_incremental, MatchCache};
pub use initial::{initial_matches, match_edge, match_edge_area, match_node, Candidate, MatchOptions};
pub use types::{PartialMatch, PsMap, SnapshotRef};
