use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::lang::{PolicyGraph, SemanticPiece};
use crate::matcher::Candidate;

use super::ContingentMatch;

/// How an engine finds pool entries to combine with a new match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PoolMode {
    /// Per-piece index from system element to entries, intersected.
    #[default]
    Indexed,
    /// Every entry. The reference for differential tests.
    Linear,
}

#[derive(Clone, Debug, Default)]
struct PieceIndex {
    by_element: HashMap<Candidate, Vec<usize>>,
    unbound: Vec<usize>,
}

/// The contingent matches one engine holds for one policy.
#[derive(Clone, Debug)]
pub struct Pool {
    mode: PoolMode,
    entries: Vec<ContingentMatch>,
    known: HashSet<ContingentMatch>,
    index: BTreeMap<SemanticPiece, PieceIndex>,
}

fn bound_element(m: &ContingentMatch, piece: SemanticPiece) -> Option<Candidate> {
    match piece {
        SemanticPiece::Edge(e) => m.base.ps.edge_map.get(&e).map(|ev| Candidate::Event(ev.clone())),
        SemanticPiece::IsolatedNode(n) => m
            .base
            .ps
            .node_map
            .get(&n)
            .map(|(o, t)| Candidate::Snapshot(o.clone(), *t)),
    }
}

impl Pool {
    pub fn new(p: &PolicyGraph, mode: PoolMode) -> Self {
        Pool {
            mode,
            entries: Vec::new(),
            known: HashSet::new(),
            index: p
                .semantic_pieces()
                .into_iter()
                .map(|k| (k, PieceIndex::default()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, m: &ContingentMatch) -> bool {
        self.known.contains(m)
    }

    pub fn entries(&self) -> &[ContingentMatch] {
        &self.entries
    }

    /// Adds an entry; false if it was already present.
    pub fn insert(&mut self, m: ContingentMatch) -> bool {
        if !self.known.insert(m.clone()) {
            return false;
        }
        let i = self.entries.len();
        for (piece, ix) in &mut self.index {
            match bound_element(&m, *piece) {
                Some(el) => ix.by_element.entry(el).or_default().push(i),
                None => ix.unbound.push(i),
            }
        }
        self.entries.push(m);
        true
    }

    /// Entries that might combine with `m`, in insertion order. Indexed
    /// mode skips entries binding one of `m`'s pieces to another element;
    /// those could never unify with `m`.
    pub fn candidates(&self, m: &ContingentMatch) -> Vec<&ContingentMatch> {
        if self.mode == PoolMode::Linear {
            return self.entries.iter().collect();
        }
        let mut acc: Option<BTreeSet<usize>> = None;
        for (piece, ix) in &self.index {
            let Some(el) = bound_element(m, *piece) else {
                continue;
            };
            let mut here: BTreeSet<usize> = ix.unbound.iter().copied().collect();
            if let Some(v) = ix.by_element.get(&el) {
                here.extend(v.iter().copied());
            }
            acc = Some(match acc {
                Some(prev) => prev.intersection(&here).copied().collect(),
                None => here,
            });
        }
        match acc {
            Some(set) => set.into_iter().map(|i| &self.entries[i]).collect(),
            None => self.entries.iter().collect(),
        }
    }
}
