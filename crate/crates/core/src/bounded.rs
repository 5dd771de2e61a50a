//! Local search with moves of bounded size: add up to `t` edges while
//! removing strictly fewer solution edges.
//!
//! For a candidate addition set the removal set is forced: exactly the
//! solution edges conflicting with some added edge. Removing anything else
//! only shrinks the result, so the search enumerates addition sets alone.

use crate::error::{Error, Result};
use crate::graph::{ConsecutiveMatching, DuoGraph, Edge};

/// Add `add`, remove `remove`; `remove.len() < add.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementMove {
    pub add: Vec<Edge>,
    pub remove: Vec<Edge>,
}

impl ImprovementMove {
    pub fn apply(&self, alg: &mut ConsecutiveMatching) {
        for &e in &self.remove {
            alg.remove(e);
        }
        for &e in &self.add {
            alg.insert(e).expect("move keeps a matching");
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Complete addition sets whose removal set was evaluated.
    pub candidates: u64,
    pub iterations: usize,
}

struct MoveSearch<'a> {
    pool: Vec<Edge>,
    // indices into `alg_edges` of the solution edges each pool edge conflicts with
    blockers: Vec<Vec<usize>>,
    alg_edges: &'a [Edge],
    stats: &'a mut SearchStats,
}

impl MoveSearch<'_> {
    fn search(&mut self, size: usize, start: usize, chosen: &mut Vec<usize>, removed: &mut Vec<usize>) -> bool {
        if chosen.len() == size {
            self.stats.candidates += 1;
            return removed.len() < size;
        }
        let needed = size - chosen.len();
        for k in start..=self.pool.len().saturating_sub(needed) {
            let e = self.pool[k];
            if chosen.iter().any(|&c| !self.pool[c].compatible(e)) {
                continue;
            }
            let mark = removed.len();
            for &b in &self.blockers[k] {
                if !removed.contains(&b) {
                    removed.push(b);
                }
            }
            // the removal set only grows as edges are added
            if removed.len() < size {
                chosen.push(k);
                if self.search(size, k + 1, chosen, removed) {
                    return true;
                }
                chosen.pop();
            }
            removed.truncate(mark);
        }
        false
    }
}

/// First improving move with at most `t` added edges: addition sets are
/// tried by size, then in lexicographic order.
pub fn find_move(g: &DuoGraph, t: usize, alg: &ConsecutiveMatching) -> Option<ImprovementMove> {
    find_move_counted(g, t, alg, &mut SearchStats::default())
}

fn find_move_counted(
    g: &DuoGraph,
    t: usize,
    alg: &ConsecutiveMatching,
    stats: &mut SearchStats,
) -> Option<ImprovementMove> {
    let alg_edges = alg.to_vec();
    let pool: Vec<Edge> = g.edges().iter().copied().filter(|&e| !alg.contains(e)).collect();
    let blockers = pool
        .iter()
        .map(|&e| {
            alg_edges
                .iter()
                .enumerate()
                .filter(|&(_, &f)| f.conflicts(e))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();
    let mut search = MoveSearch {
        pool,
        blockers,
        alg_edges: &alg_edges,
        stats,
    };
    for size in 1..=t.min(search.pool.len()) {
        let mut chosen = Vec::with_capacity(size);
        let mut removed = Vec::new();
        if search.search(size, 0, &mut chosen, &mut removed) {
            let mut remove: Vec<Edge> = removed.iter().map(|&k| search.alg_edges[k]).collect();
            remove.sort_unstable();
            return Some(ImprovementMove {
                add: chosen.iter().map(|&k| search.pool[k]).collect(),
                remove,
            });
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct BoundedOutcome {
    pub matching: ConsecutiveMatching,
    pub stats: SearchStats,
}

/// Applies improving moves of size at most `t` until none is left.
pub fn bounded_size_improvements(
    g: &DuoGraph,
    t: usize,
    start: &ConsecutiveMatching,
) -> Result<BoundedOutcome> {
    if t == 0 {
        return Err(Error::InvalidParameter("move size t must be at least 1".into()));
    }
    if let Some((e, f)) = start.find_conflict() {
        return Err(Error::InvalidMatching(e, f));
    }
    if let Some(e) = start.edges().find(|&e| !g.contains(e)) {
        return Err(Error::UnknownEdge(e));
    }
    let mut alg = start.clone();
    let mut stats = SearchStats::default();
    while let Some(mv) = find_move_counted(g, t, &alg, &mut stats) {
        mv.apply(&mut alg);
        stats.iterations += 1;
    }
    Ok(BoundedOutcome {
        matching: alg,
        stats,
    })
}

/// `C(n, k)` saturating at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for x in 0..k {
        // acc * (n - x) is divisible by (x + 1) after the multiplication
        acc = match acc.checked_mul(n - x) {
            Some(v) => v / (x + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Upper bound on addition sets examined in one pass over `edges` edges.
pub fn candidates_per_pass(edges: usize, t: usize) -> u128 {
    (1..=t as u128).fold(0u128, |acc, s| acc.saturating_add(binomial(edges as u128, s)))
}

/// Upper bound on addition sets examined by a whole run: each improving pass
/// grows the solution, which never exceeds `min(n_a, n_b)` edges, plus one
/// final unsuccessful pass.
pub fn projected_candidates(g: &DuoGraph, t: usize) -> u128 {
    let passes = g.n_a().min(g.n_b()) as u128 + 1;
    candidates_per_pass(g.len(), t).saturating_mul(passes)
}
