//! Exact solvers for small instances.

use crate::error::{Error, Result};
use crate::graph::{ConsecutiveMatching, DuoGraph, Edge};

pub const DEFAULT_ORACLE_CAP: usize = 24;

/// Maximum consecutive matching by branch and bound; among optima the
/// lexicographically smallest edge list is returned.
pub fn exact_opt(g: &DuoGraph) -> Result<ConsecutiveMatching> {
    exact_opt_with_cap(g, DEFAULT_ORACLE_CAP)
}

pub fn exact_opt_with_cap(g: &DuoGraph, cap: usize) -> Result<ConsecutiveMatching> {
    if g.len() > cap {
        return Err(Error::InstanceTooLarge {
            edges: g.len(),
            cap,
        });
    }
    let mut bb = BranchAndBound {
        edges: g.edges(),
        chosen: Vec::new(),
        best: Vec::new(),
    };
    bb.branch(0);
    Ok(ConsecutiveMatching::from_edges(bb.best).expect("optimum is a matching"))
}

struct BranchAndBound<'a> {
    edges: &'a [Edge],
    chosen: Vec<Edge>,
    best: Vec<Edge>,
}

impl BranchAndBound<'_> {
    fn fits(&self, e: Edge) -> bool {
        self.chosen.iter().all(|&c| c.compatible(e))
    }

    fn branch(&mut self, k: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        let open = self.edges[k..].iter().filter(|&&e| self.fits(e)).count();
        if self.chosen.len() + open <= self.best.len() {
            return;
        }
        let Some(pos) = (k..self.edges.len()).find(|&p| self.fits(self.edges[p])) else {
            return;
        };
        self.chosen.push(self.edges[pos]);
        self.branch(pos + 1);
        self.chosen.pop();
        self.branch(pos + 1);
    }
}

/// True iff no move adding at most `t` edges while removing fewer solution
/// edges yields a valid solution. Enumerates every removal set and looks for
/// an addition set one larger.
pub fn audit_local_optimum(g: &DuoGraph, alg: &ConsecutiveMatching, t: usize) -> Result<bool> {
    audit_local_optimum_with_cap(g, alg, t, DEFAULT_ORACLE_CAP)
}

pub fn audit_local_optimum_with_cap(
    g: &DuoGraph,
    alg: &ConsecutiveMatching,
    t: usize,
    cap: usize,
) -> Result<bool> {
    if g.len() > cap {
        return Err(Error::InstanceTooLarge {
            edges: g.len(),
            cap,
        });
    }
    if let Some((e, f)) = alg.find_conflict() {
        return Err(Error::InvalidMatching(e, f));
    }
    let alg_edges = alg.to_vec();
    let outside: Vec<Edge> = g.edges().iter().copied().filter(|&e| !alg.contains(e)).collect();
    let max_remove = t.saturating_sub(1).min(alg_edges.len());
    let mut kept = Vec::with_capacity(alg_edges.len());
    for mask in 0u64..(1u64 << alg_edges.len()) {
        let removed = mask.count_ones() as usize;
        if removed > max_remove {
            continue;
        }
        kept.clear();
        kept.extend(
            alg_edges
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask & (1 << k) == 0)
                .map(|(_, &e)| e),
        );
        let usable: Vec<Edge> = outside
            .iter()
            .copied()
            .filter(|&e| kept.iter().all(|&f| f.compatible(e)))
            .collect();
        // a valid addition set larger than needed contains a valid one of
        // exactly removed + 1 edges
        if has_compatible_subset(&usable, removed + 1, 0, &mut Vec::new()) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn has_compatible_subset(pool: &[Edge], size: usize, start: usize, chosen: &mut Vec<Edge>) -> bool {
    if chosen.len() == size {
        return true;
    }
    let needed = size - chosen.len();
    for k in start..=pool.len().saturating_sub(needed) {
        if k >= pool.len() {
            break;
        }
        let e = pool[k];
        if chosen.iter().all(|&c| c.compatible(e)) {
            chosen.push(e);
            if has_compatible_subset(pool, size, k + 1, chosen) {
                chosen.pop();
                return true;
            }
            chosen.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_valid;
    use crate::local_search::fast_local_improvements;

    fn e(i: usize, j: usize) -> Edge {
        Edge::new(i, j)
    }

    fn trigger() -> DuoGraph {
        DuoGraph::new(3, 3, [e(2, 2), e(1, 3), e(3, 1)]).unwrap()
    }

    #[test]
    fn sample_pair_optimum() {
        let g = DuoGraph::from_strings(b"xyzabcb", b"abbcxyz").unwrap();
        let opt = exact_opt(&g).unwrap();
        assert_eq!(opt.to_vec(), vec![e(1, 5), e(2, 6), e(4, 1)]);
        assert!(is_valid(&opt, &g));
    }

    #[test]
    fn small_optima() {
        assert!(exact_opt(&DuoGraph::empty(3, 3)).unwrap().is_empty());
        let g = DuoGraph::new(6, 6, [e(4, 1), e(5, 3)]).unwrap();
        assert_eq!(exact_opt(&g).unwrap().len(), 1);
        assert_eq!(exact_opt(&trigger()).unwrap().len(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let g = DuoGraph::new(25, 25, (1..=25).map(|k| e(k, 26 - k))).unwrap();
        assert_eq!(
            exact_opt(&g),
            Err(Error::InstanceTooLarge { edges: 25, cap: 24 })
        );
        assert!(exact_opt_with_cap(&g, 25).is_ok());
    }

    #[test]
    fn audits() {
        let g = trigger();
        let fast = fast_local_improvements(&g);
        assert!(audit_local_optimum(&g, &fast, 2).unwrap());
        let blocked = ConsecutiveMatching::from_edges([e(2, 2)]).unwrap();
        assert!(!audit_local_optimum(&g, &blocked, 2).unwrap());
        assert!(audit_local_optimum(&g, &blocked, 1).unwrap());
        let opt = exact_opt(&g).unwrap();
        for t in 1..=4 {
            assert!(audit_local_optimum(&g, &opt, t).unwrap());
        }
    }

    #[test]
    fn empty_solution_fails_audit_on_nonempty_graph() {
        assert!(!audit_local_optimum(&trigger(), &ConsecutiveMatching::new(), 1).unwrap());
        assert!(audit_local_optimum(&DuoGraph::empty(2, 2), &ConsecutiveMatching::new(), 3).unwrap());
    }
}
