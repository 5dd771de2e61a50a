//! Second phase for graphs without streaks of two or more edges.
//!
//! Neighbouring node pairs `{2t-1, 2t}` are merged on both sides, a maximum
//! bipartite matching is found on the merged graph, each merged edge is
//! projected back to one original witness edge, and a pruning pass drops
//! witnesses that end next to an already kept edge.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{ConsecutiveMatching, DuoGraph, Edge};

/// Merged node index covering original node `v` (1-based on both).
pub fn merged_index(v: usize) -> usize {
    v.div_ceil(2)
}

/// The graph over merged pairs, with the original edges witnessing each
/// merged edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedGraph {
    pub n_a: usize,
    pub n_b: usize,
    witnesses: BTreeMap<(usize, usize), Vec<Edge>>,
}

impl MergedGraph {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.witnesses.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    /// Witnesses of merged edge `(t, u)`, sorted.
    pub fn witnesses(&self, t: usize, u: usize) -> &[Edge] {
        self.witnesses.get(&(t, u)).map_or(&[], Vec::as_slice)
    }

    /// A merged graph given directly by its edges, each witnessed by
    /// `(2t-1, 2u-1)`. Useful for exercising the matching routine alone.
    pub fn from_merged_edges(n_a: usize, n_b: usize, edges: &[(usize, usize)]) -> Self {
        let witnesses = edges
            .iter()
            .map(|&(t, u)| ((t, u), vec![Edge::new(2 * t - 1, 2 * u - 1)]))
            .collect();
        MergedGraph {
            n_a,
            n_b,
            witnesses,
        }
    }
}

pub fn build_merged(g: &DuoGraph) -> MergedGraph {
    let mut witnesses: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
    // edges are sorted, so each witness list ends up sorted too
    for &e in g.edges() {
        witnesses
            .entry((merged_index(e.i), merged_index(e.j)))
            .or_default()
            .push(e);
    }
    MergedGraph {
        n_a: merged_index(g.n_a()),
        n_b: merged_index(g.n_b()),
        witnesses,
    }
}

/// Maximum-cardinality matching of the merged graph (Hopcroft-Karp).
pub fn max_bipartite_matching(h: &MergedGraph) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); h.n_a + 1];
    for (t, u) in h.edges() {
        adj[t].push(u);
    }
    let mut hk = HopcroftKarp::new(h.n_a, h.n_b, adj);
    hk.run();
    let mut out: Vec<(usize, usize)> = (1..=h.n_a)
        .filter_map(|t| hk.mate_a[t].map(|u| (t, u)))
        .collect();
    out.sort_unstable();
    out
}

const INF: usize = usize::MAX;

struct HopcroftKarp {
    n_a: usize,
    adj: Vec<Vec<usize>>,
    mate_a: Vec<Option<usize>>,
    mate_b: Vec<Option<usize>>,
    dist: Vec<usize>,
}

impl HopcroftKarp {
    fn new(n_a: usize, n_b: usize, adj: Vec<Vec<usize>>) -> Self {
        HopcroftKarp {
            n_a,
            adj,
            mate_a: vec![None; n_a + 1],
            mate_b: vec![None; n_b + 1],
            dist: vec![INF; n_a + 1],
        }
    }

    fn bfs(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for t in 1..=self.n_a {
            if self.mate_a[t].is_none() {
                self.dist[t] = 0;
                queue.push_back(t);
            } else {
                self.dist[t] = INF;
            }
        }
        let mut found = false;
        while let Some(t) = queue.pop_front() {
            for &u in &self.adj[t] {
                match self.mate_b[u] {
                    None => found = true,
                    Some(t2) if self.dist[t2] == INF => {
                        self.dist[t2] = self.dist[t] + 1;
                        queue.push_back(t2);
                    }
                    Some(_) => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, t: usize) -> bool {
        for k in 0..self.adj[t].len() {
            let u = self.adj[t][k];
            let ok = match self.mate_b[u] {
                None => true,
                Some(t2) => self.dist[t2] == self.dist[t] + 1 && self.dfs(t2),
            };
            if ok {
                self.mate_a[t] = Some(u);
                self.mate_b[u] = Some(t);
                return true;
            }
        }
        self.dist[t] = INF;
        false
    }

    fn run(&mut self) {
        while self.bfs() {
            for t in 1..=self.n_a {
                if self.mate_a[t].is_none() {
                    self.dfs(t);
                }
            }
        }
    }
}

/// Result of the projection and pruning pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pruned {
    pub matching: ConsecutiveMatching,
    /// Largest number of edges evicted by a single kept edge.
    pub max_evictions: usize,
}

/// Replaces each merged edge by its smallest witness, then keeps witnesses
/// in lexicographic order, each kept edge evicting the survivors that end in
/// `a_{i-1}, a_{i+1}, b_{j-1}` or `b_{j+1}`.
pub fn project_and_prune(merged_matching: &[(usize, usize)], h: &MergedGraph) -> Pruned {
    let mut chosen: Vec<Edge> = merged_matching
        .iter()
        .filter_map(|&(t, u)| h.witnesses(t, u).first().copied())
        .collect();
    chosen.sort_unstable();
    let by_a: BTreeMap<usize, usize> = chosen.iter().enumerate().map(|(k, e)| (e.i, k)).collect();
    let by_b: BTreeMap<usize, usize> = chosen.iter().enumerate().map(|(k, e)| (e.j, k)).collect();
    let mut alive = vec![true; chosen.len()];
    let mut matching = ConsecutiveMatching::new();
    let mut max_evictions = 0;
    for k in 0..chosen.len() {
        if !alive[k] {
            continue;
        }
        let e = chosen[k];
        let mut evicted = 0;
        let near = [
            by_a.get(&(e.i + 1)),
            by_a.get(&(e.i.wrapping_sub(1))),
            by_b.get(&(e.j + 1)),
            by_b.get(&(e.j.wrapping_sub(1))),
        ];
        for &other in near.into_iter().flatten() {
            if alive[other] && other != k {
                alive[other] = false;
                evicted += 1;
            }
        }
        max_evictions = max_evictions.max(evicted);
        matching
            .insert(e)
            .expect("witnesses of a merged matching have distinct endpoints");
    }
    Pruned {
        matching,
        max_evictions,
    }
}

/// The full second phase; `g` must not contain two consecutive edges.
pub fn approx3_phase2(g: &DuoGraph) -> Result<ConsecutiveMatching> {
    if let Some(&e) = g.edges().iter().find(|e| g.contains(e.succ())) {
        return Err(Error::PreconditionViolated(format!(
            "streak {}..{} of length 2 present",
            e,
            e.succ()
        )));
    }
    let h = build_merged(g);
    let m = max_bipartite_matching(&h);
    Ok(project_and_prune(&m, &h).matching)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_valid;

    fn e(i: usize, j: usize) -> Edge {
        Edge::new(i, j)
    }

    fn residual_example() -> DuoGraph {
        DuoGraph::new(6, 6, [e(4, 1), e(5, 3)]).unwrap()
    }

    #[test]
    fn merged_graph_of_residual() {
        let h = build_merged(&residual_example());
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(2, 1), (3, 2)]);
        assert_eq!(h.witnesses(2, 1), &[e(4, 1)]);
        assert_eq!(h.witnesses(3, 2), &[e(5, 3)]);
        assert!(build_merged(&DuoGraph::empty(3, 3)).is_empty());
        let h = build_merged(&DuoGraph::new(1, 1, [e(1, 1)]).unwrap());
        assert_eq!(h.len(), 1);
        assert_eq!(h.witnesses(1, 1), &[e(1, 1)]);
    }

    #[test]
    fn odd_side_gets_singleton_merged_node() {
        let h = build_merged(&DuoGraph::new(5, 4, [e(5, 4)]).unwrap());
        assert_eq!((h.n_a, h.n_b), (3, 2));
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(3, 2)]);
    }

    #[test]
    fn hopcroft_karp_examples() {
        let h = build_merged(&residual_example());
        assert_eq!(max_bipartite_matching(&h).len(), 2);
        let star = MergedGraph::from_merged_edges(1, 3, &[(1, 1), (1, 2), (1, 3)]);
        assert_eq!(max_bipartite_matching(&star).len(), 1);
        assert!(max_bipartite_matching(&MergedGraph::from_merged_edges(2, 2, &[])).is_empty());
    }

    #[test]
    fn hopcroft_karp_needs_augmenting_path() {
        // greedy would take (1,1) and block 2
        let h = MergedGraph::from_merged_edges(2, 2, &[(1, 1), (1, 2), (2, 1)]);
        assert_eq!(max_bipartite_matching(&h).len(), 2);
    }

    #[test]
    fn pruning_evicts_neighbour() {
        let h = build_merged(&residual_example());
        let m = max_bipartite_matching(&h);
        let pruned = project_and_prune(&m, &h);
        assert_eq!(pruned.matching.to_vec(), vec![e(4, 1)]);
        assert_eq!(pruned.max_evictions, 1);
    }

    #[test]
    fn pruning_trivial_cases() {
        let g = DuoGraph::new(3, 3, [e(2, 3)]).unwrap();
        let h = build_merged(&g);
        let pruned = project_and_prune(&max_bipartite_matching(&h), &h);
        assert_eq!(pruned.matching.to_vec(), vec![e(2, 3)]);
        assert!(project_and_prune(&[], &h).matching.is_empty());
    }

    #[test]
    fn phase2_on_residual() {
        let g = residual_example();
        let m = approx3_phase2(&g).unwrap();
        assert_eq!(m.len(), 1);
        assert!(is_valid(&m, &g));
        assert!(approx3_phase2(&DuoGraph::empty(2, 2)).unwrap().is_empty());
    }

    #[test]
    fn phase2_rejects_two_streak() {
        let g = DuoGraph::new(3, 3, [e(1, 1), e(2, 2)]).unwrap();
        assert!(matches!(approx3_phase2(&g), Err(Error::PreconditionViolated(_))));
    }
}
