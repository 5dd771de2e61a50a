//! Test-only oracles. Nothing here calls into the solver code paths it is
//! used to check.

#![allow(dead_code)]

use duomap::greedy::GreedyTrace;
use duomap::io::{gen_mcsp_instance, gen_random_graph};
use duomap::{ConsecutiveMatching, DuoGraph, Edge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn e(i: usize, j: usize) -> Edge {
    Edge::new(i, j)
}

pub fn sample() -> DuoGraph {
    DuoGraph::from_strings(b"xyzabcb", b"abbcxyz").unwrap()
}

/// Consecutiveness straight from the quantified definition: matched
/// neighbours `a_i, a_{i+1}` go to `b_j, b_{j+1}`, the same on the B side,
/// and no node is matched twice.
pub fn consecutive_by_definition(edges: &[Edge]) -> bool {
    for (x, &f) in edges.iter().enumerate() {
        for &h in &edges[x + 1..] {
            if f.i == h.i || f.j == h.j {
                return false;
            }
        }
    }
    for &f in edges {
        for &h in edges {
            if h.i == f.i + 1 && h.j != f.j + 1 {
                return false;
            }
            if h.j == f.j + 1 && h.i != f.i + 1 {
                return false;
            }
        }
    }
    true
}

/// Edges of the duo graph by direct comparison of every position pair.
pub fn duo_edges_brute(x: &[u8], y: &[u8]) -> Vec<Edge> {
    let mut out = Vec::new();
    for i in 0..x.len().saturating_sub(1) {
        for j in 0..y.len().saturating_sub(1) {
            if x[i] == y[j] && x[i + 1] == y[j + 1] {
                out.push(e(i + 1, j + 1));
            }
        }
    }
    out
}

/// Maximum consecutive matching by enumerating all edge subsets; among
/// optima the lexicographically smallest sorted edge list.
pub fn naive_opt(g: &DuoGraph) -> Vec<Edge> {
    let edges = g.edges();
    assert!(edges.len() <= 20, "naive oracle is exponential");
    let mut best: Vec<Edge> = Vec::new();
    for mask in 0u32..(1u32 << edges.len()) {
        if (mask.count_ones() as usize) < best.len() {
            continue;
        }
        let set: Vec<Edge> = (0..edges.len())
            .filter(|&k| mask & (1 << k) != 0)
            .map(|k| edges[k])
            .collect();
        if consecutive_by_definition(&set) && (set.len() > best.len() || (set.len() == best.len() && set < best)) {
            best = set;
        }
    }
    best
}

fn subsets_up_to(items: &[Edge], max: usize) -> Vec<Vec<Edge>> {
    let mut out = vec![Vec::new()];
    for &x in items {
        let n = out.len();
        for k in 0..n {
            if out[k].len() < max {
                let mut s = out[k].clone();
                s.push(x);
                out.push(s);
            }
        }
    }
    out
}

/// Whether some `E_remove, E_add ⊆ E` with `|E_remove| < |E_add| <= t` turns
/// `alg` into a strictly larger valid solution. Both sets range over all of
/// `E`, with no shortcuts.
pub fn improving_pair_exists(g: &DuoGraph, alg: &[Edge], t: usize) -> bool {
    let adds = subsets_up_to(g.edges(), t);
    let removes = subsets_up_to(g.edges(), t.saturating_sub(1));
    for add in adds.iter().filter(|a| !a.is_empty()) {
        for remove in removes.iter().filter(|r| r.len() < add.len()) {
            let mut next: Vec<Edge> = alg.iter().copied().filter(|x| !remove.contains(x)).collect();
            for &x in add {
                if !next.contains(&x) {
                    next.push(x);
                }
            }
            if next.len() > alg.len() && consecutive_by_definition(&next) {
                return true;
            }
        }
    }
    false
}

/// All valid consecutive matchings of a small graph.
pub fn all_valid_matchings(g: &DuoGraph) -> Vec<Vec<Edge>> {
    let edges = g.edges();
    (0u32..(1u32 << edges.len()))
        .map(|mask| {
            (0..edges.len())
                .filter(|&k| mask & (1 << k) != 0)
                .map(|k| edges[k])
                .collect::<Vec<_>>()
        })
        .filter(|s| consecutive_by_definition(s))
        .collect()
}

pub fn matching(edges: &[Edge]) -> ConsecutiveMatching {
    ConsecutiveMatching::from_edges(edges.iter().copied()).unwrap()
}

/// Longest run of consecutive edges, by direct search.
pub fn longest_run(edges: &[Edge]) -> usize {
    edges
        .iter()
        .map(|&s| (0..).take_while(|&k| edges.contains(&e(s.i + k, s.j + k))).count())
        .max()
        .unwrap_or(0)
}

/// For each greedy step, the optimum edges overlapping its streak but no
/// earlier streak.
pub fn lost_optimum_edges(trace: &GreedyTrace, opt: &[Edge]) -> Vec<Vec<Edge>> {
    let mut taken: Vec<Edge> = Vec::new();
    let mut out = Vec::new();
    for step in &trace.steps {
        let streak: Vec<Edge> = step.streak.edges().collect();
        let lost: Vec<Edge> = opt
            .iter()
            .copied()
            .filter(|&o| streak.iter().any(|&s| s.overlaps(o)) && !taken.iter().any(|&s| s.overlaps(o)))
            .collect();
        taken.extend(streak);
        out.push(lost);
    }
    out
}

/// Replays a greedy trace on a fresh copy of the graph, checking that each
/// chosen streak is live and a longest live streak, and that the removed
/// edges are exactly the live edges overlapping it.
pub fn replay_trace(g: &DuoGraph, trace: &GreedyTrace, k: usize) -> Result<Vec<Edge>, String> {
    let mut live: Vec<Edge> = g.edges().to_vec();
    for step in &trace.steps {
        let streak: Vec<Edge> = step.streak.edges().collect();
        if !streak.iter().all(|s| live.contains(s)) {
            return Err(format!("step {}: streak {} not live", step.step, step.streak));
        }
        let longest = longest_run(&live);
        if step.streak.len != longest || step.streak.len < k {
            return Err(format!(
                "step {}: took length {} but longest live run is {}",
                step.step, step.streak.len, longest
            ));
        }
        let mut removed: Vec<Edge> = live
            .iter()
            .copied()
            .filter(|&x| streak.iter().any(|&s| s.overlaps(x)))
            .collect();
        removed.sort_unstable();
        if removed != step.removed {
            return Err(format!("step {}: removed set differs", step.step));
        }
        live.retain(|x| !removed.contains(x));
    }
    if longest_run(&live) >= k {
        return Err("a streak of length >= k survives".into());
    }
    Ok(live)
}

/// A labelled test instance.
pub struct Case {
    pub label: String,
    pub graph: DuoGraph,
    pub strings: Option<(Vec<u8>, Vec<u8>)>,
}

/// Deterministic mix of MCSP-structured string instances and uniform random
/// graphs with at most `max_edges` edges.
pub fn sweep(count: usize, max_edges: usize, seed: u64) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s: u64 = rng.gen();
        let case = if out.len() % 2 == 0 {
            let n = rng.gen_range(4..=13);
            let blocks = rng.gen_range(1..=n.min(6));
            let sigma = rng.gen_range(2..=4);
            let (x, y) = gen_mcsp_instance(n, blocks, sigma, s).unwrap();
            Case {
                label: format!("mcsp(n={n},blocks={blocks},sigma={sigma},seed={s})"),
                graph: DuoGraph::from_strings(&x, &y).unwrap(),
                strings: Some((x, y)),
            }
        } else {
            let n_a = rng.gen_range(2..=8);
            let n_b = rng.gen_range(2..=8);
            let p = rng.gen_range(0.1..0.5);
            Case {
                label: format!("random(n_a={n_a},n_b={n_b},p={p:.3},seed={s})"),
                graph: gen_random_graph(n_a, n_b, p, s).unwrap(),
                strings: None,
            }
        };
        if case.graph.len() <= max_edges {
            out.push(case);
        }
    }
    out
}
