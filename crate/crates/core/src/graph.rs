//! Instance vocabulary: the duo graph, edges, streaks and consecutive matchings.
//!
//! Indices are 1-based on both sides. An edge `(i, j)` joins node `a_i` to
//! node `b_j`; when the graph comes from a pair of strings, `a_i` stands for
//! the duo `X[i]X[i+1]` and `b_j` for `Y[j]Y[j+1]`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An edge `(a_i, b_j)` of the bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge {
    pub i: usize,
    pub j: usize,
}

impl Edge {
    pub const fn new(i: usize, j: usize) -> Self {
        Edge { i, j }
    }

    /// Edges overlap when their endpoints are within distance one on either
    /// side. Every edge overlaps itself.
    pub fn overlaps(self, other: Edge) -> bool {
        self.i.abs_diff(other.i) <= 1 || self.j.abs_diff(other.j) <= 1
    }

    /// Whether two distinct edges may both belong to a consecutive matching:
    /// either they do not overlap, or they are neighbours in one streak.
    pub fn compatible(self, other: Edge) -> bool {
        let di = other.i as isize - self.i as isize;
        let dj = other.j as isize - self.j as isize;
        (di.abs() > 1 && dj.abs() > 1) || (di == dj && di.abs() == 1)
    }

    /// Overlapping but not compatible.
    pub fn conflicts(self, other: Edge) -> bool {
        self != other && !self.compatible(other)
    }

    pub fn succ(self) -> Edge {
        Edge::new(self.i + 1, self.j + 1)
    }

    pub fn pred(self) -> Option<Edge> {
        (self.i > 1 && self.j > 1).then(|| Edge::new(self.i - 1, self.j - 1))
    }
}

impl From<(usize, usize)> for Edge {
    fn from((i, j): (usize, usize)) -> Self {
        Edge::new(i, j)
    }
}

impl From<[usize; 2]> for Edge {
    fn from([i, j]: [usize; 2]) -> Self {
        Edge::new(i, j)
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.i, e.j]
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

pub fn edges_overlap(e: Edge, f: Edge) -> bool {
    e.overlaps(f)
}

pub fn compatible(e: Edge, f: Edge) -> bool {
    e.compatible(f)
}

/// A node on one side of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    A(usize),
    B(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::A(i) => write!(f, "a{i}"),
            Node::B(j) => write!(f, "b{j}"),
        }
    }
}

pub type EdgeId = usize;

/// The MCBM instance. Edges are kept sorted lexicographically and addressed
/// by their position (`EdgeId`) in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuoGraph {
    n_a: usize,
    n_b: usize,
    edges: Vec<Edge>,
    // edges at a_i have ids a_start[i]..a_start[i + 1]; the ids of edges
    // at b_j are b_ids[b_start[j]..b_start[j + 1]]
    a_ids: Vec<EdgeId>,
    a_start: Vec<usize>,
    b_ids: Vec<EdgeId>,
    b_start: Vec<usize>,
}

impl DuoGraph {
    /// Builds a graph, dropping duplicate edges.
    pub fn new(n_a: usize, n_b: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut sorted = Vec::new();
        for e in edges {
            if e.i == 0 || e.j == 0 || e.i > n_a || e.j > n_b {
                return Err(Error::IndexOutOfRange { edge: e, n_a, n_b });
            }
            sorted.push(e);
        }
        sorted.sort_unstable();
        sorted.dedup();
        Ok(Self::from_sorted(n_a, n_b, sorted))
    }

    pub fn empty(n_a: usize, n_b: usize) -> Self {
        Self::from_sorted(n_a, n_b, Vec::new())
    }

    fn from_sorted(n_a: usize, n_b: usize, edges: Vec<Edge>) -> Self {
        let a_start = offsets(n_a, edges.iter().map(|e| e.i));
        let b_start = offsets(n_b, edges.iter().map(|e| e.j));
        let mut fill = b_start.clone();
        let mut b_ids = vec![0; edges.len()];
        for (id, e) in edges.iter().enumerate() {
            b_ids[fill[e.j]] = id;
            fill[e.j] += 1;
        }
        let a_ids = (0..edges.len()).collect();
        DuoGraph {
            n_a,
            n_b,
            edges,
            a_ids,
            a_start,
            b_ids,
            b_start,
        }
    }

    /// The duo graph of an MPSM instance: `a_i ~ b_j` iff the duos
    /// `X[i]X[i+1]` and `Y[j]Y[j+1]` are equal.
    pub fn from_strings(x: &[u8], y: &[u8]) -> Result<Self> {
        check_permutation(x, y)?;
        let n = x.len() - 1;
        let mut by_duo: HashMap<(u8, u8), Vec<usize>> = HashMap::new();
        for j in 0..n {
            by_duo.entry((y[j], y[j + 1])).or_default().push(j + 1);
        }
        let mut edges = Vec::new();
        for i in 0..n {
            if let Some(js) = by_duo.get(&(x[i], x[i + 1])) {
                edges.extend(js.iter().map(|&j| Edge::new(i + 1, j)));
            }
        }
        // already sorted: i ascending, then j ascending within a bucket
        Ok(Self::from_sorted(n, n, edges))
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edge_id(e).is_some()
    }

    pub fn edge_id(&self, e: Edge) -> Option<EdgeId> {
        if e.i == 0 || e.i > self.n_a {
            return None;
        }
        let (lo, hi) = (self.a_start[e.i], self.a_start[e.i + 1]);
        self.edges[lo..hi].binary_search(&e).ok().map(|k| lo + k)
    }

    pub fn has_node(&self, v: Node) -> bool {
        match v {
            Node::A(i) => (1..=self.n_a).contains(&i),
            Node::B(j) => (1..=self.n_b).contains(&j),
        }
    }

    /// Ids of the edges ending in `v`; empty for nodes outside the graph.
    pub fn edges_at(&self, v: Node) -> &[EdgeId] {
        let (ids, start, k) = match v {
            Node::A(i) => (&self.a_ids, &self.a_start, i),
            Node::B(j) => (&self.b_ids, &self.b_start, j),
        };
        if k == 0 || k + 1 >= start.len() {
            return &[];
        }
        &ids[start[k]..start[k + 1]]
    }

    pub fn degree(&self, v: Node) -> usize {
        self.edges_at(v).len()
    }

    /// The existing nodes among `a_{i-1}, a_i, a_{i+1}, b_{j-1}, b_j, b_{j+1}`.
    pub fn close_set(&self, e: Edge) -> Vec<Node> {
        close_nodes(e)
            .filter(|&v| self.has_node(v))
            .collect()
    }

    /// Ids of all edges overlapping `e`, each reported once.
    pub fn overlap_ids(&self, e: Edge) -> Vec<EdgeId> {
        self.overlapping(e).collect()
    }

    /// Iterator form of [`DuoGraph::overlap_ids`].
    pub fn overlapping(&self, e: Edge) -> impl Iterator<Item = EdgeId> + '_ {
        close_nodes(e).flat_map(move |v| {
            self.edges_at(v).iter().copied().filter(move |&id| match v {
                // an edge overlapping on both sides would be seen twice
                Node::B(_) => self.edges[id].i.abs_diff(e.i) > 1,
                Node::A(_) => true,
            })
        })
    }

    /// All edges overlapping `e`, sorted.
    pub fn overlap_set(&self, e: Edge) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.overlap_ids(e).into_iter().map(|id| self.edges[id]).collect();
        out.sort_unstable();
        out
    }

    /// The subgraph on the same node sets keeping edges whose id passes `keep`.
    pub fn filter(&self, mut keep: impl FnMut(EdgeId) -> bool) -> DuoGraph {
        let edges = (0..self.edges.len())
            .filter(|&id| keep(id))
            .map(|id| self.edges[id])
            .collect();
        Self::from_sorted(self.n_a, self.n_b, edges)
    }

    /// Longest run of consecutive edges present in the graph.
    pub fn longest_streak(&self) -> usize {
        let mut run: HashMap<Edge, usize> = HashMap::with_capacity(self.edges.len());
        let mut best = 0;
        for &e in &self.edges {
            let len = e.pred().and_then(|p| run.get(&p)).map_or(1, |l| l + 1);
            run.insert(e, len);
            best = best.max(len);
        }
        best
    }
}

/// Offsets for nodes `1..=n` given each edge's endpoint; node `k` owns
/// positions `start[k]..start[k + 1]`.
fn offsets(n: usize, nodes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut start = vec![0; n + 2];
    for k in nodes {
        start[k + 1] += 1;
    }
    for k in 1..start.len() {
        start[k] += start[k - 1];
    }
    start
}

fn close_nodes(e: Edge) -> impl Iterator<Item = Node> {
    let a = [e.i - 1, e.i, e.i + 1].map(Node::A);
    let b = [e.j - 1, e.j, e.j + 1].map(Node::B);
    a.into_iter()
        .chain(b)
        .filter(|v| !matches!(v, Node::A(0) | Node::B(0)))
}

fn check_permutation(x: &[u8], y: &[u8]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyString);
    }
    let mut counts = [0i64; 256];
    for (&a, &b) in x.iter().zip(y) {
        counts[a as usize] += 1;
        counts[b as usize] -= 1;
    }
    if counts.iter().any(|&c| c != 0) {
        return Err(Error::PermutationMismatch);
    }
    Ok(())
}

/// A maximal run of consecutive edges `(p+1, q+1), ..., (p+len, q+len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Streak {
    pub p: usize,
    pub q: usize,
    pub len: usize,
}

impl Streak {
    pub fn new(p: usize, q: usize, len: usize) -> Self {
        Streak { p, q, len }
    }

    pub fn first(&self) -> Edge {
        Edge::new(self.p + 1, self.q + 1)
    }

    pub fn last(&self) -> Edge {
        Edge::new(self.p + self.len, self.q + self.len)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (1..=self.len).map(|k| Edge::new(self.p + k, self.q + k))
    }
}

impl fmt::Display for Streak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.first(), self.last())
    }
}

/// A set of edges with per-side occupancy. Construction only enforces the
/// matching property; consecutiveness is checked by [`is_valid`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConsecutiveMatching {
    edges: BTreeSet<Edge>,
    a_side: HashMap<usize, usize>,
    b_side: HashMap<usize, usize>,
}

impl ConsecutiveMatching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut m = Self::new();
        for e in edges {
            m.insert(e)?;
        }
        Ok(m)
    }

    /// Adds `e`, failing if it shares an endpoint with a different edge.
    /// Re-inserting an existing edge is a no-op.
    pub fn insert(&mut self, e: Edge) -> Result<()> {
        if self.edges.contains(&e) {
            return Ok(());
        }
        if let Some(&j) = self.a_side.get(&e.i) {
            return Err(Error::NotAMatching(Edge::new(e.i, j), e));
        }
        if let Some(&i) = self.b_side.get(&e.j) {
            return Err(Error::NotAMatching(Edge::new(i, e.j), e));
        }
        self.edges.insert(e);
        self.a_side.insert(e.i, e.j);
        self.b_side.insert(e.j, e.i);
        Ok(())
    }

    pub fn remove(&mut self, e: Edge) -> bool {
        if self.edges.remove(&e) {
            self.a_side.remove(&e.i);
            self.b_side.remove(&e.j);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    pub fn partner_of_a(&self, i: usize) -> Option<usize> {
        self.a_side.get(&i).copied()
    }

    pub fn partner_of_b(&self, j: usize) -> Option<usize> {
        self.b_side.get(&j).copied()
    }

    /// First pair of edges violating consecutiveness, if any. Only edges at
    /// neighbouring nodes can conflict, so each edge checks at most four others.
    pub fn find_conflict(&self) -> Option<(Edge, Edge)> {
        for &e in &self.edges {
            let near_a = [e.i + 1, e.i.wrapping_sub(1)]
                .into_iter()
                .filter_map(|i| self.a_side.get(&i).map(|&j| Edge::new(i, j)));
            let near_b = [e.j + 1, e.j.wrapping_sub(1)]
                .into_iter()
                .filter_map(|j| self.b_side.get(&j).map(|&i| Edge::new(i, j)));
            if let Some(f) = near_a.chain(near_b).find(|&f| !e.compatible(f)) {
                return Some((e.min(f), e.max(f)));
            }
        }
        None
    }

    pub fn is_consecutive(&self) -> bool {
        self.find_conflict().is_none()
    }

    /// Union of two matchings; fails if the result is not a matching.
    pub fn union(&self, other: &ConsecutiveMatching) -> Result<ConsecutiveMatching> {
        let mut out = self.clone();
        for e in other.edges() {
            out.insert(e)?;
        }
        Ok(out)
    }
}

/// True iff every edge of `m` is in `g`, `m` is a matching, and every pair of
/// its edges is compatible.
pub fn is_valid(m: &ConsecutiveMatching, g: &DuoGraph) -> bool {
    m.edges().all(|e| g.contains(e)) && m.is_consecutive()
}

/// Splits a valid matching into its streaks, sorted by `p`.
pub fn decompose_streaks(m: &ConsecutiveMatching) -> Result<Vec<Streak>> {
    if let Some((e, f)) = m.find_conflict() {
        return Err(Error::InvalidMatching(e, f));
    }
    let mut out: Vec<Streak> = Vec::new();
    for e in m.edges() {
        match out.last_mut() {
            Some(s) if s.last().succ() == e => s.len += 1,
            _ => out.push(Streak::new(e.i - 1, e.j - 1, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, j: usize) -> Edge {
        Edge::new(i, j)
    }

    fn sample() -> DuoGraph {
        DuoGraph::from_strings(b"xyzabcb", b"abbcxyz").unwrap()
    }

    #[test]
    fn builds_sample_pair_graph() {
        let g = sample();
        assert_eq!(g.n_a(), 6);
        assert_eq!(g.n_b(), 6);
        assert_eq!(g.edges(), &[e(1, 5), e(2, 6), e(4, 1), e(5, 3)]);
    }

    #[test]
    fn tiny_string_instances() {
        let g = DuoGraph::from_strings(b"ab", b"ab").unwrap();
        assert_eq!((g.n_a(), g.n_b()), (1, 1));
        assert_eq!(g.edges(), &[e(1, 1)]);
        assert!(DuoGraph::from_strings(b"ab", b"ba").unwrap().is_empty());
        let g = DuoGraph::from_strings(b"a", b"a").unwrap();
        assert_eq!((g.n_a(), g.len()), (0, 0));
    }

    #[test]
    fn rejects_bad_strings() {
        assert_eq!(
            DuoGraph::from_strings(b"abc", b"abd"),
            Err(Error::PermutationMismatch)
        );
        assert!(matches!(
            DuoGraph::from_strings(b"abc", b"ab"),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(DuoGraph::from_strings(b"", b""), Err(Error::EmptyString));
    }

    #[test]
    fn new_dedups_and_checks_bounds() {
        let g = DuoGraph::new(3, 3, [e(2, 2), e(1, 1), e(2, 2)]).unwrap();
        assert_eq!(g.edges(), &[e(1, 1), e(2, 2)]);
        assert!(matches!(
            DuoGraph::new(3, 3, [e(4, 1)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(DuoGraph::new(3, 3, [e(0, 1)]).is_err());
    }

    #[test]
    fn overlap_examples() {
        assert!(edges_overlap(e(3, 7), e(4, 8)));
        assert!(edges_overlap(e(3, 7), e(3, 7)));
        assert!(!edges_overlap(e(1, 5), e(4, 1)));
    }

    #[test]
    fn compatibility_examples() {
        assert!(compatible(e(1, 5), e(2, 6)));
        assert!(!compatible(e(4, 1), e(5, 3)));
        assert!(compatible(e(1, 1), e(3, 3)));
        // same node
        assert!(!compatible(e(1, 1), e(1, 4)));
        // anti-diagonal neighbours
        assert!(!compatible(e(2, 2), e(1, 3)));
    }

    #[test]
    fn validity_examples() {
        let g = sample();
        let m = ConsecutiveMatching::from_edges([e(1, 5), e(2, 6), e(4, 1)]).unwrap();
        assert!(is_valid(&m, &g));
        let bad = ConsecutiveMatching::from_edges([e(4, 1), e(5, 3)]).unwrap();
        assert!(!is_valid(&bad, &g));
        assert!(is_valid(&ConsecutiveMatching::new(), &g));
        let foreign = ConsecutiveMatching::from_edges([e(3, 3)]).unwrap();
        assert!(!is_valid(&foreign, &g));
    }

    #[test]
    fn matching_rejects_shared_endpoint() {
        assert!(matches!(
            ConsecutiveMatching::from_edges([e(1, 1), e(1, 2)]),
            Err(Error::NotAMatching(..))
        ));
    }

    #[test]
    fn decompose_examples() {
        let m = ConsecutiveMatching::from_edges([e(1, 5), e(2, 6), e(4, 1)]).unwrap();
        assert_eq!(
            decompose_streaks(&m).unwrap(),
            vec![Streak::new(0, 4, 2), Streak::new(3, 0, 1)]
        );
        assert!(decompose_streaks(&ConsecutiveMatching::new()).unwrap().is_empty());
        let m = ConsecutiveMatching::from_edges([e(2, 2)]).unwrap();
        assert_eq!(decompose_streaks(&m).unwrap(), vec![Streak::new(1, 1, 1)]);
        let bad = ConsecutiveMatching::from_edges([e(4, 1), e(5, 3)]).unwrap();
        assert!(matches!(decompose_streaks(&bad), Err(Error::InvalidMatching(..))));
    }

    #[test]
    fn close_set_examples() {
        let g = DuoGraph::empty(2, 2);
        assert_eq!(
            g.close_set(e(1, 1)),
            vec![Node::A(1), Node::A(2), Node::B(1), Node::B(2)]
        );
        assert_eq!(DuoGraph::empty(4, 4).close_set(e(3, 3)).len(), 6);
        assert_eq!(
            DuoGraph::empty(1, 1).close_set(e(1, 1)),
            vec![Node::A(1), Node::B(1)]
        );
    }

    #[test]
    fn overlap_set_examples() {
        let g = sample();
        assert_eq!(g.overlap_set(e(4, 1)), vec![e(4, 1), e(5, 3)]);
        assert_eq!(g.overlap_set(e(1, 5)), vec![e(1, 5), e(2, 6)]);
        assert!(DuoGraph::empty(3, 3).overlap_set(e(2, 2)).is_empty());
    }

    #[test]
    fn overlap_set_has_no_duplicates() {
        let g = DuoGraph::new(3, 3, [e(1, 1), e(1, 2), e(2, 1), e(2, 2), e(3, 3)]).unwrap();
        let ids = g.overlap_ids(e(2, 2));
        let mut uniq = ids.clone();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(ids.len(), uniq.len());
        assert_eq!(ids.len(), 5);
    }

    #[test]
    fn longest_streak_counts_runs() {
        let g = DuoGraph::new(6, 6, (1..=5).map(|k| e(k, k)).chain([e(1, 6)])).unwrap();
        assert_eq!(g.longest_streak(), 5);
        assert_eq!(sample().longest_streak(), 2);
    }
}
