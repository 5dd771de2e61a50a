//! Local improvements: grow the solution by single additions and by swaps
//! that remove one solution edge and add two.
//!
//! [`local_improvements_reference`] is the direct search. [`LocalSearch`] is
//! the queue-driven variant: a candidate edge is re-examined only after a
//! solution edge near it changes. Per node `v` it keeps the list `L_v` of
//! non-solution edges ending in `v` that conflict with exactly one solution
//! edge, so a swap partner is found by scanning a handful of list entries.
//!
//! Throughout, "conflict" means overlapping without being compatible. Two
//! neighbours of one streak overlap but never block each other.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{ConsecutiveMatching, DuoGraph, Edge, EdgeId, Node};

/// Largest number of viable `L_v` entries inspected per node in a swap
/// attempt. At most three of them can clash with the candidate edge, so the
/// fourth always yields a swap.
pub const LIST_SCAN_CAP: usize = 4;

/// FIFO of candidate edges without duplicates.
#[derive(Debug, Clone)]
pub struct CandidateQueue {
    fifo: VecDeque<EdgeId>,
    queued: Vec<bool>,
}

impl CandidateQueue {
    pub fn new(edge_count: usize) -> Self {
        CandidateQueue {
            fifo: VecDeque::new(),
            queued: vec![false; edge_count],
        }
    }

    /// Returns false if `id` was already waiting.
    pub fn push(&mut self, id: EdgeId) -> bool {
        if self.queued[id] {
            return false;
        }
        self.queued[id] = true;
        self.fifo.push_back(id);
        true
    }

    pub fn pop(&mut self) -> Option<EdgeId> {
        let id = self.fifo.pop_front()?;
        self.queued[id] = false;
        Some(id)
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.queued[id]
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }
}

/// Intrusive doubly linked lists of edges, one list per node of one side.
#[derive(Debug, Clone)]
struct NodeLists {
    head: Vec<Option<EdgeId>>,
    prev: Vec<Option<EdgeId>>,
    next: Vec<Option<EdgeId>>,
    member: Vec<bool>,
}

impl NodeLists {
    fn new(nodes: usize, edges: usize) -> Self {
        NodeLists {
            head: vec![None; nodes + 1],
            prev: vec![None; edges],
            next: vec![None; edges],
            member: vec![false; edges],
        }
    }

    fn insert(&mut self, node: usize, id: EdgeId) {
        if self.member[id] {
            return;
        }
        self.member[id] = true;
        self.prev[id] = None;
        self.next[id] = self.head[node];
        if let Some(h) = self.head[node] {
            self.prev[h] = Some(id);
        }
        self.head[node] = Some(id);
    }

    fn remove(&mut self, node: usize, id: EdgeId) {
        if !self.member[id] {
            return;
        }
        self.member[id] = false;
        let (p, n) = (self.prev[id].take(), self.next[id].take());
        match p {
            Some(p) => self.next[p] = n,
            None => self.head[node] = n,
        }
        if let Some(n) = n {
            self.prev[n] = p;
        }
    }

    fn iter(&self, node: usize) -> impl Iterator<Item = EdgeId> + '_ {
        let mut cur = self.head.get(node).copied().flatten();
        std::iter::from_fn(move || {
            let id = cur?;
            cur = self.next[id];
            Some(id)
        })
    }
}

/// `L_v` for every node `v` of both sides.
#[derive(Debug, Clone)]
pub struct SingleConflictLists {
    a: NodeLists,
    b: NodeLists,
}

impl SingleConflictLists {
    fn new(g: &DuoGraph) -> Self {
        SingleConflictLists {
            a: NodeLists::new(g.n_a(), g.len()),
            b: NodeLists::new(g.n_b(), g.len()),
        }
    }

    fn set(&mut self, e: Edge, id: EdgeId, member: bool) {
        if member {
            self.a.insert(e.i, id);
            self.b.insert(e.j, id);
        } else {
            self.a.remove(e.i, id);
            self.b.remove(e.j, id);
        }
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.a.member[id]
    }

    pub fn at(&self, v: Node) -> Box<dyn Iterator<Item = EdgeId> + '_> {
        match v {
            Node::A(i) => Box::new(self.a.iter(i)),
            Node::B(j) => Box::new(self.b.iter(j)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LocalSearchStats {
    pub enqueues: usize,
    pub dequeues: usize,
    pub additions: usize,
    pub swaps: usize,
    /// Most viable `L_v` entries inspected for one node in one swap attempt.
    pub max_list_scan: usize,
}

/// State of the queue-driven local search on a fixed graph.
#[derive(Debug, Clone)]
pub struct LocalSearch<'g> {
    g: &'g DuoGraph,
    in_alg: Vec<bool>,
    alg_a: Vec<Option<EdgeId>>,
    alg_b: Vec<Option<EdgeId>>,
    size: usize,
    queue: CandidateQueue,
    lists: SingleConflictLists,
    stats: LocalSearchStats,
}

impl<'g> LocalSearch<'g> {
    /// Empty solution, every edge queued in lexicographic order.
    pub fn new(g: &'g DuoGraph) -> Self {
        let mut s = LocalSearch {
            g,
            in_alg: vec![false; g.len()],
            alg_a: vec![None; g.n_a() + 1],
            alg_b: vec![None; g.n_b() + 1],
            size: 0,
            queue: CandidateQueue::new(g.len()),
            lists: SingleConflictLists::new(g),
            stats: LocalSearchStats::default(),
        };
        for id in 0..g.len() {
            s.enqueue(id);
        }
        s
    }

    /// Starts from a given valid solution.
    pub fn with_solution(g: &'g DuoGraph, start: &ConsecutiveMatching) -> Result<Self> {
        if let Some((e, f)) = start.find_conflict() {
            return Err(Error::InvalidMatching(e, f));
        }
        let mut s = Self::new(g);
        for e in start.edges() {
            let id = g.edge_id(e).ok_or(Error::UnknownEdge(e))?;
            s.insert(id);
        }
        for id in 0..g.len() {
            s.refresh(id);
        }
        Ok(s)
    }

    fn alg_at(&self, v: Node) -> Option<EdgeId> {
        match v {
            Node::A(i) => self.alg_a.get(i).copied().flatten(),
            Node::B(j) => self.alg_b.get(j).copied().flatten(),
        }
    }

    /// Solution edges conflicting with `e`, found among the solution edges
    /// ending in `Close(e)`.
    fn conflicts(&self, e: Edge) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = Vec::with_capacity(4);
        for v in self.g.close_set(e) {
            if let Some(f) = self.alg_at(v) {
                if self.g.edge(f).conflicts(e) && !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        out
    }

    fn refresh(&mut self, id: EdgeId) {
        let e = self.g.edge(id);
        let single = !self.in_alg[id] && self.conflicts(e).len() == 1;
        self.lists.set(e, id, single);
    }

    fn enqueue(&mut self, id: EdgeId) {
        self.refresh(id);
        if self.queue.push(id) {
            self.stats.enqueues += 1;
        }
    }

    fn enqueue_overlap(&mut self, e: Edge) {
        for id in self.g.overlap_ids(e) {
            self.enqueue(id);
        }
    }

    fn insert(&mut self, id: EdgeId) {
        let e = self.g.edge(id);
        self.in_alg[id] = true;
        self.alg_a[e.i] = Some(id);
        self.alg_b[e.j] = Some(id);
        self.size += 1;
        self.refresh(id);
    }

    fn erase(&mut self, id: EdgeId) {
        let e = self.g.edge(id);
        self.in_alg[id] = false;
        self.alg_a[e.i] = None;
        self.alg_b[e.j] = None;
        self.size -= 1;
        self.refresh(id);
    }

    /// Whether removing `removed` and adding `added` keeps the solution valid.
    /// Assumes `added` are not in the solution.
    fn swap_is_valid(&self, removed: Option<EdgeId>, added: &[Edge]) -> bool {
        for (k, &x) in added.iter().enumerate() {
            if added[..k].iter().any(|&y| y == x || !x.compatible(y)) {
                return false;
            }
            if self.conflicts(x).iter().any(|&f| Some(f) != removed) {
                return false;
            }
        }
        true
    }

    fn commit_swap(&mut self, e_del: EdgeId, e: EdgeId, partner: EdgeId) {
        self.erase(e_del);
        self.insert(e);
        self.insert(partner);
        self.stats.swaps += 1;
        self.stats.additions += 1;
        for x in [e, partner, e_del] {
            self.enqueue_overlap(self.g.edge(x));
        }
    }

    /// Tries to replace the only solution edge conflicting with `e` by `e`
    /// and one more edge. Returns true iff the solution grew.
    pub fn try_adding_pair_with(&mut self, e: Edge) -> bool {
        let Some(id) = self.g.edge_id(e) else {
            return false;
        };
        if self.in_alg[id] {
            return false;
        }
        let conflicts = self.conflicts(e);
        let [e_del] = conflicts[..] else {
            return false;
        };
        for partner in [e.pred(), Some(e.succ())].into_iter().flatten() {
            let Some(pid) = self.g.edge_id(partner) else {
                continue;
            };
            if !self.in_alg[pid] && self.swap_is_valid(Some(e_del), &[e, partner]) {
                self.commit_swap(e_del, id, pid);
                return true;
            }
        }
        let near_e = self.g.close_set(e);
        for v in self.g.close_set(self.g.edge(e_del)) {
            if near_e.contains(&v) {
                continue;
            }
            let mut found = None;
            let mut viable = 0;
            for pid in self.lists.at(v) {
                // an entry whose single conflict lies elsewhere can only be the
                // streak neighbour of e_del; it does not count towards the cap
                let partner = self.g.edge(pid);
                if self.conflicts(partner) != [e_del] {
                    continue;
                }
                viable += 1;
                if self.swap_is_valid(Some(e_del), &[e, partner]) {
                    found = Some(pid);
                    break;
                }
                if viable == LIST_SCAN_CAP {
                    break;
                }
            }
            self.stats.max_list_scan = self.stats.max_list_scan.max(viable);
            if let Some(pid) = found {
                self.commit_swap(e_del, id, pid);
                return true;
            }
        }
        false
    }

    /// Processes one queued candidate. Returns false when the queue is empty.
    pub fn step(&mut self) -> bool {
        let Some(id) = self.queue.pop() else {
            return false;
        };
        self.stats.dequeues += 1;
        if self.in_alg[id] {
            return true;
        }
        let e = self.g.edge(id);
        match self.conflicts(e).len() {
            0 => {
                self.insert(id);
                self.stats.additions += 1;
                self.enqueue_overlap(e);
            }
            1 => {
                self.try_adding_pair_with(e);
            }
            _ => {}
        }
        true
    }

    pub fn run(&mut self) {
        while self.step() {}
    }

    pub fn solution(&self) -> ConsecutiveMatching {
        ConsecutiveMatching::from_edges(
            (0..self.g.len())
                .filter(|&id| self.in_alg[id])
                .map(|id| self.g.edge(id)),
        )
        .expect("solution is kept a matching")
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn stats(&self) -> LocalSearchStats {
        self.stats
    }

    pub fn queue(&self) -> &CandidateQueue {
        &self.queue
    }

    pub fn lists(&self) -> &SingleConflictLists {
        &self.lists
    }

    /// Recomputes every list membership from scratch and compares.
    pub fn lists_consistent(&self) -> bool {
        (0..self.g.len()).all(|id| {
            let single = !self.in_alg[id] && self.conflicts(self.g.edge(id)).len() == 1;
            self.lists.contains(id) == single
        })
    }
}

/// Queue-driven local improvements from the empty solution.
pub fn fast_local_improvements(g: &DuoGraph) -> ConsecutiveMatching {
    let mut ls = LocalSearch::new(g);
    ls.run();
    ls.solution()
}

/// Direct local search: each round adds one edge if possible and then tries
/// one swap of a solution edge for two others; stops when a round gains nothing.
pub fn local_improvements_reference(g: &DuoGraph) -> ConsecutiveMatching {
    let edges = g.edges();
    let mut alg = ConsecutiveMatching::new();
    let conflict_ids = |alg: &ConsecutiveMatching, e: Edge| -> Vec<Edge> {
        alg.edges().filter(|&f| f.conflicts(e)).collect()
    };
    loop {
        let before = alg.len();
        if let Some(&e) = edges
            .iter()
            .find(|&&e| !alg.contains(e) && conflict_ids(&alg, e).is_empty())
        {
            alg.insert(e).expect("conflict-free edge");
        }
        let swap = 'search: {
            for del in alg.to_vec() {
                let usable: Vec<Edge> = edges
                    .iter()
                    .copied()
                    .filter(|&e| !alg.contains(e) && conflict_ids(&alg, e).iter().all(|&f| f == del))
                    .collect();
                for (k, &e1) in usable.iter().enumerate() {
                    for &e2 in &usable[k + 1..] {
                        if e1.compatible(e2) {
                            break 'search Some((del, e1, e2));
                        }
                    }
                }
            }
            None
        };
        if let Some((del, e1, e2)) = swap {
            alg.remove(del);
            alg.insert(e1).expect("valid swap");
            alg.insert(e2).expect("valid swap");
        }
        if alg.len() == before {
            break;
        }
    }
    alg
}
