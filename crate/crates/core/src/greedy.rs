//! Greedy streak selection: repeatedly take a longest live streak of length
//! at least `k` and delete every edge overlapping it.
//!
//! Streaks of the live graph are kept in a [`StreakIndex`]. Edges of one
//! streak are doubly linked, each edge knows its owning streak, and streaks
//! are grouped by length. Deleting an edge shrinks or splits its streak and
//! moves the pieces to their new groups; a split relabels only the shorter
//! piece, whose length is read off its first and last edge.
//!
//! Groups are min-heaps keyed by `(p, q)` with lazy deletion: a streak that
//! changes leaves its old entry behind, and stale entries are dropped when
//! they reach the top of the longest group. Since edges are never restored,
//! a stale entry cannot become valid again.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{ConsecutiveMatching, DuoGraph, Edge, EdgeId, Streak};

const NIL: u32 = u32::MAX;

fn link(id: u32) -> Option<EdgeId> {
    (id != NIL).then_some(id as EdgeId)
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    first: EdgeId,
    last: EdgeId,
    alive: bool,
}

/// Counters collected while maintaining a [`StreakIndex`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub removals: usize,
    pub relocations: usize,
    pub relabels: usize,
}

/// Live streaks of a graph, grouped by length.
#[derive(Debug, Clone)]
pub struct StreakIndex<'g> {
    graph: &'g DuoGraph,
    live: Vec<bool>,
    // u32 links keep the index small enough to stay in cache on large
    // graphs; NIL marks a missing neighbour
    prev: Vec<u32>,
    next: Vec<u32>,
    owner: Vec<u32>,
    slots: Vec<Slot>,
    // groups[s] holds (p, q, slot) for every live streak of length s, plus
    // stale entries; counts[s] is the number of live ones
    groups: Vec<BinaryHeap<Reverse<(usize, usize, usize)>>>,
    counts: Vec<usize>,
    top: usize,
    stats: IndexStats,
}

/// Builds the streak index of `g` in one pass over the sorted edge list.
pub fn initial_streak_scan(g: &DuoGraph) -> StreakIndex<'_> {
    StreakIndex::new(g)
}

impl<'g> StreakIndex<'g> {
    pub fn new(graph: &'g DuoGraph) -> Self {
        let m = graph.len();
        assert!(m < NIL as usize, "graph too large for the streak index");
        let mut idx = StreakIndex {
            graph,
            live: vec![true; m],
            prev: vec![NIL; m],
            next: vec![NIL; m],
            owner: vec![0; m],
            slots: Vec::new(),
            groups: Vec::new(),
            counts: Vec::new(),
            top: 0,
            stats: IndexStats::default(),
        };
        // edges arrive sorted by (i, j), so a predecessor is always seen first
        for (id, &e) in graph.edges().iter().enumerate() {
            match e.pred().and_then(|p| graph.edge_id(p)) {
                Some(p) => {
                    let s = idx.owner[p];
                    idx.next[p] = id as u32;
                    idx.prev[id] = p as u32;
                    idx.owner[id] = s;
                    idx.slots[s as usize].last = id;
                }
                None => {
                    idx.owner[id] = idx.slots.len() as u32;
                    idx.slots.push(Slot {
                        first: id,
                        last: id,
                        alive: true,
                    });
                }
            }
        }
        for s in 0..idx.slots.len() {
            idx.attach(s);
        }
        idx
    }

    fn span(&self, first: EdgeId, last: EdgeId) -> usize {
        self.graph.edge(last).i - self.graph.edge(first).i + 1
    }

    fn key(&self, s: usize) -> (usize, usize) {
        let first = self.graph.edge(self.slots[s].first);
        (first.i - 1, first.j - 1)
    }

    fn attach(&mut self, s: usize) {
        let len = self.span(self.slots[s].first, self.slots[s].last);
        if self.groups.len() <= len {
            self.groups.resize_with(len + 1, BinaryHeap::new);
            self.counts.resize(len + 1, 0);
        }
        let (p, q) = self.key(s);
        self.groups[len].push(Reverse((p, q, s)));
        self.counts[len] += 1;
        self.top = self.top.max(len);
    }

    fn detach(&mut self, s: usize) {
        let len = self.span(self.slots[s].first, self.slots[s].last);
        self.counts[len] -= 1;
    }

    fn is_current(&self, len: usize, (p, q, s): (usize, usize, usize)) -> bool {
        let slot = self.slots[s];
        slot.alive && self.span(slot.first, slot.last) == len && self.key(s) == (p, q)
    }

    fn relabel(&mut self, from: EdgeId, to: EdgeId, s: usize) {
        let mut cur = Some(from);
        while let Some(id) = cur {
            self.owner[id] = s as u32;
            self.stats.relabels += 1;
            if id == to {
                break;
            }
            cur = link(self.next[id]);
        }
    }

    pub fn is_live(&self, e: Edge) -> bool {
        self.graph.edge_id(e).is_some_and(|id| self.live[id])
    }

    pub(crate) fn is_live_id(&self, id: EdgeId) -> bool {
        self.live[id]
    }

    /// Deletes `e` from the live graph, shrinking or splitting its streak.
    pub fn remove_edge(&mut self, e: Edge) -> Result<()> {
        let id = self.graph.edge_id(e).ok_or(Error::UnknownEdge(e))?;
        if !self.live[id] {
            return Err(Error::EdgeAlreadyRemoved(e));
        }
        self.remove_id(id);
        Ok(())
    }

    pub(crate) fn remove_id(&mut self, id: EdgeId) {
        let s = self.owner[id] as usize;
        self.detach(s);
        self.live[id] = false;
        self.stats.removals += 1;
        let before = link(std::mem::replace(&mut self.prev[id], NIL));
        let after = link(std::mem::replace(&mut self.next[id], NIL));
        match (before, after) {
            (None, None) => self.slots[s].alive = false,
            (Some(p), None) => {
                self.next[p] = NIL;
                self.slots[s].last = p;
                self.relocate(s);
            }
            (None, Some(n)) => {
                self.prev[n] = NIL;
                self.slots[s].first = n;
                self.relocate(s);
            }
            (Some(p), Some(n)) => {
                self.next[p] = NIL;
                self.prev[n] = NIL;
                let Slot { first, last, .. } = self.slots[s];
                let t = self.slots.len();
                if self.span(n, last) <= self.span(first, p) {
                    self.slots.push(Slot {
                        first: n,
                        last,
                        alive: true,
                    });
                    self.slots[s].last = p;
                    self.relabel(n, last, t);
                } else {
                    self.slots.push(Slot {
                        first,
                        last: p,
                        alive: true,
                    });
                    self.slots[s].first = n;
                    self.relabel(first, p, t);
                }
                self.relocate(s);
                self.relocate(t);
            }
        }
    }

    fn relocate(&mut self, s: usize) {
        self.stats.relocations += 1;
        self.attach(s);
    }

    fn streak_of(&self, s: usize) -> Streak {
        let (p, q) = self.key(s);
        Streak::new(p, q, self.span(self.slots[s].first, self.slots[s].last))
    }

    /// A longest live streak, ties broken by smallest `(p, q)`.
    pub fn longest(&mut self) -> Option<Streak> {
        while self.top > 0 && self.counts[self.top] == 0 {
            self.top -= 1;
        }
        let len = self.top;
        loop {
            let &Reverse(entry) = self.groups.get(len)?.peek()?;
            if self.is_current(len, entry) {
                return Some(Streak::new(entry.0, entry.1, len));
            }
            self.groups[len].pop();
        }
    }

    /// Number of live streaks of length `len`.
    pub fn group_len(&self, len: usize) -> usize {
        self.counts.get(len).copied().unwrap_or(0)
    }

    /// All live streaks, sorted by `(p, q)`.
    pub fn live_streaks(&self) -> Vec<Streak> {
        let mut out: Vec<Streak> = (0..self.slots.len())
            .filter(|&s| self.slots[s].alive)
            .map(|s| self.streak_of(s))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn live_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.graph
            .edges()
            .iter()
            .zip(&self.live)
            .filter_map(|(&e, &l)| l.then_some(e))
    }

    pub fn stats(&self) -> IndexStats {
        self.stats
    }
}

/// One greedy step: the streak taken and every edge deleted because of it
/// (the streak's own edges included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyStep {
    pub step: usize,
    pub streak: Streak,
    pub removed: Vec<Edge>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyTrace {
    pub steps: Vec<GreedyStep>,
}

impl GreedyTrace {
    pub fn streaks(&self) -> impl Iterator<Item = Streak> + '_ {
        self.steps.iter().map(|s| s.streak)
    }
}

#[derive(Debug, Clone)]
pub struct GreedyOutcome {
    pub matching: ConsecutiveMatching,
    pub residual: DuoGraph,
    pub trace: GreedyTrace,
    pub stats: IndexStats,
}

/// Greedy(k): takes longest live streaks while they have at least `k` edges.
pub fn greedy(g: &DuoGraph, k: usize) -> Result<GreedyOutcome> {
    if k == 0 {
        return Err(Error::InvalidParameter("greedy threshold k must be at least 1".into()));
    }
    let mut idx = StreakIndex::new(g);
    let mut matching = ConsecutiveMatching::new();
    let mut trace = GreedyTrace::default();
    while let Some(streak) = idx.longest() {
        if streak.len < k {
            break;
        }
        let mut removed = Vec::new();
        for e in streak.edges() {
            for id in g.overlapping(e) {
                if idx.is_live_id(id) {
                    idx.remove_id(id);
                    removed.push(g.edge(id));
                }
            }
            matching
                .insert(e)
                .expect("streak edges are node-disjoint from earlier streaks");
        }
        removed.sort_unstable();
        trace.steps.push(GreedyStep {
            step: trace.steps.len() + 1,
            streak,
            removed,
        });
    }
    let residual = g.filter(|id| idx.is_live_id(id));
    Ok(GreedyOutcome {
        matching,
        residual,
        trace,
        stats: idx.stats(),
    })
}
