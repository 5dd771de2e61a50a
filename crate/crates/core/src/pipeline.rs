//! End-to-end solvers. Each one runs greedy streak selection with some
//! threshold `k`, then a second phase on the residual graph, and reports the
//! combined solution together with its approximation guarantee.
//!
//! Solvers implement [`Solver`] and are looked up by name in a
//! [`SolverRegistry`]:
//!
//! | name        | threshold | second phase                 | guarantee |
//! |-------------|-----------|------------------------------|-----------|
//! | `approx4`   | 1         | none                         | 4         |
//! | `approx3`   | 2         | merged-pair matching         | 3         |
//! | `approx267` | 3         | queue-driven local search    | 8/3       |
//! | `eps`       | ⌈2/ε⌉     | bounded moves, t = ⌈4/ε⌉ + 1 | 2 + ε     |

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_integer::Integer;
use sha2::{Digest, Sha256};

use crate::bounded::{bounded_size_improvements, projected_candidates};
use crate::error::{Error, Result};
use crate::graph::{is_valid, ConsecutiveMatching, DuoGraph};
use crate::greedy::greedy;
use crate::local_search::fast_local_improvements;
use crate::matching::approx3_phase2;

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// An approximation ratio `numer / denom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guarantee {
    pub numer: u64,
    pub denom: u64,
}

impl Guarantee {
    pub fn new(numer: u64, denom: u64) -> Self {
        let g = numer.gcd(&denom).max(1);
        Guarantee {
            numer: numer / g,
            denom: denom / g,
        }
    }

    pub fn integer(r: u64) -> Self {
        Guarantee::new(r, 1)
    }

    /// Smallest fraction with denominator 10^6 that is at least `value`.
    pub fn at_least(value: f64) -> Self {
        const SCALE: u64 = 1_000_000;
        let numer = (value * SCALE as f64 - 1e-6).ceil() as u64;
        Guarantee::new(numer, SCALE)
    }

    pub fn value(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }

    /// Whether `ratio * size >= opt`, in exact integer arithmetic.
    pub fn covers(&self, size: usize, opt: usize) -> bool {
        self.numer as u128 * size as u128 >= self.denom as u128 * opt as u128
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom == 1 {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

/// Outcome of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub algorithm: String,
    pub guarantee: Guarantee,
    pub epsilon: Option<f64>,
    /// Greedy threshold.
    pub k: usize,
    /// Move size of the bounded search, when used.
    pub t: Option<usize>,
    pub solution: ConsecutiveMatching,
    pub phase1_size: usize,
    pub phase2_size: usize,
    pub phase1_ms: f64,
    pub phase2_ms: f64,
    pub fingerprint: String,
}

impl PipelineReport {
    pub fn size(&self) -> usize {
        self.solution.len()
    }
}

/// Short stable hash of an instance.
pub fn fingerprint(g: &DuoGraph) -> String {
    let mut h = Sha256::new();
    for v in [g.n_a(), g.n_b()] {
        h.update((v as u64).to_le_bytes());
    }
    for e in g.edges() {
        h.update((e.i as u64).to_le_bytes());
        h.update((e.j as u64).to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Options shared by all solvers; each reads what it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub epsilon: Option<f64>,
    /// Cap on projected candidate evaluations for the bounded search.
    pub budget: u128,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

pub trait Solver: Send + Sync {
    fn name(&self) -> &str;
    fn guarantee(&self) -> Guarantee;
    fn solve(&self, g: &DuoGraph) -> Result<PipelineReport>;
}

type SecondPhase = fn(&DuoGraph) -> Result<ConsecutiveMatching>;

struct TwoPhase {
    name: &'static str,
    k: usize,
    guarantee: Guarantee,
    second: Option<SecondPhase>,
}

impl Solver for TwoPhase {
    fn name(&self) -> &str {
        self.name
    }

    fn guarantee(&self) -> Guarantee {
        self.guarantee
    }

    fn solve(&self, g: &DuoGraph) -> Result<PipelineReport> {
        let run = run_two_phase(g, self.k, |residual| match self.second {
            Some(phase) => phase(residual),
            None => Ok(ConsecutiveMatching::new()),
        })?;
        Ok(run.into_report(self.name, self.guarantee, None, self.k, None, g))
    }
}

struct EpsSolver {
    epsilon: f64,
    k: usize,
    t: usize,
    budget: u128,
}

impl EpsSolver {
    fn new(epsilon: f64, budget: u128) -> Result<Self> {
        let (k, t) = eps_parameters(epsilon)?;
        Ok(EpsSolver {
            epsilon,
            k,
            t,
            budget,
        })
    }
}

/// Greedy threshold `k = max(1, ⌈2/ε⌉)` and move size `t = ⌈4/ε⌉ + 1`.
pub fn eps_parameters(epsilon: f64) -> Result<(usize, usize)> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    // shave float noise so that e.g. 2 / 0.1 does not round up to 21
    let ceil = |x: f64| (x - 1e-9).ceil().max(0.0) as usize;
    Ok((ceil(2.0 / epsilon).max(1), ceil(4.0 / epsilon) + 1))
}

impl Solver for EpsSolver {
    fn name(&self) -> &str {
        "eps"
    }

    fn guarantee(&self) -> Guarantee {
        Guarantee::at_least(2.0 + self.epsilon)
    }

    fn solve(&self, g: &DuoGraph) -> Result<PipelineReport> {
        let run = run_two_phase(g, self.k, |residual| {
            let projected = projected_candidates(residual, self.t);
            if projected > self.budget {
                return Err(Error::SizeGuard {
                    projected,
                    budget: self.budget,
                });
            }
            Ok(bounded_size_improvements(residual, self.t, &ConsecutiveMatching::new())?.matching)
        })?;
        Ok(run.into_report(
            "eps",
            self.guarantee(),
            Some(self.epsilon),
            self.k,
            Some(self.t),
            g,
        ))
    }
}

struct TwoPhaseRun {
    first: ConsecutiveMatching,
    second: ConsecutiveMatching,
    phase1_ms: f64,
    phase2_ms: f64,
}

impl TwoPhaseRun {
    fn into_report(
        self,
        name: &str,
        guarantee: Guarantee,
        epsilon: Option<f64>,
        k: usize,
        t: Option<usize>,
        g: &DuoGraph,
    ) -> PipelineReport {
        let solution = combine(&self.first, &self.second, g);
        PipelineReport {
            algorithm: name.to_string(),
            guarantee,
            epsilon,
            k,
            t,
            phase1_size: self.first.len(),
            phase2_size: self.second.len(),
            solution,
            phase1_ms: self.phase1_ms,
            phase2_ms: self.phase2_ms,
            fingerprint: fingerprint(g),
        }
    }
}

fn run_two_phase(
    g: &DuoGraph,
    k: usize,
    second: impl FnOnce(&DuoGraph) -> Result<ConsecutiveMatching>,
) -> Result<TwoPhaseRun> {
    let clock = Instant::now();
    let greedy = greedy(g, k)?;
    let phase1_ms = clock.elapsed().as_secs_f64() * 1e3;
    let clock = Instant::now();
    let rest = if greedy.residual.is_empty() {
        ConsecutiveMatching::new()
    } else {
        second(&greedy.residual)?
    };
    let phase2_ms = clock.elapsed().as_secs_f64() * 1e3;
    Ok(TwoPhaseRun {
        first: greedy.matching,
        second: rest,
        phase1_ms,
        phase2_ms,
    })
}

/// Union of the greedy streaks and a residual solution. The residual graph
/// holds no edge overlapping a greedy streak, so the union is valid; both
/// facts are asserted.
fn combine(first: &ConsecutiveMatching, second: &ConsecutiveMatching, g: &DuoGraph) -> ConsecutiveMatching {
    for e in second.edges() {
        let near = (e.i.saturating_sub(1)..=e.i + 1).any(|i| first.partner_of_a(i).is_some())
            || (e.j.saturating_sub(1)..=e.j + 1).any(|j| first.partner_of_b(j).is_some());
        assert!(!near, "second-phase edge {e} overlaps a greedy streak");
    }
    let all = first.union(second).expect("phases are node-disjoint");
    assert!(is_valid(&all, g), "combined solution must be valid");
    all
}

pub fn approx4(g: &DuoGraph) -> Result<PipelineReport> {
    builtin_two_phase("approx4").solve(g)
}

pub fn approx3(g: &DuoGraph) -> Result<PipelineReport> {
    builtin_two_phase("approx3").solve(g)
}

pub fn approx267(g: &DuoGraph) -> Result<PipelineReport> {
    builtin_two_phase("approx267").solve(g)
}

pub fn approx_eps(g: &DuoGraph, epsilon: f64) -> Result<PipelineReport> {
    approx_eps_with_budget(g, epsilon, DEFAULT_BUDGET)
}

pub fn approx_eps_with_budget(g: &DuoGraph, epsilon: f64, budget: u128) -> Result<PipelineReport> {
    EpsSolver::new(epsilon, budget)?.solve(g)
}

fn builtin_two_phase(name: &str) -> TwoPhase {
    match name {
        "approx4" => TwoPhase {
            name: "approx4",
            k: 1,
            guarantee: Guarantee::integer(4),
            second: None,
        },
        "approx3" => TwoPhase {
            name: "approx3",
            k: 2,
            guarantee: Guarantee::integer(3),
            second: Some(approx3_phase2),
        },
        "approx267" => TwoPhase {
            name: "approx267",
            k: 3,
            guarantee: Guarantee::new(8, 3),
            second: Some(|r| Ok(fast_local_improvements(r))),
        },
        _ => unreachable!("not a built-in two-phase solver: {name}"),
    }
}

pub type SolverFactory = fn(&SolverConfig) -> Result<Box<dyn Solver>>;

/// Solvers by name.
#[derive(Clone, Default)]
pub struct SolverRegistry {
    factories: BTreeMap<String, SolverFactory>,
}

impl SolverRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `approx4`, `approx3`, `approx267` and `eps`.
    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register("approx4", |_| Ok(Box::new(builtin_two_phase("approx4"))));
        r.register("approx3", |_| Ok(Box::new(builtin_two_phase("approx3"))));
        r.register("approx267", |_| Ok(Box::new(builtin_two_phase("approx267"))));
        r.register("eps", |cfg| {
            let epsilon = cfg
                .epsilon
                .ok_or_else(|| Error::InvalidParameter("algorithm `eps` requires an epsilon".into()))?;
            Ok(Box::new(EpsSolver::new(epsilon, cfg.budget)?))
        });
        r
    }

    pub fn register(&mut self, name: &str, factory: SolverFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn create(&self, name: &str, cfg: &SolverConfig) -> Result<Box<dyn Solver>> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownAlgorithm(name.to_string()))?;
        factory(cfg)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }
}

impl fmt::Debug for SolverRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
