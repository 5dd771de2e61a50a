//! Seeded benchmark sweeps: generate instances, run solvers, compare with
//! the exact optimum where the oracle can afford it, and emit CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::exact_opt_with_cap;
use crate::graph::{is_valid, DuoGraph};
use crate::io::{gen_mcsp_instance, gen_random_graph};
use crate::pipeline::{fingerprint, Solver, SolverConfig, SolverRegistry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    Mcsp { n: usize, blocks: usize, sigma: usize },
    Random { n_a: usize, n_b: usize, p: f64 },
    /// Alternates the two generators, starting with `Mcsp`.
    Mixed {
        n: usize,
        blocks: usize,
        sigma: usize,
        p: f64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self, k: usize, seed: u64) -> Result<(&'static str, DuoGraph)> {
        match *self {
            GeneratorSpec::Mcsp { n, blocks, sigma } => {
                let (x, y) = gen_mcsp_instance(n, blocks, sigma, seed)?;
                Ok(("mcsp", DuoGraph::from_strings(&x, &y)?))
            }
            GeneratorSpec::Random { n_a, n_b, p } => Ok(("random", gen_random_graph(n_a, n_b, p, seed)?)),
            GeneratorSpec::Mixed { n, blocks, sigma, p } => {
                if k.is_multiple_of(2) {
                    GeneratorSpec::Mcsp { n, blocks, sigma }.generate(k, seed)
                } else {
                    // duo graphs of length-n strings have n - 1 nodes per side
                    let side = n.saturating_sub(1).max(1);
                    GeneratorSpec::Random {
                        n_a: side,
                        n_b: side,
                        p,
                    }
                    .generate(k, seed)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub generator: GeneratorSpec,
    pub first_seed: u64,
    pub count: usize,
    pub algorithms: Vec<String>,
    pub solver: SolverConfig,
    pub oracle_cap: usize,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: usize,
    pub seed: u64,
    pub generator: String,
    pub n_a: usize,
    pub n_b: usize,
    pub edges: usize,
    pub fingerprint: String,
    pub algorithm: String,
    pub guarantee: String,
    pub size: Option<usize>,
    pub opt: Option<usize>,
    /// `opt / size`; 1 when both are zero.
    pub ratio: Option<f64>,
    pub within_guarantee: Option<bool>,
    pub time_ms: f64,
    pub error: Option<String>,
}

struct Cell<'a> {
    instance: usize,
    seed: u64,
    generator: &'static str,
    graph: &'a DuoGraph,
    opt: Option<usize>,
}

fn run_cell(cell: &Cell<'_>, solver: &dyn Solver) -> BenchRow {
    let clock = Instant::now();
    let outcome = solver.solve(cell.graph);
    let time_ms = clock.elapsed().as_secs_f64() * 1e3;
    let guarantee = solver.guarantee();
    let mut row = BenchRow {
        instance: cell.instance,
        seed: cell.seed,
        generator: cell.generator.to_string(),
        n_a: cell.graph.n_a(),
        n_b: cell.graph.n_b(),
        edges: cell.graph.len(),
        fingerprint: fingerprint(cell.graph),
        algorithm: solver.name().to_string(),
        guarantee: guarantee.to_string(),
        size: None,
        opt: cell.opt,
        ratio: None,
        within_guarantee: None,
        time_ms,
        error: None,
    };
    match outcome {
        Ok(report) if is_valid(&report.solution, cell.graph) => {
            let size = report.size();
            row.size = Some(size);
            if let Some(opt) = cell.opt {
                row.ratio = Some(match (opt, size) {
                    (0, 0) => 1.0,
                    (_, 0) => f64::INFINITY,
                    _ => opt as f64 / size as f64,
                });
                row.within_guarantee = Some(guarantee.covers(size, opt));
            }
        }
        Ok(_) => row.error = Some("solver returned an invalid matching".into()),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every algorithm on `count` instances with seeds `first_seed..`.
/// Rows are ordered by instance, then by the order of `algorithms`.
pub fn run_bench(cfg: &BenchConfig, registry: &SolverRegistry) -> Result<Vec<BenchRow>> {
    let solvers: Vec<Box<dyn Solver>> = cfg
        .algorithms
        .iter()
        .map(|name| registry.create(name, &cfg.solver))
        .collect::<Result<_>>()?;
    let mut graphs = Vec::with_capacity(cfg.count);
    for k in 0..cfg.count {
        let seed = cfg.first_seed + k as u64;
        let (generator, g) = cfg.generator.generate(k, seed)?;
        graphs.push((seed, generator, g));
    }
    let work = || -> Vec<BenchRow> {
        graphs
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, (seed, generator, g))| {
                let opt = exact_opt_with_cap(g, cfg.oracle_cap).ok().map(|m| m.len());
                let cell = Cell {
                    instance: k,
                    seed: *seed,
                    generator,
                    graph: g,
                    opt,
                };
                solvers
                    .iter()
                    .map(|s| run_cell(&cell, s.as_ref()))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

pub const BENCH_HEADER: [&str; 15] = [
    "instance",
    "seed",
    "generator",
    "n_a",
    "n_b",
    "edges",
    "fingerprint",
    "algorithm",
    "guarantee",
    "size",
    "opt",
    "ratio",
    "within_guarantee",
    "time_ms",
    "error",
];

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    let opt_str = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.instance.to_string(),
            r.seed.to_string(),
            r.generator.clone(),
            r.n_a.to_string(),
            r.n_b.to_string(),
            r.edges.to_string(),
            r.fingerprint.clone(),
            r.algorithm.clone(),
            r.guarantee.clone(),
            opt_str(r.size.map(|v| v.to_string())),
            opt_str(r.opt.map(|v| v.to_string())),
            opt_str(r.ratio.map(|v| format!("{v:.6}"))),
            opt_str(r.within_guarantee.map(|v| v.to_string())),
            format!("{:.3}", r.time_ms),
            opt_str(r.error.clone()),
        ])?;
    }
    w.flush()
}
