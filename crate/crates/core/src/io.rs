//! Instance files, generators, letter mappings and report output.
//!
//! Two text formats are understood:
//!
//! ```text
//! mpsm            mcbm 6 6 2
//! xyzabcb         4 1
//! abbcxyz         5 3
//! ```
//!
//! The first holds a string pair (single-byte letters), the second an
//! explicit bipartite graph with 1-based `i j` edge lines.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{decompose_streaks, ConsecutiveMatching, DuoGraph, Edge};
use crate::pipeline::PipelineReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Mpsm { x: Vec<u8>, y: Vec<u8> },
    Mcbm(DuoGraph),
}

impl Instance {
    pub fn graph(&self) -> Result<DuoGraph> {
        match self {
            Instance::Mpsm { x, y } => DuoGraph::from_strings(x, y),
            Instance::Mcbm(g) => Ok(g.clone()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(1, "input is not valid UTF-8"))?;
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut fields = header.split_whitespace();
    match fields.next() {
        Some("mpsm") if fields.next().is_none() => {
            let x = lines.next().ok_or_else(|| parse_err(2, "missing first string"))?;
            let y = lines.next().ok_or_else(|| parse_err(3, "missing second string"))?;
            if let Some((k, _)) = lines.enumerate().find(|(_, l)| !l.trim().is_empty()) {
                return Err(parse_err(k + 4, "unexpected content after the strings"));
            }
            let (x, y) = (x.as_bytes().to_vec(), y.as_bytes().to_vec());
            DuoGraph::from_strings(&x, &y)?;
            Ok(Instance::Mpsm { x, y })
        }
        Some("mcbm") => {
            let nums: Vec<usize> = fields
                .map(|f| f.parse().map_err(|_| parse_err(1, format!("bad number `{f}`"))))
                .collect::<Result<_>>()?;
            let [n_a, n_b, m] = nums[..] else {
                return Err(parse_err(1, "header must be `mcbm nA nB m`"));
            };
            let mut edges = Vec::with_capacity(m);
            for (k, line) in lines.enumerate() {
                let lineno = k + 2;
                if line.trim().is_empty() {
                    continue;
                }
                let parts: Vec<usize> = line
                    .split_whitespace()
                    .map(|f| f.parse().map_err(|_| parse_err(lineno, format!("bad number `{f}`"))))
                    .collect::<Result<_>>()?;
                let [i, j] = parts[..] else {
                    return Err(parse_err(lineno, "edge line must be `i j`"));
                };
                if i == 0 || j == 0 || i > n_a || j > n_b {
                    return Err(Error::IndexOutOfRange {
                        edge: Edge::new(i, j),
                        n_a,
                        n_b,
                    });
                }
                edges.push(Edge::new(i, j));
            }
            if edges.len() != m {
                return Err(parse_err(1, format!("header announces {m} edges, found {}", edges.len())));
            }
            Ok(Instance::Mcbm(DuoGraph::new(n_a, n_b, edges)?))
        }
        _ => Err(parse_err(1, "header must be `mpsm` or `mcbm nA nB m`")),
    }
}

pub fn serialize_instance(inst: &Instance) -> Vec<u8> {
    let mut out = Vec::new();
    match inst {
        Instance::Mpsm { x, y } => {
            out.extend_from_slice(b"mpsm\n");
            out.extend_from_slice(x);
            out.push(b'\n');
            out.extend_from_slice(y);
            out.push(b'\n');
        }
        Instance::Mcbm(g) => {
            out.extend(format!("mcbm {} {} {}\n", g.n_a(), g.n_b(), g.len()).bytes());
            for e in g.edges() {
                out.extend(format!("{} {}\n", e.i, e.j).bytes());
            }
        }
    }
    out
}

/// A letter mapping: position `p` of X (1-based) goes to position `pi[p-1]` of Y.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterMapping {
    pub pi: Vec<usize>,
}

impl LetterMapping {
    pub fn image(&self, p: usize) -> usize {
        self.pi[p - 1]
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// Bijective onto `1..=|Y|` and letter-preserving.
    pub fn is_valid_for(&self, x: &[u8], y: &[u8]) -> bool {
        if self.pi.len() != x.len() || x.len() != y.len() {
            return false;
        }
        let mut seen = vec![false; y.len() + 1];
        self.pi.iter().enumerate().all(|(k, &q)| {
            let fresh = (1..=y.len()).contains(&q) && !std::mem::replace(&mut seen[q], true);
            fresh && x[k] == y[q - 1]
        })
    }

    /// Number of `p` with `pi(p+1) = pi(p) + 1`; for a letter-preserving
    /// mapping each of these is a preserved duo.
    pub fn preserved_duos(&self) -> usize {
        self.pi.windows(2).filter(|w| w[1] == w[0] + 1).count()
    }
}

/// Realizes a consecutive matching as a letter mapping. Each streak
/// `(p, q, len)` maps X-positions `p+1..=p+len+1` onto `q+1..=q+len+1`;
/// leftover letters are paired per character in ascending index order.
pub fn extract_letter_mapping(x: &[u8], y: &[u8], m: &ConsecutiveMatching) -> Result<LetterMapping> {
    let g = DuoGraph::from_strings(x, y)?;
    if let Some(e) = m.edges().find(|&e| !g.contains(e)) {
        return Err(Error::UnknownEdge(e));
    }
    let streaks = decompose_streaks(m)?;
    let n = x.len();
    let mut pi = vec![0usize; n];
    let mut used = vec![false; n + 1];
    for s in &streaks {
        for k in 1..=s.len + 1 {
            let (p, q) = (s.p + k, s.q + k);
            debug_assert!(pi[p - 1] == 0 && !used[q], "streak letter blocks overlap");
            pi[p - 1] = q;
            used[q] = true;
        }
    }
    let mut free_y: [Vec<usize>; 256] = std::array::from_fn(|_| Vec::new());
    for q in (1..=n).rev() {
        if !used[q] {
            free_y[y[q - 1] as usize].push(q);
        }
    }
    for p in 1..=n {
        if pi[p - 1] == 0 {
            pi[p - 1] = free_y[x[p - 1] as usize]
                .pop()
                .expect("strings are letter permutations of each other");
        }
    }
    Ok(LetterMapping { pi })
}

/// Number of blocks X is cut into by the mapping: a block ends at `p` when
/// `p = |X|` or `pi(p+1) != pi(p) + 1`.
pub fn mcsp_pieces(mapping: &LetterMapping) -> usize {
    let n = mapping.len();
    (1..=n)
        .filter(|&p| p == n || mapping.image(p + 1) != mapping.image(p) + 1)
        .count()
}

fn alphabet(sigma: usize) -> Result<Vec<u8>> {
    if !(1..=62).contains(&sigma) {
        return Err(Error::InvalidParameter(format!("alphabet size {sigma} not in 1..=62")));
    }
    Ok((b'a'..=b'z').chain(b'A'..=b'Z').chain(b'0'..=b'9').take(sigma).collect())
}

/// A random X over `sigma` letters and a Y obtained by cutting X into
/// `blocks` pieces and shuffling them.
pub fn gen_mcsp_instance(n: usize, blocks: usize, sigma: usize, seed: u64) -> Result<(Vec<u8>, Vec<u8>)> {
    if n == 0 || blocks == 0 || blocks > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= blocks <= n, got blocks={blocks}, n={n}"
        )));
    }
    let letters = alphabet(sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<u8> = (0..n).map(|_| letters[rng.gen_range(0..sigma)]).collect();
    let mut cuts: Vec<usize> = index::sample(&mut rng, n - 1, blocks - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let bounds: Vec<usize> = std::iter::once(0).chain(cuts).chain(std::iter::once(n)).collect();
    let mut pieces: Vec<&[u8]> = bounds.windows(2).map(|w| &x[w[0]..w[1]]).collect();
    pieces.shuffle(&mut rng);
    let y = pieces.concat();
    Ok((x, y))
}

/// Each of the `n_a * n_b` edges present independently with probability `p`.
pub fn gen_random_graph(n_a: usize, n_b: usize, p: f64, seed: u64) -> Result<DuoGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 1..=n_a {
        for j in 1..=n_b {
            if rng.gen_bool(p) {
                edges.push(Edge::new(i, j));
            }
        }
    }
    DuoGraph::new(n_a, n_b, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub phase1: f64,
    pub phase2: f64,
}

/// JSON form of a solve result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub format_version: u32,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub size: usize,
    pub guarantee: String,
    pub fingerprint: String,
    pub edges: Vec<Edge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<usize>,
    pub timings_ms: Timings,
}

impl SolveOutput {
    pub fn from_report(report: &PipelineReport) -> Self {
        SolveOutput {
            format_version: FORMAT_VERSION,
            algorithm: report.algorithm.clone(),
            epsilon: report.epsilon,
            k: report.k,
            t: report.t,
            size: report.size(),
            guarantee: report.guarantee.to_string(),
            fingerprint: report.fingerprint.clone(),
            edges: report.solution.to_vec(),
            mapping: None,
            pieces: None,
            timings_ms: Timings {
                phase1: report.phase1_ms,
                phase2: report.phase2_ms,
            },
        }
    }

    /// Attaches the letter mapping and MCSP piece count of an MPSM instance.
    pub fn with_mapping(mut self, mapping: &LetterMapping) -> Self {
        self.pieces = Some(mcsp_pieces(mapping));
        self.mapping = Some(mapping.pi.clone());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub const CSV_HEADER: [&'static str; 8] = [
        "algorithm",
        "epsilon",
        "size",
        "guarantee",
        "fingerprint",
        "edges",
        "phase1_ms",
        "phase2_ms",
    ];

    /// One-row CSV with header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::CSV_HEADER).expect("in-memory write");
        let edges = self
            .edges
            .iter()
            .map(|e| format!("{}:{}", e.i, e.j))
            .collect::<Vec<_>>()
            .join(" ");
        w.write_record([
            self.algorithm.clone(),
            self.epsilon.map(|e| e.to_string()).unwrap_or_default(),
            self.size.to_string(),
            self.guarantee.clone(),
            self.fingerprint.clone(),
            edges,
            format!("{:.3}", self.timings_ms.phase1),
            format!("{:.3}", self.timings_ms.phase2),
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush to vec")).expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_opt;

    const SAMPLE_X: &[u8] = b"xyzabcb";
    const SAMPLE_Y: &[u8] = b"abbcxyz";

    fn e(i: usize, j: usize) -> Edge {
        Edge::new(i, j)
    }

    #[test]
    fn sample_pair_mapping() {
        let m = ConsecutiveMatching::from_edges([e(1, 5), e(2, 6), e(4, 1)]).unwrap();
        let map = extract_letter_mapping(SAMPLE_X, SAMPLE_Y, &m).unwrap();
        assert_eq!(map.pi, vec![5, 6, 7, 1, 2, 4, 3]);
        assert!(map.is_valid_for(SAMPLE_X, SAMPLE_Y));
        assert_eq!(map.preserved_duos(), 3);
        assert_eq!(mcsp_pieces(&map), 4);
    }

    #[test]
    fn identity_mapping() {
        let x = b"abcab";
        let g = DuoGraph::from_strings(x, x).unwrap();
        let stair = ConsecutiveMatching::from_edges((1..=4).map(|k| e(k, k))).unwrap();
        assert!(crate::graph::is_valid(&stair, &g));
        let map = extract_letter_mapping(x, x, &stair).unwrap();
        assert_eq!(map.pi, vec![1, 2, 3, 4, 5]);
        assert_eq!(map.preserved_duos(), 4);
        assert_eq!(mcsp_pieces(&map), 1);
    }

    #[test]
    fn empty_matching_still_bijective() {
        let map = extract_letter_mapping(SAMPLE_X, SAMPLE_Y, &ConsecutiveMatching::new()).unwrap();
        assert!(map.is_valid_for(SAMPLE_X, SAMPLE_Y));
        assert_eq!(map.preserved_duos() + mcsp_pieces(&map), SAMPLE_X.len());
    }

    #[test]
    fn pieces_of_reversal() {
        let map = LetterMapping { pi: vec![5, 4, 3, 2, 1] };
        assert_eq!(map.preserved_duos(), 0);
        assert_eq!(mcsp_pieces(&map), 5);
    }

    #[test]
    fn mapping_rejects_foreign_edges() {
        let m = ConsecutiveMatching::from_edges([e(3, 3)]).unwrap();
        assert!(extract_letter_mapping(SAMPLE_X, SAMPLE_Y, &m).is_err());
    }

    #[test]
    fn parse_sample_pair_strings() {
        let inst = parse_instance(b"mpsm\nxyzabcb\nabbcxyz").unwrap();
        assert_eq!(inst.graph().unwrap().edges(), &[e(1, 5), e(2, 6), e(4, 1), e(5, 3)]);
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn parse_mcbm() {
        let inst = parse_instance(b"mcbm 0 0 0\n").unwrap();
        assert!(inst.graph().unwrap().is_empty());
        let inst = parse_instance(b"mcbm 3 4 3\n1 2\n3 4\r\n1 2\n").unwrap();
        let g = inst.graph().unwrap();
        assert_eq!((g.n_a(), g.n_b()), (3, 4));
        assert_eq!(g.edges(), &[e(1, 2), e(3, 4)]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_instance(b""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance(b"graph 1 1 0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_instance(b"mcbm 2 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance(b"mcbm 2 2 1\n3 1\n"), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse_instance(b"mcbm 2 2 2\n1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_instance(b"mcbm 2 2 1\n1 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_instance(b"mcbm 2 2 1\n1 1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(parse_instance(b"mpsm\nabc\nabd\n"), Err(Error::PermutationMismatch));
        assert!(matches!(parse_instance(b"mpsm\nabc\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_instance(b"mpsm\nab\nba\nzz\n"), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn generator_edge_cases() {
        let (x, y) = gen_mcsp_instance(12, 1, 3, 7).unwrap();
        assert_eq!(x, y);
        let (x, y) = gen_mcsp_instance(12, 12, 3, 7).unwrap();
        let (mut sx, mut sy) = (x.clone(), y.clone());
        sx.sort_unstable();
        sy.sort_unstable();
        assert_eq!(sx, sy);
        assert_eq!(gen_mcsp_instance(12, 4, 3, 9).unwrap(), gen_mcsp_instance(12, 4, 3, 9).unwrap());
        assert!(gen_mcsp_instance(5, 6, 2, 0).is_err());
        assert!(gen_mcsp_instance(5, 0, 2, 0).is_err());
        assert!(gen_mcsp_instance(5, 2, 0, 0).is_err());
    }

    #[test]
    fn generator_witness_bounds_optimum() {
        for seed in 0..20 {
            let (x, y) = gen_mcsp_instance(9, 3, 2, seed).unwrap();
            let g = DuoGraph::from_strings(&x, &y).unwrap();
            if g.len() <= 24 {
                assert!(exact_opt(&g).unwrap().len() >= 9 - 3);
            }
        }
    }

    #[test]
    fn random_graph_extremes() {
        assert!(gen_random_graph(5, 4, 0.0, 1).unwrap().is_empty());
        assert_eq!(gen_random_graph(5, 4, 1.0, 1).unwrap().len(), 20);
        assert!(gen_random_graph(5, 4, 1.5, 1).is_err());
    }

    #[test]
    fn random_graph_edge_count_concentrates() {
        let (n_a, n_b, p) = (12usize, 10usize, 0.3);
        let mean = p * (n_a * n_b) as f64;
        let sigma = (mean * (1.0 - p)).sqrt();
        for seed in 0..100 {
            let m = gen_random_graph(n_a, n_b, p, seed).unwrap().len() as f64;
            assert!((m - mean).abs() <= 4.0 * sigma, "seed {seed}: {m} edges");
        }
    }
}
