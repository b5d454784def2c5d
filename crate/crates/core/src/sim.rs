//! Monte-Carlo validation: erase bits of the all-zeros codeword and run the
//! peeling decoder on sampled Tanner graphs.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::construct::{
    realize_block_nodes, realize_counts, sample_block_with, sample_realization, stream_rng,
    EnsembleSpec, NodeCounts, Realization, TannerGraph,
};
use crate::dist::{BlockSpec, Degree, NodeDegreeDistribution};
use crate::error::{Error, Result};

/// Set of erased variable nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    mask: Vec<bool>,
}

impl ErasurePattern {
    pub fn none(n: usize) -> Self {
        Self {
            mask: vec![false; n],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; n];
        for v in indices {
            *mask.get_mut(v).ok_or_else(|| {
                Error::InvalidParameter(alloc::format!("erased index {v} out of range for n = {n}"))
            })? = true;
        }
        Ok(Self { mask })
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&e| e).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&e| e)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &e)| e)
            .map(|(v, _)| v)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Erases each of `n` bits independently with probability `delta`.
pub fn erase<R: Rng + ?Sized>(n: usize, delta: f64, rng: &mut R) -> ErasurePattern {
    ErasurePattern {
        mask: (0..n).map(|_| rng.gen::<f64>() < delta).collect(),
    }
}

pub fn erase_seeded(n: usize, delta: f64, seed: u64) -> ErasurePattern {
    erase(n, delta, &mut crate::construct::rng_from_seed(seed))
}

/// Compressed adjacency of a Tanner graph, reusable across erasure patterns.
#[derive(Debug, Clone)]
pub struct PeelingDecoder {
    n: usize,
    check_offsets: Vec<usize>,
    check_adj: Vec<u32>,
    var_offsets: Vec<usize>,
    var_adj: Vec<u32>,
}

fn csr(len: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; len + 1];
    for (a, _) in pairs.clone() {
        offsets[a as usize + 1] += 1;
    }
    for k in 0..len {
        offsets[k + 1] += offsets[k];
    }
    let mut fill = offsets.clone();
    let mut adj = vec![0u32; offsets[len]];
    for (a, b) in pairs {
        adj[fill[a as usize]] = b;
        fill[a as usize] += 1;
    }
    (offsets, adj)
}

impl PeelingDecoder {
    pub fn new(graph: &TannerGraph) -> Self {
        let (check_offsets, check_adj) = csr(graph.m, graph.edges.iter().map(|&(v, c)| (c, v)));
        let (var_offsets, var_adj) = csr(graph.n, graph.edges.iter().copied());
        Self {
            n: graph.n,
            check_offsets,
            check_adj,
            var_offsets,
            var_adj,
        }
    }

    fn check_neighbors(&self, c: usize) -> &[u32] {
        &self.check_adj[self.check_offsets[c]..self.check_offsets[c + 1]]
    }

    fn var_neighbors(&self, v: usize) -> &[u32] {
        &self.var_adj[self.var_offsets[v]..self.var_offsets[v + 1]]
    }

    /// Residual state: erased incidences per check and the XOR of their
    /// variable ids, which names the variable once a single incidence remains.
    fn residual(&self, pattern: &ErasurePattern) -> (Vec<u32>, Vec<u32>) {
        let m = self.check_offsets.len() - 1;
        let mut degree = vec![0u32; m];
        let mut xor = vec![0u32; m];
        for c in 0..m {
            for &v in self.check_neighbors(c) {
                if pattern.contains(v as usize) {
                    degree[c] += 1;
                    xor[c] ^= v;
                }
            }
        }
        (degree, xor)
    }

    fn resolve(
        &self,
        c: usize,
        degree: &mut [u32],
        xor: &mut [u32],
        recovered: &mut [bool],
        ready: &mut Vec<u32>,
    ) {
        if degree[c] != 1 {
            return;
        }
        let v = xor[c];
        recovered[v as usize] = true;
        for &c2 in self.var_neighbors(v as usize) {
            let c2 = c2 as usize;
            degree[c2] -= 1;
            xor[c2] ^= v;
            if degree[c2] == 1 {
                ready.push(c2 as u32);
            }
        }
    }

    /// Peels until no residual check has degree one; returns a mask of the
    /// erased variables that were recovered.
    pub fn peel_mask(&self, pattern: &ErasurePattern) -> Vec<bool> {
        assert_eq!(
            pattern.n(),
            self.n,
            "pattern length differs from graph size"
        );
        let (mut degree, mut xor) = self.residual(pattern);
        let mut recovered = vec![false; self.n];
        let mut ready: Vec<u32> = (0..degree.len() as u32)
            .filter(|&c| degree[c as usize] == 1)
            .collect();
        while let Some(c) = ready.pop() {
            self.resolve(
                c as usize,
                &mut degree,
                &mut xor,
                &mut recovered,
                &mut ready,
            );
        }
        recovered
    }

    /// Same fixed point as [`peel_mask`](Self::peel_mask), but each step picks
    /// a uniformly random ready check.
    pub fn peel_mask_randomized<R: Rng + ?Sized>(
        &self,
        pattern: &ErasurePattern,
        rng: &mut R,
    ) -> Vec<bool> {
        assert_eq!(
            pattern.n(),
            self.n,
            "pattern length differs from graph size"
        );
        let (mut degree, mut xor) = self.residual(pattern);
        let mut recovered = vec![false; self.n];
        let mut ready: Vec<u32> = (0..degree.len() as u32)
            .filter(|&c| degree[c as usize] == 1)
            .collect();
        while !ready.is_empty() {
            let k = rng.gen_range(0..ready.len());
            let c = ready.swap_remove(k);
            self.resolve(
                c as usize,
                &mut degree,
                &mut xor,
                &mut recovered,
                &mut ready,
            );
        }
        recovered
    }

    pub fn peel(&self, pattern: &ErasurePattern) -> Vec<u32> {
        mask_to_indices(&self.peel_mask(pattern))
    }
}

fn mask_to_indices(mask: &[bool]) -> Vec<u32> {
    mask.iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(v, _)| v as u32)
        .collect()
}

/// Recovered erased variables, ascending.
pub fn peel(graph: &TannerGraph, pattern: &ErasurePattern) -> Vec<u32> {
    PeelingDecoder::new(graph).peel(pattern)
}

/// Source of independent Tanner graphs for the Monte-Carlo harness.
pub trait GraphSampler {
    fn sample(&self, rng: &mut dyn rand::RngCore) -> Result<TannerGraph>;
}

/// General construction with counts realized once up front.
#[derive(Debug, Clone)]
pub struct GeneralSampler {
    realization: Realization,
}

impl GeneralSampler {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        Ok(Self {
            realization: realize_counts(spec)?,
        })
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }
}

impl GraphSampler for GeneralSampler {
    fn sample(&self, rng: &mut dyn rand::RngCore) -> Result<TannerGraph> {
        Ok(sample_realization(&self.realization, rng))
    }
}

/// Block construction with node counts realized once up front.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    counts: NodeCounts,
    spec: BlockSpec,
}

impl BlockSampler {
    pub fn new(
        p_x: &NodeDegreeDistribution,
        p_y: &NodeDegreeDistribution,
        spec: BlockSpec,
        n: usize,
    ) -> Result<Self> {
        spec.validate_against(p_x, p_y)?;
        Ok(Self {
            counts: realize_block_nodes(p_x, p_y, n)?,
            spec,
        })
    }
}

impl GraphSampler for BlockSampler {
    fn sample(&self, rng: &mut dyn rand::RngCore) -> Result<TannerGraph> {
        sample_block_with(&self.counts, &self.spec, rng)
    }
}

/// Decoded fractions from one decoding attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub decoded_fraction: f64,
    /// `(degree, fraction of nodes of that degree decoded)`, ascending.
    pub by_degree: Vec<(Degree, f64)>,
    /// `(degree, node count)`, ascending.
    pub census: Vec<(Degree, usize)>,
}

/// Decodes one pattern and counts, per degree, the nodes that end up known
/// (never erased, or erased and recovered).
pub fn evaluate_pattern(
    graph: &TannerGraph,
    decoder: &PeelingDecoder,
    pattern: &ErasurePattern,
) -> TrialOutcome {
    let recovered = decoder.peel_mask(pattern);
    let census = graph.variable_census();
    let mut lost = vec![0usize; census.len()];
    let mut total_lost = 0usize;
    for v in pattern.indices() {
        if !recovered[v] {
            let d = graph.variable_degrees[v];
            let k = census
                .binary_search_by_key(&d, |&(d, _)| d)
                .unwrap_or_else(|_| unreachable!());
            lost[k] += 1;
            total_lost += 1;
        }
    }
    let by_degree = census
        .iter()
        .zip(&lost)
        .map(|(&(d, count), &l)| (d, 1.0 - l as f64 / count as f64))
        .collect();
    TrialOutcome {
        decoded_fraction: 1.0 - total_lost as f64 / graph.n.max(1) as f64,
        by_degree,
        census,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Fresh graph per trial (default) or one graph for every trial.
    pub resample_graph_per_trial: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::InvalidParameter(alloc::format!(
                "delta = {d} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

/// Stream reserved for the shared graph in fixed-graph mode.
const FIXED_GRAPH_STREAM: u64 = u64::MAX;

fn trial_stream(delta_index: usize, trial: usize) -> u64 {
    ((delta_index as u64) << 32) | trial as u64
}

/// Samples the shared graph used when `resample_graph_per_trial` is off.
pub fn fixed_graph(sampler: &dyn GraphSampler, seed: u64) -> Result<TannerGraph> {
    sampler.sample(&mut stream_rng(seed, FIXED_GRAPH_STREAM))
}

/// One trial. The pseudorandom stream depends only on
/// `(seed, delta_index, trial)`, so trials can run in any order.
pub fn run_trial(
    sampler: &dyn GraphSampler,
    fixed: Option<(&TannerGraph, &PeelingDecoder)>,
    delta: f64,
    seed: u64,
    delta_index: usize,
    trial: usize,
) -> Result<TrialOutcome> {
    let mut rng = stream_rng(seed, trial_stream(delta_index, trial));
    match fixed {
        Some((graph, decoder)) => {
            let pattern = erase(graph.n, delta, &mut rng);
            Ok(evaluate_pattern(graph, decoder, &pattern))
        }
        None => {
            let graph = sampler.sample(&mut rng)?;
            let decoder = PeelingDecoder::new(&graph);
            let pattern = erase(graph.n, delta, &mut rng);
            Ok(evaluate_pattern(&graph, &decoder, &pattern))
        }
    }
}

/// Averages over trials at one erasure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub delta: f64,
    pub trials: usize,
    pub gamma_mean: f64,
    /// Sample standard deviation across trials (zero for a single trial).
    pub gamma_std: f64,
    pub gamma_by_degree: Vec<(Degree, f64)>,
}

impl SimResult {
    pub fn aggregate(delta: f64, outcomes: &[TrialOutcome]) -> Self {
        let trials = outcomes.len();
        let t = trials as f64;
        let gamma_mean = outcomes.iter().map(|o| o.decoded_fraction).sum::<f64>() / t;
        let gamma_std = if trials > 1 {
            let ss: f64 = outcomes
                .iter()
                .map(|o| {
                    let e = o.decoded_fraction - gamma_mean;
                    e * e
                })
                .sum();
            libm::sqrt(ss / (t - 1.0))
        } else {
            0.0
        };
        let mut gamma_by_degree: Vec<(Degree, f64)> = Vec::new();
        for o in outcomes {
            for &(d, f) in &o.by_degree {
                match gamma_by_degree.binary_search_by_key(&d, |&(d, _)| d) {
                    Ok(k) => gamma_by_degree[k].1 += f,
                    Err(k) => gamma_by_degree.insert(k, (d, f)),
                }
            }
        }
        for e in &mut gamma_by_degree {
            e.1 /= t;
        }
        Self {
            delta,
            trials,
            gamma_mean,
            gamma_std,
            gamma_by_degree,
        }
    }

    pub fn by_degree(&self, degree: Degree) -> Option<f64> {
        self.gamma_by_degree
            .iter()
            .find(|e| e.0 == degree)
            .map(|e| e.1)
    }
}

/// Runs every `(delta, trial)` pair sequentially and aggregates per delta.
pub fn monte_carlo(sampler: &dyn GraphSampler, config: &SimConfig) -> Result<Vec<SimResult>> {
    config.validate()?;
    let shared = if config.resample_graph_per_trial {
        None
    } else {
        let g = fixed_graph(sampler, config.seed)?;
        let dec = PeelingDecoder::new(&g);
        Some((g, dec))
    };
    let mut out = Vec::with_capacity(config.deltas.len());
    for (k, &delta) in config.deltas.iter().enumerate() {
        let outcomes = (0..config.trials)
            .map(|t| {
                run_trial(
                    sampler,
                    shared.as_ref().map(|(g, d)| (g, d)),
                    delta,
                    config.seed,
                    k,
                    t,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(SimResult::aggregate(delta, &outcomes));
    }
    Ok(out)
}
