//! Multithreaded drivers. Results equal the sequential ones in `corr_ldpc_core`.

use anyhow::{Context, Result};
use corr_ldpc_core::de::{threshold, ThresholdOptions, ThresholdResult};
use corr_ldpc_core::opt::BatchEvaluator;
use corr_ldpc_core::sim::{
    fixed_graph, run_trial, GraphSampler, PeelingDecoder, SimConfig, SimResult,
};
use corr_ldpc_core::JointEdgeDistribution;
use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CORR_LDPC_THREADS";

/// Sizes the global pool from `CORR_LDPC_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV}={raw:?} is not a count"))?;
    // a pool already built by an earlier call keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n.max(1))
        .build_global();
    Ok(())
}

/// Threshold of each joint on the rayon pool.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParallelEvaluator;

impl BatchEvaluator for ParallelEvaluator {
    fn evaluate(
        &self,
        joints: &[JointEdgeDistribution],
        options: &ThresholdOptions,
    ) -> corr_ldpc_core::Result<Vec<ThresholdResult>> {
        joints.par_iter().map(|j| threshold(j, options)).collect()
    }
}

/// Parallel counterpart of `corr_ldpc_core::sim::monte_carlo`.
pub fn monte_carlo_parallel(
    sampler: &(dyn GraphSampler + Sync),
    config: &SimConfig,
) -> corr_ldpc_core::Result<Vec<SimResult>> {
    config.validate()?;
    let shared = if config.resample_graph_per_trial {
        None
    } else {
        let g = fixed_graph(sampler, config.seed)?;
        let dec = PeelingDecoder::new(&g);
        Some((g, dec))
    };
    let jobs: Vec<(usize, usize)> = (0..config.deltas.len())
        .flat_map(|k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(k, t)| {
            run_trial(
                sampler,
                shared.as_ref().map(|(g, d)| (g, d)),
                config.deltas[k],
                config.seed,
                k,
                t,
            )
        })
        .collect::<corr_ldpc_core::Result<Vec<_>>>()?;
    Ok(config
        .deltas
        .iter()
        .zip(outcomes.chunks(config.trials))
        .map(|(&delta, chunk)| SimResult::aggregate(delta, chunk))
        .collect())
}
