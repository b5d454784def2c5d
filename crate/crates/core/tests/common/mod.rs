#![allow(dead_code)]

use corr_ldpc_core::construct::TannerGraph;
use corr_ldpc_core::{Degree, JointEdgeDistribution};
use proptest::prelude::*;

/// Joints whose check degrees all exceed the variable degrees, so `G > 1`.
pub fn joint_strategy(min_x: Degree) -> impl Strategy<Value = JointEdgeDistribution> {
    (
        proptest::collection::btree_set(min_x..=10u32, 1..=4),
        proptest::collection::btree_set(1u32..=14, 1..=3),
    )
        .prop_flat_map(|(xs, y_offsets)| {
            let xs: Vec<Degree> = xs.into_iter().collect();
            let top = *xs.last().unwrap();
            let ys: Vec<Degree> = y_offsets.into_iter().map(|o| top + o).collect();
            let cells = xs.len() * ys.len();
            (
                Just(xs),
                Just(ys),
                proptest::collection::vec(0.01f64..1.0, cells),
            )
        })
        .prop_map(|(xs, ys, w)| {
            let total: f64 = w.iter().sum();
            let cells = w.iter().map(|v| v / total).collect();
            JointEdgeDistribution::from_dense(xs, ys, cells).unwrap()
        })
}

/// Small multigraph: every variable node has one to four incidences.
pub fn small_graph_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = TannerGraph> {
    (1..=max_n, 1..=max_m)
        .prop_flat_map(|(n, m)| {
            let per_var = proptest::collection::vec(0..m as u32, 1..=4);
            (Just(n), Just(m), proptest::collection::vec(per_var, n))
        })
        .prop_map(|(n, m, adj)| {
            let edges = adj
                .iter()
                .enumerate()
                .flat_map(|(v, cs)| cs.iter().map(move |&c| (v as u32, c)))
                .collect();
            TannerGraph::from_edges(n, m, edges).unwrap()
        })
}

/// Fixed point of "a check with exactly one erased incidence recovers it",
/// iterated to exhaustion by full sweeps.
pub fn brute_force_peel(graph: &TannerGraph, erased: &[bool]) -> Vec<bool> {
    let mut erased = erased.to_vec();
    let mut by_check: Vec<Vec<u32>> = vec![Vec::new(); graph.m];
    for &(v, c) in &graph.edges {
        by_check[c as usize].push(v);
    }
    loop {
        let mut changed = false;
        for nbrs in &by_check {
            let open: Vec<u32> = nbrs
                .iter()
                .copied()
                .filter(|&v| erased[v as usize])
                .collect();
            if open.len() == 1 {
                erased[open[0] as usize] = false;
                changed = true;
            }
        }
        if !changed {
            return erased;
        }
    }
}
