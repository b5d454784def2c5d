//! Finite Tanner graphs from the block construction and from the general
//! (typed configuration model) construction.
//!
//! Pseudorandomness comes from ChaCha8 seeded through
//! [`rand::SeedableRng::seed_from_u64`], so graphs are reproducible across
//! platforms for a given 64-bit seed.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{BlockSpec, Degree, JointEdgeDistribution, NodeDegreeDistribution};
use crate::error::{Error, Result};

/// Generator behind every seeded operation in this crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator for `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Bipartite multigraph: variable nodes `0..n`, check nodes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    pub n: usize,
    pub m: usize,
    pub variable_degrees: Vec<Degree>,
    pub check_degrees: Vec<Degree>,
    /// `(variable, check)` pairs; parallel edges are kept.
    pub edges: Vec<(u32, u32)>,
}

impl TannerGraph {
    /// Builds a graph from an edge list, deriving node degrees from incidences.
    pub fn from_edges(n: usize, m: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut variable_degrees = vec![0; n];
        let mut check_degrees = vec![0; m];
        for &(v, c) in &edges {
            if v as usize >= n || c as usize >= m {
                return Err(Error::InvalidParameter(format!(
                    "edge ({v}, {c}) out of range for n = {n}, m = {m}"
                )));
            }
            variable_degrees[v as usize] += 1;
            check_degrees[c as usize] += 1;
        }
        Ok(Self {
            n,
            m,
            variable_degrees,
            check_degrees,
            edges,
        })
    }

    /// Verifies stub conservation and that stored degrees match incidences.
    pub fn validate(&self) -> Result<()> {
        let rebuilt = Self::from_edges(self.n, self.m, self.edges.clone())?;
        if rebuilt.variable_degrees != self.variable_degrees
            || rebuilt.check_degrees != self.check_degrees
        {
            return Err(Error::InvalidParameter(
                "node degrees disagree with the edge list".into(),
            ));
        }
        Ok(())
    }

    /// Number of variable nodes of each degree, ascending by degree.
    pub fn variable_census(&self) -> Vec<(Degree, usize)> {
        census(&self.variable_degrees)
    }

    pub fn check_census(&self) -> Vec<(Degree, usize)> {
        census(&self.check_degrees)
    }
}

fn census(degrees: &[Degree]) -> Vec<(Degree, usize)> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(Degree, usize)> = Vec::new();
    for d in sorted {
        match out.last_mut() {
            Some((last, count)) if *last == d => *count += 1,
            _ => out.push((d, 1)),
        }
    }
    out
}

/// A joint distribution together with a target block length.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub joint: JointEdgeDistribution,
    pub n: usize,
}

impl EnsembleSpec {
    pub fn new(joint: JointEdgeDistribution, n: usize) -> Result<Self> {
        let spec = Self { joint, n };
        if n == 0 || spec.check_count() == 0 {
            return Err(Error::InvalidParameter(format!(
                "n = {n} gives no variable or no check nodes"
            )));
        }
        Ok(spec)
    }

    /// `m = round(n/G)`.
    pub fn check_count(&self) -> usize {
        libm::round(self.n as f64 / self.joint.rate_ratio()) as usize
    }
}

/// Integer node counts per degree, ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCounts {
    pub variable: Vec<(Degree, usize)>,
    pub check: Vec<(Degree, usize)>,
}

impl NodeCounts {
    pub fn n(&self) -> usize {
        self.variable.iter().map(|&(_, c)| c).sum()
    }

    pub fn m(&self) -> usize {
        self.check.iter().map(|&(_, c)| c).sum()
    }

    pub fn variable_stubs(&self) -> u64 {
        self.variable
            .iter()
            .map(|&(d, c)| d as u64 * c as u64)
            .sum()
    }

    pub fn check_stubs(&self) -> u64 {
        self.check.iter().map(|&(d, c)| d as u64 * c as u64).sum()
    }
}

/// Node counts plus per-type edge counts for the general construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub nodes: NodeCounts,
    /// Row-major over the joint's variable degrees × check degrees.
    pub edge_counts: Vec<u64>,
    pub x_degrees: Vec<Degree>,
    pub y_degrees: Vec<Degree>,
}

impl Realization {
    pub fn edge_count(&self, x: Degree, y: Degree) -> u64 {
        match (
            self.x_degrees.binary_search(&x),
            self.y_degrees.binary_search(&y),
        ) {
            (Ok(i), Ok(j)) => self.edge_counts[i * self.y_degrees.len() + j],
            _ => 0,
        }
    }

    pub fn total_edges(&self) -> u64 {
        self.edge_counts.iter().sum()
    }
}

/// Largest-remainder apportionment of `total` over `weights` (which sum to one).
pub fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let ideal: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|&v| libm::floor(v) as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - counts[a] as f64;
        let rb = ideal[b] - counts[b] as f64;
        rb.partial_cmp(&ra)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

const REPAIR_BUDGET: usize = 100_000;

/// Apportions `n` variable and `m` check nodes, then shifts single nodes
/// between degrees until both sides carry the same number of stubs.
pub fn realize_nodes(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    n: usize,
    m: usize,
) -> Result<NodeCounts> {
    let side = |p: &NodeDegreeDistribution, total: usize| {
        let weights: Vec<f64> = p.iter().map(|(_, w)| w).collect();
        let ideal: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
        let counts = apportion(total, &weights);
        (p.degrees().collect::<Vec<_>>(), counts, ideal)
    };
    let (xd, mut xc, x_ideal) = side(p_x, n);
    let (yd, mut yc, y_ideal) = side(p_y, m);
    let stubs = |d: &[Degree], c: &[usize]| -> i64 {
        d.iter().zip(c).map(|(&d, &c)| d as i64 * c as i64).sum()
    };
    let mut diff = stubs(&xd, &xc) - stubs(&yd, &yc);

    for _ in 0..REPAIR_BUDGET {
        if diff == 0 {
            break;
        }
        // (|new diff|, added deviation from ideal counts, move)
        let mut best: Option<(i64, f64, bool, usize, usize)> = None;
        let mut consider = |variable: bool, degrees: &[Degree], counts: &[usize], ideal: &[f64]| {
            for a in 0..degrees.len() {
                if counts[a] == 0 {
                    continue;
                }
                for b in 0..degrees.len() {
                    if a == b {
                        continue;
                    }
                    let shift = degrees[b] as i64 - degrees[a] as i64;
                    let new_diff = if variable { diff + shift } else { diff - shift };
                    if new_diff.abs() >= diff.abs() {
                        continue;
                    }
                    let dev = |k: usize, c: usize| (c as f64 - ideal[k]).abs();
                    let cost = dev(a, counts[a] - 1) - dev(a, counts[a]) + dev(b, counts[b] + 1)
                        - dev(b, counts[b]);
                    let cand = (new_diff.abs(), cost, variable, a, b);
                    let better = match &best {
                        None => true,
                        Some(cur) => (cand.0, cand.1) < (cur.0, cur.1),
                    };
                    if better {
                        best = Some(cand);
                    }
                }
            }
        };
        consider(true, &xd, &xc, &x_ideal);
        consider(false, &yd, &yc, &y_ideal);
        let Some((_, _, variable, a, b)) = best else {
            break;
        };
        if variable {
            xc[a] -= 1;
            xc[b] += 1;
            diff += xd[b] as i64 - xd[a] as i64;
        } else {
            yc[a] -= 1;
            yc[b] += 1;
            diff -= yd[b] as i64 - yd[a] as i64;
        }
    }
    if diff != 0 {
        return Err(Error::InfeasibleRounding(format!(
            "total variable stubs and total check stubs differ by {diff} (n = {n}, m = {m})"
        )));
    }
    Ok(NodeCounts {
        variable: xd.into_iter().zip(xc).collect(),
        check: yd.into_iter().zip(yc).collect(),
    })
}

/// Integer node and per-type edge counts for the general construction.
///
/// Each variable degree's stubs are apportioned over its check-degree row of
/// the joint; column totals are then repaired along augmenting paths that
/// move one edge at a time between cells of the support.
pub fn realize_counts(spec: &EnsembleSpec) -> Result<Realization> {
    let joint = &spec.joint;
    let nodes = realize_nodes(&joint.node_x(), &joint.node_y(), spec.n, spec.check_count())?;
    let x_degrees = joint.x_degrees().to_vec();
    let y_degrees = joint.y_degrees().to_vec();
    let (nx, ny) = (x_degrees.len(), y_degrees.len());
    let row_target: Vec<u64> = nodes
        .variable
        .iter()
        .map(|&(d, c)| d as u64 * c as u64)
        .collect();
    let col_target: Vec<u64> = nodes
        .check
        .iter()
        .map(|&(d, c)| d as u64 * c as u64)
        .collect();
    let yx = joint.y_given_x_matrix();

    let mut ideal = vec![0.0; nx * ny];
    let mut counts = vec![0u64; nx * ny];
    for i in 0..nx {
        let row = &yx[i * ny..(i + 1) * ny];
        let alloc = apportion(row_target[i] as usize, row);
        for j in 0..ny {
            ideal[i * ny + j] = row[j] * row_target[i] as f64;
            counts[i * ny + j] = alloc[j] as u64;
        }
    }
    let support = |i: usize, j: usize| joint.cell_at(i, j) > 0.0;

    for _ in 0..REPAIR_BUDGET {
        let col_sum =
            |counts: &[u64], j: usize| -> u64 { (0..nx).map(|i| counts[i * ny + j]).sum() };
        let Some(src) = (0..ny).find(|&j| col_sum(&counts, j) > col_target[j]) else {
            break;
        };
        // BFS over columns; an arc j -> k exists through row i when cell (i, j)
        // holds an edge and (i, k) is in the support.
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; ny];
        let mut visited = vec![false; ny];
        visited[src] = true;
        let mut queue = VecDeque::from([src]);
        let mut sink = None;
        while let Some(j) = queue.pop_front() {
            if j != src && col_sum(&counts, j) < col_target[j] {
                sink = Some(j);
                break;
            }
            for k in 0..ny {
                if visited[k] {
                    continue;
                }
                let surplus = |i: usize| {
                    (counts[i * ny + j] as f64 - ideal[i * ny + j])
                        - (counts[i * ny + k] as f64 - ideal[i * ny + k])
                };
                let row = (0..nx)
                    .filter(|&i| counts[i * ny + j] > 0 && support(i, k))
                    .max_by(|&a, &b| {
                        surplus(a)
                            .partial_cmp(&surplus(b))
                            .unwrap_or(core::cmp::Ordering::Equal)
                    });
                if let Some(i) = row {
                    visited[k] = true;
                    prev[k] = Some((j, i));
                    queue.push_back(k);
                }
            }
        }
        let Some(mut k) = sink else {
            return Err(Error::InfeasibleRounding(format!(
                "stubs of check degree {} cannot be balanced: {} assigned, {} available",
                y_degrees[src],
                col_sum(&counts, src),
                col_target[src]
            )));
        };
        while let Some((j, i)) = prev[k] {
            counts[i * ny + j] -= 1;
            counts[i * ny + k] += 1;
            k = j;
        }
    }
    for j in 0..ny {
        let sum: u64 = (0..nx).map(|i| counts[i * ny + j]).sum();
        if sum != col_target[j] {
            return Err(Error::InfeasibleRounding(format!(
                "check degree {} receives {sum} edges but has {} stubs",
                y_degrees[j], col_target[j]
            )));
        }
    }
    Ok(Realization {
        nodes,
        edge_counts: counts,
        x_degrees,
        y_degrees,
    })
}

/// Node ids grouped by degree, highest degree first. Returns the per-node
/// degree list and, for every degree in `counts`, the range of ids it owns.
fn lay_out_nodes(counts: &[(Degree, usize)]) -> (Vec<Degree>, Vec<(Degree, u32, u32)>) {
    let mut degrees = Vec::new();
    let mut ranges = Vec::new();
    for &(d, c) in counts.iter().rev() {
        let start = degrees.len() as u32;
        degrees.extend(core::iter::repeat_n(d, c));
        ranges.push((d, start, degrees.len() as u32));
    }
    (degrees, ranges)
}

fn stubs_of(range: (u32, u32), degree: Degree) -> Vec<u32> {
    (range.0..range.1)
        .flat_map(|v| core::iter::repeat_n(v, degree as usize))
        .collect()
}

/// General construction driven by an explicit generator.
pub fn sample_general_with<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<TannerGraph> {
    let real = realize_counts(spec)?;
    Ok(sample_realization(&real, rng))
}

/// Samples a graph for an already computed realization.
pub fn sample_realization<R: Rng + ?Sized>(real: &Realization, rng: &mut R) -> TannerGraph {
    let (nx, ny) = (real.x_degrees.len(), real.y_degrees.len());
    let (variable_degrees, v_ranges) = lay_out_nodes(&real.nodes.variable);
    let (check_degrees, c_ranges) = lay_out_nodes(&real.nodes.check);
    let range_of = |ranges: &[(Degree, u32, u32)], d: Degree| {
        let &(_, a, b) = ranges
            .iter()
            .find(|r| r.0 == d)
            .unwrap_or_else(|| unreachable!());
        (a, b)
    };

    // chunks[i * ny + j]: variable stubs of degree x_i destined for type (x_i, y_j)
    let mut v_chunks: Vec<Vec<u32>> = vec![Vec::new(); nx * ny];
    for (i, &x) in real.x_degrees.iter().enumerate() {
        let mut stubs = stubs_of(range_of(&v_ranges, x), x);
        stubs.shuffle(rng);
        let mut rest = stubs.as_slice();
        for j in 0..ny {
            let (head, tail) = rest.split_at(real.edge_counts[i * ny + j] as usize);
            v_chunks[i * ny + j] = head.to_vec();
            rest = tail;
        }
    }
    let mut edges = Vec::with_capacity(real.total_edges() as usize);
    for (j, &y) in real.y_degrees.iter().enumerate() {
        let mut stubs = stubs_of(range_of(&c_ranges, y), y);
        stubs.shuffle(rng);
        let mut rest = stubs.as_slice();
        for i in 0..nx {
            let (head, tail) = rest.split_at(real.edge_counts[i * ny + j] as usize);
            edges.extend(
                v_chunks[i * ny + j]
                    .iter()
                    .copied()
                    .zip(head.iter().copied()),
            );
            rest = tail;
        }
    }
    TannerGraph {
        n: variable_degrees.len(),
        m: check_degrees.len(),
        variable_degrees,
        check_degrees,
        edges,
    }
}

/// General construction: stubs of every edge type `(x, y)` are drawn at
/// random from the nodes of those degrees and matched uniformly.
pub fn sample_general(spec: &EnsembleSpec, seed: u64) -> Result<TannerGraph> {
    sample_general_with(spec, &mut rng_from_seed(seed))
}

/// Node counts for the block construction: `n` variable nodes and
/// `round(n/G)` check nodes.
pub fn realize_block_nodes(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    n: usize,
) -> Result<NodeCounts> {
    let g = p_y.mean() / p_x.mean();
    let m = libm::round(n as f64 / g) as usize;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} gives no variable or no check nodes"
        )));
    }
    realize_nodes(p_x, p_y, n, m)
}

/// Block construction driven by an explicit generator and precomputed node
/// counts.
pub fn sample_block_with<R: Rng + ?Sized>(
    counts: &NodeCounts,
    spec: &BlockSpec,
    rng: &mut R,
) -> Result<TannerGraph> {
    let b = spec.block_count();
    let (variable_degrees, _) = lay_out_nodes(&counts.variable);
    let (check_degrees, _) = lay_out_nodes(&counts.check);

    let split = |degrees: &[Degree], block_of: &dyn Fn(Degree) -> Option<usize>, rng: &mut R| {
        let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); b];
        for (node, &d) in degrees.iter().enumerate() {
            let blk = block_of(d).ok_or_else(|| {
                Error::InvalidBlockSpec(format!("degree {d} is not assigned to a block"))
            })?;
            blocks[blk - 1].extend(core::iter::repeat_n(node as u32, d as usize));
        }
        let mut type1 = Vec::with_capacity(b);
        let mut type2 = Vec::new();
        for mut stubs in blocks {
            stubs.shuffle(rng);
            let t = (libm::rint(spec.q() * stubs.len() as f64) as usize).min(stubs.len());
            type2.extend_from_slice(&stubs[t..]);
            stubs.truncate(t);
            type1.push(stubs);
        }
        Ok::<_, Error>((type1, type2))
    };
    let (v_type1, mut v_type2) = split(&variable_degrees, &|d| spec.variable_block(d), rng)?;
    let (mut c_type1, mut c_type2) = split(&check_degrees, &|d| spec.check_block(d), rng)?;

    let mut edges = Vec::with_capacity(v_type1.iter().map(Vec::len).sum::<usize>() + v_type2.len());
    for (i, v_stubs) in v_type1.into_iter().enumerate() {
        let c_stubs = &mut c_type1[spec.pi()[i] - 1];
        let k = v_stubs.len().min(c_stubs.len());
        edges.extend(
            v_stubs[..k]
                .iter()
                .copied()
                .zip(c_stubs[..k].iter().copied()),
        );
        v_type2.extend_from_slice(&v_stubs[k..]);
        c_type2.extend(c_stubs.drain(k..));
    }
    if v_type2.len() != c_type2.len() {
        return Err(Error::InfeasibleRounding(format!(
            "{} variable and {} check type-2 stubs remain",
            v_type2.len(),
            c_type2.len()
        )));
    }
    c_type2.shuffle(rng);
    edges.extend(v_type2.into_iter().zip(c_type2));
    Ok(TannerGraph {
        n: variable_degrees.len(),
        m: check_degrees.len(),
        variable_degrees,
        check_degrees,
        edges,
    })
}

/// Block construction: stubs sorted by degree (descending) and grouped into
/// the `BlockSpec` blocks; a `q` fraction of each block is matched to block
/// `π(i)` on the other side, the rest uniformly across all blocks.
pub fn sample_block(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    spec: &BlockSpec,
    n: usize,
    seed: u64,
) -> Result<TannerGraph> {
    spec.validate_against(p_x, p_y)?;
    let counts = realize_block_nodes(p_x, p_y, n)?;
    sample_block_with(&counts, spec, &mut rng_from_seed(seed))
}

/// Relative frequency of `(variable degree, check degree)` over all edges.
pub fn empirical_joint(graph: &TannerGraph) -> Result<JointEdgeDistribution> {
    let mut counts: alloc::collections::BTreeMap<(Degree, Degree), u64> = Default::default();
    for &(v, c) in &graph.edges {
        let key = (
            graph.variable_degrees[v as usize],
            graph.check_degrees[c as usize],
        );
        *counts.entry(key).or_default() += 1;
    }
    let total = graph.edges.len() as f64;
    JointEdgeDistribution::from_cells(
        counts
            .into_iter()
            .map(|((x, y), k)| (x, y, k as f64 / total)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{joint_from_block, JointEdgeDistribution};

    fn two_degree_nodes() -> (NodeDegreeDistribution, NodeDegreeDistribution) {
        (
            NodeDegreeDistribution::new([(6, 1.0 / 3.0), (3, 2.0 / 3.0)]).unwrap(),
            NodeDegreeDistribution::new([(18, 1.0 / 3.0), (9, 2.0 / 3.0)]).unwrap(),
        )
    }

    fn two_degree_spec(q: f64) -> BlockSpec {
        BlockSpec::new(
            q,
            vec![2, 1],
            [(6, 1), (3, 2)].into_iter().collect(),
            [(18, 1), (9, 2)].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn apportion_is_exact() {
        assert_eq!(apportion(10, &[0.5, 0.5]), vec![5, 5]);
        assert_eq!(apportion(10, &[1.0 / 3.0, 2.0 / 3.0]), vec![3, 7]);
        assert_eq!(apportion(7, &[0.25; 4]).iter().sum::<usize>(), 7);
    }

    #[test]
    fn single_type_counts() {
        let joint = JointEdgeDistribution::from_cells([(3, 6, 1.0)]).unwrap();
        let real = realize_counts(&EnsembleSpec::new(joint, 100).unwrap()).unwrap();
        assert_eq!(real.nodes.variable, vec![(3, 100)]);
        assert_eq!(real.nodes.check, vec![(6, 50)]);
        assert_eq!(real.edge_count(3, 6), 300);
    }

    #[test]
    fn odd_stub_total_is_infeasible() {
        let joint = JointEdgeDistribution::from_cells([(3, 6, 1.0)]).unwrap();
        let err = realize_counts(&EnsembleSpec::new(joint, 101).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InfeasibleRounding(_)), "{err}");
    }

    #[test]
    fn two_degree_counts_at_18000() {
        let (p_x, p_y) = two_degree_nodes();
        let joint = joint_from_block(&p_x, &p_y, &two_degree_spec(0.4)).unwrap();
        let real = realize_counts(&EnsembleSpec::new(joint, 18_000).unwrap()).unwrap();
        assert_eq!(real.nodes.variable, vec![(3, 12_000), (6, 6_000)]);
        assert_eq!(real.nodes.check, vec![(9, 4_000), (18, 2_000)]);
        assert_eq!(real.total_edges(), 72_000);
    }

    #[test]
    fn general_sample_respects_types() {
        let (p_x, p_y) = two_degree_nodes();
        let joint = joint_from_block(&p_x, &p_y, &two_degree_spec(0.37)).unwrap();
        let spec = EnsembleSpec::new(joint, 3_000).unwrap();
        let real = realize_counts(&spec).unwrap();
        let g = sample_general(&spec, 5).unwrap();
        g.validate().unwrap();
        for &x in &real.x_degrees {
            for &y in &real.y_degrees {
                let got = g
                    .edges
                    .iter()
                    .filter(|&&(v, c)| {
                        g.variable_degrees[v as usize] == x && g.check_degrees[c as usize] == y
                    })
                    .count() as u64;
                assert_eq!(got, real.edge_count(x, y));
            }
        }
        assert_eq!(g, sample_general(&spec, 5).unwrap());
        assert_ne!(g.edges, sample_general(&spec, 6).unwrap().edges);
    }

    #[test]
    fn block_sample_full_coupling() {
        let (p_x, p_y) = two_degree_nodes();
        let g = sample_block(&p_x, &p_y, &two_degree_spec(1.0), 1_800, 3).unwrap();
        g.validate().unwrap();
        for &(v, c) in &g.edges {
            let x = g.variable_degrees[v as usize];
            let y = g.check_degrees[c as usize];
            assert!((x == 3 && y == 18) || (x == 6 && y == 9), "edge ({x}, {y})");
        }
    }

    #[test]
    fn block_sample_q_zero_is_configuration_model() {
        let (p_x, p_y) = two_degree_nodes();
        let g = sample_block(&p_x, &p_y, &two_degree_spec(0.0), 18_000, 11).unwrap();
        let emp = empirical_joint(&g).unwrap();
        for (_, _, p) in emp.iter() {
            assert!((p - 0.25).abs() < 0.01);
        }
    }

    #[test]
    fn empirical_joint_point_mass() {
        let joint = JointEdgeDistribution::from_cells([(3, 6, 1.0)]).unwrap();
        let g = sample_general(&EnsembleSpec::new(joint, 40).unwrap(), 0).unwrap();
        let emp = empirical_joint(&g).unwrap();
        assert_eq!(emp.prob(3, 6), 1.0);
    }

    #[test]
    fn from_edges_checks_range() {
        assert!(TannerGraph::from_edges(2, 1, vec![(2, 0)]).is_err());
        let g = TannerGraph::from_edges(2, 1, vec![(0, 0), (1, 0), (1, 0)]).unwrap();
        assert_eq!(g.variable_degrees, vec![1, 2]);
        assert_eq!(g.check_degrees, vec![3]);
        assert_eq!(g.variable_census(), vec![(1, 1), (2, 1)]);
    }
}
