//! Degree distributions from the node and edge perspective, and the bivariate
//! edge distribution `P(X_e = x, Y_e = y)` that drives everything else.
//!
//! All types are immutable once built. Constructors validate and put the data
//! in canonical form: degrees sorted ascending, zero-probability degrees
//! removed from the univariate distributions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::marker::PhantomData;

use crate::error::{Error, Result, Side};

/// Tolerance on the total mass of every distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Tolerance on the per-block edge mass of a [`BlockSpec`].
pub const BLOCK_MASS_TOLERANCE: f64 = 1e-9;

pub type Degree = u32;

mod sealed {
    pub trait Sealed {}
}

/// Marker for the perspective a [`DegreeDistribution`] is taken from.
pub trait Perspective: sealed::Sealed + Copy + core::fmt::Debug {}

/// Degree of a uniformly chosen node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node;
/// Degree at one end of a uniformly chosen edge (size-biased).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge;

impl sealed::Sealed for Node {}
impl sealed::Sealed for Edge {}
impl Perspective for Node {}
impl Perspective for Edge {}

/// Probability mass over node degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution<P: Perspective> {
    entries: Vec<(Degree, f64)>,
    _perspective: PhantomData<P>,
}

/// `p_X` or `p_Y`: the degree of a random variable or check node.
pub type NodeDegreeDistribution = DegreeDistribution<Node>;
/// `p_{X_e}` or `p_{Y_e}`: the degree at one end of a random edge.
pub type EdgeDegreeDistribution = DegreeDistribution<Edge>;

impl<P: Perspective> DegreeDistribution<P> {
    /// Validates `(degree, probability)` pairs. Probabilities must be
    /// nonnegative and sum to one within [`MASS_TOLERANCE`]; zero entries are
    /// dropped and duplicate degrees rejected.
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Degree, f64)>,
    {
        let entries = Self::collect_checked(entries)?;
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self::from_sorted(entries))
    }

    /// Builds a distribution proportional to nonnegative `weights`.
    ///
    /// Published tables are often rounded so that the digits do not sum to one
    /// exactly; this is the constructor for those.
    pub fn from_weights<I>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Degree, f64)>,
    {
        let mut entries = Self::collect_checked(weights)?;
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        for e in &mut entries {
            e.1 /= total;
        }
        Ok(Self::from_sorted(entries))
    }

    /// Point mass at `degree`.
    pub fn single(degree: Degree) -> Result<Self> {
        Self::new([(degree, 1.0)])
    }

    fn collect_checked<I>(entries: I) -> Result<Vec<(Degree, f64)>>
    where
        I: IntoIterator<Item = (Degree, f64)>,
    {
        let mut out: Vec<(Degree, f64)> = Vec::new();
        for (d, p) in entries {
            if d == 0 {
                return Err(Error::InvalidDistribution("degree 0 is not allowed".into()));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} for degree {d} is not a nonnegative number"
                )));
            }
            if out.iter().any(|&(e, _)| e == d) {
                return Err(Error::InvalidDistribution(format!(
                    "degree {d} listed twice"
                )));
            }
            if p > 0.0 {
                out.push((d, p));
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        out.sort_unstable_by_key(|&(d, _)| d);
        Ok(out)
    }

    fn from_sorted(entries: Vec<(Degree, f64)>) -> Self {
        Self {
            entries,
            _perspective: PhantomData,
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (Degree, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn degrees(&self) -> impl ExactSizeIterator<Item = Degree> + '_ {
        self.entries.iter().map(|&(d, _)| d)
    }

    /// Probability of `degree`, zero outside the support.
    pub fn prob(&self, degree: Degree) -> f64 {
        self.entries
            .binary_search_by_key(&degree, |&(d, _)| d)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_degree(&self) -> Degree {
        self.entries[0].0
    }

    pub fn max_degree(&self) -> Degree {
        self.entries[self.entries.len() - 1].0
    }

    /// `Σ d·p(d)` under this distribution.
    pub fn mean(&self) -> f64 {
        self.entries.iter().map(|&(d, p)| d as f64 * p).sum()
    }

    /// Largest absolute difference in probability over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.entries.iter().map(|&(d, p)| (p - other.prob(d)).abs());
        let b = other.entries.iter().map(|&(d, p)| (p - self.prob(d)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

impl NodeDegreeDistribution {
    /// Edge-perspective view: `p_e(x) = x·p(x) / E[X]`.
    pub fn to_edge(&self) -> EdgeDegreeDistribution {
        let mean = self.mean();
        let entries = self
            .entries
            .iter()
            .map(|&(d, p)| (d, d as f64 * p / mean))
            .collect();
        EdgeDegreeDistribution::from_sorted(entries)
    }
}

impl EdgeDegreeDistribution {
    /// Node-perspective view: `p(x) = (p_e(x)/x) / Σ p_e(x')/x'`.
    pub fn to_node(&self) -> NodeDegreeDistribution {
        let norm = self.inverse_mean_sum();
        let entries = self
            .entries
            .iter()
            .map(|&(d, p)| (d, p / d as f64 / norm))
            .collect();
        NodeDegreeDistribution::from_sorted(entries)
    }

    /// Average node degree `E[X] = 1 / Σ p_e(x)/x`.
    pub fn node_mean(&self) -> f64 {
        1.0 / self.inverse_mean_sum()
    }

    fn inverse_mean_sum(&self) -> f64 {
        self.entries.iter().map(|&(d, p)| p / d as f64).sum()
    }
}

pub fn edge_from_node(node_dist: &NodeDegreeDistribution) -> EdgeDegreeDistribution {
    node_dist.to_edge()
}

pub fn node_from_edge(edge_dist: &EdgeDegreeDistribution) -> NodeDegreeDistribution {
    edge_dist.to_node()
}

/// Bivariate distribution of the degrees at the two ends of a random edge.
///
/// Cells are stored densely, rows indexed by variable degree and columns by
/// check degree, both ascending. Individual cells may be zero but every row and
/// column has positive mass.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEdgeDistribution {
    x_degrees: Vec<Degree>,
    y_degrees: Vec<Degree>,
    cells: Vec<f64>,
    edge_x: EdgeDegreeDistribution,
    edge_y: EdgeDegreeDistribution,
    mean_x: f64,
    mean_y: f64,
}

impl JointEdgeDistribution {
    /// Builds a joint from `(x, y, p)` triples. Missing cells are zero.
    pub fn from_cells<I>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Degree, Degree, f64)>,
    {
        let mut map: BTreeMap<(Degree, Degree), f64> = BTreeMap::new();
        for (x, y, p) in cells {
            if x == 0 || y == 0 {
                return Err(Error::InvalidDistribution("degree 0 is not allowed".into()));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "cell ({x}, {y}) has probability {p}"
                )));
            }
            if map.insert((x, y), p).is_some() {
                return Err(Error::InvalidDistribution(format!(
                    "cell ({x}, {y}) listed twice"
                )));
            }
        }
        let mut x_degrees: Vec<Degree> = Vec::new();
        let mut y_degrees: Vec<Degree> = Vec::new();
        for (&(x, y), &p) in &map {
            if p > 0.0 {
                x_degrees.push(x);
                y_degrees.push(y);
            }
        }
        x_degrees.sort_unstable();
        x_degrees.dedup();
        y_degrees.sort_unstable();
        y_degrees.dedup();
        let ny = y_degrees.len();
        let mut dense = alloc::vec![0.0; x_degrees.len() * ny];
        for (&(x, y), &p) in &map {
            if p == 0.0 {
                continue;
            }
            let i = x_degrees
                .binary_search(&x)
                .unwrap_or_else(|_| unreachable!());
            let j = y_degrees
                .binary_search(&y)
                .unwrap_or_else(|_| unreachable!());
            dense[i * ny + j] = p;
        }
        Self::from_dense(x_degrees, y_degrees, dense)
    }

    /// Builds a joint from a dense row-major matrix over the given ascending
    /// degree lists.
    pub fn from_dense(
        x_degrees: Vec<Degree>,
        y_degrees: Vec<Degree>,
        cells: Vec<f64>,
    ) -> Result<Self> {
        let (nx, ny) = (x_degrees.len(), y_degrees.len());
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if cells.len() != nx * ny {
            return Err(Error::InvalidDistribution(
                "cell matrix has the wrong shape".into(),
            ));
        }
        if !x_degrees.windows(2).all(|w| w[0] < w[1]) || !y_degrees.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::InvalidDistribution(
                "degrees must be strictly ascending".into(),
            ));
        }
        if x_degrees[0] == 0 || y_degrees[0] == 0 {
            return Err(Error::InvalidDistribution("degree 0 is not allowed".into()));
        }
        if let Some(p) = cells.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("cell probability {p}")));
        }
        let total: f64 = cells.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "cells sum to {total}, expected 1"
            )));
        }
        let row: Vec<f64> = (0..nx)
            .map(|i| cells[i * ny..(i + 1) * ny].iter().sum())
            .collect();
        let col: Vec<f64> = (0..ny)
            .map(|j| (0..nx).map(|i| cells[i * ny + j]).sum())
            .collect();
        if let Some(i) = row.iter().position(|&p| p <= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "variable degree {} has no mass",
                x_degrees[i]
            )));
        }
        if let Some(j) = col.iter().position(|&p| p <= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "check degree {} has no mass",
                y_degrees[j]
            )));
        }
        let edge_x =
            EdgeDegreeDistribution::from_sorted(x_degrees.iter().copied().zip(row).collect());
        let edge_y =
            EdgeDegreeDistribution::from_sorted(y_degrees.iter().copied().zip(col).collect());
        let mean_x = edge_x.node_mean();
        let mean_y = edge_y.node_mean();
        let g = mean_y / mean_x;
        if g <= 1.0 {
            return Err(Error::RateNotAboveOne { g });
        }
        Ok(Self {
            x_degrees,
            y_degrees,
            cells,
            edge_x,
            edge_y,
            mean_x,
            mean_y,
        })
    }

    pub fn x_degrees(&self) -> &[Degree] {
        &self.x_degrees
    }

    pub fn y_degrees(&self) -> &[Degree] {
        &self.y_degrees
    }

    /// Row-major cell matrix aligned with [`x_degrees`](Self::x_degrees) and
    /// [`y_degrees`](Self::y_degrees).
    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    #[inline]
    pub fn cell_at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.y_degrees.len() + j]
    }

    /// `P(X_e = x, Y_e = y)`, zero outside the support.
    pub fn prob(&self, x: Degree, y: Degree) -> f64 {
        match (
            self.x_degrees.binary_search(&x),
            self.y_degrees.binary_search(&y),
        ) {
            (Ok(i), Ok(j)) => self.cell_at(i, j),
            _ => 0.0,
        }
    }

    /// All `(x, y, p)` cells in row-major order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (Degree, Degree, f64)> + '_ {
        let ny = self.y_degrees.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, &p)| (self.x_degrees[k / ny], self.y_degrees[k % ny], p))
    }

    pub fn edge_x(&self) -> &EdgeDegreeDistribution {
        &self.edge_x
    }

    pub fn edge_y(&self) -> &EdgeDegreeDistribution {
        &self.edge_y
    }

    pub fn node_x(&self) -> NodeDegreeDistribution {
        self.edge_x.to_node()
    }

    pub fn node_y(&self) -> NodeDegreeDistribution {
        self.edge_y.to_node()
    }

    /// Average variable-node degree `E[X]`.
    pub fn mean_x(&self) -> f64 {
        self.mean_x
    }

    /// Average check-node degree `E[Y]`.
    pub fn mean_y(&self) -> f64 {
        self.mean_y
    }

    /// `G = n/(n−k) = E[Y]/E[X]`.
    pub fn rate_ratio(&self) -> f64 {
        self.mean_y / self.mean_x
    }

    /// Design rate `k/n = 1 − 1/G`.
    pub fn design_rate(&self) -> f64 {
        1.0 - 1.0 / self.rate_ratio()
    }

    /// Row-major `P(Y_e = y_j | X_e = x_i)`.
    pub fn y_given_x_matrix(&self) -> Vec<f64> {
        let ny = self.y_degrees.len();
        let mut out = self.cells.clone();
        for (i, (_, px)) in self.edge_x.iter().enumerate() {
            for v in &mut out[i * ny..(i + 1) * ny] {
                *v /= px;
            }
        }
        out
    }

    /// Row-major (rows = check degrees) `P(X_e = x_i | Y_e = y_j)`.
    pub fn x_given_y_matrix(&self) -> Vec<f64> {
        let (nx, ny) = (self.x_degrees.len(), self.y_degrees.len());
        let mut out = alloc::vec![0.0; nx * ny];
        for (j, (_, py)) in self.edge_y.iter().enumerate() {
            for i in 0..nx {
                out[j * nx + i] = self.cell_at(i, j) / py;
            }
        }
        out
    }

    /// Largest absolute difference over the union of the two supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.iter().map(|(x, y, p)| (p - other.prob(x, y)).abs());
        let b = other.iter().map(|(x, y, p)| (p - self.prob(x, y)).abs());
        a.chain(b).fold(0.0, f64::max)
    }
}

/// Product joint `p_{X_e}(x)·p_{Y_e}(y)`.
pub fn joint_independent(
    x_edge: &EdgeDegreeDistribution,
    y_edge: &EdgeDegreeDistribution,
) -> Result<JointEdgeDistribution> {
    let x_degrees: Vec<Degree> = x_edge.degrees().collect();
    let y_degrees: Vec<Degree> = y_edge.degrees().collect();
    let cells = x_edge
        .iter()
        .flat_map(|(_, px)| y_edge.iter().map(move |(_, py)| px * py))
        .collect();
    JointEdgeDistribution::from_dense(x_degrees, y_degrees, cells)
}

/// Per-degree conditionals `P(Y_e = · | X_e = x)` and `P(X_e = · | Y_e = y)`.
pub type Conditionals = BTreeMap<Degree, BTreeMap<Degree, f64>>;

pub fn conditionals(joint: &JointEdgeDistribution) -> (Conditionals, Conditionals) {
    let yx = joint.y_given_x_matrix();
    let xy = joint.x_given_y_matrix();
    let (nx, ny) = (joint.x_degrees.len(), joint.y_degrees.len());
    let mut y_given_x = BTreeMap::new();
    for (i, &x) in joint.x_degrees.iter().enumerate() {
        let row = joint
            .y_degrees
            .iter()
            .copied()
            .zip(yx[i * ny..(i + 1) * ny].iter().copied());
        y_given_x.insert(x, row.collect());
    }
    let mut x_given_y = BTreeMap::new();
    for (j, &y) in joint.y_degrees.iter().enumerate() {
        let row = joint
            .x_degrees
            .iter()
            .copied()
            .zip(xy[j * nx..(j + 1) * nx].iter().copied());
        x_given_y.insert(y, row.collect());
    }
    (y_given_x, x_given_y)
}

/// Pearson correlation between `X_e` and `Y_e`.
pub fn pearson_correlation(joint: &JointEdgeDistribution) -> Result<f64> {
    if joint.edge_x.len() < 2 {
        return Err(Error::DegenerateVariance(Side::Variable));
    }
    if joint.edge_y.len() < 2 {
        return Err(Error::DegenerateVariance(Side::Check));
    }
    let ex = joint.edge_x.mean();
    let ey = joint.edge_y.mean();
    let var_x: f64 = joint
        .edge_x
        .iter()
        .map(|(d, p)| p * (d as f64 - ex) * (d as f64 - ex))
        .sum();
    let var_y: f64 = joint
        .edge_y
        .iter()
        .map(|(d, p)| p * (d as f64 - ey) * (d as f64 - ey))
        .sum();
    let cov: f64 = joint
        .iter()
        .map(|(x, y, p)| p * (x as f64 - ex) * (y as f64 - ey))
        .sum();
    Ok(cov / libm::sqrt(var_x * var_y))
}

/// Block construction parameters.
///
/// Block indices and the permutation are 1-based, as in `pi = [2, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    q: f64,
    pi: Vec<usize>,
    variable_blocks: BTreeMap<Degree, usize>,
    check_blocks: BTreeMap<Degree, usize>,
}

impl BlockSpec {
    pub fn new(
        q: f64,
        pi: Vec<usize>,
        variable_blocks: BTreeMap<Degree, usize>,
        check_blocks: BTreeMap<Degree, usize>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidBlockSpec(format!("q = {q} outside [0, 1]")));
        }
        let b = pi.len();
        if b == 0 {
            return Err(Error::InvalidBlockSpec("empty permutation".into()));
        }
        let mut seen = alloc::vec![false; b];
        for &p in &pi {
            if p == 0 || p > b || core::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidBlockSpec(format!(
                    "pi = {pi:?} is not a permutation of 1..={b}"
                )));
            }
        }
        for (side, blocks) in [("variable", &variable_blocks), ("check", &check_blocks)] {
            if let Some((d, blk)) = blocks.iter().find(|(_, &blk)| blk == 0 || blk > b) {
                return Err(Error::InvalidBlockSpec(format!(
                    "{side} degree {d} assigned to block {blk}, outside 1..={b}"
                )));
            }
        }
        Ok(Self {
            q,
            pi,
            variable_blocks,
            check_blocks,
        })
    }

    pub fn block_count(&self) -> usize {
        self.pi.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Same blocks and permutation with a different mixing fraction.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(
            q,
            self.pi.clone(),
            self.variable_blocks.clone(),
            self.check_blocks.clone(),
        )
    }

    /// 1-based permutation.
    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    pub fn variable_blocks(&self) -> &BTreeMap<Degree, usize> {
        &self.variable_blocks
    }

    pub fn check_blocks(&self) -> &BTreeMap<Degree, usize> {
        &self.check_blocks
    }

    /// 1-based block of a variable degree.
    pub fn variable_block(&self, x: Degree) -> Option<usize> {
        self.variable_blocks.get(&x).copied()
    }

    pub fn check_block(&self, y: Degree) -> Option<usize> {
        self.check_blocks.get(&y).copied()
    }

    /// Whether type-1 stubs can join variable degree `x` to check degree `y`.
    pub fn matched(&self, x: Degree, y: Degree) -> bool {
        match (self.variable_block(x), self.check_block(y)) {
            (Some(i), Some(j)) => self.pi[i - 1] == j,
            _ => false,
        }
    }

    /// Checks that every degree is assigned and every block carries edge
    /// mass `1/b` on both sides.
    pub fn validate_against(
        &self,
        p_x: &NodeDegreeDistribution,
        p_y: &NodeDegreeDistribution,
    ) -> Result<()> {
        let b = self.block_count();
        let expected = 1.0 / b as f64;
        for (side, edge, blocks) in [
            (Side::Variable, p_x.to_edge(), &self.variable_blocks),
            (Side::Check, p_y.to_edge(), &self.check_blocks),
        ] {
            let mut mass = alloc::vec![0.0; b];
            for (d, p) in edge.iter() {
                let blk = blocks.get(&d).ok_or_else(|| {
                    Error::InvalidBlockSpec(format!("{side} degree {d} is not assigned to a block"))
                })?;
                mass[blk - 1] += p;
            }
            for (k, &m) in mass.iter().enumerate() {
                if (m - expected).abs() > BLOCK_MASS_TOLERANCE {
                    return Err(Error::UnevenBlockMass {
                        side,
                        block: k + 1,
                        mass: m,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Joint induced by the block construction:
/// `(bq + 1 − q)·p_{X_e}(x)·p_{Y_e}(y)` when `x` and `y` sit in matched blocks,
/// `(1 − q)·p_{X_e}(x)·p_{Y_e}(y)` otherwise.
pub fn joint_from_block(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    spec: &BlockSpec,
) -> Result<JointEdgeDistribution> {
    spec.validate_against(p_x, p_y)?;
    let ex = p_x.to_edge();
    let ey = p_y.to_edge();
    let q = spec.q;
    let boosted = spec.block_count() as f64 * q + (1.0 - q);
    let x_degrees: Vec<Degree> = ex.degrees().collect();
    let y_degrees: Vec<Degree> = ey.degrees().collect();
    let mut cells = Vec::with_capacity(x_degrees.len() * y_degrees.len());
    for (x, px) in ex.iter() {
        for (y, py) in ey.iter() {
            let factor = if spec.matched(x, y) { boosted } else { 1.0 - q };
            cells.push(factor * px * py);
        }
    }
    JointEdgeDistribution::from_dense(x_degrees, y_degrees, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn node(entries: &[(Degree, f64)]) -> NodeDegreeDistribution {
        NodeDegreeDistribution::new(entries.iter().copied()).unwrap()
    }

    fn edge(entries: &[(Degree, f64)]) -> EdgeDegreeDistribution {
        EdgeDegreeDistribution::new(entries.iter().copied()).unwrap()
    }

    fn two_degree(q: f64, pi: Vec<usize>) -> JointEdgeDistribution {
        // G = 3, d = 3
        let p_x = node(&[(6, 1.0 / 3.0), (3, 2.0 / 3.0)]);
        let p_y = node(&[(18, 1.0 / 3.0), (9, 2.0 / 3.0)]);
        let spec = BlockSpec::new(
            q,
            pi,
            [(6, 1), (3, 2)].into_iter().collect(),
            [(18, 1), (9, 2)].into_iter().collect(),
        )
        .unwrap();
        joint_from_block(&p_x, &p_y, &spec).unwrap()
    }

    #[test]
    fn edge_from_node_examples() {
        let e = node(&[(3, 2.0 / 3.0), (6, 1.0 / 3.0)]).to_edge();
        assert!((e.prob(3) - 0.5).abs() < 1e-15);
        assert!((e.prob(6) - 0.5).abs() < 1e-15);

        assert_eq!(node(&[(5, 1.0)]).to_edge().prob(5), 1.0);

        let e = node(&[(2, 0.5), (4, 0.5)]).to_edge();
        assert!((e.prob(2) - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.prob(4) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn node_from_edge_published_table() {
        let e = EdgeDegreeDistribution::from_weights([
            (2, 0.26328),
            (3, 0.18020),
            (7, 0.27000),
            (30, 0.28649),
        ])
        .unwrap();
        let p = e.to_node();
        for (d, want) in [(2, 0.54889), (3, 0.25046), (7, 0.16083), (30, 0.03982)] {
            assert!((p.prob(d) - want).abs() < 5e-5, "p_X({d}) = {}", p.prob(d));
        }
        assert_eq!(edge(&[(7, 1.0)]).to_node().prob(7), 1.0);
    }

    #[test]
    fn zero_entries_are_stripped() {
        let p = node(&[(2, 0.0), (3, 1.0)]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.prob(2), 0.0);
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(NodeDegreeDistribution::new([(2, 0.5), (3, 0.4)]).is_err());
        assert!(NodeDegreeDistribution::new([(0, 1.0)]).is_err());
        assert!(NodeDegreeDistribution::new([(2, -0.1), (3, 1.1)]).is_err());
        assert!(NodeDegreeDistribution::new([(2, 0.5), (2, 0.5)]).is_err());
        assert!(NodeDegreeDistribution::new([(2, f64::NAN)]).is_err());
    }

    #[test]
    fn independent_joint() {
        let j = joint_independent(&edge(&[(3, 1.0)]), &edge(&[(6, 1.0)])).unwrap();
        assert_eq!(j.prob(3, 6), 1.0);
        assert_eq!(j.rate_ratio(), 2.0);

        let err = joint_independent(&edge(&[(3, 1.0)]), &edge(&[(3, 1.0)])).unwrap_err();
        assert!(matches!(err, Error::RateNotAboveOne { .. }));
    }

    #[test]
    fn shokrollahi_storn_means() {
        let ex = EdgeDegreeDistribution::from_weights([
            (2, 0.26328),
            (3, 0.18020),
            (7, 0.27000),
            (30, 0.28649),
        ])
        .unwrap();
        let ey = edge(&[(8, 0.63407), (9, 0.36593)]);
        let j = joint_independent(&ex, &ey).unwrap();
        assert!((j.mean_x() - 4.16966).abs() < 5e-4);
        assert!((j.mean_y() - 8.33906).abs() < 5e-6);
        assert!((j.rate_ratio() - 2.0).abs() < 1e-3);
        assert!(pearson_correlation(&j).unwrap().abs() < 1e-12);
        assert!(j.edge_x().max_abs_diff(&ex) < 1e-15);
        assert!(j.edge_y().max_abs_diff(&ey) < 1e-15);
    }

    #[test]
    fn two_degree_conditionals() {
        for q in [0.0, 0.25, 0.8, 1.0] {
            let j = two_degree(q, vec![2, 1]);
            let (yx, _) = conditionals(&j);
            let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
            assert!(close(yx[&6][&18], (1.0 - q) / 2.0));
            assert!(close(yx[&3][&18], (1.0 + q) / 2.0));
            assert!(close(yx[&6][&9], (1.0 + q) / 2.0));
            assert!(close(yx[&3][&9], (1.0 - q) / 2.0));
        }
    }

    #[test]
    fn block_correlation_is_minus_q() {
        for k in 0..=10 {
            let q = k as f64 / 10.0;
            let neg = pearson_correlation(&two_degree(q, vec![2, 1])).unwrap();
            let pos = pearson_correlation(&two_degree(q, vec![1, 2])).unwrap();
            assert!((neg + q).abs() < 1e-12, "q={q}: {neg}");
            assert!((pos - q).abs() < 1e-12, "q={q}: {pos}");
        }
    }

    #[test]
    fn block_q_zero_is_independent() {
        let j = two_degree(0.0, vec![2, 1]);
        let ind = joint_independent(j.edge_x(), j.edge_y()).unwrap();
        assert_eq!(j.cells(), ind.cells());
        assert!((j.rate_ratio() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_block_is_independent_for_any_q() {
        let p_x = node(&[(3, 1.0)]);
        let p_y = node(&[(6, 1.0)]);
        for q in [0.0, 0.3, 1.0] {
            let spec = BlockSpec::new(
                q,
                vec![1],
                [(3, 1)].into_iter().collect(),
                [(6, 1)].into_iter().collect(),
            )
            .unwrap();
            let j = joint_from_block(&p_x, &p_y, &spec).unwrap();
            assert_eq!(j.prob(3, 6), 1.0);
        }
    }

    #[test]
    fn block_spec_validation() {
        let blocks = |v: &[(Degree, usize)]| v.iter().copied().collect::<BTreeMap<_, _>>();
        assert!(BlockSpec::new(0.5, vec![1, 1], blocks(&[]), blocks(&[])).is_err());
        assert!(BlockSpec::new(1.5, vec![1, 2], blocks(&[]), blocks(&[])).is_err());
        assert!(BlockSpec::new(0.5, vec![1, 2], blocks(&[(3, 3)]), blocks(&[])).is_err());

        // degree-3 nodes carry 1/3 of the edge mass: uneven
        let p_x = node(&[(3, 0.5), (6, 0.5)]);
        let p_y = node(&[(9, 0.5), (18, 0.5)]);
        let spec = BlockSpec::new(
            0.5,
            vec![2, 1],
            blocks(&[(6, 1), (3, 2)]),
            blocks(&[(18, 1), (9, 2)]),
        )
        .unwrap();
        assert!(matches!(
            joint_from_block(&p_x, &p_y, &spec),
            Err(Error::UnevenBlockMass { .. })
        ));
        let partial = BlockSpec::new(
            0.5,
            vec![2, 1],
            blocks(&[(6, 1)]),
            blocks(&[(18, 1), (9, 2)]),
        )
        .unwrap();
        assert!(matches!(
            joint_from_block(&p_x, &p_y, &partial),
            Err(Error::InvalidBlockSpec(_))
        ));
    }

    #[test]
    fn general_two_degree_matches_block() {
        for q in [0.2, 0.37, 0.8] {
            let (p1, p2) = ((1.0 - q) / 4.0, (1.0 + q) / 4.0);
            let general = JointEdgeDistribution::from_cells([
                (6, 18, p1),
                (6, 9, p2),
                (3, 18, p2),
                (3, 9, 1.0 - p1 - 2.0 * p2),
            ])
            .unwrap();
            let block = two_degree(q, vec![2, 1]);
            assert!(general.max_abs_diff(&block) < 1e-15);
            assert!((pearson_correlation(&general).unwrap() + q).abs() < 1e-12);
            let (yx, _) = conditionals(&general);
            let want = (1.0 - p1 - 2.0 * p2) / (1.0 - p1 - p2);
            assert!((yx[&3][&9] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_anti_coupling() {
        let j = two_degree(1.0, vec![2, 1]);
        let (yx, xy) = conditionals(&j);
        assert_eq!(yx[&3][&18], 1.0);
        assert_eq!(xy[&18][&3], 1.0);
    }

    #[test]
    fn degenerate_correlation_is_an_error() {
        let j = joint_independent(&edge(&[(3, 1.0)]), &edge(&[(6, 0.5), (7, 0.5)])).unwrap();
        assert_eq!(
            pearson_correlation(&j),
            Err(Error::DegenerateVariance(Side::Variable))
        );
    }

    #[test]
    fn from_cells_rejects_empty_rows_and_bad_mass() {
        assert!(JointEdgeDistribution::from_cells([(3, 6, 0.5)]).is_err());
        assert!(JointEdgeDistribution::from_cells([(3, 6, 0.5), (3, 6, 0.5)]).is_err());
        let j = JointEdgeDistribution::from_cells([(3, 6, 1.0), (4, 6, 0.0)]).unwrap();
        assert_eq!(j.x_degrees(), &[3]);
    }
}
