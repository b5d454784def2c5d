//! Searches over ensembles: the `q` sweep of the block construction and a
//! differential-evolution search over joints with fixed marginals.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::construct::stream_rng;
use crate::de::{threshold, ThresholdOptions, ThresholdResult};
use crate::dist::{
    joint_from_block, joint_independent, BlockSpec, Degree, EdgeDegreeDistribution,
    JointEdgeDistribution, NodeDegreeDistribution,
};
use crate::error::{Error, Result};

/// Dependent cells may dip this far below zero from rounding and are clamped.
const NEGATIVE_SLACK: f64 = 1e-13;

/// Fixed marginals plus the free cells that parameterize joints having them.
///
/// The free cells are all of `(X \ {x_dep}) × (Y \ {y_dep})`; the row `x_dep`
/// and column `y_dep` are then determined by the marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalConstraint {
    edge_x: EdgeDegreeDistribution,
    edge_y: EdgeDegreeDistribution,
    free_cells: Vec<(Degree, Degree)>,
    dependent_x: Degree,
    dependent_y: Degree,
}

impl MarginalConstraint {
    /// Default parameterization: the largest degree on each side is
    /// dependent, free cells are listed with the smaller-support side as the
    /// outer index.
    pub fn new(edge_x: EdgeDegreeDistribution, edge_y: EdgeDegreeDistribution) -> Result<Self> {
        let xs: Vec<Degree> = edge_x.degrees().collect();
        let ys: Vec<Degree> = edge_y.degrees().collect();
        let (fx, fy) = (&xs[..xs.len() - 1], &ys[..ys.len() - 1]);
        let free_cells = if ys.len() <= xs.len() {
            fy.iter()
                .flat_map(|&y| fx.iter().map(move |&x| (x, y)))
                .collect()
        } else {
            fx.iter()
                .flat_map(|&x| fy.iter().map(move |&y| (x, y)))
                .collect()
        };
        Self::with_free_cells(edge_x, edge_y, free_cells)
    }

    /// Custom ordering or choice of dependent row/column. `free_cells` must
    /// cover `(X \ {x_dep}) × (Y \ {y_dep})` exactly once for some `x_dep`,
    /// `y_dep`.
    pub fn with_free_cells(
        edge_x: EdgeDegreeDistribution,
        edge_y: EdgeDegreeDistribution,
        free_cells: Vec<(Degree, Degree)>,
    ) -> Result<Self> {
        // the product joint must exist (G > 1)
        joint_independent(&edge_x, &edge_y)?;
        let xs: Vec<Degree> = edge_x.degrees().collect();
        let ys: Vec<Degree> = edge_y.degrees().collect();
        let missing = |all: &[Degree], used: &mut dyn Iterator<Item = Degree>| {
            let used: Vec<Degree> = used.collect();
            let rest: Vec<Degree> = all.iter().copied().filter(|d| !used.contains(d)).collect();
            (rest.len() == 1).then(|| rest[0])
        };
        let bad = || {
            Error::InvalidParameter(format!(
                "free cells {free_cells:?} do not leave exactly one dependent row and column"
            ))
        };
        let dependent_x = missing(&xs, &mut free_cells.iter().map(|c| c.0)).ok_or_else(bad)?;
        let dependent_y = missing(&ys, &mut free_cells.iter().map(|c| c.1)).ok_or_else(bad)?;
        let expected = (xs.len() - 1) * (ys.len() - 1);
        let mut sorted = free_cells.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != expected
            || free_cells.len() != expected
            || sorted
                .iter()
                .any(|&(x, y)| edge_x.prob(x) == 0.0 || edge_y.prob(y) == 0.0)
        {
            return Err(bad());
        }
        Ok(Self {
            edge_x,
            edge_y,
            free_cells,
            dependent_x,
            dependent_y,
        })
    }

    pub fn edge_x(&self) -> &EdgeDegreeDistribution {
        &self.edge_x
    }

    pub fn edge_y(&self) -> &EdgeDegreeDistribution {
        &self.edge_y
    }

    pub fn free_cells(&self) -> &[(Degree, Degree)] {
        &self.free_cells
    }

    pub fn dimension(&self) -> usize {
        self.free_cells.len()
    }

    /// Box `[0, min(p_{X_e}(x), p_{Y_e}(y))]` for each free cell.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.free_cells
            .iter()
            .map(|&(x, y)| (0.0, self.edge_x.prob(x).min(self.edge_y.prob(y))))
            .collect()
    }

    /// Free-cell values of the product joint.
    pub fn independent_point(&self) -> Vec<f64> {
        self.free_cells
            .iter()
            .map(|&(x, y)| self.edge_x.prob(x) * self.edge_y.prob(y))
            .collect()
    }

    /// Completes `values` to a joint with exactly these marginals.
    pub fn joint_from_free_cells(&self, values: &[f64]) -> Result<JointEdgeDistribution> {
        if values.len() != self.free_cells.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} free-cell values, got {}",
                self.free_cells.len(),
                values.len()
            )));
        }
        for ((&(x, y), &v), (lo, hi)) in self.free_cells.iter().zip(values).zip(self.bounds()) {
            if !(lo..=hi).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "free cell ({x}, {y}) = {v} outside [{lo}, {hi}]"
                )));
            }
        }
        let xs: Vec<Degree> = self.edge_x.degrees().collect();
        let ys: Vec<Degree> = self.edge_y.degrees().collect();
        let ny = ys.len();
        let ix = |x: Degree| xs.binary_search(&x).unwrap_or_else(|_| unreachable!());
        let iy = |y: Degree| ys.binary_search(&y).unwrap_or_else(|_| unreachable!());
        let (dx, dy) = (ix(self.dependent_x), iy(self.dependent_y));
        let mut cells = vec![0.0; xs.len() * ny];
        for (&(x, y), &v) in self.free_cells.iter().zip(values) {
            cells[ix(x) * ny + iy(y)] = v;
        }
        let settle = |cells: &mut [f64], i: usize, j: usize, v: f64| {
            if v < -NEGATIVE_SLACK {
                return Err(Error::InfeasiblePoint {
                    cell: (xs[i], ys[j]),
                    value: v,
                });
            }
            cells[i * ny + j] = v.max(0.0);
            Ok(())
        };
        for (i, &x) in xs.iter().enumerate().filter(|&(i, _)| i != dx) {
            let used: f64 = (0..ny)
                .filter(|&j| j != dy)
                .map(|j| cells[i * ny + j])
                .sum();
            settle(&mut cells, i, dy, self.edge_x.prob(x) - used)?;
        }
        for (j, &y) in ys.iter().enumerate().filter(|&(j, _)| j != dy) {
            let used: f64 = (0..xs.len())
                .filter(|&i| i != dx)
                .map(|i| cells[i * ny + j])
                .sum();
            settle(&mut cells, dx, j, self.edge_y.prob(y) - used)?;
        }
        let used: f64 = (0..ny)
            .filter(|&j| j != dy)
            .map(|j| cells[dx * ny + j])
            .sum();
        settle(
            &mut cells,
            dx,
            dy,
            self.edge_x.prob(self.dependent_x) - used,
        )?;
        JointEdgeDistribution::from_dense(xs, ys, cells)
    }
}

pub fn joint_from_free_cells(
    constraint: &MarginalConstraint,
    values: &[f64],
) -> Result<JointEdgeDistribution> {
    constraint.joint_from_free_cells(values)
}

/// `δ*(q)` over a grid, sorted by `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<(f64, ThresholdResult)>,
}

impl SweepResult {
    /// `(q, δ*)` of the best grid point; the first one on ties.
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.points.iter().fold(None, |best, (q, r)| match best {
            Some((_, d)) if d >= r.delta_star => best,
            _ => Some((*q, r.delta_star)),
        })
    }
}

/// Evaluates the threshold of many joints; implementations may run them
/// concurrently but must return results in input order.
pub trait BatchEvaluator {
    fn evaluate(
        &self,
        joints: &[JointEdgeDistribution],
        options: &ThresholdOptions,
    ) -> Result<Vec<ThresholdResult>>;
}

/// Evaluates one joint after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialEvaluator;

impl BatchEvaluator for SerialEvaluator {
    fn evaluate(
        &self,
        joints: &[JointEdgeDistribution],
        options: &ThresholdOptions,
    ) -> Result<Vec<ThresholdResult>> {
        joints.iter().map(|j| threshold(j, options)).collect()
    }
}

/// Block joints for every `q` in `q_grid` (the template's own `q` is ignored).
pub fn sweep_joints(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    template: &BlockSpec,
    q_grid: &[f64],
) -> Result<Vec<(f64, JointEdgeDistribution)>> {
    let mut grid = q_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    grid.iter()
        .map(|&q| Ok((q, joint_from_block(p_x, p_y, &template.with_q(q)?)?)))
        .collect()
}

pub fn sweep_q_with(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    template: &BlockSpec,
    q_grid: &[f64],
    options: &ThresholdOptions,
    evaluator: &dyn BatchEvaluator,
) -> Result<SweepResult> {
    let (qs, joints): (Vec<f64>, Vec<JointEdgeDistribution>) =
        sweep_joints(p_x, p_y, template, q_grid)?
            .into_iter()
            .unzip();
    let results = evaluator.evaluate(&joints, options)?;
    Ok(SweepResult {
        points: qs.into_iter().zip(results).collect(),
    })
}

pub fn sweep_q(
    p_x: &NodeDegreeDistribution,
    p_y: &NodeDegreeDistribution,
    template: &BlockSpec,
    q_grid: &[f64],
    options: &ThresholdOptions,
) -> Result<SweepResult> {
    sweep_q_with(p_x, p_y, template, q_grid, options, &SerialEvaluator)
}

/// Differential-evolution settings (rand/1/bin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Population size is this multiple of the number of free cells.
    pub population_factor: usize,
    pub generations: usize,
    pub crossover: f64,
    pub scale: f64,
    /// Fitness inside the search loop.
    pub coarse: ThresholdOptions,
    /// Final evaluation of the incumbent and of the product joint.
    pub fine: ThresholdOptions,
    /// Attempts at drawing a feasible candidate before giving up on a slot.
    pub max_resample: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            population_factor: 10,
            generations: 200,
            crossover: 0.9,
            scale: 0.7,
            coarse: ThresholdOptions {
                precision: 1e-5,
                probe_points: 0,
                ..ThresholdOptions::default()
            },
            fine: ThresholdOptions {
                precision: 1e-6,
                probe_points: 0,
                ..ThresholdOptions::default()
            },
            max_resample: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best_joint: JointEdgeDistribution,
    pub best_values: Vec<f64>,
    /// Fine threshold of `best_joint`.
    pub result: ThresholdResult,
    /// Fine threshold of the product joint.
    pub baseline_independent: ThresholdResult,
    /// Coarse threshold evaluations spent by the search.
    pub evaluations: usize,
    pub generations_run: usize,
}

fn candidate_stream(generation: usize, index: usize) -> u64 {
    ((generation as u64) << 32) | index as u64
}

fn uniform_in_box<R: Rng + ?Sized>(bounds: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
        .collect()
}

/// Maximizes `δ*` over joints with the constraint's marginals, using the
/// default settings and a serial evaluator.
pub fn optimize_joint(
    constraint: &MarginalConstraint,
    budget: usize,
    seed: u64,
) -> Result<OptimizeOutcome> {
    optimize_joint_with(
        constraint,
        budget,
        seed,
        &OptimizerSettings::default(),
        &SerialEvaluator,
    )
}

/// Differential evolution over the free-cell box. The product joint is always
/// in the initial population, infeasible candidates are redrawn, and the search
/// stops once `budget` coarse evaluations are spent.
pub fn optimize_joint_with(
    constraint: &MarginalConstraint,
    budget: usize,
    seed: u64,
    settings: &OptimizerSettings,
    evaluator: &dyn BatchEvaluator,
) -> Result<OptimizeOutcome> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    let bounds = constraint.bounds();
    let dim = bounds.len();
    let product_values = constraint.independent_point();
    let product = constraint.joint_from_free_cells(&product_values)?;
    let fine_of = |joint: &JointEdgeDistribution| -> Result<ThresholdResult> {
        Ok(evaluator
            .evaluate(core::slice::from_ref(joint), &settings.fine)?
            .remove(0))
    };
    let baseline = fine_of(&product)?;
    if dim == 0 {
        return Ok(OptimizeOutcome {
            best_joint: product,
            best_values: product_values,
            result: baseline.clone(),
            baseline_independent: baseline,
            evaluations: 0,
            generations_run: 0,
        });
    }

    let pop_size = (settings.population_factor * dim).max(4).min(budget);
    let mut population: Vec<Vec<f64>> = Vec::with_capacity(pop_size);
    let mut joints: Vec<JointEdgeDistribution> = Vec::with_capacity(pop_size);
    population.push(product_values.clone());
    joints.push(product.clone());
    for idx in 1..pop_size {
        let mut rng = stream_rng(seed, candidate_stream(0, idx));
        let drawn = (0..settings.max_resample).find_map(|_| {
            let v = uniform_in_box(&bounds, &mut rng);
            constraint.joint_from_free_cells(&v).ok().map(|j| (v, j))
        });
        let (v, j) = drawn.unwrap_or_else(|| (product_values.clone(), product.clone()));
        population.push(v);
        joints.push(j);
    }
    let mut fitness: Vec<f64> = evaluator
        .evaluate(&joints, &settings.coarse)?
        .into_iter()
        .map(|r| r.delta_star)
        .collect();
    let mut evaluations = pop_size;
    let mut generations_run = 0;

    for generation in 1..=settings.generations {
        if evaluations >= budget || pop_size < 4 {
            break;
        }
        let slots = pop_size.min(budget - evaluations);
        let mut trial_idx = Vec::with_capacity(slots);
        let mut trial_vals = Vec::with_capacity(slots);
        let mut trial_joints = Vec::with_capacity(slots);
        for target in 0..slots {
            let mut rng = stream_rng(seed, candidate_stream(generation, target));
            let drawn = (0..settings.max_resample).find_map(|_| {
                let mut pick = || loop {
                    let r = rng.gen_range(0..pop_size);
                    if r != target {
                        break r;
                    }
                };
                let (r1, mut r2, mut r3) = (pick(), pick(), pick());
                while r2 == r1 {
                    r2 = pick();
                }
                while r3 == r1 || r3 == r2 {
                    r3 = pick();
                }
                let forced = rng.gen_range(0..dim);
                let v: Vec<f64> = (0..dim)
                    .map(|k| {
                        let cross = k == forced || rng.gen::<f64>() < settings.crossover;
                        let raw = if cross {
                            population[r1][k]
                                + settings.scale * (population[r2][k] - population[r3][k])
                        } else {
                            population[target][k]
                        };
                        raw.clamp(bounds[k].0, bounds[k].1)
                    })
                    .collect();
                constraint.joint_from_free_cells(&v).ok().map(|j| (v, j))
            });
            if let Some((v, j)) = drawn {
                trial_idx.push(target);
                trial_vals.push(v);
                trial_joints.push(j);
            }
        }
        let results = evaluator.evaluate(&trial_joints, &settings.coarse)?;
        evaluations += slots;
        generations_run = generation;
        for ((target, v), r) in trial_idx.into_iter().zip(trial_vals).zip(results) {
            if r.delta_star >= fitness[target] {
                fitness[target] = r.delta_star;
                population[target] = v;
            }
        }
    }

    let best = (0..pop_size).fold(0, |b, k| if fitness[k] > fitness[b] { k } else { b });
    let best_values = population[best].clone();
    let best_joint = constraint.joint_from_free_cells(&best_values)?;
    let result = fine_of(&best_joint)?;
    let (best_joint, best_values, result) = if result.delta_star < baseline.delta_star {
        (product, product_values, baseline.clone())
    } else {
        (best_joint, best_values, result)
    };
    Ok(OptimizeOutcome {
        best_joint,
        best_values,
        result,
        baseline_independent: baseline,
        evaluations,
        generations_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bazzi(a: f64) -> MarginalConstraint {
        MarginalConstraint::new(
            EdgeDegreeDistribution::new([(3, a), (4, 1.0 - a)]).unwrap(),
            EdgeDegreeDistribution::new([(7, 7.0 * a / 3.0), (8, 1.0 - 7.0 * a / 3.0)]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn default_free_cells_for_4x2() {
        let c = MarginalConstraint::new(
            EdgeDegreeDistribution::new([(2, 0.25), (3, 0.25), (7, 0.25), (30, 0.25)]).unwrap(),
            EdgeDegreeDistribution::new([(8, 0.5), (9, 0.5)]).unwrap(),
        )
        .unwrap();
        assert_eq!(c.free_cells(), &[(2, 8), (3, 8), (7, 8)]);
    }

    #[test]
    fn independence_point_recovers_product() {
        let a = 0.1115;
        let c = bazzi(a);
        assert_eq!(c.free_cells(), &[(3, 7)]);
        let p11 = a * 7.0 * a / 3.0;
        let j = c.joint_from_free_cells(&[p11]).unwrap();
        let product = joint_independent(c.edge_x(), c.edge_y()).unwrap();
        assert!(j.max_abs_diff(&product) < 1e-15);
    }

    #[test]
    fn marginals_are_exact() {
        let c = bazzi(0.1115);
        for p in [0.0, 0.01, 0.05, 0.1115] {
            let j = c.joint_from_free_cells(&[p]).unwrap();
            assert!(j.edge_x().max_abs_diff(c.edge_x()) < 1e-12);
            assert!(j.edge_y().max_abs_diff(c.edge_y()) < 1e-12);
        }
    }

    #[test]
    fn infeasible_dependent_cell() {
        // both free cells at their caps force the (30, 8) cell negative
        let c = MarginalConstraint::new(
            EdgeDegreeDistribution::new([(2, 0.4), (3, 0.4), (30, 0.2)]).unwrap(),
            EdgeDegreeDistribution::new([(8, 0.5), (9, 0.5)]).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            c.joint_from_free_cells(&[0.4, 0.4]),
            Err(Error::InfeasiblePoint { .. })
        ));
        assert!(matches!(
            c.joint_from_free_cells(&[0.5, 0.0]),
            Err(Error::InvalidParameter(_))
        ));
        assert!(c.joint_from_free_cells(&[0.1]).is_err());
    }

    #[test]
    fn custom_free_cells_are_validated() {
        let ex = EdgeDegreeDistribution::new([(3, 0.5), (4, 0.5)]).unwrap();
        let ey = EdgeDegreeDistribution::new([(7, 0.5), (8, 0.5)]).unwrap();
        assert!(MarginalConstraint::with_free_cells(ex.clone(), ey.clone(), vec![(4, 8)]).is_ok());
        assert!(MarginalConstraint::with_free_cells(ex.clone(), ey.clone(), vec![]).is_err());
        assert!(MarginalConstraint::with_free_cells(ex, ey, vec![(3, 7), (4, 8)]).is_err());
    }

    #[test]
    fn argmax_prefers_first_on_ties() {
        let r = |d: f64| ThresholdResult {
            delta_star: d,
            bracket: (d, d),
            lower_bound: 0.0,
            upper_bound: 1.0,
            iterations_used: 0,
            criterion: Default::default(),
            anomaly: false,
        };
        let s = SweepResult {
            points: vec![(0.0, r(0.1)), (0.1, r(0.3)), (0.2, r(0.3))],
        };
        assert_eq!(s.argmax(), Some((0.1, 0.3)));
    }
}
