//! Density evolution over the binary erasure channel for ensembles with
//! degree-degree correlations.
//!
//! With `P(y|x)` and `P(x|y)` the edge conditionals of the joint, one
//! iteration maps the variable-end erasure probabilities `α_x` to
//!
//! ```text
//! β_y = 1 − (1 − Σ_x α_x·P(x|y))^(y−1)
//! α_x = δ·(Σ_y β_y·P(y|x))^(x−1)
//! γ_x = 1 − δ·(Σ_y β_y·P(y|x))^x,     γ = Σ_x γ_x·p_X(x)
//! ```
//!
//! starting from `α_x = δ`. The threshold `δ*` is the largest `δ` for which
//! every `α_x` is driven to zero.

use alloc::vec::Vec;
use core::fmt;

use crate::dist::{Degree, JointEdgeDistribution};
use crate::error::{Error, Result};

/// `base^exp` by repeated squaring.
#[inline]
pub fn pow_int(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Stopping rule for [`DensityEvolution::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    /// Converged once `max_x α_x < epsilon`.
    pub epsilon: f64,
    pub max_iter: usize,
    /// Plateau detection: give up when `α_max` dropped by less than
    /// `plateau_tolerance` over the last `plateau_window` iterations.
    pub plateau_window: usize,
    pub plateau_tolerance: f64,
}

impl Default for Convergence {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            max_iter: 20_000,
            plateau_window: 100,
            plateau_tolerance: 1e-12,
        }
    }
}

impl Convergence {
    pub fn new(epsilon: f64, max_iter: usize) -> Result<Self> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "epsilon = {epsilon} must be positive"
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(Self {
            epsilon,
            max_iter,
            ..Self::default()
        })
    }
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_x alpha_x < {:e} within {} iterations (plateau: decrease < {:e} over {} iterations)",
            self.epsilon, self.max_iter, self.plateau_tolerance, self.plateau_window
        )
    }
}

/// One density-evolution iterate. Vectors are aligned with the joint's
/// variable degrees (`alpha`, `gamma_by_degree`) and check degrees (`beta`).
#[derive(Debug, Clone, PartialEq)]
pub struct DeState {
    pub iteration: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
    pub gamma_by_degree: Vec<f64>,
}

impl DeState {
    pub fn alpha_max(&self) -> f64 {
        self.alpha.iter().copied().fold(0.0, f64::max)
    }
}

/// Outcome of iterating from `α_x = δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeRun {
    pub state: DeState,
    pub converged: bool,
}

/// Precomputed conditionals for repeated density-evolution runs on one joint.
#[derive(Debug, Clone)]
pub struct DensityEvolution {
    x_degrees: Vec<Degree>,
    y_degrees: Vec<Degree>,
    /// Row-major over variable degrees.
    y_given_x: Vec<f64>,
    /// Row-major over check degrees.
    x_given_y: Vec<f64>,
    node_x: Vec<f64>,
}

impl DensityEvolution {
    pub fn new(joint: &JointEdgeDistribution) -> Self {
        Self {
            x_degrees: joint.x_degrees().to_vec(),
            y_degrees: joint.y_degrees().to_vec(),
            y_given_x: joint.y_given_x_matrix(),
            x_given_y: joint.x_given_y_matrix(),
            node_x: joint.node_x().iter().map(|(_, p)| p).collect(),
        }
    }

    pub fn x_degrees(&self) -> &[Degree] {
        &self.x_degrees
    }

    pub fn y_degrees(&self) -> &[Degree] {
        &self.y_degrees
    }

    /// Check-end update from the previous variable-end erasure probabilities.
    fn update_beta(&self, alpha_prev: &[f64], beta: &mut [f64]) {
        let nx = self.x_degrees.len();
        for (j, (&y, b)) in self.y_degrees.iter().zip(beta.iter_mut()).enumerate() {
            let row = &self.x_given_y[j * nx..(j + 1) * nx];
            // convex combinations of values in [0, 1]; clamp rounding excursions
            let s = row
                .iter()
                .zip(alpha_prev)
                .map(|(p, a)| p * a)
                .sum::<f64>()
                .min(1.0);
            *b = 1.0 - pow_int(1.0 - s, y - 1);
        }
    }

    /// Variable-end update; also fills the per-degree decoded fractions and
    /// returns `γ`.
    fn update_alpha(
        &self,
        delta: f64,
        beta: &[f64],
        alpha: &mut [f64],
        gamma_x: &mut [f64],
    ) -> f64 {
        let ny = self.y_degrees.len();
        let mut gamma = 0.0;
        for (i, &x) in self.x_degrees.iter().enumerate() {
            let row = &self.y_given_x[i * ny..(i + 1) * ny];
            let t = row
                .iter()
                .zip(beta)
                .map(|(p, b)| p * b)
                .sum::<f64>()
                .min(1.0);
            let t_pow = pow_int(t, x - 1);
            alpha[i] = delta * t_pow;
            gamma_x[i] = 1.0 - delta * t_pow * t;
            gamma += gamma_x[i] * self.node_x[i];
        }
        gamma
    }

    /// One iteration from `alpha_prev` (aligned with the variable degrees).
    pub fn step(&self, delta: f64, alpha_prev: &[f64], iteration: usize) -> DeState {
        assert_eq!(
            alpha_prev.len(),
            self.x_degrees.len(),
            "alpha_prev has the wrong length"
        );
        let mut beta = alloc::vec![0.0; self.y_degrees.len()];
        let mut alpha = alloc::vec![0.0; self.x_degrees.len()];
        let mut gamma_by_degree = alloc::vec![0.0; self.x_degrees.len()];
        self.update_beta(alpha_prev, &mut beta);
        let gamma = self.update_alpha(delta, &beta, &mut alpha, &mut gamma_by_degree);
        DeState {
            iteration,
            alpha,
            beta,
            gamma,
            gamma_by_degree,
        }
    }

    /// Initial state `α_x = δ`, `β_y = 1`, i.e. before any decoding.
    pub fn initial(&self, delta: f64) -> DeState {
        DeState {
            iteration: 0,
            alpha: alloc::vec![delta; self.x_degrees.len()],
            beta: alloc::vec![1.0; self.y_degrees.len()],
            gamma: 1.0 - delta,
            gamma_by_degree: alloc::vec![1.0 - delta; self.x_degrees.len()],
        }
    }

    /// Iterates from `α_x = δ` until convergence, plateau, or `max_iter`.
    pub fn run(&self, delta: f64, rule: &Convergence) -> DeRun {
        self.run_observed(delta, rule, |_| {})
    }

    /// Like [`run`](Self::run) but hands every iterate (including the initial
    /// one) to `observe`.
    pub fn run_observed<F>(&self, delta: f64, rule: &Convergence, mut observe: F) -> DeRun
    where
        F: FnMut(&DeState),
    {
        let mut state = self.initial(delta);
        observe(&state);
        let mut next_alpha = alloc::vec![0.0; self.x_degrees.len()];
        let window = rule.plateau_window.max(1);
        let mut history = alloc::vec![f64::INFINITY; window];
        let mut converged = state.alpha_max() < rule.epsilon;
        while !converged && state.iteration < rule.max_iter {
            self.update_beta(&state.alpha, &mut state.beta);
            state.gamma = self.update_alpha(
                delta,
                &state.beta,
                &mut next_alpha,
                &mut state.gamma_by_degree,
            );
            core::mem::swap(&mut state.alpha, &mut next_alpha);
            state.iteration += 1;
            observe(&state);
            let a_max = state.alpha_max();
            if a_max < rule.epsilon {
                converged = true;
                break;
            }
            let slot = state.iteration % window;
            if state.iteration >= window && history[slot] - a_max < rule.plateau_tolerance {
                break;
            }
            history[slot] = a_max;
        }
        DeRun { state, converged }
    }
}

/// Single iteration on a joint; see [`DensityEvolution::step`].
pub fn de_step(joint: &JointEdgeDistribution, delta: f64, alpha_prev: &[f64]) -> DeState {
    DensityEvolution::new(joint).step(delta, alpha_prev, 1)
}

pub fn de_run(joint: &JointEdgeDistribution, delta: f64, rule: &Convergence) -> DeRun {
    DensityEvolution::new(joint).run(delta, rule)
}

/// Threshold search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    /// Final bracket width.
    pub precision: f64,
    pub convergence: Convergence,
    /// Evenly spaced probes of the convergence predicate used to flag
    /// non-monotone behaviour. Zero disables the check.
    pub probe_points: usize,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            precision: 1e-4,
            convergence: Convergence::default(),
            probe_points: 8,
        }
    }
}

impl ThresholdOptions {
    pub fn with_precision(precision: f64) -> Self {
        Self {
            precision,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Largest erasure probability verified to converge (the bracket's lower end).
    pub delta_star: f64,
    pub bracket: (f64, f64),
    /// Stability bound `1/(d_c,max − 1)`, or zero when `d_v,min < 2`.
    pub lower_bound: f64,
    /// Capacity bound `1/G`.
    pub upper_bound: f64,
    /// Density-evolution iterations spent over the whole search.
    pub iterations_used: usize,
    pub criterion: Convergence,
    /// Set when a probe contradicted monotonicity of convergence in `δ`.
    pub anomaly: bool,
}

/// Sufficient-condition bound `δ* ≥ 1/(d_c,max − 1)`, valid when every
/// variable degree is at least two.
pub fn stability_lower_bound(joint: &JointEdgeDistribution) -> Result<f64> {
    let dv_min = joint.x_degrees()[0];
    if dv_min < 2 {
        return Err(Error::HypothesisViolated {
            min_variable_degree: dv_min,
        });
    }
    let dc_max = *joint.y_degrees().last().unwrap_or_else(|| unreachable!());
    Ok(1.0 / (dc_max as f64 - 1.0))
}

/// `δ* ≤ 1/G = E[X]/E[Y]`.
pub fn capacity_upper_bound(joint: &JointEdgeDistribution) -> f64 {
    joint.mean_x() / joint.mean_y()
}

/// Bisection for `δ*` over `[0, 1/G]` with de_run convergence as predicate.
pub fn threshold(
    joint: &JointEdgeDistribution,
    options: &ThresholdOptions,
) -> Result<ThresholdResult> {
    if options.precision.is_nan() || options.precision <= 0.0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "precision = {} must be positive",
            options.precision
        )));
    }
    let de = DensityEvolution::new(joint);
    let rule = options.convergence;
    let upper_bound = capacity_upper_bound(joint);
    let lower_bound = stability_lower_bound(joint).unwrap_or(0.0);
    let mut iterations_used = 0;
    let mut converges = |delta: f64| {
        let run = de.run(delta, &rule);
        iterations_used += run.state.iteration;
        run.converged
    };

    let (mut lo, mut hi) = (0.0, upper_bound);
    let mut anomaly = !converges(lo);
    if converges(hi) {
        lo = hi;
    } else {
        while hi - lo > options.precision {
            let mid = 0.5 * (lo + hi);
            if converges(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    for k in 1..=options.probe_points {
        let delta = upper_bound * k as f64 / (options.probe_points + 1) as f64;
        if (delta < lo && !converges(delta)) || (delta > hi && converges(delta)) {
            anomaly = true;
        }
    }
    Ok(ThresholdResult {
        delta_star: lo,
        bracket: (lo, hi),
        lower_bound,
        upper_bound,
        iterations_used,
        criterion: rule,
        anomaly,
    })
}
