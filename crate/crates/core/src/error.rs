use alloc::string::String;
use core::fmt;

/// Which side of the Tanner graph a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Variable,
    Check,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Variable => f.write_str("variable"),
            Side::Check => f.write_str("check"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A degree distribution or joint distribution failed validation.
    InvalidDistribution(String),
    /// `G = E[Y]/E[X]` must exceed one for the code to carry information bits.
    RateNotAboveOne {
        g: f64,
    },
    /// Malformed block specification (permutation, block indices, q).
    InvalidBlockSpec(String),
    /// A block does not carry edge mass `1/b`.
    UnevenBlockMass {
        side: Side,
        block: usize,
        mass: f64,
        expected: f64,
    },
    /// Pearson correlation requested for a marginal with a single support point.
    DegenerateVariance(Side),
    /// Stability bound requested for a joint with a degree-one variable node.
    HypothesisViolated {
        min_variable_degree: u32,
    },
    /// Integer realization of node/edge counts could not be made consistent.
    InfeasibleRounding(String),
    /// A dependent cell of a free-cell parameterization came out negative.
    InfeasiblePoint {
        cell: (u32, u32),
        value: f64,
    },
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::RateNotAboveOne { g } => {
                write!(f, "rate ratio G = E[Y]/E[X] = {g} must be greater than 1")
            }
            Error::InvalidBlockSpec(msg) => write!(f, "invalid block spec: {msg}"),
            Error::UnevenBlockMass {
                side,
                block,
                mass,
                expected,
            } => write!(
                f,
                "{side} block {block} carries edge mass {mass}, expected {expected}"
            ),
            Error::DegenerateVariance(side) => {
                write!(
                    f,
                    "{side}-end degree has zero variance; correlation undefined"
                )
            }
            Error::HypothesisViolated {
                min_variable_degree,
            } => write!(
                f,
                "contraction bound needs minimum variable degree >= 2, got {min_variable_degree}"
            ),
            Error::InfeasibleRounding(msg) => write!(f, "infeasible rounding: {msg}"),
            Error::InfeasiblePoint { cell, value } => write!(
                f,
                "infeasible point: dependent cell ({}, {}) = {value} is negative",
                cell.0, cell.1
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;
