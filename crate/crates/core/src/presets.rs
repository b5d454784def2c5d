//! Published ensembles, stored as their printed decimal digits.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{BlockSpec, Degree, EdgeDegreeDistribution, NodeDegreeDistribution};
use crate::error::{Error, Result};
use crate::opt::MarginalConstraint;

/// Shokrollahi–Storn variable edge marginal. The printed digits sum to
/// 0.99997 and are renormalized on load.
pub const SHOKROLLAHI_STORN_X: [(Degree, &str); 4] = [
    (2, "0.26328"),
    (3, "0.18020"),
    (7, "0.27000"),
    (30, "0.28649"),
];
pub const SHOKROLLAHI_STORN_Y: [(Degree, &str); 2] = [(8, "0.63407"), (9, "0.36593")];
pub const RU_EX363_X: [(Degree, &str); 4] = [
    (2, "0.10626"),
    (3, "0.48666"),
    (11, "0.01039"),
    (20, "0.39669"),
];
pub const RU_EX363_Y: [(Degree, &str); 2] = [(8, "0.5"), (9, "0.5")];
pub const BAZZI_A: &str = "0.1115";

fn parse(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::InvalidDistribution(alloc::format!("bad decimal {s:?}")))
}

fn parse_table(table: &[(Degree, &str)]) -> Result<Vec<(Degree, f64)>> {
    table.iter().map(|&(d, s)| Ok((d, parse(s)?))).collect()
}

pub fn shokrollahi_storn() -> Result<MarginalConstraint> {
    MarginalConstraint::new(
        EdgeDegreeDistribution::from_weights(parse_table(&SHOKROLLAHI_STORN_X)?)?,
        EdgeDegreeDistribution::new(parse_table(&SHOKROLLAHI_STORN_Y)?)?,
    )
}

pub fn ru_ex363() -> Result<MarginalConstraint> {
    MarginalConstraint::new(
        EdgeDegreeDistribution::new(parse_table(&RU_EX363_X)?)?,
        EdgeDegreeDistribution::new(parse_table(&RU_EX363_Y)?)?,
    )
}

/// Rate one-half family with `p_{X_e}(3) = a`, `p_{Y_e}(7) = 7a/3`;
/// requires `0 < a < 3/7`.
pub fn bazzi(a: f64) -> Result<MarginalConstraint> {
    if !(a > 0.0 && 7.0 * a / 3.0 < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "a = {a} outside (0, 3/7)"
        )));
    }
    MarginalConstraint::new(
        EdgeDegreeDistribution::new([(3, a), (4, 1.0 - a)])?,
        EdgeDegreeDistribution::new([(7, 7.0 * a / 3.0), (8, 1.0 - 7.0 * a / 3.0)])?,
    )
}

pub fn bazzi_default() -> Result<MarginalConstraint> {
    bazzi(parse(BAZZI_A)?)
}

/// Two-degree block ensemble: a third of the variable nodes have degree
/// `2d`, the rest `d`; checks have degrees `2Gd` and `Gd` in the same
/// proportions. Block 1 holds the larger degrees on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDegree {
    pub p_x: NodeDegreeDistribution,
    pub p_y: NodeDegreeDistribution,
    pub spec: BlockSpec,
}

impl TwoDegree {
    pub fn new(g: u32, d: u32, q: f64, pi: Vec<usize>) -> Result<Self> {
        if g < 2 || d < 1 {
            return Err(Error::InvalidParameter(alloc::format!(
                "need G >= 2 and d >= 1, got G = {g}, d = {d}"
            )));
        }
        let (lo_x, hi_x) = (d, 2 * d);
        let (lo_y, hi_y) = (g * d, 2 * g * d);
        let p_x = NodeDegreeDistribution::new([(lo_x, 2.0 / 3.0), (hi_x, 1.0 / 3.0)])?;
        let p_y = NodeDegreeDistribution::new([(lo_y, 2.0 / 3.0), (hi_y, 1.0 / 3.0)])?;
        let spec = BlockSpec::new(
            q,
            pi,
            BTreeMap::from([(hi_x, 1), (lo_x, 2)]),
            BTreeMap::from([(hi_y, 1), (lo_y, 2)]),
        )?;
        spec.validate_against(&p_x, &p_y)?;
        Ok(Self { p_x, p_y, spec })
    }

    /// `G = 3`, `d = 3`, anti-matched blocks.
    pub fn standard(q: f64) -> Result<Self> {
        Self::new(3, 3, q, vec![2, 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_load() {
        let ss = shokrollahi_storn().unwrap();
        assert_eq!(ss.dimension(), 3);
        assert!((ss.edge_x().prob(2) - 0.26328 / 0.99997).abs() < 1e-15);
        assert_eq!(ru_ex363().unwrap().dimension(), 3);
        let b = bazzi_default().unwrap();
        assert_eq!(b.free_cells(), &[(3, 7)]);
        assert!(bazzi(0.5).is_err());
    }

    #[test]
    fn two_degree_means() {
        let t = TwoDegree::standard(0.37).unwrap();
        assert!((t.p_x.mean() - 4.0).abs() < 1e-12);
        assert!((t.p_y.mean() - 12.0).abs() < 1e-12);
        assert!(TwoDegree::new(1, 3, 0.0, vec![2, 1]).is_err());
    }
}
