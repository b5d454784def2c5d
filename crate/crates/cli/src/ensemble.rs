//! Ensemble descriptions: JSON files and built-in presets.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use corr_ldpc_core::construct::EnsembleSpec;
use corr_ldpc_core::dist::{joint_from_block, joint_independent};
use corr_ldpc_core::opt::MarginalConstraint;
use corr_ldpc_core::presets::{self, TwoDegree};
use corr_ldpc_core::sim::{BlockSampler, GeneralSampler, GraphSampler};
use corr_ldpc_core::{
    BlockSpec, Degree, EdgeDegreeDistribution, JointEdgeDistribution, NodeDegreeDistribution,
};
use serde_json::{json, Map, Value};

use crate::formats::decimal;

/// Either an explicit joint or a block construction over node marginals.
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Joint(JointEdgeDistribution),
    Block {
        p_x: NodeDegreeDistribution,
        p_y: NodeDegreeDistribution,
        spec: BlockSpec,
    },
}

/// Sampler usable from worker threads.
pub type SharedSampler = Box<dyn GraphSampler + Send + Sync>;

impl Ensemble {
    pub fn joint(&self) -> Result<JointEdgeDistribution> {
        match self {
            Ensemble::Joint(j) => Ok(j.clone()),
            Ensemble::Block { p_x, p_y, spec } => Ok(joint_from_block(p_x, p_y, spec)?),
        }
    }

    /// Free-cell parameterization of joints sharing this ensemble's edge marginals.
    pub fn constraint(&self) -> Result<MarginalConstraint> {
        let j = self.joint()?;
        Ok(MarginalConstraint::new(
            j.edge_x().clone(),
            j.edge_y().clone(),
        )?)
    }

    pub fn block_spec(&self) -> Option<&BlockSpec> {
        match self {
            Ensemble::Block { spec, .. } => Some(spec),
            Ensemble::Joint(_) => None,
        }
    }

    /// Replaces `q` and/or `π` of a block ensemble.
    pub fn override_block(self, q: Option<f64>, pi: Option<Vec<usize>>) -> Result<Self> {
        if q.is_none() && pi.is_none() {
            return Ok(self);
        }
        match self {
            Ensemble::Block { p_x, p_y, spec } => {
                let spec = BlockSpec::new(
                    q.unwrap_or(spec.q()),
                    pi.unwrap_or_else(|| spec.pi().to_vec()),
                    spec.variable_blocks().clone(),
                    spec.check_blocks().clone(),
                )?;
                spec.validate_against(&p_x, &p_y)?;
                Ok(Ensemble::Block { p_x, p_y, spec })
            }
            Ensemble::Joint(_) => bail!("--q and --pi apply only to block ensembles"),
        }
    }

    pub fn sampler(&self, n: usize) -> Result<SharedSampler> {
        Ok(match self {
            Ensemble::Joint(j) => Box::new(GeneralSampler::new(&EnsembleSpec::new(j.clone(), n)?)?),
            Ensemble::Block { p_x, p_y, spec } => {
                Box::new(BlockSampler::new(p_x, p_y, spec.clone(), n)?)
            }
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).context("ensemble file is not valid JSON")?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| anyhow!("ensemble must be a JSON object"))?;
        if let Some(cells) = obj.get("joint") {
            let cells = array(cells, "joint")?
                .iter()
                .map(|c| {
                    let c = array(c, "joint cell")?;
                    if c.len() != 3 {
                        bail!("joint cells are [x, y, p] triples");
                    }
                    Ok((degree(&c[0])?, degree(&c[1])?, probability(&c[2])?))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Ensemble::Joint(JointEdgeDistribution::from_cells(cells)?));
        }
        if let Some(ind) = obj.get("independent") {
            let ex = EdgeDegreeDistribution::new(pairs(field(ind, "edge_x")?)?)?;
            let ey = EdgeDegreeDistribution::new(pairs(field(ind, "edge_y")?)?)?;
            return Ok(Ensemble::Joint(joint_independent(&ex, &ey)?));
        }
        if let Some(block) = obj.get("block") {
            let p_x = NodeDegreeDistribution::new(pairs(field(v, "node_x")?)?)?;
            let p_y = NodeDegreeDistribution::new(pairs(field(v, "node_y")?)?)?;
            let pi = array(field(block, "pi")?, "pi")?
                .iter()
                .map(|p| {
                    p.as_u64()
                        .map(|p| p as usize)
                        .ok_or_else(|| anyhow!("pi entries must be integers"))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(b) = block.get("b") {
                if b.as_u64() != Some(pi.len() as u64) {
                    bail!("b = {b} does not match the length of pi ({})", pi.len());
                }
            }
            let spec = BlockSpec::new(
                probability(field(block, "q")?)?,
                pi,
                block_map(field(block, "blocks_x")?)?,
                block_map(field(block, "blocks_y")?)?,
            )?;
            spec.validate_against(&p_x, &p_y)?;
            return Ok(Ensemble::Block { p_x, p_y, spec });
        }
        bail!("ensemble needs one of \"joint\", \"independent\" or \"block\"")
    }

    /// Canonical JSON form; probabilities as decimal strings.
    pub fn to_json(&self) -> Value {
        match self {
            Ensemble::Joint(j) => json!({ "joint": joint_cells(j) }),
            Ensemble::Block { p_x, p_y, spec } => {
                let table = |d: &NodeDegreeDistribution| -> Vec<Value> {
                    d.iter().map(|(k, p)| json!([k, decimal(p)])).collect()
                };
                let blocks = |m: &BTreeMap<Degree, usize>| -> Map<String, Value> {
                    m.iter().map(|(d, b)| (d.to_string(), json!(b))).collect()
                };
                json!({
                    "node_x": table(p_x),
                    "node_y": table(p_y),
                    "block": {
                        "b": spec.block_count(),
                        "q": decimal(spec.q()),
                        "pi": spec.pi(),
                        "blocks_x": blocks(spec.variable_blocks()),
                        "blocks_y": blocks(spec.check_blocks()),
                    }
                })
            }
        }
    }
}

/// Support cells as `[x, y, "p"]`.
pub fn joint_cells(j: &JointEdgeDistribution) -> Vec<Value> {
    j.iter()
        .filter(|c| c.2 > 0.0)
        .map(|(x, y, p)| json!([x, y, decimal(p)]))
        .collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| anyhow!("missing field \"{key}\""))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| anyhow!("{what} must be an array"))
}

fn degree(v: &Value) -> Result<Degree> {
    v.as_u64()
        .and_then(|d| Degree::try_from(d).ok())
        .ok_or_else(|| anyhow!("degree {v} is not a nonnegative integer"))
}

/// Accepts a decimal string or a JSON number.
fn probability(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .with_context(|| format!("bad decimal {s:?}")),
        Value::Number(n) => n.as_f64().ok_or_else(|| anyhow!("bad number {n}")),
        _ => bail!("probability {v} must be a string or number"),
    }
}

fn pairs(v: &Value) -> Result<Vec<(Degree, f64)>> {
    array(v, "degree table")?
        .iter()
        .map(|e| match e.as_array().map(Vec::as_slice) {
            Some([d, p]) => Ok((degree(d)?, probability(p)?)),
            _ => bail!("degree table entries are [degree, p] pairs"),
        })
        .collect()
}

fn block_map(v: &Value) -> Result<BTreeMap<Degree, usize>> {
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("block assignment must be an object"))?;
    obj.iter()
        .map(|(k, b)| {
            let d: Degree = k
                .parse()
                .with_context(|| format!("block key {k:?} is not a degree"))?;
            let b = b
                .as_u64()
                .ok_or_else(|| anyhow!("block index for degree {d} must be an integer"))?;
            Ok((d, b as usize))
        })
        .collect()
}

/// Built-in ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Two-degree block ensemble with G = 3, d = 3; defaults q = 0, pi = 2,1.
    TwoDegree,
    /// Shokrollahi–Storn rate one-half marginals, product joint.
    ShokrollahiStorn,
    /// Richardson–Urbanke Example 3.63 marginals, product joint.
    RuEx363,
    /// Bazzi et al. marginals with a = 0.1115, product joint.
    Bazzi,
}

impl Preset {
    pub fn ensemble(self) -> Result<Ensemble> {
        let product = |c: MarginalConstraint| -> Result<Ensemble> {
            Ok(Ensemble::Joint(joint_independent(c.edge_x(), c.edge_y())?))
        };
        match self {
            Preset::TwoDegree => {
                let t = TwoDegree::standard(0.0)?;
                Ok(Ensemble::Block {
                    p_x: t.p_x,
                    p_y: t.p_y,
                    spec: t.spec,
                })
            }
            Preset::ShokrollahiStorn => product(presets::shokrollahi_storn()?),
            Preset::RuEx363 => product(presets::ru_ex363()?),
            Preset::Bazzi => product(presets::bazzi_default()?),
        }
    }
}
