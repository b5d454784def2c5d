//! Text formats: alist and JSON graphs, CSV tables and JSON reports.
//!
//! Numbers are written with fixed digit counts so output is byte-stable.

use std::io::{self, BufRead, Write};

use anyhow::{anyhow, bail, Context, Result};
use corr_ldpc_core::construct::TannerGraph;
use corr_ldpc_core::de::{DeState, ThresholdResult};
use corr_ldpc_core::opt::{OptimizeOutcome, SweepResult};
use corr_ldpc_core::sim::SimResult;
use corr_ldpc_core::Degree;
use serde::{Deserialize, Serialize};
use serde_json::{json, Number, Value};

use crate::ensemble::joint_cells;

/// Digits after the point for thresholds and decoded fractions.
pub const VALUE_DIGITS: usize = 8;
/// Digits after the point for grid parameters (`δ`, `q`).
pub const GRID_DIGITS: usize = 6;
/// Digits after the point for density-evolution iterates, enough to show
/// several significant digits at the default 1e-8 stopping level.
pub const TRAJECTORY_DIGITS: usize = 15;

pub fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    // avoid "-0.000…"
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Shortest decimal that reads back to the same `f64`.
pub fn decimal(x: f64) -> String {
    format!("{x}")
}

/// JSON number carrying exactly the fixed-point digits.
pub fn fixed_number(x: f64, digits: usize) -> Value {
    match fixed(x, digits).parse::<Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::Null,
    }
}

fn variable_neighbors(graph: &TannerGraph) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut vn = vec![Vec::new(); graph.n];
    let mut cn = vec![Vec::new(); graph.m];
    for &(v, c) in &graph.edges {
        vn[v as usize].push(c);
        cn[c as usize].push(v);
    }
    for l in vn.iter_mut().chain(cn.iter_mut()) {
        l.sort_unstable();
    }
    (vn, cn)
}

/// Writes the parity-check structure in alist format, 1-based, with neighbor
/// lists zero-padded to the maximum degree. Parallel edges repeat an index.
pub fn write_alist<W: Write>(graph: &TannerGraph, mut w: W) -> io::Result<()> {
    let (vn, cn) = variable_neighbors(graph);
    let max_v = vn.iter().map(Vec::len).max().unwrap_or(0);
    let max_c = cn.iter().map(Vec::len).max().unwrap_or(0);
    writeln!(w, "{} {}", graph.n, graph.m)?;
    writeln!(w, "{max_v} {max_c}")?;
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    writeln!(w, "{}", join(&mut vn.iter().map(|l| l.len().to_string())))?;
    writeln!(w, "{}", join(&mut cn.iter().map(|l| l.len().to_string())))?;
    for (lists, width) in [(&vn, max_v), (&cn, max_c)] {
        for l in lists {
            let padded = l
                .iter()
                .map(|&k| (k + 1).to_string())
                .chain(std::iter::repeat("0".to_string()))
                .take(width);
            writeln!(w, "{}", join(&mut padded.into_iter()))?;
        }
    }
    Ok(())
}

/// Reads an alist file written by [`write_alist`] (or any alist whose
/// variable and check lists agree).
pub fn read_alist<R: BufRead>(r: R) -> Result<TannerGraph> {
    let mut nums = Vec::new();
    for line in r.lines() {
        for tok in line?.split_whitespace() {
            nums.push(
                tok.parse::<usize>()
                    .with_context(|| format!("bad alist token {tok:?}"))?,
            );
        }
    }
    let mut it = nums.into_iter();
    let mut next = || it.next().ok_or_else(|| anyhow!("alist ended early"));
    let (n, m) = (next()?, next()?);
    let (max_v, max_c) = (next()?, next()?);
    let vdeg = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let cdeg = (0..m).map(|_| next()).collect::<Result<Vec<_>>>()?;
    let mut edges = Vec::new();
    for (v, &d) in vdeg.iter().enumerate() {
        let row = (0..max_v).map(|_| next()).collect::<Result<Vec<_>>>()?;
        for &c in &row[..d.min(max_v)] {
            if c == 0 || c > m {
                bail!("variable {} lists check {c}", v + 1);
            }
            edges.push((v as u32, (c - 1) as u32));
        }
    }
    let mut check_side = Vec::new();
    for (c, &d) in cdeg.iter().enumerate() {
        let row = (0..max_c).map(|_| next()).collect::<Result<Vec<_>>>()?;
        for &v in &row[..d.min(max_c)] {
            if v == 0 || v > n {
                bail!("check {} lists variable {v}", c + 1);
            }
            check_side.push(((v - 1) as u32, c as u32));
        }
    }
    let mut a = edges.clone();
    a.sort_unstable();
    check_side.sort_unstable();
    if a != check_side {
        bail!("variable and check adjacency lists disagree");
    }
    Ok(TannerGraph::from_edges(n, m, edges)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    m: usize,
    edges: Vec<(u32, u32)>,
}

pub fn graph_to_json(graph: &TannerGraph) -> String {
    let g = GraphJson {
        n: graph.n,
        m: graph.m,
        edges: graph.edges.clone(),
    };
    serde_json::to_string(&g).unwrap_or_default()
}

pub fn graph_from_json(text: &str) -> Result<TannerGraph> {
    let g: GraphJson = serde_json::from_str(text).context("graph JSON")?;
    Ok(TannerGraph::from_edges(g.n, g.m, g.edges)?)
}

pub fn threshold_json(r: &ThresholdResult) -> Value {
    json!({
        "delta_star": fixed_number(r.delta_star, VALUE_DIGITS),
        "bracket": [fixed_number(r.bracket.0, VALUE_DIGITS), fixed_number(r.bracket.1, VALUE_DIGITS)],
        "lower_bound": fixed_number(r.lower_bound, VALUE_DIGITS),
        "upper_bound": fixed_number(r.upper_bound, VALUE_DIGITS),
        "iterations": r.iterations_used,
        "anomaly": r.anomaly,
        "criterion": r.criterion.to_string(),
    })
}

pub fn optimizer_json(o: &OptimizeOutcome) -> Value {
    json!({
        "best_joint": joint_cells(&o.best_joint),
        "delta_star": fixed_number(o.result.delta_star, VALUE_DIGITS),
        "evaluations": o.evaluations,
        "baseline_independent": fixed_number(o.baseline_independent.delta_star, VALUE_DIGITS),
        "free_cells": o.best_values.iter().map(|&v| decimal(v)).collect::<Vec<_>>(),
    })
}

/// Degrees appearing in any row, ascending.
fn all_degrees(results: &[SimResult]) -> Vec<Degree> {
    let mut ds: Vec<Degree> = results
        .iter()
        .flat_map(|r| r.gamma_by_degree.iter().map(|e| e.0))
        .collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

pub fn write_sim_csv<W: Write>(results: &[SimResult], mut w: W) -> io::Result<()> {
    let degrees = all_degrees(results);
    let mut header = vec![
        "delta".to_string(),
        "trials".into(),
        "gamma_mean".into(),
        "gamma_std".into(),
    ];
    header.extend(degrees.iter().map(|d| format!("gamma_deg_{d}")));
    writeln!(w, "{}", header.join(","))?;
    for r in results {
        let mut row = vec![
            fixed(r.delta, GRID_DIGITS),
            r.trials.to_string(),
            fixed(r.gamma_mean, VALUE_DIGITS),
            fixed(r.gamma_std, VALUE_DIGITS),
        ];
        row.extend(degrees.iter().map(|&d| {
            r.by_degree(d)
                .map(|g| fixed(g, VALUE_DIGITS))
                .unwrap_or_default()
        }));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(sweep: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "q,delta_star,lower_bound,upper_bound")?;
    for (q, r) in &sweep.points {
        writeln!(
            w,
            "{},{},{},{}",
            fixed(*q, GRID_DIGITS),
            fixed(r.delta_star, VALUE_DIGITS),
            fixed(r.lower_bound, VALUE_DIGITS),
            fixed(r.upper_bound, VALUE_DIGITS)
        )?;
    }
    Ok(())
}

pub fn trajectory_header(x_degrees: &[Degree], y_degrees: &[Degree]) -> String {
    let mut h = vec!["iter".to_string()];
    h.extend(x_degrees.iter().map(|x| format!("alpha_{x}")));
    h.extend(y_degrees.iter().map(|y| format!("beta_{y}")));
    h.push("gamma".into());
    h.join(",")
}

pub fn trajectory_row(s: &DeState) -> String {
    let mut row = vec![s.iteration.to_string()];
    row.extend(
        s.alpha
            .iter()
            .chain(&s.beta)
            .map(|&v| fixed(v, TRAJECTORY_DIGITS)),
    );
    row.push(fixed(s.gamma, TRAJECTORY_DIGITS));
    row.join(",")
}
