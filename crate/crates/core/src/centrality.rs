//! Centrality on relevance-flow graphs: HITS hubs and authorities, PageRank,
//! the closed-form bipartite PageRank, and influx.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::cluster::EntityId;
use crate::error::{Error, Result};
use crate::graph::{RelevanceFlowGraph, Schema};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoreKind {
    Hub,
    Auth,
    PageRank,
    PageRankBip,
    Influx,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 5] = [
        ScoreKind::Auth,
        ScoreKind::Hub,
        ScoreKind::PageRank,
        ScoreKind::PageRankBip,
        ScoreKind::Influx,
    ];

    /// Whether the score is carried by nodes receiving edges (everything but hubs).
    pub fn scores_targets(self) -> bool {
        self != ScoreKind::Hub
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Hub => "Hub",
            ScoreKind::Auth => "Auth",
            ScoreKind::PageRank => "PR",
            ScoreKind::PageRankBip => "PRbip",
            ScoreKind::Influx => "Influx",
        })
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hub" => Ok(ScoreKind::Hub),
            "auth" => Ok(ScoreKind::Auth),
            "pr" => Ok(ScoreKind::PageRank),
            "prbip" => Ok(ScoreKind::PageRankBip),
            "influx" => Ok(ScoreKind::Influx),
            _ => Err(Error::param("score", format!("unknown score kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    kind: ScoreKind,
    nodes: Vec<EntityId>,
    values: Vec<f64>,
    index: HashMap<EntityId, usize>,
    pub iterations: usize,
    pub converged: bool,
}

impl CentralityScores {
    /// Scores from explicit values; rejects negative or non-finite entries.
    pub fn from_values(kind: ScoreKind, nodes: Vec<EntityId>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::param("scores", "node and value counts differ"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param(
                "scores",
                format!("scores must be finite and non-negative, got {v}"),
            ));
        }
        Ok(Self::build(kind, nodes, values, 0, true))
    }

    fn build(
        kind: ScoreKind,
        nodes: Vec<EntityId>,
        values: Vec<f64>,
        iterations: usize,
        converged: bool,
    ) -> Self {
        let index = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        CentralityScores {
            kind,
            nodes,
            values,
            index,
            iterations,
            converged,
        }
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn nodes(&self) -> &[EntityId] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, id: EntityId) -> Option<f64> {
        self.index.get(&id).map(|&i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, f64)> + '_ {
        self.nodes.iter().copied().zip(self.values.iter().copied())
    }

    /// One `entity kind score` line per node.
    pub fn write_scores<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (id, v) in self.iter() {
            writeln!(out, "{id} {} {v}", self.kind)?;
        }
        Ok(())
    }
}

fn normalize_l2(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check_solver(tol: f64, max_iter: usize) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    Ok(())
}

/// Weighted HITS by power iteration from a uniform start, both vectors
/// normalized to unit Euclidean length each round. Returns `(hub, auth)`.
pub fn hits(
    g: &RelevanceFlowGraph,
    tol: f64,
    max_iter: usize,
) -> Result<(CentralityScores, CentralityScores)> {
    check_solver(tol, max_iter)?;
    if g.edge_count() == 0 {
        return Err(Error::ZeroWeights);
    }
    let n = g.len();
    let start = 1.0 / (n as f64).sqrt();
    let mut hub = vec![start; n];
    let mut auth = vec![start; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut next_auth = vec![0.0; n];
        for (u, v, w) in g.edges() {
            next_auth[v] += w * hub[u];
        }
        let mut next_hub = vec![0.0; n];
        for (u, v, w) in g.edges() {
            next_hub[u] += w * next_auth[v];
        }
        if !normalize_l2(&mut next_auth) || !normalize_l2(&mut next_hub) {
            return Err(Error::ZeroWeights);
        }
        let delta = max_abs_diff(&next_auth, &auth).max(max_abs_diff(&next_hub, &hub));
        auth = next_auth;
        hub = next_hub;
        if delta < tol {
            converged = true;
            break;
        }
    }
    let nodes = g.nodes().to_vec();
    Ok((
        CentralityScores::build(ScoreKind::Hub, nodes.clone(), hub, iterations, converged),
        CentralityScores::build(ScoreKind::Auth, nodes, auth, iterations, converged),
    ))
}

/// Damped PageRank. Nodes without out-weight jump uniformly.
pub fn pagerank(
    g: &RelevanceFlowGraph,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityScores> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param(
            "lambda",
            format!("must lie in (0, 1), got {lambda}"),
        ));
    }
    check_solver(tol, max_iter)?;
    let n = g.len();
    if n == 0 {
        return Err(Error::Empty("graph has no nodes".into()));
    }
    let nf = n as f64;
    let mut pr = vec![1.0 / nf; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut jump = 0.0;
        let mut next = vec![0.0; n];
        for (u, &p) in pr.iter().enumerate() {
            let out = g.out_weight(u);
            if out > 0.0 {
                jump += (1.0 - lambda) * p;
                for &(v, w) in g.out_edges(u) {
                    next[v] += lambda * w / out * p;
                }
            } else {
                jump += p;
            }
        }
        let share = jump / nf;
        next.iter_mut().for_each(|x| *x += share);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change: f64 = next.iter().zip(&pr).map(|(a, b)| (a - b).abs()).sum();
        pr = next;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(CentralityScores::build(
        ScoreKind::PageRank,
        g.nodes().to_vec(),
        pr,
        iterations,
        converged,
    ))
}

/// Closed-form PageRank for one-way bipartite graphs:
/// `PR_bip(v) = sum_u wt(u, v) / outwt(u)`.
pub fn pagerank_bip(g: &RelevanceFlowGraph) -> Result<CentralityScores> {
    if g.schema() == Schema::DocDoc {
        return Err(Error::Schema(
            "PRbip needs a one-way bipartite (c->d or d->c) graph".into(),
        ));
    }
    let mut values = vec![0.0; g.len()];
    for (u, v, w) in g.edges() {
        values[v] += w / g.out_weight(u);
    }
    Ok(CentralityScores::build(
        ScoreKind::PageRankBip,
        g.nodes().to_vec(),
        values,
        0,
        true,
    ))
}

/// Sum of incoming edge weights.
pub fn influx(g: &RelevanceFlowGraph) -> CentralityScores {
    let mut values = vec![0.0; g.len()];
    for (_, v, w) in g.edges() {
        values[v] += w;
    }
    CentralityScores::build(ScoreKind::Influx, g.nodes().to_vec(), values, 0, true)
}
