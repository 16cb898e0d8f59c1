use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{average_precision, mrr, prec_at_k, top_cluster_density, MetricReport, QueryMetrics};
use crate::centrality::ScoreKind;
use crate::corpus::{Document, Qrels, RankedRun};
use crate::error::{Error, Result};
use crate::graph::Schema;
use crate::lm::{CollectionModel, TermVector};
use crate::rerank::{QueryContext, RankMode, RerankSpec, Scorer};
use crate::retrieval::initial_run;

pub const DELTA_GRID: [usize; 7] = [2, 4, 9, 19, 29, 39, 49];
pub const K_GRID: [usize; 5] = [2, 5, 10, 20, 30];
pub const LAMBDA_GRID: [f64; 11] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];
pub const MU_GRID: [f64; 7] = [100.0, 500.0, 1000.0, 2000.0, 3000.0, 5000.0, 8000.0];

const TIE_TOL: f64 = 1e-12;

/// One point of a parameter sweep. Parameters an algorithm ignores are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Setting {
    pub delta: Option<usize>,
    pub k: Option<usize>,
    pub lambda: Option<f64>,
}

impl Setting {
    /// Lexicographic `(delta, k, lambda)` order.
    pub fn cmp_params(&self, other: &Setting) -> Ordering {
        self.delta
            .cmp(&other.delta)
            .then(self.k.cmp(&other.k))
            .then_with(|| match (self.lambda, other.lambda) {
                (Some(a), Some(b)) => a.total_cmp(&b),
                (a, b) => a.is_some().cmp(&b.is_some()),
            })
    }

    pub fn apply(&self, base: &RerankSpec) -> RerankSpec {
        RerankSpec {
            delta: self.delta.unwrap_or(base.delta),
            k: self.k.unwrap_or(base.k),
            lambda: self.lambda.unwrap_or(base.lambda),
            ..base.clone()
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(d) = self.delta {
            parts.push(format!("delta={d}"));
        }
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(l) = self.lambda {
            parts.push(format!("lambda={l}"));
        }
        if parts.is_empty() {
            f.write_str("default")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub deltas: Vec<usize>,
    pub ks: Vec<usize>,
    pub lambdas: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            deltas: DELTA_GRID.to_vec(),
            ks: K_GRID.to_vec(),
            lambdas: LAMBDA_GRID.to_vec(),
        }
    }
}

/// The settings worth trying for `spec`: only the parameters the algorithm
/// actually uses are varied.
pub fn sweep_grid(spec: &RerankSpec, grid: &Grid) -> Vec<Setting> {
    fn axis<T: Copy>(used: bool, values: &[T]) -> Vec<Option<T>> {
        if used {
            values.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }
    let deltas = axis(spec.scorer != Scorer::QueryLikelihood, &grid.deltas);
    let ks = axis(
        spec.mode == RankMode::Clust || spec.schema != Schema::DocDoc,
        &grid.ks,
    );
    let lambdas = axis(
        spec.scorer == Scorer::Centrality(ScoreKind::PageRank),
        &grid.lambdas,
    );
    let mut out = Vec::new();
    for &delta in &deltas {
        for &k in &ks {
            for &lambda in &lambdas {
                out.push(Setting { delta, k, lambda });
            }
        }
    }
    out
}

/// Reports for every setting of a sweep, ordered by setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub entries: Vec<(Setting, MetricReport)>,
    selected: Option<usize>,
}

impl SweepResult {
    pub fn new(mut entries: Vec<(Setting, MetricReport)>) -> Self {
        entries.sort_by(|a, b| a.0.cmp_params(&b.0));
        let selected = sweep_select(&entries);
        SweepResult { entries, selected }
    }

    pub fn selected(&self) -> Option<&(Setting, MetricReport)> {
        self.selected.map(|i| &self.entries[i])
    }
}

fn cmp_tol(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= TIE_TOL {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// Index of the setting with the highest mean prec@5; ties go to the lower
/// prec@10, then the lower MRR, then the smallest `(delta, k, lambda)`.
pub fn sweep_select(entries: &[(Setting, MetricReport)]) -> Option<usize> {
    (0..entries.len()).min_by(|&i, &j| {
        let (si, ri) = &entries[i];
        let (sj, rj) = &entries[j];
        cmp_tol(rj.mean_prec5, ri.mean_prec5)
            .then(cmp_tol(ri.mean_prec10, rj.mean_prec10))
            .then(cmp_tol(ri.mean_mrr, rj.mean_mrr))
            .then(si.cmp_params(sj))
    })
}

fn query_metrics(run: &RankedRun, qrels: &Qrels, top: Option<&[String]>) -> QueryMetrics {
    QueryMetrics {
        query_id: run.query_id.clone(),
        prec5: prec_at_k(run, qrels, 5),
        prec10: prec_at_k(run, qrels, 10),
        mrr: mrr(run, qrels),
        density: top.map(|m| {
            top_cluster_density(&run.query_id, m.iter().map(String::as_str), qrels, m.len())
        }),
    }
}

/// Re-rank every query under every setting of the grid and score the runs.
/// Queries are processed in parallel; the result does not depend on the
/// thread count.
pub fn run_sweep(
    contexts: &mut [QueryContext<'_>],
    base: &RerankSpec,
    grid: &Grid,
    qrels: &Qrels,
) -> Result<SweepResult> {
    base.validate()?;
    let settings = sweep_grid(base, grid);
    let per_query: Vec<Vec<QueryMetrics>> = contexts
        .par_iter_mut()
        .map(|ctx| {
            settings
                .iter()
                .map(|s| {
                    let out = ctx.rerank(&s.apply(base))?;
                    Ok(query_metrics(&out.run, qrels, out.top_cluster.as_deref()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let entries = settings
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            (
                s,
                MetricReport::from_queries(per_query.iter().map(|q| q[i].clone()).collect()),
            )
        })
        .collect();
    Ok(SweepResult::new(entries))
}

/// Objective for choosing the smoothing parameter of the initial ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Prec5,
    Prec10,
    Mrr,
    /// Non-interpolated average precision over the top 1000.
    AvgPrec1000,
}

impl Metric {
    pub fn value(self, run: &RankedRun, qrels: &Qrels) -> f64 {
        match self {
            Metric::Prec5 => prec_at_k(run, qrels, 5),
            Metric::Prec10 => prec_at_k(run, qrels, 10),
            Metric::Mrr => mrr(run, qrels),
            Metric::AvgPrec1000 => average_precision(run, qrels, 1000),
        }
    }

    fn depth(self) -> usize {
        match self {
            Metric::Prec5 => 5,
            Metric::Prec10 => 10,
            Metric::Mrr | Metric::AvgPrec1000 => 1000,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p5" | "prec@5" => Ok(Metric::Prec5),
            "p10" | "prec@10" => Ok(Metric::Prec10),
            "mrr" => Ok(Metric::Mrr),
            "ap" | "map" | "ap@1000" => Ok(Metric::AvgPrec1000),
            _ => Err(Error::param("metric", format!("unknown metric {s:?}"))),
        }
    }
}

/// Grid search for the Dirichlet parameter of the initial ranking that
/// maximizes the mean of `metric` over `queries`; ties go to the smaller
/// value. Returns the choice and the mean metric of every grid point.
pub fn tune_mu(
    queries: &[(String, TermVector)],
    docs: &[Document],
    coll: &CollectionModel,
    qrels: &Qrels,
    metric: Metric,
    grid: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    if grid.is_empty() {
        return Err(Error::Empty("mu grid".into()));
    }
    if queries.is_empty() {
        return Err(Error::Empty("no queries to tune on".into()));
    }
    let mut mus = grid.to_vec();
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    let mut table = Vec::with_capacity(mus.len());
    for &mu in &mus {
        let values = queries
            .par_iter()
            .map(|(qid, q)| {
                Ok(metric.value(
                    &initial_run(qid, q, docs, coll, mu, metric.depth(), "tune")?,
                    qrels,
                ))
            })
            .collect::<Result<Vec<f64>>>()?;
        table.push((mu, values.iter().sum::<f64>() / values.len() as f64));
    }
    let mut best = table[0];
    for &(mu, v) in &table[1..] {
        if v > best.1 + TIE_TOL {
            best = (mu, v);
        }
    }
    Ok((best.0, table))
}
