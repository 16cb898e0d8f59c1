//! Retrieval metrics, significance testing and parameter selection.

mod sweep;
mod wilcoxon;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{self, Write};

pub use sweep::{
    run_sweep, sweep_grid, sweep_select, tune_mu, Grid, Metric, Setting, SweepResult, DELTA_GRID,
    K_GRID, LAMBDA_GRID, MU_GRID,
};
pub use wilcoxon::{signed_ranks, wilcoxon_two_sided};

use crate::corpus::{Qrels, RankedRun};

/// Fraction of the first `k` ranks holding relevant documents. Missing
/// ranks count as non-relevant.
pub fn prec_at_k(run: &RankedRun, qrels: &Qrels, k: usize) -> f64 {
    assert!(k >= 1, "precision cutoff must be at least 1");
    let hits = run
        .docnos()
        .take(k)
        .filter(|d| qrels.is_relevant(&run.query_id, d))
        .count();
    hits as f64 / k as f64
}

/// Reciprocal rank of the first relevant document, 0 if there is none.
pub fn mrr(run: &RankedRun, qrels: &Qrels) -> f64 {
    run.docnos()
        .position(|d| qrels.is_relevant(&run.query_id, d))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

/// Non-interpolated average precision over the first `depth` ranks,
/// normalized by the number of judged relevant documents.
pub fn average_precision(run: &RankedRun, qrels: &Qrels, depth: usize) -> f64 {
    let total = qrels.relevant_count(&run.query_id);
    if total == 0 {
        return 0.0;
    }
    let mut hits = 0;
    let mut sum = 0.0;
    for (i, d) in run.docnos().take(depth).enumerate() {
        if qrels.is_relevant(&run.query_id, d) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / total as f64
}

/// Percentage of relevant documents in a cluster of nominal size `k`.
pub fn top_cluster_density<'a, I>(query_id: &str, members: I, qrels: &Qrels, k: usize) -> f64
where
    I: IntoIterator<Item = &'a str>,
{
    assert!(k >= 1, "cluster size must be at least 1");
    let relevant = members
        .into_iter()
        .filter(|d| qrels.is_relevant(query_id, d))
        .count();
    100.0 * relevant as f64 / k as f64
}

/// Order query ids numerically where possible, otherwise lexically.
pub fn compare_query_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryMetrics {
    pub query_id: String,
    pub prec5: f64,
    pub prec10: f64,
    pub mrr: f64,
    pub density: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// Sorted by query id.
    pub queries: Vec<QueryMetrics>,
    pub mean_prec5: f64,
    pub mean_prec10: f64,
    pub mean_mrr: f64,
    /// Mean top-cluster density over the queries that have one.
    pub mean_density: Option<f64>,
}

impl MetricReport {
    pub fn from_queries(mut queries: Vec<QueryMetrics>) -> Self {
        queries.sort_by(|a, b| compare_query_ids(&a.query_id, &b.query_id));
        let n = queries.len().max(1) as f64;
        let mean = |f: fn(&QueryMetrics) -> f64| queries.iter().map(f).sum::<f64>() / n;
        let densities: Vec<f64> = queries.iter().filter_map(|q| q.density).collect();
        MetricReport {
            mean_prec5: mean(|q| q.prec5),
            mean_prec10: mean(|q| q.prec10),
            mean_mrr: mean(|q| q.mrr),
            mean_density: (!densities.is_empty())
                .then(|| densities.iter().sum::<f64>() / densities.len() as f64),
            queries,
        }
    }

    /// Score each run against `qrels`.
    pub fn evaluate(runs: &[RankedRun], qrels: &Qrels) -> Self {
        Self::evaluate_with_clusters(runs, qrels, &HashMap::new())
    }

    /// As [`MetricReport::evaluate`], adding the relevant-document density
    /// of each query's top-ranked cluster (query id to member docnos).
    pub fn evaluate_with_clusters(
        runs: &[RankedRun],
        qrels: &Qrels,
        top_clusters: &HashMap<String, Vec<String>>,
    ) -> Self {
        let queries = runs
            .iter()
            .map(|run| {
                let density = top_clusters
                    .get(&run.query_id)
                    .filter(|m| !m.is_empty())
                    .map(|members| {
                        top_cluster_density(
                            &run.query_id,
                            members.iter().map(String::as_str),
                            qrels,
                            members.len(),
                        )
                    });
                QueryMetrics {
                    query_id: run.query_id.clone(),
                    prec5: prec_at_k(run, qrels, 5),
                    prec10: prec_at_k(run, qrels, 10),
                    mrr: mrr(run, qrels),
                    density,
                }
            })
            .collect();
        Self::from_queries(queries)
    }

    pub fn query_count(&self) -> usize {
        self.queries.len()
    }

    pub fn get(&self, query_id: &str) -> Option<&QueryMetrics> {
        self.queries.iter().find(|q| q.query_id == query_id)
    }
}

/// Write one TSV row per named report under the header
/// `setting prec@5 prec@10 MRR` (plus `density` if any report has it).
pub fn write_report_tsv<W: Write>(rows: &[(String, &MetricReport)], mut out: W) -> io::Result<()> {
    let density = rows.iter().any(|(_, r)| r.mean_density.is_some());
    write!(out, "setting\tprec@5\tprec@10\tMRR")?;
    if density {
        write!(out, "\tdensity")?;
    }
    writeln!(out)?;
    for (name, r) in rows {
        write!(
            out,
            "{name}\t{:.4}\t{:.4}\t{:.4}",
            r.mean_prec5, r.mean_prec10, r.mean_mrr
        )?;
        if density {
            match r.mean_density {
                Some(d) => write!(out, "\t{d:.2}")?,
                None => write!(out, "\t-")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub type MetricFn = fn(&QueryMetrics) -> f64;

/// Paired per-query values of a metric for the queries both reports share.
pub fn paired(a: &MetricReport, b: &MetricReport, metric: MetricFn) -> Vec<(f64, f64)> {
    a.queries
        .iter()
        .filter_map(|qa| b.get(&qa.query_id).map(|qb| (metric(qa), metric(qb))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(pattern: &str) -> (RankedRun, Qrels) {
        let mut r = RankedRun::new("q", "t");
        let mut qrels = Qrels::new();
        for (i, c) in pattern.chars().enumerate() {
            let docno = format!("D{i}");
            if c == 'R' {
                qrels.insert("q", &docno, 1);
            }
            r.push(docno, 0.0);
        }
        (r, qrels)
    }

    #[test]
    fn precision_examples() {
        let (r, q) = run("RNRNN");
        assert_eq!(prec_at_k(&r, &q, 5), 0.4);
        let (r, q) = run("NNNNN");
        assert_eq!(prec_at_k(&r, &q, 5), 0.0);
        let (r, q) = run("RRRRR");
        assert_eq!(prec_at_k(&r, &q, 5), 1.0);
        // short run: missing slots are non-relevant
        assert_eq!(prec_at_k(&r, &q, 10), 0.5);
    }

    #[test]
    fn mrr_examples() {
        assert_eq!(mrr(&run("NR").0, &run("NR").1), 0.5);
        assert_eq!(mrr(&run("RN").0, &run("RN").1), 1.0);
        assert_eq!(mrr(&run("NNN").0, &run("NNN").1), 0.0);
    }

    #[test]
    fn average_precision_hand_value() {
        let (r, q) = run("RNR");
        // (1/1 + 2/3) / 2
        assert!((average_precision(&r, &q, 1000) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(average_precision(&r, &q, 1), 0.5);
        assert_eq!(average_precision(&r, &Qrels::new(), 1000), 0.0);
    }

    #[test]
    fn density_examples() {
        let mut q = Qrels::new();
        for d in ["a", "b", "c"] {
            q.insert("1", d, 1);
        }
        assert_eq!(
            top_cluster_density("1", ["a", "b", "c", "x", "y"], &q, 5),
            60.0
        );
        assert_eq!(top_cluster_density("2", ["a", "b"], &q, 5), 0.0);
    }

    #[test]
    fn report_means_and_tsv() {
        let (r1, mut q) = run("RNNNN");
        let mut r2 = RankedRun::new("2", "t");
        r2.push("X", 1.0);
        q.insert("2", "Y", 1);
        let rep = MetricReport::evaluate(&[r2, r1], &q);
        assert_eq!(rep.query_count(), 2);
        assert_eq!(rep.queries[0].query_id, "2");
        assert!((rep.mean_prec5 - 0.1).abs() < 1e-15);
        assert!((rep.mean_mrr - 0.5).abs() < 1e-15);
        let mut buf = Vec::new();
        write_report_tsv(&[("init".into(), &rep)], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "setting\tprec@5\tprec@10\tMRR\ninit\t0.1000\t0.0500\t0.5000\n"
        );
    }

    #[test]
    fn query_id_order() {
        let mut ids = vec!["100", "51", "abc", "7"];
        ids.sort_by(|a, b| compare_query_ids(a, b));
        assert_eq!(ids, ["7", "51", "100", "abc"]);
    }
}
