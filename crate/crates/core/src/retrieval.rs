//! Initial retrieval by Dirichlet-smoothed query likelihood.

use crate::corpus::{Document, RankedRun};
use crate::error::{Error, Result};
use crate::lm::{query_log_likelihood, CollectionModel, TermVector};

/// Positions of the `depth` best documents with their log query likelihoods,
/// best first; ties go to the lower doc id. Empty documents are never
/// retrieved, and neither is anything for an empty query.
pub fn rank_documents(
    query: &TermVector,
    docs: &[Document],
    coll: &CollectionModel,
    mu: f64,
    depth: usize,
) -> Result<Vec<(usize, f64)>> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::param("mu", format!("must be positive, got {mu}")));
    }
    if query.is_empty() {
        return Ok(Vec::new());
    }
    let mut scored: Vec<(usize, f64)> = docs
        .iter()
        .enumerate()
        .filter(|(_, d)| d.length() > 0)
        .map(|(i, d)| (i, query_log_likelihood(query, &d.terms, mu, coll)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(docs[a.0].doc_id.cmp(&docs[b.0].doc_id))
    });
    scored.truncate(depth);
    Ok(scored)
}

/// As [`rank_documents`], packaged as a run scored by log likelihood.
pub fn initial_run(
    query_id: &str,
    query: &TermVector,
    docs: &[Document],
    coll: &CollectionModel,
    mu: f64,
    depth: usize,
    tag: &str,
) -> Result<RankedRun> {
    let mut run = RankedRun::new(query_id, tag);
    for (p, score) in rank_documents(query, docs, coll, mu, depth)? {
        run.push(docs[p].docno.clone(), score);
    }
    Ok(run)
}
