//! Unigram language models over sparse term-count vectors.
//!
//! Documents and clusters are both represented as a [`TermVector`]; a cluster
//! is the concatenation of its members, which for unigram statistics is just
//! the element-wise sum of their counts.
//!
//! Every model here uses natural logarithms.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Dense integer id of a term in a [`crate::corpus::Vocabulary`].
pub type TermId = u32;

/// Sparse term → count map, sorted by term id, with no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermVector {
    entries: Vec<(TermId, u32)>,
    total: u64,
}

impl TermVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from (term, count) pairs in any order; duplicate terms are summed
    /// and zero counts are dropped.
    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (TermId, u32)>,
    {
        let mut entries: Vec<(TermId, u32)> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        entries.sort_unstable_by_key(|&(t, _)| t);
        let mut merged: Vec<(TermId, u32)> = Vec::with_capacity(entries.len());
        for (t, c) in entries {
            match merged.last_mut() {
                Some((last, acc)) if *last == t => *acc += c,
                _ => merged.push((t, c)),
            }
        }
        let total = merged.iter().map(|&(_, c)| u64::from(c)).sum();
        TermVector {
            entries: merged,
            total,
        }
    }

    /// Count occurrences in a token-id sequence.
    pub fn from_term_ids<I>(ids: I) -> Self
    where
        I: IntoIterator<Item = TermId>,
    {
        Self::from_counts(ids.into_iter().map(|t| (t, 1)))
    }

    pub fn count(&self, term: TermId) -> u32 {
        self.entries
            .binary_search_by_key(&term, |&(t, _)| t)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Total number of tokens (sum of counts).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct terms.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(TermId, u32)] {
        &self.entries
    }

    /// Element-wise sum.
    pub fn merged(&self, other: &TermVector) -> TermVector {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        TermVector {
            entries: out,
            total: self.total + other.total,
        }
    }
}

/// Corpus-wide term distribution used as the Dirichlet prior.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectionModel {
    counts: Vec<u64>,
    probs: Vec<f64>,
    total: u64,
}

impl CollectionModel {
    /// `counts[t]` is the collection frequency of term `t`.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::Empty("collection has no tokens".into()));
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(CollectionModel {
            counts,
            probs,
            total,
        })
    }

    pub fn from_term_vectors<'a, I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TermVector>,
    {
        let mut counts: Vec<u64> = Vec::new();
        for tv in vectors {
            for (t, c) in tv.iter() {
                let t = t as usize;
                if t >= counts.len() {
                    counts.resize(t + 1, 0);
                }
                counts[t] += u64::from(c);
            }
        }
        Self::from_counts(counts)
    }

    /// Collection probability; zero for terms outside the vocabulary.
    pub fn prob(&self, term: TermId) -> f64 {
        self.probs.get(term as usize).copied().unwrap_or(0.0)
    }

    pub fn count(&self, term: TermId) -> u64 {
        self.counts.get(term as usize).copied().unwrap_or(0)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.probs.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn contains(&self, term: TermId) -> bool {
        self.count(term) > 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// Maximum likelihood: count / length.
    Mle,
    /// Dirichlet prior with strength `mu` (> 0) over the collection model.
    Dirichlet { mu: f64 },
}

/// A term distribution induced from a term vector.
#[derive(Debug, Clone, Copy)]
pub struct LanguageModel<'a> {
    smoothing: Smoothing,
    terms: &'a TermVector,
    collection: Option<&'a CollectionModel>,
}

impl<'a> LanguageModel<'a> {
    pub fn mle(terms: &'a TermVector) -> Self {
        LanguageModel {
            smoothing: Smoothing::Mle,
            terms,
            collection: None,
        }
    }

    pub fn dirichlet(
        terms: &'a TermVector,
        mu: f64,
        collection: &'a CollectionModel,
    ) -> Result<Self> {
        check_mu(mu)?;
        Ok(LanguageModel {
            smoothing: Smoothing::Dirichlet { mu },
            terms,
            collection: Some(collection),
        })
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn prob(&self, term: TermId) -> f64 {
        match (self.smoothing, self.collection) {
            (Smoothing::Dirichlet { mu }, Some(coll)) => smoothed(
                self.terms.count(term),
                self.terms.total(),
                mu,
                coll.prob(term),
            ),
            _ => {
                if self.terms.total() == 0 {
                    0.0
                } else {
                    f64::from(self.terms.count(term)) / self.terms.total() as f64
                }
            }
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "mu",
            format!("must be a positive finite number, got {mu}"),
        ))
    }
}

#[inline]
fn smoothed(count: u32, total: u64, mu: f64, p_coll: f64) -> f64 {
    (f64::from(count) + mu * p_coll) / (total as f64 + mu)
}

/// Dirichlet-smoothed probability of `term` under the model of `tv`:
/// `(count + mu * p_coll) / (|tv| + mu)`.
///
/// `mu` must be positive; callers validate it once (see [`LanguageModel::dirichlet`]).
pub fn dirichlet_prob(tv: &TermVector, term: TermId, mu: f64, coll: &CollectionModel) -> f64 {
    debug_assert!(mu > 0.0);
    smoothed(tv.count(term), tv.total(), mu, coll.prob(term))
}

/// Log query likelihood `sum_t count(t, q) * ln p_mu(t | tv)`.
///
/// Returns negative infinity when a query term has zero smoothed probability,
/// which only happens for terms outside the collection vocabulary.
pub fn query_log_likelihood(
    query: &TermVector,
    tv: &TermVector,
    mu: f64,
    coll: &CollectionModel,
) -> f64 {
    query
        .iter()
        .map(|(t, c)| f64::from(c) * dirichlet_prob(tv, t, mu, coll).ln())
        .sum()
}

/// KL divergence `D(p_x^MLE || p_y^mu)`, summed over the support of `x`.
pub fn kl_to_smoothed(x: &TermVector, y: &TermVector, mu: f64, coll: &CollectionModel) -> f64 {
    debug_assert!(x.total() > 0 && y.total() > 0);
    let x_total = x.total() as f64;
    let y_total = y.total() as f64;
    let ys = y.entries();
    let mut j = 0;
    let mut divergence = 0.0;
    for (t, cx) in x.iter() {
        while j < ys.len() && ys[j].0 < t {
            j += 1;
        }
        let cy = if j < ys.len() && ys[j].0 == t {
            ys[j].1
        } else {
            0
        };
        let p = f64::from(cx) / x_total;
        let q = (f64::from(cy) + mu * coll.prob(t)) / (y_total + mu);
        divergence += p * (p / q).ln();
    }
    divergence
}

/// Relevance flow from `x` to `y`: `exp(-D(p_x^MLE || p_y^mu))`, in `(0, 1]`.
///
/// Both vectors must be non-empty.
pub fn rflow(x: &TermVector, y: &TermVector, mu: f64, coll: &CollectionModel) -> f64 {
    (-kl_to_smoothed(x, y, mu, coll)).exp().min(1.0)
}

/// Term vector of the document formed by concatenating `members`.
pub fn cluster_term_vector<'a, I>(members: I) -> Result<TermVector>
where
    I: IntoIterator<Item = &'a TermVector>,
{
    let mut iter = members.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Empty("cluster has no members".into()))?;
    let mut all: Vec<(TermId, u32)> = first.entries().to_vec();
    for tv in iter {
        all.extend_from_slice(tv.entries());
    }
    Ok(TermVector::from_counts(all))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const A: TermId = 0;
    pub const B: TermId = 1;
    pub const C: TermId = 2;

    /// d1 = "a a b", d2 = "a b b", d3 = "c c c".
    pub fn f1() -> (Vec<TermVector>, CollectionModel) {
        let docs = vec![
            TermVector::from_term_ids([A, A, B]),
            TermVector::from_term_ids([A, B, B]),
            TermVector::from_term_ids([C, C, C]),
        ];
        let coll = CollectionModel::from_term_vectors(&docs).unwrap();
        (docs, coll)
    }
}
