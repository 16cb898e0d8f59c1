//! Neighborhoods in language-model space and overlapping nearest-neighbor
//! clusters of the initially retrieved documents.

use std::fmt;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::lm::{cluster_term_vector, rflow, CollectionModel, TermVector};

/// Graph node identity. All documents order before all clusters; within a
/// kind, ids order numerically. This order breaks every score tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityId {
    Doc(u32),
    Clust(u32),
}

impl EntityId {
    pub fn is_doc(self) -> bool {
        matches!(self, EntityId::Doc(_))
    }

    pub fn is_cluster(self) -> bool {
        matches!(self, EntityId::Clust(_))
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityId::Doc(id) => write!(f, "d:{id}"),
            EntityId::Clust(id) => write!(f, "c:{id}"),
        }
    }
}

impl std::str::FromStr for EntityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("entity", format!("expected d:<id> or c:<id>, got {s:?}"));
        let (kind, id) = s.split_once(':').ok_or_else(bad)?;
        let id: u32 = id.parse().map_err(|_| bad())?;
        match kind {
            "d" => Ok(EntityId::Doc(id)),
            "c" => Ok(EntityId::Clust(id)),
            _ => Err(bad()),
        }
    }
}

/// Pairwise relevance flow from each source to each target, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl FlowMatrix {
    pub fn compute(
        sources: &[&TermVector],
        targets: &[&TermVector],
        mu: f64,
        coll: &CollectionModel,
    ) -> Self {
        let mut values = Vec::with_capacity(sources.len() * targets.len());
        for s in sources {
            for t in targets {
                values.push(rflow(s, t, mu, coll));
            }
        }
        FlowMatrix {
            rows: sources.len(),
            cols: targets.len(),
            values,
        }
    }

    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.values[source * self.cols + target]
    }

    pub fn row(&self, source: usize) -> &[f64] {
        &self.values[source * self.cols..(source + 1) * self.cols]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Order `(entity, flow)` candidates by descending flow, ties by ascending
/// entity id, and keep the first `n`.
pub fn top_by_flow(mut scored: Vec<(EntityId, f64)>, n: usize) -> Vec<(EntityId, f64)> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(n);
    scored
}

/// The `min(n, |candidates|)` candidates with the highest relevance flow from
/// `x`, strongest first, ties broken by ascending entity id.
///
/// `x` is not excluded automatically; leave it out of `candidates` if needed.
pub fn neighborhood(
    x: &TermVector,
    candidates: &[(EntityId, &TermVector)],
    n: usize,
    mu: f64,
    coll: &CollectionModel,
) -> Vec<(EntityId, f64)> {
    let scored = candidates
        .iter()
        .map(|&(id, tv)| (id, rflow(x, tv, mu, coll)))
        .collect();
    top_by_flow(scored, n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Position in anchor order; as an [`EntityId::Clust`] it sorts after every document.
    pub cluster_id: u32,
    /// doc_id of the anchoring document.
    pub anchor: u32,
    /// Member doc_ids: anchor first, then neighbors by descending flow from the anchor.
    pub members: Vec<u32>,
    /// Indices of the members in the document slice the clusters were built from.
    pub positions: Vec<usize>,
    pub terms: TermVector,
}

impl Cluster {
    pub fn entity(&self) -> EntityId {
        EntityId::Clust(self.cluster_id)
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

pub(crate) fn check_documents(docs: &[Document]) -> Result<()> {
    if let Some(d) = docs.iter().find(|d| d.length() == 0) {
        return Err(Error::param(
            "documents",
            format!(
                "document {} has no terms and cannot be placed in a graph",
                d.docno
            ),
        ));
    }
    Ok(())
}

/// Document-to-document relevance flows for `docs`.
pub fn document_flows(docs: &[Document], mu: f64, coll: &CollectionModel) -> FlowMatrix {
    let tvs: Vec<&TermVector> = docs.iter().map(|d| &d.terms).collect();
    FlowMatrix::compute(&tvs, &tvs, mu, coll)
}

/// One cluster per document: the document plus its `k - 1` nearest neighbors
/// among the other documents. Duplicate member sets are kept.
pub fn build_nn_clusters(
    docs: &[Document],
    k: usize,
    mu: f64,
    coll: &CollectionModel,
) -> Result<Vec<Cluster>> {
    check_documents(docs)?;
    check_cluster_size(docs.len(), k)?;
    let flows = document_flows(docs, mu, coll);
    clusters_from_flows(docs, &flows, k)
}

fn check_cluster_size(n_docs: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::param(
            "k",
            format!("cluster size must be at least 2, got {k}"),
        ));
    }
    if k > n_docs {
        return Err(Error::param(
            "k",
            format!("cluster size {k} exceeds the {n_docs} retrieved documents"),
        ));
    }
    Ok(())
}

/// As [`build_nn_clusters`], reusing precomputed document flows.
pub fn clusters_from_flows(
    docs: &[Document],
    flows: &FlowMatrix,
    k: usize,
) -> Result<Vec<Cluster>> {
    check_cluster_size(docs.len(), k)?;
    if flows.rows() != docs.len() || flows.cols() != docs.len() {
        return Err(Error::param(
            "flows",
            "matrix shape does not match the documents",
        ));
    }
    docs.iter()
        .enumerate()
        .map(|(i, anchor)| {
            let scored = docs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, d)| (EntityId::Doc(d.doc_id), flows.get(i, j)))
                .collect();
            let neighbors = top_by_flow(scored, k - 1);
            let mut positions = vec![i];
            for (id, _) in &neighbors {
                let EntityId::Doc(doc_id) = *id else {
                    unreachable!()
                };
                positions.push(
                    docs.iter()
                        .position(|d| d.doc_id == doc_id)
                        .expect("neighbor drawn from docs"),
                );
            }
            let members = positions.iter().map(|&p| docs[p].doc_id).collect();
            let terms = cluster_term_vector(positions.iter().map(|&p| &docs[p].terms))?;
            Ok(Cluster {
                cluster_id: i as u32,
                anchor: anchor.doc_id,
                members,
                positions,
                terms,
            })
        })
        .collect()
}
