//! Relevance-flow graphs over documents and clusters.
//!
//! Three schemata are supported:
//!
//! * [`Schema::DocDoc`]: documents only; each document links to the `delta`
//!   other documents it has the highest relevance flow to.
//! * [`Schema::ClusterDoc`]: documents as authorities; each cluster links to
//!   its top `delta` documents. One-way bipartite: clusters on the left.
//! * [`Schema::DocCluster`]: documents as hubs; each document links to its
//!   top `delta` clusters. One-way bipartite: documents on the left.
//!
//! Edge weights are relevance flows in `(0, 1]`. Rows are stored sparsely
//! except after [`RelevanceFlowGraph::smooth_weights`], which fills them.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::cluster::{check_documents, top_by_flow, Cluster, EntityId, FlowMatrix};
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::lm::{CollectionModel, TermVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    DocDoc,
    ClusterDoc,
    DocCluster,
}

impl Schema {
    pub fn is_bipartite(self) -> bool {
        !matches!(self, Schema::DocDoc)
    }

    /// Whether nodes of this kind are on the left (edge source) side.
    /// Always true for [`Schema::DocDoc`].
    pub fn is_source_side(self, id: EntityId) -> bool {
        match self {
            Schema::DocDoc => true,
            Schema::ClusterDoc => id.is_cluster(),
            Schema::DocCluster => id.is_doc(),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Schema::DocDoc => "dd",
            Schema::ClusterDoc => "cd",
            Schema::DocCluster => "dc",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schema::DocDoc => "d<->d",
            Schema::ClusterDoc => "c->d",
            Schema::DocCluster => "d->c",
        })
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dd" | "d<->d" => Ok(Schema::DocDoc),
            "cd" | "c->d" => Ok(Schema::ClusterDoc),
            "dc" | "d->c" => Ok(Schema::DocCluster),
            _ => Err(Error::param(
                "graph",
                format!("unknown schema {s:?} (expected dd, cd or dc)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceFlowGraph {
    schema: Schema,
    out_degree: usize,
    nodes: Vec<EntityId>,
    index: HashMap<EntityId, usize>,
    /// Positive-weight out-edges per node, sorted by target index.
    rows: Vec<Vec<(usize, f64)>>,
    out_weight: Vec<f64>,
}

impl RelevanceFlowGraph {
    /// Build from an explicit edge list, checking the schema: DD graphs hold
    /// documents only; CD (DC) graphs carry positive weight only from
    /// clusters to documents (documents to clusters), and every left-side
    /// node must have positive out-weight.
    pub fn from_edges<I>(
        schema: Schema,
        out_degree: usize,
        nodes: Vec<EntityId>,
        edges: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (EntityId, EntityId, f64)>,
    {
        if nodes.is_empty() {
            return Err(Error::Empty("graph has no nodes".into()));
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, &id) in nodes.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(Error::Schema(format!("duplicate node {id}")));
            }
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nodes.len()];
        for (u, v, w) in edges {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Schema(format!(
                    "edge {u} -> {v} has invalid weight {w}"
                )));
            }
            let ui = *index
                .get(&u)
                .ok_or_else(|| Error::Schema(format!("unknown node {u}")))?;
            let vi = *index
                .get(&v)
                .ok_or_else(|| Error::Schema(format!("unknown node {v}")))?;
            if w == 0.0 {
                continue;
            }
            let legal = match schema {
                Schema::DocDoc => u.is_doc() && v.is_doc(),
                Schema::ClusterDoc => u.is_cluster() && v.is_doc(),
                Schema::DocCluster => u.is_doc() && v.is_cluster(),
            };
            if !legal {
                return Err(Error::Schema(format!(
                    "edge {u} -> {v} not allowed in {schema} graph"
                )));
            }
            rows[ui].push((vi, w));
        }
        if schema == Schema::DocDoc {
            if let Some(c) = nodes.iter().find(|n| n.is_cluster()) {
                return Err(Error::Schema(format!("cluster node {c} in d<->d graph")));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(v, _)| v);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(v, w) in row.iter() {
                match merged.last_mut() {
                    Some((last, acc)) if *last == v => *acc += w,
                    _ => merged.push((v, w)),
                }
            }
            *row = merged;
        }
        let out_weight: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().map(|&(_, w)| w).sum())
            .collect();
        if schema.is_bipartite() {
            let left_count = nodes.iter().filter(|&&n| schema.is_source_side(n)).count();
            if left_count == 0 || left_count == nodes.len() {
                return Err(Error::Schema(format!(
                    "{schema} graph needs nodes on both sides"
                )));
            }
            for (i, &n) in nodes.iter().enumerate() {
                if schema.is_source_side(n) && out_weight[i] <= 0.0 {
                    return Err(Error::Schema(format!(
                        "left-side node {n} has no out-weight"
                    )));
                }
            }
        }
        Ok(RelevanceFlowGraph {
            schema,
            out_degree,
            nodes,
            index,
            rows,
            out_weight,
        })
    }

    pub fn schema(&self) -> Schema {
        self.schema
    }

    pub fn out_degree(&self) -> usize {
        self.out_degree
    }

    pub fn nodes(&self) -> &[EntityId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: EntityId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Positive-weight out-edges of node `u` as `(target index, weight)`.
    pub fn out_edges(&self, u: usize) -> &[(usize, f64)] {
        &self.rows[u]
    }

    pub fn out_weight(&self, u: usize) -> f64 {
        self.out_weight[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.rows[u]
            .binary_search_by_key(&v, |&(t, _)| t)
            .map(|i| self.rows[u][i].1)
            .unwrap_or(0.0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Iterate every positive-weight edge as `(source, target, weight)` indices.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().map(move |&(v, w)| (u, v, w)))
    }

    /// Dense row-major weight matrix.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for (u, v, w) in self.edges() {
            m[u][v] = w;
        }
        m
    }

    /// Interpolate each source row with the uniform distribution:
    /// `wt'(u, v) = (1 - lambda) / |R| + lambda * wt(u, v) / outwt(u)`, where
    /// `R` is every node for d<->d graphs and the right-hand side for the
    /// bipartite schemata (whose right-side rows stay empty).
    pub fn smooth_weights(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::param(
                "lambda",
                format!("must lie in (0, 1), got {lambda}"),
            ));
        }
        let targets: Vec<usize> = (0..self.len())
            .filter(|&v| {
                self.schema == Schema::DocDoc || !self.schema.is_source_side(self.nodes[v])
            })
            .collect();
        let uniform = (1.0 - lambda) / targets.len() as f64;
        let mut rows = vec![Vec::new(); self.len()];
        for (u, row) in rows.iter_mut().enumerate() {
            if !self.schema.is_source_side(self.nodes[u]) {
                continue;
            }
            let out = self.out_weight[u];
            // construction guarantees delta >= 1 out-edges on every source node
            assert!(out > 0.0, "node {} has no out-weight", self.nodes[u]);
            *row = targets
                .iter()
                .map(|&v| (v, uniform + lambda * self.weight(u, v) / out))
                .collect();
        }
        let out_weight = rows
            .iter()
            .map(|r: &Vec<(usize, f64)>| r.iter().map(|&(_, w)| w).sum())
            .collect();
        Ok(RelevanceFlowGraph {
            schema: self.schema,
            out_degree: self.out_degree,
            nodes: self.nodes.clone(),
            index: self.index.clone(),
            rows,
            out_weight,
        })
    }

    /// Text dump, one `u v weight` line per positive edge (`d:`/`c:` ids).
    pub fn write_edges<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v, w) in self.edges() {
            writeln!(out, "{} {} {}", self.nodes[u], self.nodes[v], w)?;
        }
        Ok(())
    }
}

fn check_delta(delta: usize) -> Result<()> {
    if delta == 0 {
        return Err(Error::param("delta", "out-degree must be at least 1"));
    }
    Ok(())
}

fn doc_nodes(docs: &[Document]) -> Vec<EntityId> {
    docs.iter().map(|d| EntityId::Doc(d.doc_id)).collect()
}

/// Document-to-document graph: `u -> v` with weight `rflow(u, v)` for the
/// `delta` strongest `v != u`.
pub fn build_dd(
    docs: &[Document],
    delta: usize,
    mu: f64,
    coll: &CollectionModel,
) -> Result<RelevanceFlowGraph> {
    check_documents(docs)?;
    let flows = crate::cluster::document_flows(docs, mu, coll);
    build_dd_from_flows(docs, &flows, delta)
}

/// As [`build_dd`] with precomputed document-to-document flows.
pub fn build_dd_from_flows(
    docs: &[Document],
    flows: &FlowMatrix,
    delta: usize,
) -> Result<RelevanceFlowGraph> {
    check_delta(delta)?;
    if docs.len() < 2 {
        return Err(Error::param(
            "documents",
            "a d<->d graph needs at least two documents",
        ));
    }
    let nodes = doc_nodes(docs);
    let mut edges = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        let scored = nodes
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, &v)| (v, flows.get(i, j)))
            .collect();
        edges.extend(
            top_by_flow(scored, delta)
                .into_iter()
                .map(|(v, w)| (u, v, w)),
        );
    }
    RelevanceFlowGraph::from_edges(Schema::DocDoc, delta, nodes, edges)
}

fn check_clusters(clusters: &[Cluster]) -> Result<()> {
    if clusters.is_empty() {
        return Err(Error::Empty("no clusters".into()));
    }
    Ok(())
}

fn cluster_vectors(clusters: &[Cluster]) -> Vec<&TermVector> {
    clusters.iter().map(|c| &c.terms).collect()
}

fn doc_vectors(docs: &[Document]) -> Vec<&TermVector> {
    docs.iter().map(|d| &d.terms).collect()
}

/// Cluster-to-document flows (rows: clusters, columns: documents).
pub fn cluster_document_flows(
    docs: &[Document],
    clusters: &[Cluster],
    mu: f64,
    coll: &CollectionModel,
) -> FlowMatrix {
    FlowMatrix::compute(&cluster_vectors(clusters), &doc_vectors(docs), mu, coll)
}

/// Document-to-cluster flows (rows: documents, columns: clusters).
pub fn document_cluster_flows(
    docs: &[Document],
    clusters: &[Cluster],
    mu: f64,
    coll: &CollectionModel,
) -> FlowMatrix {
    FlowMatrix::compute(&doc_vectors(docs), &cluster_vectors(clusters), mu, coll)
}

/// Document-as-authority graph: each cluster links to its `delta` strongest documents.
pub fn build_cd(
    docs: &[Document],
    clusters: &[Cluster],
    delta: usize,
    mu: f64,
    coll: &CollectionModel,
) -> Result<RelevanceFlowGraph> {
    check_documents(docs)?;
    check_clusters(clusters)?;
    build_cd_from_flows(
        docs,
        clusters,
        &cluster_document_flows(docs, clusters, mu, coll),
        delta,
    )
}

/// As [`build_cd`] with precomputed cluster-to-document flows.
pub fn build_cd_from_flows(
    docs: &[Document],
    clusters: &[Cluster],
    flows: &FlowMatrix,
    delta: usize,
) -> Result<RelevanceFlowGraph> {
    check_delta(delta)?;
    check_clusters(clusters)?;
    let doc_ids = doc_nodes(docs);
    let mut edges = Vec::new();
    for (ci, c) in clusters.iter().enumerate() {
        let scored = doc_ids
            .iter()
            .enumerate()
            .map(|(j, &d)| (d, flows.get(ci, j)))
            .collect();
        edges.extend(
            top_by_flow(scored, delta)
                .into_iter()
                .map(|(d, w)| (c.entity(), d, w)),
        );
    }
    let mut nodes = doc_ids;
    nodes.extend(clusters.iter().map(Cluster::entity));
    RelevanceFlowGraph::from_edges(Schema::ClusterDoc, delta, nodes, edges)
}

/// Document-as-hub graph: each document links to its `delta` strongest clusters.
pub fn build_dc(
    docs: &[Document],
    clusters: &[Cluster],
    delta: usize,
    mu: f64,
    coll: &CollectionModel,
) -> Result<RelevanceFlowGraph> {
    check_documents(docs)?;
    check_clusters(clusters)?;
    build_dc_from_flows(
        docs,
        clusters,
        &document_cluster_flows(docs, clusters, mu, coll),
        delta,
    )
}

/// As [`build_dc`] with precomputed document-to-cluster flows.
pub fn build_dc_from_flows(
    docs: &[Document],
    clusters: &[Cluster],
    flows: &FlowMatrix,
    delta: usize,
) -> Result<RelevanceFlowGraph> {
    check_delta(delta)?;
    check_clusters(clusters)?;
    let cluster_ids: Vec<EntityId> = clusters.iter().map(Cluster::entity).collect();
    let mut edges = Vec::new();
    for (di, d) in docs.iter().enumerate() {
        let scored = cluster_ids
            .iter()
            .enumerate()
            .map(|(j, &c)| (c, flows.get(di, j)))
            .collect();
        edges.extend(
            top_by_flow(scored, delta)
                .into_iter()
                .map(|(c, w)| (EntityId::Doc(d.doc_id), c, w)),
        );
    }
    let mut nodes = doc_nodes(docs);
    nodes.extend(cluster_ids);
    RelevanceFlowGraph::from_edges(Schema::DocCluster, delta, nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::build_nn_clusters;
    use crate::cluster::fixtures::f1_docs;
    use crate::lm::rflow;

    const MU: f64 = 3.0;

    #[test]
    fn dd_single_out_edge() {
        let (docs, coll) = f1_docs();
        let g = build_dd(&docs, 1, MU, &coll).unwrap();
        assert_eq!(g.out_edges(0).len(), 1);
        assert_eq!(g.nodes()[g.out_edges(0)[0].0], EntityId::Doc(1));
        assert!((g.out_edges(0)[0].1 - 0.72112).abs() < 1e-4);
        for u in 0..g.len() {
            assert_eq!(g.weight(u, u), 0.0);
        }
    }

    #[test]
    fn dd_saturates_to_complete_digraph() {
        let (docs, coll) = f1_docs();
        let g = build_dd(&docs, 5, MU, &coll).unwrap();
        assert_eq!(g.edge_count(), 6);
        for (u, v, w) in g.edges() {
            assert_ne!(u, v);
            assert!(w > 0.0 && w <= 1.0);
        }
    }

    #[test]
    fn dd_needs_two_docs() {
        let (docs, coll) = f1_docs();
        assert!(build_dd(&docs[..1], 1, MU, &coll).is_err());
        assert!(build_dd(&docs, 0, MU, &coll).is_err());
    }

    #[test]
    fn cd_structure() {
        let (docs, coll) = f1_docs();
        let clusters = build_nn_clusters(&docs, 2, MU, &coll).unwrap();
        let g = build_cd(&docs, &clusters, 1, MU, &coll).unwrap();
        assert_eq!(g.len(), 6);
        for (u, v, _) in g.edges() {
            assert!(g.nodes()[u].is_cluster() && g.nodes()[v].is_doc());
        }
        for (i, &n) in g.nodes().iter().enumerate() {
            if n.is_cluster() {
                assert_eq!(g.out_edges(i).len(), 1);
            } else {
                assert_eq!(g.out_weight(i), 0.0);
            }
        }
        // cluster anchored at d3 = {d3, d1} -> counts {a:2, b:1, c:3}
        let c3 = g.index_of(EntityId::Clust(2)).unwrap();
        let (target, w) = g.out_edges(c3)[0];
        let expected: Vec<f64> = docs
            .iter()
            .map(|d| rflow(&clusters[2].terms, &d.terms, MU, &coll))
            .collect();
        let best = (0..3)
            .max_by(|&a, &b| expected[a].total_cmp(&expected[b]).then(b.cmp(&a)))
            .unwrap();
        assert_eq!(g.nodes()[target], EntityId::Doc(best as u32));
        assert!((w - expected[best]).abs() < 1e-12);
    }

    #[test]
    fn dc_structure() {
        let (docs, coll) = f1_docs();
        let clusters = build_nn_clusters(&docs, 2, MU, &coll).unwrap();
        let g = build_dc(&docs, &clusters, 2, MU, &coll).unwrap();
        for (u, v, _) in g.edges() {
            assert!(g.nodes()[u].is_doc() && g.nodes()[v].is_cluster());
        }
        for (i, &n) in g.nodes().iter().enumerate() {
            assert_eq!(g.out_edges(i).len(), if n.is_doc() { 2 } else { 0 });
        }
        assert!(build_dc(&docs, &[], 2, MU, &coll).is_err());
    }

    #[test]
    fn from_edges_rejects_schema_violations() {
        let nodes = vec![EntityId::Doc(0), EntityId::Clust(0)];
        let bad = RelevanceFlowGraph::from_edges(
            Schema::ClusterDoc,
            1,
            nodes.clone(),
            [(EntityId::Doc(0), EntityId::Clust(0), 1.0)],
        );
        assert!(bad.is_err());
        // left node without out-weight
        assert!(RelevanceFlowGraph::from_edges(Schema::ClusterDoc, 1, nodes.clone(), []).is_err());
        assert!(RelevanceFlowGraph::from_edges(
            Schema::DocDoc,
            1,
            nodes,
            [(EntityId::Doc(0), EntityId::Clust(0), 1.0)]
        )
        .is_err());
    }

    #[test]
    fn smoothing_two_node_dd() {
        let nodes = vec![EntityId::Doc(0), EntityId::Doc(1)];
        let g = RelevanceFlowGraph::from_edges(
            Schema::DocDoc,
            1,
            nodes,
            [
                (EntityId::Doc(0), EntityId::Doc(1), 1.0),
                (EntityId::Doc(1), EntityId::Doc(0), 1.0),
            ],
        )
        .unwrap();
        let s = g.smooth_weights(0.8).unwrap();
        assert!((s.weight(0, 1) - 0.9).abs() < 1e-12);
        assert!((s.weight(0, 0) - 0.1).abs() < 1e-12);
        assert!(g.smooth_weights(1.0).is_err());
        assert!(g.smooth_weights(0.0).is_err());
    }

    #[test]
    fn smoothed_rows_sum_to_one_and_keep_bipartite_direction() {
        let (docs, coll) = f1_docs();
        let clusters = build_nn_clusters(&docs, 2, MU, &coll).unwrap();
        for g in [
            build_dd(&docs, 1, MU, &coll).unwrap(),
            build_cd(&docs, &clusters, 2, MU, &coll).unwrap(),
            build_dc(&docs, &clusters, 2, MU, &coll).unwrap(),
        ] {
            let s = g.smooth_weights(0.6).unwrap();
            for (i, &n) in s.nodes().iter().enumerate() {
                if g.schema().is_source_side(n) {
                    assert!((s.out_weight(i) - 1.0).abs() < 1e-12);
                } else {
                    assert_eq!(s.out_weight(i), 0.0);
                }
            }
            for (u, v, _) in s.edges() {
                if g.schema().is_bipartite() {
                    assert!(g.schema().is_source_side(s.nodes()[u]));
                    assert!(!g.schema().is_source_side(s.nodes()[v]));
                }
            }
            // lambda -> 1 approaches row-normalized weights
            let near = g.smooth_weights(1.0 - 1e-12).unwrap();
            for (u, v, w) in g.edges() {
                assert!((near.weight(u, v) - w / g.out_weight(u)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn edge_dump() {
        let nodes = vec![EntityId::Doc(0), EntityId::Clust(0)];
        let g = RelevanceFlowGraph::from_edges(
            Schema::ClusterDoc,
            1,
            nodes,
            [(EntityId::Clust(0), EntityId::Doc(0), 0.5)],
        )
        .unwrap();
        let mut buf = Vec::new();
        g.write_edges(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "c:0 d:0 0.5\n");
    }
}
