//! Turning centrality scores into document rankings.
//!
//! Algorithms are named `<mode>-<score>[<graph>]`, e.g. `doc-Auth[c->d]`
//! ranks documents by their authority score in the cluster-to-document
//! graph and `clust-PR[d->c]` ranks clusters by PageRank in the
//! document-to-cluster graph, then lists each cluster's members.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::centrality::{self, CentralityScores, ScoreKind, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::cluster::{clusters_from_flows, document_flows, Cluster, EntityId, FlowMatrix};
use crate::corpus::{Document, RankedRun};
use crate::error::{Error, Result};
use crate::graph::{self, RelevanceFlowGraph, Schema};
use crate::lm::{query_log_likelihood, CollectionModel, TermVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RankMode {
    Doc,
    Clust,
}

impl fmt::Display for RankMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankMode::Doc => "doc",
            RankMode::Clust => "clust",
        })
    }
}

impl FromStr for RankMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "doc" => Ok(RankMode::Doc),
            "clust" => Ok(RankMode::Clust),
            _ => Err(Error::param(
                "mode",
                format!("expected doc or clust, got {s:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TiePolicy {
    /// Ascending document id.
    #[default]
    ItemId,
    /// Descending initial retrieval score, then document id.
    InitialScore,
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id" => Ok(TiePolicy::ItemId),
            "initial" => Ok(TiePolicy::InitialScore),
            _ => Err(Error::param(
                "tie",
                format!("expected id or initial, got {s:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scorer {
    Centrality(ScoreKind),
    /// Cluster query likelihood (clust mode only).
    QueryLikelihood,
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scorer::Centrality(k) => k.fmt(f),
            Scorer::QueryLikelihood => f.write_str("QL"),
        }
    }
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("ql") {
            Ok(Scorer::QueryLikelihood)
        } else {
            s.parse().map(Scorer::Centrality)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RerankSpec {
    pub mode: RankMode,
    pub scorer: Scorer,
    pub schema: Schema,
    /// Graph out-degree.
    pub delta: usize,
    /// Cluster size.
    pub k: usize,
    /// PageRank damping.
    pub lambda: f64,
    /// Interpolate edge weights with the uniform distribution before scoring.
    pub smooth_lambda: Option<f64>,
    /// Multiply document scores by query likelihood (doc mode only).
    pub reanchor: bool,
    pub tie: TiePolicy,
}

impl Default for RerankSpec {
    fn default() -> Self {
        RerankSpec {
            mode: RankMode::Doc,
            scorer: Scorer::Centrality(ScoreKind::Auth),
            schema: Schema::ClusterDoc,
            delta: 9,
            k: 5,
            lambda: 0.85,
            smooth_lambda: None,
            reanchor: false,
            tie: TiePolicy::ItemId,
        }
    }
}

/// Whether `(mode, scorer, schema)` names a meaningful algorithm. In the
/// bipartite graphs only one side carries each score: documents are the
/// authorities (and PageRank sinks) of c->d and the hubs of d->c.
pub fn is_legal(mode: RankMode, scorer: Scorer, schema: Schema) -> bool {
    use ScoreKind::*;
    let Scorer::Centrality(kind) = scorer else {
        return mode == RankMode::Clust;
    };
    match (mode, schema) {
        (RankMode::Doc, Schema::DocDoc) => kind != PageRankBip,
        (RankMode::Doc, Schema::ClusterDoc) | (RankMode::Clust, Schema::DocCluster) => kind != Hub,
        (RankMode::Doc, Schema::DocCluster) | (RankMode::Clust, Schema::ClusterDoc) => kind == Hub,
        (RankMode::Clust, Schema::DocDoc) => false,
    }
}

/// Every legal `(mode, scorer, schema)`; clust-QL is listed once, under d->c.
pub fn legal_algorithms() -> Vec<(RankMode, Scorer, Schema)> {
    let mut out = Vec::new();
    for mode in [RankMode::Doc, RankMode::Clust] {
        for schema in [Schema::DocDoc, Schema::ClusterDoc, Schema::DocCluster] {
            for kind in ScoreKind::ALL {
                if is_legal(mode, Scorer::Centrality(kind), schema) {
                    out.push((mode, Scorer::Centrality(kind), schema));
                }
            }
        }
    }
    out.push((RankMode::Clust, Scorer::QueryLikelihood, Schema::DocCluster));
    out
}

fn algorithm_name(mode: RankMode, scorer: Scorer, schema: Schema) -> String {
    match scorer {
        Scorer::QueryLikelihood => format!("{mode}-QL"),
        _ => format!("{mode}-{scorer}[{schema}]"),
    }
}

impl RerankSpec {
    pub fn validate(&self) -> Result<()> {
        if !is_legal(self.mode, self.scorer, self.schema) {
            let legal: Vec<String> = legal_algorithms()
                .into_iter()
                .map(|(m, s, g)| algorithm_name(m, s, g))
                .collect();
            return Err(Error::IllegalCombination {
                requested: format!("{}-{}[{}]", self.mode, self.scorer, self.schema),
                legal: legal.join(", "),
            });
        }
        if self.reanchor && self.mode != RankMode::Doc {
            return Err(Error::IllegalCombination {
                requested: format!("{} with re-anchoring", self.name()),
                legal: "re-anchoring applies to doc-* algorithms only".into(),
            });
        }
        if self.delta == 0 {
            return Err(Error::param("delta", "out-degree must be at least 1"));
        }
        if self.k < 2 {
            return Err(Error::param(
                "k",
                format!("cluster size must be at least 2, got {}", self.k),
            ));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::param(
                "lambda",
                format!("must lie in (0, 1), got {}", self.lambda),
            ));
        }
        if let Some(l) = self.smooth_lambda {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::param(
                    "smooth-lambda",
                    format!("must lie in (0, 1), got {l}"),
                ));
            }
        }
        Ok(())
    }

    /// Algorithm name without parameters, usable as a run tag.
    pub fn name(&self) -> String {
        let mut name = algorithm_name(self.mode, self.scorer, self.schema);
        if let Some(l) = self.smooth_lambda {
            name.push_str(&format!("+smooth{l}"));
        }
        if self.reanchor {
            name.push_str("+reanchor");
        }
        name
    }
}

/// The top of an initial ranking for one query, with the documents' term vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialList {
    pub query_id: String,
    pub docs: Vec<Document>,
    pub scores: Vec<f64>,
}

impl InitialList {
    pub fn new(query_id: impl Into<String>, docs: Vec<Document>, scores: Vec<f64>) -> Result<Self> {
        if docs.len() != scores.len() {
            return Err(Error::param(
                "initial list",
                "document and score counts differ",
            ));
        }
        Ok(InitialList {
            query_id: query_id.into(),
            docs,
            scores,
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// The list in its original order, scored by rank.
    pub fn as_run(&self, tag: &str) -> RankedRun {
        run_from_order(
            &self.query_id,
            tag,
            &self.docs,
            &(0..self.len()).collect::<Vec<_>>(),
        )
    }
}

/// Re-ranked runs carry rank-derived scores (`N`, `N - 1`, ...), so that tools
/// which re-sort by score reproduce the order exactly.
fn run_from_order(query_id: &str, tag: &str, docs: &[Document], order: &[usize]) -> RankedRun {
    let mut run = RankedRun::new(query_id, tag);
    let n = order.len();
    for (i, &p) in order.iter().enumerate() {
        run.push(docs[p].docno.clone(), (n - i) as f64);
    }
    run
}

fn doc_order(scores: &CentralityScores, list: &InitialList, tie: TiePolicy) -> Result<Vec<usize>> {
    let values = list
        .docs
        .iter()
        .map(|d| {
            scores
                .get(EntityId::Doc(d.doc_id))
                .ok_or_else(|| Error::MissingScore(format!("document {}", d.docno)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..list.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = values[b].total_cmp(&values[a]);
        let by_initial = match tie {
            TiePolicy::ItemId => std::cmp::Ordering::Equal,
            TiePolicy::InitialScore => list.scores[b].total_cmp(&list.scores[a]),
        };
        by_score
            .then(by_initial)
            .then(list.docs[a].doc_id.cmp(&list.docs[b].doc_id))
    });
    Ok(order)
}

/// Rank the documents of `list` directly by their scores (clusters ignored).
pub fn doc_rank(
    scores: &CentralityScores,
    list: &InitialList,
    tie: TiePolicy,
    tag: &str,
) -> Result<RankedRun> {
    let order = doc_order(scores, list, tie)?;
    Ok(run_from_order(&list.query_id, tag, &list.docs, &order))
}

/// Cluster indices by descending value, ties by ascending cluster id.
fn cluster_order(clusters: &[Cluster], values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then(clusters[a].cluster_id.cmp(&clusters[b].cluster_id))
    });
    order
}

/// Walk clusters in the given order, listing each one's members by
/// descending initial score (ties by doc id) and skipping repeats.
fn concatenate(order: &[usize], clusters: &[Cluster], list: &InitialList) -> Vec<usize> {
    let mut emitted = vec![false; list.len()];
    let mut out = Vec::with_capacity(list.len());
    for &c in order {
        let mut members = clusters[c].positions.clone();
        members.sort_by(|&a, &b| {
            list.scores[b]
                .total_cmp(&list.scores[a])
                .then(list.docs[a].doc_id.cmp(&list.docs[b].doc_id))
        });
        for p in members {
            if !emitted[p] {
                emitted[p] = true;
                out.push(p);
            }
        }
    }
    out
}

fn cluster_values(scores: &CentralityScores, clusters: &[Cluster]) -> Result<Vec<f64>> {
    clusters
        .iter()
        .map(|c| {
            scores
                .get(c.entity())
                .ok_or_else(|| Error::MissingScore(format!("cluster {}", c.entity())))
        })
        .collect()
}

/// Rank clusters by score and concatenate their member lists.
pub fn clust_rank(
    scores: &CentralityScores,
    clusters: &[Cluster],
    list: &InitialList,
    tag: &str,
) -> Result<RankedRun> {
    let values = cluster_values(scores, clusters)?;
    let order = concatenate(&cluster_order(clusters, &values), clusters, list);
    Ok(run_from_order(&list.query_id, tag, &list.docs, &order))
}

/// Multiply each document's score by its query likelihood `p_d(q)` (given
/// as a probability). Cluster scores pass through.
pub fn reanchor(
    scores: &CentralityScores,
    likelihoods: &HashMap<u32, f64>,
) -> Result<CentralityScores> {
    let values = scores
        .iter()
        .map(|(id, s)| match id {
            EntityId::Doc(d) => {
                let p = *likelihoods
                    .get(&d)
                    .ok_or_else(|| Error::MissingScore(format!("query likelihood of {id}")))?;
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(Error::param(
                        "likelihood",
                        format!("{id} has likelihood {p}"),
                    ));
                }
                Ok(s * p)
            }
            EntityId::Clust(_) => Ok(s),
        })
        .collect::<Result<Vec<f64>>>()?;
    CentralityScores::from_values(scores.kind(), scores.nodes().to_vec(), values)
}

/// Turn log-likelihoods into probabilities rescaled by a common positive
/// factor, `exp(ll - max ll)`, which leaves every ranking unchanged and
/// avoids underflow.
pub fn likelihoods_from_logs(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![0.0; logs.len()];
    }
    logs.iter().map(|&l| (l - max).exp()).collect()
}

/// Result of re-ranking one query.
#[derive(Debug, Clone, PartialEq)]
pub struct RerankOutput {
    pub run: RankedRun,
    /// Members of the highest-ranked cluster, in clust mode.
    pub top_cluster: Option<Vec<String>>,
}

struct ClusterCache {
    clusters: Vec<Cluster>,
    cluster_doc: Option<FlowMatrix>,
    doc_cluster: Option<FlowMatrix>,
}

/// Per-query state that caches flows, clusters and graphs, so that
/// sweeping over `delta`, `k` and `lambda` recomputes only what changes.
pub struct QueryContext<'a> {
    list: InitialList,
    coll: &'a CollectionModel,
    mu: f64,
    query: Option<TermVector>,
    likelihoods: Option<HashMap<u32, f64>>,
    doc_flows: Option<FlowMatrix>,
    clusters: HashMap<usize, ClusterCache>,
    graphs: HashMap<(Schema, usize, usize, Option<u64>), RelevanceFlowGraph>,
}

impl<'a> QueryContext<'a> {
    /// `mu` smooths the language models behind every edge weight and the
    /// cluster query likelihoods.
    pub fn new(list: InitialList, coll: &'a CollectionModel, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("must be positive, got {mu}")));
        }
        crate::cluster::check_documents(&list.docs)?;
        Ok(QueryContext {
            list,
            coll,
            mu,
            query: None,
            likelihoods: None,
            doc_flows: None,
            clusters: HashMap::new(),
            graphs: HashMap::new(),
        })
    }

    /// The query, needed for clust-QL.
    pub fn with_query(mut self, query: TermVector) -> Self {
        self.query = Some(query);
        self
    }

    /// Document query likelihoods (probabilities) for re-anchoring, aligned with the list.
    pub fn with_likelihoods(mut self, likelihoods: Vec<f64>) -> Result<Self> {
        if likelihoods.len() != self.list.len() {
            return Err(Error::param(
                "likelihoods",
                "one likelihood per document required",
            ));
        }
        self.likelihoods = Some(
            self.list
                .docs
                .iter()
                .map(|d| d.doc_id)
                .zip(likelihoods)
                .collect(),
        );
        Ok(self)
    }

    pub fn list(&self) -> &InitialList {
        &self.list
    }

    fn doc_flows(&mut self) -> &FlowMatrix {
        if self.doc_flows.is_none() {
            self.doc_flows = Some(document_flows(&self.list.docs, self.mu, self.coll));
        }
        self.doc_flows.as_ref().expect("just computed")
    }

    fn ensure_clusters(&mut self, k: usize) -> Result<()> {
        if !self.clusters.contains_key(&k) {
            self.doc_flows();
            let flows = self.doc_flows.as_ref().expect("computed above");
            let clusters = clusters_from_flows(&self.list.docs, flows, k)?;
            self.clusters.insert(
                k,
                ClusterCache {
                    clusters,
                    cluster_doc: None,
                    doc_cluster: None,
                },
            );
        }
        Ok(())
    }

    /// Nearest-neighbor clusters of size `min(k, N)`.
    pub fn clusters(&mut self, k: usize) -> Result<&[Cluster]> {
        let k = k.min(self.list.len());
        self.ensure_clusters(k)?;
        Ok(&self.clusters[&k].clusters)
    }

    fn graph(&mut self, spec: &RerankSpec, k: usize) -> Result<&RelevanceFlowGraph> {
        let k = if spec.schema == Schema::DocDoc { 0 } else { k };
        let key = (
            spec.schema,
            k,
            spec.delta,
            spec.smooth_lambda.map(f64::to_bits),
        );
        if !self.graphs.contains_key(&key) {
            let g = match spec.schema {
                Schema::DocDoc => {
                    self.doc_flows();
                    graph::build_dd_from_flows(
                        &self.list.docs,
                        self.doc_flows.as_ref().expect("computed"),
                        spec.delta,
                    )?
                }
                Schema::ClusterDoc => {
                    self.ensure_clusters(k)?;
                    let cache = self.clusters.get_mut(&k).expect("ensured");
                    let flows = cache.cluster_doc.get_or_insert_with(|| {
                        graph::cluster_document_flows(
                            &self.list.docs,
                            &cache.clusters,
                            self.mu,
                            self.coll,
                        )
                    });
                    graph::build_cd_from_flows(&self.list.docs, &cache.clusters, flows, spec.delta)?
                }
                Schema::DocCluster => {
                    self.ensure_clusters(k)?;
                    let cache = self.clusters.get_mut(&k).expect("ensured");
                    let flows = cache.doc_cluster.get_or_insert_with(|| {
                        graph::document_cluster_flows(
                            &self.list.docs,
                            &cache.clusters,
                            self.mu,
                            self.coll,
                        )
                    });
                    graph::build_dc_from_flows(&self.list.docs, &cache.clusters, flows, spec.delta)?
                }
            };
            let g = match spec.smooth_lambda {
                Some(l) => g.smooth_weights(l)?,
                None => g,
            };
            self.graphs.insert(key, g);
        }
        Ok(&self.graphs[&key])
    }

    /// Centrality scores of every node in the graph `spec` describes.
    pub fn scores(&mut self, spec: &RerankSpec) -> Result<CentralityScores> {
        let Scorer::Centrality(kind) = spec.scorer else {
            return Err(Error::param(
                "score",
                "query likelihood is not a graph centrality",
            ));
        };
        let k = spec.k.min(self.list.len());
        let g = self.graph(spec, k)?;
        Ok(match kind {
            ScoreKind::Hub => centrality::hits(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.0,
            ScoreKind::Auth => centrality::hits(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?.1,
            ScoreKind::PageRank => {
                centrality::pagerank(g, spec.lambda, DEFAULT_TOL, DEFAULT_MAX_ITER)?
            }
            ScoreKind::PageRankBip => centrality::pagerank_bip(g)?,
            ScoreKind::Influx => centrality::influx(g),
        })
    }

    /// Re-rank the list. Lists with fewer than two documents come back unchanged.
    pub fn rerank(&mut self, spec: &RerankSpec) -> Result<RerankOutput> {
        spec.validate()?;
        let tag = spec.name();
        if self.list.len() < 2 {
            return Ok(RerankOutput {
                run: self.list.as_run(&tag),
                top_cluster: None,
            });
        }
        let k = spec.k.min(self.list.len());
        if spec.mode == RankMode::Doc {
            let mut scores = self.scores(spec)?;
            if spec.reanchor {
                let p = self.likelihoods.as_ref().ok_or_else(|| {
                    Error::param(
                        "reanchor",
                        "query likelihoods are required for re-anchoring",
                    )
                })?;
                scores = reanchor(&scores, p)?;
            }
            let run = doc_rank(&scores, &self.list, spec.tie, &tag)?;
            return Ok(RerankOutput {
                run,
                top_cluster: None,
            });
        }
        let values = match spec.scorer {
            Scorer::QueryLikelihood => {
                let query = self
                    .query
                    .clone()
                    .ok_or_else(|| Error::param("query", "clust-QL needs the query text"))?;
                let (mu, coll) = (self.mu, self.coll);
                self.clusters(k)?
                    .iter()
                    .map(|c| query_log_likelihood(&query, &c.terms, mu, coll))
                    .collect()
            }
            Scorer::Centrality(_) => {
                let scores = self.scores(spec)?;
                cluster_values(&scores, self.clusters(k)?)?
            }
        };
        self.ensure_clusters(k)?;
        let clusters = &self.clusters[&k].clusters;
        let order = cluster_order(clusters, &values);
        let top = clusters[order[0]]
            .positions
            .iter()
            .map(|&p| self.list.docs[p].docno.clone())
            .collect();
        let positions = concatenate(&order, clusters, &self.list);
        Ok(RerankOutput {
            run: run_from_order(&self.list.query_id, &tag, &self.list.docs, &positions),
            top_cluster: Some(top),
        })
    }
}
