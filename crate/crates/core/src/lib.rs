//! Structural re-ranking of retrieved documents.
//!
//! Given the top of an initial query-likelihood ranking, build overlapping
//! nearest-neighbor clusters of the retrieved documents, connect documents
//! and clusters by language-model relevance flow, and re-rank by graph
//! centrality (HITS, PageRank and friends).
//!
//! ```
//! use clustrank::corpus::{Corpus, Tokenizer};
//! use clustrank::rerank::{InitialList, QueryContext, RerankSpec};
//!
//! let tok = Tokenizer::new();
//! let mut corpus = Corpus::new();
//! for (no, text) in [("d1", "apple banana"), ("d2", "banana cherry"), ("d3", "cherry apple apple")] {
//!     corpus.push(no.to_string(), text, &tok);
//! }
//! let coll = corpus.collection_model().unwrap();
//! let list = InitialList::new("q1", corpus.docs.clone(), vec![-1.0, -2.0, -3.0]).unwrap();
//! let spec = RerankSpec { delta: 2, k: 2, ..RerankSpec::default() };
//! let out = QueryContext::new(list, &coll, 2000.0).unwrap().rerank(&spec).unwrap();
//! assert_eq!(out.run.len(), 3);
//! ```

pub mod centrality;
pub mod cli;
pub mod cluster;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod index;
pub mod lm;
pub mod rerank;
pub mod retrieval;
pub mod synth;

pub use centrality::{CentralityScores, ScoreKind};
pub use cluster::{Cluster, EntityId};
pub use error::{Error, Result};
pub use graph::{RelevanceFlowGraph, Schema};
pub use rerank::{RankMode, RerankSpec, Scorer, TiePolicy};
