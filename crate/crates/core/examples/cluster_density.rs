//! How many relevant documents land in the top-ranked cluster, for
//! cluster rankings by authority in the document-to-cluster graph versus
//! cluster query likelihood.

use clustrank::centrality::ScoreKind;
use clustrank::corpus::{parse_topics, Corpus, ParseOptions};
use clustrank::eval::top_cluster_density;
use clustrank::index::Index;
use clustrank::rerank::{InitialList, QueryContext, RankMode, RerankSpec, Scorer};
use clustrank::retrieval::initial_run;
use clustrank::synth::{generate, SynthConfig};
use clustrank::Schema;

fn main() -> clustrank::Result<()> {
    let syn = generate(&SynthConfig {
        docs: 300,
        queries: 16,
        seed: 5,
        ..SynthConfig::default()
    })?;
    let opts = ParseOptions::default();
    let mut corpus = Corpus::new();
    corpus.parse_documents(syn.trec.as_bytes(), &opts)?;
    let index = Index::build(corpus, opts.tokenizer)?;
    let qrels = syn.qrels();

    let k = 5;
    let specs = [
        ("clust-Auth[d->c]", Scorer::Centrality(ScoreKind::Auth)),
        ("clust-QL", Scorer::QueryLikelihood),
    ];
    let mut totals = [0.0; 2];
    let topics = parse_topics(syn.topics.as_bytes())?;
    for (qid, text) in &topics {
        let q = index.query(qid, text)?.in_vocabulary(index.collection());
        let run = initial_run(qid, &q, index.docs(), index.collection(), 1000.0, 50, "QL")?;
        let docs = run
            .docnos()
            .map(|d| index.document(d).unwrap().clone())
            .collect();
        let list = InitialList::new(
            qid.clone(),
            docs,
            run.entries.iter().map(|e| e.score).collect(),
        )?;
        let mut ctx = QueryContext::new(list, index.collection(), 2000.0)?.with_query(q);
        for (i, (_, scorer)) in specs.iter().enumerate() {
            let spec = RerankSpec {
                mode: RankMode::Clust,
                scorer: *scorer,
                schema: Schema::DocCluster,
                k,
                ..RerankSpec::default()
            };
            let top = ctx.rerank(&spec)?.top_cluster.expect("clust mode");
            totals[i] += top_cluster_density(qid, top.iter().map(String::as_str), &qrels, k);
        }
    }
    for (i, (name, _)) in specs.iter().enumerate() {
        println!(
            "{name:<18} {:.1}% relevant in the top cluster (k = {k})",
            totals[i] / topics.len() as f64
        );
    }
    Ok(())
}
