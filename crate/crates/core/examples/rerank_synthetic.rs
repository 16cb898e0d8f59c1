//! Every legal re-ranking algorithm on a synthetic collection, compared
//! with the initial query-likelihood ranking.

use clustrank::corpus::{parse_topics, Corpus, ParseOptions};
use clustrank::eval::MetricReport;
use clustrank::index::Index;
use clustrank::rerank::{legal_algorithms, InitialList, QueryContext, RerankSpec};
use clustrank::retrieval::initial_run;
use clustrank::synth::{generate, SynthConfig};

fn main() -> clustrank::Result<()> {
    let syn = generate(&SynthConfig {
        docs: 300,
        seed: 3,
        ..SynthConfig::default()
    })?;
    let opts = ParseOptions::default();
    let mut corpus = Corpus::new();
    corpus.parse_documents(syn.trec.as_bytes(), &opts)?;
    let index = Index::build(corpus, opts.tokenizer)?;
    let qrels = syn.qrels();

    let mut lists = Vec::new();
    let mut queries = Vec::new();
    for (qid, text) in parse_topics(syn.topics.as_bytes())? {
        let q = index.query(&qid, &text)?.in_vocabulary(index.collection());
        let run = initial_run(&qid, &q, index.docs(), index.collection(), 1000.0, 50, "QL")?;
        let docs = run
            .docnos()
            .map(|d| index.document(d).unwrap().clone())
            .collect();
        lists.push(InitialList::new(
            qid,
            docs,
            run.entries.iter().map(|e| e.score).collect(),
        )?);
        queries.push(q);
    }

    let init: Vec<_> = lists.iter().map(|l| l.as_run("init")).collect();
    let r = MetricReport::evaluate(&init, &qrels);
    println!(
        "{:<22} {:.3} {:.3} {:.3}",
        "initial", r.mean_prec5, r.mean_prec10, r.mean_mrr
    );
    for (mode, scorer, schema) in legal_algorithms() {
        let spec = RerankSpec {
            mode,
            scorer,
            schema,
            ..RerankSpec::default()
        };
        let mut runs = Vec::new();
        for (list, q) in lists.iter().zip(&queries) {
            let mut ctx =
                QueryContext::new(list.clone(), index.collection(), 2000.0)?.with_query(q.clone());
            runs.push(ctx.rerank(&spec)?.run);
        }
        let r = MetricReport::evaluate(&runs, &qrels);
        println!(
            "{:<22} {:.3} {:.3} {:.3}",
            spec.name(),
            r.mean_prec5,
            r.mean_prec10,
            r.mean_mrr
        );
    }
    Ok(())
}
