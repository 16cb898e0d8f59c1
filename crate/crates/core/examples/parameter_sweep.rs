//! Sweep doc-PR[d<->d] over out-degree and damping, then pick the setting
//! with the best prec@5 (ties: lower prec@10, then lower MRR).

use clustrank::centrality::ScoreKind;
use clustrank::corpus::{parse_topics, Corpus, ParseOptions};
use clustrank::eval::{run_sweep, Grid};
use clustrank::index::Index;
use clustrank::rerank::{InitialList, QueryContext, RerankSpec, Scorer};
use clustrank::retrieval::initial_run;
use clustrank::synth::{generate, SynthConfig};
use clustrank::Schema;

fn main() -> clustrank::Result<()> {
    let syn = generate(&SynthConfig::default())?;
    let opts = ParseOptions::default();
    let mut corpus = Corpus::new();
    corpus.parse_documents(syn.trec.as_bytes(), &opts)?;
    let index = Index::build(corpus, opts.tokenizer)?;

    let mut contexts = Vec::new();
    for (qid, text) in parse_topics(syn.topics.as_bytes())? {
        let q = index.query(&qid, &text)?.in_vocabulary(index.collection());
        let run = initial_run(&qid, &q, index.docs(), index.collection(), 1000.0, 50, "QL")?;
        let docs = run
            .docnos()
            .map(|d| index.document(d).unwrap().clone())
            .collect();
        let list = InitialList::new(qid, docs, run.entries.iter().map(|e| e.score).collect())?;
        contexts.push(QueryContext::new(list, index.collection(), 2000.0)?);
    }

    let spec = RerankSpec {
        scorer: Scorer::Centrality(ScoreKind::PageRank),
        schema: Schema::DocDoc,
        ..RerankSpec::default()
    };
    let grid = Grid {
        lambdas: vec![0.1, 0.5, 0.85],
        ..Grid::default()
    };
    let result = run_sweep(&mut contexts, &spec, &grid, &syn.qrels())?;
    for (setting, r) in &result.entries {
        println!(
            "{setting:<22} {:.3} {:.3} {:.3}",
            r.mean_prec5, r.mean_prec10, r.mean_mrr
        );
    }
    let (best, r) = result.selected().expect("non-empty grid");
    println!("selected {best}: prec@5 {:.3}", r.mean_prec5);
    Ok(())
}
