//! Write a seeded synthetic collection in TREC formats, then index it, rank
//! it and re-rank it the way the `clustrank` binary does.
//!
//!     cargo run --example trec_files -- /tmp/syn
//!     clustrank index --corpus /tmp/syn/corpus.trec --out /tmp/syn/index.txt
//!     clustrank rank --index /tmp/syn/index.txt --topics /tmp/syn/topics.tsv --out /tmp/syn/init.run

use std::path::PathBuf;

use clustrank::corpus::{parse_topics, write_run, Corpus, ParseOptions};
use clustrank::eval::MetricReport;
use clustrank::index::Index;
use clustrank::rerank::{InitialList, QueryContext, RerankSpec};
use clustrank::retrieval::initial_run;
use clustrank::synth::{generate, SynthConfig};

fn main() -> clustrank::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("clustrank-synth"));
    let coll = generate(&SynthConfig::default())?;
    let paths = coll.write_to(&dir)?;
    println!("corpus  {}", paths.corpus.display());
    println!("topics  {}", paths.topics.display());
    println!("qrels   {}", paths.qrels.display());

    let opts = ParseOptions::default();
    let index = Index::build(Corpus::load_path(&paths.corpus, &opts)?, opts.tokenizer)?;
    index.save(&dir.join("index.txt"))?;

    let topics =
        parse_topics(
            std::fs::File::open(&paths.topics).map_err(|e| clustrank::Error::Io {
                path: paths.topics.clone(),
                source: e,
            })?,
        )?;
    let qrels = coll.qrels();
    let mut initial = Vec::new();
    let mut reranked = Vec::new();
    for (qid, text) in &topics {
        let q = index.query(qid, text)?.in_vocabulary(index.collection());
        let run = initial_run(
            qid,
            &q,
            index.docs(),
            index.collection(),
            1000.0,
            1000,
            "QL",
        )?;
        let top: Vec<_> = run.entries.iter().take(50).collect();
        let docs = top
            .iter()
            .map(|e| index.document(&e.docno).unwrap().clone())
            .collect();
        let list = InitialList::new(qid.clone(), docs, top.iter().map(|e| e.score).collect())?;
        let mut ctx = QueryContext::new(list.clone(), index.collection(), 2000.0)?;
        reranked.push(ctx.rerank(&RerankSpec::default())?.run);
        initial.push(list.as_run("init"));
    }
    let mut out = std::fs::File::create(dir.join("doc-auth-cd.run")).expect("writable dir");
    write_run(&reranked, &mut out).expect("write run");

    for (name, runs) in [("init", &initial), ("doc-Auth[c->d]", &reranked)] {
        let r = MetricReport::evaluate(runs, &qrels);
        println!(
            "{name:<16} prec@5 {:.3}  prec@10 {:.3}  MRR {:.3}",
            r.mean_prec5, r.mean_prec10, r.mean_mrr
        );
    }
    Ok(())
}
