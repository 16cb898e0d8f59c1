//! Dirichlet-smoothed language models and relevance flow,
//! rflow(x, y) = exp(-KL(MLE of x || smoothed y)).

use clustrank::corpus::{Corpus, Tokenizer};
use clustrank::lm::{dirichlet_prob, query_log_likelihood, rflow, TermVector};

fn main() -> clustrank::Result<()> {
    let tok = Tokenizer::new().without_stemming();
    let mut corpus = Corpus::new();
    for (no, text) in [("d1", "a a b"), ("d2", "a b b"), ("d3", "c c c")] {
        corpus.push(no.into(), text, &tok);
    }
    let coll = corpus.collection_model()?;
    let mu = 3.0;
    let a = corpus.vocab.get("a").unwrap();

    for d in &corpus.docs {
        println!(
            "p(a | {}) = {:.4}",
            d.docno,
            dirichlet_prob(&d.terms, a, mu, &coll)
        );
    }
    println!();
    print!("{:>6}", "");
    for y in &corpus.docs {
        print!("{:>10}", y.docno);
    }
    println!();
    for x in &corpus.docs {
        print!("{:>6}", x.docno);
        for y in &corpus.docs {
            print!("{:>10.5}", rflow(&x.terms, &y.terms, mu, &coll));
        }
        println!();
    }

    let q = TermVector::from_counts(vec![(a, 1)]);
    for d in &corpus.docs {
        println!(
            "log p(q=\"a\" | {}) = {:.4}",
            d.docno,
            query_log_likelihood(&q, &d.terms, mu, &coll)
        );
    }
    Ok(())
}
