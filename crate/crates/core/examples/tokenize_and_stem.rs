//! Text normalization: lowercase, split on non-alphanumerics, optional
//! stopwords, Porter stemming.

use clustrank::corpus::{stem, Tokenizer};

fn main() {
    let text = "Connected relational networks: generalizations of PageRank-style centrality!";
    println!("default     {:?}", Tokenizer::new().tokenize(text));
    println!(
        "no stemming {:?}",
        Tokenizer::new().without_stemming().tokenize(text)
    );
    println!(
        "stopwords   {:?}",
        Tokenizer::new().with_stopwords(["of"]).tokenize(text)
    );

    for w in [
        "caresses",
        "ponies",
        "relational",
        "hopefulness",
        "generalizations",
        "agreed",
    ] {
        println!("{w:>16} -> {}", stem(w));
    }
}
