//! Overlapping nearest-neighbor clusters: every document anchors a cluster
//! holding itself and its k-1 strongest relevance-flow neighbors.

use clustrank::cluster::{build_nn_clusters, neighborhood, EntityId};
use clustrank::corpus::{Corpus, Tokenizer};

fn main() -> clustrank::Result<()> {
    let tok = Tokenizer::new();
    let mut corpus = Corpus::new();
    let texts = [
        "river bank flooding after heavy rain",
        "bank interest rates rise again",
        "central bank raises interest rates",
        "heavy rain floods the river valley",
        "flooding closes river roads",
        "rates of interest and the central bank",
    ];
    for (i, t) in texts.iter().enumerate() {
        corpus.push(format!("D{i}"), t, &tok);
    }
    let coll = corpus.collection_model()?;
    let mu = 2000.0;

    let x = &corpus.docs[0];
    let others: Vec<(EntityId, _)> = corpus.docs[1..]
        .iter()
        .map(|d| (EntityId::Doc(d.doc_id), &d.terms))
        .collect();
    println!("top-3 neighborhood of {}:", x.docno);
    for (id, flow) in neighborhood(&x.terms, &others, 3, mu, &coll) {
        println!("  {id}  {flow:.5}");
    }

    for c in build_nn_clusters(&corpus.docs, 3, mu, &coll)? {
        let members: Vec<&str> = c
            .positions
            .iter()
            .map(|&p| corpus.docs[p].docno.as_str())
            .collect();
        println!(
            "cluster {} (anchor D{}): {:?}",
            c.entity(),
            c.anchor,
            members
        );
    }
    Ok(())
}
