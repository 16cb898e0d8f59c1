//! Seeded synthetic test collections in TREC formats.
//!
//! Each document is drawn from one latent topic: a fraction of its tokens
//! come from that topic's word list, the rest from a Zipfian background.
//! A query is a handful of its topic's words, and a document is relevant
//! when it shares the query's topic and its topical fraction is high.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Qrels;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub docs: usize,
    pub topics: usize,
    pub queries: usize,
    pub words_per_topic: usize,
    pub background_words: usize,
    pub mean_doc_len: usize,
    pub query_len: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            docs: 200,
            topics: 8,
            queries: 8,
            words_per_topic: 25,
            background_words: 400,
            mean_doc_len: 60,
            query_len: 3,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCollection {
    /// Documents as `<DOC>` records.
    pub trec: String,
    /// `query_id<TAB>text` lines.
    pub topics: String,
    /// `qid 0 docno rel` lines.
    pub qrels_text: String,
}

impl SyntheticCollection {
    pub fn qrels(&self) -> Qrels {
        crate::corpus::parse_qrels(self.qrels_text.as_bytes()).expect("generated qrels parse")
    }

    /// Write `corpus.trec`, `topics.tsv` and `qrels.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<SynthPaths> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let paths = SynthPaths {
            corpus: dir.join("corpus.trec"),
            topics: dir.join("topics.tsv"),
            qrels: dir.join("qrels.txt"),
        };
        for (path, text) in [
            (&paths.corpus, &self.trec),
            (&paths.topics, &self.topics),
            (&paths.qrels, &self.qrels_text),
        ] {
            fs::write(path, text).map_err(|e| Error::io(path, e))?;
        }
        Ok(paths)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthPaths {
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub qrels: PathBuf,
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Pronounceable three-syllable word number `i`.
fn word(mut i: usize) -> String {
    let syllables = CONSONANTS.len() * VOWELS.len();
    let mut w = String::with_capacity(6);
    for _ in 0..3 {
        let s = i % syllables;
        i /= syllables;
        w.push(CONSONANTS[s / VOWELS.len()] as char);
        w.push(VOWELS[s % VOWELS.len()] as char);
    }
    w
}

pub fn generate(cfg: &SynthConfig) -> Result<SyntheticCollection> {
    if cfg.docs == 0 || cfg.topics == 0 || cfg.words_per_topic == 0 || cfg.background_words == 0 {
        return Err(Error::param("synth", "counts must be positive"));
    }
    if cfg.query_len == 0 || cfg.query_len > cfg.words_per_topic || cfg.mean_doc_len < 2 {
        return Err(Error::param(
            "synth",
            "query or document length out of range",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let topic_words: Vec<Vec<String>> = (0..cfg.topics)
        .map(|t| {
            (0..cfg.words_per_topic)
                .map(|j| word(t * cfg.words_per_topic + j))
                .collect()
        })
        .collect();
    let offset = cfg.topics * cfg.words_per_topic;
    let background: Vec<String> = (0..cfg.background_words)
        .map(|j| word(offset + j))
        .collect();
    let zipf = WeightedIndex::new((1..=cfg.background_words).map(|r| 1.0 / r as f64))
        .expect("positive weights");
    let topical = WeightedIndex::new((1..=cfg.words_per_topic).map(|r| 1.0 / (r as f64).sqrt()))
        .expect("positive weights");

    let mut trec = String::new();
    let mut doc_topics = Vec::with_capacity(cfg.docs);
    for d in 0..cfg.docs {
        let topic = rng.random_range(0..cfg.topics);
        let focus: f64 = rng.random_range(0.1..0.6);
        let len = rng
            .random_range(cfg.mean_doc_len / 2..=cfg.mean_doc_len * 3 / 2)
            .max(1);
        let mut text = String::new();
        for i in 0..len {
            if i > 0 {
                text.push(if i % 12 == 0 { '\n' } else { ' ' });
            }
            let w = if rng.random::<f64>() < focus {
                &topic_words[topic][topical.sample(&mut rng)]
            } else {
                &background[zipf.sample(&mut rng)]
            };
            text.push_str(w);
        }
        writeln!(
            trec,
            "<DOC>\n<DOCNO> SYN-{d:05} </DOCNO>\n<TEXT>\n{text}\n</TEXT>\n</DOC>"
        )
        .expect("string write");
        doc_topics.push((topic, focus));
    }

    let mut topics = String::new();
    let mut qrels_text = String::new();
    for q in 0..cfg.queries {
        let topic = q % cfg.topics;
        let qid = 100 + q;
        let mut picked: Vec<usize> = Vec::new();
        while picked.len() < cfg.query_len {
            let w = topical.sample(&mut rng);
            if !picked.contains(&w) {
                picked.push(w);
            }
        }
        let text: Vec<&str> = picked
            .iter()
            .map(|&w| topic_words[topic][w].as_str())
            .collect();
        writeln!(topics, "{qid}\t{}", text.join(" ")).expect("string write");
        for (d, &(t, focus)) in doc_topics.iter().enumerate() {
            let rel = u8::from(t == topic && focus > 0.3);
            writeln!(qrels_text, "{qid} 0 SYN-{d:05} {rel}").expect("string write");
        }
    }
    Ok(SyntheticCollection {
        trec,
        topics,
        qrels_text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_topics, Corpus, ParseOptions};

    #[test]
    fn words_are_distinct() {
        let mut words: Vec<String> = (0..2000).map(word).collect();
        words.sort();
        words.dedup();
        assert_eq!(words.len(), 2000);
    }

    #[test]
    fn seeded_and_parseable() {
        let cfg = SynthConfig {
            docs: 30,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.trec, b.trec);
        assert_eq!(a.qrels_text, b.qrels_text);
        let other = generate(&SynthConfig {
            seed: 8,
            ..cfg.clone()
        })
        .unwrap();
        assert_ne!(a.trec, other.trec);

        let mut corpus = Corpus::new();
        assert_eq!(
            corpus
                .parse_documents(a.trec.as_bytes(), &ParseOptions::default())
                .unwrap(),
            30
        );
        let topics = parse_topics(a.topics.as_bytes()).unwrap();
        assert_eq!(topics.len(), cfg.queries);
        assert_eq!(topics[0].1.split(' ').count(), cfg.query_len);
        let qrels = a.qrels();
        assert!(qrels.query_ids().count() == cfg.queries);
    }
}
