//! On-disk index: tokenizer settings, term dictionary with collection
//! frequencies, and per-document term vectors.
//!
//! The format is line-oriented UTF-8 text and fully determined by the
//! corpus, so indexing the same input twice gives identical bytes:
//!
//! ```text
//! clustrank-index 1
//! stem 1
//! stopwords <n>
//! <word>                                  (n lines, sorted)
//! terms <V>
//! <term>\t<collection frequency>          (V lines, term id = line order)
//! docs <N>
//! <docno>\t<length>\t<id>:<count> ...     (N lines, doc id = line order)
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpus::{Corpus, Document, Query, Tokenizer};
use crate::error::{Error, Result};
use crate::lm::{CollectionModel, TermId, TermVector};

const MAGIC: &str = "clustrank-index 1";

#[derive(Debug, Clone)]
pub struct Index {
    tokenizer: Tokenizer,
    corpus: Corpus,
    coll: CollectionModel,
    by_docno: HashMap<String, usize>,
}

impl Index {
    /// Index a tokenized corpus. Fails if it has no documents or no terms.
    pub fn build(corpus: Corpus, tokenizer: Tokenizer) -> Result<Self> {
        if corpus.docs.is_empty() {
            return Err(Error::Empty("corpus has no documents".into()));
        }
        let coll = corpus.collection_model()?;
        let mut by_docno = HashMap::with_capacity(corpus.docs.len());
        for (i, d) in corpus.docs.iter().enumerate() {
            if d.docno.contains(|c: char| c.is_whitespace()) {
                return Err(Error::param(
                    "docno",
                    format!("{:?} contains whitespace", d.docno),
                ));
            }
            if by_docno.insert(d.docno.clone(), i).is_some() {
                return Err(Error::param(
                    "docno",
                    format!("duplicate document {}", d.docno),
                ));
            }
        }
        Ok(Index {
            tokenizer,
            corpus,
            coll,
            by_docno,
        })
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn docs(&self) -> &[Document] {
        &self.corpus.docs
    }

    pub fn collection(&self) -> &CollectionModel {
        &self.coll
    }

    pub fn document(&self, docno: &str) -> Option<&Document> {
        self.by_docno.get(docno).map(|&i| &self.corpus.docs[i])
    }

    /// Tokenize a query the way documents were tokenized.
    pub fn query(&self, query_id: &str, text: &str) -> Result<Query> {
        Query::new(query_id, text, &self.corpus.vocab, &self.tokenizer)
    }

    pub fn write_to<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{MAGIC}")?;
        writeln!(out, "stem {}", u8::from(self.tokenizer.stems()))?;
        let stopwords = self.tokenizer.stopwords();
        writeln!(out, "stopwords {}", stopwords.len())?;
        for w in stopwords {
            writeln!(out, "{w}")?;
        }
        let terms = self.corpus.vocab.terms();
        writeln!(out, "terms {}", terms.len())?;
        for (id, t) in terms.iter().enumerate() {
            writeln!(out, "{t}\t{}", self.coll.count(id as TermId))?;
        }
        writeln!(out, "docs {}", self.corpus.docs.len())?;
        for d in &self.corpus.docs {
            write!(out, "{}\t{}\t", d.docno, d.length())?;
            for (i, (t, c)) in d.terms.iter().enumerate() {
                if i > 0 {
                    write!(out, " ")?;
                }
                write!(out, "{t}:{c}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(f).map_err(|e| Error::io(path, e))
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self> {
        let mut lines = Lines {
            inner: BufReader::new(reader).lines(),
            line: 0,
        };
        if lines.next_line()? != MAGIC {
            return Err(lines.error("not a clustrank index"));
        }
        let stem = match lines.header("stem")? {
            0 => false,
            1 => true,
            _ => return Err(lines.error("stem flag must be 0 or 1")),
        };
        let n_stop = lines.header("stopwords")?;
        let mut stopwords = Vec::with_capacity(n_stop);
        for _ in 0..n_stop {
            stopwords.push(lines.next_line()?);
        }
        let mut tokenizer = Tokenizer::new().with_stopwords(stopwords);
        if !stem {
            tokenizer = tokenizer.without_stemming();
        }

        let mut corpus = Corpus::new();
        let n_terms = lines.header("terms")?;
        let mut cf = Vec::with_capacity(n_terms);
        for id in 0..n_terms {
            let line = lines.next_line()?;
            let (term, count) = line
                .split_once('\t')
                .ok_or_else(|| lines.error("expected term<TAB>count"))?;
            let count: u64 = count
                .parse()
                .map_err(|_| lines.error("bad collection frequency"))?;
            if corpus.vocab.intern(term) as usize != id {
                return Err(lines.error("duplicate term"));
            }
            cf.push(count);
        }

        let n_docs = lines.header("docs")?;
        let mut seen = vec![0u64; n_terms];
        for doc_id in 0..n_docs {
            let line = lines.next_line()?;
            let mut fields = line.splitn(3, '\t');
            let (Some(docno), Some(len), Some(entries)) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(lines.error("expected docno<TAB>length<TAB>terms"));
            };
            let len: u64 = len
                .parse()
                .map_err(|_| lines.error("bad document length"))?;
            let mut counts = Vec::new();
            for e in entries.split_whitespace() {
                let parsed = e
                    .split_once(':')
                    .and_then(|(t, c)| Some((t.parse::<TermId>().ok()?, c.parse::<u32>().ok()?)));
                let (t, c) = parsed.ok_or_else(|| lines.error("bad term entry"))?;
                if t as usize >= n_terms || c == 0 {
                    return Err(lines.error("term entry out of range"));
                }
                seen[t as usize] += u64::from(c);
                counts.push((t, c));
            }
            let terms = TermVector::from_counts(counts);
            if terms.total() != len {
                return Err(lines.error("document length does not match its terms"));
            }
            corpus.docs.push(Document {
                doc_id: doc_id as u32,
                docno: docno.to_string(),
                terms,
            });
        }
        if seen != cf {
            return Err(Error::Parse {
                what: "index",
                line: lines.line,
                message: "collection frequencies do not match the documents".into(),
            });
        }
        Index::build(corpus, tokenizer)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(f).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            what: "index",
            line: self.line,
            message: message.to_string(),
        }
    }

    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(Error::io("<index>", e)),
            None => Err(self.error("unexpected end of index")),
        }
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let line = self.next_line()?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| self.error(&format!("expected \"{name} <count>\"")))
    }
}
