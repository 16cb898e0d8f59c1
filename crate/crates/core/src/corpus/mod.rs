//! Corpus ingestion: TREC SGML documents, topics, vocabulary and term ids.

mod porter;
mod tokenize;
pub mod trec;

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

pub use porter::stem;
pub use tokenize::{tokenize, Tokenizer};
pub use trec::{parse_qrels, parse_run, write_run, Qrels, RankedRun, RunEntry};

use crate::error::{Error, Result};
use crate::lm::{CollectionModel, TermId, TermVector};

/// Term string <-> id map. Ids are dense and assigned in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, TermId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, term: &str) -> TermId {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("vocabulary exceeds u32 ids");
        self.terms.push(term.to_string());
        self.ids.insert(term.to_string(), id);
        id
    }

    pub fn get(&self, term: &str) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    /// Corpus-wide id, assigned in corpus order starting at 0.
    pub doc_id: u32,
    pub docno: String,
    pub terms: TermVector,
}

impl Document {
    pub fn length(&self) -> u64 {
        self.terms.total()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub query_id: String,
    /// Term counts. Terms unknown to the vocabulary get ids past its end, so
    /// they have zero collection probability.
    pub terms: TermVector,
    pub oov_terms: Vec<String>,
}

impl Query {
    pub fn new(
        query_id: &str,
        text: &str,
        vocab: &Vocabulary,
        tokenizer: &Tokenizer,
    ) -> Result<Self> {
        let tokens = tokenizer.tokenize(text);
        if tokens.is_empty() {
            return Err(Error::Empty(format!(
                "query {query_id} has no terms after tokenization"
            )));
        }
        let mut oov_terms: Vec<String> = Vec::new();
        let ids: Vec<TermId> = tokens
            .iter()
            .map(|tok| match vocab.get(tok) {
                Some(id) => id,
                None => {
                    let pos = oov_terms.iter().position(|t| t == tok).unwrap_or_else(|| {
                        oov_terms.push(tok.clone());
                        oov_terms.len() - 1
                    });
                    (vocab.len() + pos) as TermId
                }
            })
            .collect();
        Ok(Query {
            query_id: query_id.to_string(),
            terms: TermVector::from_term_ids(ids),
            oov_terms,
        })
    }

    /// The query restricted to terms present in `coll`.
    pub fn in_vocabulary(&self, coll: &CollectionModel) -> TermVector {
        TermVector::from_counts(self.terms.iter().filter(|&(t, _)| coll.contains(t)))
    }
}

/// Options for reading TREC SGML records.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub tokenizer: Tokenizer,
    /// Also index `<HEAD>` and `<HL>` blocks.
    pub include_headlines: bool,
}

/// One `<DOC>` record before tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrecRecord {
    pub offset: usize,
    pub docno: String,
    pub text: String,
}

/// A tokenized document collection.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub vocab: Vocabulary,
    pub docs: Vec<Document>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse every `<DOC>` record in `reader`, appending documents in stream order.
    pub fn parse_documents<R: Read>(
        &mut self,
        mut reader: R,
        opts: &ParseOptions,
    ) -> Result<usize> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::io("<stream>", e))?;
        let records = parse_trec_records(&text, opts.include_headlines)?;
        let added = records.len();
        for rec in records {
            self.push(rec.docno, &rec.text, &opts.tokenizer);
        }
        Ok(added)
    }

    /// Read a single file, or every regular file of a directory tree in
    /// lexicographic path order.
    pub fn load_path(path: &Path, opts: &ParseOptions) -> Result<Self> {
        let mut corpus = Corpus::new();
        for file in corpus_files(path)? {
            let f = fs::File::open(&file).map_err(|e| Error::io(&file, e))?;
            corpus
                .parse_documents(std::io::BufReader::new(f), opts)
                .map_err(|e| match e {
                    Error::Io { source, .. } => Error::io(&file, source),
                    other => other,
                })?;
        }
        Ok(corpus)
    }

    pub fn push(&mut self, docno: String, text: &str, tokenizer: &Tokenizer) -> &Document {
        let doc_id = u32::try_from(self.docs.len()).expect("too many documents");
        let ids: Vec<TermId> = tokenizer
            .tokenize(text)
            .iter()
            .map(|t| self.vocab.intern(t))
            .collect();
        self.docs.push(Document {
            doc_id,
            docno,
            terms: TermVector::from_term_ids(ids),
        });
        self.docs.last().expect("just pushed")
    }

    pub fn collection_model(&self) -> Result<CollectionModel> {
        CollectionModel::from_term_vectors(self.docs.iter().map(|d| &d.terms))
    }
}

fn corpus_files(path: &Path) -> Result<Vec<PathBuf>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    let mut pending = vec![path.to_path_buf()];
    while let Some(dir) = pending.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))? {
            let entry = entry.map_err(|e| Error::io(&dir, e))?;
            let p = entry.path();
            if p.is_dir() {
                pending.push(p);
            } else {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Split TREC SGML into records. The DOCNO is whitespace-trimmed and all
/// `<TEXT>` blocks (plus `<HEAD>`/`<HL>` when requested) are joined by newlines.
pub fn parse_trec_records(text: &str, include_headlines: bool) -> Result<Vec<TrecRecord>> {
    let malformed = |offset: usize, message: &str| Error::MalformedRecord {
        what: "document",
        offset,
        message: message.to_string(),
    };
    let mut records = Vec::new();
    let mut pos = 0;
    while let Some(rel) = text[pos..].find("<DOC>") {
        let start = pos + rel;
        let body_start = start + "<DOC>".len();
        let body_len = text[body_start..]
            .find("</DOC>")
            .ok_or_else(|| malformed(start, "missing </DOC>"))?;
        let body = &text[body_start..body_start + body_len];
        if let Some(nested) = body.find("<DOC>") {
            return Err(malformed(body_start + nested, "nested <DOC> before </DOC>"));
        }

        let docno = tag_blocks(body, "DOCNO")
            .next()
            .ok_or_else(|| malformed(start, "missing <DOCNO>"))?
            .map_err(|_| malformed(start, "unterminated <DOCNO>"))?
            .trim()
            .to_string();
        if docno.is_empty() {
            return Err(malformed(start, "empty <DOCNO>"));
        }

        let mut parts: Vec<&str> = Vec::new();
        let mut tags = vec!["TEXT"];
        if include_headlines {
            tags.extend(["HEAD", "HL"]);
        }
        for tag in tags {
            for block in tag_blocks(body, tag) {
                let block =
                    block.map_err(|_| malformed(start, &format!("unterminated <{tag}>")))?;
                parts.push(block);
            }
        }
        records.push(TrecRecord {
            offset: start,
            docno,
            text: parts.join("\n"),
        });
        pos = body_start + body_len + "</DOC>".len();
    }
    Ok(records)
}

/// Contents of every `<TAG>...</TAG>` block, in order. Yields `Err(())` for an
/// opening tag without a close.
fn tag_blocks<'a>(
    body: &'a str,
    tag: &str,
) -> impl Iterator<Item = std::result::Result<&'a str, ()>> + 'a {
    let open = format!("<{tag}>");
    let close = format!("</{tag}>");
    let mut pos = 0;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let rel = body[pos..].find(&open)?;
        let start = pos + rel + open.len();
        match body[start..].find(&close) {
            Some(len) => {
                pos = start + len + close.len();
                Some(Ok(&body[start..start + len]))
            }
            None => {
                done = true;
                Some(Err(()))
            }
        }
    })
}

/// Topic file: one `query_id<TAB>title text` per line; blank lines ignored.
pub fn parse_topics<R: Read>(mut reader: R) -> Result<Vec<(String, String)>> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<topics>", e))?;
    let mut topics = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, title) = line.split_once('\t').ok_or_else(|| Error::Parse {
            what: "topics",
            line: i + 1,
            message: "expected query_id<TAB>title".into(),
        })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::Parse {
                what: "topics",
                line: i + 1,
                message: "empty query id".into(),
            });
        }
        topics.push((id.to_string(), title.to_string()));
    }
    Ok(topics)
}
