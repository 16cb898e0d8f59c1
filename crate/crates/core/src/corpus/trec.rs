//! TREC qrels and run files.

use std::collections::{HashMap, HashSet};
use std::io::{self, Read, Write};

use crate::error::{Error, Result};

/// Relevance judgments. Unjudged (query, docno) pairs have grade 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    grades: HashMap<String, HashMap<String, i32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, docno: &str, grade: i32) {
        self.grades
            .entry(query_id.to_string())
            .or_default()
            .insert(docno.to_string(), grade);
    }

    pub fn grade(&self, query_id: &str, docno: &str) -> i32 {
        self.grades
            .get(query_id)
            .and_then(|q| q.get(docno))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_relevant(&self, query_id: &str, docno: &str) -> bool {
        self.grade(query_id, docno) > 0
    }

    pub fn relevant_count(&self, query_id: &str) -> usize {
        self.grades
            .get(query_id)
            .map_or(0, |q| q.values().filter(|&&g| g > 0).count())
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.grades.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub docno: String,
    pub score: f64,
}

/// One query's ranked list; entry `i` is at rank `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedRun {
    pub query_id: String,
    pub run_tag: String,
    pub entries: Vec<RunEntry>,
}

impl RankedRun {
    pub fn new(query_id: impl Into<String>, run_tag: impl Into<String>) -> Self {
        RankedRun {
            query_id: query_id.into(),
            run_tag: run_tag.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, docno: impl Into<String>, score: f64) {
        self.entries.push(RunEntry {
            docno: docno.into(),
            score,
        });
    }

    pub fn docnos(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.docno.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn read_all<R: Read>(mut reader: R, what: &'static str) -> Result<String> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::io(format!("<{what}>"), e))?;
    Ok(text)
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    what: &'static str,
    line: usize,
    name: &str,
) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        what,
        line,
        message: format!("non-numeric {name} {field:?}"),
    })
}

/// Qrels lines: `qid iter docno rel`.
pub fn parse_qrels<R: Read>(reader: R) -> Result<Qrels> {
    let text = read_all(reader, "qrels")?;
    let mut qrels = Qrels::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 4 {
            return Err(Error::Parse {
                what: "qrels",
                line: i + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let grade: i32 = parse_field(fields[3], "qrels", i + 1, "relevance")?;
        qrels.insert(fields[0], fields[2], grade);
    }
    Ok(qrels)
}

/// Run lines: `qid Q0 docno rank score tag`. Queries come back in order of
/// first appearance, each sorted by rank.
pub fn parse_run<R: Read>(reader: R) -> Result<Vec<RankedRun>> {
    let text = read_all(reader, "run")?;
    let mut order: Vec<String> = Vec::new();
    // query id -> (run tag, (rank, line, entry))
    type Pending = (String, Vec<(u64, usize, RunEntry)>);
    let mut rows: HashMap<String, Pending> = HashMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 6 {
            return Err(Error::Parse {
                what: "run",
                line: i + 1,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let rank: u64 = parse_field(fields[3], "run", i + 1, "rank")?;
        let score: f64 = parse_field(fields[4], "run", i + 1, "score")?;
        let (qid, docno) = (fields[0], fields[2]);
        if !seen.insert((qid.to_string(), docno.to_string())) {
            return Err(Error::Parse {
                what: "run",
                line: i + 1,
                message: format!("duplicate document {docno} for query {qid}"),
            });
        }
        let slot = rows.entry(qid.to_string()).or_insert_with(|| {
            order.push(qid.to_string());
            (fields[5].to_string(), Vec::new())
        });
        slot.1.push((
            rank,
            i,
            RunEntry {
                docno: docno.to_string(),
                score,
            },
        ));
    }
    Ok(order
        .into_iter()
        .map(|qid| {
            let (tag, mut entries) = rows.remove(&qid).expect("recorded query");
            entries.sort_by_key(|&(rank, line, _)| (rank, line));
            RankedRun {
                query_id: qid,
                run_tag: tag,
                entries: entries.into_iter().map(|(_, _, e)| e).collect(),
            }
        })
        .collect())
}

/// Write runs in TREC format, ranks from 1, scores with six significant digits.
pub fn write_run<W: Write>(runs: &[RankedRun], mut out: W) -> io::Result<()> {
    for run in runs {
        for (i, e) in run.entries.iter().enumerate() {
            writeln!(
                out,
                "{} Q0 {} {} {} {}",
                run.query_id,
                e.docno,
                i + 1,
                format_score(e.score),
                run.run_tag
            )?;
        }
    }
    Ok(())
}

/// Six-significant-digit formatting in the style of C's `%g`.
pub fn format_score(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // exponent after rounding to 6 significant digits
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
