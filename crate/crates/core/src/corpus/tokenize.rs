use std::collections::HashSet;

use super::porter;

/// Text normalization applied to documents and queries alike.
///
/// Lowercases, splits on every non-alphanumeric character, optionally drops
/// stopwords (matched before stemming) and applies the Porter stemmer.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stem: bool,
    stopwords: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer {
            stem: true,
            stopwords: HashSet::new(),
        }
    }
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn without_stemming(mut self) -> Self {
        self.stem = false;
        self
    }

    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .collect();
        self
    }

    pub fn stems(&self) -> bool {
        self.stem
    }

    /// Stopwords in sorted order.
    pub fn stopwords(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.stopwords.iter().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn tokenize(&self, raw: &str) -> Vec<String> {
        raw.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| if self.stem { porter::stem(&t) } else { t })
            .collect()
    }
}

/// Tokenize with the default pipeline (no stopwords, Porter stemming).
pub fn tokenize(raw: &str) -> Vec<String> {
    Tokenizer::default().tokenize(raw)
}
