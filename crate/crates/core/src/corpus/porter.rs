//! The original (1980) Porter suffix-stripping stemmer.
//!
//! Follows the published rule set, not the later "Porter2"/Snowball English
//! stemmer and not the revised C release (no `BLI -> BLE` or `LOGI -> LOG`).
//! Like the reference implementation, words of one or two letters are
//! returned untouched.
//!
//! Input is expected to be lowercase ASCII; anything else is returned as is.

/// Stem a single lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() <= 2
        || !word
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
    {
        return word.to_string();
    }
    let mut w = Word {
        b: word.as_bytes().to_vec(),
    };
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    // only ASCII bytes were ever written
    String::from_utf8(w.b).expect("ascii")
}

type Condition = fn(&Word, usize) -> bool;

struct Word {
    b: Vec<u8>,
}

impl Word {
    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Measure `m` of the prefix `b[..end]`: the number of VC sequences in
    /// `[C](VC)^m[V]`.
    fn measure(&self, end: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        while i < end && self.is_consonant(i) {
            i += 1;
        }
        loop {
            while i < end && !self.is_consonant(i) {
                i += 1;
            }
            if i >= end {
                return m;
            }
            while i < end && self.is_consonant(i) {
                i += 1;
            }
            m += 1;
        }
    }

    fn has_vowel(&self, end: usize) -> bool {
        (0..end).any(|i| !self.is_consonant(i))
    }

    fn ends_double_consonant(&self, end: usize) -> bool {
        end >= 2 && self.b[end - 1] == self.b[end - 2] && self.is_consonant(end - 1)
    }

    /// `*o`: prefix ends consonant-vowel-consonant, final consonant not w, x or y.
    fn ends_cvc(&self, end: usize) -> bool {
        end >= 3
            && self.is_consonant(end - 3)
            && !self.is_consonant(end - 2)
            && self.is_consonant(end - 1)
            && !matches!(self.b[end - 1], b'w' | b'x' | b'y')
    }

    fn ends_with(&self, suffix: &str) -> bool {
        self.b.ends_with(suffix.as_bytes())
    }

    fn replace_suffix(&mut self, suffix_len: usize, with: &str) {
        let keep = self.b.len() - suffix_len;
        self.b.truncate(keep);
        self.b.extend_from_slice(with.as_bytes());
    }

    /// Applies the first rule whose suffix matches (rules are ordered so that
    /// the first match is the longest). Returns whether the rule fired.
    fn apply_rules(&mut self, rules: &[(&str, &str, Condition)]) -> bool {
        for &(suffix, replacement, cond) in rules {
            if self.ends_with(suffix) {
                let stem_len = self.b.len() - suffix.len();
                if cond(self, stem_len) {
                    self.replace_suffix(suffix.len(), replacement);
                    return true;
                }
                return false;
            }
        }
        false
    }

    fn step1a(&mut self) {
        let always: Condition = |_, _| true;
        self.apply_rules(&[
            ("sses", "ss", always),
            ("ies", "i", always),
            ("ss", "ss", always),
            ("s", "", always),
        ]);
    }

    fn step1b(&mut self) {
        if self.ends_with("eed") {
            if self.measure(self.b.len() - 3) > 0 {
                self.b.pop();
            }
            return;
        }
        let suffix_len = if self.ends_with("ed") {
            2
        } else if self.ends_with("ing") {
            3
        } else {
            return;
        };
        let stem_len = self.b.len() - suffix_len;
        if !self.has_vowel(stem_len) {
            return;
        }
        self.b.truncate(stem_len);

        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.b.push(b'e');
        } else if self.ends_double_consonant(self.b.len()) {
            if !matches!(self.b[self.b.len() - 1], b'l' | b's' | b'z') {
                self.b.pop();
            }
        } else if self.measure(self.b.len()) == 1 && self.ends_cvc(self.b.len()) {
            self.b.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with("y") && self.has_vowel(self.b.len() - 1) {
            let last = self.b.len() - 1;
            self.b[last] = b'i';
        }
    }

    fn step2(&mut self) {
        let m0: Condition = |w, end| w.measure(end) > 0;
        self.apply_rules(&[
            ("ational", "ate", m0),
            ("tional", "tion", m0),
            ("enci", "ence", m0),
            ("anci", "ance", m0),
            ("izer", "ize", m0),
            ("abli", "able", m0),
            ("alli", "al", m0),
            ("entli", "ent", m0),
            ("eli", "e", m0),
            ("ousli", "ous", m0),
            ("ization", "ize", m0),
            ("ation", "ate", m0),
            ("ator", "ate", m0),
            ("alism", "al", m0),
            ("iveness", "ive", m0),
            ("fulness", "ful", m0),
            ("ousness", "ous", m0),
            ("aliti", "al", m0),
            ("iviti", "ive", m0),
            ("biliti", "ble", m0),
        ]);
    }

    fn step3(&mut self) {
        let m0: Condition = |w, end| w.measure(end) > 0;
        self.apply_rules(&[
            ("icate", "ic", m0),
            ("ative", "", m0),
            ("alize", "al", m0),
            ("iciti", "ic", m0),
            ("ical", "ic", m0),
            ("ful", "", m0),
            ("ness", "", m0),
        ]);
    }

    fn step4(&mut self) {
        let m1: Condition = |w, end| w.measure(end) > 1;
        let ion: Condition =
            |w, end| w.measure(end) > 1 && end >= 1 && matches!(w.b[end - 1], b's' | b't');
        self.apply_rules(&[
            ("al", "", m1),
            ("ance", "", m1),
            ("ence", "", m1),
            ("er", "", m1),
            ("ic", "", m1),
            ("able", "", m1),
            ("ible", "", m1),
            ("ant", "", m1),
            ("ement", "", m1),
            ("ment", "", m1),
            ("ent", "", m1),
            ("ion", "", ion),
            ("ou", "", m1),
            ("ism", "", m1),
            ("ate", "", m1),
            ("iti", "", m1),
            ("ous", "", m1),
            ("ive", "", m1),
            ("ize", "", m1),
        ]);
    }

    fn step5a(&mut self) {
        if self.ends_with("e") {
            let stem_len = self.b.len() - 1;
            let m = self.measure(stem_len);
            if m > 1 || (m == 1 && !self.ends_cvc(stem_len)) {
                self.b.pop();
            }
        }
    }

    fn step5b(&mut self) {
        let len = self.b.len();
        if self.measure(len) > 1 && self.ends_double_consonant(len) && self.b[len - 1] == b'l' {
            self.b.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn classic_examples() {
        let cases = [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("ties", "ti"),
            ("caress", "caress"),
            ("cats", "cat"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("plastered", "plaster"),
            ("bled", "bled"),
            ("motoring", "motor"),
            ("sing", "sing"),
            ("conflated", "conflat"),
            ("troubled", "troubl"),
            ("sized", "size"),
            ("hopping", "hop"),
            ("tanned", "tan"),
            ("falling", "fall"),
            ("hissing", "hiss"),
            ("fizzed", "fizz"),
            ("failing", "fail"),
            ("filing", "file"),
            ("happy", "happi"),
            ("sky", "sky"),
            ("relational", "relat"),
            ("conditional", "condit"),
            ("rational", "ration"),
            ("valenci", "valenc"),
            ("digitizer", "digit"),
            ("triplicate", "triplic"),
            ("formative", "form"),
            ("revival", "reviv"),
            ("adoption", "adopt"),
            ("controll", "control"),
            ("roll", "roll"),
            ("generalization", "gener"),
            ("running", "run"),
            ("runs", "run"),
        ];
        for (word, expected) in cases {
            assert_eq!(stem(word), expected, "stem({word})");
        }
    }

    #[test]
    fn short_and_non_ascii_words_untouched() {
        assert_eq!(stem("is"), "is");
        assert_eq!(stem("a"), "a");
        assert_eq!(stem(""), "");
        assert_eq!(stem("café"), "café");
    }

    #[test]
    fn published_rule_set_not_revised() {
        // the revised release maps these; the 1980 rules do not
        assert_eq!(stem("abli"), "abli");
        assert_eq!(stem("analogi"), "analogi");
        assert_eq!(stem("probabiliti"), "probabl");
    }
}
