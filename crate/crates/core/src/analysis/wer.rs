use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{AtdsError, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WerResult {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_words: usize,
    pub wer: f64,
}

impl WerResult {
    pub fn errors(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }

    fn from_counts(substitutions: usize, insertions: usize, deletions: usize, ref_words: usize) -> Self {
        Self {
            substitutions,
            insertions,
            deletions,
            ref_words,
            wer: (substitutions + insertions + deletions) as f64 / ref_words as f64,
        }
    }
}

/// Text normalization applied before splitting on whitespace. Off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WerOptions {
    pub lowercase: bool,
    pub strip_punctuation: bool,
}

pub fn tokenize_words(text: &str, opts: WerOptions) -> Vec<String> {
    let mut t = if opts.lowercase { text.to_lowercase() } else { text.to_string() };
    if opts.strip_punctuation {
        t = t.chars().filter(|c| !c.is_ascii_punctuation() && !is_unicode_punct(*c)).collect();
    }
    t.split_whitespace().map(str::to_string).collect()
}

fn is_unicode_punct(c: char) -> bool {
    matches!(c, '\u{2010}'..='\u{2027}' | '\u{3000}'..='\u{303F}' | '\u{00A1}' | '\u{00BF}' | '\u{00AB}' | '\u{00BB}' | '\u{0964}' | '\u{0965}')
}

/// Word error rate from a unit-cost Levenshtein alignment. When several
/// alignments are optimal the backtrace prefers substitution, then
/// insertion, then deletion.
pub fn wer<S: AsRef<str>>(reference: &[S], hypothesis: &[S]) -> Result<WerResult> {
    if reference.is_empty() {
        return Err(AtdsError::EmptyInput("reference transcript"));
    }
    let n = reference.len();
    let m = hypothesis.len();
    let w = m + 1;
    let mut d = vec![0usize; (n + 1) * w];
    for (j, cell) in d[..w].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        d[i * w] = i;
        for j in 1..=m {
            let sub = d[(i - 1) * w + j - 1] + usize::from(reference[i - 1].as_ref() != hypothesis[j - 1].as_ref());
            let ins = d[i * w + j - 1] + 1;
            let del = d[(i - 1) * w + j] + 1;
            d[i * w + j] = sub.min(ins).min(del);
        }
    }

    let (mut s, mut ins, mut del) = (0, 0, 0);
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let mismatch = usize::from(reference[i - 1].as_ref() != hypothesis[j - 1].as_ref());
            if d[(i - 1) * w + j - 1] + mismatch == here {
                s += mismatch;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && d[i * w + j - 1] + 1 == here {
            ins += 1;
            j -= 1;
        } else {
            del += 1;
            i -= 1;
        }
    }
    Ok(WerResult::from_counts(s, ins, del, n))
}

/// Pool errors and reference words over utterances.
pub fn corpus_wer(results: &[WerResult]) -> Result<WerResult> {
    let refs: usize = results.iter().map(|r| r.ref_words).sum();
    if refs == 0 {
        return Err(AtdsError::EmptyInput("reference transcript"));
    }
    Ok(WerResult::from_counts(
        results.iter().map(|r| r.substitutions).sum(),
        results.iter().map(|r| r.insertions).sum(),
        results.iter().map(|r| r.deletions).sum(),
        refs,
    ))
}

/// Transcripts as `utt_id<TAB>text`.
pub fn read_transcripts(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = io::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (line_no, line) in io::data_lines(&text) {
        let (id, t) = line.split_once('\t').unwrap_or((line, ""));
        if out.insert(id.to_string(), t.to_string()).is_some() {
            return Err(AtdsError::parse(path, line_no, format!("duplicate utterance {id}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn examples() {
        let r = wer(&words("a b c"), &words("a b c")).unwrap();
        assert_eq!((r.errors(), r.wer), (0, 0.0));
        let r = wer(&words("a b c"), &words("a x c")).unwrap();
        assert_eq!((r.substitutions, r.insertions, r.deletions), (1, 0, 0));
        assert_eq!(r.wer, 1.0 / 3.0);
        let r = wer(&words("a"), &words("a b")).unwrap();
        assert_eq!((r.substitutions, r.insertions, r.deletions, r.wer), (0, 1, 0, 1.0));
        let r = wer(&words("a b"), &words("")).unwrap();
        assert_eq!((r.deletions, r.wer), (2, 1.0));
        assert!(matches!(wer::<&str>(&[], &["a"]), Err(AtdsError::EmptyInput(_))));
    }

    #[test]
    fn tie_break_prefers_substitution() {
        // "a b" vs "b c": sub+sub or del+ins both cost 2.
        let r = wer(&words("a b"), &words("b c")).unwrap();
        assert_eq!((r.substitutions, r.insertions, r.deletions), (2, 0, 0));
    }

    #[test]
    fn normalization() {
        let o = WerOptions { lowercase: true, strip_punctuation: true };
        assert_eq!(tokenize_words("Hello,  World! ।", o), vec!["hello", "world"]);
        assert_eq!(tokenize_words("Hello, World", WerOptions::default()), vec!["Hello,", "World"]);
    }

    #[test]
    fn corpus_pooling() {
        let a = wer(&words("a b c d"), &words("a b c d")).unwrap();
        let b = wer(&words("x y"), &words("x")).unwrap();
        let c = corpus_wer(&[a, b]).unwrap();
        assert_eq!((c.errors(), c.ref_words), (1, 6));
    }

    /// Plain edit-distance DP without backtrace.
    fn edit_distance(a: &[u8], b: &[u8]) -> usize {
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        for (i, x) in a.iter().enumerate() {
            let mut cur = vec![i + 1; b.len() + 1];
            for (j, y) in b.iter().enumerate() {
                cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
            }
            prev = cur;
        }
        prev[b.len()]
    }

    proptest! {
        #[test]
        fn matches_edit_distance_oracle(a in prop::collection::vec(0u8..4, 1..25), b in prop::collection::vec(0u8..4, 0..25)) {
            let ra: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            let rb: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            let r = wer(&ra, &rb).unwrap();
            prop_assert_eq!(r.errors(), edit_distance(&a, &b));
            prop_assert_eq!(r.ref_words - r.deletions + r.insertions, rb.len());
            prop_assert_eq!(wer(&ra, &ra).unwrap().wer, 0.0);
            if !b.is_empty() {
                prop_assert_eq!(wer(&rb, &ra).unwrap().errors(), r.errors());
            }
        }
    }
}
