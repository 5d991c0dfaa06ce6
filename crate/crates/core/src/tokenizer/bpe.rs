//! Deterministic byte-pair style subword training over cluster characters.
//!
//! Each utterance is one training sequence; merges never cross utterance
//! boundaries. The vocabulary always starts with the UNK sentinel followed by
//! the full k-character alphabet, so any frame quantized with the same
//! codebook encodes without UNK.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::rc::Rc;

use log::debug;
use serde::{Deserialize, Serialize};

use super::{index_to_char, validate_codepoint_range, CharString, DEFAULT_BASE_CODEPOINT};
use crate::error::{AtdsError, Result};
use crate::fingerprint::fnv1a64;

pub const UNK_ID: u32 = 0;
pub const UNK_TOKEN: &str = "<unk>";

const VOCAB_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SubwordOptions {
    pub vocab_size: usize,
    pub k: usize,
    pub base_codepoint: u32,
    /// Pairs seen fewer times than this are never merged.
    pub min_frequency: u64,
}

impl SubwordOptions {
    pub fn new(vocab_size: usize, k: usize) -> Self {
        Self { vocab_size, k, base_codepoint: DEFAULT_BASE_CODEPOINT, min_frequency: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        validate_codepoint_range(self.base_codepoint, self.k)?;
        if self.vocab_size < self.k + 1 {
            return Err(AtdsError::InvalidArgument(format!(
                "vocab size {} is smaller than k + 1 = {}",
                self.vocab_size,
                self.k + 1
            )));
        }
        if self.min_frequency == 0 {
            return Err(AtdsError::InvalidArgument("min_frequency must be >= 1".into()));
        }
        Ok(())
    }
}

/// Token ids of one encoded utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub utt_id: String,
    pub ids: Vec<u32>,
}

/// Serialized layout of a vocab file. Field order is part of the format:
/// the fingerprint hashes these exact bytes.
#[derive(Serialize, Deserialize)]
struct VocabFile {
    k: usize,
    base_codepoint: u32,
    version: u32,
    vocab_size: usize,
    merges: Vec<[String; 2]>,
    tokens: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SubwordVocab {
    k: usize,
    base_codepoint: u32,
    vocab_size: usize,
    merges: Vec<(String, String)>,
    tokens: Vec<String>,
    token_ids: HashMap<String, u32>,
    /// (left id, right id) -> (merge rank, merged id)
    merge_table: HashMap<(u32, u32), (u32, u32)>,
}

impl PartialEq for SubwordVocab {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.base_codepoint == other.base_codepoint
            && self.vocab_size == other.vocab_size
            && self.merges == other.merges
            && self.tokens == other.tokens
    }
}

impl SubwordVocab {
    /// Rebuild a vocab from its parts, checking every structural invariant.
    pub fn from_parts(
        k: usize,
        base_codepoint: u32,
        vocab_size: usize,
        merges: Vec<(String, String)>,
        tokens: Vec<String>,
    ) -> Result<Self> {
        validate_codepoint_range(base_codepoint, k)?;
        let bad = |m: String| Err(AtdsError::InvalidArgument(format!("invalid vocab: {m}")));
        if tokens.len() > vocab_size {
            return bad(format!("{} tokens exceed vocab size {vocab_size}", tokens.len()));
        }
        if tokens.len() < k + 1 || tokens[0] != UNK_TOKEN {
            return bad("tokens must start with UNK followed by the alphabet".into());
        }
        for i in 0..k {
            if tokens[i + 1].chars().ne(std::iter::once(index_to_char(base_codepoint, i as u32))) {
                return bad(format!("token {} is not alphabet character {i}", i + 1));
            }
        }
        let mut token_ids = HashMap::with_capacity(tokens.len());
        for (id, t) in tokens.iter().enumerate().skip(1) {
            if token_ids.insert(t.clone(), id as u32).is_some() {
                return bad(format!("duplicate token {t:?}"));
            }
        }
        let mut merge_table = HashMap::with_capacity(merges.len());
        let mut next_new = k + 1;
        for (rank, (l, r)) in merges.iter().enumerate() {
            let (Some(&li), Some(&ri)) = (token_ids.get(l), token_ids.get(r)) else {
                return bad(format!("merge {rank} uses unknown tokens"));
            };
            let joined = format!("{l}{r}");
            let Some(&id) = token_ids.get(&joined) else {
                return bad(format!("merge {rank} result {joined:?} is not a token"));
            };
            if li as usize >= next_new || ri as usize >= next_new {
                return bad(format!("merge {rank} uses tokens not yet created"));
            }
            // New tokens appear in merge order; a merge may also re-derive an
            // existing token.
            if id as usize == next_new {
                next_new += 1;
            } else if id as usize > next_new {
                return bad(format!("token {id} appears before its merge"));
            }
            merge_table.entry((li, ri)).or_insert((rank as u32, id));
        }
        if next_new != tokens.len() {
            return bad("tokens not produced by any merge".into());
        }
        Ok(Self { k, base_codepoint, vocab_size, merges, tokens, token_ids, merge_table })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base_codepoint(&self) -> u32 {
        self.base_codepoint
    }

    /// Requested maximum size.
    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.token_ids.get(token).copied()
    }

    /// Number of alphabet characters a token spans; UNK covers one.
    pub fn char_len(&self, id: u32) -> Option<usize> {
        match id {
            UNK_ID => Some(1),
            _ => self.token(id).map(|t| t.chars().count()),
        }
    }

    fn char_id(&self, c: char) -> u32 {
        let cp = c as u32;
        match cp.checked_sub(self.base_codepoint) {
            Some(off) if (off as usize) < self.k => off + 1,
            _ => UNK_ID,
        }
    }

    /// Apply the recorded merges in training order. Characters outside the
    /// alphabet encode to [`UNK_ID`] and never merge.
    pub fn encode(&self, s: &CharString) -> TokenSequence {
        let mut ids: Vec<u32> = s.chars.iter().map(|&c| self.char_id(c)).collect();
        let mut last_rank: Option<u32> = None;
        loop {
            // The lowest-ranked merge still ahead of the replay cursor.
            let next = ids
                .windows(2)
                .filter_map(|w| self.merge_table.get(&(w[0], w[1])))
                .filter(|(rank, _)| last_rank.is_none_or(|l| *rank > l))
                .min_by_key(|(rank, _)| *rank)
                .copied();
            let Some((rank, _)) = next else { break };
            let (l, r) = &self.merges[rank as usize];
            let pair = (self.token_ids[l], self.token_ids[r]);
            let new_id = self.merge_table[&pair].1;
            apply_merge(&mut ids, pair, new_id);
            last_rank = Some(rank);
        }
        TokenSequence { utt_id: s.utt_id.clone(), ids }
    }

    /// Concatenate the strings of all non-UNK tokens.
    pub fn decode(&self, ids: &[u32]) -> String {
        ids.iter().filter(|&&id| id != UNK_ID).filter_map(|&id| self.token(id)).collect()
    }

    /// Canonical serialized form: compact JSON plus a trailing newline.
    pub fn to_json(&self) -> String {
        let file = VocabFile {
            k: self.k,
            base_codepoint: self.base_codepoint,
            version: VOCAB_FORMAT_VERSION,
            vocab_size: self.vocab_size,
            merges: self.merges.iter().map(|(l, r)| [l.clone(), r.clone()]).collect(),
            tokens: self.tokens.clone(),
        };
        let mut s = serde_json::to_string(&file).expect("vocab serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: VocabFile = serde_json::from_str(text)?;
        if f.version != VOCAB_FORMAT_VERSION {
            return Err(AtdsError::UnsupportedVersion(f.version));
        }
        Self::from_parts(
            f.k,
            f.base_codepoint,
            f.vocab_size,
            f.merges.into_iter().map(|[l, r]| (l, r)).collect(),
            f.tokens,
        )
    }

    /// FNV-1a of the canonical JSON bytes, i.e. of the vocab file.
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(self.to_json().as_bytes())
    }
}

/// Replace non-overlapping occurrences of `pair`, scanning left to right.
fn apply_merge(ids: &mut Vec<u32>, pair: (u32, u32), new_id: u32) {
    let mut out = Vec::with_capacity(ids.len());
    let mut i = 0;
    while i < ids.len() {
        if i + 1 < ids.len() && ids[i] == pair.0 && ids[i + 1] == pair.1 {
            out.push(new_id);
            i += 2;
        } else {
            out.push(ids[i]);
            i += 1;
        }
    }
    *ids = out;
}

pub fn train_subword(corpus: &[CharString], vocab_size: usize, k: usize, base_codepoint: u32) -> Result<SubwordVocab> {
    train_subword_with(corpus, &SubwordOptions { base_codepoint, ..SubwordOptions::new(vocab_size, k) })
}

/// Merge candidate in the priority queue: highest count first, then the
/// lexicographically smallest (left, right) pair.
struct Candidate {
    count: u64,
    left: Rc<str>,
    right: Rc<str>,
    pair: (u32, u32),
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count.cmp(&other.count).then_with(|| (&*other.left, &*other.right).cmp(&(&*self.left, &*self.right)))
    }
}

struct Word {
    ids: Vec<u32>,
    count: u64,
}

fn pairs_of(ids: &[u32]) -> impl Iterator<Item = (u32, u32)> + '_ {
    ids.windows(2).map(|w| (w[0], w[1]))
}

pub fn train_subword_with(corpus: &[CharString], opts: &SubwordOptions) -> Result<SubwordVocab> {
    opts.validate()?;
    if corpus.is_empty() {
        return Err(AtdsError::EmptyInput("subword training corpus"));
    }
    let k = opts.k;
    let mut tokens: Vec<String> = Vec::with_capacity(opts.vocab_size);
    tokens.push(UNK_TOKEN.to_string());
    tokens.extend((0..k as u32).map(|i| index_to_char(opts.base_codepoint, i).to_string()));
    let mut strings: Vec<Rc<str>> = tokens.iter().map(|t| Rc::from(t.as_str())).collect();
    let mut token_ids: HashMap<String, u32> = tokens.iter().cloned().zip(0..).skip(1).collect();

    // Identical utterances are trained once with a multiplicity. Characters
    // outside the alphabet split an utterance into independent pieces.
    let mut word_counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for s in corpus {
        let mut piece = Vec::new();
        for &c in &s.chars {
            let off = (c as u32).wrapping_sub(opts.base_codepoint) as usize;
            if off < k {
                piece.push(off as u32 + 1);
            } else if !piece.is_empty() {
                *word_counts.entry(std::mem::take(&mut piece)).or_default() += 1;
            }
        }
        if !piece.is_empty() {
            *word_counts.entry(piece).or_default() += 1;
        }
    }
    let mut words: Vec<Word> = word_counts.into_iter().map(|(ids, count)| Word { ids, count }).collect();
    words.sort_unstable_by(|a, b| a.ids.cmp(&b.ids));

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut where_seen: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
    for (wi, w) in words.iter().enumerate() {
        for p in pairs_of(&w.ids) {
            *pair_counts.entry(p).or_default() += w.count;
            where_seen.entry(p).or_default().insert(wi);
        }
    }
    let candidate = |pair: (u32, u32), count: u64, strings: &[Rc<str>]| Candidate {
        count,
        left: strings[pair.0 as usize].clone(),
        right: strings[pair.1 as usize].clone(),
        pair,
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts.iter().map(|(&p, &c)| candidate(p, c, &strings)).collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    while tokens.len() < opts.vocab_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current != top.count {
            if current > 0 {
                heap.push(candidate(top.pair, current, &strings));
            }
            continue;
        }
        if current < opts.min_frequency {
            break;
        }

        let joined = format!("{}{}", top.left, top.right);
        let new_id = match token_ids.get(&joined) {
            Some(&id) => id,
            None => {
                let id = tokens.len() as u32;
                token_ids.insert(joined.clone(), id);
                strings.push(Rc::from(joined.as_str()));
                tokens.push(joined);
                id
            }
        };
        debug!("merge {}: {:?} + {:?} (count {current})", merges.len(), top.left, top.right);
        merges.push((top.left.to_string(), top.right.to_string()));

        let affected = where_seen.remove(&top.pair).unwrap_or_default();
        let mut deltas: HashMap<(u32, u32), i64> = HashMap::new();
        for wi in affected {
            let w = &mut words[wi];
            if !pairs_of(&w.ids).any(|p| p == top.pair) {
                continue;
            }
            let c = w.count as i64;
            for p in pairs_of(&w.ids) {
                *deltas.entry(p).or_default() -= c;
            }
            apply_merge(&mut w.ids, top.pair, new_id);
            for p in pairs_of(&w.ids) {
                *deltas.entry(p).or_default() += c;
                where_seen.entry(p).or_default().insert(wi);
            }
        }
        let mut grown: Vec<(u32, u32)> = Vec::new();
        for (p, d) in deltas {
            let entry = pair_counts.entry(p).or_default();
            *entry = (*entry as i64 + d) as u64;
            if d > 0 {
                grown.push(p);
            }
            if *entry == 0 {
                pair_counts.remove(&p);
            }
        }
        for p in grown {
            heap.push(candidate(p, pair_counts[&p], &strings));
        }
    }

    SubwordVocab::from_parts(k, opts.base_codepoint, opts.vocab_size, merges, tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc_opts(vocab_size: usize, min_frequency: u64) -> SubwordOptions {
        SubwordOptions { vocab_size, k: 3, base_codepoint: 'a' as u32, min_frequency }
    }

    fn corpus(items: &[&str]) -> Vec<CharString> {
        items.iter().enumerate().map(|(i, s)| CharString::new(format!("u{i}"), s)).collect()
    }

    /// Brute-force pair counter: every adjacent pair of every sequence.
    fn count_pairs(seqs: &[Vec<String>]) -> Vec<((String, String), u64)> {
        let mut m: std::collections::BTreeMap<(String, String), u64> = Default::default();
        for s in seqs {
            for w in s.windows(2) {
                *m.entry((w[0].clone(), w[1].clone())).or_default() += 1;
            }
        }
        m.into_iter().collect()
    }

    #[test]
    fn hand_traced_merges() {
        let c = corpus(&["abab", "abc"]);
        // Oracle: brute-force counts confirm the traced winners and counts.
        let mut seqs: Vec<Vec<String>> =
            ["abab", "abc"].iter().map(|s| s.chars().map(String::from).collect()).collect();
        let mut traced = Vec::new();
        loop {
            let counts = count_pairs(&seqs);
            let Some(max) = counts.iter().map(|(_, c)| *c).max() else { break };
            // BTreeMap order is lexicographic, so the first max is the tie winner.
            let ((l, r), n) = counts.into_iter().find(|(_, c)| *c == max).unwrap();
            traced.push((l.clone(), r.clone(), n));
            for s in &mut seqs {
                let mut out = Vec::new();
                let mut i = 0;
                while i < s.len() {
                    if i + 1 < s.len() && s[i] == l && s[i + 1] == r {
                        out.push(format!("{l}{r}"));
                        i += 2;
                    } else {
                        out.push(s[i].clone());
                        i += 1;
                    }
                }
                *s = out;
            }
        }
        assert_eq!(traced[0], ("a".into(), "b".into(), 3));
        assert_eq!(traced[1], ("ab".into(), "ab".into(), 1));

        let v = train_subword_with(&c, &abc_opts(100, 1)).unwrap();
        let got: Vec<(String, String)> = v.merges().to_vec();
        let want: Vec<(String, String)> = traced.iter().map(|(l, r, _)| (l.clone(), r.clone())).collect();
        assert_eq!(got, want);
        assert_eq!(got[..2], [("a".into(), "b".into()), ("ab".into(), "ab".into())]);

        // The default minimum frequency keeps only the repeated pair.
        let v2 = train_subword_with(&c, &abc_opts(100, 2)).unwrap();
        assert_eq!(v2.merges(), &[("a".to_string(), "b".to_string())]);
    }

    #[test]
    fn minimal_vocab_has_no_merges() {
        let v = train_subword_with(&corpus(&["abab", "abc"]), &abc_opts(4, 1)).unwrap();
        assert!(v.merges().is_empty());
        assert_eq!(v.tokens(), &["<unk>", "a", "b", "c"]);
    }

    #[test]
    fn vocab_smaller_than_alphabet_rejected() {
        let e = train_subword_with(&corpus(&["abc"]), &abc_opts(3, 1)).unwrap_err();
        assert!(e.is_validation());
        assert!(matches!(train_subword_with(&[], &abc_opts(10, 1)), Err(AtdsError::EmptyInput(_))));
    }

    #[test]
    fn alphabet_is_seeded_even_if_unseen() {
        let v = train_subword(&corpus(&["\u{4E00}\u{4E01}"]), 600, 500, 0x4E00).unwrap();
        assert_eq!(v.len(), 501);
        assert_eq!(v.id_of("\u{4E00}"), Some(1));
        assert_eq!(v.token(500), Some("\u{4FF3}"));
    }

    #[test]
    fn encode_examples() {
        let zero = train_subword_with(&corpus(&["abc"]), &abc_opts(4, 1)).unwrap();
        assert_eq!(zero.encode(&CharString::new("x", "abc")).ids, vec![1, 2, 3]);

        let one = SubwordVocab::from_parts(
            3,
            'a' as u32,
            10,
            vec![("a".into(), "b".into())],
            vec!["<unk>".into(), "a".into(), "b".into(), "c".into(), "ab".into()],
        )
        .unwrap();
        let ids = one.encode(&CharString::new("x", "abc")).ids;
        assert_eq!(ids, vec![one.id_of("ab").unwrap(), one.id_of("c").unwrap()]);

        let with_unk = one.encode(&CharString::new("x", "a`b"));
        assert_eq!(with_unk.ids, vec![1, UNK_ID, 2]);
    }

    #[test]
    fn encode_replays_merges_in_order() {
        let v = SubwordVocab::from_parts(
            3,
            'a' as u32,
            10,
            vec![("c".into(), "a".into()), ("a".into(), "b".into()), ("ab".into(), "ca".into())],
            vec!["<unk>".into(), "a".into(), "b".into(), "c".into(), "ca".into(), "ab".into(), "abca".into()],
        )
        .unwrap();
        // abca -> (c,a): ab[ca] -> (a,b): [ab][ca] -> [abca]
        assert_eq!(v.decode(&v.encode(&CharString::new("x", "abca")).ids), "abca");
        assert_eq!(v.encode(&CharString::new("x", "abca")).ids, vec![6]);
    }

    #[test]
    fn from_parts_rejects_inconsistent_vocab() {
        let toks = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(SubwordVocab::from_parts(3, 'a' as u32, 10, vec![], toks(&["<unk>", "a", "c", "b"])).is_err());
        assert!(SubwordVocab::from_parts(3, 'a' as u32, 10, vec![], toks(&["<unk>", "a", "b", "c", "ab"])).is_err());
        assert!(SubwordVocab::from_parts(
            3,
            'a' as u32,
            4,
            vec![("a".into(), "b".into())],
            toks(&["<unk>", "a", "b", "c", "ab"])
        )
        .is_err());
        assert!(SubwordVocab::from_parts(
            3,
            'a' as u32,
            10,
            vec![("a".into(), "x".into())],
            toks(&["<unk>", "a", "b", "c", "ax"])
        )
        .is_err());
    }

    #[test]
    fn json_round_trip_and_fingerprint() {
        let v = train_subword_with(&corpus(&["abab", "abc", "cab"]), &abc_opts(10, 1)).unwrap();
        let json = v.to_json();
        assert!(json.starts_with("{\"k\":3,\"base_codepoint\":97,\"version\":1,"));
        let back = SubwordVocab::from_json(&json).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.fingerprint(), v.fingerprint());
        let other = train_subword_with(&corpus(&["abab"]), &abc_opts(10, 1)).unwrap();
        assert_ne!(other.fingerprint(), v.fingerprint());
    }

    fn random_corpus(seed: u64, n: usize, k: u32) -> Vec<CharString> {
        let mut rng = crate::rng::SplitMix64::new(seed);
        (0..n)
            .map(|i| {
                let len = rng.below(30) as usize;
                let chars =
                    (0..len).map(|_| char::from_u32('a' as u32 + rng.below(k as u64) as u32).unwrap()).collect();
                CharString { utt_id: format!("u{i}"), chars }
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trained_vocab_invariants(seed in any::<u64>(), vocab_size in 6usize..60, k in 2usize..6, min_f in 1u64..3) {
            let c = random_corpus(seed, 12, k as u32);
            let opts = SubwordOptions { vocab_size, k, base_codepoint: 'a' as u32, min_frequency: min_f };
            let v = train_subword_with(&c, &opts).unwrap();
            prop_assert!(v.len() <= vocab_size);
            for (l, r) in v.merges() {
                let joined = format!("{}{}", l, r);
                prop_assert!(v.id_of(&joined).is_some());
            }
            let again = train_subword_with(&c, &opts).unwrap();
            prop_assert_eq!(v.to_json(), again.to_json());
            for s in &c {
                let enc = v.encode(s);
                prop_assert!(enc.ids.iter().all(|&id| (id as usize) < v.len() && id != UNK_ID));
                prop_assert_eq!(v.decode(&enc.ids), s.as_string());
            }
        }
    }
}
