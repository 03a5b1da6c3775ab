//! Binary words and uniform-length word sets.
//!
//! Positions on the public surface are 1-based and inclusive: `w.slice(a, b)`
//! returns `w_a ... w_b`, and `w.slice(a, a - 1)` is the empty word.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const LIMB: usize = 64;

/// Largest factor length deduplicated through a dense bitmap (2^24 bits).
const DENSE_FACTOR_BITS: usize = 24;
/// Pending-buffer size at which sparse factor collection compacts itself.
const COMPACT_THRESHOLD: usize = 1 << 22;

fn limbs_for(len: usize) -> usize {
    len.div_ceil(LIMB)
}

/// A finite word over `{0, 1}`.
///
/// Letters are packed most-significant-bit first into 64-bit limbs with the
/// unused tail of the last limb kept at zero. With that normalisation the
/// derived ordering (limbs, then length) is exactly lexicographic order with
/// proper prefixes first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    limbs: SmallVec<[u64; 2]>,
    len: usize,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = bool>>(letters: I) -> Self {
        let mut w = Word::empty();
        for bit in letters {
            w.push(bit);
        }
        w
    }

    /// `len` copies of the letter `bit`.
    pub fn repeat(bit: bool, len: usize) -> Self {
        let fill = if bit { u64::MAX } else { 0 };
        let mut limbs: SmallVec<[u64; 2]> = SmallVec::from_elem(fill, limbs_for(len));
        mask_tail(&mut limbs, len);
        Word { limbs, len }
    }

    /// Builds a word of `len <= 64` letters from the low `len` bits of `value`,
    /// the first letter being the most significant of those bits.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= LIMB, "from_u64 takes at most 64 letters");
        if len == 0 {
            return Word::empty();
        }
        let mut limbs = SmallVec::new();
        limbs.push(value << (LIMB - len));
        Word { limbs, len }
    }

    /// Inverse of [`Word::from_u64`]; `None` for words longer than 64 letters.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.limbs[0] >> (LIMB - self.len)),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Letter at 0-based offset `i`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / LIMB] >> (LIMB - 1 - i % LIMB)) & 1 == 1
    }

    /// Letter at 1-based position `pos`.
    pub fn letter(&self, pos: usize) -> Option<u8> {
        (1..=self.len).contains(&pos).then(|| self.bit(pos - 1) as u8)
    }

    pub fn letters(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    fn push(&mut self, bit: bool) {
        let r = self.len % LIMB;
        if r == 0 {
            self.limbs.push(0);
        }
        if bit {
            *self.limbs.last_mut().expect("limb pushed above") |= 1 << (LIMB - 1 - r);
        }
        self.len += 1;
    }

    /// The letters in reverse order.
    pub fn reversed(&self) -> Word {
        match self.len {
            0 => Word::empty(),
            1..=64 => Word {
                limbs: smallvec::smallvec![self.limbs[0].reverse_bits() << (LIMB - self.len)],
                len: self.len,
            },
            _ => Word::from_letters((0..self.len).rev().map(|i| self.bit(i))),
        }
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Word) -> usize {
        let limit = self.len.min(other.len);
        for (i, (a, b)) in self.limbs.iter().zip(&other.limbs).enumerate() {
            let x = a ^ b;
            if x != 0 {
                return (i * LIMB + x.leading_zeros() as usize).min(limit);
            }
        }
        limit
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        out.append(other);
        out
    }

    fn append(&mut self, other: &Word) {
        if other.len == 0 {
            return;
        }
        let r = self.len % LIMB;
        if r == 0 {
            self.limbs.extend_from_slice(&other.limbs);
        } else {
            self.limbs.reserve(other.limbs.len());
            for &limb in other.limbs.iter() {
                *self.limbs.last_mut().expect("r != 0 implies a partial limb") |= limb >> r;
                self.limbs.push(limb << (LIMB - r));
            }
        }
        self.len += other.len;
        self.limbs.truncate(limbs_for(self.len));
    }

    /// 64 letters starting at 0-based offset `start`, zero padded past the end.
    #[inline]
    fn window_u64(&self, start: usize) -> u64 {
        let q = start / LIMB;
        let r = start % LIMB;
        let hi = self.limbs.get(q).copied().unwrap_or(0);
        if r == 0 {
            hi
        } else {
            let lo = self.limbs.get(q + 1).copied().unwrap_or(0);
            (hi << r) | (lo >> (LIMB - r))
        }
    }

    /// Letters at 0-based offsets `start .. start + width`, unchecked.
    pub(crate) fn extract(&self, start: usize, width: usize) -> Word {
        debug_assert!(start + width <= self.len);
        let n = limbs_for(width);
        let mut limbs: SmallVec<[u64; 2]> = (0..n).map(|o| self.window_u64(start + o * LIMB)).collect();
        mask_tail(&mut limbs, width);
        Word { limbs, len: width }
    }

    /// Letters `start .. start + width` (0-based) as an integer, for `width <= 64`.
    #[inline]
    pub(crate) fn extract_u64(&self, start: usize, width: usize) -> u64 {
        debug_assert!(width <= LIMB && start + width <= self.len);
        if width == 0 {
            0
        } else {
            self.window_u64(start) >> (LIMB - width)
        }
    }

    /// The factor `w[a, b]` using 1-based inclusive positions.
    ///
    /// Requires `1 <= a <= b + 1 <= len + 1`; `a == b + 1` yields the empty word.
    pub fn slice(&self, a: usize, b: usize) -> Result<Word> {
        check_slice(a, b, self.len)?;
        Ok(self.extract(a - 1, b + 1 - a))
    }
}

fn mask_tail(limbs: &mut SmallVec<[u64; 2]>, len: usize) {
    let r = len % LIMB;
    if r != 0 {
        if let Some(last) = limbs.last_mut() {
            *last &= u64::MAX << (LIMB - r);
        }
    }
}

fn check_slice(a: usize, b: usize, len: usize) -> Result<()> {
    if a >= 1 && a <= b + 1 && b <= len {
        Ok(())
    } else {
        Err(Error::SliceOutOfRange { a, b, len })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() && f.alternate() {
            return f.write_str("ε");
        }
        for bit in self.letters() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Word::empty();
        for c in s.trim().chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                other => return Err(Error::InvalidLetter(other)),
            }
        }
        Ok(w)
    }
}

/// A deduplicated set of words sharing one length, kept in lexicographic order.
///
/// The common length is stored explicitly so that empty sets still know it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    words: Vec<Word>,
    word_len: usize,
}

impl WordSet {
    pub fn empty(word_len: usize) -> Self {
        WordSet {
            words: Vec::new(),
            word_len,
        }
    }

    /// `{ε}`, the identity for [`WordSet::product`].
    pub fn epsilon() -> Self {
        WordSet::singleton(Word::empty())
    }

    pub fn singleton(w: Word) -> Self {
        let word_len = w.len();
        WordSet {
            words: alloc::vec![w],
            word_len,
        }
    }

    /// `{0, 1}`.
    pub fn letters() -> Self {
        WordSet {
            words: alloc::vec![Word::from_u64(0, 1), Word::from_u64(1, 1)],
            word_len: 1,
        }
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(word_len: usize, words: I) -> Result<Self> {
        let mut words: Vec<Word> = words.into_iter().collect();
        if let Some(bad) = words.iter().find(|w| w.len() != word_len) {
            return Err(Error::LengthMismatch {
                expected: word_len,
                found: bad.len(),
            });
        }
        words.sort_unstable();
        words.dedup();
        Ok(WordSet { words, word_len })
    }

    /// Parses whitespace- or comma-separated `0/1` strings. An empty input
    /// needs `word_len` to be given.
    pub fn parse(text: &str, word_len: Option<usize>) -> Result<Self> {
        let words = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| if t == "ε" { Ok(Word::empty()) } else { t.parse() })
            .collect::<Result<Vec<Word>>>()?;
        let len = word_len.or_else(|| words.first().map(Word::len)).unwrap_or(0);
        WordSet::from_words(len, words)
    }

    /// Caller guarantees sorted, distinct, uniform length.
    pub(crate) fn from_sorted_unchecked(word_len: usize, words: Vec<Word>) -> Self {
        debug_assert!(words.windows(2).all(|p| p[0] < p[1]));
        debug_assert!(words.iter().all(|w| w.len() == word_len));
        WordSet { words, word_len }
    }

    /// Uniform length of the members.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Word> {
        self.words.iter()
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.words
    }

    pub fn into_words(self) -> Vec<Word> {
        self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        w.len() == self.word_len && self.words.binary_search(w).is_ok()
    }

    /// `UV = {uv : u ∈ U, v ∈ V}`.
    ///
    /// Concatenation of fixed-length words is injective and order preserving,
    /// so the product of two canonical sets is canonical as generated and has
    /// exactly `|U|·|V|` members.
    pub fn product(&self, other: &WordSet) -> WordSet {
        let word_len = self.word_len + other.word_len;
        let chunks = crate::par::map_collect(0..self.words.len(), |i| {
            let u = &self.words[i];
            other.words.iter().map(|v| u.concat(v)).collect::<Vec<_>>()
        });
        let mut words = Vec::with_capacity(self.words.len() * other.words.len());
        for chunk in chunks {
            words.extend(chunk);
        }
        WordSet::from_sorted_unchecked(word_len, words)
    }

    /// Product of a sequence of sets, `{ε}` for an empty sequence.
    pub fn product_all<'a, I: IntoIterator<Item = &'a WordSet>>(factors: I) -> WordSet {
        factors
            .into_iter()
            .fold(WordSet::epsilon(), |acc, f| acc.product(f))
    }

    /// `W[a, b] = {w[a, b] : w ∈ W}` with 1-based inclusive positions.
    pub fn slice(&self, a: usize, b: usize) -> Result<WordSet> {
        check_slice(a, b, self.word_len)?;
        let width = b + 1 - a;
        if width <= DENSE_FACTOR_BITS {
            let mut dense = DenseSet::new(width);
            for w in &self.words {
                dense.insert(w.extract_u64(a - 1, width));
            }
            return Ok(dense.into_word_set());
        }
        let mut words: Vec<Word> = self.words.iter().map(|w| w.extract(a - 1, width)).collect();
        // prefixes of a lexicographically sorted set come out sorted already
        if a != 1 {
            words.sort_unstable();
        }
        words.dedup();
        Ok(WordSet::from_sorted_unchecked(width, words))
    }

    /// `{reverse(w) : w ∈ S}`.
    pub fn reversed(&self) -> WordSet {
        let mut words: Vec<Word> = self.words.iter().map(Word::reversed).collect();
        words.sort_unstable();
        WordSet::from_sorted_unchecked(self.word_len, words)
    }

    /// `|S[1, j]|` for `j = 0..=word_len`, from the common prefixes of
    /// neighbouring words; no slice is materialised.
    pub fn prefix_counts(&self) -> Vec<usize> {
        if self.words.is_empty() {
            return alloc::vec![0; self.word_len + 1];
        }
        // a neighbouring pair sharing exactly c letters splits every prefix length > c
        let mut splits = alloc::vec![0usize; self.word_len + 1];
        for pair in self.words.windows(2) {
            splits[pair[0].common_prefix_len(&pair[1])] += 1;
        }
        let mut counts = Vec::with_capacity(self.word_len + 1);
        let mut distinct = 1;
        for c in splits.iter().take(self.word_len + 1) {
            counts.push(distinct);
            distinct += c;
        }
        counts
    }

    /// `F(S, k)`: every length-`k` factor of every member.
    pub fn factors(&self, k: usize) -> Result<WordSet> {
        if k > self.word_len {
            return Err(Error::FactorTooLong {
                k,
                len: self.word_len,
            });
        }
        let offsets = self.word_len - k + 1;
        if k <= DENSE_FACTOR_BITS {
            let mut dense = DenseSet::new(k);
            for w in &self.words {
                for start in 0..offsets {
                    dense.insert(w.extract_u64(start, k));
                }
            }
            return Ok(dense.into_word_set());
        }
        let mut acc = SparseAccumulator::new(k);
        for w in &self.words {
            for start in 0..offsets {
                acc.push(w.extract(start, k));
            }
        }
        Ok(acc.finish())
    }

    fn check_same_len(&self, other: &WordSet) -> Result<()> {
        if self.word_len == other.word_len {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.word_len,
                found: other.word_len,
            })
        }
    }

    pub fn union(&self, other: &WordSet) -> Result<WordSet> {
        self.check_same_len(other)?;
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.words, &other.words);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                core::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                core::cmp::Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(WordSet::from_sorted_unchecked(self.word_len, out))
    }

    /// Union of many sets of length `word_len`.
    pub fn union_all<I: IntoIterator<Item = WordSet>>(word_len: usize, sets: I) -> Result<WordSet> {
        let mut runs: Vec<Vec<Word>> = Vec::new();
        for set in sets {
            if set.word_len != word_len {
                return Err(Error::LengthMismatch {
                    expected: word_len,
                    found: set.word_len,
                });
            }
            runs.push(set.words);
        }
        // pairwise merging of the sorted inputs
        while runs.len() > 1 {
            let mut next = Vec::with_capacity(runs.len().div_ceil(2));
            let mut it = runs.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => merge_sorted(a, b),
                    None => a,
                });
            }
            runs = next;
        }
        Ok(WordSet::from_sorted_unchecked(word_len, runs.pop().unwrap_or_default()))
    }

    pub fn intersection(&self, other: &WordSet) -> Result<WordSet> {
        self.check_same_len(other)?;
        let words = self
            .words
            .iter()
            .filter(|w| other.words.binary_search(w).is_ok())
            .cloned()
            .collect();
        Ok(WordSet::from_sorted_unchecked(self.word_len, words))
    }

    /// Members of `self` missing from `other`, in canonical order.
    pub fn difference<'a>(&'a self, other: &'a WordSet) -> impl Iterator<Item = &'a Word> + 'a {
        self.words.iter().filter(move |w| !other.contains(w))
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.word_len == other.word_len && self.difference(other).next().is_none()
    }

    /// One word per line, canonical order.
    pub fn to_lines(&self) -> String {
        use core::fmt::Write;
        let mut s = String::with_capacity(self.len() * (self.word_len + 1));
        for w in &self.words {
            let _ = writeln!(s, "{w}");
        }
        s
    }
}

impl fmt::Debug for WordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{w:#}")?;
        }
        write!(f, "}}/{}", self.word_len)
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a Word;
    type IntoIter = core::slice::Iter<'a, Word>;

    fn into_iter(self) -> Self::IntoIter {
        self.words.iter()
    }
}

/// Bitmap over all `2^width` words of one short length.
struct DenseSet {
    bits: Vec<u64>,
    width: usize,
}

impl DenseSet {
    fn new(width: usize) -> Self {
        let slots = 1usize << width;
        DenseSet {
            bits: alloc::vec![0; slots.div_ceil(64)],
            width,
        }
    }

    #[inline]
    fn insert(&mut self, value: u64) {
        let v = value as usize;
        self.bits[v / 64] |= 1 << (v % 64);
    }

    fn into_word_set(self) -> WordSet {
        let mut words = Vec::new();
        for (i, &chunk) in self.bits.iter().enumerate() {
            let mut rest = chunk;
            while rest != 0 {
                let tz = rest.trailing_zeros() as usize;
                words.push(Word::from_u64((i * 64 + tz) as u64, self.width));
                rest &= rest - 1;
            }
        }
        WordSet::from_sorted_unchecked(self.width, words)
    }
}

/// Collects words with periodic sort+dedup so duplicates never pile up.
/// Merges two strictly increasing vectors, dropping duplicates.
fn merge_sorted(a: Vec<Word>, b: Vec<Word>) -> Vec<Word> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                core::cmp::Ordering::Less => a.next(),
                core::cmp::Ordering::Greater => b.next(),
                core::cmp::Ordering::Equal => {
                    b.next();
                    a.next()
                }
            },
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

pub(crate) struct SparseAccumulator {
    done: Vec<Word>,
    pending: Vec<Word>,
    width: usize,
}

impl SparseAccumulator {
    pub(crate) fn new(width: usize) -> Self {
        SparseAccumulator {
            done: Vec::new(),
            pending: Vec::new(),
            width,
        }
    }

    pub(crate) fn push(&mut self, w: Word) {
        self.pending.push(w);
        if self.pending.len() >= COMPACT_THRESHOLD.max(self.done.len()) {
            self.compact();
        }
    }

    fn compact(&mut self) {
        self.pending.sort_unstable();
        self.pending.dedup();
        let pending = core::mem::take(&mut self.pending);
        let done = core::mem::take(&mut self.done);
        self.done = merge_sorted(done, pending);
    }

    pub(crate) fn finish(mut self) -> WordSet {
        self.compact();
        WordSet::from_sorted_unchecked(self.width, self.done)
    }
}

#[cfg(feature = "serde")]
mod serde_impls {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    impl Serialize for Word {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            s.collect_str(self)
        }
    }

    impl<'de> Deserialize<'de> for Word {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
            s.parse().map_err(de::Error::custom)
        }
    }

    impl Serialize for WordSet {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            s.collect_seq(self.words.iter())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn set(items: &[&str]) -> WordSet {
        let len = items.first().map_or(0, |s| s.len());
        WordSet::from_words(len, items.iter().map(|s| w(s))).unwrap()
    }

    fn naive_slice(s: &str, a: usize, b: usize) -> String {
        s[a - 1..b].into()
    }

    #[test]
    fn reversal_and_prefix_counts() {
        assert_eq!(w("0111").reversed(), w("1110"));
        let long = "1".repeat(40) + &"0".repeat(30) + "1";
        assert_eq!(format!("{}", w(&long).reversed()), long.chars().rev().collect::<alloc::string::String>());
        assert_eq!(w("0110").common_prefix_len(&w("0101")), 2);
        assert_eq!(w("011").common_prefix_len(&w("011")), 3);

        let s = set(&["0110", "0111", "1010", "1011", "1100"]);
        assert_eq!(s.prefix_counts(), [1, 2, 3, 3, 5]);
        assert_eq!(s.reversed(), set(&["0110", "1110", "0101", "1101", "0011"]));
        assert_eq!(WordSet::empty(2).prefix_counts(), [0, 0, 0]);
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w("01").concat(&w("10")), w("0110"));
        assert_eq!(Word::empty().concat(&w("10")), w("10"));
        assert_eq!(w("1").concat(&w("01")), w("101"));
    }

    #[test]
    fn slice_examples() {
        assert_eq!(w("0110").slice(2, 3).unwrap(), w("11"));
        assert_eq!(w("101").slice(1, 0).unwrap(), Word::empty());
        assert_eq!(w("10011").slice(2, 4).unwrap(), w("001"));
        assert_eq!(w("101").slice(4, 3).unwrap(), Word::empty());
    }

    #[test]
    fn slice_out_of_range() {
        assert!(matches!(w("101").slice(0, 1), Err(Error::SliceOutOfRange { .. })));
        assert!(w("101").slice(2, 4).is_err());
        assert!(w("101").slice(3, 1).is_err());
        assert!(w("101").slice(5, 4).is_err());
    }

    #[test]
    fn set_product_examples() {
        assert_eq!(set(&["01", "10"]).product(&set(&["1"])), set(&["011", "101"]));
        let left = set(&["1"]).product(&set(&["01", "10"]));
        let right = set(&["01", "10"]).product(&set(&["1"]));
        let u = left.union(&right).unwrap();
        assert_eq!(u, set(&["101", "110", "011"]));
        assert_eq!(u.len(), 3);
        assert_eq!(WordSet::epsilon().product(&set(&["01", "10"])), set(&["01", "10"]));
    }

    #[test]
    fn set_slice_examples() {
        let a4 = set(&["101", "110", "011"]);
        assert_eq!(a4.slice(1, 1).unwrap(), set(&["1", "0"]));
        assert_eq!(set(&["01", "10"]).slice(1, 2).unwrap(), set(&["01", "10"]));
        assert_eq!(set(&["01", "10"]).slice(1, 0).unwrap(), WordSet::epsilon());
        assert!(a4.slice(2, 4).is_err());
    }

    #[test]
    fn factor_set_examples() {
        let a3sq = set(&["0101", "0110", "1001", "1010"]);
        assert_eq!(a3sq.factors(2).unwrap(), set(&["00", "01", "10", "11"]));
        let a4 = set(&["101", "110", "011"]);
        assert_eq!(a4.factors(2).unwrap(), set(&["01", "10", "11"]));
        assert_eq!(a4.factors(3).unwrap(), a4);
        assert!(matches!(a4.factors(4), Err(Error::FactorTooLong { k: 4, len: 3 })));
        assert_eq!(a4.factors(0).unwrap(), WordSet::epsilon());
    }

    #[test]
    fn empty_set_keeps_its_length() {
        let e = WordSet::empty(5);
        assert_eq!(e.word_len(), 5);
        assert!(e.product(&set(&["1"])).is_empty());
        assert_eq!(e.product(&set(&["1"])).word_len(), 6);
        assert!(e.union(&WordSet::empty(4)).is_err());
    }

    #[test]
    fn long_words_cross_limb_boundaries() {
        let a: String = (0..100).map(|i| if i % 3 == 0 { '1' } else { '0' }).collect();
        let b: String = (0..37).map(|i| if i % 5 < 2 { '1' } else { '0' }).collect();
        let ab = w(&a).concat(&w(&b));
        assert_eq!(format!("{ab}"), format!("{a}{b}"));
        let joined = format!("{a}{b}");
        assert_eq!(format!("{}", ab.slice(60, 130).unwrap()), naive_slice(&joined, 60, 130));
        let fs = WordSet::singleton(ab).factors(70).unwrap();
        let expected: Vec<String> = {
            let mut v: Vec<String> = (0..=joined.len() - 70).map(|i| joined[i..i + 70].into()).collect();
            v.sort();
            v.dedup();
            v
        };
        let got: Vec<String> = fs.iter().map(|x| format!("{x}")).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut words = vec![w("1"), w("01"), w(""), w("0"), w("10"), w("00"), w("011")];
        words.sort();
        let shown: Vec<String> = words.iter().map(|x| format!("{x}")).collect();
        assert_eq!(shown, ["", "0", "00", "01", "011", "1", "10"]);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("0110").to_u64(), Some(0b0110));
        assert_eq!(Word::from_u64(0b0110, 4), w("0110"));
        assert!(matches!("012".parse::<Word>(), Err(Error::InvalidLetter('2'))));
        let s = WordSet::parse("011\n101, 110\n", None).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_lines(), "011\n101\n110\n");
        assert_eq!(format!("{:?}", WordSet::epsilon()), "{ε}/0");
        assert_eq!(Word::repeat(true, 3), w("111"));
        assert_eq!(w("10011").count_zeros(), 2);
        assert_eq!(w("10011").letter(1), Some(1));
        assert_eq!(w("10011").letter(6), None);
    }

    fn word_string(max: usize) -> impl Strategy<Value = String> {
        proptest::collection::vec(prop_oneof![Just('0'), Just('1')], 0..max)
            .prop_map(|v| v.into_iter().collect())
    }

    fn set_strategy(len: usize) -> impl Strategy<Value = WordSet> {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), len), 0..6)
            .prop_map(move |ws| WordSet::from_words(len, ws.into_iter().map(Word::from_letters)).unwrap())
    }

    proptest! {
        #[test]
        fn concat_and_slice_agree_with_strings(a in word_string(150), b in word_string(150)) {
            let ab = w(&a).concat(&w(&b));
            let joined = format!("{a}{b}");
            prop_assert_eq!(format!("{ab}"), joined.clone());
            prop_assert_eq!(ab.len(), a.len() + b.len());
            for (x, y) in [(1, joined.len()), (joined.len() / 3 + 1, joined.len() / 2)] {
                if x <= y + 1 && y <= joined.len() && x >= 1 {
                    prop_assert_eq!(format!("{}", ab.slice(x, y).unwrap()), naive_slice(&joined, x, y));
                }
            }
        }

        #[test]
        fn slice_composition(s in word_string(140), a in 1usize..60, wlen in 0usize..60, a2 in 1usize..30, w2 in 0usize..30) {
            let word = w(&s);
            let b = a + wlen - 1;
            prop_assume!(b <= word.len() && a <= b + 1);
            let inner = word.slice(a, b).unwrap();
            let b2 = a2 + w2 - 1;
            prop_assume!(b2 <= inner.len() && a2 <= b2 + 1);
            prop_assert_eq!(inner.slice(a2, b2).unwrap(), word.slice(a + a2 - 1, a + b2 - 1).unwrap());
        }

        #[test]
        fn string_order_matches_word_order(a in word_string(130), b in word_string(130)) {
            prop_assert_eq!(w(&a).cmp(&w(&b)), a.cmp(&b));
        }

        #[test]
        fn product_is_associative_and_sized(u in set_strategy(3), v in set_strategy(2), x in set_strategy(4)) {
            let uv = u.product(&v);
            prop_assert_eq!(uv.len(), u.len() * v.len());
            prop_assert_eq!(uv.product(&x), u.product(&v.product(&x)));
            let rebuilt = WordSet::from_words(5, uv.iter().cloned()).unwrap();
            prop_assert_eq!(rebuilt, uv);
        }

        #[test]
        fn factor_sets_nest(s in set_strategy(9), k in 0usize..=9, k2 in 0usize..=9) {
            let (small, big) = if k <= k2 { (k, k2) } else { (k2, k) };
            prop_assert_eq!(s.factors(big).unwrap().factors(small).unwrap(), s.factors(small).unwrap());
        }

        #[test]
        fn factor_sets_distribute_over_union(s in set_strategy(8), t in set_strategy(8), k in 0usize..=8) {
            let lhs = s.union(&t).unwrap().factors(k).unwrap();
            let rhs = s.factors(k).unwrap().union(&t.factors(k).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dense_and_sparse_factor_paths_agree(s in set_strategy(40), k in 20usize..=30) {
            let direct = s.factors(k).unwrap();
            let mut acc = SparseAccumulator::new(k);
            for word in &s {
                for start in 0..=40 - k {
                    acc.push(word.extract(start, k));
                }
            }
            prop_assert_eq!(acc.finish(), direct);
        }

        #[test]
        fn prefix_counts_match_slices(s in set_strategy(70)) {
            let pre = s.prefix_counts();
            let suf = s.reversed().prefix_counts();
            for j in 0..=70 {
                prop_assert_eq!(pre[j], s.slice(1, j).unwrap().len());
                prop_assert_eq!(suf[j], s.slice(71 - j, 70).unwrap().len());
            }
            prop_assert_eq!(s.reversed().reversed(), s);
        }
    }
}
