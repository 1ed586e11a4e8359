//! Permutations in one-line notation, inversion counts, pattern containment
//! and the Lehmer-word bijection behind the online Mallows construction.
//!
//! Values are 1-based (`1..=n`); slices are indexed from 0 internally.

use std::fmt;
use std::str::FromStr;

use crate::error::{guard, Error, Result};

/// Largest `n` accepted by [`enumerate`] and [`enumerate_blocks`].
pub const MAX_ENUMERATE_N: usize = 14;

/// Longest generic pattern accepted by the naive containment checker.
pub const MAX_GENERIC_PATTERN_LEN: usize = 4;

/// A permutation of `[n]` stored as its one-line word `σ_1 σ_2 … σ_n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation, checking that `word` uses every value of `1..=n` once.
    pub fn new(word: Vec<u32>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n + 1];
        for &v in &word {
            let idx = v as usize;
            if idx == 0 || idx > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if seen[idx] {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
            seen[idx] = true;
        }
        Ok(Self { word })
    }

    pub(crate) fn from_word_unchecked(word: Vec<u32>) -> Self {
        debug_assert!(Self::new(word.clone()).is_ok());
        Self { word }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            word: (1..=n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.word
    }

    pub fn into_word(self) -> Vec<u32> {
        self.word
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.word[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.word
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Number of pairs `i < j` with `σ_i > σ_j`.
    pub fn inversions(&self) -> u64 {
        count_inversions(&self.word)
    }

    /// `σ_n … σ_1`.
    pub fn reverse(&self) -> Self {
        let mut word = self.word.clone();
        word.reverse();
        Self { word }
    }

    /// The functional inverse: `inverse()[σ_i] = i`.
    pub fn inverse(&self) -> Self {
        let mut word = vec![0u32; self.len()];
        for (i, &v) in self.word.iter().enumerate() {
            word[v as usize - 1] = i as u32 + 1;
        }
        Self { word }
    }

    /// `n + 1 - σ_i` at every position.
    pub fn complement(&self) -> Self {
        let n1 = self.len() as u32 + 1;
        Self {
            word: self.word.iter().map(|&v| n1 - v).collect(),
        }
    }

    /// Order-isomorphic standardization of the values at the given 0-based index range.
    ///
    /// For `σ = 32451`, positions `0..2` give `21` and `2..5` give `231`.
    pub fn restrict_positions(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            word: standardize(&self.word[range]),
        }
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        contains_in(&self.word, pattern)
    }

    pub fn avoids(&self, pattern: &Pattern) -> bool {
        !self.contains(pattern)
    }

    /// The right-displacement word `(x_1, …, x_n)`: `x_j` is the number of
    /// values smaller than `j` placed to the right of `j`.
    pub fn lehmer(&self) -> LehmerWord {
        let n = self.len();
        let pos = self.inverse();
        let mut fen = Fenwick::new(n);
        let mut x = vec![0u32; n];
        // Insert values in increasing order; x_j counts earlier values right of j.
        for j in 1..=n {
            let p = pos.word[j - 1] as usize;
            let placed = (j - 1) as u32;
            let left = fen.prefix(p);
            x[j - 1] = placed - left;
            fen.add(p);
        }
        LehmerWord { x }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

/// Digit string for `n <= 9`, space-separated integers otherwise.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for v in &self.word {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.word.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let word = if s.contains(char::is_whitespace) {
            s.split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Permutation::new(word)
    }
}

/// Relabels distinct values by rank, producing a word over `1..=len`.
pub fn standardize(values: &[u32]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by_key(|&i| values[i]);
    let mut out = vec![0u32; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    out
}

/// Inversion count of a word of distinct values in `1..=len`.
pub fn count_inversions(word: &[u32]) -> u64 {
    let n = word.len();
    if n <= 32 {
        let mut inv = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                inv += u64::from(word[i] > word[j]);
            }
        }
        return inv;
    }
    let mut fen = Fenwick::new(n);
    let mut inv = 0u64;
    for (seen, &v) in word.iter().enumerate() {
        inv += (seen as u32 - fen.prefix(v as usize)) as u64;
        fen.add(v as usize);
    }
    inv
}

struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, mut i: usize) {
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted indices in `1..=i`.
    fn prefix(&self, mut i: usize) -> u32 {
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Patterns

/// A pattern to avoid: one of the six elements of `S_3`, or a small generic pattern.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    P123,
    P132,
    P213,
    P231,
    P312,
    P321,
    /// Any pattern of length 2..=4 not covered by the tags, checked naively.
    Generic(Permutation),
}

impl Pattern {
    pub const S3: [Pattern; 6] = [
        Pattern::P123,
        Pattern::P132,
        Pattern::P213,
        Pattern::P231,
        Pattern::P312,
        Pattern::P321,
    ];

    /// Wraps an arbitrary pattern; length-3 words map to their tag.
    pub fn generic(p: Permutation) -> Result<Self> {
        let m = p.len();
        if m < 2 {
            return Err(Error::Domain(format!(
                "pattern length must be >= 2, got {m}"
            )));
        }
        guard("pattern length", m as u64, MAX_GENERIC_PATTERN_LEN as u64)?;
        if m == 3 {
            return Ok(Self::from_s3_word(p.as_slice()).expect("length-3 permutation"));
        }
        Ok(Pattern::Generic(p))
    }

    fn from_s3_word(w: &[u32]) -> Option<Self> {
        Some(match w {
            [1, 2, 3] => Pattern::P123,
            [1, 3, 2] => Pattern::P132,
            [2, 1, 3] => Pattern::P213,
            [2, 3, 1] => Pattern::P231,
            [3, 1, 2] => Pattern::P312,
            [3, 2, 1] => Pattern::P321,
            _ => return None,
        })
    }

    pub fn as_permutation(&self) -> Permutation {
        let w: &[u32] = match self {
            Pattern::P123 => &[1, 2, 3],
            Pattern::P132 => &[1, 3, 2],
            Pattern::P213 => &[2, 1, 3],
            Pattern::P231 => &[2, 3, 1],
            Pattern::P312 => &[3, 1, 2],
            Pattern::P321 => &[3, 2, 1],
            Pattern::Generic(p) => return p.clone(),
        };
        Permutation::from_word_unchecked(w.to_vec())
    }

    pub fn len(&self) -> usize {
        match self {
            Pattern::Generic(p) => p.len(),
            _ => 3,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index into [`Pattern::S3`] for tagged patterns.
    pub fn s3_index(&self) -> Option<usize> {
        Pattern::S3.iter().position(|t| t == self)
    }

    /// The pattern `τ^rev`; `σ` contains `τ` iff `σ^rev` contains `τ^rev`.
    pub fn reversed(&self) -> Self {
        match self {
            Pattern::P123 => Pattern::P321,
            Pattern::P321 => Pattern::P123,
            Pattern::P132 => Pattern::P231,
            Pattern::P231 => Pattern::P132,
            Pattern::P213 => Pattern::P312,
            Pattern::P312 => Pattern::P213,
            Pattern::Generic(p) => Pattern::Generic(p.reverse()),
        }
    }

    /// The pattern `τ^{-1}`; only 231 and 312 move among the tags.
    pub fn inverted(&self) -> Self {
        match self {
            Pattern::P231 => Pattern::P312,
            Pattern::P312 => Pattern::P231,
            Pattern::Generic(p) => Pattern::Generic(p.inverse()),
            t => t.clone(),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_permutation())
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pattern({self})")
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::generic(s.parse()?)
    }
}

/// Pattern containment on a raw word of distinct values.
///
/// A pattern longer than the word is never contained.
pub fn contains_in(word: &[u32], pattern: &Pattern) -> bool {
    if pattern.len() > word.len() {
        return false;
    }
    match pattern {
        Pattern::P123 => has_123(word.iter().map(|&v| i64::from(v))),
        Pattern::P321 => has_123(word.iter().map(|&v| -i64::from(v))),
        Pattern::P132 => has_132(word.iter().rev().map(|&v| i64::from(v))),
        Pattern::P231 => has_132(word.iter().map(|&v| i64::from(v))),
        Pattern::P312 => has_132(word.iter().rev().map(|&v| -i64::from(v))),
        Pattern::P213 => has_132(word.iter().map(|&v| -i64::from(v))),
        Pattern::Generic(p) => contains_naive(word, p.as_slice()),
    }
}

/// `a_i < a_j < a_k` for some `i < j < k`; single pass with the prefix minimum
/// and the smallest known middle of an ascent.
fn has_123(values: impl Iterator<Item = i64>) -> bool {
    let mut min = i64::MAX;
    let mut mid = i64::MAX;
    for v in values {
        if v > mid {
            return true;
        }
        if v > min {
            mid = mid.min(v);
        } else {
            min = v;
        }
    }
    false
}

/// Takes the values from right to left and detects a 132 occurrence
/// (`a_i < a_k < a_j`, `i < j < k`) with a decreasing stack; `third` is the
/// largest value already seen with a larger value to its left.
fn has_132(values_right_to_left: impl Iterator<Item = i64>) -> bool {
    let mut stack: Vec<i64> = Vec::new();
    let mut third = i64::MIN;
    for v in values_right_to_left {
        if v < third {
            return true;
        }
        while let Some(&top) = stack.last() {
            if top < v {
                third = top;
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(v);
    }
    false
}

/// Brute-force containment over all index subsets, `O(n^m)`.
pub fn contains_naive(word: &[u32], pattern: &[u32]) -> bool {
    let m = pattern.len();
    let n = word.len();
    if m > n {
        return false;
    }
    if m == 0 {
        return true;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    'outer: loop {
        let ok = (0..m).all(|a| {
            (a + 1..m).all(|b| (word[idx[a]] < word[idx[b]]) == (pattern[a] < pattern[b]))
        });
        if ok {
            return true;
        }
        for i in (0..m).rev() {
            if idx[i] < n - m + i {
                idx[i] += 1;
                for k in i + 1..m {
                    idx[k] = idx[k - 1] + 1;
                }
                continue 'outer;
            }
        }
        return false;
    }
}

// ---------------------------------------------------------------------------
// Lehmer words

/// Right-displacement word `(x_1, …, x_n)` with `0 <= x_j <= j - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LehmerWord {
    x: Vec<u32>,
}

impl LehmerWord {
    pub fn new(x: Vec<u32>) -> Result<Self> {
        for (i, &v) in x.iter().enumerate() {
            if v as usize > i {
                return Err(Error::Domain(format!(
                    "Lehmer entry x_{} = {v} outside [0, {i}]",
                    i + 1
                )));
            }
        }
        Ok(Self { x })
    }

    pub(crate) fn from_vec_unchecked(x: Vec<u32>) -> Self {
        Self { x }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.x.iter().map(|&v| u64::from(v)).sum()
    }

    /// Places `1, 2, …, n` in turn, `j` going where exactly `x_j` of the
    /// already placed values sit to its right.
    pub fn decode(&self) -> Permutation {
        let mut word: Vec<u32> = Vec::with_capacity(self.x.len());
        for (i, &xj) in self.x.iter().enumerate() {
            let at = i - xj as usize;
            word.insert(at, i as u32 + 1);
        }
        Permutation::from_word_unchecked(word)
    }

    /// Every word of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = LehmerWord> {
        let total: u64 = (1..=n as u64).product();
        let mut cur = vec![0u32; n];
        (0..total).map(move |k| {
            if k > 0 {
                for j in (0..n).rev() {
                    if (cur[j] as usize) < j {
                        cur[j] += 1;
                        break;
                    }
                    cur[j] = 0;
                }
            }
            LehmerWord { x: cur.clone() }
        })
    }
}

// ---------------------------------------------------------------------------
// Enumeration

/// `n!` for `n <= 20`.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The permutation of rank `rank` in lexicographic order.
pub fn unrank(n: usize, mut rank: u64) -> Permutation {
    let mut avail: Vec<u32> = (1..=n as u32).collect();
    let mut word = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let f = factorial(i);
        let d = (rank / f) as usize;
        rank %= f;
        word.push(avail.remove(d));
    }
    Permutation::from_word_unchecked(word)
}

/// Lexicographic successor in place; returns `false` at the last permutation.
pub fn next_permutation(word: &mut [u32]) -> bool {
    let n = word.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && word[i - 1] >= word[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while word[j] <= word[i - 1] {
        j -= 1;
    }
    word.swap(i - 1, j);
    word[i..].reverse();
    true
}

/// A contiguous block of lexicographic ranks `start..end` in `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermBlock {
    pub n: usize,
    pub start: u64,
    pub end: u64,
}

impl PermBlock {
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Visits each word of the block without allocating per permutation.
    pub fn for_each_word(&self, mut f: impl FnMut(&[u32])) {
        if self.is_empty() {
            return;
        }
        let mut word = unrank(self.n, self.start).into_word();
        f(&word);
        for _ in self.start + 1..self.end {
            next_permutation(&mut word);
            f(&word);
        }
    }

    pub fn iter(&self) -> PermIter {
        let word = if self.is_empty() {
            Vec::new()
        } else {
            unrank(self.n, self.start).into_word()
        };
        PermIter {
            word,
            remaining: self.len(),
            first: true,
        }
    }
}

/// Iterator over a [`PermBlock`].
pub struct PermIter {
    word: Vec<u32>,
    remaining: u64,
    first: bool,
}

impl Iterator for PermIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        if !self.first {
            next_permutation(&mut self.word);
        }
        self.first = false;
        self.remaining -= 1;
        Some(Permutation::from_word_unchecked(self.word.clone()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for PermIter {}

/// All `n!` permutations of `[n]` in lexicographic order (n = 0 yields the empty permutation).
pub fn enumerate(n: usize) -> Result<PermIter> {
    guard("enumeration n", n as u64, MAX_ENUMERATE_N as u64)?;
    Ok(PermBlock {
        n,
        start: 0,
        end: factorial(n),
    }
    .iter())
}

/// Splits the lexicographic enumeration of `S_n` into `k` contiguous blocks
/// whose sizes differ by at most one. Concatenating the blocks in order gives
/// [`enumerate`].
pub fn enumerate_blocks(n: usize, k: usize) -> Result<Vec<PermBlock>> {
    guard("enumeration n", n as u64, MAX_ENUMERATE_N as u64)?;
    if k == 0 {
        return Err(Error::Domain("block count must be positive".into()));
    }
    let total = factorial(n);
    let k = k as u64;
    let (base, rem) = (total / k, total % k);
    let mut start = 0;
    Ok((0..k)
        .map(|i| {
            let len = base + u64::from(i < rem);
            let b = PermBlock {
                n,
                start,
                end: start + len,
            };
            start += len;
            b
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(p("3214").inversions(), 3);
        assert_eq!(p("321").inversions(), 3);
        assert_eq!(Permutation::identity(9).inversions(), 0);
        assert_eq!(Permutation::identity(0).inversions(), 0);
    }

    #[test]
    fn fenwick_inversions_match_quadratic() {
        let mut w: Vec<u32> = (1..=60).rev().collect();
        assert_eq!(count_inversions(&w), 60 * 59 / 2);
        w.swap(3, 40);
        let naive: u64 = (0..60)
            .flat_map(|i| (i + 1..60).map(move |j| (i, j)))
            .filter(|&(i, j)| w[i] > w[j])
            .count() as u64;
        assert_eq!(count_inversions(&w), naive);
    }

    #[test]
    fn containment_examples() {
        assert!(!p("53412").contains(&Pattern::P123));
        assert!(p("51324").contains(&Pattern::P123));
        for t in &Pattern::S3 {
            assert!(!p("21").contains(t));
            assert!(p("21").avoids(t));
        }
    }

    #[test]
    fn reverse_and_inverse() {
        assert_eq!(p("3214").reverse(), p("4123"));
        assert_eq!(p("231").inverse(), p("312"));
        assert_eq!(Permutation::identity(5).inverse(), Permutation::identity(5));
    }

    #[test]
    fn restrict_positions_example() {
        let s = p("32451");
        assert_eq!(s.restrict_positions(0..2), p("21"));
        assert_eq!(s.restrict_positions(2..5), p("231"));
    }

    #[test]
    fn lehmer_examples() {
        let x = LehmerWord::new(vec![0, 1, 2, 0]).unwrap();
        assert_eq!(x.decode(), p("3214"));
        assert_eq!(p("3214").lehmer(), x);
        assert_eq!(
            LehmerWord::new(vec![0; 7]).unwrap().decode(),
            Permutation::identity(7)
        );
        assert!(LehmerWord::new(vec![0, 2]).is_err());
        assert!(LehmerWord::new(vec![1]).is_err());
    }

    #[test]
    fn lehmer_roundtrip_n4() {
        let words: Vec<_> = LehmerWord::all(4).collect();
        assert_eq!(words.len(), 24);
        for x in words {
            assert_eq!(x.decode().lehmer(), x);
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate(3).unwrap().count(), 6);
        let empty: Vec<_> = enumerate(0).unwrap().collect();
        assert_eq!(empty, vec![Permutation::identity(0)]);
        let avoiders = enumerate(4)
            .unwrap()
            .filter(|s| s.avoids(&Pattern::P312))
            .count();
        assert_eq!(avoiders, 14);
        assert!(matches!(enumerate(15), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn enumerate_is_lexicographic_and_blocks_concatenate() {
        let all: Vec<_> = enumerate(5).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for k in [1, 3, 7, 120, 200] {
            let joined: Vec<_> = enumerate_blocks(5, k)
                .unwrap()
                .iter()
                .flat_map(|b| b.iter())
                .collect();
            assert_eq!(joined, all, "k = {k}");
        }
        for (r, s) in all.iter().enumerate() {
            assert_eq!(&unrank(5, r as u64), s);
        }
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(p("3214").to_string(), "3214");
        let big = Permutation::identity(11).reverse();
        let s = big.to_string();
        assert_eq!(s, "11 10 9 8 7 6 5 4 3 2 1");
        assert_eq!(s.parse::<Permutation>().unwrap(), big);
        assert_eq!("3 1 2".parse::<Permutation>().unwrap(), p("312"));
        assert!("3 3 1".parse::<Permutation>().is_err());
        assert!("12a".parse::<Permutation>().is_err());
    }

    #[test]
    fn generic_patterns() {
        assert_eq!(Pattern::generic(p("231")).unwrap(), Pattern::P231);
        assert!(Pattern::generic(p("1")).is_err());
        assert!(Pattern::generic(p("12345")).is_err());
        let t = Pattern::generic(p("2143")).unwrap();
        assert!(p("21543").contains(&t));
        assert!(!p("1234").contains(&t));
        assert!(p("21").contains(&Pattern::generic(p("21")).unwrap()));
        assert!(!p("12").contains(&Pattern::generic(p("21")).unwrap()));
    }

    #[test]
    fn tag_maps_are_involutions() {
        for t in &Pattern::S3 {
            assert_eq!(t.reversed().reversed(), *t);
            assert_eq!(t.inverted().inverted(), *t);
            assert_eq!(t.reversed().as_permutation(), t.as_permutation().reverse());
            assert_eq!(t.inverted().as_permutation(), t.as_permutation().inverse());
        }
        assert_eq!(Pattern::P312.inverted(), Pattern::P231);
        assert_eq!(Pattern::P132.inverted(), Pattern::P132);
    }
}
