//! One-sided subshifts of finite type presented by a 0/1 transition matrix,
//! finite admissible words, and symbolic points (eventually periodic, or a
//! finite non-repeating prefix of an aperiodic point).
//!
//! Words over alphabets with at most ten symbols render as plain digit
//! strings ("0102"); larger alphabets use comma-separated symbols ("0,17,3").

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::STATE_CAP;

/// A finite word of symbols. Ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First `n` symbols as a new word. Panics if the word is shorter.
    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    /// Concatenation `self . other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.to_vec())
    }
}

impl std::borrow::Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().any(|&s| s > 9) {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))
        } else {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(Word(Vec::new()));
        }
        let symbols: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|p| {
                    p.trim().parse::<u8>().map_err(|_| Error::InadmissibleWord {
                        word: s.to_string(),
                        reason: format!("bad symbol {p:?}"),
                    })
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::InadmissibleWord {
                        word: s.to_string(),
                        reason: format!("bad symbol {c:?}"),
                    })
                })
                .collect::<Result<_>>()?
        };
        Ok(Word(symbols))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A one-sided subshift of finite type on `alphabet_size` symbols.
///
/// The transition matrix has entry 1 at (a, b) when the two-letter word `ab`
/// is admissible. Every row and every column contains a 1, so no symbol is
/// globally dead in either direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subshift {
    transition: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct SubshiftRepr {
    alphabet_size: usize,
    transition: Vec<Vec<u8>>,
}

impl Serialize for Subshift {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SubshiftRepr {
            alphabet_size: self.alphabet_size(),
            transition: self.transition.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Subshift {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = SubshiftRepr::deserialize(de)?;
        if repr.alphabet_size != repr.transition.len() {
            return Err(serde::de::Error::custom(format!(
                "alphabet_size {} does not match transition dimension {}",
                repr.alphabet_size,
                repr.transition.len()
            )));
        }
        Subshift::new(repr.transition).map_err(serde::de::Error::custom)
    }
}

impl Subshift {
    pub fn new(transition: Vec<Vec<u8>>) -> Result<Self> {
        let l = transition.len();
        if l == 0 {
            return Err(Error::InvalidSubshift("empty alphabet".into()));
        }
        if l > 256 {
            return Err(Error::InvalidSubshift(format!("alphabet size {l} exceeds 256")));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != l {
                return Err(Error::InvalidSubshift(format!(
                    "row {i} has length {} in a {l}-symbol shift",
                    row.len()
                )));
            }
            if row.iter().any(|&e| e > 1) {
                return Err(Error::InvalidSubshift(format!("row {i} has a non-0/1 entry")));
            }
        }
        for a in 0..l {
            if transition[a].iter().all(|&e| e == 0) {
                return Err(Error::InvalidSubshift(format!("symbol {a} has no successor")));
            }
            if (0..l).all(|b| transition[b][a] == 0) {
                return Err(Error::InvalidSubshift(format!("symbol {a} has no predecessor")));
            }
        }
        Ok(Subshift { transition })
    }

    /// Full shift on `l` symbols: every transition allowed.
    pub fn full_shift(l: usize) -> Self {
        Subshift {
            transition: vec![vec![1; l]; l],
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.transition.len()
    }

    pub fn is_allowed(&self, a: u8, b: u8) -> bool {
        self.transition[a as usize][b as usize] == 1
    }

    pub fn transition(&self) -> &[Vec<u8>] {
        &self.transition
    }

    /// Successors of symbol `a`, in ascending order.
    pub fn successors(&self, a: u8) -> impl Iterator<Item = u8> + '_ {
        self.transition[a as usize]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 1)
            .map(|(b, _)| b as u8)
    }

    /// Predecessors of symbol `b`, in ascending order.
    pub fn predecessors(&self, b: u8) -> impl Iterator<Item = u8> + '_ {
        (0..self.alphabet_size() as u16)
            .map(|a| a as u8)
            .filter(move |&a| self.is_allowed(a, b))
    }

    /// Topological mixing test. Returns the least `d` with `A^d > 0`
    /// entrywise, or `None` if no such `d` exists. Primitivity of an `l x l`
    /// matrix is witnessed by `d <= (l-1)^2 + 1` when it is witnessed at all,
    /// so the search stops there.
    pub fn is_mixing(&self) -> Option<usize> {
        let l = self.alphabet_size();
        let bound = (l - 1) * (l - 1) + 1;
        let base: Vec<Vec<bool>> = self
            .transition
            .iter()
            .map(|row| row.iter().map(|&e| e == 1).collect())
            .collect();
        let mut power = base.clone();
        for d in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&e| e)) {
                return Some(d);
            }
            power = bool_mat_mul(&power, &base);
        }
        None
    }

    pub fn is_admissible(&self, word: &Word) -> bool {
        let s = word.symbols();
        if s.iter().any(|&a| (a as usize) >= self.alphabet_size()) {
            return false;
        }
        s.windows(2).all(|p| self.is_allowed(p[0], p[1]))
    }

    fn require_admissible(&self, word: &Word) -> Result<()> {
        if self.is_admissible(word) {
            Ok(())
        } else {
            Err(Error::InadmissibleWord {
                word: word.to_string(),
                reason: "forbidden transition or out-of-range symbol".into(),
            })
        }
    }

    /// Number of admissible words of length `depth`, saturating at `cap + 1`.
    fn count_words_capped(&self, depth: usize, cap: usize) -> usize {
        let l = self.alphabet_size();
        let mut counts = vec![1u64; l];
        let cap = cap as u64;
        for _ in 1..depth {
            let mut next = vec![0u64; l];
            for a in 0..l {
                let mut acc: u64 = 0;
                for b in 0..l {
                    if self.transition[a][b] == 1 {
                        acc = acc.saturating_add(counts[b]);
                    }
                }
                next[a] = acc.min(cap + 1);
            }
            counts = next;
            if counts.iter().copied().sum::<u64>().min(cap + 1) > cap && depth > 1 {
                // Totals only shrink as length grows for no subshift, so once
                // the per-start counts blow past the cap we can stop early.
                break;
            }
        }
        counts
            .iter()
            .fold(0u64, |acc, &c| acc.saturating_add(c))
            .min(cap + 1) as usize
    }

    /// All admissible words of length `depth` in lexicographic order,
    /// together with a word -> index map.
    pub fn enumerate_cylinders(&self, depth: usize) -> Result<CylinderBasis> {
        if depth == 0 {
            return Err(Error::Config("cylinder depth must be at least 1".into()));
        }
        let count = self.count_words_capped(depth, STATE_CAP);
        if count > STATE_CAP {
            return Err(Error::StateCapExceeded {
                depth,
                count,
                cap: STATE_CAP,
            });
        }
        let l = self.alphabet_size();
        let mut level: Vec<Vec<u8>> = (0..l as u16).map(|a| vec![a as u8]).collect();
        for _ in 1..depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for w in &level {
                let last = *w.last().unwrap();
                for b in self.successors(last) {
                    let mut ext = w.clone();
                    ext.push(b);
                    next.push(ext);
                }
            }
            level = next;
        }
        Ok(CylinderBasis::from_words(
            depth,
            level.into_iter().map(Word::new).collect(),
        ))
    }

    /// All admissible extensions of `word` to length `target_depth`, in
    /// lexicographic order.
    pub fn refine_cylinder(&self, word: &Word, target_depth: usize) -> Result<Vec<Word>> {
        self.require_admissible(word)?;
        if target_depth < word.len() {
            return Err(Error::Config(format!(
                "target depth {target_depth} is shorter than the word ({})",
                word.len()
            )));
        }
        let mut level = vec![word.symbols().to_vec()];
        for _ in word.len()..target_depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for w in &level {
                let last = *w.last().expect("refine_cylinder requires a nonempty word");
                for b in self.successors(last) {
                    let mut ext = w.clone();
                    ext.push(b);
                    next.push(ext);
                }
                if next.len() > STATE_CAP {
                    return Err(Error::StateCapExceeded {
                        depth: target_depth,
                        count: next.len(),
                        cap: STATE_CAP,
                    });
                }
            }
            level = next;
        }
        Ok(level.into_iter().map(Word::new).collect())
    }

    /// Lexicographically least admissible extension of `word` to length
    /// `target_depth`. Greedy choice of the smallest successor is least
    /// overall, and a successor always exists because every row has a 1.
    pub fn lex_min_extension(&self, word: &Word, target_depth: usize) -> Result<Word> {
        self.require_admissible(word)?;
        if word.is_empty() {
            return Err(Error::Config("cannot extend the empty word".into()));
        }
        let mut v = word.symbols().to_vec();
        while v.len() < target_depth {
            let last = *v.last().unwrap();
            let next = self
                .successors(last)
                .next()
                .expect("every symbol has a successor");
            v.push(next);
        }
        Ok(Word(v))
    }

    /// Checks that every transition visible in `point` (including the wrap of
    /// a periodic block) is admissible.
    pub fn validate_point(&self, point: &SymbolicPoint) -> Result<()> {
        let check = |w: &Word| self.require_admissible(w);
        match point {
            SymbolicPoint::EventuallyPeriodic { preperiod, block } => {
                check(preperiod)?;
                check(block)?;
                let first = block.symbols()[0];
                let last = *block.symbols().last().unwrap();
                if !self.is_allowed(last, first) {
                    return Err(Error::InadmissibleWord {
                        word: block.to_string(),
                        reason: "periodic wrap is forbidden".into(),
                    });
                }
                if let Some(&p_last) = preperiod.symbols().last() {
                    if !self.is_allowed(p_last, first) {
                        return Err(Error::InadmissibleWord {
                            word: format!("{preperiod}|{block}"),
                            reason: "preperiod-to-block junction is forbidden".into(),
                        });
                    }
                }
                Ok(())
            }
            SymbolicPoint::Prefix { digits } => check(digits),
        }
    }
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        out[i][j] = true;
                    }
                }
            }
        }
    }
    out
}

/// The admissible words of a fixed length, in lexicographic order, with an
/// index map for O(1) lookup.
#[derive(Debug, Clone)]
pub struct CylinderBasis {
    depth: usize,
    words: Vec<Word>,
    index: HashMap<Vec<u8>, u32>,
}

impl CylinderBasis {
    fn from_words(depth: usize, words: Vec<Word>) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.symbols().to_vec(), i as u32))
            .collect();
        CylinderBasis { depth, words, index }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn position(&self, symbols: &[u8]) -> Option<usize> {
        self.index.get(symbols).map(|&i| i as usize)
    }
}

/// A point of the shift space described by finitely much data: either an
/// eventually periodic sequence `preperiod . block^inf`, or a long
/// non-repeating prefix of a point that is known (or flagged) to be
/// non-periodic.
///
/// Eventually periodic points are kept in canonical form: the block is
/// primitive (not a power of a shorter word) and the preperiod is as short as
/// possible. A point is then periodic exactly when the preperiod is empty,
/// and the prime period is the block length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub enum SymbolicPoint {
    EventuallyPeriodic { preperiod: Word, block: Word },
    Prefix { digits: Word },
}

/// Serialization surface for [`SymbolicPoint`]; deserialization re-runs the
/// canonicalizing constructors.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PointRepr {
    Periodic { block: Word },
    EventuallyPeriodic { preperiod: Word, block: Word },
    Prefix { digits: Word },
}

impl TryFrom<PointRepr> for SymbolicPoint {
    type Error = Error;

    fn try_from(repr: PointRepr) -> Result<Self> {
        match repr {
            PointRepr::Periodic { block } => SymbolicPoint::periodic(block),
            PointRepr::EventuallyPeriodic { preperiod, block } => {
                SymbolicPoint::eventually_periodic(preperiod, block)
            }
            PointRepr::Prefix { digits } => Ok(SymbolicPoint::aperiodic_prefix(digits)),
        }
    }
}

impl From<SymbolicPoint> for PointRepr {
    fn from(point: SymbolicPoint) -> Self {
        match point {
            SymbolicPoint::EventuallyPeriodic { preperiod, block } if preperiod.is_empty() => {
                PointRepr::Periodic { block }
            }
            SymbolicPoint::EventuallyPeriodic { preperiod, block } => {
                PointRepr::EventuallyPeriodic { preperiod, block }
            }
            SymbolicPoint::Prefix { digits } => PointRepr::Prefix { digits },
        }
    }
}

impl SymbolicPoint {
    /// Purely periodic point `block^inf`.
    pub fn periodic(block: Word) -> Result<Self> {
        Self::eventually_periodic(Word::new(Vec::new()), block)
    }

    /// Eventually periodic point, canonicalized.
    pub fn eventually_periodic(preperiod: Word, block: Word) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Config("periodic block must be nonempty".into()));
        }
        let mut block = primitive_root(block.symbols()).to_vec();
        let mut pre = preperiod.symbols().to_vec();
        // Absorb preperiod symbols that merely restate the tail of the block:
        // `p . B^inf` with last(p) == last(B) is also `p' . B'^inf` with B'
        // the right rotation of B.
        while let (Some(&pl), Some(&bl)) = (pre.last(), block.last()) {
            if pl != bl {
                break;
            }
            pre.pop();
            block.rotate_right(1);
        }
        Ok(SymbolicPoint::EventuallyPeriodic {
            preperiod: Word::new(pre),
            block: Word::new(block),
        })
    }

    /// A finite prefix of a point flagged as non-periodic.
    pub fn aperiodic_prefix(digits: Word) -> Self {
        SymbolicPoint::Prefix { digits }
    }

    /// Prefix of the binary Champernowne sequence 1 10 11 100 101 ... ,
    /// a standard concrete non-periodic point of the full 2-shift.
    pub fn binary_champernowne(len: usize) -> Self {
        let mut digits = Vec::with_capacity(len);
        let mut n: u64 = 1;
        while digits.len() < len {
            let bits = 64 - n.leading_zeros();
            for i in (0..bits).rev() {
                if digits.len() == len {
                    break;
                }
                digits.push(((n >> i) & 1) as u8);
            }
            n += 1;
        }
        SymbolicPoint::Prefix {
            digits: Word::new(digits),
        }
    }

    /// Symbol at position `i`, or `None` when the point only carries finitely
    /// many digits and `i` is past them.
    pub fn symbol(&self, i: usize) -> Option<u8> {
        match self {
            SymbolicPoint::EventuallyPeriodic { preperiod, block } => {
                let p = preperiod.len();
                if i < p {
                    Some(preperiod.symbols()[i])
                } else {
                    Some(block.symbols()[(i - p) % block.len()])
                }
            }
            SymbolicPoint::Prefix { digits } => digits.symbols().get(i).copied(),
        }
    }

    /// First `n` symbols.
    pub fn prefix(&self, n: usize) -> Result<Word> {
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            match self.symbol(i) {
                Some(s) => v.push(s),
                None => {
                    return Err(Error::InsufficientDigits {
                        needed: n,
                        available: self.available_digits().unwrap_or(0),
                    })
                }
            }
        }
        Ok(Word::new(v))
    }

    /// Number of known digits; `None` means all of them.
    pub fn available_digits(&self) -> Option<usize> {
        match self {
            SymbolicPoint::EventuallyPeriodic { .. } => None,
            SymbolicPoint::Prefix { digits } => Some(digits.len()),
        }
    }

    /// Least `p >= 1` with `shift^p(z) = z`, or `None` when the point is not
    /// periodic (nonempty preperiod, or finite-prefix data).
    pub fn prime_period(&self) -> Option<usize> {
        match self {
            SymbolicPoint::EventuallyPeriodic { preperiod, block } if preperiod.is_empty() => {
                Some(block.len())
            }
            _ => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.prime_period().is_some()
    }
}

/// Shortest word whose repetition gives `w` (the primitive root).
fn primitive_root(w: &[u8]) -> &[u8] {
    let m = w.len();
    for p in 1..=m {
        if m % p == 0 && w.iter().enumerate().all(|(i, &s)| s == w[i % p]) {
            return &w[..p];
        }
    }
    w
}
