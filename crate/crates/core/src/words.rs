//! Label words, the walks they describe, and path surgery on them.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::bitset::VisitedSet;
use crate::error::{GroupError, PathError};
use crate::group::{
    identity, inverse, labels_commute, multiply, rank, EdgeLabel, Element, GroupParams,
};

/// An ordered list of edge labels; read from a start vertex it is a walk.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<EdgeLabel>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn labels(&self) -> &[EdgeLabel] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<EdgeLabel> {
        self.0
    }

    pub fn push(&mut self, label: EdgeLabel) {
        self.0.push(label);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    /// `k` copies laid end to end.
    pub fn power(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// The word with its final label removed.
    pub fn pound(&self) -> Result<Word, PathError> {
        match self.0.split_last() {
            Some((_, head)) => Ok(Word(head.to_vec())),
            None => Err(PathError::EmptyWord),
        }
    }

    /// The word walked backwards: reversed, each label inverted.
    pub fn reverse_inverted(&self, params: &GroupParams) -> Word {
        self.0.iter().rev().map(|l| l.inverse(params)).collect()
    }

    /// Cyclic rotation so that position `k` comes first.
    pub fn rotated(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        let len = v.len();
        if len > 0 {
            v.rotate_left(k % len);
        }
        Word(v)
    }

    pub fn validate(&self, params: &GroupParams) -> Result<(), GroupError> {
        match self.0.iter().find(|l| !l.is_available(params)) {
            Some(l) => Err(GroupError::UnavailableGenerator {
                label: l.to_string(),
                group: params.to_string(),
            }),
            None => Ok(()),
        }
    }
}

impl Deref for Word {
    type Target = [EdgeLabel];
    fn deref(&self) -> &[EdgeLabel] {
        &self.0
    }
}

impl From<Vec<EdgeLabel>> for Word {
    fn from(v: Vec<EdgeLabel>) -> Self {
        Word(v)
    }
}

impl FromIterator<EdgeLabel> for Word {
    fn from_iter<I: IntoIterator<Item = EdgeLabel>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `[x; k]` as a word.
pub fn repeat(label: EdgeLabel, k: usize) -> Word {
    Word(vec![label; k])
}

/// A word read from a fixed start vertex.
#[derive(Clone, Debug)]
pub struct Walk {
    pub start: Element,
    pub word: Word,
    pub endpoint: Element,
}

impl Walk {
    pub fn new(params: &GroupParams, start: Element, word: Word) -> Self {
        let endpoint = evaluate(params, &start, &word);
        Walk {
            start,
            word,
            endpoint,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.word.len() + 1
    }

    /// All visited vertices in order, including the start.
    pub fn vertices(&self, params: &GroupParams) -> Vec<Element> {
        vertices(params, &self.start, &self.word)
    }
}

/// `start * l_1 * l_2 * ... * l_k`.
pub fn evaluate(params: &GroupParams, start: &Element, word: &[EdgeLabel]) -> Element {
    let mut x = start.clone();
    for &l in word {
        x.apply(params, l);
    }
    x
}

pub fn vertices(params: &GroupParams, start: &Element, word: &[EdgeLabel]) -> Vec<Element> {
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut x = start.clone();
    out.push(x.clone());
    for &l in word {
        x.apply(params, l);
        out.push(x.clone());
    }
    out
}

/// Result of a self-avoidance test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Avoidance {
    SelfAvoiding,
    /// Vertex index (0 = start) at which an earlier vertex recurs.
    Repeats { index: usize, vertex: Element },
}

impl Avoidance {
    pub fn holds(&self) -> bool {
        matches!(self, Avoidance::SelfAvoiding)
    }
}

pub fn is_self_avoiding(params: &GroupParams, start: &Element, word: &[EdgeLabel]) -> Avoidance {
    let mut seen = VisitedSet::new(params.order());
    let mut x = start.clone();
    seen.insert(rank(params, &x));
    for (i, &l) in word.iter().enumerate() {
        x.apply(params, l);
        if !seen.insert(rank(params, &x)) {
            return Avoidance::Repeats {
                index: i + 1,
                vertex: x,
            };
        }
    }
    Avoidance::SelfAvoiding
}

/// Self-avoidance of `block^repetitions` minus its last label, decided from
/// the block alone: with `v` the block product and `w_i` its proper prefixes,
/// the walk is self-avoiding iff `v^m w_i = w_j` for `0 <= m < repetitions`
/// forces `m = 0` and `i = j`.
pub fn coset_self_avoidance_check(
    params: &GroupParams,
    block: &[EdgeLabel],
    repetitions: usize,
) -> bool {
    assert!(!block.is_empty() && repetitions >= 1);
    let id = identity(params);
    let prefixes = vertices(params, &id, &block[..block.len() - 1]);
    let v = evaluate(params, &id, block);
    let index: HashMap<u64, usize> = prefixes
        .iter()
        .enumerate()
        .map(|(j, w)| (rank(params, w), j))
        .collect();
    if index.len() != prefixes.len() {
        // two prefixes already coincide (m = 0, i != j)
        return false;
    }
    let mut vm = id;
    for m in 0..repetitions {
        if m > 0 {
            vm = multiply(params, &vm, &v).expect("same params");
        }
        for (i, w) in prefixes.iter().enumerate() {
            let x = multiply(params, &vm, w).expect("same params");
            if let Some(&j) = index.get(&rank(params, &x)) {
                if m != 0 || i != j {
                    return false;
                }
            }
        }
    }
    true
}

/// Least `k >= 1` with `x^k = 1`.
pub fn element_order(params: &GroupParams, x: &Element) -> u64 {
    let mut y = x.clone();
    let mut k = 1;
    while !y.is_identity() {
        y = multiply(params, &y, x).expect("same params");
        k += 1;
    }
    k
}

/// A flipped path together with where the flip pivoted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flip {
    pub word: Word,
    /// Index `k` of the vertex joined to the old endpoint.
    pub pivot: usize,
    /// The pivot was the penultimate vertex, so the input came back unchanged.
    pub degenerate: bool,
}

/// Replaces the tail of a self-avoiding path by its reversal, attached to the
/// old endpoint through an edge labelled `label`.
///
/// With vertices `w_0, ..., w_n` and `w_k * label = w_n`, the result is
/// `[l_1, ..., l_k, label, l_n^-1, ..., l_{k+2}^-1]`, which ends at `w_{k+1}`.
pub fn flip(
    params: &GroupParams,
    start: &Element,
    word: &[EdgeLabel],
    label: EdgeLabel,
) -> Result<Flip, PathError> {
    let mut positions = HashMap::with_capacity(word.len() + 1);
    let mut x = start.clone();
    positions.insert(rank(params, &x), 0usize);
    for (i, &l) in word.iter().enumerate() {
        x.apply(params, l);
        if positions.insert(rank(params, &x), i + 1).is_some() {
            return Err(PathError::NotSelfAvoiding {
                step: i + 1,
                vertex: x.to_string(),
            });
        }
    }
    let n = word.len();
    let mut target = x;
    target.apply(params, label.inverse(params));
    let k = match positions.get(&rank(params, &target)) {
        Some(&k) if k < n => k,
        _ => {
            return Err(PathError::FlipTargetMissing {
                target: target.to_string(),
            })
        }
    };
    if k + 1 == n {
        return Ok(Flip {
            word: Word(word.to_vec()),
            pivot: k,
            degenerate: true,
        });
    }
    let mut w = Vec::with_capacity(n);
    w.extend_from_slice(&word[..k]);
    w.push(label);
    w.extend(word[k + 1..].iter().rev().map(|l| l.inverse(params)));
    debug_assert_eq!(w.len(), n);
    Ok(Flip {
        word: Word(w),
        pivot: k,
        degenerate: false,
    })
}

/// Number of adjacent label pairs of which neither commutes with `r`.
///
/// With `cyclic`, the pair formed by the last and first labels counts too.
pub fn badness(
    params: &GroupParams,
    word: &[EdgeLabel],
    r: EdgeLabel,
    cyclic: bool,
) -> Result<usize, GroupError> {
    let mut commutes = HashMap::new();
    let mut ok = |l: EdgeLabel| -> Result<bool, GroupError> {
        if let Some(&c) = commutes.get(&l) {
            return Ok(c);
        }
        let c = labels_commute(params, l, r)?;
        commutes.insert(l, c);
        Ok(c)
    };
    let mut bad = 0;
    for pair in word.windows(2) {
        if !ok(pair[0])? && !ok(pair[1])? {
            bad += 1;
        }
    }
    if cyclic && word.len() >= 2 {
        let (first, last) = (word[0], word[word.len() - 1]);
        if !ok(last)? && !ok(first)? {
            bad += 1;
        }
    }
    Ok(bad)
}

/// `g^-1 h`, handy for coset tests.
pub fn quotient(params: &GroupParams, g: &Element, h: &Element) -> Element {
    multiply(params, &inverse(params, g), h).expect("same params")
}
