//! Finite words over a small alphabet: prefix order, antichains and
//! multiplicative weight systems.
//!
//! Words index the cylinder sets of an iterated function system. Letters are
//! 1-based everywhere, matching the usual indexing `f_1, …, f_N`; the empty
//! word is the tree root. A set of pairwise incomparable words is an
//! antichain; a maximal antichain cuts every infinite branch exactly once.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::{Error, Rational, Result};

/// A finite word over the alphabet `1..=alphabet`.
///
/// Ordering is lexicographic with prefixes first, so sorting a slice of
/// words brings every word next to its extensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: u8,
    letters: Vec<u8>,
}

/// How two words over the same alphabet relate in the prefix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    /// `self` is a strict prefix of the other word.
    Prefix,
    /// The other word is a strict prefix of `self`.
    Extension,
    Incomparable,
}

impl Word {
    /// The empty word (tree root).
    pub fn empty(alphabet: u8) -> Result<Word> {
        if alphabet == 0 {
            return Err(Error::BadParameter("alphabet must be non-empty".into()));
        }
        Ok(Word {
            alphabet,
            letters: Vec::new(),
        })
    }

    pub fn new(alphabet: u8, letters: &[u8]) -> Result<Word> {
        let mut word = Word::empty(alphabet)?;
        for &letter in letters {
            word = word.child(letter)?;
        }
        Ok(word)
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Extends by one letter.
    pub fn child(&self, letter: u8) -> Result<Word> {
        if letter == 0 || letter > self.alphabet {
            return Err(Error::LetterOutOfRange {
                letter,
                alphabet: self.alphabet,
            });
        }
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(letter);
        Ok(Word {
            alphabet: self.alphabet,
            letters,
        })
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.check_alphabet(other)?;
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Ok(Word {
            alphabet: self.alphabet,
            letters,
        })
    }

    /// Drops the last letter; the parent of a one-letter word is the empty word.
    pub fn parent(&self) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word {
            alphabet: self.alphabet,
            letters: self.letters[..self.len() - 1].to_vec(),
        })
    }

    /// The length-`n` prefix.
    pub fn truncate(&self, n: usize) -> Result<Word> {
        if n > self.len() {
            return Err(Error::BadParameter("truncation beyond word length".into()));
        }
        Ok(Word {
            alphabet: self.alphabet,
            letters: self.letters[..n].to_vec(),
        })
    }

    pub fn relation(&self, other: &Word) -> Result<Relation> {
        self.check_alphabet(other)?;
        let n = self.len().min(other.len());
        if self.letters[..n] != other.letters[..n] {
            return Ok(Relation::Incomparable);
        }
        Ok(match self.len().cmp(&other.len()) {
            core::cmp::Ordering::Equal => Relation::Equal,
            core::cmp::Ordering::Less => Relation::Prefix,
            core::cmp::Ordering::Greater => Relation::Extension,
        })
    }

    /// True for strict prefixes and for equality.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len() <= other.len() && self.letters[..] == other.letters[..self.len()]
    }

    fn check_alphabet(&self, other: &Word) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet,
                right: other.alphabet,
            });
        }
        Ok(())
    }
}

/// All words of exactly length `len`, in lexicographic order.
pub fn enumerate(alphabet: u8, len: usize) -> Result<Vec<Word>> {
    let root = Word::empty(alphabet)?;
    let mut level = alloc::vec![root];
    for _ in 0..len {
        let mut next = Vec::with_capacity(level.len() * alphabet as usize);
        for word in &level {
            for letter in 1..=alphabet {
                next.push(word.child(letter)?);
            }
        }
        level = next;
    }
    Ok(level)
}

/// Positive weights and contraction ratios indexed by one alphabet.
///
/// Weights multiply along words (`weight_of`), as do ratios (`ratio_of`);
/// the empty word carries weight one. Outer systems have weights summing to
/// `1 - p_0`; inner systems have weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSystem {
    weights: Vec<Rational>,
    ratios: Vec<Rational>,
}

impl WeightSystem {
    pub fn new(weights: Vec<Rational>, ratios: Vec<Rational>) -> Result<WeightSystem> {
        if weights.is_empty() || weights.len() != ratios.len() {
            return Err(Error::BadWeights(
                "weights and ratios must be non-empty and of equal length".into(),
            ));
        }
        if weights.len() > u8::MAX as usize {
            return Err(Error::BadWeights("alphabet larger than 255".into()));
        }
        let one = Rational::one();
        for w in &weights {
            if !(w > &Rational::zero() && w < &one) {
                return Err(Error::BadWeights("weights must lie in (0,1)".into()));
            }
        }
        let total: Rational = weights.iter().sum();
        if total > one {
            return Err(Error::BadWeights("weights must sum to at most 1".into()));
        }
        for c in &ratios {
            if !(c > &Rational::zero() && c < &one) {
                return Err(Error::BadWeights("ratios must lie in (0,1)".into()));
            }
        }
        Ok(WeightSystem { weights, ratios })
    }

    pub fn alphabet(&self) -> u8 {
        self.weights.len() as u8
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn ratios(&self) -> &[Rational] {
        &self.ratios
    }

    /// Exact product of the weights along `word`; one for the empty word.
    pub fn weight_of(&self, word: &Word) -> Result<Rational> {
        self.product(word, &self.weights)
    }

    /// Exact product of the ratios along `word`; one for the empty word.
    pub fn ratio_of(&self, word: &Word) -> Result<Rational> {
        self.product(word, &self.ratios)
    }

    fn product(&self, word: &Word, table: &[Rational]) -> Result<Rational> {
        if word.alphabet() != self.alphabet() {
            return Err(Error::AlphabetMismatch {
                left: word.alphabet(),
                right: self.alphabet(),
            });
        }
        let mut acc = Rational::one();
        for &letter in word.letters() {
            acc *= &table[letter as usize - 1];
        }
        Ok(acc)
    }
}

/// Whether a valid antichain cuts every branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Maximality {
    Maximal,
    /// Some branch escapes; `uncovered` is the first word of the antichain's
    /// maximal length with no prefix in the set.
    NonMaximal { uncovered: Word },
}

/// Outcome of classifying an arbitrary word set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AntichainClass {
    Maximal,
    NonMaximal { uncovered: Word },
    /// Not an antichain at all; the witness pair is comparable.
    NotAntichain { first: Word, second: Word },
}

/// A non-empty set of pairwise incomparable words, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antichain {
    alphabet: u8,
    words: Vec<Word>,
}

impl Antichain {
    pub fn new(mut words: Vec<Word>) -> Result<Antichain> {
        let first = words.first().ok_or(Error::EmptyAntichain)?;
        let alphabet = first.alphabet();
        if words.iter().any(|w| w.alphabet() != alphabet) {
            return Err(Error::AlphabetMismatch {
                left: alphabet,
                right: words.iter().find(|w| w.alphabet() != alphabet).unwrap().alphabet(),
            });
        }
        words.sort_unstable();
        // After sorting, any comparable pair appears adjacently.
        for pair in words.windows(2) {
            if pair[0].is_prefix_of(&pair[1]) {
                return Err(Error::NotAntichain);
            }
        }
        Ok(Antichain { alphabet, words })
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_len(&self) -> usize {
        self.words.iter().map(Word::len).min().unwrap()
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap()
    }

    pub fn contains(&self, word: &Word) -> bool {
        self.words.binary_search(word).is_ok()
    }

    /// Checks whether every branch of the tree is cut.
    ///
    /// The walk descends lexicographically and stops at members, so it visits
    /// at most `len * max_len` nodes before finding a gap or finishing.
    pub fn maximality(&self) -> Maximality {
        let depth = self.max_len();
        let mut stack = alloc::vec![Word::empty(self.alphabet).unwrap()];
        while let Some(node) = stack.pop() {
            if self.contains(&node) {
                continue;
            }
            if node.len() == depth {
                return Maximality::NonMaximal { uncovered: node };
            }
            for letter in (1..=self.alphabet).rev() {
                stack.push(node.child(letter).unwrap());
            }
        }
        Maximality::Maximal
    }

    /// Words of length at least `min_len()` that are strict prefixes of a
    /// member. These are the levels of the tree where the cut is ragged.
    pub fn overhang(&self) -> Vec<Word> {
        let low = self.min_len();
        let mut seen = BTreeSet::new();
        for word in &self.words {
            for n in low..word.len() {
                seen.insert(word.truncate(n).unwrap());
            }
        }
        seen.into_iter().collect()
    }
}

/// Classifies a word set: maximal antichain, valid but gappy, or comparable.
pub fn classify_antichain(words: &[Word]) -> Result<AntichainClass> {
    if words.is_empty() {
        return Err(Error::EmptyAntichain);
    }
    let mut sorted = words.to_vec();
    let alphabet = sorted[0].alphabet();
    for w in &sorted {
        if w.alphabet() != alphabet {
            return Err(Error::AlphabetMismatch {
                left: alphabet,
                right: w.alphabet(),
            });
        }
    }
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0].is_prefix_of(&pair[1]) {
            return Ok(AntichainClass::NotAntichain {
                first: pair[0].clone(),
                second: pair[1].clone(),
            });
        }
    }
    let chain = Antichain {
        alphabet,
        words: sorted,
    };
    Ok(match chain.maximality() {
        Maximality::Maximal => AntichainClass::Maximal,
        Maximality::NonMaximal { uncovered } => AntichainClass::NonMaximal { uncovered },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn w(letters: &[u8]) -> Word {
        Word::new(2, letters).unwrap()
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w(&[1, 2]).concat(&w(&[1])).unwrap(), w(&[1, 2, 1]));
        let empty = Word::empty(2).unwrap();
        assert_eq!(empty.concat(&w(&[2])).unwrap(), w(&[2]));
        assert_eq!(w(&[1]).concat(&empty).unwrap(), w(&[1]));
    }

    #[test]
    fn concat_rejects_alphabet_mismatch() {
        let a = Word::new(2, &[1]).unwrap();
        let b = Word::new(3, &[1]).unwrap();
        assert!(matches!(
            a.concat(&b),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn parent_examples() {
        assert_eq!(w(&[1, 2, 1]).parent().unwrap(), w(&[1, 2]));
        assert_eq!(w(&[2]).parent().unwrap(), Word::empty(2).unwrap());
        assert_eq!(Word::empty(2).unwrap().parent(), Err(Error::EmptyWord));
    }

    #[test]
    fn relation_examples() {
        assert_eq!(w(&[1]).relation(&w(&[1, 2])).unwrap(), Relation::Prefix);
        assert_eq!(
            w(&[1, 2]).relation(&w(&[2, 1])).unwrap(),
            Relation::Incomparable
        );
        assert_eq!(w(&[1, 2]).relation(&w(&[1, 2])).unwrap(), Relation::Equal);
        assert_eq!(w(&[1, 2]).relation(&w(&[1])).unwrap(), Relation::Extension);
    }

    #[test]
    fn letters_validated() {
        assert!(matches!(
            Word::new(2, &[1, 3]),
            Err(Error::LetterOutOfRange { letter: 3, .. })
        ));
        assert!(matches!(
            Word::new(2, &[0]),
            Err(Error::LetterOutOfRange { letter: 0, .. })
        ));
    }

    #[test]
    fn classify_examples() {
        // Ω_1 itself is maximal.
        assert_eq!(
            classify_antichain(&[w(&[1]), w(&[2])]).unwrap(),
            AntichainClass::Maximal
        );
        // Comparable pair.
        assert_eq!(
            classify_antichain(&[w(&[1]), w(&[1, 2])]).unwrap(),
            AntichainClass::NotAntichain {
                first: w(&[1]),
                second: w(&[1, 2]),
            }
        );
        // Valid but leaves (2,2) uncovered.
        assert_eq!(
            classify_antichain(&[w(&[1]), w(&[2, 1])]).unwrap(),
            AntichainClass::NonMaximal {
                uncovered: w(&[2, 2]),
            }
        );
        assert_eq!(classify_antichain(&[]), Err(Error::EmptyAntichain));
    }

    #[test]
    fn weight_examples() {
        let ws = WeightSystem::new(
            alloc::vec![ratio(1, 3), ratio(1, 3)],
            alloc::vec![ratio(1, 4), ratio(1, 4)],
        )
        .unwrap();
        assert_eq!(ws.weight_of(&Word::empty(2).unwrap()).unwrap(), ratio(1, 1));
        assert_eq!(ws.ratio_of(&Word::empty(2).unwrap()).unwrap(), ratio(1, 1));
        assert_eq!(ws.weight_of(&w(&[1, 2])).unwrap(), ratio(1, 9));
        assert_eq!(ws.ratio_of(&w(&[1, 1, 2])).unwrap(), ratio(1, 64));
    }

    #[test]
    fn weight_rejects_bad_input() {
        assert!(WeightSystem::new(alloc::vec![], alloc::vec![]).is_err());
        assert!(WeightSystem::new(
            alloc::vec![ratio(1, 2), ratio(2, 3)],
            alloc::vec![ratio(1, 2), ratio(1, 2)]
        )
        .is_err());
        assert!(WeightSystem::new(alloc::vec![ratio(1, 1)], alloc::vec![ratio(1, 2)]).is_err());
        let ws = WeightSystem::new(alloc::vec![ratio(1, 2)], alloc::vec![ratio(1, 2)]).unwrap();
        let other = Word::new(3, &[3]).unwrap();
        assert!(ws.weight_of(&other).is_err());
    }

    #[test]
    fn overhang_of_ragged_cut() {
        let chain = Antichain::new(alloc::vec![w(&[1]), w(&[2, 1]), w(&[2, 2])]).unwrap();
        assert_eq!(chain.overhang(), alloc::vec![w(&[2])]);
        assert_eq!(chain.maximality(), Maximality::Maximal);
        // A level cut has no overhang.
        let level = Antichain::new(enumerate(2, 3).unwrap()).unwrap();
        assert!(level.overhang().is_empty());
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate(3, 0).unwrap().len(), 1);
        assert_eq!(enumerate(3, 2).unwrap().len(), 9);
        assert_eq!(enumerate(2, 5).unwrap().len(), 32);
    }
}
