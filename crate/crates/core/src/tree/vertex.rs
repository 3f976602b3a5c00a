//! Tree degrees and vertices of the d-adic rooted tree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Valency of the tree: every vertex has exactly `d` children, `d ≥ 2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degree(usize);

impl Degree {
    pub fn new(d: usize) -> Result<Self> {
        if (2..=255).contains(&d) {
            Ok(Degree(d))
        } else {
            Err(Error::InvalidDegree(d))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of vertices at level `k`, i.e. `d^k`.
    pub fn level_size(self, k: usize) -> u64 {
        (self.0 as u64).pow(k as u32)
    }

    /// Number of vertices of level strictly below `n`: `(d^n - 1)/(d - 1)`.
    ///
    /// These are the internal vertices of the depth-`n` truncated tree, one
    /// permutation label each.
    pub fn internal_count(self, n: usize) -> usize {
        let mut total = 0usize;
        let mut level = 1usize;
        for _ in 0..n {
            total += level;
            level *= self.0;
        }
        total
    }
}

impl std::fmt::Debug for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Degree({})", self.0)
    }
}

impl std::fmt::Display for Degree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vertex of the tree: a word over `{0, …, d-1}`. The root is the empty
/// word; the level of a vertex is its word length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex {
    word: Vec<u8>,
}

impl Vertex {
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    /// Builds a vertex, checking every letter against the degree.
    pub fn new(degree: Degree, word: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = word.iter().find(|&&x| (x as usize) >= degree.get()) {
            return Err(Error::Range(format!(
                "letter {bad} out of range for degree {degree}"
            )));
        }
        Ok(Vertex { word })
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        Vertex {
            word: letters.to_vec(),
        }
    }

    pub fn level(&self) -> usize {
        self.word.len()
    }

    pub fn letters(&self) -> &[u8] {
        &self.word
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn child(&self, letter: u8) -> Vertex {
        let mut word = self.word.clone();
        word.push(letter);
        Vertex { word }
    }

    /// Position of the vertex within its level, reading the word as a base-d
    /// number (lexicographic order).
    pub fn index_in_level(&self, degree: Degree) -> u64 {
        let d = degree.get() as u64;
        self.word.iter().fold(0u64, |acc, &x| acc * d + x as u64)
    }

    /// Inverse of [`index_in_level`](Self::index_in_level).
    pub fn from_level_index(degree: Degree, level: usize, mut index: u64) -> Vertex {
        let d = degree.get() as u64;
        let mut word = vec![0u8; level];
        for slot in word.iter_mut().rev() {
            *slot = (index % d) as u8;
            index /= d;
        }
        Vertex { word }
    }

    /// True when `self` is `other` or a descendant of `other`.
    pub fn is_below(&self, other: &Vertex) -> bool {
        self.word.len() >= other.word.len() && self.word[..other.word.len()] == other.word[..]
    }
}

impl std::fmt::Debug for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Vertex({})", self)
    }
}

/// Letters joined without separator when all fit in one digit, otherwise
/// comma-separated; the root prints as the empty string.
impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.word.iter().all(|&x| x < 10) {
            for &x in &self.word {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_bounds() {
        assert!(Degree::new(1).is_err());
        assert!(Degree::new(2).is_ok());
        assert!(Degree::new(255).is_ok());
        assert!(Degree::new(256).is_err());
    }

    #[test]
    fn internal_counts() {
        let d2 = Degree::new(2).unwrap();
        assert_eq!(d2.internal_count(0), 0);
        assert_eq!(d2.internal_count(3), 7);
        let d3 = Degree::new(3).unwrap();
        assert_eq!(d3.internal_count(3), 13);
    }

    #[test]
    fn level_index_round_trip() {
        let d3 = Degree::new(3).unwrap();
        for idx in 0..27u64 {
            let v = Vertex::from_level_index(d3, 3, idx);
            assert_eq!(v.index_in_level(d3), idx);
            assert_eq!(v.level(), 3);
        }
    }

    #[test]
    fn rejects_bad_letters() {
        let d2 = Degree::new(2).unwrap();
        assert!(Vertex::new(d2, vec![0, 2]).is_err());
        assert!(Vertex::new(d2, vec![0, 1, 1]).is_ok());
    }

    #[test]
    fn descendant_test() {
        let v = Vertex::from_letters(&[1, 0]);
        assert!(v.is_below(&Vertex::from_letters(&[1])));
        assert!(v.is_below(&Vertex::root()));
        assert!(v.is_below(&v));
        assert!(!v.is_below(&Vertex::from_letters(&[0])));
        assert!(!Vertex::from_letters(&[1]).is_below(&v));
    }
}
