//! Permutations of the letter alphabet `{0, …, d-1}`.
//!
//! A [`Perm`] is stored in one-line notation, 0-based. Products follow the
//! right-action convention used throughout the crate: `p.then(q)` applies
//! `p` first and `q` second.

use crate::error::{Error, Result};

/// A permutation of `{0, …, d-1}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let d = images.len();
        if d == 0 || d > 255 {
            return Err(Error::InvalidPerm(format!("degree {d} not in 1..=255")));
        }
        let mut seen = vec![false; d];
        for &x in &images {
            if (x as usize) >= d || seen[x as usize] {
                return Err(Error::InvalidPerm(format!(
                    "images {images:?} are not a bijection of 0..{d}"
                )));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { images })
    }

    /// The identity on `{0, …, d-1}`.
    pub fn identity(d: usize) -> Self {
        Perm {
            images: (0..d as u8).collect(),
        }
    }

    /// The standard d-cycle `i ↦ i+1 mod d`.
    pub fn standard_cycle(d: usize) -> Self {
        Perm {
            images: (0..d).map(|i| ((i + 1) % d) as u8).collect(),
        }
    }

    /// Transposition of `i` and `j` inside `{0, …, d-1}`.
    pub fn transposition(d: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<u8> = (0..d as u8).collect();
        images.swap(i, j);
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    /// Image of a letter.
    #[inline]
    pub fn apply(&self, letter: u8) -> u8 {
        self.images[letter as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self` applied first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u8; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u8;
        }
        Perm { images }
    }

    /// `self` raised to the power `k ≥ 0`.
    pub fn pow(&self, k: usize) -> Perm {
        let mut acc = Perm::identity(self.degree());
        for _ in 0..k {
            acc = acc.then(self);
        }
        acc
    }

    /// Letters fixed by the permutation.
    pub fn fixed_letters(&self) -> Vec<u8> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i == x as usize)
            .map(|(i, _)| i as u8)
            .collect()
    }

    pub fn has_fixed_letter(&self) -> bool {
        self.images.iter().enumerate().any(|(i, &x)| i == x as usize)
    }

    /// True when the permutation is a single cycle through all d letters.
    pub fn is_full_cycle(&self) -> bool {
        let d = self.degree();
        let mut seen = 1usize;
        let mut x = self.images[0];
        while x != 0 {
            x = self.images[x as usize];
            seen += 1;
            if seen > d {
                return false;
            }
        }
        seen == d
    }

    /// All `d!` permutations of `{0, …, d-1}`, in a deterministic order.
    pub fn all(d: usize) -> Vec<Perm> {
        fn heap(images: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
            if k <= 1 {
                out.push(images.clone());
                return;
            }
            for i in 0..k {
                heap(images, k - 1, out);
                if k % 2 == 0 {
                    images.swap(i, k - 1);
                } else {
                    images.swap(0, k - 1);
                }
            }
        }
        let mut lists = Vec::new();
        let mut start: Vec<u8> = (0..d as u8).collect();
        heap(&mut start, d, &mut lists);
        let mut perms: Vec<Perm> = lists.into_iter().map(|images| Perm { images }).collect();
        perms.sort();
        perms
    }

    /// Lehmer rank of the permutation within `Sym(d)`, in `0..d!`.
    ///
    /// The rank is 0 exactly for the identity, so canonical portrait keys of
    /// identities are all-zero.
    pub fn lehmer_rank_u128(&self) -> Option<u128> {
        let d = self.degree();
        // d! must fit in u128: fine for d <= 34.
        if d > 34 {
            return None;
        }
        let mut rank: u128 = 0;
        for i in 0..d {
            let smaller_after = self.images[i + 1..]
                .iter()
                .filter(|&&x| x < self.images[i])
                .count() as u128;
            rank = rank * (d - i) as u128 + smaller_after;
        }
        Some(rank)
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm({})", self)
    }
}

/// Canonical text form: `e` for the identity, digit string for d ≤ 10,
/// parenthesized comma-separated images otherwise.
impl std::fmt::Display for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        if self.degree() <= 10 {
            for &x in &self.images {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            write!(f, "(")?;
            for (i, &x) in self.images.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_apply_left_factor_first() {
        // p = (01), q = 3-cycle 0->1->2 on {0,1,2}
        let p = Perm::transposition(3, 0, 1);
        let q = Perm::standard_cycle(3);
        let pq = p.then(&q);
        // 0 -p-> 1 -q-> 2
        assert_eq!(pq.apply(0), 2);
        assert_eq!(pq.apply(1), 1);
        assert_eq!(pq.apply(2), 0);
    }

    #[test]
    fn inverse_of_three_cycle() {
        let c = Perm::standard_cycle(3);
        let inv = c.inverse();
        assert_eq!(inv.images(), &[2, 0, 1]);
        assert!(c.then(&inv).is_identity());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0]).is_err());
        assert!(Perm::from_images(vec![0, 2]).is_err());
        assert!(Perm::from_images(vec![]).is_err());
    }

    #[test]
    fn lehmer_ranks_enumerate_sym3() {
        // All 6 elements of Sym(3) get distinct ranks in 0..6.
        let mut ranks = std::collections::HashSet::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    if let Ok(p) = Perm::from_images(vec![a, b, c]) {
                        ranks.insert(p.lehmer_rank_u128().unwrap());
                    }
                }
            }
        }
        assert_eq!(ranks.len(), 6);
        assert!(ranks.iter().all(|&r| r < 6));
        assert_eq!(Perm::identity(3).lehmer_rank_u128().unwrap(), 0);
    }

    #[test]
    fn full_cycle_detection() {
        assert!(Perm::standard_cycle(4).is_full_cycle());
        assert!(!Perm::identity(4).is_full_cycle());
        assert!(!Perm::transposition(4, 0, 1).is_full_cycle());
        assert!(Perm::from_images(vec![2, 3, 1, 0]).unwrap().is_full_cycle());
    }
}
