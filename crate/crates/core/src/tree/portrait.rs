//! Finite-depth automorphisms of the d-adic tree, stored as portraits.
//!
//! A depth-`n` portrait is a complete labeling of the `(d^n - 1)/(d - 1)`
//! internal vertices (levels `0..n`) by permutations of `{0, …, d-1}`.
//! Internal vertices are indexed breadth-first: the root is `0` and the
//! `j`-th child of vertex `i` is `i·d + 1 + j`. Labels are stored flattened
//! in a single byte buffer, `d` bytes per internal vertex, which keeps
//! portraits hashable and cheap to copy during closure enumeration.
//!
//! All operations follow the right-action convention: in `compose(g, h)` the
//! left factor acts first, and the permutation product applies the left
//! factor first.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::tree::perm::Perm;
use crate::tree::vertex::{Degree, Vertex};

/// An automorphism of the depth-`n` truncated d-adic tree.
///
/// Portraits are immutable values; all operations return fresh portraits.
/// Depth 0 is legal (the identity on a point) so recursive constructions
/// bottom out without special cases.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    degree: Degree,
    depth: usize,
    /// Flattened labels: bytes `[i*d, (i+1)*d)` are the one-line images of
    /// the label at internal vertex `i` (breadth-first order).
    labels: Vec<u8>,
}

impl Portrait {
    /// The identity automorphism of the depth-`n` tree.
    pub fn identity(degree: Degree, depth: usize) -> Self {
        let d = degree.get();
        let internal = degree.internal_count(depth);
        let mut labels = Vec::with_capacity(internal * d);
        for _ in 0..internal {
            labels.extend(0..d as u8);
        }
        Portrait {
            degree,
            depth,
            labels,
        }
    }

    /// Builds a portrait from one label per internal vertex, breadth-first.
    pub fn from_labels(degree: Degree, depth: usize, label_list: &[Perm]) -> Result<Self> {
        let internal = degree.internal_count(depth);
        if label_list.len() != internal {
            return Err(Error::Shape(format!(
                "expected {internal} labels for degree {degree} depth {depth}, got {}",
                label_list.len()
            )));
        }
        let d = degree.get();
        let mut labels = Vec::with_capacity(internal * d);
        for p in label_list {
            if p.degree() != d {
                return Err(Error::Shape(format!(
                    "label degree {} does not match tree degree {d}",
                    p.degree()
                )));
            }
            labels.extend_from_slice(p.images());
        }
        Ok(Portrait {
            degree,
            depth,
            labels,
        })
    }

    /// Builds a depth-`n` portrait by evaluating `label_of` at every internal
    /// vertex (breadth-first).
    pub fn from_label_fn(
        degree: Degree,
        depth: usize,
        mut label_of: impl FnMut(&Vertex) -> Perm,
    ) -> Self {
        let d = degree.get();
        let internal = degree.internal_count(depth);
        let mut labels = Vec::with_capacity(internal * d);
        let mut frontier = vec![Vertex::root()];
        for level in 0..depth {
            for v in &frontier {
                let p = label_of(v);
                debug_assert_eq!(p.degree(), d);
                labels.extend_from_slice(p.images());
            }
            if level + 1 < depth {
                frontier = frontier
                    .iter()
                    .flat_map(|v| (0..d as u8).map(move |j| v.child(j)))
                    .collect();
            }
        }
        Portrait {
            degree,
            depth,
            labels,
        }
    }

    /// A depth-1 portrait from a single root permutation.
    pub fn from_root_perm(perm: &Perm) -> Result<Self> {
        let degree = Degree::new(perm.degree())?;
        Ok(Portrait {
            degree,
            depth: 1,
            labels: perm.images().to_vec(),
        })
    }

    /// Portrait with the given label at one vertex and identity elsewhere.
    pub fn single_label(degree: Degree, depth: usize, at: &Vertex, label: &Perm) -> Result<Self> {
        if at.level() >= depth {
            return Err(Error::Range(format!(
                "vertex {at} at level {} has no label in a depth-{depth} portrait",
                at.level()
            )));
        }
        if label.degree() != degree.get() {
            return Err(Error::Shape(format!(
                "label degree {} does not match tree degree {degree}",
                label.degree()
            )));
        }
        let mut g = Portrait::identity(degree, depth);
        let idx = g.internal_index(at)?;
        let d = degree.get();
        g.labels[idx * d..(idx + 1) * d].copy_from_slice(label.images());
        Ok(g)
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn internal_count(&self) -> usize {
        self.degree.internal_count(self.depth)
    }

    #[inline]
    fn label_slice(&self, idx: usize) -> &[u8] {
        let d = self.degree.get();
        &self.labels[idx * d..(idx + 1) * d]
    }

    /// Breadth-first index of an internal vertex.
    fn internal_index(&self, v: &Vertex) -> Result<usize> {
        if v.level() >= self.depth {
            return Err(Error::Range(format!(
                "vertex {v} at level {} is not internal at depth {}",
                v.level(),
                self.depth
            )));
        }
        let d = self.degree.get();
        let mut idx = 0usize;
        for &letter in v.letters() {
            if letter as usize >= d {
                return Err(Error::Range(format!("letter {letter} out of range")));
            }
            idx = idx * d + 1 + letter as usize;
        }
        Ok(idx)
    }

    /// The label of the portrait at an internal vertex (its depth-1 section).
    pub fn label(&self, v: &Vertex) -> Result<Perm> {
        let idx = self.internal_index(v)?;
        Perm::from_images(self.label_slice(idx).to_vec())
    }

    pub fn is_identity(&self) -> bool {
        let d = self.degree.get() as u8;
        self.labels
            .chunks_exact(d as usize)
            .all(|chunk| chunk.iter().enumerate().all(|(i, &x)| i as u8 == x))
    }

    /// Composition `g · h` with `g = self` acting first.
    ///
    /// Labels satisfy the cocycle `label(gh, v) = label(g, v) · label(h, v^g)`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        if self.degree != other.degree || self.depth != other.depth {
            return Err(Error::Shape(format!(
                "compose needs equal shapes: ({}, {}) vs ({}, {})",
                self.degree, self.depth, other.degree, other.depth
            )));
        }
        let d = self.degree.get();
        let internal = self.internal_count();
        let mut labels = vec![0u8; internal * d];
        // img[i] = breadth-first index of i's image under self, maintained
        // level by level while labels are produced.
        let mut img = vec![0usize; internal];
        for i in 0..internal {
            let gi = self.label_slice(i);
            let hi = other.label_slice(img[i]);
            let out = &mut labels[i * d..(i + 1) * d];
            for j in 0..d {
                out[j] = hi[gi[j] as usize];
            }
            // Push images of the children that are themselves internal.
            let first_child = i * d + 1;
            if first_child < internal {
                for j in 0..d {
                    let child = first_child + j;
                    if child >= internal {
                        break;
                    }
                    img[child] = img[i] * d + 1 + gi[j] as usize;
                }
            }
        }
        Ok(Portrait {
            degree: self.degree,
            depth: self.depth,
            labels,
        })
    }

    /// The inverse automorphism: `label(g⁻¹, v^g) = label(g, v)⁻¹`.
    pub fn invert(&self) -> Portrait {
        let d = self.degree.get();
        let internal = self.internal_count();
        let mut labels = vec![0u8; internal * d];
        let mut img = vec![0usize; internal];
        for i in 0..internal {
            let gi = self.label_slice(i);
            let out_base = img[i] * d;
            for j in 0..d {
                labels[out_base + gi[j] as usize] = j as u8;
            }
            let first_child = i * d + 1;
            if first_child < internal {
                for j in 0..d {
                    let child = first_child + j;
                    if child >= internal {
                        break;
                    }
                    img[child] = img[i] * d + 1 + gi[j] as usize;
                }
            }
        }
        Portrait {
            degree: self.degree,
            depth: self.depth,
            labels,
        }
    }

    /// Image of a vertex. Letters are routed through the labels along the
    /// original path: `(vw)^g = v^g w^{g|_v}`.
    pub fn apply_vertex(&self, v: &Vertex) -> Result<Vertex> {
        if v.level() > self.depth {
            return Err(Error::Range(format!(
                "vertex {v} at level {} exceeds depth {}",
                v.level(),
                self.depth
            )));
        }
        let d = self.degree.get();
        let mut out = Vec::with_capacity(v.level());
        let mut idx = 0usize; // internal index of the current original prefix
        for &letter in v.letters() {
            if letter as usize >= d {
                return Err(Error::Range(format!("letter {letter} out of range")));
            }
            out.push(self.label_slice(idx)[letter as usize]);
            idx = idx * d + 1 + letter as usize;
        }
        Ok(Vertex::from_letters(&out))
    }

    /// Image of the level-`k` vertex with lexicographic index `v`, as an index.
    pub fn apply_level_index(&self, k: usize, v: u64) -> u64 {
        debug_assert!(k <= self.depth);
        let d = self.degree.get() as u64;
        let mut idx = 0u64; // internal index of the original prefix
        let mut out = 0u64;
        for pos in (0..k).rev() {
            let letter = (v / d.pow(pos as u32)) % d;
            let image = self.label_slice(idx as usize)[letter as usize] as u64;
            out = out * d + image;
            idx = idx * d + 1 + letter;
        }
        out
    }

    /// The depth-`m` section of the portrait at `v`: labels are read off the
    /// subtree rooted at `v` without any repositioning.
    pub fn section(&self, v: &Vertex, m: usize) -> Result<Portrait> {
        if v.level() > self.depth {
            return Err(Error::Range(format!(
                "vertex {v} at level {} exceeds depth {}",
                v.level(),
                self.depth
            )));
        }
        if m > self.depth - v.level() {
            return Err(Error::Range(format!(
                "section depth {m} exceeds {} available below {v}",
                self.depth - v.level()
            )));
        }
        let d = self.degree.get();
        let out_internal = self.degree.internal_count(m);
        let mut labels = Vec::with_capacity(out_internal * d);
        if m > 0 {
            let mut root = 0usize;
            for &letter in v.letters() {
                root = root * d + 1 + letter as usize;
            }
            // One block of source indices per level of the section.
            let mut level_indices = vec![root];
            for _ in 0..m {
                let mut next = Vec::with_capacity(level_indices.len() * d);
                for &i in &level_indices {
                    labels.extend_from_slice(self.label_slice(i));
                    for j in 0..d {
                        next.push(i * d + 1 + j);
                    }
                }
                level_indices = next;
            }
        }
        Ok(Portrait {
            degree: self.degree,
            depth: m,
            labels,
        })
    }

    /// Extension to depth `m ≥ depth` by identity labels below the existing
    /// ones.
    pub fn pad_to_depth(&self, m: usize) -> Result<Portrait> {
        if m < self.depth {
            return Err(Error::Range(format!(
                "cannot pad depth {} down to {m}; use truncate",
                self.depth
            )));
        }
        let d = self.degree.get();
        let internal = self.degree.internal_count(m);
        let mut labels = Vec::with_capacity(internal * d);
        labels.extend_from_slice(&self.labels);
        for _ in self.internal_count()..internal {
            labels.extend(0..d as u8);
        }
        Ok(Portrait {
            degree: self.degree,
            depth: m,
            labels,
        })
    }

    /// Truncation to depth `m ≤ depth` (the section at the root).
    pub fn truncate(&self, m: usize) -> Result<Portrait> {
        if m > self.depth {
            return Err(Error::Range(format!(
                "truncation depth {m} exceeds depth {}",
                self.depth
            )));
        }
        let d = self.degree.get();
        Ok(Portrait {
            degree: self.degree,
            depth: m,
            labels: self.labels[..self.degree.internal_count(m) * d].to_vec(),
        })
    }

    /// Number of vertices at level `k` fixed by the automorphism. `X_0 = 1`.
    ///
    /// Fixed vertices form a subtree, so the count walks only the alive part.
    pub fn fixed_count(&self, k: usize) -> Result<u64> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "level {k} exceeds depth {}",
                self.depth
            )));
        }
        let d = self.degree.get();
        // Alive internal indices at the current level.
        let mut alive: Vec<usize> = vec![0];
        if k == 0 {
            return Ok(1);
        }
        for _ in 0..k - 1 {
            let mut next = Vec::with_capacity(alive.len());
            for &i in &alive {
                let lab = self.label_slice(i);
                for j in 0..d {
                    if lab[j] as usize == j {
                        next.push(i * d + 1 + j);
                    }
                }
            }
            alive = next;
        }
        let mut count = 0u64;
        for &i in &alive {
            let lab = self.label_slice(i);
            count += lab.iter().enumerate().filter(|&(j, &x)| j == x as usize).count() as u64;
        }
        Ok(count)
    }

    /// True when some vertex at level `k` is fixed.
    pub fn fixes_some_at_level(&self, k: usize) -> Result<bool> {
        Ok(self.fixed_count(k)? > 0)
    }

    /// Lexicographically first fixed vertex at level `k`, if any. The fixed
    /// vertices of each level form the levels of a subtree, so this witness
    /// lies on a root-to-level-`k` path of fixed vertices.
    pub fn first_fixed_at_level(&self, k: usize) -> Result<Option<Vertex>> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "level {k} exceeds depth {}",
                self.depth
            )));
        }
        let d = self.degree.get();
        fn descend(
            g: &Portrait,
            d: usize,
            idx: usize,
            path: &mut Vec<u8>,
            remaining: usize,
        ) -> bool {
            if remaining == 0 {
                return true;
            }
            let lab = g.label_slice(idx);
            for j in 0..d {
                if lab[j] as usize == j {
                    path.push(j as u8);
                    if descend(g, d, idx * d + 1 + j, path, remaining - 1) {
                        return true;
                    }
                    path.pop();
                }
            }
            false
        }
        let mut path = Vec::with_capacity(k);
        if descend(self, d, 0, &mut path, k) {
            Ok(Some(Vertex::from_letters(&path)))
        } else {
            Ok(None)
        }
    }

    /// Raw flattened labels (one-line images per internal vertex, BFS order).
    pub fn raw_labels(&self) -> &[u8] {
        &self.labels
    }

    /// Deterministic injective key: breadth-first Lehmer codes of the labels
    /// packed in base `d!`, serialized as fixed-width little-endian bytes
    /// (all-zero for the identity).
    pub fn canonical_key(&self) -> Vec<u8> {
        KeyCodec::new(self.degree, self.depth).key(self)
    }
}

impl std::fmt::Debug for Portrait {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Portrait(d={}, depth={}, {})",
            self.degree, self.depth, self
        )
    }
}

/// Precomputed canonical-key packing for a fixed degree and depth.
///
/// Packing the per-vertex Lehmer ranks into a base-`d!` integer gives one
/// digit per internal vertex; the fixed serialized width makes keys of equal
/// shape directly comparable.
pub struct KeyCodec {
    degree: Degree,
    depth: usize,
    mode: KeyMode,
}

enum KeyMode {
    /// Packed value fits in a u128.
    Narrow { factorial: u128, byte_len: usize },
    /// Packed value needs a big integer.
    Wide { factorial: u128, byte_len: usize },
    /// `d!` itself overflows u128 (d > 34): fall back to raw label bytes,
    /// which are equally injective at fixed shape.
    Raw,
}

impl KeyCodec {
    pub fn new(degree: Degree, depth: usize) -> Self {
        let d = degree.get();
        let mut factorial: u128 = 1;
        let mut overflow = false;
        for i in 2..=d as u128 {
            match factorial.checked_mul(i) {
                Some(f) => factorial = f,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        let internal = degree.internal_count(depth);
        let mode = if overflow {
            KeyMode::Raw
        } else {
            // Total value < factorial^internal; size the byte width exactly.
            let max = BigUint::from(factorial).pow(internal as u32) - BigUint::one();
            let byte_len = (((max.bits() + 7) / 8) as usize).max(1);
            if max.bits() <= 128 {
                KeyMode::Narrow { factorial, byte_len }
            } else {
                KeyMode::Wide { factorial, byte_len }
            }
        };
        KeyCodec {
            degree,
            depth,
            mode,
        }
    }

    pub fn key(&self, g: &Portrait) -> Vec<u8> {
        debug_assert_eq!(g.degree(), self.degree);
        debug_assert_eq!(g.depth(), self.depth);
        let internal = g.internal_count();
        match self.mode {
            KeyMode::Narrow { factorial, byte_len } => {
                // Horner pack, most significant digit = last internal vertex.
                let mut value: u128 = 0;
                for i in (0..internal).rev() {
                    value = value * factorial + lehmer_rank_slice(g.label_slice(i));
                }
                value.to_le_bytes()[..byte_len].to_vec()
            }
            KeyMode::Wide { factorial, byte_len } => {
                let mut value = BigUint::ZERO;
                let factorial = BigUint::from(factorial);
                for i in (0..internal).rev() {
                    value = value * &factorial + BigUint::from(lehmer_rank_slice(g.label_slice(i)));
                }
                let mut out = value.to_bytes_le();
                out.resize(byte_len, 0);
                out
            }
            KeyMode::Raw => g.raw_labels().to_vec(),
        }
    }
}

fn lehmer_rank_slice(images: &[u8]) -> u128 {
    let d = images.len();
    let mut rank: u128 = 0;
    for i in 0..d {
        let smaller_after = images[i + 1..].iter().filter(|&&x| x < images[i]).count() as u128;
        rank = rank * (d - i) as u128 + smaller_after;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Degree {
        Degree::new(n).unwrap()
    }

    fn root_swap(depth: usize) -> Portrait {
        Portrait::single_label(
            d(2),
            depth,
            &Vertex::root(),
            &Perm::transposition(2, 0, 1),
        )
        .unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let e = Portrait::identity(d(2), 2);
        let g = root_swap(2);
        assert_eq!(e.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&e).unwrap(), g);
    }

    #[test]
    fn root_swap_is_an_involution() {
        let g = root_swap(1);
        assert!(g.compose(&g).unwrap().is_identity());
    }

    #[test]
    fn compose_example_depth_two() {
        // g = {root: swap, v0: e, v1: e}, h = {root: e, v0: swap, v1: e}
        let g = root_swap(2);
        let h = Portrait::single_label(
            d(2),
            2,
            &Vertex::from_letters(&[0]),
            &Perm::transposition(2, 0, 1),
        )
        .unwrap();
        let gh = g.compose(&h).unwrap();
        assert_eq!(gh.label(&Vertex::root()).unwrap(), Perm::transposition(2, 0, 1));
        assert!(gh.label(&Vertex::from_letters(&[0])).unwrap().is_identity());
        assert_eq!(
            gh.label(&Vertex::from_letters(&[1])).unwrap(),
            Perm::transposition(2, 0, 1)
        );
        // Leaf-by-leaf sequential application agrees.
        for leaf in 0..4u64 {
            let v = Vertex::from_level_index(d(2), 2, leaf);
            let via_g = g.apply_vertex(&v).unwrap();
            let via_both = h.apply_vertex(&via_g).unwrap();
            assert_eq!(gh.apply_vertex(&v).unwrap(), via_both);
        }
    }

    #[test]
    fn invert_cyclic_label() {
        let g = Portrait::single_label(d(3), 1, &Vertex::root(), &Perm::standard_cycle(3)).unwrap();
        let inv = g.invert();
        assert_eq!(
            inv.label(&Vertex::root()).unwrap(),
            Perm::standard_cycle(3).inverse()
        );
        assert!(g.compose(&inv).unwrap().is_identity());
        assert!(Portrait::identity(d(2), 3).invert().is_identity());
    }

    #[test]
    fn apply_vertex_two_letters() {
        // d=3: root label 0->1->2, label at "1" = swap(0,1); "10" -> "21".
        let g = Portrait::from_label_fn(d(3), 2, |v| {
            if v.is_root() {
                Perm::standard_cycle(3)
            } else if v.letters() == [1] {
                Perm::transposition(3, 0, 1)
            } else {
                Perm::identity(3)
            }
        });
        let img = g.apply_vertex(&Vertex::from_letters(&[1, 0])).unwrap();
        assert_eq!(img.letters(), &[2, 1]);
    }

    #[test]
    fn apply_vertex_root_swap() {
        let g = root_swap(2);
        let img = g.apply_vertex(&Vertex::from_letters(&[0, 1])).unwrap();
        assert_eq!(img.letters(), &[1, 1]);
    }

    #[test]
    fn section_at_vertex() {
        let g = root_swap(2);
        let s = g.section(&Vertex::from_letters(&[0]), 1).unwrap();
        assert!(s.is_identity());
        assert_eq!(g.section(&Vertex::root(), 2).unwrap(), g);
        assert!(g.section(&Vertex::from_letters(&[0, 0]), 1).is_err());
        assert!(g.section(&Vertex::from_letters(&[0]), 2).is_err());
    }

    #[test]
    fn fixed_counts() {
        assert_eq!(Portrait::identity(d(2), 3).fixed_count(3).unwrap(), 8);
        let g = root_swap(3);
        for k in 1..=3 {
            assert_eq!(g.fixed_count(k).unwrap(), 0);
        }
        assert_eq!(g.fixed_count(0).unwrap(), 1);
        assert!(g.fixed_count(4).is_err());
    }

    #[test]
    fn fixed_subtree_witness() {
        let g = Portrait::from_label_fn(d(2), 3, |v| {
            if v.letters().first() == Some(&0) {
                Perm::transposition(2, 0, 1)
            } else {
                Perm::identity(2)
            }
        });
        // Root label trivial; everything under "0" swaps.
        assert_eq!(g.first_fixed_at_level(1).unwrap(), Some(Vertex::from_letters(&[0])));
        assert_eq!(
            g.first_fixed_at_level(3).unwrap(),
            Some(Vertex::from_letters(&[1, 0, 0]))
        );
        assert_eq!(root_swap(2).first_fixed_at_level(1).unwrap(), None);
    }

    #[test]
    fn shape_errors() {
        let g2 = Portrait::identity(d(2), 2);
        let g3 = Portrait::identity(d(2), 3);
        let h = Portrait::identity(d(3), 2);
        assert!(matches!(g2.compose(&g3), Err(Error::Shape(_))));
        assert!(matches!(g2.compose(&h), Err(Error::Shape(_))));
    }

    #[test]
    fn canonical_keys_identity_zero_and_distinct() {
        let e = Portrait::identity(d(2), 3);
        assert!(e.canonical_key().iter().all(|&b| b == 0));
        // Root swap at depth 1: a single nonzero digit.
        let g = root_swap(1);
        assert_eq!(g.canonical_key(), vec![1]);
        // Exhaustive distinctness over all 8 elements of Aut T^2 for d=2.
        let mut keys = std::collections::HashSet::new();
        let perms = [Perm::identity(2), Perm::transposition(2, 0, 1)];
        for r in &perms {
            for a in &perms {
                for b in &perms {
                    let g =
                        Portrait::from_labels(d(2), 2, &[r.clone(), a.clone(), b.clone()]).unwrap();
                    keys.insert(g.canonical_key());
                }
            }
        }
        assert_eq!(keys.len(), 8);
    }

    #[test]
    fn truncate_is_homomorphic() {
        let g = Portrait::from_label_fn(d(2), 3, |v| {
            if v.level() % 2 == 0 {
                Perm::transposition(2, 0, 1)
            } else {
                Perm::identity(2)
            }
        });
        let h = Portrait::from_label_fn(d(2), 3, |v| {
            if v.letters().iter().all(|&x| x == 0) {
                Perm::transposition(2, 0, 1)
            } else {
                Perm::identity(2)
            }
        });
        let lhs = g.compose(&h).unwrap().truncate(2).unwrap();
        let rhs = g.truncate(2).unwrap().compose(&h.truncate(2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn depth_zero_portraits() {
        let e = Portrait::identity(d(2), 0);
        assert!(e.is_identity());
        assert_eq!(e.fixed_count(0).unwrap(), 1);
        assert_eq!(e.compose(&e).unwrap(), e);
        assert_eq!(e.canonical_key(), vec![0]);
    }
}
