//! Diagonal tower groups and their last-letter extensions.
//!
//! A tower is built from a full d-cycle `sigma`. Its level-`k` factor
//! consists of automorphisms whose labels live only at level `k` and are
//! constant powers of `sigma` on each sibling block: the level-0 factor is a
//! root power of `sigma`, and for `k ≥ 1` every level-(k-1) vertex carries an
//! independent exponent shared by all of its children. Factor orders are
//! `|S_0| = |S_1| = d` and `|S_k| = |S_{k-1}|^d`, so the depth-`n` quotient
//! has order `d^(1 + 1 + d + d² + …)` and every element factors uniquely as
//! an ordered product of per-level factors. That unique factorization gives
//! an exactly uniform sampler without enumeration.
//!
//! The extension adjoins, for every exponent tuple `(e_0, …, e_{d-1})`, the
//! automorphism with trivial root label whose label at every deeper vertex is
//! `sigma^(e_j)` where `j` is the vertex's last letter. When the exponents
//! are a permutation of `{1, …, d}` exactly one letter carries the trivial
//! label, which pins a single surviving path of fixed vertices with `d`
//! fixed children per level.
//!
//! A word on normality: conjugating a root power of `sigma` by a last-letter
//! automorphism with exponents `(e_j)` twists the level-1 exponents by the
//! coboundary `e_{j+1} - e_j`. At degree 2 every coboundary is constant, the
//! base is normal in the extension at every depth, and the extension is the
//! union of `d^(d-1)` base cosets with a stable index. At degree `≥ 3` some
//! tuples have non-constant coboundaries, the base stops being normal from
//! depth 2 on, and beyond depth 2 the extension is strictly larger than that
//! coset union. [`TowerExtension`] records the computed normality verdict,
//! and the coset transversal and closed-form orders are only offered where
//! the coset decomposition actually covers the group.

use num_bigint::BigUint;
use num_traits::One;

use crate::engine::{FiniteTreeGroup, Sampler};
use crate::error::{Error, Result};
use crate::tree::{Degree, Perm, Portrait, Vertex};

/// Parameters of a diagonal tower: the degree and the full d-cycle whose
/// powers populate every label.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    degree: Degree,
    sigma: Perm,
}

impl TowerSpec {
    /// Tower over an arbitrary full d-cycle.
    pub fn new(degree: Degree, sigma: Perm) -> Result<Self> {
        if sigma.degree() != degree.get() {
            return Err(Error::Shape(format!(
                "cycle degree {} does not match tree degree {degree}",
                sigma.degree()
            )));
        }
        if !sigma.is_full_cycle() {
            return Err(Error::InvalidPerm(format!(
                "tower generator must be a full {degree}-cycle, got {sigma}"
            )));
        }
        Ok(TowerSpec { degree, sigma })
    }

    /// Tower over the standard cycle `i ↦ i+1 mod d`.
    pub fn standard(degree: Degree) -> Self {
        TowerSpec {
            degree,
            sigma: Perm::standard_cycle(degree.get()),
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn sigma(&self) -> &Perm {
        &self.sigma
    }

    /// `sigma^k` for `0 ≤ k < d`.
    pub fn sigma_power(&self, k: usize) -> Perm {
        self.sigma.pow(k % self.degree.get())
    }

    /// Exponent `e` with `|π_n| = d^e`: one for the root factor plus
    /// `d^(k-1)` independent exponents for each level `1 ≤ k < n`.
    pub fn order_exponent(&self, n: usize) -> BigUint {
        let d = BigUint::from(self.degree.get());
        if n == 0 {
            return BigUint::ZERO;
        }
        let mut e = BigUint::one();
        let mut block = BigUint::one();
        for _ in 1..n {
            e += &block;
            block *= &d;
        }
        e
    }

    /// Exact order of the depth-`n` quotient, materialized. Use
    /// [`order_exponent`](Self::order_exponent) for symbolic work; the
    /// materialized integer has `order_exponent(n)·log2(d)` bits.
    pub fn quotient_order(&self, n: usize) -> BigUint {
        use num_traits::ToPrimitive;
        let e = self
            .order_exponent(n)
            .to_u32()
            .expect("order exponent too large to materialize");
        BigUint::from(self.degree.get()).pow(e)
    }

    /// Standard generating set of the depth-`n` quotient: the root cycle and
    /// one block generator per level-(k-1) vertex for each `1 ≤ k < n`.
    pub fn generators(&self, depth: usize) -> Vec<Portrait> {
        let d = self.degree.get();
        let mut gens = Vec::new();
        if depth == 0 {
            return gens;
        }
        gens.push(Portrait::from_label_fn(self.degree, depth, |v| {
            if v.is_root() {
                self.sigma.clone()
            } else {
                Perm::identity(d)
            }
        }));
        for k in 1..depth {
            for idx in 0..self.degree.level_size(k - 1) {
                let block = Vertex::from_level_index(self.degree, k - 1, idx);
                gens.push(Portrait::from_label_fn(self.degree, depth, |v| {
                    if v.level() == k && v.is_below(&block) {
                        self.sigma.clone()
                    } else {
                        Perm::identity(d)
                    }
                }));
            }
        }
        gens
    }

    /// Enumerates the depth-`n` quotient.
    pub fn quotient(&self, depth: usize, cap: usize) -> Result<FiniteTreeGroup> {
        if depth == 0 {
            return Err(Error::Range("tower quotient needs depth >= 1".into()));
        }
        let group = FiniteTreeGroup::enumerate_closure(&self.generators(depth), cap)?;
        let expected = self.quotient_order(depth);
        if group.order() != expected {
            return Err(Error::Invariant(format!(
                "tower quotient order {} does not match closed form {expected}",
                group.order()
            )));
        }
        Ok(group)
    }

    /// Exactly uniform product-structure sampler for the depth-`n` quotient.
    pub fn sampler(&self, depth: usize) -> Sampler {
        Sampler::diagonal_tower(self.degree, depth, &self.sigma)
    }
}

/// Automorphism with trivial root label whose label at every vertex of level
/// `≥ 1` is `sigma^(exponents[last letter])`, truncated at `depth`.
pub fn last_letter_portrait(spec: &TowerSpec, exponents: &[usize], depth: usize) -> Result<Portrait> {
    let d = spec.degree().get();
    if exponents.len() != d {
        return Err(Error::Shape(format!(
            "need {d} exponents, got {}",
            exponents.len()
        )));
    }
    let powers: Vec<Perm> = (0..d).map(|k| spec.sigma_power(k)).collect();
    Ok(Portrait::from_label_fn(spec.degree(), depth, |v| {
        match v.letters().last() {
            None => Perm::identity(d),
            Some(&j) => powers[exponents[j as usize] % d].clone(),
        }
    }))
}

/// The distinguished last-letter generator attached to a permutation `rho`:
/// the 0-based letter `j` carries `sigma^((rho(j) + 1) mod d)`, realizing the
/// 1-based tuple convention with exactly one trivial component.
pub fn last_letter_generator(spec: &TowerSpec, rho: &Perm, depth: usize) -> Result<Portrait> {
    let d = spec.degree().get();
    if rho.degree() != d {
        return Err(Error::Shape(format!(
            "rho degree {} does not match tree degree {d}",
            rho.degree()
        )));
    }
    let exponents: Vec<usize> = (0..d)
        .map(|j| (rho.apply(j as u8) as usize + 1) % d)
        .collect();
    last_letter_portrait(spec, &exponents, depth)
}

/// A tower together with its extension by all last-letter automorphisms.
pub struct TowerExtension {
    pub spec: TowerSpec,
    pub depth: usize,
    /// The extension G = ⟨base, last-letter automorphisms⟩.
    pub group: FiniteTreeGroup,
    /// The tower quotient H.
    pub base: FiniteTreeGroup,
    /// Whether the base is normal in the extension at this depth. True at
    /// degree 2; false from depth 2 on at higher degrees (non-constant
    /// conjugation coboundaries).
    pub base_is_normal: bool,
}

/// Builds the extension pair (G, H) at the given depth. Postcondition checks
/// wired in: both groups have the same first-level action and
/// `|π_2(G)| = d·d^d`. Normality of the base is computed and recorded in
/// [`TowerExtension::base_is_normal`] rather than enforced, since it genuinely
/// fails at degree ≥ 3 (see the module docs).
pub fn extended_tower(spec: &TowerSpec, depth: usize, cap: usize) -> Result<TowerExtension> {
    let d = spec.degree().get();
    if depth < 2 {
        return Err(Error::Range("extension needs depth >= 2".into()));
    }
    let base = spec.quotient(depth, cap)?;
    let mut gens = base.generators().to_vec();
    for tuple in exponent_tuples(d) {
        gens.push(last_letter_portrait(spec, &tuple, depth)?);
    }
    let group = FiniteTreeGroup::enumerate_closure(&gens, cap)?;

    let base_is_normal = group.subgroup_is_normal(&base)?;
    let pi1_group = group.truncated_keys(1)?;
    let pi1_base = base.truncated_keys(1)?;
    if pi1_group != pi1_base {
        return Err(Error::Invariant(
            "extension changes the first-level action".to_string(),
        ));
    }
    let pi2 = group.truncated_keys(2)?;
    let expected_pi2 = d * d.pow(d as u32);
    if pi2.len() != expected_pi2 {
        return Err(Error::Invariant(format!(
            "second-level quotient has order {}, expected {expected_pi2}",
            pi2.len()
        )));
    }
    Ok(TowerExtension {
        spec: spec.clone(),
        depth,
        group,
        base,
        base_is_normal,
    })
}

impl TowerExtension {
    /// Exact index of the base in the extension at this depth.
    pub fn index(&self) -> BigUint {
        self.group.order() / self.base.order()
    }

    /// True when the extension is exactly the union of the base cosets of
    /// the transversal, i.e. `|G| = d^(d-1)·|H|`.
    pub fn coset_union_covers(&self) -> bool {
        let d = self.spec.degree().get();
        self.index() == BigUint::from(d).pow(d as u32 - 1)
    }

    /// Right-coset transversal of the base: the last-letter automorphisms
    /// whose final exponent is zero, one per coset. Only valid when the
    /// coset union covers the extension.
    pub fn coset_transversal(&self) -> Result<Vec<Portrait>> {
        if !self.coset_union_covers() {
            return Err(Error::Unsupported(format!(
                "extension of index {} is not covered by the {} transversal cosets",
                self.index(),
                self.spec.degree().get().pow(self.spec.degree().get() as u32 - 1)
            )));
        }
        extension_transversal(&self.spec, self.depth)
    }

    /// Exactly uniform sampler: uniform transversal element times a uniform
    /// base element. Only valid when the coset union covers the extension.
    pub fn sampler(&self) -> Result<Sampler> {
        Ok(Sampler::coset_union(
            self.coset_transversal()?,
            self.spec.sampler(self.depth),
        ))
    }
}

/// True when the coset-union closed forms apply to the depth-`n` extension:
/// always at degree 2, and at depth ≤ 2 otherwise.
pub fn extension_closed_form_valid(spec: &TowerSpec, n: usize) -> bool {
    spec.degree().get() == 2 || n <= 2
}

/// Closed-form order of the depth-`n` extension quotient, where valid.
pub fn extension_order(spec: &TowerSpec, n: usize) -> Option<BigUint> {
    if !extension_closed_form_valid(spec, n) {
        return None;
    }
    let d = spec.degree().get();
    Some(match n {
        0 => BigUint::one(),
        1 => BigUint::from(d),
        _ => BigUint::from(d).pow(d as u32 - 1) * spec.quotient_order(n),
    })
}

/// Exponent `e` with `|π_n(G)| = d^e` for the extension, where valid.
pub fn extension_order_exponent(spec: &TowerSpec, n: usize) -> Option<BigUint> {
    if !extension_closed_form_valid(spec, n) {
        return None;
    }
    let d = spec.degree().get();
    Some(match n {
        0 => BigUint::ZERO,
        1 => BigUint::one(),
        _ => spec.order_exponent(n) + BigUint::from(d - 1),
    })
}

/// All `d^d` exponent tuples in lexicographic order.
pub fn exponent_tuples(d: usize) -> Vec<Vec<usize>> {
    let total = d.pow(d as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut tuple = vec![0usize; d];
        for slot in tuple.iter_mut().rev() {
            *slot = code % d;
            code /= d;
        }
        out.push(tuple);
    }
    out
}

/// Right-coset transversal of the tower base inside its extension: the
/// last-letter automorphisms whose final exponent is zero. Their first-level
/// label tuples are pairwise distinct modulo the diagonal, which separates
/// the cosets; the base absorbs the rest.
pub fn extension_transversal(spec: &TowerSpec, depth: usize) -> Result<Vec<Portrait>> {
    let d = spec.degree().get();
    let mut out = Vec::new();
    for tuple in exponent_tuples(d) {
        if tuple[d - 1] == 0 {
            out.push(last_letter_portrait(spec, &tuple, depth)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize) -> TowerSpec {
        TowerSpec::standard(Degree::new(d).unwrap())
    }

    #[test]
    fn quotient_orders_match_the_recursion() {
        // d=2: |π_1| = 2, |π_2| = 4, |π_3| = 16, |π_4| = 256.
        let s = spec(2);
        let expected = [2u32, 4, 16, 256];
        for (n, &exp) in (1..=4).zip(&expected) {
            assert_eq!(s.quotient_order(n), BigUint::from(exp));
            let g = s.quotient(n, 100_000).unwrap();
            assert_eq!(g.order(), BigUint::from(exp));
        }
        // d=3: |π_2| = 9.
        assert_eq!(spec(3).quotient_order(2), BigUint::from(9u32));
        assert_eq!(spec(3).quotient(2, 1000).unwrap().len(), 9);
    }

    #[test]
    fn tower_is_transitive_and_fractal_at_small_depth() {
        for d in [2usize, 3] {
            let s = spec(d);
            for depth in 2..=3 {
                let g = s.quotient(depth, 1_000_000).unwrap();
                assert!(g.is_level_transitive(), "d={d} depth={depth}");
                assert!(g.is_fractal().unwrap(), "d={d} depth={depth}");
            }
        }
    }

    #[test]
    fn last_letter_generator_labels() {
        // d=2, rho = id: labels (sigma, e) under every vertex.
        let s = spec(2);
        let g = last_letter_generator(&s, &Perm::identity(2), 4).unwrap();
        assert!(g.label(&Vertex::root()).unwrap().is_identity());
        for (letters, swapped) in [
            (vec![0u8], true),
            (vec![1u8], false),
            (vec![1, 0], true),
            (vec![0, 1, 1], false),
        ] {
            let lab = g.label(&Vertex::from_letters(&letters)).unwrap();
            assert_eq!(!lab.is_identity(), swapped, "at {letters:?}");
        }
    }

    #[test]
    fn last_letter_generator_is_in_first_level_stabilizer() {
        for d in [2usize, 3] {
            let s = spec(d);
            for rho_images in [(0..d as u8).collect::<Vec<_>>(), (0..d as u8).rev().collect()] {
                let rho = Perm::from_images(rho_images).unwrap();
                let g = last_letter_generator(&s, &rho, 3).unwrap();
                assert!(g.label(&Vertex::root()).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn fixed_counts_along_the_surviving_path() {
        // d=2, rho = id, depth 4: exactly two fixed vertices per level.
        let s = spec(2);
        let g = last_letter_generator(&s, &Perm::identity(2), 4).unwrap();
        for k in 1..=3 {
            assert_eq!(g.fixed_count(k).unwrap(), 2);
        }
    }

    #[test]
    fn extension_orders_and_postconditions() {
        let ext2 = extended_tower(&spec(2), 2, 10_000).unwrap();
        assert_eq!(ext2.group.len(), 8);
        assert!(ext2.base_is_normal);
        let ext3 = extended_tower(&spec(3), 2, 10_000).unwrap();
        assert_eq!(ext3.group.len(), 81);
        // At degree 3 the base stops being normal from depth 2 on.
        assert!(!ext3.base_is_normal);
        assert_eq!(extension_order(&spec(2), 4), Some(BigUint::from(512u32)));
        // No closed form at degree >= 3 beyond depth 2.
        assert_eq!(extension_order(&spec(3), 3), None);
        assert_eq!(extension_order(&spec(3), 2), Some(BigUint::from(81u32)));
    }

    #[test]
    fn degree_three_extension_outgrows_the_coset_union() {
        // Conjugates of the base escape the transversal cosets at depth 3:
        // the index jumps from 9 to 243.
        let ext = extended_tower(&spec(3), 3, 100_000).unwrap();
        assert_eq!(ext.group.len(), 59_049);
        assert_eq!(ext.base.len(), 243);
        assert!(!ext.base_is_normal);
        assert!(!ext.coset_union_covers());
        assert!(ext.sampler().is_err());
    }

    #[test]
    fn transversal_labels_distinct_cosets() {
        let ext = extended_tower(&spec(2), 3, 10_000).unwrap();
        let transversal = ext.coset_transversal().unwrap();
        assert_eq!(BigUint::from(transversal.len()), ext.index());
        let dec = ext.group.coset_decomposition(&ext.base).unwrap();
        assert_eq!(dec.index, ext.index());
        let mut cosets: Vec<usize> = transversal
            .iter()
            .map(|t| dec.coset_of(t).unwrap())
            .collect();
        cosets.sort_unstable();
        cosets.dedup();
        assert_eq!(cosets.len(), transversal.len());
    }

    #[test]
    fn section_of_generator_twists_only_the_root() {
        // The section at any vertex equals the truncated generator followed
        // by a root twist from the first-level action.
        let s = spec(2);
        let depth = 4;
        let g = last_letter_generator(&s, &Perm::identity(2), depth).unwrap();
        for level in 1..depth {
            for idx in 0..s.degree().level_size(level) {
                let v = Vertex::from_level_index(s.degree(), level, idx);
                let m = depth - level;
                let section = g.section(&v, m).unwrap();
                let sigma_v = g.label(&v).unwrap();
                assert!(sigma_v.is_identity() || sigma_v == s.sigma_power(1));
                let twist =
                    Portrait::single_label(s.degree(), m, &Vertex::root(), &sigma_v).unwrap();
                let expected = g.truncate(m).unwrap().compose(&twist).unwrap();
                assert_eq!(section, expected, "at {v}");
            }
        }
    }

    #[test]
    fn rejects_non_cycles() {
        assert!(TowerSpec::new(Degree::new(3).unwrap(), Perm::identity(3)).is_err());
        assert!(TowerSpec::new(Degree::new(3).unwrap(), Perm::transposition(3, 0, 1)).is_err());
        assert!(TowerSpec::new(Degree::new(2).unwrap(), Perm::standard_cycle(3)).is_err());
    }
}
