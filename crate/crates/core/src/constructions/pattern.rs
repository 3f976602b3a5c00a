//! Groups of finite type: all automorphisms whose depth-D sections lie in a
//! fixed pattern subgroup.
//!
//! The depth-`n` member set is a tree subshift of finite type, so it is
//! built by extending depth-(n-1) members under each admissible root window
//! instead of filtering the full automorphism group, whose order is doubly
//! exponential. Classifying members by their depth-(D-1) truncation makes
//! both counting and materialization a product over child buckets.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::engine::FiniteTreeGroup;
use crate::error::{Error, Result};
use crate::tree::{Degree, KeyCodec, Portrait, Vertex};

/// A pattern subgroup `P` of depth-`D` automorphisms. Membership of every
/// depth-`D` section in `P` defines the corresponding group of finite type.
#[derive(Clone)]
pub struct PatternSet {
    degree: Degree,
    pattern_depth: usize,
    allowed: Vec<Portrait>,
    keys: HashSet<Vec<u8>>,
}

impl PatternSet {
    /// Validates that `allowed` is a subgroup: nonempty, uniform shape,
    /// contains the identity, closed under composition and inversion.
    pub fn new(allowed: Vec<Portrait>) -> Result<Self> {
        let Some(first) = allowed.first() else {
            return Err(Error::Shape("pattern set must be nonempty".into()));
        };
        let degree = first.degree();
        let pattern_depth = first.depth();
        if pattern_depth == 0 {
            return Err(Error::Range("pattern depth must be at least 1".into()));
        }
        let codec = KeyCodec::new(degree, pattern_depth);
        let mut keys = HashSet::with_capacity(allowed.len());
        for g in &allowed {
            if g.degree() != degree || g.depth() != pattern_depth {
                return Err(Error::Shape(
                    "pattern elements disagree on degree or depth".into(),
                ));
            }
            if !keys.insert(codec.key(g)) {
                return Err(Error::Shape("pattern set has duplicate elements".into()));
            }
        }
        if !keys.contains(&codec.key(&Portrait::identity(degree, pattern_depth))) {
            return Err(Error::Invariant("pattern set lacks the identity".into()));
        }
        for g in &allowed {
            if !keys.contains(&codec.key(&g.invert())) {
                return Err(Error::Invariant(format!(
                    "pattern set not closed under inversion at {g}"
                )));
            }
            for h in &allowed {
                if !keys.contains(&codec.key(&g.compose(h)?)) {
                    return Err(Error::Invariant(format!(
                        "pattern set not closed under composition at {g} · {h}"
                    )));
                }
            }
        }
        Ok(PatternSet {
            degree,
            pattern_depth,
            allowed,
            keys,
        })
    }

    /// Pattern from an enumerated group taken at its own depth.
    pub fn from_group(group: &FiniteTreeGroup) -> Result<Self> {
        PatternSet::new(group.elements().to_vec())
    }

    /// Pattern from the depth-`depth` quotient of an enumerated group.
    pub fn from_quotient(group: &FiniteTreeGroup, depth: usize) -> Result<Self> {
        PatternSet::new(group.truncated_quotient(depth)?.elements().to_vec())
    }

    /// The full symmetric pattern of depth 1 (no constraint).
    pub fn full_level(degree: Degree) -> Result<Self> {
        let allowed = crate::tree::Perm::all(degree.get())
            .iter()
            .map(|p| Portrait::from_labels(degree, 1, std::slice::from_ref(p)))
            .collect::<Result<Vec<_>>>()?;
        PatternSet::new(allowed)
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn pattern_depth(&self) -> usize {
        self.pattern_depth
    }

    pub fn allowed(&self) -> &[Portrait] {
        &self.allowed
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn contains(&self, window: &Portrait) -> bool {
        window.degree() == self.degree
            && window.depth() == self.pattern_depth
            && self
                .keys
                .contains(&KeyCodec::new(self.degree, self.pattern_depth).key(window))
    }
}

/// Bucketing of pattern members by their depth-(D-1) truncation key.
fn bucket_keys(pattern: &PatternSet) -> Result<Vec<Vec<u8>>> {
    let codec = KeyCodec::new(pattern.degree(), pattern.pattern_depth() - 1);
    pattern
        .allowed()
        .iter()
        .map(|w| Ok(codec.key(&w.truncate(pattern.pattern_depth() - 1)?)))
        .collect()
}

/// Exact order of the depth-`n` group of finite type over `pattern`,
/// computed by the bucket recursion without materializing elements.
pub fn pattern_order(pattern: &PatternSet, n: usize) -> Result<BigUint> {
    let depth_d = pattern.pattern_depth();
    if n < depth_d {
        return Err(Error::Range(format!(
            "requested depth {n} is below the pattern depth {depth_d}"
        )));
    }
    let codec = KeyCodec::new(pattern.degree(), depth_d - 1);
    let window_trunc = bucket_keys(pattern)?;
    // counts: truncation key -> number of members with that truncation.
    let mut counts: HashMap<Vec<u8>, BigUint> = HashMap::new();
    for key in &window_trunc {
        *counts.entry(key.clone()).or_insert_with(BigUint::zero) += BigUint::one();
    }
    let d = pattern.degree().get();
    for _ in depth_d..n {
        let mut next: HashMap<Vec<u8>, BigUint> = HashMap::new();
        for (w, w_key) in pattern.allowed().iter().zip(&window_trunc) {
            let mut product = BigUint::one();
            for letter in 0..d as u8 {
                let child_key =
                    codec.key(&w.section(&Vertex::from_letters(&[letter]), depth_d - 1)?);
                match counts.get(&child_key) {
                    Some(c) if !c.is_zero() => product *= c,
                    _ => {
                        product = BigUint::zero();
                        break;
                    }
                }
            }
            if !product.is_zero() {
                *next.entry(w_key.clone()).or_insert_with(BigUint::zero) += product;
            }
        }
        counts = next;
    }
    Ok(counts.values().sum())
}

/// Materializes the depth-`n` group of finite type over `pattern`.
///
/// Errors with [`Error::Capacity`] when the closed-form order exceeds `cap`.
pub fn pattern_group(pattern: &PatternSet, n: usize, cap: usize) -> Result<FiniteTreeGroup> {
    let order = pattern_order(pattern, n)?;
    match order.to_usize() {
        Some(size) if size <= cap => {}
        _ => {
            return Err(Error::Capacity {
                cap,
                reached: order.to_usize().unwrap_or(usize::MAX),
            })
        }
    }
    let degree = pattern.degree();
    let depth_d = pattern.pattern_depth();
    let d = degree.get();
    let trunc_codec = KeyCodec::new(degree, depth_d - 1);

    let mut members: Vec<Portrait> = pattern.allowed().to_vec();
    for m in depth_d..n {
        // Bucket current members by truncation key.
        let mut buckets: HashMap<Vec<u8>, Vec<&Portrait>> = HashMap::new();
        for g in &members {
            buckets
                .entry(trunc_codec.key(&g.truncate(depth_d - 1)?))
                .or_default()
                .push(g);
        }
        let mut next: Vec<Portrait> = Vec::new();
        for w in pattern.allowed() {
            let child_buckets: Option<Vec<&Vec<&Portrait>>> = (0..d as u8)
                .map(|letter| {
                    let key = trunc_codec
                        .key(&w.section(&Vertex::from_letters(&[letter]), depth_d - 1).ok()?);
                    buckets.get(&key)
                })
                .collect();
            let Some(child_buckets) = child_buckets else {
                continue;
            };
            // Cartesian product over per-child choices.
            let sizes: Vec<usize> = child_buckets.iter().map(|b| b.len()).collect();
            let mut choice = vec![0usize; d];
            'product: loop {
                let children: Vec<&Portrait> =
                    (0..d).map(|i| child_buckets[i][choice[i]]).collect();
                next.push(assemble(degree, m + 1, w, &children));
                let mut pos = d - 1;
                loop {
                    choice[pos] += 1;
                    if choice[pos] < sizes[pos] {
                        break;
                    }
                    choice[pos] = 0;
                    if pos == 0 {
                        break 'product;
                    }
                    pos -= 1;
                }
            }
        }
        members = next;
    }
    // Deterministic order.
    let codec = KeyCodec::new(degree, n);
    let mut pairs: Vec<(Vec<u8>, Portrait)> =
        members.into_iter().map(|g| (codec.key(&g), g)).collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    pairs.dedup_by(|a, b| a.0 == b.0);
    let group = FiniteTreeGroup::from_elements(
        degree,
        n,
        Vec::new(),
        pairs.into_iter().map(|(_, g)| g).collect(),
    );
    if group.order() != order {
        return Err(Error::Invariant(format!(
            "materialized pattern group order {} disagrees with closed form {order}",
            group.order()
        )));
    }
    Ok(group)
}

/// Glues a root window onto child members: the root label comes from the
/// window, the subtree under letter `i` from `children[i]`. Bucket keys
/// guarantee the overlap (levels `1..D-1`) agrees.
fn assemble(degree: Degree, depth: usize, window: &Portrait, children: &[&Portrait]) -> Portrait {
    Portrait::from_label_fn(degree, depth, |v| match v.letters().split_first() {
        None => window.label(v).expect("root label"),
        Some((&first, rest)) => children[first as usize]
            .label(&Vertex::from_letters(rest))
            .expect("child label"),
    })
}

/// Finite-depth evidence about a group being of finite type with a given
/// pattern depth.
pub struct FiniteTypeVerdict {
    /// Depth of the pattern window tested.
    pub pattern_depth: usize,
    /// Depth at which the evidence was computed.
    pub evidence_depth: usize,
    /// Whether the group equals the group of finite type over its own
    /// depth-D quotient, at the evidence depth.
    pub quotient_matches: bool,
    pub group_order: BigUint,
    pub pattern_group_order: BigUint,
    /// Per first-level vertex: do sections of the rigid vertex stabilizer of
    /// the level-(D-1) stabilizer cover the truncated level-(D-1) stabilizer?
    pub branching: Vec<bool>,
}

impl FiniteTypeVerdict {
    pub fn holds(&self) -> bool {
        self.quotient_matches && self.branching.iter().all(|&b| b)
    }
}

/// Checks finite-type evidence for `group` at pattern depth `depth_d`.
///
/// Part (a) compares the group with the group of finite type over its own
/// depth-D quotient; part (b) checks that the level-(D-1) stabilizer
/// branches: at every first-level vertex, sections of its rigid part cover
/// the stabilizer of the truncated group. Both statements are exact for the
/// quotient at this depth and evidence only for the corresponding infinite
/// group.
pub fn finite_type_check(group: &FiniteTreeGroup, depth_d: usize) -> Result<FiniteTypeVerdict> {
    if depth_d == 0 {
        return Err(Error::Range("pattern depth must be at least 1".into()));
    }
    let n = group.depth();
    if n < depth_d + 1 {
        return Err(Error::Range(format!(
            "finite-type check at pattern depth {depth_d} needs group depth at least {}",
            depth_d + 1
        )));
    }
    let pattern = PatternSet::from_quotient(group, depth_d)?;
    let rebuilt = pattern_group(&pattern, n, crate::engine::DEFAULT_CAP)?;
    let quotient_matches =
        rebuilt.len() == group.len() && group.elements().iter().all(|g| rebuilt.contains(g));

    let stab = group.level_stabilizer(depth_d - 1)?;
    let m = n - 1;
    let codec = KeyCodec::new(group.degree(), m);
    let target: HashSet<Vec<u8>> = stab
        .elements()
        .iter()
        .map(|g| Ok(codec.key(&g.truncate(m)?)))
        .collect::<Result<_>>()?;
    let mut branching = Vec::new();
    for letter in 0..group.degree().get() as u8 {
        let v = Vertex::from_letters(&[letter]);
        let rigid = stab.rigid_vertex_stabilizer(&v)?;
        let sections: HashSet<Vec<u8>> = rigid
            .elements()
            .iter()
            .map(|g| Ok(codec.key(&g.section(&v, m)?)))
            .collect::<Result<_>>()?;
        branching.push(target.is_subset(&sections));
    }

    Ok(FiniteTypeVerdict {
        pattern_depth: depth_d,
        evidence_depth: n,
        quotient_matches,
        group_order: group.order(),
        pattern_group_order: rebuilt.order(),
        branching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::tower::TowerSpec;

    fn d(n: usize) -> Degree {
        Degree::new(n).unwrap()
    }

    #[test]
    fn unconstrained_pattern_gives_full_group() {
        // P = Aut T^1 for d=2: order 2^(2^n - 1) at depth n.
        let p = PatternSet::full_level(d(2)).unwrap();
        assert_eq!(pattern_order(&p, 3).unwrap(), BigUint::from(128u32));
        let g = pattern_group(&p, 3, 1000).unwrap();
        assert_eq!(g.len(), 128);
        assert!(g.is_level_transitive());
    }

    #[test]
    fn identity_pattern_gives_trivial_group() {
        let p = PatternSet::new(vec![Portrait::identity(d(2), 1)]).unwrap();
        assert_eq!(pattern_order(&p, 4).unwrap(), BigUint::one());
        assert_eq!(pattern_group(&p, 4, 10).unwrap().len(), 1);
    }

    #[test]
    fn tower_quotients_are_finite_type_of_depth_two() {
        // The depth-2 quotient of the tower reproduces deeper quotients as a
        // pattern group.
        let spec = TowerSpec::standard(d(2));
        let h2 = spec.quotient(2, 1000).unwrap();
        let p = PatternSet::from_group(&h2).unwrap();
        for n in 3..=4 {
            let from_pattern = pattern_group(&p, n, 100_000).unwrap();
            let from_closure = spec.quotient(n, 100_000).unwrap();
            assert_eq!(from_pattern.len(), from_closure.len(), "depth {n}");
            assert!(from_closure
                .elements()
                .iter()
                .all(|g| from_pattern.contains(g)));
        }
    }

    #[test]
    fn pattern_set_rejects_non_subgroups() {
        // Missing identity.
        let swap = Portrait::single_label(
            d(2),
            1,
            &Vertex::root(),
            &crate::tree::Perm::transposition(2, 0, 1),
        )
        .unwrap();
        assert!(PatternSet::new(vec![swap.clone()]).is_err());
        // Not closed: {e, swap-at-v0} at depth 2 is closed, so drop products.
        let e2 = Portrait::identity(d(2), 2);
        let swap_root = Portrait::single_label(
            d(2),
            2,
            &Vertex::root(),
            &crate::tree::Perm::transposition(2, 0, 1),
        )
        .unwrap();
        let swap_v0 = Portrait::single_label(
            d(2),
            2,
            &Vertex::from_letters(&[0]),
            &crate::tree::Perm::transposition(2, 0, 1),
        )
        .unwrap();
        assert!(PatternSet::new(vec![e2.clone(), swap_root, swap_v0]).is_err());
    }

    #[test]
    fn capacity_is_checked_before_materializing() {
        let p = PatternSet::full_level(d(2)).unwrap();
        match pattern_group(&p, 4, 100) {
            Err(Error::Capacity { cap, reached }) => {
                assert_eq!(cap, 100);
                assert_eq!(reached, 32768);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn full_group_is_finite_type_depth_one() {
        let p = PatternSet::full_level(d(2)).unwrap();
        let g = pattern_group(&p, 3, 1000).unwrap();
        let verdict = finite_type_check(&g, 1).unwrap();
        assert!(verdict.quotient_matches);
        assert!(verdict.branching.iter().all(|&b| b));
        assert!(verdict.holds());
    }

    #[test]
    fn tower_finite_type_verdict_depth_two() {
        let spec = TowerSpec::standard(d(2));
        let h = spec.quotient(4, 100_000).unwrap();
        let verdict = finite_type_check(&h, 2).unwrap();
        assert!(verdict.holds());
    }
}
