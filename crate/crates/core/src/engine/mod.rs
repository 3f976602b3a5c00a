//! Exact enumeration and structural analysis of finite congruence quotients.
//!
//! A [`FiniteTreeGroup`] is an exactly enumerated group of depth-`n`
//! portraits, closed under composition and inversion, with a canonical-key
//! index for O(1) membership. Element order is deterministic: breadth-first
//! closure layers, each layer sorted by canonical key, so the ordering does
//! not depend on the order in which generators were supplied.
//!
//! Everything computed here is exact for the quotient at the stored depth;
//! statements about the corresponding infinite groups are depth-`n` evidence
//! only, and reports must say so.

mod sample;

pub use sample::Sampler;

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::tree::{Degree, KeyCodec, Portrait, Vertex};

/// Default cap on enumerated elements. Exceeding it is an error, never a
/// silent truncation; larger statistics must go through structured samplers.
pub const DEFAULT_CAP: usize = 10_000_000;

/// An exactly enumerated congruence quotient.
#[derive(Clone)]
pub struct FiniteTreeGroup {
    degree: Degree,
    depth: usize,
    generators: Vec<Portrait>,
    elements: Vec<Portrait>,
    index: HashMap<Vec<u8>, usize>,
    orbits_cache: OnceLock<Vec<Vec<Vec<u64>>>>,
}

impl FiniteTreeGroup {
    /// Breadth-first product closure of the generators.
    ///
    /// The closure multiplies by generators and their inverses, layer by
    /// layer; each new layer is sorted by canonical key before being
    /// appended, so the resulting element order depends only on the
    /// generator set. Errors with [`Error::Capacity`] when the closure
    /// exceeds `cap`, reporting the partial size.
    pub fn enumerate_closure(generators: &[Portrait], cap: usize) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::Shape("closure needs at least one generator".into()));
        };
        let degree = first.degree();
        let depth = first.depth();
        for g in generators {
            if g.degree() != degree || g.depth() != depth {
                return Err(Error::Shape(format!(
                    "generators disagree on shape: ({}, {}) vs ({}, {})",
                    degree,
                    depth,
                    g.degree(),
                    g.depth()
                )));
            }
        }
        if cap == 0 {
            return Err(Error::Capacity { cap, reached: 1 });
        }

        // Multiplier set: generators and inverses, deduplicated.
        let codec = KeyCodec::new(degree, depth);
        let mut multipliers: Vec<Portrait> = Vec::new();
        let mut seen_mult = HashSet::new();
        for g in generators {
            for m in [g.clone(), g.invert()] {
                if seen_mult.insert(codec.key(&m)) {
                    multipliers.push(m);
                }
            }
        }

        let identity = Portrait::identity(degree, depth);
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::new();
        index.insert(codec.key(&identity), 0usize);

        let mut frontier = vec![identity];
        while !frontier.is_empty() {
            let mut layer: Vec<(Vec<u8>, Portrait)> = Vec::new();
            for g in &frontier {
                for m in &multipliers {
                    let product = g.compose(m)?;
                    let key = codec.key(&product);
                    if !index.contains_key(&key) {
                        // Reserve the slot now; position assigned after sort.
                        if let Entry::Vacant(slot) = index.entry(key.clone()) {
                            slot.insert(usize::MAX);
                            layer.push((key, product));
                        }
                    }
                }
            }
            layer.sort_by(|a, b| a.0.cmp(&b.0));
            frontier = Vec::with_capacity(layer.len());
            for (key, product) in layer {
                if elements.len() >= cap {
                    return Err(Error::Capacity {
                        cap,
                        reached: elements.len() + 1,
                    });
                }
                *index.get_mut(&key).unwrap() = elements.len();
                elements.push(product.clone());
                frontier.push(product);
            }
        }

        Ok(FiniteTreeGroup {
            degree,
            depth,
            generators: generators.to_vec(),
            elements,
            index,
            orbits_cache: OnceLock::new(),
        })
    }

    /// Wraps an explicit element list as a group, indexing by canonical key.
    ///
    /// The caller asserts closure; `generators` may be empty, in which case
    /// structural operations fall back to the full element list.
    pub(crate) fn from_elements(
        degree: Degree,
        depth: usize,
        generators: Vec<Portrait>,
        elements: Vec<Portrait>,
    ) -> Self {
        let codec = KeyCodec::new(degree, depth);
        let mut index = HashMap::with_capacity(elements.len());
        for (i, g) in elements.iter().enumerate() {
            index.insert(codec.key(g), i);
        }
        debug_assert_eq!(index.len(), elements.len());
        FiniteTreeGroup {
            degree,
            depth,
            generators,
            elements,
            index,
            orbits_cache: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Exact order as an arbitrary-precision integer.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.elements.len())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generators(&self) -> &[Portrait] {
        &self.generators
    }

    pub fn elements(&self) -> &[Portrait] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Portrait {
        &self.elements[i]
    }

    pub fn contains(&self, g: &Portrait) -> bool {
        g.degree() == self.degree
            && g.depth() == self.depth
            && self.index.contains_key(&g.canonical_key())
    }

    pub fn position_of(&self, g: &Portrait) -> Option<usize> {
        self.index.get(&g.canonical_key()).copied()
    }

    /// Acting set for structural computations: generators when available,
    /// otherwise every element.
    fn acting_set(&self) -> &[Portrait] {
        if self.generators.is_empty() {
            &self.elements
        } else {
            &self.generators
        }
    }

    /// Set of canonical keys of the depth-`k` truncations of all elements,
    /// i.e. the quotient π_k of this group.
    pub fn truncated_keys(&self, k: usize) -> Result<HashSet<Vec<u8>>> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "truncation level {k} exceeds depth {}",
                self.depth
            )));
        }
        let codec = KeyCodec::new(self.degree, k);
        let mut keys = HashSet::new();
        for g in &self.elements {
            keys.insert(codec.key(&g.truncate(k)?));
        }
        Ok(keys)
    }

    /// The quotient π_k of this group as an enumerated group of depth-`k`
    /// portraits (deterministic order via canonical keys).
    pub fn truncated_quotient(&self, k: usize) -> Result<FiniteTreeGroup> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "truncation level {k} exceeds depth {}",
                self.depth
            )));
        }
        let codec = KeyCodec::new(self.degree, k);
        let mut seen = HashSet::new();
        let mut pairs: Vec<(Vec<u8>, Portrait)> = Vec::new();
        for g in &self.elements {
            let t = g.truncate(k)?;
            let key = codec.key(&t);
            if seen.insert(key.clone()) {
                pairs.push((key, t));
            }
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let gens = self
            .generators
            .iter()
            .map(|g| g.truncate(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteTreeGroup::from_elements(
            self.degree,
            k,
            gens,
            pairs.into_iter().map(|(_, g)| g).collect(),
        ))
    }

    /// Filters the elements into a subgroup-by-predicate, preserving order.
    fn filter_subgroup(&self, mut keep: impl FnMut(&Portrait) -> bool) -> FiniteTreeGroup {
        let elements: Vec<Portrait> = self.elements.iter().filter(|g| keep(g)).cloned().collect();
        FiniteTreeGroup::from_elements(self.degree, self.depth, Vec::new(), elements)
    }

    /// Pointwise stabilizer of level `k`: labels above level `k` trivial.
    pub fn level_stabilizer(&self, k: usize) -> Result<FiniteTreeGroup> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "level {k} exceeds depth {}",
                self.depth
            )));
        }
        Ok(self.filter_subgroup(|g| {
            g.truncate(k).map(|t| t.is_identity()).unwrap_or(false)
        }))
    }

    /// Stabilizer of a single vertex.
    pub fn vertex_stabilizer(&self, v: &Vertex) -> Result<FiniteTreeGroup> {
        if v.level() > self.depth {
            return Err(Error::Range(format!(
                "vertex {v} at level {} exceeds depth {}",
                v.level(),
                self.depth
            )));
        }
        let mut out = Vec::new();
        for g in &self.elements {
            if g.apply_vertex(v)? == *v {
                out.push(g.clone());
            }
        }
        Ok(FiniteTreeGroup::from_elements(
            self.degree,
            self.depth,
            Vec::new(),
            out,
        ))
    }

    /// Rigid vertex stabilizer: elements that fix every vertex not below `v`,
    /// i.e. with trivial labels outside the subtree at `v`.
    pub fn rigid_vertex_stabilizer(&self, v: &Vertex) -> Result<FiniteTreeGroup> {
        if v.level() > self.depth {
            return Err(Error::Range(format!(
                "vertex {v} at level {} exceeds depth {}",
                v.level(),
                self.depth
            )));
        }
        let v = v.clone();
        Ok(self.filter_subgroup(|g| supported_below(g, &v)))
    }

    /// Rigid level stabilizer: the internal product of the rigid vertex
    /// stabilizers over level `k`. Supports are disjoint so the product is
    /// always direct; the returned report records that.
    pub fn rigid_level_stabilizer(&self, k: usize) -> Result<RigidLevelStabilizer> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "level {k} exceeds depth {}",
                self.depth
            )));
        }
        let mut per_vertex = Vec::new();
        for idx in 0..self.degree.level_size(k) {
            let v = Vertex::from_level_index(self.degree, k, idx);
            per_vertex.push(self.rigid_vertex_stabilizer(&v)?);
        }
        // Pointwise products across the factors; disjoint supports mean the
        // labels simply merge.
        let mut products = vec![Portrait::identity(self.degree, self.depth)];
        for factor in &per_vertex {
            let mut next = Vec::with_capacity(products.len() * factor.len());
            for p in &products {
                for f in factor.elements() {
                    next.push(p.compose(f)?);
                }
            }
            products = next;
        }
        let codec = KeyCodec::new(self.degree, self.depth);
        let mut seen = HashSet::new();
        let mut pairs: Vec<(Vec<u8>, Portrait)> = Vec::new();
        for g in products {
            let key = codec.key(&g);
            if seen.insert(key.clone()) {
                pairs.push((key, g));
            }
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let is_direct = pairs.len()
            == per_vertex
                .iter()
                .map(FiniteTreeGroup::len)
                .product::<usize>();
        Ok(RigidLevelStabilizer {
            group: FiniteTreeGroup::from_elements(
                self.degree,
                self.depth,
                Vec::new(),
                pairs.into_iter().map(|(_, g)| g).collect(),
            ),
            factor_orders: per_vertex.iter().map(|g| g.len()).collect(),
            is_direct,
        })
    }

    /// Orbit partitions of every level `0..=depth`, cached.
    fn all_orbits(&self) -> &Vec<Vec<Vec<u64>>> {
        self.orbits_cache.get_or_init(|| {
            (0..=self.depth)
                .map(|k| orbits_of_level(self.degree, k, self.acting_set()))
                .collect()
        })
    }

    /// Exact orbit partition of level `k`, each orbit sorted, orbits ordered
    /// by least element.
    pub fn orbits_on_level(&self, k: usize) -> Result<Vec<Vec<Vertex>>> {
        if k > self.depth {
            return Err(Error::Range(format!(
                "level {k} exceeds depth {}",
                self.depth
            )));
        }
        Ok(self.all_orbits()[k]
            .iter()
            .map(|orbit| {
                orbit
                    .iter()
                    .map(|&i| Vertex::from_level_index(self.degree, k, i))
                    .collect()
            })
            .collect())
    }

    /// One bool per level `1..=depth`: does the group act transitively there?
    pub fn level_transitivity(&self) -> Vec<bool> {
        (1..=self.depth)
            .map(|k| self.all_orbits()[k].len() == 1)
            .collect()
    }

    pub fn is_level_transitive(&self) -> bool {
        self.level_transitivity().into_iter().all(|b| b)
    }

    /// Finite-depth fractality surrogate: level-transitive, and for every
    /// first-level vertex `v` the sections at `v` of the vertex stabilizer
    /// equal the depth-(n-1) truncation set of the whole group.
    pub fn is_fractal(&self) -> Result<bool> {
        if self.depth < 2 {
            return Err(Error::Range(
                "fractality check needs depth >= 2".to_string(),
            ));
        }
        if !self.is_level_transitive() {
            return Ok(false);
        }
        let m = self.depth - 1;
        let codec = KeyCodec::new(self.degree, m);
        let whole: HashSet<Vec<u8>> = self
            .elements
            .iter()
            .map(|g| Ok(codec.key(&g.truncate(m)?)))
            .collect::<Result<_>>()?;
        for letter in 0..self.degree.get() as u8 {
            let v = Vertex::from_letters(&[letter]);
            let st = self.vertex_stabilizer(&v)?;
            let sections: HashSet<Vec<u8>> = st
                .elements()
                .iter()
                .map(|g| Ok(codec.key(&g.section(&v, m)?)))
                .collect::<Result<_>>()?;
            if sections != whole {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Right-coset decomposition of this group by a subgroup.
    pub fn coset_decomposition(&self, subgroup: &FiniteTreeGroup) -> Result<CosetDecomposition> {
        if subgroup.degree != self.degree || subgroup.depth != self.depth {
            return Err(Error::Shape(
                "coset decomposition needs equal shapes".to_string(),
            ));
        }
        for h in subgroup.elements() {
            if !self.contains(h) {
                return Err(Error::Containment(format!(
                    "subgroup element {h} lies outside the group"
                )));
            }
        }
        if self.len() % subgroup.len() != 0 {
            return Err(Error::Invariant(format!(
                "Lagrange failure: {} does not divide {}",
                subgroup.len(),
                self.len()
            )));
        }
        let mut coset_of = vec![usize::MAX; self.len()];
        let mut transversal = Vec::new();
        for (i, g) in self.elements.iter().enumerate() {
            if coset_of[i] != usize::MAX {
                continue;
            }
            let coset_index = transversal.len();
            transversal.push(g.clone());
            for h in subgroup.elements() {
                let hg = h.compose(g)?;
                let pos = self.position_of(&hg).ok_or_else(|| {
                    Error::Containment("subgroup does not stabilize the group".to_string())
                })?;
                coset_of[pos] = coset_index;
            }
        }
        let index = self.len() / subgroup.len();
        if transversal.len() != index {
            return Err(Error::Invariant(format!(
                "coset count {} does not match index {index}",
                transversal.len()
            )));
        }
        let is_normal = self.subgroup_is_normal(subgroup)?;
        let mut coset_map = HashMap::with_capacity(self.len());
        for (i, g) in self.elements.iter().enumerate() {
            coset_map.insert(g.canonical_key(), coset_of[i]);
        }
        Ok(CosetDecomposition {
            subgroup_order: subgroup.order(),
            index: BigUint::from(index),
            transversal,
            coset_map,
            is_normal,
        })
    }

    /// Normality test: conjugation of the subgroup's generating set (its
    /// elements when no generators are recorded) by this group's acting set.
    pub fn subgroup_is_normal(&self, subgroup: &FiniteTreeGroup) -> Result<bool> {
        let conjugators = self.acting_set();
        let test_set = subgroup.acting_set();
        for g in conjugators {
            let g_inv = g.invert();
            for h in test_set {
                let conj = g_inv.compose(h)?.compose(g)?;
                if !subgroup.contains(&conj) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True when every element of `subgroup` lies in this group.
    pub fn contains_all(&self, subgroup: &FiniteTreeGroup) -> bool {
        subgroup.elements().iter().all(|h| self.contains(h))
    }
}

impl std::fmt::Debug for FiniteTreeGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FiniteTreeGroup(d={}, depth={}, order={})",
            self.degree,
            self.depth,
            self.len()
        )
    }
}

/// Rigid level stabilizer with its per-vertex factor structure.
pub struct RigidLevelStabilizer {
    pub group: FiniteTreeGroup,
    pub factor_orders: Vec<usize>,
    /// Whether the internal product of the rigid vertex stabilizers is
    /// direct. It always is, by disjoint supports; recorded for reports.
    pub is_direct: bool,
}

/// A right-coset decomposition `G = ⊔ H·t`.
pub struct CosetDecomposition {
    pub subgroup_order: BigUint,
    pub index: BigUint,
    /// Representatives in group discovery order.
    pub transversal: Vec<Portrait>,
    /// canonical key of a group element → index into `transversal`.
    pub coset_map: HashMap<Vec<u8>, usize>,
    pub is_normal: bool,
}

impl CosetDecomposition {
    pub fn coset_of(&self, g: &Portrait) -> Option<usize> {
        self.coset_map.get(&g.canonical_key()).copied()
    }
}

/// True when all labels outside the subtree at `v` are trivial.
fn supported_below(g: &Portrait, v: &Vertex) -> bool {
    let d = g.degree().get();
    let mut frontier: Vec<Vertex> = vec![Vertex::root()];
    for level in 0..g.depth() {
        for w in &frontier {
            if !w.is_below(v) && !g.label(w).expect("internal vertex").is_identity() {
                return false;
            }
        }
        if level + 1 < g.depth() {
            frontier = frontier
                .iter()
                .flat_map(|w| (0..d as u8).map(move |j| w.child(j)))
                .collect();
        }
    }
    true
}

/// Orbits of the action on level `k` induced by the given portraits.
fn orbits_of_level(degree: Degree, k: usize, acting: &[Portrait]) -> Vec<Vec<u64>> {
    let size = degree.level_size(k);
    let mut orbit_of: Vec<usize> = vec![usize::MAX; size as usize];
    let mut orbits = Vec::new();
    for start in 0..size {
        if orbit_of[start as usize] != usize::MAX {
            continue;
        }
        let orbit_index = orbits.len();
        let mut stack = vec![start];
        let mut members = vec![start];
        orbit_of[start as usize] = orbit_index;
        while let Some(v) = stack.pop() {
            for g in acting {
                let img = g.apply_level_index(k, v);
                if orbit_of[img as usize] == usize::MAX {
                    orbit_of[img as usize] = orbit_index;
                    stack.push(img);
                    members.push(img);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

/// Per-level transitivity of the group generated by `generators`, computed
/// from generator orbits alone (no closure needed).
pub fn level_transitivity_of_generators(generators: &[Portrait]) -> Result<Vec<bool>> {
    let Some(first) = generators.first() else {
        return Err(Error::Shape("need at least one generator".into()));
    };
    let degree = first.degree();
    let depth = first.depth();
    Ok((1..=depth)
        .map(|k| orbits_of_level(degree, k, generators).len() == 1)
        .collect())
}

/// Fractality check from generators alone, via point-stabilizer generators.
///
/// For each first-level vertex the stabilizer of the vertex is generated by
/// the orbit-transversal conjugates `t_u · g · t_{u^g}⁻¹`; the sections of
/// those generate the section subgroup, which is compared against the
/// truncation of the whole group. Both closures live one level down, so this
/// stays cheap even when the group itself is far too large to enumerate.
pub fn fractal_by_generators(generators: &[Portrait], cap: usize) -> Result<bool> {
    let Some(first) = generators.first() else {
        return Err(Error::Shape("need at least one generator".into()));
    };
    let degree = first.degree();
    let depth = first.depth();
    if depth < 2 {
        return Err(Error::Range(
            "fractality check needs depth >= 2".to_string(),
        ));
    }
    if !level_transitivity_of_generators(generators)?
        .into_iter()
        .all(|b| b)
    {
        return Ok(false);
    }
    let m = depth - 1;
    let truncated: Vec<Portrait> = generators
        .iter()
        .map(|g| g.truncate(m))
        .collect::<Result<_>>()?;
    let whole = FiniteTreeGroup::enumerate_closure(&truncated, cap)?;
    let d = degree.get();
    for letter in 0..d as u8 {
        let v = Vertex::from_letters(&[letter]);
        // Orbit of v with transversal words.
        let mut reps: HashMap<u8, Portrait> = HashMap::new();
        reps.insert(letter, Portrait::identity(degree, depth));
        let mut stack = vec![letter];
        while let Some(u) = stack.pop() {
            let t_u = reps[&u].clone();
            for g in generators {
                let img = g.apply_vertex(&Vertex::from_letters(&[u]))?.letters()[0];
                if !reps.contains_key(&img) {
                    reps.insert(img, t_u.compose(g)?);
                    stack.push(img);
                }
            }
        }
        let mut section_gens = Vec::new();
        for (&u, t_u) in &reps {
            for g in generators {
                let img = g.apply_vertex(&Vertex::from_letters(&[u]))?.letters()[0];
                let t_img_inv = reps[&img].invert();
                let stab_elt = t_u.compose(g)?.compose(&t_img_inv)?;
                debug_assert_eq!(
                    stab_elt.apply_vertex(&v)?,
                    v,
                    "Schreier element must stabilize the vertex"
                );
                section_gens.push(stab_elt.section(&v, m)?);
            }
        }
        section_gens.push(Portrait::identity(degree, m));
        let section_group = FiniteTreeGroup::enumerate_closure(&section_gens, cap)?;
        if section_group.len() != whole.len()
            || !whole.elements().iter().all(|g| section_group.contains(g))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exactly uniform draw from an enumerated group.
pub fn uniform_sample<R: rand::Rng + ?Sized>(group: &FiniteTreeGroup, rng: &mut R) -> Portrait {
    group.elements[rng.gen_range(0..group.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Perm;

    fn d(n: usize) -> Degree {
        Degree::new(n).unwrap()
    }

    fn root_swap(depth: usize) -> Portrait {
        Portrait::single_label(d(2), depth, &Vertex::root(), &Perm::transposition(2, 0, 1))
            .unwrap()
    }

    /// Generators of the full iterated wreath product at depth n for d=2:
    /// one swap per internal vertex.
    fn aut_t2_generators(depth: usize) -> Vec<Portrait> {
        let degree = d(2);
        let mut gens = Vec::new();
        for level in 0..depth {
            for idx in 0..degree.level_size(level) {
                let v = Vertex::from_level_index(degree, level, idx);
                gens.push(
                    Portrait::single_label(degree, depth, &v, &Perm::transposition(2, 0, 1))
                        .unwrap(),
                );
            }
        }
        gens
    }

    #[test]
    fn closure_of_root_swap() {
        let g = FiniteTreeGroup::enumerate_closure(&[root_swap(1)], 100).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.contains(&Portrait::identity(d(2), 1)));
    }

    #[test]
    fn closure_of_full_aut_t2() {
        let g = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 100).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.is_level_transitive());
        assert!(g.is_fractal().unwrap());
    }

    #[test]
    fn capacity_errors_report_partial_size() {
        let err = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 5).unwrap_err();
        match err {
            Error::Capacity { cap, reached } => {
                assert_eq!(cap, 5);
                assert!(reached > 5);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn closure_is_generator_order_independent() {
        let mut gens = aut_t2_generators(3);
        let a = FiniteTreeGroup::enumerate_closure(&gens, 1000).unwrap();
        gens.reverse();
        let b = FiniteTreeGroup::enumerate_closure(&gens, 1000).unwrap();
        assert_eq!(a.len(), b.len());
        // Layer-sorted ordering makes even the element order agree.
        assert_eq!(a.elements(), b.elements());
    }

    #[test]
    fn level_stabilizer_of_aut_t2() {
        let g = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 100).unwrap();
        let st1 = g.level_stabilizer(1).unwrap();
        assert_eq!(st1.len(), 4);
        let st2 = g.level_stabilizer(2).unwrap();
        assert_eq!(st2.len(), 1);
        assert!(g.level_stabilizer(3).is_err());
    }

    #[test]
    fn rigid_vertex_stabilizer_of_aut_t2() {
        let g = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 100).unwrap();
        let rist = g
            .rigid_vertex_stabilizer(&Vertex::from_letters(&[0]))
            .unwrap();
        assert_eq!(rist.len(), 2);
        let rl = g.rigid_level_stabilizer(1).unwrap();
        assert_eq!(rl.group.len(), 4);
        assert!(rl.is_direct);
        assert_eq!(rl.factor_orders, vec![2, 2]);
        // Rigid level stabilizer sits inside the level stabilizer.
        let st1 = g.level_stabilizer(1).unwrap();
        assert!(st1.contains_all(&rl.group));
    }

    #[test]
    fn root_swap_orbit_structure() {
        let g = FiniteTreeGroup::enumerate_closure(&[root_swap(2)], 100).unwrap();
        let trans = g.level_transitivity();
        assert_eq!(trans, vec![true, false]);
        let orbits = g.orbits_on_level(2).unwrap();
        assert_eq!(orbits.len(), 2);
        let words: Vec<Vec<Vec<u8>>> = orbits
            .iter()
            .map(|o| o.iter().map(|v| v.letters().to_vec()).collect())
            .collect();
        assert_eq!(
            words,
            vec![
                vec![vec![0, 0], vec![1, 0]],
                vec![vec![0, 1], vec![1, 1]],
            ]
        );
        assert!(!g.is_fractal().unwrap());
    }

    #[test]
    fn trivial_group_orbits_are_singletons() {
        let g = FiniteTreeGroup::enumerate_closure(&[Portrait::identity(d(2), 2)], 10).unwrap();
        assert_eq!(g.orbits_on_level(2).unwrap().len(), 4);
    }

    #[test]
    fn coset_decomposition_by_self_and_by_stabilizer() {
        let g = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 100).unwrap();
        let whole = g.coset_decomposition(&g).unwrap();
        assert_eq!(whole.index, BigUint::from(1u32));
        assert!(whole.is_normal);

        let st1 = g.level_stabilizer(1).unwrap();
        let dec = g.coset_decomposition(&st1).unwrap();
        assert_eq!(dec.index, BigUint::from(2u32));
        assert!(dec.is_normal);
        // index * subgroup order = group order
        assert_eq!(dec.index.clone() * dec.subgroup_order.clone(), g.order());
        // Every element belongs to exactly one coset.
        for e in g.elements() {
            assert!(dec.coset_of(e).is_some());
        }
    }

    #[test]
    fn containment_error_for_non_subgroup() {
        let g = FiniteTreeGroup::enumerate_closure(&[root_swap(2)], 100).unwrap();
        let other = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(2), 100).unwrap();
        assert!(matches!(
            g.coset_decomposition(&other),
            Err(Error::Containment(_))
        ));
    }

    #[test]
    fn lagrange_for_all_level_stabilizers() {
        let g = FiniteTreeGroup::enumerate_closure(&aut_t2_generators(3), 1000).unwrap();
        assert_eq!(g.len(), 128);
        for k in 0..=3 {
            let st = g.level_stabilizer(k).unwrap();
            assert_eq!(g.len() % st.len(), 0);
        }
    }

    #[test]
    fn fractal_by_generators_agrees_with_enumerated_check() {
        let gens = aut_t2_generators(3);
        let g = FiniteTreeGroup::enumerate_closure(&gens, 1000).unwrap();
        assert_eq!(
            g.is_fractal().unwrap(),
            fractal_by_generators(&gens, 10_000).unwrap()
        );
        let swap_only = vec![root_swap(2)];
        assert!(!fractal_by_generators(&swap_only, 1000).unwrap());
    }

    #[test]
    fn burnside_orbit_count_via_fixed_points() {
        // (1/|G|) sum_g X_k(g) = #orbits on level k.
        let g = FiniteTreeGroup::enumerate_closure(&[root_swap(2)], 100).unwrap();
        for k in 1..=2 {
            let total: u64 = g
                .elements()
                .iter()
                .map(|e| e.fixed_count(k).unwrap())
                .sum();
            let orbits = g.orbits_on_level(k).unwrap().len() as u64;
            assert_eq!(total, orbits * g.len() as u64);
        }
    }
}
