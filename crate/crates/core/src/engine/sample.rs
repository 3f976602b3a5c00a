//! Exactly uniform samplers over congruence quotients.
//!
//! Every strategy here is exactly uniform, never approximate:
//!
//! - `Enumerated`: index into an enumerated group;
//! - `DiagonalTower`: one independent uniform factor per level of a diagonal
//!   tower group, multiplied in a fixed order (unique factorization makes
//!   the product map a bijection);
//! - `CosetUnion`: uniform transversal element times a uniform subgroup
//!   element;
//! - `IndependentLabels`: independent uniform label per internal vertex, for
//!   depth-1 pattern groups where labels are unconstrained.
//!
//! Samplers borrow caller-owned seeded streams, so parallel callers can use
//! independent substreams.

use std::sync::Arc;

use rand::Rng;

use crate::error::Result;
use crate::tree::{Degree, Perm, Portrait};

/// An exactly uniform sampler for one group at one depth.
#[derive(Clone)]
pub enum Sampler {
    /// Uniform index into an enumerated element list.
    Enumerated {
        elements: Arc<Vec<Portrait>>,
    },
    /// Product of independent uniform per-level factors of a diagonal tower:
    /// level 0 contributes a root power of sigma, level k >= 1 one sigma
    /// power per level-(k-1) vertex, shared by its children.
    DiagonalTower {
        degree: Degree,
        depth: usize,
        sigma_powers: Arc<Vec<Perm>>,
    },
    /// Uniform coset representative times a uniform subgroup element.
    CosetUnion {
        transversal: Arc<Vec<Portrait>>,
        subgroup: Arc<Sampler>,
    },
    /// Independent uniform label at every internal vertex.
    IndependentLabels {
        degree: Degree,
        depth: usize,
        choices: Arc<Vec<Perm>>,
    },
}

impl Sampler {
    pub fn enumerated(elements: Vec<Portrait>) -> Sampler {
        Sampler::Enumerated {
            elements: Arc::new(elements),
        }
    }

    /// Tower sampler for the group generated by per-level diagonal powers of
    /// `sigma` (see `constructions::gs`).
    pub fn diagonal_tower(degree: Degree, depth: usize, sigma: &Perm) -> Sampler {
        let d = degree.get();
        let mut powers = Vec::with_capacity(d);
        let mut acc = Perm::identity(d);
        for _ in 0..d {
            powers.push(acc.clone());
            acc = acc.then(sigma);
        }
        Sampler::DiagonalTower {
            degree,
            depth,
            sigma_powers: Arc::new(powers),
        }
    }

    pub fn coset_union(transversal: Vec<Portrait>, subgroup: Sampler) -> Sampler {
        Sampler::CosetUnion {
            transversal: Arc::new(transversal),
            subgroup: Arc::new(subgroup),
        }
    }

    pub fn independent_labels(degree: Degree, depth: usize, choices: Vec<Perm>) -> Sampler {
        Sampler::IndependentLabels {
            degree,
            depth,
            choices: Arc::new(choices),
        }
    }

    /// Draws one exactly uniform element.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Portrait> {
        match self {
            Sampler::Enumerated { elements } => {
                Ok(elements[rng.gen_range(0..elements.len())].clone())
            }
            Sampler::DiagonalTower {
                degree,
                depth,
                sigma_powers,
            } => {
                let d = degree.get();
                let n = *depth;
                // Factor at level 0: a root power of sigma.
                let root_power = rng.gen_range(0..d);
                let mut acc = Portrait::from_label_fn(*degree, n, |v| {
                    if v.is_root() {
                        sigma_powers[root_power].clone()
                    } else {
                        Perm::identity(d)
                    }
                });
                // Factor at level k (1 <= k < n): labels live at level k,
                // constant on the children of each level-(k-1) vertex.
                for k in 1..n {
                    let block_count = degree.level_size(k - 1) as usize;
                    let exps: Vec<usize> =
                        (0..block_count).map(|_| rng.gen_range(0..d)).collect();
                    let factor = Portrait::from_label_fn(*degree, n, |v| {
                        if v.level() == k {
                            let parent =
                                v.letters()[..k - 1].iter().fold(0usize, |a, &x| {
                                    a * d + x as usize
                                });
                            sigma_powers[exps[parent]].clone()
                        } else {
                            Perm::identity(d)
                        }
                    });
                    acc = acc.compose(&factor)?;
                }
                Ok(acc)
            }
            Sampler::CosetUnion {
                transversal,
                subgroup,
            } => {
                let t = &transversal[rng.gen_range(0..transversal.len())];
                let h = subgroup.sample(rng)?;
                h.compose(t)
            }
            Sampler::IndependentLabels {
                degree,
                depth,
                choices,
            } => {
                let internal = degree.internal_count(*depth);
                let picks: Vec<usize> =
                    (0..internal).map(|_| rng.gen_range(0..choices.len())).collect();
                let mut next = 0usize;
                Ok(Portrait::from_label_fn(*degree, *depth, |_v| {
                    let p = choices[picks[next]].clone();
                    next += 1;
                    p
                }))
            }
        }
    }

    /// Number of distinct elements the sampler ranges over, when cheap to
    /// state (used by validation).
    pub fn support_size_hint(&self) -> Option<u64> {
        match self {
            Sampler::Enumerated { elements } => Some(elements.len() as u64),
            Sampler::DiagonalTower { degree, depth, .. } => {
                let d = degree.get() as u64;
                let mut total = 1u64;
                for k in 0..*depth {
                    let block_count = if k == 0 { 1 } else { degree.level_size(k - 1) };
                    total = total.checked_mul(d.checked_pow(block_count as u32)?)?;
                }
                Some(total)
            }
            Sampler::CosetUnion {
                transversal,
                subgroup,
            } => subgroup
                .support_size_hint()
                .and_then(|s| s.checked_mul(transversal.len() as u64)),
            Sampler::IndependentLabels {
                degree,
                depth,
                choices,
            } => (choices.len() as u64).checked_pow(degree.internal_count(*depth) as u32),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use crate::engine::FiniteTreeGroup;
    use crate::tree::Vertex;

    #[test]
    fn enumerated_sampler_covers_all_elements_within_4_sigma() {
        // Aut T^2 for d=2: 8 elements; 1e5 draws.
        let degree = Degree::new(2).unwrap();
        let mut gens = Vec::new();
        for level in 0..2 {
            for idx in 0..degree.level_size(level) {
                let v = Vertex::from_level_index(degree, level, idx);
                gens.push(
                    Portrait::single_label(degree, 2, &v, &Perm::transposition(2, 0, 1)).unwrap(),
                );
            }
        }
        let group = FiniteTreeGroup::enumerate_closure(&gens, 100).unwrap();
        let sampler = Sampler::enumerated(group.elements().to_vec());
        let mut rng = ChaCha12Rng::seed_from_u64(0x5EED);
        let trials = 100_000usize;
        let mut counts = vec![0u64; group.len()];
        for _ in 0..trials {
            let g = sampler.sample(&mut rng).unwrap();
            counts[group.position_of(&g).unwrap()] += 1;
        }
        let p = 1.0 / group.len() as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for &c in &counts {
            let freq = c as f64 / trials as f64;
            assert!(
                (freq - p).abs() < 4.0 * sigma,
                "frequency {freq} too far from {p}"
            );
        }
    }

    #[test]
    fn trivial_sampler_always_returns_identity() {
        let degree = Degree::new(2).unwrap();
        let e = Portrait::identity(degree, 2);
        let sampler = Sampler::enumerated(vec![e.clone()]);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sampler.sample(&mut rng).unwrap(), e);
        }
    }

    #[test]
    fn independent_labels_support_size() {
        let degree = Degree::new(3).unwrap();
        let choices = vec![
            Perm::identity(3),
            Perm::standard_cycle(3),
            Perm::standard_cycle(3).pow(2),
        ];
        let s = Sampler::independent_labels(degree, 2, choices);
        assert_eq!(s.support_size_hint(), Some(81));
    }
}
