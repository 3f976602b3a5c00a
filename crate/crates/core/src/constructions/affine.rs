//! Affine maps on Z/dZ and the affine monodromy model on the d-adic tree.
//!
//! The model identifies tree letters with Z/dZ via the identity map and
//! takes the depth-1 pattern group of all affine maps (`z ↦ az + b` with `a`
//! a unit) or of the translations only. Labels at distinct internal vertices
//! are then independent, so orders, generators and exactly uniform samplers
//! all come for free.

use num_bigint::BigUint;
use num_integer::Integer;

use crate::constructions::pattern::{pattern_group, PatternSet};
use crate::engine::{FiniteTreeGroup, Sampler};
use crate::error::{Error, Result};
use crate::tree::{Degree, Perm, Portrait, Vertex};

/// An affine map `z ↦ az + b` on Z/dZ with `a` a unit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineMap {
    modulus: u64,
    mult: u64,
    shift: u64,
}

impl AffineMap {
    pub fn new(modulus: u64, mult: u64, shift: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidDegree(modulus as usize));
        }
        if mult.gcd(&modulus) != 1 {
            return Err(Error::InvalidPerm(format!(
                "multiplier {mult} is not a unit mod {modulus}"
            )));
        }
        Ok(AffineMap {
            modulus,
            mult: mult % modulus,
            shift: shift % modulus,
        })
    }

    pub fn identity(modulus: u64) -> Self {
        AffineMap {
            modulus,
            mult: 1,
            shift: 0,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn mult(&self) -> u64 {
        self.mult
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    #[inline]
    pub fn apply(&self, z: u64) -> u64 {
        (self.mult * (z % self.modulus) + self.shift) % self.modulus
    }

    /// `self` applied first, then `other`.
    pub fn then(&self, other: &AffineMap) -> AffineMap {
        debug_assert_eq!(self.modulus, other.modulus);
        AffineMap {
            modulus: self.modulus,
            mult: (other.mult * self.mult) % self.modulus,
            shift: (other.mult * self.shift + other.shift) % self.modulus,
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let a_inv = mod_inverse(self.mult, self.modulus);
        AffineMap {
            modulus: self.modulus,
            mult: a_inv,
            shift: (self.modulus - (a_inv * self.shift) % self.modulus) % self.modulus,
        }
    }

    pub fn is_translation(&self) -> bool {
        self.mult == 1
    }

    pub fn is_identity(&self) -> bool {
        self.mult == 1 && self.shift == 0
    }

    /// Solutions of `az + b = z` in Z/dZ.
    pub fn fixed_points(&self) -> Vec<u64> {
        (0..self.modulus).filter(|&z| self.apply(z) == z).collect()
    }

    pub fn has_fixed_point(&self) -> bool {
        (0..self.modulus).any(|z| self.apply(z) == z)
    }

    /// The map as a permutation of `{0, …, d-1}` (needs `d ≤ 255`).
    pub fn to_perm(&self) -> Result<Perm> {
        if self.modulus > 255 {
            return Err(Error::InvalidDegree(self.modulus as usize));
        }
        Perm::from_images((0..self.modulus).map(|z| self.apply(z) as u8).collect())
    }
}

impl std::fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AffineMap(z -> {}z + {} mod {})", self.mult, self.shift, self.modulus)
    }
}

impl std::fmt::Display for AffineMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}z+{}", self.mult, self.shift)
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // Extended Euclid; `a` is a unit by construction.
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    (old_s.rem_euclid(m as i128)) as u64
}

/// The full affine group on Z/dZ: all `φ(d)·d` maps, multipliers ascending
/// over the units, shifts ascending within a multiplier.
pub struct AffineGroup {
    pub modulus: u64,
    pub maps: Vec<AffineMap>,
}

pub fn affine_group(d: u64) -> Result<AffineGroup> {
    if d < 2 {
        return Err(Error::InvalidDegree(d as usize));
    }
    let mut maps = Vec::new();
    for a in 1..d {
        if a.gcd(&d) != 1 {
            continue;
        }
        for b in 0..d {
            maps.push(AffineMap::new(d, a, b)?);
        }
    }
    // a = 1 comes first already since 1 is always a unit; keep order as
    // generated (ascending a, then b).
    Ok(AffineGroup { modulus: d, maps })
}

impl AffineGroup {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn translations(&self) -> Vec<AffineMap> {
        self.maps
            .iter()
            .copied()
            .filter(AffineMap::is_translation)
            .collect()
    }

    /// Units `a` whose translation coset `{z ↦ az + b}` consists entirely of
    /// maps with a fixed point, found by brute force over all shifts and
    /// points.
    pub fn bad_units(&self) -> Vec<u64> {
        let d = self.modulus;
        (1..d)
            .filter(|a| a.gcd(&d) == 1)
            .filter(|&a| (0..d).all(|b| AffineMap { modulus: d, mult: a, shift: b }.has_fixed_point()))
            .collect()
    }
}

/// Which part of the affine model to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AffinePart {
    /// All affine maps `z ↦ az + b` with `a` a unit.
    Full,
    /// The translation subgroup `z ↦ z + b`.
    Translations,
}

/// The depth-1 pattern of the affine model.
pub fn affine_pattern(d: u64, part: AffinePart) -> Result<PatternSet> {
    let degree = Degree::new(d as usize)?;
    let group = affine_group(d)?;
    let maps: Vec<AffineMap> = match part {
        AffinePart::Full => group.maps,
        AffinePart::Translations => group.translations(),
    };
    let mut allowed = Vec::with_capacity(maps.len());
    for m in maps {
        allowed.push(Portrait::from_labels(degree, 1, &[m.to_perm()?])?);
    }
    PatternSet::new(allowed)
}

/// Order of the depth-`n` affine model: independent labels at every internal
/// vertex give `|pattern|^internal`.
pub fn affine_model_order(d: u64, depth: usize, part: AffinePart) -> Result<BigUint> {
    let degree = Degree::new(d as usize)?;
    let count = match part {
        AffinePart::Full => euler_phi(d) * d,
        AffinePart::Translations => d,
    };
    Ok(BigUint::from(count).pow(degree.internal_count(depth) as u32))
}

/// Materializes the depth-`n` affine model with its per-vertex generators.
pub fn affine_model(d: u64, depth: usize, part: AffinePart, cap: usize) -> Result<FiniteTreeGroup> {
    let pattern = affine_pattern(d, part)?;
    let group = pattern_group(&pattern, depth, cap)?;
    let generators = affine_model_generators(d, depth, part)?;
    Ok(FiniteTreeGroup::from_elements(
        group.degree(),
        depth,
        generators,
        group.elements().to_vec(),
    ))
}

/// One generator per internal vertex and affine generator of the pattern:
/// the translation `z+1` plus, for the full part, every homothety `az`.
pub fn affine_model_generators(d: u64, depth: usize, part: AffinePart) -> Result<Vec<Portrait>> {
    let degree = Degree::new(d as usize)?;
    let mut label_gens = vec![AffineMap::new(d, 1, 1)?];
    if part == AffinePart::Full {
        for a in 2..d {
            if a.gcd(&d) == 1 {
                label_gens.push(AffineMap::new(d, a, 0)?);
            }
        }
    }
    let mut out = Vec::new();
    for level in 0..depth {
        for idx in 0..degree.level_size(level) {
            let v = Vertex::from_level_index(degree, level, idx);
            for m in &label_gens {
                out.push(Portrait::single_label(degree, depth, &v, &m.to_perm()?)?);
            }
        }
    }
    Ok(out)
}

/// Exactly uniform sampler for the affine model at any depth: independent
/// uniform labels.
pub fn affine_model_sampler(d: u64, depth: usize, part: AffinePart) -> Result<Sampler> {
    let degree = Degree::new(d as usize)?;
    let group = affine_group(d)?;
    let maps = match part {
        AffinePart::Full => group.maps,
        AffinePart::Translations => group.translations(),
    };
    let choices: Vec<Perm> = maps.iter().map(AffineMap::to_perm).collect::<Result<_>>()?;
    Ok(Sampler::independent_labels(degree, depth, choices))
}

pub fn euler_phi(d: u64) -> u64 {
    let mut phi = d;
    let mut n = d;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}
