//! Builders for the group families under study: pattern groups of finite
//! type, diagonal towers and their last-letter extensions, intermediate
//! groups, and the affine monodromy model.
//!
//! [`GroupSpec`] is the symbolic configuration language over these families,
//! shared with the command line. [`GroupSpec::build`] resolves a spec at a
//! requested depth into an enumerated quotient (when it fits under the cap)
//! together with an exactly uniform sampler (whenever one exists without
//! enumeration, it is preferred).

pub mod affine;
pub mod gh;
pub mod pattern;
pub mod tower;

pub use affine::{
    affine_group, affine_model, affine_model_generators, affine_model_order,
    affine_model_sampler, affine_pattern, euler_phi, AffineGroup, AffineMap, AffinePart,
};
pub use gh::intermediate_group;
pub use pattern::{finite_type_check, pattern_group, pattern_order, FiniteTypeVerdict, PatternSet};
pub use tower::{
    extended_tower, extension_order, extension_order_exponent, exponent_tuples,
    last_letter_generator, last_letter_portrait, TowerExtension, TowerSpec,
};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::engine::{FiniteTreeGroup, Sampler};
use crate::error::{Error, Result};
use crate::tree::{Degree, Perm, Portrait};

/// Symbolic description of a group family, as read from config documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GroupSpec {
    /// Closure of explicit generator portraits (text grammar, identity-padded
    /// to the requested depth).
    Generators { degree: usize, portraits: Vec<String> },
    /// Group of finite type over an explicit pattern subgroup.
    Pattern { degree: usize, allowed: Vec<String> },
    /// Diagonal tower over a full d-cycle (standard cycle by default).
    Tower {
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<String>,
    },
    /// Tower extended by all last-letter automorphisms.
    ExtendedTower {
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<String>,
    },
    /// Intermediate group of an outer/inner pair.
    Intermediate {
        outer: Box<GroupSpec>,
        inner: Box<GroupSpec>,
    },
    /// Affine monodromy model: depth-1 pattern of affine maps on Z/dZ.
    AffineModel { degree: usize, part: AffinePart },
}

/// A spec resolved at a depth: the enumerated quotient when it fits under
/// the cap, and an exactly uniform sampler when one exists.
pub struct BuiltGroup {
    pub spec: GroupSpec,
    pub degree: Degree,
    pub depth: usize,
    pub group: Option<FiniteTreeGroup>,
    pub sampler: Option<Sampler>,
    /// Why enumeration was skipped, when it was.
    pub enumeration_skipped: Option<String>,
}

impl GroupSpec {
    pub fn degree(&self) -> Result<Degree> {
        match self {
            GroupSpec::Generators { degree, .. }
            | GroupSpec::Pattern { degree, .. }
            | GroupSpec::Tower { degree, .. }
            | GroupSpec::ExtendedTower { degree, .. }
            | GroupSpec::AffineModel { degree, .. } => Degree::new(*degree),
            GroupSpec::Intermediate { outer, inner } => {
                let d = outer.degree()?;
                if inner.degree()? != d {
                    return Err(Error::Shape(
                        "intermediate spec degrees disagree".to_string(),
                    ));
                }
                Ok(d)
            }
        }
    }

    /// Short family tag used in reports.
    pub fn family_name(&self) -> &'static str {
        match self {
            GroupSpec::Generators { .. } => "generators",
            GroupSpec::Pattern { .. } => "pattern",
            GroupSpec::Tower { .. } => "tower",
            GroupSpec::ExtendedTower { .. } => "extended-tower",
            GroupSpec::Intermediate { .. } => "intermediate",
            GroupSpec::AffineModel { .. } => "affine-model",
        }
    }

    /// The tower parameters of a tower-family spec.
    pub fn tower_spec(&self) -> Result<TowerSpec> {
        match self {
            GroupSpec::Tower { degree, sigma } | GroupSpec::ExtendedTower { degree, sigma } => {
                let d = Degree::new(*degree)?;
                match sigma {
                    None => Ok(TowerSpec::standard(d)),
                    Some(text) => {
                        let portrait = Portrait::parse(text, d)?;
                        if portrait.depth() != 1 {
                            return Err(Error::Shape(
                                "tower generator must be a single permutation".to_string(),
                            ));
                        }
                        TowerSpec::new(d, portrait.label(&crate::tree::Vertex::root())?)
                    }
                }
            }
            _ => Err(Error::Unsupported("not a tower-family spec".to_string())),
        }
    }

    /// Closed-form order of the depth-`n` quotient, when the family has one.
    pub fn order_formula(&self, n: usize) -> Result<Option<OrderFormula>> {
        match self {
            GroupSpec::Tower { .. } => {
                let spec = self.tower_spec()?;
                Ok(Some(OrderFormula::Power {
                    base: spec.degree().get() as u64,
                    exponent: spec.order_exponent(n),
                }))
            }
            GroupSpec::ExtendedTower { .. } => {
                let spec = self.tower_spec()?;
                Ok(
                    extension_order_exponent(&spec, n).map(|exponent| OrderFormula::Power {
                        base: spec.degree().get() as u64,
                        exponent,
                    }),
                )
            }
            GroupSpec::AffineModel { degree, part } => {
                let d = *degree as u64;
                let count = match part {
                    AffinePart::Full => euler_phi(d) * d,
                    AffinePart::Translations => d,
                };
                Ok(Some(OrderFormula::Power {
                    base: count,
                    exponent: BigUint::from(Degree::new(*degree)?.internal_count(n)),
                }))
            }
            GroupSpec::Pattern { .. } => {
                let pattern = self.pattern_set()?;
                if n < pattern.pattern_depth() {
                    return Err(Error::Range(format!(
                        "depth {n} is below the pattern depth {}",
                        pattern.pattern_depth()
                    )));
                }
                Ok(Some(OrderFormula::Value(pattern_order(&pattern, n)?)))
            }
            GroupSpec::Generators { .. } | GroupSpec::Intermediate { .. } => Ok(None),
        }
    }

    /// Materialized closed-form order when small enough to hold.
    pub fn order_at(&self, n: usize) -> Result<Option<BigUint>> {
        Ok(self.order_formula(n)?.and_then(|f| f.materialize()))
    }

    fn pattern_set(&self) -> Result<PatternSet> {
        match self {
            GroupSpec::Pattern { degree, allowed } => {
                let d = Degree::new(*degree)?;
                let portraits = allowed
                    .iter()
                    .map(|t| Portrait::parse(t, d))
                    .collect::<Result<Vec<_>>>()?;
                PatternSet::new(portraits)
            }
            GroupSpec::AffineModel { degree, part } => affine_pattern(*degree as u64, *part),
            _ => Err(Error::Unsupported("not a pattern-family spec".to_string())),
        }
    }

    /// Resolves the spec at `depth`, enumerating when the order fits under
    /// `cap`. Errors when neither an enumeration nor an exact sampler is
    /// possible.
    pub fn build(&self, depth: usize, cap: usize) -> Result<BuiltGroup> {
        let degree = self.degree()?;
        match self {
            GroupSpec::Generators { portraits, .. } => {
                let gens = portraits
                    .iter()
                    .map(|t| {
                        let g = Portrait::parse(t, degree)?;
                        if g.depth() > depth {
                            return Err(Error::Shape(format!(
                                "generator of depth {} exceeds requested depth {depth}",
                                g.depth()
                            )));
                        }
                        g.pad_to_depth(depth)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let group = FiniteTreeGroup::enumerate_closure(&gens, cap)?;
                let sampler = Sampler::enumerated(group.elements().to_vec());
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group: Some(group),
                    sampler: Some(sampler),
                    enumeration_skipped: None,
                })
            }
            GroupSpec::Pattern { .. } => {
                let pattern = self.pattern_set()?;
                let group = pattern_group(&pattern, depth, cap)?;
                let sampler = if pattern.pattern_depth() == 1 {
                    let choices: Vec<Perm> = pattern
                        .allowed()
                        .iter()
                        .map(|w| w.label(&crate::tree::Vertex::root()))
                        .collect::<Result<_>>()?;
                    Sampler::independent_labels(degree, depth, choices)
                } else {
                    Sampler::enumerated(group.elements().to_vec())
                };
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group: Some(group),
                    sampler: Some(sampler),
                    enumeration_skipped: None,
                })
            }
            GroupSpec::Tower { .. } => {
                let spec = self.tower_spec()?;
                let fits = order_fits(&spec.order_exponent(depth), degree.get() as u64, cap);
                let (group, skipped) = if fits {
                    (Some(spec.quotient(depth, cap)?), None)
                } else {
                    (None, Some(format!("closed-form order exceeds cap {cap}")))
                };
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group,
                    sampler: Some(spec.sampler(depth)),
                    enumeration_skipped: skipped,
                })
            }
            GroupSpec::ExtendedTower { .. } => {
                let spec = self.tower_spec()?;
                if depth < 2 {
                    return Err(Error::Range(
                        "extended tower needs depth >= 2".to_string(),
                    ));
                }
                let (group, skipped) = match extension_order_exponent(&spec, depth) {
                    Some(e) if order_fits(&e, degree.get() as u64, cap) => {
                        (Some(extended_tower(&spec, depth, cap)?.group), None)
                    }
                    Some(_) => (None, Some(format!("closed-form order exceeds cap {cap}"))),
                    // No closed form: attempt the enumeration under the cap.
                    None => match extended_tower(&spec, depth, cap) {
                        Ok(ext) => (Some(ext.group), None),
                        Err(Error::Capacity { cap, reached }) => (
                            None,
                            Some(format!("enumeration exceeded cap {cap} at {reached}")),
                        ),
                        Err(e) => return Err(e),
                    },
                };
                // The coset-union sampler is exactly uniform precisely where
                // the closed form is valid; fall back to the enumeration.
                let sampler = if tower::extension_closed_form_valid(&spec, depth) {
                    Some(Sampler::coset_union(
                        tower::extension_transversal(&spec, depth)?,
                        spec.sampler(depth),
                    ))
                } else {
                    group
                        .as_ref()
                        .map(|g| Sampler::enumerated(g.elements().to_vec()))
                };
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group,
                    sampler,
                    enumeration_skipped: skipped,
                })
            }
            GroupSpec::Intermediate { outer, inner } => {
                let outer_built = outer.build(depth, cap)?;
                let inner_built = inner.build(depth, cap)?;
                let (Some(outer_group), Some(inner_group)) = (outer_built.group, inner_built.group)
                else {
                    return Err(Error::Unsupported(
                        "intermediate groups need both arguments enumerated".to_string(),
                    ));
                };
                let group = intermediate_group(&outer_group, &inner_group)?;
                let sampler = Sampler::enumerated(group.elements().to_vec());
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group: Some(group),
                    sampler: Some(sampler),
                    enumeration_skipped: None,
                })
            }
            GroupSpec::AffineModel { degree: d, part } => {
                let order = affine_model_order(*d as u64, depth, *part)?;
                let sampler = affine_model_sampler(*d as u64, depth, *part)?;
                let (group, skipped) = if order.to_usize().is_some_and(|o| o <= cap) {
                    (Some(affine_model(*d as u64, depth, *part, cap)?), None)
                } else {
                    (
                        None,
                        Some(format!("closed-form order {order} exceeds cap {cap}")),
                    )
                };
                Ok(BuiltGroup {
                    spec: self.clone(),
                    degree,
                    depth,
                    group,
                    sampler: Some(sampler),
                    enumeration_skipped: skipped,
                })
            }
        }
    }
}

/// A closed-form order: either an explicit value or a pure power.
#[derive(Clone, Debug)]
pub enum OrderFormula {
    Power { base: u64, exponent: BigUint },
    Value(BigUint),
}

impl OrderFormula {
    /// Materializes orders of reasonable size (under roughly 2^20 bits).
    pub fn materialize(&self) -> Option<BigUint> {
        match self {
            OrderFormula::Value(v) => Some(v.clone()),
            OrderFormula::Power { base, exponent } => {
                let e = exponent.to_u32()?;
                let bits = (64 - base.leading_zeros()) as u64 * e as u64;
                if bits > 1 << 20 {
                    return None;
                }
                Some(BigUint::from(*base).pow(e))
            }
        }
    }

    /// Natural logarithm; the exact integer ingredients are evaluated in
    /// floating point only here.
    pub fn ln(&self) -> f64 {
        match self {
            OrderFormula::Power { base, exponent } => {
                exponent.to_f64().unwrap_or(f64::INFINITY) * (*base as f64).ln()
            }
            OrderFormula::Value(v) => ln_biguint(v),
        }
    }
}

fn order_fits(exponent: &BigUint, base: u64, cap: usize) -> bool {
    match exponent.to_u32() {
        None => false,
        Some(e) => {
            let bits = (64 - base.leading_zeros()) as u64 * e as u64;
            bits <= 64 && (base as u128).pow(e) <= cap as u128
        }
    }
}

/// ln of a big integer via its top bits, stable for any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return (x.to_u64().unwrap_or(1).max(1) as f64).ln();
    }
    let shift = bits - 53;
    let top = ((x >> shift).to_u64().unwrap()) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
