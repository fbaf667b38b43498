//! Design ideals and what they tell about a design: identifiable effect
//! sets and confounding relations.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::design::{sign_of, Design};
use crate::error::Result;
use crate::field::{Field, Rational};
use crate::groebner::{
    ideal_membership, point_ideal_intersection, reduce_basis, standard_monomials, BuchbergerOptions,
    GroebnerBasis, Membership,
};
use crate::monomial::{default_names, Monomial};
use crate::order::TermOrder;
use crate::poly::Polynomial;

/// Reduced Gröbner basis of `I(F)` under `order`.
pub fn design_ideal<C: Field>(d: &Design, order: &TermOrder) -> Result<GroebnerBasis<C>> {
    design_ideal_with(d, order, &BuchbergerOptions::default())
}

pub fn design_ideal_with<C: Field>(
    d: &Design,
    order: &TermOrder,
    opts: &BuchbergerOptions,
) -> Result<GroebnerBasis<C>> {
    let points = d.points::<C>()?;
    let (_, gb) = point_ideal_intersection(&points, order, opts)?;
    Ok(reduce_basis(&gb))
}

/// Standard monomials of the design ideal: an identifiable effect set of size `n`.
pub fn est_monomials<C: Field>(d: &Design, order: &TermOrder) -> Result<Vec<Monomial>> {
    let gb = design_ideal::<C>(d, order)?;
    standard_monomials(&gb, &default_names("x", d.m()))
}

/// Read-mostly cache of design ideals keyed by `(design, order)`.
pub struct IdealCache<C: Field> {
    entries: RwLock<HashMap<(Design, TermOrder), Arc<GroebnerBasis<C>>>>,
}

impl<C: Field> Default for IdealCache<C> {
    fn default() -> Self {
        IdealCache {
            entries: RwLock::new(HashMap::new()),
        }
    }
}

impl<C: Field> IdealCache<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: &Design, order: &TermOrder) -> Result<Arc<GroebnerBasis<C>>> {
        let key = (d.clone(), order.clone());
        if let Some(gb) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(gb));
        }
        let gb = Arc::new(design_ideal::<C>(d, order)?);
        let mut w = self.entries.write().expect("cache lock");
        Ok(Arc::clone(w.entry(key).or_insert(gb)))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Whether `x^a1 x^a2` is constant on the design, and which constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Confounding {
    Plus,
    Minus,
    NotConfounded,
}

impl Confounding {
    pub fn sign(self) -> Option<i32> {
        match self {
            Confounding::Plus => Some(1),
            Confounding::Minus => Some(-1),
            Confounding::NotConfounded => None,
        }
    }
}

/// Confounding queries against one two-level design, answered by ideal
/// membership in its design ideal.
pub struct ConfoundingAnalysis {
    design: Design,
    basis: Arc<GroebnerBasis<Rational>>,
    codes: Vec<u64>,
}

impl ConfoundingAnalysis {
    pub fn new(d: &Design) -> Result<Self> {
        Self::with_cache(d, &IdealCache::new())
    }

    pub fn with_cache(d: &Design, cache: &IdealCache<Rational>) -> Result<Self> {
        let codes = d.run_codes()?;
        let basis = cache.get(d, &TermOrder::grevlex(d.m()))?;
        Ok(ConfoundingAnalysis {
            design: d.clone(),
            basis,
            codes,
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn basis(&self) -> &GroebnerBasis<Rational> {
        &self.basis
    }

    /// Membership of `x^a1 - c x^a2` in the design ideal, with cofactors.
    pub fn membership(&self, a1: &Monomial, a2: &Monomial, c: i32) -> Result<Membership<Rational>> {
        let m = self.design.m();
        a1.check_same(&Monomial::one(m))?;
        a2.check_same(&Monomial::one(m))?;
        let f = &Polynomial::term(a1.clone(), Rational::one())
            - &Polynomial::term(a2.clone(), Rational::from(c));
        ideal_membership(&f, &self.basis)
    }

    pub fn is_confounded(&self, a1: &Monomial, a2: &Monomial) -> Result<Confounding> {
        let by_ideal = if self.membership(a1, a2, 1)?.member {
            Confounding::Plus
        } else if self.membership(a1, a2, -1)?.member {
            Confounding::Minus
        } else {
            Confounding::NotConfounded
        };
        let by_eval = self.is_confounded_by_evaluation(a1, a2);
        assert_eq!(
            by_ideal, by_eval,
            "ideal membership and evaluation disagree on {a1:?} vs {a2:?}"
        );
        Ok(by_ideal)
    }

    /// Direct check of `x^a1 x^a2 = c` on every run.
    pub fn is_confounded_by_evaluation(&self, a1: &Monomial, a2: &Monomial) -> Confounding {
        let word = a1.square_free_part().support_mask() ^ a2.square_free_part().support_mask();
        let mut signs = self.codes.iter().map(|&x| sign_of(word, x));
        let first = signs.next().expect("designs are nonempty");
        if signs.all(|s| s == first) {
            if first == 1 {
                Confounding::Plus
            } else {
                Confounding::Minus
            }
        } else {
            Confounding::NotConfounded
        }
    }

    /// Complete-confounding classes of square-free monomials of degree at
    /// most `max_degree`.
    pub fn alias_table(&self, max_degree: u32) -> Result<AliasTable> {
        let m = self.design.m();
        let names = default_names("x", m);
        let monos = square_free_monomials(m, max_degree);
        let mut class_of: Vec<Option<usize>> = vec![None; monos.len()];
        let mut classes: Vec<AliasClass> = Vec::new();
        for i in 0..monos.len() {
            if class_of[i].is_some() {
                continue;
            }
            let idx = classes.len();
            class_of[i] = Some(idx);
            let mut members = vec![AliasMember {
                effect: monos[i].format_with(&names),
                sign: 1,
            }];
            for j in (i + 1)..monos.len() {
                if class_of[j].is_some() {
                    continue;
                }
                if let Some(sign) = self.is_confounded(&monos[i], &monos[j])?.sign() {
                    class_of[j] = Some(idx);
                    members.push(AliasMember {
                        effect: monos[j].format_with(&names),
                        sign,
                    });
                }
            }
            classes.push(AliasClass { members });
        }
        Ok(AliasTable {
            max_degree,
            classes,
        })
    }
}

pub fn is_confounded(a1: &Monomial, a2: &Monomial, d: &Design) -> Result<Confounding> {
    ConfoundingAnalysis::new(d)?.is_confounded(a1, a2)
}

pub fn alias_table(d: &Design, max_degree: u32) -> Result<AliasTable> {
    ConfoundingAnalysis::new(d)?.alias_table(max_degree)
}

/// Square-free monomials by increasing degree, then lexicographically (`x1` first).
pub fn square_free_monomials(m: usize, max_degree: u32) -> Vec<Monomial> {
    let mut masks: Vec<u64> = (0..1u64 << m).filter(|a| a.count_ones() <= max_degree).collect();
    masks.sort_by_key(|a| (a.count_ones(), std::cmp::Reverse(a.reverse_bits())));
    masks.into_iter().map(|a| Monomial::from_mask(m, a)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AliasMember {
    pub effect: String,
    /// `representative = sign * effect` on every run.
    pub sign: i32,
}

/// One class of mutually confounded effects; the first member is the representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AliasClass {
    pub members: Vec<AliasMember>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AliasTable {
    pub max_degree: u32,
    pub classes: Vec<AliasClass>,
}

impl AliasTable {
    pub fn class_of(&self, effect: &str) -> Option<&AliasClass> {
        self.classes
            .iter()
            .find(|c| c.members.iter().any(|m| m.effect == effect))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn x(m: usize, vars: &[usize]) -> Monomial {
        Monomial::from_mask(m, vars.iter().fold(0, |a, v| a | (1 << (v - 1))))
    }

    #[test]
    fn single_run_ideal() {
        let d = Design::from_signs(&[vec![1, 1, 1]]).unwrap();
        let gb = design_ideal::<Rational>(&d, &TermOrder::lex(3)).unwrap();
        assert_eq!(gb.to_lines(&default_names("x", 3)), vec!["x3 - 1", "x2 - 1", "x1 - 1"]);
        assert_eq!(est_monomials::<Rational>(&d, &TermOrder::lex(3)).unwrap(), vec![Monomial::one(3)]);
    }

    #[test]
    fn full_factorial_ideal_is_squares() {
        let gb = design_ideal::<Rational>(&Design::full_factorial(2), &TermOrder::grevlex(2)).unwrap();
        assert_eq!(gb.to_lines(&default_names("x", 2)), vec!["x2^2 - 1", "x1^2 - 1"]);
    }

    #[test]
    fn confounding_on_small_designs() {
        let full = Design::full_factorial(2);
        assert_eq!(is_confounded(&x(2, &[1]), &x(2, &[2]), &full).unwrap(), Confounding::NotConfounded);
        let f1 = fixtures::f1();
        let a = x(3, &[1, 2]);
        assert_eq!(is_confounded(&a, &a, &f1).unwrap(), Confounding::Plus);
        assert_eq!(is_confounded(&x(3, &[3]), &a, &f1).unwrap(), Confounding::Plus);
    }

    #[test]
    fn full_factorial_aliases_are_singletons() {
        let t = alias_table(&Design::full_factorial(3), 3).unwrap();
        assert_eq!(t.classes.len(), 8);
        assert!(t.classes.iter().all(|c| c.members.len() == 1));
    }

    #[test]
    fn cache_reuses_entries() {
        let cache = IdealCache::<Rational>::new();
        let d = fixtures::f2();
        let a = cache.get(&d, &TermOrder::grevlex(3)).unwrap();
        let b = cache.get(&d, &TermOrder::grevlex(3)).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn monomial_enumeration_order() {
        let ms = square_free_monomials(3, 2);
        let names = default_names("x", 3);
        let text: Vec<String> = ms.iter().map(|m| m.format_with(&names)).collect();
        assert_eq!(text, ["1", "x1", "x2", "x3", "x1*x2", "x1*x3", "x2*x3"]);
    }
}
