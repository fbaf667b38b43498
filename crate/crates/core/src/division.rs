//! Multivariate division with remainder.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::monomial::Monomial;
use crate::order::TermOrder;
use crate::poly::Polynomial;

/// Result of dividing `f` by a list of divisors:
/// `f = sum(cofactors[i] * divisors[i]) + remainder`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Division<C: Field> {
    pub remainder: Polynomial<C>,
    pub cofactors: Vec<Polynomial<C>>,
}

/// Terms sorted ascending under a fixed order; the leading term is last.
#[derive(Clone, Debug)]
pub(crate) struct SortedPoly<C: Field> {
    pub terms: Vec<(Monomial, C)>,
}

impl<C: Field> SortedPoly<C> {
    pub fn from_poly(p: &Polynomial<C>, order: &TermOrder) -> Self {
        let mut terms = p.sorted_terms(order);
        terms.reverse();
        SortedPoly { terms }
    }

    pub fn to_poly(&self, nvars: usize) -> Polynomial<C> {
        Polynomial::from_terms(nvars, self.terms.iter().cloned()).expect("consistent universe")
    }

    pub fn leading(&self) -> Option<&(Monomial, C)> {
        self.terms.last()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self - c * shift * g`.
    pub fn sub_scaled(&self, c: &C, shift: &Monomial, g: &SortedPoly<C>, order: &TermOrder) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = g
            .terms
            .iter()
            .map(|(m, v)| (m.mul(shift), v.times(c)))
            .peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some(x), Some(y)) => order.cmp(&x.0, &y.0),
            };
            match ord {
                Ordering::Less => out.push(a.next().unwrap().clone()),
                Ordering::Greater => {
                    let (m, v) = b.next().unwrap();
                    out.push((m, v.negated()));
                }
                Ordering::Equal => {
                    let (m, v) = a.next().unwrap();
                    let (_, w) = b.next().unwrap();
                    let d = v.minus(&w);
                    if !d.is_zero() {
                        out.push((m.clone(), d));
                    }
                }
            }
        }
        SortedPoly { terms: out }
    }

    pub fn scale(&mut self, c: &C) {
        for t in self.terms.iter_mut() {
            t.1 = t.1.times(c);
        }
    }
}

/// A nonzero divisor prepared for repeated use.
#[derive(Clone, Debug)]
pub(crate) struct Divisor<C: Field> {
    pub lm: Monomial,
    pub lc_inv: C,
    pub poly: SortedPoly<C>,
}

impl<C: Field> Divisor<C> {
    pub fn new(p: SortedPoly<C>) -> Option<Self> {
        let (lm, lc) = p.leading()?.clone();
        Some(Divisor {
            lm,
            lc_inv: lc.inverse()?,
            poly: p,
        })
    }
}

/// Full reduction of `p` by `divisors`: afterwards no remainder term is
/// divisible by a divisor's leading monomial. The first divisor in list
/// order wins when several apply.
pub(crate) fn reduce<C: Field>(
    mut p: SortedPoly<C>,
    divisors: &[Divisor<C>],
    order: &TermOrder,
    mut cofactors: Option<&mut Vec<Polynomial<C>>>,
    max_terms: usize,
) -> Result<SortedPoly<C>> {
    let mut rem: Vec<(Monomial, C)> = Vec::new();
    while let Some((lm, lc)) = p.terms.last().cloned() {
        match divisors.iter().position(|d| d.lm.divides(&lm)) {
            Some(i) => {
                let d = &divisors[i];
                let shift = lm.checked_div(&d.lm).expect("divisibility checked");
                let c = lc.times(&d.lc_inv);
                p = p.sub_scaled(&c, &shift, &d.poly, order);
                if p.terms.len() > max_terms {
                    return Err(Error::Budget(format!(
                        "intermediate polynomial exceeds {max_terms} terms"
                    )));
                }
                if let Some(cf) = cofactors.as_deref_mut() {
                    cf[i].add_term(shift, &c);
                }
            }
            None => {
                p.terms.pop();
                rem.push((lm, lc));
            }
        }
    }
    rem.reverse();
    Ok(SortedPoly { terms: rem })
}

/// Divides `f` by `divisors` (all nonzero), returning remainder and
/// cofactors. Ties between applicable divisors go to the earliest in the list.
pub fn normal_form<C: Field>(
    f: &Polynomial<C>,
    divisors: &[Polynomial<C>],
    order: &TermOrder,
) -> Result<Division<C>> {
    let n = f.nvars();
    if order.nvars() != n {
        return Err(Error::Dimension {
            expected: order.nvars(),
            found: n,
        });
    }
    let mut prepared = Vec::with_capacity(divisors.len());
    for g in divisors {
        if g.nvars() != n {
            return Err(Error::Dimension {
                expected: n,
                found: g.nvars(),
            });
        }
        let d = Divisor::new(SortedPoly::from_poly(g, order))
            .ok_or_else(|| Error::Input("division by the zero polynomial".into()))?;
        prepared.push(d);
    }
    let mut cofactors = vec![Polynomial::zero(n); divisors.len()];
    let rem = reduce(
        SortedPoly::from_poly(f, order),
        &prepared,
        order,
        Some(&mut cofactors),
        usize::MAX,
    )?;
    Ok(Division {
        remainder: rem.to_poly(n),
        cofactors,
    })
}
