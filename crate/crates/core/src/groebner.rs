//! Buchberger's algorithm and the ideal operations built on it:
//! membership, elimination, intersection of point ideals and standard
//! monomials.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::division::{normal_form, reduce, Divisor, SortedPoly};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::monomial::{default_names, Monomial};
use crate::order::{OrderKind, TermOrder};
use crate::poly::Polynomial;

/// Resource caps for [`buchberger`].
#[derive(Clone, Debug)]
pub struct BuchbergerOptions {
    /// Maximum number of critical pairs examined.
    pub max_pairs: usize,
    /// Maximum number of terms in any intermediate polynomial.
    pub max_terms: usize,
    /// Skip pairs using Buchberger's chain criterion.
    pub chain_criterion: bool,
}

impl Default for BuchbergerOptions {
    fn default() -> Self {
        BuchbergerOptions {
            max_pairs: 1_000_000,
            max_terms: 100_000,
            chain_criterion: false,
        }
    }
}

/// Generators of an ideal together with the names of its indeterminates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealPresentation<C: Field> {
    pub generators: Vec<Polynomial<C>>,
    pub names: Vec<String>,
}

impl<C: Field> IdealPresentation<C> {
    pub fn new(generators: Vec<Polynomial<C>>, names: Vec<String>) -> Result<Self> {
        let n = names.len();
        let generators: Vec<_> = generators.into_iter().filter(|g| !g.is_zero()).collect();
        for g in &generators {
            if g.nvars() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: g.nvars(),
                });
            }
        }
        Ok(IdealPresentation { generators, names })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis<C: Field> {
    pub order: TermOrder,
    pub elements: Vec<Polynomial<C>>,
    pub reduced: bool,
}

impl<C: Field> GroebnerBasis<C> {
    pub fn nvars(&self) -> usize {
        self.order.nvars()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.elements
            .iter()
            .map(|g| g.leading_monomial(&self.order).expect("basis elements are nonzero"))
            .collect()
    }

    /// Remainder of `f` modulo the basis.
    pub fn reduce(&self, f: &Polynomial<C>) -> Result<Polynomial<C>> {
        Ok(normal_form(f, &self.elements, &self.order)?.remainder)
    }

    /// Every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> Result<bool> {
        for i in 0..self.elements.len() {
            for j in (i + 1)..self.elements.len() {
                let s = s_polynomial(&self.elements[i], &self.elements[j], &self.order)?;
                if !self.reduce(&s)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// One polynomial per line in descending term order.
    pub fn to_lines(&self, names: &[String]) -> Vec<String> {
        self.elements.iter().map(|g| g.to_text(names, &self.order)).collect()
    }
}

/// `lcm/LT(f) * f - lcm/LT(g) * g`.
pub fn s_polynomial<C: Field>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    order: &TermOrder,
) -> Result<Polynomial<C>> {
    let (mf, cf) = f.leading_term(order)?;
    let (mg, cg) = g.leading_term(order)?;
    mf.check_same(&mg)?;
    let l = mf.lcm(&mg);
    let a = f.mul_term(&l.checked_div(&mf).unwrap(), &cf.inverse().unwrap());
    let b = g.mul_term(&l.checked_div(&mg).unwrap(), &cg.inverse().unwrap());
    a.try_sub(&b)
}

fn make_monic<C: Field>(mut p: SortedPoly<C>) -> SortedPoly<C> {
    if let Some((_, lc)) = p.leading() {
        if !lc.is_one() {
            let inv = lc.inverse().expect("nonzero leading coefficient");
            p.scale(&inv);
        }
    }
    p
}

/// Gröbner basis of the ideal generated by `gens`, returned in reduced form.
pub fn buchberger<C: Field>(
    gens: &IdealPresentation<C>,
    order: &TermOrder,
    opts: &BuchbergerOptions,
) -> Result<GroebnerBasis<C>> {
    let n = gens.nvars();
    if order.nvars() != n {
        return Err(Error::Dimension {
            expected: n,
            found: order.nvars(),
        });
    }
    let mut basis: Vec<Divisor<C>> = Vec::new();
    // (lcm key, sequence number) ordering gives the normal selection strategy
    let mut queue: BinaryHeap<Reverse<(Vec<i64>, usize, usize, usize)>> = BinaryHeap::new();
    let mut seq = 0usize;
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let mut insert = |basis: &mut Vec<Divisor<C>>,
                      queue: &mut BinaryHeap<Reverse<(Vec<i64>, usize, usize, usize)>>,
                      pending: &mut HashSet<(usize, usize)>,
                      p: SortedPoly<C>| {
        let d = Divisor::new(make_monic(p)).expect("nonzero polynomial");
        let j = basis.len();
        for (i, b) in basis.iter().enumerate() {
            let l = b.lm.lcm(&d.lm);
            queue.push(Reverse((order.sort_key(&l), seq, i, j)));
            pending.insert((i, j));
            seq += 1;
        }
        basis.push(d);
    };

    for g in &gens.generators {
        let p = reduce(SortedPoly::from_poly(g, order), &basis, order, None, opts.max_terms)?;
        if !p.is_zero() {
            insert(&mut basis, &mut queue, &mut pending, p);
        }
    }

    let mut examined = 0usize;
    while let Some(Reverse((_, _, i, j))) = queue.pop() {
        pending.remove(&(i, j));
        examined += 1;
        if examined > opts.max_pairs {
            return Err(Error::Budget(format!(
                "more than {} critical pairs",
                opts.max_pairs
            )));
        }
        let (li, lj) = (&basis[i].lm, &basis[j].lm);
        if li.is_coprime(lj) {
            continue;
        }
        let l = li.lcm(lj);
        if opts.chain_criterion {
            let skip = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && basis[k].lm.divides(&l)
                    && !pending.contains(&(i.min(k), i.max(k)))
                    && !pending.contains(&(j.min(k), j.max(k)))
            });
            if skip {
                continue;
            }
        }
        let (bi, bj) = (&basis[i], &basis[j]);
        let si = l.checked_div(&bi.lm).unwrap();
        let sj = l.checked_div(&bj.lm).unwrap();
        // Both elements are monic.
        let zero = SortedPoly { terms: Vec::new() };
        let s = zero
            .sub_scaled(&C::one().negated(), &si, &bi.poly, order)
            .sub_scaled(&C::one(), &sj, &bj.poly, order);
        let r = reduce(s, &basis, order, None, opts.max_terms)?;
        if !r.is_zero() {
            insert(&mut basis, &mut queue, &mut pending, r);
        }
    }

    Ok(interreduce(basis, order, n))
}

/// Minimal, monic, tail-reduced basis sorted by ascending leading monomial.
fn interreduce<C: Field>(basis: Vec<Divisor<C>>, order: &TermOrder, n: usize) -> GroebnerBasis<C> {
    let mut minimal: Vec<Divisor<C>> = Vec::new();
    for (i, d) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(k, other)| {
            k != i && other.lm.divides(&d.lm) && (other.lm != d.lm || k < i)
        });
        if !redundant {
            minimal.push(d.clone());
        }
    }
    minimal.sort_by(|a, b| order.cmp(&a.lm, &b.lm));
    let mut elements = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Divisor<C>> = minimal
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, d)| d.clone())
            .collect();
        let r = reduce(minimal[i].poly.clone(), &others, order, None, usize::MAX)
            .expect("no budget on final reduction");
        elements.push(make_monic(r).to_poly(n));
    }
    GroebnerBasis {
        order: order.clone(),
        elements,
        reduced: true,
    }
}

/// Reduced form of an existing Gröbner basis.
pub fn reduce_basis<C: Field>(g: &GroebnerBasis<C>) -> GroebnerBasis<C> {
    let order = &g.order;
    let divisors: Vec<Divisor<C>> = g
        .elements
        .iter()
        .filter(|p| !p.is_zero())
        .filter_map(|p| Divisor::new(SortedPoly::from_poly(p, order)))
        .collect();
    interreduce(divisors, order, g.nvars())
}

/// Answer to an ideal membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership<C: Field> {
    pub member: bool,
    /// Cofactors `c_i` with `f = sum c_i g_i`, present for members.
    pub certificate: Option<Vec<Polynomial<C>>>,
}

pub fn ideal_membership<C: Field>(f: &Polynomial<C>, g: &GroebnerBasis<C>) -> Result<Membership<C>> {
    let div = normal_form(f, &g.elements, &g.order)?;
    if div.remainder.is_zero() {
        Ok(Membership {
            member: true,
            certificate: Some(div.cofactors),
        })
    } else {
        Ok(Membership {
            member: false,
            certificate: None,
        })
    }
}

/// Elements of `g` free of the `drop` variables, renumbered onto the
/// remaining variables. `g`'s order must eliminate `drop`.
pub fn eliminate<C: Field>(
    g: &GroebnerBasis<C>,
    drop: &[usize],
    names: &[String],
) -> Result<IdealPresentation<C>> {
    Ok(eliminate_basis(g, drop, names)?.0)
}

/// Like [`eliminate`], also returning the surviving elements as a Gröbner
/// basis under the induced order.
pub fn eliminate_basis<C: Field>(
    g: &GroebnerBasis<C>,
    drop: &[usize],
    names: &[String],
) -> Result<(IdealPresentation<C>, GroebnerBasis<C>)> {
    let n = g.nvars();
    if names.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: names.len(),
        });
    }
    if !g.order.eliminates(drop) {
        let vars: Vec<&str> = drop.iter().filter_map(|&v| names.get(v).map(String::as_str)).collect();
        return Err(Error::OrderMismatch(format!("{{{}}}", vars.join(","))));
    }
    let keep: Vec<usize> = (0..n).filter(|v| !drop.contains(v)).collect();
    let mut kept = Vec::new();
    for p in &g.elements {
        if drop.iter().all(|&v| !p.uses_var(v)) {
            kept.push(p.restrict_vars(&keep)?);
        }
    }
    let order = g.order.restrict(&keep)?;
    let names: Vec<String> = keep.iter().map(|&v| names[v].clone()).collect();
    let basis = GroebnerBasis {
        order,
        elements: kept.clone(),
        reduced: g.reduced,
    };
    Ok((IdealPresentation::new(kept, names)?, basis))
}

/// Generators of the ideal of polynomials vanishing on `points`, via
/// elimination of `t` from `<t_i (x_j - a_ij), t_1 + ... + t_n - 1>`.
///
/// The result is the reduced Gröbner basis of the point ideal under
/// `x_order`, presented as generators.
pub fn point_ideal_intersection<C: Field>(
    points: &[Vec<C>],
    x_order: &TermOrder,
    opts: &BuchbergerOptions,
) -> Result<(IdealPresentation<C>, GroebnerBasis<C>)> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Input("no points".into()));
    }
    let m = points[0].len();
    if points.iter().any(|p| p.len() != m) {
        return Err(Error::Input("points of different dimensions".into()));
    }
    if x_order.nvars() != m {
        return Err(Error::Dimension {
            expected: m,
            found: x_order.nvars(),
        });
    }
    let distinct: HashSet<&Vec<C>> = points.iter().collect();
    if distinct.len() != n {
        return Err(Error::Input("duplicate points".into()));
    }
    let total = m + n;
    let mut gens = Vec::with_capacity(n * m + 1);
    let mut sum_t = Polynomial::constant(total, C::one().negated());
    for (i, a) in points.iter().enumerate() {
        let t = Polynomial::var(total, m + i);
        sum_t = &sum_t + &t;
        for (j, aij) in a.iter().enumerate() {
            let lin = &Polynomial::var(total, j) - &Polynomial::constant(total, aij.clone());
            gens.push(&t * &lin);
        }
    }
    gens.push(sum_t);
    let mut names = default_names("x", m);
    names.extend(default_names("t", n));
    let order = TermOrder::elimination(total, (m..total).collect(), OrderKind::GrevLex, x_order)?;
    let gb = buchberger(&IdealPresentation::new(gens, names.clone())?, &order, opts)?;
    let drop: Vec<usize> = (m..total).collect();
    eliminate_basis(&gb, &drop, &names)
}

/// Monomials divisible by no leading monomial of `g`, ascending in `g`'s order.
pub fn standard_monomials<C: Field>(g: &GroebnerBasis<C>, names: &[String]) -> Result<Vec<Monomial>> {
    let n = g.nvars();
    let lms = g.leading_monomials();
    let mut bounds = vec![u32::MAX; n];
    for lm in &lms {
        if let Some(v) = lm.pure_power_var() {
            bounds[v] = bounds[v].min(lm.exp(v));
        }
    }
    if lms.iter().any(|lm| lm.is_one()) {
        return Ok(Vec::new());
    }
    if let Some(v) = bounds.iter().position(|&b| b == u32::MAX) {
        let name = names.get(v).cloned().unwrap_or_else(|| format!("variable {}", v + 1));
        return Err(Error::NotZeroDimensional(name));
    }
    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    collect_standard(0, &mut exps, &bounds, &lms, &mut out);
    out.sort_by(|a, b| g.order.cmp(a, b));
    Ok(out)
}

fn collect_standard(i: usize, exps: &mut Vec<u32>, bounds: &[u32], lms: &[Monomial], out: &mut Vec<Monomial>) {
    if i == exps.len() {
        out.push(Monomial::new(exps.clone()));
        return;
    }
    for e in 0..bounds[i] {
        exps[i] = e;
        // later variables are still zero, so divisibility here is inherited by every extension
        let probe = Monomial::new(exps.clone());
        if lms.iter().any(|lm| lm.divides(&probe)) {
            break;
        }
        collect_standard(i + 1, exps, bounds, lms, out);
    }
    exps[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn names(n: usize) -> Vec<String> {
        default_names("x", n)
    }

    fn p(s: &str, n: usize) -> Polynomial<Rational> {
        Polynomial::parse(s, &names(n)).unwrap()
    }

    fn ideal(gens: &[&str], n: usize) -> IdealPresentation<Rational> {
        IdealPresentation::new(gens.iter().map(|s| p(s, n)).collect(), names(n)).unwrap()
    }

    fn gb(gens: &[&str], n: usize, order: &TermOrder) -> GroebnerBasis<Rational> {
        buchberger(&ideal(gens, n), order, &BuchbergerOptions::default()).unwrap()
    }

    #[test]
    fn s_polynomial_examples() {
        let lex = TermOrder::lex(2);
        let f = p("x1^2 - 1", 2);
        let g = p("x2^2 - 1", 2);
        assert!(s_polynomial(&f, &f, &lex).unwrap().is_zero());
        // x2^2 (x1^2 - 1) - x1^2 (x2^2 - 1) = x1^2 - x2^2
        assert_eq!(s_polynomial(&f, &g, &lex).unwrap(), p("x1^2 - x2^2", 2));
        let s = s_polynomial(&f, &g, &lex).unwrap();
        assert!(normal_form(&s, &[f, g], &lex).unwrap().remainder.is_zero());
    }

    #[test]
    fn already_groebner() {
        let g = gb(&["x1^2 - 1", "x2^2 - 1"], 2, &TermOrder::lex(2));
        let mut lines = g.to_lines(&names(2));
        lines.sort();
        assert_eq!(lines, vec!["x1^2 - 1", "x2^2 - 1"]);
        assert!(g.is_groebner().unwrap());
    }

    #[test]
    fn redundant_generator_removed() {
        let g = gb(&["x1^2 - 1", "x1^4 - 1"], 1, &TermOrder::lex(1));
        assert_eq!(g.elements, vec![p("x1^2 - 1", 1)]);
        // x1^4 - 1 = (x1^2 + 1)(x1^2 - 1)
        let div = normal_form(&p("x1^4 - 1", 1), &g.elements, &TermOrder::lex(1)).unwrap();
        assert_eq!(div.cofactors[0], p("x1^2 + 1", 1));
    }

    #[test]
    fn reduce_basis_rescales() {
        let order = TermOrder::lex(2);
        let g = gb(&["x1^2 - 1", "x2^2 - 1"], 2, &order);
        let scaled = GroebnerBasis {
            order: order.clone(),
            elements: g.elements.iter().map(|e| e.scale(&Rational::from(3))).collect(),
            reduced: false,
        };
        assert_eq!(reduce_basis(&scaled), g);
        assert_eq!(reduce_basis(&g), g);
    }

    #[test]
    fn cyclic_ideal_lex_basis() {
        // <x^2 + y, x y - 1> under lex x > y: {x + y^2, y^3 + 1}
        let g = gb(&["x1^2 + x2", "x1*x2 - 1"], 2, &TermOrder::lex(2));
        assert_eq!(g.elements, vec![p("x2^3 + 1", 2), p("x1 + x2^2", 2)]);
        assert!(g.is_groebner().unwrap());
    }

    #[test]
    fn chain_criterion_gives_same_basis() {
        let gens = ["x1*x2 - x3", "x2*x3 - x1", "x1*x3 - x2", "x1^2 - 1"];
        let order = TermOrder::grevlex(3);
        let plain = gb(&gens, 3, &order);
        let opts = BuchbergerOptions { chain_criterion: true, ..Default::default() };
        let chained = buchberger(&ideal(&gens, 3), &order, &opts).unwrap();
        assert_eq!(plain, chained);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = BuchbergerOptions { max_pairs: 1, ..Default::default() };
        let r = buchberger(&ideal(&["x1^2 + x2", "x1*x2 - 1"], 2), &TermOrder::lex(2), &opts);
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn membership() {
        let g = gb(&["x1^2 - 1"], 1, &TermOrder::lex(1));
        assert!(!ideal_membership(&p("x1", 1), &g).unwrap().member);
        let m = ideal_membership(&p("x1^3 - x1", 1), &g).unwrap();
        assert!(m.member);
        assert_eq!(m.certificate.unwrap()[0], p("x1", 1));
    }

    #[test]
    fn elimination_requires_elimination_order() {
        let g = gb(&["x1 - x2", "x2^2 - 1"], 2, &TermOrder::grevlex(2));
        assert!(matches!(eliminate(&g, &[0], &names(2)), Err(Error::OrderMismatch(_))));
        let unchanged = eliminate(&g, &[], &names(2)).unwrap();
        assert_eq!(unchanged.generators, g.elements);
        let lex = gb(&["x1 - x2", "x2^2 - 1"], 2, &TermOrder::lex(2));
        let e = eliminate(&lex, &[0], &names(2)).unwrap();
        assert_eq!(e.names, vec!["x2".to_string()]);
        assert_eq!(e.generators, vec![p("x1^2 - 1", 1)]);
    }

    #[test]
    fn single_point_ideal() {
        let pt: Vec<Rational> = vec![Rational::from(1), Rational::from(-1), Rational::from(1)];
        let (ideal, basis) =
            point_ideal_intersection(&[pt.clone()], &TermOrder::lex(3), &Default::default()).unwrap();
        assert_eq!(
            basis.elements,
            vec![p("x3 - 1", 3), p("x2 + 1", 3), p("x1 - 1", 3)]
        );
        for g in &ideal.generators {
            assert!(g.eval(&pt).unwrap().is_zero());
        }
        assert_eq!(standard_monomials(&basis, &names(3)).unwrap(), vec![Monomial::one(3)]);
    }

    #[test]
    fn duplicate_points_rejected() {
        let pt = vec![Rational::from(1)];
        let r = point_ideal_intersection(&[pt.clone(), pt], &TermOrder::lex(1), &Default::default());
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn standard_monomials_of_simple_ideals() {
        let g = gb(&["x1^2 - 1"], 1, &TermOrder::lex(1));
        assert_eq!(
            standard_monomials(&g, &names(1)).unwrap(),
            vec![Monomial::one(1), Monomial::var(1, 0)]
        );
        let g = gb(&["x1*x2 - 1", "x1^2 - 1"], 2, &TermOrder::grevlex(2));
        assert_eq!(standard_monomials(&g, &names(2)).unwrap().len(), 2);
        let open = gb(&["x1^2 - 1"], 2, &TermOrder::lex(2));
        assert!(matches!(
            standard_monomials(&open, &names(2)),
            Err(Error::NotZeroDimensional(v)) if v == "x2"
        ));
    }
}
