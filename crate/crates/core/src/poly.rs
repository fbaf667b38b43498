//! Sparse multivariate polynomials over an exact field, with a text format
//! shared by the CLI and fixture files.
//!
//! Text format: terms joined by `+`/`-`, rational coefficients as `p/q`,
//! monomials as `x1*x3^2`, e.g. `x7^2 - 1` or `1/2 + 1/2*x1*x2*x3`.
//! Over a cyclotomic field the root of unity is written `w`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::monomial::{default_names, Monomial};
use crate::order::TermOrder;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<C: Field> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Field> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::term(Monomial::var(nvars, i), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { nvars, terms }
    }

    /// Sums duplicate monomials and drops zero coefficients.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.plus(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.negated());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.times(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.times(c))).collect(),
        }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.times(c))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The `order`-maximal term.
    pub fn leading_term(&self, order: &TermOrder) -> Result<(Monomial, C)> {
        if order.nvars() != self.nvars {
            return Err(Error::Dimension {
                expected: order.nvars(),
                found: self.nvars,
            });
        }
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(a.0, b.0))
            .map(|(m, c)| (m.clone(), c.clone()))
            .ok_or(Error::ZeroPolynomial)
    }

    pub fn leading_monomial(&self, order: &TermOrder) -> Result<Monomial> {
        self.leading_term(order).map(|t| t.0)
    }

    /// Terms in descending `order`.
    pub fn sorted_terms(&self, order: &TermOrder) -> Vec<(Monomial, C)> {
        let mut v: Vec<(Monomial, C)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|a, b| order.cmp(&b.0, &a.0));
        v
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self, order: &TermOrder) -> Result<Self> {
        let (_, lc) = self.leading_term(order)?;
        let inv = lc.inverse().ok_or(Error::ZeroPolynomial)?;
        Ok(self.scale(&inv))
    }

    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    v = v.times(&point[i]);
                }
            }
            total = total.plus(&v);
        }
        Ok(total)
    }

    /// Reduction modulo `x_i^2 - 1` for every variable.
    pub fn square_free_reduce(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.square_free_part(), c);
        }
        out
    }

    /// Moves the polynomial into a universe of `nvars` variables, sending
    /// variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            out.add_term(m.remap(nvars, map), c);
        }
        out
    }

    /// Drops unused trailing variables (all must be absent) to get a
    /// polynomial over the first `keep` variables, after an optional remap.
    pub fn restrict_vars(&self, keep: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.nvars];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let mut out = Self::zero(keep.len());
        for (m, c) in &self.terms {
            let mut exps = vec![0; keep.len()];
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    if pos[i] == usize::MAX {
                        return Err(Error::Input(format!(
                            "polynomial uses variable {} outside the target universe",
                            i + 1
                        )));
                    }
                    exps[pos[i]] = e;
                }
            }
            out.add_term(Monomial::new(exps), c);
        }
        Ok(out)
    }

    /// Canonical text with terms in descending `order`.
    pub fn to_text(&self, names: &[String], order: &TermOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms(order).iter().enumerate() {
            let (neg, mag) = match c.as_rational() {
                Some(q) if q.is_negative() => (true, C::embed(&q.abs())),
                _ => (false, c.clone()),
            };
            let body = if m.is_one() {
                mag.to_string()
            } else if mag.is_one() {
                m.format_with(names)
            } else {
                format!("{}*{}", mag, m.format_with(names))
            };
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Self> {
        Parser::new(text, names)?.parse_all()
    }
}

impl Polynomial<Rational> {
    /// Image under the canonical embedding `Q -> K`.
    pub fn embed<K: Field>(&self) -> Polynomial<K> {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), K::embed(c))).collect(),
        }
    }
}

impl<C: Field> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names("x", self.nvars);
        write!(f, "{}", self.to_text(&names, &TermOrder::grevlex(self.nvars)))
    }
}

impl<C: Field> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Operator forms panic on a universe mismatch; use the `try_*` methods when
// the universes are not known to agree.
impl<'a, C: Field> Add for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.try_add(rhs).expect("polynomial universe mismatch")
    }
}

impl<'a, C: Field> Sub for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        self.try_sub(rhs).expect("polynomial universe mismatch")
    }
}

impl<'a, C: Field> Mul for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        self.try_mul(rhs).expect("polynomial universe mismatch")
    }
}

impl<'a, C: Field> Neg for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&C::one().negated())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Op(char),
}

struct Parser<'a, C: Field> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
    _field: std::marker::PhantomData<C>,
}

impl<'a, C: Field> Parser<'a, C> {
    fn new(text: &str, names: &'a [String]) -> Result<Self> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                tokens.push(Token::Num(chars[start..i].iter().collect()));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token::Ident(chars[start..i].iter().collect()));
            } else {
                let op = match c {
                    '\u{2212}' => '-',
                    '+' | '-' | '*' | '/' | '^' | '(' | ')' => c,
                    _ => return Err(Error::Input(format!("unexpected character {c:?} in polynomial"))),
                };
                tokens.push(Token::Op(op));
                i += 1;
            }
        }
        Ok(Parser {
            tokens,
            pos: 0,
            names,
            _field: std::marker::PhantomData,
        })
    }

    fn err(&self, msg: &str) -> Error {
        Error::Input(format!("{msg} (token {})", self.pos + 1))
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn parse_all(mut self) -> Result<Polynomial<C>> {
        if self.tokens.is_empty() {
            return Err(Error::Input("empty polynomial".into()));
        }
        let p = self.expr()?;
        if self.pos != self.tokens.len() {
            return Err(self.err("trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial<C>> {
        let n = self.names.len();
        let mut acc = Polynomial::zero(n);
        let mut sign = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.product()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek_op() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn product(&mut self) -> Result<Polynomial<C>> {
        let mut acc = self.power()?;
        loop {
            match self.peek_op() {
                Some('*') => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    acc = &acc * &rhs;
                }
                Some('/') => {
                    self.pos += 1;
                    let rhs = self.power()?;
                    let c = match rhs.terms.iter().next() {
                        Some((m, c)) if rhs.len() == 1 && m.is_one() => c.clone(),
                        _ => return Err(self.err("division only by a nonzero constant")),
                    };
                    let inv = c.inverse().ok_or_else(|| self.err("division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial<C>> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(s)) => {
                    let e: u32 = s.parse().map_err(|_| self.err("bad exponent"))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial<C>> {
        let n = self.names.len();
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(s)) => {
                let q: Rational = s.parse()?;
                Ok(Polynomial::constant(n, C::embed(&q)))
            }
            Some(Token::Ident(name)) => {
                if let Some(i) = self.names.iter().position(|v| *v == name) {
                    Ok(Polynomial::var(n, i))
                } else if let Some(c) = C::named_constant(&name) {
                    Ok(Polynomial::constant(n, c))
                } else {
                    Err(Error::Input(format!("unknown variable {name:?}")))
                }
            }
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Op('-')) => {
                let inner = self.power()?;
                Ok(-&inner)
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Cyclotomic;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        default_names("x", n)
    }

    fn p(s: &str, n: usize) -> Polynomial<Rational> {
        Polynomial::parse(s, &names(n)).unwrap()
    }

    #[test]
    fn additive_inverse_and_difference_of_squares() {
        assert!((&p("x1^2 - 1", 1) + &p("1 - x1^2", 1)).is_zero());
        assert_eq!(&p("x1 - 1", 1) * &p("x1 + 1", 1), p("x1^2 - 1", 1));
    }

    #[test]
    fn regular_indicator_constant_term() {
        let f = p("1/16*(1-x1*x2*x3)*(1-x1*x4*x5)*(1-x2*x4*x6)*(1+x1*x2*x4*x7)", 7);
        assert_eq!(f.coeff(&Monomial::one(7)), Rational::new(1, 16));
    }

    #[test]
    fn leading_terms() {
        let lex = TermOrder::lex(7);
        let (m, c) = p("x3 + x5*x6", 7).leading_term(&lex).unwrap();
        assert_eq!(m, Monomial::var(7, 2));
        assert!(c.is_one());
        let (m, c) = p("5", 7).leading_term(&lex).unwrap();
        assert!(m.is_one());
        assert_eq!(c, Rational::from(5));
        let (m, c) = p("x4 - x5*x6*x7", 7).leading_term(&TermOrder::grevlex(7)).unwrap();
        assert_eq!(m, Monomial::new(vec![0, 0, 0, 0, 1, 1, 1]));
        assert_eq!(c, Rational::from(-1));
        assert_eq!(Polynomial::<Rational>::zero(7).leading_term(&lex), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        assert!(matches!(p("x1", 1).try_add(&p("x1", 2)), Err(Error::Dimension { .. })));
    }

    #[test]
    fn printing_is_canonical() {
        let order = TermOrder::lex(7);
        assert_eq!(p("x6*x5 + x3", 7).to_text(&names(7), &order), "x3 + x5*x6");
        assert_eq!(p("-1 + x7^2", 7).to_text(&names(7), &order), "x7^2 - 1");
        assert_eq!(p("3/8 - 1/8*x1*x2", 3).to_text(&names(3), &order), "-1/8*x1*x2 + 3/8");
        assert_eq!(p("x1 \u{2212} x1", 1).to_text(&names(1), &TermOrder::lex(1)), "0");
        assert!(Polynomial::<Rational>::parse("x1 + y", &names(1)).is_err());
        assert!(Polynomial::<Rational>::parse("x1 / x1", &names(1)).is_err());
    }

    #[test]
    fn cyclotomic_coefficients_round_trip() {
        type C3 = Cyclotomic<3>;
        let n = names(2);
        let f: Polynomial<C3> = Polynomial::parse("x1 - w*x2 + w^2", &n).unwrap();
        let text = f.to_text(&n, &TermOrder::lex(2));
        assert_eq!(Polynomial::<C3>::parse(&text, &n).unwrap(), f);
        let at = f.eval(&[C3::root(1), C3::root(0)]).unwrap();
        // w - w + w^2
        assert_eq!(at, C3::root(2));
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Polynomial<Rational>> {
        proptest::collection::vec(
            (proptest::collection::vec(0u32..3, n), -5i64..5, 1i64..4),
            0..6,
        )
        .prop_map(move |ts| {
            Polynomial::from_terms(
                n,
                ts.into_iter().map(|(e, a, b)| (Monomial::new(e), Rational::new(a, b))),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_poly(3)) {
            let n = names(3);
            for order in [TermOrder::lex(3), TermOrder::grevlex(3)] {
                let text = f.to_text(&n, &order);
                prop_assert_eq!(Polynomial::<Rational>::parse(&text, &n).unwrap(), f.clone());
            }
        }

        #[test]
        fn ring_laws(f in arb_poly(3), g in arb_poly(3), h in arb_poly(3)) {
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            prop_assert!((&f - &f).is_zero());
        }
    }
}
