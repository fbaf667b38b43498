//! Exact coefficient fields: the rationals and prime-order cyclotomic
//! extensions `Q(w)` with `w = exp(2*pi*i/s)`.
//!
//! The field is a type parameter of every polynomial, so mixing fields is a
//! compile-time error. Rationals move into a cyclotomic field only through
//! [`Field::embed`].

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Operations every coefficient field must provide.
pub trait Field: Clone + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
    /// Canonical embedding of `Q`.
    fn embed(q: &Rational) -> Self;
    /// The value as a rational number, if it lies in `Q`.
    fn as_rational(&self) -> Option<Rational>;
    /// Coordinates over `Q` in the field's power basis.
    fn rational_coords(&self) -> Vec<Rational>;
    /// Dimension of the field as a `Q`-vector space.
    fn degree() -> usize;
    /// Named constants understood by the polynomial parser (`w` for roots of unity).
    fn named_constant(_name: &str) -> Option<Self> {
        None
    }
    /// The `j`-th power of the primitive `s`-th root of unity, when the field
    /// contains it.
    fn root_of_unity(s: u32, j: u32) -> Option<Self>;

    fn from_i64(v: i64) -> Self {
        Self::embed(&Rational::from(v))
    }
}

/// Arbitrary-precision rational number, always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let d: BigInt = denom.into();
        assert!(!d.is_zero(), "zero denominator");
        Rational(BigRational::new(numer.into(), d))
    }

    pub fn from_big(numer: BigInt) -> Self {
        Rational(BigRational::from_integer(numer))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from(v as i64)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("not a rational number: {s:?}"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    }
}

macro_rules! rational_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);
rational_binop!(Div, div, /);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }
    fn one() -> Self {
        Rational(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_one(&self) -> bool {
        self.0.is_one()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
    fn embed(q: &Rational) -> Self {
        q.clone()
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn rational_coords(&self) -> Vec<Rational> {
        vec![self.clone()]
    }
    fn degree() -> usize {
        1
    }
    fn root_of_unity(s: u32, j: u32) -> Option<Self> {
        match s {
            1 => Some(Rational::one()),
            2 => Some(Rational::from(if j % 2 == 0 { 1 } else { -1 })),
            _ => None,
        }
    }
}

pub const fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element `q_0 + q_1 w + ... + q_{S-2} w^{S-2}` of the cyclotomic field
/// `Q(w)`, `w = exp(2*pi*i/S)`, `S` prime.
///
/// Representation is canonical: `w^{S-1}` is always rewritten as
/// `-(1 + w + ... + w^{S-2})`, so equal field elements have equal
/// coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic<const S: u32> {
    coords: Vec<Rational>,
}

impl<const S: u32> Cyclotomic<S> {
    const PRIME_ORDER: () = assert!(is_prime(S), "cyclotomic order must be prime");

    fn width() -> usize {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME_ORDER;
        (S - 1) as usize
    }

    /// Builds the element from coordinates in the power basis; `coords` may
    /// have any length and is reduced modulo `w^S = 1` and the cyclotomic
    /// polynomial.
    pub fn from_powers(coords: &[Rational]) -> Self {
        let s = S as usize;
        let mut full = vec![Rational::zero(); s];
        for (k, c) in coords.iter().enumerate() {
            full[k % s] = &full[k % s] + c;
        }
        Self::fold(full)
    }

    fn fold(mut full: Vec<Rational>) -> Self {
        let w = Self::width();
        debug_assert_eq!(full.len(), w + 1);
        let top = full.pop().unwrap();
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c = &*c - &top;
            }
        }
        Cyclotomic { coords: full }
    }

    /// `w^j`.
    pub fn root(j: u32) -> Self {
        let mut c = vec![Rational::zero(); S as usize];
        c[(j % S) as usize] = Rational::one();
        Self::fold(c)
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// Image under the automorphism `w -> w^k`.
    pub fn galois(&self, k: u32) -> Self {
        let s = S as usize;
        let mut full = vec![Rational::zero(); s];
        for (j, c) in self.coords.iter().enumerate() {
            let e = (j * k as usize) % s;
            full[e] = &full[e] + c;
        }
        Self::fold(full)
    }

    /// Complex conjugate (`w -> w^{S-1}`).
    pub fn conj(&self) -> Self {
        self.galois(S - 1)
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> Rational {
        let mut acc = self.clone();
        for k in 2..S {
            acc = acc.times(&self.galois(k));
        }
        acc.as_rational()
            .expect("norm of a cyclotomic number lies in Q")
    }
}

impl<const S: u32> Field for Cyclotomic<S> {
    fn zero() -> Self {
        Cyclotomic {
            coords: vec![Rational::zero(); Self::width()],
        }
    }
    fn one() -> Self {
        Self::embed(&Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
    fn plus(&self, rhs: &Self) -> Self {
        Cyclotomic {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
    fn minus(&self, rhs: &Self) -> Self {
        Cyclotomic {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        let s = S as usize;
        let mut full = vec![Rational::zero(); s];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let e = (i + j) % s;
                full[e] = &full[e] + &(a * b);
            }
        }
        Self::fold(full)
    }
    fn negated(&self) -> Self {
        Cyclotomic {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // a * prod_{k=2}^{S-1} sigma_k(a) = N(a)
        let mut cofactor = Self::one();
        for k in 2..S {
            cofactor = cofactor.times(&self.galois(k));
        }
        let norm = self
            .times(&cofactor)
            .as_rational()
            .expect("norm of a cyclotomic number lies in Q");
        let inv = norm.inverse()?;
        Some(Cyclotomic {
            coords: cofactor.coords.iter().map(|c| c * &inv).collect(),
        })
    }
    fn embed(q: &Rational) -> Self {
        let mut coords = vec![Rational::zero(); Self::width()];
        coords[0] = q.clone();
        Cyclotomic { coords }
    }
    fn as_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }
    fn rational_coords(&self) -> Vec<Rational> {
        self.coords.clone()
    }
    fn degree() -> usize {
        Self::width()
    }
    fn named_constant(name: &str) -> Option<Self> {
        (name == "w").then(|| Self::root(1))
    }
    fn root_of_unity(s: u32, j: u32) -> Option<Self> {
        if s == S {
            Some(Self::root(j))
        } else if s == 1 {
            Some(Self::one())
        } else if s == 2 {
            Some(Self::from_i64(if j % 2 == 0 { 1 } else { -1 }))
        } else {
            None
        }
    }
}

impl<const S: u32> fmt::Display for Cyclotomic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut parts = Vec::new();
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = (c.is_negative(), c.abs());
            let body = match k {
                0 => format!("{mag}"),
                _ => {
                    let w = if k == 1 { "w".to_string() } else { format!("w^{k}") };
                    if mag.is_one() {
                        w
                    } else {
                        format!("{mag}*{w}")
                    }
                }
            };
            parts.push((neg, body));
        }
        write!(f, "(")?;
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        write!(f, ")")
    }
}

impl<const S: u32> fmt::Debug for Cyclotomic<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
