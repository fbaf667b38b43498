//! Indicator functions of two-level fractions, adding factors, and the
//! regular / subset / affinely-full-dimensional classification.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::design::{
    code_of_point, point_from_code, regular_design_from_words, sign_of, Coding, DefiningWord, DefiningWordSet,
    Design,
};
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::monomial::{default_names, Monomial};
use crate::order::TermOrder;
use crate::poly::Polynomial;

/// Largest factor count for which indicators are expanded densely.
pub const MAX_INDICATOR_FACTORS: usize = 20;

/// Square-free polynomial `sum b_a x^a` over `{+1,-1}^m`, keyed by the
/// support bitmask of `a` (bit `i` for `x_{i+1}`). Zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorFunction {
    m: usize,
    coeffs: BTreeMap<u64, Rational>,
}

impl IndicatorFunction {
    pub fn new(m: usize, coeffs: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        if m > 63 {
            return Err(Error::Scale(format!("{m} factors")));
        }
        let mut out = BTreeMap::new();
        for (a, b) in coeffs {
            if a >> m != 0 {
                return Err(Error::Input(format!("word {a:#b} uses more than {m} factors")));
            }
            if !b.is_zero() {
                out.insert(a, b);
            }
        }
        Ok(IndicatorFunction { m, coeffs: out })
    }

    /// The constant function 1, i.e. the full factorial.
    pub fn full(m: usize) -> Self {
        IndicatorFunction::new(m, [(0, Rational::one())]).expect("valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, word: u64) -> Rational {
        self.coeffs.get(&word).cloned().unwrap_or_else(Rational::zero)
    }

    /// `b_0`, which equals `n / 2^m` for a genuine indicator.
    pub fn constant(&self) -> Rational {
        self.coeff(0)
    }

    /// Value at the point whose `-1` coordinates are the set bits of `code`.
    pub fn eval(&self, code: u64) -> Rational {
        let mut acc = Rational::zero();
        for (a, b) in &self.coeffs {
            if (a & code).count_ones() % 2 == 0 {
                acc = acc.plus(b);
            } else {
                acc = acc.minus(b);
            }
        }
        acc
    }

    /// Values at every point, indexed by point code.
    pub fn values(&self) -> Result<Vec<Rational>> {
        check_scale(self.m)?;
        let mut v = vec![Rational::zero(); 1 << self.m];
        for (a, b) in &self.coeffs {
            v[*a as usize] = b.clone();
        }
        walsh_hadamard(&mut v);
        Ok(v)
    }

    pub fn to_polynomial(&self) -> Polynomial<Rational> {
        Polynomial::from_terms(
            self.m,
            self.coeffs.iter().map(|(a, b)| (Monomial::from_mask(self.m, *a), b.clone())),
        )
        .expect("consistent universe")
    }

    /// Reads a polynomial over `{+1,-1}^m`, reducing exponents modulo `x^2 = 1`.
    pub fn from_polynomial(p: &Polynomial<Rational>) -> Result<Self> {
        let r = p.square_free_reduce();
        IndicatorFunction::new(r.nvars(), r.terms().map(|(a, b)| (a.support_mask(), b.clone())))
    }

    /// Indicator file: a line `m=<int>` followed by the polynomial text.
    pub fn to_text(&self) -> String {
        let names = default_names("x", self.m);
        format!(
            "m={}\n{}\n",
            self.m,
            self.to_polynomial().to_text(&names, &TermOrder::grlex(self.m))
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header m=<int>"))?;
        let m: usize = header
            .strip_prefix("m=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::parse(hl, "expected header m=<int>"))?;
        let mut body = String::new();
        let mut first = hl + 1;
        for (i, l) in lines {
            if body.is_empty() {
                first = i;
            }
            body.push(' ');
            body.push_str(l);
        }
        if body.trim().is_empty() {
            return Err(Error::parse(first, "missing polynomial"));
        }
        let p = Polynomial::<Rational>::parse(&body, &default_names("x", m)).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(first, message),
            other => Error::parse(first, other.to_string()),
        })?;
        IndicatorFunction::from_polynomial(&p)
    }
}

fn check_scale(m: usize) -> Result<()> {
    if m > MAX_INDICATOR_FACTORS {
        Err(Error::Scale(format!(
            "indicator expansion over {m} factors (limit {MAX_INDICATOR_FACTORS})"
        )))
    } else {
        Ok(())
    }
}

/// In-place unnormalized Walsh-Hadamard transform; `v` has length `2^m`.
fn walsh_hadamard(v: &mut [Rational]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i].clone(), v[i + h].clone());
                v[i] = a.plus(&b);
                v[i + h] = a.minus(&b);
            }
        }
        h *= 2;
    }
}

/// `b_a = 2^-m * sum over runs of x^a`.
pub fn indicator_from_design(d: &Design) -> Result<IndicatorFunction> {
    d.require_two_level()?;
    let m = d.m();
    check_scale(m)?;
    let mut v = vec![Rational::zero(); 1 << m];
    for code in d.run_codes()? {
        v[code as usize] = Rational::one();
    }
    walsh_hadamard(&mut v);
    let scale = Rational::new(1, 1i64 << m);
    IndicatorFunction::new(m, v.into_iter().enumerate().map(|(a, b)| (a as u64, b.times(&scale))))
}

/// Runs where `f = 1`, in standard order; fails unless `f` is 0/1-valued
/// and nonzero somewhere.
pub fn design_from_indicator(f: &IndicatorFunction) -> Result<Design> {
    let m = f.m();
    let values = f.values()?;
    let mut runs = Vec::new();
    for k in 0..1u64 << m {
        let run = point_from_code(m, k);
        let v = &values[code_of_point(&run) as usize];
        if v.is_one() {
            runs.push(run);
        } else if !v.is_zero() {
            return Err(Error::InvalidIndicator(format!(
                "value {v} at run {}",
                fmt_signs(&run)
            )));
        }
    }
    if runs.is_empty() {
        return Err(Error::InvalidIndicator("indicator vanishes everywhere".into()));
    }
    Design::new(m, 2, Coding::PlusMinusOne, runs)
}

fn fmt_signs(run: &[u32]) -> String {
    let parts: Vec<&str> = run.iter().map(|&l| if l == 0 { "1" } else { "-1" }).collect();
    format!("({})", parts.join(","))
}

/// New factor `y_{factor+1} = sign * x^word`, numbered after the `m` originals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorRelation {
    pub factor: usize,
    pub sign: i32,
    pub word: u64,
}

impl FactorRelation {
    pub fn new(factor: usize, sign: i32, word: u64) -> Result<Self> {
        if word == 0 {
            return Err(Error::Input("added factor needs a nonempty word".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Input("relation sign must be +1 or -1".into()));
        }
        Ok(FactorRelation { factor, sign, word })
    }
}

fn check_relations(m: usize, rels: &[FactorRelation]) -> Result<()> {
    for (j, r) in rels.iter().enumerate() {
        FactorRelation::new(r.factor, r.sign, r.word)?;
        if r.factor != j {
            return Err(Error::Input(format!(
                "relation {} defines factor {} out of order",
                j + 1,
                r.factor + 1
            )));
        }
        if r.word >> m != 0 {
            return Err(Error::Input(format!("relation word {:#b} leaves the {m} base factors", r.word)));
        }
    }
    if m + rels.len() > 63 {
        return Err(Error::Scale(format!("{} factors", m + rels.len())));
    }
    Ok(())
}

/// `f2(x, y) = f1(x) * prod_j (1 + e_j y_j x^{b_j}) / 2`.
pub fn indicator_add_factors(f1: &IndicatorFunction, rels: &[FactorRelation]) -> Result<IndicatorFunction> {
    let m = f1.m();
    check_relations(m, rels)?;
    let half = Rational::new(1, 2);
    let mut acc = f1.coeffs.clone();
    for (j, r) in rels.iter().enumerate() {
        let factor_word = r.word | (1u64 << (m + j));
        let e = half.times(&Rational::from(r.sign));
        let mut next: BTreeMap<u64, Rational> = BTreeMap::new();
        for (a, b) in &acc {
            accumulate(&mut next, *a, b.times(&half));
            accumulate(&mut next, a ^ factor_word, b.times(&e));
        }
        next.retain(|_, b| !b.is_zero());
        acc = next;
    }
    IndicatorFunction::new(m + rels.len(), acc)
}

fn accumulate(map: &mut BTreeMap<u64, Rational>, key: u64, v: Rational) {
    let slot = map.entry(key).or_insert_with(Rational::zero);
    *slot = slot.plus(&v);
}

/// The design extended by the columns `y_j = e_j x^{b_j}`.
pub fn add_factors_to_design(d: &Design, rels: &[FactorRelation]) -> Result<Design> {
    let codes = d.run_codes()?;
    check_relations(d.m(), rels)?;
    let extra: Vec<Vec<u32>> = codes
        .iter()
        .map(|&x| {
            rels.iter()
                .map(|r| {
                    let v = sign_of(r.word, x) * r.sign;
                    if v == 1 {
                        0
                    } else {
                        1
                    }
                })
                .collect()
        })
        .collect();
    d.with_columns(&extra)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    FullFactorial,
    Regular,
    SubsetFractional,
    AffinelyFullDimensional,
}

impl ClassTag {
    pub fn name(self) -> &'static str {
        match self {
            ClassTag::FullFactorial => "full-factorial",
            ClassTag::Regular => "regular",
            ClassTag::SubsetFractional => "subset-fractional",
            ClassTag::AffinelyFullDimensional => "affinely-full-dimensional",
        }
    }
}

/// Class of a two-level design with its witness.
///
/// For regular designs `words` generate the defining group; for subset
/// fractions they define the smallest regular fraction `containing` the
/// design. Empty otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignClass {
    pub tag: ClassTag,
    pub words: Vec<DefiningWord>,
    pub containing: Option<Design>,
    /// Largest `|b_a| / b_0` over `a != 0`.
    pub max_ratio: Rational,
    pub diagnostic: Option<String>,
}

/// Greedy GF(2) basis of `words`, kept in input order.
fn independent_subset(words: &[DefiningWord]) -> Vec<DefiningWord> {
    let mut reduced: Vec<u64> = Vec::new();
    let mut out = Vec::new();
    for w in words {
        let mut v = w.word;
        for b in &reduced {
            v = v.min(v ^ b);
        }
        if v != 0 {
            reduced.push(v);
            reduced.sort_unstable_by(|a, b| b.cmp(a));
            out.push(*w);
        }
    }
    out
}

pub fn classify_design(d: &Design) -> Result<DesignClass> {
    let f = indicator_from_design(d)?;
    let m = d.m();
    let b0 = f.constant();
    let mut full_words: Vec<DefiningWord> = Vec::new();
    let mut max_ratio = Rational::zero();
    for (a, b) in f.coeffs() {
        if *a == 0 {
            continue;
        }
        let r = b.abs().times(&b0.inverse().expect("nonempty design"));
        if r > max_ratio {
            max_ratio = r.clone();
        }
        if r.is_one() {
            full_words.push(DefiningWord {
                word: *a,
                sign: if b.is_positive() { 1 } else { -1 },
            });
        }
    }
    full_words.sort_by_key(|w| (w.word.count_ones(), std::cmp::Reverse(w.word.reverse_bits())));
    let basis = independent_subset(&full_words);
    let k = basis.len();
    if k == 0 {
        let tag = if d.n() == 1usize << m {
            ClassTag::FullFactorial
        } else {
            ClassTag::AffinelyFullDimensional
        };
        return Ok(DesignClass {
            tag,
            words: Vec::new(),
            containing: None,
            max_ratio,
            diagnostic: None,
        });
    }
    let set = DefiningWordSet::new(m, basis.clone())?;
    let generated = regular_design_from_words(&set)?;
    let contained = d.runs().iter().all(|r| generated.contains_run(r));
    if !contained {
        return Ok(DesignClass {
            tag: ClassTag::SubsetFractional,
            words: basis,
            containing: None,
            max_ratio,
            diagnostic: Some("containing regular fraction failed run-containment check".into()),
        });
    }
    if d.n() == 1usize << (m - k) {
        Ok(DesignClass {
            tag: ClassTag::Regular,
            words: basis,
            containing: None,
            max_ratio,
            diagnostic: None,
        })
    } else {
        Ok(DesignClass {
            tag: ClassTag::SubsetFractional,
            words: basis,
            containing: Some(generated),
            max_ratio,
            diagnostic: None,
        })
    }
}

/// `x1*x2*x3`-style text of a factor bitmask.
pub fn word_text(m: usize, word: u64) -> String {
    Monomial::from_mask(m, word).format_with(&default_names("x", m))
}
