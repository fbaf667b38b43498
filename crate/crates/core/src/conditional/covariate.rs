//! Covariate matrices of log-linear null models and their integer recoding.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::field::{denominator_lcm, Field, Rational};
use crate::monomial::{default_names, Monomial};

/// How a factor with `s > 2` levels is turned into columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Contrast {
    /// Level indicators for levels `0..s-1`; the last level is the baseline.
    Baseline,
    /// Column `j` is `s-1` at level `j`, `-1` at the last level, `0` elsewhere.
    Symmetric,
    /// One column `w^(a * level)` per term, `w` a primitive `s`-th root of unity.
    Complex,
}

impl Contrast {
    pub fn tag(self) -> &'static str {
        match self {
            Contrast::Baseline => "baseline",
            Contrast::Symmetric => "symmetric",
            Contrast::Complex => "complex",
        }
    }
}

impl FromStr for Contrast {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Contrast::Baseline),
            "symmetric" => Ok(Contrast::Symmetric),
            "complex" => Ok(Contrast::Complex),
            _ => Err(Error::Input(format!("unknown contrast {s:?}"))),
        }
    }
}

impl fmt::Display for Contrast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Terms of a log-linear model; the intercept is always the first term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    m: usize,
    terms: Vec<Monomial>,
    contrast: Contrast,
}

impl Model {
    /// Builds a model over `m` factors. A missing intercept is added, a
    /// present one moved to the front; repeated terms are an input error.
    pub fn new(m: usize, terms: Vec<Monomial>, contrast: Contrast) -> Result<Self> {
        let mut out = vec![Monomial::one(m)];
        for t in terms {
            t.check_same(&out[0])?;
            if t.is_one() {
                continue;
            }
            if out.contains(&t) {
                return Err(Error::Input(format!(
                    "term {} listed twice",
                    t.format_with(&default_names("x", m))
                )));
            }
            out.push(t);
        }
        Ok(Model {
            m,
            terms: out,
            contrast,
        })
    }

    /// Intercept plus every main effect.
    pub fn main_effects(m: usize, contrast: Contrast) -> Self {
        Model::new(m, (0..m).map(|i| Monomial::var(m, i)).collect(), contrast).expect("valid")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn contrast(&self) -> Contrast {
        self.contrast
    }

    pub fn with_term(&self, t: Monomial) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.push(t);
        Model::new(self.m, terms, self.contrast)
    }

    /// Model file: one term per line (`1`, `x1`, `x1*x2`, ...), optionally a
    /// line `contrast=<baseline|symmetric|complex>`; `#` starts a comment.
    pub fn parse(text: &str, m: usize) -> Result<Self> {
        let names = default_names("x", m);
        let mut terms = Vec::new();
        let mut contrast = Contrast::Baseline;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(tag) = line.strip_prefix("contrast=") {
                contrast = tag.trim().parse().map_err(|e: Error| Error::parse(i + 1, e.to_string()))?;
                continue;
            }
            terms.push(parse_term(line, &names).map_err(|msg| Error::parse(i + 1, msg))?);
        }
        Model::new(m, terms, contrast)
    }

    pub fn to_text(&self) -> String {
        let names = default_names("x", self.m);
        let mut out = format!("contrast={}\n", self.contrast);
        for t in &self.terms {
            out.push_str(&t.format_with(&names));
            out.push('\n');
        }
        out
    }
}

fn parse_term(text: &str, names: &[String]) -> std::result::Result<Monomial, String> {
    let mut exps = vec![0u32; names.len()];
    if text == "1" {
        return Ok(Monomial::new(exps));
    }
    for factor in text.split('*') {
        let factor = factor.trim();
        let (name, e) = match factor.split_once('^') {
            Some((n, e)) => (n.trim(), e.trim().parse::<u32>().map_err(|_| format!("bad exponent in {factor:?}"))?),
            None => (factor, 1),
        };
        let v = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| format!("unknown factor {name:?}"))?;
        exps[v] += e;
    }
    Ok(Monomial::new(exps))
}

/// `n x nu` covariate matrix over `C`, stored by columns; column 0 is the
/// intercept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovariateMatrix<C: Field> {
    n: usize,
    columns: Vec<Vec<C>>,
    labels: Vec<String>,
}

impl<C: Field> CovariateMatrix<C> {
    /// Checks the intercept and full column rank. A dependent column is
    /// reported with the earlier column it is proportional to when there is
    /// one.
    pub fn new(columns: Vec<Vec<C>>, labels: Vec<String>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.is_empty() || n == 0 {
            return Err(Error::Input("empty covariate matrix".into()));
        }
        if labels.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Input("ragged covariate matrix".into()));
        }
        if !columns[0].iter().all(Field::is_one) {
            return Err(Error::Input("first covariate column must be the intercept".into()));
        }
        let mut echelon: Vec<(usize, Vec<C>)> = Vec::new();
        for (j, col) in columns.iter().enumerate() {
            match reduce_against(&echelon, col) {
                Some(r) => echelon.push(r),
                None => {
                    let partner = (0..j).find(|&i| proportional(&columns[i], col));
                    let msg = match partner {
                        Some(i) => format!("{} is confounded with {}", labels[j], labels[i]),
                        None => format!("{} is a combination of earlier columns", labels[j]),
                    };
                    return Err(Error::Estimability(msg));
                }
            }
        }
        Ok(CovariateMatrix { n, columns, labels })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<C>] {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entry(&self, i: usize, j: usize) -> &C {
        &self.columns[j][i]
    }

    /// `A' y`, exactly.
    pub fn sufficient_statistic(&self, y: &[u64]) -> Vec<C> {
        self.columns
            .iter()
            .map(|c| {
                c.iter()
                    .zip(y)
                    .fold(C::zero(), |acc, (a, &v)| acc.plus(&a.times(&C::from_i64(v as i64))))
            })
            .collect()
    }

    /// Rational columns spanning the same row space: each column is split
    /// into its rational coordinates and a maximal independent subset is
    /// kept, intercept first.
    pub fn real_columns(&self) -> (Vec<Vec<Rational>>, Vec<String>) {
        let d = C::degree();
        let mut cols = Vec::new();
        let mut labels = Vec::new();
        for (col, label) in self.columns.iter().zip(&self.labels) {
            let coords: Vec<Vec<Rational>> = col.iter().map(Field::rational_coords).collect();
            for k in 0..d {
                cols.push(coords.iter().map(|c| c[k].clone()).collect::<Vec<_>>());
                labels.push(if d == 1 {
                    label.clone()
                } else if k == 0 {
                    format!("{label}[1]")
                } else if k == 1 {
                    format!("{label}[w]")
                } else {
                    format!("{label}[w^{k}]")
                });
            }
        }
        independent_columns(cols, labels)
    }
}

fn independent_columns(cols: Vec<Vec<Rational>>, labels: Vec<String>) -> (Vec<Vec<Rational>>, Vec<String>) {
    let mut echelon: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut out = Vec::new();
    let mut out_labels = Vec::new();
    for (col, label) in cols.into_iter().zip(labels) {
        if let Some(r) = reduce_against(&echelon, &col) {
            echelon.push(r);
            out.push(col);
            out_labels.push(label);
        }
    }
    (out, out_labels)
}

/// Reduces `v` by echelon rows `(pivot, row)` with unit pivots; returns the
/// normalized remainder with its pivot, or `None` when `v` is dependent.
fn reduce_against<C: Field>(echelon: &[(usize, Vec<C>)], v: &[C]) -> Option<(usize, Vec<C>)> {
    let mut r = v.to_vec();
    for (p, row) in echelon {
        if !r[*p].is_zero() {
            let c = r[*p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x = x.minus(&c.times(y));
            }
        }
    }
    let p = r.iter().position(|x| !x.is_zero())?;
    let inv = r[p].inverse().expect("nonzero pivot");
    for x in r.iter_mut() {
        *x = x.times(&inv);
    }
    Some((p, r))
}

fn proportional<C: Field>(a: &[C], b: &[C]) -> bool {
    let Some(p) = a.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if b[p].is_zero() {
        return false;
    }
    let c = b[p].times(&a[p].inverse().expect("nonzero"));
    a.iter().zip(b).all(|(x, y)| x.times(&c) == *y)
}

/// Columns of one model term.
fn term_columns<C: Field>(d: &Design, term: &Monomial, contrast: Contrast, names: &[String]) -> Result<Vec<(String, Vec<C>)>> {
    let s = d.s();
    let label = term.format_with(names);
    if term.is_one() {
        return Ok(vec![(label, vec![C::one(); d.n()])]);
    }
    if s == 2 || contrast == Contrast::Complex {
        // a single column of (products of) coded roots of unity
        let mut col = Vec::with_capacity(d.n());
        for run in d.runs() {
            let e: u64 = run
                .iter()
                .zip(term.exps())
                .map(|(&l, &a)| l as u64 * a as u64)
                .sum();
            let j = (e % s as u64) as u32;
            col.push(C::root_of_unity(s, j).ok_or_else(|| {
                Error::Coefficient(format!("complex contrasts for s={s} need the {s}-th roots of unity"))
            })?);
        }
        return Ok(vec![(label, col)]);
    }
    if !term.is_square_free() {
        return Err(Error::Input(format!(
            "term {label} has a power; only the complex contrast uses powers"
        )));
    }
    let factors: Vec<usize> = (0..d.m()).filter(|&i| term.exp(i) > 0).collect();
    let per_level = |level: u32, j: u32| -> Rational {
        match contrast {
            Contrast::Baseline => Rational::from(if level == j { 1 } else { 0 }),
            _ => {
                if level == j {
                    Rational::from(s as i64 - 1)
                } else if level == s - 1 {
                    Rational::from(-1)
                } else {
                    Rational::from(0)
                }
            }
        }
    };
    let mut out: Vec<(String, Vec<Rational>)> = vec![(String::new(), vec![Rational::from(1); d.n()])];
    for &f in &factors {
        let mut next = Vec::new();
        for (lab, col) in &out {
            for j in 0..s - 1 {
                let l = if lab.is_empty() {
                    format!("{}[{j}]", names[f])
                } else {
                    format!("{lab}*{}[{j}]", names[f])
                };
                let c: Vec<Rational> = col
                    .iter()
                    .zip(d.runs())
                    .map(|(v, run)| v * &per_level(run[f], j))
                    .collect();
                next.push((l, c));
            }
        }
        out = next;
    }
    Ok(out
        .into_iter()
        .map(|(l, c)| (l, c.iter().map(C::embed).collect()))
        .collect())
}

/// Covariate matrix of `model` on `d`. Two-level designs use the `+1/-1`
/// coding; for `s > 2` the model's contrast decides the columns.
pub fn build_covariate_matrix<C: Field>(d: &Design, model: &Model) -> Result<CovariateMatrix<C>> {
    if model.m() != d.m() {
        return Err(Error::Dimension {
            expected: d.m(),
            found: model.m(),
        });
    }
    let names = default_names("x", d.m());
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for t in model.terms() {
        for (l, c) in term_columns::<C>(d, t, model.contrast(), &names)? {
            labels.push(l);
            columns.push(c);
        }
    }
    CovariateMatrix::new(columns, labels)
}

/// Nonnegative integer matrix with the same fibers as a covariate matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    n: usize,
    columns: Vec<Vec<i64>>,
    labels: Vec<String>,
}

impl IntegerMatrix {
    pub fn new(columns: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if n == 0 || columns.iter().any(|c| c.len() != n) || labels.len() != columns.len() {
            return Err(Error::Input("ragged integer matrix".into()));
        }
        Ok(IntegerMatrix { n, columns, labels })
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.columns.iter().flatten().all(|&v| v >= 0)
    }

    /// `A' y`.
    pub fn apply(&self, y: &[i64]) -> Vec<i64> {
        self.columns
            .iter()
            .map(|c| c.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sufficient_statistic(&self, y: &[u64]) -> Vec<i64> {
        let y: Vec<i64> = y.iter().map(|&v| v as i64).collect();
        self.apply(&y)
    }
}

/// Integer recoding: columns are realified, scaled to integers, shifted
/// to start at 0 and divided by their content. The intercept stays a
/// column of ones, and the row space (hence every fiber) is unchanged.
pub fn recode_integer<C: Field>(a: &CovariateMatrix<C>) -> Result<IntegerMatrix> {
    let (cols, labels) = a.real_columns();
    if !cols.iter().any(|c| c.iter().all(Rational::is_one)) {
        return Err(Error::Recoding("no intercept column".into()));
    }
    let mut out = Vec::with_capacity(cols.len());
    for col in &cols {
        if col.iter().all(Rational::is_one) {
            out.push(vec![1i64; col.len()]);
            continue;
        }
        let l = denominator_lcm(col.iter());
        let ints: Vec<BigInt> = col
            .iter()
            .map(|q| q.numer() * (&l / q.denom()))
            .collect();
        let min = ints.iter().min().cloned().expect("nonempty column");
        let shifted: Vec<BigInt> = ints.iter().map(|v| v - &min).collect();
        let g = shifted.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        if g.is_zero() {
            return Err(Error::Recoding("constant column besides the intercept".into()));
        }
        let col: Vec<i64> = shifted
            .iter()
            .map(|v| (v / &g).abs().to_i64())
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Recoding("recoded entries overflow 64 bits".into()))?;
        out.push(col);
    }
    IntegerMatrix::new(out, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Cyclotomic;
    use crate::design::Coding;
    use crate::fixtures;

    #[test]
    fn model_file_round_trip() {
        let m = Model::parse("x1\nx1*x2 # interaction\ncontrast=symmetric\n", 3).unwrap();
        assert_eq!(m.terms().len(), 3);
        assert!(m.terms()[0].is_one());
        assert_eq!(m.contrast(), Contrast::Symmetric);
        assert_eq!(Model::parse(&m.to_text(), 3).unwrap(), m);
        assert!(matches!(Model::parse("x1\nx9\n", 3), Err(Error::Parse { line: 2, .. })));
        assert!(Model::parse("x1\nx1\n", 3).is_err());
    }

    #[test]
    fn three_level_columns() {
        let d = fixtures::design_3_3_1(Coding::IntegerLevels);
        let base = build_covariate_matrix::<Rational>(&d, &Model::main_effects(3, Contrast::Baseline)).unwrap();
        let col = |a: &CovariateMatrix<Rational>, j: usize| -> Vec<i64> {
            a.columns()[j].iter().map(|v| v.to_i64().unwrap()).collect()
        };
        assert_eq!(col(&base, 1), [1, 1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(col(&base, 2), [0, 0, 0, 1, 1, 1, 0, 0, 0]);
        let sym = build_covariate_matrix::<Rational>(&d, &Model::main_effects(3, Contrast::Symmetric)).unwrap();
        assert_eq!(col(&sym, 1), [2, 2, 2, 0, 0, 0, -1, -1, -1]);
        assert_eq!(col(&sym, 2), [0, 0, 0, 2, 2, 2, -1, -1, -1]);
        assert_eq!(sym.ncols(), 7);
    }

    #[test]
    fn complex_columns_and_recoding() {
        let d = fixtures::design_3_3_1(Coding::ComplexRoots);
        let a = build_covariate_matrix::<Cyclotomic<3>>(&d, &Model::main_effects(3, Contrast::Complex)).unwrap();
        assert_eq!(a.ncols(), 4);
        assert_eq!(a.entry(1, 3), &Cyclotomic::<3>::root(2));
        let r = recode_integer(&a).unwrap();
        assert_eq!(r.ncols(), 7);
        assert!(r.is_nonnegative());
    }

    #[test]
    fn pm1_column_recodes_to_01() {
        let d = Design::full_factorial(2);
        let a = build_covariate_matrix::<Rational>(&d, &Model::main_effects(2, Contrast::Baseline)).unwrap();
        let r = recode_integer(&a).unwrap();
        assert_eq!(r.columns()[0], vec![1; 4]);
        assert_eq!(r.columns()[1], vec![1, 1, 0, 0]);
        assert_eq!(r.columns()[2], vec![1, 0, 1, 0]);
    }

    #[test]
    fn missing_intercept_is_recoding_error() {
        let a = CovariateMatrix {
            n: 2,
            columns: vec![vec![Rational::from(1), Rational::from(2)]],
            labels: vec!["z".into()],
        };
        assert!(matches!(recode_integer(&a), Err(Error::Recoding(_))));
    }

    #[test]
    fn confounded_terms_rejected() {
        let d = fixtures::design_2_7_3();
        let x = |vars: &[usize]| Monomial::from_mask(7, vars.iter().fold(0, |a, v| a | (1 << (v - 1))));
        let model = Model::main_effects(7, Contrast::Baseline).with_term(x(&[1, 2])).unwrap();
        assert!(build_covariate_matrix::<Rational>(&d, &model).is_ok());
        let both = model.with_term(x(&[4, 5])).unwrap();
        match build_covariate_matrix::<Rational>(&d, &both) {
            Err(Error::Estimability(msg)) => assert!(msg.contains("x4*x5") && msg.contains("x1*x2"), "{msg}"),
            other => panic!("expected estimability error, got {other:?}"),
        }
    }
}
