//! Markov bases from toric ideals, and exhaustive fiber enumeration.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::conditional::covariate::IntegerMatrix;
use crate::error::{Error, Result};
use crate::field::{Field, Rational};
use crate::groebner::{buchberger, eliminate, BuchbergerOptions, IdealPresentation};
use crate::monomial::{default_names, Monomial};
use crate::order::{OrderKind, TermOrder};
use crate::poly::Polynomial;

/// Integer moves `z` with `A' z = 0`, stored up to sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovBasis {
    pub n: usize,
    pub moves: Vec<Vec<i64>>,
}

impl MarkovBasis {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Markov basis of a nonnegative integer matrix, read off the reduced
/// Gröbner basis of its toric ideal.
///
/// The toric ideal is computed by eliminating `t` and an auxiliary `w`
/// from `<p_i - t^{a_i}, w * prod(t) * prod(p) - 1>`.
pub fn markov_basis(a: &IntegerMatrix, opts: &BuchbergerOptions) -> Result<MarkovBasis> {
    if !a.is_nonnegative() {
        return Err(Error::Input("toric ideal needs a nonnegative matrix".into()));
    }
    let n = a.nrows();
    let nu = a.ncols();
    let total = n + nu + 1;
    let w = n + nu;
    let mut gens = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut exps = vec![0u32; total];
        for (k, &v) in a.row(i).iter().enumerate() {
            exps[n + k] = u32::try_from(v).map_err(|_| Error::Input("matrix entry too large".into()))?;
        }
        gens.push(&Polynomial::var(total, i) - &Polynomial::term(Monomial::new(exps), Rational::one()));
    }
    gens.push(&Polynomial::term(Monomial::new(vec![1; total]), Rational::one()) - &Polynomial::one(total));
    let mut names = default_names("p", n);
    names.extend(default_names("t", nu));
    names.push("w".into());
    let drop: Vec<usize> = (n..=w).collect();
    let order = TermOrder::elimination(total, drop.clone(), OrderKind::GrevLex, &TermOrder::grevlex(n))?;
    let gb = buchberger(&IdealPresentation::new(gens, names.clone())?, &order, opts).map_err(|e| match e {
        Error::Budget(msg) => Error::Budget(format!(
            "{msg} while computing the toric ideal; use exact enumeration for small problems"
        )),
        other => other,
    })?;
    let toric = eliminate(&gb, &drop, &names)?;
    let mut moves = Vec::with_capacity(toric.generators.len());
    for g in &toric.generators {
        let z = binomial_move(g)?;
        if a.apply(&z).iter().any(|&v| v != 0) {
            return Err(Error::Input("toric generator outside the kernel".into()));
        }
        moves.push(z);
    }
    Ok(MarkovBasis { n, moves })
}

fn binomial_move(g: &Polynomial<Rational>) -> Result<Vec<i64>> {
    let terms: Vec<(&Monomial, &Rational)> = g.terms().collect();
    let bad = || Error::Input("toric generator is not a pure difference binomial".into());
    let [(u, cu), (v, cv)] = terms[..] else {
        return Err(bad());
    };
    if !(cu.plus(cv)).is_zero() {
        return Err(bad());
    }
    let sign = if cu.is_positive() { 1 } else { -1 };
    Ok(u.exps()
        .iter()
        .zip(v.exps())
        .map(|(&a, &b)| sign * (a as i64 - b as i64))
        .collect())
}

/// Limits for [`enumerate_fiber`].
#[derive(Clone, Debug)]
pub struct FiberCaps {
    pub max_total: u64,
    pub max_runs: usize,
    pub max_points: usize,
}

impl Default for FiberCaps {
    fn default() -> Self {
        FiberCaps {
            max_total: 30,
            max_runs: 16,
            max_points: 2_000_000,
        }
    }
}

/// Every `y >= 0` with `A' y = A' y0`, in lexicographic order.
pub fn enumerate_fiber(a: &IntegerMatrix, y0: &[u64], caps: &FiberCaps) -> Result<Vec<Vec<u64>>> {
    let n = a.nrows();
    if y0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: y0.len(),
        });
    }
    if !a.is_nonnegative() || !a.columns().iter().any(|c| c.iter().all(|&v| v == 1)) {
        return Err(Error::Input("fiber enumeration needs a nonnegative matrix with an intercept".into()));
    }
    let total: u64 = y0.iter().sum();
    if total > caps.max_total || n > caps.max_runs {
        return Err(Error::Scale(format!(
            "fiber with total {total} over {n} runs exceeds enumeration caps (total {}, runs {})",
            caps.max_total, caps.max_runs
        )));
    }
    let rows: Vec<Vec<i64>> = (0..n).map(|i| a.row(i)).collect();
    // later[k][c]: some run at index >= k has a positive entry in column c
    let mut later = vec![vec![false; a.ncols()]; n + 1];
    for k in (0..n).rev() {
        for c in 0..a.ncols() {
            later[k][c] = later[k + 1][c] || rows[k][c] > 0;
        }
    }
    let target = a.sufficient_statistic(y0);
    let mut out = Vec::new();
    let mut y = vec![0u64; n];
    fiber_dfs(0, &rows, &later, target, &mut y, &mut out, caps.max_points)?;
    Ok(out)
}

fn fiber_dfs(
    k: usize,
    rows: &[Vec<i64>],
    later: &[Vec<bool>],
    rest: Vec<i64>,
    y: &mut [u64],
    out: &mut Vec<Vec<u64>>,
    max_points: usize,
) -> Result<()> {
    if rest.iter().zip(&later[k]).any(|(&b, &l)| b < 0 || (b > 0 && !l)) {
        return Ok(());
    }
    if k == rows.len() {
        if out.len() >= max_points {
            return Err(Error::Scale(format!("fiber has more than {max_points} points")));
        }
        out.push(y.to_vec());
        return Ok(());
    }
    let bound = rows[k]
        .iter()
        .zip(&rest)
        .filter(|(&a, _)| a > 0)
        .map(|(&a, &b)| b / a)
        .min()
        .unwrap_or(0);
    for v in 0..=bound {
        y[k] = v as u64;
        let next: Vec<i64> = rest.iter().zip(&rows[k]).map(|(&b, &a)| b - a * v).collect();
        fiber_dfs(k + 1, rows, later, next, y, out, max_points)?;
    }
    y[k] = 0;
    Ok(())
}

/// States reachable from `y0` by moves `±z` without leaving `y >= 0`.
pub fn reachable(y0: &[u64], basis: &MarkovBasis, limit: usize) -> Result<BTreeSet<Vec<u64>>> {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(y0.to_vec());
    queue.push_back(y0.to_vec());
    while let Some(y) = queue.pop_front() {
        for z in &basis.moves {
            for sign in [1i64, -1] {
                if let Some(next) = apply_move(&y, z, sign) {
                    if seen.insert(next.clone()) {
                        if seen.len() > limit {
                            return Err(Error::Scale(format!("more than {limit} reachable states")));
                        }
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `y + sign * z` when it stays nonnegative.
pub fn apply_move(y: &[u64], z: &[i64], sign: i64) -> Option<Vec<u64>> {
    y.iter()
        .zip(z)
        .map(|(&v, &d)| u64::try_from(v as i64 + sign * d).ok())
        .collect()
}
