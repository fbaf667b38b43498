//! D-optimal two-level designs for the main-effect model, by exhaustive
//! enumeration or seeded greedy exchange, with each optimum classified.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{point_from_code, Coding, Design};
use crate::error::{Error, Result};
use crate::indicator::{classify_design, ClassTag, DesignClass};

/// Largest number of subsets the exhaustive mode will visit.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// `det(X'X)` for `X = [1 | x_1 ... x_m]`, exactly.
pub fn d_criterion(d: &Design) -> Result<BigInt> {
    let signs = d.signs()?;
    Ok(det_of_rows(&signs))
}

fn information_matrix(rows: &[Vec<i32>]) -> Vec<Vec<i64>> {
    let p = rows.first().map_or(0, |r| r.len()) + 1;
    let mut m = vec![vec![0i64; p]; p];
    for r in rows {
        let full: Vec<i64> = std::iter::once(1).chain(r.iter().map(|&v| v as i64)).collect();
        for i in 0..p {
            for j in 0..p {
                m[i][j] += full[i] * full[j];
            }
        }
    }
    m
}

fn det_of_rows(rows: &[Vec<i32>]) -> BigInt {
    let m = information_matrix(rows);
    match bareiss_i128(&m) {
        Some(v) => BigInt::from(v),
        None => bareiss_big(&m),
    }
}

/// Fraction-free elimination; `None` on overflow.
fn bareiss_i128(m: &[Vec<i64>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Some(0);
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    Some(sign * a[n - 1][n - 1])
}

fn bareiss_big(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    GreedyExchange { restarts: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub m: usize,
    pub n: usize,
    pub mode: SearchMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub spec: SearchSpec,
    pub optimum: BigInt,
    /// Optimal designs found, runs in standard order, sorted.
    pub designs: Vec<Design>,
    pub classes: Vec<DesignClass>,
    /// Candidate designs whose criterion was evaluated.
    pub evaluated: u64,
}

impl SearchResult {
    pub fn histogram(&self) -> BTreeMap<&'static str, usize> {
        let mut h = BTreeMap::new();
        for c in &self.classes {
            *h.entry(c.tag.name()).or_insert(0) += 1;
        }
        h
    }

    pub fn all_affinely_full_dimensional(&self) -> bool {
        self.classes.iter().all(|c| c.tag == ClassTag::AffinelyFullDimensional)
    }
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn candidates(m: usize) -> Vec<Vec<i32>> {
    (0..1u64 << m)
        .map(|k| point_from_code(m, k).iter().map(|&l| if l == 0 { 1 } else { -1 }).collect())
        .collect()
}

fn design_of(m: usize, pool: &[Vec<i32>], idx: &[usize]) -> Design {
    let rows: Vec<Vec<u32>> = idx
        .iter()
        .map(|&i| pool[i].iter().map(|&v| if v == 1 { 0 } else { 1 }).collect())
        .collect();
    Design::new(m, 2, Coding::PlusMinusOne, rows).expect("distinct candidates")
}

pub fn d_optimal_search(spec: &SearchSpec) -> Result<SearchResult> {
    let (m, n) = (spec.m, spec.n);
    if m == 0 || m > 16 {
        return Err(Error::Input(format!("factor count {m} outside 1..=16")));
    }
    if n == 0 || n > 1usize << m {
        return Err(Error::Input(format!("run count {n} outside 1..={}", 1usize << m)));
    }
    let pool = candidates(m);
    let (optimum, mut found, evaluated) = match spec.mode {
        SearchMode::Exhaustive => {
            let count = binomial(pool.len() as u128, n as u128);
            if count > EXHAUSTIVE_LIMIT {
                return Err(Error::Scale(format!(
                    "exhaustive search over {count} subsets exceeds {EXHAUSTIVE_LIMIT}; use greedy exchange"
                )));
            }
            exhaustive(&pool, n)
        }
        SearchMode::GreedyExchange { restarts, seed } => greedy(&pool, n, restarts.max(1), seed),
    };
    found.sort();
    found.dedup();
    let designs: Vec<Design> = found.iter().map(|idx| design_of(m, &pool, idx)).collect();
    let classes = designs.iter().map(classify_design).collect::<Result<Vec<_>>>()?;
    Ok(SearchResult {
        spec: spec.clone(),
        optimum,
        designs,
        classes,
        evaluated,
    })
}

/// Every `n`-subset; workers split on the first chosen index.
fn exhaustive(pool: &[Vec<i32>], n: usize) -> (BigInt, Vec<Vec<usize>>, u64) {
    let workers = std::thread::available_parallelism().map_or(1, |v| v.get()).min(pool.len());
    let parts: Vec<(BigInt, Vec<Vec<usize>>, u64)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || exhaustive_part(pool, n, w, workers)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker")).collect()
    });
    let best = parts.iter().map(|p| p.0.clone()).max().unwrap_or_else(BigInt::zero);
    let mut found = Vec::new();
    let mut evaluated = 0;
    for (v, combos, e) in parts {
        evaluated += e;
        if v == best {
            found.extend(combos);
        }
    }
    (best, found, evaluated)
}

fn exhaustive_part(pool: &[Vec<i32>], n: usize, worker: usize, workers: usize) -> (BigInt, Vec<Vec<usize>>, u64) {
    let mut best = BigInt::from(-1);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut evaluated = 0u64;
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    for first in (worker..pool.len()).step_by(workers) {
        idx.clear();
        idx.push(first);
        combos_from(pool, n, &mut idx, &mut |idx| {
            evaluated += 1;
            let rows: Vec<Vec<i32>> = idx.iter().map(|&i| pool[i].clone()).collect();
            let v = det_of_rows(&rows);
            if v > best {
                best = v;
                found.clear();
                found.push(idx.to_vec());
            } else if v == best {
                found.push(idx.to_vec());
            }
        });
    }
    (best, found, evaluated)
}

fn combos_from(pool: &[Vec<i32>], n: usize, idx: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if idx.len() == n {
        visit(idx);
        return;
    }
    let start = idx.last().map_or(0, |&l| l + 1);
    let need = n - idx.len();
    for i in start..=pool.len().saturating_sub(need) {
        idx.push(i);
        combos_from(pool, n, idx, visit);
        idx.pop();
    }
}

/// Best-improvement row exchange from random starts.
fn greedy(pool: &[Vec<i32>], n: usize, restarts: usize, seed: u64) -> (BigInt, Vec<Vec<usize>>, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = BigInt::from(-1);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut evaluated = 0u64;
    let eval = |idx: &[usize]| det_of_rows(&idx.iter().map(|&i| pool[i].clone()).collect::<Vec<_>>());
    for _ in 0..restarts {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        for i in 0..n {
            let j = rng.random_range(i..order.len());
            order.swap(i, j);
        }
        let mut cur: Vec<usize> = order[..n].to_vec();
        let mut value = eval(&cur);
        evaluated += 1;
        loop {
            let mut step: Option<(usize, usize, BigInt)> = None;
            for pos in 0..n {
                for cand in 0..pool.len() {
                    if cur.contains(&cand) {
                        continue;
                    }
                    let mut trial = cur.clone();
                    trial[pos] = cand;
                    let v = eval(&trial);
                    evaluated += 1;
                    let better = match &step {
                        Some((_, _, b)) => v > *b,
                        None => v > value,
                    };
                    if better {
                        step = Some((pos, cand, v));
                    }
                }
            }
            match step {
                Some((pos, cand, v)) => {
                    cur[pos] = cand;
                    value = v;
                }
                None => break,
            }
        }
        cur.sort();
        if value > best {
            best = value;
            found = vec![cur];
        } else if value == best {
            found.push(cur);
        }
    }
    (best, found, evaluated)
}

/// Exhaustive optimum for the main-effect model with `n` runs (default
/// `m + 1`), for reporting how the optima classify.
pub fn conjecture_probe(m: usize, n: Option<usize>) -> Result<SearchResult> {
    d_optimal_search(&SearchSpec {
        m,
        n: n.unwrap_or(m + 1),
        mode: SearchMode::Exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn criterion_values() {
        assert_eq!(d_criterion(&Design::full_factorial(2)).unwrap(), BigInt::from(64));
        assert_eq!(d_criterion(&fixtures::f1()).unwrap(), BigInt::from(256));
        assert_eq!(d_criterion(&fixtures::f2()).unwrap(), BigInt::zero());
    }

    #[test]
    fn bareiss_agrees_with_bigint_path() {
        let m = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        assert_eq!(bareiss_i128(&m), Some(4));
        assert_eq!(bareiss_big(&m), BigInt::from(4));
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(bareiss_i128(&swap), Some(-1));
        assert_eq!(bareiss_big(&swap), BigInt::from(-1));
    }

    #[test]
    fn small_exhaustive_searches() {
        let r = d_optimal_search(&SearchSpec { m: 2, n: 4, mode: SearchMode::Exhaustive }).unwrap();
        assert_eq!(r.optimum, BigInt::from(64));
        assert_eq!(r.designs.len(), 1);
        let r = d_optimal_search(&SearchSpec { m: 3, n: 4, mode: SearchMode::Exhaustive }).unwrap();
        assert_eq!(r.optimum, BigInt::from(256));
        assert_eq!(r.designs.len(), 2);
        assert!(r.classes.iter().all(|c| c.tag == ClassTag::Regular));
        assert_eq!(r.evaluated, 70);
    }

    #[test]
    fn exhaustive_cap() {
        let r = d_optimal_search(&SearchSpec { m: 6, n: 12, mode: SearchMode::Exhaustive });
        assert!(matches!(r, Err(Error::Scale(_))));
    }

    #[test]
    fn greedy_is_deterministic() {
        let spec = SearchSpec { m: 3, n: 4, mode: SearchMode::GreedyExchange { restarts: 5, seed: 1 } };
        let a = d_optimal_search(&spec).unwrap();
        assert_eq!(a, d_optimal_search(&spec).unwrap());
        assert!(a.optimum <= BigInt::from(256));
    }
}
