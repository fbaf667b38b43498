//! Poisson log-linear fits by iteratively reweighted least squares, and
//! goodness-of-fit statistics.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Rational;

pub const SCORE_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;

/// Fitted null model: `log mu = X beta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlmFit {
    pub beta: Vec<f64>,
    pub mu: Vec<f64>,
    pub converged: bool,
    /// Some fitted mean is numerically zero: the observed margins lie on
    /// the boundary of the feasible cone.
    pub boundary: bool,
    pub iterations: usize,
    /// `max |X'(y - mu)|` at the returned fit.
    pub score_residual: f64,
}

fn deviance(y: &[f64], mu: &[f64]) -> f64 {
    2.0 * y
        .iter()
        .zip(mu)
        .map(|(&y, &m)| if y > 0.0 { y * (y / m).ln() - (y - m) } else { m })
        .sum::<f64>()
}

/// Poisson maximum likelihood for columns `x` (the first being all ones)
/// and counts `y`.
pub fn fit_poisson(x: &[Vec<Rational>], y: &[u64]) -> Result<GlmFit> {
    let n = y.len();
    let p = x.len();
    if x.iter().any(|c| c.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            found: x.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
        });
    }
    let xm = DMatrix::from_fn(n, p, |i, j| x[j][i].to_f64());
    let yv = DVector::from_iterator(n, y.iter().map(|&v| v as f64));
    let total: f64 = yv.sum();
    if total == 0.0 {
        return Err(Error::Convergence("all counts are zero".into()));
    }
    let score_scale = 1.0 + (xm.transpose() * &yv).amax();

    // start from the intercept-only fit
    let mut beta = DVector::zeros(p);
    beta[0] = (total / n as f64).ln();
    let mut eta = &xm * &beta;
    let mut mu: DVector<f64> = eta.map(f64::exp);
    let ys: Vec<f64> = yv.iter().copied().collect();
    let mut dev = deviance(&ys, mu.as_slice());
    let mut iterations = 0;
    let mut score = (xm.transpose() * (&yv - &mu)).amax();
    while score > SCORE_TOLERANCE * score_scale {
        if iterations == MAX_ITERATIONS {
            return Err(Error::Convergence(format!(
                "no convergence in {MAX_ITERATIONS} iterations (score {score:.3e}); the observed margins may lie on the boundary"
            )));
        }
        iterations += 1;
        let w = mu.clone();
        let z = &eta + (&yv - &mu).component_div(&mu);
        let xtw = DMatrix::from_fn(p, n, |j, i| xm[(i, j)] * w[i]);
        let lhs = &xtw * &xm;
        let rhs = &xtw * &z;
        let target = lhs
            .clone()
            .cholesky()
            .map(|c| c.solve(&rhs))
            .or_else(|| lhs.lu().solve(&rhs))
            .ok_or_else(|| Error::Convergence("singular weighted normal equations".into()))?;
        // step-halving on the deviance
        let mut step = 1.0;
        loop {
            let cand = &beta + (&target - &beta) * step;
            let cand_eta = &xm * &cand;
            let cand_mu = cand_eta.map(f64::exp);
            let cand_dev = deviance(&ys, cand_mu.as_slice());
            if cand_dev.is_finite() && (cand_dev <= dev + 1e-9 * (1.0 + dev) || step < 1e-10) {
                beta = cand;
                eta = cand_eta;
                mu = cand_mu;
                dev = cand_dev;
                break;
            }
            step /= 2.0;
        }
        score = (xm.transpose() * (&yv - &mu)).amax();
    }
    let boundary = mu.iter().any(|&m| m < 1e-8 * total / n as f64);
    Ok(GlmFit {
        beta: beta.iter().copied().collect(),
        mu: mu.iter().copied().collect(),
        converged: true,
        boundary,
        iterations,
        score_residual: score,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    Deviance,
    Pearson,
}

impl StatisticKind {
    pub fn name(self) -> &'static str {
        match self {
            StatisticKind::Deviance => "deviance",
            StatisticKind::Pearson => "pearson",
        }
    }
}

impl FromStr for StatisticKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deviance" => Ok(StatisticKind::Deviance),
            "pearson" => Ok(StatisticKind::Pearson),
            _ => Err(Error::Input(format!("unknown statistic {s:?}"))),
        }
    }
}

/// Deviance `2 sum [y log(y/mu) - (y - mu)]` or Pearson `sum (y - mu)^2 / mu`.
/// A zero mean under a positive count gives infinity.
pub fn test_statistic(kind: StatisticKind, y: &[u64], mu: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(&y, &m)| {
            let y = y as f64;
            if m <= 0.0 {
                return if y > 0.0 { f64::INFINITY } else { 0.0 };
            }
            match kind {
                StatisticKind::Pearson => (y - m) * (y - m) / m,
                StatisticKind::Deviance => {
                    let log_term = if y > 0.0 { y * (y / m).ln() } else { 0.0 };
                    2.0 * (log_term - (y - m))
                }
            }
        })
        .sum()
}
