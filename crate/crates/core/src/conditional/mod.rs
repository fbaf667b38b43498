//! Conditional goodness-of-fit tests for Poisson log-linear models on
//! designed experiments.

pub mod covariate;
pub mod glm;
pub mod markov;
pub mod sampler;

pub use covariate::{build_covariate_matrix, recode_integer, Contrast, CovariateMatrix, IntegerMatrix, Model};
pub use glm::{test_statistic, GlmFit, StatisticKind};
pub use markov::{enumerate_fiber, markov_basis, FiberCaps, MarkovBasis};
pub use sampler::{exact_p_value, mh_sample, ChainConfig, Method, MhChain, TestResult};

use crate::error::Result;
use crate::field::Field;

/// Poisson fit of the null model with the realified columns of `a`.
pub fn fit_null_glm<C: Field>(a: &CovariateMatrix<C>, y0: &[u64]) -> Result<GlmFit> {
    let (cols, _) = a.real_columns();
    glm::fit_poisson(&cols, y0)
}

/// Counts file: `n` nonnegative integers separated by whitespace.
pub fn parse_counts(text: &str, n: usize) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(n);
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let v = tok
                .parse::<u64>()
                .map_err(|_| crate::error::Error::parse(i + 1, format!("{tok:?} is not a nonnegative integer")))?;
            out.push(v);
        }
    }
    if out.len() != n {
        return Err(crate::error::Error::Input(format!("expected {n} counts, found {}", out.len())));
    }
    Ok(out)
}
