//! Metropolis-Hastings sampling of the conditional Poisson law on a fiber,
//! and the exact p-value by enumeration.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conditional::covariate::IntegerMatrix;
use crate::conditional::glm::{fit_poisson, test_statistic, GlmFit, StatisticKind};
use crate::conditional::markov::{apply_move, enumerate_fiber, FiberCaps, MarkovBasis};
use crate::error::{Error, Result};
use crate::field::{Field, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainConfig {
    pub seed: u64,
    pub burn_in: usize,
    pub samples: usize,
    /// Steps between recorded samples; 0 and 1 both record every step.
    pub thinning: usize,
    /// Independent chains, pooled. Chain `i` is seeded with `splitmix64(seed + i)`.
    pub chains: usize,
}

impl ChainConfig {
    pub fn new(seed: u64) -> Self {
        ChainConfig {
            seed,
            burn_in: 10_000,
            samples: 100_000,
            thinning: 1,
            chains: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Input("samples must be at least 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::Input("chains must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mcmc,
    ExactEnumeration,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mcmc => "mcmc",
            Method::ExactEnumeration => "exact-enumeration",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestResult {
    pub method: Method,
    pub kind: StatisticKind,
    pub statistic: f64,
    pub p_value: f64,
    pub std_error: f64,
    /// Recorded samples (MCMC) or fiber points (exact).
    pub samples: usize,
    pub acceptance_rate: Option<f64>,
    pub p_exact: Option<Rational>,
}

/// One Metropolis-Hastings chain targeting `pi(y) ∝ prod 1/y_i!` with
/// proposals `y ± z`, `z` and the sign drawn uniformly.
pub struct MhChain<'a> {
    state: Vec<u64>,
    moves: &'a [Vec<i64>],
    rng: ChaCha8Rng,
    ln_fact: Vec<f64>,
    pub proposals: u64,
    pub accepted: u64,
}

impl<'a> MhChain<'a> {
    pub fn new(y0: &[u64], basis: &'a MarkovBasis, seed: u64) -> Self {
        let total: u64 = y0.iter().sum();
        let mut ln_fact = vec![0.0; total as usize + 2];
        for k in 1..ln_fact.len() {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        MhChain {
            state: y0.to_vec(),
            moves: &basis.moves,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ln_fact,
            proposals: 0,
            accepted: 0,
        }
    }

    pub fn state(&self) -> &[u64] {
        &self.state
    }

    fn ln_fact(&mut self, k: u64) -> f64 {
        let k = k as usize;
        while self.ln_fact.len() <= k {
            let j = self.ln_fact.len();
            let next = self.ln_fact[j - 1] + (j as f64).ln();
            self.ln_fact.push(next);
        }
        self.ln_fact[k]
    }

    pub fn step(&mut self) {
        if self.moves.is_empty() {
            return;
        }
        self.proposals += 1;
        let k = self.rng.random_range(0..self.moves.len());
        let sign = if self.rng.random::<bool>() { 1 } else { -1 };
        let Some(next) = apply_move(&self.state, &self.moves[k], sign) else {
            return;
        };
        let mut log_ratio = 0.0;
        for i in 0..next.len() {
            let (a, b) = (self.state[i], next[i]);
            if a != b {
                log_ratio += self.ln_fact(a) - self.ln_fact(b);
            }
        }
        if log_ratio >= 0.0 || self.rng.random::<f64>() < log_ratio.exp() {
            self.state = next;
            self.accepted += 1;
        }
    }
}

fn at_least(t: f64, t0: f64) -> bool {
    t >= t0 - 1e-9 * t0.abs().max(1.0)
}

struct ChainOutcome {
    hits: u64,
    batch_means: Vec<f64>,
    proposals: u64,
    accepted: u64,
}

fn run_chain(y0: &[u64], basis: &MarkovBasis, mu: &[f64], kind: StatisticKind, t0: f64, cfg: &ChainConfig, seed: u64) -> ChainOutcome {
    let mut chain = MhChain::new(y0, basis, seed);
    for _ in 0..cfg.burn_in {
        chain.step();
    }
    let thin = cfg.thinning.max(1);
    let batches = cfg.samples.clamp(1, 50);
    let per_batch = cfg.samples / batches;
    let mut hits = 0u64;
    let mut batch_means = Vec::with_capacity(batches);
    let mut batch_hits = 0u64;
    let mut in_batch = 0usize;
    for _ in 0..cfg.samples {
        for _ in 0..thin {
            chain.step();
        }
        if at_least(test_statistic(kind, chain.state(), mu), t0) {
            hits += 1;
            batch_hits += 1;
        }
        in_batch += 1;
        if in_batch == per_batch && batch_means.len() < batches {
            batch_means.push(batch_hits as f64 / per_batch as f64);
            batch_hits = 0;
            in_batch = 0;
        }
    }
    ChainOutcome {
        hits,
        batch_means,
        proposals: chain.proposals,
        accepted: chain.accepted,
    }
}

/// Monte Carlo conditional test. The null fit is computed once from `y0`
/// since it depends on the data only through `A' y0`.
pub fn mh_sample(
    a: &IntegerMatrix,
    y0: &[u64],
    basis: &MarkovBasis,
    kind: StatisticKind,
    cfg: &ChainConfig,
) -> Result<TestResult> {
    cfg.validate()?;
    check_counts(a, y0)?;
    let fit = fit_integer(a, y0)?;
    let t0 = test_statistic(kind, y0, &fit.mu);
    if basis.is_empty() {
        return Ok(TestResult {
            method: Method::Mcmc,
            kind,
            statistic: t0,
            p_value: 1.0,
            std_error: 0.0,
            samples: 0,
            acceptance_rate: None,
            p_exact: None,
        });
    }
    let seeds: Vec<u64> = (0..cfg.chains as u64).map(|i| splitmix64(cfg.seed.wrapping_add(i))).collect();
    let outcomes: Vec<ChainOutcome> = if seeds.len() == 1 {
        vec![run_chain(y0, basis, &fit.mu, kind, t0, cfg, seeds[0])]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&seed| {
                    let mu = &fit.mu;
                    s.spawn(move || run_chain(y0, basis, mu, kind, t0, cfg, seed))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
        })
    };
    let total = (cfg.samples * cfg.chains) as f64;
    let hits: u64 = outcomes.iter().map(|o| o.hits).sum();
    let means: Vec<f64> = outcomes.iter().flat_map(|o| o.batch_means.iter().copied()).collect();
    let std_error = if means.len() > 1 {
        let k = means.len() as f64;
        let avg = means.iter().sum::<f64>() / k;
        let var = means.iter().map(|m| (m - avg) * (m - avg)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    let proposals: u64 = outcomes.iter().map(|o| o.proposals).sum();
    let accepted: u64 = outcomes.iter().map(|o| o.accepted).sum();
    Ok(TestResult {
        method: Method::Mcmc,
        kind,
        statistic: t0,
        p_value: hits as f64 / total,
        std_error,
        samples: total as usize,
        acceptance_rate: Some(if proposals == 0 { 0.0 } else { accepted as f64 / proposals as f64 }),
        p_exact: None,
    })
}

/// Conditional law on the fiber: `(point, probability)`.
pub fn fiber_distribution(a: &IntegerMatrix, y0: &[u64], caps: &FiberCaps) -> Result<Vec<(Vec<u64>, Rational)>> {
    let fiber = enumerate_fiber(a, y0, caps)?;
    let total: u64 = y0.iter().sum();
    let mut fact = vec![BigInt::from(1)];
    for k in 1..=total {
        let next = &fact[k as usize - 1] * BigInt::from(k);
        fact.push(next);
    }
    let weights: Vec<Rational> = fiber
        .iter()
        .map(|y| {
            let d = y.iter().fold(BigInt::from(1), |acc, &v| acc * &fact[v as usize]);
            Rational::new(1, d)
        })
        .collect();
    let z = weights.iter().fold(Rational::zero(), |acc, w| acc.plus(w));
    let zinv = z.inverse().expect("nonempty fiber");
    Ok(fiber.into_iter().zip(weights).map(|(y, w)| (y, w.times(&zinv))).collect())
}

/// `p = sum of pi(y) over y with T(y) >= T(y0)`, by full enumeration.
pub fn exact_p_value(a: &IntegerMatrix, y0: &[u64], kind: StatisticKind, caps: &FiberCaps) -> Result<TestResult> {
    check_counts(a, y0)?;
    let fit = fit_integer(a, y0)?;
    let t0 = test_statistic(kind, y0, &fit.mu);
    let law = fiber_distribution(a, y0, caps)?;
    let p = law
        .iter()
        .filter(|(y, _)| at_least(test_statistic(kind, y, &fit.mu), t0))
        .fold(Rational::zero(), |acc, (_, w)| acc.plus(w));
    Ok(TestResult {
        method: Method::ExactEnumeration,
        kind,
        statistic: t0,
        p_value: p.to_f64(),
        std_error: 0.0,
        samples: law.len(),
        acceptance_rate: None,
        p_exact: Some(p),
    })
}

fn check_counts(a: &IntegerMatrix, y0: &[u64]) -> Result<()> {
    if y0.len() != a.nrows() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            found: y0.len(),
        });
    }
    Ok(())
}

/// Null fit on the recoded matrix; same column space, hence same means.
pub fn fit_integer(a: &IntegerMatrix, y0: &[u64]) -> Result<GlmFit> {
    let cols: Vec<Vec<Rational>> = a
        .columns()
        .iter()
        .map(|c| c.iter().map(|&v| Rational::from(v)).collect())
        .collect();
    fit_poisson(&cols, y0)
}
