//! Seeded Monte-Carlo estimates of rank statistics.
//!
//! Samples are drawn in fixed blocks; block `b` uses a ChaCha stream keyed by
//! the seed with stream number `b`, and block results are combined with
//! integer arithmetic. The summary therefore depends only on
//! `(n, samples, seed, method)`, never on how many threads ran it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alloc::stable_allocation;
use crate::error::{Error, Result};
use crate::exact_stats;
use crate::experiments::marriage::{gale_shapley_male_optimal, MarriageInstance};
use crate::permutation::Permutation;
use crate::poly::{format_rational, to_f64};
use crate::profile::{check_size, PreferenceProfile};

const BLOCK: u64 = 1024;

/// A profile with independent uniformly random rows.
pub fn random_profile<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PreferenceProfile> {
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    PreferenceProfile::from_rows((0..n).map(|_| random_permutation(n, rng)).collect())
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Permutation::from_vec_unchecked(v)
}

/// The generator used for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// What is sampled and which allocation is measured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimulationMethod {
    /// Random profile, core allocation.
    Stable,
    /// Random profile, first-come first-served with a fixed priority.
    Hash(Permutation),
    /// Fixed girls, random boys, boy-optimal marriage.
    MarriageFixedGirls(PreferenceProfile),
    /// Random girls and random boys, boy-optimal marriage.
    MarriageRandomGirls,
}

impl SimulationMethod {
    pub fn label(&self) -> String {
        match self {
            SimulationMethod::Stable => "stable".into(),
            SimulationMethod::Hash(_) => "hash".into(),
            SimulationMethod::MarriageFixedGirls(_) => "marriage-fixed-girls".into(),
            SimulationMethod::MarriageRandomGirls => "marriage-random-girls".into(),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            SimulationMethod::Hash(pi) => check_size(n, pi),
            SimulationMethod::MarriageFixedGirls(g) if g.n() != n => Err(Error::SizeMismatch {
                expected: n,
                actual: g.n(),
            }),
            _ => Ok(()),
        }
    }

    fn sample_ranks<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        let p = random_profile(n, rng)?;
        Ok(match self {
            SimulationMethod::Stable => stable_allocation(&p).ranks,
            SimulationMethod::Hash(pi) => crate::alloc::uniform_hash_allocation(&p, pi)?.ranks,
            SimulationMethod::MarriageFixedGirls(girls) => {
                gale_shapley_male_optimal(&MarriageInstance::new(p, girls.clone())?).ranks
            }
            SimulationMethod::MarriageRandomGirls => {
                let girls = random_profile(n, rng)?;
                gale_shapley_male_optimal(&MarriageInstance::new(p, girls)?).ranks
            }
        })
    }
}

/// Integer accumulators; combined exactly so merge order is irrelevant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Moments {
    count: u64,
    sum: u128,
    sum_sq: u128,
    square_sum: u128,
    max_sum: u128,
    max_at_most_half: u64,
}

impl Moments {
    fn add(&mut self, n: usize, ranks: &[usize]) {
        let s = ranks.iter().sum::<usize>() as u128;
        self.count += 1;
        self.sum += s;
        self.sum_sq += s * s;
        self.square_sum += ranks.iter().map(|&r| (r * r) as u128).sum::<u128>();
        let max = ranks.iter().copied().max().unwrap_or(0);
        self.max_sum += max as u128;
        if max <= n / 2 {
            self.max_at_most_half += 1;
        }
    }

    fn merge(self, o: Moments) -> Moments {
        Moments {
            count: self.count + o.count,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            square_sum: self.square_sum + o.square_sum,
            max_sum: self.max_sum + o.max_sum,
            max_at_most_half: self.max_at_most_half + o.max_at_most_half,
        }
    }
}

/// Exact targets for the uniform-profile allocation methods.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactTargets {
    pub rank_sum_mean: String,
    pub rank_sum_variance: String,
    pub square_sum_mean: String,
    pub max_rank_at_most_half: Option<String>,
    /// Lower and upper bounds on the mean rank sum of the boy-optimal
    /// marriage, `(n+1)H_n − n` and `(n−1)H_n + 1`.
    pub marriage_bounds: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub method: String,
    pub mean_rank_sum: f64,
    pub variance_rank_sum: f64,
    pub standard_error: f64,
    pub mean_square_sum: f64,
    pub mean_max_rank: f64,
    pub fraction_max_at_most_half: f64,
    pub exact: ExactTargets,
}

impl MonteCarloSummary {
    /// `|mean − target| / standard_error`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.standard_error == 0.0 {
            if self.mean_rank_sum == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean_rank_sum - target).abs() / self.standard_error
        }
    }
}

/// Sample `samples` instances and summarise their rank statistics.
pub fn monte_carlo_summary(n: usize, samples: u64, seed: u64, method: &SimulationMethod) -> Result<MonteCarloSummary> {
    if samples == 0 {
        return Err(Error::OutOfRange("samples must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    method.check(n)?;
    let blocks = samples.div_ceil(BLOCK);
    let m = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut acc = Moments::default();
            for _ in 0..count {
                acc.add(n, &method.sample_ranks(n, &mut rng)?);
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(Moments::default, |a, b| Ok(a.merge(b)))?;

    let count = m.count as f64;
    let mean = m.sum as f64 / count;
    // Unbiased sample variance from exact integer sums.
    let variance = if m.count > 1 {
        let num = m.count as i128 * m.sum_sq as i128 - (m.sum as i128) * (m.sum as i128);
        num as f64 / (count * (count - 1.0))
    } else {
        0.0
    };
    Ok(MonteCarloSummary {
        n,
        samples,
        seed,
        method: method.label(),
        mean_rank_sum: mean,
        variance_rank_sum: variance,
        standard_error: (variance / count).sqrt(),
        mean_square_sum: m.square_sum as f64 / count,
        mean_max_rank: m.max_sum as f64 / count,
        fraction_max_at_most_half: m.max_at_most_half as f64 / count,
        exact: exact_targets(n)?,
    })
}

fn exact_targets(n: usize) -> Result<ExactTargets> {
    let h = to_f64(&exact_stats::harmonic(n, 1)?);
    Ok(ExactTargets {
        rank_sum_mean: format_rational(&exact_stats::expected_rank_sum(n)?),
        rank_sum_variance: format_rational(&exact_stats::rank_sum_variance(n)?),
        square_sum_mean: format_rational(&exact_stats::expected_square_sum(n)?),
        max_rank_at_most_half: if n >= 2 {
            Some(format_rational(&exact_stats::max_rank_at_most(n, n / 2)?))
        } else {
            None
        },
        marriage_bounds: ((n + 1) as f64 * h - n as f64, (n - 1) as f64 * h + 1.0),
    })
}
