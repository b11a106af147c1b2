//! Exact rank-multiset distributions by exhaustive enumeration of profiles.

use std::collections::BTreeMap;
use std::ops::Range;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::alloc::{stable_allocation, uniform_hash_allocation, AllocationResult};
use crate::error::{Error, Result};
use crate::experiments::marriage::{decode_mixed_radix, split_range};
use crate::permutation::{factorial_u64, Permutation};
use crate::profile::{check_size, PreferenceProfile};

/// Largest `n` accepted by [`exhaustive_rank_distribution`].
pub const EXHAUSTIVE_PROFILE_BOUND: usize = 4;

/// Which allocation produces the ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AllocationMethod {
    /// The core allocation.
    Stable,
    /// First-come first-served under a fixed priority order.
    Hash(Permutation),
}

impl AllocationMethod {
    pub fn allocate(&self, p: &PreferenceProfile) -> Result<AllocationResult> {
        match self {
            AllocationMethod::Stable => Ok(stable_allocation(p)),
            AllocationMethod::Hash(pi) => uniform_hash_allocation(p, pi),
        }
    }

    pub fn label(&self) -> String {
        match self {
            AllocationMethod::Stable => "stable".into(),
            AllocationMethod::Hash(pi) => format!("hash({})", pi.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Exact counts of sorted rank multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankDistribution {
    counts: BTreeMap<Vec<usize>, BigUint>,
    total: BigUint,
}

impl RankDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one allocation's ranks (in any order).
    pub fn record(&mut self, ranks: &[usize]) {
        let mut key = ranks.to_vec();
        key.sort_unstable();
        self.add(key, BigUint::from(1u32));
    }

    fn add(&mut self, key: Vec<usize>, count: BigUint) {
        debug_assert!(key.windows(2).all(|w| w[0] <= w[1]));
        self.total += &count;
        *self.counts.entry(key).or_insert_with(BigUint::zero) += count;
    }

    /// Associative, commutative combine.
    pub fn merge(mut self, other: &RankDistribution) -> RankDistribution {
        for (k, v) in &other.counts {
            self.add(k.clone(), v.clone());
        }
        self
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn counts(&self) -> &BTreeMap<Vec<usize>, BigUint> {
        &self.counts
    }

    pub fn count(&self, multiset: &[usize]) -> BigUint {
        let mut key = multiset.to_vec();
        key.sort_unstable();
        self.counts.get(&key).cloned().unwrap_or_default()
    }

    /// `Σ f(multiset) · count` over all recorded multisets.
    pub fn weighted_sum(&self, f: impl Fn(&[usize]) -> BigUint) -> BigUint {
        self.counts.iter().map(|(k, v)| f(k) * v).sum()
    }
}

impl Serialize for RankDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            ranks: Vec<usize>,
            count: String,
        }
        #[derive(Serialize)]
        struct Repr {
            total: String,
            counts: Vec<Entry>,
        }
        Repr {
            total: self.total.to_string(),
            counts: self
                .counts
                .iter()
                .map(|(k, v)| Entry {
                    ranks: k.clone(),
                    count: v.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Number of profiles of size `n`, `n!^n`.
/// Saturates at `u64::MAX`.
pub fn profile_count(n: usize) -> u64 {
    (1..=n as u64)
        .try_fold(1u64, |acc, k| acc.checked_mul(k))
        .and_then(|f| f.checked_pow(n as u32))
        .unwrap_or(u64::MAX)
}

/// The profile with mixed-radix index `index`; row 1 is the most significant
/// digit, each digit the lexicographic rank of its row.
pub fn profile_at(n: usize, index: u64) -> Result<PreferenceProfile> {
    if n > 20 {
        return Err(Error::BoundExceeded { n, bound: 20 });
    }
    if index >= profile_count(n) {
        return Err(Error::OutOfRange(format!("profile index {index} for n = {n}")));
    }
    let digits = decode_mixed_radix(index, n, factorial_u64(n));
    PreferenceProfile::from_rows(
        digits
            .into_iter()
            .map(|d| Permutation::from_lex_rank(n, d))
            .collect::<Result<Vec<_>>>()?,
    )
}

fn check_method(n: usize, method: &AllocationMethod) -> Result<()> {
    if let AllocationMethod::Hash(pi) = method {
        check_size(n, pi)?;
    }
    Ok(())
}

/// Rank distribution over profiles with index in `range`.
pub fn rank_distribution_for_range(n: usize, method: &AllocationMethod, range: Range<u64>) -> Result<RankDistribution> {
    check_method(n, method)?;
    if range.end > profile_count(n) || range.start > range.end {
        return Err(Error::OutOfRange(format!("index range {range:?} for n = {n}")));
    }
    let perms = Permutation::all(n);
    let radix = perms.len() as u64;
    let mut local: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut digits = decode_mixed_radix(range.start, n, radix);
    for _ in range {
        let rows = digits.iter().map(|&d| perms[d as usize].clone()).collect();
        let p = PreferenceProfile::from_rows(rows)?;
        let mut key = method.allocate(&p)?.ranks;
        key.sort_unstable();
        *local.entry(key).or_default() += 1;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < radix {
                break;
            }
            *d = 0;
        }
    }
    let mut dist = RankDistribution::new();
    for (k, v) in local {
        dist.add(k, BigUint::from(v));
    }
    Ok(dist)
}

/// Rank distribution over all `n!^n` profiles, `n <= 4`.
pub fn exhaustive_rank_distribution(n: usize, method: &AllocationMethod) -> Result<RankDistribution> {
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    if n > EXHAUSTIVE_PROFILE_BOUND {
        return Err(Error::BoundExceeded {
            n,
            bound: EXHAUSTIVE_PROFILE_BOUND,
        });
    }
    exhaustive_rank_distribution_chunked(n, method, 4096)
}

/// [`exhaustive_rank_distribution`] with an explicit chunk size; the result
/// does not depend on it.
pub fn exhaustive_rank_distribution_chunked(n: usize, method: &AllocationMethod, chunk: u64) -> Result<RankDistribution> {
    check_method(n, method)?;
    split_range(0..profile_count(n), chunk)
        .into_par_iter()
        .map(|r| rank_distribution_for_range(n, method, r))
        .try_reduce(RankDistribution::new, |a, b| Ok(a.merge(&b)))
}

/// Rank distribution over an explicit family of profiles.
pub fn rank_distribution_over<'a>(
    profiles: impl IntoIterator<Item = &'a PreferenceProfile>,
    method: &AllocationMethod,
) -> Result<RankDistribution> {
    let mut dist = RankDistribution::new();
    for p in profiles {
        dist.record(&method.allocate(p)?.ranks);
    }
    Ok(dist)
}
