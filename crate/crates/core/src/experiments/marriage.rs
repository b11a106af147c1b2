//! Male-optimal stable marriage and exhaustive rank-sum totals over all
//! boys' preference matrices for a fixed set of girls' preferences.

use std::ops::Range;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alloc::AllocationResult;
use crate::error::{Error, Result};
use crate::permutation::{factorial_u64, Permutation};
use crate::profile::{validate_profile, PreferenceProfile};

/// Largest `n` for which exhaustive totals run without the long-run opt-in.
pub const EXHAUSTIVE_MARRIAGE_BOUND: usize = 4;

/// Boys rank girls, girls rank boys.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarriageInstance {
    pub boys: PreferenceProfile,
    pub girls: PreferenceProfile,
}

impl MarriageInstance {
    pub fn new(boys: PreferenceProfile, girls: PreferenceProfile) -> Result<Self> {
        if boys.n() != girls.n() {
            return Err(Error::SizeMismatch {
                expected: boys.n(),
                actual: girls.n(),
            });
        }
        Ok(MarriageInstance { boys, girls })
    }
}

/// How a rank total is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankConvention {
    /// `Σ r_k`, a first choice counting as 1.
    OneBased,
    /// `Σ (r_k − 1)`, the number of rejections.
    ZeroBased,
}

/// Boys propose one at a time, each displaced boy immediately proposing
/// further down his list. Returns the boy-optimal matching: `goods[b]` is
/// boy `b`'s wife and `ranks[b]` her position in his list.
pub fn gale_shapley_male_optimal(inst: &MarriageInstance) -> AllocationResult {
    let n = inst.boys.n();
    let mut next = vec![0usize; n + 1];
    let mut husband = vec![0usize; n + 1];
    for boy in 1..=n {
        let mut suitor = boy;
        loop {
            next[suitor] += 1;
            let girl = inst.boys.choice(suitor, next[suitor]);
            let current = husband[girl];
            if current == 0 {
                husband[girl] = suitor;
                break;
            }
            if inst.girls.prefers(girl, suitor, current) {
                husband[girl] = suitor;
                suitor = current;
            }
        }
    }
    let mut wife = vec![0usize; n];
    for girl in 1..=n {
        wife[husband[girl] - 1] = girl;
    }
    next.remove(0);
    AllocationResult {
        goods: Permutation::from_vec_unchecked(wife),
        ranks: next,
    }
}

/// Girl `j`'s `k`-th choice is `((j + k − 1) mod n) + 1`.
pub fn cyclic_girls(n: usize) -> Result<PreferenceProfile> {
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    validate_profile(
        (1..=n)
            .map(|j| (1..=n).map(|k| (j + k - 1) % n + 1).collect())
            .collect(),
    )
}

/// Every girl ranks the boys `1, 2, …, n`.
pub fn equal_girls(n: usize) -> Result<PreferenceProfile> {
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    validate_profile((1..=n).map(|_| (1..=n).collect()).collect())
}

/// Rank totals over a set of boys' matrices, in both conventions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarriageTotals {
    /// Number of boys' matrices included.
    pub count: u64,
    pub one_based: u128,
}

impl MarriageTotals {
    pub fn zero_based(&self, n: usize) -> u128 {
        self.one_based - self.count as u128 * n as u128
    }

    pub fn get(&self, n: usize, convention: RankConvention) -> u128 {
        match convention {
            RankConvention::OneBased => self.one_based,
            RankConvention::ZeroBased => self.zero_based(n),
        }
    }

    pub fn merge(mut self, other: &MarriageTotals) -> MarriageTotals {
        self.count += other.count;
        self.one_based += other.one_based;
        self
    }
}

/// Allocation-free deferred acceptance over boys' matrices given as indices
/// into the lexicographic list of permutations.
pub(crate) struct MarriageEngine {
    n: usize,
    // perms[i*n + j] = j-th entry (0-based girl) of permutation i
    perms: Vec<u8>,
    // girl_rank[g*n + b] = position of boy b in girl g's list
    girl_rank: Vec<u8>,
    n_perms: u64,
}

impl MarriageEngine {
    pub(crate) fn new(girls: &PreferenceProfile) -> Self {
        let n = girls.n();
        assert!(n <= 12, "engine supports n <= 12");
        let perms: Vec<u8> = Permutation::all(n)
            .iter()
            .flat_map(|p| p.as_slice().iter().map(|&v| (v - 1) as u8).collect::<Vec<_>>())
            .collect();
        let mut girl_rank = vec![0u8; n * n];
        for g in 1..=n {
            for b in 1..=n {
                girl_rank[(g - 1) * n + b - 1] = girls.rank_of(g, b) as u8;
            }
        }
        MarriageEngine {
            n,
            perms,
            girl_rank,
            n_perms: factorial_u64(n),
        }
    }

    pub(crate) fn total_indices(&self) -> u64 {
        self.n_perms.pow(self.n as u32)
    }

    /// One-based rank sum of the boy-optimal matching for the matrix whose
    /// row `b` is permutation `rows[b]`.
    #[inline]
    fn rank_sum(&self, rows: &[u64]) -> u32 {
        const NONE: u8 = u8::MAX;
        let n = self.n;
        let mut next = [0u8; 12];
        let mut husband = [NONE; 12];
        for boy in 0..n {
            let mut suitor = boy;
            loop {
                let base = rows[suitor] as usize * n;
                let girl = self.perms[base + next[suitor] as usize] as usize;
                next[suitor] += 1;
                let current = husband[girl];
                if current == NONE {
                    husband[girl] = suitor as u8;
                    break;
                }
                let gr = &self.girl_rank[girl * n..girl * n + n];
                if gr[suitor] < gr[current as usize] {
                    husband[girl] = suitor as u8;
                    suitor = current as usize;
                }
            }
        }
        next[..n].iter().map(|&x| x as u32).sum()
    }

    /// Totals over boys' matrices with mixed-radix index in `range`
    /// (row 1 is the most significant digit).
    pub(crate) fn totals_for_range(&self, range: Range<u64>) -> MarriageTotals {
        let n = self.n;
        let mut digits = decode_mixed_radix(range.start, n, self.n_perms);
        let mut total: u128 = 0;
        for _ in range.clone() {
            total += self.rank_sum(&digits) as u128;
            // odometer increment, last row fastest
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < self.n_perms {
                    break;
                }
                *d = 0;
            }
        }
        MarriageTotals {
            count: range.end - range.start,
            one_based: total,
        }
    }

    pub(crate) fn totals_parallel(&self, range: Range<u64>, chunk: u64) -> MarriageTotals {
        split_range(range, chunk)
            .into_par_iter()
            .map(|r| self.totals_for_range(r))
            .reduce(MarriageTotals::default, |a, b| a.merge(&b))
    }
}

pub(crate) fn decode_mixed_radix(mut index: u64, digits: usize, radix: u64) -> Vec<u64> {
    let mut out = vec![0u64; digits];
    for d in out.iter_mut().rev() {
        *d = index % radix;
        index /= radix;
    }
    out
}

pub(crate) fn split_range(range: Range<u64>, chunk: u64) -> Vec<Range<u64>> {
    let chunk = chunk.max(1);
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = range.end.min(start.saturating_add(chunk));
        out.push(start..end);
        start = end;
    }
    out
}

const TOTALS_CHUNK: u64 = 1 << 14;

/// Total rank sum of the boy-optimal matching over all `n!^n` boys'
/// matrices, with the girls fixed.
///
/// Runs for `n <= 4` unless `long_run` is set.
pub fn total_marriage_rank_sum(
    girls: &PreferenceProfile,
    convention: RankConvention,
    long_run: bool,
) -> Result<BigUint> {
    let totals = marriage_totals(girls, long_run)?;
    Ok(BigUint::from(totals.get(girls.n(), convention)))
}

/// Both conventions at once; see [`total_marriage_rank_sum`].
pub fn marriage_totals(girls: &PreferenceProfile, long_run: bool) -> Result<MarriageTotals> {
    let n = girls.n();
    check_marriage_size(n, long_run)?;
    let engine = MarriageEngine::new(girls);
    Ok(engine.totals_parallel(0..engine.total_indices(), TOTALS_CHUNK))
}

/// Largest `n` whose boys' index space `n!^n` fits the engine.
pub const LONG_RUN_MARRIAGE_BOUND: usize = 6;

/// Exhaustive marriage work is allowed up to [`EXHAUSTIVE_MARRIAGE_BOUND`],
/// or up to [`LONG_RUN_MARRIAGE_BOUND`] with `long_run`.
pub fn check_marriage_size(n: usize, long_run: bool) -> Result<()> {
    let bound = if long_run {
        LONG_RUN_MARRIAGE_BOUND
    } else {
        EXHAUSTIVE_MARRIAGE_BOUND
    };
    if n > bound {
        return Err(Error::BoundExceeded { n, bound });
    }
    Ok(())
}

/// Totals over the boys' matrices whose mixed-radix index lies in `range`.
pub fn marriage_totals_for_range(girls: &PreferenceProfile, range: Range<u64>) -> Result<MarriageTotals> {
    check_marriage_size(girls.n(), true)?;
    let engine = MarriageEngine::new(girls);
    if range.end > engine.total_indices() || range.start > range.end {
        return Err(Error::OutOfRange(format!(
            "index range {range:?} outside 0..{}",
            engine.total_indices()
        )));
    }
    Ok(engine.totals_parallel(range, TOTALS_CHUNK))
}

/// Boys' matrix with the given mixed-radix index (the same encoding as
/// [`profile_at`](crate::experiments::profile_at)).
pub fn boys_matrix_at(n: usize, index: u64) -> Result<PreferenceProfile> {
    crate::experiments::distribution::profile_at(n, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alloc::uniform_hash_allocation;

    fn profile(rows: &[&[usize]]) -> PreferenceProfile {
        validate_profile(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn singleton_marriage() {
        let inst = MarriageInstance::new(profile(&[&[1]]), profile(&[&[1]])).unwrap();
        let m = gale_shapley_male_optimal(&inst);
        assert_eq!(m.goods.as_slice(), &[1]);
        assert_eq!(m.ranks, vec![1]);
    }

    #[test]
    fn two_boys_same_lists() {
        let inst = MarriageInstance::new(profile(&[&[1, 2], &[1, 2]]), profile(&[&[1, 2], &[1, 2]])).unwrap();
        let m = gale_shapley_male_optimal(&inst);
        assert_eq!(m.goods.as_slice(), &[1, 2]);
        assert_eq!(m.ranks, vec![1, 2]);
    }

    #[test]
    fn size_mismatch_rejected() {
        assert!(MarriageInstance::new(profile(&[&[1]]), profile(&[&[1, 2], &[2, 1]])).is_err());
    }

    #[test]
    fn cyclic_rows() {
        assert_eq!(cyclic_girls(3).unwrap().to_vecs(), vec![vec![2, 3, 1], vec![3, 1, 2], vec![1, 2, 3]]);
        assert_eq!(cyclic_girls(1).unwrap().to_vecs(), vec![vec![1]]);
        let c = cyclic_girls(5).unwrap();
        let first = c.row(1).as_slice().to_vec();
        for j in 1..=5 {
            let row = c.row(j).as_slice();
            assert!((0..5).any(|s| (0..5).all(|i| row[i] == first[(i + s) % 5])));
        }
        let mut rows = c.to_vecs();
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 5);
    }

    #[test]
    fn equal_girls_is_serial_dictatorship() {
        let girls = profile(&[&[3, 1, 2], &[3, 1, 2], &[3, 1, 2]]);
        let boys = profile(&[&[1, 2, 3], &[1, 3, 2], &[1, 2, 3]]);
        let m = gale_shapley_male_optimal(&MarriageInstance::new(boys.clone(), girls).unwrap());
        let h = uniform_hash_allocation(&boys, &Permutation::new(vec![3, 1, 2]).unwrap()).unwrap();
        assert_eq!(m, h);
    }

    #[test]
    fn engine_matches_reference_on_all_n3_matrices() {
        let girls = cyclic_girls(3).unwrap();
        let engine = MarriageEngine::new(&girls);
        for idx in 0..engine.total_indices() {
            let boys = boys_matrix_at(3, idx).unwrap();
            let reference = gale_shapley_male_optimal(&MarriageInstance::new(boys, girls.clone()).unwrap());
            let digits = decode_mixed_radix(idx, 3, 6);
            assert_eq!(engine.rank_sum(&digits) as usize, reference.rank_sum());
        }
    }

    #[test]
    fn opt_in_required_beyond_bound() {
        let girls = cyclic_girls(5).unwrap();
        assert!(matches!(
            total_marriage_rank_sum(&girls, RankConvention::ZeroBased, false),
            Err(Error::BoundExceeded { n: 5, bound: 4 })
        ));
    }

    #[test]
    fn partitioning_does_not_change_totals() {
        let girls = cyclic_girls(3).unwrap();
        let engine = MarriageEngine::new(&girls);
        let whole = engine.totals_for_range(0..216);
        for chunk in [1, 7, 50, 216, 1000] {
            assert_eq!(engine.totals_parallel(0..216, chunk), whole);
        }
    }
}
