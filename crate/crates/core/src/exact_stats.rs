//! Exact rank statistics for core allocations of uniformly random profiles.
//!
//! The rank multiset of the core allocation has the same distribution as the
//! probe counts of uniform hashing, so each quantity here is derived from
//! `q(n, k, j)`, the probability that the `k`-th arrival needs more than `j`
//! probes. Everything is computed in exact rational arithmetic.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{ExactRational, RationalPolynomial};

fn int(v: usize) -> ExactRational {
    ExactRational::from_integer(BigInt::from(v))
}

fn frac(a: BigInt, b: BigInt) -> ExactRational {
    ExactRational::new(a, b)
}

fn require_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    Ok(())
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `H_n = Σ 1/k` (order 1) or `H_n^(2) = Σ 1/k²` (order 2).
pub fn harmonic(n: usize, order: u32) -> Result<ExactRational> {
    if !(1..=2).contains(&order) {
        return Err(Error::OutOfRange(format!("harmonic order {order} (expected 1 or 2)")));
    }
    require_n(n)?;
    Ok((1..=n).fold(ExactRational::zero(), |acc, k| {
        acc + frac(BigInt::one(), BigInt::from(k).pow(order))
    }))
}

fn check_trader(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("trader k = {k} for n = {n}")));
    }
    Ok(())
}

/// Probability that arrival `k` of `n` has rank greater than `j`:
/// `C(k−1, j) / C(n, j)`.
pub fn q_exceed(n: usize, k: usize, j: usize) -> Result<ExactRational> {
    check_trader(n, k)?;
    if j > n {
        return Ok(ExactRational::zero());
    }
    Ok(frac(binomial(k - 1, j), binomial(n, j)))
}

/// `Σ_j C(j, m) q(n, k, j)` in closed form:
/// `(n+1)/(n+m+2−k) · C(k−1, m) / C(n+m+1−k, m)`.
pub fn weighted_q_sum(n: usize, k: usize, m: usize) -> Result<ExactRational> {
    check_trader(n, k)?;
    let lead = frac(BigInt::from(n + 1), BigInt::from(n + m + 2 - k));
    Ok(lead * frac(binomial(k - 1, m), binomial(n + m + 1 - k, m)))
}

/// `E[(z + r_1) ⋯ (z + r_n)] = ∏_k (z + (n+1)/(n+2−k))`.
pub fn expected_rank_poly(n: usize) -> Result<RationalPolynomial> {
    require_n(n)?;
    let mut poly = RationalPolynomial::one();
    for k in 1..=n {
        poly.mul_linear(&frac(BigInt::from(n + 1), BigInt::from(n + 2 - k)));
    }
    Ok(poly)
}

/// `E[r_1 + ⋯ + r_n] = (n+1) H_n − n`.
pub fn expected_rank_sum(n: usize) -> Result<ExactRational> {
    Ok(int(n + 1) * harmonic(n, 1)? - int(n))
}

/// Unsigned Stirling number of the first kind `[n k]`.
pub fn stirling_cycle(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::OutOfRange(format!("stirling [{n} {k}] needs k <= n")));
    }
    let mut row = vec![BigUint::one()];
    for i in 1..=n {
        let mut next = vec![BigUint::zero(); i + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut v = BigUint::zero();
            if j < i {
                v += &row[j] * BigUint::from(i - 1);
            }
            if j >= 1 {
                v += &row[j - 1];
            }
            *slot = v;
        }
        row = next;
    }
    Ok(row.swap_remove(k))
}

/// `[z^{n−2}] E[(z + r_1) ⋯ (z + r_n)] = E[Σ_{i<j} r_i r_j]`
/// `= ((n+1)²/2)(H_n² − H_n^(2)) − n(n+1)(H_n − 1)`.
pub fn rank_product_coeff(n: usize) -> Result<ExactRational> {
    if n < 2 {
        return Err(Error::OutOfRange("rank product coefficient needs n >= 2".into()));
    }
    let h1 = harmonic(n, 1)?;
    let h2 = harmonic(n, 2)?;
    let np1 = int(n + 1);
    Ok(&np1 * &np1 / int(2) * (&h1 * &h1 - h2) - int(n) * np1 * (h1 - int(1)))
}

/// `E[(z + r_1²) ⋯ (z + r_n²)] = ∏_k (z + (n+1)(n+1+k)/((n+2−k)(n+3−k)))`.
pub fn expected_square_poly(n: usize) -> Result<RationalPolynomial> {
    require_n(n)?;
    let mut poly = RationalPolynomial::one();
    for k in 1..=n {
        poly.mul_linear(&frac(
            BigInt::from((n + 1) * (n + 1 + k)),
            BigInt::from((n + 2 - k) * (n + 3 - k)),
        ));
    }
    Ok(poly)
}

/// `E[r_1² + ⋯ + r_n²] = (n+1)(n − H_n) + n`.
pub fn expected_square_sum(n: usize) -> Result<ExactRational> {
    Ok(int(n + 1) * (int(n) - harmonic(n, 1)?) + int(n))
}

/// `E[(r_1 + ⋯ + r_n)²]
///  = (n+1)²(H_n² − H_n^(2)) − (n+1)(2n+1) H_n + n(3n+4)`.
pub fn rank_sum_second_moment(n: usize) -> Result<ExactRational> {
    let h1 = harmonic(n, 1)?;
    let h2 = harmonic(n, 2)?;
    let np1 = int(n + 1);
    Ok(&np1 * &np1 * (&h1 * &h1 - h2) - np1 * int(2 * n + 1) * h1 + int(n * (3 * n + 4)))
}

/// `Var[r_1 + ⋯ + r_n] = 2n(n+2) − (n+1)² H_n^(2) − (n+1) H_n`.
pub fn rank_sum_variance(n: usize) -> Result<ExactRational> {
    let h1 = harmonic(n, 1)?;
    let h2 = harmonic(n, 2)?;
    let np1 = int(n + 1);
    Ok(int(2 * n * (n + 2)) - &np1 * &np1 * h2 - np1 * h1)
}

/// Expected variance of the ranks within one allocation:
/// `E[Σr²/n] − E[(Σr/n)²]`.
pub fn expected_rank_variance(n: usize) -> Result<ExactRational> {
    Ok(expected_square_sum(n)? / int(n) - rank_sum_second_moment(n)? / int(n * n))
}

/// `P[max r_k ≤ m] = ∏_k (1 − q(n, k, m))`.
pub fn max_rank_at_most(n: usize, m: usize) -> Result<ExactRational> {
    require_n(n)?;
    if m == 0 || m > n {
        return Err(Error::OutOfRange(format!("m = {m} must lie in 1..={n}")));
    }
    (1..=n).try_fold(ExactRational::one(), |acc, k| Ok(acc * (ExactRational::one() - q_exceed(n, k, m)?)))
}

/// Partial product `∏_{k=1}^{terms} (1 − 2^{−k})`, the large-`n` limit of
/// `max_rank_at_most(n, ⌊n/2⌋)`.
pub fn max_rank_half_limit(terms: usize) -> ExactRational {
    (1..=terms).fold(ExactRational::one(), |acc, k| {
        acc * (ExactRational::one() - frac(BigInt::one(), BigInt::one() << k))
    })
}
