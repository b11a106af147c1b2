//! Permutations of `{1, …, n}` with 1-based values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{1, …, n}`.
///
/// Values and positions are both 1-based at the public surface: `at(k)` is
/// the image of `k`. Preference rows, priorities, shufflings and allocations
/// are all represented with this type.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    values: Vec<usize>,
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation { n, values });
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(values.clone()).is_ok());
        Permutation { values }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Image of `k` (1-based). Panics when `k` is out of range.
    #[inline]
    pub fn at(&self, k: usize) -> usize {
        self.values[k - 1]
    }

    /// The values in position order, `[p(1), p(2), …]`.
    pub fn as_slice(&self) -> &[usize] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.values
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(Permutation {
            values: other.values.iter().map(|&v| self.at(v)).collect(),
        })
    }

    /// Position (1-based) at which `value` occurs.
    pub fn position_of(&self, value: usize) -> Option<usize> {
        self.values.iter().position(|&v| v == value).map(|i| i + 1)
    }

    /// Rank of this permutation in lexicographic order, starting at 0.
    pub fn lex_rank(&self) -> u64 {
        let n = self.len();
        let mut used = vec![false; n + 1];
        let mut rank = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            let smaller_unused = (1..v).filter(|&u| !used[u]).count() as u64;
            rank += smaller_unused * factorial_u64(n - 1 - i);
            used[v] = true;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(n: usize, rank: u64) -> Result<Self> {
        if n > 20 || rank >= factorial_u64(n) {
            return Err(Error::OutOfRange(format!(
                "lexicographic rank {rank} for n = {n}"
            )));
        }
        let mut pool: Vec<usize> = (1..=n).collect();
        let mut rest = rank;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let f = factorial_u64(n - 1 - i);
            let idx = (rest / f) as usize;
            rest %= f;
            values.push(pool.remove(idx));
        }
        Ok(Permutation { values })
    }

    /// All permutations of `{1, …, n}` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation {
                values: cur.clone(),
            });
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }

    /// Parse `"5,3,4"` (commas and/or whitespace).
    pub fn parse_list(text: &str) -> Result<Self> {
        let values = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: 1,
                    message: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(values)
    }
}

/// Advance `v` to the next permutation in lexicographic order.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(values: Vec<usize>) -> Result<Self> {
        Permutation::new(values)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.values
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(Permutation::new(vec![1, 1, 3]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
        assert!(Permutation::new(vec![2, 3, 1]).is_ok());
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let p = Permutation::new(vec![5, 3, 4, 9, 1, 8, 2, 7, 6]).unwrap();
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn lexicographic_ranks_match_enumeration_order() {
        for n in 0..=5 {
            let all = Permutation::all(n);
            assert_eq!(all.len() as u64, factorial_u64(n));
            for (i, p) in all.iter().enumerate() {
                assert_eq!(p.lex_rank(), i as u64);
                assert_eq!(&Permutation::from_lex_rank(n, i as u64).unwrap(), p);
            }
        }
    }

    #[test]
    fn parse_list_accepts_commas_and_spaces() {
        let p = Permutation::parse_list("5,3, 4 9,1,8,2,7,6").unwrap();
        assert_eq!(p.as_slice(), &[5, 3, 4, 9, 1, 8, 2, 7, 6]);
        assert!(Permutation::parse_list("1,2,x").is_err());
    }

    #[test]
    fn serde_rejects_invalid() {
        let p: Permutation = serde_json::from_str("[2,1,3]").unwrap();
        assert_eq!(p.at(1), 2);
        assert!(serde_json::from_str::<Permutation>("[2,2,3]").is_err());
    }
}
