//! Preference profiles: one strict ranking of all goods per trader.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// `n` preference rows; row `k` lists the goods in trader `k`'s order of
/// preference, best first.
///
/// Trader `k` initially owns good `k`. A rank table (position of each good in
/// each row) is kept alongside the rows so preference comparisons are O(1).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct PreferenceProfile {
    rows: Vec<Permutation>,
    // rank[k-1][g-1] = position of good g in row k (1-based)
    rank: Vec<Vec<usize>>,
}

impl PreferenceProfile {
    pub fn from_rows(rows: Vec<Permutation>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyProfile);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::RowLength {
                    row: i + 1,
                    len: row.len(),
                    expected: n,
                });
            }
        }
        let rank = rows.iter().map(|r| r.inverse().into_vec()).collect();
        Ok(PreferenceProfile { rows, rank })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Permutation] {
        &self.rows
    }

    /// Row `k` (1-based).
    pub fn row(&self, k: usize) -> &Permutation {
        &self.rows[k - 1]
    }

    /// `p_{k,j}`: the good trader `k` ranks in position `j` (both 1-based).
    #[inline]
    pub fn choice(&self, k: usize, j: usize) -> usize {
        self.rows[k - 1].at(j)
    }

    /// Position of `good` in trader `k`'s list (1 = favourite).
    #[inline]
    pub fn rank_of(&self, k: usize, good: usize) -> usize {
        self.rank[k - 1][good - 1]
    }

    /// Trader `k` strictly prefers good `a` to good `b`.
    #[inline]
    pub fn prefers(&self, k: usize, a: usize, b: usize) -> bool {
        self.rank_of(k, a) < self.rank_of(k, b)
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|r| r.as_slice().to_vec()).collect()
    }

    /// Parse the text format: first line `n`, then `n` lines of `n`
    /// space-separated 1-based integers. Blank trailing lines are allowed,
    /// anything else after the last row is not.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or(Error::Parse {
                line: 1,
                message: "missing header line".into(),
            })?;
        let n: usize = header.trim().parse().map_err(|e| Error::Parse {
            line: 1,
            message: format!("bad n {:?}: {e}", header.trim()),
        })?;
        if n == 0 {
            return Err(Error::EmptyProfile);
        }
        let mut raw = Vec::with_capacity(n);
        for (idx, line) in lines {
            let trimmed = line.trim();
            if raw.len() == n {
                if trimmed.is_empty() {
                    continue;
                }
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "trailing data after last row".into(),
                });
            }
            let row = trimmed
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| Error::Parse {
                        line: idx + 1,
                        message: format!("{t:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            raw.push(row);
        }
        if raw.len() != n {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("expected {n} rows, found {}", raw.len()),
            });
        }
        validate_profile(raw)
    }

    /// Inverse of [`PreferenceProfile::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for row in &self.rows {
            let _ = writeln!(out, "{row}");
        }
        out
    }
}

/// Check raw rows and build a profile.
pub fn validate_profile(raw: Vec<Vec<usize>>) -> Result<PreferenceProfile> {
    let n = raw.len();
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    let rows = raw
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n {
                return Err(Error::RowLength {
                    row: i + 1,
                    len: row.len(),
                    expected: n,
                });
            }
            Permutation::new(row)
        })
        .collect::<Result<Vec<_>>>()?;
    PreferenceProfile::from_rows(rows)
}

/// Trader `σ(k)` receives list `p_k`: output row `σ(k)` equals input row `k`.
pub fn shuffle_profile(p: &PreferenceProfile, sigma: &Permutation) -> Result<PreferenceProfile> {
    check_size(p.n(), sigma)?;
    let mut rows = vec![Permutation::identity(0); p.n()];
    for k in 1..=p.n() {
        rows[sigma.at(k) - 1] = p.row(k).clone();
    }
    PreferenceProfile::from_rows(rows)
}

pub(crate) fn check_size(n: usize, perm: &Permutation) -> Result<()> {
    if perm.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    Ok(())
}

impl TryFrom<Vec<Vec<usize>>> for PreferenceProfile {
    type Error = Error;

    fn try_from(raw: Vec<Vec<usize>>) -> Result<Self> {
        validate_profile(raw)
    }
}

impl From<PreferenceProfile> for Vec<Vec<usize>> {
    fn from(p: PreferenceProfile) -> Self {
        p.to_vecs()
    }
}

impl std::fmt::Debug for PreferenceProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}
