//! Isomorphism classes of girls' preference matrices and the exhaustive scan
//! of marriage rank totals over them.
//!
//! Two girls' matrices are isomorphic when one becomes the other by renaming
//! boys (applied to every entry) and renaming girls (permuting rows). The
//! canonical representative is the lexicographically smallest matrix in the
//! class, compared row-major.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::marriage::{decode_mixed_radix, MarriageEngine, MarriageTotals};
use crate::permutation::{factorial_u64, Permutation};
use crate::profile::PreferenceProfile;

/// Largest `n` accepted by [`conjecture_scan`].
pub const SCAN_BOUND: usize = 4;

/// Permutations of size `n` as lexicographic indices, with the table for
/// renaming entries.
struct RelabelTable {
    n_perms: usize,
    // relabel[a * n_perms + i] = index of (alpha_a ∘ perm_i)
    relabel: Vec<u32>,
}

impl RelabelTable {
    fn new(n: usize) -> Self {
        let perms = Permutation::all(n);
        let n_perms = perms.len();
        let mut relabel = vec![0u32; n_perms * n_perms];
        for (a, alpha) in perms.iter().enumerate() {
            for (i, p) in perms.iter().enumerate() {
                let img = alpha.compose(p).expect("same size");
                relabel[a * n_perms + i] = img.lex_rank() as u32;
            }
        }
        RelabelTable { n_perms, relabel }
    }

    fn canonical(&self, rows: &[u32]) -> Vec<u32> {
        let mut best: Option<Vec<u32>> = None;
        let mut cur = vec![0u32; rows.len()];
        for a in 0..self.n_perms {
            let table = &self.relabel[a * self.n_perms..(a + 1) * self.n_perms];
            for (c, &r) in cur.iter_mut().zip(rows) {
                *c = table[r as usize];
            }
            cur.sort_unstable();
            if best.as_ref().is_none_or(|b| cur < *b) {
                best = Some(cur.clone());
            }
        }
        best.expect("at least one relabeling")
    }

    /// Number of (boy renaming, girl renaming) pairs fixing the matrix.
    fn stabilizer(&self, rows: &[u32]) -> u64 {
        let mut sorted = rows.to_vec();
        sorted.sort_unstable();
        // girl renamings that permute equal rows among themselves
        let mut row_perms = 1u64;
        for group in sorted.chunk_by(|a, b| a == b) {
            row_perms *= factorial_u64(group.len());
        }
        let mut cur = vec![0u32; rows.len()];
        let mut fixing = 0u64;
        for a in 0..self.n_perms {
            let table = &self.relabel[a * self.n_perms..(a + 1) * self.n_perms];
            for (c, &r) in cur.iter_mut().zip(rows) {
                *c = table[r as usize];
            }
            cur.sort_unstable();
            if cur == sorted {
                fixing += 1;
            }
        }
        fixing * row_perms
    }
}

fn to_indices(girls: &PreferenceProfile) -> Vec<u32> {
    girls.rows().iter().map(|r| r.lex_rank() as u32).collect()
}

fn from_indices(n: usize, rows: &[u32]) -> PreferenceProfile {
    PreferenceProfile::from_rows(
        rows.iter()
            .map(|&i| Permutation::from_lex_rank(n, i as u64).expect("valid index"))
            .collect(),
    )
    .expect("valid rows")
}

/// Lexicographically smallest matrix isomorphic to `girls`.
pub fn girls_canonical_form(girls: &PreferenceProfile) -> Result<PreferenceProfile> {
    let n = girls.n();
    if n > 6 {
        return Err(Error::BoundExceeded { n, bound: 6 });
    }
    let table = RelabelTable::new(n);
    Ok(from_indices(n, &table.canonical(&to_indices(girls))))
}

/// Size of the isomorphism class of `girls`: `(n!)² / |stabilizer|`.
pub fn girls_class_size(girls: &PreferenceProfile) -> Result<u64> {
    let n = girls.n();
    if n > 6 {
        return Err(Error::BoundExceeded { n, bound: 6 });
    }
    let table = RelabelTable::new(n);
    let f = factorial_u64(n);
    Ok(f * f / table.stabilizer(&to_indices(girls)))
}

/// One isomorphism class of girls' matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRecord {
    pub canonical: PreferenceProfile,
    pub class_size: u64,
    pub total_one_based: u128,
    pub total_zero_based: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub n: usize,
    /// Sorted by total, largest first; ties broken by canonical matrix.
    pub classes: Vec<ClassRecord>,
}

impl ScanReport {
    pub fn max_class(&self) -> &ClassRecord {
        self.classes.first().expect("non-empty scan")
    }

    pub fn min_class(&self) -> &ClassRecord {
        self.classes.last().expect("non-empty scan")
    }

    /// Sum of class sizes; equals `n!^n` for a complete scan.
    pub fn matrices_covered(&self) -> u64 {
        self.classes.iter().map(|c| c.class_size).sum()
    }
}

/// Canonical representatives of all girls' matrices with their class sizes.
pub fn girls_isomorphism_classes(n: usize) -> Result<Vec<(PreferenceProfile, u64)>> {
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    if n > SCAN_BOUND {
        return Err(Error::BoundExceeded { n, bound: SCAN_BOUND });
    }
    let table = RelabelTable::new(n);
    let radix = table.n_perms as u64;
    let total = radix.pow(n as u32);
    let f = factorial_u64(n);
    let mut reps: Vec<(Vec<u32>, u64)> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let rows: Vec<u32> = decode_mixed_radix(idx, n, radix).into_iter().map(|d| d as u32).collect();
            // Rows of a canonical matrix are sorted; skip the rest cheaply.
            if rows.windows(2).any(|w| w[0] > w[1]) {
                return None;
            }
            (table.canonical(&rows) == rows).then(|| {
                let size = f * f / table.stabilizer(&rows);
                (rows, size)
            })
        })
        .collect();
    reps.sort();
    Ok(reps.into_iter().map(|(rows, size)| (from_indices(n, &rows), size)).collect())
}

/// Exhaustive marriage totals for one representative per isomorphism class.
pub fn conjecture_scan(n: usize) -> Result<ScanReport> {
    let classes = girls_isomorphism_classes(n)?;
    let mut records: Vec<ClassRecord> = classes
        .into_par_iter()
        .map(|(canonical, class_size)| {
            let engine = MarriageEngine::new(&canonical);
            let totals: MarriageTotals = engine.totals_for_range(0..engine.total_indices());
            ClassRecord {
                total_zero_based: totals.zero_based(n),
                total_one_based: totals.one_based,
                canonical,
                class_size,
            }
        })
        .collect();
    records.sort_by(|a, b| {
        b.total_one_based
            .cmp(&a.total_one_based)
            .then_with(|| a.canonical.to_vecs().cmp(&b.canonical.to_vecs()))
    });
    Ok(ScanReport { n, classes: records })
}

/// Class sizes by brute force: canonicalise every matrix and count.
pub fn class_sizes_by_counting(n: usize) -> Result<HashMap<Vec<Vec<usize>>, u64>> {
    if n > SCAN_BOUND {
        return Err(Error::BoundExceeded { n, bound: SCAN_BOUND });
    }
    let table = RelabelTable::new(n);
    let radix = table.n_perms as u64;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for idx in 0..radix.pow(n as u32) {
        let rows: Vec<u32> = decode_mixed_radix(idx, n, radix).into_iter().map(|d| d as u32).collect();
        *counts.entry(table.canonical(&rows)).or_default() += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(rows, c)| (from_indices(n, &rows).to_vecs(), c))
        .collect())
}
