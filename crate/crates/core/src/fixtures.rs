//! Small worked instances used across tests, the CLI and the Python bindings.

use crate::permutation::Permutation;
use crate::profile::{shuffle_profile, validate_profile, PreferenceProfile};

/// Three traders with lists `2 1 3`, `3 1 2`, `2 3 1`. Its core allocation is
/// `1 3 2`.
pub fn intro_profile() -> PreferenceProfile {
    validate_profile(vec![vec![2, 1, 3], vec![3, 1, 2], vec![2, 3, 1]]).expect("valid fixture")
}

/// Nine-trader list prefixes, each ending at the allocated good.
pub const TABLE1_PREFIXES: [&[usize]; 9] = [
    &[3],
    &[4],
    &[1],
    &[1, 5],
    &[9],
    &[6],
    &[5, 3, 8],
    &[9, 7],
    &[2],
];

/// [`TABLE1_PREFIXES`] with each row completed by the missing goods in
/// ascending order.
pub fn table1_profile() -> PreferenceProfile {
    let rows = TABLE1_PREFIXES
        .iter()
        .map(|prefix| {
            let mut row = prefix.to_vec();
            row.extend((1..=9).filter(|g| !prefix.contains(g)));
            row
        })
        .collect();
    validate_profile(rows).expect("valid fixture")
}

/// The allocated (last) element of each prefix.
pub fn table1_circled() -> Permutation {
    Permutation::new(TABLE1_PREFIXES.iter().map(|r| *r.last().unwrap()).collect()).expect("valid fixture")
}

/// A priority order whose first-come first-served allocation on
/// [`table1_profile`] is [`table1_circled`].
pub fn table1_priority() -> Permutation {
    Permutation::new(vec![5, 3, 4, 9, 1, 8, 2, 7, 6]).expect("valid fixture")
}

/// The shuffling that corresponds to [`table1_priority`].
pub fn table2_sigma() -> Permutation {
    Permutation::new(vec![5, 7, 9, 2, 1, 8, 6, 4, 3]).expect("valid fixture")
}

/// [`table1_profile`] shuffled by [`table2_sigma`].
pub fn table2_profile() -> PreferenceProfile {
    shuffle_profile(&table1_profile(), &table2_sigma()).expect("valid fixture")
}
