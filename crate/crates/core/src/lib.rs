//! Core allocations in housing markets with strict preferences.
//!
//! * [`alloc`]: the unique core allocation by top-trading-cycle removal,
//!   first-come first-served allocation under a priority order, and
//!   brute-force coalition checks.
//! * [`bijection`]: the correspondence between priority orders and
//!   shufflings of the preference lists.
//! * [`exact_stats`]: closed-form rank statistics for uniformly random
//!   profiles, in exact rational arithmetic.
//! * [`experiments`]: exhaustive enumeration, seeded Monte-Carlo sampling,
//!   and stable-marriage rank totals.
//!
//! Traders, goods and ranks are 1-based throughout.

pub mod alloc;
pub mod bijection;
pub mod error;
pub mod exact_stats;
pub mod experiments;
pub mod fixtures;
pub mod permutation;
pub mod poly;
pub mod profile;

pub use alloc::{
    is_core_allocation, is_core_allocation_bounded, is_locally_optimal, is_locally_optimal_bounded,
    priority_reconstruction, stable_allocation, stable_allocation_with, uniform_hash_allocation, AllocationResult,
    EntryPolicy, DEFAULT_BRUTE_FORCE_BOUND,
};
pub use bijection::{is_consistent, pi_to_sigma, sigma_to_pi, TruncatedTableau};
pub use error::{Error, Result};
pub use permutation::Permutation;
pub use poly::{format_rational, parse_rational, ExactRational, RationalPolynomial};
pub use profile::{shuffle_profile, validate_profile, PreferenceProfile};
