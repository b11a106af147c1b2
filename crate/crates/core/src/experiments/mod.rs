//! Exhaustive and Monte-Carlo oracles, and the stable-marriage studies.

pub mod checkpoint;
pub mod distribution;
pub mod marriage;
pub mod montecarlo;
pub mod scan;

pub use checkpoint::{run_marriage_totals_checkpointed, MarriageCheckpoint};
pub use distribution::{
    exhaustive_rank_distribution, exhaustive_rank_distribution_chunked, profile_at, profile_count,
    rank_distribution_for_range, rank_distribution_over, AllocationMethod, RankDistribution,
};
pub use marriage::{
    boys_matrix_at, cyclic_girls, equal_girls, gale_shapley_male_optimal, marriage_totals,
    marriage_totals_for_range, total_marriage_rank_sum, MarriageInstance, MarriageTotals, RankConvention,
};
pub use montecarlo::{monte_carlo_summary, random_permutation, random_profile, block_rng, MonteCarloSummary, SimulationMethod};
pub use scan::{class_sizes_by_counting, conjecture_scan, girls_canonical_form, girls_class_size, girls_isomorphism_classes, ClassRecord, ScanReport};
