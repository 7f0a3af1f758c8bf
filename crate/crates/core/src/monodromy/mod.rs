//! Permutation algebra, words in keyhole generators, and fundamental loop
//! systems.

mod permutation;
mod system;
mod word;

pub use self::permutation::Permutation;
pub use self::system::{
    accidental_equivalence_search, build_generators, conjugate_base_change, from_loops,
    word_permutation, FlOptions, FundamentalLoopSystem, KERNEL_SEARCH_LIMIT,
};
pub use self::word::{Letter, Word};
