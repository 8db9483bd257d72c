//! Restricted-isometry diagnostics: flat-RIP and RIP constants, double
//! character sums and the chain of bounds connecting them.

pub mod chain;
pub mod double_sum;
pub mod flat;
pub mod params;

pub use chain::{verify_inner_product_chain, ChainReport};
pub use double_sum::{
    character_double_sum, square_root_check, test_property_p, verify_square_root_bound, BoundKind,
    DoubleSumReport, PropertyMode, ProofCase, SquareRootParams,
};
pub use flat::{
    flat_ratio, flat_rip_exhaustive, flat_rip_sampled, rip_delta_exhaustive, rip_from_flat,
    FlatRipReport, RipDeltaReport, SearchMode,
};
pub use params::{validate_params, AnalysisParams, ParamReport};

/// Default cap on enumerated pairs or supports for exhaustive searches.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "RESIDUE_SENSE_BUDGET";

/// [`DEFAULT_BUDGET`] unless `RESIDUE_SENSE_BUDGET` holds a positive integer.
pub fn budget_from_env() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_BUDGET)
}
