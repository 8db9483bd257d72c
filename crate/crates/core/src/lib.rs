//! Deterministic compressed-sensing matrices built from k-th power residues
//! modulo a prime, together with the character-sum machinery that explains
//! their Gram matrices and tools to measure their coherence, flat-RIP and RIP
//! constants.

pub mod characters;
pub mod cli;
pub mod error;
pub mod field;
pub mod matrix;
pub mod matrix_file;
pub mod primes;
pub mod recovery;
pub mod rip;
pub mod sampling;
pub mod suite;

pub use characters::{additive_char, power_gauss_sum, verify_gauss_identity, ComplexValue, MultCharSpec};
pub use error::{Error, Result};
pub use field::{divisors, is_prime, kth_power_residues, primitive_root, PrimeField, ResidueSet};
pub use matrix::{welch_bound, Coherence, SensingMatrix, Variant};

pub const TOOL_NAME: &str = "residue-sense";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
