//! Exact privacy analysis for index-coded broadcast transmissions.
//!
//! A server satisfies clients' requests over a shared broadcast
//! channel by sending linear combinations of its messages; a curious
//! client who learns the encoding matrix can narrow down what another
//! client asked for and what she already holds. This crate builds the
//! block-MDS encoding matrices that defend against that inference,
//! enumerates exactly which (request, side-information) pairs each
//! matrix can serve, computes the eavesdropper's posterior entropies
//! without approximation, and cross-checks every closed-form count and
//! entropy expression against brute-force enumeration.
//!
//! Modules:
//!
//! - [`field`]: exact arithmetic and linear algebra over GF(L)
//! - [`construction`]: MDS generators, block base matrices, segment
//!   patterns
//! - [`decodability`]: the span-membership decodability test,
//!   exhaustive enumeration, constructive message recovery
//! - [`bounds`]: universal bounds, closed-form decodable counts, and
//!   the exact Bayesian posterior engine
//! - [`scheme`]: the single-request transmission scheme, its uniform
//!   pattern sampler, and its closed-form privacy levels
//! - [`analysis`]: trade-off sweeps, asymptotic gap tables, and the
//!   self-verification harness
//! - [`counting`]: arbitrary-precision combinatorics shared by the
//!   rest

pub mod analysis;
pub mod bounds;
pub mod construction;
pub mod counting;
pub mod decodability;
pub mod error;
pub mod field;
pub mod scheme;

pub use bounds::{
    base_matrix_pair_count, base_matrix_request_count, check_uniformity, posterior_entropies,
    universal_bounds, Conditioning, DecodableBounds, PrivacyReport, StrategyTable, UniformityFlags,
    BITS_TOL,
};
pub use construction::{
    build_base_matrix, canonical_pattern, enumerate_patterns, is_mds, vandermonde_generator,
    SchemeParams, SegmentPattern,
};
pub use decodability::{
    enumerate_decodable, is_decodable, recover_message, ClientPair, DecodableSets,
};
pub use error::{Error, Result};
pub use field::{in_span, solve_left, FieldConfig, FieldMatrix};
pub use scheme::{CountRoute, SingleRequestParams, SumRoute};
