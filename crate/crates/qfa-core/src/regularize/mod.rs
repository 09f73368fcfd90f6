//! Atomicity of partitions, dense uniform cosets, greedy linear
//! regularization with factor chains, and small exhaustive quadratic search.

mod atomicity;
mod coset;
mod engine;
mod extraction;
mod quadbrute;

pub use atomicity::{aqale_check, atomicity_check, factor_atomicity, part_class, refinement_stability_check, AqaleVerdict, AtomicityVerdict, RefinementCheck};
pub use coset::{coset_uniformity, find_dense_subspace, find_uniform_dense_coset, Coset, DenseSubspace, EncodingEvidence, UniformCoset};
pub use engine::{factor_chain_check, stable_linear_decomposition, ChainStep, ChainVerdict, EngineBudget, FactorChain, RoundRecord, StableDecomposition};
pub use extraction::{fop2_guided_extraction, scarcity_check, Extraction, ScarcityCheck};
pub use quadbrute::{brute_quad_atomize, BRUTE_MAX_N, BRUTE_MAX_Q};
