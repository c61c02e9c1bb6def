//! Covers, chain indices, and partitions of unity.
//!
//! A [`PartitionOfUnity`] maps each point of its domain to a sparse
//! nonnegative weight vector of unit ℓ¹ norm over a label set. The
//! constructors here are the ones the coarse-geometric arguments need: the
//! natural partition of a cover built from chain indices, normalized
//! characteristic functions, mixing along strata, blending, and trimming.

mod construct;
mod cover;
mod partition;

pub use construct::{blend, characteristic_pu, mix, natural_pu, trim};
pub use cover::{hop_indices, index, lebesgue_number, multiplicity, ChainIndex, Cover};
pub use partition::{continuity_modulus, l1_normalize, ContinuityReport, PartitionOfUnity, SparseVec};
