//! Executable coarse geometry on finite extended pseudo-metric spaces.
//!
//! The crate builds partitions of unity from covers, assembles them into trees
//! of partitions of unity, converts decomposition trees into such trees, and
//! measures every continuity modulus exhaustively so that the classical bounds
//! can be certified instance by instance.
//!
//! Layout:
//! - [`metric`]: finite spaces, point sets, balls, wedges, generators.
//! - [`cover_pu`]: covers, chain indices, partitions of unity and their moduli.
//! - [`pu_tree`]: trees of partitions of unity and the induced partition.
//! - [`decomp`]: decomposition trees, layered decompositions, greedy nets, annuli.
//! - [`json`]: the on-disk JSON formats.

pub mod cover_pu;
pub mod decomp;
pub mod error;
pub mod ext_real;
pub mod json;
pub mod metric;
pub mod pu_tree;

pub use cover_pu::{
    blend, characteristic_pu, continuity_modulus, index, l1_normalize, lebesgue_number, mix, multiplicity, natural_pu,
    trim, ChainIndex, ContinuityReport, Cover, PartitionOfUnity, SparseVec,
};
pub use decomp::{
    annuli_tree, check_decomposition, cover_from_decomposition, decomp_to_pu_tree, enlarge_tree, greedy_nets,
    validate_decomp_tree, ContinuitySchedule, Conversion, DecompTree, Decomposition, LevelSchedule, PropertyPredicate,
    UniformlyBounded,
};
pub use error::{DecompError, FormatError, MetricError, PuError};
pub use ext_real::{ExtReal, TOL};
pub use metric::{validate_space, wedge, FiniteSpace, PointSet};
pub use pu_tree::{induced_pu, modulus_profile, truncate_at_depth, validate_pu_tree, PuTree};
