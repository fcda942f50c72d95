//! Exact probabilistic zeta functions of finite groups.
//!
//! The library computes `P_G(s) = sum_n a_n(G) / n^s`, where `a_n(G)` sums
//! the subgroup-lattice Möbius function over subgroups of index `n`, together
//! with its formal inverse. Small groups go through full lattice enumeration
//! ([`permgroup`], [`moebius`]); products too large to enumerate are
//! described by [`catalog::SeriesRecipe`] and assembled from product
//! formulas. [`construct`] replays the alternating-power construction that
//! removes negative coefficients from the inverse one index at a time.

pub mod cache;
pub mod catalog;
pub mod construct;
pub mod dseries;
pub mod moebius;
pub mod permgroup;

pub use catalog::SeriesRecipe;
pub use dseries::DirichletSeries;
pub use moebius::MoebiusTable;
pub use permgroup::{GroupSpec, PermGroup, Subgroup, SubgroupLattice};
