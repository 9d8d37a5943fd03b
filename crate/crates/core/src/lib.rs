//! Exact finite metric spaces and their isometry groups.
//!
//! Covers isometry search, realization of permutation groups as full
//! isometry groups of finite metric spaces, rigid two-valued metrics, and
//! linear symmetries of the unit ball of the Arens-Eells space. All
//! arithmetic is exact over the rationals.

#![no_std]

extern crate alloc;

pub mod cayley;
pub mod free_space;
pub mod group;
pub mod lp;
pub mod metric;
pub mod rational;
pub mod realization;
pub mod rigidity;
pub mod search;

#[cfg(any(test, feature = "oracles"))]
pub mod oracles;
