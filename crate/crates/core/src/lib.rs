//! Exact computational models of the Morava E-cohomology of finite abelian
//! p-groups and their iterated free loop spaces.
//!
//! The crate is organised in layers:
//!
//! - [`groups`]: finite abelian p-groups, duality, subgroup families and the
//!   enumeration of level structures and subgroups on `(Q_p/Z_p)^m`.
//! - [`fgl`]: formal group laws (multiplicative over the integers, Honda over
//!   `F_p`), p-series and formal sums.
//! - [`linalg`]: exact lattice and vector space routines (lattices over the
//!   p-local integers, vector spaces over `Q` and `F_p`).
//! - [`ering`]: finite free models of `E^0(BA)`, Euler classes, transfer
//!   ideals, quotients and Artinian localizations.
//! - [`loopspace`]: the product model of `E^0(L^h BA)` and the rational
//!   class-function model.
//! - [`verify`]: parameterised identity checks producing [`verify::CheckReport`]s.
//! - [`cli`]: the command line front end.

pub mod cli;
pub mod ering;
pub mod error;
pub mod fgl;
pub mod groups;
pub mod linalg;
pub mod loopspace;
pub mod verify;

pub use error::{Error, Result};

/// Default bound on the size of any single enumeration.
pub const DEFAULT_BUDGET: u128 = 1 << 22;
