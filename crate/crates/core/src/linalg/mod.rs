//! Exact linear algebra used by the ring computations.

pub mod intmat;
pub mod fp;
pub mod plattice;
pub mod rational;
