//! Finite free models of `E^0(BA)`, their transfer ideals, quotients and
//! localizations.

mod algebra;
mod ideal;
mod induced;
mod localize;
mod oracle;
mod quotient;

pub use algebra::{required_truncation, CoefficientMode, EAlgebra, RingElement};
pub use ideal::{transfer_ideal, transfer_unit, IdealLattice, Lattice};
pub use induced::{induced_map, quotient_compatibility, RingMap};
pub use localize::{divisibility_witness, euler_set, factorization_witness, localize, EulerSet, Field, LocalizationImage};
pub use oracle::{group_ring_image, oracle_ideal, representation_oracle, GroupRingElement};
pub use quotient::{quotient, quotient_json, saturated_relations, QuotientModule};
