//! Formal group law arithmetic.

mod honda;
mod series;

pub use honda::{artin_hasse_minus_one, honda_law, honda_multiple_from_log, FglSpec, FglVariant};
pub use series::{variable_names, Series, Truncation};
