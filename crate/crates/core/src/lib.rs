//! Exact computations around Levin's base-2 normal number.

pub mod discrepancy;
pub mod gf2;
pub mod levin;
pub mod lowerbound;
pub mod pascal;
pub mod scalar;
pub mod verify;

pub use discrepancy::{DyadicInterval, GrowthRow};
pub use levin::{LevinNumber, PointSet};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type ExactGrowthRow = GrowthRow<Rational>;
pub type ApproxGrowthRow = GrowthRow<f64>;
