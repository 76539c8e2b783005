//! Scalar types the discrepancy engines can report in.
//!
//! Every engine counts exactly with integers. The [`Scalar`] trait is only the
//! boundary where an exact count becomes a value: [`BigRational`] keeps it
//! exact, `f64`/`f32` give quick approximations for plotting.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Numeric type that discrepancy values and growth columns can be expressed in.
pub trait Scalar:
    Num + Signed + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync
{
    /// `num / den`; `den` must be non-zero.
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self;

    /// `num / 2^exp`.
    fn from_dyadic(num: u128, exp: u32) -> Self {
        Self::from_ratio(&BigInt::from(num), &(BigInt::from(1u8) << exp as usize))
    }

    fn from_count(count: u64) -> Self {
        Self::from_u64(count).expect("count representable in every scalar")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
        BigRational::new(num.clone(), den.clone())
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_ratio(num: &BigInt, den: &BigInt) -> Self {
                // Shift both sides into range before dividing so huge dyadic
                // denominators do not overflow to inf/inf.
                let shift = num.bits().max(den.bits()).saturating_sub(1000);
                let n = (num >> shift as usize).to_f64().unwrap_or(0.0);
                let d = (den >> shift as usize).to_f64().unwrap_or(1.0);
                (n / d) as $f
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);
