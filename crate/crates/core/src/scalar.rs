//! Scalar types used for utilization ratios.
//!
//! Tile counts and bit-products are integers; the ratios derived from them
//! can be carried as `f32`, `f64`, or exactly as `Ratio<u64>`.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

pub trait Proportion: Clone + Debug + PartialOrd + Zero + One {
    /// `num / den`. `den` must be nonzero.
    fn from_counts(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;
}

macro_rules! float_proportion {
    ($($t:ty),*) => {$(
        impl Proportion for $t {
            fn from_counts(num: u64, den: u64) -> Self {
                debug_assert!(den != 0);
                (num as f64 / den as f64) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

float_proportion!(f32, f64);

impl Proportion for Ratio<u64> {
    fn from_counts(num: u64, den: u64) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Rounds to four decimal places, the precision used in reports.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_float_agree() {
        let exact = Ratio::<u64>::from_counts(90, 324);
        assert_eq!(exact, Ratio::new(5, 18));
        let f = f64::from_counts(90, 324);
        assert!((Proportion::to_f64(&exact) - f).abs() < 1e-15);
        assert_eq!(round4(f), 0.2778);
        assert_eq!(f32::from_counts(1, 4), 0.25f32);
    }
}
