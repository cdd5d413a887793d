//! Reference multiplier used to cross-check the tiled datapath.
//!
//! Shares nothing with the tile or partition code: operands are unpacked
//! straight from raw bits, the significand product is an arbitrary
//! precision integer, and rounding compares the discarded remainder against
//! half an ulp rather than looking at guard/round/sticky bits.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::fpmul::{Flags, FpFormat, RoundingMode};

struct Fields {
    sign: bool,
    exp: u128,
    frac: u128,
}

fn split(format: FpFormat, raw: u128) -> Fields {
    Fields {
        sign: (raw >> (format.total_bits - 1)) & 1 == 1,
        exp: (raw >> format.frac_bits) & ((1 << format.exp_bits) - 1),
        frac: raw & ((1 << format.frac_bits) - 1),
    }
}

/// Multiplies two raw bit patterns of `format`, returning the raw result
/// and the exception flags.
pub fn reference_multiply(format: FpFormat, a: u128, b: u128, mode: RoundingMode) -> (u128, Flags) {
    let fb = format.frac_bits as i64;
    let exp_max = (1u128 << format.exp_bits) - 1;
    let bias = (1i64 << (format.exp_bits - 1)) - 1;
    let quiet = 1u128 << (fb - 1);
    let sign_bit = 1u128 << (format.total_bits - 1);
    let pack = |sign: bool, e: u128, f: u128| -> u128 {
        (if sign { sign_bit } else { 0 }) | (e << fb) | f
    };

    let x = split(format, a);
    let y = split(format, b);
    let is_nan = |v: &Fields| v.exp == exp_max && v.frac != 0;
    let is_snan = |v: &Fields| is_nan(v) && v.frac & quiet == 0;
    let is_inf = |v: &Fields| v.exp == exp_max && v.frac == 0;
    let is_zero = |v: &Fields| v.exp == 0 && v.frac == 0;

    if is_nan(&x) || is_nan(&y) {
        let flags = if is_snan(&x) || is_snan(&y) {
            Flags::INVALID
        } else {
            Flags::empty()
        };
        let src = if is_nan(&x) { a } else { b };
        return (src | quiet, flags);
    }
    let sign = x.sign != y.sign;
    if (is_inf(&x) && is_zero(&y)) || (is_zero(&x) && is_inf(&y)) {
        return (pack(false, exp_max, quiet), Flags::INVALID);
    }
    if is_inf(&x) || is_inf(&y) {
        return (pack(sign, exp_max, 0), Flags::empty());
    }
    if is_zero(&x) || is_zero(&y) {
        return (pack(sign, 0, 0), Flags::empty());
    }

    // value = m * 2^(e - fb)
    let unpack = |v: &Fields| -> (u128, i64) {
        if v.exp == 0 {
            (v.frac, 1 - bias)
        } else {
            (v.frac | (1 << fb), v.exp as i64 - bias)
        }
    };
    let (ma, ea) = unpack(&x);
    let (mb, eb) = unpack(&y);
    let m = BigUint::from(ma) * BigUint::from(mb);
    let e = ea + eb - 2 * fb; // value = m * 2^e

    let emin = 1 - bias;
    let top = m.bits() as i64 - 1 + e;
    let tiny = top < emin;
    // exponent of the result's unit in the last place
    let mut ulp = (top - fb).max(emin - fb);

    let (mut n, remainder, inexact) = if ulp <= e {
        (m << ((e - ulp) as usize), Ordering::Less, false)
    } else {
        let k = (ulp - e) as usize;
        let n = &m >> k;
        let r = &m - (&n << k);
        let half = BigUint::one() << (k - 1);
        (n, r.cmp(&half), !r.is_zero())
    };
    let odd = (&n & BigUint::one()).is_one();
    let up = match mode {
        RoundingMode::NearestEven => {
            remainder == Ordering::Greater || (remainder == Ordering::Equal && odd)
        }
        RoundingMode::TowardZero => false,
        RoundingMode::TowardPositive => inexact && !sign,
        RoundingMode::TowardNegative => inexact && sign,
    };
    if up {
        n += 1u32;
    }
    if n.bits() as i64 > fb + 1 {
        n >>= 1;
        ulp += 1;
    }
    let n = n.to_u128().expect("rounded significand fits");

    let mut flags = Flags::empty();
    if inexact {
        flags |= Flags::INEXACT;
        if tiny {
            flags |= Flags::UNDERFLOW;
        }
    }

    let biased = if n >> fb != 0 { ulp + fb + bias } else { 0 };
    if biased >= exp_max as i64 {
        let max_finite = pack(sign, exp_max - 1, (1 << fb) - 1);
        let inf = pack(sign, exp_max, 0);
        let r = match mode {
            RoundingMode::NearestEven => inf,
            RoundingMode::TowardZero => max_finite,
            RoundingMode::TowardPositive => if sign { max_finite } else { inf },
            RoundingMode::TowardNegative => if sign { inf } else { max_finite },
        };
        return (r, Flags::OVERFLOW | Flags::INEXACT);
    }
    (pack(sign, biased as u128, n & ((1 << fb) - 1)), flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_host_on_simple_values() {
        for (a, b) in [(1.5f64, 2.5f64), (0.1, 0.3), (1e300, 1e10), (5e-324, 0.5), (-3.0, 7.0)] {
            let (r, _) = reference_multiply(
                FpFormat::DOUBLE,
                a.to_bits() as u128,
                b.to_bits() as u128,
                RoundingMode::NearestEven,
            );
            assert_eq!(f64::from_bits(r as u64), a * b, "{a} * {b}");
        }
    }

    #[test]
    fn special_rules() {
        let s = FpFormat::SINGLE;
        let m = RoundingMode::NearestEven;
        assert_eq!(reference_multiply(s, 0x7F80_0000, 0, m), (0x7FC0_0000, Flags::INVALID));
        assert_eq!(reference_multiply(s, 0xFF80_0000, 0x3F80_0000, m), (0xFF80_0000, Flags::empty()));
        assert_eq!(reference_multiply(s, 0x8000_0000, 0x3F80_0000, m), (0x8000_0000, Flags::empty()));
    }
}
