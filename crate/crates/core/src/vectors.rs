//! Operand generators for equivalence testing: random bit patterns biased
//! toward the interesting corners, directed special values, and exact
//! rounding ties.

use rand::Rng;

use crate::fpmul::FpFormat;

fn pack(format: FpFormat, sign: bool, exp_field: u128, frac: u128) -> u128 {
    ((sign as u128) << (format.total_bits - 1)) | (exp_field << format.frac_bits) | frac
}

fn exp_all_ones(format: FpFormat) -> u128 {
    (1 << format.exp_bits) - 1
}

fn frac_mask(format: FpFormat) -> u128 {
    (1 << format.frac_bits) - 1
}

pub fn random_bits<R: Rng + ?Sized>(format: FpFormat, rng: &mut R) -> u128 {
    let raw: u128 = rng.random();
    if format.total_bits == 128 {
        raw
    } else {
        raw & ((1 << format.total_bits) - 1)
    }
}

fn random_frac<R: Rng + ?Sized>(format: FpFormat, rng: &mut R) -> u128 {
    let raw: u128 = rng.random();
    let frac = raw & frac_mask(format);
    match rng.random_range(0..6) {
        // sparse: few set bits, produces many exact and tie products
        0 => frac & (rng.random::<u128>() & rng.random::<u128>() & rng.random::<u128>()),
        // long run of ones from the top
        1 => frac_mask(format) & !(frac_mask(format) >> rng.random_range(0..=format.frac_bits)),
        // long run of ones from the bottom
        2 => frac_mask(format) >> rng.random_range(0..=format.frac_bits),
        _ => frac,
    }
}

/// A finite value with unbiased exponent clamped into the normal range,
/// or a subnormal when the exponent falls below it.
fn with_exponent<R: Rng + ?Sized>(format: FpFormat, exponent: i64, rng: &mut R) -> u128 {
    let sign = rng.random();
    let e = exponent.clamp(format.emin() - 1, format.emax());
    let field = (e + format.bias()) as u128;
    let mut frac = random_frac(format, rng);
    if field == 0 && frac == 0 {
        frac = 1;
    }
    pack(format, sign, field, frac)
}

fn special<R: Rng + ?Sized>(format: FpFormat, rng: &mut R) -> u128 {
    let values = directed_values(format);
    values[rng.random_range(0..values.len())]
}

/// A random operand pair, mixing uniform bit patterns with pairs aimed at
/// the overflow and underflow thresholds, subnormals and special values.
pub fn random_pair<R: Rng + ?Sized>(format: FpFormat, rng: &mut R) -> (u128, u128) {
    let span = format.emax() - format.emin();
    let rand_exp = |rng: &mut R| format.emin() + rng.random_range(0..=span);
    match rng.random_range(0..10) {
        0..=2 => (random_bits(format, rng), random_bits(format, rng)),
        3 | 4 => {
            // product near 1.0 in magnitude
            let ea = rng.random_range(-8..=8);
            let eb = rng.random_range(-8..=8);
            (with_exponent(format, ea, rng), with_exponent(format, eb, rng))
        }
        5 => {
            // product near the bottom of the normal range
            let ea = rand_exp(rng);
            let delta = rng.random_range(-(format.sig_bits() as i64) - 3..=3);
            let eb = format.emin() + delta - ea;
            (with_exponent(format, ea, rng), with_exponent(format, eb, rng))
        }
        6 => {
            // product near the overflow threshold
            let ea = rand_exp(rng);
            let eb = format.emax() + rng.random_range(-2..=1) - ea;
            (with_exponent(format, ea, rng), with_exponent(format, eb, rng))
        }
        7 => {
            // subnormal times something large
            let sub = pack(format, rng.random(), 0, random_frac(format, rng).max(1));
            let e = rng.random_range(0..=format.emax());
            (sub, with_exponent(format, e, rng))
        }
        8 => {
            let (x, y) = (special(format, rng), random_bits(format, rng));
            if rng.random() { (x, y) } else { (y, x) }
        }
        _ => (special(format, rng), special(format, rng)),
    }
}

/// Signed zeros, extreme subnormals and normals, small integers, infinities
/// and quiet/signaling NaNs with assorted payloads.
pub fn directed_values(format: FpFormat) -> Vec<u128> {
    let all = exp_all_ones(format);
    let fm = frac_mask(format);
    let bias = format.bias() as u128;
    let quiet = 1 << (format.frac_bits - 1);
    let mut out = Vec::new();
    for sign in [false, true] {
        out.extend([
            pack(format, sign, 0, 0),
            pack(format, sign, 0, 1),
            pack(format, sign, 0, fm),
            pack(format, sign, 0, quiet),
            pack(format, sign, 1, 0),
            pack(format, sign, 1, fm),
            pack(format, sign, all - 1, 0),
            pack(format, sign, all - 1, fm),
            pack(format, sign, bias, 0),
            pack(format, sign, bias, 1),
            pack(format, sign, bias, quiet),
            pack(format, sign, bias, fm),
            pack(format, sign, bias - 1, 0),
            pack(format, sign, bias + 1, 0),
            pack(format, sign, all, 0),
            pack(format, sign, all, quiet),
            pack(format, sign, all, quiet | 0x5),
            pack(format, sign, all, 1),
            pack(format, sign, all, fm & !quiet),
        ]);
    }
    out
}

/// Pairs whose exact product lies exactly halfway between two
/// representable values: an odd significand times 1.5, kept small enough
/// that the product does not gain a bit.
///
/// `exp_sum` sets the product's exponent; choose it near `emin` to get ties
/// at the subnormal boundary.
pub fn halfway_pair<R: Rng + ?Sized>(format: FpFormat, exp_sum: i64, rng: &mut R) -> (u128, u128) {
    let p = format.frac_bits;
    // significand in [2^p, 4/3 * 2^p), odd
    let limit = (1u128 << p) / 3;
    let frac = (rng.random::<u128>() % limit) | 1;
    let ea = exp_sum.clamp(format.emin(), format.emax());
    let eb = (exp_sum - ea).clamp(format.emin(), format.emax());
    let a = pack(format, rng.random(), (ea + format.bias()) as u128, frac);
    let b = pack(format, rng.random(), (eb + format.bias()) as u128, 1 << (p - 1));
    (a, b)
}
