//! IEEE-754 binary multiplication whose significand products run through
//! the tile plans.
//!
//! Single precision uses one 24x24 tile, double precision the 57-bit plan
//! and quadruple precision the 114-bit plan. Everything around the
//! significand product (unpacking, normalization, rounding, special values)
//! follows IEEE-754 binary interchange conventions.
//!
//! Conventions where the standard leaves a choice:
//! - tininess is detected before rounding;
//! - a NaN operand is returned quieted, the first operand's NaN winning;
//! - invalid operations produce the positive default quiet NaN.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use bitflags::bitflags;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{execute_plan_with, plan_generic, plan_p114, plan_p57, PartitionPlan};
use crate::tiles::{ExactTiles, TileMultiplier, TileSet, T24X24};
use crate::wideint::WideUint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FpFormat {
    pub name: &'static str,
    pub total_bits: usize,
    pub exp_bits: usize,
    pub frac_bits: usize,
}

impl FpFormat {
    pub const SINGLE: FpFormat = FpFormat {
        name: "single",
        total_bits: 32,
        exp_bits: 8,
        frac_bits: 23,
    };
    pub const DOUBLE: FpFormat = FpFormat {
        name: "double",
        total_bits: 64,
        exp_bits: 11,
        frac_bits: 52,
    };
    pub const QUAD: FpFormat = FpFormat {
        name: "quad",
        total_bits: 128,
        exp_bits: 15,
        frac_bits: 112,
    };

    pub const ALL: [FpFormat; 3] = [Self::SINGLE, Self::DOUBLE, Self::QUAD];

    pub fn by_name(name: &str) -> Option<FpFormat> {
        Self::ALL.into_iter().find(|f| f.name == name)
    }

    pub const fn sign_bits(&self) -> usize {
        1
    }

    pub const fn bias(&self) -> i64 {
        (1 << (self.exp_bits - 1)) - 1
    }

    /// Precision including the hidden bit.
    pub const fn sig_bits(&self) -> usize {
        self.frac_bits + 1
    }

    pub const fn emin(&self) -> i64 {
        1 - self.bias()
    }

    pub const fn emax(&self) -> i64 {
        self.bias()
    }

    pub const fn hex_digits(&self) -> usize {
        self.total_bits / 4
    }

    const fn exp_all_ones(&self) -> u128 {
        (1 << self.exp_bits) - 1
    }

    const fn frac_mask(&self) -> u128 {
        (1 << self.frac_bits) - 1
    }

    const fn quiet_bit(&self) -> u128 {
        1 << (self.frac_bits - 1)
    }

    fn pack(&self, sign: bool, exp_field: u128, frac: u128) -> u128 {
        ((sign as u128) << (self.total_bits - 1)) | (exp_field << self.frac_bits) | frac
    }

    pub fn default_nan(&self) -> FpValue {
        self.raw(self.pack(false, self.exp_all_ones(), self.quiet_bit()))
    }

    pub fn infinity(&self, sign: bool) -> FpValue {
        self.raw(self.pack(sign, self.exp_all_ones(), 0))
    }

    pub fn zero(&self, sign: bool) -> FpValue {
        self.raw(self.pack(sign, 0, 0))
    }

    pub fn max_finite(&self, sign: bool) -> FpValue {
        self.raw(self.pack(sign, self.exp_all_ones() - 1, self.frac_mask()))
    }

    pub fn one(&self) -> FpValue {
        self.raw(self.pack(false, self.bias() as u128, 0))
    }

    fn raw(&self, bits: u128) -> FpValue {
        FpValue::from_u128(*self, bits).expect("packed fields fit the format")
    }
}

impl fmt::Display for FpFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FpClass {
    Zero,
    Subnormal,
    Normal,
    Infinity,
    Nan,
}

/// A packed value in one of the interchange formats.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpValue {
    format: FpFormat,
    bits: WideUint,
}

impl FpValue {
    pub fn new(format: FpFormat, bits: WideUint) -> Result<Self> {
        let bits = bits.resize(format.total_bits)?;
        Ok(FpValue { format, bits })
    }

    pub fn from_u128(format: FpFormat, raw: u128) -> Result<Self> {
        Ok(FpValue {
            format,
            bits: WideUint::from_u128(raw, format.total_bits)?,
        })
    }

    /// Big-endian hex of exactly `total_bits / 4` digits.
    pub fn from_hex(format: FpFormat, text: &str) -> Result<Self> {
        if text.len() != format.hex_digits() {
            return Err(Error::Parse {
                text: text.to_owned(),
                reason: match format.hex_digits() {
                    8 => "single values take exactly 8 hex digits",
                    16 => "double values take exactly 16 hex digits",
                    _ => "quad values take exactly 32 hex digits",
                },
            });
        }
        Ok(FpValue {
            format,
            bits: WideUint::from_hex(text, format.total_bits)?,
        })
    }

    pub fn format(&self) -> FpFormat {
        self.format
    }

    pub fn bits(&self) -> &WideUint {
        &self.bits
    }

    pub fn to_u128(&self) -> u128 {
        self.bits.to_u128().expect("formats are at most 128 bits")
    }

    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }

    pub fn sign(&self) -> bool {
        self.bits.bit(self.format.total_bits - 1)
    }

    fn exp_field(&self) -> u128 {
        (self.to_u128() >> self.format.frac_bits) & self.format.exp_all_ones()
    }

    fn frac_field(&self) -> u128 {
        self.to_u128() & self.format.frac_mask()
    }

    pub fn class(&self) -> FpClass {
        let (e, f) = (self.exp_field(), self.frac_field());
        match (e, f) {
            (0, 0) => FpClass::Zero,
            (0, _) => FpClass::Subnormal,
            (e, 0) if e == self.format.exp_all_ones() => FpClass::Infinity,
            (e, _) if e == self.format.exp_all_ones() => FpClass::Nan,
            _ => FpClass::Normal,
        }
    }

    pub fn is_nan(&self) -> bool {
        self.class() == FpClass::Nan
    }

    pub fn is_signaling_nan(&self) -> bool {
        self.is_nan() && self.frac_field() & self.format.quiet_bit() == 0
    }

    fn quieted(&self) -> FpValue {
        self.format.raw(self.to_u128() | self.format.quiet_bit())
    }
}

impl fmt::Display for FpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// An unpacked value.
///
/// For normals the significand has the hidden bit set at `frac_bits` and
/// `exponent` is unbiased; subnormals have the hidden bit clear and
/// exponent `1 - bias`. Zeros and infinities carry a zero significand and
/// exponent. NaNs carry their fraction field (payload) as the significand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub class: FpClass,
    pub sign: bool,
    pub exponent: i64,
    pub significand: WideUint,
}

pub fn fp_decode(v: &FpValue) -> Decoded {
    let fmt = v.format;
    let class = v.class();
    let frac = v.frac_field();
    let (exponent, sig) = match class {
        FpClass::Normal => (
            v.exp_field() as i64 - fmt.bias(),
            frac | (1 << fmt.frac_bits),
        ),
        FpClass::Subnormal => (fmt.emin(), frac),
        FpClass::Nan => (0, frac),
        FpClass::Zero | FpClass::Infinity => (0, 0),
    };
    Decoded {
        class,
        sign: v.sign(),
        exponent,
        significand: WideUint::from_u128(sig, fmt.sig_bits()).unwrap(),
    }
}

pub fn fp_encode(d: &Decoded, format: FpFormat) -> Result<FpValue> {
    let contract = |msg: &str| Err(Error::Contract(format!("{msg} ({format})")));
    let sig = match d.significand.to_u128() {
        Some(s) if d.significand.bit_len() <= format.sig_bits() => s,
        _ => return contract("significand wider than the format"),
    };
    let range = || Error::Range {
        format: format.name,
        exponent: d.exponent,
    };
    let raw = match d.class {
        FpClass::Zero => {
            if sig != 0 {
                return contract("zero with nonzero significand");
            }
            format.pack(d.sign, 0, 0)
        }
        FpClass::Infinity => {
            if sig != 0 {
                return contract("infinity with nonzero significand");
            }
            format.pack(d.sign, format.exp_all_ones(), 0)
        }
        FpClass::Nan => {
            if sig == 0 || sig > format.frac_mask() {
                return contract("NaN payload must be a nonzero fraction");
            }
            format.pack(d.sign, format.exp_all_ones(), sig)
        }
        FpClass::Normal => {
            if sig >> format.frac_bits != 1 {
                return contract("normal significand must have the hidden bit set");
            }
            if d.exponent < format.emin() || d.exponent > format.emax() {
                return Err(range());
            }
            let e = (d.exponent + format.bias()) as u128;
            format.pack(d.sign, e, sig & format.frac_mask())
        }
        FpClass::Subnormal => {
            if sig == 0 || sig >> format.frac_bits != 0 {
                return contract("subnormal significand must be nonzero with the hidden bit clear");
            }
            if d.exponent != format.emin() {
                return Err(range());
            }
            format.pack(d.sign, 0, sig)
        }
    };
    FpValue::from_u128(format, raw)
}

bitflags! {
    /// IEEE-754 exception flags raised by an operation.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Flags: u8 {
        const INVALID = 1;
        const OVERFLOW = 1 << 1;
        const UNDERFLOW = 1 << 2;
        const INEXACT = 1 << 3;
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<&str> = [
            (Flags::INVALID, "invalid"),
            (Flags::OVERFLOW, "overflow"),
            (Flags::UNDERFLOW, "underflow"),
            (Flags::INEXACT, "inexact"),
        ]
        .iter()
        .filter(|(flag, _)| self.contains(*flag))
        .map(|(_, name)| *name)
        .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum RoundingMode {
    #[default]
    NearestEven,
    TowardZero,
    TowardPositive,
    TowardNegative,
}

impl RoundingMode {
    pub const ALL: [RoundingMode; 4] = [
        RoundingMode::NearestEven,
        RoundingMode::TowardZero,
        RoundingMode::TowardPositive,
        RoundingMode::TowardNegative,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RoundingMode::NearestEven => "nearest-even",
            RoundingMode::TowardZero => "toward-zero",
            RoundingMode::TowardPositive => "toward-positive",
            RoundingMode::TowardNegative => "toward-negative",
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RoundingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown rounding mode {s:?}"))
    }
}

fn cached(cell: &'static OnceLock<PartitionPlan>, build: fn() -> PartitionPlan) -> &'static PartitionPlan {
    cell.get_or_init(build)
}

/// The partition plan that carries `format`'s significand product.
pub fn significand_plan(format: FpFormat) -> Result<&'static PartitionPlan> {
    static SINGLE: OnceLock<PartitionPlan> = OnceLock::new();
    static DOUBLE: OnceLock<PartitionPlan> = OnceLock::new();
    static QUAD: OnceLock<PartitionPlan> = OnceLock::new();
    match format.sig_bits() {
        24 => Ok(cached(&SINGLE, || {
            let mut p = plan_generic(24, 24, &TileSet::civp()).unwrap();
            p.name = "single".into();
            p
        })),
        53 => Ok(cached(&DOUBLE, plan_p57)),
        113 => Ok(cached(&QUAD, plan_p114)),
        n => Err(Error::Contract(format!(
            "no significand plan for {n}-bit precision"
        ))),
    }
}

pub fn sig_multiply(a: &WideUint, b: &WideUint, format: FpFormat) -> Result<WideUint> {
    sig_multiply_with(a, b, format, &ExactTiles)
}

/// Exact `2 * sig_bits`-wide significand product computed on tiles.
///
/// Bits contributed only by zero padding (above `2 * sig_bits`) are checked
/// to be zero before they are dropped.
pub fn sig_multiply_with<M: TileMultiplier + ?Sized>(
    a: &WideUint,
    b: &WideUint,
    format: FpFormat,
    tiles: &M,
) -> Result<WideUint> {
    let s = format.sig_bits();
    if a.width() != s || b.width() != s {
        return Err(Error::Contract(format!(
            "{format} significands are {s} bits, got {} and {}",
            a.width(),
            b.width()
        )));
    }
    let full = if s == 24 {
        tiles.multiply(T24X24, a, b)?
    } else {
        execute_plan_with(significand_plan(format)?, a, b, tiles)?
    };
    full.resize(2 * s)
        .map_err(|_| Error::PadBitsNonZero { width: 2 * s })
}

pub fn fp_multiply(a: &FpValue, b: &FpValue, mode: RoundingMode) -> Result<(FpValue, Flags)> {
    fp_multiply_with(a, b, mode, &ExactTiles)
}

pub fn fp_multiply_with<M: TileMultiplier + ?Sized>(
    a: &FpValue,
    b: &FpValue,
    mode: RoundingMode,
    tiles: &M,
) -> Result<(FpValue, Flags)> {
    let format = a.format;
    if b.format != format {
        return Err(Error::Contract(format!(
            "cannot multiply {} by {}",
            a.format, b.format
        )));
    }
    let da = fp_decode(a);
    let db = fp_decode(b);
    let sign = da.sign ^ db.sign;

    if da.class == FpClass::Nan || db.class == FpClass::Nan {
        let flags = if a.is_signaling_nan() || b.is_signaling_nan() {
            Flags::INVALID
        } else {
            Flags::empty()
        };
        let src = if da.class == FpClass::Nan { a } else { b };
        return Ok((src.quieted(), flags));
    }
    let inf = |c: FpClass| c == FpClass::Infinity;
    let zero = |c: FpClass| c == FpClass::Zero;
    if (inf(da.class) && zero(db.class)) || (zero(da.class) && inf(db.class)) {
        return Ok((format.default_nan(), Flags::INVALID));
    }
    if inf(da.class) || inf(db.class) {
        return Ok((format.infinity(sign), Flags::empty()));
    }
    if zero(da.class) || zero(db.class) {
        return Ok((format.zero(sign), Flags::empty()));
    }

    let product = sig_multiply_with(&da.significand, &db.significand, format, tiles)?;
    Ok(round_product(format, sign, da.exponent + db.exponent, &product, mode))
}

/// Rounds `product * 2^(exp_sum - 2 * frac_bits)` into `format`.
fn round_product(
    format: FpFormat,
    sign: bool,
    exp_sum: i64,
    product: &WideUint,
    mode: RoundingMode,
) -> (FpValue, Flags) {
    let s = format.sig_bits() as i64;
    let len = product.bit_len() as i64;
    debug_assert!(len > 0);

    // exponent of the leading product bit
    let exponent = exp_sum + (len - 1) - 2 * format.frac_bits as i64;
    let tiny = exponent < format.emin();
    let rshift = (len - s) + (format.emin() - exponent).max(0);

    let (kept, guard, sticky) = if rshift <= 0 {
        (product.to_u128().unwrap() << (-rshift), false, false)
    } else {
        let r = rshift as usize;
        (
            product.shr(r).to_u128().unwrap(),
            product.bit(r - 1),
            product.any_below(r - 1),
        )
    };

    let inexact = guard || sticky;
    let round_up = match mode {
        RoundingMode::NearestEven => guard && (sticky || kept & 1 == 1),
        RoundingMode::TowardZero => false,
        RoundingMode::TowardPositive => inexact && !sign,
        RoundingMode::TowardNegative => inexact && sign,
    };
    let mut kept = kept + round_up as u128;
    let mut exponent = exponent.max(format.emin());
    if kept >> s != 0 {
        kept >>= 1;
        exponent += 1;
    }

    let mut flags = Flags::empty();
    if inexact {
        flags |= Flags::INEXACT;
        if tiny {
            flags |= Flags::UNDERFLOW;
        }
    }

    if exponent > format.emax() {
        let to_inf = match mode {
            RoundingMode::NearestEven => true,
            RoundingMode::TowardZero => false,
            RoundingMode::TowardPositive => !sign,
            RoundingMode::TowardNegative => sign,
        };
        let v = if to_inf {
            format.infinity(sign)
        } else {
            format.max_finite(sign)
        };
        return (v, Flags::OVERFLOW | Flags::INEXACT);
    }

    let exp_field = if kept >> format.frac_bits != 0 {
        (exponent + format.bias()) as u128
    } else {
        0
    };
    let raw = format.pack(sign, exp_field, kept & format.frac_mask());
    (format.raw(raw), flags)
}

/// Host floating-point types that share a layout with one of the formats.
pub trait HostFloat: num_traits::Float {
    const FORMAT: FpFormat;

    fn to_raw(self) -> u128;

    fn from_raw(raw: u128) -> Self;
}

impl HostFloat for f32 {
    const FORMAT: FpFormat = FpFormat::SINGLE;

    fn to_raw(self) -> u128 {
        self.to_bits() as u128
    }

    fn from_raw(raw: u128) -> Self {
        f32::from_bits(raw as u32)
    }
}

impl HostFloat for f64 {
    const FORMAT: FpFormat = FpFormat::DOUBLE;

    fn to_raw(self) -> u128 {
        self.to_bits() as u128
    }

    fn from_raw(raw: u128) -> Self {
        f64::from_bits(raw as u64)
    }
}

impl FpValue {
    pub fn from_host<T: HostFloat>(x: T) -> FpValue {
        T::FORMAT.raw(x.to_raw())
    }

    pub fn to_host<T: HostFloat>(&self) -> Option<T> {
        (self.format == T::FORMAT).then(|| T::from_raw(self.to_u128()))
    }
}

/// Multiplies host floats through the tiled datapath.
pub fn multiply_host<T: HostFloat>(a: T, b: T, mode: RoundingMode) -> (T, Flags) {
    let (r, flags) = fp_multiply(&FpValue::from_host(a), &FpValue::from_host(b), mode)
        .expect("operands share a format");
    (T::from_raw(r.to_u128()), flags)
}
