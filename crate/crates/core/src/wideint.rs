//! Fixed-width unsigned integers with explicit, checked bit budgets.
//!
//! A [`WideUint`] carries its declared width alongside its value. Every
//! operation checks that results fit the declared width and reports an
//! error instead of wrapping, so a plan that drops or misplaces a partial
//! product shows up as a failure rather than a silently wrong number.
//!
//! Limbs are stored least-significant first; hex text is read and written
//! most-significant digit first.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

const LIMB_BITS: usize = 64;

fn limbs_for(width: usize) -> usize {
    width.div_ceil(LIMB_BITS)
}

#[derive(Clone)]
pub struct WideUint {
    limbs: Vec<u64>,
    width: usize,
}

impl WideUint {
    /// Zero of the given width.
    ///
    /// Panics if `width` is 0.
    pub fn zero(width: usize) -> Self {
        assert!(width >= 1, "WideUint width must be at least 1");
        WideUint {
            limbs: vec![0; limbs_for(width)],
            width,
        }
    }

    pub fn one(width: usize) -> Self {
        let mut v = Self::zero(width);
        v.limbs[0] = 1;
        v
    }

    /// `2^width - 1`.
    pub fn all_ones(width: usize) -> Self {
        let mut v = Self::zero(width);
        for limb in v.limbs.iter_mut() {
            *limb = u64::MAX;
        }
        v.mask_top();
        v
    }

    /// `2^bit` in a container of `width` bits.
    pub fn power_of_two(bit: usize, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        if bit >= width {
            return Err(Error::Overflow {
                width,
                needed: bit + 1,
            });
        }
        let mut v = Self::zero(width);
        v.limbs[bit / LIMB_BITS] = 1 << (bit % LIMB_BITS);
        Ok(v)
    }

    pub fn from_u128(value: u128, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        let needed = 128 - value.leading_zeros() as usize;
        if needed > width {
            return Err(Error::Overflow { width, needed });
        }
        let mut v = Self::zero(width);
        v.limbs[0] = value as u64;
        if v.limbs.len() > 1 {
            v.limbs[1] = (value >> 64) as u64;
        }
        Ok(v)
    }

    /// Parses conventional (most-significant digit first) hexadecimal.
    ///
    /// Leading zeros are accepted regardless of `width`; only the numeric
    /// value has to fit.
    pub fn from_hex(text: &str, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        if text.is_empty() {
            return Err(Error::Parse {
                text: text.to_owned(),
                reason: "empty string",
            });
        }
        let digits: Vec<u64> = text
            .chars()
            .map(|c| c.to_digit(16).map(u64::from))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse {
                text: text.to_owned(),
                reason: "non-hexadecimal character",
            })?;

        let mut limbs = vec![0u64; limbs_for(digits.len() * 4)];
        for (i, d) in digits.iter().rev().enumerate() {
            let pos = i * 4;
            limbs[pos / LIMB_BITS] |= d << (pos % LIMB_BITS);
        }
        let tmp = WideUint {
            width: limbs.len() * LIMB_BITS,
            limbs,
        };
        tmp.resize(width)
    }

    /// Uppercase hex, zero-padded to exactly `ceil(width / 4)` digits.
    pub fn to_hex(&self) -> String {
        let ndigits = self.width.div_ceil(4);
        (0..ndigits)
            .rev()
            .map(|i| {
                let pos = i * 4;
                let limb = self.limbs[pos / LIMB_BITS];
                let nibble = (limb >> (pos % LIMB_BITS)) & 0xF;
                char::from_digit(nibble as u32, 16)
                    .unwrap()
                    .to_ascii_uppercase()
            })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Bit `i`; positions at or beyond the width read as zero.
    pub fn bit(&self, i: usize) -> bool {
        if i >= self.width {
            return false;
        }
        (self.limbs[i / LIMB_BITS] >> (i % LIMB_BITS)) & 1 == 1
    }

    /// Number of bits needed to hold the value (0 for zero).
    pub fn bit_len(&self) -> usize {
        for (i, limb) in self.limbs.iter().enumerate().rev() {
            if *limb != 0 {
                return i * LIMB_BITS + (LIMB_BITS - limb.leading_zeros() as usize);
            }
        }
        0
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Numeric equality, ignoring declared widths.
    pub fn value_eq(&self, other: &WideUint) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }

    pub fn to_u128(&self) -> Option<u128> {
        if self.bit_len() > 128 {
            return None;
        }
        let lo = self.limbs[0] as u128;
        let hi = self.limbs.get(1).copied().unwrap_or(0) as u128;
        Some(lo | (hi << 64))
    }

    /// Re-declares the width, zero-extending or dropping leading zeros.
    pub fn resize(&self, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        let needed = self.bit_len();
        if needed > width {
            return Err(Error::Overflow { width, needed });
        }
        let mut limbs = self.limbs.clone();
        limbs.resize(limbs_for(width), 0);
        Ok(WideUint { limbs, width })
    }

    /// Bits `[low, low + len)` as a `len`-bit value.
    pub fn slice(&self, low: usize, len: usize) -> Result<Self> {
        if len == 0 || low + len > self.width {
            return Err(Error::Bounds {
                low,
                len,
                width: self.width,
            });
        }
        let mut out = Self::zero(len);
        let limb_shift = low / LIMB_BITS;
        let bit_shift = low % LIMB_BITS;
        for (i, slot) in out.limbs.iter_mut().enumerate() {
            let lo = self.limbs.get(i + limb_shift).copied().unwrap_or(0);
            let hi = self.limbs.get(i + limb_shift + 1).copied().unwrap_or(0);
            *slot = if bit_shift == 0 {
                lo
            } else {
                (lo >> bit_shift) | (hi << (LIMB_BITS - bit_shift))
            };
        }
        out.mask_top();
        Ok(out)
    }

    /// `self + term * 2^shift`, in a result of the same width as `self`.
    ///
    /// The term's declared width plus the shift must fit the accumulator
    /// width, and the sum must not carry out of it.
    pub fn shl_add(&self, term: &WideUint, shift: usize) -> Result<Self> {
        let needed = term.width + shift;
        if needed > self.width {
            return Err(Error::Overflow {
                width: self.width,
                needed,
            });
        }
        let mut out = self.clone();
        let limb_shift = shift / LIMB_BITS;
        let bit_shift = shift % LIMB_BITS;
        let mut carry = 0u64;
        let span = term.limbs.len() + 1;
        for i in 0..span {
            let idx = i + limb_shift;
            let lo = if i < term.limbs.len() { term.limbs[i] } else { 0 };
            let prev = if i > 0 { term.limbs[i - 1] } else { 0 };
            let shifted = if bit_shift == 0 {
                lo
            } else {
                (lo << bit_shift) | (prev >> (LIMB_BITS - bit_shift))
            };
            if idx >= out.limbs.len() {
                if shifted != 0 || carry != 0 {
                    return Err(Error::Overflow {
                        width: self.width,
                        needed: self.width + 1,
                    });
                }
                break;
            }
            let (s1, c1) = out.limbs[idx].overflowing_add(shifted);
            let (s2, c2) = s1.overflowing_add(carry);
            out.limbs[idx] = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        let mut idx = span + limb_shift;
        while carry != 0 {
            if idx >= out.limbs.len() {
                return Err(Error::Overflow {
                    width: self.width,
                    needed: self.width + 1,
                });
            }
            let (s, c) = out.limbs[idx].overflowing_add(carry);
            out.limbs[idx] = s;
            carry = c as u64;
            idx += 1;
        }
        if out.bit_len() > out.width {
            return Err(Error::Overflow {
                width: self.width,
                needed: out.bit_len(),
            });
        }
        Ok(out)
    }

    /// Exact product by schoolbook long multiplication over 64-bit limbs.
    ///
    /// Deliberately independent of the tile and partition machinery; the
    /// result width is `a.width + b.width`.
    pub fn mul_oracle(a: &WideUint, b: &WideUint) -> WideUint {
        let mut out = WideUint::zero(a.width + b.width);
        for (i, &x) in a.limbs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let mut carry = 0u128;
            for (j, &y) in b.limbs.iter().enumerate() {
                let t = out.limbs[i + j] as u128 + (x as u128) * (y as u128) + carry;
                out.limbs[i + j] = t as u64;
                carry = t >> 64;
            }
            let mut k = i + b.limbs.len();
            while carry != 0 {
                let t = out.limbs[k] as u128 + carry;
                out.limbs[k] = t as u64;
                carry = t >> 64;
                k += 1;
            }
        }
        out
    }

    /// Logical right shift keeping the declared width.
    pub fn shr(&self, shift: usize) -> Self {
        if shift >= self.width {
            return Self::zero(self.width);
        }
        let mut out = self.slice(shift, self.width - shift).unwrap();
        out.limbs.resize(limbs_for(self.width), 0);
        out.width = self.width;
        out
    }

    /// True if any bit strictly below position `n` is set.
    pub fn any_below(&self, n: usize) -> bool {
        let n = n.min(self.width);
        let full = n / LIMB_BITS;
        if self.limbs[..full].iter().any(|&l| l != 0) {
            return true;
        }
        let rem = n % LIMB_BITS;
        rem != 0 && self.limbs[full] & ((1u64 << rem) - 1) != 0
    }

    fn mask_top(&mut self) {
        let rem = self.width % LIMB_BITS;
        if rem != 0 {
            if let Some(top) = self.limbs.last_mut() {
                *top &= (1u64 << rem) - 1;
            }
        }
    }

    fn cmp_value(&self, other: &WideUint) -> Ordering {
        let n = self.limbs.len().max(other.limbs.len());
        for i in (0..n).rev() {
            let a = self.limbs.get(i).copied().unwrap_or(0);
            let b = other.limbs.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialEq for WideUint {
    fn eq(&self, other: &Self) -> bool {
        self.value_eq(other)
    }
}

impl Eq for WideUint {}

impl PartialOrd for WideUint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WideUint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl Hash for WideUint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        let used = self.bit_len().div_ceil(LIMB_BITS);
        self.limbs[..used].hash(state);
    }
}

impl fmt::Debug for WideUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WideUint(0x{}, width {})", self.to_hex(), self.width)
    }
}

impl fmt::Display for WideUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}
