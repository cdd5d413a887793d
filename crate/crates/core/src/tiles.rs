//! Dedicated multiplier blocks ("tiles") and the tile sets being compared.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Proportion;
use crate::wideint::WideUint;

/// A `w x h` hardware integer multiplier. Operands may be presented in
/// either orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TileShape {
    pub w: usize,
    pub h: usize,
}

impl TileShape {
    pub const fn new_unchecked(w: usize, h: usize) -> Self {
        TileShape { w, h }
    }

    pub fn new(w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 {
            return Err(Error::InvalidShape { w, h });
        }
        Ok(TileShape { w, h })
    }

    /// Bit-products the array evaluates per invocation.
    pub fn capacity(&self) -> u64 {
        (self.w * self.h) as u64
    }

    pub fn fits(&self, a_width: usize, b_width: usize) -> bool {
        (a_width <= self.w && b_width <= self.h) || (a_width <= self.h && b_width <= self.w)
    }

    /// Same physical block, ignoring orientation.
    pub fn same_block(&self, other: &TileShape) -> bool {
        self == other || (self.w == other.h && self.h == other.w)
    }

    /// Display order for censuses: largest capacity first.
    pub fn census_order(&self, other: &TileShape) -> std::cmp::Ordering {
        other
            .capacity()
            .cmp(&self.capacity())
            .then_with(|| other.cmp(self))
    }
}

impl fmt::Display for TileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.w, self.h)
    }
}

pub const T24X24: TileShape = TileShape::new_unchecked(24, 24);
pub const T24X9: TileShape = TileShape::new_unchecked(24, 9);
pub const T9X9: TileShape = TileShape::new_unchecked(9, 9);
pub const T18X18: TileShape = TileShape::new_unchecked(18, 18);
pub const T25X18: TileShape = TileShape::new_unchecked(25, 18);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TileSet {
    name: String,
    shapes: Vec<TileShape>,
}

impl TileSet {
    pub fn new(name: impl Into<String>, shapes: Vec<TileShape>) -> Result<Self> {
        for (i, s) in shapes.iter().enumerate() {
            if shapes[..i].iter().any(|t| t.same_block(s)) {
                return Err(Error::Contract(format!("duplicate tile shape {s}")));
            }
        }
        Ok(TileSet {
            name: name.into(),
            shapes,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shapes(&self) -> &[TileShape] {
        &self.shapes
    }

    pub fn contains(&self, shape: TileShape) -> bool {
        self.shapes.iter().any(|s| s.same_block(&shape))
    }

    /// The proposed set: 24x24 and 24x9 blocks alongside the existing 9x9.
    pub fn civp() -> Self {
        TileSet::new("civp", vec![T24X24, T24X9, T9X9]).unwrap()
    }

    /// Uniform 18x18 blocks.
    pub fn baseline18() -> Self {
        TileSet::new("baseline18", vec![T18X18]).unwrap()
    }

    /// The mix found on current devices: 25x18, 18x18 and 9x9.
    pub fn existing_fpga() -> Self {
        TileSet::new("existing-fpga", vec![T25X18, T18X18, T9X9]).unwrap()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        builtin_tilesets().into_iter().find(|s| s.name == name)
    }
}

pub fn builtin_tilesets() -> Vec<TileSet> {
    vec![TileSet::civp(), TileSet::baseline18(), TileSet::existing_fpga()]
}

/// Something that can evaluate one tile product. The exact model is
/// [`ExactTiles`]; other implementations exist to inject faults.
pub trait TileMultiplier {
    fn multiply(&self, shape: TileShape, a: &WideUint, b: &WideUint) -> Result<WideUint>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExactTiles;

impl TileMultiplier for ExactTiles {
    fn multiply(&self, shape: TileShape, a: &WideUint, b: &WideUint) -> Result<WideUint> {
        tile_mul(shape, a, b)
    }
}

/// Exact product of two operands on a `shape` tile, `shape.w + shape.h`
/// bits wide. Operands may be swapped to fit.
pub fn tile_mul(shape: TileShape, a: &WideUint, b: &WideUint) -> Result<WideUint> {
    if !shape.fits(a.width(), b.width()) {
        return Err(Error::TileOverflow {
            shape,
            a_width: a.width(),
            b_width: b.width(),
        });
    }
    let out_width = shape.w + shape.h;
    if shape.w <= 64 && shape.h <= 64 {
        // both operands fit a u64, so the product fits a u128
        let x = a.to_u128().unwrap();
        let y = b.to_u128().unwrap();
        WideUint::from_u128(x * y, out_width)
    } else {
        WideUint::mul_oracle(a, b).resize(out_width)
    }
}

/// One use of a tile, described by how many operand bits can be nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TileInvocation {
    pub shape: TileShape,
    pub a_bits: usize,
    pub b_bits: usize,
}

impl TileInvocation {
    pub fn useful_bitproducts(&self) -> u64 {
        (self.a_bits * self.b_bits) as u64
    }

    /// Fraction of the tile's bit-product capacity doing significant work.
    pub fn utilization<T: Proportion>(&self) -> Result<T> {
        if self.a_bits == 0 || self.b_bits == 0 {
            return Err(Error::DegenerateInvocation {
                shape: self.shape,
                a_bits: self.a_bits,
                b_bits: self.b_bits,
            });
        }
        if !self.shape.fits(self.a_bits, self.b_bits) {
            return Err(Error::TileOverflow {
                shape: self.shape,
                a_width: self.a_bits,
                b_width: self.b_bits,
            });
        }
        Ok(T::from_counts(
            self.useful_bitproducts(),
            self.shape.capacity(),
        ))
    }

    pub fn is_full(&self) -> bool {
        self.useful_bitproducts() == self.shape.capacity()
    }
}
