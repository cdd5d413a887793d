//! Partition plans: schedules of tile products over operand bit-slices
//! whose shifted sum is the full product.
//!
//! Three constructors are provided. [`plan_p57`] and [`plan_p114`] are the
//! fixed double- and quadruple-precision decompositions onto 24x24, 24x9 and
//! 9x9 tiles. [`plan_generic`] slices operands uniformly for any width and
//! tile set.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tiles::{ExactTiles, TileInvocation, TileMultiplier, TileSet, TileShape, T24X24, T24X9, T9X9};
use crate::wideint::WideUint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operand {
    A,
    B,
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operand::A => "A",
            Operand::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SliceSpec {
    pub operand: Operand,
    pub low: usize,
    pub len: usize,
}

impl SliceSpec {
    pub fn high(&self) -> usize {
        self.low + self.len
    }

    /// Slice bits that can hold true operand bits (pad positions excluded).
    pub fn significant_bits(&self, true_width: usize) -> usize {
        self.len.min(true_width.saturating_sub(self.low))
    }
}

impl fmt::Display for SliceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{})", self.operand, self.low, self.high())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Step {
    pub a_slice: usize,
    pub b_slice: usize,
    pub shape: TileShape,
    pub shift: usize,
    /// Index into the plan's sub-products.
    pub group: usize,
}

/// A block of the product assembled from a contiguous run of steps, e.g.
/// one of the four 57x57 products inside the 114x114 plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubProduct {
    pub a_low: usize,
    pub a_len: usize,
    pub b_low: usize,
    pub b_len: usize,
    pub shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionPlan {
    pub name: String,
    pub tileset: String,
    pub a_width: usize,
    pub b_width: usize,
    pub a_padded: usize,
    pub b_padded: usize,
    pub a_slices: Vec<SliceSpec>,
    pub b_slices: Vec<SliceSpec>,
    pub steps: Vec<Step>,
    pub subproducts: Vec<SubProduct>,
    pub product_width: usize,
}

/// Tile counts, largest capacity first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Census(Vec<(TileShape, usize)>);

impl Census {
    pub fn from_shapes<I: IntoIterator<Item = TileShape>>(shapes: I) -> Self {
        let mut entries: Vec<(TileShape, usize)> = Vec::new();
        for s in shapes {
            match entries.iter_mut().find(|(t, _)| t.same_block(&s)) {
                Some((_, n)) => *n += 1,
                None => entries.push((s, 1)),
            }
        }
        entries.sort_by(|x, y| x.0.census_order(&y.0));
        Census(entries)
    }

    pub fn entries(&self) -> &[(TileShape, usize)] {
        &self.0
    }

    pub fn count(&self, shape: TileShape) -> usize {
        self.0
            .iter()
            .find(|(s, _)| s.same_block(&shape))
            .map_or(0, |(_, n)| *n)
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|(_, n)| n).sum()
    }

    pub fn capacity(&self) -> u64 {
        self.0.iter().map(|(s, n)| s.capacity() * *n as u64).sum()
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, n)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}:{n}")?;
        }
        Ok(())
    }
}

impl Serialize for Census {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;

        #[derive(Serialize)]
        struct Entry {
            shape: String,
            count: usize,
        }

        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (s, n) in &self.0 {
            seq.serialize_element(&Entry {
                shape: s.to_string(),
                count: *n,
            })?;
        }
        seq.end()
    }
}

impl PartitionPlan {
    pub fn census(&self) -> Census {
        Census::from_shapes(self.steps.iter().map(|s| s.shape))
    }

    pub fn total_tiles(&self) -> usize {
        self.steps.len()
    }

    pub fn a_slice(&self, step: &Step) -> SliceSpec {
        self.a_slices[step.a_slice]
    }

    pub fn b_slice(&self, step: &Step) -> SliceSpec {
        self.b_slices[step.b_slice]
    }

    /// Structural description of every tile use, in step order.
    pub fn invocations(&self) -> impl Iterator<Item = TileInvocation> + '_ {
        self.steps.iter().map(move |s| TileInvocation {
            shape: s.shape,
            a_bits: self.a_slice(s).significant_bits(self.a_width),
            b_bits: self.b_slice(s).significant_bits(self.b_width),
        })
    }

    /// Checks every structural invariant of a plan.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedPlan(msg));
        if self.a_width == 0 || self.b_width == 0 {
            return bad("zero operand width".into());
        }
        if self.a_padded < self.a_width || self.b_padded < self.b_width {
            return bad("padded width below true width".into());
        }
        if self.product_width != self.a_padded + self.b_padded {
            return bad("product width is not the sum of padded widths".into());
        }
        for (slices, op, padded) in [
            (&self.a_slices, Operand::A, self.a_padded),
            (&self.b_slices, Operand::B, self.b_padded),
        ] {
            let mut next = 0;
            for s in slices {
                if s.operand != op || s.low != next || s.len == 0 {
                    return bad(format!("slice {s} breaks contiguous cover of {op}"));
                }
                next = s.high();
            }
            if next != padded {
                return bad(format!("slices of {op} cover {next} bits, padded width is {padded}"));
            }
        }
        let mut seen = vec![false; self.a_slices.len() * self.b_slices.len()];
        for step in &self.steps {
            let (Some(sa), Some(sb)) = (
                self.a_slices.get(step.a_slice),
                self.b_slices.get(step.b_slice),
            ) else {
                return bad("step refers to a missing slice".into());
            };
            let cell = step.a_slice * self.b_slices.len() + step.b_slice;
            if std::mem::replace(&mut seen[cell], true) {
                return bad(format!("slice pair {sa} x {sb} scheduled twice"));
            }
            if !step.shape.fits(sa.len, sb.len) {
                return bad(format!("{sa} x {sb} does not fit tile {}", step.shape));
            }
            if step.shift != sa.low + sb.low {
                return bad(format!("step {sa} x {sb} has shift {}", step.shift));
            }
            if step.group >= self.subproducts.len().max(1) {
                return bad("step refers to a missing sub-product".into());
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("cross product of slices is incomplete".into());
        }
        Ok(())
    }
}

impl fmt::Display for PartitionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plan {} tileset {}", self.name, self.tileset)?;
        writeln!(
            f,
            "widths a={} b={} padded a={} b={} product={}",
            self.a_width, self.b_width, self.a_padded, self.b_padded, self.product_width
        )?;
        for (label, slices) in [("A", &self.a_slices), ("B", &self.b_slices)] {
            write!(f, "slices {label}:")?;
            for s in slices.iter() {
                write!(f, " [{},{})", s.low, s.high())?;
            }
            writeln!(f)?;
        }
        if self.subproducts.len() > 1 {
            for (i, sp) in self.subproducts.iter().enumerate() {
                writeln!(
                    f,
                    "sub {i}: A[{},{}) x B[{},{}) shift {}",
                    sp.a_low,
                    sp.a_low + sp.a_len,
                    sp.b_low,
                    sp.b_low + sp.b_len,
                    sp.shift
                )?;
            }
        }
        for (i, step) in self.steps.iter().enumerate() {
            write!(
                f,
                "step {i}: {} x {} tile {} shift {}",
                self.a_slice(step),
                self.b_slice(step),
                step.shape,
                step.shift
            )?;
            if self.subproducts.len() > 1 {
                write!(f, " sub {}", step.group)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "census {}", self.census())?;
        write!(f, "total {}", self.total_tiles())
    }
}

// Low 24, middle 24, high 9: the 9-bit slice sits at the top so that it
// absorbs the zero padding.
const P57_SLICES: [(usize, usize); 3] = [(0, 24), (24, 24), (48, 9)];

fn civp_tile(la: usize, lb: usize) -> TileShape {
    match (la, lb) {
        (24, 24) => T24X24,
        (9, 9) => T9X9,
        _ => T24X9,
    }
}

fn slices_from(op: Operand, bounds: &[(usize, usize)]) -> Vec<SliceSpec> {
    bounds
        .iter()
        .map(|&(low, len)| SliceSpec { operand: op, low, len })
        .collect()
}

/// The 53-bit double-precision significand product: both operands padded
/// to 57 bits and split 24/24/9.
pub fn plan_p57() -> PartitionPlan {
    plan_p57_width(53).unwrap()
}

/// [`plan_p57`]'s 57-bit structure for any true width whose padding stays
/// inside the top 9-bit slice (49..=57).
pub fn plan_p57_width(width: usize) -> Result<PartitionPlan> {
    if !(49..=57).contains(&width) {
        return Err(Error::Contract(format!(
            "57-bit plan needs a true width in 49..=57, got {width}"
        )));
    }
    let mut steps = Vec::with_capacity(9);
    for (i, &(alow, alen)) in P57_SLICES.iter().enumerate() {
        for (j, &(blow, blen)) in P57_SLICES.iter().enumerate() {
            steps.push(Step {
                a_slice: i,
                b_slice: j,
                shape: civp_tile(alen, blen),
                shift: alow + blow,
                group: 0,
            });
        }
    }
    let plan = PartitionPlan {
        name: "p57".into(),
        tileset: TileSet::civp().name().into(),
        a_width: width,
        b_width: width,
        a_padded: 57,
        b_padded: 57,
        a_slices: slices_from(Operand::A, &P57_SLICES),
        b_slices: slices_from(Operand::B, &P57_SLICES),
        steps,
        subproducts: vec![SubProduct {
            a_low: 0,
            a_len: 57,
            b_low: 0,
            b_len: 57,
            shift: 0,
        }],
        product_width: 114,
    };
    plan.validate()?;
    Ok(plan)
}

/// The 113-bit quadruple-precision significand product: both operands
/// padded to 114 bits, split into two 57-bit halves, and the four 57x57
/// half products each expanded into the 24/24/9 structure.
pub fn plan_p114() -> PartitionPlan {
    plan_p114_width(113).unwrap()
}

/// [`plan_p114`]'s structure for true widths 106..=114.
pub fn plan_p114_width(width: usize) -> Result<PartitionPlan> {
    if !(106..=114).contains(&width) {
        return Err(Error::Contract(format!(
            "114-bit plan needs a true width in 106..=114, got {width}"
        )));
    }
    const HALF: usize = 57;
    let bounds: Vec<(usize, usize)> = (0..2)
        .flat_map(|h| P57_SLICES.iter().map(move |&(low, len)| (h * HALF + low, len)))
        .collect();
    let mut steps = Vec::with_capacity(36);
    let mut subproducts = Vec::with_capacity(4);
    for ha in 0..2 {
        for hb in 0..2 {
            let group = subproducts.len();
            subproducts.push(SubProduct {
                a_low: ha * HALF,
                a_len: HALF,
                b_low: hb * HALF,
                b_len: HALF,
                shift: (ha + hb) * HALF,
            });
            for (i, &(alow, alen)) in P57_SLICES.iter().enumerate() {
                for (j, &(blow, blen)) in P57_SLICES.iter().enumerate() {
                    steps.push(Step {
                        a_slice: ha * 3 + i,
                        b_slice: hb * 3 + j,
                        shape: civp_tile(alen, blen),
                        shift: (ha + hb) * HALF + alow + blow,
                        group,
                    });
                }
            }
        }
    }
    let plan = PartitionPlan {
        name: "p114".into(),
        tileset: TileSet::civp().name().into(),
        a_width: width,
        b_width: width,
        a_padded: 114,
        b_padded: 114,
        a_slices: slices_from(Operand::A, &bounds),
        b_slices: slices_from(Operand::B, &bounds),
        steps,
        subproducts,
        product_width: 228,
    };
    plan.validate()?;
    Ok(plan)
}

/// Slice dimensions of `tiles` that can be paired with each other.
///
/// Starts from every tile edge length and drops the largest dimension
/// involved in any pairing no tile covers, until all pairings are covered.
fn usable_dims(tiles: &TileSet) -> Vec<usize> {
    let mut dims: Vec<usize> = tiles.shapes().iter().flat_map(|s| [s.w, s.h]).collect();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    dims.dedup();
    loop {
        let offender = dims.iter().find_map(|&d| {
            dims.iter()
                .find(|&&e| !tiles.shapes().iter().any(|s| s.fits(d, e)))
                .map(|&e| d.max(e))
        });
        match offender {
            Some(d) => dims.retain(|&x| x != d),
            None => return dims,
        }
    }
}

/// Counts per dimension (same order as `dims`, largest first) summing to
/// exactly `total`, preferring as many of the largest pieces as possible.
fn decompose(total: usize, dims: &[usize]) -> Option<Vec<usize>> {
    let (&d, rest) = dims.split_first()?;
    if rest.is_empty() {
        return total.is_multiple_of(d).then(|| vec![total / d]);
    }
    (0..=total / d).rev().find_map(|n| {
        decompose(total - n * d, rest).map(|mut tail| {
            tail.insert(0, n);
            tail
        })
    })
}

fn slice_operand(width: usize, dims: &[usize]) -> Result<(usize, Vec<usize>)> {
    let min = *dims.last().unwrap();
    for padded in width..width + min {
        if let Some(counts) = decompose(padded, dims) {
            let lens = dims
                .iter()
                .zip(counts)
                .flat_map(|(&d, n)| std::iter::repeat_n(d, n))
                .collect();
            return Ok((padded, lens));
        }
    }
    Err(Error::PlanningInfeasible(format!(
        "no slicing of {width} bits from dimensions {dims:?}"
    )))
}

fn smallest_fitting(tiles: &TileSet, la: usize, lb: usize) -> Option<TileShape> {
    tiles
        .shapes()
        .iter()
        .copied()
        .filter(|s| s.fits(la, lb))
        .min_by(|x, y| x.capacity().cmp(&y.capacity()).then_with(|| x.cmp(y)))
}

/// Uniform slicing for arbitrary widths and tile sets.
///
/// Each operand is padded to the smallest sum of usable tile dimensions at
/// least its width and split largest slices first from the least
/// significant end. Every slice pair gets the smallest-capacity tile that
/// fits, ties broken by the lexicographically smaller shape.
pub fn plan_generic(a_width: usize, b_width: usize, tiles: &TileSet) -> Result<PartitionPlan> {
    if a_width == 0 || b_width == 0 {
        return Err(Error::Contract("operand widths must be at least 1".into()));
    }
    if tiles.shapes().is_empty() {
        return Err(Error::PlanningInfeasible(format!(
            "tile set {} is empty",
            tiles.name()
        )));
    }
    let dims = usable_dims(tiles);
    let (a_padded, a_lens) = slice_operand(a_width, &dims)?;
    let (b_padded, b_lens) = slice_operand(b_width, &dims)?;
    let to_slices = |op, lens: &[usize]| {
        let mut low = 0;
        lens.iter()
            .map(|&len| {
                let s = SliceSpec { operand: op, low, len };
                low += len;
                s
            })
            .collect::<Vec<_>>()
    };
    let a_slices = to_slices(Operand::A, &a_lens);
    let b_slices = to_slices(Operand::B, &b_lens);

    let mut steps = Vec::with_capacity(a_slices.len() * b_slices.len());
    for (i, sa) in a_slices.iter().enumerate() {
        for (j, sb) in b_slices.iter().enumerate() {
            let shape = smallest_fitting(tiles, sa.len, sb.len).ok_or_else(|| {
                Error::PlanningInfeasible(format!(
                    "no tile in {} covers {}x{}",
                    tiles.name(),
                    sa.len,
                    sb.len
                ))
            })?;
            steps.push(Step {
                a_slice: i,
                b_slice: j,
                shape,
                shift: sa.low + sb.low,
                group: 0,
            });
        }
    }
    let plan = PartitionPlan {
        name: "generic".into(),
        tileset: tiles.name().into(),
        a_width,
        b_width,
        a_padded,
        b_padded,
        a_slices,
        b_slices,
        steps,
        subproducts: vec![SubProduct {
            a_low: 0,
            a_len: a_padded,
            b_low: 0,
            b_len: b_padded,
            shift: 0,
        }],
        product_width: a_padded + b_padded,
    };
    plan.validate()?;
    Ok(plan)
}

pub fn execute_plan(plan: &PartitionPlan, a: &WideUint, b: &WideUint) -> Result<WideUint> {
    execute_plan_with(plan, a, b, &ExactTiles)
}

/// Runs every step of `plan` through `tiles` and accumulates the shifted
/// partial products in step order.
pub fn execute_plan_with<M: TileMultiplier + ?Sized>(
    plan: &PartitionPlan,
    a: &WideUint,
    b: &WideUint,
    tiles: &M,
) -> Result<WideUint> {
    if a.width() != plan.a_width || b.width() != plan.b_width {
        return Err(Error::Contract(format!(
            "plan {} expects {}x{} operands, got {}x{}",
            plan.name,
            plan.a_width,
            plan.b_width,
            a.width(),
            b.width()
        )));
    }
    let a = a.resize(plan.a_padded)?;
    let b = b.resize(plan.b_padded)?;
    let mut acc = WideUint::zero(plan.product_width);
    for step in &plan.steps {
        let sa = plan.a_slice(step);
        let sb = plan.b_slice(step);
        let x = a.slice(sa.low, sa.len)?;
        let y = b.slice(sb.low, sb.len)?;
        // a len_a x len_b product always fits len_a + len_b bits
        let partial = tiles.multiply(step.shape, &x, &y)?.resize(sa.len + sb.len)?;
        acc = acc.shl_add(&partial, step.shift)?;
    }
    Ok(acc)
}
