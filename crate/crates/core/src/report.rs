//! Tile censuses, structural utilization and side-by-side tile-set
//! comparisons.
//!
//! Utilization is measured in bit-products: a `w x h` tile evaluates
//! `w * h` of them per use, of which only `a_bits * b_bits` involve true
//! operand bits. Pad positions count as waste regardless of data.
//!
//! Where published figures exist for a configuration, the report carries
//! them next to the computed value instead of replacing it.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpmul::FpFormat;
use crate::partition::{plan_generic, plan_p114_width, plan_p57_width, Census, PartitionPlan};
use crate::scalar::{round4, Proportion};
use crate::tiles::TileSet;

/// A published figure next to the value computed for the same quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PaperClaim {
    pub metric: &'static str,
    pub paper_claim: String,
    pub computed: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceReport<T> {
    pub a_width: usize,
    pub b_width: usize,
    pub tileset: String,
    pub plan: String,
    pub census: Census,
    pub total_tiles: usize,
    pub capacity_bitproducts: u64,
    pub useful_bitproducts: u64,
    pub utilization: T,
    pub underutilized_tiles: usize,
    pub underutilized_fraction: T,
    pub claims: Vec<PaperClaim>,
}

pub fn analyze<T: Proportion>(plan: &PartitionPlan) -> ResourceReport<T> {
    let mut capacity = 0u64;
    let mut useful = 0u64;
    let mut underutilized = 0usize;
    for inv in plan.invocations() {
        capacity += inv.shape.capacity();
        useful += inv.useful_bitproducts();
        if !inv.is_full() {
            underutilized += 1;
        }
    }
    let total = plan.total_tiles();
    let mut report = ResourceReport {
        a_width: plan.a_width,
        b_width: plan.b_width,
        tileset: plan.tileset.clone(),
        plan: plan.name.clone(),
        census: plan.census(),
        total_tiles: total,
        capacity_bitproducts: capacity,
        useful_bitproducts: useful,
        utilization: T::from_counts(useful, capacity),
        underutilized_tiles: underutilized,
        underutilized_fraction: T::from_counts(underutilized as u64, total as u64),
        claims: Vec::new(),
    };
    report.claims = published_claims(&report);
    report
}

fn percent(count: usize, total: usize) -> String {
    format!("{count} ({:.1}%)", 100.0 * count as f64 / total as f64)
}

fn published_claims<T: Proportion>(r: &ResourceReport<T>) -> Vec<PaperClaim> {
    let claim = |metric, paper_claim: &str, computed: String| PaperClaim {
        metric,
        paper_claim: paper_claim.to_owned(),
        computed,
    };
    let square = r.a_width == r.b_width;
    let underutilized = percent(r.underutilized_tiles, r.total_tiles);
    match (r.tileset.as_str(), r.plan.as_str(), r.a_width) {
        ("baseline18", "generic", 113) if square => vec![
            claim("total_tiles", "49", r.total_tiles.to_string()),
            claim("underutilized_tiles", "17 (35%)", underutilized),
        ],
        ("baseline18", "generic", 54) if square => {
            vec![claim("total_tiles", "9", r.total_tiles.to_string())]
        }
        ("civp", "p57", _) => vec![claim(
            "census",
            "24x24:4 24x9:4 9x9:1",
            r.census.to_string(),
        )],
        ("civp", "p114", _) => vec![
            claim("subproducts", "4 x 57x57", "4 x 57x57".into()),
            claim("underutilized_tiles", "0", underutilized),
        ],
        _ => Vec::new(),
    }
}

/// The plan used for `a_width x b_width` under `set`: the fixed 57- and
/// 114-bit plans for the double and quadruple precision widths on the
/// proposed tiles, uniform slicing otherwise.
pub fn plan_for(a_width: usize, b_width: usize, set: &TileSet) -> Result<PartitionPlan> {
    if set.name() == "civp" && set.shapes() == TileSet::civp().shapes() && a_width == b_width {
        match a_width {
            53 | 57 => return plan_p57_width(a_width),
            113 | 114 => return plan_p114_width(a_width),
            _ => {}
        }
    }
    plan_generic(a_width, b_width, set)
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompareRow<T> {
    Report(ResourceReport<T>),
    Failed { tileset: String, error: Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<T> {
    pub a_width: usize,
    pub b_width: usize,
    pub rows: Vec<CompareRow<T>>,
}

impl<T> Comparison<T> {
    pub fn report(&self, tileset: &str) -> Option<&ResourceReport<T>> {
        self.rows.iter().find_map(|r| match r {
            CompareRow::Report(rep) if rep.tileset == tileset => Some(rep),
            _ => None,
        })
    }
}

/// One row per tile set, sorted by capacity. A set that cannot plan the
/// product yields an error row; the other rows are unaffected.
pub fn compare<T: Proportion>(a_width: usize, b_width: usize, sets: &[TileSet]) -> Result<Comparison<T>> {
    if sets.is_empty() {
        return Err(Error::Contract("compare needs at least one tile set".into()));
    }
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for set in sets {
        match plan_for(a_width, b_width, set) {
            Ok(plan) => reports.push(analyze::<T>(&plan)),
            Err(error) => failures.push(CompareRow::Failed {
                tileset: set.name().to_owned(),
                error,
            }),
        }
    }
    reports.sort_by(|x, y| {
        x.capacity_bitproducts
            .cmp(&y.capacity_bitproducts)
            .then_with(|| x.tileset.cmp(&y.tileset))
    });
    let mut rows: Vec<CompareRow<T>> = reports.into_iter().map(CompareRow::Report).collect();
    rows.extend(failures);
    Ok(Comparison { a_width, b_width, rows })
}

/// [`compare`] at a format's significand width.
pub fn compare_format<T: Proportion>(format: FpFormat, sets: &[TileSet]) -> Result<Comparison<T>> {
    compare(format.sig_bits(), format.sig_bits(), sets)
}

/// Machine-readable form of a report with ratios rounded to four places.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub a_width: usize,
    pub b_width: usize,
    pub tileset: String,
    pub plan: String,
    pub census: Census,
    pub total_tiles: usize,
    pub capacity_bitproducts: u64,
    pub useful_bitproducts: u64,
    pub utilization: f64,
    pub underutilized_tiles: usize,
    pub underutilized_fraction: f64,
    pub paper_claims: Vec<PaperClaim>,
}

impl<T: Proportion> ResourceReport<T> {
    pub fn record(&self) -> ReportRecord {
        ReportRecord {
            a_width: self.a_width,
            b_width: self.b_width,
            tileset: self.tileset.clone(),
            plan: self.plan.clone(),
            census: self.census.clone(),
            total_tiles: self.total_tiles,
            capacity_bitproducts: self.capacity_bitproducts,
            useful_bitproducts: self.useful_bitproducts,
            utilization: round4(self.utilization.to_f64()),
            underutilized_tiles: self.underutilized_tiles,
            underutilized_fraction: round4(self.underutilized_fraction.to_f64()),
            paper_claims: self.claims.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub a_width: usize,
    pub b_width: usize,
    pub rows: Vec<RowRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RowRecord {
    Report(ReportRecord),
    Failed { tileset: String, error: String },
}

impl<T: Proportion> Comparison<T> {
    pub fn record(&self) -> ComparisonRecord {
        ComparisonRecord {
            a_width: self.a_width,
            b_width: self.b_width,
            rows: self
                .rows
                .iter()
                .map(|r| match r {
                    CompareRow::Report(rep) => RowRecord::Report(rep.record()),
                    CompareRow::Failed { tileset, error } => RowRecord::Failed {
                        tileset: tileset.clone(),
                        error: error.to_string(),
                    },
                })
                .collect(),
        }
    }
}

impl<T: Proportion> fmt::Display for ResourceReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "report plan {} tileset {} widths {}x{}",
            self.plan, self.tileset, self.a_width, self.b_width
        )?;
        writeln!(f, "census {}", self.census)?;
        writeln!(f, "total_tiles {}", self.total_tiles)?;
        writeln!(f, "capacity_bitproducts {}", self.capacity_bitproducts)?;
        writeln!(f, "useful_bitproducts {}", self.useful_bitproducts)?;
        writeln!(f, "utilization {:.4}", self.utilization.to_f64())?;
        write!(
            f,
            "underutilized_tiles {}",
            percent(self.underutilized_tiles, self.total_tiles)
        )?;
        for c in &self.claims {
            write!(
                f,
                "\n{}: paper_claim {} computed {}",
                c.metric, c.paper_claim, c.computed
            )?;
        }
        Ok(())
    }
}

impl<T: Proportion> fmt::Display for Comparison<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "compare {}x{}", self.a_width, self.b_width)?;
        let header = [
            "tileset",
            "plan",
            "tiles",
            "census",
            "capacity",
            "useful",
            "utilization",
            "underutilized",
        ];
        let mut cells: Vec<Vec<String>> = Vec::new();
        for row in &self.rows {
            match row {
                CompareRow::Report(r) => cells.push(vec![
                    r.tileset.clone(),
                    r.plan.clone(),
                    r.total_tiles.to_string(),
                    r.census.to_string(),
                    r.capacity_bitproducts.to_string(),
                    r.useful_bitproducts.to_string(),
                    format!("{:.4}", r.utilization.to_f64()),
                    percent(r.underutilized_tiles, r.total_tiles),
                ]),
                CompareRow::Failed { tileset, error } => {
                    cells.push(vec![tileset.clone(), format!("error: {error}")])
                }
            }
        }
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in cells.iter().filter(|r| r.len() == header.len()) {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        // numeric columns are right-aligned
        let right = [false, false, true, false, true, true, true, false];
        let render = |row: &[String]| -> String {
            let parts: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if right[i] {
                        format!("{c:>w$}", w = widths[i])
                    } else {
                        format!("{c:<w$}", w = widths[i])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_owned()
        };
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", render(&header))?;
        for row in &cells {
            if row.len() == header.len() {
                write!(f, "\n{}", render(row))?;
            } else {
                write!(f, "\n{:<w$}  {}", row[0], row[1], w = widths[0])?;
            }
        }
        for row in &self.rows {
            if let CompareRow::Report(r) = row {
                for c in &r.claims {
                    write!(
                        f,
                        "\n{} {}: paper_claim {} computed {}",
                        r.tileset, c.metric, c.paper_claim, c.computed
                    )?;
                }
            }
        }
        Ok(())
    }
}
