//! Command implementations for the `civp` binary.
//!
//! Every command renders into an [`Outcome`] instead of printing, so the
//! golden-file tests can drive the exact code path the binary runs.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use civp_core::fpmul::{fp_multiply, significand_plan, FpFormat, FpValue, RoundingMode};
use civp_core::partition::{plan_generic, plan_p114, plan_p57, Census, PartitionPlan};
use civp_core::report::{analyze, compare};
use civp_core::tiles::TileSet;
use civp_core::Error;

pub mod selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Seed used by `selftest` when neither `--seed` nor `CIVP_SEED` is given.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_USAGE,
        }
    }

    fn failure(msg: impl std::fmt::Display) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code: EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "civp", version, about = "Tiled variable-precision floating-point multiplier model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply two values given as big-endian hex bit patterns.
    Mul(MulArgs),
    /// Print a partition plan.
    Plan(PlanArgs),
    /// Compare tile sets on the same multiplication.
    Compare(CompareArgs),
    /// Run the equivalence suites against the reference models.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Single,
    Double,
    Quad,
}

impl FormatArg {
    pub fn format(self) -> FpFormat {
        match self {
            FormatArg::Single => FpFormat::SINGLE,
            FormatArg::Double => FpFormat::DOUBLE,
            FormatArg::Quad => FpFormat::QUAD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    NearestEven,
    TowardZero,
    TowardPositive,
    TowardNegative,
}

impl From<ModeArg> for RoundingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::NearestEven => RoundingMode::NearestEven,
            ModeArg::TowardZero => RoundingMode::TowardZero,
            ModeArg::TowardPositive => RoundingMode::TowardPositive,
            ModeArg::TowardNegative => RoundingMode::TowardNegative,
        }
    }
}

#[derive(Debug, Args)]
pub struct MulArgs {
    #[arg(long, value_enum)]
    pub format: FormatArg,
    pub a: String,
    pub b: String,
    #[arg(long, value_enum, default_value = "nearest-even")]
    pub rounding: ModeArg,
    /// Also print the tile census and utilization of the significand plan.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    P57,
    P114,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    pub width_a: Option<usize>,
    pub width_b: Option<usize>,
    #[arg(long, default_value = "civp")]
    pub tileset: String,
    #[arg(long, value_enum, conflicts_with_all = ["width_a", "width_b"])]
    pub preset: Option<PresetArg>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// `WIDTH_A WIDTH_B SET...`, or just `SET...` with `--format`.
    #[arg(required = true)]
    pub args: Vec<String>,
    /// Use a format's significand width for both operands.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// RNG seed; falls back to CIVP_SEED, then a fixed default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flip one bit of every 24x24 tile product (harness check).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let env_seed = std::env::var("CIVP_SEED").ok();
    dispatch(cli.command, env_seed.as_deref())
}

pub fn dispatch(command: Command, env_seed: Option<&str>) -> Outcome {
    match command {
        Command::Mul(a) => cmd_mul(&a),
        Command::Plan(a) => cmd_plan(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Selftest(a) => match resolve_seed(a.seed, env_seed) {
            Ok(seed) => selftest::cmd_selftest(a.samples, seed, a.inject_fault),
            Err(msg) => Outcome::usage(msg),
        },
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, String> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| format!("CIVP_SEED is not an unsigned integer: {text:?}")),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. } | Error::Overflow { .. } | Error::ZeroWidth | Error::Contract(_)
    )
}

pub fn cmd_mul(args: &MulArgs) -> Outcome {
    let format = args.format.format();
    let parse = |text: &str| FpValue::from_hex(format, text);
    let (a, b) = match (parse(&args.a), parse(&args.b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::usage(e),
    };
    let (result, flags) = match fp_multiply(&a, &b, args.rounding.into()) {
        Ok(r) => r,
        Err(e) => return Outcome::failure(e),
    };
    let mut out = format!("{result}\nflags: {flags}\n");
    if args.report {
        match significand_plan(format) {
            Ok(plan) => {
                let _ = writeln!(out, "{}", analyze::<f64>(plan));
            }
            Err(e) => return Outcome::failure(e),
        }
    }
    Outcome::ok(out)
}

#[derive(Serialize)]
struct PlanDocument<'a> {
    plan: &'a PartitionPlan,
    census: Census,
    total_tiles: usize,
}

pub fn cmd_plan(args: &PlanArgs) -> Outcome {
    let plan = match (args.preset, args.width_a, args.width_b) {
        (Some(PresetArg::P57), _, _) => plan_p57(),
        (Some(PresetArg::P114), _, _) => plan_p114(),
        (None, Some(wa), Some(wb)) => {
            let Some(set) = TileSet::by_name(&args.tileset) else {
                return Outcome::usage(format!("unknown tile set {:?}", args.tileset));
            };
            match plan_generic(wa, wb, &set) {
                Ok(p) => p,
                Err(e) if is_usage_error(&e) => return Outcome::usage(e),
                Err(e) => return Outcome::failure(e),
            }
        }
        _ => return Outcome::usage("give either --preset or both operand widths"),
    };
    if args.json {
        let doc = PlanDocument {
            plan: &plan,
            census: plan.census(),
            total_tiles: plan.total_tiles(),
        };
        return Outcome::ok(serde_json::to_string_pretty(&doc).unwrap() + "\n");
    }
    Outcome::ok(format!("{plan}\n"))
}

pub fn cmd_compare(args: &CompareArgs) -> Outcome {
    let (a_width, b_width, names) = match args.format {
        Some(f) => {
            let w = f.format().sig_bits();
            (w, w, &args.args[..])
        }
        None => {
            if args.args.len() < 3 {
                return Outcome::usage("expected WIDTH_A WIDTH_B SET...");
            }
            let width = |s: &str| {
                s.parse::<usize>()
                    .ok()
                    .filter(|&w| w > 0)
                    .ok_or_else(|| format!("invalid operand width {s:?}"))
            };
            match (width(&args.args[0]), width(&args.args[1])) {
                (Ok(a), Ok(b)) => (a, b, &args.args[2..]),
                (Err(e), _) | (_, Err(e)) => return Outcome::usage(e),
            }
        }
    };
    if names.is_empty() {
        return Outcome::usage("at least one tile set is required");
    }
    let mut sets = Vec::with_capacity(names.len());
    for name in names {
        match TileSet::by_name(name) {
            Some(s) => sets.push(s),
            None => return Outcome::usage(format!("unknown tile set {name:?}")),
        }
    }
    let comparison = match compare::<f64>(a_width, b_width, &sets) {
        Ok(c) => c,
        Err(e) => return Outcome::failure(e),
    };
    if args.json {
        Outcome::ok(serde_json::to_string_pretty(&comparison.record()).unwrap() + "\n")
    } else {
        Outcome::ok(format!("{comparison}\n"))
    }
}
