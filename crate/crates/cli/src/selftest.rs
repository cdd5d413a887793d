//! `civp selftest`: seeded equivalence runs of the tiled datapath against
//! the integer oracle and the reference floating-point multiplier.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use civp_core::fpmul::{fp_multiply_with, FpFormat, FpValue, RoundingMode};
use civp_core::partition::{execute_plan_with, plan_generic, plan_p114, plan_p57, PartitionPlan};
use civp_core::reference::reference_multiply;
use civp_core::tiles::{ExactTiles, TileMultiplier, TileSet, TileShape, T24X24};
use civp_core::vectors::random_pair;
use civp_core::{Result, WideUint};

use crate::{Outcome, EXIT_FAILURE, EXIT_OK};

/// Wraps exact tiles and flips the low output bit of every product from
/// `shape`.
#[derive(Debug, Clone, Copy)]
pub struct BitFlipTiles {
    pub shape: TileShape,
}

impl TileMultiplier for BitFlipTiles {
    fn multiply(&self, shape: TileShape, a: &WideUint, b: &WideUint) -> Result<WideUint> {
        let p = ExactTiles.multiply(shape, a, b)?;
        if shape != self.shape {
            return Ok(p);
        }
        let w = p.width();
        if p.bit(0) {
            let upper = p.shr(1).slice(0, w - 1)?;
            WideUint::zero(w).shl_add(&upper, 1)
        } else {
            p.shl_add(&WideUint::one(1), 0)
        }
    }
}

struct Suite {
    name: String,
    run: usize,
    failure: Option<String>,
}

fn int_suite(
    name: &str,
    plan: &PartitionPlan,
    samples: usize,
    rng: &mut ChaCha8Rng,
    tiles: &dyn TileMultiplier,
) -> Suite {
    let mut suite = Suite {
        name: name.to_string(),
        run: 0,
        failure: None,
    };
    for _ in 0..samples {
        let a = random_uint(plan.a_width, rng);
        let b = random_uint(plan.b_width, rng);
        suite.run += 1;
        let expected = WideUint::mul_oracle(&a, &b);
        let got = execute_plan_with(plan, &a, &b, tiles);
        let ok = matches!(&got, Ok(p) if p.value_eq(&expected));
        if !ok {
            let got = match got {
                Ok(p) => p.to_hex(),
                Err(e) => format!("error: {e}"),
            };
            suite.failure = Some(format!(
                "a={}\nb={}\nexpected={}\ngot={got}",
                a.to_hex(),
                b.to_hex(),
                expected.to_hex()
            ));
            break;
        }
    }
    suite
}

fn random_uint(width: usize, rng: &mut ChaCha8Rng) -> WideUint {
    let mut x = WideUint::zero(width);
    let mut low = 0;
    while low < width {
        let len = (width - low).min(64);
        let limb: u64 = rng.random();
        let limb = if len == 64 { limb } else { limb & ((1 << len) - 1) };
        let term = WideUint::from_u128(limb as u128, len).expect("limb fits");
        x = x.shl_add(&term, low).expect("disjoint bits");
        low += len;
    }
    x
}

fn fp_suite(format: FpFormat, samples: usize, rng: &mut ChaCha8Rng, tiles: &dyn TileMultiplier) -> Suite {
    let mut suite = Suite {
        name: format!("fp-{}", format.name),
        run: 0,
        failure: None,
    };
    for i in 0..samples {
        let mode = RoundingMode::ALL[i % RoundingMode::ALL.len()];
        let (a, b) = random_pair(format, rng);
        suite.run += 1;
        let (want, want_flags) = reference_multiply(format, a, b, mode);
        let got = FpValue::from_u128(format, a)
            .and_then(|x| FpValue::from_u128(format, b).map(|y| (x, y)))
            .and_then(|(x, y)| fp_multiply_with(&x, &y, mode, tiles));
        let ok = matches!(&got, Ok((r, f)) if r.to_u128() == want && *f == want_flags);
        if !ok {
            let digits = format.hex_digits();
            let got = match got {
                Ok((r, f)) => format!("{r} flags: {f}"),
                Err(e) => format!("error: {e}"),
            };
            suite.failure = Some(format!(
                "a={a:0digits$X}\nb={b:0digits$X}\nrounding={}\nexpected={want:0digits$X} flags: {want_flags}\ngot={got}",
                mode.name()
            ));
            break;
        }
    }
    suite
}

pub fn cmd_selftest(samples: usize, seed: u64, inject_fault: bool) -> Outcome {
    let mut out = format!("seed: {seed}\n");
    let mut stderr = String::new();
    if samples == 0 {
        stderr.push_str("warning: --samples 0 runs no vectors; every suite passes vacuously\n");
    }
    let fault = BitFlipTiles {
        shape: T24X24,
    };
    let tiles: &dyn TileMultiplier = if inject_fault { &fault } else { &ExactTiles };
    if inject_fault {
        stderr.push_str("warning: fault injection enabled\n");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let baseline = plan_generic(113, 113, &TileSet::baseline18()).expect("builtin plan");
    let plans = [("int-p57", plan_p57()), ("int-p114", plan_p114()), ("int-baseline18-113", baseline)];
    let mut suites = Vec::new();
    for (name, plan) in &plans {
        suites.push(int_suite(name, plan, samples, &mut rng, tiles));
    }
    for format in FpFormat::ALL {
        suites.push(fp_suite(format, samples, &mut rng, tiles));
    }

    let mut code = EXIT_OK;
    for s in &suites {
        let status = if s.failure.is_some() { "FAIL" } else { "ok" };
        let _ = writeln!(out, "{:<20} {:>8} vectors  {status}", s.name, s.run);
        if let Some(detail) = &s.failure {
            if code == EXIT_OK {
                let _ = writeln!(stderr, "first mismatch in {}:\n{detail}", s.name);
            }
            code = EXIT_FAILURE;
        }
    }
    let _ = writeln!(out, "{}", if code == EXIT_OK { "selftest passed" } else { "selftest FAILED" });
    Outcome {
        stdout: out,
        stderr,
        code,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let out = cmd_selftest(50, 1, false);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert!(out.stdout.starts_with("seed: 1\n"));
        assert_eq!(out.stdout.matches(" ok").count(), 6);
    }

    #[test]
    fn injected_fault_is_caught() {
        let out = cmd_selftest(50, 1, true);
        assert_eq!(out.code, EXIT_FAILURE);
        assert!(out.stderr.contains("first mismatch in int-p57"));
        assert!(out.stdout.contains("FAIL"));
    }

    #[test]
    fn zero_samples_warns() {
        let out = cmd_selftest(0, 1, false);
        assert_eq!(out.code, EXIT_OK);
        assert!(out.stderr.contains("vacuously"));
    }

    #[test]
    fn same_seed_same_output() {
        assert_eq!(cmd_selftest(20, 9, false), cmd_selftest(20, 9, false));
    }

    #[test]
    fn random_uint_fills_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let top_set = (0..200).any(|_| random_uint(113, &mut rng).bit(112));
        assert!(top_set);
    }
}
