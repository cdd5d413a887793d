//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime limits are part of each criterion.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use civp_core::fpmul::{fp_decode, fp_encode, fp_multiply, FpFormat, FpValue, RoundingMode};
use civp_core::partition::{execute_plan, plan_generic, plan_p114, plan_p57, PartitionPlan};
use civp_core::reference::reference_multiply;
use civp_core::report::analyze;
use civp_core::tiles::{TileSet, TileShape, T24X24, T24X9, T9X9};
use civp_core::vectors::{directed_values, halfway_pair, random_bits, random_pair};
use civp_core::{Ratio, WideUint};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn random_wide(rng: &mut ChaCha8Rng, width: usize) -> WideUint {
    let digits = width.div_ceil(4);
    let top_bits = width - 4 * (digits - 1);
    let text: String = (0..digits)
        .map(|i| {
            let d = rng.random_range(0..16u32);
            let d = if i == 0 { d & ((1 << top_bits) - 1) } else { d };
            char::from_digit(d, 16).unwrap()
        })
        .collect();
    WideUint::from_hex(&text, width).unwrap()
}

fn plan_shapes() -> Check {
    let p57 = plan_p57().census();
    ensure(
        (p57.count(T24X24), p57.count(T24X9), p57.count(T9X9), p57.total()) == (4, 4, 1, 9),
        || format!("p57 census {p57}"),
    )?;
    let p114 = plan_p114().census();
    ensure(
        (p114.count(T24X24), p114.count(T24X9), p114.count(T9X9), p114.total()) == (16, 16, 4, 36),
        || format!("p114 census {p114}"),
    )?;
    let base = TileSet::baseline18();
    let t113 = plan_generic(113, 113, &base).map_err(|e| e.to_string())?.total_tiles();
    let t54 = plan_generic(54, 54, &base).map_err(|e| e.to_string())?.total_tiles();
    ensure(t113 == 49 && t54 == 9, || format!("baseline tiles {t113}, {t54}"))?;
    Ok(format!("p57 {p57}; p114 {p114}; baseline 113x113 {t113}, 54x54 {t54}"))
}

fn check_vectors(plan: &PartitionPlan, pairs: &[(WideUint, WideUint)]) -> std::result::Result<(), String> {
    for (a, b) in pairs {
        let got = execute_plan(plan, a, b).map_err(|e| format!("{}: {e}", plan.name))?;
        ensure(got.value_eq(&WideUint::mul_oracle(a, b)), || {
            format!("{} mismatch on {a} x {b}", plan.name)
        })?;
    }
    Ok(())
}

fn tiled_multiply() -> Check {
    let toy = TileSet::new(
        "toy",
        vec![TileShape::new(3, 3).unwrap(), TileShape::new(3, 2).unwrap(), TileShape::new(2, 2).unwrap()],
    )
    .unwrap();
    let mut toy_count = 0u64;
    for wa in 1..=6usize {
        for wb in 1..=6usize {
            let plan = plan_generic(wa, wb, &toy).map_err(|e| e.to_string())?;
            for a in 0..(1u128 << wa) {
                for b in 0..(1u128 << wb) {
                    let x = WideUint::from_u128(a, wa).unwrap();
                    let y = WideUint::from_u128(b, wb).unwrap();
                    let got = execute_plan(&plan, &x, &y).map_err(|e| e.to_string())?;
                    ensure(got.value_eq(&WideUint::mul_oracle(&x, &y)), || format!("toy {wa}x{wb}: {a}*{b}"))?;
                    toy_count += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC2);
    let mut random = 0;
    let mut boundary = 0;
    for plan in [plan_p57(), plan_p114()] {
        let w = plan.a_width;
        let pairs: Vec<_> = (0..10_000).map(|_| (random_wide(&mut rng, w), random_wide(&mut rng, w))).collect();
        check_vectors(&plan, &pairs)?;
        random += pairs.len();
        let edges = [
            WideUint::zero(w),
            WideUint::one(w),
            WideUint::all_ones(w),
            WideUint::power_of_two(w - 1, w).unwrap(),
        ];
        let pairs: Vec<_> = edges.iter().flat_map(|a| edges.iter().map(move |b| (a.clone(), b.clone()))).collect();
        check_vectors(&plan, &pairs)?;
        boundary += pairs.len();
    }
    Ok(format!("{toy_count} toy, {random} random, {boundary} boundary vectors, 0 mismatches"))
}

fn fp_agree(format: FpFormat, a: u128, b: u128, mode: RoundingMode) -> std::result::Result<(), String> {
    let x = FpValue::from_u128(format, a).unwrap();
    let y = FpValue::from_u128(format, b).unwrap();
    let (r, f) = fp_multiply(&x, &y, mode).map_err(|e| e.to_string())?;
    let want = reference_multiply(format, a, b, mode);
    ensure((r.to_u128(), f) == want, || {
        format!(
            "{format} {}: {a:#x} * {b:#x} gave {r} [{f}], reference {:#x} [{}]",
            mode.name(),
            want.0,
            want.1
        )
    })
}

fn fp_random(format: FpFormat, n: usize, seed: u64) -> std::result::Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let (a, b) = random_pair(format, &mut rng);
        fp_agree(format, a, b, RoundingMode::ALL[i % RoundingMode::ALL.len()])?;
    }
    Ok(n)
}

fn fp_exactness() -> Check {
    let counts = [(FpFormat::SINGLE, 1_000_000), (FpFormat::DOUBLE, 100_000), (FpFormat::QUAD, 10_000)];
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = counts
            .iter()
            .enumerate()
            .map(|(i, &(f, n))| s.spawn(move || fp_random(f, n, 0xF00 + i as u64)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut random = 0;
    for r in results {
        random += r?;
    }
    let mut directed = 0;
    let mut halfway = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC3);
    for format in FpFormat::ALL {
        let values = directed_values(format);
        for &a in &values {
            for &b in &values {
                for mode in RoundingMode::ALL {
                    fp_agree(format, a, b, mode)?;
                    directed += 1;
                }
            }
        }
        let (emin, p) = (format.emin(), format.frac_bits as i64);
        for exp_sum in [0, 7, -9, emin, emin - 1, emin - p / 2, emin - p, format.emax()] {
            for _ in 0..200 {
                let (a, b) = halfway_pair(format, exp_sum, &mut rng);
                for mode in RoundingMode::ALL {
                    fp_agree(format, a, b, mode)?;
                    halfway += 1;
                }
            }
        }
    }
    Ok(format!("{random} random, {directed} directed, {halfway} halfway checks, 0 mismatches"))
}

/// Counts covered true bit-products cell by cell.
fn grid_audit(plan: &PartitionPlan) -> (u64, u64, usize) {
    let (mut useful, mut capacity, mut under) = (0u64, 0u64, 0usize);
    for step in &plan.steps {
        let sa = plan.a_slices[step.a_slice];
        let sb = plan.b_slices[step.b_slice];
        let cells = (sa.low..sa.low + sa.len)
            .flat_map(|i| (sb.low..sb.low + sb.len).map(move |j| (i, j)))
            .filter(|&(i, j)| i < plan.a_width && j < plan.b_width)
            .count() as u64;
        let cap = (step.shape.w * step.shape.h) as u64;
        useful += cells;
        capacity += cap;
        under += usize::from(cells < cap);
    }
    (useful, capacity, under)
}

fn utilization_audit() -> Check {
    let plan = plan_generic(113, 113, &TileSet::baseline18()).map_err(|e| e.to_string())?;
    let r = analyze::<Ratio>(&plan);
    let computed = (r.useful_bitproducts, r.capacity_bitproducts, r.underutilized_tiles);
    ensure(computed == (12769, 15876, 13), || format!("computed {computed:?}"))?;
    let oracle = grid_audit(&plan);
    ensure(oracle == computed, || format!("grid oracle {oracle:?} vs {computed:?}"))?;
    let text = r.to_string();
    ensure(text.contains("underutilized_tiles: paper_claim 17 (35%) computed 13"), || {
        format!("claim line missing from report:\n{text}")
    })?;
    Ok("useful 12769, capacity 15876, underutilized 13 (grid oracle agrees); paper_claim 17 (35%) displayed".into())
}

fn comparison_direction() -> Check {
    let civp = analyze::<Ratio>(&plan_p114());
    let base = analyze::<Ratio>(&plan_generic(113, 113, &TileSet::baseline18()).map_err(|e| e.to_string())?);
    ensure(civp.total_tiles < base.total_tiles, || {
        format!("tiles {} vs {}", civp.total_tiles, base.total_tiles)
    })?;
    ensure(civp.utilization > base.utilization, || {
        format!("utilization {} vs {}", civp.utilization, base.utilization)
    })?;
    Ok(format!(
        "tiles {} < {}; utilization {} ({:.4}) > {} ({:.4})",
        civp.total_tiles,
        base.total_tiles,
        civp.utilization,
        *civp.utilization.numer() as f64 / *civp.utilization.denom() as f64,
        base.utilization,
        *base.utilization.numer() as f64 / *base.utilization.denom() as f64,
    ))
}

fn formats() -> Check {
    let table: Vec<_> = FpFormat::ALL
        .iter()
        .map(|f| (f.name, f.total_bits - f.exp_bits - f.frac_bits, f.exp_bits, f.frac_bits, f.bias()))
        .collect();
    let expected = vec![
        ("single", 1, 8, 23, 127),
        ("double", 1, 11, 52, 1023),
        ("quad", 1, 15, 112, 16383),
    ];
    ensure(table == expected, || format!("format table {table:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC6);
    let n = 1_000_000;
    for format in FpFormat::ALL {
        for _ in 0..n {
            let v = FpValue::from_u128(format, random_bits(format, &mut rng)).unwrap();
            let back = fp_encode(&fp_decode(&v), format).map_err(|e| format!("{v}: {e}"))?;
            ensure(back == v, || format!("{format}: {v} became {back}"))?;
        }
    }
    Ok(format!("1/8/23, 1/11/52, 1/15/112 with biases 127/1023/16383; {n} round trips per format"))
}

fn golden() -> Check {
    let bad = common::golden_mismatches();
    ensure(bad.is_empty(), || bad.join("; "))?;
    Ok(format!("{} golden files byte-identical", common::GOLDEN_CASES.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("plan-shape fidelity", Duration::from_secs(1), plan_shapes),
        ("tiled-multiply correctness", Duration::from_secs(60), tiled_multiply),
        ("fp bit-exactness", Duration::from_secs(600), fp_exactness),
        ("utilization audit", Duration::from_secs(60), utilization_audit),
        ("comparative direction", Duration::from_secs(1), comparison_direction),
        ("formats", Duration::from_secs(600), formats),
        ("cli golden files", Duration::from_secs(60), golden),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if elapsed > *limit => ("FAIL", format!("took {elapsed:.2?}, limit {limit:?}")),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status} {name} [{elapsed:.2?}] {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
