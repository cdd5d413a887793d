use civp_core::fpmul::{fp_decode, fp_encode, fp_multiply, sig_multiply, FpClass, FpFormat, FpValue, RoundingMode};
use civp_core::reference::reference_multiply;
use civp_core::vectors::{directed_values, halfway_pair, random_bits, random_pair};
use civp_core::WideUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tiled(format: FpFormat, a: u128, b: u128, mode: RoundingMode) -> (u128, civp_core::Flags) {
    let x = FpValue::from_u128(format, a).unwrap();
    let y = FpValue::from_u128(format, b).unwrap();
    let (r, f) = fp_multiply(&x, &y, mode).unwrap();
    (r.to_u128(), f)
}

fn assert_agree(format: FpFormat, a: u128, b: u128, mode: RoundingMode) {
    let got = tiled(format, a, b, mode);
    let want = reference_multiply(format, a, b, mode);
    assert_eq!(got, want, "{format} {mode}: {a:#x} * {b:#x}");
}

#[test]
fn random_vectors_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1F);
    for (format, n) in [(FpFormat::SINGLE, 40_000), (FpFormat::DOUBLE, 10_000), (FpFormat::QUAD, 4_000)] {
        for i in 0..n {
            let (a, b) = random_pair(format, &mut rng);
            assert_agree(format, a, b, RoundingMode::ALL[i % 4]);
        }
    }
}

#[test]
fn directed_suite_all_modes() {
    for format in FpFormat::ALL {
        let values = directed_values(format);
        for &a in &values {
            for &b in &values {
                for mode in RoundingMode::ALL {
                    assert_agree(format, a, b, mode);
                }
            }
        }
    }
}

#[test]
fn halfway_cases_all_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for format in FpFormat::ALL {
        let emin = format.emin();
        let p = format.frac_bits as i64;
        for exp_sum in [0, 5, -7, emin, emin - 1, emin - p / 2, emin - p, format.emax()] {
            for _ in 0..100 {
                let (a, b) = halfway_pair(format, exp_sum, &mut rng);
                for mode in RoundingMode::ALL {
                    assert_agree(format, a, b, mode);
                }
            }
        }
    }
}

#[test]
fn nearest_even_matches_host_hardware() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50_000 {
        let (a, b) = random_pair(FpFormat::SINGLE, &mut rng);
        let host = f32::from_bits(a as u32) * f32::from_bits(b as u32);
        let (r, _) = tiled(FpFormat::SINGLE, a, b, RoundingMode::NearestEven);
        if !host.is_nan() {
            assert_eq!(r as u32, host.to_bits(), "{a:#x} * {b:#x}");
        }
        let (a, b) = random_pair(FpFormat::DOUBLE, &mut rng);
        let host = f64::from_bits(a as u64) * f64::from_bits(b as u64);
        let (r, _) = tiled(FpFormat::DOUBLE, a, b, RoundingMode::NearestEven);
        if !host.is_nan() {
            assert_eq!(r as u64, host.to_bits(), "{a:#x} * {b:#x}");
        }
    }
}

#[test]
fn decode_encode_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for format in FpFormat::ALL {
        for _ in 0..20_000 {
            let v = FpValue::from_u128(format, random_bits(format, &mut rng)).unwrap();
            assert_eq!(fp_encode(&fp_decode(&v), format).unwrap(), v);
        }
        for raw in directed_values(format) {
            let v = FpValue::from_u128(format, raw).unwrap();
            assert_eq!(fp_encode(&fp_decode(&v), format).unwrap(), v);
        }
    }
}

#[test]
fn significand_products_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for format in FpFormat::ALL {
        let s = format.sig_bits();
        let mut operands = vec![
            WideUint::zero(s),
            WideUint::one(s),
            WideUint::all_ones(s),
            WideUint::power_of_two(s - 1, s).unwrap(),
        ];
        for _ in 0..200 {
            let raw = random_bits(format, &mut rng) & ((1 << s) - 1);
            operands.push(WideUint::from_u128(raw, s).unwrap());
        }
        for a in &operands {
            for b in operands.iter().take(20) {
                assert_eq!(sig_multiply(a, b, format).unwrap(), WideUint::mul_oracle(a, b));
            }
        }
    }
}

fn arb_operand(format: FpFormat) -> impl Strategy<Value = u128> {
    any::<u128>().prop_map(move |r| {
        if format.total_bits == 128 { r } else { r & ((1 << format.total_bits) - 1) }
    })
}

fn arb_format() -> impl Strategy<Value = FpFormat> {
    prop::sample::select(FpFormat::ALL.to_vec())
}

fn arb_mode() -> impl Strategy<Value = RoundingMode> {
    prop::sample::select(RoundingMode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn commutative_and_signed(
        (format, a, b) in arb_format().prop_flat_map(|f| (Just(f), arb_operand(f), arb_operand(f))),
        mode in arb_mode(),
    ) {
        let x = FpValue::from_u128(format, a).unwrap();
        let y = FpValue::from_u128(format, b).unwrap();
        let (ab, fab) = fp_multiply(&x, &y, mode).unwrap();
        let (ba, fba) = fp_multiply(&y, &x, mode).unwrap();
        if !x.is_nan() && !y.is_nan() {
            prop_assert_eq!(&ab, &ba);
            prop_assert_eq!(fab, fba);
            if !ab.is_nan() {
                prop_assert_eq!(ab.sign(), x.sign() ^ y.sign());
            }
        }
    }

    #[test]
    fn one_is_the_identity(
        (format, a) in arb_format().prop_flat_map(|f| (Just(f), arb_operand(f))),
    ) {
        let x = FpValue::from_u128(format, a).unwrap();
        prop_assume!(x.class() != FpClass::Nan);
        let (r, flags) = fp_multiply(&x, &format.one(), RoundingMode::NearestEven).unwrap();
        prop_assert_eq!(r, x);
        prop_assert!(flags.is_empty());
    }
}
