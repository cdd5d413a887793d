#![allow(dead_code)]

use std::path::PathBuf;

/// Golden file stem and the command line that must reproduce it.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    ("mul_single_one", &["mul", "--format", "single", "3F800000", "3F800000"]),
    ("mul_double_product", &["mul", "--format", "double", "3FF8000000000000", "4004000000000000"]),
    ("mul_double_report", &["mul", "--format", "double", "3FF8000000000000", "4004000000000000", "--report"]),
    (
        "mul_quad_inf_zero",
        &["mul", "--format", "quad", "7FFF0000000000000000000000000000", "00000000000000000000000000000000"],
    ),
    ("mul_single_overflow_toward_zero", &["mul", "--format", "single", "7F7FFFFF", "40000000", "--rounding", "toward-zero"]),
    ("plan_p57", &["plan", "--preset", "p57"]),
    ("plan_p114", &["plan", "--preset", "p114"]),
    ("plan_54_baseline18", &["plan", "54", "54", "--tileset", "baseline18"]),
    ("compare_113_civp_baseline18", &["compare", "113", "113", "civp", "baseline18"]),
    ("compare_24_civp", &["compare", "24", "24", "civp"]),
    ("compare_57_civp_baseline18", &["compare", "57", "57", "civp", "baseline18"]),
    ("compare_quad_json", &["compare", "--format", "quad", "civp", "baseline18", "existing-fpga", "--json"]),
];

pub fn golden_path(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{stem}.txt"))
}

/// Runs every case and returns the stems whose stdout differs from the
/// stored file. Set `CIVP_BLESS=1` to rewrite the files instead.
pub fn golden_mismatches() -> Vec<String> {
    let bless = std::env::var_os("CIVP_BLESS").is_some();
    let mut bad = Vec::new();
    for (stem, args) in GOLDEN_CASES {
        let out = civp_cli::run(std::iter::once("civp").chain(args.iter().copied()));
        if out.code != 0 {
            bad.push(format!("{stem}: exit {} {}", out.code, out.stderr.trim()));
            continue;
        }
        let path = golden_path(stem);
        if bless {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        match std::fs::read(&path) {
            Ok(bytes) if bytes == out.stdout.as_bytes() => {}
            Ok(_) => bad.push(format!("{stem}: output differs from {}", path.display())),
            Err(e) => bad.push(format!("{stem}: {e}")),
        }
    }
    bad
}
