mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use memsosc_core::ac::{parse_netlist, serialize_netlist};
use proptest::prelude::*;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn render(text: &str) -> String {
    match parse_netlist(text) {
        Ok(n) => format!("ok\n{}", serialize_netlist(&n)),
        Err(diags) => diags.iter().map(|d| format!("{d}\n")).collect(),
    }
}

fn cases() -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(golden_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cir"))
        .collect();
    v.sort();
    v
}

#[test]
fn golden_files() {
    let bless = std::env::var_os("MEMSOSC_BLESS").is_some();
    let mut codes = BTreeSet::new();
    let files = cases();
    assert!(files.len() >= 10);
    for cir in &files {
        let got = render(&fs::read_to_string(cir).unwrap());
        let expected_path = cir.with_extension("expected");
        if bless {
            fs::write(&expected_path, &got).unwrap();
            continue;
        }
        let want = fs::read_to_string(&expected_path).unwrap_or_else(|_| panic!("missing {}", expected_path.display()));
        assert_eq!(got, want, "{}", cir.display());
        for line in got.lines().filter(|l| !l.starts_with("ok")) {
            if let Some(code) = line.split_whitespace().nth(1).filter(|c| c.starts_with('E')) {
                codes.insert(code.to_string());
            }
        }
    }
    if !bless {
        let all: BTreeSet<String> = (1..=9).map(|i| format!("E00{i}")).collect();
        assert_eq!(codes, all);
    }
}

#[test]
fn golden_ok_files_reparse() {
    for cir in cases() {
        if let Ok(n) = parse_netlist(&fs::read_to_string(&cir).unwrap()) {
            assert_eq!(parse_netlist(&serialize_netlist(&n)).unwrap(), n, "{}", cir.display());
        }
    }
}

#[test]
fn rft_golden_matches_fixture_values() {
    let n = parse_netlist(&fs::read_to_string(golden_dir().join("01_bvd_rft.cir")).unwrap()).unwrap();
    let v: Vec<f64> = n.elements.iter().map(|e| e.value).collect();
    assert_eq!(v, [332.0, 17.59e-6, 1.6e-18, 16e-15]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn round_trip(text in common::netlist_text()) {
        let first = parse_netlist(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        let again = parse_netlist(&serialize_netlist(&first)).unwrap();
        prop_assert_eq!(&again, &first);
        prop_assert_eq!(serialize_netlist(&again), serialize_netlist(&first));
    }
}
