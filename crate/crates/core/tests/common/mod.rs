#![allow(dead_code)]

use proptest::prelude::*;

use memsosc_core::compensation::{CompensationNetwork, Topology};
use memsosc_core::Resonator;

const SUFFIXES: &[&str] = &["", "f", "p", "n", "u", "m", "k", "meg", "g", "t", "F", "MEG", "e-3", "E2"];

/// Positive number in one of the accepted spellings.
pub fn value_text() -> impl Strategy<Value = String> {
    (1u32..100_000, 0usize..4, 0..SUFFIXES.len()).prop_map(|(m, d, s)| {
        let digits = m.to_string();
        let body = if d > 0 && d < digits.len() {
            format!("{}.{}", &digits[..digits.len() - d], &digits[digits.len() - d..])
        } else {
            digits
        };
        format!("{body}{}", SUFFIXES[s])
    })
}

fn kind() -> impl Strategy<Value = char> {
    prop::sample::select(vec!['R', 'L', 'C', 'r', 'l', 'c'])
}

fn node(i: usize, alpha: bool) -> String {
    match (i, alpha) {
        (0, _) => "0".into(),
        (i, true) => format!("n{i}"),
        (i, false) => i.to_string(),
    }
}

/// Random valid netlist text: a spanning tree to ground plus extra
/// branches, optional sweep and probe, comments and uneven spacing.
pub fn netlist_text() -> impl Strategy<Value = String> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((any::<prop::sample::Index>(), kind(), value_text()), n),
                prop::collection::vec((0..=n, 0..=n, kind(), value_text()), 0..5),
                any::<bool>(),
                prop::option::of((any::<bool>(), 1usize..500, 1u32..100, 1u32..100)),
                prop::option::of((0..=n, 0..=n)),
                any::<bool>(),
                1usize..4,
            )
        })
        .prop_map(|(n, tree, extra, alpha, sweep, probe, comment, pad)| {
            let sp = " ".repeat(pad);
            let mut out = String::new();
            if comment {
                out.push_str("* generated\n\n");
            }
            let mut idx = 0;
            for (i, (parent, k, v)) in tree.into_iter().enumerate() {
                let child = i + 1;
                let p = parent.index(child);
                idx += 1;
                out.push_str(&format!("{k}{idx}{sp}{}{sp}{} {v}\n", node(child, alpha), node(p, alpha)));
            }
            for (a, b, k, v) in extra {
                if a == b {
                    continue;
                }
                idx += 1;
                out.push_str(&format!("{k}x{idx} {} {}{sp}{v}\n", node(a, alpha), node(b, alpha)));
            }
            if let Some((log, points, a, b)) = sweep {
                let spacing = if log { "log" } else { "LIN" };
                out.push_str(&format!(".ac {spacing} {points} {a}meg {}meg\n", a + b));
            }
            if let Some((a, b)) = probe {
                if a != b && a <= n && b <= n {
                    out.push_str(&format!(".probe {} {}\n", node(a, alpha), node(b, alpha)));
                }
            }
            out
        })
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

/// Resonators spanning quartz to mmWave MEMS, Q from 50 to 2e5.
pub fn resonator() -> impl Strategy<Value = Resonator> {
    (log_uniform(1e6, 1e11), log_uniform(50.0, 2e5), log_uniform(1e-5, 1e-1), log_uniform(1.0, 1e3)).prop_map(
        |(fs, q, kt2, r_m)| {
            let w = 2.0 * std::f64::consts::PI * fs;
            let l_m = q * r_m / w;
            let c_m = 1.0 / (w * w * l_m);
            Resonator { r_m, l_m, c_m, c_0: c_m / kt2, label: "random".into() }
        },
    )
}

/// Frequency within ±`span`·f_s, denser near f_s.
pub fn near(res: &Resonator, u: f64, span: f64) -> f64 {
    res.series_resonance() * (1.0 + span * u.signum() * u.abs().powi(3))
}

pub fn shunt_network(res: &Resonator) -> impl Strategy<Value = CompensationNetwork> {
    let c0 = res.c_0;
    let fs = res.series_resonance();
    (log_uniform(0.5, 2.0), log_uniform(2.0, 200.0), log_uniform(1e-3, 2.0), 0u32..=16).prop_map(
        move |(detune, q_l0, extra, code)| {
            let c_fix = extra * c0;
            let unit = 0.01 * c0;
            let c_total = c0 + c_fix + code as f64 * unit;
            let w = 2.0 * std::f64::consts::PI * fs;
            CompensationNetwork {
                l_0: detune / (w * w * c_total),
                q_l0,
                f_ref: fs,
                c_fix,
                c_parasitic: 0.5 * c_fix,
                bank_unit: unit,
                bank_size: 16,
                bank_code: code,
                topology: Topology::Shunt,
            }
        },
    )
}

pub fn relative_error(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm())
}
