//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

mod common;

use std::cell::Cell;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use memsosc_core::ac::topologies::{bvd, compensated};
use memsosc_core::ac::{driving_point_impedance, parse_netlist, serialize_netlist};
use memsosc_core::compensation::{
    effective_resistance_from, fixtures::rft_l0_250p, shunt_inductor_for, tank_impedance, zero_phase_c0, CompensationNetwork,
};
use memsosc_core::design::{fixtures::rft30g_design, run_design};
use memsosc_core::noise::{fom_from_measurement, fom_max, fom_physical, leeson_phase_noise, OscillatorOperatingPoint};
use memsosc_core::resonator::fixtures::{builtin, published, rft30g};
use memsosc_core::sweep::{parameter_sweep, OperatingConditions, SweepVariable};
use memsosc_core::Resonator;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn table_regression() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, q_tol) in [("quartz45m", 0.02), ("saw400m", 0.10), ("fbar2g4", 0.02), ("rft30g", 0.02)] {
        let res = builtin(name).unwrap();
        let (f_label, q_listed) = published(name).unwrap();
        let df = (res.series_resonance() / f_label - 1.0).abs();
        let dq = (res.quality_factor() / q_listed - 1.0).abs();
        ok &= df <= 0.03 && dq <= q_tol;
        parts.push(format!("{name} f {:+.2}% Q {:+.2}%", 100.0 * df, 100.0 * dq));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    check(ok, format!("{}; {:.1?}", parts.join(", "), elapsed))
}

fn zero_phase() -> Outcome {
    let res = rft30g();
    match zero_phase_c0(&res, 30e9) {
        Ok(c0) => {
            let phase = Resonator { c_0: c0, ..res }.phase(30e9).unwrap();
            check((1.4e-15..=1.8e-15).contains(&c0) && phase.abs() < 1e-6, format!("C0 = {c0:e} F, phase {phase:e} deg"))
        }
        Err(e) => Err(format!("{e} (f_s = {:.6} GHz is above 30 GHz)", res.series_resonance() / 1e9)),
    }
}

fn op(v_osc: f64, f_0: f64, delta_f: f64, p_dc: f64) -> OscillatorOperatingPoint {
    OscillatorOperatingPoint { v_osc, i_bias: 1e-3, p_dc, f_0, delta_f, temperature: 300.0, gamma: 1.0, g_mbias: 0.0 }
}

fn noise_floor() -> Outcome {
    let pn = leeson_phase_noise(&rft30g(), 1e4, &op(0.3, 30e9, 1e6, 1e-3), 1.0).map_err(|e| e.to_string())?;
    check(within(pn, -159.0, 1.0), format!("{pn:.3} dBc/Hz"))
}

fn division() -> Outcome {
    let e = effective_resistance_from(332.0, 10.0, 4.8);
    check(within(e.r_res, 196.3, 0.1) && within(e.beta, 0.59, 0.01), format!("R_RES {:.3} ohm, beta {:.4}", e.r_res, e.beta))
}

fn ceiling() -> Outcome {
    let f = fom_max(1e4, 0.6).map_err(|e| e.to_string())?;
    check(within(f, 254.6, 0.1), format!("{f:.3} dBc/Hz"))
}

fn end_to_end() -> Outcome {
    let spec = rft30g_design();
    let r = run_design(&spec).map_err(|e| e.to_string())?;
    let ok = within(r.l_0, 250e-12, 25e-12)
        && r.predicted_pn <= -125.0
        && r.predicted_fom >= 210.0
        && r.p_dc_estimate <= 3e-3
        && spec.supply == 0.8;
    check(
        ok,
        format!(
            "L0 {:.0} pH, PN {:.2} dBc/Hz, FoM {:.2} dBc/Hz, P_DC {:.3} mW",
            r.l_0 * 1e12,
            r.predicted_pn,
            r.predicted_fom,
            r.p_dc_estimate * 1e3
        ),
    )
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let config = Config { cases: 10_000, failure_persistence: None, ..Config::default() };
    let worst = Cell::new(0.0f64);
    let mut runner = TestRunner::new(config.clone());
    let bvd_run = runner.run(&(common::resonator(), -1.0f64..1.0), |(res, u)| {
        let f = common::near(&res, u, 0.5);
        let err = common::relative_error(res.impedance(f).unwrap(), driving_point_impedance(&bvd(&res, None), f).unwrap());
        worst.set(worst.get().max(err));
        prop_assert!(err < 1e-9, "{err:e} at {f} for {res:?}");
        Ok(())
    });
    let mut runner = TestRunner::new(config);
    let strategy = (common::resonator().prop_flat_map(|r| (Just(r.clone()), common::shunt_network(&r))), -1.0f64..1.0);
    let tank_run = runner.run(&strategy, |((res, comp), u)| {
        let f = common::near(&res, u, 0.5);
        let err = common::relative_error(
            tank_impedance(&res, &comp, f).unwrap(),
            driving_point_impedance(&compensated(&res, &comp, None), f).unwrap(),
        );
        worst.set(worst.get().max(err));
        prop_assert!(err < 1e-9, "{err:e} at {f}");
        Ok(())
    });
    let elapsed = start.elapsed();
    let detail = format!("2 x 10^4 samples, worst relative error {:.2e}, {elapsed:.1?}", worst.get());
    match (bvd_run, tank_run) {
        (Ok(()), Ok(())) if elapsed < Duration::from_secs(10) => Ok(detail),
        (a, b) => Err(format!("{detail}; bvd {a:?}; tank {b:?}")),
    }
}

fn loaded_q_shape() -> Outcome {
    let res = rft30g();
    let f_s = res.series_resonance();
    let qs = [100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10_000.0, 20_000.0, 50_000.0, 100_000.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for q_l0 in [10.0, 20.0] {
        let comp = CompensationNetwork::shunt(shunt_inductor_for(res.c_0, f_s).unwrap(), q_l0, f_s).unwrap();
        let rows = parameter_sweep(&res, &comp, &OperatingConditions::default(), SweepVariable::QRft, &qs).map_err(|e| e.to_string())?;
        let monotone = rows.windows(2).all(|w| w[1].q_loaded >= w[0].q_loaded);
        let low: Vec<String> = rows
            .iter()
            .filter(|r| r.value >= 2000.0 && !(r.q_loaded / r.value >= 0.8))
            .map(|r| format!("{:.3} at Q {}", r.q_loaded / r.value, r.value))
            .collect();
        ok &= monotone && low.is_empty();
        let at2k = rows.iter().find(|r| r.value == 2000.0).unwrap();
        parts.push(format!(
            "Q_L0 {q_l0}: monotone {monotone}, Q_L/Q at 2000 {:.3}{}",
            at2k.q_loaded / 2000.0,
            if low.is_empty() { String::new() } else { format!(", below 0.8: {}", low.join(" ")) }
        ));
    }
    check(ok, parts.join("; "))
}

fn sensitivity() -> Outcome {
    let (res, comp) = (rft30g(), rft_l0_250p());
    let step = 0.5e-15;
    let dc: Vec<f64> = (-20..=20).map(|i| i as f64 * step).collect();
    let rows = parameter_sweep(&res, &comp, &OperatingConditions::default(), SweepVariable::DeltaC, &dc).map_err(|e| e.to_string())?;
    let centre = rows.iter().position(|r| r.value == 0.0).unwrap();
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.phase_noise.is_finite())
        .min_by(|a, b| a.1.phase_noise.total_cmp(&b.1.phase_noise))
        .map(|(i, _)| i)
        .unwrap();
    let good = |i: usize| rows[i].phase_noise < -120.0;
    let mut lo = centre;
    while lo > 0 && good(lo - 1) {
        lo -= 1;
    }
    let mut hi = centre;
    while hi + 1 < rows.len() && good(hi + 1) {
        hi += 1;
    }
    let width = if good(centre) { rows[hi].value - rows[lo].value } else { 0.0 };
    let hit_edge = lo == 0 || hi + 1 == rows.len();
    check(
        best == centre && width >= 6e-15,
        format!(
            "min {:.2} dBc/Hz at {:+.1} fF, below -120 over {}{:.1} fF",
            rows[best].phase_noise,
            rows[best].value * 1e15,
            if hit_edge { ">= " } else { "" },
            width * 1e15
        ),
    )
}

fn render(text: &str) -> String {
    match parse_netlist(text) {
        Ok(n) => format!("ok\n{}", serialize_netlist(&n)),
        Err(diags) => diags.iter().map(|d| format!("{d}\n")).collect(),
    }
}

fn parser() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<_> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cir"))
        .collect();
    files.sort();
    let mut codes = BTreeSet::new();
    let mut mismatched = Vec::new();
    for cir in &files {
        let got = render(&fs::read_to_string(cir).unwrap());
        if fs::read_to_string(cir.with_extension("expected")).ok().as_deref() != Some(got.as_str()) {
            mismatched.push(cir.file_name().unwrap().to_string_lossy().into_owned());
        }
        codes.extend(got.lines().filter_map(|l| l.split_whitespace().nth(1)).filter(|c| c.starts_with("E00")).map(String::from));
    }
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let round_trip = runner.run(&common::netlist_text(), |text| {
        let n = parse_netlist(&text).map_err(|d| TestCaseError::fail(format!("{d:?}")))?;
        prop_assert_eq!(parse_netlist(&serialize_netlist(&n)).unwrap(), n);
        Ok(())
    });
    check(
        files.len() >= 10 && codes.len() == 9 && mismatched.is_empty() && round_trip.is_ok(),
        format!(
            "{} golden files, {} codes, mismatched {:?}, 500 round trips {}",
            files.len(),
            codes.len(),
            mismatched,
            if round_trip.is_ok() { "ok" } else { "failed" }
        ),
    )
}

fn db_identities() -> Outcome {
    let res = rft30g();
    let at = |df: f64, f: f64| leeson_phase_noise(&res, 1e4, &op(0.3, 30e9, df, 1e-3), f).unwrap();
    let slope = at(1e6, 1.0) - at(1e7, 1.0);
    let additivity = at(1e6, 1.0 + 1.5) - at(1e6, 1.0) - 10.0 * 2.5f64.log10();
    let r = run_design(&rft30g_design()).map_err(|e| e.to_string())?;
    let p_out = r.v_osc * r.v_osc / (2.0 * r.r_res);
    let eta = p_out / r.p_dc_estimate;
    let point = op(r.v_osc, r.f_osc, 1e6, r.p_dc_estimate);
    let pn = leeson_phase_noise(&res, r.q_loaded, &point, r.budget.f_min).unwrap();
    let measured = fom_from_measurement(pn, r.f_osc, 1e6, r.p_dc_estimate).unwrap();
    let physical = fom_physical(r.q_loaded, r.beta, eta, r.budget.f_min, 300.0).unwrap();
    let gap = measured - physical;
    check(
        within(slope, 20.0, 1e-9) && additivity.abs() < 1e-9 && gap.abs() < 0.01,
        format!("slope {slope:.6} dB/decade, additivity error {additivity:.1e} dB, measured - physical FoM {gap:.2e} dB"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("reference resonator table", table_regression),
        ("zero-phase static capacitance", zero_phase),
        ("theoretical phase-noise floor", noise_floor),
        ("resistance division and beta", division),
        ("FoM ceiling", ceiling),
        ("end-to-end design", end_to_end),
        ("MNA oracle equivalence", oracle),
        ("loaded Q versus resonator Q", loaded_q_shape),
        ("bank detuning sensitivity", sensitivity),
        ("netlist parser", parser),
        ("dB identities", db_identities),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}  {name}: {detail}", i + 1);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
