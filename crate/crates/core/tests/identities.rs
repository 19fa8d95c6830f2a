use memsosc_core::noise::{fom_from_measurement, fom_max, fom_physical, leeson_phase_noise, OscillatorOperatingPoint};
use memsosc_core::resonator::fixtures::rft30g;
use memsosc_core::units::BOLTZMANN;
use memsosc_core::{NoiseBudget, Resonator};
use proptest::prelude::*;

fn op(v_osc: f64, f_0: f64, delta_f: f64, temperature: f64) -> OscillatorOperatingPoint {
    OscillatorOperatingPoint { v_osc, i_bias: 1e-3, p_dc: 1e-3, f_0, delta_f, temperature, gamma: 1.0, g_mbias: 1e-2 }
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

#[test]
fn decade_of_offset_is_twenty_db() {
    let res = rft30g();
    let at = |df| leeson_phase_noise(&res, 1e4, &op(0.3, 30e9, df, 300.0), 1.0).unwrap();
    assert!((at(1e5) - at(1e6) - 20.0).abs() < 1e-9);
    assert!((at(1e6) - at(1e7) - 20.0).abs() < 1e-9);
    assert!((at(1e6) - at(2e6) - 20.0 * 2f64.log10()).abs() < 1e-9);
}

#[test]
fn fom_floor_constant() {
    let exact = 10.0 * (2e-3 / (BOLTZMANN * 300.0)).log10();
    assert!((fom_physical(1.0, 1.0, 1.0, 1.0, 300.0).unwrap() - exact).abs() < 1e-9);
    assert!((fom_physical(1.0, 1.0, 1.0, 1.0, 300.0).unwrap() - fom_max(1.0, 1.0).unwrap()).abs() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn offset_slope(q in log_uniform(10.0, 1e6), df in log_uniform(1e2, 1e7), f in log_uniform(1.0, 10.0)) {
        let res = rft30g();
        let a = leeson_phase_noise(&res, q, &op(0.3, 30e9, df, 300.0), f).unwrap();
        let b = leeson_phase_noise(&res, q, &op(0.3, 30e9, df * 10.0, 300.0), f).unwrap();
        prop_assert!((a - b - 20.0).abs() < 1e-9);
    }

    /// Noise factors add on a linear scale: F=a+b gives 10·log10((a+b)/a) dB more than F=a.
    #[test]
    fn noise_factor_additivity(a in 1.0f64..10.0, b in 0.0f64..10.0, q in log_uniform(10.0, 1e6)) {
        let res = rft30g();
        let p = op(0.3, 30e9, 1e6, 300.0);
        let base = leeson_phase_noise(&res, q, &p, a).unwrap();
        let sum = leeson_phase_noise(&res, q, &p, a + b).unwrap();
        prop_assert!((sum - base - 10.0 * ((a + b) / a).log10()).abs() < 1e-9);
        let budget = NoiseBudget::from_parts(332.0, b * 332.0, 0.5, 1.0, 0.01, 0.2);
        prop_assert_eq!(budget.f_min, 1.0 + budget.f_rl0 + budget.f_active);
    }

    /// Measurement-form FoM of a self-consistent Leeson oscillator equals the physical form.
    #[test]
    fn measured_and_physical_fom_agree(
        r_m in log_uniform(1.0, 1e3),
        q in log_uniform(100.0, 1e5),
        beta in 0.05f64..1.0,
        eta in 0.01f64..1.0,
        f in 1.0f64..10.0,
        f_0 in log_uniform(1e7, 1e11),
        v in 0.05f64..1.0,
        t in 200.0f64..400.0,
    ) {
        let res = Resonator { r_m, ..rft30g() };
        let p_out = v * v / (2.0 * beta * r_m);
        let p_dc = p_out / eta;
        let point = OscillatorOperatingPoint { v_osc: v, i_bias: 1e-3, p_dc, f_0, delta_f: f_0 * 1e-4, temperature: t, gamma: 1.0, g_mbias: 0.0 };
        let pn = leeson_phase_noise(&res, q, &point, f).unwrap();
        let measured = fom_from_measurement(pn, f_0, point.delta_f, p_dc).unwrap();
        let physical = fom_physical(q, beta, eta, f, t).unwrap();
        prop_assert!((measured - physical).abs() < 0.01, "{measured} vs {physical}");
    }

    #[test]
    fn f_min_monotone(
        r_l0 in 0.0f64..50.0,
        beta in 0.0f64..1.0,
        gamma in 0.0f64..3.0,
        g in 0.0f64..0.1,
        d in 0.0f64..1.0,
    ) {
        let base = NoiseBudget::from_parts(332.0, r_l0, beta, gamma, g, 0.2).f_min;
        prop_assert!(base >= 1.0);
        prop_assert!(NoiseBudget::from_parts(332.0, r_l0 + d, beta, gamma, g, 0.2).f_min >= base);
        prop_assert!(NoiseBudget::from_parts(332.0, r_l0, beta + d, gamma, g, 0.2).f_min >= base);
        prop_assert!(NoiseBudget::from_parts(332.0, r_l0, beta, gamma + d, g, 0.2).f_min >= base);
        prop_assert!(NoiseBudget::from_parts(332.0, r_l0, beta, gamma, g + d * 0.01, 0.2).f_min >= base);
    }

    #[test]
    fn ceiling_is_ideal_physical_fom(q in log_uniform(10.0, 1e6), beta in 0.01f64..1.0) {
        let ideal = fom_physical(q, beta, 1.0, 1.0, 300.0).unwrap();
        prop_assert!((ideal - fom_max(q, beta).unwrap()).abs() < 0.05);
        prop_assert!(fom_physical(q, beta, 0.5, 1.0, 300.0).unwrap() < ideal);
    }
}
