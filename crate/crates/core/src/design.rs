//! Design flow: from a resonator and targets to compensation values, bank
//! code, active-device sizing and predicted noise performance.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::compensation::{
    analyze, classify_alignment, tune_bank, CompensationNetwork, DominantMode, Topology,
};
use crate::error::{require_positive, Error, Result};
use crate::noise::{fom_max, fom_physical, leeson_phase_noise, noise_factor_components, NoiseBudget, OscillatorOperatingPoint};
use crate::resonator::{frequency_grid, Resonator, Spacing};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub resonator: Resonator,
    pub target_f0: f64,
    pub v_osc_target: f64,
    /// Routing and buffer-load capacitance at the oscillator node.
    pub parasitic_c: f64,
    pub q_l0_available: f64,
    pub bank_unit: f64,
    pub bank_size: u32,
    /// Process transconductance parameter μ·Cox, A/V².
    pub mu_cox: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub supply: f64,
    /// Fixed MIM capacitance at the node.
    pub c_fix: f64,
    /// Realizable inductor step; 0 means any value.
    pub l0_grid: f64,
    /// Offset for the predicted phase noise.
    pub offset: f64,
    /// Multiplier on the minimum transconductance 2/R_RES.
    pub startup_margin: f64,
    /// Tail transconductance; defaults to the sized g_m.
    pub g_mbias: Option<f64>,
}

impl DesignSpec {
    pub const DEFAULT_TEMPERATURE: f64 = 300.0;
    pub const DEFAULT_GAMMA: f64 = 1.0;
    pub const DEFAULT_C_FIX: f64 = 10e-15;
    pub const DEFAULT_L0_GRID: f64 = 25e-12;
    pub const DEFAULT_OFFSET: f64 = 1e6;
    pub const DEFAULT_STARTUP_MARGIN: f64 = 1.25;

    /// Spec with the documented defaults for everything not passed in.
    pub fn new(resonator: Resonator, target_f0: f64, v_osc_target: f64, supply: f64) -> Self {
        DesignSpec {
            resonator,
            target_f0,
            v_osc_target,
            parasitic_c: 0.0,
            q_l0_available: 10.0,
            bank_unit: 1e-15,
            bank_size: 16,
            mu_cox: 200e-6,
            gamma: Self::DEFAULT_GAMMA,
            temperature: Self::DEFAULT_TEMPERATURE,
            supply,
            c_fix: Self::DEFAULT_C_FIX,
            l0_grid: Self::DEFAULT_L0_GRID,
            offset: Self::DEFAULT_OFFSET,
            startup_margin: Self::DEFAULT_STARTUP_MARGIN,
            g_mbias: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.resonator.validate()?;
        require_positive("target_f0", self.target_f0)?;
        require_positive("v_osc_target", self.v_osc_target)?;
        require_positive("q_l0_available", self.q_l0_available)?;
        require_positive("mu_cox", self.mu_cox)?;
        require_positive("temperature", self.temperature)?;
        require_positive("supply", self.supply)?;
        require_positive("offset", self.offset)?;
        for (name, v) in [
            ("parasitic_c", self.parasitic_c),
            ("bank_unit", self.bank_unit),
            ("gamma", self.gamma),
            ("c_fix", self.c_fix),
            ("l0_grid", self.l0_grid),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if let Some(g) = self.g_mbias {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::param("g_mbias", format!("must be finite and >= 0, got {g}")));
            }
        }
        if !(self.startup_margin.is_finite() && self.startup_margin >= 1.0) {
            return Err(Error::param("startup_margin", format!("must be >= 1, got {}", self.startup_margin)));
        }
        let fs = self.resonator.series_resonance();
        if !(self.target_f0 >= 0.5 * fs && self.target_f0 <= 1.5 * fs) {
            return Err(Error::param(
                "target_f0",
                format!("{:.6e} Hz is outside [0.5, 1.5]·f_s = [{:.6e}, {:.6e}] Hz", self.target_f0, 0.5 * fs, 1.5 * fs),
            ));
        }
        if self.offset >= self.target_f0 {
            return Err(Error::param("offset", "must be below target_f0"));
        }
        if self.v_osc_target > 2.0 * self.supply {
            return Err(Error::param("v_osc_target", format!("exceeds twice the supply ({} V)", self.supply)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub f_s: f64,
    pub f_p: f64,
    pub q_rft: f64,
    /// Largest phase of the bare resonator within ±4/Q of f_s.
    pub bare_max_phase_deg: f64,
    pub c_node_midscale: f64,
    pub l_0: f64,
    pub r_l0: f64,
    pub c_fix: f64,
    pub bank_code: u32,
    pub f_tank: Option<f64>,
    pub alignment_window: f64,
    pub dominant_mode: DominantMode,
    pub f_osc: f64,
    pub r_res: f64,
    pub beta: f64,
    pub q_loaded: f64,
    pub g_m: f64,
    pub startup_product: f64,
    pub i_bias: f64,
    pub w_over_l: f64,
    pub p_dc_estimate: f64,
    pub v_osc: f64,
    pub gamma: f64,
    pub g_mbias: f64,
    pub temperature: f64,
    pub offset: f64,
    pub budget: NoiseBudget,
    pub predicted_pn: f64,
    pub predicted_fom: f64,
    pub fom_max: f64,
    pub network: CompensationNetwork,
    pub warnings: Vec<String>,
}

/// `g_m = 2/R_RES`, `I_BIAS = V_OSC/R_RES`, `W/L = g_m²/(2·I_BIAS·μCox)`.
pub fn size_active(r_res: f64, v_osc: f64, mu_cox: f64) -> Result<(f64, f64, f64)> {
    require_positive("r_res", r_res)?;
    require_positive("v_osc", v_osc)?;
    require_positive("mu_cox", mu_cox)?;
    let g_m = 2.0 / r_res;
    let i_bias = v_osc / r_res;
    Ok((g_m, i_bias, w_over_l(g_m, i_bias, mu_cox)))
}

fn w_over_l(g_m: f64, i_bias: f64, mu_cox: f64) -> f64 {
    g_m * g_m / (2.0 * i_bias * mu_cox)
}

/// Inductance that resonates `c` at `f` once its series loss
/// `RL0 = 2π·f_ref·L/q` is included.
pub fn lossy_inductor_for(c: f64, f: f64, f_ref: f64, q: f64) -> f64 {
    let w = 2.0 * PI * f;
    let wr = 2.0 * PI * f_ref;
    1.0 / (c * (w * w + (wr / q).powi(2)))
}

/// Smallest inductor on the grid whose required bank code lies within the
/// bank (±half a unit); with no grid, the value that centers the bank.
pub fn choose_inductor(spec: &DesignSpec) -> Result<f64> {
    let fs = spec.resonator.series_resonance();
    let q = spec.q_l0_available;
    let c_base = spec.resonator.c_0 + spec.parasitic_c + spec.c_fix;
    let mid = c_base + 0.5 * spec.bank_size as f64 * spec.bank_unit;
    if spec.l0_grid == 0.0 {
        return Ok(lossy_inductor_for(mid, fs, spec.target_f0, q));
    }
    let half = 0.5 * spec.bank_unit;
    let c_hi = c_base + spec.bank_size as f64 * spec.bank_unit + half;
    let c_lo = (c_base - half).max(f64::MIN_POSITIVE);
    let l_min = lossy_inductor_for(c_hi, fs, spec.target_f0, q);
    let l_max = lossy_inductor_for(c_lo, fs, spec.target_f0, q);
    let k = (l_min / spec.l0_grid * (1.0 - 1e-12)).ceil().max(1.0);
    let l = k * spec.l0_grid;
    if l > l_max {
        return Err(Error::Design(format!(
            "no inductor on the {:.3e} H grid lands the tank inside the bank range [{l_min:.4e}, {l_max:.4e}] H",
            spec.l0_grid
        )));
    }
    Ok(l)
}

pub fn run_design(spec: &DesignSpec) -> Result<DesignReport> {
    spec.validate()?;
    let res = &spec.resonator;
    let fs = res.series_resonance();
    let q_rft = res.quality_factor();
    let mut warnings = Vec::new();

    let half_bw = 0.5 * res.motional_bandwidth();
    if (spec.target_f0 - fs).abs() > half_bw {
        return Err(Error::Design(format!(
            "target {:.6e} Hz is {:.3e} Hz from f_s = {fs:.6e} Hz; the motional branch only holds the oscillator within ±{half_bw:.3e} Hz",
            spec.target_f0,
            spec.target_f0 - fs
        )));
    }

    let w = (4.0 / q_rft).min(0.2);
    let grid = frequency_grid(fs * (1.0 - w), fs * (1.0 + w), 2001, Spacing::Linear)?;
    let bare_max_phase_deg = res.sweep(&grid)?.iter().map(|(_, z)| crate::resonator::phase_deg(z)).fold(f64::MIN, f64::max);

    let c_node_midscale = res.c_0 + spec.parasitic_c + spec.c_fix + 0.5 * spec.bank_size as f64 * spec.bank_unit;
    let l_0 = choose_inductor(spec)?;
    let draft = CompensationNetwork {
        l_0,
        q_l0: spec.q_l0_available,
        f_ref: spec.target_f0,
        c_fix: spec.c_fix,
        c_parasitic: spec.parasitic_c,
        bank_unit: spec.bank_unit,
        bank_size: spec.bank_size,
        bank_code: spec.bank_size / 2,
        topology: Topology::Shunt,
    };
    let tuning = tune_bank(res, &draft)?;
    if !tuning.aligned {
        return Err(Error::Design(tuning.warning.unwrap_or_else(|| "bank cannot align the tank".into())));
    }
    let network = draft.with_code(tuning.code);
    let alignment = classify_alignment(res, &network)?;
    if alignment.dominant_mode != DominantMode::Motional {
        return Err(Error::Design(format!(
            "tank is aligned but the L0–C resonance at {:.6e} Hz dominates the motional one",
            alignment.f_osc
        )));
    }
    let tank = analyze(res, &network)?;

    let (g_min, i_bias, _) = size_active(tank.r_res, spec.v_osc_target, spec.mu_cox)?;
    let g_m = g_min * spec.startup_margin;
    let w_over_l = w_over_l(g_m, i_bias, spec.mu_cox);
    let startup_product = g_m * tank.r_res;
    let p_dc_estimate = spec.supply * i_bias;
    let g_mbias = spec.g_mbias.unwrap_or(g_m);

    let op = OscillatorOperatingPoint {
        v_osc: spec.v_osc_target,
        i_bias,
        p_dc: p_dc_estimate,
        f_0: tank.f_osc,
        delta_f: spec.offset,
        temperature: spec.temperature,
        gamma: spec.gamma,
        g_mbias,
    };
    let budget = noise_factor_components(res, &network, &op)?;
    let predicted_pn = leeson_phase_noise(res, tank.q_loaded, &op, budget.f_min)?;
    let predicted_fom = fom_physical(tank.q_loaded, budget.beta, budget.eta, budget.f_min, spec.temperature)?;

    if tank.q_loaded / q_rft < 0.8 {
        warnings.push(format!(
            "loading: Q_L = {:.0} is {:.1}% of the resonator Q ({:.0})",
            tank.q_loaded,
            100.0 * tank.q_loaded / q_rft,
            q_rft
        ));
    }
    if startup_product < 2.5 * (1.0 - 1e-9) {
        warnings.push(format!("startup margin: g_m·R_RES = {startup_product:.3} is below 2.5"));
    }

    Ok(DesignReport {
        f_s: fs,
        f_p: res.parallel_resonance(),
        q_rft,
        bare_max_phase_deg,
        c_node_midscale,
        l_0,
        r_l0: network.r_l0(),
        c_fix: spec.c_fix,
        bank_code: tuning.code,
        f_tank: tank.f_tank,
        alignment_window: tank.alignment_window,
        dominant_mode: tank.dominant_mode,
        f_osc: tank.f_osc,
        r_res: tank.r_res,
        beta: tank.beta,
        q_loaded: tank.q_loaded,
        g_m,
        startup_product,
        i_bias,
        w_over_l,
        p_dc_estimate,
        v_osc: spec.v_osc_target,
        gamma: spec.gamma,
        g_mbias,
        temperature: spec.temperature,
        offset: spec.offset,
        budget,
        predicted_pn,
        predicted_fom,
        fom_max: fom_max(tank.q_loaded, tank.beta)?,
        network,
        warnings,
    })
}

pub mod fixtures {
    use super::DesignSpec;
    use crate::resonator::fixtures::rft30g;

    pub const NAMES: &[&str] = &["rft30g_design"];

    /// 30 GHz RFT oscillator: 250 pH-class inductor with Q ≈ 8, 10 fF fixed
    /// cap, 16 × 1 fF bank, 0.8 V supply. The parasitic value is back-derived
    /// so that a 250 pH inductor aligns the tank at bank midscale.
    pub fn rft30g_design() -> DesignSpec {
        DesignSpec {
            parasitic_c: 76.84e-15,
            q_l0_available: 8.0,
            bank_unit: 1e-15,
            bank_size: 16,
            mu_cox: 200e-6,
            ..DesignSpec::new(rft30g(), 30e9, 0.3, 0.8)
        }
    }

    pub fn builtin(name: &str) -> Option<DesignSpec> {
        match name {
            "rft30g_design" => Some(rft30g_design()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sizing_reference_values() {
        let (g, i, wl) = size_active(196.3, 0.3, 200e-6).unwrap();
        assert_relative_eq!(g, 10.19e-3, max_relative = 1e-3);
        assert_relative_eq!(i, 1.528e-3, max_relative = 1e-3);
        assert_relative_eq!(wl, 169.9, max_relative = 1e-3);
        let (g, i, _) = size_active(2.0, 2.0, 1.0).unwrap();
        assert_eq!((g, i), (1.0, 1.0));
        assert!(size_active(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rft_design() {
        let r = run_design(&fixtures::rft30g_design()).unwrap();
        assert_relative_eq!(r.l_0, 250e-12, max_relative = 1e-9);
        assert_eq!(r.bank_code, 8);
        assert!(r.predicted_pn <= -125.0, "{}", r.predicted_pn);
        assert!(r.predicted_fom >= 210.0, "{}", r.predicted_fom);
        assert!(r.p_dc_estimate <= 3e-3);
        assert!(r.startup_product >= 2.0);
        assert!(r.bare_max_phase_deg < 0.0);
        let again = fom_physical(r.q_loaded, r.budget.beta, r.budget.eta, r.budget.f_min, r.temperature).unwrap();
        assert_eq!(again, r.predicted_fom);
    }

    #[test]
    fn bare_c0_inductor() {
        let spec = DesignSpec {
            parasitic_c: 0.0,
            bank_size: 0,
            c_fix: 0.0,
            l0_grid: 0.0,
            q_l0_available: 100.0,
            ..fixtures::rft30g_design()
        };
        let r = run_design(&spec).unwrap();
        assert_relative_eq!(r.l_0, 1.759e-9, max_relative = 1e-3);
    }

    #[test]
    fn low_q_resonator_warns() {
        let spec = fixtures::rft30g_design();
        let spec = DesignSpec { resonator: spec.resonator.with_quality_factor(500.0).unwrap(), ..spec };
        let r = run_design(&spec).unwrap();
        assert!(r.warnings.iter().any(|w| w.starts_with("loading")), "{:?}", r.warnings);
    }

    #[test]
    fn deterministic() {
        let a = run_design(&fixtures::rft30g_design()).unwrap();
        let b = run_design(&fixtures::rft30g_design()).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn inductor_is_minimal_on_grid() {
        let spec = fixtures::rft30g_design();
        let l = choose_inductor(&spec).unwrap();
        let smaller = l - spec.l0_grid;
        let fs = spec.resonator.series_resonance();
        let c_req = 1.0 / (smaller * ((2.0 * PI * fs).powi(2) + (2.0 * PI * spec.target_f0 / spec.q_l0_available).powi(2)));
        let code = (c_req - spec.resonator.c_0 - spec.parasitic_c - spec.c_fix) / spec.bank_unit;
        assert!(code > spec.bank_size as f64 + 0.5);
    }

    #[test]
    fn rejects_far_target() {
        let spec = DesignSpec { target_f0: 31e9, ..fixtures::rft30g_design() };
        assert!(matches!(run_design(&spec), Err(Error::Design(_))));
        let spec = DesignSpec { target_f0: 100e9, ..fixtures::rft30g_design() };
        assert!(matches!(run_design(&spec), Err(Error::InvalidParameter { .. })));
    }
}
