//! Leeson phase noise, noise-factor budget and oscillator figures of merit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compensation::{dominant, effective_resistance, CompensationNetwork, DominantMode, Tank};
use crate::error::{require_positive, Error, Result};
use crate::resonator::Resonator;
use crate::units::BOLTZMANN;

/// FoM of an ideal oscillator with unit loaded Q and β, in dBc/Hz.
pub const FOM_FLOOR_DB: f64 = 176.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorOperatingPoint {
    /// Peak oscillation amplitude across the tank.
    pub v_osc: f64,
    pub i_bias: f64,
    pub p_dc: f64,
    pub f_0: f64,
    pub delta_f: f64,
    pub temperature: f64,
    /// Channel-noise coefficient.
    pub gamma: f64,
    /// Tail-source transconductance.
    pub g_mbias: f64,
}

impl OscillatorOperatingPoint {
    pub fn validate(&self) -> Result<()> {
        require_positive("v_osc", self.v_osc)?;
        require_positive("i_bias", self.i_bias)?;
        require_positive("p_dc", self.p_dc)?;
        require_positive("f_0", self.f_0)?;
        require_positive("delta_f", self.delta_f)?;
        require_positive("temperature", self.temperature)?;
        for (name, v) in [("gamma", self.gamma), ("g_mbias", self.g_mbias)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.delta_f < self.f_0) {
            return Err(Error::param("delta_f", format!("offset {} Hz is not below the carrier {} Hz", self.delta_f, self.f_0)));
        }
        Ok(())
    }
}

/// Noise factor split into resonator, inductor-loss and active parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub f_unity: f64,
    pub f_rl0: f64,
    pub f_active: f64,
    pub f_min: f64,
    pub beta: f64,
    /// Power delivered to the tank over DC power.
    pub eta: f64,
}

impl NoiseBudget {
    /// `F_RL0 = RL0/Rm`, `F_active = γβ + γ(4/9)·g_mbias·Rm·β²`.
    pub fn from_parts(r_m: f64, r_l0: f64, beta: f64, gamma: f64, g_mbias: f64, eta: f64) -> Self {
        let f_rl0 = r_l0 / r_m;
        let f_active = gamma * beta + gamma * (4.0 / 9.0) * g_mbias * r_m * beta * beta;
        NoiseBudget { f_unity: 1.0, f_rl0, f_active, f_min: 1.0 + f_rl0 + f_active, beta, eta }
    }
}

/// `10·log10[F·4kT·Rm/V²·(f0/(2·Q_L·Δf))²]` in dBc/Hz.
pub fn leeson_phase_noise(res: &Resonator, q_loaded: f64, op: &OscillatorOperatingPoint, noise_factor: f64) -> Result<f64> {
    res.validate()?;
    op.validate()?;
    require_positive("q_loaded", q_loaded)?;
    require_positive("noise_factor", noise_factor)?;
    Ok(leeson_db(res.r_m, q_loaded, op.v_osc, op.f_0, op.delta_f, op.temperature, noise_factor))
}

fn leeson_db(r_m: f64, q_loaded: f64, v_osc: f64, f_0: f64, delta_f: f64, temperature: f64, f: f64) -> f64 {
    let thermal = 4.0 * BOLTZMANN * temperature * r_m / (v_osc * v_osc);
    let shaping = f_0 / (2.0 * q_loaded * delta_f);
    10.0 * (f * thermal).log10() + 20.0 * shaping.log10()
}

pub fn noise_factor_components(
    res: &Resonator,
    comp: &CompensationNetwork,
    op: &OscillatorOperatingPoint,
) -> Result<NoiseBudget> {
    op.validate()?;
    let eff = effective_resistance(res, comp)?;
    let p_out = op.v_osc * op.v_osc / (2.0 * eff.r_res);
    Ok(NoiseBudget::from_parts(res.r_m, comp.r_l0(), eff.beta, op.gamma, op.g_mbias, p_out / op.p_dc))
}

/// `−PN + 20·log10(f0/Δf) − 10·log10(P_DC / 1 mW)`.
pub fn fom_from_measurement(phase_noise: f64, f_0: f64, delta_f: f64, p_dc: f64) -> Result<f64> {
    require_positive("f_0", f_0)?;
    require_positive("delta_f", delta_f)?;
    require_positive("p_dc", p_dc)?;
    if !phase_noise.is_finite() {
        return Err(Error::param("phase_noise", format!("must be finite, got {phase_noise}")));
    }
    Ok(-phase_noise + 20.0 * (f_0 / delta_f).log10() - 10.0 * (p_dc / 1e-3).log10())
}

/// `10·log10[2βη·Q_L²/(kTF)·1e-3]`.
pub fn fom_physical(q_loaded: f64, beta: f64, eta: f64, noise_factor: f64, temperature: f64) -> Result<f64> {
    require_positive("q_loaded", q_loaded)?;
    require_positive("beta", beta)?;
    require_positive("eta", eta)?;
    require_positive("noise_factor", noise_factor)?;
    require_positive("temperature", temperature)?;
    if eta > 1.0 {
        return Err(Error::param("eta", format!("efficiency {eta} exceeds 1")));
    }
    let kt = BOLTZMANN * temperature;
    Ok(10.0 * (2.0 * beta * eta / (kt * noise_factor) * 1e-3).log10() + 20.0 * q_loaded.log10())
}

/// `176.8 + 20·log10(Q_L) + 10·log10(β)`.
pub fn fom_max(q_loaded: f64, beta: f64) -> Result<f64> {
    require_positive("q_loaded", q_loaded)?;
    require_positive("beta", beta)?;
    Ok(FOM_FLOOR_DB + 20.0 * q_loaded.log10() + 10.0 * beta.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub delta_c: f64,
    /// Oscillation frequency (NaN when the tank has no resonance).
    pub f_osc: f64,
    pub q_loaded: f64,
    pub mode: Option<DominantMode>,
    pub phase_noise: f64,
}

/// `-max..=max` in steps of `step`, symmetric by construction.
pub fn symmetric_range(max: f64, step: f64) -> Result<Vec<f64>> {
    require_positive("step", step)?;
    if !(max.is_finite() && max >= 0.0) {
        return Err(Error::param("max", format!("must be finite and >= 0, got {max}")));
    }
    let n = (max / step + 1e-9).floor() as i64;
    Ok((-n..=n).map(|i| i as f64 * step).collect())
}

/// Phase noise versus extra tank capacitance. The noise factor is held at
/// its value for the nominal network; loaded Q and carrier follow the
/// dominant resonance at each point.
pub fn sensitivity_sweep(
    res: &Resonator,
    comp: &CompensationNetwork,
    op: &OscillatorOperatingPoint,
    delta_c: &[f64],
) -> Result<Vec<SensitivityPoint>> {
    op.validate()?;
    if delta_c.is_empty() {
        return Err(Error::param("delta_c", "range is empty"));
    }
    let span = delta_c.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let tol = 1e-9 * span.max(f64::MIN_POSITIVE);
    let symmetric = delta_c.iter().all(|d| delta_c.iter().any(|e| (e + d).abs() <= tol));
    if !symmetric {
        return Err(Error::param("delta_c", "range must be symmetric around 0"));
    }
    let f = noise_factor_components(res, comp, op)?.f_min;
    let base = Tank::new(res, comp)?;
    delta_c
        .par_iter()
        .map(|&dc| {
            let tank = base.shifted(dc)?;
            Ok(match dominant(&tank) {
                Ok((mode, r)) => SensitivityPoint {
                    delta_c: dc,
                    f_osc: r.frequency,
                    q_loaded: r.q,
                    mode: Some(mode),
                    phase_noise: leeson_db(res.r_m, r.q, op.v_osc, r.frequency, op.delta_f, op.temperature, f),
                },
                Err(_) => SensitivityPoint {
                    delta_c: dc,
                    f_osc: f64::NAN,
                    q_loaded: f64::NAN,
                    mode: None,
                    phase_noise: f64::NAN,
                },
            })
        })
        .collect()
}
