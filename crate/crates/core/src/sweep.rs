//! One-parameter sweeps of a compensated resonator with all derived metrics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compensation::{dominant, effective_resistance, CompensationNetwork, DominantMode, Tank};
use crate::error::{require_positive, Error, Result};
use crate::noise::{fom_physical, leeson_phase_noise, noise_factor_components, OscillatorOperatingPoint};
use crate::resonator::Resonator;

/// Bias conditions from which an operating point is derived for a tank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingConditions {
    pub v_osc: f64,
    pub supply: f64,
    pub delta_f: f64,
    pub temperature: f64,
    pub gamma: f64,
    /// Tail transconductance; `None` uses the sized g_m.
    pub g_mbias: Option<f64>,
    pub startup_margin: f64,
}

impl Default for OperatingConditions {
    fn default() -> Self {
        OperatingConditions {
            v_osc: 0.3,
            supply: 0.8,
            delta_f: 1e6,
            temperature: 300.0,
            gamma: 1.0,
            g_mbias: None,
            startup_margin: 1.25,
        }
    }
}

impl OperatingConditions {
    /// `I_BIAS = V/R_RES`, `P_DC = supply·I_BIAS`, g_mbias defaulting to
    /// `startup_margin·2/R_RES`.
    pub fn operating_point(&self, r_res: f64, f_0: f64) -> Result<OscillatorOperatingPoint> {
        require_positive("r_res", r_res)?;
        require_positive("supply", self.supply)?;
        let i_bias = self.v_osc / r_res;
        let op = OscillatorOperatingPoint {
            v_osc: self.v_osc,
            i_bias,
            p_dc: self.supply * i_bias,
            f_0,
            delta_f: self.delta_f,
            temperature: self.temperature,
            gamma: self.gamma,
            g_mbias: self.g_mbias.unwrap_or(2.0 * self.startup_margin / r_res),
        };
        op.validate()?;
        Ok(op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    QRft,
    DeltaC,
    QL0,
    L0,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::QRft => "q_rft",
            SweepVariable::DeltaC => "delta_c",
            SweepVariable::QL0 => "q_l0",
            SweepVariable::L0 => "l_0",
        }
    }

    /// CSV column name for the swept value.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::QRft => "q_rft",
            SweepVariable::DeltaC => "delta_c_f",
            SweepVariable::QL0 => "q_l0",
            SweepVariable::L0 => "l_0_h",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q_rft" => Ok(SweepVariable::QRft),
            "delta_c" => Ok(SweepVariable::DeltaC),
            "q_l0" => Ok(SweepVariable::QL0),
            "l_0" => Ok(SweepVariable::L0),
            other => Err(Error::param("variable", format!("unknown sweep variable `{other}` (q_rft, delta_c, q_l0, l_0)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mode: Option<DominantMode>,
    pub f_osc: f64,
    pub q_loaded: f64,
    pub r_res: f64,
    pub beta: f64,
    pub noise_factor: f64,
    pub phase_noise: f64,
    pub fom: f64,
}

pub const ROW_COLUMNS: &str = "f_osc_hz,q_loaded,r_res_ohm,beta,noise_factor,phase_noise_dbchz,fom_dbchz";

impl SweepRow {
    pub fn cells(&self) -> Vec<f64> {
        vec![self.value, self.f_osc, self.q_loaded, self.r_res, self.beta, self.noise_factor, self.phase_noise, self.fom]
    }
}

pub fn header(var: SweepVariable) -> String {
    format!("{},{ROW_COLUMNS}", var.column())
}

/// Metrics of one resonator/network pair, with optional extra shunt capacitance.
pub fn evaluate(res: &Resonator, comp: &CompensationNetwork, cond: &OperatingConditions, delta_c: f64, value: f64) -> Result<SweepRow> {
    let tank = Tank::new(res, comp)?.shifted(delta_c)?;
    let eff = effective_resistance(res, comp)?;
    let Ok((mode, r)) = dominant(&tank) else {
        return Ok(SweepRow {
            value,
            mode: None,
            f_osc: f64::NAN,
            q_loaded: f64::NAN,
            r_res: eff.r_res,
            beta: eff.beta,
            noise_factor: f64::NAN,
            phase_noise: f64::NAN,
            fom: f64::NAN,
        });
    };
    let op = cond.operating_point(eff.r_res, r.frequency)?;
    let budget = noise_factor_components(res, comp, &op)?;
    Ok(SweepRow {
        value,
        mode: Some(mode),
        f_osc: r.frequency,
        q_loaded: r.q,
        r_res: eff.r_res,
        beta: eff.beta,
        noise_factor: budget.f_min,
        phase_noise: leeson_phase_noise(res, r.q, &op, budget.f_min)?,
        fom: fom_physical(r.q, budget.beta, budget.eta, budget.f_min, op.temperature)?,
    })
}

pub fn parameter_sweep(
    res: &Resonator,
    comp: &CompensationNetwork,
    cond: &OperatingConditions,
    var: SweepVariable,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    values
        .par_iter()
        .map(|&v| match var {
            SweepVariable::QRft => evaluate(&res.with_quality_factor(v)?, comp, cond, 0.0, v),
            SweepVariable::DeltaC => evaluate(res, comp, cond, v, v),
            SweepVariable::QL0 => {
                let c = CompensationNetwork { q_l0: v, ..comp.clone() };
                c.validate()?;
                evaluate(res, &c, cond, 0.0, v)
            }
            SweepVariable::L0 => {
                let c = CompensationNetwork { l_0: v, ..comp.clone() };
                c.validate()?;
                evaluate(res, &c, cond, 0.0, v)
            }
        })
        .collect()
}
