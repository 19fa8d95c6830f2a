//! Shunt-inductor compensation of the static capacitance C0.
//!
//! The compensated tank is three parallel branches between the resonator
//! terminals:
//!
//! ```text
//!   motional:   Rm---Lm---Cm
//!   capacitive: C0 + Cpar + Cfix + code·Cunit
//!   inductive:  L0---RL0          (RL0 = 2π·f_ref·L0 / Q_L0)
//! ```
//!
//! Resonances are located as zero-phase points of the composite impedance
//! (see [`crate::resonance`]). Near f_s the motional branch produces a
//! series-type resonance whose resistance is Rm ∥ Rp and whose phase-slope Q
//! is the loaded Q. Far from alignment only the parallel-type resonance of
//! the L0–C branch survives.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_freq, require_positive, Error, Result};
use crate::resonance::{bandwidth_q, find_resonances, Resonance, ResonanceKind};
use crate::resonator::Resonator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Shunt,
    Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensationNetwork {
    pub l_0: f64,
    /// Inductor Q at `f_ref`.
    pub q_l0: f64,
    pub f_ref: f64,
    pub c_fix: f64,
    /// Routing and buffer-load capacitance at the oscillator node.
    pub c_parasitic: f64,
    pub bank_unit: f64,
    pub bank_size: u32,
    pub bank_code: u32,
    pub topology: Topology,
}

impl CompensationNetwork {
    /// Plain shunt inductor with no added capacitance or bank.
    pub fn shunt(l_0: f64, q_l0: f64, f_ref: f64) -> Result<Self> {
        let comp = CompensationNetwork {
            l_0,
            q_l0,
            f_ref,
            c_fix: 0.0,
            c_parasitic: 0.0,
            bank_unit: 0.0,
            bank_size: 0,
            bank_code: 0,
            topology: Topology::Shunt,
        };
        comp.validate()?;
        Ok(comp)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("l_0", self.l_0)?;
        require_positive("q_l0", self.q_l0)?;
        require_positive("f_ref", self.f_ref)?;
        for (name, v) in [("c_fix", self.c_fix), ("c_parasitic", self.c_parasitic), ("bank_unit", self.bank_unit)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.bank_code > self.bank_size {
            return Err(Error::param(
                "bank_code",
                format!("{} exceeds bank size {}", self.bank_code, self.bank_size),
            ));
        }
        Ok(())
    }

    /// Series loss of L0, frequency independent.
    pub fn r_l0(&self) -> f64 {
        2.0 * PI * self.f_ref * self.l_0 / self.q_l0
    }

    pub fn bank_capacitance(&self) -> f64 {
        self.bank_code as f64 * self.bank_unit
    }

    /// Capacitance added by the network itself (everything except C0).
    pub fn added_capacitance(&self) -> f64 {
        self.c_fix + self.c_parasitic + self.bank_capacitance()
    }

    pub fn with_code(&self, code: u32) -> Self {
        CompensationNetwork { bank_code: code, ..self.clone() }
    }
}

/// Flattened shunt tank: resonator plus L0 branch and total shunt capacitance.
#[derive(Debug, Clone, PartialEq)]
pub struct Tank {
    pub res: Resonator,
    pub l_0: f64,
    pub r_l0: f64,
    /// C0 plus all added capacitance.
    pub c_shunt: f64,
}

impl Tank {
    pub fn new(res: &Resonator, comp: &CompensationNetwork) -> Result<Self> {
        res.validate()?;
        comp.validate()?;
        if comp.topology != Topology::Shunt {
            return Err(Error::UnsupportedTopology(
                "series compensation is only available as a sweep (series_impedance)".into(),
            ));
        }
        Ok(Tank {
            res: res.clone(),
            l_0: comp.l_0,
            r_l0: comp.r_l0(),
            c_shunt: res.c_0 + comp.added_capacitance(),
        })
    }

    /// Same tank with `delta_c` added to the shunt capacitance.
    pub fn shifted(&self, delta_c: f64) -> Result<Self> {
        let c_shunt = self.c_shunt + delta_c;
        if !(c_shunt > 0.0) {
            return Err(Error::param("delta_c", format!("total shunt capacitance {c_shunt} <= 0")));
        }
        Ok(Tank { c_shunt, ..self.clone() })
    }

    /// Admittance of the L0 branch and the capacitive branch together.
    pub fn lc_admittance(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        Complex64::new(0.0, w * self.c_shunt) + 1.0 / Complex64::new(self.r_l0, w * self.l_0)
    }

    pub fn impedance(&self, f: f64) -> Complex64 {
        // motional branch in admittance form; X computed from the stable detuning
        let w = 2.0 * PI * f;
        let x = -self.res.detuning(f) / (w * self.res.c_m);
        let y_m = 1.0 / Complex64::new(self.res.r_m, x);
        1.0 / (y_m + self.lc_admittance(f))
    }

    /// Frequency where the L0–C branch pair is purely resistive,
    /// `ω² = 1/(L0·C) − (RL0/L0)²`. `None` when the branch is overdamped.
    pub fn tank_frequency(&self) -> Option<f64> {
        let w2 = 1.0 / (self.l_0 * self.c_shunt) - (self.r_l0 / self.l_0).powi(2);
        (w2 > 0.0).then(|| w2.sqrt() / (2.0 * PI))
    }

    /// Half-width of the alignment window around f_s in hertz.
    ///
    /// A detuned L0–C branch presents a susceptance of about 4π·C·Δf at f_s;
    /// the motional branch can cancel at most 1/(2Rm). Aligned means the
    /// detuning uses at most half of that capture range.
    pub fn alignment_window(&self) -> f64 {
        1.0 / (16.0 * PI * self.c_shunt * self.res.r_m)
    }

    pub fn modes(&self) -> Modes {
        let fs = self.res.series_resonance();
        let q = self.res.quality_factor();
        let w = (4.0 / q).min(0.2);
        let z = |f: f64| self.impedance(f);
        let motional = find_resonances(&z, fs * (1.0 - w), fs * (1.0 + w), 4001, ResonanceKind::Series)
            .into_iter()
            .min_by(|a, b| (a.frequency - fs).abs().total_cmp(&(b.frequency - fs).abs()));
        let center = self.tank_frequency().unwrap_or(fs);
        let lc = find_resonances(&z, 0.5 * center, 1.5 * center, 8001, ResonanceKind::Parallel)
            .into_iter()
            .min_by(|a, b| (a.frequency - center).abs().total_cmp(&(b.frequency - center).abs()));
        Modes { motional, lc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominantMode {
    Motional,
    LcTank,
}

/// Zero-phase resonances of a compensated tank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Modes {
    /// Series-type resonance closest to f_s, created by the motional branch.
    pub motional: Option<Resonance>,
    /// Parallel-type resonance closest to the L0–C branch frequency.
    pub lc: Option<Resonance>,
}

impl Modes {
    /// The motional resonance wins while it exists and is sharper than the
    /// L0–C resonance; otherwise the oscillator settles on the L0–C tank.
    pub fn dominant(&self) -> Option<(DominantMode, Resonance)> {
        match (self.motional, self.lc) {
            (Some(m), Some(t)) if m.q > t.q => Some((DominantMode::Motional, m)),
            (Some(m), None) => Some((DominantMode::Motional, m)),
            (_, Some(t)) => Some((DominantMode::LcTank, t)),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveResistance {
    pub r_res: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub f_tank: Option<f64>,
    pub f_s: f64,
    pub window: f64,
    pub aligned: bool,
    pub dominant_mode: DominantMode,
    /// Frequency of the dominant resonance.
    pub f_osc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TankAnalysis {
    pub f_tank: Option<f64>,
    pub f_s: f64,
    pub f_osc: f64,
    pub r_res: f64,
    pub q_loaded: f64,
    pub beta: f64,
    pub aligned: bool,
    pub dominant_mode: DominantMode,
    pub alignment_window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankTuning {
    pub code: u32,
    /// f_tank − f_s at the chosen code (NaN when the branch cannot resonate).
    pub detuning: f64,
    pub aligned: bool,
    pub warning: Option<String>,
}

/// C0 that would put the bare resonator's phase at 0° at `f`:
/// `C0 = Cm(ω²LmCm − 1) / (ω²Rm²Cm² + (ω²LmCm − 1)²)`.
pub fn zero_phase_c0(res: &Resonator, f: f64) -> Result<f64> {
    require_freq(f)?;
    res.validate()?;
    let w = 2.0 * PI * f;
    let excess = -res.detuning(f); // ω²LmCm − 1
    if !(excess > 0.0) {
        return Err(Error::NoPhysicalSolution(format!(
            "{f:.9e} Hz is not above the series resonance {:.9e} Hz",
            res.series_resonance()
        )));
    }
    let a = w * res.r_m * res.c_m;
    Ok(res.c_m * excess / (a * a + excess * excess))
}

/// L that resonates `c_total` at `f_0`.
pub fn shunt_inductor_for(c_total: f64, f_0: f64) -> Result<f64> {
    require_positive("c_total", c_total)?;
    require_positive("f_0", f_0)?;
    let w = 2.0 * PI * f_0;
    Ok(1.0 / (w * w * c_total))
}

pub fn tank_impedance(res: &Resonator, comp: &CompensationNetwork, f: f64) -> Result<Complex64> {
    require_freq(f)?;
    Ok(Tank::new(res, comp)?.impedance(f))
}

/// Series-compensated resonator: L0 (with its loss) in series with the
/// resonator and any added capacitance across it. Sweep-only.
pub fn series_impedance(res: &Resonator, comp: &CompensationNetwork, f: f64) -> Result<Complex64> {
    require_freq(f)?;
    res.validate()?;
    comp.validate()?;
    let w = 2.0 * PI * f;
    let y_res = 1.0 / res.impedance(f)? + Complex64::new(0.0, w * comp.added_capacitance());
    Ok(Complex64::new(comp.r_l0(), w * comp.l_0) + 1.0 / y_res)
}

/// Rm ∥ (Q_L0²·RL0) and β = R_RES/Rm.
pub fn effective_resistance(res: &Resonator, comp: &CompensationNetwork) -> Result<EffectiveResistance> {
    res.validate()?;
    comp.validate()?;
    Ok(effective_resistance_from(res.r_m, comp.q_l0, comp.r_l0()))
}

pub fn effective_resistance_from(r_m: f64, q_l0: f64, r_l0: f64) -> EffectiveResistance {
    let r_p = q_l0 * q_l0 * r_l0;
    let r_res = if r_p.is_infinite() { r_m } else { r_m * r_p / (r_m + r_p) };
    EffectiveResistance { r_res, beta: r_res / r_m }
}

/// Phase-slope Q at the dominant resonance.
pub fn loaded_q(res: &Resonator, comp: &CompensationNetwork) -> Result<f64> {
    Ok(dominant(&Tank::new(res, comp)?)?.1.q)
}

/// −3 dB-bandwidth Q at the dominant resonance (secondary estimator).
pub fn loaded_q_bandwidth(res: &Resonator, comp: &CompensationNetwork) -> Result<f64> {
    let tank = Tank::new(res, comp)?;
    let (_, r) = dominant(&tank)?;
    bandwidth_q(&|f| tank.impedance(f), &r, 0.5)
}

pub(crate) fn dominant(tank: &Tank) -> Result<(DominantMode, Resonance)> {
    tank.modes().dominant().ok_or_else(|| {
        let c = tank.tank_frequency().unwrap_or_else(|| tank.res.series_resonance());
        Error::NoResonance { lo: 0.5 * c, hi: 1.5 * c }
    })
}

pub fn classify_alignment(res: &Resonator, comp: &CompensationNetwork) -> Result<Alignment> {
    classify_tank(&Tank::new(res, comp)?)
}

pub(crate) fn classify_tank(tank: &Tank) -> Result<Alignment> {
    let f_s = tank.res.series_resonance();
    let f_tank = tank.tank_frequency();
    let window = tank.alignment_window();
    let (dominant_mode, r) = dominant(tank)?;
    Ok(Alignment {
        f_tank,
        f_s,
        window,
        aligned: f_tank.is_some_and(|ft| (ft - f_s).abs() <= window),
        dominant_mode,
        f_osc: r.frequency,
    })
}

/// Bank code minimizing |f_tank − f_s|, ties to the lower code.
pub fn tune_bank(res: &Resonator, comp: &CompensationNetwork) -> Result<BankTuning> {
    let base = Tank::new(res, &comp.with_code(0))?;
    let f_s = res.series_resonance();
    let distance = |code: u32| -> f64 {
        let tank = Tank { c_shunt: base.c_shunt + code as f64 * comp.bank_unit, ..base.clone() };
        tank.tank_frequency().map_or(f64::INFINITY, |ft| (ft - f_s).abs())
    };
    let mut best = 0;
    let mut best_d = distance(0);
    for code in 1..=comp.bank_size {
        let d = distance(code);
        if d < best_d {
            best = code;
            best_d = d;
        }
    }
    let tank = Tank { c_shunt: base.c_shunt + best as f64 * comp.bank_unit, ..base };
    let detuning = tank.tank_frequency().map_or(f64::NAN, |ft| ft - f_s);
    let window = tank.alignment_window();
    let aligned = detuning.abs() <= window;
    let warning = (!aligned).then(|| {
        format!(
            "best bank code {best} leaves the tank {detuning:.4e} Hz from f_s (alignment window ±{window:.4e} Hz)"
        )
    });
    Ok(BankTuning { code: best, detuning, aligned, warning })
}

pub fn analyze(res: &Resonator, comp: &CompensationNetwork) -> Result<TankAnalysis> {
    let tank = Tank::new(res, comp)?;
    let eff = effective_resistance(res, comp)?;
    let alignment = classify_tank(&tank)?;
    let (_, r) = dominant(&tank)?;
    Ok(TankAnalysis {
        f_tank: alignment.f_tank,
        f_s: alignment.f_s,
        f_osc: alignment.f_osc,
        r_res: eff.r_res,
        q_loaded: r.q,
        beta: eff.beta,
        aligned: alignment.aligned,
        dominant_mode: alignment.dominant_mode,
        alignment_window: alignment.window,
    })
}

/// Named network fixtures for the 30 GHz RFT.
pub mod fixtures {
    use super::{CompensationNetwork, Topology};

    pub const NAMES: &[&str] = &["rft_l0_q10", "rft_l0_250p"];

    /// Shunt inductor with Q = 10 sized for RL0 = 4.8 Ω at 30 GHz.
    pub fn rft_l0_q10() -> CompensationNetwork {
        let f = 30e9;
        let l_0 = 10.0 * 4.8 / (2.0 * std::f64::consts::PI * f);
        CompensationNetwork {
            l_0,
            q_l0: 10.0,
            f_ref: f,
            c_fix: 10e-15,
            c_parasitic: 75.43e-15,
            bank_unit: 1e-15,
            bank_size: 16,
            bank_code: 8,
            topology: Topology::Shunt,
        }
    }

    /// 250 pH PDK inductor (Q ≈ 8), 10 fF MIM cap and a 16 × 1 fF bank.
    /// The parasitic value is back-derived so that midscale aligns the tank.
    pub fn rft_l0_250p() -> CompensationNetwork {
        CompensationNetwork {
            l_0: 250e-12,
            q_l0: 8.0,
            f_ref: 30e9,
            c_fix: 10e-15,
            c_parasitic: 76.84e-15,
            bank_unit: 1e-15,
            bank_size: 16,
            bank_code: 8,
            topology: Topology::Shunt,
        }
    }

    pub fn builtin(name: &str) -> Option<CompensationNetwork> {
        match name {
            "rft_l0_q10" => Some(rft_l0_q10()),
            "rft_l0_250p" => Some(rft_l0_250p()),
            _ => None,
        }
    }
}
