//! Butterworth–Van Dyke one-port: motional branch (Rm, Lm, Cm) shunted by C0.
//!
//! All values are SI base units. Frequencies are in hertz.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_freq, require_positive, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonator {
    pub r_m: f64,
    pub l_m: f64,
    pub c_m: f64,
    pub c_0: f64,
    pub label: String,
}

impl Resonator {
    pub fn new(r_m: f64, l_m: f64, c_m: f64, c_0: f64, label: impl Into<String>) -> Result<Self> {
        let res = Resonator { r_m, l_m, c_m, c_0, label: label.into() };
        res.validate()?;
        Ok(res)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("r_m", self.r_m)?;
        require_positive("l_m", self.l_m)?;
        require_positive("c_m", self.c_m)?;
        require_positive("c_0", self.c_0)?;
        let q = self.quality_factor();
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::param("r_m", format!("derived Q is not finite and positive ({q})")));
        }
        Ok(())
    }

    /// Same resonator with `r_m` rescaled so that the motional Q equals `q`.
    /// Lm and Cm (and therefore f_s) are untouched.
    pub fn with_quality_factor(&self, q: f64) -> Result<Self> {
        require_positive("q", q)?;
        let mut out = self.clone();
        out.r_m = 2.0 * PI * self.series_resonance() * self.l_m / q;
        out.validate()?;
        Ok(out)
    }

    pub fn series_resonance(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l_m * self.c_m).sqrt())
    }

    pub fn parallel_resonance(&self) -> f64 {
        self.series_resonance() * (1.0 + self.c_m / (2.0 * self.c_0))
    }

    pub fn quality_factor(&self) -> f64 {
        2.0 * PI * self.series_resonance() * self.l_m / self.r_m
    }

    /// Q from the capacitive form, 1/(ω_s Cm Rm). Agrees with [`quality_factor`](Self::quality_factor).
    pub fn quality_factor_from_cm(&self) -> f64 {
        1.0 / (2.0 * PI * self.series_resonance() * self.c_m * self.r_m)
    }

    /// Motional −3 dB bandwidth f_s/Q in hertz.
    pub fn motional_bandwidth(&self) -> f64 {
        self.series_resonance() / self.quality_factor()
    }

    /// kt² = Cm/C0.
    pub fn coupling_coefficient(&self) -> f64 {
        self.c_m / self.c_0
    }

    /// 1 − ω²LmCm, evaluated as (f_s − f)(f_s + f)/f_s² so the small
    /// difference near f_s keeps its digits.
    pub(crate) fn detuning(&self, f: f64) -> f64 {
        let fs = self.series_resonance();
        (fs - f) * (fs + f) / (fs * fs)
    }

    /// Impedance of the motional branch alone.
    pub fn motional_impedance(&self, f: f64) -> Result<Complex64> {
        require_freq(f)?;
        let w = 2.0 * PI * f;
        // ωLm − 1/(ωCm) = −(1 − ω²LmCm)/(ωCm)
        let x = -self.detuning(f) / (w * self.c_m);
        Ok(Complex64::new(self.r_m, x))
    }

    /// Closed-form BVD impedance
    /// `Z = [(1 − ω²LmCm) + jωRmCm] / [−ω²RmCmC0 + jω(Cm + C0(1 − ω²LmCm))]`.
    pub fn impedance(&self, f: f64) -> Result<Complex64> {
        require_freq(f)?;
        let w = 2.0 * PI * f;
        let d = self.detuning(f);
        let num = Complex64::new(d, w * self.r_m * self.c_m);
        let den = Complex64::new(
            -w * w * self.r_m * self.c_m * self.c_0,
            w * (self.c_m + self.c_0 * d),
        );
        Ok(num / den)
    }

    /// Phase of the impedance in degrees, wrapped to (−180, 180].
    pub fn phase(&self, f: f64) -> Result<f64> {
        Ok(phase_deg(self.impedance(f)?))
    }

    /// |X_C0| = 1/(ωC0).
    pub fn static_reactance(&self, f: f64) -> Result<f64> {
        require_freq(f)?;
        Ok(1.0 / (2.0 * PI * f * self.c_0))
    }

    pub fn sweep(&self, freqs: &[f64]) -> Result<ComplexResponse> {
        let values = freqs.iter().map(|&f| self.impedance(f)).collect::<Result<Vec<_>>>()?;
        ComplexResponse::new(freqs.to_vec(), values)
    }
}

/// Principal argument in degrees on (−180, 180].
pub fn phase_deg(z: Complex64) -> f64 {
    let deg = z.arg().to_degrees();
    if deg <= -180.0 {
        deg + 360.0
    } else {
        deg
    }
}

/// Frequency grid with impedance samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    frequencies: Vec<f64>,
    values: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(frequencies: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::param("frequencies", "response must be nonempty"));
        }
        if frequencies.len() != values.len() {
            return Err(Error::param(
                "values",
                format!("{} values for {} frequencies", values.len(), frequencies.len()),
            ));
        }
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("frequencies", "grid must be strictly increasing"));
        }
        Ok(ComplexResponse { frequencies, values })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.frequencies.iter().copied().zip(self.values.iter().copied())
    }
}

/// Frequency grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// `points` frequencies from `start` to `stop` inclusive.
pub fn frequency_grid(start: f64, stop: f64, points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    require_freq(start)?;
    require_freq(stop)?;
    if points == 0 {
        return Err(Error::param("points", "need at least one point"));
    }
    if points == 1 {
        return Ok(vec![start]);
    }
    if !(stop > start) {
        return Err(Error::param("stop", format!("stop ({stop}) must exceed start ({start})")));
    }
    let n = (points - 1) as f64;
    let grid = (0..points)
        .map(|i| {
            let t = i as f64 / n;
            match spacing {
                Spacing::Linear => start + (stop - start) * t,
                Spacing::Log => start * (stop / start).powf(t),
            }
        })
        .collect::<Vec<_>>();
    Ok(grid)
}

/// Built-in reference devices.
pub mod fixtures {
    use super::Resonator;

    pub const NAMES: &[&str] = &["quartz45m", "saw400m", "fbar2g4", "rft30g"];

    /// 45 MHz quartz crystal.
    pub fn quartz45m() -> Resonator {
        Resonator { r_m: 12.3, l_m: 4.4e-3, c_m: 2.895e-15, c_0: 4e-12, label: "45 MHz quartz".into() }
    }

    /// 400 MHz SAW. The published Q (16,400) does not match these parameters,
    /// which give about 17,600; the parameters are kept as published.
    pub fn saw400m() -> Resonator {
        Resonator { r_m: 14.0, l_m: 97.5e-6, c_m: 1.594e-15, c_0: 2.1e-12, label: "400 MHz SAW".into() }
    }

    /// 2.4 GHz FBAR.
    pub fn fbar2g4() -> Resonator {
        Resonator { r_m: 1.04, l_m: 107.2e-9, c_m: 38.99e-15, c_0: 1.29e-12, label: "2.4 GHz FBAR".into() }
    }

    /// 30 GHz resonant-fin transistor (RFT) MEMS resonator.
    pub fn rft30g() -> Resonator {
        Resonator { r_m: 332.0, l_m: 17.59e-6, c_m: 1.6e-18, c_0: 16e-15, label: "30 GHz RFT".into() }
    }

    pub fn builtin(name: &str) -> Option<Resonator> {
        match name {
            "quartz45m" => Some(quartz45m()),
            "saw400m" => Some(saw400m()),
            "fbar2g4" => Some(fbar2g4()),
            "rft30g" => Some(rft30g()),
            _ => None,
        }
    }

    /// Nominal label frequency and listed Q for each built-in.
    pub fn published(name: &str) -> Option<(f64, f64)> {
        match name {
            "quartz45m" => Some((45e6, 1e5)),
            "saw400m" => Some((400e6, 16_400.0)),
            "fbar2g4" => Some((2.4e9, 1600.0)),
            "rft30g" => Some((30e9, 10_000.0)),
            _ => None,
        }
    }
}
