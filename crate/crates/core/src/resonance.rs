//! Zero-phase resonance search and Q extraction on an arbitrary one-port.
//!
//! A resonance is a frequency where Im{Z} changes sign. Series-type
//! resonances have Im{Z} going from negative to positive (|Z| dips, as in
//! a series RLC); parallel-type ones go from positive to negative (|Z|
//! peaks, as in a parallel tank).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceKind {
    Series,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub frequency: f64,
    /// Re{Z} at the zero-phase point.
    pub resistance: f64,
    /// Phase-slope Q, (f/2)·|dφ/df|.
    pub q: f64,
    pub kind: ResonanceKind,
}

/// All resonances of `kind` inside [lo, hi], located on an `n`-point grid
/// and refined by bisection on Im{Z}.
pub fn find_resonances<F>(z: F, lo: f64, hi: f64, n: usize, kind: ResonanceKind) -> Vec<Resonance>
where
    F: Fn(f64) -> Complex64,
{
    let n = n.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let positive = |f: f64| z(f).im >= 0.0;
    let mut out = Vec::new();
    let mut prev_f = lo;
    let mut prev = positive(lo);
    for i in 1..n {
        let f = if i == n - 1 { hi } else { lo + step * i as f64 };
        let cur = positive(f);
        let hit = match kind {
            ResonanceKind::Series => !prev && cur,
            ResonanceKind::Parallel => prev && !cur,
        };
        if hit {
            let fr = bisect(&positive, prev_f, f, prev);
            out.push(Resonance { frequency: fr, resistance: z(fr).re, q: phase_slope_q(&z, fr), kind });
        }
        prev = cur;
        prev_f = f;
    }
    out
}

fn bisect(positive: &impl Fn(f64) -> bool, mut a: f64, mut b: f64, sign_a: bool) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if positive(m) == sign_a {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// (f/2)·|dφ/df| by central differences, halving the step until two
/// successive estimates agree to 0.01 %.
pub fn phase_slope_q<F>(z: &F, f: f64) -> f64
where
    F: Fn(f64) -> Complex64,
{
    let estimate = |h: f64| {
        let dphi = (z(f + h) / z(f - h)).arg();
        0.5 * f * (dphi / (2.0 * h)).abs()
    };
    let mut h = f * 1e-3;
    let mut last = estimate(h);
    while h > f * 1e-12 {
        h *= 0.5;
        let next = estimate(h);
        if (next - last).abs() <= 1e-4 * next.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        last = next;
    }
    last
}

/// Q from the −3 dB bandwidth of the resonance peak: |Z| for parallel-type
/// resonances, |Y| = 1/|Z| for series-type ones. The half-power points are
/// searched outward from the resonance up to `span` (relative) on each side.
pub fn bandwidth_q<F>(z: &F, res: &Resonance, span: f64) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    let level = |f: f64| match res.kind {
        ResonanceKind::Parallel => z(f).norm_sqr(),
        ResonanceKind::Series => 1.0 / z(f).norm_sqr(),
    };
    let f0 = res.frequency;
    let target = 0.5 * level(f0);
    let edge = |dir: f64| -> Result<f64> {
        let limit = f0 * span;
        let mut inner = 0.0;
        let mut d = f0 * 1e-9;
        while d <= limit {
            if level(f0 + dir * d) <= target {
                let (mut a, mut b) = (inner, d);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    if level(f0 + dir * m) <= target {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                return Ok(f0 + dir * 0.5 * (a + b));
            }
            inner = d;
            d *= 1.05;
        }
        Err(Error::NoResonance { lo: f0 - limit, hi: f0 + limit })
    };
    let lo = edge(-1.0)?;
    let hi = edge(1.0)?;
    Ok(f0 / (hi - lo))
}
