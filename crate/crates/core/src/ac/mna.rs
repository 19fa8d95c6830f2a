//! Nodal analysis for R/L/C netlists at a single frequency.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::netlist::{ElementKind, Netlist, Probe, GROUND};
use crate::error::{require_freq, Error, Result};
use crate::resonator::{frequency_grid, ComplexResponse};

/// Node numbering for a netlist; ground is eliminated.
#[derive(Debug, Clone)]
pub struct MnaSystem<'a> {
    netlist: &'a Netlist,
    index: HashMap<&'a str, usize>,
}

impl<'a> MnaSystem<'a> {
    pub fn new(netlist: &'a Netlist) -> Self {
        let mut index = HashMap::new();
        for e in &netlist.elements {
            for n in [e.a.as_str(), e.b.as_str()] {
                if n != GROUND {
                    let next = index.len();
                    index.entry(n).or_insert(next);
                }
            }
        }
        MnaSystem { netlist, index }
    }

    pub fn size(&self) -> usize {
        self.index.len()
    }

    pub fn node_index(&self, node: &str) -> Option<usize> {
        self.index.get(node).copied()
    }

    /// Nodal admittance matrix at `f`, row-major.
    pub fn matrix(&self, f: f64) -> Vec<Vec<Complex64>> {
        self.stamped(f).0
    }

    /// Matrix plus, per row, the sum of stamped admittance magnitudes.
    /// The latter is the row norm before any cancellation between stamps.
    fn stamped(&self, f: f64) -> (Vec<Vec<Complex64>>, Vec<f64>) {
        let n = self.size();
        let mut gross = vec![0.0; n];
        let w = 2.0 * PI * f;
        let mut y = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for e in &self.netlist.elements {
            let g = match e.kind {
                ElementKind::R => Complex64::new(1.0 / e.value, 0.0),
                ElementKind::L => Complex64::new(0.0, -1.0 / (w * e.value)),
                ElementKind::C => Complex64::new(0.0, w * e.value),
            };
            let a = self.node_index(&e.a);
            let b = self.node_index(&e.b);
            if let Some(i) = a {
                y[i][i] += g;
                gross[i] += g.norm();
            }
            if let Some(j) = b {
                y[j][j] += g;
                gross[j] += g.norm();
            }
            if let (Some(i), Some(j)) = (a, b) {
                y[i][j] -= g;
                y[j][i] -= g;
                gross[i] += g.norm();
                gross[j] += g.norm();
            }
        }
        (y, gross)
    }

    /// Unit current into `probe.a`, out of `probe.b`; returns V(a) − V(b).
    pub fn driving_point(&self, probe: &Probe, f: f64) -> Result<Complex64> {
        require_freq(f)?;
        let a = self.probe_index(&probe.a)?;
        let b = self.probe_index(&probe.b)?;
        let (y, gross) = self.stamped(f);
        debug_assert!(is_symmetric(&y));
        let scale = gross.iter().copied().fold(0.0, f64::max);
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.size()];
        if let Some(i) = a {
            rhs[i] += 1.0;
        }
        if let Some(j) = b {
            rhs[j] -= 1.0;
        }
        let v = solve(y, rhs, scale).map_err(|pivot| Error::Singular { freq: f, pivot })?;
        let va = a.map_or(Complex64::new(0.0, 0.0), |i| v[i]);
        let vb = b.map_or(Complex64::new(0.0, 0.0), |j| v[j]);
        Ok(va - vb)
    }

    fn probe_index(&self, node: &str) -> Result<Option<usize>> {
        if node == GROUND {
            return Ok(None);
        }
        self.node_index(node)
            .map(Some)
            .ok_or_else(|| Error::param("probe", format!("node `{node}` is not in the netlist")))
    }
}

pub fn is_symmetric(y: &[Vec<Complex64>]) -> bool {
    let n = y.len();
    (0..n).all(|i| (0..i).all(|j| y[i][j] == y[j][i]))
}

/// Gaussian elimination with partial pivoting. A pivot below
/// 1e-12 × `scale` is reported as `Err(pivot)`.
pub fn solve(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
    scale: f64,
) -> std::result::Result<Vec<Complex64>, f64> {
    let n = b.len();
    let tol = 1e-12 * scale;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap_or(k);
        let pivot = a[p][k].norm();
        if !(pivot >= tol) || pivot == 0.0 {
            return Err(pivot);
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            if m == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= m * t;
            }
            let t = b[k];
            b[i] -= m * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Ok(x)
}

pub fn driving_point_impedance(netlist: &Netlist, f: f64) -> Result<Complex64> {
    let probe = netlist.probe.as_ref().ok_or_else(|| Error::param("probe", "netlist has no `.probe` directive"))?;
    MnaSystem::new(netlist).driving_point(probe, f)
}

/// Sweep over the netlist's `.ac` grid. Singular points become NaN entries.
pub fn ac_sweep(netlist: &Netlist) -> Result<ComplexResponse> {
    let sweep = netlist.sweep.ok_or_else(|| Error::param("sweep", "netlist has no `.ac` directive"))?;
    let freqs = frequency_grid(sweep.start, sweep.stop, sweep.points, sweep.spacing)?;
    sweep_at(netlist, &freqs)
}

pub fn sweep_at(netlist: &Netlist, freqs: &[f64]) -> Result<ComplexResponse> {
    let probe = netlist.probe.as_ref().ok_or_else(|| Error::param("probe", "netlist has no `.probe` directive"))?;
    let system = MnaSystem::new(netlist);
    let values = freqs
        .par_iter()
        .map(|&f| match system.driving_point(probe, f) {
            Ok(z) => Ok(z),
            Err(Error::Singular { .. }) => Ok(Complex64::new(f64::NAN, f64::NAN)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexResponse::new(freqs.to_vec(), values)
}
