//! CSV output. Numbers use Rust's shortest round-trip `{:e}` form; missing
//! values (singular solves, absent resonances) are written as `nan`.

use std::fmt::Write as _;

use crate::noise::SensitivityPoint;
use crate::resonator::{phase_deg, ComplexResponse};

pub const SWEEP_HEADER: &str = "freq_hz,re_ohm,im_ohm,mag_ohm,phase_deg";
pub const SENSITIVITY_HEADER: &str = "delta_c_f,phase_noise_dbchz";

pub fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

pub fn table(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(number).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn sweep_csv(r: &ComplexResponse) -> String {
    table(
        SWEEP_HEADER,
        r.iter().map(|(f, z)| {
            let phase = if z.re.is_nan() || z.im.is_nan() { f64::NAN } else { phase_deg(z) };
            vec![f, z.re, z.im, z.norm(), phase]
        }),
    )
}

pub fn sensitivity_csv(points: &[SensitivityPoint]) -> String {
    table(SENSITIVITY_HEADER, points.iter().map(|p| vec![p.delta_c, p.phase_noise]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn sweep_rows() {
        let r = ComplexResponse::new(vec![1e9, 2e9], vec![Complex64::new(332.0, 0.0), Complex64::new(f64::NAN, f64::NAN)])
            .unwrap();
        let text = sweep_csv(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines[1], "1e9,3.32e2,0e0,3.32e2,0e0");
        assert_eq!(lines[2], "2e9,nan,nan,nan,nan");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [1.6e-18, 30.000412110e9, -158.61712345678, 0.1 + 0.2] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
    }
}
