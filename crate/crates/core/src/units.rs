//! Engineering-notation numbers.
//!
//! Grammar (case-insensitive suffix, no trailing characters):
//!
//! ```text
//! value  := [+-] mantissa [exponent] [suffix]
//! mantissa := digits [ "." digits ] | "." digits
//! exponent := ("e" | "E") [+-] digits
//! suffix := f | p | n | u | m | k | meg | g | t
//! ```
//!
//! `meg` is matched before `m`, so `1meg` is 1e6 and `1m` is 1e-3.

use std::fmt;

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Suffix and its power of ten.
const SUFFIXES: &[(&str, i32)] = &[
    ("meg", 6),
    ("f", -15),
    ("p", -12),
    ("n", -9),
    ("u", -6),
    ("m", -3),
    ("k", 3),
    ("g", 9),
    ("t", 12),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueError {
    /// No digits where the mantissa should start.
    Empty,
    /// Offset (0-based, in chars) of the first character that is not part of the grammar.
    BadSuffix { offset: usize, suffix: String },
    BadNumber(String),
}

impl fmt::Display for ValueError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueError::Empty => write!(f, "empty value"),
            ValueError::BadSuffix { suffix, .. } => write!(f, "unknown engineering suffix `{suffix}`"),
            ValueError::BadNumber(s) => write!(f, "malformed number `{s}`"),
        }
    }
}

impl std::error::Error for ValueError {}

/// Parse a number with an optional engineering suffix into SI units.
pub fn parse_value(text: &str) -> Result<f64, ValueError> {
    let s = text.trim();
    let bytes = s.as_bytes();
    let mut i = 0;
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return if s.is_empty() {
            Err(ValueError::Empty)
        } else {
            Err(ValueError::BadNumber(s.to_string()))
        };
    }
    let mantissa_end = i;
    let mut exponent = 0i32;
    // exponent only if followed by digits, otherwise `e` is left for the suffix check
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        let exp_digits = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_digits {
            exponent = s[i + 1..j].parse().map_err(|_| ValueError::BadNumber(s.to_string()))?;
            i = j;
        }
    }
    let rest = &s[i..];
    let shift = if rest.is_empty() {
        0
    } else {
        let lower = rest.to_ascii_lowercase();
        match SUFFIXES.iter().find(|(suffix, _)| lower == *suffix) {
            Some((_, p)) => *p,
            None => return Err(ValueError::BadSuffix { offset: s[..i].chars().count(), suffix: rest.to_string() }),
        }
    };
    // one correctly rounded decimal-to-binary conversion, suffix included
    let exp = exponent.saturating_add(shift);
    format!("{}e{exp}", &s[..mantissa_end]).parse().map_err(|_| ValueError::BadNumber(s.to_string()))
}

/// Format `value` with an SI prefix, e.g. `eng(16e-15, "F") == "16 fF"`.
pub fn eng(value: f64, unit: &str) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value} {unit}");
    }
    const PREFIXES: &[(f64, &str)] = &[
        (1e12, "T"),
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "u"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
        (1e-18, "a"),
    ];
    let mag = value.abs();
    let (scale, prefix) = PREFIXES
        .iter()
        .copied()
        .find(|(s, _)| mag >= *s * 0.999_999_5)
        .unwrap_or((1e-18, "a"));
    let scaled = value / scale;
    let text = format!("{scaled:.4}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    format!("{text} {prefix}{unit}")
}
