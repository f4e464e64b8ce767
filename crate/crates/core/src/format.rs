//! Text helpers shared by the CSV writers, key files and the CLI.

use std::fmt;

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// trimmed. Every finite `f64` survives a print/parse round trip.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let prec = (16 - exp) as usize;
        trim_fraction(&format!("{:.*}", prec, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeError(String);

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed order range: {}", self.0)
    }
}

impl std::error::Error for RangeError {}

/// A plain decimal literal held as `digits / 10^scale`.
#[derive(Debug, Clone, Copy)]
struct Decimal {
    digits: i128,
    scale: u32,
}

impl Decimal {
    fn parse(s: &str) -> Option<Decimal> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return None;
        }
        let mut digits: i128 = 0;
        for b in int.bytes().chain(frac.bytes()) {
            digits = digits.checked_mul(10)?.checked_add((b - b'0') as i128)?;
        }
        Some(Decimal {
            digits: if neg { -digits } else { digits },
            scale: frac.len() as u32,
        })
    }

    fn rescale(self, scale: u32) -> i128 {
        self.digits * 10i128.pow(scale - self.scale)
    }
}

/// Parses an inclusive `start:step:end` range of decimal literals.
///
/// Each value is computed as `(start + k*step)` in exact decimal arithmetic
/// and converted to `f64` once, so `0:0.1:1` yields exactly the literals
/// `0, 0.1, ..., 1` with no accumulated drift. A bare number is a
/// one-element range.
pub fn parse_order_range(spec: &str) -> Result<Vec<f64>, RangeError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = |why: &str| RangeError(format!("{spec:?}: {why}"));
    let parse = |s: &str| Decimal::parse(s).ok_or_else(|| bad("not a decimal number"));
    match parts.as_slice() {
        [single] => {
            let d = parse(single)?;
            Ok(vec![to_f64(d.digits, d.scale)])
        }
        [start, step, end] => {
            let (start, step, end) = (parse(start)?, parse(step)?, parse(end)?);
            let scale = start.scale.max(step.scale).max(end.scale);
            let (s, st, e) = (start.rescale(scale), step.rescale(scale), end.rescale(scale));
            if st <= 0 {
                return Err(bad("step must be positive"));
            }
            if e < s {
                return Err(bad("end precedes start"));
            }
            let count = (e - s) / st + 1;
            if count > 1_000_000 {
                return Err(bad("too many values"));
            }
            Ok((0..count).map(|k| to_f64(s + k * st, scale)).collect())
        }
        _ => Err(bad("expected start:step:end")),
    }
}

// Both operands are exact in f64 for the magnitudes accepted above, and IEEE
// division is correctly rounded, so this is the nearest double to the decimal.
fn to_f64(digits: i128, scale: u32) -> f64 {
    digits as f64 / 10f64.powi(scale as i32)
}
