//! Textual form `c=<re>+<im>i; zeros=<re>+<im>i, ...` (whitespace-insensitive,
//! `c` optional with default 1). The empty string is the constant 1.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::BlaschkeProduct;
use crate::error::{LabError, Result};

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i` (whitespace ignored).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || LabError::Parse(format!("invalid complex number `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(real(&s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(t),
    };
    match split {
        Some(k) => Ok(Complex64::new(real(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

impl FromStr for BlaschkeProduct {
    type Err = LabError;

    fn from_str(text: &str) -> Result<Self> {
        let mut constant = Complex64::new(1.0, 0.0);
        let mut zeros = Vec::new();
        let mut seen_c = false;
        let mut seen_zeros = false;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) =
                part.split_once('=').ok_or_else(|| LabError::Parse(format!("expected `key=value`, got `{part}`")))?;
            match key.trim() {
                "c" if !seen_c => {
                    seen_c = true;
                    constant = parse_complex(value)?;
                }
                "zeros" if !seen_zeros => {
                    seen_zeros = true;
                    for item in value.split(',') {
                        if item.trim().is_empty() {
                            if value.trim().is_empty() {
                                continue;
                            }
                            return Err(LabError::Parse(format!("empty zero in `{value}`")));
                        }
                        zeros.push(parse_complex(item)?);
                    }
                }
                other => return Err(LabError::Parse(format!("unexpected or repeated key `{other}`"))),
            }
        }
        BlaschkeProduct::new(constant, zeros)
    }
}

impl fmt::Display for BlaschkeProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zeros: Vec<String> = self.zeros.iter().map(|&a| format_complex(a)).collect();
        write!(f, "c={}; zeros={}", format_complex(self.constant), zeros.join(", "))
    }
}
