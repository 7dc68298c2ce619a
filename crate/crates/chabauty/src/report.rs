//! Small shared helpers for serializing exact values in reports.
//!
//! Rationals travel as strings like "3/4" or "-7" so no consumer is ever
//! tempted to round them. JSON objects are emitted with sorted keys
//! (serde_json's default map is ordered), which keeps reports byte-stable
//! across runs.

use num::{BigInt, BigRational, One, Signed};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::Q;

/// Render a rational exactly: integer values without a denominator,
/// everything else as "num/den" in lowest terms.
pub fn q_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Inverse of `q_string`; also accepts plain integers.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Config(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        None => {
            let n = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(BigRational::from(n))
        }
        Some((a, b)) => {
            let n = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Render a polynomial coefficient list as a readable expression in `var`,
/// highest degree first, e.g. "x^3 - 2*x + 1".
pub fn poly_string(coeffs: &[Q], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c == &Q::from(BigInt::from(0)) {
            continue;
        }
        let mag = c.abs();
        let mag_s = q_string(&mag);
        let term = match i {
            0 => mag_s,
            1 => {
                if mag.is_one() {
                    var.to_string()
                } else {
                    format!("{mag_s}*{var}")
                }
            }
            _ => {
                if mag.is_one() {
                    format!("{var}^{i}")
                } else {
                    format!("{mag_s}*{var}^{i}")
                }
            }
        };
        if parts.is_empty() {
            if c < &Q::from(BigInt::from(0)) {
                parts.push(format!("-{term}"));
            } else {
                parts.push(term);
            }
        } else if c < &Q::from(BigInt::from(0)) {
            parts.push(format!("- {term}"));
        } else {
            parts.push(format!("+ {term}"));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qz;

    #[test]
    fn roundtrip() {
        for s in ["0", "5", "-3", "3/4", "-7/2"] {
            assert_eq!(q_string(&parse_q(s).unwrap()), s);
        }
        assert_eq!(q_string(&parse_q(" 6/4 ").unwrap()), "3/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn poly_display() {
        let co = vec![qz(-2), qz(0), qz(0), qz(1)];
        assert_eq!(poly_string(&co, "x"), "x^3 - 2");
        let co = vec![qz(1), qz(1)];
        assert_eq!(poly_string(&co, "t"), "t + 1");
        assert_eq!(poly_string(&[], "x"), "0");
    }
}
