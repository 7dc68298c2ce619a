//! Real root counting via Sturm chains with exact integer arithmetic.
//!
//! The chain is built with primitive pseudo-remainders, so every entry has
//! integer coefficients and content 1; no rounding is involved anywhere.
//! Signs at the two infinities come from leading coefficients, which is all
//! the signature computation needs.

use num::{BigInt, Signed, Zero};

use crate::poly::{Poly, Z};

fn z_poly(f: &Poly) -> Vec<Z> {
    f.int_coeffs_cleared()
}

fn deg(v: &[Z]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

fn trim(mut v: Vec<Z>) -> Vec<Z> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn derivative_z(f: &[Z]) -> Vec<Z> {
    if f.len() <= 1 {
        return Vec::new();
    }
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn content(f: &[Z]) -> Z {
    let mut g = BigInt::zero();
    for c in f {
        g = num::integer::gcd(g, c.abs());
    }
    g
}

fn primitive_part(f: Vec<Z>) -> Vec<Z> {
    let c = content(&f);
    if c.is_zero() || c == BigInt::from(1) {
        return f;
    }
    f.into_iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of a by b scaled so coefficients stay integral, with the
/// sign fixed so it equals the sign of the true rational remainder.
fn pseudo_rem_signed(a: &[Z], b: &[Z]) -> Vec<Z> {
    let da = deg(a).unwrap();
    let db = deg(b).unwrap();
    debug_assert!(da >= db);
    let lead = b[db].clone();
    let steps = (da - db + 1) as u32;
    // multiply a by lead^steps, then do exact division steps
    let scale = num::pow::pow(lead.clone(), steps as usize);
    let mut r: Vec<Z> = a.iter().map(|c| c * &scale).collect();
    while let Some(dr) = deg(&trim(r.clone())) {
        if dr < db {
            break;
        }
        r = trim(r);
        let dr = deg(&r).unwrap();
        let q = &r[dr] / &lead;
        debug_assert!((&r[dr] % &lead).is_zero());
        for (j, bc) in b.iter().enumerate() {
            let idx = dr - db + j;
            let sub = &q * bc;
            r[idx] = &r[idx] - sub;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    let r = trim(r);
    // scaling by lead^steps preserves sign iff lead > 0 or steps even
    if lead.is_negative() && steps % 2 == 1 {
        r.into_iter().map(|c| -c).collect()
    } else {
        r
    }
}

/// Sturm chain of a squarefree integer polynomial.
fn chain(f: Vec<Z>) -> Vec<Vec<Z>> {
    let f = primitive_part(trim(f));
    let mut out = Vec::new();
    if f.is_empty() {
        return out;
    }
    let fp = primitive_part(derivative_z(&f));
    out.push(f);
    if fp.is_empty() {
        return out;
    }
    out.push(fp);
    loop {
        let n = out.len();
        let a = &out[n - 2];
        let b = &out[n - 1];
        if deg(b) == Some(0) || deg(b).is_none() {
            break;
        }
        let r = pseudo_rem_signed(a, b);
        if r.is_empty() {
            break;
        }
        let neg: Vec<Z> = primitive_part(r).into_iter().map(|c| -c).collect();
        out.push(neg);
    }
    out
}

fn sign_at_inf(f: &[Z], positive: bool) -> i32 {
    let d = deg(f).unwrap();
    let lc = &f[d];
    let base = if lc.is_positive() { 1 } else { -1 };
    if positive || d % 2 == 0 {
        base
    } else {
        -base
    }
}

fn variations(signs: &[i32]) -> usize {
    let nz: Vec<i32> = signs.iter().copied().filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of f (which must be squarefree).
pub fn count_real_roots(f: &Poly) -> usize {
    assert!(f.is_squarefree(), "Sturm count requires a squarefree input");
    let ch = chain(z_poly(f));
    if ch.is_empty() || deg(&ch[0]) == Some(0) {
        return 0;
    }
    let at_neg: Vec<i32> = ch.iter().map(|g| sign_at_inf(g, false)).collect();
    let at_pos: Vec<i32> = ch.iter().map(|g| sign_at_inf(g, true)).collect();
    variations(&at_neg) - variations(&at_pos)
}

/// Signature (r1, r2) of the etale algebra Q[x]/(f): r1 real roots and r2
/// conjugate pairs, r1 + 2 r2 = deg f. Requires squarefree f.
pub fn signature(f: &Poly) -> (usize, usize) {
    let d = f.degree().expect("signature of the zero polynomial");
    let r1 = count_real_roots(f);
    debug_assert!((d - r1) % 2 == 0);
    (r1, (d - r1) / 2)
}

/// True when every complex root of f is real.
pub fn is_totally_real(f: &Poly) -> bool {
    match f.degree() {
        None | Some(0) => true,
        Some(d) => f.is_squarefree() && count_real_roots(f) == d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qz;

    #[test]
    fn quadratics() {
        assert_eq!(signature(&Poly::from_int(&[-2, 0, 1])), (2, 0)); // x^2-2
        assert_eq!(signature(&Poly::from_int(&[1, 0, 1])), (0, 1)); // x^2+1
        assert_eq!(signature(&Poly::from_int(&[-1, 1])), (1, 0)); // x-1
    }

    #[test]
    fn cyclotomic_and_mixed() {
        // x^4+x^3+x^2+x+1 has no real roots
        assert_eq!(signature(&Poly::from_int(&[1, 1, 1, 1, 1])), (0, 2));
        // x^3-2 has one real root
        assert_eq!(signature(&Poly::from_int(&[-2, 0, 0, 1])), (1, 1));
        // x^4-2 has two
        assert_eq!(signature(&Poly::from_int(&[-2, 0, 0, 0, 1])), (2, 1));
    }

    #[test]
    fn totally_real_detection() {
        // x^2-x-1 (golden ratio field)
        assert!(is_totally_real(&Poly::from_int(&[-1, -1, 1])));
        // x^3 - 3x - 1 is the totally real cubic of discriminant 81
        assert!(is_totally_real(&Poly::from_int(&[-1, -3, 0, 1])));
        assert!(!is_totally_real(&Poly::from_int(&[1, 0, 1])));
    }

    #[test]
    fn large_coefficients_stay_exact() {
        // (x^2 - 10^12)(x^2 + 10^12) is squarefree with two real roots
        let a = Poly::from_int(&[-1_000_000_000_000, 0, 1]);
        let b = Poly::from_int(&[1_000_000_000_000, 0, 1]);
        let f = a.mul(&b);
        assert_eq!(signature(&f), (2, 1));
        let _ = qz(0);
    }
}
