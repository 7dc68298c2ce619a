//! Shared oracles for the integration tests. Everything here is written
//! from first principles against definitions, independent of the library
//! code paths it is used to check.

#![allow(dead_code)]

use chabauty::numfield::{parse_number_field, NumberField, SubfieldTower};
use chabauty::{Poly, Q, Z};
use num::{One, Signed, Zero};

/// All solutions of x + y = 1 in S-units with every exponent of x bounded
/// by the radius, found by walking the exponent box directly. The y side
/// is tested by stripping the S-support from numerator and denominator.
pub fn exhaustive_sunit_pairs(primes: &[u64], radius: i64) -> Vec<(Q, Q)> {
    let mut exps = vec![-radius; primes.len()];
    let mut out = Vec::new();
    loop {
        for sign in [1i64, -1] {
            let mut x = Q::from(Z::from(sign));
            for (p, e) in primes.iter().zip(&exps) {
                let pw = Z::from(*p).pow(e.unsigned_abs() as u32);
                if *e >= 0 {
                    x *= Q::from(pw);
                } else {
                    x /= Q::from(pw);
                }
            }
            let y = Q::one() - &x;
            if !y.is_zero() && is_s_unit(&y, primes) {
                out.push((x, y));
            }
        }
        // odometer over the exponent box
        let mut i = 0;
        loop {
            if i == exps.len() {
                out.sort();
                out.dedup();
                return out;
            }
            exps[i] += 1;
            if exps[i] <= radius {
                break;
            }
            exps[i] = -radius;
            i += 1;
        }
    }
}

fn is_s_unit(x: &Q, primes: &[u64]) -> bool {
    let mut n = x.numer().abs();
    let mut d = x.denom().abs();
    for p in primes {
        let pz = Z::from(*p);
        while (&n % &pz).is_zero() {
            n /= &pz;
        }
        while (&d % &pz).is_zero() {
            d /= &pz;
        }
    }
    n.is_one() && d.is_one()
}

// Naive polynomial arithmetic over F_p, enough to count the distinct
// irreducible factors of x^q - a by distinct-degree splitting. Vectors
// hold coefficients constant first.

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    ptrim(out)
}

fn ptrim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let lead = *m.last().unwrap();
    let inv = mod_inverse(lead, p);
    while r.len() >= m.len() {
        let c = (*r.last().unwrap() * inv) % p;
        let shift = r.len() - m.len();
        for (i, mc) in m.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p * p - (c * mc) % p) % p;
        }
        r = ptrim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = prem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().copied() {
        let inv = mod_inverse(l, p);
        for c in &mut x {
            *c = (*c * inv) % p;
        }
    }
    x
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a nonzero mod p
    let mut r = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    r
}

fn ppow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// Number of distinct monic irreducible factors of x^q - a over F_p,
/// counted by accumulating deg(gcd(x^(p^d) - x, f)) / d over the degrees.
/// The inseparable cases (a divisible by p, or p = q, where the binomial
/// is a perfect p-th power of a linear) contribute a single factor.
pub fn distinct_factor_count(q: u64, a: i64, p: u64) -> usize {
    let a_mod = a.rem_euclid(p as i64) as u64;
    if a_mod == 0 || p == q {
        return 1;
    }
    // f = x^q - a, squarefree since gcd(f, f') = 1 here
    let mut f = vec![0u64; q as usize + 1];
    f[0] = p - a_mod;
    f[q as usize] = 1;
    let mut count = 0usize;
    let mut frob = vec![0u64, 1]; // x
    let mut d = 0u64;
    while f.len() > 1 {
        d += 1;
        if 2 * d > (f.len() - 1) as u64 {
            // what is left is a single irreducible
            count += 1;
            break;
        }
        frob = ppow_mod(&frob, p, &f, p);
        // x^(p^d) - x mod f
        let mut diff = frob.clone();
        while diff.len() < 2 {
            diff.push(0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        let diff = ptrim(diff);
        let g = pgcd(&f, &diff, p);
        if g.len() > 1 {
            count += (g.len() - 1) / d as usize;
            // divide f by g exactly
            f = pdiv_exact(&f, &g, p);
            frob = prem(&frob, &f, p);
        }
    }
    count
}

fn pdiv_exact(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let mut qout = vec![0u64; a.len() - b.len() + 1];
    let inv = mod_inverse(*b.last().unwrap(), p);
    while r.len() >= b.len() {
        let c = (*r.last().unwrap() * inv) % p;
        let shift = r.len() - b.len();
        qout[shift] = c;
        for (i, mc) in b.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p * p - (c * mc) % p) % p;
        }
        r = ptrim(r);
        if r.is_empty() {
            break;
        }
    }
    assert!(r.is_empty(), "division was not exact");
    ptrim(qout)
}

/// The tower Q inside Q(sqrt 2) inside Q(fourth root of 2).
pub fn quartic_tower() -> SubfieldTower {
    SubfieldTower::new(
        vec![
            NumberField::rationals(),
            parse_number_field(&[-2, 0, 1]).unwrap().with_label("Q(sqrt2)"),
            parse_number_field(&[-2, 0, 0, 0, 1])
                .unwrap()
                .with_label("Q(4rt2)"),
        ],
        vec![Poly::zero(), Poly::from_int(&[0, 0, 1])],
    )
    .unwrap()
}
