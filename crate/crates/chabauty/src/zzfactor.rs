//! Factorization of univariate polynomials over the rationals.
//!
//! The workhorse is Zassenhaus' method on monic squarefree integer
//! polynomials: factor modulo a good small prime, Hensel-lift the factors
//! until the modulus clears the Mignotte coefficient bound, then recombine
//! subsets and confirm each candidate by exact trial division. Non-monic
//! input is monicized by the usual substitution x -> x / lc first, and
//! multiplicities are peeled off with Yun's algorithm before any of that
//! runs, so callers can hand in anything nonzero.

use num::{BigInt, Integer, One, Zero};

use crate::error::{Error, Result};
use crate::modp::{Fp, FpPoly};
use crate::poly::{Poly, Z};

const PRIME_POOL: [u64; 30] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 2,
];

fn ztrim(mut v: Vec<Z>) -> Vec<Z> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn zmul(a: &[Z], b: &[Z]) -> Vec<Z> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    ztrim(v)
}

/// Exact division by a monic divisor; None when the remainder is nonzero.
fn zdiv_exact_monic(f: &[Z], g: &[Z]) -> Option<Vec<Z>> {
    debug_assert!(g.last().map_or(false, |c| c.is_one()));
    if f.is_empty() {
        return Some(Vec::new());
    }
    if f.len() < g.len() {
        return None;
    }
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    let mut quo = vec![BigInt::zero(); f.len() - dg];
    for i in (dg..f.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quo[i - dg] = c.clone();
        for (j, gc) in g.iter().enumerate() {
            let idx = i - dg + j;
            let sub = &c * gc;
            rem[idx] = &rem[idx] - sub;
        }
    }
    if ztrim(rem).is_empty() {
        Some(ztrim(quo))
    } else {
        None
    }
}

fn reduce_mod(f: &[Z], m: &Z) -> Vec<Z> {
    ztrim(f.iter().map(|c| c.mod_floor(m)).collect())
}

fn to_fp(f: &[Z], fp: &Fp) -> FpPoly {
    let p = BigInt::from(fp.p);
    let mut v: FpPoly = f
        .iter()
        .map(|c| {
            let r = c.mod_floor(&p);
            r.try_into().unwrap_or(0u64) as u64
        })
        .collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn from_fp(f: &FpPoly) -> Vec<Z> {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

fn balance(f: &[Z], m: &Z) -> Vec<Z> {
    let half = m / 2;
    ztrim(
        f.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Mignotte-style bound: coefficients of any monic integer factor of f are
/// at most 2^deg(f) * ||f||_2 in absolute value.
fn factor_bound(f: &[Z]) -> Z {
    let sum_sq: Z = f.iter().map(|c| c * c).sum();
    let root = num::integer::Roots::sqrt(&sum_sq) + 1;
    let two_n = BigInt::one() << (f.len() - 1);
    two_n * root
}

/// Extended Euclid mod p: returns (s, t) with s*a + t*b = 1, assuming
/// gcd(a, b) = 1 in F_p[x].
fn bezout_fp(fp: &Fp, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0: FpPoly = vec![1];
    let mut s1: FpPoly = Vec::new();
    let mut t0: FpPoly = Vec::new();
    let mut t1: FpPoly = vec![1];
    while !r1.is_empty() {
        let (q, r) = fp.poly_divrem(&r0, &r1);
        let s = fp.poly_sub(&s0, &fp.poly_mul(&q, &s1));
        let t = fp.poly_sub(&t0, &fp.poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    debug_assert_eq!(Fp::deg(&r0), Some(0));
    let c = fp.inv(r0[0]);
    (fp.poly_scale(&s0, c), fp.poly_scale(&t0, c))
}

/// Lift f = g*h (mod p) to f = G*H (mod p^k), all monic, by repeated linear
/// Hensel steps with the fixed Bezout pair computed mod p.
fn hensel_pair(f: &[Z], g1: &FpPoly, h1: &FpPoly, fp: &Fp, k: u32) -> (Vec<Z>, Vec<Z>) {
    let p = BigInt::from(fp.p);
    let (s, t) = bezout_fp(fp, g1, h1);
    let mut g = from_fp(g1);
    let mut h = from_fp(h1);
    let mut modulus = p.clone();
    for _ in 1..k {
        let next = &modulus * &p;
        // error term e = (f - g*h) / modulus, reduced mod p
        let prod = zmul(&g, &h);
        let diff: Vec<Z> = (0..f.len().max(prod.len()))
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_else(BigInt::zero);
                let b = prod.get(i).cloned().unwrap_or_else(BigInt::zero);
                (a - b) / &modulus
            })
            .collect();
        let e = to_fp(&ztrim(diff), fp);
        if e.is_empty() {
            modulus = next;
            continue;
        }
        // solve u*h1 + v*g1 = e (mod p) with deg u < deg g1
        let te = fp.poly_mul(&t, &e);
        let (q, u) = fp.poly_divrem(&te, g1);
        let v = fp.poly_add(&fp.poly_mul(&s, &e), &fp.poly_mul(&q, h1));
        let v = fp.poly_rem(&v, h1);
        let gu = from_fp(&u);
        let hv = from_fp(&v);
        for (i, c) in gu.iter().enumerate() {
            if i >= g.len() {
                g.resize(i + 1, BigInt::zero());
            }
            g[i] = (&g[i] + c * &modulus).mod_floor(&next);
        }
        for (i, c) in hv.iter().enumerate() {
            if i >= h.len() {
                h.resize(i + 1, BigInt::zero());
            }
            h[i] = (&h[i] + c * &modulus).mod_floor(&next);
        }
        g = reduce_mod(&g, &next);
        h = reduce_mod(&h, &next);
        modulus = next;
    }
    (g, h)
}

/// Lift the full mod-p factor list of monic f to mod p^k, recursively
/// splitting the list in halves.
fn hensel_tree(f: &[Z], factors: &[FpPoly], fp: &Fp, k: u32) -> Vec<Vec<Z>> {
    if factors.len() == 1 {
        let modulus = num::pow::pow(BigInt::from(fp.p), k as usize);
        return vec![reduce_mod(f, &modulus)];
    }
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let mut g1: FpPoly = vec![1];
    for q in left {
        g1 = fp.poly_mul(&g1, q);
    }
    let mut h1: FpPoly = vec![1];
    for q in right {
        h1 = fp.poly_mul(&h1, q);
    }
    let (g, h) = hensel_pair(f, &g1, &h1, fp, k);
    let mut out = hensel_tree(&g, left, fp, k);
    out.extend(hensel_tree(&h, right, fp, k));
    out
}

/// Factor a monic squarefree integer polynomial into monic irreducible
/// integer polynomials. Deterministic output order: sorted.
pub fn factor_squarefree_monic_z(f: &[Z]) -> Vec<Vec<Z>> {
    let f = ztrim(f.to_vec());
    assert!(f.last().map_or(false, |c| c.is_one()), "input must be monic");
    let n = f.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![f];
    }

    // choose the prime giving the fewest modular factors
    let mut best: Option<(Fp, Vec<FpPoly>)> = None;
    let mut tried = 0;
    for &p in PRIME_POOL.iter() {
        let fp = Fp::new(p);
        let fm = to_fp(&f, &fp);
        if Fp::deg(&fm) != Some(n) {
            continue;
        }
        let der = fp.poly_derivative(&fm);
        if der.is_empty() || Fp::deg(&fp.poly_gcd(&fm, &der)) != Some(0) {
            continue;
        }
        let fac: Vec<FpPoly> = fp
            .factor(&fm)
            .expect("nonzero by construction")
            .into_iter()
            .map(|(g, _)| g)
            .collect();
        if fac.len() == 1 {
            return vec![f];
        }
        let better = best.as_ref().map_or(true, |(_, b)| fac.len() < b.len());
        if better {
            best = Some((fp, fac));
        }
        tried += 1;
        if tried >= 5 {
            break;
        }
    }
    let (fp, modular) = best.expect("squarefree integer polynomial has good primes");

    let bound = factor_bound(&f);
    let target = &bound * 2 + 1;
    let mut k = 1u32;
    let mut pk = BigInt::from(fp.p);
    while pk < target {
        pk *= BigInt::from(fp.p);
        k += 1;
    }
    let lifted = hensel_tree(&f, &modular, &fp, k);
    let modulus = pk;

    // subset recombination with exact division as the certificate
    let mut rem_f = f;
    let mut pool: Vec<Vec<Z>> = lifted;
    let mut out: Vec<Vec<Z>> = Vec::new();
    'outer: loop {
        let r = pool.len();
        if r == 0 {
            break;
        }
        if r == 1 {
            out.push(rem_f.clone());
            break;
        }
        for size in 1..=(r / 2) {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                let mut cand: Vec<Z> = vec![BigInt::one()];
                for &i in &idx {
                    cand = reduce_mod(&zmul(&cand, &pool[i]), &modulus);
                }
                let cand = balance(&cand, &modulus);
                if cand.last().map_or(false, |c| c.is_one()) {
                    if let Some(quo) = zdiv_exact_monic(&rem_f, &cand) {
                        out.push(cand);
                        rem_f = quo;
                        for &i in idx.iter().rev() {
                            pool.remove(i);
                        }
                        continue 'outer;
                    }
                }
                // next combination of given size
                let mut pos = size;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    if idx[pos] < r - (size - pos) {
                        idx[pos] += 1;
                        for j in pos + 1..size {
                            idx[j] = idx[j - 1] + 1;
                        }
                        break;
                    }
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
        }
        // nothing of size <= r/2 divides: the rest is irreducible
        out.push(rem_f.clone());
        break;
    }
    out.sort();
    out
}

fn yun_squarefree(f: &Poly) -> Vec<(Poly, usize)> {
    let f = f.monic();
    let d = f.derivative();
    let mut g = f.gcd(&d);
    let mut w = f.divrem(&g).0;
    let mut out = Vec::new();
    let mut i = 1usize;
    while w.degree().map_or(false, |n| n >= 1) {
        let y = w.gcd(&g);
        let z = w.divrem(&y).0;
        if z.degree().map_or(false, |n| n >= 1) {
            out.push((z.monic(), i));
        }
        g = g.divrem(&y).0;
        w = y;
        i += 1;
    }
    out
}

/// Factor a nonzero rational polynomial into monic irreducible rational
/// factors with multiplicities, sorted. The constant in front is dropped.
pub fn factor_q(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (sq, mult) in yun_squarefree(f) {
        // monicize over Z: for primitive c_n x^n + ..., factor c_n^(n-1) f(x/c_n)
        let zco = sq.int_coeffs_cleared();
        let n = zco.len() - 1;
        let lc = zco[n].clone();
        let monic_z: Vec<Z> = (0..=n)
            .map(|i| {
                if i == n {
                    BigInt::one()
                } else {
                    &zco[i] * num::pow::pow(lc.clone(), n - 1 - i)
                }
            })
            .collect();
        for g in factor_squarefree_monic_z(&monic_z) {
            // map back: x -> lc * x, then make monic over Q
            let dg = g.len() - 1;
            let qco: Vec<num::BigRational> = g
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    num::BigRational::from(c.clone())
                        * num::BigRational::from(num::pow::pow(lc.clone(), i))
                })
                .collect();
            let back = Poly::from_coeffs(qco).monic();
            debug_assert_eq!(back.degree(), Some(dg));
            out.push((back, mult));
        }
    }
    out.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeff_strings().cmp(&b.0.coeff_strings()))
    });
    Ok(out)
}

/// True when the nonzero polynomial is irreducible over the rationals.
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    match f.degree() {
        None => Err(Error::ZeroPolynomial),
        Some(0) => Ok(false),
        Some(1) => Ok(true),
        Some(_) => {
            let fac = factor_q(f)?;
            Ok(fac.len() == 1 && fac[0].1 == 1)
        }
    }
}
