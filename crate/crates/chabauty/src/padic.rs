//! Fixed-precision p-adic integers, logarithms, and closure rank.
//!
//! Residues live in [0, p^N) with p^N capped so that products fit in
//! native arithmetic. Precision is absolute: a value of precision N is an
//! exact residue mod p^N, and the only operations that shrink N are the
//! ones that genuinely lose digits (dividing by p, and the logarithm's
//! division by the term index). The closure rank of a log matrix is a
//! numeric estimate with an explicit certification flag; it is evidence
//! for a closure dimension, never a proof.

use num::BigInt;

use crate::error::{Error, Result};
use crate::modp::Fp;
use crate::numfield::NumberField;
use crate::poly::{Poly, Q};
use crate::primes::is_prime;

/// Largest allowed modulus p^N: squares must stay inside u128.
const MAX_MODULUS: u128 = 1 << 62;

fn checked_modulus(p: u64, prec: u32) -> Result<u128> {
    if !is_prime(p) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    if prec == 0 {
        return Err(Error::UnsupportedPrecision {
            detail: "precision must be at least 1".into(),
        });
    }
    let mut m: u128 = 1;
    for _ in 0..prec {
        m = m.checked_mul(p as u128).ok_or(Error::UnsupportedPrecision {
            detail: format!("{p}^{prec} overflows"),
        })?;
        if m > MAX_MODULUS {
            return Err(Error::UnsupportedPrecision {
                detail: format!("{p}^{prec} exceeds 2^62"),
            });
        }
    }
    Ok(m)
}

pub(crate) fn inv_mod(a: u128, m: u128) -> Option<u128> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u128)
}

fn z_mod(z: &BigInt, m: u128) -> u128 {
    let mm = BigInt::from(m);
    let r = ((z % &mm) + &mm) % &mm;
    let (_, digits) = r.to_u64_digits();
    match digits.len() {
        0 => 0,
        1 => digits[0] as u128,
        _ => (digits[0] as u128) | ((digits[1] as u128) << 64),
    }
}

pub(crate) fn q_mod(x: &Q, m: u128) -> Option<u128> {
    let num = z_mod(x.numer(), m);
    let den = inv_mod(z_mod(x.denom(), m), m)?;
    Some(num * den % m)
}

pub(crate) fn pow_mod(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut acc: u128 = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    acc
}

/// An exact residue mod p^prec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicInt {
    p: u64,
    prec: u32,
    residue: u128,
}

impl PAdicInt {
    pub fn new(p: u64, prec: u32, value: i64) -> Result<Self> {
        let m = checked_modulus(p, prec)?;
        let residue = (value as i128).rem_euclid(m as i128) as u128;
        Ok(PAdicInt { p, prec, residue })
    }

    pub fn from_rational(p: u64, prec: u32, x: &Q) -> Result<Self> {
        let m = checked_modulus(p, prec)?;
        let residue = q_mod(x, m).ok_or_else(|| Error::GeneratorNotCoprime {
            g: format!("{}/{}", x.numer(), x.denom()),
            p,
        })?;
        Ok(PAdicInt { p, prec, residue })
    }

    fn from_residue(p: u64, prec: u32, residue: u128) -> Self {
        PAdicInt { p, prec, residue }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn residue(&self) -> u128 {
        self.residue
    }

    pub fn modulus(&self) -> u128 {
        let mut m: u128 = 1;
        for _ in 0..self.prec {
            m *= self.p as u128;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    /// Valuation of the residue, capped at the precision.
    pub fn valuation(&self) -> u32 {
        if self.residue == 0 {
            return self.prec;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r % self.p as u128 == 0 {
            r /= self.p as u128;
            v += 1;
        }
        v
    }

    pub fn reduce_to(&self, prec: u32) -> Self {
        assert!(prec <= self.prec, "cannot gain precision");
        let mut m: u128 = 1;
        for _ in 0..prec {
            m *= self.p as u128;
        }
        PAdicInt {
            p: self.p,
            prec,
            residue: self.residue % m,
        }
    }

    fn aligned(&self, other: &Self) -> (u32, u128) {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        let mut m: u128 = 1;
        for _ in 0..prec {
            m *= self.p as u128;
        }
        (prec, m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (prec, m) = self.aligned(other);
        PAdicInt::from_residue(self.p, prec, (self.residue % m + other.residue % m) % m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (prec, m) = self.aligned(other);
        PAdicInt::from_residue(
            self.p,
            prec,
            (self.residue % m + m - other.residue % m) % m,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (prec, m) = self.aligned(other);
        PAdicInt::from_residue(self.p, prec, (self.residue % m) * (other.residue % m) % m)
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PAdicInt::from_residue(self.p, self.prec, (m - self.residue % m) % m)
    }

    pub fn pow(&self, e: u64) -> Self {
        PAdicInt::from_residue(self.p, self.prec, pow_mod(self.residue, e as u128, self.modulus()))
    }

    /// Inverse of a residue coprime to p.
    pub fn unit_inverse(&self) -> Result<Self> {
        let inv = inv_mod(self.residue, self.modulus()).ok_or_else(|| {
            Error::Config(format!("{} is not a unit mod {}^{}", self.residue, self.p, self.prec))
        })?;
        Ok(PAdicInt::from_residue(self.p, self.prec, inv))
    }

    /// Exact division by p^v; costs v digits of precision.
    pub fn exact_div_by_p_power(&self, v: u32) -> Result<Self> {
        if v == 0 {
            return Ok(self.clone());
        }
        if v >= self.prec {
            return Err(Error::PrecisionExhausted);
        }
        let mut pv: u128 = 1;
        for _ in 0..v {
            pv *= self.p as u128;
        }
        assert_eq!(self.residue % pv, 0, "inexact division by p^{v}");
        Ok(PAdicInt::from_residue(self.p, self.prec - v, self.residue / pv))
    }

    pub fn display(&self) -> String {
        format!("{} + O({}^{})", self.residue, self.p, self.prec)
    }
}

/// log(x) = sum (-1)^(k+1) (x-1)^k / k for x = 1 mod p, p odd.
///
/// The returned precision accounts for both losses: dividing a term by
/// p^v costs v digits, and a term whose power vanishes at working
/// precision but whose index carries p-valuation hides digits the input
/// cannot see. Whatever precision survives is exact.
pub fn padic_log(x: &PAdicInt) -> Result<PAdicInt> {
    if x.p == 2 {
        return Err(Error::EvenPrimeUnsupported);
    }
    let n = x.prec;
    let m = x.modulus();
    let p = x.p as u128;
    if x.residue % p != 1 {
        return Err(Error::NotOneUnit {
            value: x.residue.to_string(),
            p: x.p,
        });
    }
    let y = (x.residue + m - 1) % m;
    if y == 0 {
        return Ok(PAdicInt::from_residue(x.p, n, 0));
    }
    let mut t = 0u32;
    let mut yy = y;
    while yy % p == 0 {
        yy /= p;
        t += 1;
    }
    // past this index every term, seen or unseen, sits beyond precision n
    let mut k_stop = 1u64;
    loop {
        let mut ilog = 0u32;
        let mut r = k_stop;
        while r >= x.p {
            r /= x.p;
            ilog += 1;
        }
        if (k_stop as u32) * t >= n + ilog {
            break;
        }
        k_stop += 1;
    }

    let mut acc: u128 = 0;
    let mut out_prec = n;
    let mut y_pow = y;
    for k in 1..=k_stop {
        let mut v = 0u32;
        let mut ku = k;
        while ku % x.p as u64 == 0 {
            ku /= x.p as u64;
            v += 1;
        }
        if y_pow != 0 {
            let mut pv: u128 = 1;
            for _ in 0..v {
                pv *= p;
            }
            assert_eq!(y_pow % pv, 0);
            let unit_inv = inv_mod(ku as u128, m).expect("index unit part is invertible");
            let term = (y_pow / pv) * unit_inv % m;
            acc = if k % 2 == 1 { (acc + term) % m } else { (acc + m - term) % m };
            out_prec = out_prec.min(n - v);
        } else {
            // an invisible term: its true valuation is at least k t - v
            let reach = (k as u32) * t;
            if reach < n + v {
                out_prec = out_prec.min(reach.saturating_sub(v));
            }
        }
        y_pow = y_pow * y % m;
    }
    if out_prec == 0 {
        return Err(Error::PrecisionExhausted);
    }
    Ok(PAdicInt::from_residue(x.p, n, acc).reduce_to(out_prec))
}

/// One generator's logs across the declared completions above p.
#[derive(Clone, Debug)]
pub struct LogVector {
    pub coords: Vec<PAdicInt>,
    pub provenance: String,
}

fn lift_root(f: &[BigInt], fd: &[BigInt], p: u64, n: u32, r0: u64) -> u128 {
    let eval = |co: &[BigInt], x: u128, m: u128| -> u128 {
        let mut acc: u128 = 0;
        for c in co.iter().rev() {
            acc = (acc * x + z_mod(c, m)) % m;
        }
        acc
    };
    let mut prec = 1u32;
    let mut r = r0 as u128;
    while prec < n {
        prec = (2 * prec).min(n);
        let mut m: u128 = 1;
        for _ in 0..prec {
            m *= p as u128;
        }
        let fr = eval(f, r, m);
        let dr = eval(fd, r, m);
        let dinv = inv_mod(dr, m).expect("simple root stays simple under lifting");
        r = (r + m - fr * dinv % m) % m;
    }
    r
}

/// All roots of the defining polynomial mod p^n, sorted. Demands that p
/// splits completely and is unramified in the field.
fn completion_roots(field: &NumberField, p: u64, n: u32) -> Result<Vec<u128>> {
    let d = field.degree();
    if d == 1 {
        return Ok(vec![0]);
    }
    let f = field.defining_poly();
    if !f.is_integer() {
        return Err(Error::Config(
            "completion data needs an integral defining polynomial".into(),
        ));
    }
    let fp = Fp::new(p);
    let co: Vec<u64> = (0..=d).map(|i| z_mod(f.coeff(i).numer(), p as u128) as u64).collect();
    let fbar = fp.poly_from_i64(&co.iter().map(|&c| c as i64).collect::<Vec<_>>());
    let fac = fp.factor(&fbar)?;
    let total: usize = fac.iter().map(|(g, e)| (Fp::deg(g).unwrap_or(0)) * e).sum();
    if total != d || fac.iter().any(|(g, e)| Fp::deg(g) != Some(1) || *e != 1) {
        return Err(Error::NonSplitCompletion { p });
    }
    let fz: Vec<BigInt> = (0..=d).map(|i| f.coeff(i).numer().clone()).collect();
    let fdz: Vec<BigInt> = (1..=d).map(|i| f.coeff(i).numer() * BigInt::from(i)).collect();
    let mut roots = Vec::new();
    for (g, _) in &fac {
        let r0 = (p - g[0] % p) % p;
        roots.push(lift_root(&fz, &fdz, p, n, r0));
    }
    roots.sort_unstable();
    Ok(roots)
}

/// Rows of generator logs across the completions above p, at a uniform
/// precision. Each generator is first raised to the p-1 power so that the
/// Teichmueller part dies; the log is scaled back by 1/(p-1).
pub fn unit_log_matrix(
    field: &NumberField,
    gens: &[Poly],
    p: u64,
    n: u32,
) -> Result<Vec<LogVector>> {
    if p == 2 {
        return Err(Error::EvenPrimeUnsupported);
    }
    let m = checked_modulus(p, n)?;
    let roots = completion_roots(field, p, n)?;
    let mut rows = Vec::new();
    let mut min_prec = n;
    for g in gens {
        let g = field.reduce(g);
        let mut coords = Vec::new();
        for &r in &roots {
            let mut val: u128 = 0;
            for i in (0..=g.degree().unwrap_or(0)).rev() {
                let c = q_mod(&g.coeff(i), m).ok_or_else(|| Error::GeneratorNotCoprime {
                    g: g.display(),
                    p,
                })?;
                val = (val * r + c) % m;
            }
            if val % p as u128 == 0 {
                return Err(Error::GeneratorNotCoprime { g: g.display(), p });
            }
            let one_unit = PAdicInt::from_residue(p, n, pow_mod(val, (p - 1) as u128, m));
            let lg = padic_log(&one_unit)?;
            let scale = PAdicInt::from_residue(p, lg.precision(), (p - 1) as u128)
                .unit_inverse()
                .expect("p-1 is a unit");
            let scaled = lg.mul(&scale);
            min_prec = min_prec.min(scaled.precision());
            coords.push(scaled);
        }
        rows.push(LogVector {
            coords,
            provenance: g.display(),
        });
    }
    for row in &mut rows {
        for c in &mut row.coords {
            *c = c.reduce_to(min_prec);
        }
    }
    Ok(rows)
}

/// Numeric rank of the span of the rows over the p-adic integers, with a
/// stability flag: certified means every pivot used fewer than half the
/// available digits, so refining the precision should not change the
/// count. Evidence, not proof.
pub fn closure_dimension(rows: &[LogVector]) -> Result<(usize, bool)> {
    if rows.is_empty() {
        return Err(Error::Config("closure rank of an empty matrix".into()));
    }
    let p = rows[0].coords.first().map(|c| c.p()).unwrap_or(2);
    let cols = rows[0].coords.len();
    if cols == 0 {
        return Ok((0, true));
    }
    let n = rows
        .iter()
        .flat_map(|r| r.coords.iter())
        .map(|c| {
            assert_eq!(c.p(), p, "mixed primes in log matrix");
            c.precision()
        })
        .min()
        .unwrap();
    if n == 0 {
        return Err(Error::PrecisionExhausted);
    }
    let mut m: u128 = 1;
    for _ in 0..n {
        m *= p as u128;
    }
    let val = |x: u128| -> u32 {
        if x == 0 {
            return n;
        }
        let mut v = 0;
        let mut r = x;
        while r % p as u128 == 0 {
            r /= p as u128;
            v += 1;
        }
        v
    };
    let mut a: Vec<Vec<u128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.coords.len(), cols, "ragged log matrix");
            r.coords.iter().map(|c| c.reduce_to(n).residue()).collect()
        })
        .collect();
    let mut row_used = vec![false; a.len()];
    let mut col_used = vec![false; cols];
    let mut rank = 0;
    let mut certified = true;
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate() {
            if row_used[i] {
                continue;
            }
            for (j, &x) in row.iter().enumerate() {
                if col_used[j] || x == 0 {
                    continue;
                }
                let v = val(x);
                if best.map(|(_, _, bv)| v < bv).unwrap_or(true) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        if pv >= n {
            break;
        }
        rank += 1;
        if 2 * pv >= n {
            certified = false;
        }
        let mut pvp: u128 = 1;
        for _ in 0..pv {
            pvp *= p as u128;
        }
        let unit = a[pi][pj] / pvp;
        let unit_inv = inv_mod(unit, m).expect("pivot unit part is invertible");
        let pivot_row = a[pi].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == pi || row_used[i] {
                continue;
            }
            if row[pj] == 0 {
                continue;
            }
            debug_assert_eq!(row[pj] % pvp, 0, "pivot had minimal valuation");
            let factor = (row[pj] / pvp) * unit_inv % m;
            for j in 0..cols {
                let s = factor * pivot_row[j] % m;
                row[j] = (row[j] + m - s) % m;
            }
        }
        row_used[pi] = true;
        col_used[pj] = true;
    }
    Ok((rank, certified))
}
