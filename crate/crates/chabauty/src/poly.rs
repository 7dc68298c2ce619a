//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending order (`co[i]` multiplies `x^i`)
//! with no trailing zeros, so the zero polynomial is the empty vector.
//!
//! ```
//! use chabauty::poly::Poly;
//! let f = Poly::from_int(&[-2, 0, 0, 1]); // x^3 - 2
//! assert_eq!(f.degree(), Some(3));
//! assert_eq!(f.eval_i64(2), num::BigRational::from_integer(6.into()));
//! ```

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Q = BigRational;
pub type Z = BigInt;

pub fn qz(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    co: Vec<Q>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { co: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { co: vec![Q::one()] }
    }

    pub fn x() -> Self {
        Poly {
            co: vec![Q::zero(), Q::one()],
        }
    }

    pub fn constant(c: Q) -> Self {
        Poly { co: vec![c] }.trimmed()
    }

    pub fn from_coeffs(co: Vec<Q>) -> Self {
        Poly { co }.trimmed()
    }

    pub fn from_int(co: &[i64]) -> Self {
        Poly {
            co: co.iter().map(|&c| qz(c)).collect(),
        }
        .trimmed()
    }

    pub fn from_bigint(co: &[Z]) -> Self {
        Poly {
            co: co.iter().map(|c| Q::from_integer(c.clone())).collect(),
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.co.last().map_or(false, |c| c.is_zero()) {
            self.co.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.co
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.co.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.co.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.co.is_empty() {
            None
        } else {
            Some(self.co.len() - 1)
        }
    }

    /// Degree with the zero polynomial treated as degree 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Q {
        self.co.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.co.last().map_or(false, |c| c.is_one())
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.co.len().max(rhs.co.len());
        let mut co = Vec::with_capacity(n);
        for i in 0..n {
            co.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly { co }.trimmed()
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        let n = self.co.len().max(rhs.co.len());
        let mut co = Vec::with_capacity(n);
        for i in 0..n {
            co.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly { co }.trimmed()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            co: self.co.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, k: &Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            co: self.co.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut co = vec![Q::zero(); self.co.len() + rhs.co.len() - 1];
        for (i, a) in self.co.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.co.iter().enumerate() {
                co[i + j] += a * b;
            }
        }
        Poly { co }.trimmed()
    }

    pub fn mul_xpow(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut co = vec![Q::zero(); k];
        co.extend_from_slice(&self.co);
        Poly { co }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = Q::one() / self.lc();
        self.scale(&inv)
    }

    /// Division with remainder over Q; rhs must be nonzero.
    pub fn divrem(&self, rhs: &Poly) -> (Poly, Poly) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let dr = rhs.co.len() - 1;
        if self.co.len() < rhs.co.len() {
            return (Poly::zero(), self.clone());
        }
        let mut rem = self.co.clone();
        let mut quo = vec![Q::zero(); self.co.len() - dr];
        let lead_inv = Q::one() / rhs.lc();
        for i in (dr..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] * &lead_inv;
            quo[i - dr] = q.clone();
            for (j, b) in rhs.co.iter().enumerate() {
                let idx = i - dr + j;
                let t = &q * b;
                rem[idx] -= t;
            }
        }
        (Poly { co: quo }.trimmed(), Poly { co: rem }.trimmed())
    }

    pub fn rem(&self, rhs: &Poly) -> Poly {
        self.divrem(rhs).1
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.co.len() <= 1 {
            return Poly::zero();
        }
        let co = self
            .co
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * qz(i as i64))
            .collect();
        Poly { co }.trimmed()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.co.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> Q {
        self.eval(&qz(x))
    }

    /// Substitute x -> g(x).
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.co.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(c.clone()));
        }
        acc
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.deg0() == 0 {
            return true;
        }
        self.gcd(&self.derivative()).deg0() == 0
    }

    /// True when every coefficient is an integer.
    pub fn is_integer(&self) -> bool {
        self.co.iter().all(|c| c.is_integer())
    }

    /// Clear denominators: returns (primitive integer coefficients, positive leading sign preserved? no)
    /// as c * self with c the lcm of denominators; result shares roots with self.
    pub fn int_coeffs_cleared(&self) -> Vec<Z> {
        let mut l = Z::one();
        for c in &self.co {
            l = num::integer::lcm(l, c.denom().clone());
        }
        self.co
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect()
    }

    /// Smallest positive integer scaling x -> x/c that produces a monic
    /// integer polynomial defining the same field extension. Requires monic input.
    pub fn rescale_to_monic_integer(&self) -> Poly {
        assert!(self.is_monic(), "rescale needs monic input");
        if self.is_integer() {
            return self.clone();
        }
        let n = self.deg0();
        let mut l = Z::one();
        for c in &self.co {
            l = num::integer::lcm(l, c.denom().clone());
        }
        let mut divisors: Vec<Z> = Vec::new();
        let mut d = Z::one();
        while &d * &d <= l {
            if (&l % &d).is_zero() {
                divisors.push(d.clone());
                divisors.push(&l / &d);
            }
            d += 1;
        }
        divisors.sort();
        divisors.dedup();
        'outer: for c in &divisors {
            let mut pw = Q::one();
            let cq = Q::from_integer(c.clone());
            let mut co = vec![Q::zero(); n + 1];
            for i in (0..=n).rev() {
                let v = self.coeff(i) * &pw;
                if !v.is_integer() {
                    continue 'outer;
                }
                co[i] = v;
                pw *= &cq;
            }
            return Poly { co }.trimmed();
        }
        unreachable!("lcm of denominators always works as a scaling factor")
    }

    /// Largest square-free divisor (monic), over Q.
    pub fn squarefree_part(&self) -> Poly {
        assert!(!self.is_zero());
        if self.deg0() == 0 {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        if g.deg0() == 0 {
            return self.monic();
        }
        self.divrem(&g).0.monic()
    }

    /// Cauchy root bound: every real root r satisfies |r| < bound.
    pub fn cauchy_bound(&self) -> Q {
        assert!(!self.is_zero());
        let lc = self.lc();
        let mut m = Q::zero();
        for c in &self.co[..self.co.len() - 1] {
            let v = (c / &lc).abs();
            if v > m {
                m = v;
            }
        }
        m + Q::one()
    }

    pub fn display(&self) -> String {
        self.display_with_var("x")
    }

    pub fn display_with_var(&self, var: &str) -> String {
        crate::report::poly_string(&self.co, var)
    }

    /// Ascending coefficient list as exact strings, for serialization.
    pub fn coeff_strings(&self) -> Vec<String> {
        self.co.iter().map(crate::report::q_string).collect()
    }
}

/// Resultant of two integer polynomials, computed exactly by fraction-free
/// (Bareiss) elimination of the Sylvester matrix.
pub fn resultant_z(f: &[Z], g: &[Z]) -> Z {
    let df = f.len() as i64 - 1;
    let dg = g.len() as i64 - 1;
    assert!(df >= 0 && dg >= 0, "resultant of zero polynomial");
    if df == 0 {
        return num::pow::pow(f[0].clone(), dg as usize);
    }
    if dg == 0 {
        return num::pow::pow(g[0].clone(), df as usize);
    }
    let n = (df + dg) as usize;
    let mut m = vec![vec![Z::zero(); n]; n];
    // rows 0..dg hold shifts of f, rows dg..dg+df hold shifts of g
    for r in 0..dg as usize {
        for (k, c) in f.iter().rev().enumerate() {
            m[r][r + k] = c.clone();
        }
    }
    for r in 0..df as usize {
        for (k, c) in g.iter().rev().enumerate() {
            m[dg as usize + r][r + k] = c.clone();
        }
    }
    // Bareiss
    let mut sign = 1i64;
    let mut prev = Z::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Z::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &t / &prev;
            }
            m[i][k] = Z::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Lagrange interpolation through exact rational points with distinct x's.
pub fn interpolate(points: &[(Q, Q)]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::one();
        let mut denom = Q::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&Poly::from_coeffs(vec![-xj.clone(), Q::one()]));
            denom *= xi - xj;
        }
        acc = acc.add(&basis.scale(&(yi / denom)));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_roundtrip() {
        let f = Poly::from_int(&[-2, 0, 0, 1]);
        let g = Poly::from_int(&[1, 1]);
        let (q, r) = f.divrem(&g);
        assert_eq!(q.mul(&g).add(&r), f);
    }

    #[test]
    fn gcd_of_multiple() {
        let g = Poly::from_int(&[1, 3, 1]);
        let a = g.mul(&Poly::from_int(&[-1, 1]));
        let b = g.mul(&Poly::from_int(&[7, 1]));
        assert_eq!(a.gcd(&b), g.monic());
    }

    #[test]
    fn resultant_matches_eval_product() {
        // res(x^2 - 1, x - 3) = f(3) up to sign conventions = 8
        let f = [Z::from(-1), Z::from(0), Z::from(1)];
        let g = [Z::from(-3), Z::from(1)];
        assert_eq!(resultant_z(&f, &g), Z::from(8));
    }

    #[test]
    fn discriminant_via_resultant() {
        // disc(x^2 + 1) = -4 = -res(f, f') for monic quadratic
        let f = [Z::from(1), Z::from(0), Z::from(1)];
        let fp = [Z::from(0), Z::from(2)];
        let r = resultant_z(&f, &fp);
        assert_eq!(r, Z::from(4));
    }

    #[test]
    fn interpolation_recovers_poly() {
        let f = Poly::from_int(&[2, -1, 5]);
        let pts: Vec<(Q, Q)> = (0..3).map(|t| (qz(t), f.eval_i64(t))).collect();
        assert_eq!(interpolate(&pts), f);
    }

    #[test]
    fn rescale_makes_integer() {
        // x^2 - 1/2 -> multiply root by 2: x^2 - 2
        let f = Poly::from_coeffs(vec![Q::new(Z::from(-1), Z::from(2)), Q::zero(), Q::one()]);
        let g = f.rescale_to_monic_integer();
        assert_eq!(g, Poly::from_int(&[-2, 0, 1]));
    }
}
