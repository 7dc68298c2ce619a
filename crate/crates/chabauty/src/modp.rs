//! Polynomial arithmetic and factorization over a prime field F_p.
//!
//! Coefficients are `u64` residues in ascending order with no trailing
//! zeros. Factorization runs the classic three stage pipeline: squarefree
//! decomposition, then distinct-degree splitting, then equal-degree
//! splitting. The equal-degree stage tries split candidates in a fixed
//! order, so the output is deterministic; factors are returned sorted.

use crate::error::{Error, Result};

pub type FpPoly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p >= 2);
        Fp { p }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    fn trim(v: &mut FpPoly) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn poly_from_i64(&self, co: &[i64]) -> FpPoly {
        let p = self.p as i128;
        let mut v: FpPoly = co
            .iter()
            .map(|&c| (((c as i128 % p) + p) % p) as u64)
            .collect();
        Self::trim(&mut v);
        v
    }

    pub fn deg(v: &FpPoly) -> Option<usize> {
        if v.is_empty() {
            None
        } else {
            Some(v.len() - 1)
        }
    }

    pub fn poly_add(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.len().max(b.len());
        let mut v = vec![0u64; n];
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            v[i] = self.add(x, y);
        }
        Self::trim(&mut v);
        v
    }

    pub fn poly_sub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let n = a.len().max(b.len());
        let mut v = vec![0u64; n];
        for i in 0..n {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            v[i] = self.sub(x, y);
        }
        Self::trim(&mut v);
        v
    }

    pub fn poly_mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut v = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                v[i + j] = self.add(v[i + j], self.mul(x, y));
            }
        }
        Self::trim(&mut v);
        v
    }

    pub fn poly_scale(&self, a: &FpPoly, k: u64) -> FpPoly {
        let mut v: FpPoly = a.iter().map(|&c| self.mul(c, k)).collect();
        Self::trim(&mut v);
        v
    }

    pub fn poly_monic(&self, a: &FpPoly) -> FpPoly {
        match a.last() {
            None => Vec::new(),
            Some(&l) if l == 1 => a.clone(),
            Some(&l) => self.poly_scale(a, self.inv(l)),
        }
    }

    pub fn poly_divrem(&self, a: &FpPoly, b: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!b.is_empty(), "division by zero polynomial mod p");
        if a.len() < b.len() {
            return (Vec::new(), a.clone());
        }
        let mut rem = a.clone();
        let mut quo = vec![0u64; a.len() - b.len() + 1];
        let db = b.len() - 1;
        let lead_inv = self.inv(*b.last().unwrap());
        for i in (db..rem.len()).rev() {
            if rem[i] == 0 {
                continue;
            }
            let q = self.mul(rem[i], lead_inv);
            quo[i - db] = q;
            for (j, &c) in b.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = self.sub(rem[idx], self.mul(q, c));
            }
        }
        Self::trim(&mut rem);
        let mut quo = quo;
        Self::trim(&mut quo);
        (quo, rem)
    }

    pub fn poly_rem(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        self.poly_divrem(a, b).1
    }

    pub fn poly_gcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_empty() {
            let r = self.poly_rem(&x, &y);
            x = y;
            y = r;
        }
        self.poly_monic(&x)
    }

    pub fn poly_derivative(&self, a: &FpPoly) -> FpPoly {
        if a.len() <= 1 {
            return Vec::new();
        }
        let mut v: FpPoly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, (i as u64) % self.p))
            .collect();
        Self::trim(&mut v);
        v
    }

    pub fn poly_powmod(&self, a: &FpPoly, mut e: u128, m: &FpPoly) -> FpPoly {
        let mut base = self.poly_rem(a, m);
        let mut acc = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                acc = self.poly_rem(&self.poly_mul(&acc, &base), m);
            }
            e >>= 1;
            if e > 0 {
                base = self.poly_rem(&self.poly_mul(&base, &base), m);
            }
        }
        acc
    }

    pub fn poly_eval(&self, a: &FpPoly, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in a.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    /// Squarefree decomposition: returns (g, m) pairs with f = prod g^m,
    /// g monic squarefree pairwise coprime. Handles the char-p collapse
    /// f = h(x^p) via the Frobenius identity on coefficients.
    pub fn squarefree_decomposition(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let f = self.poly_monic(f);
        let mut out: Vec<(FpPoly, usize)> = Vec::new();
        self.sqf_rec(&f, 1, &mut out);
        out.sort();
        out
    }

    fn sqf_rec(&self, f: &FpPoly, mult: usize, out: &mut Vec<(FpPoly, usize)>) {
        if Self::deg(f) == Some(0) {
            return;
        }
        let d = self.poly_derivative(f);
        if d.is_empty() {
            // f = h(x^p)
            let p = self.p as usize;
            let mut h: FpPoly = Vec::new();
            for (i, &c) in f.iter().enumerate() {
                if i % p == 0 {
                    h.push(c);
                } else {
                    debug_assert!(c == 0);
                }
            }
            self.sqf_rec(&h, mult * p, out);
            return;
        }
        let mut c = self.poly_gcd(f, &d);
        let mut w = self.poly_divrem(f, &c).0;
        let mut i = 1usize;
        while Self::deg(&w) != Some(0) {
            let y = self.poly_gcd(&w, &c);
            let z = self.poly_divrem(&w, &y).0;
            if Self::deg(&z) != Some(0) {
                out.push((self.poly_monic(&z), mult * i));
            }
            c = self.poly_divrem(&c, &y).0;
            w = y;
            i += 1;
        }
        if Self::deg(&c) != Some(0) {
            // leftover p-th power part
            self.sqf_rec(&c, mult, out);
        }
    }

    /// Distinct-degree splitting of a monic squarefree f: returns (product, d)
    /// with product = product of all irreducible factors of degree d.
    pub fn distinct_degree(&self, f: &FpPoly) -> Vec<(FpPoly, usize)> {
        let mut out = Vec::new();
        let mut rest = self.poly_monic(f);
        let x = vec![0u64, 1u64];
        let mut h = x.clone();
        let mut d = 0usize;
        while Self::deg(&rest).map_or(false, |n| n >= 1) {
            d += 1;
            if Self::deg(&rest) == Some(d) {
                out.push((rest.clone(), d));
                break;
            }
            if 2 * d > Self::deg(&rest).unwrap_or(0) {
                out.push((rest.clone(), Self::deg(&rest).unwrap()));
                break;
            }
            h = self.poly_powmod(&h, self.p as u128, &rest);
            let g = self.poly_gcd(&self.poly_sub(&h, &x), &rest);
            if Self::deg(&g).map_or(false, |n| n >= 1) {
                out.push((g.clone(), d));
                rest = self.poly_divrem(&rest, &g).0;
                h = self.poly_rem(&h, &rest);
            }
        }
        out
    }

    /// Equal-degree splitting: f monic squarefree, all irreducible factors of
    /// degree d. Deterministic candidate sequence.
    pub fn equal_degree(&self, f: &FpPoly, d: usize) -> Vec<FpPoly> {
        let n = Self::deg(f).unwrap_or(0);
        if n == d {
            return vec![f.clone()];
        }
        let mut stack = vec![f.clone()];
        let mut done: Vec<FpPoly> = Vec::new();
        while let Some(g) = stack.pop() {
            let dg = Self::deg(&g).unwrap();
            if dg == d {
                done.push(g);
                continue;
            }
            let h = self.split_once(&g, d);
            let cof = self.poly_divrem(&g, &h).0;
            stack.push(h);
            stack.push(self.poly_monic(&cof));
        }
        done.sort();
        done
    }

    fn split_once(&self, g: &FpPoly, d: usize) -> FpPoly {
        // try candidates t = x + c, then higher-degree deterministic candidates
        let mut counter = 0u64;
        loop {
            let t = self.candidate(counter);
            counter += 1;
            if Self::deg(&t).map_or(true, |dt| dt == 0) {
                continue;
            }
            let split = if self.p == 2 {
                // trace map: T(t) = t + t^2 + t^4 + ... + t^(2^(d-1)) mod g
                let mut acc = Vec::new();
                let mut term = self.poly_rem(&t, g);
                for _ in 0..d {
                    acc = self.poly_add(&acc, &term);
                    term = self.poly_rem(&self.poly_mul(&term, &term), g);
                }
                acc
            } else {
                let e = (num::pow::pow(self.p as u128, d) - 1) / 2;
                let s = self.poly_powmod(&t, e, g);
                self.poly_sub(&s, &vec![1u64])
            };
            let h = self.poly_gcd(&split, g);
            if let Some(dh) = Self::deg(&h) {
                if dh >= 1 && dh < Self::deg(g).unwrap() {
                    return self.poly_monic(&h);
                }
            }
        }
    }

    /// Deterministic enumeration of test polynomials: x+0, x+1, ... then
    /// x^2 + c1 x + c0, x^3 + ..., walking coefficient space in base p.
    fn candidate(&self, idx: u64) -> FpPoly {
        let p = self.p;
        let mut span = p; // count of degree-1 candidates
        let mut deg = 1u64;
        let mut i = idx;
        loop {
            if i < span {
                let mut v = vec![0u64; deg as usize + 1];
                let mut rest = i;
                for slot in v.iter_mut().take(deg as usize) {
                    *slot = rest % p;
                    rest /= p;
                }
                v[deg as usize] = 1;
                return v;
            }
            i -= span;
            deg += 1;
            span = span.saturating_mul(p);
        }
    }

    /// Full factorization of a nonzero f mod p: sorted list of
    /// (monic irreducible factor, multiplicity).
    pub fn factor(&self, f: &FpPoly) -> Result<Vec<(FpPoly, usize)>> {
        if f.is_empty() {
            return Err(Error::ZeroModP { p: self.p });
        }
        if Self::deg(f) == Some(0) {
            return Ok(Vec::new());
        }
        let mut out: Vec<(FpPoly, usize)> = Vec::new();
        for (g, m) in self.squarefree_decomposition(f) {
            for (prod, d) in self.distinct_degree(&g) {
                for irr in self.equal_degree(&prod, d) {
                    out.push((irr, m));
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn multiply_back(fp: &Fp, factors: &[(FpPoly, usize)]) -> FpPoly {
        let mut acc = vec![1u64];
        for (g, m) in factors {
            for _ in 0..*m {
                acc = fp.poly_mul(&acc, g);
            }
        }
        acc
    }

    #[test]
    fn cube_root_of_two_mod_five() {
        let fp = Fp::new(5);
        let f = fp.poly_from_i64(&[-2, 0, 0, 1]);
        let fac = fp.factor(&f).unwrap();
        let degs: Vec<usize> = fac.iter().map(|(g, _)| Fp::deg(g).unwrap()).collect();
        assert_eq!(degs, vec![1, 2]);
        assert!(fac.iter().all(|(_, m)| *m == 1));
        assert_eq!(multiply_back(&fp, &fac), fp.poly_monic(&f));
    }

    #[test]
    fn repeated_factor_mod_two() {
        let fp = Fp::new(2);
        let f = fp.poly_from_i64(&[1, 0, 1]); // x^2 + 1 = (x+1)^2
        let fac = fp.factor(&f).unwrap();
        assert_eq!(fac.len(), 1);
        assert_eq!(Fp::deg(&fac[0].0), Some(1));
        assert_eq!(fac[0].1, 2);
    }

    #[test]
    fn degree_seven_mod_two() {
        let fp = Fp::new(2);
        let f = fp.poly_from_i64(&[-3, 0, 0, 0, 0, 0, 0, 1]); // x^7 + 1 mod 2
        let fac = fp.factor(&f).unwrap();
        let mut degs: Vec<usize> = fac.iter().map(|(g, _)| Fp::deg(g).unwrap()).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 3, 3]);
        assert!(fac.iter().all(|(_, m)| *m == 1));
        assert_eq!(multiply_back(&fp, &fac), fp.poly_monic(&f));
    }

    #[test]
    fn big_prime_linear_split() {
        let fp = Fp::new(13);
        // x^3 - 1 = (x-1)(x-3)(x-9) mod 13
        let f = fp.poly_from_i64(&[-1, 0, 0, 1]);
        let fac = fp.factor(&f).unwrap();
        assert_eq!(fac.len(), 3);
        assert!(fac.iter().all(|(g, _)| Fp::deg(g) == Some(1)));
    }

    #[test]
    fn deterministic_output() {
        let fp = Fp::new(7);
        let f = fp.poly_from_i64(&[3, 1, 0, 2, 5, 1]);
        let a = fp.factor(&f).unwrap();
        let b = fp.factor(&f).unwrap();
        assert_eq!(a, b);
        assert_eq!(multiply_back(&fp, &a), fp.poly_monic(&f));
    }
}
