//! Number fields presented by monic irreducible integer polynomials.
//!
//! A field K = Q[x]/(f) carries its signature (via Sturm chains), the
//! discriminant of f, and a display label. Elements of K are rational
//! polynomials reduced mod f. On top of that this module provides prime
//! splitting away from the discriminant, Dirichlet S-unit ranks, relative
//! polynomials over K with Trager-style factorization, absolute fields of
//! relative extensions, validated subfield towers with element descent,
//! and CM subfield detection.
//!
//! Splitting at a prime dividing the discriminant of the defining
//! polynomial would need maximal-order machinery and is refused instead
//! (`IndexObstruction`), so choose defining polynomials accordingly.

use std::collections::BTreeSet;

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::modp::Fp;
use crate::poly::{self, qz, Poly, Q, Z};
use crate::primes::is_prime;
use crate::sturm;
use crate::zzfactor;

/// A number field Q[x]/(f) with f monic irreducible over Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberField {
    defining_poly: Poly,
    degree: usize,
    signature: (usize, usize),
    poly_discriminant: Z,
    label: String,
}

fn poly_disc(f: &Poly) -> Z {
    let n = f.deg0();
    let fi = f.int_coeffs_cleared();
    let di: Vec<Z> = f.derivative().int_coeffs_cleared();
    let r = poly::resultant_z(&fi, &di);
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

impl NumberField {
    /// Full constructor: verifies monic integer input and irreducibility
    /// over the rationals, then computes signature and discriminant.
    pub fn new(f: Poly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.degree() == Some(0) {
            return Err(Error::Config(
                "a defining polynomial must have degree at least 1".into(),
            ));
        }
        if !f.is_monic() || !f.is_integer() {
            return Err(Error::NotMonic);
        }
        let fac = zzfactor::factor_q(&f)?;
        if fac.len() > 1 || fac[0].1 > 1 {
            return Err(Error::Reducible {
                witness: fac[0].0.display(),
            });
        }
        Ok(Self::new_irreducible(f))
    }

    /// Constructor for polynomials already proven irreducible (monic,
    /// integer). Still computes and asserts all derived data.
    pub(crate) fn new_irreducible(f: Poly) -> Self {
        debug_assert!(f.is_monic() && f.is_integer());
        let degree = f.deg0();
        let signature = sturm::signature(&f);
        assert!(
            signature.0 + 2 * signature.1 == degree,
            "signature must split the degree"
        );
        let poly_discriminant = poly_disc(&f);
        assert!(!poly_discriminant.is_zero(), "irreducible implies squarefree");
        let label = f.display();
        NumberField {
            defining_poly: f,
            degree,
            signature,
            poly_discriminant,
            label,
        }
    }

    /// The rational field, presented by the polynomial x.
    pub fn rationals() -> Self {
        Self::new_irreducible(Poly::x()).with_label("Q")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn defining_poly(&self) -> &Poly {
        &self.defining_poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn is_totally_complex(&self) -> bool {
        self.signature.0 == 0
    }

    pub fn poly_discriminant(&self) -> &Z {
        &self.poly_discriminant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same underlying field presentation (labels ignored).
    pub fn same_presentation(&self, other: &NumberField) -> bool {
        self.defining_poly == other.defining_poly
    }

    // ---- element arithmetic: elements are rational polynomials mod f ----

    pub fn reduce(&self, a: &Poly) -> Poly {
        a.rem(&self.defining_poly)
    }

    pub fn mul_elem(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&a.mul(b))
    }

    pub fn pow_elem(&self, a: &Poly, e: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.reduce(a);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_elem(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_elem(&base, &base);
            }
        }
        acc
    }

    pub fn inv_elem(&self, a: &Poly) -> Poly {
        let ar = self.reduce(a);
        assert!(!ar.is_zero(), "inverse of zero in a number field");
        let (g, s, _) = ext_gcd(&ar, &self.defining_poly);
        debug_assert_eq!(g.degree(), Some(0));
        let ginv = Q::one() / g.coeff(0);
        self.reduce(&s.scale(&ginv))
    }

    /// Field norm K -> Q of an element, via the resultant with f.
    pub fn norm_elem(&self, a: &Poly) -> Q {
        let ar = self.reduce(a);
        if ar.is_zero() {
            return Q::zero();
        }
        let mut l = Z::one();
        for c in ar.coeffs() {
            l = num::integer::lcm(l, c.denom().clone());
        }
        let ai: Vec<Z> = ar
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let fi = self.defining_poly.int_coeffs_cleared();
        let r = poly::resultant_z(&fi, &ai);
        Q::new(r, num::pow::pow(l, self.degree))
    }

    // ---- prime splitting and S-unit ranks ----

    /// Splitting data at p, available exactly when p does not divide the
    /// discriminant of the defining polynomial.
    pub fn splitting_profile(&self, p: u64) -> Result<SplittingProfile> {
        if (self.poly_discriminant.mod_floor(&BigInt::from(p))).is_zero() {
            return Err(Error::IndexObstruction { p });
        }
        let fac = factor_mod_p(&self.defining_poly, p)?;
        debug_assert!(fac.iter().all(|&(_, m)| m == 1));
        let residue_degrees: Vec<usize> = fac.iter().map(|&(d, _)| d).collect();
        debug_assert_eq!(residue_degrees.iter().sum::<usize>(), self.degree);
        Ok(SplittingProfile {
            prime: p,
            residue_degrees,
            exact: true,
        })
    }

    /// Number of places of K above p (requires exact splitting).
    pub fn places_above(&self, p: u64) -> Result<usize> {
        Ok(self.splitting_profile(p)?.residue_degrees.len())
    }

    /// Dirichlet rank of the S-unit group: r1 + r2 + #{places above S0} - 1.
    pub fn s_unit_rank(&self, s0: &SSpec) -> Result<usize> {
        let (r1, r2) = self.signature;
        let mut places = 0usize;
        for p in s0.primes() {
            places += self.places_above(p)?;
        }
        Ok(r1 + r2 + places - 1)
    }
}

/// Parse a monic integer coefficient list (ascending) into a field.
pub fn parse_number_field(coeffs: &[i64]) -> Result<NumberField> {
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    NumberField::new(Poly::from_int(coeffs))
}

impl std::ops::Deref for SplittingProfile {
    type Target = Vec<usize>;
    fn deref(&self) -> &Vec<usize> {
        &self.residue_degrees
    }
}

/// How a rational prime decomposes in K: one residue degree per place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingProfile {
    pub prime: u64,
    pub residue_degrees: Vec<usize>,
    pub exact: bool,
}

/// Degrees with multiplicities of the distinct irreducible factors of an
/// integer polynomial reduced mod p, sorted.
pub fn factor_mod_p(f: &Poly, p: u64) -> Result<Vec<(usize, usize)>> {
    assert!(f.is_integer(), "reduction mod p needs integer coefficients");
    let fp = Fp::new(p);
    let pz = BigInt::from(p);
    let residues: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.numer().mod_floor(&pz);
            r.try_into().unwrap_or(0u64)
        })
        .collect();
    let mut v = residues;
    while v.last() == Some(&0) {
        v.pop();
    }
    if v.is_empty() {
        return Err(Error::ZeroModP { p });
    }
    let fac = fp.factor(&v)?;
    let mut out: Vec<(usize, usize)> = fac
        .iter()
        .map(|(g, m)| (Fp::deg(g).unwrap(), *m))
        .collect();
    out.sort();
    Ok(out)
}

/// A finite set of rational primes S0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SSpec {
    primes: BTreeSet<u64>,
}

impl SSpec {
    pub fn empty() -> Self {
        SSpec::default()
    }

    pub fn new(ps: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut primes = BTreeSet::new();
        for p in ps {
            if !is_prime(p) {
                return Err(Error::Config(format!("S0 member {p} is not prime")));
            }
            primes.insert(p);
        }
        Ok(SSpec { primes })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }
}

// ---- relative polynomials over K and Trager factorization ----

/// Polynomial with coefficients in K (each a rational polynomial in the
/// generator, reduced mod the defining polynomial), ascending, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPoly {
    co: Vec<Poly>,
}

impl KPoly {
    pub fn zero() -> Self {
        KPoly { co: Vec::new() }
    }

    pub fn one() -> Self {
        KPoly {
            co: vec![Poly::one()],
        }
    }

    pub fn var() -> Self {
        KPoly {
            co: vec![Poly::zero(), Poly::one()],
        }
    }

    pub fn from_coeffs(co: Vec<Poly>) -> Self {
        let mut v = KPoly { co };
        v.trim();
        v
    }

    /// View a rational polynomial as a relative polynomial with constant
    /// coefficients.
    pub fn from_q_poly(f: &Poly) -> Self {
        KPoly::from_coeffs(f.coeffs().iter().map(|c| Poly::constant(c.clone())).collect())
    }

    fn trim(&mut self) {
        while self.co.last().map_or(false, |c| c.is_zero()) {
            self.co.pop();
        }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.co
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

    pub fn deg0(&self) -> usize {
        self.degree().expect("degree of the zero relative polynomial")
    }

    pub fn lc(&self) -> Poly {
        self.co.last().cloned().unwrap_or_else(Poly::zero)
    }

    /// Display with z as the relative variable and t as the base generator.
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.co.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = if c.degree() == Some(0) {
                crate::report::q_string(&c.coeff(0))
            } else {
                format!("({})", c.display_with_var("t"))
            };
            let term = match i {
                0 => cs,
                1 if cs == "1" => "z".into(),
                1 => format!("{cs}*z"),
                _ if cs == "1" => format!("z^{i}"),
                _ => format!("{cs}*z^{i}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

impl NumberField {
    pub fn kp_reduce(&self, f: &KPoly) -> KPoly {
        KPoly::from_coeffs(f.co.iter().map(|c| self.reduce(c)).collect())
    }

    pub fn kp_add(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let n = a.co.len().max(b.co.len());
        let mut co = Vec::with_capacity(n);
        for i in 0..n {
            let x = a.co.get(i).cloned().unwrap_or_else(Poly::zero);
            let y = b.co.get(i).cloned().unwrap_or_else(Poly::zero);
            co.push(self.reduce(&x.add(&y)));
        }
        KPoly::from_coeffs(co)
    }

    pub fn kp_sub(&self, a: &KPoly, b: &KPoly) -> KPoly {
        self.kp_add(a, &KPoly::from_coeffs(b.co.iter().map(|c| c.neg()).collect()))
    }

    pub fn kp_mul(&self, a: &KPoly, b: &KPoly) -> KPoly {
        if a.is_zero() || b.is_zero() {
            return KPoly::zero();
        }
        let mut co = vec![Poly::zero(); a.co.len() + b.co.len() - 1];
        for (i, x) in a.co.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.co.iter().enumerate() {
                co[i + j] = co[i + j].add(&x.mul(y));
            }
        }
        KPoly::from_coeffs(co.into_iter().map(|c| self.reduce(&c)).collect())
    }

    /// Scale by an element of K.
    pub fn kp_scale(&self, a: &KPoly, k: &Poly) -> KPoly {
        KPoly::from_coeffs(a.co.iter().map(|c| self.mul_elem(c, k)).collect())
    }

    pub fn kp_monic(&self, a: &KPoly) -> KPoly {
        match a.co.last() {
            None => KPoly::zero(),
            Some(l) if l.degree() == Some(0) && l.coeff(0).is_one() => a.clone(),
            Some(l) => self.kp_scale(a, &self.inv_elem(l)),
        }
    }

    pub fn kp_divrem(&self, a: &KPoly, b: &KPoly) -> (KPoly, KPoly) {
        assert!(!b.is_zero(), "relative division by zero");
        if a.co.len() < b.co.len() {
            return (KPoly::zero(), a.clone());
        }
        let db = b.deg0();
        let lead_inv = self.inv_elem(&b.lc());
        let mut rem = a.co.clone();
        let mut quo = vec![Poly::zero(); a.co.len() - db];
        for i in (db..rem.len()).rev() {
            let c = self.reduce(&rem[i]);
            if c.is_zero() {
                continue;
            }
            let q = self.mul_elem(&c, &lead_inv);
            quo[i - db] = q.clone();
            for (j, bc) in b.co.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = self.reduce(&rem[idx].sub(&q.mul(bc)));
            }
        }
        (KPoly::from_coeffs(quo), KPoly::from_coeffs(rem))
    }

    pub fn kp_rem(&self, a: &KPoly, b: &KPoly) -> KPoly {
        self.kp_divrem(a, b).1
    }

    pub fn kp_gcd(&self, a: &KPoly, b: &KPoly) -> KPoly {
        let mut x = self.kp_reduce(a);
        let mut y = self.kp_reduce(b);
        while !y.is_zero() {
            let r = self.kp_rem(&x, &self.kp_monic(&y));
            x = y;
            y = r;
        }
        self.kp_monic(&x)
    }

    pub fn kp_derivative(&self, a: &KPoly) -> KPoly {
        if a.co.len() <= 1 {
            return KPoly::zero();
        }
        KPoly::from_coeffs(
            a.co.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&qz(i as i64)))
                .collect(),
        )
    }

    /// Evaluate a relative polynomial at an element of K.
    pub fn kp_eval_elem(&self, f: &KPoly, a: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in f.co.iter().rev() {
            acc = self.reduce(&acc.mul(a).add(c));
        }
        acc
    }

    /// Substitute z -> z + c (c an element of K) into a rational polynomial,
    /// producing a relative polynomial over K.
    pub fn kp_shift_of_q_poly(&self, f: &Poly, c: &Poly) -> KPoly {
        let z_plus_c = KPoly::from_coeffs(vec![self.reduce(c), Poly::one()]);
        let mut acc = KPoly::zero();
        for a in f.coeffs().iter().rev() {
            acc = self.kp_mul(&acc, &z_plus_c);
            acc = self.kp_add(&acc, &KPoly::from_coeffs(vec![Poly::constant(a.clone())]));
        }
        acc
    }

    /// Norm form of a monic relative polynomial with the shift s applied:
    /// the characteristic polynomial of (a root of rel) + s * (generator),
    /// computed by evaluating norms at enough integer points and
    /// interpolating.
    fn norm_form(&self, rel: &KPoly, s: i64) -> Poly {
        let n = self.degree;
        let m = rel.deg0();
        let nm = n * m;
        let points: Vec<(Q, Q)> = (0..=nm as i64)
            .map(|t| {
                let at = Poly::from_coeffs(vec![qz(t), qz(-s)]);
                let e = self.kp_eval_elem(rel, &at);
                (qz(t), self.norm_elem(&e))
            })
            .collect();
        let np = poly::interpolate(&points);
        debug_assert_eq!(np.degree(), Some(nm));
        debug_assert!(np.is_monic());
        np
    }

    fn find_squarefree_shift(&self, rel: &KPoly) -> Result<(Poly, i64)> {
        const MAX_SHIFT: i64 = 32;
        for s in 0..=MAX_SHIFT {
            let np = self.norm_form(rel, s);
            if np.is_squarefree() {
                return Ok((np, s));
            }
        }
        Err(Error::ShiftExhausted { max: MAX_SHIFT })
    }

    /// Absolute presentation of K[z]/(rel): a number field of degree
    /// deg(K) * deg(rel). rel must be irreducible over K.
    pub fn absolute_field(&self, rel: &KPoly) -> Result<NumberField> {
        Ok(self.absolute_field_with_shift(rel)?.0)
    }

    /// Same, also reporting the shift s used, so that the root of the new
    /// defining polynomial is (root of rel) + s * (generator of K), up to
    /// the final integral rescale.
    pub fn absolute_field_with_shift(&self, rel: &KPoly) -> Result<(NumberField, i64)> {
        let rel = self.kp_reduce(rel);
        if rel.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if rel.deg0() == 0 {
            return Err(Error::Config(
                "a relative defining polynomial must have degree at least 1".into(),
            ));
        }
        let rel = self.kp_monic(&rel);
        let (np, s) = self.find_squarefree_shift(&rel)?;
        let fac = zzfactor::factor_q(&np)?;
        if fac.len() > 1 {
            return Err(Error::RelativeReducible {
                witness: fac[0].0.display(),
            });
        }
        let def = np.rescale_to_monic_integer();
        Ok((NumberField::new_irreducible(def), s))
    }

    /// Monic irreducible factors of a squarefree monic relative polynomial
    /// over K, by factoring a squarefree norm form over Q and pulling each
    /// rational factor back through a gcd. Sorted deterministically.
    pub fn factor_over(&self, f: &KPoly) -> Result<Vec<KPoly>> {
        let f = self.kp_reduce(f);
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.deg0() == 0 {
            return Ok(Vec::new());
        }
        let f = self.kp_monic(&f);
        let d = self.kp_derivative(&f);
        if self.kp_gcd(&f, &d).deg0() > 0 {
            return Err(Error::NotSquarefree);
        }
        if f.deg0() == 1 {
            return Ok(vec![f]);
        }
        let (np, s) = self.find_squarefree_shift(&f)?;
        let fac = zzfactor::factor_q(&np)?;
        if fac.len() == 1 {
            return Ok(vec![f]);
        }
        let shift_elem = Poly::x().scale(&qz(s));
        let mut out = Vec::new();
        let mut total = 0usize;
        for (ni, _) in &fac {
            let shifted = self.kp_shift_of_q_poly(ni, &shift_elem);
            let h = self.kp_gcd(&f, &shifted);
            let dh = h.deg0();
            assert!(dh >= 1, "norm factor must meet the relative polynomial");
            total += dh;
            out.push(h);
        }
        assert_eq!(total, f.deg0(), "relative factors must multiply back");
        out.sort_by(|a, b| {
            a.deg0()
                .cmp(&b.deg0())
                .then_with(|| a.display().cmp(&b.display()))
        });
        Ok(out)
    }
}

// ---- linear algebra over Q (shared by descent and minimal polynomials) ----

/// Incremental row reduction that reports the first linear dependency.
/// Vectors are inserted one at a time; when an inserted vector is dependent
/// on the earlier ones, the combination (with final coefficient 1) comes
/// back and the span is left unchanged.
pub(crate) struct RowSpan {
    dim: usize,
    pivots: Vec<(usize, Vec<Q>, Vec<Q>)>,
    count: usize,
}

impl RowSpan {
    pub fn new(dim: usize) -> Self {
        RowSpan {
            dim,
            pivots: Vec::new(),
            count: 0,
        }
    }

    pub fn insert(&mut self, mut v: Vec<Q>) -> Option<Vec<Q>> {
        assert_eq!(v.len(), self.dim);
        let mut combo = vec![Q::zero(); self.count + 1];
        combo[self.count] = Q::one();
        for (pc, pv, pcombo) in &self.pivots {
            if v[*pc].is_zero() {
                continue;
            }
            let factor = v[*pc].clone();
            for i in 0..self.dim {
                let d = &factor * &pv[i];
                v[i] = &v[i] - d;
            }
            for (i, c) in pcombo.iter().enumerate() {
                let d = &factor * c;
                combo[i] = &combo[i] - d;
            }
        }
        match v.iter().position(|c| !c.is_zero()) {
            None => {
                // dependent; do not advance count
                Some(combo)
            }
            Some(pc) => {
                let lead = v[pc].clone();
                for c in v.iter_mut() {
                    *c = &*c / &lead;
                }
                for c in combo.iter_mut() {
                    *c = &*c / &lead;
                }
                self.pivots.push((pc, v, combo));
                self.count += 1;
                None
            }
        }
    }
}

/// Solve sum_i x_i * cols_i = target exactly; None when target is outside
/// the span. Columns must be linearly independent.
pub(crate) fn solve_columns(cols: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let dim = target.len();
    let mut span = RowSpan::new(dim);
    for c in cols {
        let dep = span.insert(c.clone());
        assert!(dep.is_none(), "solve_columns needs independent columns");
    }
    span.insert(target.to_vec()).map(|combo| {
        combo[..cols.len()].iter().map(|c| -c.clone()).collect()
    })
}

/// Coefficient vector of an element of K, padded to the field degree.
pub(crate) fn elem_vector(field: &NumberField, a: &Poly) -> Vec<Q> {
    let ar = field.reduce(a);
    let mut v = vec![Q::zero(); field.degree()];
    for (i, c) in ar.coeffs().iter().enumerate() {
        v[i] = c.clone();
    }
    v
}

// ---- subfield towers ----

/// A validated chain Q = F_0 < F_1 < ... < F_k with, for each step, the
/// image of the smaller generator inside the next field.
#[derive(Clone, Debug)]
pub struct SubfieldTower {
    chain: Vec<NumberField>,
    embeddings: Vec<Poly>,
}

impl SubfieldTower {
    pub fn new(chain: Vec<NumberField>, embeddings: Vec<Poly>) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::Config("a tower needs at least one member".into()));
        }
        if chain[0].degree() != 1 {
            return Err(Error::Config("a tower must start at the rationals".into()));
        }
        if embeddings.len() + 1 != chain.len() {
            return Err(Error::Config(
                "a tower needs exactly one embedding per consecutive pair".into(),
            ));
        }
        for w in chain.windows(2) {
            if w[0].degree() >= w[1].degree() || w[1].degree() % w[0].degree() != 0 {
                return Err(Error::Config(
                    "tower degrees must strictly increase and divide".into(),
                ));
            }
        }
        for (i, e) in embeddings.iter().enumerate() {
            let upper = &chain[i + 1];
            let image = upper.reduce(e);
            let val = upper.reduce(&chain[i].defining_poly.compose(&image));
            if !val.is_zero() {
                return Err(Error::InvalidEmbedding);
            }
        }
        Ok(SubfieldTower { chain, embeddings })
    }

    /// The one-member tower over the rationals.
    pub fn rationals_only() -> Self {
        SubfieldTower {
            chain: vec![NumberField::rationals()],
            embeddings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn member(&self, i: usize) -> &NumberField {
        &self.chain[i]
    }

    pub fn members(&self) -> &[NumberField] {
        &self.chain
    }

    pub fn top(&self) -> &NumberField {
        self.chain.last().unwrap()
    }

    pub fn top_index(&self) -> usize {
        self.chain.len() - 1
    }

    /// Image of member i's generator inside member j (i <= j).
    pub fn embed_between(&self, i: usize, j: usize) -> Poly {
        assert!(i <= j);
        if i == j {
            return self.chain[i].reduce(&Poly::x());
        }
        let mut e = self.embeddings[i].clone();
        for k in i + 1..j {
            e = self.chain[k + 1].reduce(&e.compose(&self.embeddings[k]));
        }
        self.chain[j].reduce(&e)
    }

    /// Re-express an element of member i inside member j (i <= j).
    pub fn lift_element(&self, i: usize, j: usize, a: &Poly) -> Poly {
        let e = self.embed_between(i, j);
        self.chain[j].reduce(&a.compose(&e))
    }

    /// Try to write an element of member j as an element of member i
    /// (i <= j); None when it does not lie in the subfield.
    pub fn descend_element(&self, j: usize, i: usize, a: &Poly) -> Option<Poly> {
        assert!(i <= j);
        let upper = &self.chain[j];
        if i == j {
            return Some(upper.reduce(a));
        }
        let e = self.embed_between(i, j);
        let d = self.chain[i].degree();
        let cols: Vec<Vec<Q>> = (0..d)
            .map(|k| elem_vector(upper, &upper.pow_elem(&e, k as u64)))
            .collect();
        let target = elem_vector(upper, a);
        solve_columns(&cols, &target)
            .map(|sol| Poly::from_coeffs(sol))
    }

    /// Coefficient-wise descent of a relative polynomial from member j to
    /// member i; None when any coefficient fails to descend.
    pub fn descend_kpoly(&self, j: usize, i: usize, f: &KPoly) -> Option<KPoly> {
        let mut co = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            co.push(self.descend_element(j, i, c)?);
        }
        Some(KPoly::from_coeffs(co))
    }

    /// Lift a relative polynomial from member i up to member j.
    pub fn lift_kpoly(&self, i: usize, j: usize, f: &KPoly) -> KPoly {
        KPoly::from_coeffs(
            f.coeffs()
                .iter()
                .map(|c| self.lift_element(i, j, c))
                .collect(),
        )
    }

    /// For members with deg(j) = 2 * deg(i): the monic quadratic relation
    /// x^2 + b x + c over member i satisfied by member j's generator.
    /// b and c come back as polynomials in member i's generator.
    pub fn relative_minimal_quadratic(&self, i: usize, j: usize) -> Result<(Poly, Poly)> {
        let di = self.chain[i].degree();
        let dj = self.chain[j].degree();
        if dj != 2 * di {
            return Err(Error::Config(
                "quadratic relation needs an index-2 pair".into(),
            ));
        }
        let upper = &self.chain[j];
        let e = self.embed_between(i, j);
        let mut cols = Vec::with_capacity(2 * di);
        for a in 0..di {
            cols.push(elem_vector(upper, &upper.pow_elem(&e, a as u64)));
        }
        let g = Poly::x();
        for a in 0..di {
            let ea = upper.pow_elem(&e, a as u64);
            cols.push(elem_vector(upper, &upper.mul_elem(&ea, &g)));
        }
        let target = elem_vector(upper, &upper.mul_elem(&g, &g));
        let sol = solve_columns(&cols, &target)
            .expect("generator powers span the field");
        let u = Poly::from_coeffs(sol[..di].to_vec());
        let v = Poly::from_coeffs(sol[di..].to_vec());
        Ok((v.neg(), u.neg()))
    }
}

/// Outcome of scanning a tower for a CM pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmDetection {
    /// chain[complex_index] is totally complex of degree 2 over the
    /// totally real chain[real_index].
    Witness {
        complex_index: usize,
        real_index: usize,
    },
    NoCmAmongListed,
}

/// Scan the (already validated) tower for a totally complex member that is
/// quadratic over a totally real member. Completeness is the caller's
/// responsibility: only listed members are examined.
pub fn detect_cm_subfield(tower: &SubfieldTower) -> CmDetection {
    if tower.top().degree() % 2 == 1 {
        return CmDetection::NoCmAmongListed;
    }
    for j in 0..tower.len() {
        let m = tower.member(j);
        if !m.is_totally_complex() || m.degree() % 2 != 0 {
            continue;
        }
        for i in 0..j {
            let e = tower.member(i);
            if e.is_totally_real() && 2 * e.degree() == m.degree() {
                return CmDetection::Witness {
                    complex_index: j,
                    real_index: i,
                };
            }
        }
    }
    CmDetection::NoCmAmongListed
}

fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = Poly::one();
    let mut s1 = Poly::zero();
    let mut t0 = Poly::zero();
    let mut t1 = Poly::one();
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    (r0, s0, t0)
}

trait ModFloorExt {
    fn mod_floor(&self, m: &BigInt) -> BigInt;
}

impl ModFloorExt for BigInt {
    fn mod_floor(&self, m: &BigInt) -> BigInt {
        num::Integer::mod_floor(self, m)
    }
}
