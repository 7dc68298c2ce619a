//! Punctured genus-0 curves over a number field.
//!
//! A curve here is P^1 over a base field K minus a Galois-stable set of
//! punctures, described by a squarefree divisor polynomial over K plus an
//! optional point at infinity. The punctures decompose into Galois orbits
//! (irreducible factors over K), each carrying its residue field in
//! absolute form. The generalized Jacobian of such a curve is a torus
//! whose dimension and Mordell-Weil-style rank over the S-integers are
//! computed two independent ways:
//!
//! * directly, from Dirichlet S-unit ranks of the residue fields, and
//! * in orbit form, assembling the rank from orbit counts place by place
//!   (finite places through splitting profiles, infinite places through
//!   signatures).
//!
//! The two must agree; disagreement means a bug upstream, which is why
//! both are kept.

use crate::error::{Error, Result};
use crate::numfield::{KPoly, NumberField, SSpec};
use crate::poly::{Poly, Q};
use crate::primes::is_prime;
use num::{One, Signed, Zero};

/// One Galois orbit of punctures: an irreducible factor of the divisor
/// polynomial (or the point at infinity), with its residue field realized
/// as an absolute number field.
#[derive(Clone, Debug)]
pub struct PunctureOrbit {
    /// None marks the point at infinity.
    pub relative_poly: Option<KPoly>,
    pub residue_field: NumberField,
    pub degree: usize,
}

impl PunctureOrbit {
    pub fn is_infinity(&self) -> bool {
        self.relative_poly.is_none()
    }
}

/// P^1 over `base` minus the orbits' punctures, with the S-integer
/// structure given by `s_spec`.
#[derive(Clone, Debug)]
pub struct PuncturedCurve {
    base: NumberField,
    s_spec: SSpec,
    orbits: Vec<PunctureOrbit>,
    label: String,
}

impl PuncturedCurve {
    pub fn new(
        base: NumberField,
        s_spec: SSpec,
        orbits: Vec<PunctureOrbit>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if orbits.is_empty() {
            return Err(Error::Config("a curve needs at least one puncture".into()));
        }
        let total: usize = orbits.iter().map(|o| o.degree).sum();
        if total < 2 {
            return Err(Error::Config(
                "a punctured curve needs at least 2 geometric punctures".into(),
            ));
        }
        for o in &orbits {
            let expect = match &o.relative_poly {
                None => 1,
                Some(f) => f.deg0(),
            };
            if o.degree != expect || o.residue_field.degree() != base.degree() * o.degree {
                return Err(Error::Config("inconsistent orbit data".into()));
            }
        }
        Ok(PuncturedCurve {
            base,
            s_spec,
            orbits,
            label: label.into(),
        })
    }

    pub fn base(&self) -> &NumberField {
        &self.base
    }

    pub fn s_spec(&self) -> &SSpec {
        &self.s_spec
    }

    pub fn orbits(&self) -> &[PunctureOrbit] {
        &self.orbits
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Total geometric puncture count over the algebraic closure.
    pub fn geometric_punctures(&self) -> usize {
        self.orbits.iter().map(|o| o.degree).sum()
    }

    pub fn has_infinity(&self) -> bool {
        self.orbits.iter().any(|o| o.is_infinity())
    }

    /// Product of the finite orbit polynomials (the divisor polynomial).
    pub fn divisor_product(&self) -> KPoly {
        let mut acc = KPoly::one();
        for o in &self.orbits {
            if let Some(f) = &o.relative_poly {
                acc = self.base.kp_mul(&acc, f);
            }
        }
        acc
    }

    /// Canonical content string for hashing and display.
    pub fn content_key(&self) -> String {
        let mut parts = vec![format!(
            "base={:?}",
            self.base.defining_poly().coeff_strings()
        )];
        let primes: Vec<String> = self.s_spec.primes().map(|p| p.to_string()).collect();
        parts.push(format!("s0=[{}]", primes.join(",")));
        for o in &self.orbits {
            match &o.relative_poly {
                None => parts.push("orbit=infinity".into()),
                Some(f) => {
                    let cs: Vec<String> = f
                        .coeffs()
                        .iter()
                        .map(|c| c.coeff_strings().join(":"))
                        .collect();
                    parts.push(format!("orbit=[{}]", cs.join(";")));
                }
            }
        }
        parts.join("|")
    }
}

/// Factor a squarefree divisor polynomial over the base into puncture
/// orbits, building residue fields along the way.
pub fn puncture_orbits(
    base: &NumberField,
    divisor: &KPoly,
    include_infinity: bool,
) -> Result<Vec<PunctureOrbit>> {
    let factors = match base.factor_over(divisor) {
        Ok(f) => f,
        Err(Error::NotSquarefree) => return Err(Error::NotSquarefree),
        Err(Error::ShiftExhausted { max }) => {
            return Err(Error::RelativeFactorizationFailed {
                detail: format!("no squarefree norm shift up to {max}"),
            })
        }
        Err(e) => return Err(e),
    };
    let mut orbits = Vec::new();
    for f in factors {
        let degree = f.deg0();
        let residue_field = if degree == 1 {
            base.clone()
        } else {
            match base.absolute_field(&f) {
                Ok(rf) => rf,
                Err(Error::ShiftExhausted { max }) => {
                    return Err(Error::RelativeFactorizationFailed {
                        detail: format!(
                            "residue field of {} needs a shift beyond {max}",
                            f.display()
                        ),
                    })
                }
                Err(e) => return Err(e),
            }
        };
        orbits.push(PunctureOrbit {
            relative_poly: Some(f),
            residue_field,
            degree,
        });
    }
    if include_infinity {
        orbits.push(PunctureOrbit {
            relative_poly: None,
            residue_field: base.clone(),
            degree: 1,
        });
    }
    Ok(orbits)
}

/// Dimension, rank, and per-orbit data of the generalized Jacobian torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenJacobianProfile {
    pub dim: usize,
    pub rank: usize,
    pub per_orbit: Vec<OrbitRank>,
    /// Populated only by the orbit-form computation.
    pub place_counts: Vec<PlaceCount>,
}

/// Rank data of one orbit's residue field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRank {
    pub degree: usize,
    pub residue_signature: (usize, usize),
    pub s_unit_rank: usize,
    pub places_above_s: Vec<(u64, usize)>,
}

/// Orbit counts at one place class of the base, before the per-place -1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceCount {
    pub place: String,
    pub total_orbits: usize,
    pub base_places: usize,
}

fn orbit_rank_data(curve: &PuncturedCurve, orbit: &PunctureOrbit) -> Result<OrbitRank> {
    let rf = &orbit.residue_field;
    let mut places = Vec::new();
    for p in curve.s_spec().primes() {
        places.push((p, rf.places_above(p)?));
    }
    Ok(OrbitRank {
        degree: orbit.degree,
        residue_signature: rf.signature(),
        s_unit_rank: rf.s_unit_rank(curve.s_spec())?,
        places_above_s: places,
    })
}

/// Profile via Dirichlet ranks: rank = sum of residue-field S-unit ranks
/// minus the base's S-unit rank; dim = total punctures - 1.
pub fn jacobian_profile(curve: &PuncturedCurve) -> Result<GenJacobianProfile> {
    let dim = curve.geometric_punctures() - 1;
    let base_rank = curve.base().s_unit_rank(curve.s_spec())? as i64;
    let mut per_orbit = Vec::new();
    let mut total = 0i64;
    for o in curve.orbits() {
        let data = orbit_rank_data(curve, o)?;
        total += data.s_unit_rank as i64;
        per_orbit.push(data);
    }
    let rank = total - base_rank;
    assert!(rank >= 0, "residue ranks dominate the base rank");
    Ok(GenJacobianProfile {
        dim,
        rank: rank as usize,
        per_orbit,
        place_counts: Vec::new(),
    })
}

/// Profile assembled place by place from orbit counts: rank =
/// -(orbits - 1) + sum over places v of (orbits over v - 1), with finite
/// places read off splitting profiles and infinite places read off
/// signatures.
pub fn jacobian_profile_orbit_form(curve: &PuncturedCurve) -> Result<GenJacobianProfile> {
    let base = curve.base();
    let (r1k, r2k) = base.signature();
    let total_punctures = curve.geometric_punctures();
    let dim = total_punctures - 1;
    let c = curve.orbits().len();

    let mut per_orbit = Vec::new();
    for o in curve.orbits() {
        per_orbit.push(orbit_rank_data(curve, o)?);
    }

    let mut rank: i64 = -((c as i64) - 1);
    let mut place_counts = Vec::new();

    for p in curve.s_spec().primes() {
        let base_places = base.places_above(p)?;
        let mut total_orbits = 0usize;
        for o in curve.orbits() {
            total_orbits += o.residue_field.places_above(p)?;
        }
        rank += total_orbits as i64 - base_places as i64;
        place_counts.push(PlaceCount {
            place: p.to_string(),
            total_orbits,
            base_places,
        });
    }

    // real places of the base: the infinite places of each residue field
    // not lying over a complex place of the base
    if r1k > 0 {
        let mut total_orbits = 0usize;
        for o in curve.orbits() {
            let (r1, r2) = o.residue_field.signature();
            let over_complex = r2k * o.degree;
            assert!(r1 + r2 >= over_complex);
            total_orbits += r1 + r2 - over_complex;
        }
        rank += total_orbits as i64 - r1k as i64;
        place_counts.push(PlaceCount {
            place: "infinity (real)".into(),
            total_orbits,
            base_places: r1k,
        });
    }

    // complex places of the base: every geometric puncture is its own orbit
    if r2k > 0 {
        let total_orbits = r2k * total_punctures;
        rank += total_orbits as i64 - r2k as i64;
        place_counts.push(PlaceCount {
            place: "infinity (complex)".into(),
            total_orbits,
            base_places: r2k,
        });
    }

    assert!(rank >= 0, "orbit-form rank must be nonnegative");
    Ok(GenJacobianProfile {
        dim,
        rank: rank as usize,
        per_orbit,
        place_counts,
    })
}

/// A curve built from the Kummer data (alpha, q), routed to the
/// cyclotomic shape when alpha is a qth power in the base.
#[derive(Clone, Debug)]
pub struct KummerCurve {
    pub curve: PuncturedCurve,
    pub q: u64,
    pub alpha: Poly,
    /// True when the divisor is (x^q - 1)/(x - 1) rather than x^q - alpha.
    pub routed_to_one: bool,
}

fn rational_prime_support(x: &Q) -> Vec<u64> {
    let mut support = Vec::new();
    for part in [x.numer().abs(), x.denom().abs()] {
        let mut n = part;
        let mut p = num::BigInt::from(2u32);
        while (&p * &p) <= n {
            if (&n % &p).is_zero() {
                let pu: u64 = (&p).try_into().expect("support primes fit in u64");
                if !support.contains(&pu) {
                    support.push(pu);
                }
                while (&n % &p).is_zero() {
                    n = &n / &p;
                }
            }
            p += 1;
        }
        if n > num::BigInt::one() {
            let pu: u64 = (&n).try_into().expect("support primes fit in u64");
            if !support.contains(&pu) {
                support.push(pu);
            }
        }
    }
    support.sort();
    support
}

/// Verify the S-unit property by checking the norm's prime support.
pub fn check_s_unit(base: &NumberField, alpha: &Poly, s_spec: &SSpec) -> Result<()> {
    let n = base.norm_elem(alpha);
    if n.is_zero() {
        return Err(Error::NotAnSUnit {
            detail: "zero is not an S-unit".into(),
        });
    }
    for p in rational_prime_support(&n) {
        if !s_spec.contains(p) {
            return Err(Error::NotAnSUnit {
                detail: format!("norm has prime factor {p} outside S0"),
            });
        }
    }
    Ok(())
}

/// Build the Kummer curve for (alpha, q): divisor x^q - alpha, or the
/// cyclotomic divisor (x^q - 1)/(x - 1) when alpha is a qth power.
pub fn build_x_alpha_q(
    base: &NumberField,
    s_spec: &SSpec,
    alpha: &Poly,
    q: u64,
) -> Result<KummerCurve> {
    if !is_prime(q) {
        return Err(Error::QNotPrime { q });
    }
    let alpha = base.reduce(alpha);
    check_s_unit(base, &alpha, s_spec)?;

    // root extraction on x^q - alpha
    let mut kummer_co = vec![Poly::zero(); q as usize + 1];
    kummer_co[0] = alpha.neg();
    kummer_co[q as usize] = Poly::one();
    let kummer = KPoly::from_coeffs(kummer_co);
    let has_root = base
        .factor_over(&kummer)?
        .iter()
        .any(|f| f.deg0() == 1);

    let (divisor, routed_to_one, label) = if has_root {
        let ones = KPoly::from_q_poly(&Poly::from_coeffs(vec![Q::one(); q as usize]));
        (ones, true, format!("X_(1,{q}) over {}", base.label()))
    } else {
        (
            kummer,
            false,
            format!("X_(alpha,{q}) over {}, alpha = {}", base.label(), alpha.display()),
        )
    };
    let orbits = puncture_orbits(base, &divisor, false)?;
    let curve = PuncturedCurve::new(base.clone(), s_spec.clone(), orbits, label)?;
    Ok(KummerCurve {
        curve,
        q,
        alpha,
        routed_to_one,
    })
}

/// Convenience: P^1 over the base minus the roots of `divisor` (given over
/// the base) and optionally infinity.
pub fn curve_from_divisor(
    base: &NumberField,
    s_spec: &SSpec,
    divisor: &KPoly,
    include_infinity: bool,
    label: impl Into<String>,
) -> Result<PuncturedCurve> {
    let orbits = puncture_orbits(base, divisor, include_infinity)?;
    PuncturedCurve::new(base.clone(), s_spec.clone(), orbits, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::parse_number_field;

    fn qq() -> NumberField {
        NumberField::rationals()
    }

    fn kp_int(co: &[i64]) -> KPoly {
        KPoly::from_q_poly(&Poly::from_int(co))
    }

    #[test]
    fn orbit_decomposition_sqrt2() {
        let orbits = puncture_orbits(&qq(), &kp_int(&[-2, 0, 1]), true).unwrap();
        assert_eq!(orbits.len(), 2);
        assert_eq!(orbits[0].degree, 2);
        assert_eq!(orbits[0].residue_field.signature(), (2, 0));
        assert!(orbits[1].is_infinity());
        assert_eq!(orbits[1].degree, 1);
    }

    #[test]
    fn orbit_decomposition_three_rational() {
        // x(x-1) plus infinity
        let orbits = puncture_orbits(&qq(), &kp_int(&[0, -1, 1]).clone(), true).unwrap();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().all(|o| o.degree == 1));
    }

    #[test]
    fn orbit_decomposition_cyclotomic_over_gaussian() {
        let gi = parse_number_field(&[1, 0, 1]).unwrap();
        let orbits = puncture_orbits(&gi, &kp_int(&[1, 1, 1, 1, 1]), false).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].degree, 4);
        assert_eq!(orbits[0].residue_field.degree(), 8);
    }

    #[test]
    fn repeated_punctures_rejected() {
        assert!(matches!(
            puncture_orbits(&qq(), &kp_int(&[0, 0, 1]), true),
            Err(Error::NotSquarefree)
        ));
    }

    fn profile_both(curve: &PuncturedCurve) -> (usize, usize) {
        let a = jacobian_profile(curve).unwrap();
        let b = jacobian_profile_orbit_form(curve).unwrap();
        assert_eq!((a.dim, a.rank), (b.dim, b.rank), "profile forms disagree");
        (a.dim, a.rank)
    }

    #[test]
    fn profile_zero_one_infinity() {
        let c = curve_from_divisor(
            &qq(),
            &SSpec::empty(),
            &kp_int(&[0, -1, 1]),
            true,
            "P1 minus {0,1,inf}",
        )
        .unwrap();
        assert_eq!(profile_both(&c), (2, 0));
    }

    #[test]
    fn profile_pm_sqrt2() {
        let c = curve_from_divisor(
            &qq(),
            &SSpec::empty(),
            &kp_int(&[-2, 0, 1]),
            true,
            "P1 minus {sqrt2, -sqrt2, inf}",
        )
        .unwrap();
        assert_eq!(profile_both(&c), (2, 1));
    }

    #[test]
    fn profile_x_one_five() {
        let c = curve_from_divisor(
            &qq(),
            &SSpec::empty(),
            &kp_int(&[1, 1, 1, 1, 1]),
            false,
            "X_(1,5) over Q",
        )
        .unwrap();
        assert_eq!(profile_both(&c), (3, 1));
    }

    #[test]
    fn rank_monotone_in_s() {
        let div = kp_int(&[-2, 0, 1]);
        let mut last = 0usize;
        for s in [vec![], vec![7], vec![7, 17]] {
            let c = curve_from_divisor(
                &qq(),
                &SSpec::new(s).unwrap(),
                &div,
                true,
                "growth test",
            )
            .unwrap();
            let (_, r) = profile_both(&c);
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn kummer_shapes() {
        let k = build_x_alpha_q(&qq(), &SSpec::empty(), &Poly::one(), 5).unwrap();
        assert!(k.routed_to_one);
        assert_eq!(k.curve.orbits().len(), 1);
        assert_eq!(profile_both(&k.curve), (3, 1));

        let s2 = SSpec::new([2]).unwrap();
        let k2 = build_x_alpha_q(&qq(), &s2, &Poly::from_int(&[2]), 3).unwrap();
        assert!(!k2.routed_to_one);
        assert_eq!(k2.curve.geometric_punctures(), 3);
        // 2 divides disc(x^3 - 2), so splitting above 2 is refused
        assert!(matches!(
            jacobian_profile(&k2.curve),
            Err(Error::IndexObstruction { p: 2 })
        ));

        let k8 = build_x_alpha_q(&qq(), &s2, &Poly::from_int(&[8]), 3).unwrap();
        assert!(k8.routed_to_one, "8 is a cube");
        assert_eq!(profile_both(&k8.curve), (1, 0));
    }

    #[test]
    fn s_unit_gatekeeping() {
        assert!(matches!(
            build_x_alpha_q(&qq(), &SSpec::empty(), &Poly::from_int(&[2]), 3),
            Err(Error::NotAnSUnit { .. })
        ));
        assert!(matches!(
            build_x_alpha_q(&qq(), &SSpec::empty(), &Poly::zero(), 3),
            Err(Error::NotAnSUnit { .. })
        ));
        assert!(matches!(
            build_x_alpha_q(&qq(), &SSpec::empty(), &Poly::one(), 4),
            Err(Error::QNotPrime { q: 4 })
        ));
    }

    #[test]
    fn gaussian_base_profiles() {
        // P^1 over Q(i) minus the 5th roots of unity shape
        let gi = parse_number_field(&[1, 0, 1]).unwrap();
        let c = curve_from_divisor(
            &gi,
            &SSpec::empty(),
            &kp_int(&[1, 1, 1, 1, 1]),
            false,
            "X_(1,5) over Q(i)",
        )
        .unwrap();
        let (dim, rank) = profile_both(&c);
        assert_eq!(dim, 3);
        // residue field degree 8, totally complex: rank = (0+4-1) - (0+1-1) = 3
        assert_eq!(rank, 3);
    }
}
