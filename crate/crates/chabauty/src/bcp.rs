//! Subtorus bookkeeping for restriction-of-scalars obstructions.
//!
//! A punctured line over a tower member has a generalized Jacobian that is
//! a product of norm-restriction tori cut down by one diagonal. Two kinds
//! of moves produce smaller ambient tori for the same curve: descending
//! the puncture divisor to a lower tower member, and passing to a curve
//! with fewer punctures (which freezes the forgotten factors). Chains of
//! such moves, their isogeny classes, a per-step rank-deficiency ledger,
//! and the resulting obstruction verdicts all live here.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::numfield::{NumberField, SSpec, SubfieldTower};
use crate::poly::{Q, Z};
use crate::puncture::{curve_from_divisor, jacobian_profile, PuncturedCurve};

/// One norm-restriction factor of a torus, recorded with its absolute
/// dimension and the rank of its S-integer points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TorusFactor {
    pub dim: usize,
    pub rank: usize,
    pub label: String,
}

impl TorusFactor {
    fn of_field(f: &NumberField, s: &SSpec) -> Result<TorusFactor> {
        Ok(TorusFactor {
            dim: f.degree(),
            rank: f.s_unit_rank(s)?,
            label: f.label().to_string(),
        })
    }

    pub fn display(&self) -> String {
        if self.dim == 1 {
            format!("Gm over {}", self.label)
        } else {
            format!("Res({}) Gm", self.label)
        }
    }
}

/// A factor whose exact rank is not computed: the two pieces produced by a
/// symbolic quotient move.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolicFactor {
    pub dim: usize,
    pub label: String,
}

/// Canonical isogeny-class data of a subtorus: a sorted multiset of
/// factors, a leftover subtracted diagonal when it does not cancel against
/// an equal factor, and any symbolic quotient pieces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct IsogenyClass {
    pub factors: Vec<TorusFactor>,
    pub minus: Vec<TorusFactor>,
    pub symbolic: Vec<SymbolicFactor>,
}

fn sort_factors(v: &mut [TorusFactor]) {
    v.sort_by(|a, b| {
        b.dim
            .cmp(&a.dim)
            .then_with(|| a.label.cmp(&b.label))
            .then_with(|| b.rank.cmp(&a.rank))
    });
}

impl IsogenyClass {
    fn assemble(
        mut factors: Vec<TorusFactor>,
        minus_in: Vec<TorusFactor>,
        mut symbolic: Vec<SymbolicFactor>,
    ) -> IsogenyClass {
        let mut minus = Vec::new();
        for m in minus_in {
            if let Some(i) = factors.iter().position(|f| *f == m) {
                factors.remove(i);
            } else {
                minus.push(m);
            }
        }
        sort_factors(&mut factors);
        sort_factors(&mut minus);
        symbolic.sort();
        IsogenyClass {
            factors,
            minus,
            symbolic,
        }
    }

    /// Absolute dimension, counting symbolic pieces.
    pub fn dim(&self) -> i64 {
        let plus: i64 = self.factors.iter().map(|f| f.dim as i64).sum();
        let sym: i64 = self.symbolic.iter().map(|s| s.dim as i64).sum();
        let neg: i64 = self.minus.iter().map(|f| f.dim as i64).sum();
        plus + sym - neg
    }

    /// Rank of the integral points of the non-symbolic part. Exact exactly
    /// when `rank_exact` holds.
    pub fn rank(&self) -> i64 {
        let plus: i64 = self.factors.iter().map(|f| f.rank as i64).sum();
        let neg: i64 = self.minus.iter().map(|f| f.rank as i64).sum();
        plus - neg
    }

    pub fn rank_exact(&self) -> bool {
        self.symbolic.is_empty()
    }

    /// Factor labels in canonical display order (largest dimension first).
    pub fn factor_labels(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.label.clone()).collect()
    }

    pub fn display(&self) -> String {
        let mut parts: Vec<String> = self.factors.iter().map(|f| f.display()).collect();
        parts.extend(
            self.symbolic
                .iter()
                .map(|s| format!("[{}, dim {}]", s.label, s.dim)),
        );
        let mut out = parts.join(" + ");
        if out.is_empty() {
            out = "0".to_string();
        }
        for m in &self.minus {
            out.push_str(" - ");
            out.push_str(&m.display());
        }
        out
    }
}

/// A single chain move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BcpMove {
    /// Descend the running curve's divisor to a lower tower member.
    Bc { target: usize },
    /// Keep only these orbit indices of the running curve; the forgotten
    /// orbits become fixed factors of the torus.
    Forget { retained: Vec<usize> },
    /// Symbolic quotient of a single-orbit curve by a degree-delta map of
    /// the line, totally ramified away from the punctures.
    Quotient { delta: u64 },
}

/// One recorded step with its contribution to the class and the ledger.
#[derive(Clone, Debug)]
pub struct BcpStep {
    pub mv: BcpMove,
    pub member_after: usize,
    /// Factors frozen by a forget move.
    pub prym: Vec<TorusFactor>,
    /// Pieces added by a quotient move.
    pub symbolic: Vec<SymbolicFactor>,
    /// This step's rank-deficiency contribution.
    pub delta: i64,
}

/// A chain of moves out of an origin curve. The running curve and member
/// track where the divisor currently lives; `prym` accumulates factors
/// frozen by forget moves.
#[derive(Clone, Debug)]
pub struct BcpChain {
    tower: SubfieldTower,
    origin: PuncturedCurve,
    origin_member: usize,
    steps: Vec<BcpStep>,
    member: usize,
    curve: PuncturedCurve,
    prym: Vec<TorusFactor>,
    symbolic: Vec<SymbolicFactor>,
    terminal: bool,
}

impl BcpChain {
    /// Start a chain at a curve whose base is a tower member. The curve is
    /// rebuilt over the member itself so labels stay canonical.
    pub fn origin(curve: &PuncturedCurve, tower: &SubfieldTower) -> Result<BcpChain> {
        let member = tower
            .members()
            .iter()
            .position(|m| m.same_presentation(curve.base()))
            .ok_or_else(|| Error::Config("curve base is not a tower member".into()))?;
        let curve = curve_from_divisor(
            tower.member(member),
            curve.s_spec(),
            &curve.divisor_product(),
            curve.has_infinity(),
            curve.label(),
        )?;
        Ok(BcpChain {
            tower: tower.clone(),
            origin: curve.clone(),
            origin_member: member,
            steps: Vec::new(),
            member,
            curve,
            prym: Vec::new(),
            symbolic: Vec::new(),
            terminal: false,
        })
    }

    pub fn n(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[BcpStep] {
        &self.steps
    }

    pub fn tower(&self) -> &SubfieldTower {
        &self.tower
    }

    pub fn origin_curve(&self) -> &PuncturedCurve {
        &self.origin
    }

    pub fn origin_member(&self) -> usize {
        self.origin_member
    }

    pub fn current_curve(&self) -> &PuncturedCurve {
        &self.curve
    }

    pub fn current_member(&self) -> usize {
        self.member
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Degree over the rationals of the member the chain has reached; the
    /// intersection of the torus with the curve's image has at most this
    /// dimension.
    pub fn intersection_dim(&self) -> usize {
        self.tower.member(self.member).degree()
    }

    /// The isogeny class of the torus this chain describes: frozen factors
    /// plus the full Jacobian class of the running curve.
    pub fn result(&self) -> Result<IsogenyClass> {
        let mut factors = self.prym.clone();
        let mut minus = Vec::new();
        if !self.terminal {
            let s = self.curve.s_spec();
            for o in self.curve.orbits() {
                factors.push(TorusFactor::of_field(&o.residue_field, s)?);
            }
            minus.push(TorusFactor::of_field(self.tower.member(self.member), s)?);
        }
        Ok(IsogenyClass::assemble(
            factors,
            minus,
            self.symbolic.clone(),
        ))
    }

    /// Rebuild the chain from the origin and recorded moves, returning the
    /// replayed class. Used to check that incremental state never drifts.
    pub fn replay(&self) -> Result<IsogenyClass> {
        let mut c = BcpChain::origin(&self.origin, &self.tower)?;
        for s in &self.steps {
            c = match &s.mv {
                BcpMove::Bc { target } => bc_successor(&c, *target)?,
                mv => p_successor(&c, mv.clone())?,
            };
        }
        c.result()
    }
}

/// Append a base-change step: descend the running divisor to the target
/// member and refactor it there. Conjugate orbits may merge. Factors
/// frozen by earlier forget moves are untouched; only the running curve
/// moves.
pub fn bc_successor(chain: &BcpChain, target: usize) -> Result<BcpChain> {
    if chain.terminal {
        return Err(Error::Config(
            "chain already closed by a quotient move".into(),
        ));
    }
    if target >= chain.tower.len() {
        return Err(Error::Config("tower member index out of range".into()));
    }
    if target > chain.member {
        return Err(Error::Config(
            "base change must stay at or below the current member".into(),
        ));
    }
    let div = chain.curve.divisor_product();
    let descended = match chain.tower.descend_kpoly(chain.member, target, &div) {
        Some(d) => d,
        None => {
            // name an orbit that fails on its own, falling back to the
            // whole divisor when only the product misbehaves
            let mut witness = String::from("divisor");
            for o in chain.curve.orbits() {
                if let Some(f) = &o.relative_poly {
                    if chain.tower.descend_kpoly(chain.member, target, f).is_none() {
                        witness = f.display();
                        break;
                    }
                }
            }
            return Err(Error::NotDescendable { orbit: witness });
        }
    };
    let label = format!(
        "{} over {}",
        chain.origin.label(),
        chain.tower.member(target).label()
    );
    let curve = curve_from_divisor(
        chain.tower.member(target),
        chain.curve.s_spec(),
        &descended,
        chain.curve.has_infinity(),
        label,
    )?;
    let mut next = chain.clone();
    next.member = target;
    next.curve = curve;
    next.steps.push(BcpStep {
        mv: BcpMove::Bc { target },
        member_after: target,
        prym: Vec::new(),
        symbolic: Vec::new(),
        delta: 0,
    });
    Ok(next)
}

/// Append a cover step: either forget some puncture orbits (freezing their
/// factors) or take a symbolic quotient of a single-orbit curve.
pub fn p_successor(chain: &BcpChain, mv: BcpMove) -> Result<BcpChain> {
    if chain.terminal {
        return Err(Error::Config(
            "chain already closed by a quotient move".into(),
        ));
    }
    match mv {
        BcpMove::Bc { .. } => Err(Error::Config(
            "base change is not a cover move; use bc_successor".into(),
        )),
        BcpMove::Forget { retained } => {
            let n = chain.curve.orbits().len();
            let set: BTreeSet<usize> = retained.iter().copied().collect();
            if set.is_empty()
                || set.len() != retained.len()
                || set.len() >= n
                || set.iter().any(|&i| i >= n)
            {
                return Err(Error::InvalidCoverMove);
            }
            let kept: Vec<_> = chain
                .curve
                .orbits()
                .iter()
                .enumerate()
                .filter(|(i, _)| set.contains(i))
                .map(|(_, o)| o.clone())
                .collect();
            let kept_degree: usize = kept.iter().map(|o| o.degree).sum();
            if kept_degree < 2 {
                return Err(Error::InvalidCoverMove);
            }
            let s = chain.curve.s_spec().clone();
            let mut prym = Vec::new();
            for (i, o) in chain.curve.orbits().iter().enumerate() {
                if !set.contains(&i) {
                    prym.push(TorusFactor::of_field(&o.residue_field, &s)?);
                }
            }
            let delta: i64 = prym.iter().map(|f| f.dim as i64 - f.rank as i64).sum();
            let label = format!("{} (sub-divisor)", chain.curve.label());
            let curve =
                PuncturedCurve::new(chain.tower.member(chain.member).clone(), s, kept, label)?;
            let retained_sorted: Vec<usize> = set.into_iter().collect();
            let mut next = chain.clone();
            next.curve = curve;
            next.prym.extend(prym.iter().cloned());
            next.steps.push(BcpStep {
                mv: BcpMove::Forget {
                    retained: retained_sorted,
                },
                member_after: chain.member,
                prym,
                symbolic: Vec::new(),
                delta,
            });
            Ok(next)
        }
        BcpMove::Quotient { delta } => {
            if chain.curve.orbits().len() != 1 {
                return Err(Error::Config(
                    "quotient move needs a single puncture orbit".into(),
                ));
            }
            if delta == 0 {
                return Err(Error::Config("quotient parameter must be positive".into()));
            }
            let n_gamma = chain.curve.geometric_punctures() as u64;
            if n_gamma % delta != 0 {
                return Err(Error::DeltaDoesNotDivide {
                    delta,
                    punctures: n_gamma,
                });
            }
            if delta == 1 {
                // an isomorphism: record a no-op step
                let mut next = chain.clone();
                next.steps.push(BcpStep {
                    mv: BcpMove::Quotient { delta },
                    member_after: chain.member,
                    prym: Vec::new(),
                    symbolic: Vec::new(),
                    delta: 0,
                });
                return Ok(next);
            }
            if n_gamma / delta < 2 {
                // the image would keep a single puncture, forcing extra
                // total ramification a degree-delta map of the line lacks
                return Err(Error::RiemannHurwitzViolation { delta });
            }
            let member = chain.tower.member(chain.member);
            let d = member.degree() as u64;
            let profile = jacobian_profile(&chain.curve)?;
            let rank_gm = member.s_unit_rank(chain.curve.s_spec())? as i64;
            let (_, bound) = cover_rank_gap(n_gamma, profile.rank as i64, rank_gm, d, delta)?;
            let step_delta = ceil_q(&bound);
            let kernel_dim = (d as usize) * (((delta - 1) * n_gamma / delta) as usize);
            let image_dim = (d as usize) * ((n_gamma / delta - 1) as usize);
            let symbolic = vec![
                SymbolicFactor {
                    dim: image_dim,
                    label: format!("image Jacobian (delta = {delta})"),
                },
                SymbolicFactor {
                    dim: kernel_dim,
                    label: format!("quotient kernel piece (delta = {delta})"),
                },
            ];
            let mut next = chain.clone();
            next.terminal = true;
            next.symbolic.extend(symbolic.iter().cloned());
            next.steps.push(BcpStep {
                mv: BcpMove::Quotient { delta },
                member_after: chain.member,
                prym: Vec::new(),
                symbolic,
                delta: step_delta,
            });
            Ok(next)
        }
    }
}

fn ceil_q(q: &Q) -> i64 {
    i64::try_from(q.ceil().to_integer()).expect("ledger bounds stay small")
}

/// The rank gap of a degree-d member under a degree-delta quotient of an
/// n-puncture single-orbit curve: the difference between the ambient
/// dimension and the known rank contributions, and the fraction of it the
/// quotient is guaranteed to keep.
///
/// Returns `(gap, bound)` where `gap = d * n_gamma1 - (rank_j1 +
/// rank_gm_r + 1)` and `bound = (delta - 1) / delta * gap` as an exact
/// rational.
pub fn cover_rank_gap(
    n_gamma1: u64,
    rank_j1: i64,
    rank_gm_r: i64,
    d: u64,
    delta: u64,
) -> Result<(i64, Q)> {
    if delta == 0 {
        return Err(Error::Config("delta must be positive".into()));
    }
    if n_gamma1 % delta != 0 {
        return Err(Error::DeltaDoesNotDivide {
            delta,
            punctures: n_gamma1,
        });
    }
    let gap = d as i64 * n_gamma1 as i64 - (rank_j1 + rank_gm_r + 1);
    let bound = Q::new(Z::from(gap) * Z::from(delta - 1), Z::from(delta));
    Ok((gap, bound))
}

/// Per-step rank-deficiency records for a chain, deepest state first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaLedger {
    /// The deepest state's deficiency, then one entry per step walking
    /// back toward the origin. Base-change entries are exactly 0.
    pub deltas: Vec<i64>,
    /// Sum of the nonnegative parts: a lower bound for the dimension the
    /// closure of the integral points fails to fill.
    pub lower_bound: i64,
}

/// Compute the ledger. The deepest state contributes
/// `[member : Q] * dim J - rank J`; each forget step contributes the
/// frozen factors' dimension-minus-rank; quotient steps contribute the
/// ceiling of their `cover_rank_gap` bound; base changes contribute 0.
pub fn delta_ledger(chain: &BcpChain) -> Result<DeltaLedger> {
    let mut deltas = Vec::new();
    let base_delta = if chain.terminal {
        // nothing is known about the symbolic image curve's Jacobian, so
        // it contributes the trivially sound 0
        0
    } else {
        let member = chain.tower.member(chain.member);
        let profile = jacobian_profile(&chain.curve)?;
        member.degree() as i64 * profile.dim as i64 - profile.rank as i64
    };
    deltas.push(base_delta);
    for s in chain.steps.iter().rev() {
        deltas.push(s.delta);
    }
    let lower_bound = deltas.iter().map(|d| (*d).max(0)).sum();
    Ok(DeltaLedger {
        deltas,
        lower_bound,
    })
}

/// Whether verdicts may assume the p-adic closure of a finitely generated
/// unit group reaches the expected dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictMode {
    Unconditional,
    LeopoldtAssumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    NoObstruction,
    ObstructionUnderLeopoldt,
    Inconclusive,
}

impl VerdictMode {
    pub fn name(self) -> &'static str {
        match self {
            VerdictMode::Unconditional => "unconditional",
            VerdictMode::LeopoldtAssumed => "leopoldt-assumed",
        }
    }
}

impl VerdictKind {
    pub fn name(self) -> &'static str {
        match self {
            VerdictKind::NoObstruction => "NoObstruction",
            VerdictKind::ObstructionUnderLeopoldt => "ObstructionUnderLeopoldt",
            VerdictKind::Inconclusive => "Inconclusive",
        }
    }
}

/// Outcome of comparing the torus data against the intersection bound,
/// with the inequality that decided it spelled out.
#[derive(Clone, Debug)]
pub struct ObstructionVerdict {
    pub mode: VerdictMode,
    pub verdict: VerdictKind,
    pub dim_t: i64,
    pub rank_t: i64,
    pub rank_exact: bool,
    pub intersection_dim: i64,
    pub ledger_lower_bound: Option<i64>,
    pub evidence: String,
}

impl ObstructionVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.mode.name(),
            "verdict": self.verdict.name(),
            "dim": self.dim_t,
            "rank": self.rank_t,
            "rank_exact": self.rank_exact,
            "intersection_dim": self.intersection_dim,
            "ledger_lower_bound": self.ledger_lower_bound,
            "evidence": self.evidence,
        })
    }
}

fn assess(
    mode: VerdictMode,
    dim: i64,
    rank: i64,
    rank_exact: bool,
    intersection: i64,
    ledger: Option<i64>,
) -> ObstructionVerdict {
    let evidence;
    let verdict = if rank_exact && intersection <= dim - rank {
        evidence = format!(
            "closure fills at most rank = {rank} of {dim} dimensions, and dim - rank = {} >= {} = intersection bound",
            dim - rank,
            intersection
        );
        VerdictKind::NoObstruction
    } else if ledger.is_some_and(|lb| lb >= intersection) {
        evidence = format!(
            "ledger lower bound {} >= {} = intersection bound",
            ledger.unwrap(),
            intersection
        );
        VerdictKind::NoObstruction
    } else if mode == VerdictMode::LeopoldtAssumed
        && rank_exact
        && intersection > dim - rank.min(dim)
    {
        evidence = format!(
            "with closure dimension min(rank, dim) = {}, the intersection bound {} exceeds dim - closure = {}",
            rank.min(dim),
            intersection,
            dim - rank.min(dim)
        );
        VerdictKind::ObstructionUnderLeopoldt
    } else {
        evidence = "neither the unconditional test nor the ledger decides".to_string();
        VerdictKind::Inconclusive
    };
    ObstructionVerdict {
        mode,
        verdict,
        dim_t: dim,
        rank_t: rank,
        rank_exact,
        intersection_dim: intersection,
        ledger_lower_bound: ledger,
        evidence,
    }
}

/// Verdict for the torus described by a chain. The intersection bound is
/// the degree of the member the chain has reached.
pub fn obstruction_verdict(chain: &BcpChain, mode: VerdictMode) -> Result<ObstructionVerdict> {
    let class = chain.result()?;
    let ledger = delta_ledger(chain)?;
    Ok(assess(
        mode,
        class.dim(),
        class.rank(),
        class.rank_exact(),
        chain.intersection_dim() as i64,
        Some(ledger.lower_bound),
    ))
}

/// Verdict for a bare subtorus with known dimension and rank inside the
/// restriction of scalars from `base`; the intersection bound is the
/// degree of `base`.
pub fn subtorus_verdict(
    dim: i64,
    rank: i64,
    base: &NumberField,
    mode: VerdictMode,
) -> ObstructionVerdict {
    assess(mode, dim, rank, true, base.degree() as i64, None)
}

/// One torus found by the breadth-first enumeration: its class, the least
/// chain length reaching it, and the move descriptions of one such chain.
#[derive(Clone, Debug)]
pub struct EnumeratedTorus {
    pub class: IsogenyClass,
    pub minimal_n: usize,
    pub witness: Vec<String>,
}

/// Breadth-first closure of the origin curve's full Jacobian class under
/// base-change and forget moves, up to `max_depth` steps. Moves that error
/// (a divisor that does not descend, a rank that is unavailable) are
/// skipped. The result is sorted by minimal chain length, then by class.
pub fn enumerate_bcp_tori(
    curve: &PuncturedCurve,
    tower: &SubfieldTower,
    max_depth: usize,
) -> Result<Vec<EnumeratedTorus>> {
    let chain0 = BcpChain::origin(curve, tower)?;
    let mut found: BTreeMap<IsogenyClass, (usize, Vec<String>)> = BTreeMap::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<(usize, BcpChain, Vec<String>)> = VecDeque::new();
    seen.insert(state_key(&chain0));
    queue.push_back((0, chain0, Vec::new()));
    while let Some((depth, chain, path)) = queue.pop_front() {
        if let Ok(class) = chain.result() {
            found.entry(class).or_insert_with(|| (depth, path.clone()));
        }
        if depth == max_depth {
            continue;
        }
        for target in 0..chain.current_member() {
            if let Ok(next) = bc_successor(&chain, target) {
                let key = state_key(&next);
                if seen.insert(key) {
                    let mut p = path.clone();
                    p.push(format!("descend to {}", tower.member(target).label()));
                    queue.push_back((depth + 1, next, p));
                }
            }
        }
        let n = chain.current_curve().orbits().len();
        if (2..=20).contains(&n) {
            for mask in 1u32..(1u32 << n) - 1 {
                let retained: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let mv = BcpMove::Forget {
                    retained: retained.clone(),
                };
                if let Ok(next) = p_successor(&chain, mv) {
                    let key = state_key(&next);
                    if seen.insert(key) {
                        let mut p = path.clone();
                        p.push(format!("keep orbits {retained:?}"));
                        queue.push_back((depth + 1, next, p));
                    }
                }
            }
        }
    }
    let mut out: Vec<EnumeratedTorus> = found
        .into_iter()
        .map(|(class, (minimal_n, witness))| EnumeratedTorus {
            class,
            minimal_n,
            witness,
        })
        .collect();
    out.sort_by(|a, b| a.minimal_n.cmp(&b.minimal_n).then_with(|| a.class.cmp(&b.class)));
    Ok(out)
}

fn state_key(c: &BcpChain) -> String {
    let mut prym: Vec<String> = c
        .prym
        .iter()
        .map(|f| format!("{}:{}:{}", f.label, f.dim, f.rank))
        .collect();
    prym.sort();
    format!(
        "m{}|{}|{}",
        c.member,
        c.curve.content_key(),
        prym.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{parse_number_field, KPoly};
    use crate::poly::Poly;

    fn kp_int(co: &[i64]) -> KPoly {
        KPoly::from_q_poly(&Poly::from_int(co))
    }

    fn quartic_tower() -> SubfieldTower {
        let q0 = NumberField::rationals();
        let k1 = parse_number_field(&[-2, 0, 1]).unwrap().with_label("Q(sqrt2)");
        let k2 = parse_number_field(&[-2, 0, 0, 0, 1])
            .unwrap()
            .with_label("Q(4rt2)");
        SubfieldTower::new(
            vec![q0, k1, k2],
            vec![Poly::zero(), Poly::from_int(&[0, 0, 1])],
        )
        .unwrap()
    }

    fn four_rational_punctures(tower: &SubfieldTower) -> PuncturedCurve {
        // z (z - 1) (z - 2) plus the point at infinity
        curve_from_divisor(
            tower.top(),
            &SSpec::empty(),
            &kp_int(&[0, 2, -3, 1]),
            true,
            "four rational punctures",
        )
        .unwrap()
    }

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn depth_four_enumeration_over_quartic_tower() {
        let tower = quartic_tower();
        let curve = four_rational_punctures(&tower);
        let tori = enumerate_bcp_tori(&curve, &tower, 4).unwrap();
        assert_eq!(tori.len(), 10);
        for t in &tori {
            assert!(t.class.minus.is_empty());
            assert!(t.class.symbolic.is_empty());
            assert_eq!(t.class.factors.len(), 3);
        }
        let got: BTreeSet<(usize, Vec<String>)> = tori
            .iter()
            .map(|t| (t.minimal_n, t.class.factor_labels()))
            .collect();
        let expect: BTreeSet<(usize, Vec<String>)> = [
            (0, labels(&["Q(4rt2)", "Q(4rt2)", "Q(4rt2)"])),
            (1, labels(&["Q(sqrt2)", "Q(sqrt2)", "Q(sqrt2)"])),
            (1, labels(&["Q", "Q", "Q"])),
            (2, labels(&["Q(4rt2)", "Q(4rt2)", "Q(sqrt2)"])),
            (2, labels(&["Q(4rt2)", "Q(4rt2)", "Q"])),
            (2, labels(&["Q(4rt2)", "Q(sqrt2)", "Q(sqrt2)"])),
            (2, labels(&["Q(4rt2)", "Q", "Q"])),
            (3, labels(&["Q(sqrt2)", "Q(sqrt2)", "Q"])),
            (3, labels(&["Q(sqrt2)", "Q", "Q"])),
            (4, labels(&["Q(4rt2)", "Q(sqrt2)", "Q"])),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expect);
        let full = &tori[0];
        assert_eq!(full.minimal_n, 0);
        assert_eq!((full.class.dim(), full.class.rank()), (12, 6));
        assert!(full.class.rank_exact());
        let deepest = tori.iter().find(|t| t.minimal_n == 4).unwrap();
        assert_eq!(deepest.witness.len(), 4);
    }

    #[test]
    fn two_puncture_classes() {
        let q0 = NumberField::rationals();
        let k = parse_number_field(&[-2, 0, 1]).unwrap().with_label("Q(sqrt2)");
        let tower = SubfieldTower::new(vec![q0, k], vec![Poly::zero()]).unwrap();
        let curve = curve_from_divisor(
            tower.top(),
            &SSpec::empty(),
            &kp_int(&[0, 1]),
            true,
            "zero and infinity",
        )
        .unwrap();
        let tori = enumerate_bcp_tori(&curve, &tower, 2).unwrap();
        assert_eq!(tori.len(), 2);
        assert_eq!(tori[0].minimal_n, 0);
        assert_eq!(tori[0].class.factor_labels(), labels(&["Q(sqrt2)"]));
        assert_eq!((tori[0].class.dim(), tori[0].class.rank()), (2, 1));
        assert_eq!(tori[1].minimal_n, 1);
        assert_eq!(tori[1].class.factor_labels(), labels(&["Q"]));
        assert_eq!((tori[1].class.dim(), tori[1].class.rank()), (1, 0));
    }

    #[test]
    fn gaussian_puncture_does_not_descend() {
        let q0 = NumberField::rationals();
        let ki = parse_number_field(&[1, 0, 1]).unwrap().with_label("Q(i)");
        let tower = SubfieldTower::new(vec![q0, ki.clone()], vec![Poly::zero()]).unwrap();
        let f1 = ki.kp_mul(&kp_int(&[0, 1]), &kp_int(&[-1, 1]));
        let z_minus_i = KPoly::from_coeffs(vec![Poly::from_int(&[0, -1]), Poly::from_int(&[1])]);
        let div = ki.kp_mul(&f1, &z_minus_i);
        let curve = curve_from_divisor(
            tower.member(1),
            &SSpec::empty(),
            &div,
            true,
            "zero one i infinity",
        )
        .unwrap();
        let chain = BcpChain::origin(&curve, &tower).unwrap();
        match bc_successor(&chain, 0) {
            Err(Error::NotDescendable { orbit }) => assert!(!orbit.is_empty()),
            other => panic!("expected NotDescendable, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_pair_descends_and_merges() {
        let q0 = NumberField::rationals();
        let k = parse_number_field(&[-2, 0, 1]).unwrap().with_label("Q(sqrt2)");
        let tower = SubfieldTower::new(vec![q0, k], vec![Poly::zero()]).unwrap();
        let curve = curve_from_divisor(
            tower.top(),
            &SSpec::empty(),
            &kp_int(&[-2, 0, 1]),
            false,
            "plus and minus sqrt2",
        )
        .unwrap();
        let chain = BcpChain::origin(&curve, &tower).unwrap();
        assert_eq!(chain.current_curve().orbits().len(), 2);
        let down = bc_successor(&chain, 0).unwrap();
        assert_eq!(down.current_curve().orbits().len(), 1);
        let class = down.result().unwrap();
        assert_eq!(class.factors.len(), 1);
        assert_eq!(class.factors[0].dim, 2);
        assert_eq!(class.minus.len(), 1);
        assert_eq!((class.dim(), class.rank()), (1, 1));
        // identity base change leaves the class alone
        let same = bc_successor(&chain, 1).unwrap();
        assert_eq!(same.result().unwrap(), chain.result().unwrap());
    }

    #[test]
    fn forget_move_freezes_factors_and_feeds_the_ledger() {
        let tower = quartic_tower();
        let curve = four_rational_punctures(&tower);
        let chain = BcpChain::origin(&curve, &tower).unwrap();
        let kept = p_successor(
            &chain,
            BcpMove::Forget {
                retained: vec![0, 3],
            },
        )
        .unwrap();
        assert_eq!(kept.current_curve().geometric_punctures(), 2);
        let class = kept.result().unwrap();
        assert_eq!(
            class.factor_labels(),
            labels(&["Q(4rt2)", "Q(4rt2)", "Q(4rt2)"])
        );
        let ledger = delta_ledger(&kept).unwrap();
        assert_eq!(ledger.deltas, vec![2, 4]);
        assert_eq!(ledger.lower_bound, 6);
        // the untouched chain's single entry agrees with the total
        let ledger0 = delta_ledger(&chain).unwrap();
        assert_eq!(ledger0.deltas, vec![6]);
        assert_eq!(ledger0.lower_bound, 6);
        for bad in [vec![], vec![0], vec![0, 1, 2, 3], vec![0, 0, 1], vec![9]] {
            assert!(matches!(
                p_successor(&chain, BcpMove::Forget { retained: bad }),
                Err(Error::InvalidCoverMove)
            ));
        }
        assert!(p_successor(&chain, BcpMove::Bc { target: 0 }).is_err());
    }

    #[test]
    fn unit_root_quintic_ledger_and_verdict() {
        let tower = SubfieldTower::rationals_only();
        let curve = curve_from_divisor(
            tower.top(),
            &SSpec::empty(),
            &kp_int(&[1, 1, 1, 1, 1]),
            false,
            "fifth roots of unity except one",
        )
        .unwrap();
        let chain = BcpChain::origin(&curve, &tower).unwrap();
        let ledger = delta_ledger(&chain).unwrap();
        assert_eq!(ledger.deltas, vec![2]);
        assert_eq!(ledger.lower_bound, 2);
        let v = obstruction_verdict(&chain, VerdictMode::Unconditional).unwrap();
        assert_eq!(v.verdict, VerdictKind::NoObstruction);
        assert_eq!((v.dim_t, v.rank_t, v.intersection_dim), (3, 1, 1));
    }

    #[test]
    fn symbolic_quotient_and_cover_rank_gap() {
        let (gap, bound) = cover_rank_gap(4, 1, 0, 1, 2).unwrap();
        assert_eq!(gap, 2);
        assert_eq!(bound, Q::from(Z::from(1)));
        assert_eq!(cover_rank_gap(4, 1, 0, 1, 1).unwrap().1, Q::from(Z::from(0)));
        assert!(matches!(
            cover_rank_gap(4, 1, 0, 1, 3),
            Err(Error::DeltaDoesNotDivide { .. })
        ));

        let tower = SubfieldTower::rationals_only();
        let curve = curve_from_divisor(
            tower.top(),
            &SSpec::empty(),
            &kp_int(&[1, 1, 1, 1, 1]),
            false,
            "fifth roots of unity except one",
        )
        .unwrap();
        let chain = BcpChain::origin(&curve, &tower).unwrap();
        let quo = p_successor(&chain, BcpMove::Quotient { delta: 2 }).unwrap();
        assert!(quo.is_terminal());
        let ledger = delta_ledger(&quo).unwrap();
        assert_eq!(ledger.deltas, vec![0, 1]);
        assert_eq!(ledger.lower_bound, 1);
        let class = quo.result().unwrap();
        assert!(!class.rank_exact());
        assert_eq!(class.dim(), 3);
        assert!(p_successor(&quo, BcpMove::Quotient { delta: 2 }).is_err());
        assert!(bc_successor(&quo, 0).is_err());
        assert!(matches!(
            p_successor(&chain, BcpMove::Quotient { delta: 4 }),
            Err(Error::RiemannHurwitzViolation { .. })
        ));
        assert!(matches!(
            p_successor(&chain, BcpMove::Quotient { delta: 3 }),
            Err(Error::DeltaDoesNotDivide { .. })
        ));
        let v = obstruction_verdict(&quo, VerdictMode::Unconditional).unwrap();
        assert_eq!(v.verdict, VerdictKind::NoObstruction);
        assert_eq!(v.ledger_lower_bound, Some(1));
    }

    #[test]
    fn subtorus_checks() {
        let q0 = NumberField::rationals();
        let v = subtorus_verdict(2, 1, &q0, VerdictMode::Unconditional);
        assert_eq!(v.verdict, VerdictKind::NoObstruction);
        let v2 = subtorus_verdict(5, 5, &q0, VerdictMode::LeopoldtAssumed);
        assert_eq!(v2.verdict, VerdictKind::ObstructionUnderLeopoldt);
        let v3 = subtorus_verdict(5, 5, &q0, VerdictMode::Unconditional);
        assert_eq!(v3.verdict, VerdictKind::Inconclusive);
        let v4 = subtorus_verdict(3, 2, &q0, VerdictMode::LeopoldtAssumed);
        assert_eq!(v4.verdict, VerdictKind::NoObstruction);
    }

    #[test]
    fn replay_matches_incremental_state() {
        let tower = quartic_tower();
        let curve = four_rational_punctures(&tower);
        let mut chain = BcpChain::origin(&curve, &tower).unwrap();
        chain = p_successor(
            &chain,
            BcpMove::Forget {
                retained: vec![0, 3],
            },
        )
        .unwrap();
        chain = bc_successor(&chain, 1).unwrap();
        assert_eq!(chain.n(), 2);
        let direct = chain.result().unwrap();
        assert_eq!(direct, chain.replay().unwrap());
        assert_eq!(
            direct.factor_labels(),
            labels(&["Q(4rt2)", "Q(4rt2)", "Q(sqrt2)"])
        );
    }
}
