//! Shadowing sets, persistent points and topologically stable points at a
//! fixed scale `(ε, δ, R)`.
//!
//! Every "for each g ∈ G" is taken over the Cayley ball of radius `R`, and
//! every "for each Ψ with d(Φ, Ψ) <= δ" over a materialized
//! [`Perturbations`] list whose provenance is carried into the results.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::action::{Action, Scale};
use crate::error::{Error, Result};
use crate::group::CayleyBall;
use crate::metric::{FiniteMetricSpace, PointSet};
use crate::perm::Perm;
use crate::perturb::{PerturbationSource, Perturbations, Provenance};
use crate::rational::Rational;
use crate::report::CheckRecord;

/// Ball elements together with their images under `Φ` and `Ψ`.
struct PairTables {
    phi: Vec<Perm>,
    psi: Vec<Perm>,
}

impl PairTables {
    fn new(phi: &Action, psi: &Action, ball: &CayleyBall) -> Result<Self> {
        phi.check_compatible(psi)?;
        Ok(PairTables {
            phi: phi.ball_table(ball),
            psi: psi.ball_table(ball),
        })
    }

    fn shadows(&self, space: &FiniteMetricSpace, eps: &Rational, x: usize, y: usize) -> bool {
        let b = space.bound(eps);
        self.phi
            .iter()
            .zip(&self.psi)
            .all(|(f, p)| space.within(f.apply(x), p.apply(y), b))
    }

    fn gamma(&self, space: &FiniteMetricSpace, eps: &Rational, x: usize) -> PointSet {
        let b = space.bound(eps);
        space
            .points()
            .filter(|&y| {
                self.phi
                    .iter()
                    .zip(&self.psi)
                    .all(|(f, p)| space.within(f.apply(x), p.apply(y), b))
            })
            .collect()
    }

    fn b_set(&self, space: &FiniteMetricSpace, eps: &Rational) -> PointSet {
        space
            .points()
            .filter(|&x| space.points().any(|y| self.shadows(space, eps, x, y)))
            .collect()
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps.is_negative() {
        return Err(Error::Argument(format!("negative epsilon {eps}")));
    }
    Ok(())
}

/// `Γ_ε^x(Φ, Ψ) = { y : d(Φ_g(x), Ψ_g(y)) <= ε for every g in the ball }`.
pub fn gamma_set(phi: &Action, psi: &Action, x: usize, eps: &Rational, radius: usize) -> Result<PointSet> {
    check_eps(eps)?;
    if x >= phi.len() {
        return Err(Error::Argument(format!("point {x} out of range")));
    }
    let ball = phi.group().cayley_ball(radius);
    Ok(PairTables::new(phi, psi, &ball)?.gamma(phi.space(), eps, x))
}

/// The same set computed as `⋂_g Ψ_{g⁻¹}(B[Φ_g(x), ε])`.
pub fn gamma_set_by_preimages(phi: &Action, psi: &Action, x: usize, eps: &Rational, radius: usize) -> Result<PointSet> {
    check_eps(eps)?;
    phi.check_compatible(psi)?;
    let group = phi.group();
    let space = phi.space();
    let mut acc = space.all_points();
    for g in group.cayley_ball(radius).iter() {
        let ball = space.closed_ball(phi.evaluate(g, x)?, eps)?;
        let g_inv = group.inverse(g);
        let pre: PointSet = ball.iter().map(|&z| psi.evaluate(&g_inv, z)).collect::<Result<_>>()?;
        acc = acc.intersection(&pre).copied().collect();
    }
    Ok(acc)
}

/// `B(ε, Φ, Ψ) = { x : Γ_ε^x(Φ, Ψ) ≠ ∅ }`.
pub fn b_set(phi: &Action, psi: &Action, eps: &Rational, radius: usize) -> Result<PointSet> {
    check_eps(eps)?;
    let ball = phi.group().cayley_ball(radius);
    Ok(PairTables::new(phi, psi, &ball)?.b_set(phi.space(), eps))
}

/// A point set computed at one scale, with the provenance of its
/// perturbation quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaleIndexedPointSet {
    pub scale: Scale,
    pub members: PointSet,
    pub provenance: Provenance,
    pub perturbations: usize,
}

/// `B(ε, Φ, Ψ)` for every `Ψ` of a perturbation list.
#[derive(Debug, Clone)]
pub struct ShadowingProfile {
    pub scale: Scale,
    pub provenance: Provenance,
    pub b_sets: Vec<PointSet>,
    n: usize,
}

impl ShadowingProfile {
    pub fn compute(phi: &Action, eps: &Rational, perturbations: &Perturbations) -> Result<Self> {
        Self::compute_at(phi, eps, perturbations, perturbations.radius)
    }

    /// Same as [`compute`](Self::compute) but tests shadowing on the ball of
    /// `radius` instead of the radius the family was generated for.
    pub fn compute_at(phi: &Action, eps: &Rational, perturbations: &Perturbations, radius: usize) -> Result<Self> {
        check_eps(eps)?;
        let ball = phi.group().cayley_ball(radius);
        let b_sets = perturbations
            .iter()
            .map(|psi| Ok(PairTables::new(phi, psi, &ball)?.b_set(phi.space(), eps)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ShadowingProfile {
            scale: Scale::new(eps.clone(), perturbations.delta.clone(), radius)?,
            provenance: perturbations.provenance,
            b_sets,
            n: phi.len(),
        })
    }

    /// `⋂_Ψ B(ε, Φ, Ψ)`
    pub fn persistent(&self) -> PointSet {
        (0..self.n)
            .filter(|x| self.b_sets.iter().all(|b| b.contains(x)))
            .collect()
    }

    /// `⋃_Ψ X ∖ B(ε, Φ, Ψ)`
    pub fn c_set(&self) -> PointSet {
        (0..self.n)
            .filter(|x| self.b_sets.iter().any(|b| !b.contains(x)))
            .collect()
    }

    /// Index of the first perturbation whose `B` misses some point of `set`.
    pub fn first_violation(&self, set: &PointSet) -> Option<usize> {
        self.b_sets.iter().position(|b| !set.is_subset(b))
    }

    fn indexed(&self, members: PointSet) -> ScaleIndexedPointSet {
        ScaleIndexedPointSet {
            scale: self.scale.clone(),
            members,
            provenance: self.provenance,
            perturbations: self.b_sets.len(),
        }
    }

    /// Persistent points, after checking that they complement `C(ε, δ)`.
    pub fn persistent_points(&self) -> ScaleIndexedPointSet {
        let p = self.persistent();
        let c = self.c_set();
        assert!(
            p.is_disjoint(&c) && p.len() + c.len() == self.n,
            "persistent points must complement C(ε, δ)"
        );
        self.indexed(p)
    }

    pub fn c_points(&self) -> ScaleIndexedPointSet {
        self.indexed(self.c_set())
    }
}

pub fn perturbations(phi: &Action, delta: &Rational, radius: usize, mode: Provenance) -> Result<Perturbations> {
    PerturbationSource::with_mode(phi.clone(), delta.clone(), radius, mode).generate()
}

/// `C(ε, δ)`: points whose shadowing set is empty for some admissible `Ψ`.
pub fn c_set(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<ScaleIndexedPointSet> {
    let ps = perturbations(phi, delta, radius, mode)?;
    Ok(ShadowingProfile::compute(phi, eps, &ps)?.c_points())
}

pub fn persistent_points(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<ScaleIndexedPointSet> {
    let ps = perturbations(phi, delta, radius, mode)?;
    Ok(ShadowingProfile::compute(phi, eps, &ps)?.persistent_points())
}

/// A semiconjugacy `h` from the `Ψ`-orbit of a point into `X`, determined
/// by its value at the base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityWitness {
    pub base_point: usize,
    pub anchor: usize,
    /// `(z, h(z))` for each point `z` of the saturated orbit.
    pub map: BTreeMap<usize, usize>,
    pub max_displacement: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorFailure {
    /// Two group elements send the base point to the same orbit point but
    /// the anchor to different images, or `h` fails to intertwine a generator.
    IllDefined,
    Displacement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Witness(StabilityWitness),
    NoWitness(Vec<(usize, AnchorFailure)>),
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&StabilityWitness> {
        match self {
            SearchOutcome::Witness(w) => Some(w),
            SearchOutcome::NoWitness(_) => None,
        }
    }
}

struct SearchContext<'a> {
    phi: &'a Action,
    psi: &'a Action,
    ball: &'a CayleyBall,
    phi_table: &'a [Perm],
}

impl SearchContext<'_> {
    fn search(&self, x: usize, eps: &Rational, perturbation: Option<usize>) -> Result<SearchOutcome> {
        let space = self.phi.space();
        let psi_table = self.psi.ball_table(self.ball);
        let orbit: PointSet = psi_table.iter().map(|p| p.apply(x)).collect();
        if !self.psi.is_invariant(&orbit) {
            return Err(Error::RadiusTooSmall {
                point: x,
                perturbation,
                radius: self.ball.radius,
            });
        }
        let letters = self.phi.group().symmetric_generators();
        let mut best: Option<StabilityWitness> = None;
        let mut failures = Vec::new();
        'anchor: for anchor in space.closed_ball(x, eps)? {
            let mut map = BTreeMap::new();
            for (f, p) in self.phi_table.iter().zip(&psi_table) {
                let z = p.apply(x);
                let img = f.apply(anchor);
                if *map.entry(z).or_insert(img) != img {
                    failures.push((anchor, AnchorFailure::IllDefined));
                    continue 'anchor;
                }
            }
            // generator-level equivariance on the orbit gives Φ_g h = h Ψ_g for all g
            for (&z, &hz) in &map {
                for &l in &letters {
                    if map[&self.psi.letter_perm(l).apply(z)] != self.phi.letter_perm(l).apply(hz) {
                        failures.push((anchor, AnchorFailure::IllDefined));
                        continue 'anchor;
                    }
                }
            }
            let worst = map
                .iter()
                .map(|(&z, &hz)| space.rank(z, hz))
                .max()
                .expect("orbit is nonempty");
            let max_displacement = space.levels()[worst].clone();
            if &max_displacement > eps {
                failures.push((anchor, AnchorFailure::Displacement));
                continue;
            }
            if best.as_ref().map_or(true, |b| max_displacement < b.max_displacement) {
                best = Some(StabilityWitness {
                    base_point: x,
                    anchor,
                    map,
                    max_displacement,
                });
            }
        }
        Ok(match best {
            Some(w) => SearchOutcome::Witness(w),
            None => SearchOutcome::NoWitness(failures),
        })
    }
}

/// Looks for `h : O_Ψ(x) → X` with `Φ_g ∘ h = h ∘ Ψ_g` and `d(h(z), z) <= ε`.
///
/// Anchors `h(x)` are tried in `B[x, ε]`; the witness with the smallest
/// maximal displacement wins, ties going to the smallest anchor. The orbit
/// must be saturated at `radius`, otherwise the orbit closure is not
/// captured and the search refuses.
pub fn semiconjugacy_search(
    phi: &Action,
    psi: &Action,
    x: usize,
    eps: &Rational,
    radius: usize,
) -> Result<SearchOutcome> {
    check_eps(eps)?;
    phi.check_compatible(psi)?;
    if x >= phi.len() {
        return Err(Error::Argument(format!("point {x} out of range")));
    }
    let ball = phi.group().cayley_ball(radius);
    let phi_table = phi.ball_table(&ball);
    SearchContext {
        phi,
        psi,
        ball: &ball,
        phi_table: &phi_table,
    }
    .search(x, eps, None)
}

/// Re-checks a witness from scratch against its definition.
pub fn audit_witness(
    phi: &Action,
    psi: &Action,
    w: &StabilityWitness,
    eps: &Rational,
    radius: usize,
) -> std::result::Result<(), String> {
    let space = phi.space();
    let orbit = psi.orbit(w.base_point, radius).map_err(|e| e.to_string())?;
    if !orbit.saturated {
        return Err("orbit not saturated".into());
    }
    let domain: PointSet = w.map.keys().copied().collect();
    if domain != orbit.points {
        return Err(format!("map domain {domain:?} is not the orbit {:?}", orbit.points));
    }
    if w.map[&w.base_point] != w.anchor {
        return Err("map does not send the base point to the anchor".into());
    }
    for g in phi.group().cayley_ball(radius).iter() {
        for (&z, &hz) in &w.map {
            let lhs = w.map[&psi.evaluate(g, z).map_err(|e| e.to_string())?];
            let rhs = phi.evaluate(g, hz).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("h(Ψ_{g}({z})) = {lhs} but Φ_{g}(h({z})) = {rhs}"));
            }
        }
    }
    for (&z, &hz) in &w.map {
        if space.dist(z, hz) > eps {
            return Err(format!("d(h({z}), {z}) = {} exceeds {eps}", space.dist(z, hz)));
        }
        if space.dist(z, hz) > &w.max_displacement {
            return Err("recorded max displacement is too small".into());
        }
    }
    Ok(())
}

/// Stable points at one scale, with a witness for every (member, Ψ) pair
/// and the first failing Ψ for every non-member.
#[derive(Debug, Clone)]
pub struct StabilityProfile {
    pub set: ScaleIndexedPointSet,
    pub witnesses: Vec<(usize, usize, StabilityWitness)>,
    pub failures: Vec<(usize, usize, Vec<(usize, AnchorFailure)>)>,
}

impl StabilityProfile {
    pub fn compute(phi: &Action, eps: &Rational, perturbations: &Perturbations) -> Result<Self> {
        check_eps(eps)?;
        let ball = phi.group().cayley_ball(perturbations.radius);
        let phi_table = phi.ball_table(&ball);
        let mut members = PointSet::new();
        let mut witnesses = Vec::new();
        let mut failures = Vec::new();
        for x in phi.space().points() {
            let mut found = Vec::new();
            let mut failed = None;
            for (i, psi) in perturbations.iter().enumerate() {
                phi.check_compatible(psi)?;
                let ctx = SearchContext {
                    phi,
                    psi,
                    ball: &ball,
                    phi_table: &phi_table,
                };
                match ctx.search(x, eps, Some(i))? {
                    SearchOutcome::Witness(w) => found.push((x, i, w)),
                    SearchOutcome::NoWitness(f) => {
                        failed = Some((x, i, f));
                        break;
                    }
                }
            }
            match failed {
                None => {
                    members.insert(x);
                    witnesses.extend(found);
                }
                Some(f) => failures.push(f),
            }
        }
        Ok(StabilityProfile {
            set: ScaleIndexedPointSet {
                scale: Scale::new(eps.clone(), perturbations.delta.clone(), perturbations.radius)?,
                members,
                provenance: perturbations.provenance,
                perturbations: perturbations.len(),
            },
            witnesses,
            failures,
        })
    }
}

pub fn stable_points(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<ScaleIndexedPointSet> {
    let ps = perturbations(phi, delta, radius, mode)?;
    Ok(StabilityProfile::compute(phi, eps, &ps)?.set)
}

/// For each unordered pair, the largest distance between `Φ_g`-images over
/// the ball, as a level rank.
fn spread_ranks(phi: &Action, radius: usize) -> Vec<Vec<usize>> {
    let space = phi.space();
    let table = phi.ball_table(&phi.group().cayley_ball(radius));
    let n = space.len();
    let mut out = vec![vec![0; n]; n];
    for x in 0..n {
        for y in 0..n {
            out[x][y] = table
                .iter()
                .map(|p| space.rank(p.apply(x), p.apply(y)))
                .max()
                .unwrap_or(0);
        }
    }
    out
}

fn modulus_over<I: Iterator<Item = (usize, usize)>>(
    space: &FiniteMetricSpace,
    spread: &[Vec<usize>],
    eps: &Rational,
    pairs: I,
) -> Rational {
    // smallest distance at which the implication breaks
    let first_bad = pairs
        .filter(|&(x, y)| space.levels()[spread[x][y]] > *eps)
        .map(|(x, y)| space.rank(x, y))
        .min();
    match first_bad {
        Some(r) if r == 0 => Rational::zero(),
        Some(r) => space.levels()[r - 1].clone(),
        None => space.diameter().clone(),
    }
}

/// Largest realized distance `δ` (or 0) such that `d(x, y) <= δ` implies
/// `d(Φ_g(x), Φ_g(y)) <= ε` for all pairs and all `g` in the ball.
///
/// The implication only changes truth value at realized distances, so
/// restricting the candidates to them loses nothing.
pub fn equicontinuity_modulus(phi: &Action, eps: &Rational, radius: usize) -> Result<Rational> {
    check_eps(eps)?;
    let spread = spread_ranks(phi, radius);
    let n = phi.len();
    let pairs = (0..n).flat_map(|x| (0..n).map(move |y| (x, y)));
    Ok(modulus_over(phi.space(), &spread, eps, pairs))
}

/// The same modulus restricted to pairs `(x, y)` with `x` fixed.
pub fn pointwise_modulus(phi: &Action, x: usize, eps: &Rational, radius: usize) -> Result<Rational> {
    check_eps(eps)?;
    if x >= phi.len() {
        return Err(Error::Argument(format!("point {x} out of range")));
    }
    let spread = spread_ranks(phi, radius);
    let pairs = (0..phi.len()).map(|y| (x, y));
    Ok(modulus_over(phi.space(), &spread, eps, pairs))
}

/// Result of running the stable ⇒ persistent argument at one scale.
#[derive(Debug, Clone, Serialize)]
pub struct ChainOutcome {
    pub epsilon: Rational,
    pub eta: Rational,
    pub delta: Rational,
    pub radius: usize,
    pub stable: PointSet,
    pub persistent: PointSet,
    pub perturbations: usize,
    pub only_base_perturbation: bool,
    pub witnesses_audited: usize,
}

/// Checks that stable points are persistent, following the proof's
/// constants: `η = modulus(ε/2)`, `δ = η`, stability at `(η, δ)` and
/// persistence at `(ε, δ)`. Every witness is re-audited, including the
/// triangle estimate `d(Φ_g x, Ψ_g x) <= d(Φ_g x, Φ_g h(x)) + d(h(Ψ_g x), Ψ_g x) <= ε`.
pub fn verify_stable_implies_persistent(
    phi: &Action,
    eps: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<CheckRecord> {
    let half = eps.half();
    let eta = equicontinuity_modulus(phi, &half, radius)?;
    let delta = eta.clone();
    let record = CheckRecord::new("stable_implies_persistent", "x ∈ E(Φ) ∩ T(Φ) ⇒ x ∈ P(Φ)")
        .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);
    let ps = perturbations(phi, &delta, radius, mode)?;
    let stable = StabilityProfile::compute(phi, &eta, &ps)?;
    let shadow = ShadowingProfile::compute(phi, eps, &ps)?;
    let persistent = shadow.persistent();

    let space = phi.space();
    let ball = phi.group().cayley_ball(radius);
    let mut counterexamples = Vec::new();
    for &x in stable.set.members.difference(&persistent) {
        let i = shadow
            .first_violation(&PointSet::from([x]))
            .expect("non-persistent point has a violating perturbation");
        counterexamples.push(json!({
            "kind": "stable_not_persistent",
            "x": x,
            "perturbation_index": i,
            "psi": ps.actions[i].gen_images(),
        }));
    }
    for (x, i, w) in &stable.witnesses {
        let psi = &ps.actions[*i];
        if let Err(why) = audit_witness(phi, psi, w, &eta, radius) {
            counterexamples.push(json!({"kind": "witness_audit", "x": x, "perturbation_index": i, "reason": why}));
            continue;
        }
        for g in ball.iter() {
            let fx = phi.evaluate(g, *x)?;
            let px = psi.evaluate(g, *x)?;
            let h_px = w.map[&px];
            let t1 = space.dist(fx, phi.evaluate(g, w.anchor)?);
            let t2 = space.dist(h_px, px);
            let lhs = space.dist(fx, px);
            let ok = t1 <= &half && t2 <= &eta && lhs <= &(t1 + t2) && &(t1 + t2) <= eps;
            if !ok {
                counterexamples.push(json!({
                    "kind": "triangle_audit",
                    "x": x,
                    "perturbation_index": i,
                    "g": g.to_string(),
                    "terms": [lhs, t1, t2],
                }));
            }
        }
    }
    let outcome = ChainOutcome {
        epsilon: eps.clone(),
        eta: eta.clone(),
        delta,
        radius,
        stable: stable.set.members.clone(),
        persistent,
        perturbations: ps.len(),
        only_base_perturbation: ps.only_base(),
        witnesses_audited: stable.witnesses.len(),
    };
    let mut record = record.with_details(serde_json::to_value(&outcome)?);
    record.counterexamples = counterexamples;
    Ok(record.conclude(eta.is_zero()))
}

/// Finite closure property of persistent points for equicontinuous actions:
/// if `d(x, x') <= modulus(ε/2)` and `x'` is `(ε/2, δ)`-persistent then `x`
/// is `(ε, δ)`-persistent. Both sets use the same perturbation list.
pub fn verify_closure_shadow(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<CheckRecord> {
    let half = eps.half();
    let eta = equicontinuity_modulus(phi, &half, radius)?;
    let ps = perturbations(phi, delta, radius, mode)?;
    let p_half = ShadowingProfile::compute(phi, &half, &ps)?.persistent();
    let p_full = ShadowingProfile::compute(phi, eps, &ps)?;
    let p = p_full.persistent();
    let space = phi.space();
    let mut record = CheckRecord::new(
        "persistent_closure_under_equicontinuity",
        "Φ equicontinuous ⇒ P(Φ) closed",
    )
    .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);
    let mut pairs_checked = 0usize;
    for &xp in &p_half {
        for x in space.points() {
            if space.dist(x, xp) <= &eta {
                pairs_checked += 1;
                if !p.contains(&x) {
                    let i = p_full.first_violation(&PointSet::from([x])).unwrap_or(0);
                    record.counterexamples.push(json!({
                        "x": x,
                        "x_prime": xp,
                        "perturbation_index": i,
                        "psi": ps.actions[i].gen_images(),
                    }));
                }
            }
        }
    }
    record.details = json!({
        "eta": eta,
        "persistent_half_eps": p_half,
        "persistent_eps": p,
        "pairs_checked": pairs_checked,
        "perturbations": ps.len(),
        "only_base_perturbation": ps.only_base(),
    });
    Ok(record.conclude(eta.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;
    use std::sync::Arc;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn l3() -> Action {
        let s = Arc::new(FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap());
        Action::identity(s, GroupModel::Cyclic { n: 2 })
    }

    fn l3_swap(a: usize, b: usize) -> Action {
        let phi = l3();
        Action::new(
            phi.space().clone(),
            phi.group(),
            vec![Perm::transposition(3, a, b).images().to_vec()],
        )
        .unwrap()
    }

    fn c6() -> Action {
        let rows: Vec<Vec<Rational>> = (0..6i64)
            .map(|i| {
                (0..6i64)
                    .map(|j| Rational::from_integer((i - j).abs().min(6 - (i - j).abs())))
                    .collect()
            })
            .collect();
        let s = Arc::new(FiniteMetricSpace::new(rows).unwrap());
        Action::new(s, GroupModel::Integers, vec![Perm::rotation(6, 1).images().to_vec()]).unwrap()
    }

    const EX: Provenance = Provenance::Exhaustive;

    #[test]
    fn gamma_examples() {
        let phi = l3();
        let psi = l3_swap(0, 1);
        assert!(gamma_set(&phi, &phi, 1, &Rational::zero(), 1).unwrap().contains(&1));
        assert_eq!(
            gamma_set(&phi, &psi, 2, &Rational::zero(), 1).unwrap(),
            PointSet::from([2])
        );
        assert!(gamma_set(&phi, &psi, 0, &r("1/2"), 1).unwrap().is_empty());
    }

    #[test]
    fn b_set_examples() {
        let phi = l3();
        let psi = l3_swap(0, 1);
        assert_eq!(
            b_set(&phi, &phi, &Rational::zero(), 1).unwrap(),
            phi.space().all_points()
        );
        assert_eq!(b_set(&phi, &psi, &r("1/2"), 1).unwrap(), PointSet::from([2]));
        assert_eq!(b_set(&phi, &psi, &r("2"), 1).unwrap(), phi.space().all_points());
    }

    fn family(phi: &Action, psis: Vec<Action>, delta: &str) -> Perturbations {
        let mut actions = vec![phi.clone()];
        actions.extend(psis);
        Perturbations {
            provenance: EX,
            delta: r(delta),
            radius: 1,
            actions,
            notes: Vec::new(),
        }
    }

    #[test]
    fn c_and_persistent_sets_on_l3() {
        let phi = l3();
        let half = r("1/2");
        let one = Rational::one();
        let all = phi.space().all_points();
        assert!(c_set(&phi, &half, &Rational::zero(), 1, EX).unwrap().members.is_empty());
        assert_eq!(
            persistent_points(&phi, &half, &Rational::zero(), 1, EX)
                .unwrap()
                .members,
            all
        );
        // swap(0,1) ejects 0 and 1, swap(1,2) ejects 2
        assert_eq!(c_set(&phi, &half, &one, 1, EX).unwrap().members, all);
        assert!(persistent_points(&phi, &half, &one, 1, EX).unwrap().members.is_empty());
        assert_eq!(persistent_points(&phi, &one, &one, 1, EX).unwrap().members, all);

        let ps = family(&phi, vec![l3_swap(0, 1)], "1");
        let prof = ShadowingProfile::compute(&phi, &half, &ps).unwrap();
        assert_eq!(prof.persistent(), PointSet::from([2]));
        assert_eq!(prof.c_set(), PointSet::from([0, 1]));
        assert_eq!(prof.first_violation(&PointSet::from([0])), Some(1));
        assert_eq!(prof.first_violation(&PointSet::from([2])), None);
    }

    #[test]
    fn both_gamma_formulas_agree() {
        let phi = c6();
        let ps = perturbations(&phi, &Rational::one(), 1, EX).unwrap();
        for psi in ps.iter() {
            for x in 0..6 {
                for eps in ["0", "1", "2"] {
                    assert_eq!(
                        gamma_set(&phi, psi, x, &r(eps), 1).unwrap(),
                        gamma_set_by_preimages(&phi, psi, x, &r(eps), 1).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn semiconjugacy_examples() {
        let phi = l3();
        let out = semiconjugacy_search(&phi, &phi, 1, &r("1/2"), 1).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.anchor, 1);
        assert!(w.max_displacement.is_zero());
        assert!(w.map.iter().all(|(z, hz)| z == hz));

        let psi = l3_swap(0, 1);
        let out = semiconjugacy_search(&phi, &psi, 0, &r("1/2"), 1).unwrap();
        assert_eq!(out, SearchOutcome::NoWitness(vec![(0, AnchorFailure::Displacement)]));
    }

    #[test]
    fn unsaturated_orbit_is_refused() {
        let phi = c6();
        let e = semiconjugacy_search(&phi, &phi, 0, &Rational::one(), 2).unwrap_err();
        assert!(matches!(e, Error::RadiusTooSmall { point: 0, .. }));
        assert!(semiconjugacy_search(&phi, &phi, 0, &Rational::one(), 3).is_ok());
    }

    #[test]
    fn stable_points_on_l3() {
        let phi = l3();
        let half = r("1/2");
        assert_eq!(
            stable_points(&phi, &half, &Rational::zero(), 1, EX).unwrap().members,
            phi.space().all_points()
        );
        assert!(stable_points(&phi, &half, &Rational::one(), 1, EX)
            .unwrap()
            .members
            .is_empty());

        let ps = family(&phi, vec![l3_swap(0, 1)], "1");
        let prof = StabilityProfile::compute(&phi, &half, &ps).unwrap();
        assert_eq!(prof.set.members, PointSet::from([2]));
        assert_eq!(
            prof.failures.iter().map(|f| (f.0, f.1)).collect::<Vec<_>>(),
            vec![(0, 1), (1, 1)]
        );
        for (x, i, w) in &prof.witnesses {
            audit_witness(&phi, &ps.actions[*i], w, &half, 1).unwrap();
            assert_eq!(*x, w.base_point);
        }
    }

    #[test]
    fn moduli() {
        let phi = c6();
        assert_eq!(equicontinuity_modulus(&phi, &r("3/2"), 3).unwrap(), Rational::one());
        assert_eq!(equicontinuity_modulus(&phi, &r("1/2"), 3).unwrap(), Rational::zero());
        assert_eq!(
            equicontinuity_modulus(&phi, &Rational::zero(), 3).unwrap(),
            Rational::zero()
        );
        assert_eq!(
            equicontinuity_modulus(&phi, &r("7"), 3).unwrap(),
            Rational::from_integer(3)
        );
        let id = l3();
        assert_eq!(equicontinuity_modulus(&id, &r("3/2"), 1).unwrap(), Rational::one());
        // swap(0,1) stretches the pair (1, 2) from 1 to 2
        let swap = l3_swap(0, 1);
        assert_eq!(
            equicontinuity_modulus(&swap, &Rational::one(), 1).unwrap(),
            Rational::zero()
        );
        assert_eq!(
            pointwise_modulus(&swap, 0, &Rational::one(), 1).unwrap(),
            Rational::one()
        );
    }

    #[test]
    fn chain_on_c6() {
        let rec = verify_stable_implies_persistent(&c6(), &Rational::from_integer(2), 3, EX).unwrap();
        assert_eq!(rec.verdict, crate::report::Verdict::Pass, "{:#?}", rec);
        let rec = verify_stable_implies_persistent(&c6(), &Rational::from_integer(9), 3, EX).unwrap();
        assert_eq!(rec.verdict, crate::report::Verdict::Pass);
        assert_eq!(rec.details["persistent"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn chain_with_zero_modulus_is_vacuous() {
        let rec = verify_stable_implies_persistent(&c6(), &Rational::one(), 3, EX).unwrap();
        assert_eq!(rec.verdict, crate::report::Verdict::Vacuous);
    }
}
