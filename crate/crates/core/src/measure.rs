//! Finitely supported probability measures with rational weights, and the
//! measure-level views of persistence.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::action::{Action, Scale};
use crate::error::{Error, Result};
use crate::metric::PointSet;
use crate::perturb::Provenance;
use crate::rational::Rational;
use crate::report::CheckRecord;
use crate::stability::{equicontinuity_modulus, perturbations, ShadowingProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalMeasure {
    weights: Vec<Rational>,
}

impl RationalMeasure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Argument(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::Argument(format!("weights sum to {total}, not 1")));
        }
        Ok(RationalMeasure { weights })
    }

    pub fn dirac(n: usize, x: usize) -> Result<Self> {
        if x >= n {
            return Err(Error::Argument(format!("point {x} out of range")));
        }
        let mut weights = vec![Rational::zero(); n];
        weights[x] = Rational::one();
        Ok(RationalMeasure { weights })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support(&self) -> PointSet {
        (0..self.weights.len())
            .filter(|&x| self.weights[x].is_positive())
            .collect()
    }

    pub fn measure_of(&self, set: &PointSet) -> Rational {
        set.iter().filter_map(|&x| self.weights.get(x)).sum()
    }

    /// `Σ t_i μ_i` with `t_i ∈ (0, 1]` and `Σ t_i = 1`.
    pub fn convex_combination(parts: &[(Rational, &RationalMeasure)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::Argument("empty convex combination".into()));
        };
        let n = first.len();
        let mut weights = vec![Rational::zero(); n];
        let mut total = Rational::zero();
        for (t, mu) in parts {
            if !t.is_positive() || t > &Rational::one() {
                return Err(Error::Argument(format!("coefficient {t} outside (0, 1]")));
            }
            if mu.len() != n {
                return Err(Error::Argument("measures live on different spaces".into()));
            }
            total = &total + t;
            for (w, m) in weights.iter_mut().zip(&mu.weights) {
                *w = &*w + &(t * m);
            }
        }
        if total != Rational::one() {
            return Err(Error::Argument(format!("coefficients sum to {total}, not 1")));
        }
        Ok(RationalMeasure { weights })
    }
}

/// `None` when `μ(B(ε, Φ, Ψ)) = 1` for every Ψ of the profile, otherwise the
/// index of the first Ψ for which it fails.
pub fn persistent_measure_violation(mu: &RationalMeasure, profile: &ShadowingProfile) -> Option<usize> {
    profile.first_violation(&mu.support())
}

pub fn is_persistent_measure(
    mu: &RationalMeasure,
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
) -> Result<Option<usize>> {
    let ps = perturbations(phi, delta, radius, mode)?;
    let profile = ShadowingProfile::compute(phi, eps, &ps)?;
    Ok(persistent_measure_violation(mu, &profile))
}

/// `μ(P) = 1`
pub fn is_almost_persistent(mu: &RationalMeasure, persistent: &PointSet) -> bool {
    mu.support().is_subset(persistent)
}

/// A random measure whose support is a nonempty subset of `allowed`, with
/// weights on the lattice `(1/64)ℤ` (finer when the support is larger).
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize, allowed: &PointSet) -> Option<RationalMeasure> {
    let pool: Vec<usize> = allowed.iter().copied().collect();
    if pool.is_empty() {
        return None;
    }
    let k = rng.gen_range(1..=pool.len());
    let support: Vec<usize> = pool.choose_multiple(rng, k).copied().collect();
    let denom = 64.max(k);
    let mut units = vec![1usize; k];
    for _ in 0..denom - k {
        units[rng.gen_range(0..k)] += 1;
    }
    let mut weights = vec![Rational::zero(); n];
    for (x, u) in support.into_iter().zip(units) {
        weights[x] = Rational::new(u as i64, denom as i64);
    }
    Some(RationalMeasure { weights })
}

fn random_coefficients(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let denom = 64.max(k);
    let mut units = vec![1usize; k];
    for _ in 0..denom - k {
        units[rng.gen_range(0..k)] += 1;
    }
    units
        .into_iter()
        .map(|u| Rational::new(u as i64, denom as i64))
        .collect()
}

/// Dirac characterization of persistent points and convexity of persistent
/// measures at one scale.
pub fn verify_dirac_and_convexity(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let ps = perturbations(phi, delta, radius, mode)?;
    let profile = ShadowingProfile::compute(phi, eps, &ps)?;
    let n = phi.len();
    let p = profile.persistent_points().members;
    let dirac_side: PointSet = (0..n)
        .filter(|&x| {
            let m = RationalMeasure::dirac(n, x).expect("point in range");
            persistent_measure_violation(&m, &profile).is_none()
        })
        .collect();
    let mut record = CheckRecord::new(
        "dirac_characterization_and_convexity",
        "P = {x : m_x ∈ M_P}; M_P convex",
    )
    .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);
    for &x in p.symmetric_difference(&dirac_side) {
        record.counterexamples.push(json!({
            "kind": "dirac_mismatch",
            "x": x,
            "in_persistent_points": p.contains(&x),
        }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut combinations = 0usize;
    for _ in 0..trials {
        let k = rng.gen_range(1..=3);
        let parts: Option<Vec<RationalMeasure>> = (0..k).map(|_| random_measure(&mut rng, n, &p)).collect();
        let Some(parts) = parts else { break };
        let ts = random_coefficients(&mut rng, k);
        let pairs: Vec<(Rational, &RationalMeasure)> = ts.into_iter().zip(&parts).collect();
        let mu = RationalMeasure::convex_combination(&pairs)?;
        combinations += 1;
        if let Some(i) = persistent_measure_violation(&mu, &profile) {
            record.counterexamples.push(json!({
                "kind": "combination_not_persistent",
                "measure": mu.weights,
                "perturbation_index": i,
            }));
        }
    }
    record.details = json!({
        "persistent_points": p,
        "dirac_persistent": dirac_side,
        "combinations_checked": combinations,
        "perturbations": ps.len(),
        "only_base_perturbation": ps.only_base(),
    });
    Ok(record.conclude(delta.is_zero()))
}

/// `P = X` if and only if every measure is persistent, with Diracs standing
/// in for all of `M(X)` through the support argument.
pub fn verify_full_persistence_biconditional(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let ps = perturbations(phi, delta, radius, mode)?;
    let profile = ShadowingProfile::compute(phi, eps, &ps)?;
    let n = phi.len();
    let all = phi.space().all_points();
    let p = profile.persistent();
    let mut record = CheckRecord::new("full_persistence_iff_all_measures", "P = X ⇔ M_P = M(X)")
        .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);

    let diracs: Vec<RationalMeasure> = (0..n).map(|x| RationalMeasure::dirac(n, x)).collect::<Result<_>>()?;
    let all_diracs = diracs
        .iter()
        .all(|m| persistent_measure_violation(m, &profile).is_none());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut measures = diracs;
    for _ in 0..trials {
        measures.extend(random_measure(&mut rng, n, &all));
    }
    let first_bad = measures
        .iter()
        .find_map(|m| persistent_measure_violation(m, &profile).map(|i| (m, i)));

    if p == all {
        if let Some((m, i)) = first_bad {
            record.counterexamples.push(json!({
                "kind": "measure_not_persistent_although_p_is_x",
                "measure": m.weights,
                "perturbation_index": i,
            }));
        }
    }
    if all_diracs && p != all {
        record.counterexamples.push(json!({
            "kind": "all_diracs_persistent_but_p_not_x",
            "persistent_points": p,
        }));
    }
    record.details = json!({
        "persistent_points": p,
        "p_is_whole_space": p == all,
        "all_diracs_persistent": all_diracs,
        "measures_checked": measures.len(),
        "perturbations": ps.len(),
        "only_base_perturbation": ps.only_base(),
    });
    Ok(record.conclude(delta.is_zero()))
}

/// Measures supported on `(ε/2, η)`-persistent points are `(ε, η)`-persistent,
/// with `η = modulus(ε/2)` as in the stable ⇒ persistent chain.
pub fn verify_almost_persistent_measures(
    phi: &Action,
    eps: &Rational,
    radius: usize,
    mode: Provenance,
    trials: usize,
    seed: u64,
) -> Result<CheckRecord> {
    let half = eps.half();
    let eta = equicontinuity_modulus(phi, &half, radius)?;
    let ps = perturbations(phi, &eta, radius, mode)?;
    let p_half = ShadowingProfile::compute(phi, &half, &ps)?.persistent();
    let profile = ShadowingProfile::compute(phi, eps, &ps)?;
    let n = phi.len();
    let mut record = CheckRecord::new("almost_persistent_measures_are_persistent", "M_AP ⊆ M_P")
        .at(Scale::new(eps.clone(), eta.clone(), radius)?, mode);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for _ in 0..trials {
        let Some(mu) = random_measure(&mut rng, n, &p_half) else {
            break;
        };
        checked += 1;
        if let Some(i) = persistent_measure_violation(&mu, &profile) {
            record.counterexamples.push(json!({
                "measure": mu.weights,
                "perturbation_index": i,
                "psi": ps.actions[i].gen_images(),
            }));
        }
    }
    record.details = json!({
        "eta": eta,
        "persistent_half_eps": p_half,
        "measures_checked": checked,
        "perturbations": ps.len(),
        "only_base_perturbation": ps.only_base(),
    });
    Ok(record.conclude(eta.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupModel;
    use crate::metric::FiniteMetricSpace;
    use crate::perm::Perm;
    use crate::report::Verdict;
    use std::sync::Arc;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn l3() -> Action {
        let s = Arc::new(FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap());
        Action::identity(s, GroupModel::Cyclic { n: 2 })
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
    fn basic_measures() {
        let d0 = RationalMeasure::dirac(3, 0).unwrap();
        assert_eq!(d0.weights(), &[Rational::one(), Rational::zero(), Rational::zero()]);
        assert_eq!(d0.measure_of(&PointSet::from([0])), Rational::one());
        assert_eq!(d0.measure_of(&PointSet::new()), Rational::zero());
        let mu = RationalMeasure::new(vec![r("1/2"), r("1/4"), r("1/4")]).unwrap();
        assert_eq!(mu.measure_of(&PointSet::from([0, 2])), r("3/4"));
        assert_eq!(mu.measure_of(&mu.support()), Rational::one());
        assert!(RationalMeasure::new(vec![r("1/2"), r("1/4")]).is_err());
        assert!(RationalMeasure::new(vec![r("3/2"), r("-1/2")]).is_err());
    }

    #[test]
    fn convex_combinations() {
        let d0 = RationalMeasure::dirac(3, 0).unwrap();
        let d2 = RationalMeasure::dirac(3, 2).unwrap();
        let mix = RationalMeasure::convex_combination(&[(r("1/2"), &d0), (r("1/2"), &d2)]).unwrap();
        assert_eq!(mix.weights(), &[r("1/2"), Rational::zero(), r("1/2")]);
        assert_eq!(mix.support(), PointSet::from([0, 2]));
        assert_eq!(
            RationalMeasure::convex_combination(&[(Rational::one(), &d0)]).unwrap(),
            d0
        );
        assert!(RationalMeasure::convex_combination(&[(r("1/2"), &d0), (r("1/3"), &d2)]).is_err());
    }

    #[test]
    fn persistent_measures_on_l3() {
        let phi = l3();
        let half = r("1/2");
        let one = Rational::one();
        for x in 0..3 {
            let m = RationalMeasure::dirac(3, x).unwrap();
            assert_eq!(
                is_persistent_measure(&m, &phi, &half, &Rational::zero(), 1, EX).unwrap(),
                None
            );
        }
        // perturbation order: identity, swap(1,2), swap(0,1)
        let d0 = RationalMeasure::dirac(3, 0).unwrap();
        let d2 = RationalMeasure::dirac(3, 2).unwrap();
        assert_eq!(is_persistent_measure(&d0, &phi, &half, &one, 1, EX).unwrap(), Some(2));
        assert_eq!(is_persistent_measure(&d2, &phi, &half, &one, 1, EX).unwrap(), Some(1));
        assert_eq!(is_persistent_measure(&d0, &phi, &one, &one, 1, EX).unwrap(), None);
    }

    #[test]
    fn almost_persistent() {
        let mix = RationalMeasure::new(vec![r("1/2"), Rational::zero(), r("1/2")]).unwrap();
        assert!(!is_almost_persistent(&mix, &PointSet::from([2])));
        assert!(is_almost_persistent(&mix, &PointSet::from([0, 1, 2])));
        assert!(is_almost_persistent(
            &RationalMeasure::dirac(3, 2).unwrap(),
            &PointSet::from([2])
        ));
    }

    #[test]
    fn random_measures_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let allowed = PointSet::from([1, 3, 4]);
        for _ in 0..50 {
            let mu = random_measure(&mut rng, 6, &allowed).unwrap();
            assert_eq!(mu.weights().iter().sum::<Rational>(), Rational::one());
            assert!(mu.support().is_subset(&allowed) && !mu.support().is_empty());
        }
        assert!(random_measure(&mut rng, 6, &PointSet::new()).is_none());
    }

    #[test]
    fn measure_verifiers_on_l3() {
        let phi = l3();
        let half = r("1/2");
        let one = Rational::one();
        let rec = verify_dirac_and_convexity(&phi, &half, &one, 1, EX, 20, 1).unwrap();
        assert_eq!(rec.verdict, Verdict::Pass);
        let rec = verify_dirac_and_convexity(&phi, &half, &Rational::zero(), 1, EX, 20, 1).unwrap();
        assert_eq!(rec.verdict, Verdict::Vacuous);
        for eps in [&half, &one] {
            let rec = verify_full_persistence_biconditional(&phi, eps, &one, 1, EX, 20, 1).unwrap();
            assert_eq!(rec.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn almost_persistent_measures_on_c6() {
        let rec = verify_almost_persistent_measures(&c6(), &r("2"), 3, EX, 50, 3).unwrap();
        assert_eq!(rec.verdict, Verdict::Pass, "{rec:#?}");
    }
}
