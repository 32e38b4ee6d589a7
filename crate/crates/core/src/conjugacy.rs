//! Transport of spaces, actions and perturbation families along a bijection
//! of points, and the conjugacy invariance of stable and persistent sets.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::json;

use crate::action::{Action, Scale};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PointSet};
use crate::perm::Perm;
use crate::perturb::{Perturbations, Provenance};
use crate::rational::Rational;
use crate::report::CheckRecord;
use crate::stability::{perturbations, ShadowingProfile, StabilityProfile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointBijection {
    forward: Perm,
    backward: Perm,
}

impl PointBijection {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let forward = Perm::from_images(images).map_err(Error::Argument)?;
        let backward = forward.inverse();
        Ok(PointBijection { forward, backward })
    }

    pub fn identity(n: usize) -> Self {
        PointBijection {
            forward: Perm::identity(n),
            backward: Perm::identity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.forward.apply(x)
    }

    pub fn apply_inverse(&self, y: usize) -> usize {
        self.backward.apply(y)
    }

    pub fn inverse(&self) -> Self {
        PointBijection {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn images(&self) -> &[usize] {
        self.forward.images()
    }

    pub fn image_of(&self, set: &PointSet) -> PointSet {
        set.iter().map(|&x| self.apply(x)).collect()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::Argument(format!(
                "bijection on {} points applied to a space of {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// The metric on the codomain that makes `R` an isometry.
pub fn pushforward_space(space: &FiniteMetricSpace, r: &PointBijection) -> Result<FiniteMetricSpace> {
    r.check_len(space.len())?;
    let n = space.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| space.dist(r.apply_inverse(i), r.apply_inverse(j)).clone())
                .collect()
        })
        .collect();
    let out = FiniteMetricSpace::new(rows)?;
    match space.labels() {
        Some(labels) => out.with_labels((0..n).map(|i| labels[r.apply_inverse(i)].clone()).collect()),
        None => Ok(out),
    }
}

fn conjugate_onto(phi: &Action, r: &PointBijection, target: &Arc<FiniteMetricSpace>) -> Action {
    phi.conjugated(&r.forward, target.clone())
}

/// `RΦR⁻¹` on the pushforward space.
pub fn conjugate_action(phi: &Action, r: &PointBijection) -> Result<Action> {
    let target = Arc::new(pushforward_space(phi.space(), r)?);
    Ok(conjugate_onto(phi, r, &target))
}

/// Conjugates every member of a family; the base action stays first.
pub fn transport_perturbations(
    ps: &Perturbations,
    r: &PointBijection,
    target: &Arc<FiniteMetricSpace>,
) -> Perturbations {
    Perturbations {
        provenance: ps.provenance,
        delta: ps.delta.clone(),
        radius: ps.radius,
        actions: ps.iter().map(|a| conjugate_onto(a, r, target)).collect(),
        notes: ps.notes.clone(),
    }
}

struct Transported {
    psi_target: Action,
    source: Perturbations,
    target: Perturbations,
    family_mismatch: Option<serde_json::Value>,
}

/// Builds both families. Exhaustive families are enumerated on each side
/// separately and compared; sampled families are transported.
fn transport(
    phi: &Action,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
    r: &PointBijection,
) -> Result<Transported> {
    r.check_len(phi.len())?;
    let target_space = Arc::new(pushforward_space(phi.space(), r)?);
    let psi_target = conjugate_onto(phi, r, &target_space);
    let source = perturbations(phi, delta, radius, mode)?;
    let carried = transport_perturbations(&source, r, &target_space);
    let mut family_mismatch = None;
    let target = if mode.is_exhaustive() {
        let own = perturbations(&psi_target, delta, radius, mode)?;
        let a: BTreeSet<Vec<Vec<usize>>> = carried.iter().map(Action::gen_images).collect();
        let b: BTreeSet<Vec<Vec<usize>>> = own.iter().map(Action::gen_images).collect();
        if a != b {
            family_mismatch = Some(json!({
                "kind": "perturbation_family_not_transported",
                "only_transported": a.difference(&b).collect::<Vec<_>>(),
                "only_enumerated": b.difference(&a).collect::<Vec<_>>(),
            }));
        }
        own
    } else {
        carried
    };
    Ok(Transported {
        psi_target,
        source,
        target,
        family_mismatch,
    })
}

/// `T(RΦR⁻¹) = R(T(Φ))` at one scale.
pub fn verify_stable_conjugacy(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
    r: &PointBijection,
) -> Result<CheckRecord> {
    let t = transport(phi, delta, radius, mode, r)?;
    let left = r.image_of(&StabilityProfile::compute(phi, eps, &t.source)?.set.members);
    let right = StabilityProfile::compute(&t.psi_target, eps, &t.target)?.set.members;
    let mut record = CheckRecord::new("stable_points_conjugacy_invariant", "T(RΦR⁻¹) = R(T(Φ))")
        .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);
    record.counterexamples.extend(t.family_mismatch);
    if left != right {
        record.counterexamples.push(json!({
            "kind": "set_image_mismatch",
            "image_of_stable": left,
            "stable_of_conjugate": right,
        }));
    }
    record.details = json!({
        "bijection": r.images(),
        "image_of_stable": left,
        "stable_of_conjugate": right,
        "perturbations": t.source.len(),
    });
    Ok(record.conclude(false))
}

/// `P(RΦR⁻¹) = R(P(Φ))` at one scale, plus the pointwise reading of full
/// persistence: when `P = X`, every singleton is persistent.
pub fn verify_persistent_conjugacy(
    phi: &Action,
    eps: &Rational,
    delta: &Rational,
    radius: usize,
    mode: Provenance,
    r: &PointBijection,
) -> Result<CheckRecord> {
    let t = transport(phi, delta, radius, mode, r)?;
    let profile = ShadowingProfile::compute(phi, eps, &t.source)?;
    let p = profile.persistent_points().members;
    let left = r.image_of(&p);
    let right = ShadowingProfile::compute(&t.psi_target, eps, &t.target)?
        .persistent_points()
        .members;
    let mut record = CheckRecord::new("persistent_points_conjugacy_invariant", "P(RΦR⁻¹) = R(P(Φ))")
        .at(Scale::new(eps.clone(), delta.clone(), radius)?, mode);
    record.counterexamples.extend(t.family_mismatch);
    if left != right {
        record.counterexamples.push(json!({
            "kind": "set_image_mismatch",
            "image_of_persistent": left,
            "persistent_of_conjugate": right,
        }));
    }
    let whole = p.len() == phi.len();
    if whole {
        for x in phi.space().points() {
            if let Some(i) = profile.first_violation(&PointSet::from([x])) {
                record.counterexamples.push(json!({
                    "kind": "singleton_not_persistent",
                    "x": x,
                    "perturbation_index": i,
                }));
            }
        }
    }
    record.details = json!({
        "bijection": r.images(),
        "image_of_persistent": left,
        "persistent_of_conjugate": right,
        "fully_persistent": whole,
        "perturbations": t.source.len(),
    });
    Ok(record.conclude(false))
}
