//! Group actions on finite metric spaces.
//!
//! An [`Action`] is given by one permutation per positive generator. Inverse
//! generators act by the inverse permutation, and a general element acts by
//! its canonical word read right to left, so `Φ_{gh} = Φ_g ∘ Φ_h`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{CayleyBall, GroupElement, GroupModel, Letter};
use crate::metric::{FiniteMetricSpace, PointSet};
use crate::perm::Perm;
use crate::rational::Rational;

#[derive(Clone)]
pub struct Action {
    space: Arc<FiniteMetricSpace>,
    group: GroupModel,
    gens: Vec<Perm>,
    inv: Vec<Perm>,
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Action")
            .field("group", &self.group)
            .field("gens", &self.gens)
            .finish()
    }
}

impl PartialEq for Action {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.gens == other.gens && self.space.is_same(&other.space)
    }
}

impl Eq for Action {}

impl Action {
    /// Builds an action and checks the action axioms: bijective generator
    /// maps, the group relations, and `Φ_g ∘ Φ_h = Φ_{gh}` on the radius-2 ball.
    pub fn new(space: Arc<FiniteMetricSpace>, group: GroupModel, gen_maps: Vec<Vec<usize>>) -> Result<Action> {
        group.validate()?;
        let n = space.len();
        for (i, img) in gen_maps.iter().enumerate() {
            if img.len() != n {
                return Err(Error::NotBijective {
                    generator: group.generator_name(i),
                    reason: format!("{} images for {} points", img.len(), n),
                });
            }
        }
        if let Some(v) = group.relations_hold(&gen_maps)? {
            return Err(Error::Relation(v));
        }
        let gens = gen_maps.into_iter().map(Perm::from_images_unchecked).collect();
        let action = Action::from_perms(space, group, gens);
        action.check_composition_law()?;
        Ok(action)
    }

    /// Assembles an action from permutations already known to satisfy the
    /// relations of `group`.
    pub(crate) fn from_perms(space: Arc<FiniteMetricSpace>, group: GroupModel, gens: Vec<Perm>) -> Action {
        let inv = gens.iter().map(Perm::inverse).collect();
        Action {
            space,
            group,
            gens,
            inv,
        }
    }

    pub fn identity(space: Arc<FiniteMetricSpace>, group: GroupModel) -> Action {
        let n = space.len();
        Action::from_perms(space, group, vec![Perm::identity(n); group.rank()])
    }

    fn check_composition_law(&self) -> Result<()> {
        let ball = self.group.cayley_ball(2);
        let tables: Vec<Perm> = ball.iter().map(|g| self.element_perm(g)).collect();
        for (i, g) in ball.iter().enumerate() {
            for (j, h) in ball.iter().enumerate() {
                let gh = self.element_perm(&self.group.compose(g, h)?);
                if let Some(x) = tables[i].after(&tables[j]).first_difference(&gh) {
                    return Err(Error::Relation(crate::group::RelationViolation {
                        relation: format!("Φ_({g})∘Φ_({h}) = Φ_({g})({h})"),
                        point: x,
                    }));
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn group(&self) -> GroupModel {
        self.group
    }

    pub fn generator_maps(&self) -> &[Perm] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    #[inline]
    fn apply_letter(&self, l: Letter, x: usize) -> usize {
        let i = l.generator as usize;
        if l.inverse {
            self.inv[i].apply(x)
        } else {
            self.gens[i].apply(x)
        }
    }

    pub fn letter_perm(&self, l: Letter) -> &Perm {
        let i = l.generator as usize;
        if l.inverse {
            &self.inv[i]
        } else {
            &self.gens[i]
        }
    }

    /// `Φ_g(x)`
    pub fn evaluate(&self, g: &GroupElement, x: usize) -> Result<usize> {
        self.group.check(g)?;
        if x >= self.len() {
            return Err(Error::Argument(format!("point {x} out of range")));
        }
        Ok(self.eval_unchecked(g, x))
    }

    fn eval_unchecked(&self, g: &GroupElement, x: usize) -> usize {
        g.canonical_word().iter().rev().fold(x, |y, &l| self.apply_letter(l, y))
    }

    /// The permutation `Φ_g` as a whole.
    pub fn element_perm(&self, g: &GroupElement) -> Perm {
        let w = g.canonical_word();
        let img = (0..self.len())
            .map(|x| w.iter().rev().fold(x, |y, &l| self.apply_letter(l, y)))
            .collect();
        Perm::from_images_unchecked(img)
    }

    /// `Φ_g` for every `g` of the ball, in ball order.
    pub fn ball_table(&self, ball: &CayleyBall) -> Vec<Perm> {
        ball.iter().map(|g| self.element_perm(g)).collect()
    }

    pub(crate) fn check_compatible(&self, other: &Action) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Argument(format!(
                "actions of different groups: {:?} vs {:?}",
                self.group, other.group
            )));
        }
        if !self.space.is_same(&other.space) {
            return Err(Error::Argument("actions on different spaces".into()));
        }
        Ok(())
    }

    /// `d_J(Φ, Ψ) = max_{j ∈ J, x ∈ X} d(Φ_j(x), Ψ_j(x))`, zero for empty `J`.
    pub fn distance(&self, other: &Action, index_set: &[GroupElement]) -> Result<Rational> {
        self.check_compatible(other)?;
        let mut best = 0usize;
        for g in index_set {
            self.group.check(g)?;
            let a = self.element_perm(g);
            let b = other.element_perm(g);
            for x in self.space.points() {
                best = best.max(self.space.rank(a.apply(x), b.apply(x)));
            }
        }
        Ok(self.space.levels()[best].clone())
    }

    /// Points reached from `x` by the ball of the given radius, plus whether
    /// that set is closed under every generator (then it is the full orbit).
    pub fn orbit(&self, x: usize, radius: usize) -> Result<Orbit> {
        if x >= self.len() {
            return Err(Error::Argument(format!("point {x} out of range")));
        }
        let ball = self.group.cayley_ball(radius);
        let points: PointSet = ball.iter().map(|g| self.eval_unchecked(g, x)).collect();
        let saturated = self.is_invariant(&points);
        Ok(Orbit { points, saturated })
    }

    pub fn is_invariant(&self, set: &PointSet) -> bool {
        set.iter()
            .all(|&z| self.gens.iter().chain(&self.inv).all(|p| set.contains(&p.apply(z))))
    }

    /// `R ∘ Φ_s ∘ R⁻¹` on every generator.
    pub(crate) fn conjugated(&self, forward: &Perm, target: Arc<FiniteMetricSpace>) -> Action {
        let backward = forward.inverse();
        let gens = self.gens.iter().map(|p| forward.after(&p.after(&backward))).collect();
        Action::from_perms(target, self.group, gens)
    }

    /// Generator images as plain arrays, keyed by generator name order.
    pub fn gen_images(&self) -> Vec<Vec<usize>> {
        self.gens.iter().map(|p| p.images().to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub points: PointSet,
    pub saturated: bool,
}

/// Shadowing radius, perturbation radius and Cayley-ball truncation radius.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Scale {
    pub epsilon: Rational,
    pub delta: Rational,
    pub radius: usize,
}

impl Scale {
    pub fn new(epsilon: Rational, delta: Rational, radius: usize) -> Result<Scale> {
        if epsilon.is_negative() || delta.is_negative() {
            return Err(Error::Argument(format!(
                "scale parameters must be nonnegative (epsilon = {epsilon}, delta = {delta})"
            )));
        }
        Ok(Scale { epsilon, delta, radius })
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(ε={}, δ={}, R={})", self.epsilon, self.delta, self.radius)
    }
}

/// Smallest ball radius whose orbits are saturated for every action of
/// `group` on `n` points.
pub fn saturating_radius(group: GroupModel, n: usize) -> usize {
    match group {
        GroupModel::Cyclic { n: k } => (k as usize).min(n) / 2,
        GroupModel::Integers => n / 2,
        GroupModel::FreeAbelian { .. } | GroupModel::Free { .. } => n.saturating_sub(1),
    }
}
