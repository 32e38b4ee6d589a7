//! δ-perturbations of an action.
//!
//! Only the action is perturbed; the metric stays fixed. A perturbation `Ψ`
//! is admissible when it is an action of the same group and
//! `d_J(Φ, Ψ) <= δ` with `J` the Cayley ball of radius `R`.
//!
//! Exhaustive mode lists every admissible `Ψ` exactly once. Since every
//! generator lies in the ball (`R >= 1`), `Ψ_s(x)` must lie in
//! `B[Φ_s(x), δ]`; bijections are assembled from those candidate sets by
//! backtracking, combined across generators, and then filtered by the group
//! relations and by the distance over the whole ball.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::group::CayleyBall;
use crate::metric::Bound;
use crate::perm::Perm;
use crate::rational::Rational;

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
pub const DEFAULT_RETRY_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Provenance {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

impl Provenance {
    pub fn is_exhaustive(&self) -> bool {
        matches!(self, Provenance::Exhaustive)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exhaustive => f.write_str("exhaustive"),
            Provenance::Sampled { seed, count } => write!(f, "sampled(seed={seed}, count={count})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerturbationSource {
    pub mode: Provenance,
    pub base: Action,
    pub delta: Rational,
    pub radius: usize,
    pub cap: u64,
    pub retry_cap: usize,
}

/// A materialized, deterministic list of perturbations.
#[derive(Debug, Clone)]
pub struct Perturbations {
    pub provenance: Provenance,
    pub delta: Rational,
    pub radius: usize,
    pub actions: Vec<Action>,
    pub notes: Vec<String>,
}

impl Perturbations {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Action> {
        self.actions.iter()
    }

    /// True when the only perturbation is the base action itself.
    pub fn only_base(&self) -> bool {
        self.actions.len() == 1
    }
}

impl PerturbationSource {
    pub fn exhaustive(base: Action, delta: Rational, radius: usize) -> Self {
        PerturbationSource {
            mode: Provenance::Exhaustive,
            base,
            delta,
            radius,
            cap: DEFAULT_ENUMERATION_CAP,
            retry_cap: DEFAULT_RETRY_CAP,
        }
    }

    pub fn sampled(base: Action, delta: Rational, radius: usize, seed: u64, count: usize) -> Self {
        PerturbationSource {
            mode: Provenance::Sampled { seed, count },
            base,
            delta,
            radius,
            cap: DEFAULT_ENUMERATION_CAP,
            retry_cap: DEFAULT_RETRY_CAP,
        }
    }

    pub fn with_mode(base: Action, delta: Rational, radius: usize, mode: Provenance) -> Self {
        match mode {
            Provenance::Exhaustive => Self::exhaustive(base, delta, radius),
            Provenance::Sampled { seed, count } => Self::sampled(base, delta, radius, seed, count),
        }
    }

    pub fn generate(&self) -> Result<Perturbations> {
        if self.delta.is_negative() {
            return Err(Error::Argument(format!("negative delta {}", self.delta)));
        }
        if self.radius == 0 {
            return Err(Error::DegenerateScale);
        }
        match self.mode {
            Provenance::Exhaustive => self.enumerate(),
            Provenance::Sampled { seed, count } => self.sample(seed, count),
        }
    }

    fn candidates(&self) -> Vec<Vec<Vec<usize>>> {
        let space = self.base.space();
        let bound = space.bound(&self.delta);
        self.base
            .generator_maps()
            .iter()
            .map(|p| {
                space
                    .points()
                    .map(|x| {
                        let c = p.apply(x);
                        space.points().filter(|&y| space.within(c, y, bound)).collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn enumerate(&self) -> Result<Perturbations> {
        let cands = self.candidates();
        let mut bound: u128 = 1;
        for per_gen in &cands {
            for c in per_gen {
                bound = bound.saturating_mul(c.len() as u128);
            }
        }
        if bound > self.cap as u128 {
            return Err(Error::EnumerationCap {
                bound: if bound == u128::MAX {
                    "more than 2^128".into()
                } else {
                    bound.to_string()
                },
                cap: self.cap,
            });
        }
        let per_gen: Vec<Vec<Perm>> = cands.iter().map(|c| bijections(c)).collect();
        let checker = Admissibility::new(&self.base, &self.delta, self.radius);
        let mut actions = Vec::new();
        let mut idx = vec![0usize; per_gen.len()];
        if per_gen.iter().any(|v| v.is_empty()) {
            unreachable!("the base generator map is always a candidate");
        }
        loop {
            let gens: Vec<Perm> = idx.iter().zip(&per_gen).map(|(&i, v)| v[i].clone()).collect();
            if let Some(psi) = checker.admit(gens) {
                actions.push(psi);
            }
            // odometer, last generator fastest
            let mut k = per_gen.len();
            loop {
                if k == 0 {
                    return Ok(Perturbations {
                        provenance: Provenance::Exhaustive,
                        delta: self.delta.clone(),
                        radius: self.radius,
                        actions,
                        notes: Vec::new(),
                    });
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < per_gen[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn sample(&self, seed: u64, count: usize) -> Result<Perturbations> {
        if count == 0 {
            return Err(Error::Argument("sample count must be at least 1".into()));
        }
        let cands = self.candidates();
        let checker = Admissibility::new(&self.base, &self.delta, self.radius);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen: HashSet<Vec<Perm>> = HashSet::new();
        let mut actions = vec![self.base.clone()];
        seen.insert(self.base.generator_maps().to_vec());
        let mut duplicates = 0usize;
        for _ in 1..count {
            let mut found = None;
            for _ in 0..self.retry_cap {
                let gens: Vec<Perm> = cands
                    .iter()
                    .map(|c| random_bijection(c, &mut rng).expect("base map is a candidate"))
                    .collect();
                if let Some(psi) = checker.admit(gens) {
                    found = Some(psi);
                    break;
                }
            }
            let psi = found.ok_or(Error::SamplingSaturated {
                attempts: self.retry_cap,
            })?;
            if seen.insert(psi.generator_maps().to_vec()) {
                actions.push(psi);
            } else {
                duplicates += 1;
            }
        }
        let mut notes = Vec::new();
        if duplicates > 0 {
            notes.push(format!(
                "{duplicates} of {count} draws duplicated an earlier perturbation and were collapsed"
            ));
        }
        Ok(Perturbations {
            provenance: Provenance::Sampled { seed, count },
            delta: self.delta.clone(),
            radius: self.radius,
            actions,
            notes,
        })
    }
}

/// Relation and ball-distance filter shared by both modes.
struct Admissibility<'a> {
    base: &'a Action,
    ball: CayleyBall,
    base_table: Vec<Perm>,
    bound: Bound,
}

impl<'a> Admissibility<'a> {
    fn new(base: &'a Action, delta: &Rational, radius: usize) -> Self {
        let ball = base.group().cayley_ball(radius);
        let base_table = base.ball_table(&ball);
        let bound = base.space().bound(delta);
        Admissibility {
            base,
            ball,
            base_table,
            bound,
        }
    }

    fn admit(&self, gens: Vec<Perm>) -> Option<Action> {
        let group = self.base.group();
        if group.first_violated_relation(&gens).is_some() {
            return None;
        }
        let psi = Action::from_perms(self.base.space().clone(), group, gens);
        let space = self.base.space();
        for (g, phi_g) in self.ball.iter().zip(&self.base_table) {
            let psi_g = psi.element_perm(g);
            if space
                .points()
                .any(|x| !space.within(phi_g.apply(x), psi_g.apply(x), self.bound))
            {
                return None;
            }
        }
        Some(psi)
    }
}

/// All bijections `p` with `p(x) ∈ cands[x]`, in lexicographic order of image arrays.
fn bijections(cands: &[Vec<usize>]) -> Vec<Perm> {
    fn go(x: usize, cands: &[Vec<usize>], used: &mut [bool], img: &mut Vec<usize>, out: &mut Vec<Perm>) {
        if x == cands.len() {
            out.push(Perm::from_images_unchecked(img.clone()));
            return;
        }
        for &y in &cands[x] {
            if !used[y] {
                used[y] = true;
                img.push(y);
                go(x + 1, cands, used, img, out);
                img.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, cands, &mut vec![false; cands.len()], &mut Vec::new(), &mut out);
    out
}

/// Randomized backtracking: candidate order is shuffled at every point, so
/// the first completed bijection is a random one.
fn random_bijection(cands: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Option<Perm> {
    fn go(x: usize, cands: &[Vec<usize>], used: &mut [bool], img: &mut Vec<usize>, rng: &mut ChaCha8Rng) -> bool {
        if x == cands.len() {
            return true;
        }
        let mut order = cands[x].clone();
        order.shuffle(rng);
        for y in order {
            if !used[y] {
                used[y] = true;
                img.push(y);
                if go(x + 1, cands, used, img, rng) {
                    return true;
                }
                img.pop();
                used[y] = false;
            }
        }
        false
    }
    let mut img = Vec::with_capacity(cands.len());
    if go(0, cands, &mut vec![false; cands.len()], &mut img, rng) {
        Some(Perm::from_images_unchecked(img))
    } else {
        None
    }
}
