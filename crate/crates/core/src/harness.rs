//! Verification suites and scale-grid sweeps over one instance.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::Scale;
use crate::conjugacy::{verify_persistent_conjugacy, verify_stable_conjugacy, PointBijection};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::measure::{
    verify_almost_persistent_measures, verify_dirac_and_convexity, verify_full_persistence_biconditional,
};
use crate::metric::PointSet;
use crate::perturb::Provenance;
use crate::rational::Rational;
use crate::report::{CheckRecord, VerificationReport};
use crate::stability::{
    perturbations, verify_closure_shadow, verify_stable_implies_persistent, ShadowingProfile, StabilityProfile,
};

/// A uniformly random relabeling of `n` points.
pub fn random_bijection(n: usize, seed: u64) -> PointBijection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img: Vec<usize> = (0..n).collect();
    img.shuffle(&mut rng);
    PointBijection::new(img).expect("a shuffle is a bijection")
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub epsilon: Rational,
    pub delta: Rational,
    pub radius: usize,
    pub mode: Provenance,
    /// Random measures drawn by each measure check.
    pub trials: usize,
    /// Seeds the random measures and the relabeling used by the conjugacy checks.
    pub seed: u64,
    pub timings: bool,
}

fn timed(timings: bool, f: impl FnOnce() -> Result<CheckRecord>) -> Result<CheckRecord> {
    let start = Instant::now();
    let mut rec = f()?;
    if timings {
        rec.wall_time_ms = Some(start.elapsed().as_millis());
    }
    Ok(rec)
}

/// Runs every check at the scale in `opts`. Checks that derive their own
/// `δ` from the equicontinuity modulus ignore `opts.delta`.
pub fn verify(instance: &Instance, opts: &VerifyOptions) -> Result<VerificationReport> {
    let phi = &instance.action;
    let (e, d, r, m) = (&opts.epsilon, &opts.delta, opts.radius, opts.mode);
    let bij = random_bijection(phi.len(), opts.seed);
    let t = opts.timings;
    let checks = vec![
        timed(t, || verify_stable_conjugacy(phi, e, d, r, m, &bij))?,
        timed(t, || verify_persistent_conjugacy(phi, e, d, r, m, &bij))?,
        timed(t, || {
            verify_dirac_and_convexity(phi, e, d, r, m, opts.trials, opts.seed)
        })?,
        timed(t, || {
            verify_full_persistence_biconditional(phi, e, d, r, m, opts.trials, opts.seed)
        })?,
        timed(t, || verify_closure_shadow(phi, e, d, r, m))?,
        timed(t, || {
            verify_almost_persistent_measures(phi, e, r, m, opts.trials, opts.seed)
        })?,
        timed(t, || verify_stable_implies_persistent(phi, e, r, m))?,
    ];
    Ok(VerificationReport::new(instance.fingerprint(), checks))
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub epsilons: Vec<Rational>,
    pub deltas: Vec<Rational>,
    pub radii: Vec<usize>,
    pub mode: Provenance,
}

pub const SWEEP_CELL_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub scale: Scale,
    pub persistent: PointSet,
    /// `None` when some perturbed orbit is not saturated at this radius.
    pub stable: Option<PointSet>,
    pub perturbations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierEntry {
    pub epsilon: Rational,
    /// Largest grid `δ` keeping the point persistent.
    pub largest_delta: Option<Rational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Frontier {
    pub radius: usize,
    pub point: usize,
    pub entries: Vec<FrontierEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityViolation {
    pub law: String,
    pub smaller: Scale,
    pub larger: Scale,
    pub points: PointSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub instance_fingerprint: String,
    pub provenance: Provenance,
    pub cells: Vec<SweepCell>,
    pub frontiers: Vec<Frontier>,
    pub audits_run: usize,
    pub violations: Vec<MonotonicityViolation>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep report serializes")
    }
}

fn sorted_unique<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    out.sort();
    out.dedup();
    out
}

fn stable_or_unavailable(profile: Result<StabilityProfile>) -> Result<Option<PointSet>> {
    match profile {
        Ok(p) => Ok(Some(p.set.members)),
        Err(Error::RadiusTooSmall { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

struct Auditor {
    runs: usize,
    violations: Vec<MonotonicityViolation>,
}

impl Auditor {
    /// Expects `small ⊆ large`.
    fn nested(&mut self, law: &str, small: (&Scale, &PointSet), large: (&Scale, &PointSet)) {
        self.runs += 1;
        let missing: PointSet = small.1.difference(large.1).copied().collect();
        if !missing.is_empty() {
            self.violations.push(MonotonicityViolation {
                law: law.to_string(),
                smaller: small.0.clone(),
                larger: large.0.clone(),
                points: missing,
            });
        }
    }
}

/// Persistent and stable sets over a grid of scales, with monotonicity
/// audits and per-point persistence frontiers.
///
/// Laws audited: sets grow with `ε` (same family), persistent sets shrink as
/// `δ` grows (exhaustive families only, since those are nested), and sets
/// shrink as `R` grows when one family generated at the largest `R` is used
/// for every radius.
pub fn sweep(instance: &Instance, opts: &SweepOptions) -> Result<SweepReport> {
    let phi = &instance.action;
    let eps = sorted_unique(&opts.epsilons);
    let deltas = sorted_unique(&opts.deltas);
    let radii = sorted_unique(&opts.radii);
    if eps.is_empty() || deltas.is_empty() || radii.is_empty() {
        return Err(Error::Argument("every sweep grid needs at least one value".into()));
    }
    let cells_needed = eps.len() * deltas.len() * radii.len();
    if cells_needed > SWEEP_CELL_BUDGET {
        return Err(Error::Argument(format!(
            "sweep grid has {cells_needed} cells, above the budget of {SWEEP_CELL_BUDGET}"
        )));
    }
    let mut cells = Vec::with_capacity(cells_needed);
    let mut audit = Auditor {
        runs: 0,
        violations: Vec::new(),
    };
    // cells indexed [r][d][e]
    let mut grid: Vec<Vec<Vec<usize>>> = Vec::new();
    for &r in &radii {
        let mut by_delta = Vec::new();
        for d in &deltas {
            let ps = perturbations(phi, d, r, opts.mode)?;
            let mut by_eps = Vec::new();
            for e in &eps {
                let persistent = ShadowingProfile::compute(phi, e, &ps)?.persistent_points().members;
                let stable = stable_or_unavailable(StabilityProfile::compute(phi, e, &ps))?;
                by_eps.push(cells.len());
                cells.push(SweepCell {
                    scale: Scale::new(e.clone(), d.clone(), r)?,
                    persistent,
                    stable,
                    perturbations: ps.len(),
                });
            }
            by_delta.push(by_eps);
        }
        grid.push(by_delta);
    }

    for by_delta in &grid {
        for by_eps in by_delta {
            for w in by_eps.windows(2) {
                let (a, b) = (&cells[w[0]], &cells[w[1]]);
                audit.nested(
                    "persistent grows with epsilon",
                    (&a.scale, &a.persistent),
                    (&b.scale, &b.persistent),
                );
                if let (Some(sa), Some(sb)) = (&a.stable, &b.stable) {
                    audit.nested("stable grows with epsilon", (&a.scale, sa), (&b.scale, sb));
                }
            }
        }
        if opts.mode.is_exhaustive() {
            for w in by_delta.windows(2) {
                for (&small_d, &large_d) in w[0].iter().zip(&w[1]) {
                    let (a, b) = (&cells[large_d], &cells[small_d]);
                    audit.nested(
                        "persistent shrinks as delta grows",
                        (&a.scale, &a.persistent),
                        (&b.scale, &b.persistent),
                    );
                    if let (Some(sa), Some(sb)) = (&a.stable, &b.stable) {
                        audit.nested("stable shrinks as delta grows", (&a.scale, sa), (&b.scale, sb));
                    }
                }
            }
        }
    }

    let r_max = *radii.last().expect("nonempty");
    for d in &deltas {
        let family = perturbations(phi, d, r_max, opts.mode)?;
        for e in &eps {
            let sets = radii
                .iter()
                .map(|&r| {
                    let p = ShadowingProfile::compute_at(phi, e, &family, r)?.persistent();
                    Ok((Scale::new(e.clone(), d.clone(), r)?, p))
                })
                .collect::<Result<Vec<_>>>()?;
            for w in sets.windows(2) {
                audit.nested(
                    "persistent shrinks as radius grows (fixed family)",
                    (&w[1].0, &w[1].1),
                    (&w[0].0, &w[0].1),
                );
            }
        }
    }

    let mut frontiers = Vec::new();
    for (ri, &r) in radii.iter().enumerate() {
        for x in phi.space().points() {
            let entries = eps
                .iter()
                .enumerate()
                .map(|(ei, e)| FrontierEntry {
                    epsilon: e.clone(),
                    largest_delta: deltas
                        .iter()
                        .enumerate()
                        .rev()
                        .find(|&(di, _)| cells[grid[ri][di][ei]].persistent.contains(&x))
                        .map(|(_, d)| d.clone()),
                })
                .collect();
            frontiers.push(Frontier {
                radius: r,
                point: x,
                entries,
            });
        }
    }

    Ok(SweepReport {
        instance_fingerprint: instance.fingerprint(),
        provenance: opts.mode,
        cells,
        frontiers,
        audits_run: audit.runs,
        violations: audit.violations,
    })
}
