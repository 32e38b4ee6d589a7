//! Canonical instances: the small named fixtures and the finite truncation
//! of the periodic-core example with isolated levels accumulating on it.

use std::sync::Arc;

use serde::Serialize;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::group::GroupModel;
use crate::metric::FiniteMetricSpace;
use crate::perm::Perm;
use crate::rational::Rational;

/// `t` core points on a periodic orbit with metric `d0`, plus the points
/// `q(i, k, j)` for `i ∈ {1, 2, 3}`, `1 <= k <= K`, `0 <= j < t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicCoreConfig {
    pub t: usize,
    pub k_max: usize,
    pub core: Vec<Vec<Rational>>,
}

impl PeriodicCoreConfig {
    /// Core metric `min(|j − r|, t − |j − r|) / 8`.
    pub fn new(t: usize, k_max: usize) -> Self {
        let core = (0..t)
            .map(|j| {
                (0..t)
                    .map(|r| {
                        let d = j.abs_diff(r);
                        Rational::new(d.min(t - d) as i64, 8)
                    })
                    .collect()
            })
            .collect();
        PeriodicCoreConfig { t, k_max, core }
    }

    pub fn with_core(t: usize, k_max: usize, core: Vec<Vec<Rational>>) -> Self {
        PeriodicCoreConfig { t, k_max, core }
    }

    pub fn len(&self) -> usize {
        self.t + 3 * self.k_max * self.t
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn core_index(&self, j: usize) -> usize {
        j
    }

    /// Index of `q(i, k, j)`, with `i` in 1..=3 and `k` in 1..=K.
    pub fn q_index(&self, i: usize, k: usize, j: usize) -> usize {
        assert!((1..=3).contains(&i) && (1..=self.k_max).contains(&k) && j < self.t);
        self.t + ((i - 1) * self.k_max + (k - 1)) * self.t + j
    }

    /// Inverse of [`q_index`](Self::q_index); `None` on core points.
    pub fn q_coords(&self, x: usize) -> Option<(usize, usize, usize)> {
        let y = x.checked_sub(self.t)?;
        let j = y % self.t;
        let ik = y / self.t;
        Some((ik / self.k_max + 1, ik % self.k_max + 1, j))
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 || self.k_max == 0 {
            return Err(Error::Argument("period and depth must be at least 1".into()));
        }
        if self.core.len() != self.t || self.core.iter().any(|r| r.len() != self.t) {
            return Err(Error::Argument(format!("core metric must be {0}×{0}", self.t)));
        }
        crate::metric::FiniteMetricSpace::new(self.core.clone())?;
        for j in 0..self.t {
            for r in 0..self.t {
                if self.core[(j + 1) % self.t][(r + 1) % self.t] != self.core[j][r] {
                    return Err(Error::Argument(format!(
                        "core shift is not an isometry: d0({j},{r}) differs from d0 of the shifted pair"
                    )));
                }
            }
        }
        Ok(())
    }

    fn label(&self, x: usize) -> String {
        match self.q_coords(x) {
            None => format!("p{x}"),
            Some((i, k, j)) => format!("q({i},{k},{j})"),
        }
    }

    fn distance(&self, a: usize, b: usize) -> Rational {
        if a == b {
            return Rational::zero();
        }
        let inv = |k: usize| Rational::new(1, k as i64);
        match (self.q_coords(a), self.q_coords(b)) {
            (None, None) => self.core[a][b].clone(),
            (Some((_, k, j)), None) => &inv(k) + &self.core[j][b],
            (None, Some((_, m, r))) => &inv(m) + &self.core[a][r],
            (Some((_, k, j)), Some((_, m, r))) if k == m && j == r => inv(k),
            (Some((_, k, j)), Some((_, m, r))) => &(&inv(k) + &inv(m)) + &self.core[j][r],
        }
    }
}

/// Builds the space and the `ℤ`-action generated by `f`: the core shift on
/// the core and `q(i, k, j) ↦ q(i, k, j + 1 mod t)`.
pub fn build_periodic_core_example(config: &PeriodicCoreConfig) -> Result<Action> {
    config.validate()?;
    let n = config.len();
    let rows = (0..n)
        .map(|a| (0..n).map(|b| config.distance(a, b)).collect())
        .collect();
    let space = FiniteMetricSpace::new(rows)?.with_labels((0..n).map(|x| config.label(x)).collect())?;
    let f: Vec<usize> = (0..n)
        .map(|x| match config.q_coords(x) {
            None => (x + 1) % config.t,
            Some((i, k, j)) => config.q_index(i, k, (j + 1) % config.t),
        })
        .collect();
    Action::new(Arc::new(space), GroupModel::Integers, vec![f])
}

/// Self-checks of a built example: every point `z = q(i, k, j)` and every
/// iterate `f^s(z)` has a singleton open ball of each radius in `radii(k)`.
/// Returns the first offending `(point, radius)`.
pub fn singleton_ball_violation(
    config: &PeriodicCoreConfig,
    action: &Action,
    radii: impl Fn(usize) -> Vec<Rational>,
) -> Result<Option<(usize, Rational)>> {
    let space = action.space();
    let f = &action.generator_maps()[0];
    for x in config.t..config.len() {
        let (_, k, _) = config.q_coords(x).expect("q point");
        let mut z = x;
        for _ in 0..config.t {
            for eps in radii(k) {
                let ball = space.open_ball(z, &eps)?;
                if ball.len() != 1 || !ball.contains(&z) {
                    return Ok(Some((z, eps)));
                }
            }
            z = f.apply(z);
        }
    }
    Ok(None)
}

pub const NAMED: [&str; 2] = ["L3", "C6"];

/// `L3`: the path `0 – 1 – 2` with unit edges under the trivial action of
/// `ℤ/2`. `C6`: six points on a circle with the arc metric, rotated by `ℤ`.
pub fn build_named(name: &str) -> Result<Action> {
    match name {
        "L3" => {
            let space = FiniteMetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])?;
            Ok(Action::identity(Arc::new(space), GroupModel::Cyclic { n: 2 }))
        }
        "C6" => {
            let rows = (0..6i64)
                .map(|i| {
                    (0..6i64)
                        .map(|j| Rational::from_integer((i - j).abs().min(6 - (i - j).abs())))
                        .collect()
                })
                .collect();
            let space = FiniteMetricSpace::new(rows)?;
            Action::new(
                Arc::new(space),
                GroupModel::Integers,
                vec![Perm::rotation(6, 1).images().to_vec()],
            )
        }
        other => Err(Error::Argument(format!(
            "unknown instance {other:?} (expected one of {})",
            NAMED.join(", ")
        ))),
    }
}
