//! Finite metric spaces with exact rational distances.
//!
//! Besides the dense distance matrix, a space keeps the sorted list of
//! distinct distances ("levels") and a rank matrix into it. All hot-path
//! comparisons of the form `d(x, y) <= eps` are answered by comparing ranks,
//! which keeps the set computations exact without touching big integers.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Point sets are kept ordered so every report is deterministic.
pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Diagonal,
    Symmetry,
    Positivity,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Diagonal => "diagonal",
            Axiom::Symmetry => "symmetry",
            Axiom::Positivity => "positivity",
            Axiom::Triangle => "triangle",
        };
        f.write_str(s)
    }
}

/// A violated metric axiom together with the indices that witness it.
///
/// Diagonal witnesses are `[i]`, symmetry and positivity `[i, j]` with
/// `i < j`, and triangle witnesses `[i, j, k]` with
/// `dist[i][k] > dist[i][j] + dist[j][k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricViolation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.axiom, self.indices)
    }
}

/// Checks the four metric axioms on a square matrix.
///
/// Returns every violation found; an empty list means the matrix is a metric.
/// A non-square matrix is a structural error rather than a violation.
pub fn validate_metric(dist: &[Vec<Rational>]) -> Result<Vec<MetricViolation>> {
    let n = dist.len();
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        if !dist[i][i].is_zero() {
            out.push(MetricViolation {
                axiom: Axiom::Diagonal,
                indices: vec![i],
            });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] != dist[j][i] {
                out.push(MetricViolation {
                    axiom: Axiom::Symmetry,
                    indices: vec![i, j],
                });
            }
            if !dist[i][j].is_positive() || !dist[j][i].is_positive() {
                out.push(MetricViolation {
                    axiom: Axiom::Positivity,
                    indices: vec![i, j],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][k] > &dist[i][j] + &dist[j][k] {
                    out.push(MetricViolation {
                        axiom: Axiom::Triangle,
                        indices: vec![i, j, k],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A comparison threshold resolved against a space's distance levels.
///
/// `d(x, y) <= eps` holds exactly when the rank of `d(x, y)` is below
/// `levels_at_most`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    levels_at_most: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    labels: Option<Vec<String>>,
    dist: Vec<Vec<Rational>>,
    levels: Vec<Rational>,
    rank: Vec<u32>,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("n", &self.len())
            .field("labels", &self.labels)
            .field("dist", &self.dist)
            .finish()
    }
}

impl FiniteMetricSpace {
    /// Builds a space, rejecting matrices that fail any metric axiom.
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self> {
        if dist.is_empty() {
            return Err(Error::Argument("a metric space needs at least one point".into()));
        }
        let violations = validate_metric(&dist)?;
        if !violations.is_empty() {
            return Err(Error::Metric(violations));
        }
        let levels: Vec<Rational> = dist
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let rank = dist
            .iter()
            .flatten()
            .map(|d| levels.binary_search(d).expect("level present") as u32)
            .collect();
        Ok(FiniteMetricSpace {
            labels: None,
            dist,
            levels,
            rank,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Argument(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Integer-valued matrix convenience constructor.
    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn dist(&self, x: usize, y: usize) -> &Rational {
        &self.dist[x][y]
    }

    /// Distinct distances realized in the space, ascending (starts with 0).
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn diameter(&self) -> &Rational {
        self.levels.last().expect("nonempty space")
    }

    #[inline]
    pub fn rank(&self, x: usize, y: usize) -> usize {
        self.rank[x * self.len() + y] as usize
    }

    pub fn bound(&self, eps: &Rational) -> Bound {
        Bound {
            levels_at_most: self.levels.partition_point(|l| l <= eps),
        }
    }

    #[inline]
    pub fn within(&self, x: usize, y: usize, bound: Bound) -> bool {
        self.rank(x, y) < bound.levels_at_most
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn all_points(&self) -> PointSet {
        self.points().collect()
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.len() {
            return Err(Error::Argument(format!(
                "point {x} out of range for a space of {} points",
                self.len()
            )));
        }
        Ok(())
    }

    fn check_radius(radius: &Rational) -> Result<()> {
        if radius.is_negative() {
            return Err(Error::Argument(format!("negative radius {radius}")));
        }
        Ok(())
    }

    /// `{ y : d(center, y) <= radius }`
    pub fn closed_ball(&self, center: usize, radius: &Rational) -> Result<PointSet> {
        self.check_point(center)?;
        Self::check_radius(radius)?;
        Ok(self.points().filter(|&y| &self.dist[center][y] <= radius).collect())
    }

    /// `{ y : d(center, y) < radius }`
    pub fn open_ball(&self, center: usize, radius: &Rational) -> Result<PointSet> {
        self.check_point(center)?;
        Self::check_radius(radius)?;
        Ok(self.points().filter(|&y| &self.dist[center][y] < radius).collect())
    }

    pub fn is_same(&self, other: &FiniteMetricSpace) -> bool {
        std::ptr::eq(self, other) || self.dist == other.dist
    }
}
