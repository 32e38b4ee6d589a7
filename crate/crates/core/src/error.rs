use thiserror::Error;

use crate::group::RelationViolation;
use crate::metric::MetricViolation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?} (expected \"p/q\" or \"p\")")]
pub struct ParseRationalError(pub String);

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    ParseRational(#[from] ParseRationalError),

    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },

    #[error("metric axioms violated: {}", format_violations(.0))]
    Metric(Vec<MetricViolation>),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("generator {generator} is not a bijection: {reason}")]
    NotBijective { generator: String, reason: String },

    #[error("group relation violated: {0}")]
    Relation(RelationViolation),

    #[error("exhaustive enumeration needs {bound} candidate combinations, above the cap of {cap}; use sampled mode")]
    EnumerationCap { bound: String, cap: u64 },

    #[error("degenerate scale: radius 0 leaves the perturbation constraint vacuous")]
    DegenerateScale,

    #[error("sampling saturated: no admissible perturbation found after {attempts} attempts")]
    SamplingSaturated { attempts: usize },

    #[error(
        "orbit of point {point}{} is not saturated at radius {radius}; increase the radius",
        match .perturbation { Some(i) => format!(" under perturbation #{i}"), None => String::new() }
    )]
    RadiusTooSmall {
        point: usize,
        perturbation: Option<usize>,
        radius: usize,
    },

    #[error("instance schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[MetricViolation]) -> String {
    let shown: Vec<String> = v.iter().take(5).map(|x| x.to_string()).collect();
    if v.len() > 5 {
        format!("{} (and {} more)", shown.join("; "), v.len() - 5)
    } else {
        shown.join("; ")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
