//! Finite-scale laboratory for topologically stable and persistent points of
//! group actions on finite metric spaces with exact rational distances.

pub mod action;
pub mod conjugacy;
pub mod error;
pub mod forge;
pub mod group;
pub mod harness;
pub mod instance;
pub mod measure;
pub mod metric;
pub mod perm;
pub mod perturb;
pub mod rational;
pub mod report;
pub mod stability;

pub use action::{Action, Orbit, Scale};
pub use error::{Error, Result};
pub use group::{CayleyBall, GroupElement, GroupModel, Letter};
pub use metric::{FiniteMetricSpace, PointSet};
pub use perm::Perm;
pub use perturb::{PerturbationSource, Perturbations, Provenance};
pub use rational::Rational;
