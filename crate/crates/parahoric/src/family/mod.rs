//! Two-variable weight families for `n = 1`: power series over a small affinoid around an
//! algebraic weight, the universal distribution module, family eigen-lifts, family evaluation
//! maps and local charts of the slope-`<= h` eigenvariety.

pub mod affinoid;
pub mod weight;
pub mod module;
pub mod eigen;
pub mod chart;

pub use affinoid::TruncatedAffinoid;
pub use chart::{crossing_example, local_chart, ordinary_chart, ChartReport, LocalChart, CHART_SCHEMA};
pub use eigen::{family_eigen_lift, ordinary_block, FamilyEigenReport};
pub use module::{family_ev, specialize_symbol, square_defect_digits, FamilyGalois, FamilyModule};
pub use weight::{chi_omega, sp_lambda, weight_coordinates};

use crate::evalmaps::EvalError;
use crate::galdist::GalError;
use crate::padic::PadicError;
use crate::pardist::DistError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("outside the weight disc: {0}")]
    OutsideDisc(String),
    #[error("{0} is not a p-adic unit")]
    NotUnit(i128),
    #[error("{0} does not define a component")]
    NotAComponent(i128),
    #[error("level beta must be at least 1")]
    Beta,
    #[error("no slope gap at h = {0}")]
    NoSlopeGap(String),
    #[error("matrix is not invertible over the affinoid")]
    NotInvertible,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Gal(#[from] GalError),
}
