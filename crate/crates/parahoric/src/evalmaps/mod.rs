//! Evaluation maps for `n = 1` over `Q`: modular symbols with distribution coefficients,
//! Hecke operators, overconvergent lifting, `Ev_beta`, classical evaluations and the
//! resulting `p`-adic `L`-function, together with coinvariant quotients for abstract
//! component data.

pub mod classical;
pub mod cycle;
pub mod lift;
pub mod manin;
pub mod symbol;

pub use classical::{hecke_classical, p_stabilize, unit_root, ClassicalSpace, EigenSystem, HeckeData};
pub use cycle::{coinvariants, Coinvariants, CycleData, ToyClass};
pub use lift::{
    beta_independence_digits, classical_ev, ev_beta, ev_beta_delta, interpolation_factor, lift_noncritical, padic_l,
    specialize_symbol, LiftReport,
};
pub use manin::ManinData;
pub use symbol::{Coefficients, Moments, PolyDual, Rationals, Symbol};

use crate::galdist::GalError;
use crate::padic::PadicError;
use crate::pardist::DistError;
use crate::repr::ReprError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("level must be positive")]
    Level,
    #[error("Hecke eigenvalues at {ell} are not rational on a space of dimension {dim}")]
    Irrational { ell: u64, dim: usize },
    #[error("p = {0} divides the level")]
    PrimeDividesLevel(u64),
    #[error("a_p = {0} is divisible by p, so there is no unit root")]
    NotOrdinary(i64),
    #[error("j = {0} is not critical")]
    NotCritical(i64),
    #[error("level beta must be at least one")]
    Beta,
    #[error("{0} does not represent a component")]
    NotAComponent(i128),
    #[error("lifting equations are inconsistent with M = {0}")]
    Inconsistent(u32),
    #[error("truncation too small, need M >= {need}")]
    TruncationTooSmall { need: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Gal(#[from] GalError),
    #[error(transparent)]
    Repr(#[from] ReprError),
}
