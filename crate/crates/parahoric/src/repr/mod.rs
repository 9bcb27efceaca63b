//! Algebraic representations `V_lambda` of `GL(2n)` and `V_lambda^H` of `GL(n) x GL(n)`
//! realised as spans of polynomial functions, with the branching vectors `nu_{lambda,j}`.

mod branching;
pub mod group;
mod irrep;
pub mod monomial;

pub use branching::{
    diagonal_invariant, h_generators, parabolic, Branching, BranchingVector, DualVector, NuReport, TensorRep,
};
pub use group::IMat;
pub use irrep::{weyl_dim, Evaluator, PolyRep};

use crate::padic::PadicError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReprError {
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    #[error("translate span stopped short of the Weyl dimension {weyl}")]
    DimensionMismatch { weyl: usize },
    #[error("evaluation samples do not separate the representation")]
    SamplingDeficiency,
    #[error("p = {p} is too small for this weight: values on GL(2n, Z_p) fix coordinates only modulo p^(N - {loss})")]
    PrimeTooSmall { p: u64, loss: u32 },
    #[error("a sample has determinant divisible by p")]
    SampleNotInvertible,
    #[error("values are not those of an element of the representation")]
    NotInSpan,
    #[error("expected a one-dimensional invariant line, found dimension {0}")]
    KernelDimension(usize),
    #[error("{0} is not in the critical range")]
    NotCritical(i64),
    #[error("weight must be pure")]
    NotPure,
    #[error("dual vector belongs to a different representation")]
    HostMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}
