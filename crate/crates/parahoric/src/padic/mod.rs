//! Capped-precision p-adic arithmetic and linear algebra over `Z/p^N`.

mod number;
mod poly;
mod zmod;

pub use number::{max_relative_precision, PadicNumber};
pub use poly::{
    berkowitz, charpoly, charpoly_zmod, newton_polygon, solve_padic, Charpoly, NewtonPolygon, PadicMatrix, Ring, Slope, ZElem,
};
pub use zmod::{
    is_prime, kernel, kernel_filtered, kernel_from_smith, rank, scale_rows, smith, solve, solve_filtered, solve_with_smith, Kernel, KernelVector, Smith,
    Solution, ZMat, Zmod,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {p}^{n} does not fit in 62 bits")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("all significant digits lost")]
    PrecisionExhausted,
    #[error("leading coefficient vanishes to working precision")]
    LeadingUnknown,
    #[error("division by an element that vanishes to working precision")]
    DivisionByZero,
    #[error("value is not integral")]
    NotIntegral,
    #[error("linear system inconsistent at transformed row {row}")]
    Inconsistent { row: usize },
    #[error("matrix shape mismatch")]
    Shape,
    #[error("cannot parse p-adic literal {0:?}")]
    Parse(String),
}
