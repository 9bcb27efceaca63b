//! Parahoric overconvergent cohomology for `GL(2n)` at desk scale: p-adic arithmetic,
//! weights, algebraic representations, distribution modules, Galois distributions,
//! evaluation maps with an `n = 1` p-adic L-function pipeline, and weight families.

pub mod padic;
pub mod weights;
pub mod repr;
pub mod pardist;
pub mod galdist;
pub mod evalmaps;
pub mod family;
