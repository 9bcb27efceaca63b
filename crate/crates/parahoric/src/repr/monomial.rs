//! Monomial coordinates for `n = 1`: restriction to `(1 x; 0 1)` identifies `V_lambda`
//! with polynomials in `x` of degree at most `lambda_1 - lambda_2`.

use super::irrep::PolyRep;
use super::ReprError;
use crate::padic::{PadicNumber, ZMat, Zmod};

fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// Coefficients of `nu_j(1 x; 0 1) = (-1)^j x^{j + lambda_1}` from `x^0` up.
pub fn nu_monomial(lambda: [i64; 2], j: i64) -> Result<Vec<i64>, ReprError> {
    if lambda[0] < lambda[1] {
        return Err(ReprError::NotDominant(lambda.to_vec()));
    }
    if j < -lambda[0] || j > -lambda[1] {
        return Err(ReprError::NotCritical(j));
    }
    let k = (lambda[0] - lambda[1]) as usize;
    let mut c = vec![0; k + 1];
    c[(j + lambda[0]) as usize] = if j.rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(c)
}

/// `mu(nu_j)` for `mu` given on the dual monomial basis.
pub fn kappa_monomial(mu: &[PadicNumber], lambda: [i64; 2], j: i64) -> Result<PadicNumber, ReprError> {
    let nu = nu_monomial(lambda, j)?;
    if mu.len() != nu.len() {
        return Err(ReprError::HostMismatch);
    }
    let i = (j + lambda[0]) as usize;
    Ok(mu[i].scale_i64(nu[i]))
}

/// Matrix taking translate coordinates of a `GL(2)` representation to monomial coordinates.
pub fn translate_to_monomial(rep: &PolyRep, z: &Zmod) -> Result<ZMat, ReprError> {
    let l = rep.lambda();
    if l.len() != 2 {
        return Err(ReprError::Unsupported("monomial coordinates exist for GL(2) only".into()));
    }
    let k = l[0] - l[1];
    let mut out = ZMat::zeros(k as usize + 1, rep.dim());
    for (i, t) in rep.translates().iter().enumerate() {
        // f0((1 x; 0 1) t) = (t11 + x t21)^k det(t)^{l2}
        let dt = z.pow_signed(z.reduce(t.det()), l[1]).ok_or(ReprError::SampleNotInvertible)?;
        for m in 0..=k {
            let c = binom(k, m) * t.get(0, 0).pow((k - m) as u32) * t.get(1, 0).pow(m as u32);
            out.set(m as usize, i, z.mul(z.reduce(c), dt));
        }
    }
    Ok(out)
}
