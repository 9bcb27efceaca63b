//! The universal weight character on `H(Z_p) = Z_p^x x Z_p^x` over the truncated affinoid and
//! specialization to nearby algebraic weights.

use super::affinoid::TruncatedAffinoid;
use super::FamilyError;
use crate::galdist::{check_odd_prime, teichmuller};
use crate::padic::PadicNumber;

/// Working precision used before rounding to the requested precision.
pub(crate) const GUARD: i64 = 12;

/// `e(r) = r - v_p(r!)`, the valuation bound for `y^r / r!` when `v_p(y) >= 1`.
pub fn divided_power_val(p: u64, r: u32) -> i64 {
    let (mut v, mut q) = (0i64, p as i64);
    while q <= r as i64 {
        v += r as i64 / q;
        q *= p as i64;
    }
    r as i64 - v
}

/// `min_{s >= r} e(s)`: a lower bound for `v_p` of every `y^s / s!` with `s >= r`, and the
/// precision of moment `M - r` in a truncated family distribution.
pub fn filtration_val(p: u64, r: u32) -> i64 {
    // e(s) >= s (p - 2) / (p - 1) >= s / 2, so s <= 2 e(r) + 1 suffices
    let hi = 2 * divided_power_val(p, r) as u32 + 1;
    (r..=hi.max(r)).map(|s| divided_power_val(p, s)).min().unwrap_or(0)
}

/// `binom(tau, n) y^n` for `n = 0, 1, ...` while the terms can matter at precision `prec`.
pub fn binomial_terms(y: &PadicNumber, tau: &TruncatedAffinoid, prec: i64) -> Result<Vec<TruncatedAffinoid>, FamilyError> {
    let p = y.prime();
    if !y.is_zero() && y.valuation().unwrap_or(0) < 1 {
        return Err(FamilyError::OutsideDisc("binomial series needs v_p(y) >= 1".into()));
    }
    let work = prec + GUARD;
    let one = TruncatedAffinoid::one(p, tau.degree(), work);
    let mut out = vec![one.clone()];
    let mut term = one.clone();
    let mut n = 1u32;
    while filtration_val(p, n) < work && !y.is_zero() {
        let shift = one.scale(&PadicNumber::from_i64(p, n as i64 - 1, work));
        let ratio = y.div(&PadicNumber::from_i64(p, n as i64, work + 64))?;
        term = term.mul(&tau.sub(&shift)).scale(&ratio);
        out.push(term.with_precision(work));
        n += 1;
    }
    Ok(out)
}

/// `(1 + y)^tau` for `v_p(y) >= 1`.
pub fn binomial_power(y: &PadicNumber, tau: &TruncatedAffinoid, prec: i64) -> Result<TruncatedAffinoid, FamilyError> {
    let terms = binomial_terms(y, tau, prec)?;
    let zero = TruncatedAffinoid::zero(y.prime(), tau.degree(), prec + GUARD);
    Ok(terms.iter().fold(zero, |acc, t| acc.add(t)).with_precision(prec))
}

/// `<a> = a / omega(a)` for a unit integer `a`.
pub fn angle(p: u64, a: i128, prec: i64) -> Result<PadicNumber, FamilyError> {
    let w = teichmuller(p, a, prec + GUARD)?;
    Ok(PadicNumber::from_i128(p, a, prec + GUARD).div(&w)?)
}

/// `<a>^tau`.
pub fn angle_power(p: u64, a: i128, tau: &TruncatedAffinoid, prec: i64) -> Result<TruncatedAffinoid, FamilyError> {
    let y = angle(p, a, prec)?.sub(&PadicNumber::one(p, prec + GUARD));
    binomial_power(&y, tau, prec)
}

/// The family `T1`, `T2` and `tau = T1 - T2`.
pub fn variables(p: u64, degree: u32, prec: i64) -> [TruncatedAffinoid; 3] {
    let t1 = TruncatedAffinoid::variable(p, degree, 0, prec);
    let t2 = TruncatedAffinoid::variable(p, degree, 1, prec);
    let tau = t1.sub(&t2);
    [t1, t2, tau]
}

/// `chi_Omega(h1, h2) = h1^{l1} h2^{l2} <h1>^{T1} <h2>^{T2}` for the base weight `(l1, l2)`.
pub fn chi_omega(p: u64, base: [i64; 2], degree: u32, h: [i128; 2], prec: i64) -> Result<TruncatedAffinoid, FamilyError> {
    check_odd_prime(p)?;
    let [t1, t2, _] = variables(p, degree, prec + GUARD);
    let mut out = TruncatedAffinoid::one(p, degree, prec + GUARD);
    for (i, t) in [t1, t2].iter().enumerate() {
        let hi = PadicNumber::from_i128(p, h[i], prec + GUARD);
        if hi.valuation() != Some(0) {
            return Err(FamilyError::NotUnit(h[i]));
        }
        out = out.mul(&angle_power(p, h[i], t, prec)?).scale(&hi.pow(base[i])?);
    }
    Ok(out.with_precision(prec))
}

/// Coordinates `T = lambda - lambda_pi` of an algebraic weight in the disc of the family.
pub fn weight_coordinates(p: u64, base: [i64; 2], lambda: [i64; 2]) -> Result<[i64; 2], FamilyError> {
    let t = [lambda[0] - base[0], lambda[1] - base[1]];
    for &ti in &t {
        if ti % (p as i64 - 1) != 0 || ti % p as i64 != 0 {
            return Err(FamilyError::OutsideDisc(format!(
                "weight {lambda:?} differs from {base:?} by {t:?}, which must be divisible by p(p - 1)"
            )));
        }
    }
    Ok(t)
}

/// Evaluation at the weight `lambda`.
pub fn sp_lambda(x: &TruncatedAffinoid, base: [i64; 2], lambda: [i64; 2]) -> Result<PadicNumber, FamilyError> {
    let p = x.prime();
    let t = weight_coordinates(p, base, lambda)?;
    let prec = x.precision();
    let t1 = PadicNumber::from_i64(p, t[0], prec + GUARD);
    let t2 = PadicNumber::from_i64(p, t[1], prec + GUARD);
    Ok(x.eval([&t1, &t2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `log(1 + y) = sum (-1)^{n+1} y^n / n`.
    fn log1p(y: &PadicNumber, prec: i64) -> PadicNumber {
        let p = y.prime();
        let mut acc = PadicNumber::zero(p, prec);
        let mut pw = PadicNumber::one(p, prec + 20);
        for n in 1..(4 * prec) {
            pw = pw.mul(y);
            let t = pw.div(&PadicNumber::from_i64(p, n, prec + 20)).unwrap();
            acc = if n % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
        }
        acc
    }

    #[test]
    fn divided_powers() {
        assert_eq!(divided_power_val(3, 0), 0);
        assert_eq!(divided_power_val(3, 3), 2);
        assert_eq!(divided_power_val(3, 9), 5);
        assert_eq!(divided_power_val(5, 10), 8);
        assert_eq!(divided_power_val(3, 8), 6);
        assert_eq!(filtration_val(3, 8), 5);
        assert_eq!(filtration_val(3, 14), 9);
        for r in 0..40 {
            assert!((r..200).all(|s| divided_power_val(3, s) >= filtration_val(3, r)));
        }
    }

    #[test]
    fn identity_maps_to_one() {
        let c = chi_omega(3, [0, 0], 3, [1, 1], 10).unwrap();
        assert!(c.agrees_with(&TruncatedAffinoid::one(3, 3, 10), 10));
    }

    #[test]
    fn linear_term_is_the_logarithm() {
        let p = 5;
        for h in [2i128, 7, 13] {
            let c = chi_omega(p, [0, 0], 3, [h, 1], 12).unwrap();
            let y = angle(p, h, 12).unwrap().sub(&PadicNumber::one(p, 24));
            assert!(c.coeff([1, 0]).agrees_with(&log1p(&y, 12), 10), "h = {h}");
            assert!(c.coeff([0, 1]).is_zero());
        }
    }

    #[test]
    fn specialization_recovers_the_algebraic_character() {
        let p = 3;
        let base = [2, 0];
        for lambda in [[2, 0], [8, 0], [2, -6], [14, 6]] {
            for h in [[2i128, 5], [7, 4], [-1, 10]] {
                let c = chi_omega(p, base, 4, h, 12).unwrap();
                let s = sp_lambda(&c, base, lambda).unwrap();
                let direct = PadicNumber::from_i128(p, h[0], 30)
                    .pow(lambda[0])
                    .unwrap()
                    .mul(&PadicNumber::from_i128(p, h[1], 30).pow(lambda[1]).unwrap());
                // truncation at degree 4 with v_p(T) >= 1 leaves an error of order p^5
                assert!(s.agrees_with(&direct, 5), "lambda {lambda:?}, h {h:?}");
            }
        }
        assert_eq!(sp_lambda(&chi_omega(p, base, 2, [2, 2], 8).unwrap(), base, base).unwrap().to_string(),
            PadicNumber::from_i64(p, 4, 8).to_string());
    }

    #[test]
    fn points_outside_the_disc_are_rejected() {
        let c = TruncatedAffinoid::one(3, 2, 10);
        assert!(sp_lambda(&c, [0, 0], [2, 0]).is_err());
        assert!(sp_lambda(&c, [0, 0], [3, 0]).is_err());
        assert!(sp_lambda(&c, [0, 0], [6, 0]).is_ok());
        assert!(chi_omega(2, [0, 0], 2, [1, 1], 5).is_err());
        assert!(chi_omega(3, [0, 0], 2, [3, 1], 5).is_err());
    }
}
