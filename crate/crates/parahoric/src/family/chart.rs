//! Local charts of the slope-`<= h` part over the truncated affinoid: the characteristic
//! polynomial of `U_p`, its slope factorization lifted from the base point, and the freeness
//! of the localization at a chosen eigenvalue.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::affinoid::TruncatedAffinoid;
use super::eigen::{family_eigen_lift, ordinary_block, FamilyEigenReport};
use super::module::FamilyModule;
use super::FamilyError;
use crate::padic::{berkowitz, newton_polygon, solve_padic, PadicNumber, Ring, Slope};

pub const CHART_SCHEMA: &str = "parahoric.chart.v1";

#[derive(Clone, Debug)]
pub struct LocalChart {
    /// Monic characteristic polynomial, constant term first.
    pub charpoly: Vec<TruncatedAffinoid>,
    /// Slopes of the characteristic polynomial at the base point.
    pub slopes: Vec<Slope>,
    /// Monic factor whose roots have slope `<= h`; the chart algebra is `O[U] / (factor(U))`.
    pub factor: Vec<TruncatedAffinoid>,
    pub cofactor: Vec<TruncatedAffinoid>,
    /// Multiplicity of the chosen eigenvalue as a root of the factor at the base point.
    pub multiplicity: usize,
    pub free_rank_one: bool,
    /// The eigenvalue over the affinoid when the chart is free of rank one.
    pub eigenvalue: Option<TruncatedAffinoid>,
}

/// JSON form of a chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartReport {
    pub schema: String,
    pub slopes: Vec<String>,
    pub free_rank_one: bool,
    pub charpoly_coeffs: Vec<Vec<String>>,
    pub factor_coeffs: Vec<Vec<String>>,
    pub multiplicity: usize,
    pub eigenvalue: Option<Vec<String>>,
    /// Monomials `T1^i T2^j` labelling each coefficient list.
    pub monomials: Vec<[u32; 2]>,
}

fn slope_string(s: &Slope) -> String {
    match s {
        Slope::Finite(r) => r.to_string(),
        Slope::Infinite => "inf".into(),
    }
}

impl LocalChart {
    pub fn report(&self) -> ChartReport {
        let strings = |v: &[TruncatedAffinoid]| v.iter().map(|x| x.to_strings()).collect();
        ChartReport {
            schema: CHART_SCHEMA.into(),
            slopes: self.slopes.iter().map(slope_string).collect(),
            free_rank_one: self.free_rank_one,
            charpoly_coeffs: strings(&self.charpoly),
            factor_coeffs: strings(&self.factor),
            multiplicity: self.multiplicity,
            eigenvalue: self.eigenvalue.as_ref().map(|x| x.to_strings()),
            monomials: super::affinoid::monomials(self.charpoly[0].degree()),
        }
    }
}

/// `(sum a_i x^i)(sum b_j x^j)` truncated to degree `< len`.
fn poly_mul<R: Ring>(a: &[R], b: &[R], len: usize, zero: &R) -> Vec<R> {
    let mut out = vec![zero.clone(); len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < len {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
    }
    out
}

/// Jacobian of `(Q, R) -> Q R` at monic `(q, r)`: columns for the `s` lower coefficients of `Q`
/// followed by the `n - s` lower coefficients of `R`.
fn jacobian(q: &[PadicNumber], r: &[PadicNumber], n: usize) -> Vec<Vec<PadicNumber>> {
    let s = q.len() - 1;
    let zero = q[0].zero_like();
    let mut j = vec![vec![zero; n]; n];
    for i in 0..s {
        for (k, rk) in r.iter().enumerate() {
            if i + k < n {
                j[i + k][i] = rk.clone();
            }
        }
    }
    for i in 0..n - s {
        for (k, qk) in q.iter().enumerate() {
            if i + k < n {
                j[i + k][s + i] = qk.clone();
            }
        }
    }
    j
}

/// Splits a monic polynomial over `Q_p` into monic factors `Q R` where `Q` (degree `s`) carries the
/// roots of smallest valuation, by Newton iteration from the Newton polygon split.
pub fn split_by_slope(c: &[PadicNumber], s: usize) -> Result<(Vec<PadicNumber>, Vec<PadicNumber>), FamilyError> {
    let n = c.len() - 1;
    let one = c[n].one_like();
    if s == 0 {
        return Ok((vec![one], c.to_vec()));
    }
    if s == n {
        return Ok((c.to_vec(), vec![one]));
    }
    let lead = c[n - s].clone();
    let mut q: Vec<PadicNumber> = c[n - s..].to_vec();
    let mut r: Vec<PadicNumber> = c[..=n - s].iter().map(|x| x.div(&lead)).collect::<Result<_, _>>()?;
    r[n - s] = one.clone();
    for _ in 0..200 {
        let prod = poly_mul(&q, &r, n, &c[0].zero_like());
        let rhs: Vec<PadicNumber> = (0..n).map(|k| c[k].sub(&prod[k])).collect();
        if rhs.iter().all(|x| x.is_zero()) {
            return Ok((q, r));
        }
        let d = solve_padic(&jacobian(&q, &r, n), &rhs)?;
        for i in 0..s {
            q[i] = q[i].add(&d[i]);
        }
        for i in 0..n - s {
            r[i] = r[i].add(&d[s + i]);
        }
    }
    Err(FamilyError::NoSlopeGap("slope factorization did not converge".into()))
}

/// Charpoly, slope-`<= h` factor and localization at `point` for a square matrix over the affinoid.
pub fn local_chart(matrix: &[Vec<TruncatedAffinoid>], h: Ratio<i64>, point: &PadicNumber) -> Result<LocalChart, FamilyError> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(FamilyError::Unsupported("chart needs a nonempty square matrix".into()));
    }
    let first = &matrix[0][0];
    let (p, degree) = (first.prime(), first.degree());
    let prec = matrix.iter().flatten().map(|x| x.precision()).min().unwrap_or(0);
    let one = TruncatedAffinoid::one(p, degree, prec + 64);
    let flat: Vec<TruncatedAffinoid> = matrix.iter().flatten().cloned().collect();
    let charpoly: Vec<TruncatedAffinoid> = berkowitz(&flat, n, &one).into_iter().map(|x| x.with_precision(prec)).collect();
    let base: Vec<PadicNumber> = charpoly.iter().map(|x| x.constant_term().clone()).collect();
    let slopes = newton_polygon(&base)?.multiset();
    if slopes.contains(&Slope::Finite(h)) {
        return Err(FamilyError::NoSlopeGap(format!("a root has slope exactly {h}")));
    }
    let s = slopes.iter().filter(|x| matches!(x, Slope::Finite(v) if *v < h)).count();
    let (q0, r0) = split_by_slope(&base, s)?;

    // lift Q R = P over the affinoid with the base Jacobian
    let lift = |v: &[PadicNumber]| v.iter().map(|x| TruncatedAffinoid::constant(degree, x)).collect::<Vec<_>>();
    let (mut q, mut r) = (lift(&q0), lift(&r0));
    if s > 0 && s < n {
        let jac = jacobian(&q0, &r0, n);
        let jinv: Vec<Vec<PadicNumber>> = (0..n)
            .map(|k| {
                let e: Vec<PadicNumber> = (0..n).map(|i| if i == k { one.constant_term().clone() } else { one.constant_term().zero_like() }).collect();
                solve_padic(&jac, &e)
            })
            .collect::<Result<_, _>>()?;
        let zero = one.zero_like();
        for _ in 0..(degree as usize + 1) * 4 {
            let prod = poly_mul(&q, &r, n, &zero);
            let err: Vec<TruncatedAffinoid> = (0..n).map(|k| charpoly[k].sub(&prod[k])).collect();
            if err.iter().all(|x| x.is_zero()) {
                break;
            }
            for (col, e) in jinv.iter().zip(&err) {
                for (i, coef) in col.iter().enumerate() {
                    let d = e.scale(coef);
                    if i < s {
                        q[i] = q[i].add(&d);
                    } else {
                        r[i - s] = r[i - s].add(&d);
                    }
                }
            }
        }
    }

    // multiplicity of `point` as a root of the base factor: first nonvanishing Taylor coefficient
    let mut taylor = q0.clone();
    let mut multiplicity = 0;
    while multiplicity < taylor.len() {
        let v = taylor.iter().rev().fold(point.zero_like(), |acc, c| acc.mul(point).add(c));
        if !v.is_zero() {
            break;
        }
        multiplicity += 1;
        taylor = (1..taylor.len()).map(|i| taylor[i].scale_i64(i as i64)).collect();
    }
    if multiplicity == 0 {
        return Err(FamilyError::Unsupported(format!("{point} is not a root of the slope <= {h} factor at the base point")));
    }
    let free_rank_one = multiplicity == 1;
    let eigenvalue = if free_rank_one {
        let mut x = TruncatedAffinoid::constant(degree, point);
        let dq: Vec<TruncatedAffinoid> = (1..q.len()).map(|i| q[i].scale(&PadicNumber::from_i64(p, i as i64, prec + 64))).collect();
        let eval = |poly: &[TruncatedAffinoid], x: &TruncatedAffinoid| poly.iter().rev().fold(x.zero_like(), |acc, c| acc.mul(x).add(c));
        for _ in 0..degree + 2 {
            let step = eval(&q, &x).mul(&eval(&dq, &x).inv()?);
            x = x.sub(&step);
        }
        Some(x)
    } else {
        None
    };
    Ok(LocalChart { charpoly, slopes, factor: q, cofactor: r, multiplicity, free_rank_one, eigenvalue })
}

/// `[[1, T1], [T1, 1]]`: eigenvalues `1 +- T1` meet at the base point.
pub fn crossing_example(p: u64, degree: u32, prec: i64) -> Vec<Vec<TruncatedAffinoid>> {
    let one = TruncatedAffinoid::one(p, degree, prec);
    let t1 = TruncatedAffinoid::variable(p, degree, 0, prec);
    vec![vec![one.clone(), t1.clone()], vec![t1, one]]
}

/// The ordinary block of `level` at `p` over the weight-two family, with the chart localized at
/// the `p`-stabilized eigenvalue of the first newform.
pub fn ordinary_chart(level: u64, p: u64, m: u32, degree: u32, h: Ratio<i64>) -> Result<(FamilyEigenReport, LocalChart), FamilyError> {
    let (base, eigenvalues) = ordinary_block(level, p, m)?;
    let module = FamilyModule::new(p, [0, 0], m, degree)?;
    let rep = family_eigen_lift(&module, &base, &eigenvalues)?;
    let chart = local_chart(&rep.up, h, &eigenvalues[0].with_precision(module.moment_precision(0) as i64))?;
    Ok((rep, chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: u64, x: i64) -> TruncatedAffinoid {
        TruncatedAffinoid::constant(2, &PadicNumber::from_i64(p, x, 20))
    }

    #[test]
    fn one_by_one_is_free() {
        let a = c(3, 7);
        let ch = local_chart(&[vec![a.clone()]], Ratio::new(1, 2), a.constant_term()).unwrap();
        assert!(ch.free_rank_one);
        assert_eq!(ch.factor.len(), 2);
        assert!(ch.eigenvalue.as_ref().unwrap().agrees_with(&a, 18));
        let rep = ch.report();
        assert_eq!(rep.slopes, vec!["0"]);
        let json = serde_json::to_value(&rep).unwrap();
        for key in ["slopes", "free_rank_one", "charpoly_coeffs"] {
            assert!(json.get(key).is_some());
        }
    }

    #[test]
    fn diagonal_slopes_split_at_one() {
        let p = 5;
        let t = TruncatedAffinoid::variable(p, 2, 0, 20);
        let unit = c(p, 2).add(&t);
        let small = c(p, 25).add(&t.scale(&PadicNumber::from_i64(p, 25, 20)));
        let zero = c(p, 0);
        let m = vec![vec![unit.clone(), zero.clone()], vec![zero, small]];
        let ch = local_chart(&m, Ratio::from_integer(1), &PadicNumber::from_i64(p, 2, 20)).unwrap();
        assert_eq!(ch.slopes, vec![Slope::Finite(Ratio::from_integer(0)), Slope::Finite(Ratio::from_integer(2))]);
        // the slope-zero factor is x - (2 + T1), the direct root
        assert_eq!(ch.factor.len(), 2);
        assert!(ch.factor[0].agrees_with(&unit.neg(), 15));
        assert!(ch.free_rank_one);
        assert!(ch.eigenvalue.unwrap().agrees_with(&unit, 15));
    }

    #[test]
    fn crossing_eigenvalues_are_not_free() {
        let m = crossing_example(3, 3, 20);
        let ch = local_chart(&m, Ratio::new(1, 2), &PadicNumber::one(3, 20)).unwrap();
        assert!(!ch.free_rank_one);
        assert_eq!(ch.multiplicity, 2);
        assert!(ch.eigenvalue.is_none());
        // the discriminant 4 T1^2 vanishes at the base point
        let disc = ch.charpoly[1].mul(&ch.charpoly[1]).sub(&ch.charpoly[0].scale(&PadicNumber::from_i64(3, 4, 20)));
        assert!(disc.constant_term().is_zero());
        assert!(!disc.is_zero());
    }

    #[test]
    fn slope_on_the_boundary_is_rejected() {
        let m = vec![vec![c(3, 3)]];
        assert!(matches!(local_chart(&m, Ratio::from_integer(1), &PadicNumber::from_i64(3, 3, 20)), Err(FamilyError::NoSlopeGap(_))));
        assert!(local_chart(&[vec![c(3, 2)]], Ratio::new(1, 2), &PadicNumber::one(3, 20)).is_err());
    }

    #[test]
    fn level_eleven_chart_is_free() {
        let (rep, ch) = ordinary_chart(11, 3, 8, 2, Ratio::new(1, 2)).unwrap();
        assert_eq!(rep.basis.len(), 2);
        assert_eq!(ch.slopes.len(), 2);
        assert!(ch.free_rank_one);
        assert_eq!(ch.multiplicity, 1);
    }
}
