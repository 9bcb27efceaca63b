//! Overconvergent lifting of a `U_p`-eigensymbol, evaluation maps to `Gal_p`, classical
//! evaluations and the resulting `p`-adic `L`-function.

use super::symbol::{gamma_b, up_cosets, value_at_gamma_b, Coefficients, Moments, PolyDual, Symbol};
use super::EvalError;
use crate::galdist::{gauss_sum, kappa_component, units, CycloElem, DirichletCharacter, Dlog, GaloisDistribution};
use crate::padic::{solve_filtered, PadicNumber, ZMat, Zmod};
use crate::pardist::{action_matrix, MomentDistribution};
use crate::repr::monomial::kappa_monomial;

/// Filtration digits of `mu`: the largest `d <= M` with `mu(x^k) = 0 mod p^{d-k}` for all `k`.
pub fn filtration_digits(mu: &MomentDistribution) -> i64 {
    let z = mu.zmod();
    mu.residues()
        .iter()
        .enumerate()
        .map(|(k, &r)| if r == 0 { mu.m() as i64 } else { z.val(r) as i64 + k as i64 })
        .min()
        .unwrap_or(mu.m() as i64)
        .min(mu.m() as i64)
}

fn symbol_digits(s: &Symbol<Moments>) -> i64 {
    s.values.iter().map(filtration_digits).min().unwrap_or(s.module.m as i64)
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    pub symbol: Symbol<Moments>,
    /// Filtration digits of `U_p Phi - alpha Phi` after each iteration.
    pub defects: Vec<i64>,
    pub eigen_digits: i64,
    /// Digits to which `specialize(Phi)` matches the classical symbol.
    pub specialization_digits: i64,
}

/// Lifts `phi` to `D_lambda` with `M` moments: a solution of the Manin relations with the
/// classical moments fixed, followed by `iterations` applications of `alpha^{-1} U_p`.
pub fn lift_noncritical(phi: &Symbol<PolyDual>, alpha: &PadicNumber, m: u32, iterations: usize) -> Result<LiftReport, EvalError> {
    let p = phi.module.p;
    let lambda = phi.module.lambda;
    let k = (lambda[0] - lambda[1]) as usize;
    let slope = alpha.valuation().ok_or(EvalError::Unsupported("alpha vanishes".into()))?;
    if slope != 0 {
        return Err(EvalError::Unsupported(format!("only ordinary refinements are lifted, found slope {slope}")));
    }
    if (m as usize) <= k + 1 {
        return Err(EvalError::TruncationTooSmall { need: k as u32 + 2 });
    }
    let z = Zmod::new(p, m)?;
    let mm = m as usize;
    let manin = phi.manin.clone();
    let nf = manin.num_free();
    let unknown = mm - k - 1;
    let col = |f: usize, i: usize| f * unknown + (i - k - 1);
    let fixed: Vec<Vec<u64>> = phi
        .values
        .iter()
        .map(|v| v.iter().map(|x| x.with_precision(m as i64).lift_precision(m as i64).to_residue(&z)).collect())
        .collect::<Result<_, _>>()?;
    let rows = manin.relations.len() * mm;
    let mut a = ZMat::zeros(rows, nf * unknown);
    let mut rhs = vec![0u64; rows];
    let mut row_prec = vec![0u32; rows];
    for (r, rel) in manin.relations.iter().enumerate() {
        for (s, g) in rel {
            let e = manin.expr(g);
            let t = action_matrix(&z, lambda, &phi_delta(p, &e.h), mm);
            let sign = (*s as i64) * (e.sign as i64);
            for mo in 0..mm {
                let row = r * mm + mo;
                row_prec[row] = m - mo as u32;
                for i in 0..mm {
                    let c = z.mul(t.get(mo, i), z.from_i64(sign));
                    if i <= k {
                        rhs[row] = z.sub(rhs[row], z.mul(c, fixed[e.free][i]));
                    } else {
                        let cc = col(e.free, i);
                        a.set(row, cc, z.add(a.get(row, cc), c));
                    }
                }
            }
        }
    }
    let sol = solve_filtered(&z, &a, &rhs, &row_prec).map_err(|_| EvalError::Inconsistent(m))?;
    let module = Moments { p, lambda, m };
    let values = (0..nf)
        .map(|f| {
            let mut mo = fixed[f].clone();
            mo.extend((k + 1..mm).map(|i| sol.particular[col(f, i)]));
            Ok(MomentDistribution::new(p, lambda, m, mo)?)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut symbol = Symbol::new(manin, module, values);
    let ainv = z.inv(alpha.lift_precision(m as i64).to_residue(&z)?).expect("unit");
    let ares = z.inv(ainv).unwrap();
    let mut defects = Vec::new();
    for _ in 0..iterations {
        let up = symbol.u_p(p);
        defects.push(symbol_digits(&up.sub(&scale(&symbol, ares))));
        symbol = scale(&up, ainv);
    }
    let eigen_digits = symbol_digits(&symbol.u_p(p).sub(&scale(&symbol, ares)));
    defects.push(eigen_digits);
    let specialization_digits = symbol
        .values
        .iter()
        .zip(&fixed)
        .flat_map(|(mu, fx)| {
            (0..=k).map(move |i| {
                let d = z.sub(mu.residues()[i], fx[i]);
                if d == 0 {
                    m as i64
                } else {
                    z.val(d) as i64 + i as i64
                }
            })
        })
        .min()
        .unwrap_or(m as i64)
        .min(m as i64);
    Ok(LiftReport { symbol, defects, eigen_digits, specialization_digits })
}

fn phi_delta(p: u64, h: &[i128; 4]) -> crate::pardist::DeltaElement {
    Moments { p, lambda: [0, 0], m: 1 }.delta(h)
}

fn scale(s: &Symbol<Moments>, c: u64) -> Symbol<Moments> {
    Symbol { values: s.values.iter().map(|v| v.scale(c)).collect(), ..s.clone() }
}

/// `specialize(Phi)` in `V_lambda^vee` coordinates.
pub fn specialize_symbol(phi: &Symbol<Moments>) -> Result<Symbol<PolyDual>, EvalError> {
    let module = PolyDual { p: phi.module.p, lambda: phi.module.lambda, prec: phi.module.m as i64 };
    for v in &phi.values {
        v.specialize()?;
    }
    Ok(phi.map(module, |v| v.specialize().expect("checked")))
}

fn check_beta(beta: u32) -> Result<i128, EvalError> {
    if beta == 0 {
        return Err(EvalError::Beta);
    }
    Ok(())
        .map(|_| 0)
}

/// The component of `Ev_beta(Phi)` carried by the representative `delta = (1 b; 0 p^beta)`.
pub fn ev_beta_delta(phi: &Symbol<Moments>, beta: u32, b: i128) -> Result<crate::galdist::Component, EvalError> {
    check_beta(beta)?;
    let p = phi.module.p;
    if b.rem_euclid(p as i128) == 0 {
        return Err(EvalError::NotAComponent(b));
    }
    let q = (p as i128).pow(beta);
    Ok(kappa_component(&value_at_gamma_b(phi, b, q), beta, b)?)
}

/// `Ev_beta(Phi)` as a distribution on `Z_p^x` at level `beta`.
pub fn ev_beta(phi: &Symbol<Moments>, beta: u32) -> Result<GaloisDistribution, EvalError> {
    check_beta(beta)?;
    let p = phi.module.p;
    let comps = units(p, beta).into_iter().map(|b| ev_beta_delta(phi, beta, b as i128)).collect::<Result<Vec<_>, _>>()?;
    Ok(GaloisDistribution::new(p, beta, comps, 0)?)
}

/// `Ev_beta(Phi) / alpha^beta`.
pub fn padic_l(phi: &Symbol<Moments>, alpha: &PadicNumber, beta: u32) -> Result<GaloisDistribution, EvalError> {
    if alpha.is_zero() {
        return Err(EvalError::Unsupported("alpha vanishes".into()));
    }
    Ok(ev_beta(phi, beta)?.scale(&alpha.pow(-(beta as i64))?))
}

/// Precision to which `padic_l` at `beta + 1`, pushed down to level `beta`, matches level `beta`.
pub fn beta_independence_digits(phi: &Symbol<Moments>, alpha: &PadicNumber, beta: u32) -> Result<i64, EvalError> {
    let lo = padic_l(phi, alpha, beta)?;
    let hi = padic_l(phi, alpha, beta + 1)?.coarsen()?;
    let d = hi.sub(&lo)?;
    Ok(d.components()
        .iter()
        .flat_map(|c| c.moments.iter().enumerate().map(|(i, x)| x.val_or_prec() + i as i64))
        .min()
        .unwrap_or(0))
}

/// `sum_b chi(-b) (phi(gamma_b D_0) | gamma_b)(nu_j)` over units `b` modulo the conductor of `chi`.
pub fn classical_ev(phi: &Symbol<PolyDual>, chi: &DirichletCharacter, j: i64) -> Result<CycloElem, EvalError> {
    let beta = chi.level();
    check_beta(beta)?;
    let m = &phi.module;
    if chi.prime() != m.p {
        return Err(EvalError::Unsupported("character and symbol use different primes".into()));
    }
    let q = (m.p as i128).pow(beta);
    let dlog = Dlog::new(m.p, beta);
    let mut out = CycloElem::zero(m.p, beta, m.prec);
    for b in units(m.p, beta) {
        let b = b as i128;
        let v = m.act(&value_at_gamma_b(phi, b, q), &gamma_b(b, q));
        let k = kappa_monomial(&v, m.lambda, j)?;
        let e = chi.exponent_at(&dlog, -b).expect("unit");
        out = out.add(&DirichletCharacter::xi_power(m.p, beta, e, m.prec)?.scale(&k));
    }
    Ok(out)
}

/// `(p^{j+1} / alpha)^beta tau(chi)` for `chi` of conductor `p^beta`, `beta >= 1`.
pub fn interpolation_factor(alpha: &PadicNumber, chi: &DirichletCharacter, j: i64, crit: &[i64]) -> Result<CycloElem, EvalError> {
    let beta = chi.level();
    check_beta(beta)?;
    if !crit.contains(&j) {
        return Err(EvalError::NotCritical(j));
    }
    let p = chi.prime();
    let prec = alpha.precision();
    let base = PadicNumber::from_scaled(p, 1, j + 1, prec + 64).div(alpha)?.pow(beta as i64)?;
    Ok(gauss_sum(chi, prec)?.scale(&base))
}

/// Cosets used for `U_p`, exposed for reports.
pub fn up_representatives(p: u64) -> Vec<[i128; 4]> {
    up_cosets(p)
}
