//! Family distributions `D_Omega`: moments with coefficients in the truncated affinoid, the
//! right action of `Sigma_0(p)` through the universal weight, specialization, and evaluation
//! maps with family coefficients.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::affinoid::{ResidueSeries, TruncatedAffinoid};
use super::weight::{angle_power, binomial_terms, filtration_val, variables, weight_coordinates, GUARD};
use super::FamilyError;
use crate::evalmaps::manin::Mat2;
use crate::evalmaps::symbol::{value_at_gamma_b, Coefficients, Moments, Symbol};
use crate::galdist::{binom_signed, check_odd_prime, units, Component, GaloisDistribution};
use crate::padic::{PadicNumber, Zmod};
use crate::pardist::{mobius_series, DeltaElement, MomentDistribution};

/// Action matrix: entry `[m][i]` is a residue series.
type ActionMatrix = Vec<Vec<Vec<u64>>>;

/// `D_Omega` truncated to `M` moments over `Z/p^M [T1, T2] / (deg > D)`, centred at the base weight.
#[derive(Clone, Debug)]
pub struct FamilyModule {
    pub p: u64,
    pub base: [i64; 2],
    pub m: u32,
    pub ring: ResidueSeries,
    cache: Arc<Mutex<HashMap<Mat2, Arc<ActionMatrix>>>>,
}

impl FamilyModule {
    pub fn new(p: u64, base: [i64; 2], m: u32, degree: u32) -> Result<Self, FamilyError> {
        check_odd_prime(p)?;
        if base[0] < base[1] {
            return Err(FamilyError::Unsupported(format!("base weight {base:?} is not dominant")));
        }
        let z = Zmod::new(p, m)?;
        Ok(FamilyModule { p, base, m, ring: ResidueSeries::new(z, degree), cache: Arc::default() })
    }
    pub fn z(&self) -> Zmod {
        self.ring.z
    }
    pub fn degree(&self) -> u32 {
        self.ring.degree
    }
    /// Precision of moment `k` in the family filtration.
    pub fn moment_precision(&self, k: usize) -> u32 {
        filtration_val(self.p, self.m - k as u32) as u32
    }

    fn to_series(&self, x: &TruncatedAffinoid) -> Vec<u64> {
        x.to_residues(&self.ring.z).expect("integral family coefficient")
    }

    /// `(mu | g)(x^m) = sum_i T[m][i] mu(x^i)` with
    /// `T[m] = u^{l2} <u>^{T2} <a>^tau (1 + (c/a) x)^tau (a + cx)^{k - m} (b + dx)^m`, `u` the unit part of `det g`.
    pub fn action(&self, g: &Mat2) -> Arc<ActionMatrix> {
        if let Some(t) = self.cache.lock().expect("cache").get(g) {
            return t.clone();
        }
        let t = Arc::new(self.build_action(g));
        self.cache.lock().expect("cache").insert(*g, t.clone());
        t
    }

    fn build_action(&self, g: &Mat2) -> ActionMatrix {
        let (p, z, mm) = (self.p, self.ring.z, self.m as usize);
        let d = DeltaElement::new(p, g[0], g[1], g[2], g[3]).unwrap_or_else(|_| panic!("{g:?} does not act on distributions"));
        let prec = self.m as i64;
        let [_, t2, tau] = variables(p, self.degree(), prec + GUARD);
        let u = d.unit_det(p);
        let uu = PadicNumber::from_i128(p, u, prec + GUARD).pow(self.base[1]).expect("unit");
        let scalar = angle_power(p, u, &t2, prec)
            .and_then(|x| Ok(x.mul(&angle_power(p, g[0], &tau, prec)?)))
            .expect("units")
            .scale(&uu);
        let ca = PadicNumber::from_i128(p, g[2], prec + GUARD).div(&PadicNumber::from_i128(p, g[0], prec + GUARD)).expect("unit");
        let xs: Vec<Vec<u64>> = binomial_terms(&ca, &tau, prec)
            .expect("p divides c")
            .iter()
            .take(mm)
            .map(|t| self.to_series(&t.mul(&scalar).with_precision(prec)))
            .chain(std::iter::repeat_with(|| self.ring.zero()))
            .take(mm)
            .collect();
        let k = self.base[0] - self.base[1];
        (0..mm)
            .map(|row| {
                let s = mobius_series(&z, &d, k - row as i64, row as u32, mm);
                (0..mm)
                    .map(|i| (0..=i).fold(self.ring.zero(), |acc, n| self.ring.add(&acc, &self.ring.scale(&xs[n], s[i - n]))))
                    .collect()
            })
            .collect()
    }

    /// Canonical form: moment `k` reduced modulo its filtration precision.
    pub fn canonical(&self, v: &[Vec<u64>]) -> Vec<Vec<u64>> {
        v.iter()
            .enumerate()
            .map(|(k, s)| {
                let e = self.moment_precision(k);
                let q = if e >= self.m { self.ring.z.modulus() } else { self.ring.z.p_pow(e) };
                s.iter().map(|&x| x % q).collect()
            })
            .collect()
    }

    /// The constant family through a single-weight distribution at the base weight.
    pub fn constant(&self, mu: &MomentDistribution) -> Vec<Vec<u64>> {
        assert_eq!(mu.lambda(), self.base);
        (0..self.m as usize).map(|k| self.ring.constant(*mu.residues().get(k).unwrap_or(&0) % self.ring.z.modulus())).collect()
    }

    /// Specialization to an algebraic weight in the disc.
    pub fn specialize(&self, v: &[Vec<u64>], lambda: [i64; 2]) -> Result<MomentDistribution, FamilyError> {
        let t = weight_coordinates(self.p, self.base, lambda)?;
        let res = v.iter().map(|s| self.ring.eval(s, [t[0] as i128, t[1] as i128])).collect();
        Ok(MomentDistribution::new(self.p, lambda, self.m, res)?)
    }

    /// Moments as p-adic series carrying their filtration precision.
    pub fn padic_moments(&self, v: &[Vec<u64>]) -> Vec<TruncatedAffinoid> {
        v.iter()
            .enumerate()
            .map(|(k, s)| TruncatedAffinoid::from_residues(&self.ring.z, self.degree(), s, self.moment_precision(k) as i64))
            .collect()
    }
}

impl Coefficients for FamilyModule {
    type Elem = Vec<Vec<u64>>;
    fn zero(&self) -> Self::Elem {
        vec![self.ring.zero(); self.m as usize]
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.ring.neg(x)).collect()
    }
    fn act(&self, v: &Self::Elem, g: &Mat2) -> Self::Elem {
        let t = self.action(g);
        t.iter()
            .map(|row| {
                let mut acc = self.ring.zero();
                for (tm, vi) in row.iter().zip(v) {
                    self.ring.mul_add(&mut acc, tm, vi);
                }
                acc
            })
            .collect()
    }
}

/// Specialize every value of a family symbol to `lambda`.
pub fn specialize_symbol(phi: &Symbol<FamilyModule>, lambda: [i64; 2]) -> Result<Symbol<Moments>, FamilyError> {
    let module = Moments { p: phi.module.p, lambda, m: phi.module.m };
    let values = phi.values.iter().map(|v| phi.module.specialize(v, lambda)).collect::<Result<Vec<_>, _>>()?;
    Ok(Symbol::new(phi.manin.clone(), module, values))
}

/// A Galois distribution whose moments are family series.
#[derive(Clone, Debug)]
pub struct FamilyGalois {
    pub p: u64,
    pub beta: u32,
    pub base: [i64; 2],
    /// `(c, moments)` for each component `c + p^beta Z_p`.
    pub components: Vec<(u64, Vec<TruncatedAffinoid>)>,
}

impl FamilyGalois {
    pub fn specialize(&self, lambda: [i64; 2]) -> Result<GaloisDistribution, FamilyError> {
        let comps = self
            .components
            .iter()
            .map(|(c, ms)| {
                let moments = ms.iter().map(|x| super::weight::sp_lambda(x, self.base, lambda)).collect::<Result<Vec<_>, _>>()?;
                Ok(Component { base: *c, moments })
            })
            .collect::<Result<Vec<_>, FamilyError>>()?;
        Ok(GaloisDistribution::new(self.p, self.beta, comps, 0)?)
    }
}

/// Family version of the component map: `f -> mu(f(-x) x^{l1} <x>^{T1})` with `x = b + p^beta X`.
pub fn family_kappa_component(
    module: &FamilyModule,
    mu: &[Vec<u64>],
    beta: u32,
    b: i128,
) -> Result<(u64, Vec<TruncatedAffinoid>), FamilyError> {
    let p = module.p;
    let m = module.m as usize;
    let degree = module.degree();
    let q = (p as i128).pow(beta);
    if b.rem_euclid(p as i128) == 0 {
        return Err(FamilyError::NotAComponent(b));
    }
    let work = module.m as i64 + GUARD;
    let l1 = module.base[0];
    let c = (-b).rem_euclid(q);
    let k = (c + b) / q;
    let [t1, _, _] = variables(p, degree, work);
    let bp = PadicNumber::from_i128(p, b, work + 64);
    let binv = bp.inv()?;
    // x^{l1} <x>^{T1} = b^{l1} <b>^{T1} (1 + p^beta X / b)^{l1 + T1}
    let ratio = PadicNumber::from_scaled(p, 1, beta as i64, work).mul(&binv);
    let fam = binomial_terms(&ratio, &t1, work)?;
    let lead = angle_power(p, b, &t1, work)?.scale(&bp.pow(l1)?);
    let xl: Vec<TruncatedAffinoid> = (0..m)
        .map(|n| {
            (0..=n).fold(TruncatedAffinoid::zero(p, degree, work), |acc, j| {
                let alg = PadicNumber::from_i128(p, binom_signed(l1, j as u32), work).mul(&ratio.pow(j as i64).expect("power"));
                match fam.get(n - j) {
                    Some(f) => acc.add(&f.scale(&alg)),
                    None => acc,
                }
            })
        })
        .map(|x| x.mul(&lead))
        .collect();
    let moments_in = module.padic_moments(mu);
    let neg_cinv = PadicNumber::from_i128(p, -c, work + 64).inv()?;
    let mut moments = Vec::with_capacity(m);
    for i in 0..m {
        let leadi = neg_cinv.pow(i as i64)?;
        let mut poly = vec![TruncatedAffinoid::zero(p, degree, work); m];
        for r in 0..=i.min(m - 1) {
            let tr = PadicNumber::from_i128(p, binom_signed(i as i64, r as u32) * k.pow((i - r) as u32), work).mul(&leadi);
            for n in 0..m - r {
                poly[r + n] = poly[r + n].add(&xl[n].scale(&tr));
            }
        }
        let acc = poly
            .iter()
            .zip(&moments_in)
            .fold(TruncatedAffinoid::zero(p, degree, work), |acc, (a, mu_n)| acc.add(&a.mul(mu_n)));
        moments.push(acc);
    }
    Ok((c as u64, moments))
}

/// `Ev_beta` with family coefficients.
pub fn family_ev(phi: &Symbol<FamilyModule>, beta: u32) -> Result<FamilyGalois, FamilyError> {
    if beta == 0 {
        return Err(FamilyError::Beta);
    }
    let p = phi.module.p;
    let q = (p as i128).pow(beta);
    let mut components = units(p, beta)
        .into_iter()
        .map(|b| family_kappa_component(&phi.module, &value_at_gamma_b(phi, b as i128, q), beta, b as i128))
        .collect::<Result<Vec<_>, _>>()?;
    components.sort_by_key(|c| c.0);
    Ok(FamilyGalois { p, beta, base: phi.module.base, components })
}

/// Digits to which `sp_lambda(Ev_beta(Phi)) = Ev_beta(sp_lambda(Phi))` holds, minimized over `lambdas`.
///
/// The defect of `t`-moment `i` is weighted by `p^{beta i}`: this is the norm of integration
/// against functions of `x` on each component.
pub fn square_defect_digits(phi: &Symbol<FamilyModule>, beta: u32, lambdas: &[[i64; 2]]) -> Result<i64, FamilyError> {
    let fam = family_ev(phi, beta)?;
    let mut digits = i64::MAX;
    for &lambda in lambdas {
        let lhs = fam.specialize(lambda)?;
        let rhs = crate::evalmaps::ev_beta(&specialize_symbol(phi, lambda)?, beta)?;
        for (a, b) in lhs.components().iter().zip(rhs.components()) {
            for (i, (x, y)) in a.moments.iter().zip(&b.moments).enumerate() {
                digits = digits.min(x.sub(y).val_or_prec() + beta as i64 * i as i64);
            }
        }
    }
    Ok(digits)
}
