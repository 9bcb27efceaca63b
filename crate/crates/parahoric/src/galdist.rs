//! Distributions on `Gal_p` for `F = Q`, identified with `Z_p^x` through the cyclotomic character.
//!
//! At level `beta` the group splits into components `c + p^beta Z_p`, `c` a unit modulo `p^beta`.
//! A point of component `c` is written `y = c (1 + p^beta t)` and the component is stored through
//! its moments `int t^i`. Finite-order characters take values in
//! `Z_p[zeta_{p^k}] = Z_p[T] / Phi_{p^k}(T)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::padic::{is_prime, max_relative_precision, solve_padic, PadicError, PadicNumber, Zmod};
use crate::pardist::MomentDistribution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GalError {
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("character of level {have} needs a distribution of level at least {have}, found {level}")]
    Conductor { have: u32, level: u32 },
    #[error("level {0} is not allowed here")]
    Level(u32),
    #[error("norm index {m} exceeds level {beta}")]
    NormIndex { m: u32, beta: u32 },
    #[error("interpolation data inconsistent at level {beta}")]
    Inconsistent { beta: u32 },
    #[error("missing interpolation value for character exponent {exponent} at level {level} and j = {j}")]
    Missing { exponent: u64, level: u32, j: i64 },
    #[error("slope h = {h} is not below #Crit = {crit}")]
    SlopeTooLarge { h: Ratio<i64>, crit: usize },
    #[error("{0}")]
    Table(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

pub fn check_odd_prime(p: u64) -> Result<(), GalError> {
    if p == 2 {
        Err(GalError::EvenPrime)
    } else if !is_prime(p) {
        Err(GalError::NotPrime(p))
    } else {
        Ok(())
    }
}

/// `|(Z/p^k)^x|`.
pub fn totient(p: u64, k: u32) -> u64 {
    if k == 0 {
        1
    } else {
        (p - 1) * p.pow(k - 1)
    }
}

/// Generalised binomial coefficient `C(j, k)` for any integer `j`.
pub fn binom_signed(j: i64, k: u32) -> i128 {
    (0..k as i128).fold(1i128, |acc, i| acc * (j as i128 - i) / (i + 1))
}

/// Units modulo `p^k` in increasing order (`[0]` for `k = 0`).
pub fn units(p: u64, k: u32) -> Vec<u64> {
    if k == 0 {
        return vec![0];
    }
    (1..p.pow(k)).filter(|x| x % p != 0).collect()
}

/// Smallest primitive root modulo `p^2`, hence modulo every `p^k`.
pub fn primitive_root(p: u64) -> u64 {
    let n = p * (p - 1);
    let z = Zmod::new(p, 2).expect("small modulus");
    let mut qs = Vec::new();
    let mut m = n;
    let mut q = 2;
    while m > 1 {
        if m % q == 0 {
            qs.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    (2..).find(|&g| g % p != 0 && qs.iter().all(|&q| z.pow(g, n / q) != 1)).unwrap()
}

/// Teichmüller representative of a unit.
pub fn teichmuller(p: u64, a: i128, prec: i64) -> Result<PadicNumber, GalError> {
    let z = Zmod::new(p, prec.clamp(1, max_relative_precision(p)) as u32)?;
    let x = z.reduce(a);
    if !z.is_unit(x) {
        return Err(PadicError::DivisionByZero.into());
    }
    Ok(PadicNumber::from_residue(&z, z.pow(x, p.pow(z.n() - 1))))
}

/// An element of `Z_p[zeta_{p^k}]` in the basis `1, T, ..., T^{d-1}`, `d = (p-1) p^{k-1}`
/// (`d = 1` and `T = 1` when `k = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloElem {
    p: u64,
    k: u32,
    coeffs: Vec<PadicNumber>,
}

impl CycloElem {
    pub fn degree(p: u64, k: u32) -> usize {
        totient(p, k) as usize
    }
    pub fn zero(p: u64, k: u32, prec: i64) -> Self {
        CycloElem { p, k, coeffs: vec![PadicNumber::zero(p, prec); Self::degree(p, k)] }
    }
    pub fn from_scalar(k: u32, x: &PadicNumber) -> Self {
        let mut out = Self::zero(x.prime(), k, x.precision());
        out.coeffs[0] = x.clone();
        out
    }
    pub fn from_coeffs(p: u64, k: u32, coeffs: Vec<PadicNumber>) -> Result<Self, GalError> {
        if coeffs.len() != Self::degree(p, k) {
            return Err(GalError::Table(format!("expected {} coefficients", Self::degree(p, k))));
        }
        Ok(CycloElem { p, k, coeffs })
    }
    /// `c T^e`.
    pub fn monomial(p: u64, k: u32, e: u64, c: &PadicNumber) -> Self {
        let mut out = Self::zero(p, k, c.precision());
        out.add_monomial(e, c);
        out
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn level(&self) -> u32 {
        self.k
    }
    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }
    pub fn precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap()
    }

    fn add_monomial(&mut self, e: u64, c: &PadicNumber) {
        if self.k == 0 {
            self.coeffs[0] = self.coeffs[0].add(c);
            return;
        }
        let d = self.coeffs.len() as u64;
        let e = e % self.p.pow(self.k);
        if e < d {
            self.coeffs[e as usize] = self.coeffs[e as usize].add(c);
            return;
        }
        // T^{(p-1) p^{k-1}} = -(1 + T^{p^{k-1}} + ... + T^{(p-2) p^{k-1}})
        let step = self.p.pow(self.k - 1);
        for i in 0..self.p - 1 {
            let idx = (e - d + i * step) as usize;
            self.coeffs[idx] = self.coeffs[idx].sub(c);
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!((self.p, self.k), (o.p, o.k), "mixed cyclotomic rings");
    }
    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        CycloElem { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(), ..self.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Self {
        CycloElem { coeffs: self.coeffs.iter().map(|a| a.neg()).collect(), ..self.clone() }
    }
    pub fn scale(&self, x: &PadicNumber) -> Self {
        CycloElem { coeffs: self.coeffs.iter().map(|a| a.mul(x)).collect(), ..self.clone() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let prec = self.precision().min(o.precision());
        let mut out = Self::zero(self.p, self.k, prec + 64);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.precision() >= prec {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out.add_monomial((i + j) as u64, &a.mul(b));
            }
        }
        out
    }
    /// `self * c T^e`.
    pub fn mul_monomial(&self, e: u64, c: &PadicNumber) -> Self {
        let mut out = Self::zero(self.p, self.k, self.precision().min(c.precision()) + 64);
        for (i, a) in self.coeffs.iter().enumerate() {
            out.add_monomial(i as u64 + e, &a.mul(c));
        }
        out
    }
    /// Image under `Z_p[zeta_{p^k}] -> Z_p[zeta_{p^k2}]`, `T -> T^{p^{k2 - k}}`.
    pub fn embed(&self, k2: u32) -> Result<Self, GalError> {
        if k2 < self.k {
            return Err(GalError::Level(k2));
        }
        if k2 == self.k {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.p, k2, self.precision());
        let step = if self.k == 0 { 0 } else { self.p.pow(k2 - self.k) };
        for (i, a) in self.coeffs.iter().enumerate() {
            out.add_monomial(i as u64 * step, a);
        }
        Ok(out)
    }
    /// The element as a scalar when all non-constant coordinates vanish to precision.
    pub fn as_scalar(&self) -> Option<PadicNumber> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    pub fn agrees_with(&self, o: &Self, digits: i64) -> bool {
        self.check(o);
        self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.agrees_with(b, digits))
    }
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
    pub fn parse(p: u64, k: u32, items: &[String], prec: i64) -> Result<Self, GalError> {
        let coeffs = items.iter().map(|s| PadicNumber::parse(s, p, prec)).collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(p, k, coeffs)
    }
}

/// Discrete logarithms modulo `p^k` to the base [`primitive_root`].
#[derive(Clone, Debug)]
pub struct Dlog {
    modulus: u64,
    log: Vec<Option<u64>>,
}

impl Dlog {
    pub fn new(p: u64, k: u32) -> Self {
        let modulus = p.pow(k);
        let mut log = vec![None; modulus as usize];
        if k == 0 {
            return Dlog { modulus: 1, log: vec![Some(0)] };
        }
        let g = primitive_root(p);
        let mut x = 1u64;
        for e in 0..totient(p, k) {
            log[x as usize] = Some(e);
            x = x * g % modulus;
        }
        Dlog { modulus, log }
    }
    pub fn log(&self, x: i128) -> Option<u64> {
        self.log[x.rem_euclid(self.modulus as i128) as usize]
    }
}

/// The character of `(Z/p^beta)^x` sending the primitive root `g` to `xi^exponent`, where
/// `xi = omega(g) zeta_{p^{beta-1}}` and `zeta_{p^{beta-1}} = T^p` in `Z_p[zeta_{p^beta}]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletCharacter {
    p: u64,
    beta: u32,
    exponent: u64,
}

impl DirichletCharacter {
    pub fn new(p: u64, beta: u32, exponent: u64) -> Result<Self, GalError> {
        check_odd_prime(p)?;
        Ok(DirichletCharacter { p, beta, exponent: exponent % totient(p, beta) })
    }
    pub fn trivial(p: u64) -> Result<Self, GalError> {
        Self::new(p, 0, 0)
    }
    /// All characters modulo `p^beta`.
    pub fn all(p: u64, beta: u32) -> Result<Vec<Self>, GalError> {
        (0..totient(p, beta)).map(|s| Self::new(p, beta, s)).collect()
    }
    /// Characters whose conductor is exactly `p^beta`.
    pub fn primitive(p: u64, beta: u32) -> Result<Vec<Self>, GalError> {
        Ok(Self::all(p, beta)?.into_iter().filter(|c| c.conductor_exponent() == beta).collect())
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn level(&self) -> u32 {
        self.beta
    }
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
    pub fn conductor_exponent(&self) -> u32 {
        if self.exponent == 0 {
            return 0;
        }
        let top = self.p.pow(self.beta - 1);
        (1..=self.beta).find(|&c| (self.exponent as u128 * self.p.pow(c - 1) as u128) % top as u128 == 0).unwrap()
    }
    pub fn inverse(&self) -> Self {
        let n = totient(self.p, self.beta);
        DirichletCharacter { exponent: (n - self.exponent) % n, ..*self }
    }
    /// The same character read modulo `p^b`, `b >= beta`.
    pub fn lift(&self, b: u32) -> Result<Self, GalError> {
        if b < self.beta {
            return Err(GalError::Level(b));
        }
        if self.beta == 0 {
            return Self::new(self.p, b, 0);
        }
        Self::new(self.p, b, self.exponent * self.p.pow(b - self.beta))
    }
    /// `e` with `chi(x) = xi^e`; `None` when `p | x`.
    pub fn exponent_at(&self, dlog: &Dlog, x: i128) -> Option<u64> {
        let l = dlog.log(x)?;
        Some((l as u128 * self.exponent as u128 % totient(self.p, self.beta) as u128) as u64)
    }
    /// `xi^e` in `Z_p[zeta_{p^beta}]`.
    pub fn xi_power(p: u64, beta: u32, e: u64, prec: i64) -> Result<CycloElem, GalError> {
        if beta == 0 {
            return Ok(CycloElem::from_scalar(0, &PadicNumber::one(p, prec)));
        }
        let w = teichmuller(p, primitive_root(p) as i128, prec)?.pow((e % (p - 1)) as i64)?;
        Ok(CycloElem::monomial(p, beta, p * e, &w.with_precision(prec)))
    }
    pub fn value(&self, x: i128, prec: i64) -> Result<CycloElem, GalError> {
        match self.exponent_at(&Dlog::new(self.p, self.beta), x) {
            Some(e) => Self::xi_power(self.p, self.beta, e, prec),
            None => Ok(CycloElem::zero(self.p, self.beta, prec)),
        }
    }
    /// Exponent table `x -> e` over the units modulo `p^beta`.
    pub fn table(&self) -> Vec<(u64, u64)> {
        let dlog = Dlog::new(self.p, self.beta);
        units(self.p, self.beta).into_iter().map(|x| (x, self.exponent_at(&dlog, x as i128).unwrap())).collect()
    }
}

/// `tau(chi) = sum_x chi(x) zeta_{p^beta}^x` in `Z_p[zeta_{p^beta}]`.
pub fn gauss_sum(chi: &DirichletCharacter, prec: i64) -> Result<CycloElem, GalError> {
    let (p, beta) = (chi.p, chi.beta);
    let dlog = Dlog::new(p, beta);
    let mut out = CycloElem::zero(p, beta, prec);
    for x in units(p, beta) {
        let e = chi.exponent_at(&dlog, x as i128).unwrap();
        let v = DirichletCharacter::xi_power(p, beta, e, prec)?;
        out = out.add(&v.mul_monomial(x, &PadicNumber::one(p, prec + 64)));
    }
    Ok(out)
}

/// Component data of `Gal_p` at level `beta`; general fields are accepted as fixtures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisGroupData {
    pub p: u64,
    pub beta: u32,
    pub class_number: u64,
    pub classes: Vec<u64>,
    /// `Q_p`-dimension of the unit part.
    pub unit_rank: usize,
}

impl GaloisGroupData {
    pub fn rational(p: u64, beta: u32) -> Result<Self, GalError> {
        check_odd_prime(p)?;
        let classes = units(p, beta);
        Ok(GaloisGroupData { p, beta, class_number: classes.len() as u64, classes, unit_rank: 1 })
    }
    pub fn validate(&self) -> Result<(), GalError> {
        check_odd_prime(self.p)?;
        let mut c = self.classes.clone();
        c.sort_unstable();
        c.dedup();
        if c.len() as u64 != self.class_number || c.len() != self.classes.len() {
            return Err(GalError::Table("component count differs from the class number".into()));
        }
        if self.unit_rank == 0 {
            return Err(GalError::Table("unit part must have positive rank".into()));
        }
        Ok(())
    }
}

/// One component `c + p^beta Z_p` with its `t`-moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub base: u64,
    pub moments: Vec<PadicNumber>,
}

/// A truncated distribution on `Z_p^x` at level `beta >= 1`.
///
/// Moments of index at least `num_moments()` are only known to have valuation `>= tail_val`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisDistribution {
    p: u64,
    beta: u32,
    components: Vec<Component>,
    tail_val: i64,
}

/// Valuation of `p^{-m h} ||mu||_m` for each `m`, and the verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// `v_p` of the witness constant `C`; `None` for the zero distribution.
    pub witness_val: Option<Ratio<i64>>,
    pub scaled: Vec<Option<Ratio<i64>>>,
}

impl Admissibility {
    pub fn witness_at_most_one(&self) -> bool {
        self.witness_val.is_none_or(|v| v >= Ratio::from_integer(0))
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `p^{-v}` as a rational number; zero for `None`.
pub fn abs_from_val(p: u64, v: Option<i64>) -> BigRational {
    match v {
        None => BigRational::zero(),
        Some(v) => {
            let pp = BigInt::from(p).pow(v.unsigned_abs() as u32);
            if v >= 0 {
                BigRational::new(BigInt::one(), pp)
            } else {
                BigRational::from_integer(pp)
            }
        }
    }
}

impl GaloisDistribution {
    pub fn new(p: u64, beta: u32, components: Vec<Component>, tail_val: i64) -> Result<Self, GalError> {
        check_odd_prime(p)?;
        if beta == 0 {
            return Err(GalError::Level(0));
        }
        let mut components = components;
        components.sort_by_key(|c| c.base);
        let bases: Vec<u64> = components.iter().map(|c| c.base).collect();
        if bases != units(p, beta) {
            return Err(GalError::Table("components must be the units modulo p^beta".into()));
        }
        let m = components[0].moments.len();
        if components.iter().any(|c| c.moments.len() != m) {
            return Err(GalError::Table("components carry different numbers of moments".into()));
        }
        Ok(GaloisDistribution { p, beta, components, tail_val })
    }
    pub fn zero(p: u64, beta: u32, m: usize, prec: i64) -> Result<Self, GalError> {
        let comps = units(p, beta).into_iter().map(|base| Component { base, moments: vec![PadicNumber::zero(p, prec); m] });
        Self::new(p, beta, comps.collect(), 0)
    }
    /// Point mass at the unit `y`.
    pub fn dirac(p: u64, beta: u32, m: usize, y: i128, prec: i64) -> Result<Self, GalError> {
        let mut out = Self::zero(p, beta, m, prec)?;
        let q = p.pow(beta) as i128;
        let c = y.rem_euclid(q);
        if c % p as i128 == 0 {
            return Err(PadicError::DivisionByZero.into());
        }
        let t = PadicNumber::from_ratio(p, y - c, c * q, prec)?;
        let comp = out.components.iter_mut().find(|x| x.base as i128 == c).unwrap();
        comp.moments = (0..m).map(|i| t.pow(i as i64)).collect::<Result<_, _>>()?;
        for x in comp.moments.iter_mut() {
            *x = x.with_precision(prec);
        }
        Ok(out)
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn level(&self) -> u32 {
        self.beta
    }
    pub fn num_moments(&self) -> usize {
        self.components[0].moments.len()
    }
    pub fn components(&self) -> &[Component] {
        &self.components
    }
    pub fn component(&self, base: u64) -> Option<&Component> {
        self.components.iter().find(|c| c.base == base)
    }
    pub fn tail_val(&self) -> i64 {
        self.tail_val
    }
    /// Smallest absolute precision of any stored moment.
    pub fn precision(&self) -> i64 {
        self.components.iter().flat_map(|c| c.moments.iter().map(|x| x.precision())).min().unwrap()
    }
    /// Smallest valuation of any stored moment (`None` if all vanish).
    pub fn min_valuation(&self) -> Option<i64> {
        self.components.iter().flat_map(|c| c.moments.iter().filter_map(|x| x.valuation())).min()
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&PadicNumber, &PadicNumber) -> PadicNumber) -> Result<Self, GalError> {
        if (self.p, self.beta, self.num_moments()) != (o.p, o.beta, o.num_moments()) {
            return Err(GalError::Level(o.beta));
        }
        let components = self
            .components
            .iter()
            .zip(&o.components)
            .map(|(a, b)| Component { base: a.base, moments: a.moments.iter().zip(&b.moments).map(|(x, y)| f(x, y)).collect() })
            .collect();
        Ok(GaloisDistribution { components, tail_val: self.tail_val.min(o.tail_val), ..self.clone() })
    }
    pub fn add(&self, o: &Self) -> Result<Self, GalError> {
        self.zip_with(o, |x, y| x.add(y))
    }
    pub fn sub(&self, o: &Self) -> Result<Self, GalError> {
        self.zip_with(o, |x, y| x.sub(y))
    }
    pub fn scale(&self, c: &PadicNumber) -> Self {
        let components = self
            .components
            .iter()
            .map(|a| Component { base: a.base, moments: a.moments.iter().map(|x| x.mul(c)).collect() })
            .collect();
        let shift = c.valuation().unwrap_or(c.precision());
        GaloisDistribution { components, tail_val: self.tail_val + shift, ..self.clone() }
    }
    /// Whether all stored moments agree to the precision both sides carry.
    pub fn agrees(&self, o: &Self) -> bool {
        self.sub(o).is_ok_and(|d| d.components.iter().all(|c| c.moments.iter().all(|x| x.is_zero())))
    }

    /// Push forward to level `beta - 1`.
    pub fn coarsen(&self) -> Result<Self, GalError> {
        if self.beta <= 1 {
            return Err(GalError::Level(self.beta - 1));
        }
        let (p, b0) = (self.p, self.beta - 1);
        let q0 = p.pow(b0) as i128;
        let m = self.num_moments();
        let work = self.precision().max(self.tail_val) + 2 * m as i64 + 8;
        let cap = self.tail_val + m as i64;
        let mut tail = self.tail_val;
        for c in &self.components {
            for x in &c.moments {
                tail = tail.min(x.val_or_prec());
            }
        }
        let mut out = Vec::new();
        for c in units(p, b0) {
            let mut acc = vec![PadicNumber::zero(p, work); m];
            for fine in self.components.iter().filter(|f| f.base as i128 % q0 == c as i128) {
                // t = u + p s t' with c' = c (1 + p^{b0} u), s = c' / c
                let u = PadicNumber::from_ratio(p, (fine.base as i128 - c as i128) / q0, c as i128, work)?;
                let ps = PadicNumber::from_ratio(p, p as i128 * fine.base as i128, c as i128, work)?;
                let upow: Vec<PadicNumber> = (0..m).map(|i| u.pow(i as i64)).collect::<Result<_, _>>()?;
                let spow: Vec<PadicNumber> = (0..m).map(|i| ps.pow(i as i64)).collect::<Result<_, _>>()?;
                for (i, slot) in acc.iter_mut().enumerate() {
                    for k in 0..=i {
                        let coef = upow[i - k].mul(&spow[k]).scale_i64(binom_signed(i as i64, k as u32) as i64);
                        *slot = slot.add(&coef.mul(&fine.moments[k]));
                    }
                }
            }
            out.push(Component { base: c, moments: acc.into_iter().map(|x| x.with_precision(cap)).collect() });
        }
        GaloisDistribution::new(p, b0, out, tail)
    }
    pub fn coarsen_to(&self, beta: u32) -> Result<Self, GalError> {
        if beta == 0 || beta > self.beta {
            return Err(GalError::Level(beta));
        }
        let mut cur = self.clone();
        while cur.beta > beta {
            cur = cur.coarsen()?;
        }
        Ok(cur)
    }

    /// `min v_p mu(1_D ((y - a) / p^m)^i)` over discs `D = a + p^m Z_p` and `i < M`.
    pub fn norm_val(&self, m: u32) -> Result<Option<i64>, GalError> {
        if m > self.beta {
            return Err(GalError::NormIndex { m, beta: self.beta });
        }
        let p = self.p;
        let pm = p.pow(m) as i128;
        let nm = self.num_moments();
        let work = self.precision().max(0) + 2 * nm as i64 * self.beta as i64 + 8;
        let mut discs: BTreeMap<i128, Vec<PadicNumber>> = BTreeMap::new();
        for c in &self.components {
            let a = if m == 0 { 0 } else { c.base as i128 % pm };
            let e = PadicNumber::from_i128(p, (c.base as i128 - a) / pm, work);
            let s = PadicNumber::from_scaled(p, c.base as i128, (self.beta - m) as i64, work);
            let acc = discs.entry(a).or_insert_with(|| vec![PadicNumber::zero(p, work); nm]);
            for (i, slot) in acc.iter_mut().enumerate() {
                for k in 0..=i {
                    let coef = e.pow((i - k) as i64)?.mul(&s.pow(k as i64)?).scale_i64(binom_signed(i as i64, k as u32) as i64);
                    *slot = slot.add(&coef.mul(&c.moments[k]));
                }
            }
        }
        Ok(discs.values().flatten().map(|x| x.valuation()).fold(None, min_opt))
    }
    /// `||mu||_m` as a rational number.
    pub fn norm_m(&self, m: u32) -> Result<BigRational, GalError> {
        Ok(abs_from_val(self.p, self.norm_val(m)?))
    }

    /// Growth test `||mu||_m <= C p^{m h}` for `m <= m_max`: admissible when the scaled norm at
    /// `m_max` does not exceed the largest scaled norm below it; `C` is the largest scaled norm.
    pub fn is_h_admissible(&self, h: Ratio<i64>, m_max: u32) -> Result<Admissibility, GalError> {
        let scaled: Vec<Option<Ratio<i64>>> = (0..=m_max)
            .map(|m| Ok(self.norm_val(m)?.map(|v| Ratio::from_integer(v) + h * m as i64)))
            .collect::<Result<_, GalError>>()?;
        let witness_val = scaled.iter().flatten().min().copied();
        let below = scaled[..m_max as usize].iter().flatten().min().copied();
        let admissible = match (scaled[m_max as usize], below) {
            (None, _) => true,
            (Some(_), None) => m_max == 0,
            (Some(top), Some(b)) => top >= b,
        };
        Ok(Admissibility { admissible, witness_val, scaled })
    }

    /// `sum_c chi(c) int_{c + p^beta Z_p} y^j dmu` in `Z_p[zeta_{p^k}]`, `p^k` the modulus of `chi`.
    pub fn evaluate_character(&self, chi: &DirichletCharacter, j: i64) -> Result<CycloElem, GalError> {
        if chi.prime() != self.p {
            return Err(GalError::Table("character and distribution use different primes".into()));
        }
        if chi.level() > self.beta {
            return Err(GalError::Conductor { have: chi.level(), level: self.beta });
        }
        let p = self.p;
        let nm = self.num_moments();
        let cap = self.tail_val + (self.beta as i64) * nm as i64;
        let work = self.precision().max(cap) + 8;
        let dlog = Dlog::new(p, chi.level());
        let mut out = CycloElem::zero(p, chi.level(), work);
        for c in &self.components {
            let Some(e) = chi.exponent_at(&dlog, c.base as i128) else { continue };
            let mut integral = PadicNumber::zero(p, work);
            for (k, mk) in c.moments.iter().enumerate() {
                let coef = PadicNumber::from_scaled(p, binom_signed(j, k as u32), self.beta as i64 * k as i64, work);
                integral = integral.add(&coef.mul(mk));
            }
            let cj = PadicNumber::from_i128(p, c.base as i128, work).pow(j)?;
            let val = integral.mul(&cj).with_precision(cap);
            let chi_c = DirichletCharacter::xi_power(p, chi.level(), e, work)?;
            out = out.add(&chi_c.scale(&val));
        }
        Ok(out)
    }

    pub fn to_table(&self) -> GaloisTable {
        GaloisTable {
            schema: GALOIS_TABLE_SCHEMA.into(),
            p: self.p,
            beta: self.beta,
            tail_val: self.tail_val,
            components: self
                .components
                .iter()
                .map(|c| ComponentTable { base: c.base, moments: c.moments.iter().map(|x| x.to_string()).collect() })
                .collect(),
        }
    }
    pub fn from_table(t: &GaloisTable, prec: i64) -> Result<Self, GalError> {
        if t.schema != GALOIS_TABLE_SCHEMA {
            return Err(GalError::Table(format!("unknown schema {}", t.schema)));
        }
        let comps = t
            .components
            .iter()
            .map(|c| {
                let moments = c.moments.iter().map(|s| PadicNumber::parse(s, t.p, prec)).collect::<Result<_, _>>()?;
                Ok(Component { base: c.base, moments })
            })
            .collect::<Result<Vec<_>, GalError>>()?;
        Self::new(t.p, t.beta, comps, t.tail_val)
    }
}

pub const GALOIS_TABLE_SCHEMA: &str = "parahoric.galois-distribution.v1";
pub const INTERPOLATION_SCHEMA: &str = "parahoric.interpolation-data.v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTable {
    pub base: u64,
    pub moments: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisTable {
    pub schema: String,
    pub p: u64,
    pub beta: u32,
    pub tail_val: i64,
    pub components: Vec<ComponentTable>,
}

/// Component of `f -> mu(v(f))`, `v(f)(X) = f(-x) x^{l1}` with `x = b + p^beta X`.
///
/// The component is `c = -b mod p^beta`; writing `-b = c - k p^beta`, the point `y = -x` has
/// coordinate `t = -(k + X) / c`.
pub fn kappa_component(mu: &MomentDistribution, beta: u32, b: i128) -> Result<Component, GalError> {
    if beta == 0 {
        return Err(GalError::Level(0));
    }
    let p = mu.p();
    let q = p.pow(beta) as i128;
    if b.rem_euclid(p as i128) == 0 {
        return Err(PadicError::DivisionByZero.into());
    }
    let m = mu.m() as usize;
    let l1 = mu.lambda()[0];
    let work = m as i64 + 8;
    let c = (-b).rem_euclid(q);
    let k = (c + b) / q;
    let bp = PadicNumber::from_i128(p, b, work + 64);
    let binv = bp.inv()?;
    // x^{l1} = b^{l1} sum_n C(l1, n) (p^beta / b)^n X^n
    let xl: Vec<PadicNumber> = (0..m)
        .map(|n| {
            Ok(PadicNumber::from_scaled(p, binom_signed(l1, n as u32), beta as i64 * n as i64, work)
                .mul(&binv.pow(n as i64)?)
                .mul(&bp.pow(l1)?))
        })
        .collect::<Result<_, PadicError>>()?;
    let neg_cinv = PadicNumber::from_i128(p, -c, work + 64).inv()?;
    let mut moments = Vec::with_capacity(m);
    for i in 0..m {
        // t^i = (-1/c)^i sum_r C(i, r) k^{i - r} X^r
        let lead = neg_cinv.pow(i as i64)?;
        let mut poly = vec![PadicNumber::zero(p, work); m];
        for r in 0..=i.min(m - 1) {
            let tr = PadicNumber::from_i128(p, binom_signed(i as i64, r as u32) * k.pow((i - r) as u32), work).mul(&lead);
            for n in 0..m - r {
                poly[r + n] = poly[r + n].add(&tr.mul(&xl[n]));
            }
        }
        let acc = poly.iter().enumerate().fold(PadicNumber::zero(p, work), |acc, (n, a)| acc.add(&a.mul(&mu.moment(n))));
        moments.push(acc);
    }
    Ok(Component { base: c as u64, moments })
}

/// The branching map at level `beta` on the disc around `-1`, landing on `1 + p^beta Z_p`.
pub fn kappa_beta(mu: &MomentDistribution, beta: u32) -> Result<Component, GalError> {
    kappa_component(mu, beta, -1)
}

/// `int chi_cyc^j` over `1 + p^beta Z_p` of a single component.
pub fn integrate_power(p: u64, beta: u32, comp: &Component, j: i64) -> PadicNumber {
    let work = comp.moments.iter().map(|x| x.precision()).min().unwrap_or(0) + 8;
    let mut acc = PadicNumber::zero(p, work);
    for (k, mk) in comp.moments.iter().enumerate() {
        acc = acc.add(&PadicNumber::from_scaled(p, binom_signed(j, k as u32), beta as i64 * k as i64, work).mul(mk));
    }
    acc.mul(&PadicNumber::from_i128(p, comp.base as i128, work).pow(j).expect("unit base"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationDatum {
    /// Level at which the value was produced.
    pub beta: u32,
    pub chi: DirichletCharacter,
    pub j: i64,
    pub value: CycloElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterJson {
    pub beta: u32,
    pub exponent: u64,
    /// `(x, e)` with `chi(x) = xi^e`.
    pub table: Vec<(u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumJson {
    pub beta: u32,
    pub chi: CharacterJson,
    pub j: i64,
    /// Coordinates in the basis `1, T, ..., T^{d-1}`.
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationFile {
    pub schema: String,
    pub p: u64,
    pub precision: i64,
    pub data: Vec<DatumJson>,
}

pub fn data_to_file(p: u64, precision: i64, data: &[InterpolationDatum]) -> InterpolationFile {
    let data = data
        .iter()
        .map(|d| DatumJson {
            beta: d.beta,
            chi: CharacterJson { beta: d.chi.level(), exponent: d.chi.exponent(), table: d.chi.table() },
            j: d.j,
            value: d.value.to_strings(),
        })
        .collect();
    InterpolationFile { schema: INTERPOLATION_SCHEMA.into(), p, precision, data }
}

pub fn data_from_file(f: &InterpolationFile) -> Result<Vec<InterpolationDatum>, GalError> {
    if f.schema != INTERPOLATION_SCHEMA {
        return Err(GalError::Table(format!("unknown schema {}", f.schema)));
    }
    f.data
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let chi = DirichletCharacter::new(f.p, d.chi.beta, d.chi.exponent)?;
            if chi.table() != d.chi.table {
                return Err(GalError::Table(format!("data[{i}].chi: table does not match exponent")));
            }
            let value = CycloElem::parse(f.p, chi.level(), &d.value, f.precision)
                .map_err(|e| GalError::Table(format!("data[{i}].value: {e}")))?;
            Ok(InterpolationDatum { beta: d.beta, chi, j: d.j, value })
        })
        .collect()
}

/// Values of `mu` at every primitive character of level at most the level of `mu`, for each `j`.
pub fn interpolation_data(mu: &GaloisDistribution, crit: &[i64]) -> Result<Vec<InterpolationDatum>, GalError> {
    let mut out = Vec::new();
    for beta in 0..=mu.level() {
        for chi in DirichletCharacter::primitive(mu.prime(), beta)? {
            for &j in crit {
                out.push(InterpolationDatum { beta, chi, j, value: mu.evaluate_character(&chi, j)? });
            }
        }
    }
    Ok(out)
}

/// Certified absolute precision of the reconstruction at each level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessCertificate {
    pub h: Ratio<i64>,
    pub crit_size: usize,
    /// `(level, digits)`: any two `h`-admissible distributions with `C <= 1` and the same data
    /// have all stored moments congruent modulo `p^digits` at that level.
    pub digits: Vec<(u32, i64)>,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub distribution: GaloisDistribution,
    pub certificate: UniquenessCertificate,
}

/// Rebuilds the unique `h`-admissible distribution (with `C <= 1`) at level `level` from its
/// values at all characters of level `<= level` and all `j` in `crit`.
///
/// On each component the first `#crit` moments are solved from the character-inverted data; the
/// remaining moments are bounded by the growth condition, and the certificate records the
/// precision that survives after pushing forward to each coarser level.
pub fn amice_velu_reconstruct(
    p: u64,
    data: &[InterpolationDatum],
    h: Ratio<i64>,
    crit: &[i64],
    level: u32,
    moments: usize,
) -> Result<Reconstruction, GalError> {
    check_odd_prime(p)?;
    let r = crit.len();
    if h >= Ratio::from_integer(r as i64) || h < Ratio::from_integer(0) {
        return Err(GalError::SlopeTooLarge { h, crit: r });
    }
    if level == 0 || moments < r {
        return Err(GalError::Level(level));
    }
    let n = totient(p, level);
    let mut table: BTreeMap<(u64, i64), CycloElem> = BTreeMap::new();
    for d in data {
        if d.chi.level() > level {
            return Err(GalError::Conductor { have: d.chi.level(), level });
        }
        if d.value.level() != d.chi.level() {
            return Err(GalError::Table("value ring differs from the character ring".into()));
        }
        let key = (d.chi.lift(level)?.exponent(), d.j);
        let v = d.value.embed(level)?;
        match table.get(&key) {
            Some(old) if !old.sub(&v).is_zero() => return Err(GalError::Inconsistent { beta: d.beta }),
            Some(_) => {}
            None => {
                table.insert(key, v);
            }
        }
    }
    let prec = table.values().map(|v| v.precision()).min().unwrap_or(0);
    let work = prec + 8;
    let dlog = Dlog::new(p, level);
    let xi: Vec<CycloElem> = (0..n).map(|e| DirichletCharacter::xi_power(p, level, e, work)).collect::<Result<_, _>>()?;
    let inv_n = PadicNumber::from_i64(p, (p - 1) as i64, work).inv()?.shift(-((level - 1) as i64));
    let cap = (Ratio::from_integer(level as i64) * (Ratio::from_integer(r as i64) - h)).ceil().to_integer();
    let tail = -(Ratio::from_integer(level as i64) * h).floor().to_integer();
    let a: Vec<Vec<PadicNumber>> =
        crit.iter().map(|&j| (0..r).map(|k| PadicNumber::from_i128(p, binom_signed(j, k as u32), work)).collect()).collect();
    let mut comps = Vec::new();
    for c in units(p, level) {
        let lc = dlog.log(c as i128).unwrap();
        let mut rhs = Vec::with_capacity(r);
        for &j in crit {
            let mut acc = CycloElem::zero(p, level, work);
            for s in 0..n {
                let d = table.get(&(s, j)).ok_or(GalError::Missing { exponent: s, level, j })?;
                let e = (n - (s as u128 * lc as u128 % n as u128) as u64) % n;
                acc = acc.add(&d.mul(&xi[e as usize]));
            }
            let f = acc.as_scalar().ok_or(GalError::Inconsistent { beta: level })?.mul(&inv_n);
            let cj = PadicNumber::from_i128(p, c as i128, work + 64).pow(-j)?;
            rhs.push(f.mul(&cj).with_precision(cap));
        }
        let z = solve_padic(&a, &rhs)?;
        let mut ms: Vec<PadicNumber> = z.iter().enumerate().map(|(k, x)| x.shift(-(level as i64) * k as i64)).collect();
        ms.extend((r..moments).map(|_| PadicNumber::zero(p, tail)));
        comps.push(Component { base: c, moments: ms });
    }
    let distribution = GaloisDistribution::new(p, level, comps, tail)?;
    let mut digits = vec![(level, distribution.precision())];
    let mut cur = distribution.clone();
    while cur.level() > 1 {
        cur = cur.coarsen()?;
        digits.push((cur.level(), cur.precision()));
    }
    Ok(Reconstruction { distribution, certificate: UniquenessCertificate { h, crit_size: r, digits } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pn(p: u64, x: i64, prec: i64) -> PadicNumber {
        PadicNumber::from_i64(p, x, prec)
    }

    #[test]
    fn cyclotomic_relations() {
        let p = 3;
        let one = pn(p, 1, 20);
        let t = CycloElem::monomial(p, 2, 1, &one);
        // T^9 = 1 and 1 + T^3 + T^6 = 0
        let mut t9 = CycloElem::from_scalar(2, &one);
        for _ in 0..9 {
            t9 = t9.mul(&t);
        }
        assert!(t9.agrees_with(&CycloElem::from_scalar(2, &one), 20));
        let s = CycloElem::from_scalar(2, &one).add(&CycloElem::monomial(p, 2, 3, &one)).add(&CycloElem::monomial(p, 2, 6, &one));
        assert!(s.is_zero());
        let e = CycloElem::monomial(p, 1, 1, &one).embed(2).unwrap();
        assert_eq!(e, CycloElem::monomial(p, 2, 3, &one));
    }

    #[test]
    fn teichmuller_is_a_root_of_unity() {
        for p in [3u64, 5, 7] {
            for a in 1..p as i128 {
                let w = teichmuller(p, a, 12).unwrap();
                assert!(w.pow((p - 1) as i64).unwrap().agrees_with(&pn(p, 1, 12), 12));
                assert!(w.agrees_with(&pn(p, a as i64, 12), 1));
            }
        }
        assert_eq!(primitive_root(3), 2);
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let p = 3;
        for chi in DirichletCharacter::all(p, 2).unwrap() {
            let dl = Dlog::new(p, 2);
            for x in units(p, 2) {
                for y in units(p, 2) {
                    let lhs = chi.value((x * y) as i128, 15).unwrap();
                    let rhs = chi.value(x as i128, 15).unwrap().mul(&chi.value(y as i128, 15).unwrap());
                    assert!(lhs.agrees_with(&rhs, 15));
                }
            }
            assert!(chi.exponent_at(&dl, 3).is_none());
        }
        let conds: Vec<u32> = DirichletCharacter::all(p, 2).unwrap().iter().map(|c| c.conductor_exponent()).collect();
        assert_eq!(conds, vec![0, 2, 2, 1, 2, 2]);
        assert_eq!(DirichletCharacter::primitive(p, 1).unwrap().len(), 1);
        assert_eq!(DirichletCharacter::primitive(p, 2).unwrap().len(), 4);
        let chi = DirichletCharacter::new(p, 1, 1).unwrap();
        assert_eq!(chi.lift(2).unwrap().exponent(), 3);
        assert!(chi.lift(2).unwrap().value(5, 10).unwrap().agrees_with(&chi.value(5, 10).unwrap().embed(2).unwrap(), 10));
    }

    #[test]
    fn gauss_sum_norm() {
        for (p, beta) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1)] {
            for chi in DirichletCharacter::primitive(p, beta).unwrap() {
                let prec = 12;
                let lhs = gauss_sum(&chi, prec).unwrap().mul(&gauss_sum(&chi.inverse(), prec).unwrap());
                let sign = chi.value(-1, prec).unwrap();
                let rhs = sign.scale(&PadicNumber::from_i64(p, p.pow(beta) as i64, prec));
                assert!(lhs.agrees_with(&rhs, prec - 2), "p = {p}, beta = {beta}, chi = {chi:?}");
            }
        }
    }

    #[test]
    fn norms_of_simple_distributions() {
        let p = 3;
        let d = GaloisDistribution::dirac(p, 2, 5, 1, 20).unwrap();
        for m in 0..=2 {
            assert_eq!(d.norm_val(m).unwrap(), Some(0));
        }
        assert_eq!(d.norm_m(1).unwrap(), BigRational::one());
        // a single moment mu(y_1) = p on the disc 1 + 3 Z_3: component 1 with int t = 1
        let mut z = GaloisDistribution::zero(p, 1, 3, 20).unwrap();
        z.components[0].moments[1] = pn(p, 1, 20);
        assert_eq!(z.norm_val(1).unwrap(), Some(0));
        assert_eq!(z.norm_val(0).unwrap(), Some(1));
        assert_eq!(z.norm_m(0).unwrap(), BigRational::new(1.into(), 3.into()));
        let scaled = d.scale(&pn(p, 3, 20));
        for m in 0..=2 {
            assert_eq!(scaled.norm_val(m).unwrap(), Some(1));
        }
        assert!(d.norm_val(3).is_err());
    }

    #[test]
    fn norm_triangle_inequality() {
        let p = 5;
        let a = GaloisDistribution::dirac(p, 2, 4, 7, 20).unwrap();
        let b = GaloisDistribution::dirac(p, 2, 4, 13, 20).unwrap().scale(&pn(p, 25, 20));
        let s = a.add(&b).unwrap();
        for m in 0..=2 {
            let (va, vb, vs) = (a.norm_val(m).unwrap(), b.norm_val(m).unwrap(), s.norm_val(m).unwrap());
            assert!(vs.unwrap() >= va.unwrap().min(vb.unwrap()));
        }
    }

    #[test]
    fn admissibility_examples() {
        let p = 3;
        let d = GaloisDistribution::dirac(p, 3, 4, 1, 20).unwrap();
        let a = d.is_h_admissible(Ratio::from_integer(0), 3).unwrap();
        assert!(a.admissible && a.witness_val == Some(Ratio::from_integer(0)));
        // moment t^1 of size p^{-1} on one component at level 3: ||mu||_m grows like p^{m - 2}
        let mut g = GaloisDistribution::zero(p, 3, 4, 20).unwrap();
        g.components[0].moments[1] = PadicNumber::from_scaled(p, 1, -1, 20);
        let vals: Vec<Option<i64>> = (0..=3).map(|m| g.norm_val(m).unwrap()).collect();
        assert_eq!(vals, vec![Some(2), Some(1), Some(0), Some(-1)]);
        assert!(!g.is_h_admissible(Ratio::from_integer(0), 3).unwrap().admissible);
        assert!(g.is_h_admissible(Ratio::from_integer(1), 3).unwrap().admissible);
        // bounded moments are 0-admissible
        let mut b = GaloisDistribution::zero(p, 2, 4, 20).unwrap();
        for (i, c) in b.components.iter_mut().enumerate() {
            c.moments = (0..4).map(|k| pn(p, (i * 7 + k * 5 + 1) as i64, 20)).collect();
        }
        assert!(b.is_h_admissible(Ratio::from_integer(0), 2).unwrap().admissible);
    }

    #[test]
    fn character_evaluation_examples() {
        let p = 5;
        let d = GaloisDistribution::dirac(p, 2, 6, 1, 20).unwrap();
        for chi in DirichletCharacter::all(p, 2).unwrap() {
            for j in [-1, 0, 2] {
                let v = d.evaluate_character(&chi, j).unwrap();
                assert!(v.agrees_with(&CycloElem::from_scalar(2, &pn(p, 1, 20)), 12));
            }
        }
        let u = 7i128;
        let du = GaloisDistribution::dirac(p, 2, 8, u, 20).unwrap();
        let triv = DirichletCharacter::trivial(p).unwrap();
        let v = du.evaluate_character(&triv, 3).unwrap().as_scalar().unwrap();
        assert!(v.agrees_with(&pn(p, 343, 20), 12));
        // uniform mass on components kills ramified characters
        let mut unif = GaloisDistribution::zero(p, 2, 3, 20).unwrap();
        for c in unif.components.iter_mut() {
            c.moments[0] = pn(p, 1, 20);
        }
        for chi in DirichletCharacter::primitive(p, 2).unwrap() {
            assert!(unif.evaluate_character(&chi, 0).unwrap().is_zero());
        }
        assert!(d.evaluate_character(&DirichletCharacter::new(p, 3, 1).unwrap(), 0).is_err());
    }

    #[test]
    fn coarsening_preserves_integrals() {
        let p = 3;
        let mut mu = GaloisDistribution::zero(p, 3, 6, 20).unwrap();
        for (i, c) in mu.components.iter_mut().enumerate() {
            c.moments = (0..6).map(|k| pn(p, ((i * 5 + k * 3) % 11) as i64 - 4, 20)).collect();
        }
        let coarse = mu.coarsen().unwrap();
        for chi in DirichletCharacter::all(p, 2).unwrap() {
            for j in [0, 1, 3] {
                let a = mu.evaluate_character(&chi, j).unwrap();
                let b = coarse.evaluate_character(&chi, j).unwrap();
                assert!(a.agrees_with(&b, 6), "chi = {chi:?}, j = {j}");
            }
        }
        // Dirac masses coarsen to Dirac masses
        let d = GaloisDistribution::dirac(p, 3, 5, 16, 20).unwrap();
        assert!(d.coarsen_to(1).unwrap().agrees(&GaloisDistribution::dirac(p, 1, 5, 16, 20).unwrap()));
    }

    #[test]
    fn kappa_matches_function_side() {
        let p = 5;
        let lambda = [2, 0];
        let m = 8;
        let x0 = 9i128;
        // mu = Dirac at x0 on Z_p, so mu(v(f)) = f(-x0) x0^{l1} when x0 = b mod p^beta
        let mu = MomentDistribution::dirac(p, lambda, m, (x0 - 4) / 5).unwrap();
        let comp = kappa_component(&mu, 1, 4).unwrap();
        // X = (x0 - 4) / 5 = 1 and y = -9 = 1 (1 + 5 t)
        assert_eq!(comp.base, 1);
        let t = pn(p, -2, 20);
        for i in 0..4 {
            let expect = t.pow(i as i64).unwrap().mul(&pn(p, 81, 20));
            assert!(comp.moments[i].agrees_with(&expect, (m as usize - i) as i64), "i = {i}");
        }
        assert!(kappa_beta(&MomentDistribution::zero(p, lambda, m).unwrap(), 2).unwrap().moments.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn kappa_constant_function() {
        // f = 1: the integral is mu((b + p^beta X)^{l1}) expanded in moments
        let p = 7;
        let mu = MomentDistribution::new(p, [3, 1], 6, vec![3, 1, 4, 1, 5, 9]).unwrap();
        let comp = kappa_beta(&mu, 1).unwrap();
        let mut expect = PadicNumber::zero(p, 6);
        for k in 0..=3u32 {
            let c = binom_signed(3, k) * (-1i128).pow(3 - k) * 7i128.pow(k);
            expect = expect.add(&mu.moment(k as usize).mul(&PadicNumber::from_i128(p, c, 20)));
        }
        assert!(comp.moments[0].agrees_with(&expect, 6));
        assert!(integrate_power(p, 1, &comp, 0).agrees_with(&expect, 6));
    }

    #[test]
    fn kappa_interpolates_branching_values() {
        use crate::repr::monomial::kappa_monomial;
        let p = 5;
        let lambda = [2, -1];
        let m = 10;
        for beta in [1u32, 2] {
            let nu = MomentDistribution::new(p, lambda, m, (0..m as u64).map(|k| 3 * k * k + 1).collect()).unwrap();
            let q = p.pow(beta) as i128;
            for b in [-1i128, 1, 2, 3, 7, q - 2] {
                if b.rem_euclid(5) == 0 {
                    continue;
                }
                let g = crate::pardist::DeltaElement::new(p, 1, b, 0, q).unwrap();
                let spec = nu.act(&g).specialize().unwrap();
                let comp = kappa_component(&nu, beta, b).unwrap();
                assert_eq!(comp.base as i128, (-b).rem_euclid(q));
                for j in -2..=1 {
                    let lhs = integrate_power(p, beta, &comp, j);
                    let rhs = kappa_monomial(&spec, lambda, j).unwrap();
                    assert!(lhs.agrees_with(&rhs, 6), "beta = {beta}, b = {b}, j = {j}");
                }
            }
        }
    }

    fn synthetic(p: u64, level: u32, m: usize, h: Ratio<i64>, seed: u64) -> GaloisDistribution {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 33) as i64 % 1000
        };
        let comps = units(p, level)
            .into_iter()
            .map(|base| {
                let moments = (0..m)
                    .map(|k| {
                        let bound = (Ratio::from_integer(level as i64) * h.min(Ratio::from_integer(k as i64))).floor().to_integer();
                        PadicNumber::from_scaled(p, next() as i128, -bound, 30)
                    })
                    .collect();
                Component { base, moments }
            })
            .collect();
        GaloisDistribution::new(p, level, comps, -(Ratio::from_integer(level as i64) * h).floor().to_integer()).unwrap()
    }

    #[test]
    fn reconstruction_round_trip() {
        let p = 3;
        let cases: [(Vec<i64>, Ratio<i64>); 3] =
            [(vec![0], Ratio::from_integer(0)), (vec![0, 1], Ratio::new(1, 2)), (vec![-1, 0, 1], Ratio::from_integer(1))];
        for (k, (crit, h)) in cases.iter().enumerate() {
            let level = 3;
            let mu = synthetic(p, level, 8, *h, 11 + k as u64);
            assert!(mu.is_h_admissible(*h, level).unwrap().admissible);
            let data = interpolation_data(&mu, crit).unwrap();
            let rec = amice_velu_reconstruct(p, &data, *h, crit, level, 8).unwrap();
            let mut a = rec.distribution.clone();
            let mut b = mu.clone();
            loop {
                assert!(a.agrees(&b), "crit = {crit:?}, level {}", a.level());
                if a.level() == 1 {
                    break;
                }
                a = a.coarsen().unwrap();
                b = b.coarsen().unwrap();
            }
            assert!(rec.certificate.digits.iter().any(|&(_, d)| d > 0));
        }
    }

    #[test]
    fn reconstruction_examples() {
        let p = 3;
        let level = 2;
        let crit = [0];
        let mut data = Vec::new();
        for beta in 0..=level {
            for chi in DirichletCharacter::primitive(p, beta).unwrap() {
                data.push(InterpolationDatum { beta, chi, j: 0, value: CycloElem::from_scalar(beta, &pn(p, 1, 20)) });
            }
        }
        let rec = amice_velu_reconstruct(p, &data, Ratio::from_integer(0), &crit, level, 4).unwrap();
        let dirac = GaloisDistribution::dirac(p, level, 4, 1, 20).unwrap();
        assert!(rec.distribution.agrees(&dirac));
        assert!(rec.distribution.component(1).unwrap().moments[0].agrees_with(&pn(p, 1, 20), 2));
        let zero: Vec<InterpolationDatum> =
            data.iter().map(|d| InterpolationDatum { value: CycloElem::zero(p, d.chi.level(), 20), ..d.clone() }).collect();
        let rec = amice_velu_reconstruct(p, &zero, Ratio::from_integer(0), &crit, level, 4).unwrap();
        assert!(rec.distribution.components().iter().all(|c| c.moments.iter().all(|x| x.is_zero())));
        // the same character reported at two levels with different values
        let mut bad = data.clone();
        let mut extra = data[0].clone();
        extra.beta = 2;
        extra.value = CycloElem::from_scalar(0, &pn(p, 2, 20));
        bad.push(extra);
        assert_eq!(
            amice_velu_reconstruct(p, &bad, Ratio::from_integer(0), &crit, level, 4).unwrap_err(),
            GalError::Inconsistent { beta: 2 }
        );
        assert!(amice_velu_reconstruct(p, &data, Ratio::from_integer(1), &crit, level, 4).is_err());
        assert!(amice_velu_reconstruct(p, &data[1..], Ratio::from_integer(0), &crit, level, 4).is_err());
    }

    #[test]
    fn interpolation_file_round_trip() {
        let p = 3;
        let mu = synthetic(p, 2, 4, Ratio::from_integer(0), 5);
        let data = interpolation_data(&mu, &[0]).unwrap();
        let json = serde_json::to_string(&data_to_file(p, 30, &data)).unwrap();
        let back = data_from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.len(), data.len());
        for (a, b) in back.iter().zip(&data) {
            assert!(a.value.agrees_with(&b.value, b.value.precision()));
        }
        let t = mu.to_table();
        let again = GaloisDistribution::from_table(&serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap(), 30).unwrap();
        assert!(again.agrees(&mu));
    }

    #[test]
    fn rejects_even_prime() {
        assert_eq!(GaloisGroupData::rational(2, 1).unwrap_err(), GalError::EvenPrime);
        assert!(GaloisDistribution::zero(2, 1, 2, 10).is_err());
        let g = GaloisGroupData::rational(5, 2).unwrap();
        assert_eq!(g.classes.len(), 20);
        g.validate().unwrap();
    }
}
