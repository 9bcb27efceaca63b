//! Modular symbols `Phi : Div^0 P^1(Q) -> M` with `Phi(gamma D) | gamma = Phi(D)`, stored on
//! the free Manin generators, and Hecke operators `(Phi | T)(D) = sum_h Phi(h D) | h`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::manin::{act_cusp, cusp, mmul, unimodular_path, Cusp, ManinData, Mat2, INFINITY};
use crate::padic::PadicNumber;
use crate::pardist::{DeltaElement, MomentDistribution};

/// A right `Delta`-module in which symbols take values.
pub trait Coefficients: Clone {
    type Elem: Clone + std::fmt::Debug;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn act(&self, v: &Self::Elem, g: &Mat2) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// `Q` with the trivial action (weight two).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rationals;

impl Coefficients for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn act(&self, v: &BigRational, _: &Mat2) -> BigRational {
        v.clone()
    }
}

/// `V_lambda^vee` for `n = 1` in coordinates `mu(x^i)`, `i <= l1 - l2`, over `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PolyDual {
    pub p: u64,
    pub lambda: [i64; 2],
    pub prec: i64,
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[i128], e: usize) -> Vec<i128> {
    (0..e).fold(vec![1], |acc, _| poly_mul(&acc, a))
}

fn unit_part(mut x: i128, p: u64) -> i128 {
    while x % p as i128 == 0 {
        x /= p as i128;
    }
    x
}

impl PolyDual {
    pub fn dim(&self) -> usize {
        (self.lambda[0] - self.lambda[1]) as usize + 1
    }
}

impl Coefficients for PolyDual {
    type Elem = Vec<PadicNumber>;
    fn zero(&self) -> Self::Elem {
        vec![PadicNumber::zero(self.p, self.prec); self.dim()]
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| x.neg()).collect()
    }
    /// `(mu | g)(x^i) = mu(u(det)^{l2} (b + dx)^i (a + cx)^{k - i})`.
    fn act(&self, v: &Self::Elem, g: &Mat2) -> Self::Elem {
        let k = self.dim() - 1;
        let u = PadicNumber::from_i128(self.p, unit_part(super::manin::det(g), self.p), self.prec + 64)
            .pow(self.lambda[1])
            .expect("unit determinant part");
        (0..=k)
            .map(|i| {
                let poly = poly_mul(&poly_pow(&[g[1], g[3]], i), &poly_pow(&[g[0], g[2]], k - i));
                let s = poly.iter().zip(v).fold(PadicNumber::zero(self.p, self.prec), |acc, (c, x)| {
                    acc.add(&x.mul(&PadicNumber::from_i128(self.p, *c, self.prec + 64)))
                });
                s.mul(&u)
            })
            .collect()
    }
}

/// Truncated distributions `D_lambda` with `M` moments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Moments {
    pub p: u64,
    pub lambda: [i64; 2],
    pub m: u32,
}

impl Moments {
    pub fn delta(&self, g: &Mat2) -> DeltaElement {
        DeltaElement::new(self.p, g[0], g[1], g[2], g[3]).unwrap_or_else(|_| panic!("{g:?} does not act on distributions"))
    }
}

impl Coefficients for Moments {
    type Elem = MomentDistribution;
    fn zero(&self) -> MomentDistribution {
        MomentDistribution::zero(self.p, self.lambda, self.m).expect("valid truncation")
    }
    fn add(&self, a: &MomentDistribution, b: &MomentDistribution) -> MomentDistribution {
        a.add(b)
    }
    fn neg(&self, a: &MomentDistribution) -> MomentDistribution {
        self.zero().sub(a)
    }
    fn act(&self, v: &MomentDistribution, g: &Mat2) -> MomentDistribution {
        v.act(&self.delta(g))
    }
}

/// A symbol given by its values on the free Manin generators.
#[derive(Clone, Debug)]
pub struct Symbol<C: Coefficients> {
    pub manin: Arc<ManinData>,
    pub module: C,
    pub values: Vec<C::Elem>,
}

impl<C: Coefficients> Symbol<C> {
    pub fn new(manin: Arc<ManinData>, module: C, values: Vec<C::Elem>) -> Self {
        assert_eq!(values.len(), manin.num_free());
        Symbol { manin, module, values }
    }
    pub fn zero(manin: Arc<ManinData>, module: C) -> Self {
        let values = vec![module.zero(); manin.num_free()];
        Symbol { manin, module, values }
    }

    /// `Phi(g {0 -> oo})` for `g` in `SL_2(Z)`.
    pub fn unimodular(&self, g: &Mat2) -> C::Elem {
        let e = self.manin.expr(g);
        let v = self.module.act(&self.values[e.free], &e.h);
        if e.sign < 0 {
            self.module.neg(&v)
        } else {
            v
        }
    }

    /// `Phi({oo -> r})`.
    pub fn from_infinity(&self, r: Cusp) -> C::Elem {
        unimodular_path(r).iter().fold(self.module.zero(), |acc, g| self.module.add(&acc, &self.unimodular(g)))
    }

    /// `Phi({r -> s}) = Phi({s} - {r})`.
    pub fn path(&self, r: Cusp, s: Cusp) -> C::Elem {
        self.module.sub(&self.from_infinity(s), &self.from_infinity(r))
    }

    /// `Phi(g {0 -> oo})` for any `g` with nonzero determinant.
    pub fn on_matrix(&self, g: &Mat2) -> C::Elem {
        self.path(act_cusp(g, (0, 1)), act_cusp(g, INFINITY))
    }

    /// `sum_h Phi(h D) | h`.
    pub fn hecke(&self, mats: &[Mat2]) -> Self {
        let values = self
            .manin
            .free
            .iter()
            .map(|&j| {
                let g = self.manin.lifts[j];
                mats.iter().fold(self.module.zero(), |acc, h| {
                    let v = self.on_matrix(&mmul(h, &g));
                    self.module.add(&acc, &self.module.act(&v, h))
                })
            })
            .collect();
        Symbol { values, ..self.clone() }
    }

    pub fn t_ell(&self, ell: u64) -> Self {
        let l = ell as i128;
        let mut mats: Vec<Mat2> = (0..l).map(|a| [1, a, 0, l]).collect();
        mats.push([l, 0, 0, 1]);
        self.hecke(&mats)
    }

    /// `U_p` with cosets `(1 a; 0 p)`, `a = 0..p-1`.
    pub fn u_p(&self, p: u64) -> Self {
        self.hecke(&up_cosets(p))
    }

    /// Action of `(-1 0; 0 1)`.
    pub fn iota(&self) -> Self {
        self.hecke(&[[-1, 0, 0, 1]])
    }

    pub fn add(&self, o: &Self) -> Self {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| self.module.add(a, b)).collect();
        Symbol { values, ..self.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| self.module.sub(a, b)).collect();
        Symbol { values, ..self.clone() }
    }

    pub fn map<D: Coefficients>(&self, module: D, f: impl Fn(&C::Elem) -> D::Elem) -> Symbol<D> {
        Symbol { manin: self.manin.clone(), module, values: self.values.iter().map(f).collect() }
    }

    /// Value of each remaining Manin relation; all vanish for a genuine symbol.
    pub fn relation_values(&self) -> Vec<C::Elem> {
        self.manin
            .relations
            .iter()
            .map(|rel| {
                rel.iter().fold(self.module.zero(), |acc, (s, g)| {
                    let v = self.unimodular(g);
                    if *s < 0 {
                        self.module.sub(&acc, &v)
                    } else {
                        self.module.add(&acc, &v)
                    }
                })
            })
            .collect()
    }
}

pub fn up_cosets(p: u64) -> Vec<Mat2> {
    (0..p as i128).map(|a| [1, a, 0, p as i128]).collect()
}

/// `(1 b; 0 p^beta)`.
pub fn gamma_b(b: i128, q: i128) -> Mat2 {
    [1, b, 0, q]
}

/// `Phi(gamma_b {0 -> oo}) = Phi({b / p^beta -> oo})`.
pub fn value_at_gamma_b<C: Coefficients>(phi: &Symbol<C>, b: i128, q: i128) -> C::Elem {
    phi.path(cusp(b, q), INFINITY)
}
