//! Component data for evaluation maps, coinvariant quotients of truncated modules, and a
//! two-dimensional toy module on which the change-of-level identity can be tested with
//! arbitrary classes.

use serde::{Deserialize, Serialize};

use super::manin::{mmul, Mat2};
use super::symbol::{gamma_b, up_cosets};
use super::EvalError;
use crate::galdist::units;
use crate::padic::{smith, solve, ZMat, Zmod};

pub const CYCLE_SCHEMA: &str = "parahoric.cycle-data.v1";

/// Quotient `M_Gamma = M / <m - m g>` of `(Z/p^N)^dim` (row vectors, right action).
#[derive(Clone, Debug)]
pub struct Coinvariants {
    z: Zmod,
    dim: usize,
    v: ZMat,
    /// `(column of V, order exponent)` for each surviving coordinate.
    coords: Vec<(usize, u32)>,
}

/// Coinvariants of `(Z/p^N)^dim` under the matrices `gens`.
pub fn coinvariants(z: &Zmod, dim: usize, gens: &[ZMat]) -> Coinvariants {
    let mut rel = ZMat::zeros(0, dim);
    for g in gens {
        assert_eq!((g.rows, g.cols), (dim, dim));
        rel = rel.vstack(&ZMat::identity(dim).sub(z, g));
    }
    let s = smith(z, &rel, false);
    let coords = (0..dim)
        .map(|i| (i, s.invariants.get(i).copied().unwrap_or(z.n())))
        .filter(|&(_, e)| e > 0)
        .collect();
    Coinvariants { z: z.clone(), dim, v: s.v, coords }
}

fn order(z: &Zmod, e: u32) -> u64 {
    if e >= z.n() {
        z.modulus()
    } else {
        z.p_pow(e)
    }
}

impl Coinvariants {
    /// Orders `p^e` of the cyclic summands.
    pub fn orders(&self) -> Vec<u32> {
        self.coords.iter().map(|&(_, e)| e).collect()
    }
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
    /// Rank of the free part.
    pub fn free_rank(&self) -> usize {
        self.coords.iter().filter(|&&(_, e)| e == self.z.n()).count()
    }
    pub fn project(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.dim);
        let y = self.v.transpose().mul_vec(&self.z, x);
        self.coords.iter().map(|&(i, e)| y[i] % order(&self.z, e)).collect()
    }
    /// Some preimage in `M` of a quotient element.
    pub fn lift(&self, w: &[u64]) -> Vec<u64> {
        let mut y = vec![0u64; self.dim];
        for (&(i, _), &x) in self.coords.iter().zip(w) {
            y[i] = x;
        }
        solve(&self.z, &self.v.transpose(), &y).expect("V is invertible").particular
    }
}

/// Level, component representatives, stabilizer generators and orientation signs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleData {
    pub schema: String,
    pub p: u64,
    pub beta: u32,
    pub deltas: Vec<Mat2>,
    /// Generators of the stabilizer attached to each representative.
    pub generators: Vec<Vec<Mat2>>,
    pub orientation: Vec<i8>,
}

impl CycleData {
    /// Representatives `(1 b; 0 p^beta)` for units `b` and the unipotent stabilizer `(1 p^beta; 0 1)`.
    pub fn standard(p: u64, beta: u32) -> Result<Self, EvalError> {
        if beta == 0 {
            return Err(EvalError::Beta);
        }
        let q = (p as i128).pow(beta);
        let bs = units(p, beta);
        Ok(CycleData {
            schema: CYCLE_SCHEMA.into(),
            p,
            beta,
            deltas: bs.iter().map(|&b| gamma_b(b as i128, q)).collect(),
            generators: bs.iter().map(|_| vec![[1, q, 0, 1]]).collect(),
            orientation: vec![1; bs.len()],
        })
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.schema != CYCLE_SCHEMA {
            return Err(EvalError::Unsupported(format!("schema {}", self.schema)));
        }
        if self.beta == 0 {
            return Err(EvalError::Beta);
        }
        let n = self.deltas.len();
        if self.generators.len() != n || self.orientation.len() != n {
            return Err(EvalError::Unsupported("cycle data lists have different lengths".into()));
        }
        if self.orientation.iter().any(|s| s.abs() != 1) {
            return Err(EvalError::Unsupported("orientation signs must be +1 or -1".into()));
        }
        Ok(())
    }

    /// Index of the representative whose class is `b mod p^beta`.
    pub fn component_of(&self, b: i128) -> Result<usize, EvalError> {
        let q = (self.p as i128).pow(self.beta);
        self.deltas.iter().position(|d| (d[1] - b).rem_euclid(q) == 0).ok_or(EvalError::NotAComponent(b))
    }
}

fn to_zmat(z: &Zmod, g: &Mat2) -> ZMat {
    ZMat::from_rows(vec![vec![z.reduce(g[0]), z.reduce(g[1])], vec![z.reduce(g[2]), z.reduce(g[3])]])
}

/// A class on the toy module `(Z/p^N)^2`: a function from matrices to vectors.
#[derive(Clone, Debug)]
pub enum ToyClass {
    /// Deterministic pseudo-random values.
    Base { seed: u64 },
    /// `(U_p Phi)(g) = sum_a Phi(h_a g) h_a`.
    Up(Box<ToyClass>),
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl ToyClass {
    pub fn value(&self, z: &Zmod, p: u64, g: &Mat2) -> Vec<u64> {
        match self {
            ToyClass::Base { seed } => {
                let h = g.iter().fold(mix(*seed), |acc, &e| mix(acc ^ e as u64));
                vec![h % z.modulus(), mix(h) % z.modulus()]
            }
            ToyClass::Up(inner) => up_cosets(p).iter().fold(vec![0, 0], |acc, h| {
                let v = to_zmat(z, h).transpose().mul_vec(z, &inner.value(z, p, &mmul(h, g)));
                vec![z.add(acc[0], v[0]), z.add(acc[1], v[1])]
            }),
        }
    }

    /// `Ev_{beta, delta}`: `Phi(delta) delta` pushed to the coinvariants of the stabilizer of `delta`.
    pub fn ev(&self, z: &Zmod, cycle: &CycleData, index: usize) -> Vec<u64> {
        let d = &cycle.deltas[index];
        let x = to_zmat(z, d).transpose().mul_vec(z, &self.value(z, cycle.p, d));
        let x: Vec<u64> = if cycle.orientation[index] < 0 { x.iter().map(|&v| z.neg(v)).collect() } else { x };
        toy_coinvariants(z, cycle, index).project(&x)
    }
}

pub fn toy_coinvariants(z: &Zmod, cycle: &CycleData, index: usize) -> Coinvariants {
    let gens: Vec<ZMat> = cycle.generators[index].iter().map(|g| to_zmat(z, g)).collect();
    coinvariants(z, 2, &gens)
}

/// Checks `sum_{b' -> b} tr(Ev_{beta+1, b'}(Phi)) = Ev_{beta, b}(U_p Phi)` for every `b`.
pub fn toy_change_of_level(z: &Zmod, phi: &ToyClass, lo: &CycleData, hi: &CycleData) -> bool {
    let up = ToyClass::Up(Box::new(phi.clone()));
    let qlo = (lo.p as i128).pow(lo.beta);
    (0..lo.deltas.len()).all(|i| {
        let target = up.ev(z, lo, i);
        let lo_co = toy_coinvariants(z, lo, i);
        let mut sum = vec![0u64; lo_co.dim()];
        for (j, d) in hi.deltas.iter().enumerate() {
            if (d[1] - lo.deltas[i][1]).rem_euclid(qlo) != 0 {
                continue;
            }
            let w = phi.ev(z, hi, j);
            let t = lo_co.project(&toy_coinvariants(z, hi, j).lift(&w));
            for (s, x) in sum.iter_mut().zip(t) {
                *s = z.add(*s, x);
            }
        }
        let orders = lo_co.orders();
        sum.iter().zip(&target).zip(&orders).all(|((a, b), &e)| (a % order(z, e)) == (b % order(z, e)))
    })
}
