//! Irreducible algebraic representations of `GL(m)` as spans of right translates of the
//! highest-weight function `prod_i Delta_i^{l_i - l_{i+1}} * det^{l_m}`.

use super::group::{zpow_signed, Fq, IMat, SampleStream};
use super::ReprError;
use crate::padic::{smith, solve_with_smith, PadicNumber, Smith, ZMat, Zmod};

/// `V_lambda` for `GL(m)`: basis element `i` is `g -> f0(g k_i)`.
#[derive(Clone, Debug)]
pub struct PolyRep {
    lambda: Vec<i64>,
    basis: Vec<IMat>,
}

/// Weyl dimension formula for a dominant weight of `GL(m)`.
pub fn weyl_dim(lambda: &[i64]) -> usize {
    let m = lambda.len();
    let (mut num, mut den) = (1i128, 1i128);
    for i in 0..m {
        for j in i + 1..m {
            num *= (lambda[i] - lambda[j]) as i128 + (j - i) as i128;
            den *= (j - i) as i128;
        }
    }
    (num / den) as usize
}

fn generators(m: usize) -> Vec<IMat> {
    let mut g = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                g.push(IMat::elementary(m, i, j, 1));
                g.push(IMat::elementary(m, i, j, -1));
            }
        }
    }
    g.push(IMat::antidiagonal(m));
    g
}

/// Incremental row echelon form modulo `2^61 - 1`.
struct Echelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (pc, row) in &self.rows {
            let c = v[*pc];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = Fq::sub(*x, Fq::mul(c, r));
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x != 0) else { return false };
        let inv = Fq::inv(v[pc]);
        for x in v.iter_mut() {
            *x = Fq::mul(*x, inv);
        }
        self.rows.push((pc, v));
        true
    }
}

impl PolyRep {
    pub fn build(lambda: &[i64]) -> Result<Self, ReprError> {
        if lambda.is_empty() || lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(ReprError::NotDominant(lambda.to_vec()));
        }
        let m = lambda.len();
        let target = weyl_dim(lambda);
        let gens = generators(m);
        let mut n_samples = 2 * target;
        for attempt in 0..4u64 {
            let mut stream = SampleStream::new(0x5eed + attempt);
            let samples: Vec<IMat> = (0..n_samples).map(|_| stream.invertible(m, 0)).collect();
            let probe = PolyRep { lambda: lambda.to_vec(), basis: Vec::new() };
            let row = |k: &IMat| samples.iter().map(|s| probe.f0_q(&s.mul(k))).collect::<Vec<_>>();
            let mut ech = Echelon { rows: Vec::new() };
            let mut basis = vec![IMat::identity(m)];
            ech.insert(row(&basis[0]));
            let mut head = 0;
            while head < basis.len() && basis.len() < target {
                let k = basis[head].clone();
                head += 1;
                for g in &gens {
                    let cand = k.mul(g);
                    if ech.insert(row(&cand)) {
                        basis.push(cand);
                        if basis.len() == target {
                            break;
                        }
                    }
                }
            }
            if basis.len() == target {
                return Ok(PolyRep { lambda: lambda.to_vec(), basis });
            }
            n_samples *= 2;
        }
        Err(ReprError::DimensionMismatch { weyl: target })
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    /// Size of the matrices the functions are defined on.
    pub fn rank(&self) -> usize {
        self.lambda.len()
    }
    pub fn translates(&self) -> &[IMat] {
        &self.basis
    }

    /// Exponents of the leading minors and of the determinant.
    fn exponents(&self) -> (Vec<i64>, i64) {
        let l = &self.lambda;
        let m = l.len();
        ((0..m - 1).map(|i| l[i] - l[i + 1]).collect(), l[m - 1])
    }

    fn f0_q(&self, g: &IMat) -> u64 {
        let (ex, dexp) = self.exponents();
        let mut acc = Fq::pow_signed(Fq::reduce(g.det()), dexp);
        for (i, &e) in ex.iter().enumerate() {
            if e != 0 {
                acc = Fq::mul(acc, Fq::pow(Fq::reduce(g.leading_minor(i + 1)), e as u64));
            }
        }
        acc
    }

    /// `f0(g)` modulo `p^N`; `None` when a negative determinant power is not invertible.
    pub fn f0_mod(&self, z: &Zmod, g: &IMat) -> Option<u64> {
        let (ex, dexp) = self.exponents();
        let mut acc = zpow_signed(z, g.det(), dexp)?;
        for (i, &e) in ex.iter().enumerate() {
            if e != 0 {
                acc = z.mul(acc, zpow_signed(z, g.leading_minor(i + 1), e)?);
            }
        }
        Some(acc)
    }

    /// `f0(g)` as a p-adic number, allowing a determinant divisible by `p`.
    pub fn f0_padic(&self, g: &IMat, p: u64, prec: i64) -> PadicNumber {
        let (ex, dexp) = self.exponents();
        let det = PadicNumber::from_i128(p, g.det(), prec + 64);
        let mut acc = det.pow(dexp).unwrap_or_else(|_| PadicNumber::zero(p, prec));
        for (i, &e) in ex.iter().enumerate() {
            if e != 0 {
                let d = PadicNumber::from_i128(p, g.leading_minor(i + 1), prec + 64);
                acc = acc.mul(&d.pow(e).expect("nonnegative exponent"));
            }
        }
        acc.with_precision(prec)
    }

    /// Basis function `i` at `g`.
    pub fn eval_mod(&self, z: &Zmod, i: usize, g: &IMat) -> Option<u64> {
        self.f0_mod(z, &g.mul(&self.basis[i]))
    }

    /// Vector with coordinates `c` evaluated at `g`.
    pub fn eval_vec_mod(&self, z: &Zmod, c: &[u64], g: &IMat) -> Option<u64> {
        let mut acc = 0;
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = z.add(acc, z.mul(ci, self.eval_mod(z, i, g)?));
            }
        }
        Some(acc)
    }

    pub fn eval_vec_padic(&self, c: &[PadicNumber], g: &IMat) -> PadicNumber {
        let p = c[0].prime();
        let prec = c.iter().map(|x| x.precision()).min().unwrap();
        c.iter().enumerate().fold(PadicNumber::zero(p, prec), |acc, (i, ci)| {
            acc.add(&ci.mul(&self.f0_padic(&g.mul(&self.basis[i]), p, prec + 64)))
        })
    }
}

/// Evaluation of a representation at a fixed sample set modulo `p^N`, factored for repeated solves.
pub struct Evaluator<'a> {
    pub rep: &'a PolyRep,
    pub z: Zmod,
    pub samples: Vec<IMat>,
    pub matrix: ZMat,
    smith: Smith,
}

impl<'a> Evaluator<'a> {
    /// Samples have determinant prime to `p`; `make` draws them from a deterministic stream.
    pub fn new(
        rep: &'a PolyRep,
        z: Zmod,
        mut make: impl FnMut(&mut SampleStream) -> IMat,
    ) -> Result<Self, ReprError> {
        let mut count = 2 * rep.dim();
        for attempt in 0..4u64 {
            let mut stream = SampleStream::new(0xe7a1 + attempt);
            let samples: Vec<IMat> = (0..count).map(|_| make(&mut stream)).collect();
            let mut matrix = ZMat::zeros(count, rep.dim());
            for (s, g) in samples.iter().enumerate() {
                for i in 0..rep.dim() {
                    matrix.set(s, i, rep.eval_mod(&z, i, g).ok_or(ReprError::SampleNotInvertible)?);
                }
            }
            let smith = smith(&z, &matrix, true);
            if smith.rank() == rep.dim() && smith.invariants.last().is_none_or(|&v| 2 * v < z.n()) {
                return Ok(Evaluator { rep, z, samples, matrix, smith });
            }
            count *= 2;
        }
        Err(ReprError::SamplingDeficiency)
    }

    /// Worst valuation of an invariant of the evaluation matrix.
    pub fn conditioning(&self) -> u32 {
        self.smith.invariants.last().copied().unwrap_or(0)
    }

    /// Coordinates of the element of the span taking the given values at the samples.
    pub fn coords(&self, values: &[u64]) -> Result<Vec<u64>, ReprError> {
        Ok(solve_with_smith(&self.z, &self.smith, values).map_err(|_| ReprError::NotInSpan)?.0)
    }

    /// Matrix of right translation `f -> f(. g)` in the translate basis.
    pub fn action_matrix(&self, g: &IMat) -> Result<ZMat, ReprError> {
        let d = self.rep.dim();
        let mut out = ZMat::zeros(d, d);
        for i in 0..d {
            let vals = self
                .samples
                .iter()
                .map(|s| self.rep.eval_mod(&self.z, i, &s.mul(g)))
                .collect::<Option<Vec<_>>>()
                .ok_or(ReprError::SampleNotInvertible)?;
            let c = self.coords(&vals)?;
            for (r, &x) in c.iter().enumerate() {
                out.set(r, i, x);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_dimensions() {
        assert_eq!(weyl_dim(&[5]), 1);
        assert_eq!(weyl_dim(&[1, 0]), 2);
        assert_eq!(weyl_dim(&[2, 0]), 3);
        assert_eq!(weyl_dim(&[1, 0, 0]), 3);
        assert_eq!(weyl_dim(&[2, 1, -1, -2]), 175);
        assert_eq!(weyl_dim(&[1, 0, 0, -1]), 15);
    }

    #[test]
    fn small_irreps() {
        let r = PolyRep::build(&[3]).unwrap();
        assert_eq!(r.dim(), 1);
        let z = Zmod::new(5, 6).unwrap();
        // x^3 on GL(1)
        assert_eq!(r.eval_mod(&z, 0, &IMat::diag(&[2])), Some(8));
        assert_eq!(PolyRep::build(&[1, 0]).unwrap().dim(), 2);
        assert_eq!(PolyRep::build(&[2, 0]).unwrap().dim(), 3);
        assert_eq!(PolyRep::build(&[0, -1]).unwrap().dim(), 2);
        assert!(PolyRep::build(&[0, 1]).is_err());
    }

    #[test]
    fn action_is_a_homomorphism() {
        let r = PolyRep::build(&[2, 0, -1]).unwrap();
        let z = Zmod::new(5, 12).unwrap();
        let ev = Evaluator::new(&r, z, |s| s.invertible(3, 5)).unwrap();
        let g = IMat::from_rows(&[vec![1, 2, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let h = IMat::from_rows(&[vec![2, 1, 0], vec![1, 1, 0], vec![0, 3, 1]]);
        let (ag, ah, agh) = (ev.action_matrix(&g).unwrap(), ev.action_matrix(&h).unwrap(), ev.action_matrix(&g.mul(&h)).unwrap());
        // (gh).f = g.(h.f) for right translation: f(x g h)
        assert_eq!(agh, ag.mul(&z, &ah));
    }
}
