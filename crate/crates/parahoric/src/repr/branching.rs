//! `V_lambda^H`, the diagonal invariant `v_lambda`, branching dimensions and the vectors
//! `nu_{lambda,j}` for `GL(n) x GL(n)` inside `GL(2n)`.

use super::group::{zpow_signed, IMat, SampleStream};
use super::irrep::{Evaluator, PolyRep};
use super::ReprError;
use crate::padic::{kernel, PadicNumber, ZMat, Zmod};
use crate::weights::Weight;

/// `V_{lambda'} (x) V_{lambda''}` realised as functions `phi(a, b)` on `GL(n) x GL(n)`.
#[derive(Clone, Debug)]
pub struct TensorRep {
    pub left: PolyRep,
    pub right: PolyRep,
}

impl TensorRep {
    pub fn build(lambda: &Weight) -> Result<Self, ReprError> {
        if lambda.d() != 1 {
            return Err(ReprError::Unsupported("representations are built for d = 1 only".into()));
        }
        let (a, b) = lambda.blocks(0);
        Ok(TensorRep { left: PolyRep::build(a)?, right: PolyRep::build(b)? })
    }
    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }
    pub fn n(&self) -> usize {
        self.left.rank()
    }
    pub fn eval_mod(&self, z: &Zmod, idx: usize, a: &IMat, b: &IMat) -> Option<u64> {
        let (i, j) = (idx / self.right.dim(), idx % self.right.dim());
        Some(z.mul(self.left.eval_mod(z, i, a)?, self.right.eval_mod(z, j, b)?))
    }
    pub fn eval_vec_mod(&self, z: &Zmod, c: &[u64], a: &IMat, b: &IMat) -> Option<u64> {
        let mut acc = 0;
        for (idx, &ci) in c.iter().enumerate() {
            if ci != 0 {
                acc = z.add(acc, z.mul(ci, self.eval_mod(z, idx, a, b)?));
            }
        }
        Some(acc)
    }
}

/// Generators of `GL(n, Z)` together with `diag(2, 1, ..., 1)`.
fn gl_n_generators(n: usize) -> Vec<IMat> {
    let mut g = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g.push(IMat::elementary(n, i, j, 1));
            }
        }
    }
    let mut t = vec![1i128; n];
    t[0] = 2;
    g.push(IMat::diag(&t));
    if n > 1 {
        g.push(IMat::antidiagonal(n));
    }
    g
}

/// Generators of `{x : A x = 0}` that hold exactly modulo `p^N`.
///
/// Torsion in the sampled system (characters of `H(Z)` that agree modulo `p`) can contaminate the
/// last digits of a full-order kernel vector, so the system is rebuilt with that many extra digits
/// and the result is reduced back.
fn exact_kernel(z: &Zmod, build: impl Fn(&Zmod) -> Result<ZMat, ReprError>) -> Result<Vec<Vec<u64>>, ReprError> {
    let k = kernel(z, &build(z)?);
    let loss = k.vectors.iter().map(|v| v.order).filter(|&o| o < z.n()).max().unwrap_or(0);
    if loss == 0 {
        return Ok(k.full(z.n()).into_iter().cloned().collect());
    }
    let wide = z.with_precision(z.n() + loss)?;
    let k = kernel(&wide, &build(&wide)?);
    Ok(k.vectors.iter().filter(|v| v.order >= z.n()).map(|v| v.vector.iter().map(|&x| x % z.modulus()).collect()).collect())
}

/// Elements `diag(h1, h2)` of `H(Z)` generating a Zariski-dense subgroup.
pub fn h_generators(n: usize) -> Vec<(IMat, IMat)> {
    let mut out = Vec::new();
    for g in gl_n_generators(n) {
        out.push((g.clone(), IMat::identity(n)));
        out.push((IMat::identity(n), g));
    }
    out
}

/// Scale a primitive vector so that its first nonzero coordinate is a power of `p`.
fn normalize_unit(z: &Zmod, v: &mut [u64]) {
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        let (_, u) = z.split(first);
        let inv = z.inv(u).expect("unit part");
        for x in v.iter_mut() {
            *x = z.mul(*x, inv);
        }
    }
}

/// `(a  aX; 0  b)`.
pub fn parabolic(a: &IMat, x: &IMat, b: &IMat) -> IMat {
    IMat::block(a, &a.mul(x), &IMat::zero(a.m), b)
}

/// Branching data of a pure weight over `Q`.
#[derive(Clone, Debug)]
pub struct Branching {
    pub weight: Weight,
    pub z: Zmod,
    pub vlam: PolyRep,
    pub vh: TensorRep,
    /// Coordinates of `v_lambda` in the tensor basis.
    pub v_lambda: Vec<u64>,
}

/// `nu_{lambda,j}` in the translate basis of `V_lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingVector {
    pub j: i64,
    pub nu: Vec<u64>,
}

/// Linear functional on `V_lambda` in the dual of the translate basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualVector {
    pub lambda: Vec<i64>,
    pub coeffs: Vec<PadicNumber>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuReport {
    pub equivariant: bool,
    pub restriction: bool,
    pub tested: usize,
}

impl Branching {
    pub fn new(weight: &Weight, z: Zmod) -> Result<Self, ReprError> {
        let w = weight.purity_weight().ok_or(ReprError::NotPure)?;
        let vh = TensorRep::build(weight)?;
        let vlam = PolyRep::build(weight.sigma(0))?;
        let v_lambda = diagonal_invariant(&vh, w, &z)?;
        let n = weight.n();
        let loss = Evaluator::new(&vlam, z, |s| s.invertible(2 * n, z.p()))?.conditioning();
        if loss > 0 {
            return Err(ReprError::PrimeTooSmall { p: z.p(), loss });
        }
        Ok(Branching { weight: weight.clone(), z, vlam, vh, v_lambda })
    }

    pub fn n(&self) -> usize {
        self.weight.n()
    }

    fn w(&self) -> i64 {
        self.weight.purity_weight().expect("checked at construction")
    }

    fn character(&self, j: i64, h1: &IMat, h2: &IMat) -> Option<u64> {
        self.character_in(&self.z, j, h1, h2)
    }

    fn character_in(&self, z: &Zmod, j: i64, h1: &IMat, h2: &IMat) -> Option<u64> {
        Some(z.mul(zpow_signed(z, h1.det(), -j)?, zpow_signed(z, h2.det(), self.w() + j)?))
    }

    /// Rows `f(s h) - chi_j(h) f(s)` over samples `s` and generators `h` of `H`, in the
    /// translate basis.
    fn equivariance_system(&self, z: &Zmod, j: i64) -> Result<ZMat, ReprError> {
        let z = *z;
        let n = self.n();
        let ev = Evaluator::new(&self.vlam, z, |s| s.invertible(2 * n, z.p()))?;
        let hs = h_generators(n);
        let d = self.vlam.dim();
        let mut a = ZMat::zeros(ev.samples.len() * hs.len(), d);
        let mut row = 0;
        for (h1, h2) in &hs {
            let h = IMat::block(h1, &IMat::zero(n), &IMat::zero(n), h2);
            let chi = self.character_in(&z, j, h1, h2).ok_or(ReprError::SampleNotInvertible)?;
            for (s_idx, s) in ev.samples.iter().enumerate() {
                let sh = s.mul(&h);
                for i in 0..d {
                    let moved = self.vlam.eval_mod(&z, i, &sh).ok_or(ReprError::SampleNotInvertible)?;
                    a.set(row, i, z.sub(moved, z.mul(chi, ev.matrix.get(s_idx, i))));
                }
                row += 1;
            }
        }
        Ok(a)
    }

    /// `dim Hom_H(V_lambda^vee, det^{j} (x) det^{-w-j})` as the dimension of the space of
    /// `f` with `f(g diag(h1, h2)) = det(h1)^{-j} det(h2)^{w+j} f(g)`.
    pub fn hom_dimension(&self, j: i64) -> Result<usize, ReprError> {
        Ok(exact_kernel(&self.z, |z| self.equivariance_system(z, j))?.len())
    }

    /// Right-hand side of the defining restriction of `nu_j` at `(a  aX; 0  b)`.
    fn nu_target(&self, j: i64, a: &IMat, x: &IMat, b: &IMat) -> Option<u64> {
        let z = &self.z;
        let sign = if (self.n() as i64 * j).rem_euclid(2) == 1 { z.neg(1) } else { 1 };
        let detx = zpow_signed(z, x.det(), j)?;
        let v = self.vh.eval_vec_mod(z, &self.v_lambda, &a.mul(x), b)?;
        Some(z.mul(sign, z.mul(detx, v)))
    }

    /// `(a, X, b)` with `X` drawn from a range wide enough to separate polynomials in `X`.
    fn parabolic_sample(&self, s: &mut SampleStream) -> (IMat, IMat, IMat) {
        let (n, p) = (self.n(), self.z.p());
        let r = (self.vlam.dim() as i128).max(2);
        (s.invertible(n, p), s.invertible_in(n, p, r), s.invertible(n, p))
    }

    /// The unique `nu in V_lambda` with `nu(a aX; 0 b) = (-1)^{nj} det(X)^j v_lambda(aX, b)`.
    ///
    /// `nu` spans the `H`-equivariant line, which is solved exactly; the restriction law only
    /// fixes the scalar. Interpolating the restriction directly loses digits when `X` must be a
    /// unit and `p` is small against the degree in `X`.
    pub fn nu_vector(&self, j: i64) -> Result<BranchingVector, ReprError> {
        let crit = self.weight.crit_range().map_err(|_| ReprError::NotPure)?;
        if !crit.contains(&j) {
            return Err(ReprError::NotCritical(j));
        }
        let z = self.z;
        let line = match exact_kernel(&z, |z| self.equivariance_system(z, j))?.as_slice() {
            [v] => v.clone(),
            other => return Err(ReprError::KernelDimension(other.len())),
        };
        let mut s = SampleStream::new(0x5ca1e);
        let mut pairs = Vec::new();
        for _ in 0..2 * self.vlam.dim() + 4 {
            let (a, x, b) = self.parabolic_sample(&mut s);
            let g = parabolic(&a, &x, &b);
            let e = self.vlam.eval_vec_mod(&z, &line, &g).ok_or(ReprError::SampleNotInvertible)?;
            let t = self.nu_target(j, &a, &x, &b).ok_or(ReprError::SampleNotInvertible)?;
            pairs.push((e, t));
        }
        let &(e, t) = pairs.iter().min_by_key(|(e, _)| z.val(*e)).ok_or(ReprError::NotInSpan)?;
        let v = z.val(e);
        if v >= z.n() || z.val(t) < v {
            return Err(ReprError::NotInSpan);
        }
        let c = z.mul(z.div_p_pow(t, v), z.inv(z.div_p_pow(e, v)).expect("unit part"));
        if pairs.iter().any(|&(e, t)| z.mul(c, e) != t) {
            return Err(ReprError::NotInSpan);
        }
        let nu: Vec<u64> = line.iter().map(|&x| z.mul(c, x)).collect();
        if nu.iter().all(|&x| x == 0) {
            return Err(ReprError::NotInSpan);
        }
        Ok(BranchingVector { j, nu })
    }

    /// Check the restriction law and `H`-equivariance of `nu` at `count` fresh elements.
    pub fn verify_nu(&self, bv: &BranchingVector, count: usize) -> Result<NuReport, ReprError> {
        let z = self.z;
        let n = self.n();
        let mut s = SampleStream::new(0x7e57u64.wrapping_add(bv.j as u64));
        let (mut equivariant, mut restriction) = (true, true);
        let bad = ReprError::SampleNotInvertible;
        for _ in 0..count {
            let (a, x, b) = self.parabolic_sample(&mut s);
            let lhs = self.vlam.eval_vec_mod(&z, &bv.nu, &parabolic(&a, &x, &b)).ok_or(bad.clone())?;
            restriction &= lhs == self.nu_target(bv.j, &a, &x, &b).ok_or(bad.clone())?;
            let g = s.invertible(2 * n, z.p());
            let (h1, h2) = (s.invertible(n, z.p()), s.invertible(n, z.p()));
            let h = IMat::block(&h1, &IMat::zero(n), &IMat::zero(n), &h2);
            let moved = self.vlam.eval_vec_mod(&z, &bv.nu, &g.mul(&h)).ok_or(bad.clone())?;
            let base = self.vlam.eval_vec_mod(&z, &bv.nu, &g).ok_or(bad.clone())?;
            equivariant &= moved == z.mul(self.character(bv.j, &h1, &h2).ok_or(bad.clone())?, base);
        }
        Ok(NuReport { equivariant, restriction, tested: count })
    }

    /// `kappa°_{lambda,j}(mu) = mu(nu_{lambda,j})`.
    pub fn kappa_j_functional(&self, mu: &DualVector, bv: &BranchingVector) -> Result<PadicNumber, ReprError> {
        if mu.lambda != self.weight.sigma(0) || mu.coeffs.len() != bv.nu.len() {
            return Err(ReprError::HostMismatch);
        }
        let p = self.z.p();
        let prec = self.z.n() as i64;
        Ok(mu.coeffs.iter().zip(&bv.nu).fold(PadicNumber::zero(p, prec), |acc, (m, &v)| {
            acc.add(&m.mul(&PadicNumber::from_residue(&self.z, v)))
        }))
    }
}

/// The line of `v in V^H` with `<diag(h, h)> v = det(h)^w v`, normalised integrally.
pub fn diagonal_invariant(vh: &TensorRep, w: i64, z: &Zmod) -> Result<Vec<u64>, ReprError> {
    let n = vh.n();
    let d = vh.dim();
    let mut s = SampleStream::new(0xd1a6);
    let pairs: Vec<(IMat, IMat)> = (0..2 * d + 4).map(|_| (s.invertible(n, z.p()), s.invertible(n, z.p()))).collect();
    let gens = gl_n_generators(n);
    let build = |z: &Zmod| {
        let mut a = ZMat::zeros(pairs.len() * gens.len(), d);
        let bad = ReprError::SampleNotInvertible;
        let mut row = 0;
        for h in &gens {
            let chi = zpow_signed(z, h.det(), w).ok_or(bad.clone())?;
            for (x, y) in &pairs {
                let (xh, yh) = (x.mul(h), y.mul(h));
                for i in 0..d {
                    let moved = vh.eval_mod(z, i, &xh, &yh).ok_or(bad.clone())?;
                    let base = vh.eval_mod(z, i, x, y).ok_or(bad.clone())?;
                    a.set(row, i, z.sub(moved, z.mul(chi, base)));
                }
                row += 1;
            }
        }
        Ok(a)
    };
    let full = exact_kernel(z, build)?;
    if full.len() != 1 {
        return Err(ReprError::KernelDimension(full.len()));
    }
    let mut v = full[0].clone();
    normalize_unit(z, &mut v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(l: &[i64]) -> Branching {
        let w = Weight::rational(l.to_vec(), true).unwrap();
        Branching::new(&w, Zmod::new(5, 20).unwrap()).unwrap()
    }

    #[test]
    fn vh_dimensions() {
        let w = |l: &[i64]| TensorRep::build(&Weight::rational(l.to_vec(), true).unwrap()).unwrap().dim();
        assert_eq!(w(&[2, 0]), 1);
        assert_eq!(w(&[1, 0, 0, -1]), 4);
        assert_eq!(w(&[0, 0, 0, 0]), 1);
    }

    #[test]
    fn diagonal_invariant_examples() {
        let z = Zmod::new(5, 20).unwrap();
        let b = setup(&[2, 0]);
        assert_eq!(b.v_lambda, vec![1]);
        // <(x, x)> v = x^2 v
        let x = IMat::diag(&[3]);
        assert_eq!(b.vh.eval_vec_mod(&z, &b.v_lambda, &x, &x), Some(9));
        let b = setup(&[0, 0, 0, 0]);
        assert_eq!(b.v_lambda, vec![1]);
        let b = setup(&[1, 0, 0, -1]);
        // pairing of V with V^vee: phi(a, b) = (a b^{-1})_{12} up to scalar, invariant under (h, h)
        let a = IMat::from_rows(&[vec![1, 1], vec![0, 1]]);
        let h = IMat::from_rows(&[vec![2, 1], vec![1, 1]]);
        let base = b.vh.eval_vec_mod(&z, &b.v_lambda, &a, &IMat::identity(2)).unwrap();
        assert_ne!(base, 0);
        assert_eq!(b.vh.eval_vec_mod(&z, &b.v_lambda, &a.mul(&h), &h), Some(base));
        assert_eq!(b.vh.eval_vec_mod(&z, &b.v_lambda, &a, &a), Some(0));
    }

    #[test]
    fn hom_dimension_examples() {
        let b = setup(&[2, 0]);
        assert_eq!(b.hom_dimension(-1).unwrap(), 1);
        assert_eq!(b.hom_dimension(1).unwrap(), 0);
        let b = setup(&[1, 0, 0, -1]);
        assert_eq!(b.hom_dimension(0).unwrap(), 1);
        assert_eq!(b.hom_dimension(1).unwrap(), 0);
        assert_eq!(b.hom_dimension(-1).unwrap(), 0);
    }

    #[test]
    fn nu_for_weight_two_zero() {
        let b = setup(&[2, 0]);
        let z = b.z;
        for j in [-2, -1, 0] {
            let bv = b.nu_vector(j).unwrap();
            // nu_j(1 x; 0 1) = (-1)^j x^{j+2}
            for x in [-2i64, 1, 3] {
                let g = IMat::from_rows(&[vec![1, x], vec![0, 1]]);
                let expect = z.from_i64((-1i64).pow(j.unsigned_abs() as u32) * x.pow((j + 2) as u32));
                assert_eq!(b.vlam.eval_vec_mod(&z, &bv.nu, &g), Some(expect));
            }
            let r = b.verify_nu(&bv, 20).unwrap();
            assert!(r.equivariant && r.restriction);
        }
        assert_eq!(b.nu_vector(1), Err(ReprError::NotCritical(1)));
    }

    #[test]
    fn nu_for_rank_two() {
        let b = setup(&[1, 0, 0, -1]);
        let bv = b.nu_vector(0).unwrap();
        let r = b.verify_nu(&bv, 20).unwrap();
        assert!(r.equivariant && r.restriction);
        let b = setup(&[0, 0, 0, 0]);
        let bv = b.nu_vector(0).unwrap();
        assert_eq!(bv.nu, vec![1]);
    }

    #[test]
    fn nu_is_equivariant_when_x_cannot_separate_degrees() {
        // degree 4 in X exceeds the number of unit classes mod 5
        let b = setup(&[3, -1]);
        for j in -3..=1 {
            let r = b.verify_nu(&b.nu_vector(j).unwrap(), 20).unwrap();
            assert!(r.equivariant && r.restriction, "j = {j}");
        }
        let w = Weight::rational(vec![4, -2], true).unwrap();
        assert!(matches!(Branching::new(&w, Zmod::new(5, 20).unwrap()), Err(ReprError::PrimeTooSmall { p: 5, .. })));
        assert!(Branching::new(&w, Zmod::new(7, 20).unwrap()).is_ok());
    }

    #[test]
    fn kappa_pairs_with_nu() {
        let b = setup(&[2, 0]);
        let bv = b.nu_vector(-1).unwrap();
        let (p, prec) = (5, 20);
        // dual coordinates that pick out nu itself on a unit coordinate
        let pos = bv.nu.iter().position(|&x| b.z.is_unit(x)).unwrap();
        let mut coeffs = vec![PadicNumber::zero(p, prec); bv.nu.len()];
        coeffs[pos] = PadicNumber::from_residue(&b.z, b.z.inv(bv.nu[pos]).unwrap());
        let mu = DualVector { lambda: vec![2, 0], coeffs };
        assert!(b.kappa_j_functional(&mu, &bv).unwrap().agrees_with(&PadicNumber::one(p, prec), prec));
        let zero = DualVector { lambda: vec![2, 0], coeffs: vec![PadicNumber::zero(p, prec); bv.nu.len()] };
        assert!(b.kappa_j_functional(&zero, &bv).unwrap().is_zero());
        let wrong = DualVector { lambda: vec![1, 0], coeffs: vec![] };
        assert_eq!(b.kappa_j_functional(&wrong, &bv), Err(ReprError::HostMismatch));
    }
}

