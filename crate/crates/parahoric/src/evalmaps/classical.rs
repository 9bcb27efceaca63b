//! Weight-two symbols for `Gamma_0(N)` over `Q`, their Hecke eigensystems, and the
//! `p`-stabilisation of a rational eigensymbol.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::manin::{act_cusp, ManinData, INFINITY};
use super::symbol::{PolyDual, Rationals, Symbol};
use super::EvalError;
use crate::padic::{is_prime, PadicNumber};

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(row, pr);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..cols {
                    let d = &f * &m[row][k];
                    m[r][k] = &m[r][k] - d;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{x : A x = 0}`.
pub fn kernel_q(a: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Coordinates of `v` in the span of `basis`, if it lies there.
pub fn coordinates(basis: &[Vec<BigRational>], v: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = basis.len();
    let mut m: Vec<Vec<BigRational>> = (0..v.len())
        .map(|i| basis.iter().map(|b| b[i].clone()).chain(std::iter::once(v[i].clone())).collect())
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][n].clone();
    }
    Some(x)
}

/// Matrix of a linear operator on `span(basis)` in that basis, columns being images.
fn operator_matrix(
    basis: &[Vec<BigRational>],
    op: impl Fn(&[BigRational]) -> Vec<BigRational>,
) -> Result<Vec<Vec<BigRational>>, EvalError> {
    let n = basis.len();
    let cols: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|b| coordinates(basis, &op(b)).ok_or_else(|| EvalError::Unsupported("subspace is not stable".into())))
        .collect::<Result<_, _>>()?;
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

fn combine(basis: &[Vec<BigRational>], coeffs: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); basis[0].len()];
    for (b, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Weight-two symbol space for `Gamma_0(N)` over `Q`.
#[derive(Clone, Debug)]
pub struct ClassicalSpace {
    pub manin: Arc<ManinData>,
    /// Basis of all symbols, as values on the free generators.
    pub basis: Vec<Vec<BigRational>>,
}

impl ClassicalSpace {
    pub fn new(level: u64) -> Result<Self, EvalError> {
        Self::with_manin(Arc::new(ManinData::new(level)?))
    }

    pub fn with_manin(manin: Arc<ManinData>) -> Result<Self, EvalError> {
        let cols = manin.num_free();
        let rows: Vec<Vec<BigRational>> = manin
            .relations
            .iter()
            .map(|rel| {
                let mut row = vec![BigRational::zero(); cols];
                for (s, g) in rel {
                    let e = manin.expr(g);
                    row[e.free] += BigRational::from_integer(BigInt::from(*s as i64 * e.sign as i64));
                }
                row
            })
            .collect();
        let basis = kernel_q(&rows, cols);
        Ok(ClassicalSpace { manin, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rank of the relation matrix; `num_free - rank` is the dimension.
    pub fn relation_rank(&self) -> usize {
        self.manin.num_free() - self.dim()
    }

    pub fn symbol(&self, values: Vec<BigRational>) -> Symbol<Rationals> {
        Symbol::new(self.manin.clone(), Rationals, values)
    }

    fn apply(&self, v: &[BigRational], f: &impl Fn(&Symbol<Rationals>) -> Symbol<Rationals>) -> Vec<BigRational> {
        f(&self.symbol(v.to_vec())).values
    }

    /// Basis of the `+1` eigenspace of `iota`.
    pub fn plus_basis(&self) -> Result<Vec<Vec<BigRational>>, EvalError> {
        sub_eigenspace(&self.basis, |v| self.apply(v, &|s| s.iota()), &BigRational::one())
    }

    /// Matrix of `T_ell` on `span(basis)`.
    pub fn t_matrix(&self, basis: &[Vec<BigRational>], ell: u64) -> Result<Vec<Vec<BigRational>>, EvalError> {
        operator_matrix(basis, |v| self.apply(v, &|s| s.t_ell(ell)))
    }
}

/// Basis of `{v in span(basis) : op v = lambda v}`.
fn sub_eigenspace(
    basis: &[Vec<BigRational>],
    op: impl Fn(&[BigRational]) -> Vec<BigRational>,
    lambda: &BigRational,
) -> Result<Vec<Vec<BigRational>>, EvalError> {
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let a = operator_matrix(basis, op)?;
    let n = basis.len();
    let shifted: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { &a[i][j] - lambda } else { a[i][j].clone() }).collect()).collect();
    Ok(kernel_q(&shifted, n).iter().map(|c| combine(basis, c)).collect())
}

/// A simultaneous eigenspace for `T_ell`, `ell` not dividing the level.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub eigenvalues: BTreeMap<u64, i64>,
    pub basis: Vec<Vec<BigRational>>,
    pub cuspidal: bool,
}

#[derive(Clone, Debug)]
pub struct HeckeData {
    pub space: ClassicalSpace,
    pub plus: Vec<Vec<BigRational>>,
    pub systems: Vec<EigenSystem>,
}

impl HeckeData {
    /// The cuspidal systems with one-dimensional plus part.
    pub fn rational_newforms(&self) -> Vec<&EigenSystem> {
        self.systems.iter().filter(|s| s.cuspidal && s.basis.len() == 1).collect()
    }
}

pub fn small_primes(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&q| is_prime(q)).collect()
}

/// Plus-part eigensystems of weight-two symbols for `Gamma_0(N)`, split by `T_ell` for primes
/// `ell <= 13` prime to `N`; all eigenvalues must be integers.
pub fn hecke_classical(level: u64) -> Result<HeckeData, EvalError> {
    let space = ClassicalSpace::new(level)?;
    let plus = space.plus_basis()?;
    let primes: Vec<u64> = small_primes(13).into_iter().filter(|q| level % q != 0).collect();
    let mut pieces: Vec<(BTreeMap<u64, i64>, Vec<Vec<BigRational>>)> = vec![(BTreeMap::new(), plus.clone())];
    if plus.is_empty() {
        pieces.clear();
    }
    for &ell in &primes {
        let mut next = Vec::new();
        for (eig, basis) in pieces {
            let mut found = 0;
            let bound = ell as i64 + 1;
            for a in -bound..=bound {
                let sub = sub_eigenspace(&basis, |v| space.apply(v, &|s| s.t_ell(ell)), &BigRational::from_integer(a.into()))?;
                if !sub.is_empty() {
                    found += sub.len();
                    let mut e = eig.clone();
                    e.insert(ell, a);
                    next.push((e, sub));
                }
            }
            if found != basis.len() {
                return Err(EvalError::Irrational { ell, dim: basis.len() });
            }
        }
        pieces = next;
    }
    let systems = pieces
        .into_iter()
        .map(|(eigenvalues, basis)| {
            let cuspidal = eigenvalues.iter().any(|(&l, &a)| a != l as i64 + 1);
            let basis = if basis.len() == 1 { vec![primitive_integral(&basis[0])] } else { basis };
            EigenSystem { eigenvalues, basis, cuspidal }
        })
        .collect();
    Ok(HeckeData { space, plus, systems })
}

/// Trace of `T_ell` on the plus part computed with the lift variant `variant`.
pub fn plus_trace(level: u64, ell: u64, variant: usize) -> Result<BigRational, EvalError> {
    let space = ClassicalSpace::with_manin(Arc::new(ManinData::with_variant(level, variant)?))?;
    let plus = space.plus_basis()?;
    if plus.is_empty() {
        return Ok(BigRational::zero());
    }
    let t = space.t_matrix(&plus, ell)?;
    Ok((0..t.len()).fold(BigRational::zero(), |acc, i| acc + &t[i][i]))
}

/// Scale to integers with gcd one and a positive first nonzero entry.
pub fn primitive_integral(v: &[BigRational]) -> Vec<BigRational> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| x.signum());
    ints.into_iter().map(|x| BigRational::from_integer(x * &sign / &g)).collect()
}

pub fn rational_to_padic(x: &BigRational, p: u64, prec: i64) -> Result<PadicNumber, EvalError> {
    let n = x.numer().to_i128().ok_or_else(|| EvalError::Unsupported("symbol value too large".into()))?;
    let d = x.denom().to_i128().ok_or_else(|| EvalError::Unsupported("symbol value too large".into()))?;
    Ok(PadicNumber::from_ratio(p, n, d, prec)?)
}

/// The unit root of `x^2 - a_p x + p`, by Hensel lifting from `a_p mod p`.
pub fn unit_root(p: u64, a_p: i64, prec: i64) -> Result<PadicNumber, EvalError> {
    if a_p.rem_euclid(p as i64) == 0 {
        return Err(EvalError::NotOrdinary(a_p));
    }
    let work = prec + 4;
    let a = PadicNumber::from_i64(p, a_p, work);
    let pp = PadicNumber::from_i64(p, p as i64, work);
    let mut x = a.clone();
    for _ in 0..2 * (work as usize).max(1) {
        let f = x.mul(&x).sub(&a.mul(&x)).add(&pp);
        if f.val_or_prec() >= work {
            break;
        }
        let df = x.scale_i64(2).sub(&a);
        x = x.sub(&f.div(&df)?);
    }
    Ok(x.with_precision(prec))
}

/// `phi_alpha = phi - alpha^{-1} phi | (p 0; 0 1)` on `Gamma_0(Np)`, in `V_0^vee` coordinates.
pub fn p_stabilize(phi: &Symbol<Rationals>, p: u64, alpha: &PadicNumber) -> Result<Symbol<PolyDual>, EvalError> {
    let level = phi.manin.level;
    if level % p == 0 {
        return Err(EvalError::PrimeDividesLevel(p));
    }
    let prec = alpha.precision();
    let manin = Arc::new(ManinData::new(level * p)?);
    let ainv = alpha.inv()?;
    let scale = [p as i128, 0, 0, 1];
    let values = manin
        .free
        .iter()
        .map(|&j| {
            let g = manin.lifts[j];
            let (r, s) = (act_cusp(&g, (0, 1)), act_cusp(&g, INFINITY));
            let v = phi.path(r, s);
            let w = phi.path(act_cusp(&scale, r), act_cusp(&scale, s));
            Ok(vec![rational_to_padic(&v, p, prec)?.sub(&rational_to_padic(&w, p, prec)?.mul(&ainv))])
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(Symbol::new(manin, PolyDual { p, lambda: [0, 0], prec }, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_eleven_space() {
        let s = ClassicalSpace::new(11).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.relation_rank() + s.dim(), s.manin.num_free());
        for b in &s.basis {
            let sym = s.symbol(b.clone());
            assert!(sym.relation_values().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn symbol_dimensions() {
        // 2 g + #cusps - 1
        for (n, d) in [(1u64, 0usize), (2, 1), (11, 3), (14, 5), (33, 9), (37, 5)] {
            assert_eq!(ClassicalSpace::new(n).unwrap().dim(), d, "N = {n}");
        }
    }

    #[test]
    fn level_eleven_eigenvalues() {
        let h = hecke_classical(11).unwrap();
        let forms = h.rational_newforms();
        assert_eq!(forms.len(), 1);
        let e = &forms[0].eigenvalues;
        assert_eq!((e[&2], e[&3], e[&5], e[&7], e[&13]), (-2, -1, 1, -2, 4));
        let eis: Vec<_> = h.systems.iter().filter(|s| !s.cuspidal).collect();
        assert_eq!(eis.len(), 1);
        assert_eq!(eis[0].eigenvalues[&2], 3);
    }

    #[test]
    fn level_one_has_no_cusp_forms() {
        let h = hecke_classical(1).unwrap();
        assert!(h.rational_newforms().is_empty());
    }

    #[test]
    fn trace_is_independent_of_lifts() {
        for ell in [2u64, 3, 5] {
            let t0 = plus_trace(11, ell, 0).unwrap();
            let t1 = plus_trace(11, ell, 2).unwrap();
            assert_eq!(t0, t1);
            let h = hecke_classical(11).unwrap();
            let sum: i64 = h.systems.iter().map(|s| s.eigenvalues[&ell] * s.basis.len() as i64).sum();
            assert_eq!(t0, BigRational::from_integer(sum.into()));
        }
    }

    #[test]
    fn irrational_eigenvalues_are_reported() {
        // S_2(Gamma_0(23)) has eigenvalues in Q(sqrt 5)
        assert!(matches!(hecke_classical(23), Err(EvalError::Irrational { .. })));
    }

    #[test]
    fn unit_root_of_hecke_polynomial() {
        let a = unit_root(3, -1, 15).unwrap();
        let f = a.mul(&a).add(&a).add(&PadicNumber::from_i64(3, 3, 15));
        assert!(f.is_zero());
        assert!(a.agrees_with(&PadicNumber::from_i64(3, -1, 15), 1));
        assert!(unit_root(3, 3, 10).is_err());
    }

    #[test]
    fn stabilized_symbol_is_up_eigen() {
        let h = hecke_classical(11).unwrap();
        let phi = h.space.symbol(h.rational_newforms()[0].basis[0].clone());
        let alpha = unit_root(3, -1, 12).unwrap();
        let st = p_stabilize(&phi, 3, &alpha).unwrap();
        assert!(st.relation_values().iter().all(|v| v[0].is_zero()));
        let up = st.u_p(3);
        for (a, b) in up.values.iter().zip(&st.values) {
            assert!(a[0].agrees_with(&b[0].mul(&alpha), 10));
        }
    }
}
