//! Matrices of p-adic numbers, division-free characteristic polynomials and Newton polygons.

use num_rational::Ratio;

use super::{smith, PadicError, PadicNumber, ZMat, Zmod};

/// Commutative ring elements that carry their own context.
pub trait Ring: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self {
        self.zero_like().sub(self)
    }
}

impl Ring for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::zero(self.prime(), self.precision())
    }
    fn one_like(&self) -> Self {
        PadicNumber::one(self.prime(), self.precision())
    }
    fn add(&self, o: &Self) -> Self {
        PadicNumber::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PadicNumber::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        PadicNumber::mul(self, o)
    }
    fn neg(&self) -> Self {
        PadicNumber::neg(self)
    }
}

/// A residue bundled with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZElem {
    pub z: Zmod,
    pub v: u64,
}

impl Ring for ZElem {
    fn zero_like(&self) -> Self {
        ZElem { z: self.z, v: 0 }
    }
    fn one_like(&self) -> Self {
        ZElem { z: self.z, v: 1 }
    }
    fn add(&self, o: &Self) -> Self {
        ZElem { z: self.z, v: self.z.add(self.v, o.v) }
    }
    fn sub(&self, o: &Self) -> Self {
        ZElem { z: self.z, v: self.z.sub(self.v, o.v) }
    }
    fn mul(&self, o: &Self) -> Self {
        ZElem { z: self.z, v: self.z.mul(self.v, o.v) }
    }
}

/// Coefficients of `det(xI - A)` from the constant term up, via Berkowitz.
///
/// `a` is row-major `n x n`; `one` fixes the ring context.
pub fn berkowitz<R: Ring>(a: &[R], n: usize, one: &R) -> Vec<R> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return vec![one.clone()];
    }
    let zero = one.zero_like();
    let at = |i: usize, j: usize| &a[i * n + j];
    // c[k] is the coefficient of x^{r-k}
    let mut c = vec![one.clone(), at(0, 0).neg()];
    for r in 1..n {
        // t = [1, -a_rr, -R S, -R A S, ..., -R A^{r-1} S]
        let mut t = Vec::with_capacity(r + 2);
        t.push(one.clone());
        t.push(at(r, r).neg());
        let mut s: Vec<R> = (0..r).map(|i| at(i, r).clone()).collect();
        for _ in 0..r {
            let rs = (0..r).fold(zero.clone(), |acc, i| acc.add(&at(r, i).mul(&s[i])));
            t.push(rs.neg());
            s = (0..r)
                .map(|i| (0..r).fold(zero.clone(), |acc, k| acc.add(&at(i, k).mul(&s[k]))))
                .collect();
        }
        let mut next = Vec::with_capacity(r + 2);
        for i in 0..(r + 2) {
            let mut acc = zero.clone();
            for (k, ck) in c.iter().enumerate().take(i + 1) {
                acc = acc.add(&t[i - k].mul(ck));
            }
            next.push(acc);
        }
        c = next;
    }
    c.reverse();
    c
}

/// Rectangular matrix of p-adic numbers over one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<PadicNumber>,
}

impl PadicMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<PadicNumber>) -> Result<Self, PadicError> {
        if entries.len() != rows * cols {
            return Err(PadicError::Shape);
        }
        if let Some(f) = entries.first() {
            if entries.iter().any(|e| e.prime() != f.prime()) {
                return Err(PadicError::Shape);
            }
        }
        Ok(PadicMatrix { rows, cols, entries })
    }

    pub fn from_i64(p: u64, prec: i64, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let entries = rows.iter().flatten().map(|&x| PadicNumber::from_i64(p, x, prec)).collect();
        PadicMatrix { rows: r, cols: c, entries }
    }

    pub fn from_zmat(z: &Zmod, m: &ZMat) -> Self {
        let entries = m.data.iter().map(|&x| PadicNumber::from_residue(z, x)).collect();
        PadicMatrix { rows: m.rows, cols: m.cols, entries }
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicNumber {
        &self.entries[i * self.cols + j]
    }

    /// Reduction to `Z/p^N`; entries must be integral.
    pub fn to_zmat(&self, z: &Zmod) -> Result<ZMat, PadicError> {
        let data = self.entries.iter().map(|e| e.to_residue(z)).collect::<Result<_, _>>()?;
        Ok(ZMat { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, PadicError> {
        if self.cols != o.rows {
            return Err(PadicError::Shape);
        }
        let mut entries = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = self.get(i, 0).mul(o.get(0, j));
                for k in 1..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(PadicMatrix { rows: self.rows, cols: o.cols, entries })
    }

    /// Valuations of the Smith invariants, computed at the smallest entry precision.
    pub fn smith_valuations(&self) -> Result<Vec<i64>, PadicError> {
        let Some(first) = self.entries.first() else { return Ok(Vec::new()) };
        let shift = self.entries.iter().map(|e| e.val_or_prec()).min().unwrap_or(0).min(0);
        let prec = self.entries.iter().map(|e| e.precision()).min().unwrap_or(1) - shift;
        let z = Zmod::new(first.prime(), prec.max(1) as u32)?;
        let shifted = PadicMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.shift(-shift)).collect(),
        };
        let s = smith(&z, &shifted.to_zmat(&z)?, false);
        Ok(s.invariants.iter().map(|&v| v as i64 + shift).collect())
    }
}

/// Solve a square system over `Q_p` by elimination with minimal-valuation pivots.
pub fn solve_padic(a: &[Vec<PadicNumber>], b: &[PadicNumber]) -> Result<Vec<PadicNumber>, PadicError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(PadicError::Shape);
    }
    let mut m: Vec<Vec<PadicNumber>> = a.iter().zip(b).map(|(r, x)| r.iter().chain([x]).cloned().collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].valuation().unwrap())
            .ok_or(PadicError::DivisionByZero)?;
        m.swap(col, piv);
        let inv = m[col][col].inv()?;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].mul(&inv);
                for c in col..=n {
                    let t = f.mul(&m[col][c]);
                    m[r][c] = m[r][c].sub(&t);
                }
            }
        }
    }
    (0..n).map(|i| m[i][n].div(&m[i][i])).collect()
}

/// Monic characteristic polynomial with its precision bookkeeping.
#[derive(Clone, Debug)]
pub struct Charpoly {
    /// Coefficients from the constant term up; the last one is 1.
    pub coeffs: Vec<PadicNumber>,
    /// Worst drop from the input precision to any output coefficient.
    pub precision_loss: i64,
}

pub fn charpoly(m: &PadicMatrix) -> Result<Charpoly, PadicError> {
    if m.rows != m.cols {
        return Err(PadicError::Shape);
    }
    let n = m.rows;
    let Some(first) = m.entries.first() else {
        return Ok(Charpoly { coeffs: Vec::new(), precision_loss: 0 });
    };
    let input_prec = m.entries.iter().map(|e| e.precision()).min().unwrap();
    let one = PadicNumber::one(first.prime(), input_prec.max(1) + 64);
    let coeffs = berkowitz(&m.entries, n, &one);
    let lower = coeffs[..n].iter().map(|c| c.precision()).min().unwrap_or(input_prec);
    if lower <= 0 && coeffs[..n].iter().all(|c| c.is_zero()) {
        return Err(PadicError::PrecisionExhausted);
    }
    Ok(Charpoly { coeffs, precision_loss: (input_prec - lower).max(0) })
}

/// Characteristic polynomial of a residue matrix, coefficients mod `p^N`.
pub fn charpoly_zmod(z: &Zmod, m: &ZMat) -> Vec<u64> {
    assert_eq!(m.rows, m.cols);
    let a: Vec<ZElem> = m.data.iter().map(|&v| ZElem { z: *z, v }).collect();
    berkowitz(&a, m.rows, &ZElem { z: *z, v: 1 }).into_iter().map(|e| e.v).collect()
}

/// Slope of a Newton polygon segment; `Infinite` marks roots that vanish to precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Finite(Ratio<i64>),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// `(degree, valuation)`, `None` where the coefficient vanishes to precision.
    pub points: Vec<(usize, Option<i64>)>,
    /// Distinct slopes in nondecreasing order with multiplicities.
    pub slopes: Vec<(Slope, usize)>,
}

impl NewtonPolygon {
    pub fn multiset(&self) -> Vec<Slope> {
        self.slopes.iter().flat_map(|&(s, m)| std::iter::repeat_n(s, m)).collect()
    }
    pub fn finite(&self) -> Vec<Ratio<i64>> {
        self.multiset()
            .into_iter()
            .filter_map(|s| match s {
                Slope::Finite(r) => Some(r),
                Slope::Infinite => None,
            })
            .collect()
    }
    pub fn degree(&self) -> usize {
        self.slopes.iter().map(|s| s.1).sum()
    }
}

/// Lower convex hull of `(i, v(a_i))` for coefficients listed from the constant term up.
pub fn newton_polygon(coeffs: &[PadicNumber]) -> Result<NewtonPolygon, PadicError> {
    let Some(lead) = coeffs.last() else { return Err(PadicError::LeadingUnknown) };
    if lead.is_zero() {
        return Err(PadicError::LeadingUnknown);
    }
    let points: Vec<(usize, Option<i64>)> = coeffs.iter().enumerate().map(|(i, c)| (i, c.valuation())).collect();
    let finite: Vec<(i64, i64)> = points.iter().filter_map(|&(i, v)| v.map(|v| (i as i64, v))).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &finite {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above segment a -> pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes: Vec<(Slope, usize)> = Vec::new();
    for w in hull.windows(2) {
        let s = Slope::Finite(-Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0));
        slopes.push((s, (w[1].0 - w[0].0) as usize));
    }
    slopes.reverse();
    let infinite = finite[0].0 as usize;
    if infinite > 0 {
        slopes.push((Slope::Infinite, infinite));
    }
    Ok(NewtonPolygon { points, slopes })
}
