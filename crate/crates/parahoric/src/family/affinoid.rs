//! Truncated power series in the two family variables `T1, T2`.
//!
//! Monomials `T1^i T2^j` with `i + j <= D` are ordered by total degree, then by the exponent
//! of `T2`.

use crate::padic::{PadicNumber, Ring, Zmod};

/// Number of monomials of total degree at most `degree`.
pub fn num_monomials(degree: u32) -> usize {
    let d = degree as usize;
    (d + 1) * (d + 2) / 2
}

/// Exponents of each monomial index.
pub fn monomials(degree: u32) -> Vec<[u32; 2]> {
    (0..=degree).flat_map(|t| (0..=t).map(move |j| [t - j, j])).collect()
}

/// Index of `T1^i T2^j`, `None` above the truncation.
pub fn monomial_index(degree: u32, e: [u32; 2]) -> Option<usize> {
    let t = e[0] + e[1];
    (t <= degree).then(|| (t as usize * (t as usize + 1)) / 2 + e[1] as usize)
}

/// `(i, j, k)` with `mon_i * mon_j = mon_k`, listing every product below the truncation.
pub fn product_table(degree: u32) -> Vec<(usize, usize, usize)> {
    let mons = monomials(degree);
    let mut out = Vec::new();
    for (i, a) in mons.iter().enumerate() {
        for (j, b) in mons.iter().enumerate() {
            if let Some(k) = monomial_index(degree, [a[0] + b[0], a[1] + b[1]]) {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Truncated series with coefficients in `Z/p^N`, used for bulk linear algebra.
#[derive(Clone, Debug)]
pub struct ResidueSeries {
    pub z: Zmod,
    pub degree: u32,
    table: Vec<(usize, usize, usize)>,
}

impl ResidueSeries {
    pub fn new(z: Zmod, degree: u32) -> Self {
        ResidueSeries { z, degree, table: product_table(degree) }
    }
    pub fn len(&self) -> usize {
        num_monomials(self.degree)
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.len()]
    }
    pub fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c;
        v
    }
    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.z.add(x, y)).collect()
    }
    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.z.sub(x, y)).collect()
    }
    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.z.neg(x)).collect()
    }
    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| self.z.mul(x, c)).collect()
    }
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        self.mul_add(&mut out, a, b);
        out
    }
    /// `acc += a * b`.
    pub fn mul_add(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        for &(i, j, k) in &self.table {
            if a[i] != 0 && b[j] != 0 {
                acc[k] = self.z.add(acc[k], self.z.mul(a[i], b[j]));
            }
        }
    }
    /// Value at integer points `T1 = t1`, `T2 = t2`.
    pub fn eval(&self, a: &[u64], t: [i128; 2]) -> u64 {
        let t1 = self.z.reduce(t[0]);
        let t2 = self.z.reduce(t[1]);
        monomials(self.degree).iter().zip(a).fold(0, |acc, (e, &c)| {
            let m = self.z.mul(self.z.pow(t1, e[0] as u64), self.z.pow(t2, e[1] as u64));
            self.z.add(acc, self.z.mul(c, m))
        })
    }
}

/// An element of `Z_p[[T1, T2]]` modulo total degree `> D`, with p-adic coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedAffinoid {
    p: u64,
    degree: u32,
    coeffs: Vec<PadicNumber>,
}

impl TruncatedAffinoid {
    pub fn zero(p: u64, degree: u32, prec: i64) -> Self {
        TruncatedAffinoid { p, degree, coeffs: vec![PadicNumber::zero(p, prec); num_monomials(degree)] }
    }
    pub fn constant(degree: u32, c: &PadicNumber) -> Self {
        let mut out = Self::zero(c.prime(), degree, c.precision());
        out.coeffs[0] = c.clone();
        out
    }
    pub fn one(p: u64, degree: u32, prec: i64) -> Self {
        Self::constant(degree, &PadicNumber::one(p, prec))
    }
    /// `T1` for `i = 0`, `T2` for `i = 1`.
    pub fn variable(p: u64, degree: u32, i: usize, prec: i64) -> Self {
        let mut out = Self::zero(p, degree, prec);
        let mut e = [0, 0];
        e[i] = 1;
        if let Some(k) = monomial_index(degree, e) {
            out.coeffs[k] = PadicNumber::one(p, prec);
        }
        out
    }
    pub fn from_coeffs(p: u64, degree: u32, coeffs: Vec<PadicNumber>) -> Self {
        assert_eq!(coeffs.len(), num_monomials(degree));
        TruncatedAffinoid { p, degree, coeffs }
    }
    /// Residues read as p-adic numbers with the given absolute precision.
    pub fn from_residues(z: &Zmod, degree: u32, r: &[u64], prec: i64) -> Self {
        let coeffs = r.iter().map(|&x| PadicNumber::from_residue(z, x).with_precision(prec)).collect();
        Self::from_coeffs(z.p(), degree, coeffs)
    }
    pub fn to_residues(&self, z: &Zmod) -> Result<Vec<u64>, crate::padic::PadicError> {
        self.coeffs.iter().map(|c| c.lift_precision(z.n() as i64).to_residue(z)).collect()
    }
    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }
    pub fn coeff(&self, e: [u32; 2]) -> PadicNumber {
        match monomial_index(self.degree, e) {
            Some(k) => self.coeffs[k].clone(),
            None => PadicNumber::zero(self.p, self.precision()),
        }
    }
    pub fn constant_term(&self) -> &PadicNumber {
        &self.coeffs[0]
    }
    pub fn precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
    pub fn with_precision(&self, prec: i64) -> Self {
        TruncatedAffinoid { coeffs: self.coeffs.iter().map(|c| c.with_precision(prec)).collect(), ..self.clone() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&PadicNumber, &PadicNumber) -> PadicNumber) -> Self {
        assert_eq!((self.p, self.degree), (o.p, o.degree), "mixed affinoids");
        TruncatedAffinoid { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| f(a, b)).collect(), ..self.clone() }
    }
    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }
    pub fn neg(&self) -> Self {
        TruncatedAffinoid { coeffs: self.coeffs.iter().map(|c| c.neg()).collect(), ..self.clone() }
    }
    pub fn scale(&self, c: &PadicNumber) -> Self {
        TruncatedAffinoid { coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(), ..self.clone() }
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.p, self.degree), (o.p, o.degree), "mixed affinoids");
        let prec = self.precision().min(o.precision()) + 64;
        let mut out = vec![PadicNumber::zero(self.p, prec); self.coeffs.len()];
        for (i, j, k) in product_table(self.degree) {
            out[k] = out[k].add(&self.coeffs[i].mul(&o.coeffs[j]));
        }
        TruncatedAffinoid { coeffs: out, ..self.clone() }
    }
    /// Inverse when the constant term is nonzero: `c^{-1} sum_k (-y)^k` with `x = c (1 + y)`.
    pub fn inv(&self) -> Result<Self, crate::padic::PadicError> {
        let c = self.coeffs[0].clone();
        let cinv = c.inv()?;
        let mut y = self.scale(&cinv);
        y.coeffs[0] = PadicNumber::zero(self.p, y.coeffs[0].precision());
        let ny = y.neg();
        let one = Self::one(self.p, self.degree, y.precision());
        let mut acc = one.clone();
        let mut pw = one;
        for _ in 0..self.degree {
            pw = pw.mul(&ny);
            acc = acc.add(&pw);
        }
        Ok(acc.scale(&cinv))
    }
    /// Value at `T1 = t1`, `T2 = t2`.
    pub fn eval(&self, t: [&PadicNumber; 2]) -> PadicNumber {
        let prec = self.precision();
        monomials(self.degree).iter().zip(&self.coeffs).fold(PadicNumber::zero(self.p, prec), |acc, (e, c)| {
            let m = t[0].pow(e[0] as i64).expect("nonnegative").mul(&t[1].pow(e[1] as i64).expect("nonnegative"));
            acc.add(&c.mul(&m))
        })
    }
    pub fn agrees_with(&self, o: &Self, digits: i64) -> bool {
        self.coeffs.iter().zip(&o.coeffs).all(|(a, b)| a.agrees_with(b, digits))
    }
    /// Smallest valuation of `self - o` over all coefficients, capped by the precision.
    pub fn agreement(&self, o: &Self) -> i64 {
        self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b).val_or_prec()).min().unwrap_or(0)
    }
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl Ring for TruncatedAffinoid {
    fn zero_like(&self) -> Self {
        Self::zero(self.p, self.degree, self.precision())
    }
    fn one_like(&self) -> Self {
        Self::one(self.p, self.degree, self.precision())
    }
    fn add(&self, o: &Self) -> Self {
        TruncatedAffinoid::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        TruncatedAffinoid::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        TruncatedAffinoid::mul(self, o)
    }
    fn neg(&self) -> Self {
        TruncatedAffinoid::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn elem(p: u64, d: u32, c: &[i64]) -> TruncatedAffinoid {
        let n = num_monomials(d);
        let coeffs = (0..n).map(|i| PadicNumber::from_i64(p, *c.get(i).unwrap_or(&0), 20)).collect();
        TruncatedAffinoid::from_coeffs(p, d, coeffs)
    }

    #[test]
    fn monomial_indexing() {
        let m = monomials(3);
        assert_eq!(m.len(), 10);
        for (i, e) in m.iter().enumerate() {
            assert_eq!(monomial_index(3, *e), Some(i));
        }
        assert_eq!(monomial_index(3, [2, 2]), None);
        assert_eq!(m[1], [1, 0]);
        assert_eq!(m[2], [0, 1]);
    }

    #[test]
    fn products_truncate() {
        // (1 + T1)(1 - T1) = 1 - T1^2 and T1^2 * T2^2 vanishes at D = 3
        let a = elem(5, 3, &[1, 1]);
        let b = elem(5, 3, &[1, -1]);
        let c = a.mul(&b);
        assert!(c.coeff([0, 0]).sub(&PadicNumber::one(5, 20)).is_zero());
        assert!(c.coeff([2, 0]).add(&PadicNumber::one(5, 20)).is_zero());
        let t1 = TruncatedAffinoid::variable(5, 3, 0, 20);
        let t2 = TruncatedAffinoid::variable(5, 3, 1, 20);
        assert!(t1.mul(&t1).mul(&t2).mul(&t2).is_zero());
        assert!(!t1.mul(&t1).mul(&t2).is_zero());
    }

    #[test]
    fn inverse() {
        let a = elem(3, 3, &[2, 3, 1, 4, 0, 7]);
        let prod = a.mul(&a.inv().unwrap());
        assert!(prod.agrees_with(&TruncatedAffinoid::one(3, 3, 20), 18));
        assert!(elem(3, 3, &[0, 1]).inv().is_err());
    }

    #[test]
    fn residue_series_matches() {
        let z = Zmod::new(7, 6).unwrap();
        let rs = ResidueSeries::new(z, 2);
        let a = vec![3, 1, 4, 1, 5, 9];
        let b = vec![2, 6, 5, 3, 5, 8];
        let pa = TruncatedAffinoid::from_residues(&z, 2, &a, 6);
        let pb = TruncatedAffinoid::from_residues(&z, 2, &b, 6);
        assert_eq!(pa.mul(&pb).to_residues(&z).unwrap(), rs.mul(&a, &b));
        let t = [14, -7];
        let direct = pa.eval([&PadicNumber::from_i64(7, 14, 6), &PadicNumber::from_i64(7, -7, 6)]);
        assert_eq!(direct.to_residue(&z).unwrap(), rs.eval(&a, t));
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_map(a in proptest::collection::vec(-50i64..50, 10), b in proptest::collection::vec(-50i64..50, 10),
                                    t1 in -5i64..5, t2 in -5i64..5) {
            let (x, y) = (elem(3, 3, &a), elem(3, 3, &b));
            let t = [PadicNumber::from_i64(3, 3 * t1, 20), PadicNumber::from_i64(3, 3 * t2, 20)];
            let lhs = x.mul(&y).eval([&t[0], &t[1]]);
            let rhs = x.eval([&t[0], &t[1]]).mul(&y.eval([&t[0], &t[1]]));
            // truncation error is divisible by p^{D + 1}
            prop_assert!(lhs.agrees_with(&rhs, 4));
        }
    }
}
