//! Residues modulo `p^N` and dense linear algebra over `Z/p^N`.

use super::PadicError;

/// Arithmetic context for `Z/p^N`, with `p^N < 2^62`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zmod {
    p: u64,
    n: u32,
    m: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Zmod {
    pub fn new(p: u64, n: u32) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if n == 0 {
            return Err(PadicError::PrecisionExhausted);
        }
        let mut m: u64 = 1;
        for _ in 0..n {
            m = m
                .checked_mul(p)
                .filter(|&m| m < (1u64 << 62))
                .ok_or(PadicError::ModulusTooLarge { p, n })?;
        }
        Ok(Zmod { p, n, m })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// `p^k` as a residue (zero once `k >= N`).
    pub fn p_pow(&self, k: u32) -> u64 {
        if k >= self.n {
            0
        } else {
            self.p.pow(k)
        }
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }
    pub fn from_i64(&self, x: i64) -> u64 {
        self.reduce(x as i128)
    }
    /// Balanced lift in `(-p^N/2, p^N/2]`.
    pub fn signed(&self, a: u64) -> i128 {
        if a > self.m / 2 {
            a as i128 - self.m as i128
        } else {
            a as i128
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }
    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a % self.m;
        let mut acc = 1 % self.m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation of the residue, `N` for zero.
    pub fn val(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (mut r0, mut r1) = (self.m as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(self.reduce(s0))
    }

    /// Power with a signed exponent; negative exponents need a unit base.
    pub fn pow_signed(&self, a: u64, e: i64) -> Option<u64> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs()))
        }
    }

    /// Exact quotient `a / p^v` of the canonical representative; requires `val(a) >= v`.
    pub fn div_p_pow(&self, a: u64, v: u32) -> u64 {
        debug_assert!(self.val(a) >= v);
        if v == 0 {
            a
        } else {
            a / self.p.pow(v)
        }
    }

    /// Split `a = p^v * u` with `u` a unit (`u = 0` when `a = 0`).
    pub fn split(&self, a: u64) -> (u32, u64) {
        let v = self.val(a);
        if v >= self.n {
            (self.n, 0)
        } else {
            (v, a / self.p.pow(v))
        }
    }

    /// Reduce from a context with at least as much precision.
    pub fn lower(&self, a: u64) -> u64 {
        a % self.m
    }

    /// A context with a different precision over the same prime.
    pub fn with_precision(&self, n: u32) -> Result<Zmod, PadicError> {
        Zmod::new(self.p, n)
    }
}

/// Dense row-major matrix of residues; the modulus is supplied by the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ZMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMat { rows, cols, data: vec![0; rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row);
        }
        ZMat { rows: r, cols: c, data }
    }
    pub fn from_i64(z: &Zmod, rows: &[Vec<i64>]) -> Self {
        ZMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| z.from_i64(x)).collect()).collect())
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
    pub fn mul(&self, z: &Zmod, o: &ZMat) -> ZMat {
        assert_eq!(self.cols, o.rows);
        let mut out = ZMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let idx = i * o.cols + j;
                    out.data[idx] = z.add(out.data[idx], z.mul(a, o.get(k, j)));
                }
            }
        }
        out
    }
    pub fn mul_vec(&self, z: &Zmod, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| z.add(acc, z.mul(a, b)))
            })
            .collect()
    }
    pub fn add(&self, z: &Zmod, o: &ZMat) -> ZMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ZMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| z.add(a, b)).collect(),
        }
    }
    pub fn sub(&self, z: &Zmod, o: &ZMat) -> ZMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ZMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| z.sub(a, b)).collect(),
        }
    }
    pub fn scale(&self, z: &Zmod, c: u64) -> ZMat {
        ZMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| z.mul(a, c)).collect() }
    }
    pub fn transpose(&self) -> ZMat {
        let mut t = ZMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
    /// Stack `o` below `self`.
    pub fn vstack(&self, o: &ZMat) -> ZMat {
        assert!(self.rows == 0 || o.rows == 0 || self.cols == o.cols);
        let cols = if self.rows == 0 { o.cols } else { self.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        ZMat { rows: self.rows + o.rows, cols, data }
    }
    pub fn min_val(&self, z: &Zmod) -> u32 {
        self.data.iter().map(|&x| z.val(x)).min().unwrap_or(z.n())
    }
}

/// Smith form `U A V = diag(p^{v_0}, ..., p^{v_{r-1}}, 0, ...)` over `Z/p^N`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Row transform, present when requested.
    pub u: Option<ZMat>,
    pub v: ZMat,
    /// Valuations of the nonzero invariants, nondecreasing.
    pub invariants: Vec<u32>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

/// Smith form with minimal-valuation pivoting, ties broken by lowest row then lowest column.
pub fn smith(z: &Zmod, a: &ZMat, want_u: bool) -> Smith {
    let (r, c) = (a.rows, a.cols);
    let mut b = a.clone();
    let mut u = if want_u { Some(ZMat::identity(r)) } else { None };
    let mut v = ZMat::identity(c);
    let mut invariants = Vec::new();
    let mut vals: Vec<u32> = b.data.iter().map(|&x| z.val(x)).collect();
    for k in 0..r.min(c) {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in k..r {
            for j in k..c {
                let vv = vals[i * c + j];
                if vv < z.n() && best.is_none_or(|(bv, _, _)| vv < bv) {
                    best = Some((vv, i, j));
                    if vv == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((pv, pi, pj)) = best else { break };
        b.swap_rows(k, pi);
        if pi != k {
            for j in 0..c {
                vals.swap(k * c + j, pi * c + j);
            }
        }
        b.swap_cols(k, pj);
        if pj != k {
            for i in 0..r {
                vals.swap(i * c + k, i * c + pj);
            }
        }
        if let Some(u) = u.as_mut() {
            u.swap_rows(k, pi);
        }
        v.swap_cols(k, pj);
        let (_, unit) = z.split(b.get(k, k));
        let uinv = z.inv(unit).expect("unit part is invertible");
        for j in k..c {
            let x = z.mul(b.get(k, j), uinv);
            b.set(k, j, x);
        }
        if let Some(u) = u.as_mut() {
            for j in 0..r {
                let x = z.mul(u.get(k, j), uinv);
                u.set(k, j, x);
            }
        }
        for i in (k + 1)..r {
            let bik = b.get(i, k);
            if bik == 0 {
                continue;
            }
            let f = z.div_p_pow(bik, pv);
            for j in k..c {
                let bkj = b.get(k, j);
                if bkj != 0 {
                    let x = z.sub(b.get(i, j), z.mul(f, bkj));
                    b.set(i, j, x);
                    vals[i * c + j] = z.val(x);
                }
            }
            if let Some(u) = u.as_mut() {
                for j in 0..r {
                    let ukj = u.get(k, j);
                    if ukj != 0 {
                        let x = z.sub(u.get(i, j), z.mul(f, ukj));
                        u.set(i, j, x);
                    }
                }
            }
        }
        for j in (k + 1)..c {
            let bkj = b.get(k, j);
            if bkj == 0 {
                continue;
            }
            let f = z.div_p_pow(bkj, pv);
            b.set(k, j, 0);
            vals[k * c + j] = z.n();
            for i in 0..c {
                let vik = v.get(i, k);
                if vik != 0 {
                    let x = z.sub(v.get(i, j), z.mul(f, vik));
                    v.set(i, j, x);
                }
            }
        }
        invariants.push(pv);
    }
    Smith { u, v, invariants }
}

/// Kernel generator: `vector` solves the system and has additive order `p^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    pub vector: Vec<u64>,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct Kernel {
    pub vectors: Vec<KernelVector>,
    pub rank: usize,
}

impl Kernel {
    /// Generators that solve the system to the full working precision.
    pub fn full(&self, n: u32) -> Vec<&Vec<u64>> {
        self.vectors.iter().filter(|k| k.order >= n).map(|k| &k.vector).collect()
    }
    pub fn full_dim(&self, n: u32) -> usize {
        self.full(n).len()
    }
}

/// Generators of `{x : A x = 0 mod p^N}`.
pub fn kernel(z: &Zmod, a: &ZMat) -> Kernel {
    let s = smith(z, a, false);
    kernel_from_smith(z, &s, a.cols)
}

pub fn kernel_from_smith(z: &Zmod, s: &Smith, cols: usize) -> Kernel {
    let mut vectors = Vec::new();
    for j in 0..cols {
        let (scale, order) = match s.invariants.get(j) {
            Some(&0) => continue,
            Some(&v) => (z.p_pow(z.n() - v), v),
            None => (1, z.n()),
        };
        let col: Vec<u64> = s.v.col(j).iter().map(|&x| z.mul(x, scale)).collect();
        vectors.push(KernelVector { vector: col, order });
    }
    Kernel { vectors, rank: s.rank() }
}

/// Row scaling that turns "row i holds mod p^{prec_i}" into "holds mod p^N".
pub fn scale_rows(z: &Zmod, a: &ZMat, row_prec: &[u32]) -> ZMat {
    let mut out = a.clone();
    for (i, &rp) in row_prec.iter().enumerate() {
        let s = z.p_pow(z.n().saturating_sub(rp));
        for j in 0..a.cols {
            out.set(i, j, z.mul(a.get(i, j), s));
        }
    }
    out
}

/// Kernel where equation `i` only has to hold modulo `p^{row_prec[i]}`.
pub fn kernel_filtered(z: &Zmod, a: &ZMat, row_prec: &[u32]) -> Kernel {
    kernel(z, &scale_rows(z, a, row_prec))
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub particular: Vec<u64>,
    pub kernel: Kernel,
    /// Digits lost dividing by Smith invariants.
    pub precision_loss: u32,
}

/// Solve `A x = b` where equation `i` must hold modulo `p^{row_prec[i]}`.
pub fn solve_filtered(z: &Zmod, a: &ZMat, b: &[u64], row_prec: &[u32]) -> Result<Solution, PadicError> {
    assert_eq!(a.rows, b.len());
    let sa = scale_rows(z, a, row_prec);
    let sb: Vec<u64> = b
        .iter()
        .zip(row_prec)
        .map(|(&x, &rp)| z.mul(x, z.p_pow(z.n().saturating_sub(rp))))
        .collect();
    let s = smith(z, &sa, true);
    let (particular, loss) = solve_with_smith(z, &s, &sb)?;
    Ok(Solution { particular, kernel: kernel_from_smith(z, &s, a.cols), precision_loss: loss })
}

/// Particular solution of `A x = b` from a Smith form of `A` computed with its row transform.
pub fn solve_with_smith(z: &Zmod, s: &Smith, b: &[u64]) -> Result<(Vec<u64>, u32), PadicError> {
    let c = s.u.as_ref().expect("row transform requested").mul_vec(z, b);
    let cols = s.v.rows;
    let mut y = vec![0u64; cols];
    let mut loss = 0;
    for (i, &ci) in c.iter().enumerate() {
        match s.invariants.get(i) {
            Some(&v) => {
                if z.val(ci) < v {
                    return Err(PadicError::Inconsistent { row: i });
                }
                y[i] = z.div_p_pow(ci, v);
                loss = loss.max(v);
            }
            None => {
                if ci != 0 {
                    return Err(PadicError::Inconsistent { row: i });
                }
            }
        }
    }
    Ok((s.v.mul_vec(z, &y), loss))
}

pub fn solve(z: &Zmod, a: &ZMat, b: &[u64]) -> Result<Solution, PadicError> {
    solve_filtered(z, a, b, &vec![z.n(); a.rows])
}

/// Number of Smith invariants of valuation below `N`, i.e. the rank over `Q_p` seen at this precision.
pub fn rank(z: &Zmod, a: &ZMat) -> usize {
    smith(z, a, false).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_and_valuation() {
        let z = Zmod::new(5, 4).unwrap();
        assert_eq!(z.mul(z.inv(7).unwrap(), 7), 1);
        assert_eq!(z.val(50), 2);
        assert_eq!(z.val(0), 4);
        assert_eq!(z.split(75), (2, 3));
        assert!(Zmod::new(6, 3).is_err());
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let z = Zmod::new(3, 5).unwrap();
        assert_eq!(kernel(&z, &ZMat::zeros(2, 2)).full_dim(5), 2);
        assert_eq!(kernel(&z, &ZMat::identity(2)).vectors.len(), 0);
    }

    #[test]
    fn kernel_of_all_ones_is_antidiagonal() {
        let z = Zmod::new(5, 4).unwrap();
        let a = ZMat::from_i64(&z, &[vec![1, 1], vec![1, 1]]);
        let k = kernel(&z, &a);
        let full = k.full(4);
        assert_eq!(full.len(), 1);
        let v = full[0];
        // direct solve: x + y = 0, so the generator is a unit multiple of (1, -1)
        assert!(z.is_unit(v[0]));
        assert_eq!(z.add(v[0], v[1]), 0);
    }

    #[test]
    fn torsion_kernel_is_certified() {
        let z = Zmod::new(3, 4).unwrap();
        let a = ZMat::from_i64(&z, &[vec![9]]);
        let k = kernel(&z, &a);
        assert_eq!(k.vectors, vec![KernelVector { vector: vec![9], order: 2 }]);
        assert_eq!(k.full_dim(4), 0);
    }

    #[test]
    fn filtered_rows_relax_equations() {
        let z = Zmod::new(3, 4).unwrap();
        let a = ZMat::from_i64(&z, &[vec![1, 0], vec![0, 1]]);
        let k = kernel_filtered(&z, &a, &[4, 1]);
        let gens: Vec<_> = k.vectors.iter().map(|v| (v.vector.clone(), v.order)).collect();
        assert_eq!(gens, vec![(vec![0, 3], 3)]);
    }

    #[test]
    fn inconsistent_system_is_reported() {
        let z = Zmod::new(3, 4).unwrap();
        let a = ZMat::from_i64(&z, &[vec![3]]);
        assert!(solve(&z, &a, &[1]).is_err());
        let s = solve(&z, &a, &[6]).unwrap();
        assert_eq!(z.mul(3, s.particular[0]), 6);
        assert_eq!(s.precision_loss, 1);
    }

    fn mat_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-30i64..30, c), r)
        })
    }

    proptest! {
        #[test]
        fn smith_transforms_diagonalise(rows in mat_strategy()) {
            let z = Zmod::new(3, 6).unwrap();
            let a = ZMat::from_i64(&z, &rows);
            let s = smith(&z, &a, true);
            let d = s.u.as_ref().unwrap().mul(&z, &a).mul(&z, &s.v);
            for i in 0..d.rows {
                for j in 0..d.cols {
                    let expect = if i == j && i < s.rank() { z.p_pow(s.invariants[i]) } else { 0 };
                    prop_assert_eq!(d.get(i, j), expect);
                }
            }
            prop_assert!(s.invariants.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn kernel_vectors_solve_system(rows in mat_strategy()) {
            let z = Zmod::new(5, 5).unwrap();
            let a = ZMat::from_i64(&z, &rows);
            let k = kernel(&z, &a);
            for kv in &k.vectors {
                prop_assert!(a.mul_vec(&z, &kv.vector).iter().all(|&x| x == 0));
            }
            // rank-nullity over Q_p at this precision
            prop_assert_eq!(k.rank + k.full_dim(5), a.cols);
        }

        #[test]
        fn valuation_is_additive(a in 1i64..10_000, b in 1i64..10_000) {
            let z = Zmod::new(3, 20).unwrap();
            let (x, y) = (z.from_i64(a), z.from_i64(b));
            prop_assert_eq!(z.val(z.mul(x, y)), z.val(x) + z.val(y));
            let s = z.add(x, y);
            prop_assert!(z.val(s) >= z.val(x).min(z.val(y)));
            if z.val(x) != z.val(y) {
                prop_assert_eq!(z.val(s), z.val(x).min(z.val(y)));
            }
        }
    }
}
