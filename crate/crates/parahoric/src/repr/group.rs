//! Integer matrices, minors and deterministic sample sets.

use crate::padic::Zmod;

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IMat {
    pub m: usize,
    pub a: Vec<i128>,
}

impl IMat {
    pub fn identity(m: usize) -> Self {
        let mut a = vec![0; m * m];
        for i in 0..m {
            a[i * m + i] = 1;
        }
        IMat { m, a }
    }
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let m = rows.len();
        IMat { m, a: rows.iter().flatten().map(|&x| x as i128).collect() }
    }
    pub fn diag(d: &[i128]) -> Self {
        let mut x = IMat::identity(d.len());
        for (i, &v) in d.iter().enumerate() {
            x.a[i * d.len() + i] = v;
        }
        x
    }
    /// `I + s E_{ij}`.
    pub fn elementary(m: usize, i: usize, j: usize, s: i128) -> Self {
        let mut x = IMat::identity(m);
        x.a[i * m + j] += s;
        x
    }
    /// Antidiagonal permutation matrix.
    pub fn antidiagonal(m: usize) -> Self {
        let mut x = IMat { m, a: vec![0; m * m] };
        for i in 0..m {
            x.a[i * m + (m - 1 - i)] = 1;
        }
        x
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.a[i * self.m + j]
    }
    pub fn mul(&self, o: &IMat) -> IMat {
        assert_eq!(self.m, o.m);
        let m = self.m;
        let mut a = vec![0i128; m * m];
        for i in 0..m {
            for k in 0..m {
                let x = self.a[i * m + k];
                if x != 0 {
                    for j in 0..m {
                        a[i * m + j] += x * o.a[k * m + j];
                    }
                }
            }
        }
        IMat { m, a }
    }
    /// `(A B; C D)` from four `n x n` blocks.
    pub fn block(a: &IMat, b: &IMat, c: &IMat, d: &IMat) -> IMat {
        let n = a.m;
        let m = 2 * n;
        let mut x = IMat { m, a: vec![0; m * m] };
        for i in 0..n {
            for j in 0..n {
                x.a[i * m + j] = a.get(i, j);
                x.a[i * m + n + j] = b.get(i, j);
                x.a[(n + i) * m + j] = c.get(i, j);
                x.a[(n + i) * m + n + j] = d.get(i, j);
            }
        }
        x
    }
    pub fn zero(m: usize) -> Self {
        IMat { m, a: vec![0; m * m] }
    }
    /// Block extraction: `(r, c)` in `{0, 1}^2` for an even-size matrix.
    pub fn sub_block(&self, r: usize, c: usize) -> IMat {
        let n = self.m / 2;
        let mut x = IMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                x.a[i * n + j] = self.get(r * n + i, c * n + j);
            }
        }
        x
    }
    pub fn scale(&self, s: i128) -> IMat {
        IMat { m: self.m, a: self.a.iter().map(|x| x * s).collect() }
    }
    /// Leading principal `k x k` minor.
    pub fn leading_minor(&self, k: usize) -> i128 {
        let mut sub = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                sub.push(self.get(i, j));
            }
        }
        bareiss(sub, k)
    }
    pub fn det(&self) -> i128 {
        bareiss(self.a.clone(), self.m)
    }
}

/// Fraction-free determinant.
fn bareiss(mut a: Vec<i128>, n: usize) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r * n + k] != 0) else { return 0 };
            for j in 0..n {
                a.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
        }
        prev = a[k * n + k];
    }
    sign * a[n * n - 1]
}

/// Arithmetic modulo the Mersenne prime `2^61 - 1`, used for exact independence checks.
#[derive(Clone, Copy, Debug)]
pub struct Fq;

impl Fq {
    pub const Q: u64 = (1 << 61) - 1;
    pub fn reduce(x: i128) -> u64 {
        x.rem_euclid(Self::Q as i128) as u64
    }
    pub fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % Self::Q as u128) as u64
    }
    pub fn add(a: u64, b: u64) -> u64 {
        (a + b) % Self::Q
    }
    pub fn sub(a: u64, b: u64) -> u64 {
        (a + Self::Q - b) % Self::Q
    }
    pub fn pow(a: u64, mut e: u64) -> u64 {
        let (mut b, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul(acc, b);
            }
            b = Self::mul(b, b);
            e >>= 1;
        }
        acc
    }
    pub fn inv(a: u64) -> u64 {
        Self::pow(a, Self::Q - 2)
    }
    pub fn pow_signed(a: u64, e: i64) -> u64 {
        if e >= 0 {
            Self::pow(a, e as u64)
        } else {
            Self::pow(Self::inv(a), e.unsigned_abs())
        }
    }
}

/// Residue of an exact integer power with possibly negative exponent; `None` if not invertible.
pub fn zpow_signed(z: &Zmod, x: i128, e: i64) -> Option<u64> {
    z.pow_signed(z.reduce(x), e)
}

/// Deterministic stream of small integers in `{-2, ..., 2}`.
pub struct SampleStream {
    state: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { state: seed ^ 0x9e37_79b9_7f4a_7c15 }
    }
    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    pub fn small(&mut self) -> i128 {
        self.ranged(2)
    }
    /// Uniform-ish integer in `{-r, ..., r}`.
    pub fn ranged(&mut self, r: i128) -> i128 {
        (self.next_u64() % (2 * r as u64 + 1)) as i128 - r
    }
    pub fn matrix(&mut self, m: usize) -> IMat {
        IMat { m, a: (0..m * m).map(|_| self.small()).collect() }
    }
    /// Matrix whose determinant is nonzero and prime to `p` (any nonzero value when `p = 0`).
    pub fn invertible(&mut self, m: usize, p: u64) -> IMat {
        self.invertible_in(m, p, 2)
    }
    /// As [`Self::invertible`] with entries in `{-r, ..., r}`.
    pub fn invertible_in(&mut self, m: usize, p: u64, r: i128) -> IMat {
        loop {
            let x = IMat { m, a: (0..m * m).map(|_| self.ranged(r)).collect() };
            let d = x.det();
            if d != 0 && (p == 0 || d.rem_euclid(p as i128) != 0) {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cofactor_det(a: &IMat) -> i128 {
        if a.m == 1 {
            return a.a[0];
        }
        (0..a.m)
            .map(|j| {
                let mut sub = IMat::zero(a.m - 1);
                for i in 1..a.m {
                    for (jj, c) in (0..a.m).filter(|&c| c != j).enumerate() {
                        sub.a[(i - 1) * (a.m - 1) + jj] = a.get(i, c);
                    }
                }
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a.get(0, j) * cofactor_det(&sub)
            })
            .sum()
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactors(seed in 0u64..1000, m in 1usize..5) {
            let x = SampleStream::new(seed).matrix(m);
            prop_assert_eq!(x.det(), cofactor_det(&x));
            let y = SampleStream::new(seed + 7).matrix(m);
            prop_assert_eq!(x.mul(&y).det(), x.det() * y.det());
        }
    }

    #[test]
    fn mersenne_inverse() {
        assert_eq!(Fq::mul(Fq::inv(12345), 12345), 1);
        assert_eq!(Fq::pow_signed(3, -2), Fq::inv(9));
    }

    #[test]
    fn blocks_round_trip() {
        let a = IMat::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IMat::diag(&[5, 6]);
        let g = IMat::block(&a, &b, &IMat::zero(2), &a);
        assert_eq!(g.sub_block(0, 0), a);
        assert_eq!(g.sub_block(0, 1), b);
        assert_eq!(g.det(), a.det() * a.det());
        assert_eq!(g.leading_minor(1), 1);
    }
}
