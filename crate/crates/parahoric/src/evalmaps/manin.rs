//! Manin presentation of `Hom_Gamma(Div^0 P^1(Q), M)` for `Gamma = Gamma_0(N)`.
//!
//! Cosets `Gamma g` of `SL_2(Z)` are indexed by `P^1(Z/N)` through the bottom row of `g`. The
//! unknowns are `x_j = Phi(g_j {0 -> oo})` for fixed lifts `g_j`; two-term relations are used to
//! eliminate half of them and the remaining relations are kept for the solver.

use std::collections::HashMap;

use num_integer::Integer;

use super::EvalError;

/// `(a b; c d)`.
pub type Mat2 = [i128; 4];

pub const IDENTITY: Mat2 = [1, 0, 0, 1];
pub const MINUS_ONE: Mat2 = [-1, 0, 0, -1];
pub const SIGMA: Mat2 = [0, -1, 1, 0];
pub const TAU: Mat2 = [0, -1, 1, -1];

pub fn mmul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

pub fn det(m: &Mat2) -> i128 {
    m[0] * m[3] - m[1] * m[2]
}

/// Adjugate; the inverse for determinant one.
pub fn adj(m: &Mat2) -> Mat2 {
    [m[3], -m[1], -m[2], m[0]]
}

/// A point of `P^1(Q)` as `(num, den)` in lowest terms with `den >= 0`; `oo = (1, 0)`.
pub type Cusp = (i128, i128);

pub const INFINITY: Cusp = (1, 0);

pub fn cusp(num: i128, den: i128) -> Cusp {
    let g = num.gcd(&den);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 || (d == 0 && n < 0) {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// Möbius action on a cusp.
pub fn act_cusp(m: &Mat2, r: Cusp) -> Cusp {
    cusp(m[0] * r.0 + m[1] * r.1, m[2] * r.0 + m[3] * r.1)
}

/// Unimodular matrices `g_k` with `{oo -> r} = sum_k g_k {0 -> oo}`, from the continued fraction of `r`.
pub fn unimodular_path(r: Cusp) -> Vec<Mat2> {
    if r.1 == 0 {
        return Vec::new();
    }
    let (mut a, mut b) = r;
    let (mut p1, mut q1, mut p2, mut q2) = (1i128, 0i128, 0i128, 1i128);
    let mut out = Vec::new();
    let mut sign = -1;
    loop {
        let (quo, rem) = (a.div_euclid(b), a.rem_euclid(b));
        let (pk, qk) = (quo * p1 + p2, quo * q1 + q2);
        out.push([pk, sign * p1, qk, sign * q1]);
        (p2, q2, p1, q1) = (p1, q1, pk, qk);
        sign = -sign;
        if rem == 0 {
            return out;
        }
        (a, b) = (b, rem);
    }
}

/// `[g] = sign * x_free | h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetExpr {
    pub free: usize,
    pub sign: i8,
    pub h: Mat2,
}

#[derive(Clone, Debug)]
pub struct ManinData {
    pub level: u64,
    /// Canonical representatives of `P^1(Z/N)`.
    pub points: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
    /// `SL_2(Z)` lift of each point.
    pub lifts: Vec<Mat2>,
    pub exprs: Vec<CosetExpr>,
    /// Coset carrying each free generator.
    pub free: Vec<usize>,
    /// Relations `sum_i sign_i [g_i] = 0` left after elimination.
    pub relations: Vec<Vec<(i8, Mat2)>>,
}

/// `(g, x, y)` with `x a + y b = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1, mut x0, mut x1, mut y0, mut y1) = (a, b, 1, 0, 0, 1);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

impl ManinData {
    pub fn new(level: u64) -> Result<Self, EvalError> {
        Self::with_variant(level, 0)
    }

    /// Same presentation with different coset lifts; `variant` skips that many admissible lifts.
    pub fn with_variant(level: u64, variant: usize) -> Result<Self, EvalError> {
        if level == 0 {
            return Err(EvalError::Level);
        }
        let n = level as i128;
        let mut points = Vec::new();
        let mut index = HashMap::new();
        for c in 0..level {
            for d in 0..level {
                if (c as i128).gcd(&(d as i128)).gcd(&n) != 1 && level > 1 {
                    continue;
                }
                let key = Self::canonical_point(level, c as i128, d as i128);
                if !index.contains_key(&key) {
                    index.insert(key, points.len());
                    points.push(key);
                }
            }
        }
        let lifts: Vec<Mat2> = points.iter().map(|&(c, d)| Self::lift_point(level, c, d, variant)).collect();
        let mut data = ManinData { level, points, index, lifts, exprs: Vec::new(), free: Vec::new(), relations: Vec::new() };
        data.eliminate();
        Ok(data)
    }

    fn canonical_point(level: u64, c: i128, d: i128) -> (u64, u64) {
        let n = level as i128;
        if level == 1 {
            return (0, 0);
        }
        (1..n)
            .filter(|u| u.gcd(&n) == 1)
            .map(|u| ((u * c).rem_euclid(n) as u64, (u * d).rem_euclid(n) as u64))
            .min()
            .unwrap()
    }

    fn lift_point(level: u64, c: u64, d: u64, variant: usize) -> Mat2 {
        let n = level as i128;
        let (c, d) = (c as i128, d as i128);
        if level == 1 || (c == 0 && d == 1) {
            return if variant == 0 || level == 1 { IDENTITY } else { [1, 0, n, 1] };
        }
        let cands = (0i128..).map(|k| (c, d + k * n)).filter(|&(c2, d2)| c2.gcd(&d2) == 1);
        let (c2, d2) = cands.take(variant + 1).last().unwrap();
        // a d2 - b c2 = 1
        let (_, x, y) = ext_gcd(d2, c2);
        [x, -y, c2, d2]
    }

    pub fn num_cosets(&self) -> usize {
        self.points.len()
    }

    pub fn num_free(&self) -> usize {
        self.free.len()
    }

    /// Index of the coset `Gamma_0(N) g`.
    pub fn coset(&self, g: &Mat2) -> usize {
        let key = Self::canonical_point(self.level, g[2], g[3]);
        self.index[&key]
    }

    /// `[g] = sign * x_f | h`.
    pub fn expr(&self, g: &Mat2) -> CosetExpr {
        let c = self.coset(g);
        let e = self.exprs[c];
        CosetExpr { h: mmul(&e.h, &mmul(&self.lifts[c], &adj(g))), ..e }
    }

    fn eliminate(&mut self) {
        let n = self.points.len();
        let mut exprs: Vec<Option<CosetExpr>> = vec![None; n];
        for j in 0..n {
            if exprs[j].is_some() {
                continue;
            }
            let gj = self.lifts[j];
            let gs = mmul(&gj, &SIGMA);
            let k = self.coset(&gs);
            let f = self.free.len();
            self.free.push(j);
            exprs[j] = Some(CosetExpr { free: f, sign: 1, h: IDENTITY });
            if k == j {
                self.relations.push(vec![(1, gj), (1, gs)]);
            } else {
                // [g_j S] = x_k | (g_k (g_j S)^{-1}) = -x_j
                let h = mmul(&self.lifts[k], &adj(&gs));
                exprs[k] = Some(CosetExpr { free: f, sign: -1, h: adj(&h) });
            }
        }
        self.exprs = exprs.into_iter().map(Option::unwrap).collect();
        let mut seen = vec![false; n];
        for j in 0..n {
            if seen[j] {
                continue;
            }
            let g = self.lifts[j];
            let g1 = mmul(&g, &TAU);
            let g2 = mmul(&g1, &TAU);
            seen[j] = true;
            seen[self.coset(&g1)] = true;
            seen[self.coset(&g2)] = true;
            self.relations.push(vec![(1, g), (1, g1), (1, g2)]);
        }
        for &j in &self.free {
            let g = self.lifts[j];
            self.relations.push(vec![(1, g), (-1, mmul(&MINUS_ONE, &g))]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_counts() {
        // [SL_2(Z) : Gamma_0(N)] = N prod_{q | N} (1 + 1/q)
        for (n, idx) in [(1u64, 1usize), (2, 3), (3, 4), (11, 12), (33, 48), (35, 48)] {
            let m = ManinData::new(n).unwrap();
            assert_eq!(m.num_cosets(), idx, "N = {n}");
        }
    }

    #[test]
    fn lifts_have_the_right_bottom_row() {
        for v in 0..3 {
            let m = ManinData::with_variant(33, v).unwrap();
            for (j, g) in m.lifts.iter().enumerate() {
                assert_eq!(det(g), 1);
                assert_eq!(m.coset(g), j);
            }
        }
        assert_eq!(ManinData::new(11).unwrap().lifts[0], IDENTITY);
    }

    #[test]
    fn expressions_land_in_gamma0() {
        let m = ManinData::new(33).unwrap();
        let mut g: Mat2 = [5, 7, 2, 3];
        for _ in 0..20 {
            let e = m.expr(&g);
            assert_eq!(det(&e.h), 1);
            assert_eq!(e.h[2].rem_euclid(33), 0);
            g = mmul(&g, &[1, 1, 0, 1]);
            g = mmul(&g, &[1, 0, 1, 1]);
        }
    }

    #[test]
    fn continued_fraction_paths() {
        for r in [cusp(0, 1), cusp(3, 7), cusp(-22, 9), cusp(5, 1), cusp(13, 27)] {
            let path = unimodular_path(r);
            let mut cur = INFINITY;
            for g in &path {
                assert_eq!(det(g), 1);
                assert_eq!(act_cusp(g, (0, 1)), cur);
                cur = act_cusp(g, INFINITY);
            }
            assert_eq!(cur, r);
        }
        assert!(unimodular_path(INFINITY).is_empty());
    }

    #[test]
    fn matrix_algebra() {
        assert_eq!(mmul(&TAU, &mmul(&TAU, &TAU)), IDENTITY);
        assert_eq!(mmul(&SIGMA, &SIGMA), MINUS_ONE);
        let g = [2, 3, 5, 8];
        assert_eq!(mmul(&g, &adj(&g)), IDENTITY);
    }
}
