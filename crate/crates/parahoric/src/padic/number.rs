//! Capped-precision p-adic scalars.

use std::fmt;

use super::{PadicError, Zmod};

/// `p^val * unit + O(p^prec)`; zero is any value with `val >= prec`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: u64,
    val: i64,
    unit: u64,
    prec: i64,
}

fn pow_u128(p: u64, k: i64) -> u128 {
    (p as u128).pow(k as u32)
}

/// Largest relative precision `r` with `p^r < 2^62`.
pub fn max_relative_precision(p: u64) -> i64 {
    let mut r = 0;
    let mut m: u128 = 1;
    while m * (p as u128) < (1u128 << 62) {
        m *= p as u128;
        r += 1;
    }
    r
}

impl PadicNumber {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicNumber { p, val: prec, unit: 0, prec }
    }

    pub fn one(p: u64, prec: i64) -> Self {
        Self::from_i128(p, 1, prec)
    }

    /// Normalise `x * p^shift + O(p^prec)`.
    fn normalize(p: u64, mut x: i128, mut shift: i64, mut prec: i64) -> Self {
        if x == 0 || shift >= prec {
            return Self::zero(p, prec);
        }
        let pi = p as i128;
        while x % pi == 0 {
            x /= pi;
            shift += 1;
        }
        if shift >= prec {
            return Self::zero(p, prec);
        }
        prec = prec.min(shift + max_relative_precision(p));
        let m = pow_u128(p, prec - shift) as i128;
        PadicNumber { p, val: shift, unit: x.rem_euclid(m) as u64, prec }
    }

    pub fn from_i128(p: u64, x: i128, prec: i64) -> Self {
        Self::normalize(p, x, 0, prec)
    }

    pub fn from_i64(p: u64, x: i64, prec: i64) -> Self {
        Self::normalize(p, x as i128, 0, prec)
    }

    /// `x * p^e + O(p^prec)`.
    pub fn from_scaled(p: u64, x: i128, e: i64, prec: i64) -> Self {
        Self::normalize(p, x, e, prec)
    }

    pub fn from_ratio(p: u64, num: i128, den: i128, prec: i64) -> Result<Self, PadicError> {
        if den == 0 {
            return Err(PadicError::DivisionByZero);
        }
        let d = Self::from_i128(p, den, prec + 64);
        Ok(Self::from_i128(p, num, prec + d.val).div(&d)?.with_precision(prec))
    }

    /// Residue of `Z/p^N` read as an element of `Z_p` known to `N` digits.
    pub fn from_residue(z: &Zmod, a: u64) -> Self {
        Self::normalize(z.p(), a as i128, 0, z.n() as i64)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
    pub fn precision(&self) -> i64 {
        self.prec
    }
    pub fn is_zero(&self) -> bool {
        self.val >= self.prec
    }
    /// `None` for zero to the working precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }
    /// Valuation, reading zero as its precision.
    pub fn val_or_prec(&self) -> i64 {
        self.val.min(self.prec)
    }
    pub fn unit(&self) -> u64 {
        self.unit
    }
    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.prec - self.val
        }
    }

    /// Lower the absolute precision (never raises it).
    pub fn with_precision(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::normalize(self.p, self.unit as i128, self.val, prec)
    }

    /// Raise the precision by declaring the missing digits zero.
    pub fn lift_precision(&self, prec: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.p, prec);
        }
        Self::normalize(self.p, self.unit as i128, self.val, prec)
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let prec = self.prec.min(o.prec);
        let base = self.val.min(o.val);
        if base >= prec {
            return Self::zero(self.p, prec);
        }
        let r = prec - base;
        let m = pow_u128(self.p, r);
        let term = |x: &Self| -> u128 {
            if x.is_zero() || x.val - base >= r {
                0
            } else {
                (x.unit as u128 % m) * pow_u128(self.p, x.val - base) % m
            }
        };
        let s = (term(self) + term(o)) % m;
        Self::normalize(self.p, s as i128, base, prec)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = pow_u128(self.p, self.prec - self.val);
        PadicNumber { unit: (m - self.unit as u128) as u64, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let (va, vb) = (self.val_or_prec(), o.val_or_prec());
        let prec = (self.prec + vb).min(o.prec + va);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p, prec);
        }
        let val = va + vb;
        if val >= prec {
            return Self::zero(self.p, prec);
        }
        let m = pow_u128(self.p, prec - val);
        let u = (self.unit as u128 % m) * (o.unit as u128 % m) % m;
        PadicNumber { p: self.p, val, unit: u as u64, prec }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.mul(&Self::from_i64(self.p, c, self.prec + 64))
    }

    /// Multiply by `p^k`, shifting both valuation and precision.
    pub fn shift(&self, k: i64) -> Self {
        PadicNumber { val: self.val + k, prec: self.prec + k, ..self.clone() }
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        if self.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        let r = self.prec - self.val;
        let z = Zmod::new(self.p, r as u32)?;
        let ui = z.inv(self.unit).expect("unit part is a unit");
        Ok(PadicNumber { p: self.p, val: -self.val, unit: ui, prec: r - self.val })
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, PadicError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one(self.p, base.prec.max(0) + 64 * (e.unsigned_abs() as i64 + 1));
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Canonical residue mod `p^N`; requires nonnegative valuation.
    pub fn to_residue(&self, z: &Zmod) -> Result<u64, PadicError> {
        if self.is_zero() {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(PadicError::NotIntegral);
        }
        Ok(z.mul(z.lower(self.unit), z.p_pow(self.val as u32)))
    }

    /// Whether `self - o` vanishes to `digits` absolute digits.
    pub fn agrees_with(&self, o: &Self, digits: i64) -> bool {
        self.sub(o).val_or_prec() >= digits
    }

    /// Parse `a*p^e`, `a`, or `p^e`, optionally followed by ` + O(p^N)`.
    pub fn parse(s: &str, p: u64, prec: i64) -> Result<Self, PadicError> {
        let bad = || PadicError::Parse(s.to_string());
        let (body, cap) = match s.split_once("+ O(") {
            Some((b, rest)) => {
                let inner = rest.trim().trim_end_matches(')');
                let (_, e) = inner.split_once('^').ok_or_else(bad)?;
                (b.trim(), Some(e.trim().parse::<i64>().map_err(|_| bad())?))
            }
            None => (s.trim(), None),
        };
        let prec = cap.map_or(prec, |c| c.min(prec));
        let body = body.replace(' ', "");
        let (coef, power) = match body.split_once('*') {
            Some((a, pe)) => (a.to_string(), Some(pe.to_string())),
            None if body.contains('^') => ("1".to_string(), Some(body.clone())),
            None => (body.clone(), None),
        };
        let a: i128 = coef.parse().map_err(|_| bad())?;
        let e = match power {
            Some(pe) => {
                let (base, e) = pe.split_once('^').ok_or_else(bad)?;
                if base.parse::<u64>().map_err(|_| bad())? != p {
                    return Err(bad());
                }
                e.parse::<i64>().map_err(|_| bad())?
            }
            None => 0,
        };
        Ok(Self::from_scaled(p, a, e, prec))
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0 + O({}^{})", self.p, self.prec)
        } else {
            write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.prec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_and_parse_round_trip() {
        let x = PadicNumber::from_i64(3, 18, 10);
        assert_eq!(x.to_string(), "2*3^2 + O(3^10)");
        assert_eq!(PadicNumber::parse(&x.to_string(), 3, 20).unwrap(), x);
        assert_eq!(PadicNumber::parse("5*3^-1", 3, 10).unwrap().valuation(), Some(-1));
        assert!(PadicNumber::zero(3, 4).to_string().starts_with('0'));
    }

    #[test]
    fn rational_inverse() {
        let x = PadicNumber::from_ratio(5, 1, 3, 6).unwrap();
        assert!(x.scale_i64(3).agrees_with(&PadicNumber::one(5, 6), 6));
        let y = PadicNumber::from_ratio(5, 2, 25, 6).unwrap();
        assert_eq!(y.valuation(), Some(-2));
    }

    #[test]
    fn addition_caps_precision() {
        let a = PadicNumber::from_i64(3, 1, 5);
        let b = PadicNumber::from_i64(3, 2, 8);
        let s = a.add(&b);
        assert_eq!(s.precision(), 5);
        assert_eq!(s.valuation(), Some(1));
        assert!(a.sub(&a).is_zero());
    }

    proptest! {
        #[test]
        fn valuations_multiply_and_add(a in -5000i64..5000, b in -5000i64..5000) {
            let x = PadicNumber::from_i64(5, a, 20);
            let y = PadicNumber::from_i64(5, b, 20);
            if a != 0 && b != 0 {
                prop_assert_eq!(x.mul(&y).valuation(), Some(x.valuation().unwrap() + y.valuation().unwrap()));
                let s = x.add(&y);
                let m = x.valuation().unwrap().min(y.valuation().unwrap());
                prop_assert!(s.val_or_prec() >= m);
                if x.valuation() != y.valuation() {
                    prop_assert_eq!(s.valuation(), Some(m));
                }
            }
            prop_assert!(x.add(&y).agrees_with(&PadicNumber::from_i64(5, a + b, 20), 20));
            prop_assert!(x.mul(&y).agrees_with(&PadicNumber::from_i64(5, a * b, 40), x.mul(&y).precision()));
        }

        #[test]
        fn division_inverts_multiplication(a in 1i64..5000, b in 1i64..5000) {
            let x = PadicNumber::from_i64(3, a, 15);
            let y = PadicNumber::from_i64(3, b, 15);
            let q = x.mul(&y).div(&y).unwrap();
            prop_assert!(q.agrees_with(&x, q.precision()));
        }
    }
}
