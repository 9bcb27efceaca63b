//! Pure dominant weights for `GL(2n)` over a totally real field of degree `d`, critical
//! ranges, the integral normalisation of `U_p` and the non-critical slope bound.
//!
//! The field enters only through its combinatorial data: the embeddings, the map from
//! embeddings to primes above `p`, and ramification indices.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::padic::{PadicError, PadicNumber};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("weight must have {expected} components per embedding, got {got}")]
    Length { expected: usize, got: usize },
    #[error("embedding {sigma} is not dominant")]
    NotDominant { sigma: usize },
    #[error("weight declared pure but embedding {sigma} breaks purity")]
    NotPure { sigma: usize },
    #[error("weight is not pure")]
    PurityRequired,
    #[error("embedding map and ramification data are inconsistent: {0}")]
    FieldData(String),
    #[error("integral normalisation has negative valuation at prime {0}")]
    NotIntegral(usize),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Weight fixture as stored on disk.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightFixture {
    pub p: u64,
    pub n: usize,
    pub d: usize,
    pub sigma_to_prime: Vec<usize>,
    /// Ramification index keyed by prime index.
    pub e: BTreeMap<String, u32>,
    pub lambda: Vec<Vec<i64>>,
    pub pure: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    n: usize,
    sigma_to_prime: Vec<usize>,
    e: Vec<u32>,
    lambda: Vec<Vec<i64>>,
    purity: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub h_regular: bool,
}

/// Per-prime verdict of the non-critical slope test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeVerdict {
    pub prime: usize,
    /// `e * v_p(alpha°)`.
    pub lhs: Ratio<i64>,
    pub bound: i64,
    pub non_critical: bool,
}

impl Weight {
    pub fn new(
        n: usize,
        sigma_to_prime: Vec<usize>,
        e: Vec<u32>,
        lambda: Vec<Vec<i64>>,
        pure: bool,
    ) -> Result<Self, WeightError> {
        if sigma_to_prime.len() != lambda.len() || lambda.is_empty() {
            return Err(WeightError::FieldData("one weight row per embedding".into()));
        }
        if let Some(&bad) = sigma_to_prime.iter().find(|&&q| q >= e.len()) {
            return Err(WeightError::FieldData(format!("prime index {bad} has no ramification index")));
        }
        if e.contains(&0) {
            return Err(WeightError::FieldData("ramification indices are positive".into()));
        }
        for (sigma, l) in lambda.iter().enumerate() {
            if l.len() != 2 * n {
                return Err(WeightError::Length { expected: 2 * n, got: l.len() });
            }
            if l.windows(2).any(|w| w[0] < w[1]) {
                return Err(WeightError::NotDominant { sigma });
            }
        }
        let purity = if pure {
            let w = lambda[0][0] + lambda[0][2 * n - 1];
            for (sigma, l) in lambda.iter().enumerate() {
                if (0..2 * n).any(|i| l[i] + l[2 * n - 1 - i] != w) {
                    return Err(WeightError::NotPure { sigma });
                }
            }
            Some(w)
        } else {
            None
        };
        Ok(Weight { n, sigma_to_prime, e, lambda, purity })
    }

    /// Weight over `Q` with `p` unramified.
    pub fn rational(lambda: Vec<i64>, pure: bool) -> Result<Self, WeightError> {
        if lambda.len() % 2 != 0 || lambda.is_empty() {
            return Err(WeightError::Length { expected: lambda.len() + 1, got: lambda.len() });
        }
        Self::new(lambda.len() / 2, vec![0], vec![1], vec![lambda], pure)
    }

    pub fn from_fixture(f: &WeightFixture) -> Result<Self, WeightError> {
        if f.d != f.sigma_to_prime.len() {
            return Err(WeightError::FieldData(format!("d = {} but {} embeddings mapped", f.d, f.sigma_to_prime.len())));
        }
        let primes = f.sigma_to_prime.iter().max().map_or(0, |m| m + 1);
        let e = (0..primes)
            .map(|q| {
                f.e.get(&q.to_string())
                    .copied()
                    .ok_or_else(|| WeightError::FieldData(format!("missing ramification index for prime {q}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(f.n, f.sigma_to_prime.clone(), e, f.lambda.clone(), f.pure)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn d(&self) -> usize {
        self.lambda.len()
    }
    pub fn components(&self) -> &[Vec<i64>] {
        &self.lambda
    }
    pub fn sigma(&self, s: usize) -> &[i64] {
        &self.lambda[s]
    }
    pub fn purity_weight(&self) -> Option<i64> {
        self.purity
    }
    pub fn num_primes(&self) -> usize {
        self.e.len()
    }
    pub fn ramification(&self, prime: usize) -> u32 {
        self.e[prime]
    }
    /// Embeddings lying over the given prime.
    pub fn sigmas_over(&self, prime: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d()).filter(move |&s| self.sigma_to_prime[s] == prime)
    }
    /// First and second `GL(n)` blocks for one embedding.
    pub fn blocks(&self, s: usize) -> (&[i64], &[i64]) {
        self.lambda[s].split_at(self.n)
    }

    /// `{j : -lambda_{s,n} <= j <= -lambda_{s,n+1} for all s}`.
    pub fn crit_range(&self) -> Result<Vec<i64>, WeightError> {
        if self.purity.is_none() {
            return Err(WeightError::PurityRequired);
        }
        let n = self.n;
        let lo = self.lambda.iter().map(|l| -l[n - 1]).max().unwrap();
        let hi = self.lambda.iter().map(|l| -l[n]).min().unwrap();
        Ok((lo..=hi).collect())
    }

    pub fn contragredient(&self) -> Weight {
        let lambda = self.lambda.iter().map(|l| l.iter().rev().map(|x| -x).collect()).collect();
        Weight { lambda, purity: self.purity.map(|w| -w), ..self.clone() }
    }

    /// Exponent of the uniformiser in `lambda^vee(t_prime)`.
    pub fn normalizer_exponent(&self, prime: usize) -> i64 {
        -self.sigmas_over(prime).map(|s| self.lambda[s][self.n..].iter().sum::<i64>()).sum::<i64>()
    }

    /// `lambda^vee(t_prime)` as an element of `Q_p`; needs `e = 1` at that prime.
    pub fn integral_normalizer(&self, prime: usize, p: u64, prec: i64) -> Option<PadicNumber> {
        (self.e[prime] == 1).then(|| PadicNumber::one(p, prec).shift(self.normalizer_exponent(prime)))
    }

    /// `min_{s over prime} (1 + lambda_{s,n} - lambda_{s,n+1})`.
    pub fn slope_bound(&self, prime: usize) -> i64 {
        let n = self.n;
        self.sigmas_over(prime).map(|s| 1 + self.lambda[s][n - 1] - self.lambda[s][n]).min().unwrap_or(i64::MAX)
    }

    /// Non-critical slope test from the valuations `v_p(alpha°)` per prime.
    pub fn non_q_critical_slope_check(&self, refinement: &RefinementData) -> Vec<SlopeVerdict> {
        refinement
            .circ_valuations
            .iter()
            .enumerate()
            .map(|(prime, &v)| {
                let lhs = v * Ratio::from_integer(self.e[prime] as i64);
                let bound = self.slope_bound(prime);
                SlopeVerdict { prime, lhs, bound, non_critical: lhs < Ratio::from_integer(bound) }
            })
            .collect()
    }

    pub fn regularity_flags(&self) -> Regularity {
        let strict = |l: &[i64]| l.windows(2).all(|w| w[0] > w[1]);
        let regular = self.lambda.iter().all(|l| strict(l));
        let h_regular = (0..self.d()).all(|s| {
            let (a, b) = self.blocks(s);
            strict(a) && strict(b)
        });
        Regularity { regular, h_regular }
    }
}

/// `U_prime`-eigenvalues of a refinement and the valuations of their integral normalisations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementData {
    pub alphas: Vec<Option<PadicNumber>>,
    /// `v_p(alpha°)` per prime, in units of `v_p(p) = 1`.
    pub circ_valuations: Vec<Ratio<i64>>,
}

impl RefinementData {
    /// From eigenvalues `alpha_prime`; `alpha° = lambda^vee(t_prime) alpha`.
    pub fn from_alphas(lambda: &Weight, alphas: Vec<PadicNumber>) -> Result<Self, WeightError> {
        if alphas.len() != lambda.num_primes() {
            return Err(WeightError::FieldData("one eigenvalue per prime above p".into()));
        }
        let mut circ = Vec::new();
        for (q, a) in alphas.iter().enumerate() {
            let va = a.valuation().ok_or(PadicError::DivisionByZero)?;
            let v = Ratio::from_integer(va) + Ratio::new(lambda.normalizer_exponent(q), lambda.ramification(q) as i64);
            if v < Ratio::from_integer(0) {
                return Err(WeightError::NotIntegral(q));
            }
            circ.push(v);
        }
        Ok(RefinementData { alphas: alphas.into_iter().map(Some).collect(), circ_valuations: circ })
    }

    /// From the valuations of `alpha°` alone.
    pub fn from_circ_valuations(v: Vec<Ratio<i64>>) -> Result<Self, WeightError> {
        if let Some(q) = v.iter().position(|x| *x < Ratio::from_integer(0)) {
            return Err(WeightError::NotIntegral(q));
        }
        Ok(RefinementData { alphas: vec![None; v.len()], circ_valuations: v })
    }

    /// `alpha°` at a prime with `e = 1`, when the eigenvalue itself is known.
    pub fn alpha_circ(&self, lambda: &Weight, prime: usize) -> Option<PadicNumber> {
        let a = self.alphas.get(prime)?.as_ref()?;
        (lambda.ramification(prime) == 1).then(|| a.shift(lambda.normalizer_exponent(prime)))
    }
}
