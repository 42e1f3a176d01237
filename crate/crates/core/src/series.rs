//! Truncated Laurent series in 1/z.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{over_common_denominator, Rational};

/// `Σ_{k<T} f_k z^{-k-1}`; the stored length is the truncation length `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentSeries {
    #[serde(with = "crate::rational::serde_vec")]
    coeffs: Vec<Rational>,
}

/// `ord_∞`, honest about truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Exact(usize),
    /// All stored coefficients vanish, so only a lower bound is known.
    AtLeast(usize),
}

impl Order {
    /// Whether the order is provably at least `k`.
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Order::Exact(o) | Order::AtLeast(o) => o >= k,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact(k) => write!(f, "{k}"),
            Order::AtLeast(k) => write!(f, ">= {k}"),
        }
    }
}

impl LaurentSeries {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "truncation length must be positive");
        LaurentSeries { coeffs }
    }

    pub fn zero(t: usize) -> Self {
        LaurentSeries::new(vec![Rational::zero(); t])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn truncate(&self, t: usize) -> LaurentSeries {
        LaurentSeries::new(self.coeffs[..t.min(self.coeffs.len())].to_vec())
    }

    pub fn ord_inf(&self) -> Order {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => Order::Exact(k + 1),
            None => Order::AtLeast(self.coeffs.len() + 1),
        }
    }

    /// Product of two series; valid to `min(T_f, T_g) + 1` coefficients
    /// because the product starts at `z^{-2}`.
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let t = self.truncation().min(other.truncation()) + 1;
        let mut out = vec![Rational::zero(); t];
        for (n, slot) in out.iter_mut().enumerate().skip(1) {
            for k in 0..n {
                let l = n - 1 - k;
                if k < self.coeffs.len() && l < other.coeffs.len() {
                    *slot += &self.coeffs[k] * &other.coeffs[l];
                }
            }
        }
        LaurentSeries::new(out)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        let t = self.truncation().min(other.truncation());
        LaurentSeries::new((0..t).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect())
    }

    /// `P·f` split into its polynomial part and its `1/z` tail. The tail is
    /// valid for `T − deg P` coefficients; fails when that is not positive.
    pub fn mul_poly(&self, p: &Poly) -> Result<(Poly, LaurentSeries)> {
        let t = self.truncation();
        let Some(d) = p.degree() else {
            return Ok((Poly::zero(), LaurentSeries::zero(t)));
        };
        if d >= t {
            return Err(Error::Truncation { needed: d + 1, available: t });
        }
        let (pc, pd) = over_common_denominator(p.coeffs());
        let (fc, fd) = over_common_denominator(&self.coeffs);
        let den = pd * fd;
        let poly: Vec<Rational> = (0..d)
            .map(|e| {
                let acc = pc.iter().enumerate().skip(e + 1).fold(BigInt::zero(), |acc, (i, c)| acc + c * &fc[i - e - 1]);
                Rational::new(acc, den.clone())
            })
            .collect();
        let tail: Vec<Rational> = (0..t - d)
            .map(|n| {
                let acc = pc
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .fold(BigInt::zero(), |acc, (i, c)| acc + c * &fc[n + i]);
                Rational::new(acc, den.clone())
            })
            .collect();
        Ok((Poly::new(poly), LaurentSeries::new(tail)))
    }
}
