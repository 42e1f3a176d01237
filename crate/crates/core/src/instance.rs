//! Operator data `(a, b)` with its roots and exponents.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hypotheses::{check_hypotheses, HypothesisReport};
use crate::operator::DiffOp1;
use crate::poly::Poly;
use crate::rational::{format_rational, int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisFlags {
    pub first: bool,
    pub second: bool,
    pub third: bool,
    pub key_assump2: bool,
    pub important_assump: bool,
}

impl HypothesisFlags {
    pub fn all(&self) -> bool {
        self.first && self.second && self.third && self.key_assump2 && self.important_assump
    }
}

/// `a` monic of degree `m ≥ 2` with distinct rational roots `alpha`,
/// `deg b ≤ m − 1`, `s_i = b(α_i)/a′(α_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub m: usize,
    pub a: Poly,
    pub b: Poly,
    pub alpha: Vec<Rational>,
    pub s: Vec<Rational>,
    pub b_top: Rational,
    pub w: usize,
    pub flags: HypothesisFlags,
}

/// Canonical serialized form, also the input of [`Instance::hash`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceEcho {
    #[serde(with = "crate::rational::serde_vec")]
    pub alpha: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec")]
    pub s: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec")]
    pub a_coeffs: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec")]
    pub b_coeffs: Vec<Rational>,
}

/// `b(z) = Σ s_i ∏_{k≠i} (z − α_k)`, i.e. `a(z)·Σ s_i/(z − α_i)`.
pub fn b_from_exponents(alpha: &[Rational], s: &[Rational]) -> Poly {
    let mut b = Poly::zero();
    for (i, si) in s.iter().enumerate() {
        let others: Vec<Rational> = alpha.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, x)| x.clone()).collect();
        b = &b + &Poly::from_roots(&others).scale(si);
    }
    b
}

impl Instance {
    pub fn from_roots(alpha: Vec<Rational>, s: Vec<Rational>) -> Result<Self> {
        if alpha.len() != s.len() {
            return Err(Error::InvalidInput(format!("{} roots but {} exponents", alpha.len(), s.len())));
        }
        for (i, x) in alpha.iter().enumerate() {
            if alpha[..i].contains(x) {
                return Err(Error::HypothesisViolation(format!("(first): repeated root {}", format_rational(x))));
            }
        }
        let a = Poly::from_roots(&alpha);
        let b = b_from_exponents(&alpha, &s);
        Instance::validate_shape(&a, &b)?;
        Ok(Instance::assemble(a, b, alpha))
    }

    fn validate_shape(a: &Poly, b: &Poly) -> Result<usize> {
        let m = a.degree().unwrap_or(0);
        if m < 2 {
            return Err(Error::InvalidInput(format!("deg a = {m}, need at least 2")));
        }
        if !a.leading_coeff().unwrap().is_one() {
            return Err(Error::InvalidInput("a must be monic".into()));
        }
        if b.degree().is_some_and(|d| d >= m) {
            return Err(Error::InvalidInput(format!("deg b must be at most {}", m - 1)));
        }
        Ok(m)
    }

    fn assemble(a: Poly, b: Poly, alpha: Vec<Rational>) -> Self {
        let m = alpha.len();
        let da = a.derivative();
        let s: Vec<Rational> = alpha.iter().map(|x| b.eval(x) / da.eval(x)).collect();
        let b_top = b.coeff(m - 1);
        let flags = check_hypotheses(&a, &b, 0).flags();
        Instance { m, a, b, alpha, s, b_top, w: m - 2, flags }
    }

    pub fn from_polys(a: Poly, b: Poly) -> Result<Self> {
        let m = Instance::validate_shape(&a, &b)?;
        let roots = a.rational_roots();
        let found: usize = roots.iter().map(|(_, k)| k).sum();
        if found < m {
            return Err(Error::InvalidInput("a does not split over the rationals".into()));
        }
        if let Some((r, _)) = roots.iter().find(|(_, k)| *k > 1) {
            return Err(Error::HypothesisViolation(format!("(first): repeated root {}", format_rational(r))));
        }
        let alpha: Vec<Rational> = roots.into_iter().map(|(r, _)| r).collect();
        Ok(Instance::assemble(a, b, alpha))
    }

    /// `m = 2`, `α = (0, 1)`, `s = (1/2, 1/2)`.
    pub fn i1() -> Self {
        Instance::from_roots(vec![int(0), int(1)], vec![rat(1, 2), rat(1, 2)]).unwrap()
    }

    /// `m = 3`, `α = (0, 1, −1)`, `s = (1/3, 1/4, 1/5)`.
    pub fn i2() -> Self {
        Instance::from_roots(vec![int(0), int(1), int(-1)], vec![rat(1, 3), rat(1, 4), rat(1, 5)]).unwrap()
    }

    pub fn operator(&self) -> DiffOp1 {
        DiffOp1::new(self.a.clone(), self.b.clone())
    }

    pub fn hypotheses(&self, n_max: u64) -> HypothesisReport {
        check_hypotheses(&self.a, &self.b, n_max)
    }

    pub fn echo(&self) -> InstanceEcho {
        InstanceEcho {
            alpha: self.alpha.clone(),
            s: self.s.clone(),
            a_coeffs: self.a.coeffs().to_vec(),
            b_coeffs: (0..self.m).map(|k| self.b.coeff(k)).collect(),
        }
    }

    /// SHA-256 of the canonical echo.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.echo()).expect("echo serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn max_abs_root(&self) -> Rational {
        self.alpha.iter().map(|x| if x < &Rational::zero() { -x.clone() } else { x.clone() }).max().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i1_data() {
        let i = Instance::i1();
        assert_eq!(i.a, Poly::from_ints(&[0, -1, 1]));
        assert_eq!(i.b, Poly::new(vec![rat(-1, 2), int(1)]));
        assert_eq!(i.b_top, int(1));
        assert_eq!(i.w, 0);
        assert!(i.flags.all());
    }

    #[test]
    fn exponent_sum_is_top_coefficient() {
        for i in [Instance::i1(), Instance::i2()] {
            let sum: Rational = i.s.iter().sum();
            assert_eq!(sum, i.b_top);
            assert_eq!(Poly::from_roots(&i.alpha), i.a);
        }
        assert_eq!(Instance::i2().b_top, rat(47, 60));
    }

    #[test]
    fn polys_round_trip_to_roots() {
        let i = Instance::i2();
        let j = Instance::from_polys(i.a.clone(), i.b.clone()).unwrap();
        assert_eq!(j.alpha, vec![int(-1), int(0), int(1)]);
        assert_eq!(j.s, vec![rat(1, 5), rat(1, 3), rat(1, 4)]);
        assert_eq!((&i.a, &i.b, &i.flags), (&j.a, &j.b, &j.flags));
        let k = Instance::from_roots(j.alpha.clone(), j.s.clone()).unwrap();
        assert_eq!(j.hash(), k.hash());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Instance::from_polys(Poly::from_ints(&[0, 0, 1]), Poly::z()).is_err());
        assert!(Instance::from_polys(Poly::from_ints(&[1, 0, 1]), Poly::z()).is_err());
        assert!(Instance::from_polys(Poly::from_ints(&[0, -1, 2]), Poly::z()).is_err());
        assert!(Instance::from_polys(Poly::from_ints(&[0, 1]), Poly::one()).is_err());
        assert!(Instance::from_roots(vec![int(0), int(0)], vec![int(1), int(1)]).is_err());
    }
}
