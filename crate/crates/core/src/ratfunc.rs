//! Rational functions over ℚ, kept reduced with a monic denominator.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("rational function with zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: Poly::one() });
        }
        let g = Poly::gcd(&num, &den)?;
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        let lc = den.leading_coeff().unwrap().clone();
        Ok(RatFunc { num: num.scale(&lc.recip()), den: den.monic() })
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_poly(&self) -> bool {
        self.den.degree() == Some(0)
    }

    pub fn into_poly(self) -> Result<Poly> {
        if self.is_poly() {
            Ok(self.num)
        } else {
            Err(Error::NonCancellation(format!("denominator {} survives", self.den)))
        }
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).expect("nonzero denominator")
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RatFunc::new(n, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}
