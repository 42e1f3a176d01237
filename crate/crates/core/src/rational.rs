//! Exact rationals and the small amount of integer number theory the rest of
//! the crate leans on.
//!
//! `Rational` is `num_rational::BigRational`, which already keeps values in
//! lowest terms with a positive denominator. Everything here is about parsing,
//! canonical string forms, valuations and factorization.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. A zero denominator is an error.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let err = |reason: &str| Error::ParseRational { input: s.to_string(), reason: reason.to_string() };
    if t.is_empty() {
        return Err(err("empty string"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err("numerator is not an integer"))?;
    let den = BigInt::from_str(den).map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical `"p/q"` or `"p"` form; inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// serde adapter storing a rational as its canonical string.
pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Rational>`.
pub mod serde_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut cur = x.clone();
    for _ in 0..k {
        acc *= &cur;
        cur += Rational::one();
    }
    acc
}

/// `p`-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational; `None` for zero.
pub fn valuation(r: &Rational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    Some(int_valuation(r.numer(), p) as i64 - int_valuation(r.denom(), p) as i64)
}

/// Prime factorization by trial division. Fine for the denominators that
/// show up at desk scale; panics on zero.
pub fn factorize(n: &BigUint) -> Vec<(u64, u32)> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d: u64 = 2;
    loop {
        if n.is_one() {
            break;
        }
        let dd = BigUint::from(d);
        if &dd * &dd > n {
            let last = n.to_u64().expect("cofactor beyond u64 after trial division");
            out.push((last, 1));
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    if n.is_zero() {
        return Vec::new();
    }
    factorize(n.magnitude()).into_iter().map(|(p, _)| p).collect()
}

pub fn euler_phi(n: u64) -> u64 {
    assert!(n > 0);
    factorize(&BigUint::from(n))
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// True when `r` is an integer `<= bound`.
pub fn is_integer_at_most(r: &Rational, bound: i64) -> bool {
    is_integer(r) && r.numer() <= &BigInt::from(bound)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn is_negative(r: &Rational) -> bool {
    r.numer().sign() == Sign::Minus
}

/// Natural log of a positive rational, as an `f64` estimate. Works for
/// numbers far outside the `f64` range.
pub fn ln_f64(r: &Rational) -> f64 {
    assert!(r.numer().sign() == Sign::Plus, "ln_f64 of non-positive value");
    ln_uint_f64(r.numer().magnitude()) - ln_uint_f64(r.denom().magnitude())
}

fn ln_uint_f64(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigUint = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(x) = num_traits::ToPrimitive::to_f64(r).filter(|x| x.is_finite() && *x != 0.0) {
        return x;
    }
    let sign = if is_negative(r) { -1.0 } else { 1.0 };
    sign * ln_f64(&r.abs()).exp()
}

pub fn pow(r: &Rational, e: u64) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

pub fn ipow(base: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

/// Least common multiple of reduced denominators.
pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Integers `x_i` and `D` with `v_i = x_i / D`.
pub fn over_common_denominator(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let d = lcm_denominators(v);
    (v.iter().map(|x| x.numer() * (&d / x.denom())).collect(), d)
}

/// `floor(log_p(x))` for a positive integer `x`.
pub fn floor_log(x: &BigInt, p: u64) -> u64 {
    assert!(x.is_positive());
    let p = BigInt::from(p);
    let mut acc = p.clone();
    let mut e = 0;
    while &acc <= x {
        acc *= &p;
        e += 1;
    }
    e
}
