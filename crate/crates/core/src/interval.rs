//! Closed intervals with rational endpoints, rounded outward to dyadic
//! numbers after every operation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{from_bigint, ipow, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigInterval {
    lo: Rational,
    hi: Rational,
    prec: u32,
}

/// `floor(log2 |x|)` up to an error of one, for `x ≠ 0`.
fn approx_log2(x: &Rational) -> i64 {
    x.numer().bits() as i64 - x.denom().bits() as i64
}

fn pow2(e: i64) -> Rational {
    let p = from_bigint(BigInt::one() << e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Largest dyadic with about `prec` significant bits that is `≤ x`.
pub fn round_down(x: &Rational, prec: u32) -> Rational {
    if x.is_zero() {
        return x.clone();
    }
    let scale = pow2(prec as i64 + 2 - approx_log2(x));
    if x.denom().is_one() && x.numer().bits() <= prec as u64 + 2 {
        return x.clone();
    }
    from_bigint((x * &scale).floor().to_integer()) / scale
}

pub fn round_up(x: &Rational, prec: u32) -> Rational {
    -round_down(&-x, prec)
}

impl BigInterval {
    pub fn new(lo: Rational, hi: Rational, prec: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        BigInterval { lo: round_down(&lo, prec), hi: round_up(&hi, prec), prec }
    }

    pub fn point(x: &Rational, prec: u32) -> Self {
        BigInterval::new(x.clone(), x.clone(), prec)
    }

    /// The point interval `x` with no rounding at all.
    pub fn exact(x: Rational, prec: u32) -> Self {
        BigInterval { lo: x.clone(), hi: x, prec }
    }

    pub fn zero(prec: u32) -> Self {
        BigInterval::exact(Rational::zero(), prec)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn subset_of(&self, other: &BigInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// `sup |x|` over the interval.
    pub fn mag(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    /// `inf |x|` over the interval.
    pub fn mig(&self) -> Rational {
        if self.contains_zero() {
            Rational::zero()
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> BigInterval {
        BigInterval { lo: self.mig(), hi: self.mag(), prec: self.prec }
    }

    pub fn add(&self, o: &BigInterval) -> BigInterval {
        BigInterval::new(&self.lo + &o.lo, &self.hi + &o.hi, self.prec.max(o.prec))
    }

    pub fn sub(&self, o: &BigInterval) -> BigInterval {
        BigInterval::new(&self.lo - &o.hi, &self.hi - &o.lo, self.prec.max(o.prec))
    }

    pub fn neg(&self) -> BigInterval {
        BigInterval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, o: &BigInterval) -> BigInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        BigInterval::new(lo, hi, self.prec.max(o.prec))
    }

    pub fn mul_rational(&self, r: &Rational) -> BigInterval {
        self.mul(&BigInterval::exact(r.clone(), self.prec))
    }

    pub fn recip(&self) -> Result<BigInterval> {
        if self.contains_zero() {
            return Err(Error::PrecisionUnreachable {
                requested: self.prec as i64,
                reason: "division by an interval containing zero".into(),
            });
        }
        Ok(BigInterval::new(self.hi.recip(), self.lo.recip(), self.prec))
    }

    pub fn div(&self, o: &BigInterval) -> Result<BigInterval> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn hull(&self, o: &BigInterval) -> BigInterval {
        BigInterval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    /// Widens by `r ≥ 0` on both sides.
    pub fn inflate(&self, r: &Rational) -> BigInterval {
        BigInterval::new(&self.lo - r, &self.hi + r, self.prec)
    }

    pub fn powi(&self, e: u32) -> BigInterval {
        let mut out = BigInterval::exact(Rational::one(), self.prec);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Natural logarithm of an interval of positive numbers.
    pub fn ln(&self) -> Result<BigInterval> {
        if !self.lo.is_positive() {
            return Err(Error::InvalidInput("logarithm of a non-positive interval".into()));
        }
        let lo = ln_rational(&self.lo, self.prec)?;
        let hi = if self.lo == self.hi { lo.clone() } else { ln_rational(&self.hi, self.prec)? };
        Ok(BigInterval { lo: lo.lo, hi: hi.hi, prec: self.prec })
    }

    /// Exponential, for arguments of moderate size.
    pub fn exp(&self) -> Result<BigInterval> {
        let lo = exp_rational(&self.lo, self.prec)?;
        let hi = exp_rational(&self.hi, self.prec)?;
        Ok(BigInterval { lo: lo.lo, hi: hi.hi, prec: self.prec })
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.mid())
    }

    /// `lower` rounded down and `upper` rounded up in decimal scientific form.
    pub fn to_decimal(&self, digits: usize) -> DecimalInterval {
        DecimalInterval { lower: sci_down(&self.lo, digits), upper: sci_up(&self.hi, digits) }
    }
}

impl fmt::Display for BigInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.to_decimal(20);
        write!(f, "[{}, {}]", d.lower, d.upper)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecimalInterval {
    pub lower: String,
    pub upper: String,
}

/// `2 atanh(u) = Σ 2 u^{2i+1}/(2i+1)` for `|u| ≤ 1/3`, summed in fixed point
/// with `W` fractional bits. Each truncation costs at most one unit, which
/// is accounted for together with the geometric tail.
fn two_atanh(u: &Rational, prec: u32) -> BigInterval {
    let w = prec as usize + 32;
    let (p, q) = (u.numer().clone(), u.denom().clone());
    let (p2, q2) = (&p * &p, &q * &q);
    let cutoff = BigInt::one() << (w - prec as usize - 8);
    let mut t = (&p << w) / &q;
    let mut sum = BigInt::zero();
    let mut n: usize = 0;
    while t.abs() >= cutoff {
        sum += (&t * 2) / BigInt::from(2 * n + 1);
        t = &t * &p2 / &q2;
        n += 1;
    }
    // accumulated term error ≤ 3n, tail ≤ 3(|t_n| + n + 1)
    let err = BigInt::from(3 * n) + (t.abs() + BigInt::from(n + 1)) * 3 + 1;
    let scale = pow2(w as i64);
    BigInterval::new(from_bigint(&sum - &err) / &scale, from_bigint(&sum + &err) / &scale, prec)
}

pub fn ln2(prec: u32) -> BigInterval {
    two_atanh(&Rational::new(BigInt::one(), BigInt::from(3)), prec)
}

/// Rigorous enclosure of `ln x` for a positive rational `x`.
pub fn ln_rational(x: &Rational, prec: u32) -> Result<BigInterval> {
    if !x.is_positive() {
        return Err(Error::InvalidInput("logarithm of a non-positive number".into()));
    }
    if x.is_one() {
        return Ok(BigInterval::zero(prec));
    }
    let mut k = approx_log2(x);
    let mut y = x / pow2(k);
    let lower = Rational::new(BigInt::from(2), BigInt::from(3));
    let upper = Rational::new(BigInt::from(4), BigInt::from(3));
    while y < lower {
        y *= Rational::from_integer(BigInt::from(2));
        k -= 1;
    }
    while y > upper {
        y /= Rational::from_integer(BigInt::from(2));
        k += 1;
    }
    let work = prec + 8 + (64 - k.unsigned_abs().leading_zeros());
    let u = (&y - Rational::one()) / (&y + Rational::one());
    let ly = two_atanh(&u, work);
    let out = ln2(work).mul_rational(&Rational::from_integer(BigInt::from(k))).add(&ly);
    Ok(BigInterval::new(out.lo, out.hi, prec))
}

/// Rigorous enclosure of `e^x`. Arguments beyond `|x| ≤ 2^20` are refused.
pub fn exp_rational(x: &Rational, prec: u32) -> Result<BigInterval> {
    if x.abs() > pow2(20) {
        return Err(Error::PrecisionUnreachable {
            requested: prec as i64,
            reason: "exponential argument too large; use the logarithm".into(),
        });
    }
    if x.is_zero() {
        return Ok(BigInterval::exact(Rational::one(), prec));
    }
    // e^x = (e^y)^{2^h} with |y| ≤ 2^{−8}
    let h = (approx_log2(x) + 9).max(0) as u32;
    let work = prec + 2 * h + 32;
    let w = work as usize + 16;
    let y = x / pow2(h as i64);
    let (p, q) = (y.numer().clone(), y.denom().clone());
    let one = BigInt::one() << w;
    let mut t = one.clone();
    let mut sum = one;
    let mut k: usize = 1;
    while !t.is_zero() {
        t = &t * &p / (&q * BigInt::from(k));
        sum += &t;
        k += 1;
    }
    // term errors ≤ k each, and the first vanishing term bounds the tail
    let err = BigInt::from(k * k + 2);
    let scale = pow2(w as i64);
    let mut out = BigInterval::new(from_bigint(&sum - &err) / &scale, from_bigint(&sum + &err) / &scale, work);
    for _ in 0..h {
        out = out.mul(&out);
    }
    Ok(BigInterval::new(out.lo, out.hi, prec))
}

/// `(mantissa, exponent)` with `x ≈ mantissa · 10^exponent`, the exact
/// `x / 10^exponent` lying in `[10^{digits−1}, 10^digits)` in absolute value
/// and the mantissa rounded in the given direction.
fn sci_parts(x: &Rational, digits: usize, up: bool) -> (BigInt, i64) {
    let lo = from_bigint(ipow(10, digits as u64 - 1));
    let hi = from_bigint(ipow(10, digits as u64));
    let mut e = (approx_log2(x) as f64 * std::f64::consts::LOG10_2).floor() as i64 - digits as i64 + 1;
    loop {
        let scaled = if e >= 0 {
            x / from_bigint(ipow(10, e as u64))
        } else {
            x * from_bigint(ipow(10, e.unsigned_abs()))
        };
        let a = scaled.abs();
        if a >= hi {
            e += 1;
        } else if a < lo {
            e -= 1;
        } else {
            let m = if up { scaled.ceil() } else { scaled.floor() };
            return (m.to_integer(), e);
        }
    }
}

fn format_sci(m: BigInt, e: i64, digits: usize) -> String {
    let neg = m.is_negative();
    let s = m.abs().to_string();
    // a rounding carry may add one digit
    let (s, e) = if s.len() > digits { (s[..digits].to_string(), e + 1) } else { (s, e) };
    let exp = e + s.len() as i64 - 1;
    let body = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, exp)
}

fn sci_round(x: &Rational, digits: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let digits = digits.max(2);
    let (m, e) = sci_parts(x, digits, up);
    format_sci(m, e, digits)
}

/// Scientific notation, rounded toward `−∞`.
pub fn sci_down(x: &Rational, digits: usize) -> String {
    sci_round(x, digits, false)
}

/// Scientific notation, rounded toward `+∞`.
pub fn sci_up(x: &Rational, digits: usize) -> String {
    sci_round(x, digits, true)
}

/// `⌊log10 |x|⌋` for a nonzero rational.
pub fn floor_log10(x: &Rational) -> i64 {
    let (_, e) = sci_parts(&x.abs(), 2, false);
    e + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn ln_known_values() {
        let l2 = ln2(200);
        assert!((l2.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(l2.width() < pow2(-190));
        let l10 = ln_rational(&int(10), 128).unwrap();
        assert!((l10.to_f64() - 10f64.ln()).abs() < 1e-14);
        assert_eq!(ln_rational(&int(1), 64).unwrap(), BigInterval::zero(64));
        assert!(ln_rational(&int(0), 64).is_err());
    }

    #[test]
    fn exp_of_ln_contains_argument() {
        for x in [rat(1, 3), int(7), rat(12345, 7)] {
            let l = ln_rational(&x, 160).unwrap();
            let e = l.exp().unwrap();
            assert!(e.contains(&x), "{x}: {e}");
        }
        assert!(exp_rational(&Rational::from_integer(BigInt::one() << 30), 64).is_err());
    }

    #[test]
    fn decimal_rounding_is_directed() {
        let x = BigInterval::exact(rat(1, 3), 64);
        let d = x.to_decimal(5);
        assert_eq!(d.lower, "3.3333e-1");
        assert_eq!(d.upper, "3.3334e-1");
        assert_eq!(sci_down(&rat(-1, 3), 3), "-3.34e-1");
        assert_eq!(sci_up(&int(999_999), 3), "1.00e6");
        assert_eq!(sci_down(&int(0), 3), "0");
        assert_eq!(floor_log10(&rat(1, 1000)), -3);
        assert_eq!(floor_log10(&int(99)), 1);
    }

    #[test]
    fn division_by_zero_interval() {
        let z = BigInterval::new(int(-1), int(1), 64);
        assert!(z.recip().is_err());
    }

    proptest! {
        #[test]
        fn operations_enclose_exact_results(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = rat(a, b);
            let y = rat(c, d);
            let xi = BigInterval::point(&x, 24);
            let yi = BigInterval::point(&y, 24);
            prop_assert!(xi.add(&yi).contains(&(&x + &y)));
            prop_assert!(xi.sub(&yi).contains(&(&x - &y)));
            prop_assert!(xi.mul(&yi).contains(&(&x * &y)));
            if !y.is_zero() {
                prop_assert!(xi.div(&yi).unwrap().contains(&(&x / &y)));
            }
        }

        #[test]
        fn refinement_is_monotone(a in 1i64..100_000, b in 1i64..1000) {
            let x = rat(a, b);
            let coarse = ln_rational(&x, 40).unwrap();
            let fine = ln_rational(&x, 120).unwrap();
            prop_assert!(fine.width() <= coarse.width());
            prop_assert!(fine.lo() <= coarse.hi() && coarse.lo() <= fine.hi());
            prop_assert!((fine.to_f64() - (a as f64 / b as f64).ln()).abs() < 1e-12);
        }
    }
}
