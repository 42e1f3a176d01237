//! Places, heights, denominators and the measure constants `V`, `𝔸`, `U`,
//! `μ(β, ε)`, `C(β, ε)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::interval::{ln_rational, BigInterval, DecimalInterval};
use crate::rational::{
    abs, euler_phi, format_rational, from_bigint, int_valuation, ipow, is_integer_at_most, lcm_denominators,
    prime_divisors, valuation, Rational,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinity,
    Prime(u64),
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(Error::InvalidInput(format!("{p} is not a prime")))
        }
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Infinity)
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Place::Infinity),
            t => {
                let p: u64 = t.parse().map_err(|_| Error::InvalidInput(format!("place must be \"inf\" or a prime, got {s:?}")))?;
                Place::prime(p)
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `|x|_v` with `|p|_p = 1/p`.
pub fn abs_v(x: &Rational, v: Place) -> Rational {
    match v {
        Place::Infinity => abs(x),
        Place::Prime(p) => match valuation(x, p) {
            None => Rational::zero(),
            Some(e) => {
                let pe = from_bigint(ipow(p, e.unsigned_abs()));
                if e >= 0 {
                    pe.recip()
                } else {
                    pe
                }
            }
        },
    }
}

/// A finite sum `c + Σ k_i log(x_i)` with rational `c`, `k_i` and positive
/// rational `x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogValue {
    constant: Rational,
    terms: BTreeMap<Rational, Rational>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue::default()
    }

    pub fn constant(c: Rational) -> Self {
        LogValue { constant: c, terms: BTreeMap::new() }
    }

    /// `log x`, for `x > 0`.
    pub fn log(x: &Rational) -> Self {
        assert!(x.is_positive(), "log of non-positive rational");
        let mut terms = BTreeMap::new();
        if !x.is_one() {
            terms.insert(x.clone(), Rational::one());
        }
        LogValue { constant: Rational::zero(), terms }
    }

    pub fn log_int(n: u64) -> Self {
        LogValue::log(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.terms.iter()
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn add(&self, o: &LogValue) -> LogValue {
        let mut out = self.clone();
        out.constant += &o.constant;
        for (x, k) in &o.terms {
            let e = out.terms.entry(x.clone()).or_insert_with(Rational::zero);
            *e += k;
        }
        out.terms.retain(|_, k| !k.is_zero());
        out
    }

    pub fn scale(&self, c: &Rational) -> LogValue {
        let mut out = LogValue {
            constant: &self.constant * c,
            terms: self.terms.iter().map(|(x, k)| (x.clone(), k * c)).collect(),
        };
        out.terms.retain(|_, k| !k.is_zero());
        out
    }

    pub fn sub(&self, o: &LogValue) -> LogValue {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn enclose(&self, prec: u32) -> BigInterval {
        let mut acc = BigInterval::exact(self.constant.clone(), prec);
        for (x, k) in &self.terms {
            let l = ln_rational(x, prec + 8).expect("positive argument");
            acc = acc.add(&l.mul_rational(k));
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.constant)
            + self.terms.iter().map(|(x, k)| crate::rational::to_f64(k) * crate::rational::ln_f64(x)).sum::<f64>()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (x, k) in &self.terms {
            let neg = k.is_negative();
            let k = abs(k);
            let coeff = if k.is_one() { String::new() } else { format!("{}*", format_rational(&k)) };
            parts.push((neg, format!("{coeff}log({})", format_rational(x))));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push((self.constant.is_negative(), format_rational(&abs(&self.constant))));
        }
        for (i, (neg, s)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{s}")?,
                (0, false) => write!(f, "{s}")?,
                (_, true) => write!(f, " - {s}")?,
                (_, false) => write!(f, " + {s}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `log |x|_v`, for `x ≠ 0`.
pub fn log_abs_v(x: &Rational, v: Place) -> LogValue {
    LogValue::log(&abs_v(x, v))
}

/// Least positive integer clearing every denominator.
pub fn den<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    lcm_denominators(xs)
}

/// `h_v(x) = log max(1, |x_1|_v, …)`.
pub fn height_v(xs: &[Rational], v: Place) -> LogValue {
    let m = xs.iter().map(|x| abs_v(x, v)).fold(Rational::one(), |a, b| a.max(b));
    LogValue::log(&m)
}

/// Global height `Σ_v h_v(x)`; over `ℚ` this is `log(max(1, |x_i|) · den(x))`.
pub fn height(xs: &[Rational]) -> LogValue {
    let m = xs.iter().map(abs).fold(Rational::one(), |a, b| a.max(b));
    LogValue::log(&(m * from_bigint(den(xs))))
}

/// `μ(s) = den(s) ∏_{q | den(s)} q^{1/(q−1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuAlpha {
    pub den: BigInt,
    /// `(q, 1/(q−1))` for each prime `q | den(s)`.
    pub exponents: Vec<(u64, Rational)>,
}

impl MuAlpha {
    pub fn log(&self) -> LogValue {
        let mut out = LogValue::log(&from_bigint(self.den.clone()));
        for (q, e) in &self.exponents {
            out = out.add(&LogValue::log_int(*q).scale(e));
        }
        out
    }
}

pub fn mu_alpha(s: &Rational) -> MuAlpha {
    let d = s.denom().clone();
    let exponents = prime_divisors(&d)
        .into_iter()
        .map(|q| (q, Rational::new(BigInt::one(), BigInt::from(q - 1))))
        .collect();
    MuAlpha { den: d, exponents }
}

/// `μ_n(s) = den(s)^n ∏_{q | den(s)} q^{⌊n/(q−1)⌋}`.
pub fn mu_n(s: &Rational, n: u64) -> BigInt {
    let d = s.denom().clone();
    let mut out = num_traits::pow(d.clone(), n as usize);
    for q in prime_divisors(&d) {
        out *= ipow(q, n / (q - 1));
    }
    out
}

/// `d_n(b) = den(1/(b+1), …, 1/(b+n+1))`.
pub fn d_n(b: &Rational, n: u64) -> Result<BigInt> {
    if is_integer_at_most(b, -1) && (-b).to_integer() <= BigInt::from(n + 1) {
        return Err(Error::InvalidInput(format!("b + k + 1 vanishes for b = {}", format_rational(b))));
    }
    let mut acc = BigInt::one();
    for k in 0..=n {
        let x = b + Rational::from_integer(BigInt::from(k + 1));
        acc = acc.lcm(x.numer()).abs();
    }
    Ok(acc)
}

/// `(den/φ(den)) Σ_{j ≤ den, (j, den) = 1} 1/j`, the growth rate of `log d_n(b)/n`.
pub fn harmonic_density(b: &Rational) -> Result<Rational> {
    let d: u64 = b
        .denom()
        .try_into()
        .map_err(|_| Error::InvalidInput("denominator too large for the density sum".into()))?;
    let mut sum = Rational::zero();
    for j in 1..=d {
        if j.gcd(&d) == 1 {
            sum += Rational::new(BigInt::one(), BigInt::from(j));
        }
    }
    Ok(sum * Rational::new(BigInt::from(d), BigInt::from(euler_phi(d))))
}

/// `log μ_v(s)`: zero at `∞` and where `|s|_v ≤ 1`, otherwise
/// `log(|den(s)|_p |p|_p^{1/(p−1)})`.
pub fn log_mu_v(s: &Rational, v: Place) -> LogValue {
    match v {
        Place::Infinity => LogValue::zero(),
        Place::Prime(p) => {
            if abs_v(s, v) <= Rational::one() {
                return LogValue::zero();
            }
            let e = Rational::from_integer(BigInt::from(int_valuation(s.denom(), p)))
                + Rational::new(BigInt::one(), BigInt::from(p - 1));
            LogValue::log_int(p).scale(&-e)
        }
    }
}

fn sum_heights_v(inst: &Instance, v: Place) -> LogValue {
    inst.alpha.iter().fold(LogValue::zero(), |acc, a| acc.add(&height_v(std::slice::from_ref(a), v)))
}

fn sum_log_mu_v(inst: &Instance, v: Place) -> LogValue {
    inst.s.iter().fold(LogValue::zero(), |acc, s| acc.add(&log_mu_v(s, v)))
}

fn q(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `V_v(β)`.
pub fn v_quantity(inst: &Instance, beta: &Rational, v: Place) -> Result<LogValue> {
    let m = q(inst.m);
    let m1 = q(inst.m - 1);
    let b1 = std::slice::from_ref(beta);
    let sum_h = inst.alpha.iter().fold(LogValue::zero(), |acc, a| acc.add(&height(std::slice::from_ref(a))));
    let sum_mu = inst.s.iter().fold(LogValue::zero(), |acc, s| acc.add(&mu_alpha(s).log()));
    let inner = height(&inst.alpha).add(&sum_mu).add(&LogValue::log_int(4));
    Ok(height_v(b1, v)
        .scale(&m)
        .sub(&height(b1).scale(&m1))
        .sub(&sum_h)
        .sub(&inner.scale(&m))
        .sub(&LogValue::constant(harmonic_density(&inst.b_top)? * m1)))
}

/// `𝔸_v(β)`.
pub fn a_quantity(inst: &Instance, beta: &Rational, v: Place) -> LogValue {
    let m = q(inst.m);
    let base = log_abs_v(beta, v).sub(&sum_heights_v(inst, v)).sub(&height_v(&inst.alpha, v).scale(&m));
    match v {
        Place::Infinity => base.sub(&LogValue::log_int(2).scale(&m)),
        Place::Prime(_) => base.add(&sum_log_mu_v(inst, v).scale(&m)),
    }
}

/// `U_v(β)`, with every local height taken at `v`.
pub fn u_quantity(inst: &Instance, beta: &Rational, v: Place) -> LogValue {
    let m = q(inst.m);
    let m1 = q(inst.m - 1);
    sum_heights_v(inst, v)
        .add(&height_v(&inst.alpha, v).add(&height_v(std::slice::from_ref(beta), v)).scale(&m1))
        .add(&sum_log_mu_v(inst, v).scale(&m))
}

/// `F_v(n)` with the `o(n)` term dropped.
pub fn f_v(inst: &Instance, beta: &Rational, v: Place, n: u64) -> Result<LogValue> {
    let m = q(inst.m);
    let m1 = q(inst.m - 1);
    let linear = sum_heights_v(inst, v)
        .add(&height_v(&inst.alpha, v).add(&height_v(std::slice::from_ref(beta), v)).scale(&m1));
    let nn = Rational::from_integer(BigInt::from(n));
    match v {
        Place::Infinity => Ok(linear.add(&LogValue::log_int(4).scale(&m)).scale(&nn)),
        Place::Prime(p) => {
            let mut out = linear.scale(&nn);
            for s in &inst.s {
                let e = int_valuation(&mu_n(s, n), p);
                out = out.add(&LogValue::log_int(p).scale(&(&m * Rational::from_integer(BigInt::from(e)))));
            }
            let d = d_n(&inst.b_top, (inst.m as u64 - 1) * (n + 1))?;
            let e = int_valuation(&d, p);
            Ok(out.sub(&LogValue::log_int(p).scale(&Rational::from_integer(BigInt::from(e)))))
        }
    }
}

/// Right-hand side of the convergence condition at `v`: `max|α_i|` at `∞`,
/// `∏ μ_v(s_i)^{−1} H_v(α)` at a prime.
pub fn convergence_radius(inst: &Instance, v: Place) -> LogValue {
    match v {
        Place::Infinity => LogValue::log(&inst.max_abs_root()),
        Place::Prime(_) => sum_log_mu_v(inst, v).scale(&-Rational::one()).add(&height_v(&inst.alpha, v)),
    }
}

/// Whether `|β|_v` strictly exceeds the convergence radius at `v`.
pub fn convergence_holds(inst: &Instance, beta: &Rational, v: Place) -> bool {
    if beta.is_zero() {
        return false;
    }
    match v {
        Place::Infinity => abs(beta) > inst.max_abs_root(),
        Place::Prime(p) => {
            // log|β|_p − log radius = (−v_p(β) − Σ e_i) log p − h_p(α)
            let rhs = convergence_radius(inst, v);
            let lhs = log_abs_v(beta, v);
            let diff = lhs.sub(&rhs);
            // every term is a rational multiple of log p
            let mut c = diff.constant_part().clone();
            for (x, k) in diff.terms() {
                let e = valuation(x, p).expect("power of p");
                c += k * Rational::from_integer(BigInt::from(e));
            }
            c.is_positive()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Quantity {
    pub expr: LogValue,
    #[serde(flatten)]
    pub bounds: DecimalInterval,
    #[serde(skip)]
    pub interval: BigInterval,
}

impl Quantity {
    pub fn new(expr: LogValue, prec: u32) -> Self {
        let interval = expr.enclose(prec);
        Quantity { bounds: interval.to_decimal(20), expr, interval }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceCheck {
    pub condition: String,
    pub holds: bool,
    /// Set when `V > 0` while the convergence condition fails.
    pub conflict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub instance_hash: String,
    #[serde(with = "crate::rational::serde_str")]
    pub beta: Rational,
    pub v0: Place,
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub precision_bits: u32,
    #[serde(rename = "V")]
    pub v: Quantity,
    #[serde(rename = "A")]
    pub a: Quantity,
    #[serde(rename = "U")]
    pub u: Quantity,
    pub v_positive: bool,
    pub applicable: bool,
    pub note: Option<String>,
    pub mu_measure: Option<DecimalInterval>,
    pub log_c: Option<DecimalInterval>,
    /// `C(β, ε)` itself when the exponential is within reach.
    pub c: Option<DecimalInterval>,
    pub convergence: ConvergenceCheck,
    #[serde(skip)]
    pub mu_interval: Option<BigInterval>,
    #[serde(skip)]
    pub log_c_interval: Option<BigInterval>,
}

/// Enclosures of `V`, `𝔸`, `U`, `μ(β, ε)` and `C(β, ε)` at `v0`.
pub fn measure(inst: &Instance, beta: &Rational, v0: Place, epsilon: &Rational, prec: u32) -> Result<MeasureReport> {
    if beta.is_zero() {
        return Err(Error::InvalidInput("beta must be nonzero".into()));
    }
    let v = Quantity::new(v_quantity(inst, beta, v0)?, prec);
    let a = Quantity::new(a_quantity(inst, beta, v0), prec);
    let u = Quantity::new(u_quantity(inst, beta, v0), prec);
    let v_positive = v.interval.is_positive();
    let gap = v.interval.sub(&BigInterval::exact(epsilon.clone(), prec));
    let holds = convergence_holds(inst, beta, v0);
    let condition = match v0 {
        Place::Infinity => format!("|beta| > max|alpha_i| = {}", format_rational(&inst.max_abs_root())),
        Place::Prime(p) => format!("|beta|_{p} > prod mu_{p}(s_i)^-1 H_{p}(alpha) = exp({})", convergence_radius(inst, v0)),
    };
    let convergence = ConvergenceCheck { condition, holds, conflict: v_positive && !holds };
    let mut report = MeasureReport {
        instance_hash: inst.hash(),
        beta: beta.clone(),
        v0,
        epsilon: epsilon.clone(),
        precision_bits: prec,
        v,
        a,
        u,
        v_positive,
        applicable: false,
        note: None,
        mu_measure: None,
        log_c: None,
        c: None,
        convergence,
        mu_interval: None,
        log_c_interval: None,
    };
    if !epsilon.is_positive() || !gap.is_positive() {
        report.note = Some(if !epsilon.is_positive() {
            "epsilon must be positive".into()
        } else if v_positive {
            "epsilon >= V".into()
        } else {
            "V is not positive".into()
        });
        return Ok(report);
    }
    let au = report.a.interval.add(&report.u.interval);
    let mu = au.div(&gap)?;
    let ln2 = crate::interval::ln2(prec);
    let log_c = ln2.div(&gap)?.add(&BigInterval::exact(Rational::one(), prec)).mul(&au).neg();
    report.c = if log_c.lo().abs() < Rational::from_integer(BigInt::from(100_000)) {
        log_c.exp().ok().map(|c| c.to_decimal(20))
    } else {
        None
    };
    report.applicable = true;
    report.mu_measure = Some(mu.to_decimal(20));
    report.log_c = Some(log_c.to_decimal(20));
    report.mu_interval = Some(mu);
    report.log_c_interval = Some(log_c);
    Ok(report)
}

/// Smallest positive integer `β` with `V_∞(β) > 0`, searched by doubling and
/// bisection on exact enclosures.
pub fn archimedean_threshold(inst: &Instance, prec: u32) -> Result<BigInt> {
    let positive = |b: &BigInt| -> Result<bool> {
        Ok(v_quantity(inst, &from_bigint(b.clone()), Place::Infinity)?.enclose(prec).is_positive())
    };
    let mut hi = BigInt::from(2);
    while !positive(&hi)? {
        hi *= 2;
        if hi.bits() > 4096 {
            return Err(Error::NotApplicable("V stays non-positive".into()));
        }
    }
    let mut lo = &hi / 2;
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if positive(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pochhammer, rat};
    use proptest::prelude::*;

    fn close(a: &LogValue, b: f64) -> bool {
        let e = a.enclose(128);
        (e.to_f64() - b).abs() < 1e-12
    }

    #[test]
    fn den_examples() {
        assert_eq!(den(&[rat(1, 2), rat(1, 3)]), BigInt::from(6));
        assert_eq!(den(&[int(2)]), BigInt::from(1));
        assert_eq!(den(&[rat(1, 2), rat(3, 4)]), BigInt::from(4));
    }

    #[test]
    fn height_examples() {
        assert!(close(&height(&[rat(1, 2)]), 2f64.ln()));
        assert!(close(&height(&[rat(3, 2)]), 3f64.ln()));
        let sum = height_v(&[rat(3, 2)], Place::Infinity).add(&height_v(&[rat(3, 2)], Place::Prime(2)));
        assert!(close(&sum, 3f64.ln()));
        for v in [Place::Infinity, Place::Prime(2), Place::Prime(7)] {
            assert_eq!(height_v(&[int(0), int(0)], v), LogValue::zero());
        }
    }

    #[test]
    fn mu_examples() {
        assert!(close(&mu_alpha(&rat(1, 2)).log(), 4f64.ln()));
        assert_eq!(mu_alpha(&int(3)).log(), LogValue::zero());
        assert!(close(&mu_alpha(&rat(1, 6)).log(), (12.0 * 3f64.sqrt()).ln()));
        assert_eq!(mu_n(&rat(1, 2), 2), BigInt::from(16));
    }

    #[test]
    fn d_n_examples() {
        assert_eq!(d_n(&int(0), 2).unwrap(), BigInt::from(6));
        assert_eq!(d_n(&rat(1, 2), 0).unwrap(), BigInt::from(3));
        assert!(d_n(&int(-2), 3).is_err());
        assert_eq!(harmonic_density(&int(1)).unwrap(), int(1));
    }

    #[test]
    fn mu_v_examples() {
        assert_eq!(log_mu_v(&rat(1, 2), Place::Infinity), LogValue::zero());
        assert!(close(&log_mu_v(&rat(1, 2), Place::Prime(2)), (0.25f64).ln()));
        assert_eq!(log_mu_v(&rat(1, 2), Place::Prime(5)), LogValue::zero());
    }

    #[test]
    fn v_for_i1() {
        let inst = Instance::i1();
        let v = v_quantity(&inst, &int(10_000), Place::Infinity).unwrap();
        let expected = 10_000f64.ln() - 6.0 * 4f64.ln() - 1.0;
        assert!(close(&v, expected));
        assert!(v.enclose(128).is_negative());
        assert!(v_quantity(&inst, &int(100_000), Place::Infinity).unwrap().enclose(128).is_positive());
        assert!(v_quantity(&inst, &int(1), Place::Infinity).unwrap().enclose(64).is_negative());
        let t = archimedean_threshold(&inst, 128).unwrap();
        let exact = (6.0 * 4f64.ln() + 1.0).exp();
        assert!((crate::rational::to_f64(&from_bigint(t.clone())) - exact.ceil()).abs() <= 1.0, "{t} vs {exact}");
    }

    #[test]
    fn a_at_infinity() {
        let inst = Instance::i2();
        let a = a_quantity(&inst, &int(1000), Place::Infinity);
        // every root has |α| ≤ 1, so only log β − m log 2 remains
        assert!(close(&a, 1000f64.ln() - 3.0 * 2f64.ln()));
    }

    #[test]
    fn measure_i1() {
        let inst = Instance::i1();
        let beta = int(100_000);
        let v = v_quantity(&inst, &beta, Place::Infinity).unwrap().enclose(128);
        let eps = crate::interval::round_down(&(v.lo() / int(2)), 30);
        let r = measure(&inst, &beta, Place::Infinity, &eps, 128).unwrap();
        assert!(r.applicable && r.v_positive && r.convergence.holds);
        let mu = r.mu_interval.unwrap();
        assert!(mu.is_positive());
        let lc = r.log_c_interval.unwrap();
        assert!(lc.is_negative());
        let r = measure(&inst, &beta, Place::Infinity, &int(100), 64).unwrap();
        assert!(!r.applicable);
    }

    #[test]
    fn f_v_branches() {
        let inst = Instance::i1();
        // |α_i|_7 ≤ 1, |β|_7 ≤ 1, and 7 divides neither den(s_i) nor d_4(1)
        assert_eq!(f_v(&inst, &int(3), Place::Prime(7), 3).unwrap().enclose(64).mag(), Rational::zero());
        let f = f_v(&inst, &int(100), Place::Infinity, 5).unwrap();
        assert!(close(&f, 5.0 * (100f64.ln() + 2.0 * 4f64.ln())));
    }

    #[test]
    fn archimedean_f_slope_exceeds_u_by_m_log4() {
        let inst = Instance::i2();
        let beta = int(1000);
        let n = 1000;
        let f = f_v(&inst, &beta, Place::Infinity, n).unwrap().scale(&rat(1, n as i64));
        let u = u_quantity(&inst, &beta, Place::Infinity);
        assert!(close(&f.sub(&u), 3.0 * 4f64.ln()));
    }

    #[test]
    fn nonarchimedean_f_slope_against_u() {
        // p = 2 divides den(s) = 2, so the μ terms of F and U have opposite signs
        let inst = Instance::i1();
        let beta = rat(1, 8);
        let n = 1000;
        let f = f_v(&inst, &beta, Place::Prime(2), n).unwrap().scale(&rat(1, n as i64)).to_f64();
        let u = u_quantity(&inst, &beta, Place::Prime(2)).to_f64();
        let mu = log_mu_v(&rat(1, 2), Place::Prime(2)).to_f64();
        let linear = u - 2.0 * 2.0 * mu;
        assert!((f - (linear - 2.0 * 2.0 * mu)).abs() < 0.02, "{f} {u}");
    }

    #[test]
    fn product_formula() {
        for x in [rat(3, 10), rat(-49, 12), int(7)] {
            let mut total = log_abs_v(&x, Place::Infinity);
            for p in [2, 3, 5, 7] {
                total = total.add(&log_abs_v(&x, Place::Prime(p)));
            }
            assert!(total.enclose(128).contains(&Rational::zero()));
        }
    }

    #[test]
    fn place_parsing() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Infinity);
        assert_eq!("5".parse::<Place>().unwrap(), Place::Prime(5));
        assert!("6".parse::<Place>().is_err());
    }

    proptest! {
        #[test]
        fn mu_n_clears_pochhammer(num in -60i64..60, d in 1i64..31, n in 0u64..51, kf in 0.0f64..1.0) {
            let s = rat(num, d);
            let k = (kf * (n as f64 + 1.0)) as u64;
            let k = k.min(n);
            let x = pochhammer(&s, k) / from_bigint(crate::rational::factorial(k)) * from_bigint(mu_n(&s, n));
            prop_assert!(x.is_integer());
        }

        #[test]
        fn mu_n_shift_and_divisibility(num in -40i64..40, d in 1i64..31, k in -5i64..5, n1 in 0u64..20, n2 in 0u64..20) {
            let s = rat(num, d);
            prop_assert_eq!(mu_n(&s, n1), mu_n(&(&s + int(k)), n1));
            let prod = mu_n(&s, n1) * mu_n(&s, n2);
            prop_assert!(mu_n(&s, n1 + n2).is_multiple_of(&prod));
        }

        #[test]
        fn d_n_divisibility(num in 0i64..30, d in 1i64..6, n in 0u64..15, k in 0u64..10) {
            let b = rat(num, d);
            prop_assert!(d_n(&b, n + k).unwrap().is_multiple_of(&d_n(&b, n).unwrap()));
            let m = 2u64;
            let lhs = d_n(&b, m * n + k + m).unwrap();
            let rhs = d_n(&b, m * (n + 1)).unwrap() * d_n(&(&b + int((m * (n + 1)) as i64)), k).unwrap();
            prop_assert!(rhs.is_multiple_of(&lhs));
        }
    }
}
