//! Fixed-precision p-adic values and summation of the `f_j` at a rational
//! point `β` with `|β|_p` large.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::height::{convergence_holds, Place};
use crate::rational::{floor_log, from_bigint, int_valuation, ipow, valuation, Rational};
use crate::series::LaurentSeries;
use crate::solutions::SolutionFamily;

/// `unit · p^valuation + O(p^{valuation + precision})`, with `unit` reduced
/// mod `p^precision` and prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicValue {
    pub p: u64,
    pub valuation: i64,
    #[serde(serialize_with = "ser_bigint")]
    pub unit: BigInt,
    pub precision: u32,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `x mod p^n` for a `p`-integral rational `x`.
pub fn reduce_mod(x: &Rational, p: u64, n: u32) -> BigInt {
    let modulus = ipow(p, n as u64);
    let d = x.denom().mod_floor(&modulus);
    let inv = mod_inverse(&d, &modulus).expect("p-integral rational");
    (x.numer() * inv).mod_floor(&modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

impl PadicValue {
    /// The rational `x ≠ 0` to `precision` significant digits.
    pub fn from_rational(x: &Rational, p: u64, precision: u32) -> Result<PadicValue> {
        let v = valuation(x, p).ok_or_else(|| Error::InvalidInput("zero has no unit part".into()))?;
        let shifted = x * shift(p, -v);
        Ok(PadicValue { p, valuation: v, unit: reduce_mod(&shifted, p, precision), precision })
    }

    /// Exponent `N_abs` of the error term `O(p^{N_abs})`.
    pub fn absolute_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    /// The representative `unit · p^valuation`.
    pub fn to_rational(&self) -> Rational {
        from_bigint(self.unit.clone()) * shift(self.p, self.valuation)
    }

    /// Whether `x` lies in the ball this value describes.
    pub fn agrees_with(&self, x: &Rational) -> bool {
        let d = x - self.to_rational();
        valuation(&d, self.p).is_none_or(|v| v >= self.absolute_precision())
    }

    pub fn truncate(&self, precision: u32) -> PadicValue {
        let precision = precision.min(self.precision);
        PadicValue {
            p: self.p,
            valuation: self.valuation,
            unit: self.unit.mod_floor(&ipow(self.p, precision as u64)),
            precision,
        }
    }
}

impl fmt::Display for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.valuation, self.p, self.absolute_precision())
    }
}

/// `p^e` as a rational, `e` of either sign.
fn shift(p: u64, e: i64) -> Rational {
    let q = from_bigint(ipow(p, e.unsigned_abs()));
    if e >= 0 {
        q
    } else {
        q.recip()
    }
}

/// Lower bounds `v_p(f_{j, j+K})` for the closed-form coefficients of the
/// canonical `f_j`, valid for every `K ≥ 0`.
#[derive(Clone, Debug)]
pub struct ValuationFloor {
    p: u64,
    j: usize,
    /// Per exponent: `(v_p(den s_i), p | den s_i)`.
    exps: Vec<(i64, bool)>,
    alpha_min: i64,
    /// `b_{m−1} = r/d`.
    r: BigInt,
    d: BigInt,
    /// `v_p(r + (j+1) d)`, or `None` when it vanishes.
    head: Option<i64>,
}

impl ValuationFloor {
    pub fn new(fam: &SolutionFamily, j: usize, p: u64) -> Self {
        let inst = &fam.instance;
        let exps = inst
            .s
            .iter()
            .map(|s| {
                let e = int_valuation(s.denom(), p) as i64;
                (e, e > 0)
            })
            .collect();
        let alpha_min = inst.alpha.iter().filter_map(|a| valuation(a, p)).fold(0, i64::min);
        let r = inst.b_top.numer().clone();
        let d = inst.b_top.denom().clone();
        let head_val = &r + &d * BigInt::from(j + 1);
        let head = if head_val.is_zero() { None } else { Some(int_valuation(&head_val, p) as i64) };
        ValuationFloor { p, j, exps, alpha_min, r, d, head }
    }

    /// `−Σ v_p(μ_K(s_i)) + K min(0, v_p α_i) + min(0, v_p(r+(j+1)d) − ⌊log_p(|r| + (j+1+K) d)⌋)`.
    pub fn at(&self, k: u64) -> i64 {
        let mu: i64 = self
            .exps
            .iter()
            .map(|&(e, divides)| k as i64 * e + if divides { (k / (self.p - 1)) as i64 } else { 0 })
            .sum();
        let ratio = match self.head {
            None => 0,
            Some(h) => {
                let span = self.r.abs() + &self.d * BigInt::from(self.j as u64 + 1 + k);
                (h - floor_log(&span, self.p) as i64).min(0)
            }
        };
        -mu + k as i64 * self.alpha_min + ratio
    }

    /// Asymptotic slope of [`Self::at`], ignoring the logarithmic term.
    fn slope(&self) -> Rational {
        let mut s = Rational::from_integer(BigInt::from(self.alpha_min));
        for &(e, divides) in &self.exps {
            s -= Rational::from_integer(BigInt::from(e));
            if divides {
                s -= Rational::new(BigInt::one(), BigInt::from(self.p - 1));
            }
        }
        s
    }
}

/// Real minorant `c0 + g k − log_p(a + b k)` of the term valuations.
struct Minorant {
    c0: f64,
    g: f64,
    a: f64,
    b: f64,
}

impl Minorant {
    fn at(&self, k: u64, p: u64) -> f64 {
        self.c0 + self.g * k as f64 - (self.a + self.b * k as f64).ln() / (p as f64).ln()
    }
}

/// Lower bound for the valuations of every term with index `k ≥ start`.
/// Exact floors are enumerated until the minorant is increasing, which then
/// covers all later indices.
fn tail_floor(floor: &dyn Fn(u64) -> i64, minorant: &Minorant, start: u64, p: u64) -> Result<i64> {
    if minorant.g <= 0.0 {
        return Err(Error::NotConvergent("p-adic terms do not tend to zero".into()));
    }
    // d/dk minorant ≥ 0 once (a + b k) g ln p ≥ b
    let turn = ((minorant.b / (minorant.g * (p as f64).ln()) - minorant.a) / minorant.b).max(0.0).ceil() as u64;
    let last = start.max(turn);
    let mut best = (minorant.at(last + 1, p) - 1e-6).floor() as i64;
    for k in start..=last {
        best = best.min(floor(k));
    }
    Ok(best)
}

fn partial_sum(coeffs: &[Rational], beta: &Rational) -> Rational {
    let inv = beta.recip();
    let mut pw = inv.clone();
    let mut s = Rational::zero();
    for c in coeffs {
        if !c.is_zero() {
            s += c * &pw;
        }
        pw *= &inv;
    }
    s
}

fn value_from_sum(s: &Rational, p: u64, abs_prec: i64, requested: u32) -> Result<PadicValue> {
    let v = valuation(s, p).filter(|&v| v < abs_prec).ok_or_else(|| Error::PrecisionUnreachable {
        requested: requested as i64,
        reason: format!("value vanishes modulo {p}^{abs_prec}; increase the truncation"),
    })?;
    let available = (abs_prec - v) as u32;
    if available < requested {
        return Err(Error::PrecisionUnreachable {
            requested: requested as i64,
            reason: format!("only {available} digits certified at this truncation"),
        });
    }
    PadicValue::from_rational(s, p, requested)
}

fn check_condition(fam: &SolutionFamily, beta: &Rational, p: u64) -> Result<i64> {
    if !convergence_holds(&fam.instance, beta, Place::Prime(p)) {
        return Err(Error::NotConvergent(format!("|beta|_{p} does not exceed prod mu_{p}(s_i)^-1 H_{p}(alpha)")));
    }
    if !fam.canonical {
        return Err(Error::NotApplicable("p-adic tail bounds need the canonical solution family".into()));
    }
    Ok(-valuation(beta, p).expect("nonzero beta"))
}

fn head_min(vf: &ValuationFloor) -> f64 {
    vf.head.map_or(0.0, |h| h.min(0) as f64)
}

fn b_parts(fam: &SolutionFamily) -> (f64, f64) {
    let b = &fam.instance.b_top;
    (
        crate::rational::to_f64(&from_bigint(b.numer().abs())),
        crate::rational::to_f64(&from_bigint(b.denom().clone())),
    )
}

/// Certified valuation of the tail `Σ_{k ≥ T} f_{j,k} β^{−k−1}`.
pub fn series_tail_valuation(fam: &SolutionFamily, j: usize, beta: &Rational, p: u64, t: usize) -> Result<i64> {
    let t_beta = check_condition(fam, beta, p)?;
    let vf = ValuationFloor::new(fam, j, p);
    let slope = crate::rational::to_f64(&vf.slope());
    let (r, d) = b_parts(fam);
    let minorant = Minorant {
        c0: t_beta as f64 - j as f64 * slope + head_min(&vf),
        g: slope + t_beta as f64,
        a: r + d,
        b: d,
    };
    let floor = |k: u64| vf.at(k - j as u64) + (k as i64 + 1) * t_beta;
    tail_floor(&floor, &minorant, t.max(j) as u64, p)
}

/// `f_j(β)` in `ℚ_p` to `precision` significant digits.
pub fn eval_padic(fam: &SolutionFamily, j: usize, beta: &Rational, p: u64, precision: u32) -> Result<PadicValue> {
    let f = fam.f.get(j).ok_or_else(|| Error::InvalidInput(format!("no series f_{j}")))?;
    let tail = series_tail_valuation(fam, j, beta, p, f.truncation())?;
    value_from_sum(&partial_sum(f.coeffs(), beta), p, tail, precision)
}

/// `Σ_k r_k β^{−k−1}` for a remainder `r = P f_j − Q`, using
/// `v_p(r_k) ≥ min_i (v_p(P_i) + v_p(f_{j,k+i}))`.
pub fn eval_padic_remainder(
    fam: &SolutionFamily,
    j: usize,
    p_poly: &crate::poly::Poly,
    r: &LaurentSeries,
    beta: &Rational,
    p: u64,
    precision: u32,
) -> Result<PadicValue> {
    let t_beta = check_condition(fam, beta, p)?;
    let vf = ValuationFloor::new(fam, j, p);
    let pv: Vec<(usize, i64)> = p_poly
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| valuation(c, p).map(|v| (i, v)))
        .collect();
    let min_pv = pv.iter().map(|&(_, v)| v).min().unwrap_or(0);
    let deg = p_poly.degree().unwrap_or(0) as f64;
    let slope = crate::rational::to_f64(&vf.slope());
    let (rr, d) = b_parts(fam);
    let minorant = Minorant {
        c0: min_pv as f64 + (deg - j as f64) * slope + head_min(&vf) + t_beta as f64,
        g: slope + t_beta as f64,
        a: rr + d + d * deg,
        b: d,
    };
    let floor = |k: u64| -> i64 {
        let best = pv
            .iter()
            .filter(|&&(i, _)| k + i as u64 >= j as u64)
            .map(|&(i, v)| v + vf.at(k + i as u64 - j as u64))
            .min()
            .unwrap_or(i64::MAX / 4);
        best + (k as i64 + 1) * t_beta
    };
    let tail = tail_floor(&floor, &minorant, r.truncation() as u64, p)?;
    value_from_sum(&partial_sum(r.coeffs(), beta), p, tail, precision)
}
