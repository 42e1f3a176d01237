//! Evaluation of the `f_j` and the remainders at `β`, growth checks, and the
//! small-height scan of the linear forms `λ + Σ λ_j f_j(β)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::height::{a_quantity, f_v, log_abs_v, u_quantity, MeasureReport, Place};
use crate::instance::Instance;
use crate::interval::{ln2, ln_rational, BigInterval, DecimalInterval};
use crate::padic::{eval_padic, eval_padic_remainder, PadicValue};
use crate::pade::build_system;
use crate::poly::Poly;
use crate::rational::{abs, format_rational, ln_f64, Rational};
use crate::series::LaurentSeries;
use crate::solutions::{phi, SolutionFamily};

fn q(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Geometric majorant `|f_i| ≤ G R^i` for every `i ≥ start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Majorant {
    pub radius: Rational,
    pub constant: Rational,
    pub start: usize,
}

/// Smallest dyadic `ρ` found by bisection with `ρ^m > Σ_{r<m} |a_r| ρ^r`.
fn cauchy_radius(a: &Poly, m: usize) -> Rational {
    let excess = |x: &Rational| -> Rational {
        let mut s = Rational::zero();
        let mut pw = Rational::one();
        for r in 0..m {
            s += abs(&a.coeff(r)) * &pw;
            pw *= x;
        }
        pw - s
    };
    let mut hi = Rational::one();
    while !excess(&hi).is_positive() {
        hi *= q(2);
    }
    let mut lo = Rational::zero();
    for _ in 0..40 {
        let mid = (&lo + &hi) / q(2);
        if excess(&mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Certifies a majorant from the recurrence `c_m(k) f_{k+m−1} = −Σ_{r<m} c_r(k) f_{k+r−1}`:
/// once `k (R^m − S_a) ≥ C_L − (m + b_{m−1}) R^m`, the bound propagates.
pub fn majorant(fam: &SolutionFamily, j: usize, beta_abs: &Rational) -> Result<Majorant> {
    let inst = &fam.instance;
    let m = inst.m;
    let rho = cauchy_radius(&inst.a, m);
    if beta_abs <= &rho {
        return Err(Error::NotConvergent(format!(
            "|beta| = {} does not exceed the majorant radius {}",
            format_rational(beta_abs),
            format_rational(&rho)
        )));
    }
    let r = (&rho * Rational::new(BigInt::from(17), BigInt::from(16)) + Rational::new(BigInt::one(), BigInt::from(16)))
        .min((&rho + beta_abs) / q(2));
    // any radius in (ρ, |β|) works; a short dyadic keeps R^i cheap
    let coarse = (&r * q(64)).ceil() / q(64);
    let r = if &coarse < beta_abs { coarse } else { r };
    let mut s_a = Rational::zero();
    let mut c_l = Rational::zero();
    let mut pw = Rational::one();
    for k in 0..m {
        let ar = abs(&inst.a.coeff(k));
        s_a += &ar * &pw;
        let br = if k >= 1 { abs(&inst.b.coeff(k - 1)) } else { Rational::zero() };
        c_l += (ar * q(k) + br) * &pw;
        pw *= &r;
    }
    let rm = pw;
    let gap = &rm - &s_a;
    let need = (&c_l - (q(m) + &inst.b_top) * &rm) / &gap;
    let mut k0 = if need.is_positive() { need.ceil().to_integer().try_into().unwrap_or(usize::MAX) } else { 0usize };
    // the leading coefficient k + m + b_{m−1} must be positive from k0 on
    let lead_floor = -(q(m) + &inst.b_top);
    if lead_floor >= q(k0) {
        k0 = lead_floor.floor().to_integer().try_into().unwrap_or(usize::MAX) + 1;
    }
    let f = &fam.f[j];
    let t = f.truncation();
    if k0 == usize::MAX || t < k0 + m {
        return Err(Error::Truncation { needed: k0.saturating_add(m), available: t });
    }
    let start = k0.saturating_sub(1);
    let mut g = Rational::zero();
    let mut pw = crate::rational::pow(&r, start as u64);
    for i in start..t {
        let v = abs(f.coeff(i)) / &pw;
        if v > g {
            g = v;
        }
        pw *= &r;
    }
    Ok(Majorant { radius: r, constant: g, start })
}

impl Majorant {
    /// `Σ_{i ≥ T} G R^i |β|^{−i−1}`, scaled by `weight`.
    pub fn tail(&self, t: usize, beta_abs: &Rational, weight: &Rational) -> Rational {
        let ratio = &self.radius / beta_abs;
        weight * &self.constant * crate::rational::pow(&ratio, t as u64) / (beta_abs * (Rational::one() - ratio))
    }
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

fn enclose(sum: Rational, tail: Rational, prec: u32) -> Result<BigInterval> {
    let width_ok = (sum.is_zero() && tail.is_zero())
        || tail <= abs(&sum) * crate::rational::pow(&Rational::new(BigInt::one(), BigInt::from(2)), prec as u64);
    if !width_ok {
        return Err(Error::PrecisionUnreachable {
            requested: prec as i64,
            reason: "tail bound exceeds the requested width; increase the truncation".into(),
        });
    }
    Ok(BigInterval::new(&sum - &tail, &sum + &tail, prec + 8))
}

/// Interval enclosing `f_j(β)` with width at most `2^{−prec} |f_j(β)|`.
pub fn eval_arch(fam: &SolutionFamily, j: usize, beta: &Rational, prec: u32) -> Result<BigInterval> {
    let inst = &fam.instance;
    let f = fam.f.get(j).ok_or_else(|| Error::InvalidInput(format!("no series f_{j}")))?;
    let b = abs(beta);
    if b <= inst.max_abs_root() {
        return Err(Error::NotConvergent(format!(
            "|beta| = {} must exceed max|alpha_i| = {}",
            format_rational(&b),
            format_rational(&inst.max_abs_root())
        )));
    }
    let maj = majorant(fam, j, &b)?;
    let tail = maj.tail(f.truncation(), &b, &Rational::one());
    enclose(partial_sum(f.coeffs(), beta), tail, prec)
}

/// Interval enclosing `ℛ(β)` for `ℛ = P f_j − Q`, summed from its own series.
pub fn eval_arch_remainder(fam: &SolutionFamily, j: usize, p: &Poly, r: &LaurentSeries, beta: &Rational, prec: u32) -> Result<BigInterval> {
    let b = abs(beta);
    if b <= fam.instance.max_abs_root() {
        return Err(Error::NotConvergent("|beta| must exceed max|alpha_i|".into()));
    }
    let maj = majorant(fam, j, &b)?;
    if r.truncation() < maj.start {
        return Err(Error::Truncation { needed: maj.start + 1, available: r.truncation() });
    }
    let mut weight = Rational::zero();
    let mut pw = Rational::one();
    for c in p.coeffs() {
        weight += abs(c) * &pw;
        pw *= &maj.radius;
    }
    let tail = maj.tail(r.truncation(), &b, &weight);
    enclose(partial_sum(r.coeffs(), beta), tail, prec)
}

/// `log |x|_v` as an interval, for an exact rational `x ≠ 0`.
pub fn log_abs_exact(x: &Rational, v: Place, prec: u32) -> BigInterval {
    log_abs_v(x, v).enclose(prec)
}

/// `log |x|` for an interval not containing zero.
pub fn log_abs_interval(x: &BigInterval) -> Result<BigInterval> {
    if x.contains_zero() {
        return Err(Error::PrecisionUnreachable { requested: x.prec() as i64, reason: "interval contains zero".into() });
    }
    x.abs().ln()
}

/// Ordinary least-squares slope.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateRow {
    pub n: usize,
    /// `max_{j,ℓ} log max(|P_{n,ℓ}(β)|_v, |Q_{n,j,ℓ}(β)|_v)`.
    pub log_pq: f64,
    /// `F_v(n)` with `o(n) = 0`.
    pub pq_bound: f64,
    pub log_r00: f64,
    pub log_r_max: f64,
    /// `−𝔸_v(β) n`.
    pub r_bound: f64,
    /// `|P_{n,ℓ}(β)|_v` for each `ℓ`, as exact rationals.
    pub p_values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub instance_hash: String,
    #[serde(with = "crate::rational::serde_str")]
    pub beta: Rational,
    pub place: Place,
    pub rows: Vec<EstimateRow>,
    pub slope_pq: f64,
    pub slope_r00: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "U")]
    pub u: f64,
    /// Linear coefficient of the bound for `log max(|P|, |Q|)`, i.e. `F_v(n)/n`.
    pub pq_bound_slope: f64,
}

fn log_abs_f64(x: &Rational, v: Place) -> f64 {
    match v {
        Place::Infinity => ln_f64(&abs(x)),
        Place::Prime(_) => log_abs_v(x, v).to_f64(),
    }
}

fn log_remainder(fam: &SolutionFamily, j: usize, p: &Poly, r: &LaurentSeries, beta: &Rational, v: Place) -> Result<f64> {
    match v {
        Place::Infinity => {
            let x = eval_arch_remainder(fam, j, p, r, beta, 64)?;
            Ok(ln_f64(&x.mig()))
        }
        Place::Prime(pr) => {
            let x = eval_padic_remainder(fam, j, p, r, beta, pr, 1)?;
            Ok(-(x.valuation as f64) * (pr as f64).ln())
        }
    }
}

/// Exact norms of `P`, `Q` and enclosed norms of `ℛ` at `β` for each `n`,
/// with regression slopes against the linear bounds.
pub fn check_estimates(fam: &SolutionFamily, beta: &Rational, v: Place, ns: std::ops::RangeInclusive<usize>) -> Result<EstimateReport> {
    let inst = &fam.instance;
    let a = a_quantity(inst, beta, v).to_f64();
    let u = u_quantity(inst, beta, v).to_f64();
    let rows: Vec<EstimateRow> = ns
        .clone()
        .into_par_iter()
        .map(|n| -> Result<EstimateRow> {
            let sys = build_system(fam, n)?;
            let mut log_pq = f64::NEG_INFINITY;
            let mut p_values = Vec::new();
            for p in &sys.p {
                let pv = p.eval(beta);
                p_values.push(format_rational(&crate::height::abs_v(&pv, v)));
                if !pv.is_zero() {
                    log_pq = log_pq.max(log_abs_f64(&pv, v));
                }
            }
            for qj in &sys.q {
                for qq in qj {
                    let qv = qq.eval(beta);
                    if !qv.is_zero() {
                        log_pq = log_pq.max(log_abs_f64(&qv, v));
                    }
                }
            }
            let log_r00 = log_remainder(fam, 0, &sys.p[0], &sys.r[0][0], beta, v)?;
            let mut log_r_max = log_r00;
            for (j, rj) in sys.r.iter().enumerate() {
                for (l, r) in rj.iter().enumerate() {
                    log_r_max = log_r_max.max(log_remainder(fam, j, &sys.p[l], r, beta, v)?);
                }
            }
            Ok(EstimateRow {
                n,
                log_pq,
                pq_bound: f_v(inst, beta, v, n as u64)?.to_f64(),
                log_r00,
                log_r_max,
                r_bound: -a * n as f64,
                p_values,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let slope_pq = regression_slope(&xs, &rows.iter().map(|r| r.log_pq).collect::<Vec<_>>());
    let slope_r00 = regression_slope(&xs, &rows.iter().map(|r| r.log_r00).collect::<Vec<_>>());
    let pq_bound_slope = regression_slope(&xs, &rows.iter().map(|r| r.pq_bound).collect::<Vec<_>>());
    Ok(EstimateReport { instance_hash: inst.hash(), beta: beta.clone(), place: v, rows, slope_pq, slope_r00, a, u, pq_bound_slope })
}

#[derive(Clone, Debug, Serialize)]
pub struct PerronReport {
    pub range: (usize, usize),
    /// `sup |f_{j,n}|^{1/n}` over the range, per `j`.
    pub sup: Vec<f64>,
    pub max_abs_root: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `sup_{lo ≤ n ≤ hi} |c_n|^{1/n}`, zero for an all-zero window.
pub fn perron_sup(coeffs: &[Rational], lo: usize, hi: usize) -> Result<f64> {
    if coeffs.len() <= hi {
        return Err(Error::Truncation { needed: hi + 1, available: coeffs.len() });
    }
    Ok(coeffs[lo.max(1)..=hi]
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (ln_f64(&abs(c)) / (i + lo.max(1)) as f64).exp())
        .fold(0.0, f64::max))
}

pub fn perron_check(fam: &SolutionFamily, lo: usize, hi: usize, tolerance: f64) -> Result<PerronReport> {
    let sup = fam.f.iter().map(|f| perron_sup(f.coeffs(), lo, hi)).collect::<Result<Vec<_>>>()?;
    let max_abs_root = crate::rational::to_f64(&fam.instance.max_abs_root());
    let passed = sup.iter().all(|&s| s <= max_abs_root + tolerance);
    Ok(PerronReport { range: (lo, hi), sup, max_abs_root, tolerance, passed })
}

/// `det M_n` over point intervals, by cofactor expansion.
pub fn interval_det_mn(fam: &SolutionFamily, n: usize, prec: u32) -> Result<BigInterval> {
    let inst = &fam.instance;
    let an = inst.a.pow(n);
    let rows = (0..=inst.w)
        .map(|j| (0..=inst.w).map(|k| phi(&fam.f[j], &an.shift(k)).map(|x| BigInterval::point(&x, prec))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(laplace(&rows, prec))
}

fn laplace(m: &[Vec<BigInterval>], prec: u32) -> BigInterval {
    if m.is_empty() {
        return BigInterval::exact(Rational::one(), prec);
    }
    let mut acc = BigInterval::zero(prec);
    for c in 0..m.len() {
        let minor: Vec<Vec<BigInterval>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, x)| x.clone()).collect()).collect();
        let term = m[0][c].mul(&laplace(&minor, prec));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Values `f_j(β)` at `v0` used by the scan.
#[derive(Clone, Debug)]
pub enum FormValues {
    Archimedean(Vec<BigInterval>),
    Padic(Vec<PadicValue>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub lambda: Vec<i64>,
    /// Enclosure of `|λ + Σ λ_j f_j(β)|_{v0}`.
    pub form: DecimalInterval,
    /// Upper end of `log(C H_{v0}(λ) H(λ)^{−μ})`.
    pub log_bound: String,
    /// Certified lower bound of `log |form| − log bound` (upper bound when violated).
    pub margin: String,
    pub verdict: Verdict,
    #[serde(skip)]
    pub margin_f64: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub instance_hash: String,
    pub h_max: u64,
    pub precision: u32,
    pub cells: usize,
    pub violations: Vec<Vec<i64>>,
    pub undecided: Vec<Vec<i64>>,
    /// One more than the largest height among violations; 0 when there are none.
    pub h0_proxy: u64,
    pub min_margin: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<ScanRow>,
}

/// All `λ ∈ [−H, H]^m ∖ {0}` in lexicographic order.
pub fn lambda_vectors(m: usize, h: i64) -> Vec<Vec<i64>> {
    if h <= 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![-h; m];
    loop {
        if cur.iter().any(|&x| x != 0) {
            out.push(cur.clone());
        }
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < h {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -h;
                }
                break;
            }
        }
    }
}

fn form_values(fam: &SolutionFamily, beta: &Rational, v0: Place, prec: u32) -> Result<FormValues> {
    match v0 {
        Place::Infinity => Ok(FormValues::Archimedean(
            (0..=fam.instance.w).map(|j| eval_arch(fam, j, beta, prec)).collect::<Result<_>>()?,
        )),
        Place::Prime(p) => Ok(FormValues::Padic(
            (0..=fam.instance.w).map(|j| eval_padic(fam, j, beta, p, prec)).collect::<Result<_>>()?,
        )),
    }
}

struct ScanContext {
    mu_lo: Rational,
    log_c_hi: Rational,
    log_c_lo: Rational,
    mu_hi: Rational,
    ln2: BigInterval,
    logs: BTreeMap<i64, BigInterval>,
    v0: Place,
}

impl ScanContext {
    /// `[lo, hi]` of `log(C H_{v0}(λ) H(λ)^{−μ})`.
    fn log_bound(&self, h: i64) -> (Rational, Rational) {
        let lh = &self.logs[&h];
        let hv = match self.v0 {
            Place::Infinity => lh.clone(),
            Place::Prime(_) => BigInterval::zero(lh.prec()),
        };
        let hi = &self.log_c_hi + hv.hi() - &self.mu_lo * lh.lo();
        let lo = &self.log_c_lo + hv.lo() - &self.mu_hi * lh.hi();
        (lo, hi)
    }

    /// Cheap lower bound of `ln x` for `x > 0` from `x ≥ 2^e`.
    fn ln_lower_quick(&self, x: &Rational) -> Rational {
        let e = x.numer().bits() as i64 - 1 - x.denom().bits() as i64;
        let l = if e >= 0 { self.ln2.lo() } else { self.ln2.hi() };
        l * Rational::from_integer(BigInt::from(e))
    }
}

fn p_power(p: u64, e: i64) -> Rational {
    let x = Rational::from_integer(crate::rational::ipow(p, e.unsigned_abs()));
    if e >= 0 {
        x
    } else {
        x.recip()
    }
}

fn scan_cell(ctx: &ScanContext, values: &FormValues, lambda: &[i64], prec: u32) -> ScanRow {
    let h = lambda.iter().map(|x| x.abs()).max().unwrap();
    let (lb_lo, lb_hi) = ctx.log_bound(h);
    // (|form| enclosure, lower end of log|form|, upper end when known)
    let (form, log_lo, log_hi): (BigInterval, Option<Rational>, Option<Rational>) = match values {
        FormValues::Archimedean(th) => {
            let mut acc = BigInterval::exact(Rational::from_integer(BigInt::from(lambda[0])), prec);
            for (l, t) in lambda[1..].iter().zip(th) {
                acc = acc.add(&t.mul_rational(&Rational::from_integer(BigInt::from(*l))));
            }
            let a = acc.abs();
            if a.mig().is_zero() {
                let hi = if a.mag().is_zero() { None } else { Some(ln_rational(&a.mag(), prec).expect("positive").hi().clone()) };
                (a, None, hi)
            } else {
                let quick = ctx.ln_lower_quick(&a.mig());
                if quick > lb_hi {
                    (a, Some(quick), None)
                } else {
                    let l = a.ln().expect("positive");
                    (a, Some(l.lo().clone()), Some(l.hi().clone()))
                }
            }
        }
        FormValues::Padic(th) => {
            let Place::Prime(p) = ctx.v0 else { unreachable!("p-adic values at a prime place") };
            let mut s = Rational::from_integer(BigInt::from(lambda[0]));
            let mut abs_prec = i64::MAX;
            for (l, t) in lambda[1..].iter().zip(th) {
                if *l == 0 {
                    continue;
                }
                s += t.to_rational() * Rational::from_integer(BigInt::from(*l));
                let lv = crate::rational::valuation(&Rational::from_integer(BigInt::from(*l)), p).unwrap_or(0);
                abs_prec = abs_prec.min(t.absolute_precision() + lv);
            }
            match crate::rational::valuation(&s, p) {
                Some(v) if v < abs_prec => {
                    let x = crate::height::abs_v(&s, ctx.v0);
                    let l = ln_rational(&x, prec).expect("positive");
                    (BigInterval::exact(x, prec), Some(l.lo().clone()), Some(l.hi().clone()))
                }
                _ => {
                    let ub = p_power(p, -abs_prec);
                    let hi = ln_rational(&ub, prec).expect("positive").hi().clone();
                    (BigInterval::new(Rational::zero(), ub, prec), None, Some(hi))
                }
            }
        }
    };
    let (verdict, margin) = match (&log_lo, &log_hi) {
        (Some(lo), _) if lo > &lb_hi => (Verdict::Satisfied, lo - &lb_hi),
        (_, Some(hi)) if hi < &lb_lo => (Verdict::Violated, hi - &lb_lo),
        _ => (Verdict::Undecided, Rational::zero()),
    };
    ScanRow {
        lambda: lambda.to_vec(),
        form: form.to_decimal(12),
        log_bound: crate::interval::sci_up(&lb_hi, 12),
        margin: crate::interval::sci_down(&margin, 12),
        margin_f64: crate::rational::to_f64(&margin),
        verdict,
    }
}

/// Scans every `λ` with `0 < H(λ) ≤ h_max`, escalating the precision of the
/// values `f_j(β)` for undecided cells before reporting them.
pub fn linear_form_scan(fam: &SolutionFamily, measure: &MeasureReport, h_max: u64, prec: u32) -> Result<ScanReport> {
    let inst: &Instance = &fam.instance;
    if !measure.applicable {
        return Err(Error::NotApplicable(measure.note.clone().unwrap_or_else(|| "measure not applicable".into())));
    }
    let mu = measure.mu_interval.clone().expect("applicable");
    let log_c = measure.log_c_interval.clone().expect("applicable");
    let logs: BTreeMap<i64, BigInterval> =
        (1..=h_max as i64).map(|h| (h, ln_rational(&Rational::from_integer(BigInt::from(h)), prec).expect("positive"))).collect();
    let ctx = ScanContext {
        mu_lo: mu.lo().clone(),
        mu_hi: mu.hi().clone(),
        log_c_hi: log_c.hi().clone(),
        log_c_lo: log_c.lo().clone(),
        ln2: ln2(64),
        logs,
        v0: measure.v0,
    };
    let lambdas = lambda_vectors(inst.m, h_max as i64);
    let values = form_values(fam, &measure.beta, measure.v0, prec)?;
    let mut rows: Vec<ScanRow> = lambdas.par_iter().map(|l| scan_cell(&ctx, &values, l, prec)).collect();
    let mut current = prec;
    for _ in 0..3 {
        let pending: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.verdict == Verdict::Undecided).map(|(i, _)| i).collect();
        if pending.is_empty() {
            break;
        }
        current *= 2;
        let Ok(values) = form_values(fam, &measure.beta, measure.v0, current) else {
            break;
        };
        let redone: Vec<ScanRow> = pending.par_iter().map(|&i| scan_cell(&ctx, &values, &lambdas[i], current)).collect();
        for (i, r) in pending.into_iter().zip(redone) {
            rows[i] = r;
        }
    }
    let height = |l: &[i64]| l.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let violations: Vec<Vec<i64>> = rows.iter().filter(|r| r.verdict == Verdict::Violated).map(|r| r.lambda.clone()).collect();
    let undecided: Vec<Vec<i64>> = rows.iter().filter(|r| r.verdict == Verdict::Undecided).map(|r| r.lambda.clone()).collect();
    let h0_proxy = violations.iter().map(|l| height(l) + 1).max().unwrap_or(0);
    let min_margin = rows.iter().filter(|r| r.verdict == Verdict::Satisfied).map(|r| r.margin_f64).reduce(f64::min);
    Ok(ScanReport {
        instance_hash: inst.hash(),
        h_max,
        precision: prec,
        cells: rows.len(),
        violations,
        undecided,
        h0_proxy,
        min_margin,
        rows,
    })
}

/// CSV with columns `lambda, lambda_0, …, form_lo, form_hi, log_bound, margin, verdict`.
pub fn scan_csv(report: &ScanReport, m: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["lambda".to_string()];
    header.extend((0..m - 1).map(|j| format!("lambda_{j}")));
    header.extend(["form_lo", "form_hi", "log_bound", "margin", "verdict"].map(String::from));
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec: Vec<String> = r.lambda.iter().map(|x| x.to_string()).collect();
        rec.push(r.form.lower.clone());
        rec.push(r.form.upper.clone());
        rec.push(r.log_bound.clone());
        rec.push(r.margin.clone());
        rec.push(serde_json::to_value(&r.verdict)?.as_str().unwrap_or_default().to_string());
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}
