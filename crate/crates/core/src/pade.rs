//! Padé-type approximants `P_{n,ℓ}`, `Q_{n,j,ℓ}` and remainders `ℛ_{n,j,ℓ}`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceEcho};
use crate::linalg::nullspace;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{binomial, factorial, format_rational, Rational};
use crate::series::{LaurentSeries, Order};
use crate::solutions::{phi, phi_bivariate, SolutionFamily};

fn q(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn check_args(inst: &Instance, l: usize) -> Result<()> {
    if l >= inst.m {
        return Err(Error::InvalidInput(format!("l = {l} must be at most m - 1 = {}", inst.m - 1)));
    }
    Ok(())
}

/// `R_n z^ℓ` through `R_n = (1/n!) R_1 (R_1 + a′) ⋯ (R_1 + (n−1) a′)` with
/// `R_1 = a D + a′ + b`, rightmost factor first.
pub fn rodrigues_apply(inst: &Instance, n: usize, l: usize) -> Result<Poly> {
    check_args(inst, l)?;
    let da = inst.a.derivative();
    let mut p = Poly::monomial(Rational::one(), l);
    for k in (0..n).rev() {
        let mult = &da.scale(&q(k + 1)) + &inst.b;
        p = &(&inst.a * &p.derivative()) + &(&mult * &p);
    }
    Ok(p.scale(&Rational::from_integer(factorial(n as u64)).recip()))
}

/// `(1/n!) (D + b/a)^n (a^n z^ℓ)` in rational-function arithmetic; each step
/// must reduce to a polynomial.
pub fn rodrigues_power_form(inst: &Instance, n: usize, l: usize) -> Result<Poly> {
    check_args(inst, l)?;
    let b_over_a = RatFunc::new(inst.b.clone(), inst.a.clone())?;
    let mut r = RatFunc::from_poly(&inst.a.pow(n) * &Poly::monomial(Rational::one(), l));
    for _ in 0..n {
        r = &r.derivative() + &(&b_over_a * &r);
    }
    Ok(r.into_poly()?.scale(&Rational::from_integer(factorial(n as u64)).recip()))
}

fn leibniz_check(inst: &Instance, l: usize) -> Result<()> {
    if inst.m < 2 {
        return Err(Error::InvalidInput("m must be at least 2".into()));
    }
    check_args(inst, l)
}

/// Coefficient of `(z−α_i)^{n−e}` after grouping `k_i + j_i = e`:
/// `Σ_{k+j=e} (−1)^k (−s_i)_k/k! C(n, j)`.
fn grouped_weights(s: &Rational, n: usize) -> Vec<Rational> {
    let mut poch = Vec::with_capacity(n + 1);
    let mut cur = Rational::one();
    for k in 0..=n {
        let signed = if k % 2 == 0 { cur.clone() } else { -cur.clone() };
        poch.push(signed);
        cur = cur * (-s + q(k)) / q(k + 1);
    }
    (0..=n)
        .map(|e| (0..=e).map(|k| &poch[k] * Rational::from_integer(binomial(n as u64, (e - k) as u64))).sum())
        .collect()
}

/// The explicit multi-index sum for `P_{n,ℓ}`, evaluated by grouping each
/// root's indices and a budget recursion over roots.
pub fn leibniz_expand(inst: &Instance, n: usize, l: usize) -> Result<Poly> {
    leibniz_check(inst, l)?;
    // dp[e] = contribution of the roots processed so far using total index e
    let mut dp: Vec<Poly> = vec![Poly::zero(); n + 1];
    dp[0] = Poly::one();
    for (alpha, s) in inst.alpha.iter().zip(&inst.s) {
        let weights = grouped_weights(s, n);
        let lin = Poly::new(vec![-alpha.clone(), Rational::one()]);
        let powers: Vec<Poly> = {
            let mut v = Vec::with_capacity(n + 1);
            let mut cur = Poly::one();
            for _ in 0..=n {
                v.push(cur.clone());
                cur = &cur * &lin;
            }
            v
        };
        let mut next = vec![Poly::zero(); n + 1];
        for (used, acc) in dp.iter().enumerate() {
            if acc.is_zero() {
                continue;
            }
            for e in 0..=n - used {
                if weights[e].is_zero() {
                    continue;
                }
                let term = (acc * &powers[n - e]).scale(&weights[e]);
                next[used + e] = &next[used + e] + &term;
            }
        }
        dp = next;
    }
    let mut out = Poly::zero();
    for j in 0..=n.min(l) {
        let c = Rational::from_integer(binomial(l as u64, j as u64));
        out = &out + &(&dp[n - j] * &Poly::monomial(c, l - j));
    }
    Ok(out)
}

/// The same sum with every index tuple enumerated literally. Exponential in
/// `m`, only for small `n`.
pub fn leibniz_expand_literal(inst: &Instance, n: usize, l: usize) -> Result<Poly> {
    leibniz_check(inst, l)?;
    let m = inst.m;
    let mut total = Poly::zero();
    let lins: Vec<Poly> = inst.alpha.iter().map(|a| Poly::new(vec![-a.clone(), Rational::one()])).collect();
    for k in 0..=n {
        let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        for ks in compositions(k, m) {
            for js in compositions(n - k, m + 1) {
                let jl = js[m];
                if jl > l {
                    continue;
                }
                let mut c = sign.clone() * Rational::from_integer(binomial(l as u64, jl as u64));
                let mut p = Poly::monomial(Rational::one(), l - jl);
                for i in 0..m {
                    let ki = ks[i] as u64;
                    c *= crate::rational::pochhammer(&-inst.s[i].clone(), ki) / Rational::from_integer(factorial(ki));
                    c *= Rational::from_integer(binomial(n as u64, js[i] as u64));
                    p = &p * &lins[i].pow(n - js[i] - ks[i]);
                }
                total = &total + &p.scale(&c);
            }
        }
    }
    Ok(total)
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One weight `n` with all `(j, ℓ)` cells.
#[derive(Clone, Debug)]
pub struct PadeSystem {
    pub n: usize,
    /// `p[ℓ] = P_{n,ℓ}`.
    pub p: Vec<Poly>,
    /// `q[j][ℓ] = Q_{n,j,ℓ}`.
    pub q: Vec<Vec<Poly>>,
    /// `r[j][ℓ] = ℛ_{n,j,ℓ}`, truncated.
    pub r: Vec<Vec<LaurentSeries>>,
    pub verified: bool,
}

/// Smallest truncation that lets [`build_system`] certify weight `n`.
pub fn required_truncation(inst: &Instance, n: usize) -> usize {
    (n + 1) * (inst.m - 1) + n + 2
}

pub fn build_system(fam: &SolutionFamily, n: usize) -> Result<PadeSystem> {
    let inst = &fam.instance;
    let need = required_truncation(inst, n);
    if fam.truncation() < need {
        return Err(Error::Truncation { needed: need, available: fam.truncation() });
    }
    let p: Vec<Poly> = (0..inst.m).into_par_iter().map(|l| rodrigues_apply(inst, n, l)).collect::<Result<_>>()?;
    let mut q = Vec::with_capacity(inst.w + 1);
    let mut r = Vec::with_capacity(inst.w + 1);
    let mut verified = true;
    for f in &fam.f {
        let cells: Vec<(Poly, LaurentSeries)> = p.par_iter().map(|pl| f.mul_poly(pl)).collect::<Result<_>>()?;
        let mut qj = Vec::with_capacity(inst.m);
        let mut rj = Vec::with_capacity(inst.m);
        for (l, (qq, rr)) in cells.into_iter().enumerate() {
            let expected_deg = l + n * (inst.w + 1);
            verified &= p[l].degree() == Some(expected_deg);
            verified &= qq.degree().is_none_or(|d| d < expected_deg);
            verified &= phi_bivariate(f, &p[l])? == qq;
            verified &= rr.ord_inf().at_least(n + 1);
            qj.push(qq);
            rj.push(rr);
        }
        q.push(qj);
        r.push(rj);
    }
    Ok(PadeSystem { n, p, q, r, verified })
}

/// First `K` coefficients of `ℛ_{n,j,ℓ}` from
/// `(−1)^n Σ_{k≥n} C(k,n) φ_j(t^{k+ℓ−n} a(t)^n) z^{−k−1}`.
pub fn remainder_closed_form(fam: &SolutionFamily, n: usize, j: usize, l: usize, k_terms: usize) -> Result<LaurentSeries> {
    let inst = &fam.instance;
    check_args(inst, l)?;
    if k_terms == 0 {
        return Err(Error::InvalidInput("need at least one term".into()));
    }
    let need = k_terms + l + n * (inst.m - 1);
    if fam.truncation() < need {
        return Err(Error::Truncation { needed: need, available: fam.truncation() });
    }
    let an = inst.a.pow(n);
    let sign = if n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    let coeffs = (0..k_terms)
        .map(|k| {
            if k < n {
                return Ok(Rational::zero());
            }
            let v = phi(&fam.f[j], &an.shift(k + l - n))?;
            Ok(&sign * Rational::from_integer(binomial(k as u64, n as u64)) * v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentSeries::new(coeffs))
}

/// Whether `φ_{f_j}(q) = 0`, per `j`.
pub fn kernel_membership(fam: &SolutionFamily, q: &Poly) -> Result<Vec<bool>> {
    fam.f.iter().map(|f| phi(f, q).map(|v| v.is_zero())).collect()
}

/// Rows of the homogeneous system in `p_0..p_M`: the first `n_j` tail
/// coefficients of `P f_j` vanish, `Σ_i p_i f_{j,k+i} = 0` for `k < n_j`.
pub fn pade_conditions(f: &[LaurentSeries], weights: &[usize], m_deg: usize) -> Result<Vec<Vec<Rational>>> {
    if f.len() != weights.len() {
        return Err(Error::InvalidInput("one weight per series".into()));
    }
    let mut rows = Vec::new();
    for (fj, &nj) in f.iter().zip(weights) {
        if nj + m_deg > fj.truncation() {
            return Err(Error::Truncation { needed: nj + m_deg, available: fj.truncation() });
        }
        for k in 0..nj {
            rows.push((0..=m_deg).map(|i| fj.coeff(k + i).clone()).collect());
        }
    }
    Ok(rows)
}

/// A nonzero `(P, Q_1..)` with `deg P ≤ M` and `ord(P f_j − Q_j) ≥ n_j + 1`,
/// from an exact nullspace; `Σ n_j ≤ M` guarantees existence.
pub fn solve_pade_linear_system(f: &[LaurentSeries], weights: &[usize], m_deg: usize) -> Result<(Poly, Vec<Poly>)> {
    let total: usize = weights.iter().sum();
    if total > m_deg {
        return Err(Error::InvalidInput(format!("sum of weights {total} exceeds degree bound {m_deg}")));
    }
    let rows = pade_conditions(f, weights, m_deg)?;
    let basis = nullspace(&rows, m_deg + 1);
    let v = basis.into_iter().next().expect("dimension count leaves a nullspace");
    let p = Poly::new(v);
    let qs = f.iter().map(|fj| fj.mul_poly(&p).map(|(qq, _)| qq)).collect::<Result<Vec<_>>>()?;
    Ok((p, qs))
}

#[derive(Clone, Debug, Serialize)]
pub struct CellCertificate {
    pub j: usize,
    pub l: usize,
    pub ord_remainder: String,
    pub deg_q: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PadeReport {
    pub instance: InstanceEcho,
    pub n: usize,
    pub truncation: usize,
    pub p: Vec<Vec<String>>,
    pub q: Vec<Vec<Vec<String>>>,
    pub cells: Vec<CellCertificate>,
    pub verified: bool,
}

fn poly_strings(p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

impl PadeSystem {
    pub fn report(&self, fam: &SolutionFamily) -> PadeReport {
        let mut cells = Vec::new();
        for (j, row) in self.r.iter().enumerate() {
            for (l, rem) in row.iter().enumerate() {
                let ord = match rem.ord_inf() {
                    Order::Exact(k) => k.to_string(),
                    Order::AtLeast(k) => format!(">= {k}"),
                };
                cells.push(CellCertificate { j, l, ord_remainder: ord, deg_q: self.q[j][l].degree() });
            }
        }
        PadeReport {
            instance: fam.instance.echo(),
            n: self.n,
            truncation: fam.truncation(),
            p: self.p.iter().map(poly_strings).collect(),
            q: self.q.iter().map(|row| row.iter().map(poly_strings).collect()).collect(),
            cells,
            verified: self.verified,
        }
    }
}
