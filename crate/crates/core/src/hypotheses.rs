//! Hypothesis checks on `(a, b)`, reported rather than raised.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::instance::HypothesisFlags;
use crate::linalg::bareiss_det;
use crate::poly::Poly;
use crate::rational::{format_rational, is_integer_at_most, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    /// Non-operative checks are informational and never gate validation.
    pub operative: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub n_max: u64,
    /// `Res_z(a, n a′ + b)` as a polynomial in `n`.
    pub resultant_in_n: String,
    pub checks: Vec<HypothesisCheck>,
    pub all_operative_pass: bool,
}

impl HypothesisReport {
    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }

    pub fn flags(&self) -> HypothesisFlags {
        HypothesisFlags {
            first: self.passed("first"),
            second: self.passed("second"),
            third: self.passed("third"),
            key_assump2: self.passed("key_assump2"),
            important_assump: self.passed("important_assump"),
        }
    }
}

/// Sylvester resultant `Res_z(p, q)` where the coefficients of `p` and `q`
/// (ascending in `z`) are themselves polynomials in a parameter.
pub fn resultant_param(p: &[Poly], q: &[Poly]) -> Poly {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let size = dp + dq;
    if size == 0 {
        return Poly::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..dq {
        let mut row = vec![Poly::zero(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..dp {
        let mut row = vec![Poly::zero(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// `Res_z(a(z), n a′(z) + b(z))` with `n` as the polynomial variable; the
/// second argument is given its formal degree `deg a − 1`.
pub fn coprimality_resultant(a: &Poly, b: &Poly) -> Poly {
    let m = a.degree().expect("nonzero a");
    let da = a.derivative();
    let p: Vec<Poly> = (0..=m).map(|k| Poly::constant(a.coeff(k))).collect();
    let q: Vec<Poly> = (0..m).map(|k| Poly::new(vec![b.coeff(k), da.coeff(k)])).collect();
    resultant_param(&p, &q)
}

fn n_times_da_plus_b(a: &Poly, b: &Poly, n: u64) -> Poly {
    &a.derivative().scale(&Rational::from_integer(BigInt::from(n))) + b
}

pub fn check_hypotheses(a: &Poly, b: &Poly, n_max: u64) -> HypothesisReport {
    let m = a.degree().unwrap_or(0);
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, operative: bool, detail: String| {
        checks.push(HypothesisCheck { name: name.into(), passed, operative, detail });
    };

    let da = a.derivative();
    let sq = Poly::gcd(a, &da).unwrap_or_else(|_| Poly::one());
    let distinct = sq.degree() == Some(0);
    push(
        "first",
        distinct,
        true,
        if distinct { "roots of a are pairwise distinct".into() } else { format!("gcd(a, a') = {sq}: repeated root") },
    );

    let roots = a.rational_roots();
    let splits = roots.iter().map(|(_, k)| k).sum::<usize>() == m;
    let (second_ok, second_detail) = if !distinct {
        (false, "exponents undefined at a repeated root".to_string())
    } else if !splits {
        (false, "a does not split over the rationals".to_string())
    } else {
        let mut bad = Vec::new();
        let mut all = Vec::new();
        for (alpha, _) in &roots {
            let s = b.eval(alpha) / da.eval(alpha);
            all.push(format!("s({}) = {}", format_rational(alpha), format_rational(&s)));
            if is_integer_at_most(&s, -1) {
                bad.push(format!("s({}) = {} is an integer <= -1", format_rational(alpha), format_rational(&s)));
            }
        }
        if bad.is_empty() {
            (true, all.join(", "))
        } else {
            (false, bad.join("; "))
        }
    };
    push("second", second_ok, true, second_detail);

    let b_top = if m >= 1 { b.coeff(m - 1) } else { Rational::zero() };
    let third = !is_integer_at_most(&b_top, -2);
    push("third", third, true, format!("b_(m-1) = {}", format_rational(&b_top)));

    let res = if m >= 1 { coprimality_resultant(a, b) } else { Poly::zero() };
    let mut witnesses = Vec::new();
    for n in 1..=n_max {
        let g = Poly::gcd(&n_times_da_plus_b(a, b, n), a).unwrap_or_else(|_| a.monic());
        if g.degree() != Some(0) {
            witnesses.push(format!("n = {n}: gcd = {g}"));
        }
    }
    let symbolic_bad: Vec<Rational> = if res.is_zero() {
        Vec::new()
    } else {
        res.rational_roots().into_iter().map(|(r, _)| r).filter(|r| r.is_integer() && r.is_positive()).collect()
    };
    let key_ok = witnesses.is_empty() && !res.is_zero() && symbolic_bad.is_empty();
    let key_detail = if key_ok {
        format!("gcd(n a' + b, a) = 1 for 1 <= n <= {n_max}; resultant has no positive integer root")
    } else if res.is_zero() {
        "resultant vanishes identically".into()
    } else {
        let mut parts = witnesses.clone();
        if !symbolic_bad.is_empty() {
            parts.push(format!(
                "resultant vanishes at n = {}",
                symbolic_bad.iter().map(format_rational).collect::<Vec<_>>().join(", ")
            ));
        }
        parts.join("; ")
    };
    push("key_assump2", key_ok, true, key_detail);

    let mut literal_bad = Vec::new();
    for n in 1..=n_max {
        let g = Poly::gcd(&n_times_da_plus_b(a, b, n), b).unwrap_or_else(|_| Poly::one());
        if g.degree() != Some(0) {
            literal_bad.push(format!("n = {n}: gcd(n a' + b, b) = {g}"));
        }
    }
    push(
        "key_assump2_literal_b",
        literal_bad.is_empty(),
        false,
        if literal_bad.is_empty() {
            format!("gcd(n a' + b, b) = 1 for 1 <= n <= {n_max}")
        } else {
            literal_bad.into_iter().take(3).collect::<Vec<_>>().join("; ")
        },
    );

    let m_i = m as i64;
    let important = !is_integer_at_most(&b_top, -m_i);
    push(
        "important_assump",
        important,
        true,
        format!("(k+1)m + n + b_(m-1) != 0 for all k, n >= 0 iff b_(m-1) = {} is not an integer <= -{m}", format_rational(&b_top)),
    );
    push(
        "assump_ab",
        important,
        true,
        "k + m + b_(m-1) != 0 for all k >= 0 (leading recurrence coefficient)".to_string(),
    );

    let all_operative_pass = checks.iter().filter(|c| c.operative).all(|c| c.passed);
    HypothesisReport { n_max, resultant_in_n: res.to_string(), checks, all_operative_pass }
}
