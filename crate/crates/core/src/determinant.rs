//! The determinants `Δ_n(z)` and `det M_n`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypotheses::HypothesisReport;
use crate::linalg::bareiss_det;
use crate::pade::{build_system, PadeSystem};
use crate::poly::Poly;
use crate::rational::{format_rational, Rational};
use crate::solutions::{phi, SolutionFamily};

/// `M_n[j][k] = φ_j(t^k a(t)^n)` for `0 ≤ j, k ≤ w`.
pub fn build_mn(fam: &SolutionFamily, n: usize) -> Result<Vec<Vec<Rational>>> {
    let inst = &fam.instance;
    let an = inst.a.pow(n);
    let need = inst.w + n * inst.m + 1;
    if fam.truncation() < need {
        return Err(Error::Truncation { needed: need, available: fam.truncation() });
    }
    (0..=inst.w)
        .map(|j| (0..=inst.w).map(|k| phi(&fam.f[j], &an.shift(k))).collect())
        .collect()
}

/// Rows `P_{n,·}, Q_{n,0,·}, …, Q_{n,w,·}`, columns `ℓ = 0..=w+1`.
pub fn delta_matrix(sys: &PadeSystem) -> Vec<Vec<Poly>> {
    let mut rows = vec![sys.p.clone()];
    rows.extend(sys.q.iter().cloned());
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminantReport {
    pub instance_hash: String,
    pub n: usize,
    pub mn: Vec<Vec<String>>,
    pub det_mn: String,
    pub delta_n: String,
    pub delta_is_constant: bool,
    pub delta_nonzero: bool,
    /// `Δ_n = (−1)^{n(w+1)} lc(P_{n,w+1}) det M_n`.
    pub scaling_relation_holds: bool,
    pub assumptions: HypothesisReport,
    #[serde(skip)]
    pub delta: Poly,
    #[serde(skip)]
    pub det: Rational,
}

/// Computes `Δ_n` and `det M_n`. A nonconstant or vanishing `Δ_n` on an
/// instance whose operative hypotheses hold is a certificate failure.
pub fn build_delta(fam: &SolutionFamily, sys: &PadeSystem, n_max_hyp: u64) -> Result<DeterminantReport> {
    let inst = &fam.instance;
    if !sys.verified {
        return Err(Error::CertificateFailure(format!("Padé system for n = {} is not verified", sys.n)));
    }
    assert_eq!(sys.p.len(), inst.w + 2, "l = 0..=w+1 and l = 0..=m-1 coincide");
    let delta = bareiss_det(delta_matrix(sys));
    let mn = build_mn(fam, sys.n)?;
    let det = bareiss_det(mn.clone());
    let assumptions = inst.hypotheses(n_max_hyp);
    let is_const = delta.degree().is_none_or(|d| d == 0);
    let nonzero = !delta.is_zero();
    let lc = sys.p[inst.w + 1].leading_coeff().cloned().unwrap_or_default();
    let sign = if (sys.n * (inst.w + 1)).is_multiple_of(2) { crate::rational::int(1) } else { crate::rational::int(-1) };
    let relation = delta == Poly::constant(sign * lc * &det);
    if assumptions.all_operative_pass && !(is_const && nonzero) {
        return Err(Error::CertificateFailure(format!("Delta_{} = {delta} is not a nonzero constant", sys.n)));
    }
    Ok(DeterminantReport {
        instance_hash: inst.hash(),
        n: sys.n,
        mn: mn.iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        det_mn: format_rational(&det),
        delta_n: delta.to_string(),
        delta_is_constant: is_const,
        delta_nonzero: nonzero,
        scaling_relation_holds: relation,
        assumptions,
        delta,
        det,
    })
}

/// Reports for `n = 0..=n_max`, computed in parallel, returned in order.
pub fn certify_range(fam: &SolutionFamily, n_max: usize) -> Result<Vec<DeterminantReport>> {
    (0..=n_max)
        .into_par_iter()
        .map(|n| build_delta(fam, &build_system(fam, n)?, n_max as u64))
        .collect()
}
