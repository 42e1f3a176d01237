//! The Laurent-series solutions `f_0, …, f_{m−2}` of `L·f ∈ ℚ[z]`, built by
//! the coefficient recurrence and, independently, from the closed Lauricella
//! form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceEcho};
use crate::linalg::bareiss_det;
use crate::poly::Poly;
use crate::rational::{format_rational, over_common_denominator, Rational};
use crate::series::LaurentSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Recurrence,
    ClosedForm,
}

#[derive(Clone, Debug)]
pub struct SolutionFamily {
    pub instance: Instance,
    pub f: Vec<LaurentSeries>,
    pub provenance: Vec<Provenance>,
    /// Seeds are the closed-form leading coefficients, so `f_j` is the
    /// Lauricella series itself rather than some other basis of the span.
    pub canonical: bool,
}

fn q(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Coefficient of `f_{k+r−1}` in the `k`-th recurrence relation:
/// `a_r (k + r) + b_{r−1}`.
fn recurrence_coeff(inst: &Instance, k: usize, r: usize) -> Rational {
    let mut c = inst.a.coeff(r) * q(k + r);
    if r >= 1 {
        c += inst.b.coeff(r - 1);
    }
    c
}

/// Extends `seeds` (length `w + 1`) to `T` coefficients.
pub fn extend_by_recurrence(inst: &Instance, seeds: &[Rational], t: usize) -> Result<Vec<Rational>> {
    let m = inst.m;
    if seeds.len() != m - 1 {
        return Err(Error::InvalidInput(format!("need {} seeds, got {}", m - 1, seeds.len())));
    }
    let mut f: Vec<Rational> = seeds.iter().take(t).cloned().collect();
    let mut k = 0;
    while f.len() < t {
        let lead = recurrence_coeff(inst, k, m);
        if lead.is_zero() {
            return Err(Error::HypothesisViolation(format!(
                "leading recurrence coefficient k + m + b_(m-1) vanishes at k = {k}"
            )));
        }
        let mut acc = Rational::zero();
        for r in 0..m {
            if k + r == 0 {
                continue;
            }
            let c = recurrence_coeff(inst, k, r);
            if !c.is_zero() {
                acc += c * &f[k + r - 1];
            }
        }
        f.push(-acc / lead);
        k += 1;
    }
    Ok(f)
}

/// The two bracketed sums of the closed form over compositions
/// `k_1 + … + k_m = w`, accumulated one root at a time.
#[derive(Clone, Debug)]
pub struct LauricellaTable {
    b_top: Rational,
    /// `Σ ∏ (−s_i)_{k_i}/k_i! α_i^{k_i}`.
    pub first: Vec<Rational>,
    /// `Σ ∏ (1 + s_i)_{l_i}/l_i! α_i^{l_i}`.
    pub second: Vec<Rational>,
}

#[cfg(test)]
fn for_each_composition(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rest: usize, parts: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() + 1 == parts {
            cur.push(rest);
            f(cur);
            cur.pop();
            return;
        }
        for k in 0..=rest {
            cur.push(k);
            rec(rest - k, parts, cur, f);
            cur.pop();
        }
    }
    rec(total, parts, &mut Vec::with_capacity(parts), f);
}

/// `table[i][k] = (x_i)_k / k! · α_i^k` for `k ≤ kmax`.
fn term_table(inst: &Instance, shift: impl Fn(&Rational) -> Rational, kmax: usize) -> Vec<Vec<Rational>> {
    inst.alpha
        .iter()
        .zip(&inst.s)
        .map(|(alpha, s)| {
            let x = shift(s);
            let mut row = Vec::with_capacity(kmax + 1);
            let mut cur = Rational::one();
            for k in 0..=kmax {
                row.push(cur.clone());
                cur = cur * (&x + q(k)) / q(k + 1) * alpha;
            }
            row
        })
        .collect()
}

impl LauricellaTable {
    pub fn new(inst: &Instance, kmax: usize) -> Self {
        let t1 = term_table(inst, |s| -s.clone(), kmax);
        let t2 = term_table(inst, |s| Rational::one() + s, kmax);
        let bracket = |t: &Vec<Vec<Rational>>| -> Vec<Rational> {
            let mut acc = vec![BigInt::zero(); kmax + 1];
            acc[0] = BigInt::one();
            let mut den = BigInt::one();
            for row in t {
                let (row, row_den) = over_common_denominator(row);
                acc = (0..=kmax)
                    .map(|w| (0..=w).fold(BigInt::zero(), |s, k| s + &row[k] * &acc[w - k]))
                    .collect();
                den *= row_den;
            }
            acc.into_iter().map(|x| Rational::new(x, den.clone())).collect()
        };
        LauricellaTable { b_top: inst.b_top.clone(), first: bracket(&t1), second: bracket(&t2) }
    }

    pub fn kmax(&self) -> usize {
        self.first.len() - 1
    }

    /// `f_{j, k+j}`. The ratio `(b+j+1)/(b+j+K+1)` is 1 at `K = 0`, which also
    /// covers `b_{m−1} = −1`, `j = 0` where the series reduces to
    /// `z^{−1} ∏ (1 − α_i/z)^{s_i}`.
    pub fn coeff(&self, j: usize, k: usize) -> Result<Rational> {
        if k > self.kmax() {
            return Err(Error::Truncation { needed: k + 1, available: self.kmax() + 1 });
        }
        let num = &self.b_top + q(j + 1);
        let mut acc = Rational::zero();
        for w in 0..=k {
            let kk = k - w;
            let ratio = if kk == 0 {
                Rational::one()
            } else {
                let den = &num + q(kk);
                if den.is_zero() {
                    return Err(Error::HypothesisViolation(format!(
                        "b_(m-1) + j + {} + 1 = 0 in the closed form",
                        kk
                    )));
                }
                &num / den
            };
            acc += &self.first[w] * &self.second[kk] * ratio;
        }
        Ok(acc)
    }

    /// `f_{j, j..j+count}`, the same sums as [`Self::coeff`] carried out over a
    /// common denominator.
    pub fn series(&self, j: usize, count: usize) -> Result<Vec<Rational>> {
        if count > self.kmax() + 1 {
            return Err(Error::Truncation { needed: count, available: self.kmax() + 1 });
        }
        let num = &self.b_top + q(j + 1);
        let (n, d) = (num.numer().clone(), num.denom().clone());
        let mut dens = Vec::with_capacity(count);
        for kk in 1..count {
            let den = &n + &d * BigInt::from(kk);
            if den.is_zero() {
                return Err(Error::HypothesisViolation(format!("b_(m-1) + j + {kk} + 1 = 0 in the closed form")));
            }
            dens.push(den);
        }
        let e = dens.iter().fold(BigInt::one(), |e, x| e.lcm(x));
        let ratio: Vec<BigInt> =
            std::iter::once(e.clone()).chain(dens.iter().map(|x| &n * (&e / x))).collect();
        let (first, df) = over_common_denominator(&self.first[..count]);
        let (second, ds) = over_common_denominator(&self.second[..count]);
        let scaled: Vec<BigInt> = second.iter().zip(&ratio).map(|(a, b)| a * b).collect();
        let den = df * ds * e;
        Ok((0..count)
            .map(|k| {
                let sum = (0..=k).fold(BigInt::zero(), |s, w| s + &first[w] * &scaled[k - w]);
                Rational::new(sum, den.clone())
            })
            .collect())
    }
}

/// `f_{j, k+j}` from the closed form; builds a fresh table each call.
pub fn lauricella_coeff(inst: &Instance, j: usize, k: usize) -> Result<Rational> {
    if j > inst.w {
        return Err(Error::InvalidInput(format!("j = {j} exceeds m - 2 = {}", inst.w)));
    }
    LauricellaTable::new(inst, k).coeff(j, k)
}

/// Seeds `f_{j,0..=w}`: zero below `j`, one at `j`, closed form above.
pub fn canonical_seeds(inst: &Instance) -> Result<Vec<Vec<Rational>>> {
    let table = LauricellaTable::new(inst, inst.w);
    (0..=inst.w)
        .map(|j| {
            (0..=inst.w)
                .map(|i| if i < j { Ok(Rational::zero()) } else { table.coeff(j, i - j) })
                .collect()
        })
        .collect()
}

pub fn build_by_recurrence(inst: &Instance, seeds: &[Vec<Rational>], t: usize) -> Result<SolutionFamily> {
    if seeds.len() != inst.w + 1 {
        return Err(Error::InvalidInput(format!("need {} seed vectors", inst.w + 1)));
    }
    let f = seeds
        .iter()
        .map(|s| extend_by_recurrence(inst, s, t).map(LaurentSeries::new))
        .collect::<Result<Vec<_>>>()?;
    let canonical = canonical_seeds(inst).map(|c| c == seeds).unwrap_or(false);
    Ok(SolutionFamily {
        instance: inst.clone(),
        provenance: vec![Provenance::Recurrence; f.len()],
        f,
        canonical,
    })
}

/// Recurrence route with canonical seeds.
pub fn build_canonical(inst: &Instance, t: usize) -> Result<SolutionFamily> {
    build_by_recurrence(inst, &canonical_seeds(inst)?, t)
}

pub fn build_closed_form(inst: &Instance, t: usize) -> Result<SolutionFamily> {
    let table = LauricellaTable::new(inst, t.saturating_sub(1));
    let f = (0..=inst.w)
        .map(|j| {
            let mut c = vec![Rational::zero(); j.min(t)];
            c.extend(table.series(j, t.saturating_sub(j))?);
            Ok(LaurentSeries::new(c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionFamily {
        instance: inst.clone(),
        provenance: vec![Provenance::ClosedForm; f.len()],
        f,
        canonical: true,
    })
}

impl SolutionFamily {
    pub fn truncation(&self) -> usize {
        self.f.iter().map(|s| s.truncation()).min().unwrap_or(0)
    }

    /// `det (f_{j,k})_{0 ≤ j,k ≤ w}`.
    pub fn initial_determinant(&self) -> Rational {
        let w = self.instance.w;
        bareiss_det((0..=w).map(|j| (0..=w).map(|k| self.f[j].coeff(k).clone()).collect()).collect())
    }

    pub fn report(&self) -> SolutionReport {
        SolutionReport {
            instance: self.instance.echo(),
            instance_hash: self.instance.hash(),
            truncation: self.truncation(),
            provenance: self.provenance.clone(),
            coefficients: self.f.iter().map(|s| s.coeffs().iter().map(format_rational).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub instance: InstanceEcho,
    pub instance_hash: String,
    pub truncation: usize,
    pub provenance: Vec<Provenance>,
    pub coefficients: Vec<Vec<String>>,
}

/// `φ_f(p) = Σ p_k f_k`. Degrees beyond the truncation are rejected.
pub fn phi(f: &LaurentSeries, p: &Poly) -> Result<Rational> {
    if let Some(d) = p.degree() {
        if d >= f.truncation() {
            return Err(Error::Truncation { needed: d + 1, available: f.truncation() });
        }
    }
    Ok(p.coeffs().iter().enumerate().map(|(k, c)| c * f.coeff(k)).sum())
}

/// `Q(z) = φ_f((P(z) − P(t))/(z − t))`, from `z^i − t^i = (z − t) Σ z^a t^{i−1−a}`.
pub fn phi_bivariate(f: &LaurentSeries, p: &Poly) -> Result<Poly> {
    let Some(d) = p.degree() else {
        return Ok(Poly::zero());
    };
    if d >= f.truncation() {
        return Err(Error::Truncation { needed: d + 1, available: f.truncation() });
    }
    let mut out = vec![Rational::zero(); d.max(1)];
    for (i, pi) in p.coeffs().iter().enumerate().skip(1) {
        if pi.is_zero() {
            continue;
        }
        for zexp in 0..i {
            out[zexp] += pi * f.coeff(i - 1 - zexp);
        }
    }
    Ok(Poly::new(out))
}

/// `L·f = −a f′ + b f` as polynomial part plus `1/z` tail; the tail is valid
/// for `T − m + 1` coefficients.
pub fn apply_l(inst: &Instance, f: &LaurentSeries) -> Result<(Poly, LaurentSeries)> {
    let m = inst.m;
    let t = f.truncation();
    if t < m {
        return Err(Error::Truncation { needed: m, available: t });
    }
    let mut poly = vec![Rational::zero(); inst.w + 1];
    for (e, slot) in poly.iter_mut().enumerate() {
        for i in (e + 2)..=m {
            let k = i - 2 - e;
            *slot += inst.a.coeff(i) * q(k + 1) * f.coeff(k);
        }
        for jj in (e + 1)..m {
            let k = jj - 1 - e;
            *slot += inst.b.coeff(jj) * f.coeff(k);
        }
    }
    let tail: Vec<Rational> = (0..=t - m)
        .map(|n| {
            let mut acc = Rational::zero();
            for r in 0..=m {
                if n + r == 0 {
                    continue;
                }
                let c = recurrence_coeff(inst, n, r);
                if !c.is_zero() {
                    acc += c * f.coeff(n + r - 1);
                }
            }
            acc
        })
        .collect();
    Ok((Poly::new(poly), LaurentSeries::new(tail)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn series_matches_termwise_sums() {
        for i in [Instance::i1(), Instance::i2()] {
            let table = LauricellaTable::new(&i, 15);
            for j in 0..=i.w {
                let fast = table.series(j, 16).unwrap();
                for (k, x) in fast.iter().enumerate() {
                    assert_eq!(x, &table.coeff(j, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn brackets_match_composition_sums() {
        let i = Instance::i2();
        let kmax = 12;
        let table = LauricellaTable::new(&i, kmax);
        let t1 = term_table(&i, |s| -s.clone(), kmax);
        for w in 0..=kmax {
            let mut acc = Rational::zero();
            for_each_composition(w, i.m, &mut |ks: &[usize]| {
                acc += ks.iter().enumerate().fold(Rational::one(), |p, (r, &k)| p * &t1[r][k]);
            });
            assert_eq!(acc, table.first[w], "w = {w}");
        }
    }

    #[test]
    fn i1_leading_coefficients() {
        let i = Instance::i1();
        assert_eq!(lauricella_coeff(&i, 0, 0).unwrap(), int(1));
        // A_1 B_0 + A_0 B_1 (2/3) = −1/2 + 1
        assert_eq!(lauricella_coeff(&i, 0, 1).unwrap(), rat(1, 2));
        let fam = build_canonical(&i, 4).unwrap();
        assert_eq!(fam.f[0].coeff(0), &int(1));
        assert_eq!(fam.f[0].coeff(1), &rat(1, 2));
    }

    #[test]
    fn seeds_only_when_t_is_w_plus_one() {
        let i = Instance::i2();
        let seeds = canonical_seeds(&i).unwrap();
        let fam = build_by_recurrence(&i, &seeds, i.w + 1).unwrap();
        for j in 0..=i.w {
            assert_eq!(fam.f[j].coeffs(), &seeds[j][..]);
        }
        assert!(fam.canonical);
    }

    #[test]
    fn routes_agree_short() {
        for inst in [Instance::i1(), Instance::i2()] {
            let a = build_canonical(&inst, 30).unwrap();
            let b = build_closed_form(&inst, 30).unwrap();
            assert_eq!(a.f, b.f);
        }
    }

    #[test]
    fn bivariate_examples() {
        let f = LaurentSeries::new(vec![int(3), int(5), int(7)]);
        assert_eq!(phi_bivariate(&f, &Poly::one()).unwrap(), Poly::zero());
        assert_eq!(phi_bivariate(&f, &Poly::from_ints(&[0, 0, 1])).unwrap(), Poly::from_ints(&[5, 3]));
        assert_eq!(phi(&f, &Poly::from_ints(&[0, 1])).unwrap(), int(5));
        assert_eq!(phi(&f, &Poly::zero()).unwrap(), int(0));
        assert!(phi(&f, &Poly::from_ints(&[0, 0, 0, 1])).is_err());
    }

    #[test]
    fn l_annihilates_tail() {
        let inst = Instance::i2();
        let fam = build_canonical(&inst, 40).unwrap();
        for (j, f) in fam.f.iter().enumerate() {
            let (p, tail) = apply_l(&inst, f).unwrap();
            assert_eq!(tail.truncation(), 40 - inst.m + 1);
            assert!(tail.coeffs().iter().all(|c| c.is_zero()));
            let lead = &inst.b_top + int(j as i64 + 1);
            assert_eq!(p, Poly::monomial(lead, inst.m - j - 2));
        }
    }

    #[test]
    fn perturbation_shows_in_tail() {
        let inst = Instance::i1();
        let fam = build_canonical(&inst, 20).unwrap();
        let mut c = fam.f[0].coeffs().to_vec();
        c[7] += int(1);
        let (_, tail) = apply_l(&inst, &LaurentSeries::new(c)).unwrap();
        let nonzero: Vec<usize> = (0..tail.truncation()).filter(|&k| !tail.coeff(k).is_zero()).collect();
        // f_7 enters relations k = 8 − r for r = 1, 2; the r = 0 weight a_0 k vanishes
        assert_eq!(nonzero, vec![6, 7]);
    }

    #[test]
    fn b_top_minus_one_reduces_to_product() {
        // α = (0, 2), s = (−1/2, −1/2): b_(m−1) = −1
        let inst = Instance::from_roots(vec![int(0), int(2)], vec![rat(-1, 2), rat(-1, 2)]).unwrap();
        assert_eq!(inst.b_top, int(-1));
        let fam = build_closed_form(&inst, 12).unwrap();
        let table = LauricellaTable::new(&inst, 11);
        assert_eq!(fam.f[0].coeffs(), &table.first[..]);
        let (_, tail) = apply_l(&inst, &fam.f[0]).unwrap();
        assert!(tail.coeffs().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn zero_leading_coefficient_is_reported() {
        // b_(m−1) = −3 makes k + 2 + b vanish at k = 1
        let inst = Instance::from_roots(vec![int(0), int(1)], vec![rat(-3, 2), rat(-3, 2)]).unwrap();
        let err = extend_by_recurrence(&inst, &[int(1)], 5).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation(_)));
    }
}
