//! Linear differential operators with polynomial coefficients.

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::Poly;
use crate::rational::{binomial, Rational};

/// `Σ_j c_j(z) D^j` with `D = d/dz`, stored by order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    coeffs: Vec<Poly>,
}

impl DiffOperator {
    pub fn new(mut coeffs: Vec<Poly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOperator { coeffs }
    }

    pub fn multiplication(p: Poly) -> Self {
        DiffOperator::new(vec![p])
    }

    /// `D^k`.
    pub fn d(k: usize) -> Self {
        let mut coeffs = vec![Poly::zero(); k + 1];
        coeffs[k] = Poly::one();
        DiffOperator { coeffs }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Poly {
        self.coeffs.get(j).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let n = self.coeffs.len().max(other.coeffs.len());
        DiffOperator::new((0..n).map(|j| &self.coeff(j) + &other.coeff(j)).collect())
    }

    pub fn neg(&self) -> DiffOperator {
        DiffOperator::new(self.coeffs.iter().map(|c| -c).collect())
    }

    /// `self ∘ other`, normalized with Leibniz: `D^j p = Σ_k C(j,k) p^{(k)} D^{j-k}`.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let mut out: Vec<Poly> = Vec::new();
        let mut push = |idx: usize, p: Poly| {
            if out.len() <= idx {
                out.resize(idx + 1, Poly::zero());
            }
            out[idx] = &out[idx] + &p;
        };
        for (j, cj) in self.coeffs.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (i, pi) in other.coeffs.iter().enumerate() {
                let mut deriv = pi.clone();
                for k in 0..=j {
                    if deriv.is_zero() {
                        break;
                    }
                    let c = Rational::from_integer(binomial(j as u64, k as u64));
                    push(i + j - k, (cj * &deriv).scale(&c));
                    deriv = deriv.derivative();
                }
            }
        }
        DiffOperator::new(out)
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero();
        let mut deriv = p.clone();
        for c in &self.coeffs {
            acc = &acc + &(c * &deriv);
            deriv = deriv.derivative();
        }
        acc
    }

    /// Formal adjoint `ι(Σ P_j D^j) = Σ (-1)^j D^j ∘ P_j`, renormalized.
    pub fn adjoint(&self) -> DiffOperator {
        let mut acc = DiffOperator::new(Vec::new());
        for (j, pj) in self.coeffs.iter().enumerate() {
            let term = DiffOperator::d(j).compose(&DiffOperator::multiplication(pj.clone()));
            acc = acc.add(&if j % 2 == 1 { term.neg() } else { term });
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `L = −a D + b`.
    Direct,
    /// `L* = a D + (a′ + b)`.
    Adjoint,
}

/// The first-order operator attached to `(a, b)` in one of its two forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp1 {
    pub a: Poly,
    pub b: Poly,
    pub orientation: Orientation,
}

impl DiffOp1 {
    pub fn new(a: Poly, b: Poly) -> Self {
        DiffOp1 { a, b, orientation: Orientation::Direct }
    }

    pub fn adjoint(&self) -> DiffOp1 {
        let orientation = match self.orientation {
            Orientation::Direct => Orientation::Adjoint,
            Orientation::Adjoint => Orientation::Direct,
        };
        DiffOp1 { a: self.a.clone(), b: self.b.clone(), orientation }
    }

    pub fn to_operator(&self) -> DiffOperator {
        match self.orientation {
            Orientation::Direct => DiffOperator::new(vec![self.b.clone(), -&self.a]),
            Orientation::Adjoint => DiffOperator::new(vec![&self.a.derivative() + &self.b, self.a.clone()]),
        }
    }

    pub fn apply(&self, p: &Poly) -> Poly {
        self.to_operator().apply(p)
    }
}

/// Generalized binomial `C(x, i)` for rational `x`.
pub fn gen_binomial(x: &Rational, i: usize) -> Rational {
    let mut acc = Rational::one();
    for r in 0..i {
        acc *= x - Rational::from_integer(BigInt::from(r));
        acc /= Rational::from_integer(BigInt::from(r + 1));
    }
    acc
}

/// `Σ_i C(−μ,i) Q^{(i)} D^{m−i} − Σ_j C(−μ−1,j) R^{(j)} D^{m−1−j}`.
pub fn jordan_pochhammer(q: &Poly, r: &Poly, mu: &Rational, m: usize) -> DiffOperator {
    let mut coeffs = vec![Poly::zero(); m + 1];
    let neg_mu = -mu.clone();
    let neg_mu_1 = &neg_mu - Rational::one();
    for i in 0..=m {
        let c = gen_binomial(&neg_mu, i);
        coeffs[m - i] = &coeffs[m - i] + &q.nth_derivative(i).scale(&c);
    }
    for j in 0..m {
        let c = gen_binomial(&neg_mu_1, j);
        coeffs[m - 1 - j] = &coeffs[m - 1 - j] - &r.nth_derivative(j).scale(&c);
    }
    DiffOperator::new(coeffs)
}

/// Both sides of the reduction of `D^{m−1}(a D − b)` to Jordan–Pochhammer form
/// with `Q = a`, `R = a′ + b`, `μ = −m`.
pub fn jp_expand(a: &Poly, b: &Poly) -> (DiffOperator, DiffOperator) {
    let m = a.degree().expect("nonzero a");
    let inner = DiffOperator::new(vec![-b, a.clone()]);
    let composed = DiffOperator::d(m - 1).compose(&inner);
    let binomial_form = jordan_pochhammer(a, &(&a.derivative() + b), &-Rational::from_integer(BigInt::from(m)), m);
    (composed, binomial_form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(cs: &[i64]) -> Poly {
        Poly::from_ints(cs)
    }

    #[test]
    fn adjoint_of_minus_d() {
        let l = DiffOp1::new(Poly::one(), Poly::zero());
        assert_eq!(l.to_operator(), DiffOperator::d(1).neg());
        assert_eq!(l.adjoint().to_operator(), DiffOperator::d(1));
        assert_eq!(l.to_operator().adjoint(), DiffOperator::d(1));
    }

    #[test]
    fn adjoint_matches_closed_form() {
        let a = p(&[0, -1, 1]);
        let b = Poly::new(vec![rat(-1, 2), int(1)]);
        let l = DiffOp1::new(a.clone(), b.clone());
        let star = l.to_operator().adjoint();
        assert_eq!(star, l.adjoint().to_operator());
        assert_eq!(star.coeff(1), a);
        assert_eq!(star.coeff(0), Poly::new(vec![rat(-3, 2), int(3)]));
        assert_eq!(star.adjoint(), l.to_operator());
    }

    #[test]
    fn adjoint_reverses_products() {
        let ops = [
            DiffOperator::new(vec![p(&[1, 2]), p(&[0, 0, 1])]),
            DiffOperator::new(vec![p(&[0, 3]), p(&[1]), p(&[2, 0, 1])]),
            DiffOperator::new(vec![p(&[5]), p(&[0, 1])]),
        ];
        for l1 in &ops {
            for l2 in &ops {
                assert_eq!(l1.compose(l2).adjoint(), l2.adjoint().compose(&l1.adjoint()));
            }
        }
    }

    #[test]
    fn compose_applies_sequentially() {
        let l1 = DiffOperator::new(vec![p(&[1, 2]), p(&[0, 0, 1])]);
        let l2 = DiffOperator::new(vec![p(&[0, 3]), p(&[1]), p(&[2, 0, 1])]);
        let x = p(&[1, -1, 4, 0, 2]);
        assert_eq!(l1.compose(&l2).apply(&x), l1.apply(&l2.apply(&x)));
    }

    #[test]
    fn jp_small() {
        let a = p(&[0, -1, 1]);
        let b = Poly::new(vec![rat(-1, 2), int(1)]);
        let (lhs, rhs) = jp_expand(&a, &b);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.coeff(2), a);
        assert_eq!(lhs.coeff(0), -&b.nth_derivative(1));
    }
}
