//! Exact determinants and nullspaces.

use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::rational::Rational;

/// Integral-domain operations needed by fraction-free elimination.
pub trait ExactRing: Clone {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Self;
}

impl ExactRing for Rational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl ExactRing for Poly {
    fn zero_elem() -> Self {
        Poly::zero()
    }
    fn one_elem() -> Self {
        Poly::one()
    }
    fn is_zero_elem(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, o: &Self) -> Self {
        self.exact_div(o).expect("Bareiss division must be exact")
    }
}

/// Bareiss fraction-free determinant of a square matrix.
pub fn bareiss_det<T: ExactRing>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one_elem();
    }
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let mut sign_flip = false;
    let mut prev = T::one_elem();
    for k in 0..n - 1 {
        if m[k][k].is_zero_elem() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero_elem()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return T::zero_elem(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        d.neg()
    } else {
        d
    }
}

/// Cofactor expansion, for cross-checking on small matrices.
pub fn laplace_det<T: ExactRing>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one_elem();
    }
    let mut acc = T::zero_elem();
    for c in 0..n {
        if m[0][c].is_zero_elem() {
            continue;
        }
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][c].mul(&laplace_det(&minor));
        acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Basis of the right nullspace `{x : A x = 0}` via reduced row echelon form.
pub fn nullspace(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..ncols {
                    let d = &f * &m[row][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            v
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn small_dets() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        assert_eq!(bareiss_det(m), int(5));
        let m = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(bareiss_det(m), int(-1));
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(bareiss_det(m), int(0));
    }

    #[test]
    fn poly_det() {
        // det((1, z), (0, 1)) = 1
        let m = vec![vec![Poly::one(), Poly::z()], vec![Poly::zero(), Poly::one()]];
        assert_eq!(bareiss_det(m), Poly::one());
        let m = vec![vec![Poly::z(), Poly::one()], vec![Poly::one(), Poly::z()]];
        assert_eq!(bareiss_det(m), Poly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn nullspace_basic() {
        let a = vec![vec![int(1), int(1), int(0)], vec![int(0), int(0), int(1)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns, vec![vec![int(-1), int(1), int(0)]]);
        assert!(mat_vec(&a, &ns[0]).iter().all(|x| x.is_zero()));
    }

    proptest! {
        #[test]
        fn bareiss_matches_laplace(entries in prop::collection::vec((-6i64..6, 1i64..4), 16)) {
            let m: Vec<Vec<Rational>> = entries.chunks(4).map(|c| c.iter().map(|&(n, d)| rat(n, d)).collect()).collect();
            prop_assert_eq!(bareiss_det(m.clone()), laplace_det(&m));
        }

        #[test]
        fn nullspace_vectors_annihilate(entries in prop::collection::vec(-3i64..3, 15)) {
            let a: Vec<Vec<Rational>> = entries.chunks(5).map(|c| c.iter().map(|&x| int(x)).collect()).collect();
            let ns = nullspace(&a, 5);
            prop_assert!(ns.len() >= 2);
            for v in ns {
                prop_assert!(mat_vec(&a, &v).iter().all(|x| x.is_zero()));
            }
        }
    }
}
