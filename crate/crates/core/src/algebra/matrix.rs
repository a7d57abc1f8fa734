use std::ops::{Add, Mul, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Dense row-major matrix over an exact ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> ExactMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self
    where
        T: One,
    {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn map<U: Clone + Zero, F: FnMut(&T) -> U>(&self, mut f: F) -> ExactMatrix<U> {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(&mut f).collect() }
    }
}

impl<T> ExactMatrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                let b = o.get(k, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = &acc + &(a * b);
            }
            acc
        }))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }

    /// Determinant by Laplace expansion memoized over column subsets;
    /// division free, so it works over any commutative ring.
    pub fn det(&self, guard: usize) -> Result<T>
    where
        T: One,
    {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n > guard {
            return Err(Error::SizeGuard { what: "symbolic determinant", size: n, limit: guard });
        }
        Ok(self.det_laplace(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>()))
    }

    fn det_laplace(&self, rows: &[usize], cols: &[usize]) -> T
    where
        T: One,
    {
        let k = rows.len();
        if k == 0 {
            return T::one();
        }
        let full = 1usize << k;
        let mut f: Vec<T> = vec![T::zero(); full];
        f[0] = T::one();
        for mask in 1..full {
            let r = mask.count_ones() as usize - 1;
            let mut acc = T::zero();
            let mut pos = 0;
            for c in 0..k {
                if mask & (1 << c) == 0 {
                    continue;
                }
                // column c is the pos-th selected column
                let a = self.get(rows[r], cols[c]);
                let sub = &f[mask ^ (1 << c)];
                if !a.is_zero() && !sub.is_zero() {
                    let t = a * sub;
                    acc = if (r + pos) % 2 == 0 { &acc + &t } else { &acc - &t };
                }
                pos += 1;
            }
            f[mask] = acc;
        }
        f.pop().expect("nonempty table")
    }

    /// Adjugate (transposed cofactor matrix), so `M · adj(M) = det(M) · I`.
    pub fn adjugate(&self, guard: usize) -> Result<Self>
    where
        T: One,
    {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        if n > guard {
            return Err(Error::SizeGuard { what: "symbolic adjugate", size: n, limit: guard });
        }
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                let m = self.det_laplace(&rows, &cols);
                let v = if (i + j) % 2 == 0 { m } else { &T::zero() - &m };
                adj.set(j, i, v);
            }
        }
        Ok(adj)
    }
}

impl ExactMatrix<BigRational> {
    /// Rank by Gaussian elimination over the rationals.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank][c].clone();
            for r in rank + 1..self.rows {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = &m[r][c] / &pivot;
                for k in c..self.cols {
                    let d = &f * &m[rank][k];
                    m[r][k] -= d;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn det_rational(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Ok(BigRational::zero());
            };
            if p != c {
                m.swap(c, p);
                det = -det;
            }
            det *= &m[c][c];
            for r in c + 1..n {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = &m[r][c] / &m[c][c];
                for k in c..n {
                    let d = &f * &m[c][k];
                    m[r][k] -= d;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..2 * n)
                    .map(|j| if j < n { self.get(i, j).clone() } else if j - n == i { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .ok_or_else(|| Error::Singular("exact inverse".into()))?;
            a.swap(c, p);
            let inv = a[c][c].recip();
            for k in 0..2 * n {
                a[c][k] = &a[c][k] * &inv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let d = &f * &a[c][k];
                    a[r][k] -= d;
                }
            }
        }
        Ok(Self::from_fn(n, n, |i, j| a[i][j + n].clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::poly::{rat, Polynomial, Var};
    use super::*;

    fn qmat(rows: &[&[i64]]) -> ExactMatrix<BigRational> {
        ExactMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rat(rows[i][j]))
    }

    #[test]
    fn ranks() {
        assert_eq!(ExactMatrix::<BigRational>::identity(3).rank(), 3);
        assert_eq!(ExactMatrix::<BigRational>::zeros(3, 2).rank(), 0);
        assert_eq!(qmat(&[&[1, 2], &[2, 4], &[0, 0]]).rank(), 1);
        assert_eq!(qmat(&[&[0, 1, 2], &[1, 0, 3]]).rank(), 2);
    }

    #[test]
    fn determinants_agree() {
        let m = qmat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(8).unwrap(), rat(18));
        assert_eq!(m.det_rational().unwrap(), rat(18));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), ExactMatrix::identity(3));
        assert!(qmat(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn adjugate_of_one_by_one() {
        let x = Polynomial::var(Var::sigma(0, 0));
        let m = ExactMatrix::from_fn(1, 1, |_, _| x.clone());
        assert_eq!(m.adjugate(8).unwrap(), ExactMatrix::identity(1));
    }

    #[test]
    fn symbolic_adjugate_identity() {
        let m = ExactMatrix::from_fn(3, 3, |i, j| Polynomial::var(Var::sigma(i, j)));
        let adj = m.adjugate(8).unwrap();
        let det = m.det(8).unwrap();
        let prod = m.mul(&adj).unwrap();
        let expect = ExactMatrix::from_fn(3, 3, |i, j| if i == j { det.clone() } else { Polynomial::zero() });
        assert_eq!(prod, expect);
        assert!(m.det(2).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix() -> impl Strategy<Value = ExactMatrix<BigRational>> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                prop::collection::vec(-2i64..3, r * c).prop_map(move |v| ExactMatrix::from_fn(r, c, |i, j| rat(v[i * c + j])))
            })
        }

        proptest! {
            #[test]
            fn rank_invariances(m in arb_matrix(), seed in 0usize..100) {
                let r = m.rank();
                prop_assert_eq!(m.transpose().rank(), r);
                let mut rows: Vec<usize> = (0..m.rows()).collect();
                rows.rotate_left(seed % m.rows());
                let mut cols: Vec<usize> = (0..m.cols()).collect();
                cols.reverse();
                prop_assert_eq!(m.submatrix(&rows, &cols).rank(), r);
            }

            #[test]
            fn laplace_matches_elimination(m in arb_matrix()) {
                prop_assume!(m.rows() == m.cols());
                prop_assert_eq!(m.det(8).unwrap(), m.det_rational().unwrap());
            }
        }
    }
}
