//! Dense exact matrices and vectors over [`Rational`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use crate::rational::{fmt_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Column/row vector of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RVector(pub Vec<Rational>);

impl RVector {
    pub fn zeros(len: usize) -> Self {
        RVector(vec![Rational::zero(); len])
    }

    pub fn unit(len: usize, idx: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[idx] = Rational::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn dot(&self, other: &RVector) -> Result<Rational, MatrixError> {
        if self.len() != other.len() {
            return Err(MatrixError::Dimension(format!(
                "dot of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b))
    }

    pub fn scale(&self, c: &Rational) -> RVector {
        RVector(self.0.iter().map(|x| x * c).collect())
    }

    /// Entries non-negative and summing to exactly one.
    pub fn is_distribution(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative()) && self.sum().is_one()
    }

    /// Row vector times matrix.
    pub fn mul_mat(&self, m: &RMatrix) -> Result<RVector, MatrixError> {
        if self.len() != m.rows {
            return Err(MatrixError::Dimension(format!(
                "row vector of length {} times {}x{} matrix",
                self.len(),
                m.rows,
                m.cols
            )));
        }
        let mut out = vec![Rational::zero(); m.cols];
        for (i, vi) in self.0.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = &m[(i, j)];
                if !a.is_zero() {
                    *o += vi * a;
                }
            }
        }
        Ok(RVector(out))
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl From<Vec<Rational>> for RVector {
    fn from(v: Vec<Rational>) -> Self {
        RVector(v)
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// All-ones square matrix.
    pub fn ones(n: usize) -> Self {
        RMatrix {
            rows: n,
            cols: n,
            data: vec![Rational::one(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        Ok(RMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sum(&self, i: usize) -> Rational {
        self.row(i).iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Every entry in [0,1] and every row summing to exactly one.
    pub fn is_stochastic(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative() && *x <= Rational::one())
            && (0..self.rows).all(|i| self.row_sum(i).is_one())
    }

    pub fn scale(&self, c: &Rational) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn transpose(&self) -> RMatrix {
        let mut t = RMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &RVector) -> Result<RVector, MatrixError> {
        if self.cols != v.len() {
            return Err(MatrixError::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(RVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&v.0)
                        .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
                })
                .collect(),
        ))
    }

    /// Exact `self^n` by repeated squaring; `n = 0` gives the identity.
    pub fn pow(&self, n: u64) -> Result<RMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut acc = RMatrix::identity(self.rows);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Evaluates the polynomial `Σ coeffs[i]·X^i` at this matrix.
    pub fn eval_poly(&self, coeffs: &[Rational]) -> Result<RMatrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        // Horner
        let n = self.rows;
        let mut acc = RMatrix::zeros(n, n);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self)?;
            acc = &acc + &RMatrix::identity(n).scale(c);
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

/// `v^T · M^n · w`.
pub fn bilinear_power(v: &RVector, m: &RMatrix, n: u64, w: &RVector) -> Result<Rational, MatrixError> {
    v.mul_mat(&m.pow(n)?)?.dot(w)
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &RMatrix, b: &RMatrix, f: impl Fn(&Rational, &Rational) -> Rational) -> RMatrix {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise op on mismatched shapes"
    );
    RMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f(x, y)).collect(),
    }
}

impl Add for &RMatrix {
    type Output = RMatrix;
    fn add(self, rhs: &RMatrix) -> RMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &RMatrix {
    type Output = RMatrix;
    fn sub(self, rhs: &RMatrix) -> RMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &RMatrix {
    type Output = RMatrix;
    fn neg(self) -> RMatrix {
        self.scale(&-Rational::one())
    }
}

impl Mul for &RMatrix {
    type Output = RMatrix;
    fn mul(self, rhs: &RMatrix) -> RMatrix {
        RMatrix::mul(self, rhs).expect("matrix product shape mismatch")
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let parts: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            writeln!(f, "[{}]", parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> RMatrix {
        RMatrix::from_rows(vec![vec![int(a), int(b)], vec![int(c), int(d)]]).unwrap()
    }

    #[test]
    fn pow_zero_and_one() {
        let a = m2(1, 2, 3, 4);
        assert_eq!(a.pow(0).unwrap(), RMatrix::identity(2));
        assert_eq!(a.pow(1).unwrap(), a);
    }

    #[test]
    fn fibonacci_power() {
        let f = m2(1, 1, 1, 0);
        assert_eq!(f.pow(10).unwrap()[(0, 1)], int(55));
    }

    #[test]
    fn rejects_non_square_power() {
        let m = RMatrix::zeros(2, 3);
        assert!(matches!(m.pow(2), Err(MatrixError::NotSquare { .. })));
    }

    #[test]
    fn stochastic_check_is_exact() {
        let ok = RMatrix::from_rows(vec![
            vec![ratio(1, 3), ratio(2, 3)],
            vec![int(0), int(1)],
        ])
        .unwrap();
        assert!(ok.is_stochastic());
        let bad = RMatrix::from_rows(vec![
            vec![ratio(1, 3), ratio(1, 3)],
            vec![int(0), int(1)],
        ])
        .unwrap();
        assert!(!bad.is_stochastic());
        let negative = RMatrix::from_rows(vec![vec![int(2), int(-1)]]).unwrap();
        assert!(!negative.is_stochastic());
    }

    #[test]
    fn eval_poly_cayley_hamilton_2x2() {
        // x^2 - 5x - 2 annihilates [[1,2],[3,4]]
        let a = m2(1, 2, 3, 4);
        assert!(a.eval_poly(&[int(-2), int(-5), int(1)]).unwrap().is_zero());
    }

    fn small_matrix() -> impl Strategy<Value = RMatrix> {
        (1usize..4).prop_flat_map(|n| {
            proptest::collection::vec((-3i64..=3, 1i64..=3), n * n).prop_map(move |cells| {
                let rows = cells
                    .chunks(n)
                    .map(|c| c.iter().map(|&(p, q)| ratio(p, q)).collect())
                    .collect();
                RMatrix::from_rows(rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn pow_is_additive_in_exponent(m in small_matrix(), a in 0u64..=8, b in 0u64..=8) {
            let lhs = m.pow(a + b).unwrap();
            let rhs = m.pow(a).unwrap().mul(&m.pow(b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
