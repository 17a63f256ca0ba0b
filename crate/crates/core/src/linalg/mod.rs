//! Dense complex linear algebra used by the character evaluators.
//!
//! Everything here works on [`ComplexMatrix`], a thin newtype over a square
//! `nalgebra::DMatrix<Complex64>`. The heavy lifting for Schur, SVD and LU is
//! delegated to nalgebra; matrix powers, square roots, alternating forms and
//! Pfaffians are implemented on top.

mod eigen;
mod forms;
mod pfaffian;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{eigenvalues, principal_sqrt, Eigendecomposition, DEFAULT_CONDITION_BOUND};
pub use forms::{
    det_rows, eval_form, pivot_select, AlternatingFormSpec, FunctionalLabel, LinearFunctional,
    PivotSelection, DEGENERACY_THRESHOLD,
};
pub use pfaffian::{pfaffian, pfaffian_expansion};

/// Relative bound on the smallest singular value below which a matrix is
/// treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps an nalgebra matrix, rejecting non-square or non-finite input.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inner.nrows(),
                found: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(ComplexMatrix(inner))
    }

    /// Builds a matrix from complex rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(n, n, f))
    }

    pub(crate) fn from_inner(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.is_square());
        ComplexMatrix(inner)
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(n, n))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        ComplexMatrix(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                values[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let values: Vec<Complex64> = values.iter().map(|&x| c(x, 0.0)).collect();
        Self::diagonal(&values)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix(&self.0 * factor)
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().lu().determinant()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.0.clone().svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Inverse, failing when the smallest singular value is below
    /// [`SINGULAR_THRESHOLD`] times the spectral norm.
    pub fn inverse(&self) -> Result<Self> {
        let sv = self.singular_values();
        let norm = sv[0];
        let sigma_min = *sv.last().unwrap();
        if norm == 0.0 || sigma_min < SINGULAR_THRESHOLD * norm {
            return Err(Error::SingularMatrix { sigma_min, norm });
        }
        self.0
            .clone()
            .lu()
            .try_inverse()
            .map(ComplexMatrix)
            .ok_or(Error::SingularMatrix { sigma_min, norm })
    }

    /// Largest absolute entry difference, relative to `max(‖self‖, ‖other‖, 1)`.
    pub fn relative_distance(&self, other: &ComplexMatrix) -> f64 {
        let scale = self.norm().max(other.norm()).max(1.0);
        (&self.0 - &other.0).norm() / scale
    }

    /// Matrix exponential (Padé approximation with scaling and squaring).
    pub fn exp(&self) -> Self {
        ComplexMatrix(self.0.exp())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.rows())
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// A number in `ℤ/2`, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    pub twice: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger { twice }
    }

    pub fn from_integer(value: i64) -> Self {
        HalfInteger { twice: 2 * value }
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if there is one.
    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.twice / 2)
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInteger { twice: self.twice.abs() }
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, rhs: HalfInteger) -> HalfInteger {
        HalfInteger { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> HalfInteger {
        HalfInteger { twice: -self.twice }
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/2", self.twice),
        }
    }
}

/// `g^k` by repeated squaring. Negative `k` inverts first.
pub fn mat_power(g: &ComplexMatrix, k: i64) -> Result<ComplexMatrix> {
    let base = if k < 0 { g.inverse()? } else { g.clone() };
    Ok(power_unsigned(&base, k.unsigned_abs()))
}

fn power_unsigned(base: &ComplexMatrix, mut e: u64) -> ComplexMatrix {
    let mut result = ComplexMatrix::identity(base.dim());
    let mut square = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &square;
        }
        e >>= 1;
        if e > 0 {
            square = &square * &square;
        }
    }
    result
}

/// `g^e` for a half-integer `e`, given a fixed square root `s` of `g`.
pub fn half_power(s: &ComplexMatrix, e: HalfInteger) -> Result<ComplexMatrix> {
    mat_power(s, e.twice)
}

/// Power table `g^lo, …, g^hi` sharing one inverse.
pub(crate) struct PowerTable {
    positive: Vec<ComplexMatrix>,
    negative: Vec<ComplexMatrix>,
}

impl PowerTable {
    pub(crate) fn new(g: &ComplexMatrix, min_exp: i64, max_exp: i64) -> Result<Self> {
        let n = g.dim();
        let mut positive = vec![ComplexMatrix::identity(n)];
        for _ in 0..max_exp.max(0) {
            let next = &positive[positive.len() - 1] * g;
            positive.push(next);
        }
        let mut negative = vec![ComplexMatrix::identity(n)];
        if min_exp < 0 {
            let inv = g.inverse()?;
            for _ in 0..min_exp.unsigned_abs() {
                let next = &negative[negative.len() - 1] * &inv;
                negative.push(next);
            }
        }
        Ok(PowerTable { positive, negative })
    }

    pub(crate) fn get(&self, k: i64) -> &ComplexMatrix {
        if k >= 0 {
            &self.positive[k as usize]
        } else {
            &self.negative[k.unsigned_abs() as usize]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.relative_distance(b) <= tol
    }

    #[test]
    fn diagonal_power() {
        let g = ComplexMatrix::real_diagonal(&[2.0, 3.0]);
        let p = mat_power(&g, 3).unwrap();
        assert_eq!(p, ComplexMatrix::real_diagonal(&[8.0, 27.0]));
    }

    #[test]
    fn zeroth_power_is_identity() {
        let g = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(mat_power(&g, 0).unwrap(), ComplexMatrix::identity(2));
    }

    #[test]
    fn jordan_block_power() {
        // Oracle: multiply the block out four times.
        let g = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let mut direct = ComplexMatrix::identity(2);
        for _ in 0..4 {
            direct = &direct * &g;
        }
        let expected = ComplexMatrix::from_real_rows(&[vec![1.0, 4.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(direct, expected);
        assert_eq!(mat_power(&g, 4).unwrap(), expected);
    }

    #[test]
    fn negative_power_of_singular_fails() {
        let g = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(mat_power(&g, -1), Err(Error::SingularMatrix { .. })));
        assert!(mat_power(&g, 2).is_ok());
    }

    #[test]
    fn half_powers_of_diagonal_root() {
        let s = ComplexMatrix::real_diagonal(&[2.0, 0.5, 1.0]);
        let p = half_power(&s, HalfInteger::from_twice(3)).unwrap();
        assert!(approx_eq(&p, &ComplexMatrix::real_diagonal(&[8.0, 0.125, 1.0]), 1e-15));
        let q = half_power(&s, HalfInteger::from_twice(-1)).unwrap();
        assert!(approx_eq(&q, &ComplexMatrix::real_diagonal(&[0.5, 2.0, 1.0]), 1e-15));
        assert_eq!(half_power(&s, HalfInteger::ZERO).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn power_table_matches_mat_power() {
        let g = ComplexMatrix::from_real_rows(&[vec![1.0, 0.3], vec![-0.2, 0.9]]).unwrap();
        let table = PowerTable::new(&g, -3, 4).unwrap();
        for k in -3..=4 {
            assert!(approx_eq(table.get(k), &mat_power(&g, k).unwrap(), 1e-14));
        }
    }

    #[test]
    fn rejects_non_square_rows() {
        assert!(ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(ComplexMatrix::from_real_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn half_integer_display() {
        assert_eq!(HalfInteger::from_twice(5).to_string(), "5/2");
        assert_eq!(HalfInteger::from_integer(-3).to_string(), "-3");
    }
}
