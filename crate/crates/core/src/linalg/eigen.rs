use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{c, ComplexMatrix};
use crate::error::{Error, Result};

/// Default bound on the eigenvector condition number accepted by
/// [`principal_sqrt`].
pub const DEFAULT_CONDITION_BOUND: f64 = 1e8;

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues and unit-norm right eigenvectors of a square matrix.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<Complex64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: ComplexMatrix,
    /// `‖V‖₂‖V⁻¹‖₂`; infinite when `V` is exactly singular.
    pub condition: f64,
}

impl Eigendecomposition {
    /// `‖gV − V·diag(values)‖_F / ‖g‖_F`.
    pub fn residual(&self, g: &ComplexMatrix) -> f64 {
        let v = self.vectors.inner();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.values.clone()));
        let r = g.inner() * v - v * d;
        r.norm() / g.norm().max(f64::MIN_POSITIVE)
    }
}

/// Complex Schur form followed by triangular back-substitution for the
/// eigenvectors.
pub fn eigenvalues(g: &ComplexMatrix) -> Result<Eigendecomposition> {
    let n = g.dim();
    let schur = Schur::try_new(g.inner().clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let (q, t) = schur.unpack();
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    // Near-equal diagonal entries are nudged apart, as in LAPACK's trevc.
    let small = (f64::EPSILON * t.norm()).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = c(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = c(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut denom = t[(i, i)] - t[(k, k)];
            if denom.norm() < small {
                denom = c(small, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
    }
    let mut v = q * y;
    for k in 0..n {
        let norm = v.column(k).norm();
        if norm > 0.0 && norm.is_finite() {
            v.column_mut(k).unscale_mut(norm);
        }
    }
    let vectors = ComplexMatrix::from_inner(v);
    let sv = vectors.singular_values();
    let sigma_min = *sv.last().unwrap();
    let condition = if sigma_min > 0.0 { sv[0] / sigma_min } else { f64::INFINITY };
    Ok(Eigendecomposition {
        values,
        vectors,
        condition,
    })
}

/// Square root with arguments in `(−π/2, π/2]`; the negative real axis maps
/// to the positive imaginary axis regardless of the sign of zero.
pub(crate) fn principal_scalar_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        c(0.0, (-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

/// Principal square root through the eigendecomposition `g = V Λ V⁻¹`.
pub fn principal_sqrt(g: &ComplexMatrix, condition_bound: f64) -> Result<ComplexMatrix> {
    let eig = eigenvalues(g)?;
    if !(eig.condition <= condition_bound) {
        return Err(Error::NotDiagonalizable {
            condition: eig.condition,
            bound: condition_bound,
        });
    }
    let scale = eig.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = eig
        .values
        .iter()
        .find(|z| z.norm() <= super::SINGULAR_THRESHOLD * scale)
    {
        return Err(Error::SingularMatrix {
            sigma_min: z.norm(),
            norm: scale,
        });
    }
    let roots: Vec<Complex64> = eig.values.iter().map(|&z| principal_scalar_sqrt(z)).collect();
    let v = eig.vectors.inner();
    let v_inv = v
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::NotDiagonalizable {
            condition: f64::INFINITY,
            bound: condition_bound,
        })?;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    Ok(ComplexMatrix::from_inner(v * d * v_inv))
}
