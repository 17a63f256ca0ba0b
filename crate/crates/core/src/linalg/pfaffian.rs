use num_complex::Complex64;

use super::{c, ComplexMatrix};
use crate::error::{Error, Result};

const SKEW_TOL: f64 = 1e-9;

fn check_skew(s: &ComplexMatrix) -> Result<()> {
    let n = s.dim();
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let defect = (s.inner() + s.inner().transpose()).norm();
    let norm = s.norm();
    if defect > SKEW_TOL * norm {
        return Err(Error::NotSkew {
            defect: defect / norm.max(f64::MIN_POSITIVE),
        });
    }
    Ok(())
}

/// Pfaffian by Parlett–Reid elimination (`A = L T Lᵀ` with `T` tridiagonal).
pub fn pfaffian(s: &ComplexMatrix) -> Result<Complex64> {
    check_skew(s)?;
    let n = s.dim();
    let mut a = s.rows();
    let mut pf = c(1.0, 0.0);
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let kp = (k + 1..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()).then(j.cmp(&i)))
            .unwrap();
        if kp != k + 1 {
            a.swap(k + 1, kp);
            for row in a.iter_mut() {
                row.swap(k + 1, kp);
            }
            pf = -pf;
        }
        let head = a[k][k + 1];
        if head == c(0.0, 0.0) {
            return Ok(c(0.0, 0.0));
        }
        pf *= head;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[k][j] / head).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[i][k + 1]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[i][j] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    Ok(pf)
}

/// Pfaffian by expansion along the first row. Exponential cost; meant as a
/// cross-check for small matrices.
pub fn pfaffian_expansion(s: &ComplexMatrix) -> Result<Complex64> {
    check_skew(s)?;
    let rows = s.rows();
    let idx: Vec<usize> = (0..s.dim()).collect();
    Ok(expand(&rows, &idx))
}

fn expand(a: &[Vec<Complex64>], idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return c(1.0, 0.0);
    }
    let first = idx[0];
    let mut total = c(0.0, 0.0);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx
            .iter()
            .copied()
            .filter(|&i| i != first && i != j)
            .collect();
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * a[first][j] * expand(a, &rest);
    }
    total
}
