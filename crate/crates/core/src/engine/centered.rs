//! Ratio evaluation in a graded basis, for arguments close to a scalar.
//!
//! Each argument is `F·p(A)` for a polynomial `p`, a common left factor `F`
//! and a base matrix `A`. Writing `A = c𝟙 + B` with `c = tr A / n`, the
//! polynomials are re-expanded in powers of `B` so every argument becomes a
//! combination of `E_m = F·B^m`. Only the leading `k` basis elements enter a
//! determinant of functionals; the rest are reduced against them by a linear
//! solve. Near a scalar matrix this avoids the catastrophic cancellation that
//! plain powers suffer, since the small parameter stays factored out.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::RatioOutcome;
use crate::error::{Error, Result};
use crate::linalg::{c, det_rows, pivot_select, ComplexMatrix, DEGENERACY_THRESHOLD};

/// Polynomial attached to one argument.
#[derive(Debug, Clone, Copy)]
pub(super) enum Series {
    /// `x^e`.
    Monomial(u32),
    /// `2 T_n(x)`.
    TwiceChebyshevT(u32),
    /// `sign · U_n(x)`.
    ChebyshevU(u32, f64),
    Zero,
}

fn shift_mul(p: &[Complex64], center: Complex64, factor: f64) -> Vec<Complex64> {
    // factor·(center + w)·p(w)
    let mut out = vec![c(0.0, 0.0); p.len() + 1];
    for (k, &a) in p.iter().enumerate() {
        out[k] += a * center * factor;
        out[k + 1] += a * factor;
    }
    out
}

fn chebyshev(n: u32, center: Complex64, first: Vec<Complex64>) -> Vec<Complex64> {
    let mut prev = vec![c(1.0, 0.0)];
    if n == 0 {
        return prev;
    }
    let mut cur = first;
    for _ in 1..n {
        let mut next = shift_mul(&cur, center, 2.0);
        for (k, a) in prev.iter().enumerate() {
            next[k] -= a;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

impl Series {
    /// Coefficients of the polynomial in `w = x − center`.
    pub(super) fn coefficients(self, center: Complex64) -> Vec<Complex64> {
        match self {
            Series::Monomial(e) => {
                let mut p = vec![c(1.0, 0.0)];
                for _ in 0..e {
                    p = shift_mul(&p, center, 1.0);
                }
                p
            }
            Series::TwiceChebyshevT(n) => chebyshev(n, center, vec![center, c(1.0, 0.0)])
                .into_iter()
                .map(|a| a * 2.0)
                .collect(),
            Series::ChebyshevU(n, sign) => {
                chebyshev(n, center, vec![center * 2.0, c(2.0, 0.0)])
                    .into_iter()
                    .map(|a| a * sign)
                    .collect()
            }
            Series::Zero => vec![c(0.0, 0.0)],
        }
    }
}

pub(super) struct Expansion {
    pub factor: Option<ComplexMatrix>,
    pub base: ComplexMatrix,
    pub num: Vec<Series>,
    pub den: Vec<Series>,
    pub identity_annihilating: bool,
}

fn to_dmatrix(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, f)
}

impl Expansion {
    pub(super) fn evaluate(&self, seed: Option<u64>) -> Result<RatioOutcome> {
        let n = self.base.dim();
        let k = self.den.len();
        let center = self.base.trace() / n as f64;
        let b = &self.base - &ComplexMatrix::identity(n).scale(center);

        let num: Vec<Vec<Complex64>> = self.num.iter().map(|s| s.coefficients(center)).collect();
        let den: Vec<Vec<Complex64>> = self.den.iter().map(|s| s.coefficients(center)).collect();
        // E_0 is 𝟙 for identity-annihilating forms, so the leading block starts at 1.
        let first = usize::from(self.identity_annihilating);
        let len = num
            .iter()
            .chain(den.iter())
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .max(first + k);

        let mut basis = Vec::with_capacity(len);
        let mut e = self.factor.clone().unwrap_or_else(|| ComplexMatrix::identity(n));
        for m in 0..len {
            if m > 0 {
                e = &e * &b;
            }
            basis.push(e.clone());
        }

        let selection = pivot_select(&basis[first..first + k], k, self.identity_annihilating, seed)?;
        // rows[m][i] = φ_i(E_m)
        let rows = selection.form.evaluation_rows(&basis);
        let lead: Vec<usize> = (first..first + k).collect();
        let rest: Vec<usize> = (0..len).filter(|m| !lead.contains(m)).collect();
        let v_lead = to_dmatrix(k, k, |i, j| rows[lead[j]][i]);
        let v_rest = to_dmatrix(k, rest.len(), |i, j| rows[rest[j]][i]);
        let lu = v_lead.clone().lu();
        let h = lu.solve(&v_rest).ok_or(Error::DegenerateFamily {
            achieved: 0.0,
            threshold: selection.threshold,
        })?;

        let coef = |p: &[Complex64], m: usize| p.get(m).copied().unwrap_or(c(0.0, 0.0));
        let reduce = |polys: &[Vec<Complex64>]| -> Vec<Vec<Complex64>> {
            (0..k)
                .map(|i| {
                    polys
                        .iter()
                        .map(|p| {
                            let mut acc = coef(p, lead[i]);
                            for (r, &m) in rest.iter().enumerate() {
                                acc += h[(i, r)] * coef(p, m);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        };
        let n_num = reduce(&num);
        let n_den = reduce(&den);
        let col_norms: f64 = (0..k)
            .map(|j| (0..k).map(|i| n_den[i][j].norm_sqr()).sum::<f64>().sqrt())
            .product();
        let d_den = det_rows(n_den);
        if !(d_den.norm() > DEGENERACY_THRESHOLD * col_norms) {
            return Err(Error::DegenerateFamily {
                achieved: d_den.norm(),
                threshold: DEGENERACY_THRESHOLD * col_norms,
            });
        }
        let d_num = det_rows(n_num);
        Ok(RatioOutcome {
            value: d_num / d_den,
            denom_magnitude: (lu.determinant() * d_den).norm(),
            pivot_report: format!(
                "{} on centered basis, relative pivot {:.3e}",
                selection.form.describe(),
                selection.relative()
            ),
        })
    }
}
