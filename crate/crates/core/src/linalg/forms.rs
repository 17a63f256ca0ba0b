//! Alternating multilinear forms on matrix space.
//!
//! A form of arity `k` is given by `k` linear functionals `φ_i` and evaluates
//! to `det[φ_i(A_j)]`. Every alternating `k`-form on `M_n` restricted to a
//! `k`-dimensional subspace is a multiple of such a determinant, so
//! coordinate functionals chosen by pivoting suffice to read off ratios of
//! wedges.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{c, ComplexMatrix};
use crate::error::{Error, Result};

/// Relative threshold on `|Ω(args)| / ∏‖args‖` below which an argument
/// family counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// `|φ(𝟙)|` allowed for functionals flagged as identity-annihilating.
const ANNIHILATION_TOL: f64 = 1e-12;

/// Fraction of the largest candidate that seeded pivoting may still pick.
const SEEDED_PIVOT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalLabel {
    /// `A ↦ A[row, col]`
    Entry { row: usize, col: usize },
    /// `A ↦ A[first, first] − A[second, second]`
    DiagonalDifference { first: usize, second: usize },
    General,
}

impl fmt::Display for FunctionalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionalLabel::Entry { row, col } => write!(f, "({row},{col})"),
            FunctionalLabel::DiagonalDifference { first, second } => {
                write!(f, "({first},{first})-({second},{second})")
            }
            FunctionalLabel::General => write!(f, "general"),
        }
    }
}

/// Linear functional `A ↦ Σ c_ij A_ij` on `n×n` matrices.
#[derive(Debug, Clone)]
pub struct LinearFunctional {
    coeffs: ComplexMatrix,
    label: FunctionalLabel,
}

impl LinearFunctional {
    pub fn entry(n: usize, row: usize, col: usize) -> Self {
        assert!(row < n && col < n, "entry ({row},{col}) outside {n}x{n}");
        let coeffs = ComplexMatrix::from_fn(n, |i, j| {
            if (i, j) == (row, col) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        LinearFunctional {
            coeffs,
            label: FunctionalLabel::Entry { row, col },
        }
    }

    pub fn diagonal_difference(n: usize, first: usize, second: usize) -> Self {
        assert!(first < n && second < n && first != second);
        let coeffs = ComplexMatrix::from_fn(n, |i, j| match (i == j, i) {
            (true, i) if i == first => c(1.0, 0.0),
            (true, i) if i == second => c(-1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        LinearFunctional {
            coeffs,
            label: FunctionalLabel::DiagonalDifference { first, second },
        }
    }

    /// Arbitrary coefficient array; must not be identically zero.
    pub fn general(coeffs: ComplexMatrix) -> Result<Self> {
        if coeffs.inner().iter().all(|z| *z == c(0.0, 0.0)) {
            return Err(Error::InvalidArgument("functional has no nonzero coefficient".into()));
        }
        Ok(LinearFunctional {
            coeffs,
            label: FunctionalLabel::General,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn label(&self) -> FunctionalLabel {
        self.label
    }

    pub fn coefficients(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    /// Assumes `a` has the functional's dimension.
    pub fn apply(&self, a: &ComplexMatrix) -> Complex64 {
        match self.label {
            FunctionalLabel::Entry { row, col } => a.get(row, col),
            FunctionalLabel::DiagonalDifference { first, second } => {
                a.get(first, first) - a.get(second, second)
            }
            FunctionalLabel::General => self
                .coeffs
                .inner()
                .iter()
                .zip(a.inner().iter())
                .map(|(x, y)| x * y)
                .sum(),
        }
    }
}

/// An alternating form `Ω(A_1, …, A_k) = det[φ_i(A_j)]`.
#[derive(Debug, Clone)]
pub struct AlternatingFormSpec {
    functionals: Vec<LinearFunctional>,
    identity_annihilating: bool,
}

impl AlternatingFormSpec {
    pub fn new(functionals: Vec<LinearFunctional>, identity_annihilating: bool) -> Result<Self> {
        let Some(first) = functionals.first() else {
            return Err(Error::InvalidArgument("form needs at least one functional".into()));
        };
        let n = first.dim();
        if let Some(bad) = functionals.iter().find(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        if identity_annihilating {
            let one = ComplexMatrix::identity(n);
            if let Some(f) = functionals.iter().find(|f| f.apply(&one).norm() > ANNIHILATION_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "functional {} does not vanish on the identity",
                    f.label()
                )));
            }
        }
        Ok(AlternatingFormSpec {
            functionals,
            identity_annihilating,
        })
    }

    pub fn arity(&self) -> usize {
        self.functionals.len()
    }

    pub fn dim(&self) -> usize {
        self.functionals[0].dim()
    }

    pub fn functionals(&self) -> &[LinearFunctional] {
        &self.functionals
    }

    pub fn identity_annihilating(&self) -> bool {
        self.identity_annihilating
    }

    /// Matrix `[φ_i(A_j)]` laid out with one row per argument.
    pub(crate) fn evaluation_rows(&self, args: &[ComplexMatrix]) -> Vec<Vec<Complex64>> {
        args.iter()
            .map(|a| self.functionals.iter().map(|f| f.apply(a)).collect())
            .collect()
    }

    pub fn describe(&self) -> String {
        let labels: Vec<String> = self.functionals.iter().map(|f| f.label().to_string()).collect();
        labels.join(" ")
    }
}

/// Determinant by Gaussian elimination with partial pivoting on rows.
///
/// Permuting input rows leaves the elimination unchanged up to ties, so
/// swapping two rows negates the result exactly.
pub fn det_rows(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let k = m.len();
    let mut det = c(1.0, 0.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()).then(b.cmp(&a)))
            .unwrap();
        if m[pivot][col] == c(0.0, 0.0) {
            return c(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..k {
            let factor = m[row][col] / p;
            if factor == c(0.0, 0.0) {
                continue;
            }
            for j in col + 1..k {
                let delta = factor * m[col][j];
                m[row][j] -= delta;
            }
        }
    }
    det
}

/// Evaluates `Ω(args) = det[φ_i(args_j)]`.
pub fn eval_form(form: &AlternatingFormSpec, args: &[ComplexMatrix]) -> Result<Complex64> {
    if args.len() != form.arity() {
        return Err(Error::DimensionMismatch {
            expected: form.arity(),
            found: args.len(),
        });
    }
    if let Some(bad) = args.iter().find(|a| a.dim() != form.dim()) {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            found: bad.dim(),
        });
    }
    Ok(det_rows(form.evaluation_rows(args)))
}

/// Result of [`pivot_select`].
#[derive(Debug, Clone)]
pub struct PivotSelection {
    pub form: AlternatingFormSpec,
    /// `|Ω(args)|` for the selected form.
    pub achieved: f64,
    /// `DEGENERACY_THRESHOLD · ∏‖args_j‖`.
    pub threshold: f64,
}

impl PivotSelection {
    /// Achieved value relative to the product of argument norms.
    pub fn relative(&self) -> f64 {
        self.achieved * DEGENERACY_THRESHOLD / self.threshold
    }
}

fn candidates(n: usize, identity_annihilating: bool) -> Vec<LinearFunctional> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if !identity_annihilating || i != j {
                out.push(LinearFunctional::entry(n, i, j));
            }
        }
    }
    if identity_annihilating {
        for i in 0..n.saturating_sub(1) {
            out.push(LinearFunctional::diagonal_difference(n, i, i + 1));
        }
    }
    out
}

/// Chooses `k` coordinate functionals making `|Ω(args)|` large.
///
/// Runs complete-pivoting elimination on the `k × n²` matrix of normalized,
/// vectorized arguments. With `seed = None` the largest pivot is taken at
/// every step. With a seed, the pivot is drawn uniformly among candidates
/// within a factor [`SEEDED_PIVOT_FRACTION`] of the largest, which yields an
/// independent but still well-conditioned selection.
pub fn pivot_select(
    args: &[ComplexMatrix],
    k: usize,
    identity_annihilating: bool,
    seed: Option<u64>,
) -> Result<PivotSelection> {
    if args.len() != k || k == 0 {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: args.len(),
        });
    }
    let n = args[0].dim();
    if let Some(bad) = args.iter().find(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dim(),
        });
    }
    let norm_product: f64 = args.iter().map(|a| a.norm()).product();
    let threshold = DEGENERACY_THRESHOLD * norm_product;
    let degenerate = |achieved: f64| Error::DegenerateFamily { achieved, threshold };
    if norm_product == 0.0 {
        return Err(degenerate(0.0));
    }

    let pool = candidates(n, identity_annihilating);
    let mut table: Vec<Vec<Complex64>> = args
        .iter()
        .map(|a| {
            let norm = a.norm();
            pool.iter().map(|f| f.apply(a) / norm).collect()
        })
        .collect();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut used = vec![false; pool.len()];
    let mut chosen = Vec::with_capacity(k);

    for step in 0..k {
        let mut best = 0.0_f64;
        for row in &table[step..] {
            for (col, z) in row.iter().enumerate() {
                if !used[col] {
                    best = best.max(z.norm());
                }
            }
        }
        if best == 0.0 {
            return Err(degenerate(0.0));
        }
        let cutoff = match rng {
            Some(_) => SEEDED_PIVOT_FRACTION * best,
            None => best,
        };
        let mut eligible = Vec::new();
        for (r, row) in table.iter().enumerate().skip(step) {
            for (col, z) in row.iter().enumerate() {
                if !used[col] && z.norm() >= cutoff {
                    eligible.push((r, col));
                }
            }
        }
        let (prow, pcol) = match rng.as_mut() {
            Some(rng) => eligible[rng.random_range(0..eligible.len())],
            None => eligible[0],
        };
        used[pcol] = true;
        chosen.push(pcol);
        table.swap(step, prow);
        let pivot = table[step][pcol];
        for r in step + 1..k {
            let factor = table[r][pcol] / pivot;
            if factor == c(0.0, 0.0) {
                continue;
            }
            for col in 0..pool.len() {
                if !used[col] || col == pcol {
                    let delta = factor * table[step][col];
                    table[r][col] -= delta;
                }
            }
        }
    }

    let functionals = chosen.into_iter().map(|i| pool[i].clone()).collect();
    let form = AlternatingFormSpec::new(functionals, identity_annihilating)?;
    let achieved = eval_form(&form, args)?.norm();
    if !(achieved >= threshold) {
        return Err(degenerate(achieved));
    }
    Ok(PivotSelection {
        form,
        achieved,
        threshold,
    })
}
