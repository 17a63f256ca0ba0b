use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{evaluate_direct, CharacterResult, EvalOptions, Evaluation, Route, Variant};
use crate::domain::{random_algebra_element, DominantWeight};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

/// Step sizes; the second is half the first for Richardson extrapolation.
pub const FALLBACK_EPSILONS: [f64; 2] = [1e-3, 5e-4];
/// Largest accepted spread across directions, relative to `1 + |value|`.
pub const FALLBACK_SPREAD: f64 = 1e-4;

const DIRECTIONS: usize = 3;
const DEFAULT_SEED: u64 = 0x1f2e_3d4c_5b6a_7988;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

fn median_complex(values: &[Complex64]) -> Complex64 {
    c(
        median(values.iter().map(|z| z.re).collect()),
        median(values.iter().map(|z| z.im).collect()),
    )
}

fn combine(samples: &[Complex64], template: &CharacterResult) -> Result<CharacterResult> {
    let value = median_complex(samples);
    let spread = samples.iter().map(|z| (z - value).norm()).fold(0.0, f64::max);
    let limit = FALLBACK_SPREAD * (1.0 + value.norm());
    if spread > limit {
        return Err(Error::DegeneratePersistent { spread, limit });
    }
    Ok(CharacterResult {
        value,
        method: format!("{}, perturbed", template.method),
        denom_magnitude: template.denom_magnitude,
        pivot_report: template.pivot_report.clone(),
        perturbed: true,
        uncertainty: Some(spread),
    })
}

/// Evaluates at `g·exp(εX_k)` for a few random algebra directions `X_k` and
/// two step sizes, extrapolates `ε → 0` linearly and returns the median
/// across directions.
///
/// The perturbed points are evaluated on the centered route, which stays
/// accurate when `g·exp(εX)` is within `ε` of a scalar matrix.
pub fn perturbation_fallback(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    let group = weight.group();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.pivot_seed.unwrap_or(DEFAULT_SEED));
    let inner = EvalOptions {
        route: Route::Centered,
        fallback: false,
        ..opts.clone()
    };
    let mut main = Vec::with_capacity(DIRECTIONS);
    let mut conj = Vec::with_capacity(DIRECTIONS);
    let mut template = None;
    for _ in 0..DIRECTIONS {
        let x = random_algebra_element(group, &mut rng);
        let at = |eps: f64| evaluate_direct(&(g * &x.scale(c(eps, 0.0)).exp()), weight, t_shift, variant, &inner);
        let coarse = at(FALLBACK_EPSILONS[0])?;
        let fine = at(FALLBACK_EPSILONS[1])?;
        let extrapolate = |a: &CharacterResult, b: &CharacterResult| b.value * 2.0 - a.value;
        main.push(extrapolate(&coarse.character, &fine.character));
        if let (Some(a), Some(b)) = (&coarse.conjugate, &fine.conjugate) {
            conj.push(extrapolate(a, b));
        }
        template.get_or_insert(fine);
    }
    let template = template.expect("at least one direction");
    Ok(Evaluation {
        character: combine(&main, &template.character)?,
        conjugate: match &template.conjugate {
            Some(t) => Some(combine(&conj, t)?),
            None => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Family, GroupDescriptor};
    use crate::oracle::weyl_dim;

    fn weight(f: Family, r: usize, e: &[i64]) -> DominantWeight {
        DominantWeight::new(GroupDescriptor::new(f, r).unwrap(), e.to_vec()).unwrap()
    }

    fn fallback(g: &ComplexMatrix, w: &DominantWeight) -> CharacterResult {
        let opts = EvalOptions {
            fallback: true,
            ..EvalOptions::default()
        };
        super::super::evaluate(g, w, 0, Variant::Full, &opts).unwrap().character
    }

    #[test]
    fn identity_gives_dimension() {
        let r = fallback(&ComplexMatrix::identity(2), &weight(Family::Gl, 1, &[1, 0]));
        assert!(r.perturbed);
        assert!((r.value - c(2.0, 0.0)).norm() < 1e-4, "{}", r.value);
        let w = weight(Family::Gl, 2, &[1, 1, 0]);
        let r = fallback(&ComplexMatrix::identity(3), &w);
        assert!((r.value - c(weyl_dim(&w) as f64, 0.0)).norm() < 1e-4 * 3.0);
    }

    #[test]
    fn scalar_matrix() {
        let r = fallback(&ComplexMatrix::real_diagonal(&[2.0, 2.0]), &weight(Family::Gl, 1, &[2, 0]));
        assert!((r.value - c(12.0, 0.0)).norm() < 1e-4 * 12.0, "{}", r.value);
        assert!(r.uncertainty.unwrap() < 1e-4 * 13.0);
    }

    #[test]
    fn so_even_identity_pair() {
        let w = weight(Family::SoEven, 2, &[1, 1]);
        let opts = EvalOptions {
            fallback: true,
            ..EvalOptions::default()
        };
        let e = super::super::evaluate(&ComplexMatrix::identity(4), &w, 0, Variant::Full, &opts).unwrap();
        let d = weyl_dim(&w) as f64;
        assert!((e.character.value - c(d, 0.0)).norm() < 1e-3 * d);
        assert!((e.conjugate.unwrap().value - c(d, 0.0)).norm() < 1e-3 * d);
    }
}
