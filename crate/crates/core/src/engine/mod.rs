//! Character evaluators: ratios of alternating forms applied to matrix powers.

mod centered;
mod fallback;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use self::centered::{Expansion, Series};
use crate::domain::{exponents, membership_defect, regular_exponents, rho, DominantWeight, Family, GroupDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{
    c, eval_form, pfaffian, pivot_select, principal_sqrt, AlternatingFormSpec, ComplexMatrix, HalfInteger,
    PowerTable, DEFAULT_CONDITION_BOUND,
};

pub use self::fallback::{perturbation_fallback, FALLBACK_EPSILONS, FALLBACK_SPREAD};

pub const DEFAULT_MAX_EXPONENT: u32 = 32;
/// Environment variable overriding [`DEFAULT_MAX_EXPONENT`].
pub const MAX_EXPONENT_ENV: &str = "CHARCLASS_MAX_EXP";
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

/// Tolerance on `‖AᵀJ + JA‖` relative to `‖A‖‖J‖` in [`pfaffian_q`].
const ALGEBRA_TOL: f64 = 1e-8;

/// Which GL formula to use: `r+1` arguments, or `r` arguments with
/// identity-annihilating functionals (needs `λ_r = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Full,
    Reduced,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "reduced" => Ok(Variant::Reduced),
            _ => Err(Error::InvalidArgument(format!("unknown variant '{s}'"))),
        }
    }
}

/// How the form arguments are built.
///
/// `Powers` forms the matrix powers literally. `Centered` expands around the
/// scalar part of the base matrix and is accurate close to scalar matrices;
/// the perturbation fallback uses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    #[default]
    Powers,
    Centered,
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// `None` picks the largest pivots; a seed gives a randomized but still
    /// well-conditioned choice of functionals.
    pub pivot_seed: Option<u64>,
    pub max_exponent: u32,
    pub membership_tol: f64,
    pub sqrt_condition_bound: f64,
    pub route: Route,
    /// Retry degenerate inputs with [`perturbation_fallback`].
    pub fallback: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            pivot_seed: None,
            max_exponent: DEFAULT_MAX_EXPONENT,
            membership_tol: DEFAULT_MEMBERSHIP_TOL,
            sqrt_condition_bound: DEFAULT_CONDITION_BOUND,
            route: Route::Powers,
            fallback: false,
        }
    }
}

impl EvalOptions {
    /// Defaults, with the exponent cap read from `CHARCLASS_MAX_EXP` if set.
    pub fn from_env() -> Result<Self> {
        let mut opts = EvalOptions::default();
        if let Ok(raw) = std::env::var(MAX_EXPONENT_ENV) {
            opts.max_exponent = raw
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("{MAX_EXPONENT_ENV}={raw} is not a nonnegative integer")))?;
        }
        Ok(opts)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterResult {
    pub value: Complex64,
    pub method: String,
    /// `|Ω(denominator arguments)|` for the chosen functionals.
    pub denom_magnitude: f64,
    pub pivot_report: String,
    pub perturbed: bool,
    /// Spread across perturbation directions, when `perturbed`.
    pub uncertainty: Option<f64>,
}

impl fmt::Display for CharacterResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.value, self.method)
    }
}

/// Character value, plus `χ_λ̄` for SO_EVEN.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub character: CharacterResult,
    pub conjugate: Option<CharacterResult>,
}

pub(crate) struct RatioOutcome {
    pub value: Complex64,
    pub denom_magnitude: f64,
    pub pivot_report: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArgKind {
    /// `a^e`
    Power,
    /// `a^e − a^{−e}`
    Difference,
    /// `a^e + a^{−e}`
    Sum,
}

/// `Ω(args(num)) / Ω(args(den))` with arguments built from powers of `base`.
struct PowerRatio<'a> {
    base: &'a ComplexMatrix,
    kind: ArgKind,
    num: Vec<i64>,
    den: Vec<i64>,
    identity_annihilating: bool,
}

impl PowerRatio<'_> {
    fn args(&self, table: &PowerTable, exps: &[i64]) -> Vec<ComplexMatrix> {
        exps.iter()
            .map(|&e| match self.kind {
                ArgKind::Power => table.get(e).clone(),
                ArgKind::Difference => table.get(e) - table.get(-e),
                ArgKind::Sum => table.get(e) + table.get(-e),
            })
            .collect()
    }

    fn solve(&self, opts: &EvalOptions) -> Result<RatioOutcome> {
        match opts.route {
            Route::Powers => self.solve_powers(opts.pivot_seed),
            Route::Centered => self.expansion()?.evaluate(opts.pivot_seed),
        }
    }

    fn solve_powers(&self, seed: Option<u64>) -> Result<RatioOutcome> {
        let all = self.num.iter().chain(self.den.iter());
        let (lo, hi) = match self.kind {
            ArgKind::Power => (all.clone().copied().min().unwrap(), all.copied().max().unwrap()),
            _ => {
                let m = all.map(|e| e.abs()).max().unwrap();
                (-m, m)
            }
        };
        let table = PowerTable::new(self.base, lo.min(0), hi.max(0))?;
        let den = self.args(&table, &self.den);
        let selection = pivot_select(&den, den.len(), self.identity_annihilating, seed)?;
        let d = eval_form(&selection.form, &den)?;
        let num = eval_form(&selection.form, &self.args(&table, &self.num))?;
        Ok(RatioOutcome {
            value: num / d,
            denom_magnitude: d.norm(),
            pivot_report: format!("{}, relative pivot {:.3e}", selection.form.describe(), selection.relative()),
        })
    }

    fn expansion(&self) -> Result<Expansion> {
        let n = self.base.dim();
        Ok(match self.kind {
            ArgKind::Power => {
                // Multiplying every argument by a^u leaves the ratio unchanged.
                let u = if self.identity_annihilating {
                    0
                } else {
                    -self.num.iter().chain(self.den.iter()).copied().min().unwrap().min(0)
                };
                let series = |e: &[i64]| e.iter().map(|&e| Series::Monomial((e + u) as u32)).collect();
                Expansion {
                    factor: None,
                    base: self.base.clone(),
                    num: series(&self.num),
                    den: series(&self.den),
                    identity_annihilating: self.identity_annihilating,
                }
            }
            ArgKind::Difference | ArgKind::Sum => {
                let inv = self.base.inverse()?;
                let half_sum = (self.base + &inv).scale(c(0.5, 0.0));
                let (factor, series): (_, fn(i64) -> Series) = if self.kind == ArgKind::Sum {
                    (None, |e| Series::TwiceChebyshevT(e.unsigned_abs() as u32))
                } else {
                    // a^e − a^{−e} = (a − a⁻¹)·U_{e−1}((a + a⁻¹)/2)
                    (Some(self.base - &inv), |e| match e {
                        0 => Series::Zero,
                        _ => Series::ChebyshevU(e.unsigned_abs() as u32 - 1, e.signum() as f64),
                    })
                };
                debug_assert_eq!(half_sum.dim(), n);
                Expansion {
                    factor,
                    base: half_sum,
                    num: self.num.iter().map(|&e| series(e)).collect(),
                    den: self.den.iter().map(|&e| series(e)).collect(),
                    identity_annihilating: self.identity_annihilating,
                }
            }
        })
    }
}

fn check_family(group: GroupDescriptor, expected: Family) -> Result<()> {
    if group.family() != expected {
        return Err(Error::WrongFamily(format!(
            "expected {expected}, got {}",
            group.family()
        )));
    }
    Ok(())
}

fn check_dim(g: &ComplexMatrix, group: GroupDescriptor) -> Result<()> {
    if g.dim() != group.matrix_dim() {
        return Err(Error::DimensionMismatch {
            expected: group.matrix_dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

fn check_member(g: &ComplexMatrix, group: GroupDescriptor, opts: &EvalOptions) -> Result<()> {
    check_dim(g, group)?;
    let defect = membership_defect(g, group)?;
    if !(defect <= opts.membership_tol) {
        return Err(Error::NotInGroup {
            group: group.to_string(),
            defect,
        });
    }
    Ok(())
}

fn check_cap<'a>(exps: impl IntoIterator<Item = &'a HalfInteger>, opts: &EvalOptions) -> Result<()> {
    for e in exps {
        if e.value().abs() > opts.max_exponent as f64 {
            return Err(Error::ExponentTooLarge {
                exponent: e.value(),
                cap: opts.max_exponent,
            });
        }
    }
    Ok(())
}

fn integers(e: &[HalfInteger]) -> Vec<i64> {
    e.iter().map(|h| h.as_integer().expect("integral exponent")).collect()
}

fn route_label(opts: &EvalOptions) -> &'static str {
    match opts.route {
        Route::Powers => "",
        Route::Centered => ", centered",
    }
}

fn result(outcome: RatioOutcome, method: String) -> CharacterResult {
    CharacterResult {
        value: outcome.value,
        method,
        denom_magnitude: outcome.denom_magnitude,
        pivot_report: outcome.pivot_report,
        perturbed: false,
        uncertainty: None,
    }
}

/// Numerator and denominator exponents of the GL formula.
fn gl_exponents(weight: &DominantWeight, t_shift: i64, variant: Variant) -> Result<(Vec<i64>, Vec<i64>)> {
    let group = weight.group();
    let ell = integers(&exponents(weight, t_shift).0);
    let rho = integers(&rho(group, t_shift).0);
    match variant {
        Variant::Full => Ok((ell, rho)),
        Variant::Reduced => {
            if *weight.entries().last().unwrap() != 0 {
                return Err(Error::InvalidWeight(
                    "the reduced variant needs the last weight entry to be 0".into(),
                ));
            }
            if t_shift != 0 {
                return Err(Error::InvalidArgument("the reduced variant is defined for t_shift = 0".into()));
            }
            let r = ell.len() - 1;
            Ok((ell[..r].to_vec(), rho[..r].to_vec()))
        }
    }
}

fn gl_like(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    opts: &EvalOptions,
    label: String,
) -> Result<CharacterResult> {
    check_dim(g, weight.group())?;
    let (num, den) = gl_exponents(weight, t_shift, variant)?;
    let halves: Vec<HalfInteger> = num.iter().chain(den.iter()).map(|&e| HalfInteger::from_integer(e)).collect();
    check_cap(&halves, opts)?;
    let ratio = PowerRatio {
        base: g,
        kind: ArgKind::Power,
        num,
        den,
        identity_annihilating: variant == Variant::Reduced,
    };
    Ok(result(ratio.solve(opts)?, format!("{label}{}", route_label(opts))))
}

/// `χ_λ(g)` for GL: `Ω(g^{ℓ₀}, …, g^{ℓ_r}) / Ω(g^{r+t}, …, g^t)`, or the
/// reduced form with `r` arguments when `λ_r = 0`.
///
/// `g` may be singular as long as no exponent is negative.
pub fn char_gl(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    opts: &EvalOptions,
) -> Result<CharacterResult> {
    check_family(weight.group(), Family::Gl)?;
    let label = match variant {
        Variant::Full => format!("gl full t={t_shift}"),
        Variant::Reduced => "gl reduced".to_string(),
    };
    gl_like(g, weight, t_shift, variant, opts, label)
}

/// GL ratio with a caller-supplied form instead of a pivot-selected one.
pub fn char_gl_with_form(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    form: &AlternatingFormSpec,
) -> Result<Complex64> {
    check_family(weight.group(), Family::Gl)?;
    check_dim(g, weight.group())?;
    let (num, den) = gl_exponents(weight, t_shift, variant)?;
    if form.identity_annihilating() != (variant == Variant::Reduced) || form.arity() != den.len() {
        return Err(Error::InvalidArgument(format!(
            "form {} does not fit the {variant:?} variant",
            form.describe()
        )));
    }
    let lo = num.iter().chain(den.iter()).copied().min().unwrap().min(0);
    let hi = num.iter().chain(den.iter()).copied().max().unwrap().max(0);
    let table = PowerTable::new(g, lo, hi)?;
    let args = |e: &[i64]| e.iter().map(|&e| table.get(e).clone()).collect::<Vec<_>>();
    let d = eval_form(form, &args(&den))?;
    if d == c(0.0, 0.0) {
        return Err(Error::DegenerateFamily {
            achieved: 0.0,
            threshold: 0.0,
        });
    }
    Ok(eval_form(form, &args(&num))? / d)
}

/// `χ_λ(g)` for SL, from the canonical representative of `λ`.
pub fn char_sl(g: &ComplexMatrix, weight: &DominantWeight, opts: &EvalOptions) -> Result<CharacterResult> {
    check_family(weight.group(), Family::Sl)?;
    check_member(g, weight.group(), opts)?;
    gl_like(g, weight, 0, Variant::Full, opts, "sl".to_string())
}

/// `χ_λ(g)` for SO_ODD, using half-integral powers of `s = √g`.
pub fn char_b(g: &ComplexMatrix, weight: &DominantWeight, opts: &EvalOptions) -> Result<CharacterResult> {
    check_family(weight.group(), Family::SoOdd)?;
    check_member(g, weight.group(), opts)?;
    let s = principal_sqrt(g, opts.sqrt_condition_bound)?;
    char_b_with_root(g, &s, weight, opts)
}

/// [`char_b`] with a caller-chosen square root `s` of `g`.
pub fn char_b_with_root(
    g: &ComplexMatrix,
    s: &ComplexMatrix,
    weight: &DominantWeight,
    opts: &EvalOptions,
) -> Result<CharacterResult> {
    check_family(weight.group(), Family::SoOdd)?;
    check_dim(s, weight.group())?;
    if (s * s).relative_distance(g) > 1e-8 {
        return Err(Error::InvalidArgument("s is not a square root of g".into()));
    }
    let ell = exponents(weight, 0);
    let rho = rho(weight.group(), 0);
    check_cap(ell.0.iter().chain(rho.0.iter()), opts)?;
    let twice = |e: &[HalfInteger]| e.iter().map(|h| h.twice).collect::<Vec<_>>();
    let ratio = PowerRatio {
        base: s,
        kind: ArgKind::Difference,
        num: twice(&ell.0),
        den: twice(&rho.0),
        identity_annihilating: false,
    };
    Ok(result(ratio.solve(opts)?, format!("so-odd{}", route_label(opts))))
}

/// `χ_λ(g)` for SP.
pub fn char_c(g: &ComplexMatrix, weight: &DominantWeight, opts: &EvalOptions) -> Result<CharacterResult> {
    check_family(weight.group(), Family::Sp)?;
    check_member(g, weight.group(), opts)?;
    let ell = exponents(weight, 0);
    let rho = rho(weight.group(), 0);
    check_cap(ell.0.iter().chain(rho.0.iter()), opts)?;
    let ratio = PowerRatio {
        base: g,
        kind: ArgKind::Difference,
        num: integers(&ell.0),
        den: integers(&rho.0),
        identity_annihilating: false,
    };
    Ok(result(ratio.solve(opts)?, format!("sp{}", route_label(opts))))
}

/// The two halves of the SO_EVEN formula: `S⁺ = χ_λ + χ_λ̄` and
/// `S⁻ = χ_λ − χ_λ̄`. `S⁻` is exactly zero when `λ_r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DTypeParts {
    pub plus: CharacterResult,
    pub minus: CharacterResult,
}

pub fn char_d_parts(g: &ComplexMatrix, weight: &DominantWeight, opts: &EvalOptions) -> Result<DTypeParts> {
    let group = weight.group();
    check_family(group, Family::SoEven)?;
    check_member(g, group, opts)?;
    let r = group.rank();
    let ell = exponents(weight, 0);
    let rho = rho(group, 0);
    let e = regular_exponents(r);
    check_cap(ell.0.iter().chain(e.0.iter()), opts)?;
    let tag = route_label(opts);

    let plus = PowerRatio {
        base: g,
        kind: ArgKind::Sum,
        num: integers(&ell.0),
        den: integers(&rho.0),
        identity_annihilating: false,
    }
    .solve(opts)?;
    let plus = result(
        RatioOutcome {
            value: plus.value * 2.0,
            ..plus
        },
        format!("so-even plus{tag}"),
    );

    let minus = if *weight.entries().last().unwrap() == 0 {
        CharacterResult {
            value: c(0.0, 0.0),
            method: format!("so-even minus{tag}"),
            denom_magnitude: plus.denom_magnitude,
            pivot_report: "vanishes since the last weight entry is 0".to_string(),
            perturbed: false,
            uncertainty: None,
        }
    } else {
        let ratio = PowerRatio {
            base: g,
            kind: ArgKind::Difference,
            num: integers(&ell.0),
            den: integers(&e.0),
            identity_annihilating: false,
        }
        .solve(opts)?;
        let pf = pfaffian_q(&(g - &g.inverse()?), group)?;
        let value = c(0.0, 1.0).powi(r as i32) * pf * ratio.value;
        CharacterResult {
            value,
            method: format!("so-even minus{tag}"),
            denom_magnitude: ratio.denom_magnitude,
            pivot_report: format!("{}; Pf_Q = {}{:+}i", ratio.pivot_report, pf.re + 0.0, pf.im + 0.0),
            perturbed: false,
            uncertainty: None,
        }
    };
    Ok(DTypeParts { plus, minus })
}

/// `(χ_λ(g), χ_λ̄(g))` for SO_EVEN.
pub fn char_d(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    opts: &EvalOptions,
) -> Result<(CharacterResult, CharacterResult)> {
    let DTypeParts { plus, minus } = char_d_parts(g, weight, opts)?;
    let combine = |value: Complex64, label: &str| CharacterResult {
        value,
        method: format!("so-even{label}{}", route_label(opts)),
        denom_magnitude: plus.denom_magnitude.min(minus.denom_magnitude),
        pivot_report: format!("plus: {}; minus: {}", plus.pivot_report, minus.pivot_report),
        perturbed: false,
        uncertainty: None,
    };
    Ok((
        combine((plus.value + minus.value) * 0.5, ""),
        combine((plus.value - minus.value) * 0.5, " conjugate"),
    ))
}

/// Pfaffian of an element `A` of the orthogonal Lie algebra of the split form,
/// oriented so that `i^r·Pf_Q(g − g⁻¹) = (χ_ε − χ_ε̄)(g)`.
///
/// `A` is written in the basis `a_j = e_{x_j} + e_{y_j}`,
/// `b_j = −i(e_{x_j} − e_{y_j})`, which is orthonormal for the form `J` and
/// has determinant `(2i)^r` relative to the split basis. There `JA` becomes
/// skew-symmetric.
pub fn pfaffian_q(a: &ComplexMatrix, group: GroupDescriptor) -> Result<Complex64> {
    check_family(group, Family::SoEven)?;
    check_dim(a, group)?;
    let j = group.gram().expect("orthogonal form");
    let defect = (&(&a.transpose() * &j) + &(&j * a)).norm();
    if defect > ALGEBRA_TOL * (a.norm() * j.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::NotInAlgebra {
            defect: defect / (a.norm() * j.norm()).max(f64::MIN_POSITIVE),
        });
    }
    let n = group.matrix_dim();
    let (p, p_inv) = orthonormal_basis(n);
    let rotated = &(&p_inv * a) * &p;
    // Symmetrize away rounding before the skew check.
    let skew = (&rotated - &rotated.transpose()).scale(c(0.5, 0.0));
    pfaffian(&skew)
}

/// Block-diagonal change of basis used by [`pfaffian_q`] and its inverse.
fn orthonormal_basis(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let mut p = ComplexMatrix::zeros(n).into_inner();
    let mut q = ComplexMatrix::zeros(n).into_inner();
    for k in (0..n).step_by(2) {
        // columns a = (1, 1), b = (−i, i)
        p[(k, k)] = c(1.0, 0.0);
        p[(k + 1, k)] = c(1.0, 0.0);
        p[(k, k + 1)] = c(0.0, -1.0);
        p[(k + 1, k + 1)] = c(0.0, 1.0);
        q[(k, k)] = c(0.5, 0.0);
        q[(k, k + 1)] = c(0.5, 0.0);
        q[(k + 1, k)] = c(0.0, 0.5);
        q[(k + 1, k + 1)] = c(0.0, -0.5);
    }
    (
        ComplexMatrix::new(p).expect("finite"),
        ComplexMatrix::new(q).expect("finite"),
    )
}

/// `Ω(g₀, …, g_r) = Σ (−1)^i ω(g₀, …, ĝ_i, …, g_r)` for an `r`-form `ω`.
pub fn d_omega(omega: &AlternatingFormSpec, args: &[ComplexMatrix]) -> Result<Complex64> {
    if args.len() != omega.arity() + 1 {
        return Err(Error::DimensionMismatch {
            expected: omega.arity() + 1,
            found: args.len(),
        });
    }
    let mut total = c(0.0, 0.0);
    for i in 0..args.len() {
        let rest: Vec<ComplexMatrix> = args
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, a)| a.clone())
            .collect();
        let term = eval_form(omega, &rest)?;
        total += if i % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// Evaluates `χ_λ(g)` for any family, falling back to perturbation when the
/// direct formula is degenerate and `opts.fallback` is set. `t_shift` and
/// `variant` only matter for GL.
pub fn evaluate(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    match evaluate_direct(g, weight, t_shift, variant, opts) {
        Err(e) if e.is_degenerate() && opts.fallback => perturbation_fallback(g, weight, t_shift, variant, opts),
        other => other,
    }
}

pub(crate) fn evaluate_direct(
    g: &ComplexMatrix,
    weight: &DominantWeight,
    t_shift: i64,
    variant: Variant,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    let group = weight.group();
    if group.family() != Family::Gl && (t_shift != 0 || variant != Variant::Full) {
        return Err(Error::InvalidArgument(format!(
            "t_shift and the reduced variant apply to gl only, not {}",
            group.family()
        )));
    }
    let single = |character| Evaluation {
        character,
        conjugate: None,
    };
    Ok(match group.family() {
        Family::Gl => single(char_gl(g, weight, t_shift, variant, opts)?),
        Family::Sl => single(char_sl(g, weight, opts)?),
        Family::SoOdd => single(char_b(g, weight, opts)?),
        Family::Sp => single(char_c(g, weight, opts)?),
        Family::SoEven => {
            let (character, conjugate) = char_d(g, weight, opts)?;
            Evaluation {
                character,
                conjugate: Some(conjugate),
            }
        }
    })
}
