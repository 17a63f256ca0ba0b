//! Command-line front end. [`run`] parses arguments, writes the report and
//! returns the process exit code.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{is_member, sample, DominantWeight, Family, GroupDescriptor};
use crate::engine::{self, evaluate, EvalOptions, Evaluation, Variant};
use crate::error::Error;
use crate::linalg::{c, ComplexMatrix};
use crate::oracle::{torus_coords, weyl_char, weyl_dim};
use crate::relative_discrepancy;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_NOT_IN_GROUP: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

/// Largest weight entry drawn by `verify`.
const VERIFY_MAX_ENTRY: i64 = 6;
/// Scale of the Lie algebra element exponentiated by `verify`.
const VERIFY_SCALE: f64 = 1.0;
/// Tolerance for `dim --check`.
const DIM_CHECK_TOL: f64 = 1e-3;

/// Matrix exchange format: `{"n": 2, "entries": [[[re, im], …], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            n: m.dim(),
            entries: m
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.entries.len() != self.n || self.entries.iter().any(|row| row.len() != self.n) {
            return Err(format!("entries must form a {0}×{0} array", self.n));
        }
        let rows: Vec<Vec<Complex64>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|&[re, im]| c(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())
    }

    /// Parses JSON, reporting line and column on syntax errors.
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite entries serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Paper,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Full,
    Reduced,
}

#[derive(Parser, Debug)]
#[command(name = "charclass", version, about = "Characters of classical groups at numerical matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a character at a matrix.
    Eval(EvalArgs),
    /// Compare the power formula against the eigenvalue oracle on random samples.
    Verify(VerifyArgs),
    /// Dimension of an irreducible representation.
    Dim(DimArgs),
    /// Print a random group element as a matrix file.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// gl, sl, so-odd, sp or so-even
    #[arg(long)]
    group: Family,
    #[arg(long)]
    rank: usize,
}

impl GroupArgs {
    fn descriptor(&self) -> Result<GroupDescriptor, Failure> {
        GroupDescriptor::new(self.group, self.rank).map_err(Failure::from)
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Comma-separated weight entries, e.g. 2,1,0
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    weight: Vec<i64>,
    /// JSON matrix file
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "paper")]
    method: Method,
    #[arg(long, value_enum, default_value = "full")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    t_shift: i64,
    /// Seed for randomized pivoting
    #[arg(long)]
    seed: Option<u64>,
    /// Largest accepted discrepancy between paper and oracle with --method both
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Retry degenerate inputs by perturbation
    #[arg(long)]
    fallback: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    weight: Vec<i64>,
    /// Also evaluate the character at the identity via the perturbation fallback
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Norm of the Lie algebra element that is exponentiated
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

/// Error message with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateFamily { .. } | Error::DegeneratePersistent { .. } => EXIT_DEGENERATE,
            Error::NotInGroup { .. } => EXIT_NOT_IN_GROUP,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// `%.15g`-style formatting.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-5..15).contains(&exp) {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (14 - exp) as usize, x))
    }
}

/// `re±im i` with 15 significant digits.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", format_real(z.re + 0.0), sign, format_real(z.im.abs()))
}

fn format_sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Dim(a) => cmd_dim(&a),
        Command::Sample(a) => cmd_sample(&a),
    };
    match result {
        Ok((report, code)) => {
            let _ = out.write_all(report.as_bytes());
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

type Report = Result<(String, i32), Failure>;

fn weight(group: GroupDescriptor, entries: &[i64]) -> Result<DominantWeight, Failure> {
    DominantWeight::new(group, entries.to_vec()).map_err(|e| Failure::usage(e.to_string()))
}

fn options(seed: Option<u64>, fallback: bool) -> Result<EvalOptions, Failure> {
    let mut opts = EvalOptions::from_env()?;
    opts.pivot_seed = seed;
    opts.fallback = fallback;
    Ok(opts)
}

/// Oracle value of `χ_λ`, and of `χ_λ̄` for SO_EVEN.
fn oracle_values(g: &ComplexMatrix, w: &DominantWeight) -> crate::Result<(Complex64, Option<Complex64>)> {
    let t = torus_coords(g, w.group())?;
    let main = weyl_char(&t, w)?;
    let conj = match w.group().family() {
        Family::SoEven => Some(weyl_char(&t, &w.bar()?)?),
        _ => None,
    };
    Ok((main, conj))
}

fn cmd_eval(a: &EvalArgs) -> Report {
    let group = a.group.descriptor()?;
    let w = weight(group, &a.weight)?;
    let text = std::fs::read_to_string(&a.matrix)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", a.matrix.display())))?;
    let file = MatrixFile::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", a.matrix.display())))?;
    let g = file.to_matrix().map_err(|e| Failure::usage(format!("{}: {e}", a.matrix.display())))?;
    if g.dim() != group.matrix_dim() {
        return Err(Failure::usage(format!(
            "matrix is {0}×{0} but {group} acts on dimension {1}",
            g.dim(),
            group.matrix_dim()
        )));
    }
    let variant = match a.variant {
        VariantArg::Full => Variant::Full,
        VariantArg::Reduced => Variant::Reduced,
    };
    let opts = options(a.seed, a.fallback)?;

    let mut report = String::new();
    writeln!(report, "group: {group}").unwrap();
    writeln!(report, "weight: {w}").unwrap();

    let paper = match a.method {
        Method::Paper | Method::Both => Some(evaluate(&g, &w, a.t_shift, variant, &opts)?),
        Method::Oracle => None,
    };
    let oracle = match a.method {
        Method::Oracle | Method::Both => {
            if group.family() != Family::Gl && !is_member(&g, group, opts.membership_tol)? {
                let defect = crate::domain::membership_defect(&g, group)?;
                return Err(Error::NotInGroup {
                    group: group.to_string(),
                    defect,
                }
                .into());
            }
            Some(oracle_values(&g, &w)?)
        }
        Method::Paper => None,
    };

    if let Some(e) = &paper {
        write_evaluation(&mut report, e);
    }
    let mut code = EXIT_OK;
    if let Some((main, conj)) = oracle {
        writeln!(report, "oracle value: {}", format_complex(main)).unwrap();
        if let Some(v) = conj {
            writeln!(report, "oracle conjugate value: {}", format_complex(v)).unwrap();
        }
        if let Some(e) = &paper {
            let mut d = relative_discrepancy(e.character.value, main);
            if let (Some(p), Some(o)) = (&e.conjugate, conj) {
                d = d.max(relative_discrepancy(p.value, o));
            }
            writeln!(report, "discrepancy: {}", format_sci(d)).unwrap();
            let ok = d <= a.tol;
            writeln!(report, "{}", if ok { "PASS" } else { "FAIL" }).unwrap();
            if !ok {
                code = EXIT_CHECK_FAILED;
            }
        }
    }
    Ok((report, code))
}

fn write_evaluation(report: &mut String, e: &Evaluation) {
    let r = &e.character;
    writeln!(report, "value: {}", format_complex(r.value)).unwrap();
    if let Some(conj) = &e.conjugate {
        writeln!(report, "conjugate value: {}", format_complex(conj.value)).unwrap();
    }
    writeln!(report, "method: {}", r.method).unwrap();
    writeln!(report, "denominator: {}", format_sci(r.denom_magnitude)).unwrap();
    writeln!(report, "pivot: {}", r.pivot_report).unwrap();
    if r.perturbed {
        writeln!(report, "perturbed: uncertainty {}", format_sci(r.uncertainty.unwrap_or(0.0))).unwrap();
    }
}

fn cmd_verify(a: &VerifyArgs) -> Report {
    let group = a.group.descriptor()?;
    if a.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let opts = options(None, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut regular, mut skipped, mut failures) = (0usize, 0usize, 0usize);
    let mut worst = 0.0_f64;
    let mut worst_pf = 0.0_f64;
    let mut report = String::new();
    writeln!(
        report,
        "verify {group}: {} trials, seed {}, tol {}",
        a.trials,
        a.seed,
        format_sci(a.tol)
    )
    .unwrap();

    let pfaffian_weights = match group.family() {
        Family::SoEven => {
            let mut eps = vec![1_i64; group.rank()];
            let plus = DominantWeight::new(group, eps.clone())?;
            *eps.last_mut().unwrap() = -1;
            Some((plus, DominantWeight::new(group, eps)?))
        }
        _ => None,
    };

    for trial in 0..a.trials {
        let g = sample(group, rng.random(), VERIFY_SCALE);
        let w = DominantWeight::random(group, VERIFY_MAX_ENTRY, &mut rng);
        let (main, conj) = match oracle_values(&g, &w) {
            Ok(v) => v,
            Err(Error::IrregularElement { .. } | Error::PairingAmbiguous { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        regular += 1;
        match evaluate(&g, &w, 0, Variant::Full, &opts) {
            Ok(e) => {
                let mut d = relative_discrepancy(e.character.value, main);
                if let (Some(p), Some(o)) = (&e.conjugate, conj) {
                    d = d.max(relative_discrepancy(p.value, o));
                }
                worst = worst.max(d);
                if d > a.tol {
                    failures += 1;
                    writeln!(report, "trial {trial}: weight {w}, discrepancy {}", format_sci(d)).unwrap();
                }
            }
            Err(e) => {
                failures += 1;
                writeln!(report, "trial {trial}: weight {w}, error: {e}").unwrap();
            }
        }
        if let Some((plus, minus)) = &pfaffian_weights {
            let t = torus_coords(&g, group)?;
            let expected = weyl_char(&t, plus)? - weyl_char(&t, minus)?;
            let pf = engine::pfaffian_q(&(&g - &g.inverse()?), group)?;
            let d = relative_discrepancy(c(0.0, 1.0).powi(group.rank() as i32) * pf, expected);
            worst_pf = worst_pf.max(d);
            if d > a.tol {
                failures += 1;
                writeln!(report, "trial {trial}: pfaffian identity discrepancy {}", format_sci(d)).unwrap();
            }
        }
    }
    writeln!(report, "regular samples: {regular}, skipped: {skipped}").unwrap();
    writeln!(report, "max relative discrepancy: {}", format_sci(worst)).unwrap();
    if pfaffian_weights.is_some() {
        writeln!(report, "pfaffian identity max discrepancy: {}", format_sci(worst_pf)).unwrap();
    }
    let pass = failures == 0 && regular > 0;
    writeln!(report, "{}", if pass { "PASS" } else { "FAIL" }).unwrap();
    Ok((report, if pass { EXIT_OK } else { EXIT_CHECK_FAILED }))
}

fn cmd_dim(a: &DimArgs) -> Report {
    let group = a.group.descriptor()?;
    let w = weight(group, &a.weight)?;
    let d = weyl_dim(&w);
    let mut report = format!("{d}\n");
    let mut code = EXIT_OK;
    if a.check {
        let opts = options(None, true)?;
        let e = evaluate(&ComplexMatrix::identity(group.matrix_dim()), &w, 0, Variant::Full, &opts)?;
        let disc = relative_discrepancy(e.character.value, c(d as f64, 0.0));
        writeln!(report, "fallback value: {}", format_complex(e.character.value)).unwrap();
        writeln!(report, "discrepancy: {}", format_sci(disc)).unwrap();
        let ok = disc <= DIM_CHECK_TOL;
        writeln!(report, "{}", if ok { "PASS" } else { "FAIL" }).unwrap();
        if !ok {
            code = EXIT_CHECK_FAILED;
        }
    }
    Ok((report, code))
}

fn cmd_sample(a: &SampleArgs) -> Report {
    let group = a.group.descriptor()?;
    if !(a.scale >= 0.0) || !a.scale.is_finite() {
        return Err(Failure::usage("--scale must be a nonnegative number"));
    }
    let g = sample(group, a.seed, a.scale);
    Ok((format!("{}\n", MatrixFile::from_matrix(&g).to_json()), EXIT_OK))
}
