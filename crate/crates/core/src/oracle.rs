//! Reference values computed without matrix powers: the Weyl character
//! formula in eigenvalue coordinates, Jacobi–Trudi from power sums, explicit
//! symmetric powers of 2×2 matrices, and the Weyl dimension formula.

use num_complex::Complex64;

use crate::domain::{exponents, rho, DominantWeight, ExponentVector, Family, GroupDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{c, det_rows, eigenvalues, ComplexMatrix, HalfInteger};

/// Largest `|z z' − 1|` tolerated when pairing eigenvalues.
pub const PAIRING_TOL: f64 = 1e-6;

/// Relative size of the Weyl denominator below which `z` counts as irregular.
const IRREGULAR_TOL: f64 = 1e-13;

/// Eigenvalue coordinates of a torus conjugate of `g`.
#[derive(Debug, Clone)]
pub struct TorusCoordinates {
    pub group: GroupDescriptor,
    /// `z₀, …, z_r` for GL/SL; `z₁, …, z_r` (one from each reciprocal pair) otherwise.
    pub z: Vec<Complex64>,
    pub pairing_residual: f64,
}

impl TorusCoordinates {
    pub fn new(group: GroupDescriptor, z: Vec<Complex64>) -> Result<Self> {
        if z.len() != group.weight_len() {
            return Err(Error::DimensionMismatch {
                expected: group.weight_len(),
                found: z.len(),
            });
        }
        Ok(TorusCoordinates {
            group,
            z,
            pairing_residual: 0.0,
        })
    }
}

/// Torus coordinates of `g` from its eigenvalues.
///
/// For B/C/D the eigenvalues are greedily paired by `|z z' − 1|`; for
/// SO_ODD the eigenvalue closest to 1 is set aside first. For SO_EVEN the
/// representative of each pair is fixed by orientation: the eigenvector
/// basis, normalized to the split form, must have determinant +1, otherwise
/// one coordinate is inverted. Without this the oracle could not tell `λ`
/// from `λ̄`.
pub fn torus_coords(g: &ComplexMatrix, group: GroupDescriptor) -> Result<TorusCoordinates> {
    if g.dim() != group.matrix_dim() {
        return Err(Error::DimensionMismatch {
            expected: group.matrix_dim(),
            found: g.dim(),
        });
    }
    let eig = eigenvalues(g)?;
    if matches!(group.family(), Family::Gl | Family::Sl) {
        return Ok(TorusCoordinates {
            group,
            z: eig.values,
            pairing_residual: 0.0,
        });
    }

    let mut remaining: Vec<usize> = (0..eig.values.len()).collect();
    if group.family() == Family::SoOdd {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (eig.values[*a.1] - c(1.0, 0.0)).norm();
                let db = (eig.values[*b.1] - c(1.0, 0.0)).norm();
                da.total_cmp(&db)
            })
            .unwrap();
        remaining.remove(pos);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(group.rank());
    let mut residual = 0.0_f64;
    while !remaining.is_empty() {
        let mut best = (0, 1, f64::INFINITY);
        for a in 0..remaining.len() {
            for b in a + 1..remaining.len() {
                let d = (eig.values[remaining[a]] * eig.values[remaining[b]] - c(1.0, 0.0)).norm();
                if d < best.2 {
                    best = (a, b, d);
                }
            }
        }
        let (a, b, d) = best;
        residual = residual.max(d);
        let (i, j) = (remaining[a], remaining[b]);
        // Keep the member of larger modulus as the representative.
        if eig.values[i].norm() >= eig.values[j].norm() {
            pairs.push((i, j));
        } else {
            pairs.push((j, i));
        }
        remaining.remove(b);
        remaining.remove(a);
    }
    if residual > PAIRING_TOL {
        return Err(Error::PairingAmbiguous { residual });
    }
    let mut z: Vec<Complex64> = pairs.iter().map(|&(i, _)| eig.values[i]).collect();

    if group.family() == Family::SoEven {
        let (flip_at, spread) = z
            .iter()
            .enumerate()
            .map(|(k, zk)| (k, (zk - zk.inv()).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        // When every z_k is ±1 both orientations describe the same element.
        if spread > 1e-8 {
            match split_orientation(&eig.vectors, &pairs, group) {
                Some(true) => {}
                Some(false) => z[flip_at] = z[flip_at].inv(),
                None => return Err(Error::PairingAmbiguous { residual: spread }),
            }
        }
    }

    Ok(TorusCoordinates {
        group,
        z,
        pairing_residual: residual,
    })
}

/// Sign of `det P` for the eigenvector basis `(v₁, w₁, …)` rescaled so that
/// `B(v_j, w_j) = ½`, i.e. `PᵀJP = J`. `None` if the basis is not split.
fn split_orientation(
    vectors: &ComplexMatrix,
    pairs: &[(usize, usize)],
    group: GroupDescriptor,
) -> Option<bool> {
    let j = group.gram()?;
    let n = group.matrix_dim();
    let col = |k: usize| -> Vec<Complex64> { (0..n).map(|i| vectors.get(i, k)).collect() };
    let bilinear = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += u[a] * j.get(a, b) * v[b];
            }
        }
        acc
    };
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &(i, k) in pairs {
        let v = col(i);
        let w = col(k);
        let b = bilinear(&v, &w);
        if b.norm() < 1e-10 {
            return None;
        }
        let scale = c(0.5, 0.0) / b;
        columns.push(v);
        columns.push(w.iter().map(|x| x * scale).collect());
    }
    let p = ComplexMatrix::from_fn(n, |r, k| columns[k][r]);
    let gram_defect = (&(&(&p.transpose() * &j) * &p) - &j).norm();
    if gram_defect > 1e-6 {
        return None;
    }
    Some(p.determinant().re > 0.0)
}

fn half_pow(a: Complex64, twice: i64) -> Complex64 {
    // `a` is a fixed square root of z; a^(2ℓ) = z^ℓ.
    a.powi(twice as i32)
}

fn ratio(num: Vec<Vec<Complex64>>, den: Vec<Vec<Complex64>>) -> Result<Complex64> {
    let scale: f64 = den
        .iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product();
    let d = det_rows(den);
    if !(d.norm() > IRREGULAR_TOL * scale) {
        return Err(Error::IrregularElement {
            magnitude: d.norm() / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(det_rows(num) / d)
}

fn matrix_of(
    exps: &ExponentVector,
    roots: &[Complex64],
    f: impl Fn(Complex64, HalfInteger) -> Complex64,
) -> Vec<Vec<Complex64>> {
    exps.entries()
        .iter()
        .map(|&l| roots.iter().map(|&a| f(a, l)).collect())
        .collect()
}

/// `(S⁺, S⁻) = (χ_λ + χ_λ̄, χ_λ − χ_λ̄)` for SO_EVEN, from torus determinants:
/// with `A_ρ = ½ det(z^ρ + z^{−ρ})`,
/// `S⁺ = det(z^ℓ + z^{−ℓ}) / A_ρ` and `S⁻ = det(z^ℓ − z^{−ℓ}) / A_ρ`.
pub fn weyl_char_d_parts(z: &TorusCoordinates, weight: &DominantWeight) -> Result<(Complex64, Complex64)> {
    let group = weight.group();
    if group.family() != Family::SoEven {
        return Err(Error::WrongFamily(group.family().to_string()));
    }
    check_coords(z, group)?;
    let ell = exponents(weight, 0);
    let rho = rho(group, 0);
    let sum = |zj: Complex64, l: HalfInteger| {
        let k = l.as_integer().unwrap() as i32;
        zj.powi(k) + zj.powi(-k)
    };
    let diff = |zj: Complex64, l: HalfInteger| {
        let k = l.as_integer().unwrap() as i32;
        zj.powi(k) - zj.powi(-k)
    };
    let den = matrix_of(&rho, &z.z, sum);
    let s_plus = ratio(matrix_of(&ell, &z.z, sum), den.clone())? * 2.0;
    let s_minus = ratio(matrix_of(&ell, &z.z, diff), den)? * 2.0;
    Ok((s_plus, s_minus))
}

fn check_coords(z: &TorusCoordinates, group: GroupDescriptor) -> Result<()> {
    if z.z.len() != group.weight_len() {
        return Err(Error::DimensionMismatch {
            expected: group.weight_len(),
            found: z.z.len(),
        });
    }
    Ok(())
}

/// Weyl character formula in torus coordinates.
pub fn weyl_char(z: &TorusCoordinates, weight: &DominantWeight) -> Result<Complex64> {
    let group = weight.group();
    check_coords(z, group)?;
    let ell = exponents(weight, 0);
    let rho = rho(group, 0);
    match group.family() {
        Family::Gl | Family::Sl => {
            let pow = |zj: Complex64, l: HalfInteger| zj.powi(l.as_integer().unwrap() as i32);
            ratio(matrix_of(&ell, &z.z, pow), matrix_of(&rho, &z.z, pow))
        }
        Family::SoOdd => {
            let roots: Vec<Complex64> = z.z.iter().map(|zj| zj.sqrt()).collect();
            let diff = |a: Complex64, l: HalfInteger| half_pow(a, l.twice) - half_pow(a, -l.twice);
            ratio(matrix_of(&ell, &roots, diff), matrix_of(&rho, &roots, diff))
        }
        Family::Sp => {
            let diff = |zj: Complex64, l: HalfInteger| {
                let k = l.as_integer().unwrap() as i32;
                zj.powi(k) - zj.powi(-k)
            };
            ratio(matrix_of(&ell, &z.z, diff), matrix_of(&rho, &z.z, diff))
        }
        Family::SoEven => {
            let (plus, minus) = weyl_char_d_parts(z, weight)?;
            Ok((plus + minus) * 0.5)
        }
    }
}

/// `tr g, tr g², …, tr g^k`.
pub fn power_sums(g: &ComplexMatrix, k: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(k);
    let mut p = ComplexMatrix::identity(g.dim());
    for _ in 0..k {
        p = &p * g;
        out.push(p.trace());
    }
    out
}

/// Compensated sum.
fn kahan_sum(terms: impl IntoIterator<Item = Complex64>) -> Complex64 {
    let mut sum = c(0.0, 0.0);
    let mut comp = c(0.0, 0.0);
    for t in terms {
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

/// Complete homogeneous symmetric values `h₀, …, h_k` from power sums
/// `p₁, …, p_k` via `m h_m = Σ_{i=1}^m p_i h_{m−i}`.
pub fn complete_homogeneous(power_sums: &[Complex64]) -> Vec<Complex64> {
    let mut h = vec![c(1.0, 0.0)];
    for m in 1..=power_sums.len() {
        let s = kahan_sum((1..=m).map(|i| power_sums[i - 1] * h[m - i]));
        h.push(s / m as f64);
    }
    h
}

/// Schur polynomial `s_λ = det(h_{λ_i − i + j})` from power sums.
pub fn schur_jt(power_sums: &[Complex64], weight: &DominantWeight) -> Result<Complex64> {
    let group = weight.group();
    if !matches!(group.family(), Family::Gl | Family::Sl) {
        return Err(Error::WrongFamily(group.family().to_string()));
    }
    let lambda = weight.entries();
    let r = lambda.len() - 1;
    if lambda[r] < 0 {
        return Err(Error::InvalidWeight("Jacobi–Trudi needs a partition".into()));
    }
    let needed = lambda[0] as usize + r;
    if power_sums.len() < needed {
        return Err(Error::InsufficientPowerSums {
            needed,
            available: power_sums.len(),
        });
    }
    let h = complete_homogeneous(&power_sums[..needed]);
    let rows: Vec<Vec<Complex64>> = (0..=r)
        .map(|i| {
            (0..=r)
                .map(|j| {
                    let idx = lambda[i] - i as i64 + j as i64;
                    if idx < 0 {
                        c(0.0, 0.0)
                    } else {
                        h[idx as usize]
                    }
                })
                .collect()
        })
        .collect();
    Ok(det_rows(rows))
}

/// Matrix of `g` acting on degree-`m` binary forms in the monomial basis
/// `x^a y^{m−a}`, `a = 0..=m`, with `x ↦ g₀₀x + g₁₀y`, `y ↦ g₀₁x + g₁₁y`.
pub fn sym_power_matrix_2x2(g: &ComplexMatrix, m: usize) -> Result<Vec<Vec<Complex64>>> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: g.dim(),
        });
    }
    // Polynomials are coefficient vectors indexed by the power of x.
    let mul_linear = |p: &[Complex64], ax: Complex64, ay: Complex64| -> Vec<Complex64> {
        let mut out = vec![c(0.0, 0.0); p.len() + 1];
        for (k, &coef) in p.iter().enumerate() {
            out[k + 1] += coef * ax;
            out[k] += coef * ay;
        }
        out
    };
    let (gx, gy) = ((g.get(0, 0), g.get(1, 0)), (g.get(0, 1), g.get(1, 1)));
    let mut matrix = vec![vec![c(0.0, 0.0); m + 1]; m + 1];
    for a in 0..=m {
        let mut p = vec![c(1.0, 0.0)];
        for _ in 0..a {
            p = mul_linear(&p, gx.0, gx.1);
        }
        for _ in 0..m - a {
            p = mul_linear(&p, gy.0, gy.1);
        }
        for (row, coef) in p.into_iter().enumerate() {
            matrix[row][a] = coef;
        }
    }
    Ok(matrix)
}

/// `tr Sym^m g` for a 2×2 matrix.
pub fn sym_power_trace_2x2(g: &ComplexMatrix, m: usize) -> Result<Complex64> {
    let matrix = sym_power_matrix_2x2(g, m)?;
    Ok((0..=m).map(|i| matrix[i][i]).sum())
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Weyl dimension formula `∏_{α>0} ⟨λ+ρ, α⟩ / ⟨ρ, α⟩`, in exact arithmetic.
pub fn weyl_dim(weight: &DominantWeight) -> u64 {
    let group = weight.group();
    let ell: Vec<i128> = exponents(weight, 0).0.iter().map(|h| h.twice as i128).collect();
    let rho: Vec<i128> = rho(group, 0).0.iter().map(|h| h.twice as i128).collect();
    let k = ell.len();
    let mut pairs: Vec<(i128, i128)> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pairs.push((ell[i] - ell[j], rho[i] - rho[j]));
            if !matches!(group.family(), Family::Gl | Family::Sl) {
                pairs.push((ell[i] + ell[j], rho[i] + rho[j]));
            }
        }
        if matches!(group.family(), Family::SoOdd | Family::Sp) {
            pairs.push((ell[i], rho[i]));
        }
    }
    let (mut num, mut den) = (1_i128, 1_i128);
    for (a, b) in pairs {
        num *= a;
        den *= b;
        let g = gcd(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
    }
    debug_assert_eq!(den.abs(), 1, "Weyl dimension must be an integer");
    (num / den) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(f: Family, r: usize) -> GroupDescriptor {
        GroupDescriptor::new(f, r).unwrap()
    }

    fn weight(f: Family, r: usize, e: &[i64]) -> DominantWeight {
        DominantWeight::new(group(f, r), e.to_vec()).unwrap()
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - c(b, 0.0)).norm() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn torus_of_diagonal_symplectic() {
        let g = ComplexMatrix::real_diagonal(&[2.0, 0.5, 3.0, 1.0 / 3.0]);
        let t = torus_coords(&g, group(Family::Sp, 2)).unwrap();
        let mut z: Vec<f64> = t.z.iter().map(|z| z.re).collect();
        z.sort_by(|a, b| a.total_cmp(b));
        assert!((z[0] - 2.0).abs() < 1e-12 && (z[1] - 3.0).abs() < 1e-12);
        assert!(t.pairing_residual < 1e-12);
    }

    #[test]
    fn torus_of_so3_element() {
        let g = ComplexMatrix::real_diagonal(&[4.0, 0.25, 1.0]);
        let t = torus_coords(&g, group(Family::SoOdd, 1)).unwrap();
        assert_eq!(t.z.len(), 1);
        assert!((t.z[0] - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn torus_of_identity() {
        for (f, r) in [(Family::Sp, 2), (Family::SoOdd, 2), (Family::SoEven, 3)] {
            let g = ComplexMatrix::identity(group(f, r).matrix_dim());
            let t = torus_coords(&g, group(f, r)).unwrap();
            assert!(t.z.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-12));
            assert_eq!(t.pairing_residual, 0.0);
        }
    }

    #[test]
    fn unpairable_spectrum_is_rejected() {
        let g = ComplexMatrix::real_diagonal(&[2.0, 3.0]);
        assert!(matches!(
            torus_coords(&g, group(Family::Sp, 1)),
            Err(Error::PairingAmbiguous { .. })
        ));
    }

    #[test]
    fn so_even_orientation_tracks_the_element() {
        // diag(1/2, 2, 3, 1/3) has the same spectrum as diag(2, 1/2, 3, 1/3)
        // but the opposite orientation.
        let d = group(Family::SoEven, 2);
        let w = weight(Family::SoEven, 2, &[1, 1]);
        let g1 = d.torus_element(&[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let g2 = d.torus_element(&[c(0.5, 0.0), c(3.0, 0.0)]).unwrap();
        let v1 = weyl_char(&torus_coords(&g1, d).unwrap(), &w).unwrap();
        let v2 = weyl_char(&torus_coords(&g2, d).unwrap(), &w).unwrap();
        assert!(close(v1, 6.0 + 1.0 + 1.0 / 6.0, 1e-12), "{v1}");
        assert!(close(v2, 1.5 + 1.0 + 1.0 / 1.5, 1e-12), "{v2}");
    }

    #[test]
    fn weyl_char_examples() {
        let t = TorusCoordinates::new(group(Family::Gl, 1), vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!(close(weyl_char(&t, &weight(Family::Gl, 1, &[2, 0])).unwrap(), 19.0, 1e-14));
        let t = TorusCoordinates::new(group(Family::Sp, 1), vec![c(2.0, 0.0)]).unwrap();
        assert!(close(weyl_char(&t, &weight(Family::Sp, 1, &[2])).unwrap(), 5.25, 1e-14));
        for f in Family::ALL {
            let g = group(f, 2);
            let z: Vec<Complex64> = (0..g.weight_len()).map(|k| c(1.3 + 0.4 * k as f64, 0.2)).collect();
            let t = TorusCoordinates::new(g, z).unwrap();
            assert!(close(weyl_char(&t, &DominantWeight::zero(g)).unwrap(), 1.0, 1e-13), "{f}");
        }
    }

    #[test]
    fn so_odd_vector_representation() {
        // z + 1 + 1/z and z² + z + 1 + 1/z + 1/z² at z = 4.
        let t = TorusCoordinates::new(group(Family::SoOdd, 1), vec![c(4.0, 0.0)]).unwrap();
        assert!(close(weyl_char(&t, &weight(Family::SoOdd, 1, &[1])).unwrap(), 5.25, 1e-14));
        assert!(close(weyl_char(&t, &weight(Family::SoOdd, 1, &[2])).unwrap(), 21.3125, 1e-14));
    }

    #[test]
    fn irregular_element_detected() {
        let t = TorusCoordinates::new(group(Family::Gl, 1), vec![c(2.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(matches!(
            weyl_char(&t, &weight(Family::Gl, 1, &[1, 0])),
            Err(Error::IrregularElement { .. })
        ));
    }

    #[test]
    fn jacobi_trudi_examples() {
        let g = ComplexMatrix::real_diagonal(&[2.0, 3.0]);
        let p = power_sums(&g, 6);
        assert!(close(schur_jt(&p, &weight(Family::Gl, 1, &[2, 0])).unwrap(), 19.0, 1e-13));
        assert!(close(schur_jt(&p, &weight(Family::Gl, 1, &[1, 1])).unwrap(), 6.0, 1e-13));
        assert!(close(schur_jt(&p, &weight(Family::Gl, 1, &[0, 0])).unwrap(), 1.0, 0.0));
        assert!(matches!(
            schur_jt(&p[..1], &weight(Family::Gl, 1, &[2, 0])),
            Err(Error::InsufficientPowerSums { needed: 3, available: 1 })
        ));
    }

    #[test]
    fn symmetric_power_traces() {
        let jordan = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(sym_power_trace_2x2(&jordan, 3).unwrap(), c(4.0, 0.0));
        let g = ComplexMatrix::real_diagonal(&[2.0, 3.0]);
        assert_eq!(sym_power_trace_2x2(&g, 2).unwrap(), c(19.0, 0.0));
        assert_eq!(sym_power_trace_2x2(&g, 0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn symmetric_power_is_a_representation() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.5), c(-0.3, 0.0)], vec![c(0.2, 0.1), c(0.8, 0.0)]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[vec![0.4, 1.2], vec![-0.7, 0.9]]).unwrap();
        let m = 4;
        let sa = sym_power_matrix_2x2(&a, m).unwrap();
        let sb = sym_power_matrix_2x2(&b, m).unwrap();
        let sab = sym_power_matrix_2x2(&(&a * &b), m).unwrap();
        for i in 0..=m {
            for j in 0..=m {
                let prod: Complex64 = (0..=m).map(|k| sa[i][k] * sb[k][j]).sum();
                assert!((prod - sab[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dim(&weight(Family::Gl, 1, &[1, 0])), 2);
        assert_eq!(weyl_dim(&weight(Family::Sp, 2, &[1, 0])), 4);
        assert_eq!(weyl_dim(&weight(Family::Gl, 2, &[1, 1, 0])), 3);
        assert_eq!(weyl_dim(&weight(Family::SoOdd, 1, &[2])), 5);
        assert_eq!(weyl_dim(&weight(Family::SoOdd, 3, &[1, 0, 0])), 7);
        assert_eq!(weyl_dim(&weight(Family::SoEven, 3, &[1, 0, 0])), 6);
        assert_eq!(weyl_dim(&weight(Family::SoEven, 2, &[1, 1])), 3);
        assert_eq!(weyl_dim(&weight(Family::SoEven, 2, &[1, -1])), 3);
        // Spin-like check: adjoint of Sp₄ is Sym², dimension 10.
        assert_eq!(weyl_dim(&weight(Family::Sp, 2, &[2, 0])), 10);
        // Adjoint of SO₅ is Λ², dimension 10.
        assert_eq!(weyl_dim(&weight(Family::SoOdd, 2, &[1, 1])), 10);
        // GL₃ with λ = (2,1,0) is the 8-dimensional adjoint-type rep.
        assert_eq!(weyl_dim(&weight(Family::Gl, 2, &[2, 1, 0])), 8);
    }
}
