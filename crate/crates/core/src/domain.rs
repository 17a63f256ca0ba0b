//! Classical group families, their invariant forms, dominant weights and
//! Weyl vectors.
//!
//! Orthogonal and symplectic groups are realized in the split basis
//! `x₁, y₁, …, x_r, y_r (, z)`, so that the maximal torus consists of the
//! diagonal matrices `diag(z₁, z₁⁻¹, …, z_r, z_r⁻¹ (, 1))`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, HalfInteger};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gl,
    Sl,
    SoOdd,
    Sp,
    SoEven,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Gl, Family::Sl, Family::SoOdd, Family::Sp, Family::SoEven];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gl => "gl",
            Family::Sl => "sl",
            Family::SoOdd => "so-odd",
            Family::Sp => "sp",
            Family::SoEven => "so-even",
        }
    }

    fn is_linear(self) -> bool {
        matches!(self, Family::Gl | Family::Sl)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "gl" => Ok(Family::Gl),
            "sl" => Ok(Family::Sl),
            "so-odd" | "b" => Ok(Family::SoOdd),
            "sp" | "c" => Ok(Family::Sp),
            "so-even" | "d" => Ok(Family::SoEven),
            other => Err(Error::InvalidArgument(format!("unknown group family `{other}`"))),
        }
    }
}

/// A connected classical group of given family and rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    family: Family,
    rank: usize,
}

impl GroupDescriptor {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidArgument("rank must be positive".into()));
        }
        Ok(GroupDescriptor { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix_dim(&self) -> usize {
        match self.family {
            Family::Gl | Family::Sl => self.rank + 1,
            Family::SoOdd => 2 * self.rank + 1,
            Family::Sp | Family::SoEven => 2 * self.rank,
        }
    }

    /// Number of entries of a weight vector.
    pub fn weight_len(&self) -> usize {
        if self.family.is_linear() {
            self.rank + 1
        } else {
            self.rank
        }
    }

    /// Gram matrix of the invariant form, `None` for GL and SL.
    ///
    /// The symmetric form is the polarization of `x₁y₁ + ⋯ + x_ry_r (+ z²)`;
    /// the skew form is `Σ x'_i y''_i − y'_i x''_i`.
    pub fn gram(&self) -> Option<ComplexMatrix> {
        let n = self.matrix_dim();
        let r = self.rank;
        let entry: fn(usize, usize, usize) -> f64 = match self.family {
            Family::Gl | Family::Sl => return None,
            Family::SoOdd | Family::SoEven => |i, j, r| {
                if i == j && i == 2 * r {
                    1.0
                } else if i / 2 == j / 2 && i != j && i < 2 * r {
                    0.5
                } else {
                    0.0
                }
            },
            Family::Sp => |i, j, _| {
                if i / 2 == j / 2 && i != j {
                    if i % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                }
            },
        };
        Some(ComplexMatrix::from_fn(n, |i, j| c(entry(i, j, r), 0.0)))
    }

    /// Torus element `diag(z₁, z₁⁻¹, …)` (or `diag(z₀, …, z_r)` for GL/SL).
    pub fn torus_element(&self, z: &[Complex64]) -> Result<ComplexMatrix> {
        let expected = self.weight_len();
        if z.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: z.len(),
            });
        }
        if self.family.is_linear() {
            return Ok(ComplexMatrix::diagonal(z));
        }
        let mut diag = Vec::with_capacity(self.matrix_dim());
        for &zj in z {
            diag.push(zj);
            diag.push(zj.inv());
        }
        if self.family == Family::SoOdd {
            diag.push(c(1.0, 0.0));
        }
        Ok(ComplexMatrix::diagonal(&diag))
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rank {}", self.family, self.rank)
    }
}

/// Highest weight of an irreducible representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DominantWeight {
    group: GroupDescriptor,
    entries: Vec<i64>,
}

impl DominantWeight {
    /// Validates dominance; SL weights are shifted so the last entry is 0.
    pub fn new(group: GroupDescriptor, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != group.weight_len() {
            return Err(Error::InvalidWeight(format!(
                "{group} needs {} entries, got {}",
                group.weight_len(),
                entries.len()
            )));
        }
        let nonincreasing = entries.windows(2).all(|w| w[0] >= w[1]);
        let r = entries.len();
        let ok = match group.family() {
            Family::Gl | Family::Sl => nonincreasing,
            Family::SoOdd | Family::Sp => nonincreasing && entries[r - 1] >= 0,
            Family::SoEven => {
                entries[..r - 1].windows(2).all(|w| w[0] >= w[1])
                    && (r == 1 || entries[r - 2] >= entries[r - 1].abs())
            }
        };
        if !ok {
            return Err(Error::InvalidWeight(format!(
                "{entries:?} is not dominant for {group}"
            )));
        }
        let mut entries = entries;
        if group.family() == Family::Sl {
            let last = entries[r - 1];
            entries.iter_mut().for_each(|e| *e -= last);
        }
        Ok(DominantWeight { group, entries })
    }

    /// The trivial representation.
    pub fn zero(group: GroupDescriptor) -> Self {
        DominantWeight {
            group,
            entries: vec![0; group.weight_len()],
        }
    }

    /// `(1, 0, …, 0)`: the defining representation.
    pub fn standard(group: GroupDescriptor) -> Self {
        let mut entries = vec![0; group.weight_len()];
        entries[0] = 1;
        DominantWeight { group, entries }
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `λ̄ = (λ₁, …, λ_{r−1}, −λ_r)` for SO_EVEN.
    pub fn bar(&self) -> Result<Self> {
        if self.group.family() != Family::SoEven {
            return Err(Error::WrongFamily(self.group.family().to_string()));
        }
        let mut entries = self.entries.clone();
        let last = entries.len() - 1;
        entries[last] = -entries[last];
        Ok(DominantWeight {
            group: self.group,
            entries,
        })
    }

    /// Random dominant weight with entries bounded by `max_entry` in absolute value.
    pub fn random<R: Rng>(group: GroupDescriptor, max_entry: i64, rng: &mut R) -> Self {
        let mut entries: Vec<i64> = (0..group.weight_len())
            .map(|_| rng.random_range(0..=max_entry))
            .collect();
        entries.sort_unstable_by(|a, b| b.cmp(a));
        if group.family() == Family::SoEven && rng.random_bool(0.5) {
            let last = entries.len() - 1;
            entries[last] = -entries[last];
        }
        DominantWeight::new(group, entries).expect("sorted entries are dominant")
    }
}

impl fmt::Display for DominantWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Exponents `ℓ = λ + ρ`, `ρ`, or `e = ε + ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector(pub Vec<HalfInteger>);

impl ExponentVector {
    pub fn entries(&self) -> &[HalfInteger] {
        &self.0
    }

    fn from_integers(v: impl IntoIterator<Item = i64>) -> Self {
        ExponentVector(v.into_iter().map(HalfInteger::from_integer).collect())
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Weyl vector of the family. For GL the choice `t = r/2` is made integral
/// and shifted by `t_shift·(1,…,1)`; other families ignore `t_shift`.
pub fn rho(group: GroupDescriptor, t_shift: i64) -> ExponentVector {
    let r = group.rank() as i64;
    match group.family() {
        Family::Gl => ExponentVector::from_integers((0..=r).rev().map(|k| k + t_shift)),
        Family::Sl => ExponentVector::from_integers((0..=r).rev()),
        Family::SoOdd => {
            ExponentVector((1..=r).rev().map(|k| HalfInteger::from_twice(2 * k - 1)).collect())
        }
        Family::Sp => ExponentVector::from_integers((1..=r).rev()),
        Family::SoEven => ExponentVector::from_integers((0..r).rev()),
    }
}

/// `e = ε + ρ = (r, …, 1)` for SO_EVEN, regular for the full orthogonal Weyl group.
pub fn regular_exponents(rank: usize) -> ExponentVector {
    ExponentVector::from_integers((1..=rank as i64).rev())
}

/// `ℓ = λ + ρ_t`.
pub fn exponents(weight: &DominantWeight, t_shift: i64) -> ExponentVector {
    let rho = rho(weight.group(), t_shift);
    ExponentVector(
        weight
            .entries()
            .iter()
            .zip(rho.0)
            .map(|(&l, r)| HalfInteger::from_integer(l) + r)
            .collect(),
    )
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

/// How far `g` is from satisfying the group's defining equations. For GL
/// this is `1/|det g|`; otherwise the largest of the relative form defect
/// and `|det g − 1|` where applicable.
pub fn membership_defect(g: &ComplexMatrix, group: GroupDescriptor) -> Result<f64> {
    check_dim(g, group)?;
    let det = g.determinant();
    Ok(match group.family() {
        Family::Gl => 1.0 / det.norm(),
        Family::Sl => (det - c(1.0, 0.0)).norm(),
        Family::SoOdd | Family::SoEven | Family::Sp => {
            let j = group.gram().expect("form");
            let form_defect = (&(&(&g.transpose() * &j) * g) - &j).norm() / j.norm();
            if group.family() == Family::Sp {
                form_defect
            } else {
                form_defect.max((det - c(1.0, 0.0)).norm())
            }
        }
    })
}

/// Membership test at tolerance `tol`.
pub fn is_member(g: &ComplexMatrix, group: GroupDescriptor, tol: f64) -> Result<bool> {
    check_dim(g, group)?;
    if group.family() == Family::Gl {
        return Ok(g.determinant().norm() > tol);
    }
    Ok(membership_defect(g, group)? <= tol)
}

/// Random Lie algebra element with unit Frobenius norm.
pub fn random_algebra_element<R: Rng>(group: GroupDescriptor, rng: &mut R) -> ComplexMatrix {
    let n = group.matrix_dim();
    let y = ComplexMatrix::from_fn(n, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let x = match group.family() {
        Family::Gl => y,
        Family::Sl => {
            let shift = y.trace() / n as f64;
            &y - &ComplexMatrix::identity(n).scale(shift)
        }
        _ => {
            // X = Y − J⁻¹YᵀJ satisfies XᵀJ + JX = 0 for symmetric or skew J.
            let j = group.gram().expect("form");
            let j_inv = j.inverse().expect("gram matrices are invertible");
            &y - &(&(&j_inv * &y.transpose()) * &j)
        }
    };
    let norm = x.norm();
    x.scale(c(1.0 / norm, 0.0))
}

/// Frobenius norm of the generator used by [`sample`] at `scale = 1`.
pub const SAMPLE_GENERATOR_NORM: f64 = 2.0;

/// `exp(scale·X)` for a seeded random algebra element `X` with
/// `‖X‖_F = SAMPLE_GENERATOR_NORM`. Smaller generators put rank-4 samples
/// so close to 𝟙 that their forms fall under the degeneracy threshold.
pub fn sample(group: GroupDescriptor, seed: u64, scale: f64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ family_salt(group));
    let x = random_algebra_element(group, &mut rng);
    x.scale(c(scale * SAMPLE_GENERATOR_NORM, 0.0)).exp()
}

fn family_salt(group: GroupDescriptor) -> u64 {
    let f = Family::ALL.iter().position(|&f| f == group.family()).unwrap() as u64;
    (f << 56) ^ ((group.rank() as u64) << 48)
}

/// Change of basis from the standard orthonormal coordinates (`gᵀg = 𝟙`)
/// to the split basis, for the orthogonal families: returns `P⁻¹ g P` with
/// `PᵀP = J`.
pub fn split_from_standard(g: &ComplexMatrix, group: GroupDescriptor) -> Result<ComplexMatrix> {
    let p = standard_to_split_basis(group)?;
    check_dim(g, group)?;
    Ok(&(&p.inverse()? * g) * &p)
}

/// Inverse of [`split_from_standard`].
pub fn standard_from_split(g: &ComplexMatrix, group: GroupDescriptor) -> Result<ComplexMatrix> {
    let p = standard_to_split_basis(group)?;
    check_dim(g, group)?;
    Ok(&(&p * g) * &p.inverse()?)
}

fn standard_to_split_basis(group: GroupDescriptor) -> Result<ComplexMatrix> {
    if !matches!(group.family(), Family::SoOdd | Family::SoEven) {
        return Err(Error::InvalidArgument(
            "basis change is defined for orthogonal families only".into(),
        ));
    }
    let r = group.rank();
    let n = group.matrix_dim();
    // Each (x, y) block is ½[[1, 1], [i, −i]]; the z coordinate is fixed.
    Ok(ComplexMatrix::from_fn(n, |i, j| {
        if i >= 2 * r || j >= 2 * r {
            return if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
        }
        if i / 2 != j / 2 {
            return c(0.0, 0.0);
        }
        match (i % 2, j % 2) {
            (0, _) => c(0.5, 0.0),
            (1, 0) => c(0.0, 0.5),
            _ => c(0.0, -0.5),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(f: Family, r: usize) -> GroupDescriptor {
        GroupDescriptor::new(f, r).unwrap()
    }

    fn ints(v: &ExponentVector) -> Vec<f64> {
        v.0.iter().map(|h| h.value()).collect()
    }

    #[test]
    fn matrix_dims() {
        assert_eq!(group(Family::Gl, 2).matrix_dim(), 3);
        assert_eq!(group(Family::Sl, 1).matrix_dim(), 2);
        assert_eq!(group(Family::SoOdd, 2).matrix_dim(), 5);
        assert_eq!(group(Family::Sp, 3).matrix_dim(), 6);
        assert_eq!(group(Family::SoEven, 3).matrix_dim(), 6);
        assert!(GroupDescriptor::new(Family::Gl, 0).is_err());
    }

    #[test]
    fn rho_vectors() {
        assert_eq!(ints(&rho(group(Family::Gl, 2), 0)), vec![2.0, 1.0, 0.0]);
        assert_eq!(ints(&rho(group(Family::Gl, 2), 2)), vec![4.0, 3.0, 2.0]);
        assert_eq!(ints(&rho(group(Family::SoOdd, 2), 0)), vec![1.5, 0.5]);
        assert_eq!(ints(&rho(group(Family::Sp, 3), 0)), vec![3.0, 2.0, 1.0]);
        assert_eq!(ints(&rho(group(Family::SoEven, 3), 0)), vec![2.0, 1.0, 0.0]);
        assert_eq!(ints(&regular_exponents(3)), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn exponent_examples() {
        let w = DominantWeight::new(group(Family::Gl, 2), vec![2, 1, 0]).unwrap();
        assert_eq!(ints(&exponents(&w, 0)), vec![4.0, 2.0, 0.0]);
        let w = DominantWeight::new(group(Family::SoOdd, 2), vec![1, 0]).unwrap();
        assert_eq!(ints(&exponents(&w, 0)), vec![2.5, 0.5]);
        let w = DominantWeight::new(group(Family::SoEven, 2), vec![1, -1]).unwrap();
        assert_eq!(ints(&exponents(&w, 0)), vec![2.0, -1.0]);
    }

    #[test]
    fn dominance_rules() {
        assert!(DominantWeight::new(group(Family::Gl, 1), vec![0, 1]).is_err());
        assert!(DominantWeight::new(group(Family::Gl, 1), vec![-1, -3]).is_ok());
        assert!(DominantWeight::new(group(Family::Sp, 2), vec![1, -1]).is_err());
        assert!(DominantWeight::new(group(Family::SoOdd, 2), vec![2, 3]).is_err());
        assert!(DominantWeight::new(group(Family::SoEven, 2), vec![1, -1]).is_ok());
        assert!(DominantWeight::new(group(Family::SoEven, 2), vec![1, -2]).is_err());
        assert!(DominantWeight::new(group(Family::SoEven, 1), vec![-4]).is_ok());
        assert!(DominantWeight::new(group(Family::Sp, 2), vec![1]).is_err());
    }

    #[test]
    fn sl_canonicalization() {
        let g = group(Family::Sl, 2);
        let base = DominantWeight::new(g, vec![3, 1, 0]).unwrap();
        for m in -2..=2 {
            let shifted = DominantWeight::new(g, vec![3 + m, 1 + m, m]).unwrap();
            assert_eq!(shifted, base);
        }
    }

    #[test]
    fn bar_examples() {
        let g = group(Family::SoEven, 2);
        let w = DominantWeight::new(g, vec![1, 1]).unwrap();
        assert_eq!(w.bar().unwrap().entries(), &[1, -1]);
        let w = DominantWeight::new(g, vec![1, 0]).unwrap();
        assert_eq!(w.bar().unwrap(), w);
        let w = DominantWeight::new(group(Family::SoEven, 3), vec![3, 2, -2]).unwrap();
        assert_eq!(w.bar().unwrap().entries(), &[3, 2, 2]);
        let w = DominantWeight::new(group(Family::Sp, 2), vec![1, 0]).unwrap();
        assert!(matches!(w.bar(), Err(Error::WrongFamily(_))));
    }

    #[test]
    fn membership_examples() {
        let sp1 = group(Family::Sp, 1);
        assert!(is_member(&ComplexMatrix::real_diagonal(&[2.0, 0.5]), sp1, 1e-12).unwrap());
        let sl2 = group(Family::Sl, 1);
        assert!(!is_member(&ComplexMatrix::real_diagonal(&[2.0, 3.0]), sl2, 1e-8).unwrap());
        let b1 = group(Family::SoOdd, 1);
        assert!(is_member(&ComplexMatrix::real_diagonal(&[4.0, 0.25, 1.0]), b1, 1e-12).unwrap());
        // A transvection is in SL₂ but not diagonal.
        let t = ComplexMatrix::from_real_rows(&[vec![1.0, 3.0], vec![0.0, 1.0]]).unwrap();
        assert!(is_member(&t, sl2, 1e-12).unwrap());
        // Sp₂ = SL₂.
        assert!(is_member(&t, sp1, 1e-12).unwrap());
        assert!(matches!(
            is_member(&ComplexMatrix::identity(3), sl2, 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reflection_is_orthogonal_but_not_special() {
        // Swapping x and y preserves xy but has determinant −1.
        let g = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(!is_member(&g, group(Family::SoEven, 1), 1e-8).unwrap());
    }

    #[test]
    fn samples_are_members() {
        for f in Family::ALL {
            for r in 1..=3 {
                let g = group(f, r);
                for seed in 0..5 {
                    let m = sample(g, seed, 1.0);
                    assert!(is_member(&m, g, 1e-8).unwrap(), "{g} seed {seed}");
                }
                let id = sample(g, 3, 0.0);
                assert!(id.relative_distance(&ComplexMatrix::identity(g.matrix_dim())) < 1e-8);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = group(Family::Sp, 2);
        assert_eq!(sample(g, 42, 0.7), sample(g, 42, 0.7));
        assert_ne!(sample(g, 42, 0.7), sample(g, 43, 0.7));
    }

    #[test]
    fn standard_rotation_converts_into_split_group() {
        let (ct, st) = (0.3_f64.cos(), 0.3_f64.sin());
        let rot = ComplexMatrix::from_real_rows(&[
            vec![ct, -st, 0.0],
            vec![st, ct, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let b1 = group(Family::SoOdd, 1);
        let split = split_from_standard(&rot, b1).unwrap();
        assert!(is_member(&split, b1, 1e-12).unwrap());
        assert!((split.trace() - rot.trace()).norm() < 1e-14);
        let back = standard_from_split(&split, b1).unwrap();
        assert!(back.relative_distance(&rot) < 1e-14);
    }

    #[test]
    fn gram_matrices() {
        let j = group(Family::Sp, 1).gram().unwrap();
        assert_eq!(j, ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap());
        let j = group(Family::SoOdd, 1).gram().unwrap();
        assert_eq!(
            j,
            ComplexMatrix::from_real_rows(&[
                vec![0.0, 0.5, 0.0],
                vec![0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ])
            .unwrap()
        );
        assert!(group(Family::Gl, 2).gram().is_none());
    }
}
