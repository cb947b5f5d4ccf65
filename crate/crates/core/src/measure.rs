//! Measurements and their joint outcome statistics.
//!
//! Projective bases are promoted to rank-1 POVMs when a distribution is
//! computed, so every witness shares one probability code path. The
//! Maassen–Uffink constant Ω is computed from basis overlaps for projective
//! pairs and from operator norms `‖F_i G_j‖` for general POVMs.

use std::borrow::Cow;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};
use crate::qmat::{hermitian_eigenvalues, hermiticity_defect, identity, psd_sqrt, CMatrix, CVector, DensityMatrix, STRUCT_TOL};

/// Entries more negative than this are an error rather than rounding noise.
pub const NEGATIVE_PROB_TOL: f64 = 1e-12;

/// An orthonormal basis `{|R_i⟩}`; outcome `i` corresponds to `vectors[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveBasis {
    vectors: Vec<CVector>,
}

impl ProjectiveBasis {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::InvalidMeasurement("empty basis".into()));
        }
        for v in &vectors {
            if v.len() != d {
                return Err(mismatch(format!("vectors of length {d}"), v.len()));
            }
        }
        for i in 0..d {
            for j in i..d {
                let ip = vectors[i].dotc(&vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - Complex64::new(target, 0.0)).norm() > STRUCT_TOL {
                    return Err(Error::InvalidMeasurement(format!(
                        "basis not orthonormal: <{i}|{j}> = {ip}"
                    )));
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| CVector::from_fn(d, |k, _| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0)))
            .collect();
        Self { vectors }
    }

    /// Basis formed by the columns of a unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(mismatch("square unitary", format!("{}x{}", u.nrows(), u.ncols())));
        }
        Self::new(u.column_iter().map(|c| c.into_owned()).collect())
    }

    /// `{U|R_i⟩}`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(mismatch(self.dim(), format!("{}x{}", u.nrows(), u.ncols())));
        }
        Self::new(self.vectors.iter().map(|v| u * v).collect())
    }

    /// Relabels outcomes: new outcome `i` is old outcome `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dim()];
        if perm.len() != self.dim() || perm.iter().any(|&p| p >= self.dim() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
        }
        Ok(Self {
            vectors: perm.iter().map(|&p| self.vectors[p].clone()).collect(),
        })
    }

    /// Multiplies each vector by a phase; the measurement is unchanged.
    pub fn rephased(&self, phases: &[f64]) -> Self {
        Self {
            vectors: self
                .vectors
                .iter()
                .zip(phases.iter().chain(std::iter::repeat(&0.0)))
                .map(|(v, &t)| v * Complex64::from_polar(1.0, t))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(|v| v * v.adjoint()).collect()
    }

    pub fn to_povm(&self) -> Povm {
        Povm {
            dim: self.dim(),
            elements: self.projectors(),
        }
    }
}

/// A positive-operator-valued measure `{F_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .map(|e| e.nrows())
            .ok_or_else(|| Error::InvalidMeasurement("POVM has no elements".into()))?;
        let mut total = CMatrix::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(mismatch(
                    format!("{dim}x{dim} element"),
                    format!("{}x{}", e.nrows(), e.ncols()),
                ));
            }
            if hermiticity_defect(e) > STRUCT_TOL {
                return Err(Error::InvalidMeasurement(format!("element {i} is not Hermitian")));
            }
            let min_eig = hermitian_eigenvalues(e)[0];
            if min_eig < -STRUCT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element {i} has negative eigenvalue {min_eig:.3e}"
                )));
            }
            total += e;
        }
        let defect = (total - identity(dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > STRUCT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to identity only within {defect:.3e}"
            )));
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

/// Anything that yields effect operators on a `dim`-dimensional system.
pub trait Measurement: Sync {
    fn dim(&self) -> usize;
    fn n_outcomes(&self) -> usize;
    fn effects(&self) -> Cow<'_, [CMatrix]>;
    fn as_basis(&self) -> Option<&ProjectiveBasis> {
        None
    }
}

impl Measurement for ProjectiveBasis {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn n_outcomes(&self) -> usize {
        self.dim()
    }
    fn effects(&self) -> Cow<'_, [CMatrix]> {
        Cow::Owned(self.projectors())
    }
    fn as_basis(&self) -> Option<&ProjectiveBasis> {
        Some(self)
    }
}

impl Measurement for Povm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn n_outcomes(&self) -> usize {
        self.elements.len()
    }
    fn effects(&self) -> Cow<'_, [CMatrix]> {
        Cow::Borrowed(&self.elements)
    }
}

/// Joint outcome probabilities `P(a, b)`; rows index Alice's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: DMatrix<f64>,
}

impl JointDistribution {
    /// Validates and clamps tiny negative entries to zero.
    pub fn new(mut probs: DMatrix<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty joint distribution".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution("non-finite probability".into()));
            }
            if *p < 0.0 {
                if *p < -NEGATIVE_PROB_TOL {
                    return Err(Error::InvalidDistribution(format!("negative probability {p:.3e}")));
                }
                *p = 0.0;
            }
        }
        let total = probs.sum();
        if (total - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { probs })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n_b = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_b) {
            return Err(Error::InvalidDistribution("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(rows.len(), n_b, |a, b| rows[a][b]))
    }

    pub fn n_a(&self) -> usize {
        self.probs.nrows()
    }

    pub fn n_b(&self) -> usize {
        self.probs.ncols()
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[(a, b)]
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.probs.row_iter().map(|r| r.sum()).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        self.probs.column_iter().map(|c| c.sum()).collect()
    }

    /// Swaps the roles of Alice and Bob.
    pub fn transposed(&self) -> Self {
        Self {
            probs: self.probs.transpose(),
        }
    }
}

/// `P(a, b) = Tr[(E_a ⊗ E_b) ρ]`.
pub fn joint_distribution(
    rho: &DensityMatrix,
    meas_a: &dyn Measurement,
    meas_b: &dyn Measurement,
) -> Result<JointDistribution> {
    let (da, db) = rho.dims();
    if meas_a.dim() != da || meas_b.dim() != db {
        return Err(mismatch(
            format!("local dims ({da}, {db})"),
            format!("({}, {})", meas_a.dim(), meas_b.dim()),
        ));
    }
    let ea = meas_a.effects();
    let eb = meas_b.effects();
    let m = rho.matrix();
    let mut probs = DMatrix::<f64>::zeros(ea.len(), eb.len());
    for (b, e_b) in eb.iter().enumerate() {
        // σ_b = Tr_B[ρ (I ⊗ E_b)]
        let sigma = CMatrix::from_fn(da, da, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..db {
                for l in 0..db {
                    acc += m[(i * db + k, j * db + l)] * e_b[(l, k)];
                }
            }
            acc
        });
        for (a, e_a) in ea.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    acc += e_a[(j, i)] * sigma[(i, j)];
                }
            }
            probs[(a, b)] = acc.re;
        }
    }
    JointDistribution::new(probs)
}

/// Outcome distribution of a local measurement on a single-system state.
pub fn local_distribution(state: &CMatrix, meas: &dyn Measurement) -> Result<Vec<f64>> {
    if state.nrows() != meas.dim() {
        return Err(mismatch(meas.dim(), state.nrows()));
    }
    Ok(meas
        .effects()
        .iter()
        .map(|e| (e * state).trace().re.max(0.0))
        .collect())
}

fn basis_vector(entries: [Complex64; 2]) -> CVector {
    CVector::from_vec(entries.to_vec())
}

/// Eigenbases of σ_x, σ_y, σ_z, in that order. The +1 eigenvector is outcome 0:
/// `X = {(1, 1), (1, −1)}/√2`, `Y = {(1, i), (1, −i)}/√2`, `Z = {(1, 0), (0, 1)}`.
pub fn pauli_bases() -> Vec<ProjectiveBasis> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let x = vec![basis_vector([c(s, 0.0), c(s, 0.0)]), basis_vector([c(s, 0.0), c(-s, 0.0)])];
    let y = vec![basis_vector([c(s, 0.0), c(0.0, s)]), basis_vector([c(s, 0.0), c(0.0, -s)])];
    vec![
        ProjectiveBasis { vectors: x },
        ProjectiveBasis { vectors: y },
        ProjectiveBasis::computational(2),
    ]
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

/// Complete set of `d + 1` mutually unbiased bases for prime `d`.
///
/// For `d = 2` these are [`pauli_bases`]. For odd prime `d`: the computational
/// basis followed by the bases `v_m^{(a)}[n] = ω^{a n² + m n} / √d`, `a = 0..d`.
pub fn mub_set(d: usize) -> Result<Vec<ProjectiveBasis>> {
    if !is_prime(d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if d == 2 {
        return Ok(pauli_bases());
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut bases = vec![ProjectiveBasis::computational(d)];
    for a in 0..d {
        let vectors = (0..d)
            .map(|m| {
                CVector::from_fn(d, |n, _| {
                    let exponent = (a * n * n + m * n) % d;
                    Complex64::from_polar(norm, 2.0 * PI * exponent as f64 / d as f64)
                })
            })
            .collect();
        bases.push(ProjectiveBasis::new(vectors)?);
    }
    Ok(bases)
}

/// Largest deviation of any cross-basis `|⟨e_i|f_j⟩|²` from `1/d`.
pub fn mub_defect(bases: &[ProjectiveBasis]) -> f64 {
    let mut worst = 0.0f64;
    for (i, r) in bases.iter().enumerate() {
        for s in &bases[i + 1..] {
            let d = r.dim() as f64;
            for u in r.vectors() {
                for v in s.vectors() {
                    worst = worst.max((u.dotc(v).norm_sqr() - 1.0 / d).abs());
                }
            }
        }
    }
    worst
}

/// Ω = min over (i, j) of `1/|⟨R_i|S_j⟩|²`.
///
/// Panics if the bases have different dimensions.
pub fn overlap_omega(r: &ProjectiveBasis, s: &ProjectiveBasis) -> f64 {
    assert_eq!(r.dim(), s.dim(), "overlap_omega needs bases of equal dimension");
    let max_overlap = r
        .vectors()
        .iter()
        .flat_map(|u| s.vectors().iter().map(move |v| u.dotc(v).norm_sqr()))
        .fold(0.0, f64::max);
    1.0 / max_overlap
}

fn operator_norm(m: &CMatrix) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

fn povm_omega_effects(f: &[CMatrix], g: &[CMatrix]) -> f64 {
    let max_norm = f
        .iter()
        .flat_map(|fi| g.iter().map(move |gj| operator_norm(&(fi * gj))))
        .fold(0.0, f64::max);
    1.0 / (max_norm * max_norm)
}

/// Ω_POVM = min over (i, j) of `1/‖F_i G_j‖²` with the operator (spectral) norm.
///
/// Equals [`overlap_omega`] for rank-1 projective POVMs. For non-projective
/// elements `log₂` of this value is *not* a valid entropy-sum bound (the
/// trivial POVM `{I/2, I/2}` gives 16 while `H(F) + H(G) = 2`); witnesses use
/// [`povm_omega_sqrt`] instead.
///
/// Panics if the POVMs act on different dimensions.
pub fn povm_omega(f: &Povm, g: &Povm) -> f64 {
    assert_eq!(f.dim(), g.dim(), "povm_omega needs POVMs of equal dimension");
    povm_omega_effects(f.elements(), g.elements())
}

fn povm_omega_sqrt_effects(f: &[CMatrix], g: &[CMatrix]) -> f64 {
    let f_roots: Vec<CMatrix> = f.iter().map(psd_sqrt).collect();
    let g_roots: Vec<CMatrix> = g.iter().map(psd_sqrt).collect();
    povm_omega_effects(&f_roots, &g_roots)
}

/// Krishna–Parthasarathy constant: min over (i, j) of `1/‖√F_i √G_j‖²`.
/// `H(F) + H(G) ≥ log₂` of this holds for every state.
pub fn povm_omega_sqrt(f: &Povm, g: &Povm) -> f64 {
    assert_eq!(f.dim(), g.dim(), "povm_omega_sqrt needs POVMs of equal dimension");
    povm_omega_sqrt_effects(f.elements(), g.elements())
}

/// Ω for any pair of measurements on the same system: the overlap form for
/// two projective bases, [`povm_omega_sqrt`] otherwise.
pub fn omega(m1: &dyn Measurement, m2: &dyn Measurement) -> Result<f64> {
    if m1.dim() != m2.dim() {
        return Err(mismatch(m1.dim(), m2.dim()));
    }
    Ok(match (m1.as_basis(), m2.as_basis()) {
        (Some(r), Some(s)) => overlap_omega(r, s),
        _ => povm_omega_sqrt_effects(&m1.effects(), &m2.effects()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{partial_trace, random_mixed_state, random_unitary, singlet, werner_state, Subsystem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pauli_bases_layout() {
        let [x, _y, z] = <[ProjectiveBasis; 3]>::try_from(pauli_bases()).unwrap();
        assert_eq!(z.vectors()[0].as_slice(), &[c(1.0), c(0.0)]);
        assert_eq!(z.vectors()[1].as_slice(), &[c(0.0), c(1.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.vectors()[1][1] - c(-s)).norm() < 1e-15);
        assert!(mub_defect(&pauli_bases()) < 1e-15);
    }

    #[test]
    fn mub_sets_for_primes() {
        assert_eq!(mub_set(2).unwrap(), pauli_bases());
        for d in [3, 5, 7] {
            let set = mub_set(d).unwrap();
            assert_eq!(set.len(), d + 1);
            assert!(mub_defect(&set) < 1e-10, "d={d}");
        }
        // every one of the 81 cross overlaps per pair is 1/3
        let set = mub_set(3).unwrap();
        for (i, r) in set.iter().enumerate() {
            for s in &set[i + 1..] {
                for u in r.vectors() {
                    for v in s.vectors() {
                        assert!((u.dotc(v).norm_sqr() - 1.0 / 3.0).abs() < 1e-10);
                    }
                }
            }
        }
        assert_eq!(mub_set(4), Err(Error::UnsupportedDimension(4)));
        assert!(mub_set(1).is_err());
        assert!(mub_set(9).is_err());
    }

    #[test]
    fn singlet_zz_is_anticorrelated() {
        let z = ProjectiveBasis::computational(2);
        let j = joint_distribution(&singlet().projector(), &z, &z).unwrap();
        let expected = [[0.0, 0.5], [0.5, 0.0]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((j.get(a, b) - expected[a][b]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let rho = DensityMatrix::maximally_mixed(2, 2).unwrap();
        for r in pauli_bases() {
            for s in pauli_bases() {
                let j = joint_distribution(&rho, &r, &s).unwrap();
                assert!(j.probs().iter().all(|p| (p - 0.25).abs() < 1e-14));
            }
        }
    }

    #[test]
    fn werner_zz_distribution() {
        let z = ProjectiveBasis::computational(2);
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let j = joint_distribution(&werner_state(p).unwrap(), &z, &z).unwrap();
            assert!((j.get(0, 0) - (1.0 - p) / 4.0).abs() < 1e-14);
            assert!((j.get(1, 1) - (1.0 - p) / 4.0).abs() < 1e-14);
            assert!((j.get(0, 1) - (1.0 + p) / 4.0).abs() < 1e-14);
            assert!((j.get(1, 0) - (1.0 + p) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn joint_rejects_wrong_dims() {
        let rho = werner_state(0.3).unwrap();
        let z3 = ProjectiveBasis::computational(3);
        let z2 = ProjectiveBasis::computational(2);
        assert!(joint_distribution(&rho, &z3, &z2).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(JointDistribution::from_rows(&[&[0.5, 0.5 + 1e-13], &[0.0, -1e-13]]).is_ok());
        assert!(JointDistribution::from_rows(&[&[0.6, 0.5], &[0.0, -0.1]]).is_err());
        assert!(JointDistribution::from_rows(&[&[0.6, 0.5]]).is_err());
        let j = JointDistribution::from_rows(&[&[0.5, 0.0], &[0.0, -1e-13]]);
        assert!(j.is_err(), "sum is 0.5");
    }

    #[test]
    fn no_signalling_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let rho = random_mixed_state(2, 3, 6, &mut rng).unwrap();
            let ua = random_unitary(2, &mut rng).unwrap();
            let ub = random_unitary(3, &mut rng).unwrap();
            let ra = ProjectiveBasis::from_unitary(&ua).unwrap();
            let rb = ProjectiveBasis::from_unitary(&ub).unwrap();
            let j = joint_distribution(&rho, &ra, &rb).unwrap();
            let pa = local_distribution(&partial_trace(&rho, Subsystem::A), &ra).unwrap();
            let pb = local_distribution(&partial_trace(&rho, Subsystem::B), &rb).unwrap();
            for (x, y) in j.marginal_a().iter().zip(&pa) {
                assert!((x - y).abs() < 1e-10);
            }
            for (x, y) in j.marginal_b().iter().zip(&pb) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn omega_examples() {
        let p = pauli_bases();
        assert!((overlap_omega(&p[0], &p[2]) - 2.0).abs() < 1e-12);
        assert!((overlap_omega(&p[1], &p[1]) - 1.0).abs() < 1e-12);
        for d in [3, 5] {
            let m = mub_set(d).unwrap();
            assert!((overlap_omega(&m[0], &m[1]) - d as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn omega_random_qubit_pairs_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let r = ProjectiveBasis::from_unitary(&random_unitary(2, &mut rng).unwrap()).unwrap();
            let s = ProjectiveBasis::from_unitary(&random_unitary(2, &mut rng).unwrap()).unwrap();
            let omega_rs = overlap_omega(&r, &s);
            let mut brute = f64::INFINITY;
            for i in 0..2 {
                for j in 0..2 {
                    let ov: Complex64 = (0..2).map(|k| r.vectors()[i][k].conj() * s.vectors()[j][k]).sum();
                    brute = brute.min(1.0 / ov.norm_sqr());
                }
            }
            assert!((omega_rs - brute).abs() < 1e-9);
            assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&omega_rs));
            assert!((omega_rs - overlap_omega(&s, &r)).abs() < 1e-10);
            let phased = r.rephased(&[0.7, -2.1]);
            assert!((omega_rs - overlap_omega(&phased, &s)).abs() < 1e-10);
        }
    }

    #[test]
    fn povm_omega_trivial_povm() {
        let half = identity(2) * c(0.5);
        let f = Povm::new(vec![half.clone(), half]).unwrap();
        assert!((povm_omega(&f, &f) - 16.0).abs() < 1e-10);
        assert!((povm_omega_sqrt(&f, &f) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rank_one_povm_forms_agree_with_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let r = ProjectiveBasis::from_unitary(&random_unitary(3, &mut rng).unwrap()).unwrap();
            let s = ProjectiveBasis::from_unitary(&random_unitary(3, &mut rng).unwrap()).unwrap();
            let o = overlap_omega(&r, &s);
            assert!((povm_omega(&r.to_povm(), &s.to_povm()) - o).abs() < 1e-9);
            assert!((povm_omega_sqrt(&r.to_povm(), &s.to_povm()) - o).abs() < 1e-9);
        }
    }

    // H(F) + H(G) ≥ log₂ Ω holds for the square-root form on noisy POVMs.
    #[test]
    fn sqrt_form_is_a_valid_uncertainty_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..500 {
            let eta: f64 = rand::Rng::random_range(&mut rng, 0.0..1.0);
            let noisy = |b: &ProjectiveBasis| {
                Povm::new(b.projectors().into_iter().map(|p| p * c(eta) + identity(2) * c((1.0 - eta) / 2.0)).collect()).unwrap()
            };
            let r = ProjectiveBasis::from_unitary(&random_unitary(2, &mut rng).unwrap()).unwrap();
            let s = ProjectiveBasis::from_unitary(&random_unitary(2, &mut rng).unwrap()).unwrap();
            let (f, g) = (noisy(&r), noisy(&s));
            let rho = crate::qmat::random_density_operator(2, 1, &mut rng).unwrap();
            let h = |m: &Povm| crate::infotheory::entropy_bits(&local_distribution(&rho, m).unwrap());
            assert!(h(&f) + h(&g) + 1e-9 >= povm_omega_sqrt(&f, &g).log2());
        }
    }

    // Oracle: ‖A‖² is the top eigenvalue of A†A.
    #[test]
    fn povm_omega_matches_eigenvalue_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let half = identity(2) * c(0.5);
        let split = Povm::new(vec![half.clone() * c(0.4), half.clone() * c(1.6)]).unwrap();
        for _ in 0..100 {
            let f = ProjectiveBasis::from_unitary(&random_unitary(2, &mut rng).unwrap())
                .unwrap()
                .to_povm();
            let mut worst: f64 = 0.0;
            for fi in f.elements() {
                for gj in split.elements() {
                    let prod = fi * gj;
                    let top = *hermitian_eigenvalues(&(prod.adjoint() * &prod)).last().unwrap();
                    worst = worst.max(top);
                }
            }
            assert!((povm_omega(&f, &split) - 1.0 / worst).abs() < 1e-9);
        }
    }

    #[test]
    fn povm_rejects_invalid() {
        let half = identity(2) * c(0.5);
        assert!(Povm::new(vec![half.clone()]).is_err());
        let mut neg = identity(2) * c(1.5);
        neg[(1, 1)] = c(-0.5);
        let rest = identity(2) - &neg;
        assert!(Povm::new(vec![neg, rest]).is_err());
        assert!(Povm::new(vec![]).is_err());
    }

    #[test]
    fn permutation_validation() {
        let z = ProjectiveBasis::computational(3);
        assert!(z.permuted(&[2, 0, 1]).is_ok());
        assert!(z.permuted(&[0, 0, 1]).is_err());
        assert!(z.permuted(&[0, 1]).is_err());
    }
}
