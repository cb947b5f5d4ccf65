//! Dense complex linear algebra for bipartite states.
//!
//! States live on `C^{d_A} ⊗ C^{d_B}` with the composite index
//! `i_A * d_B + i_B` (subsystem A is the slow index). Random sampling always
//! takes an explicit RNG; nothing here touches global state.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{mismatch, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance for structural invariants (Hermiticity, trace, orthonormality).
pub const STRUCT_TOL: f64 = 1e-10;
/// Tolerance for derived spectral comparisons.
pub const SPECTRAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Largest `|M_ij - conj(M_ji)|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Only the Hermitian part `(M + M†)/2` is diagonalized.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigen-decomposition `(eigenvalues, eigenvectors-as-columns)` of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let se = SymmetricEigen::new(h);
    (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
}

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Negative eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let roots = DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0)),
    );
    &vecs * CMatrix::from_diagonal(&roots) * vecs.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Checks that `m` is a density operator: square, Hermitian, unit trace, PSD.
pub fn validate_density(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidState(format!(
            "matrix is {}x{}, expected nonempty square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite entry".into()));
    }
    let herm = hermiticity_defect(m);
    if herm > STRUCT_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > STRUCT_TOL || tr.im.abs() > STRUCT_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let min_eig = hermitian_eigenvalues(m)[0];
    if min_eig < -STRUCT_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}

/// A validated bipartite density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: (usize, usize),
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: (usize, usize), mat: CMatrix) -> Result<Self> {
        let n = dims.0 * dims.1;
        if dims.0 == 0 || dims.1 == 0 || mat.nrows() != n || mat.ncols() != n {
            return Err(mismatch(
                format!("{n}x{n} for dims {dims:?}"),
                format!("{}x{}", mat.nrows(), mat.ncols()),
            ));
        }
        validate_density(&mat)?;
        let mat = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { dims, mat })
    }

    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Result<Self> {
        let n = d_a * d_b;
        if n == 0 {
            return Err(Error::InvalidParameter("dimensions must be >= 1".into()));
        }
        Self::new((d_a, d_b), identity(n) / Complex64::new(n as f64, 0.0))
    }

    /// `rho_a ⊗ rho_b` for single-system density operators.
    pub fn product(rho_a: &CMatrix, rho_b: &CMatrix) -> Result<Self> {
        validate_density(rho_a)?;
        validate_density(rho_b)?;
        Self::new((rho_a.nrows(), rho_b.nrows()), kron(rho_a, rho_b))
    }

    /// Convex combination `Σ w_i ρ_i`; weights are normalized.
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let dims = first.1.dims;
        let total: f64 = terms.iter().map(|(w, _)| *w).sum();
        if terms.iter().any(|(w, _)| *w < 0.0) || !(total > 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative with positive sum".into(),
            ));
        }
        let n = dims.0 * dims.1;
        let mut acc = CMatrix::zeros(n, n);
        for (w, rho) in terms {
            if rho.dims != dims {
                return Err(mismatch(format!("{dims:?}"), format!("{:?}", rho.dims)));
            }
            acc += &rho.mat * Complex64::new(w / total, 0.0);
        }
        Self::new(dims, acc)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Eigenvalues clamped to `[0, 1]`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
            .into_iter()
            .map(|v| v.clamp(0.0, 1.0))
            .collect()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn reduced(&self, keep: Subsystem) -> CMatrix {
        partial_trace(self, keep)
    }

    /// Transpose on subsystem B.
    pub fn partial_transpose(&self) -> CMatrix {
        let (da, db) = self.dims;
        let n = da * db;
        CMatrix::from_fn(n, n, |r, c| {
            let (i, k) = (r / db, r % db);
            let (j, l) = (c / db, c % db);
            self.mat[(i * db + l, j * db + k)]
        })
    }
}

/// Reduced state on `keep`, tracing out the other subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> CMatrix {
    partial_trace_matrix(&rho.mat, rho.dims, keep).expect("validated dims")
}

/// Partial trace of a raw `(d_A d_B) × (d_A d_B)` matrix.
pub fn partial_trace_matrix(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.nrows() != n || m.ncols() != n {
        return Err(mismatch(
            format!("{n}x{n} for dims {dims:?}"),
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

/// A normalized bipartite state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: (usize, usize),
    vec: CVector,
}

impl PureState {
    pub fn new(dims: (usize, usize), vec: CVector) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || vec.len() != dims.0 * dims.1 {
            return Err(mismatch(dims.0 * dims.1, vec.len()));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidState(format!("state norm {norm}, expected 1")));
        }
        Ok(Self { dims, vec })
    }

    /// Rescales `vec` to unit norm.
    pub fn normalized(dims: (usize, usize), vec: CVector) -> Result<Self> {
        let norm = vec.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        Self::new(dims, vec.unscale(norm))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn vector(&self) -> &CVector {
        &self.vec
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.vec * self.vec.adjoint();
        DensityMatrix::new(self.dims, m).expect("projector of a unit vector")
    }
}

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_vec(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    PureState::normalized((2, 2), v).expect("singlet")
}

/// `p |Φ_s⟩⟨Φ_s| + (1 − p) I/4`.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "Werner weight {p} outside [0, 1]"
        )));
    }
    let s = singlet().projector();
    let m = s.matrix() * Complex64::new(p, 0.0) + identity(4) * Complex64::new((1.0 - p) / 4.0, 0.0);
    DensityMatrix::new((2, 2), m)
}

/// Complex normal with `E|z|² = 1`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // Column-major fill keeps the draw order independent of nalgebra internals.
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_vec(rows, cols, data)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<CMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter("unitary dimension must be >= 1".into()));
    }
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Uniformly (Haar) distributed pure state on `C^{d_A} ⊗ C^{d_B}`.
pub fn random_pure_state<R: Rng + ?Sized>(d_a: usize, d_b: usize, rng: &mut R) -> Result<PureState> {
    if d_a == 0 || d_b == 0 {
        return Err(Error::InvalidParameter("dimensions must be >= 1".into()));
    }
    let v = CVector::from_iterator(d_a * d_b, (0..d_a * d_b).map(|_| complex_gaussian(rng)));
    PureState::normalized((d_a, d_b), v)
}

/// Single-system density operator `GG†/Tr(GG†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_operator<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<CMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} invalid for dimension {d}"
        )));
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    Ok(w / Complex64::new(tr, 0.0))
}

/// Mixed state from the Hilbert–Schmidt-induced measure of the given rank
/// (`rank = d_A d_B` gives the flat Hilbert–Schmidt measure).
pub fn random_mixed_state<R: Rng + ?Sized>(
    d_a: usize,
    d_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let m = random_density_operator(d_a * d_b, rank, rng)?;
    DensityMatrix::new((d_a, d_b), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn singlet_marginals_are_maximally_mixed() {
        let rho = singlet().projector();
        let half = identity(2) * Complex64::new(0.5, 0.0);
        assert!(max_abs(&(rho.reduced(Subsystem::A) - &half)) < 1e-12);
        assert!(max_abs(&(rho.reduced(Subsystem::B) - &half)) < 1e-12);
    }

    #[test]
    fn product_state_traces_back_to_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_density_operator(2, 2, &mut rng).unwrap();
        let b = random_density_operator(3, 2, &mut rng).unwrap();
        let rho = DensityMatrix::product(&a, &b).unwrap();
        assert!(max_abs(&(rho.reduced(Subsystem::A) - &a)) < 1e-12);
        assert!(max_abs(&(rho.reduced(Subsystem::B) - &b)) < 1e-12);
    }

    #[test]
    fn werner_reduced_states_are_maximally_mixed() {
        let half = identity(2) * Complex64::new(0.5, 0.0);
        for k in 0..=10 {
            let w = werner_state(k as f64 / 10.0).unwrap();
            assert!(max_abs(&(w.reduced(Subsystem::B) - &half)) < 1e-12);
            assert!(max_abs(&(w.reduced(Subsystem::A) - &half)) < 1e-12);
        }
    }

    #[test]
    fn werner_endpoints_and_spectrum() {
        let w1 = werner_state(1.0).unwrap();
        assert!(max_abs(&(w1.matrix() - singlet().projector().matrix())) < 1e-14);
        let w0 = werner_state(0.0).unwrap();
        assert!(max_abs(&(w0.matrix() - identity(4) * Complex64::new(0.25, 0.0))) < 1e-14);
        let eig = werner_state(0.5).unwrap().eigenvalues();
        let expected = [0.125, 0.125, 0.125, 0.625];
        for (e, x) in eig.iter().zip(expected) {
            assert!((e - x).abs() < 1e-12, "{eig:?}");
        }
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(-0.1).is_err());
    }

    #[test]
    fn rejects_mismatched_dims() {
        let m = identity(4) * Complex64::new(0.25, 0.0);
        assert!(matches!(
            DensityMatrix::new((2, 3), m.clone()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(partial_trace_matrix(&m, (3, 2), Subsystem::A).is_err());
    }

    #[test]
    fn rejects_non_density_matrices() {
        let mut m = identity(2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(DensityMatrix::new((2, 1), m).is_err());
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(1.2, 0.0),
            Complex64::new(-0.2, 0.0),
        ]));
        assert!(DensityMatrix::new((2, 1), m).is_err());
        assert!(DensityMatrix::new((2, 1), identity(2)).is_err());
    }

    #[test]
    fn unitary_is_unitary_and_deterministic() {
        for d in 1..=6 {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let u = random_unitary(d, &mut rng).unwrap();
            let defect = max_abs(&(u.adjoint() * &u - identity(d)));
            assert!(defect < 1e-10, "d={d} defect={defect}");
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            assert_eq!(u, random_unitary(d, &mut rng).unwrap());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(1, &mut rng).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(random_unitary(0, &mut rng).is_err());
    }

    #[test]
    fn haar_first_column_overlap_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| random_unitary(2, &mut rng).unwrap()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean overlap {mean}");
    }

    #[test]
    fn pure_state_normalized_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_pure_state(3, 2, &mut rng).unwrap();
        assert!((psi.vector().norm() - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(psi, random_pure_state(3, 2, &mut rng).unwrap());
    }

    // Brute-force oracle: largest reduced eigenvalue of a 2x2 Haar pure state
    // has density ∝ (2λ - 1)² on [1/2, 1], giving mean 7/8.
    #[test]
    fn haar_pure_state_schmidt_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let rho = random_pure_state(2, 2, &mut rng).unwrap().projector();
            let r = rho.reduced(Subsystem::A);
            // 2x2 closed form: λmax = (1 + sqrt(1 - 4 det)) / 2
            let det = (r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)]).re;
            acc += 0.5 * (1.0 + (1.0 - 4.0 * det).max(0.0).sqrt());
        }
        let mean = acc / n as f64;
        assert!((mean - 0.875).abs() < 0.01, "mean largest eigenvalue {mean}");
    }

    #[test]
    fn mixed_state_purity_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| random_mixed_state(2, 2, 4, &mut rng).unwrap().purity())
            .sum::<f64>()
            / n as f64;
        // Tr ρ² averages 2N/(N²+1) = 8/17 for N = 4.
        assert!((mean - 8.0 / 17.0).abs() < 0.02, "mean purity {mean}");
    }

    #[test]
    fn rank_one_mixed_state_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let rho = random_mixed_state(2, 2, 1, &mut rng).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-12);
        }
        assert!(random_mixed_state(2, 2, 5, &mut rng).is_err());
        assert!(random_mixed_state(2, 2, 0, &mut rng).is_err());
    }

    #[test]
    fn generated_states_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for i in 0..10_000 {
            let rank = 1 + i % 4;
            let rho = random_mixed_state(2, 2, rank, &mut rng).unwrap();
            let m = rho.matrix();
            assert!(hermiticity_defect(m) < 1e-10);
            assert!((m.trace().re - 1.0).abs() < 1e-10);
            assert!(hermitian_eigenvalues(m)[0] >= -1e-12);
        }
    }

    #[test]
    fn pure_state_marginal_spectra_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (da, db) in [(2, 2), (2, 3), (3, 3), (2, 4)] {
            for _ in 0..50 {
                let rho = random_pure_state(da, db, &mut rng).unwrap().projector();
                let mut ea = hermitian_eigenvalues(&rho.reduced(Subsystem::A));
                let mut eb = hermitian_eigenvalues(&rho.reduced(Subsystem::B));
                ea.reverse();
                eb.reverse();
                let k = ea.len().min(eb.len());
                for i in 0..k {
                    assert!((ea[i] - eb[i]).abs() < SPECTRAL_TOL);
                }
                for x in ea[k..].iter().chain(&eb[k..]) {
                    assert!(x.abs() < SPECTRAL_TOL);
                }
            }
        }
    }

    #[test]
    fn partial_transpose_of_singlet_has_negative_eigenvalue() {
        let pt = singlet().projector().partial_transpose();
        let eig = hermitian_eigenvalues(&pt);
        assert!((eig[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = random_density_operator(4, 3, &mut rng).unwrap();
        let s = psd_sqrt(&m);
        assert!(max_abs(&(&s * &s - &m)) < 1e-12);
    }
}
