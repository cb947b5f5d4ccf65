//! Continuous-variable witnesses on two-mode Gaussian states.
//!
//! Quadratures are ordered `(x_A, k_A, x_B, k_B)` with `[x, k] = i`, so the
//! vacuum has variance 1/2 in every quadrature. Under this convention the
//! entropic bound is `log₂(πe)` and the variance-product bound is 1/4.
//! Every witness depends only on the covariance matrix.

use std::f64::consts::{E, PI};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::infotheory::Sign;
use crate::qmat::{hermitian_eigenvalues, CMatrix};
use crate::witness::{Direction, Steering, Unit, WitnessReport};

const SYMMETRY_TOL: f64 = 1e-12;
const PHYSICALITY_TOL: f64 = 1e-12;

const XA: usize = 0;
const KA: usize = 1;
const XB: usize = 2;
const KB: usize = 3;

/// Symplectic form for `(x_A, k_A, x_B, k_B)`.
fn symplectic_form() -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    s[(XA, KA)] = 1.0;
    s[(KA, XA)] = -1.0;
    s[(XB, KB)] = 1.0;
    s[(KB, XB)] = -1.0;
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: Matrix4<f64>,
    mean: Vector4<f64>,
}

impl GaussianState {
    /// Validates symmetry and the uncertainty principle `V + (i/2)Σ ≥ 0`.
    pub fn new(cov: Matrix4<f64>) -> Result<Self> {
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidState("non-finite covariance entry".into()));
        }
        let asym = (cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidState(format!("covariance not symmetric ({asym:.3e})")));
        }
        let sigma = symplectic_form();
        let m = CMatrix::from_fn(4, 4, |i, j| Complex64::new(cov[(i, j)], 0.5 * sigma[(i, j)]));
        let min_eig = hermitian_eigenvalues(&m)[0];
        if min_eig < -PHYSICALITY_TOL {
            return Err(Error::InvalidState(format!(
                "covariance violates the uncertainty principle (eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self {
            cov: (cov + cov.transpose()) * 0.5,
            mean: Vector4::zeros(),
        })
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    pub fn mean(&self) -> &Vector4<f64> {
        &self.mean
    }

    /// Phase-space displacement; leaves the covariance untouched.
    pub fn displaced(&self, shift: Vector4<f64>) -> Self {
        Self {
            cov: self.cov,
            mean: self.mean + shift,
        }
    }

    /// Symplectic eigenvalues of the covariance matrix, ascending.
    ///
    /// Entries are only known to one ulp, so for strongly squeezed states the
    /// result carries an absolute error of order `ε‖V‖²`.
    pub fn symplectic_eigenvalues(&self) -> [f64; 2] {
        // V^{1/2} (iΣ) V^{1/2} is Hermitian with eigenvalues ±ν_k.
        let sigma = symplectic_form();
        let vc = CMatrix::from_fn(4, 4, |i, j| Complex64::new(self.cov[(i, j)], 0.0));
        let root = crate::qmat::psd_sqrt(&vc);
        let isigma = CMatrix::from_fn(4, 4, |i, j| Complex64::new(0.0, sigma[(i, j)]));
        let h = &root * isigma * &root;
        let eig = hermitian_eigenvalues(&h);
        let mut nu = [eig[3].abs(), eig[2].abs()];
        nu.sort_by(f64::total_cmp);
        nu
    }

    /// Variance of `u · (x_A, k_A, x_B, k_B)`.
    pub fn variance_of(&self, u: Vector4<f64>) -> f64 {
        (u.transpose() * self.cov * u)[(0, 0)]
    }

    /// `σ²(target | given) = σ²_t − C²/σ²_g`.
    fn conditional_variance(&self, target: usize, given: usize) -> Result<f64> {
        let vg = self.cov[(given, given)];
        if !(vg > 0.0) {
            return Err(Error::InvalidState(format!("conditioning variance {vg} is not positive")));
        }
        let c = self.cov[(target, given)];
        Ok(self.cov[(target, target)] - c * c / vg)
    }
}

/// Two-mode squeezed vacuum with squeezing `r`.
pub fn tmsv(r: f64) -> Result<GaussianState> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing {r} must be finite and >= 0")));
    }
    let c = (2.0 * r).cosh() / 2.0;
    let s = (2.0 * r).sinh() / 2.0;
    let mut cov = Matrix4::from_diagonal_element(c);
    cov[(XA, XB)] = s;
    cov[(XB, XA)] = s;
    cov[(KA, KB)] = -s;
    cov[(KB, KA)] = -s;
    GaussianState::new(cov)
}

/// Differential entropy in bits of a Gaussian with variance `var`.
pub fn gaussian_entropy_bits(var: f64) -> f64 {
    0.5 * (2.0 * PI * E * var).log2()
}

/// `log₂(πe)`.
pub fn entropic_cv_bound() -> f64 {
    (PI * E).log2()
}

/// `h(x_B|x_A) + h(k_B|k_A) ≥ log₂(πe)` (for `AtoB`).
pub fn walborn_cv(g: &GaussianState, steering: Steering) -> Result<WitnessReport> {
    let (vx, vk) = match steering {
        Steering::AtoB => (g.conditional_variance(XB, XA)?, g.conditional_variance(KB, KA)?),
        Steering::BtoA => (g.conditional_variance(XA, XB)?, g.conditional_variance(KA, KB)?),
    };
    if !(vx > 0.0 && vk > 0.0) {
        return Err(Error::InvalidState("singular conditional variance".into()));
    }
    let lhs = gaussian_entropy_bits(vx) + gaussian_entropy_bits(vk);
    Ok(WitnessReport::lower_bounded(
        "walborn-cv",
        steering.into(),
        lhs,
        entropic_cv_bound(),
        Unit::Bits,
    ))
}

fn sumdiff_variances(g: &GaussianState, signs: (Sign, Sign)) -> (f64, f64) {
    let vx = g.variance_of(Vector4::new(1.0, 0.0, signs.0.as_f64(), 0.0));
    let vk = g.variance_of(Vector4::new(0.0, 1.0, 0.0, signs.1.as_f64()));
    (vx, vk)
}

/// `σ²(x_A ± x_B) σ²(k_A ∓ k_B) ≥ 1/4`; reported in variance-product units.
///
/// `signs.0` is the sign on `x_B`, `signs.1` the sign on `k_B`.
pub fn reid_sumdiff_cv(g: &GaussianState, signs: (Sign, Sign)) -> WitnessReport {
    let (vx, vk) = sumdiff_variances(g, signs);
    WitnessReport::lower_bounded(
        "reid-sumdiff-cv",
        Direction::Symmetric,
        vx * vk,
        0.25,
        Unit::VarianceProduct,
    )
}

/// `h(x_A ± x_B) + h(k_A ∓ k_B) ≥ log₂(πe)`.
pub fn entropic_sumdiff_cv(g: &GaussianState, signs: (Sign, Sign)) -> Result<WitnessReport> {
    let (vx, vk) = sumdiff_variances(g, signs);
    if !(vx > 0.0 && vk > 0.0) {
        return Err(Error::InvalidState("degenerate sum/difference variance".into()));
    }
    Ok(WitnessReport::lower_bounded(
        "entropic-sumdiff-cv",
        Direction::Symmetric,
        gaussian_entropy_bits(vx) + gaussian_entropy_bits(vk),
        entropic_cv_bound(),
        Unit::Bits,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPR: (Sign, Sign) = (Sign::Minus, Sign::Plus);

    // 1e-12 plus the rounding floor of ν computed from entries of size ‖V‖.
    fn physicality_slack(g: &GaussianState) -> f64 {
        let norm = g.cov().amax();
        1e-12 + 8.0 * f64::EPSILON * norm * norm
    }

    #[test]
    fn vacuum() {
        let g = tmsv(0.0).unwrap();
        assert_eq!(*g.cov(), Matrix4::from_diagonal_element(0.5));
        let w = walborn_cv(&g, Steering::AtoB).unwrap();
        assert!((w.lhs - entropic_cv_bound()).abs() < 1e-12 && w.violation.abs() < 1e-12);
        let reid = reid_sumdiff_cv(&g, EPR);
        assert!((reid.lhs - 1.0).abs() < 1e-12 && !reid.witnessed());
        let ent = entropic_sumdiff_cv(&g, EPR).unwrap();
        assert!((ent.lhs - (2.0 * PI * E).log2()).abs() < 1e-12);
        assert!((ent.violation + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tmsv_moments() {
        for r in [0.1, 0.5, 1.0, 2.0] {
            let g = tmsv(r).unwrap();
            let cond = g.conditional_variance(XB, XA).unwrap();
            assert!((cond - 1.0 / (2.0 * (2.0 * r).cosh())).abs() < 1e-12);
            let diff = g.variance_of(Vector4::new(1.0, 0.0, -1.0, 0.0));
            assert!((diff - (-2.0 * r).exp()).abs() < 1e-12);
        }
        assert!(tmsv(-0.1).is_err());
        assert!(tmsv(f64::NAN).is_err());
    }

    #[test]
    fn walborn_closed_form() {
        for r in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let g = tmsv(r).unwrap();
            for dir in [Steering::AtoB, Steering::BtoA] {
                let w = walborn_cv(&g, dir).unwrap();
                assert!((w.violation - (2.0 * r).cosh().log2()).abs() < 1e-9, "r={r}");
            }
        }
        let w = walborn_cv(&tmsv(1.0).unwrap(), Steering::AtoB).unwrap();
        assert!((w.violation - 1.9116).abs() < 1e-4);
        assert!((w.lhs - 1.1826).abs() < 1e-4);
    }

    #[test]
    fn sumdiff_closed_forms() {
        for r in [0.0, 0.2, 0.5, 1.0] {
            let g = tmsv(r).unwrap();
            let reid = reid_sumdiff_cv(&g, EPR);
            assert!((reid.lhs - (-4.0 * r).exp()).abs() < 1e-12);
            let ent = entropic_sumdiff_cv(&g, EPR).unwrap();
            let expected = (2.0 * PI * E).log2() - 2.0 * r * E.log2();
            assert!((ent.lhs - expected).abs() < 1e-12);
            assert_eq!(reid.witnessed(), ent.witnessed());
        }
        let reid = reid_sumdiff_cv(&tmsv(0.5).unwrap(), EPR);
        assert!((reid.violation - (0.25 - (-2.0f64).exp())).abs() < 1e-12);
        // the wrong sign pairing sees anti-squeezing
        let wrong = reid_sumdiff_cv(&tmsv(0.5).unwrap(), (Sign::Plus, Sign::Minus));
        assert!((wrong.lhs - 2.0f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn conditional_variance_witness_implies_entropic() {
        // Reid-type product of conditional variances below 1/4 ⇒ Walborn violated.
        for i in 0..=50 {
            let r = i as f64 * 0.05;
            let g = tmsv(r).unwrap();
            let prod = g.conditional_variance(XB, XA).unwrap() * g.conditional_variance(KB, KA).unwrap();
            let w = walborn_cv(&g, Steering::AtoB).unwrap();
            if prod < 0.25 {
                assert!(w.violation > 0.0);
            }
        }
    }

    #[test]
    fn displacement_invariance() {
        let g = tmsv(0.7).unwrap();
        let d = g.displaced(Vector4::new(1.0, -2.0, 0.5, 3.0));
        assert_eq!(walborn_cv(&g, Steering::AtoB).unwrap(), walborn_cv(&d, Steering::AtoB).unwrap());
        assert_eq!(reid_sumdiff_cv(&g, EPR), reid_sumdiff_cv(&d, EPR));
        assert_eq!(entropic_sumdiff_cv(&g, EPR).unwrap(), entropic_sumdiff_cv(&d, EPR).unwrap());
    }

    #[test]
    fn physicality() {
        for i in 0..=50 {
            let g = tmsv(i as f64 * 0.1).unwrap();
            let nu = g.symplectic_eigenvalues();
            assert!(nu[0] >= 0.5 - physicality_slack(&g), "r={} nu={nu:?}", i as f64 * 0.1);
        }
        assert!(GaussianState::new(Matrix4::from_diagonal_element(0.2)).is_err());
        let mut asym = Matrix4::from_diagonal_element(1.0);
        asym[(0, 1)] = 0.1;
        assert!(GaussianState::new(asym).is_err());
    }
}
