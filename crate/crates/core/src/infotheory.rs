//! Entropy functionals in bits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::measure::{JointDistribution, NEGATIVE_PROB_TOL};
use crate::qmat::{hermitian_eigenvalues, psd_sqrt, validate_density, CMatrix, DensityMatrix, STRUCT_TOL};

/// Probabilities below this contribute nothing to an entropy.
pub const ZERO_PROB: f64 = 1e-15;

/// A normalized probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -NEGATIVE_PROB_TOL || *p > 1.0 + STRUCT_TOL {
                return Err(Error::InvalidDistribution(format!("entry {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STRUCT_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Which side's outcome is being predicted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Conditioning {
    /// `H(B|A)`
    BGivenA,
    /// `H(A|B)`
    AGivenB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `−Σ p log₂ p` over an unchecked slice, skipping zero entries.
pub fn entropy_bits<'a>(probs: impl IntoIterator<Item = &'a f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&&p| p > ZERO_PROB)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn shannon_entropy(p: &ProbVector) -> f64 {
    entropy_bits(p.as_slice())
}

/// `h(x) = −x log₂ x − (1 − x) log₂(1 − x)`.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_bits(&[x, 1.0 - x])
}

pub fn joint_entropy(j: &JointDistribution) -> f64 {
    entropy_bits(j.probs().iter())
}

pub fn conditional_entropy(j: &JointDistribution, direction: Conditioning) -> f64 {
    let conditioning_marginal = match direction {
        Conditioning::BGivenA => j.marginal_a(),
        Conditioning::AGivenB => j.marginal_b(),
    };
    (joint_entropy(j) - entropy_bits(&conditioning_marginal)).max(0.0)
}

pub fn mutual_information(j: &JointDistribution) -> f64 {
    (entropy_bits(&j.marginal_a()) + entropy_bits(&j.marginal_b()) - joint_entropy(j)).max(0.0)
}

/// Entropy of `(a ± b) mod N` for outcomes labelled `0..N`.
pub fn modular_sum_entropy(j: &JointDistribution, sign: Sign) -> Result<f64> {
    let n = j.n_a();
    if j.n_b() != n {
        return Err(mismatch(format!("square {n}x{n} joint"), format!("{n}x{}", j.n_b())));
    }
    let mut dist = vec![0.0; n];
    for a in 0..n {
        for b in 0..n {
            let k = match sign {
                Sign::Plus => (a + b) % n,
                Sign::Minus => (a + n - b) % n,
            };
            dist[k] += j.get(a, b);
        }
    }
    Ok(entropy_bits(&dist))
}

/// `S(ρ) = −Tr ρ log₂ ρ` from clamped eigenvalues.
pub fn von_neumann_entropy(m: &CMatrix) -> Result<f64> {
    validate_density(m)?;
    let eig: Vec<f64> = hermitian_eigenvalues(m).into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Ok(entropy_bits(&eig))
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != (2, 2) {
        return Err(mismatch("(2, 2)", format!("{:?}", rho.dims())));
    }
    let m = rho.matrix();
    // σ_y ⊗ σ_y in the computational basis is real: anti-diagonal (-1, 1, 1, -1).
    let yy = CMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            Complex64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let flipped = &yy * m.conjugate() * &yy;
    let s = psd_sqrt(m);
    let r = &s * flipped * &s;
    let mut lambdas: Vec<f64> = hermitian_eigenvalues(&r).into_iter().map(|v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state, `h((1 + √(1 − C²))/2)`.
pub fn entanglement_of_formation(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?.min(1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}
