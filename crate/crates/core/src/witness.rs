//! Entropic steering witnesses.
//!
//! Every evaluation returns a [`WitnessReport`] whose `violation` is positive
//! exactly when the inequality is violated:
//!
//! - conditional-type (entropy must stay *above* the bound): `bound − lhs`
//! - mutual-information-type (must stay *below*): `lhs − bound`
//!
//! Direction `AtoB` means Alice steers Bob. Conditional entropies are then of
//! Bob's outcomes given Alice's, and the bound uses Bob's Ω.

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::infotheory::{conditional_entropy, entropy_bits, modular_sum_entropy, mutual_information, Conditioning, Sign};
use crate::measure::{joint_distribution, local_distribution, mub_defect, omega, JointDistribution, Measurement, ProjectiveBasis};
use crate::qmat::{partial_trace, DensityMatrix, Subsystem, SPECTRAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    AtoB,
    BtoA,
    #[serde(rename = "symmetric")]
    Symmetric,
}

/// Who steers whom in a one-way witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Steering {
    AtoB,
    BtoA,
}

impl Steering {
    pub fn conditioning(self) -> Conditioning {
        match self {
            Steering::AtoB => Conditioning::BGivenA,
            Steering::BtoA => Conditioning::AGivenB,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Steering::AtoB => Steering::BtoA,
            Steering::BtoA => Steering::AtoB,
        }
    }
}

impl From<Steering> for Direction {
    fn from(s: Steering) -> Self {
        match s {
            Steering::AtoB => Direction::AtoB,
            Steering::BtoA => Direction::BtoA,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    Bits,
    /// Product of two quadrature variances (vacuum variance 1/2).
    VarianceProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub name: String,
    pub direction: Direction,
    pub lhs: f64,
    pub bound: f64,
    pub violation: f64,
    pub unit: Unit,
}

impl WitnessReport {
    /// Report for an inequality of the form `lhs ≥ bound`.
    pub fn lower_bounded(name: &str, direction: Direction, lhs: f64, bound: f64, unit: Unit) -> Self {
        Self {
            name: name.to_owned(),
            direction,
            lhs,
            bound,
            violation: bound - lhs,
            unit,
        }
    }

    /// Report for an inequality of the form `lhs ≤ bound`.
    pub fn upper_bounded(name: &str, direction: Direction, lhs: f64, bound: f64, unit: Unit) -> Self {
        Self {
            name: name.to_owned(),
            direction,
            lhs,
            bound,
            violation: lhs - bound,
            unit,
        }
    }

    pub fn witnessed(&self) -> bool {
        self.violation > 0.0
    }
}

/// Entropy-sum bound over a complete set of `N + 1` MUBs:
/// `(N/2) log₂(N/2) + (N/2 + 1) log₂(N/2 + 1)` for even `N`,
/// `(N + 1) log₂((N + 1)/2)` for odd `N`.
pub fn bound_g(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("MUB bound needs N >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(if n % 2 == 0 {
        let h = nf / 2.0;
        h * h.log2() + (h + 1.0) * (h + 1.0).log2()
    } else {
        (nf + 1.0) * ((nf + 1.0) / 2.0).log2()
    })
}

fn check_local_dims(rho: &DensityMatrix, a: &[&dyn Measurement], b: &[&dyn Measurement]) -> Result<()> {
    let (da, db) = rho.dims();
    for m in a {
        if m.dim() != da {
            return Err(mismatch(format!("Alice dimension {da}"), m.dim()));
        }
    }
    for m in b {
        if m.dim() != db {
            return Err(mismatch(format!("Bob dimension {db}"), m.dim()));
        }
    }
    Ok(())
}

/// Two-observable conditional inequality
/// `H(R^B|R^A) + H(S^B|S^A) ≥ log₂ Ω^B` (for `AtoB`).
///
/// POVMs are accepted on either side; Ω then uses the operator-norm form.
pub fn pair_conditional(
    rho: &DensityMatrix,
    r_a: &dyn Measurement,
    s_a: &dyn Measurement,
    r_b: &dyn Measurement,
    s_b: &dyn Measurement,
    steering: Steering,
) -> Result<WitnessReport> {
    check_local_dims(rho, &[r_a, s_a], &[r_b, s_b])?;
    let omega_steered = match steering {
        Steering::AtoB => omega(r_b, s_b)?,
        Steering::BtoA => omega(r_a, s_a)?,
    };
    let jr = joint_distribution(rho, r_a, r_b)?;
    let js = joint_distribution(rho, s_a, s_b)?;
    let cond = steering.conditioning();
    let lhs = conditional_entropy(&jr, cond) + conditional_entropy(&js, cond);
    Ok(WitnessReport::lower_bounded(
        "pair-conditional",
        steering.into(),
        lhs,
        omega_steered.log2(),
        Unit::Bits,
    ))
}

/// Symmetric mutual-information inequality
/// `I(R^A:R^B) + I(S^A:S^B) ≤ log₂(N²/min{Ω^A, Ω^B})`.
///
/// With unequal outcome counts the bound generalizes to
/// `max_X (2 log₂ N_X − log₂ Ω^X)`.
pub fn pair_symmetric_mi(
    rho: &DensityMatrix,
    r_a: &dyn Measurement,
    s_a: &dyn Measurement,
    r_b: &dyn Measurement,
    s_b: &dyn Measurement,
) -> Result<WitnessReport> {
    check_local_dims(rho, &[r_a, s_a], &[r_b, s_b])?;
    let per_side = |r: &dyn Measurement, s: &dyn Measurement| -> Result<f64> {
        let n_log = (r.n_outcomes() as f64).log2() + (s.n_outcomes() as f64).log2();
        Ok(n_log - omega(r, s)?.log2())
    };
    let bound = per_side(r_a, s_a)?.max(per_side(r_b, s_b)?);
    let lhs = mutual_information(&joint_distribution(rho, r_a, r_b)?)
        + mutual_information(&joint_distribution(rho, s_a, s_b)?);
    Ok(WitnessReport::upper_bounded(
        "pair-symmetric-mi",
        Direction::Symmetric,
        lhs,
        bound,
        Unit::Bits,
    ))
}

fn check_mub(bases: &[ProjectiveBasis], side: &str) -> Result<usize> {
    let n = bases.first().map(|b| b.dim()).unwrap_or(0);
    if bases.len() != n + 1 {
        return Err(Error::InvalidMeasurement(format!(
            "{side} needs a complete set of {} bases, got {}",
            n + 1,
            bases.len()
        )));
    }
    if bases.iter().any(|b| b.dim() != n) {
        return Err(Error::InvalidMeasurement(format!("{side} bases have mixed dimensions")));
    }
    let defect = mub_defect(bases);
    if defect > SPECTRAL_TOL {
        return Err(Error::InvalidMeasurement(format!(
            "{side} bases are not mutually unbiased (defect {defect:.3e})"
        )));
    }
    Ok(n)
}

fn paired_joints(rho: &DensityMatrix, bases_a: &[ProjectiveBasis], bases_b: &[ProjectiveBasis]) -> Result<Vec<JointDistribution>> {
    if bases_a.len() != bases_b.len() {
        return Err(Error::InvalidMeasurement(format!(
            "Alice has {} settings, Bob has {}",
            bases_a.len(),
            bases_b.len()
        )));
    }
    bases_a
        .iter()
        .zip(bases_b)
        .map(|(a, b)| joint_distribution(rho, a, b))
        .collect()
}

/// Full-MUB conditional inequality `Σ_i H(R_i^B|R_i^A) ≥ G(N)` (for `AtoB`).
///
/// Only the steered party's set must be a complete MUB set; the steering
/// party's bases are unconstrained.
pub fn mub_conditional(
    rho: &DensityMatrix,
    bases_a: &[ProjectiveBasis],
    bases_b: &[ProjectiveBasis],
    steering: Steering,
) -> Result<WitnessReport> {
    let n = match steering {
        Steering::AtoB => check_mub(bases_b, "Bob")?,
        Steering::BtoA => check_mub(bases_a, "Alice")?,
    };
    let joints = paired_joints(rho, bases_a, bases_b)?;
    let cond = steering.conditioning();
    let lhs = joints.iter().map(|j| conditional_entropy(j, cond)).sum();
    Ok(WitnessReport::lower_bounded(
        "mub-conditional",
        steering.into(),
        lhs,
        bound_g(n)?,
        Unit::Bits,
    ))
}

/// Full-MUB mutual-information inequality
/// `Σ_i I(R_i^A:R_i^B) ≤ (N + 1) log₂ N − G(N)`. Both sides must use complete MUB sets.
pub fn mub_mi(rho: &DensityMatrix, bases_a: &[ProjectiveBasis], bases_b: &[ProjectiveBasis]) -> Result<WitnessReport> {
    let n = check_mub(bases_b, "Bob")?;
    let na = check_mub(bases_a, "Alice")?;
    if na != n {
        return Err(mismatch(format!("N = {n} on both sides"), format!("N_A = {na}")));
    }
    let joints = paired_joints(rho, bases_a, bases_b)?;
    let lhs = joints.iter().map(mutual_information).sum();
    let nf = n as f64;
    let bound = (nf + 1.0) * nf.log2() - bound_g(n)?;
    Ok(WitnessReport::upper_bounded("mub-mi", Direction::Symmetric, lhs, bound, Unit::Bits))
}

/// Discrete sum/difference inequality
/// `H(R^A ± R^B) + H(S^A ∓ S^B) ≥ log₂ min{Ω^A, Ω^B}` with sums taken mod N.
///
/// `signs.0` applies to the R pair and `signs.1` to the S pair. The bound
/// holds for every sign combination.
pub fn sumdiff_discrete(
    rho: &DensityMatrix,
    r_a: &dyn Measurement,
    s_a: &dyn Measurement,
    r_b: &dyn Measurement,
    s_b: &dyn Measurement,
    signs: (Sign, Sign),
) -> Result<WitnessReport> {
    check_local_dims(rho, &[r_a, s_a], &[r_b, s_b])?;
    let bound = omega(r_a, s_a)?.min(omega(r_b, s_b)?).log2();
    let hr = modular_sum_entropy(&joint_distribution(rho, r_a, r_b)?, signs.0)?;
    let hs = modular_sum_entropy(&joint_distribution(rho, s_a, s_b)?, signs.1)?;
    Ok(WitnessReport::lower_bounded(
        "sumdiff-discrete",
        Direction::Symmetric,
        hr + hs,
        bound,
        Unit::Bits,
    ))
}

/// `2 log₂ N − (H(R^B) + H(S^B))`: the conditional violation minus the
/// symmetric mutual-information violation when `Ω^A = Ω^B`.
pub fn violation_gap(rho: &DensityMatrix, r_b: &dyn Measurement, s_b: &dyn Measurement) -> Result<f64> {
    check_local_dims(rho, &[], &[r_b, s_b])?;
    let bob = partial_trace(rho, Subsystem::B);
    let hr = entropy_bits(&local_distribution(&bob, r_b)?);
    let hs = entropy_bits(&local_distribution(&bob, s_b)?);
    let n = r_b.n_outcomes() as f64;
    Ok(2.0 * n.log2() - (hr + hs))
}
