//! Seeded random surveys over two-qubit (or prime-dimension) states.
//!
//! Work items are states. Item `i` of a survey with seed `s` draws from its
//! own ChaCha stream `(s, i)`, so results do not depend on thread count or
//! scheduling and output order always follows `state_id`.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvgauss::{entropic_sumdiff_cv, reid_sumdiff_cv, tmsv};
use crate::error::{Error, Result};
use crate::infotheory::{von_neumann_entropy, Sign};
use crate::measure::{mub_set, pauli_bases, Povm, ProjectiveBasis};
use crate::qmat::{
    hermitian_eigenvalues, identity, random_density_operator, random_mixed_state, random_pure_state,
    random_unitary, werner_state, DensityMatrix,
};
use crate::witness::{mub_conditional, mub_mi, pair_conditional, pair_symmetric_mi, sumdiff_discrete, Steering, WitnessReport};
use num_complex::Complex64;

/// Independent random stream for work item `index` of a run seeded with `seed`.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Haar-random pure states.
    Pure,
    /// Full-rank Hilbert–Schmidt states.
    Mixed,
    /// Convex mixtures of up to eight product states.
    Separable,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(Ensemble::Pure),
            "mixed" => Ok(Ensemble::Mixed),
            "separable" => Ok(Ensemble::Separable),
            other => Err(Error::InvalidParameter(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// Number of product terms used for [`Ensemble::Separable`] draws.
pub const SEPARABLE_K_MAX: usize = 8;

pub fn sample_two_qubit<R: Rng + ?Sized>(ensemble: Ensemble, rng: &mut R) -> Result<DensityMatrix> {
    match ensemble {
        Ensemble::Pure => Ok(random_pure_state(2, 2, rng)?.projector()),
        Ensemble::Mixed => random_mixed_state(2, 2, 4, rng),
        Ensemble::Separable => separable_state(SEPARABLE_K_MAX, rng),
    }
}

/// `Σ_j w_j ρ_j^A ⊗ ρ_j^B` with `1..=k_max` terms, flat-Dirichlet weights and
/// random single-qubit factors of random rank.
pub fn separable_state<R: Rng + ?Sized>(k_max: usize, rng: &mut R) -> Result<DensityMatrix> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    let k = rng.random_range(1..=k_max);
    let mut terms = Vec::with_capacity(k);
    for _ in 0..k {
        let w: f64 = -(1.0 - rng.random::<f64>()).ln();
        let a = random_density_operator(2, rng.random_range(1..=2), rng)?;
        let b = random_density_operator(2, rng.random_range(1..=2), rng)?;
        terms.push((w.max(1e-300), DensityMatrix::product(&a, &b)?));
    }
    DensityMatrix::mixture(&terms)
}

pub fn separable_sample(n: usize, k_max: usize, seed: u64) -> Result<Vec<DensityMatrix>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| separable_state(k_max, &mut item_rng(seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub state_id: usize,
    pub v_conditional_ab: f64,
    pub v_conditional_ba: f64,
    pub v_symmetric: f64,
    /// `1 − S(ρ)/log₂ d`: 0 for maximally mixed, 1 for pure.
    pub purity_scaled: f64,
}

pub fn purity_scaled(rho: &DensityMatrix) -> Result<f64> {
    let s = von_neumann_entropy(rho.matrix())?;
    Ok(1.0 - s / (rho.dim() as f64).log2())
}

/// Complete-MUB witnesses with the fixed reference sets on both sides.
pub fn survey_record(state_id: usize, rho: &DensityMatrix) -> Result<SurveyRecord> {
    let (da, db) = rho.dims();
    let bases_a = mub_set(da)?;
    let bases_b = mub_set(db)?;
    Ok(SurveyRecord {
        state_id,
        v_conditional_ab: mub_conditional(rho, &bases_a, &bases_b, Steering::AtoB)?.violation,
        v_conditional_ba: mub_conditional(rho, &bases_a, &bases_b, Steering::BtoA)?.violation,
        v_symmetric: mub_mi(rho, &bases_a, &bases_b)?.violation,
        purity_scaled: purity_scaled(rho)?,
    })
}

pub fn survey_states(states: &[DensityMatrix]) -> Result<Vec<SurveyRecord>> {
    states
        .par_iter()
        .enumerate()
        .map(|(i, rho)| survey_record(i, rho))
        .collect()
}

/// Conditional-vs-symmetric survey of `n` random two-qubit states measured in
/// the Pauli triple on both sides.
pub fn survey_fig1(n: usize, ensemble: Ensemble, seed: u64) -> Result<Vec<SurveyRecord>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = sample_two_qubit(ensemble, &mut item_rng(seed, i as u64))?;
            survey_record(i, &rho)
        })
        .collect()
}

/// Violations `(AtoB, BtoA)` of the complete-MUB conditional witness after
/// rotating each party's reference set by an independent Haar unitary.
pub fn random_setting_violations<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    reference_a: &[ProjectiveBasis],
    reference_b: &[ProjectiveBasis],
    rng: &mut R,
) -> Result<(f64, f64)> {
    let (da, db) = rho.dims();
    let ua = random_unitary(da, rng)?;
    let ub = random_unitary(db, rng)?;
    let bases_a = reference_a.iter().map(|b| b.rotated(&ua)).collect::<Result<Vec<_>>>()?;
    let bases_b = reference_b.iter().map(|b| b.rotated(&ub)).collect::<Result<Vec<_>>>()?;
    Ok((
        mub_conditional(rho, &bases_a, &bases_b, Steering::AtoB)?.violation,
        mub_conditional(rho, &bases_a, &bases_b, Steering::BtoA)?.violation,
    ))
}

/// Outcome of a random search over measurement settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisOptimum {
    /// Max over trials of the AtoB violation.
    pub best_v_ab: f64,
    /// Max over trials of the BtoA violation.
    pub best_v_ba: f64,
    /// Both violations of the trial maximizing `min(v_ab, v_ba)`.
    pub balanced: (f64, f64),
    pub trials: usize,
}

pub fn optimize_bases<R: Rng + ?Sized>(rho: &DensityMatrix, trials: usize, rng: &mut R) -> Result<BasisOptimum> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let (da, db) = rho.dims();
    let (ref_a, ref_b) = (mub_set(da)?, mub_set(db)?);
    let mut best = BasisOptimum {
        best_v_ab: f64::NEG_INFINITY,
        best_v_ba: f64::NEG_INFINITY,
        balanced: (f64::NEG_INFINITY, f64::NEG_INFINITY),
        trials,
    };
    for _ in 0..trials {
        let (ab, ba) = random_setting_violations(rho, &ref_a, &ref_b, rng)?;
        best.best_v_ab = best.best_v_ab.max(ab);
        best.best_v_ba = best.best_v_ba.max(ba);
        if ab.min(ba) > best.balanced.0.min(best.balanced.1) {
            best.balanced = (ab, ba);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub state_id: usize,
    pub best_v_ab: f64,
    pub best_v_ba: f64,
    pub balanced_v_ab: f64,
    pub balanced_v_ba: f64,
    pub purity_scaled: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Directional survey: each state is optimized over `trials` random settings.
/// State `i` and its trials share stream `(seed, i)`.
pub fn survey_fig2(n: usize, ensemble: Ensemble, trials: usize, seed: u64) -> Result<Vec<OptimizationResult>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(seed, i as u64);
            let rho = sample_two_qubit(ensemble, &mut rng)?;
            optimization_record(i, &rho, trials, seed, &mut rng)
        })
        .collect()
}

pub fn optimization_record<R: Rng + ?Sized>(
    state_id: usize,
    rho: &DensityMatrix,
    trials: usize,
    seed: u64,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let opt = optimize_bases(rho, trials, rng)?;
    Ok(OptimizationResult {
        state_id,
        best_v_ab: opt.best_v_ab,
        best_v_ba: opt.best_v_ba,
        balanced_v_ab: opt.balanced.0,
        balanced_v_ba: opt.balanced.1,
        purity_scaled: purity_scaled(rho)?,
        trials,
        seed,
    })
}

/// Both directional violations for `n` independent random settings; no maximization.
pub fn basis_sweep(rho: &DensityMatrix, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let (da, db) = rho.dims();
    let (ref_a, ref_b) = (mub_set(da)?, mub_set(db)?);
    (0..n)
        .into_par_iter()
        .map(|i| random_setting_violations(rho, &ref_a, &ref_b, &mut item_rng(seed, i as u64)))
        .collect()
}

/// Picks the record whose optimized violations differ most in sign-split
/// fashion (one direction positive, the other not); falls back to the largest
/// directional difference.
pub fn one_way_candidate(records: &[OptimizationResult]) -> Option<&OptimizationResult> {
    let gap = |r: &&OptimizationResult| (r.best_v_ab - r.best_v_ba).abs();
    let split = |r: &&OptimizationResult| (r.best_v_ab > 0.0) != (r.best_v_ba > 0.0);
    records
        .iter()
        .filter(split)
        .max_by(|a, b| gap(a).total_cmp(&gap(b)))
        .or_else(|| records.iter().max_by(|a, b| gap(a).total_cmp(&gap(b))))
}

/// Bisection for the root of a function with a sign change on `[lo, hi]`.
/// Stops when the bracket is narrower than `tol` and returns its midpoint.
pub fn threshold_bisect<F>(name: &str, f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::InvalidParameter(format!("bad bracket [{lo}, {hi}] or tol {tol}")));
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() || f_lo == 0.0 || f_hi == 0.0 {
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        return Err(Error::NoBracket {
            name: name.to_owned(),
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let lo_sign = f_lo.signum();
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// AtoB violation on the Werner state `W_p`: two settings use X and Z on
/// both sides, three settings use the full Pauli triple.
pub fn werner_violation(settings: usize, p: f64) -> Result<f64> {
    let rho = werner_state(p)?;
    let paulis = pauli_bases();
    match settings {
        2 => Ok(pair_conditional(&rho, &paulis[0], &paulis[2], &paulis[0], &paulis[2], Steering::AtoB)?.violation),
        3 => Ok(mub_conditional(&rho, &paulis, &paulis, Steering::AtoB)?.violation),
        other => Err(Error::InvalidParameter(format!("settings must be 2 or 3, got {other}"))),
    }
}

pub fn werner_threshold(settings: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    threshold_bisect(
        &format!("{settings}-setting Werner violation"),
        |p| werner_violation(settings, p),
        lo,
        hi,
        tol,
    )
}

/// EPR-correlated sign choice `(x_A − x_B, k_A + k_B)` for the squeezed family.
pub const EPR_SIGNS: (Sign, Sign) = (Sign::Minus, Sign::Plus);

pub fn tmsv_entropic_sumdiff_threshold(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    threshold_bisect(
        "entropic sum/difference violation on TMSV",
        |r| Ok(entropic_sumdiff_cv(&tmsv(r)?, EPR_SIGNS)?.violation),
        lo,
        hi,
        tol,
    )
}

pub fn tmsv_reid_sumdiff_threshold(lo: f64, hi: f64, tol: f64) -> Result<f64> {
    threshold_bisect(
        "variance sum/difference violation on TMSV",
        |r| Ok(reid_sumdiff_cv(&tmsv(r)?, EPR_SIGNS).violation),
        lo,
        hi,
        tol,
    )
}

/// `η Π_i + (1 − η) I/d` for each projector of `basis`.
pub fn noisy_povm(basis: &ProjectiveBasis, eta: f64) -> Result<Povm> {
    let d = basis.dim();
    let noise = identity(d) * Complex64::new((1.0 - eta) / d as f64, 0.0);
    Povm::new(
        basis
            .projectors()
            .into_iter()
            .map(|p| p * Complex64::new(eta, 0.0) + &noise)
            .collect(),
    )
}

/// Evaluates every discrete witness on `rho` with settings drawn from `rng`:
/// rotated complete MUB sets, their first two members as the observable pair,
/// and noisy POVM versions of that pair.
pub fn all_witnesses<R: Rng + ?Sized>(rho: &DensityMatrix, rng: &mut R) -> Result<Vec<WitnessReport>> {
    let (da, db) = rho.dims();
    let ua = random_unitary(da, rng)?;
    let ub = random_unitary(db, rng)?;
    let bases_a = mub_set(da)?.iter().map(|b| b.rotated(&ua)).collect::<Result<Vec<_>>>()?;
    let bases_b = mub_set(db)?.iter().map(|b| b.rotated(&ub)).collect::<Result<Vec<_>>>()?;
    let (ra, sa, rb, sb) = (&bases_a[0], &bases_a[1], &bases_b[0], &bases_b[1]);
    let eta = rng.random_range(0.3..1.0);
    let (fa, ga) = (noisy_povm(ra, eta)?, noisy_povm(sa, eta)?);
    let (fb, gb) = (noisy_povm(rb, eta)?, noisy_povm(sb, eta)?);

    let mut reports = Vec::new();
    for dir in [Steering::AtoB, Steering::BtoA] {
        reports.push(pair_conditional(rho, ra, sa, rb, sb, dir)?);
        let mut povm = pair_conditional(rho, &fa, &ga, &fb, &gb, dir)?;
        povm.name = "pair-conditional-povm".into();
        reports.push(povm);
        reports.push(mub_conditional(rho, &bases_a, &bases_b, dir)?);
    }
    reports.push(pair_symmetric_mi(rho, ra, sa, rb, sb)?);
    reports.push(mub_mi(rho, &bases_a, &bases_b)?);
    if da == db {
        for s1 in [Sign::Plus, Sign::Minus] {
            for s2 in [Sign::Plus, Sign::Minus] {
                reports.push(sumdiff_discrete(rho, ra, sa, rb, sb, (s1, s2))?);
            }
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableAudit {
    pub n: usize,
    pub k_max: usize,
    pub seed: u64,
    /// Largest violation seen per witness name (with direction suffix).
    pub max_violation: BTreeMap<String, f64>,
    /// Smallest eigenvalue of any partial transpose in the sample.
    pub min_partial_transpose_eigenvalue: f64,
    pub sound: bool,
}

/// Violations above this count as a soundness failure.
pub const SOUNDNESS_TOL: f64 = 1e-9;

/// Runs [`all_witnesses`] on `n` separable states.
pub fn audit_separable(n: usize, k_max: usize, seed: u64) -> Result<SeparableAudit> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let per_state: Vec<(Vec<WitnessReport>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = item_rng(seed, i as u64);
            let rho = separable_state(k_max, &mut rng)?;
            let pt_min = hermitian_eigenvalues(&rho.partial_transpose())[0];
            Ok((all_witnesses(&rho, &mut rng)?, pt_min))
        })
        .collect::<Result<_>>()?;
    let mut max_violation = BTreeMap::new();
    let mut min_pt = f64::INFINITY;
    for (reports, pt_min) in &per_state {
        min_pt = min_pt.min(*pt_min);
        for r in reports {
            let key = format!("{}:{:?}", r.name, r.direction);
            let slot = max_violation.entry(key).or_insert(f64::NEG_INFINITY);
            *slot = f64::max(*slot, r.violation);
        }
    }
    let sound = max_violation.values().all(|&v| v <= SOUNDNESS_TOL);
    Ok(SeparableAudit {
        n,
        k_max,
        seed,
        max_violation,
        min_partial_transpose_eigenvalue: min_pt,
        sound,
    })
}
