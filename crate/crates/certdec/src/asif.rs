//! As-if minimax optimization over a confidence set.
//!
//! The engine picks the action minimizing the worst-case loss over the set
//! and reports the minimized value as the certificate: when the set covers
//! the truth with probability `1-α`, the pair is a `1-α` P-certified
//! decision. The sup over an empty set is 0 by convention, and such
//! decisions are flagged vacuous.
//!
//! Grid enumeration is the reference path. The winners and treatment
//! scenarios also get closed-form fast paths, which must agree with
//! enumeration to 1e-12 on grids containing the relevant boundary points;
//! that agreement is part of the test suite.

use crate::confset::{critical_value, ConfidenceSet, ErrorModel, Membership, WinnersData};
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::loss::{CertificateKind, CertifiedDecision, LossKind, LossSpec};

/// `max_{θ in cset ∩ grid} L(a, θ)`, or 0 when the intersection is empty.
pub fn worst_case_loss(
    action: usize,
    cset: &ConfidenceSet,
    spec: &LossSpec,
    grid: &ParamGrid,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    let mut any = false;
    for p in grid.points() {
        if cset.contains(p)? {
            any = true;
            let v = spec.eval(action, p)?;
            if v > worst {
                worst = v;
            }
        }
    }
    Ok(if any { worst } else { 0.0 })
}

/// Minimax decision over the confidence set.
///
/// Ties break to the lowest action index. An empty set yields the first
/// action with risk bound 0, flagged vacuous. When the loss is
/// `bounded_unit`, the bound is clamped into `[0,1]`.
pub fn asif_decide(
    cset: &ConfidenceSet,
    spec: &LossSpec,
    grid: &ParamGrid,
) -> Result<CertifiedDecision> {
    if spec.n_actions() == 0 {
        return Err(Error::invalid("asif_decide needs a non-empty action set"));
    }
    let kind = CertificateKind::P {
        level: cset.nominal_level(),
    };
    let members = cset.member_indices(grid)?;
    if members.is_empty() {
        return Ok(CertifiedDecision::vacuous(0, kind));
    }
    let mut best_action = 0usize;
    let mut best_risk = f64::INFINITY;
    for a in 0..spec.n_actions() {
        let mut worst = f64::NEG_INFINITY;
        for &j in &members {
            let v = spec.eval(a, &grid.points()[j])?;
            if v > worst {
                worst = v;
            }
        }
        if worst < best_risk {
            best_risk = worst;
            best_action = a;
        }
    }
    if spec.bounded_unit() {
        best_risk = best_risk.clamp(0.0, 1.0);
    }
    Ok(CertifiedDecision::new(best_action, best_risk.max(0.0), kind))
}

/// Closed-form as-if decision for the winners loss over a lower-bound box.
///
/// For the box `{θ in [0,1]^A : θ(a) >= lower(a)}` and loss `1 - θ(a)`:
/// the box is empty when some `lower(a) > 1` (risk 0, vacuous); otherwise
/// the worst case of action `a` is `1 - clamp(lower(a), 0, 1)` and the
/// argmin is the argmax of the clamped bounds. Clamping before the argmax
/// keeps the tie-break (lowest index) identical to grid enumeration when
/// several bounds fall outside the unit cube.
pub fn winners_box_asif(lower: &[f64], nominal_level: f64) -> CertifiedDecision {
    let kind = CertificateKind::P {
        level: nominal_level,
    };
    if lower.iter().any(|&lo| lo > 1.0) {
        return CertifiedDecision::vacuous(0, kind);
    }
    let mut best = 0usize;
    let mut best_lower = lower[0].clamp(0.0, 1.0);
    for (a, &lo) in lower.iter().enumerate().skip(1) {
        let lo = lo.clamp(0.0, 1.0);
        if lo > best_lower {
            best_lower = lo;
            best = a;
        }
    }
    CertifiedDecision::new(best, 1.0 - best_lower, kind)
}

/// Closed-form as-if decision for the treatment loss against the half-line
/// set `[θ̂, inf)`: the loss decreases in θ, so the worst case of every
/// action sits at `θ̂` and the decision is `argmin_a L(a, θ̂)` with
/// `R = min_a L(a, θ̂)` (clamped below at 0).
pub fn treatment_asif(spec: &LossSpec, theta_hat: f64, nominal_level: f64) -> Result<CertifiedDecision> {
    let (fractions, psi) = match spec.kind() {
        LossKind::Treatment { fractions, psi } => (fractions, psi),
        _ => return Err(Error::invalid("treatment_asif requires a treatment loss")),
    };
    let mut best = 0usize;
    let mut best_loss = f64::INFINITY;
    for (a, &frac) in fractions.iter().enumerate() {
        let v = frac * (1.0 - theta_hat) + psi.eval(frac);
        if v < best_loss {
            best_loss = v;
            best = a;
        }
    }
    Ok(CertifiedDecision::new(
        best,
        best_loss.max(0.0),
        CertificateKind::P {
            level: nominal_level,
        },
    ))
}

/// The three winners certificates at level `1-α`.
#[derive(Debug, Clone)]
pub struct ProjectionCertificates {
    /// Empirical welfare maximizer with the unstudentized projection bound
    /// `R = 1 - (X(δ) - c)`.
    pub unstudentized: CertifiedDecision,
    /// Empirical welfare maximizer with the studentized bound
    /// `R* = 1 - (X(δ) - c* σ(δ))`.
    pub studentized: CertifiedDecision,
    /// Risk-aware maximizer `δ̃ = argmax_a X(a) - σ(a) c*` with
    /// `R̃ = 1 - max_a (X(a) - σ(a) c*)`; never exceeds `R*`.
    pub risk_aware: CertifiedDecision,
}

/// Compute the three certificates from precomputed critical values
/// (`c` unstudentized, `c_star` studentized). All bounds clamp to `[0,1]`.
pub fn projection_certificates_with(
    data: &WinnersData,
    c: f64,
    c_star: f64,
    alpha: f64,
) -> ProjectionCertificates {
    let kind = CertificateKind::P { level: 1.0 - alpha };
    let x = data.x();
    let sigma = data.sigma();

    // δ_EWM: argmax X(a), lowest index on ties
    let mut ewm = 0usize;
    for (a, &xa) in x.iter().enumerate() {
        if xa > x[ewm] {
            ewm = a;
        }
    }
    let r_unstud = (1.0 - (x[ewm] - c)).clamp(0.0, 1.0);
    let r_stud = (1.0 - (x[ewm] - c_star * sigma[ewm])).clamp(0.0, 1.0);

    // risk-aware: as-if optimization over the studentized box
    let lower: Vec<f64> = x
        .iter()
        .zip(sigma.iter())
        .map(|(&xa, &sa)| xa - sa * c_star)
        .collect();
    let risk_aware = winners_box_asif(&lower, 1.0 - alpha);

    ProjectionCertificates {
        unstudentized: CertifiedDecision::new(ewm, r_unstud, kind),
        studentized: CertifiedDecision::new(ewm, r_stud, kind),
        risk_aware,
    }
}

/// Compute the three certificates, simulating both critical values.
pub fn projection_certificates(
    data: &WinnersData,
    error_model: &ErrorModel,
    alpha: f64,
    seed: u64,
    n_draws: u64,
) -> Result<ProjectionCertificates> {
    let c = critical_value(data.sigma(), error_model, alpha, n_draws, seed, false)?;
    let c_star = critical_value(data.sigma(), error_model, alpha, n_draws, seed, true)?;
    Ok(projection_certificates_with(data, c, c_star, alpha))
}

/// The lower-bound vector of a box membership, when the set is one.
pub fn box_lower_bounds(cset: &ConfidenceSet) -> Option<&[f64]> {
    match cset.membership() {
        Membership::Box { lower } => Some(lower),
        _ => None,
    }
}
