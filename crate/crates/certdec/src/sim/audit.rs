//! Dominance audits: inversion of a challenger certificate.
//!
//! Per replication the runner draws winners data, asks the challenger for
//! its certified pair `(δ̃, R̃)`, audits the certificate empirically, then
//! builds the inversion set `{θ : L(δ̃, θ) <= R̃}` on the scenario grid and
//! re-decides by as-if optimization. The re-decision bound can never
//! exceed `R̃` (every member of the inversion set has loss at most `R̃`
//! under `δ̃`), so the audit counts pathwise violations (zero expected)
//! and reports the worst upper-tail gap `P(R >= r) - P(R̃ >= r)` over an
//! r-grid.
//!
//! A challenger that fails its own certificate audit voids the dominance
//! claim: the report flags the failure and suppresses the tail statistic.

use rand::Rng;

use super::{map_blocks, tail_prob, MeanAcc, Metric, RateAcc, Scenario, ScenarioKind, SimReport};
use crate::asif::projection_certificates_with;
use crate::confset::{critical_value, WinnersData};
use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::loss::LossSpec;
use crate::stream::{derive_rng, DOMAIN_REPLICATION};

/// Metric names emitted by [`run_dominance_audit`].
pub mod metric {
    pub const CHALLENGER_CERT_VALID: &str = "challenger_cert_valid";
    /// 1 when the challenger passed its certificate audit.
    pub const CHALLENGER_CERTIFIED: &str = "challenger_certified";
    /// Replications where the inversion re-decision exceeded `R~`.
    pub const PATHWISE_VIOLATIONS: &str = "pathwise_violations";
    /// `max_r [P(R >= r) - P(R~ >= r)]`; nonpositive within noise.
    pub const DOMINANCE_STATISTIC: &str = "dominance_statistic";
    pub const MEAN_R: &str = "mean_r";
    pub const MEAN_R_CHALLENGER: &str = "mean_r_challenger";
    /// 1 when the dominance claim was suppressed.
    pub const SUPPRESSED: &str = "dominance_claim_suppressed";
}

/// Number of tail-comparison grid points.
const TAIL_GRID: usize = 101;

/// An externally supplied certified decision rule to audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Challenger {
    /// `R~ = 1` with probability `1-α`, else 0, independent of the data;
    /// `δ~` is the first action. P-certified by construction.
    Trivial,
    /// The studentized projection pair `(δ_EWM, R*)`.
    StudentizedProjection,
    /// The risk-aware as-if decision itself (self-comparison).
    SelfComparison,
    /// `R~` constant at the given value with `δ~ = δ_EWM`. Certified only
    /// if the constant actually bounds the loss often enough; small values
    /// exercise the suppression path.
    Constant(f64),
}

impl Challenger {
    pub fn name(&self) -> String {
        match self {
            Challenger::Trivial => "trivial".into(),
            Challenger::StudentizedProjection => "studentized".into(),
            Challenger::SelfComparison => "self".into(),
            Challenger::Constant(r) => format!("constant:{r}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct BlockAcc {
    challenger_valid: RateAcc,
    violations: u64,
    mean_r: MeanAcc,
    mean_r_challenger: MeanAcc,
    r_samples: Vec<f64>,
    r_challenger_samples: Vec<f64>,
}

/// As-if re-decision over the inversion set of `(δ̃, R̃)` on a
/// precomputed loss table `losses[action][grid point]`. `members` is
/// caller-owned scratch.
fn inversion_redecision(
    losses: &[Vec<f64>],
    delta_tilde: usize,
    r_tilde: f64,
    members: &mut Vec<u32>,
) -> (usize, f64) {
    members.clear();
    for (j, &l) in losses[delta_tilde].iter().enumerate() {
        if l <= r_tilde {
            members.push(j as u32);
        }
    }
    if members.is_empty() {
        // empty inversion set: sup convention gives 0 for every action
        return (0, 0.0);
    }
    let mut best_action = 0usize;
    let mut best_risk = f64::INFINITY;
    for (a, row) in losses.iter().enumerate() {
        let mut worst = f64::NEG_INFINITY;
        for &j in members.iter() {
            let v = row[j as usize];
            if v > worst {
                worst = v;
            }
        }
        if worst < best_risk {
            best_risk = worst;
            best_action = a;
        }
    }
    (best_action, best_risk)
}

pub fn run_dominance_audit(s: &Scenario, challenger: Challenger) -> Result<SimReport> {
    if s.kind != ScenarioKind::Winners {
        return Err(Error::invalid(
            "dominance audits run on winners scenarios",
        ));
    }
    s.validate()?;

    let theta = s.theta.clone();
    let sigma = s.sigma.clone();
    let n_actions = theta.len();
    let alpha = s.alpha;
    let error_model = s.error_model()?;

    let c_stud = critical_value(&sigma, &error_model, alpha, s.n_draws_critval, s.seed, true)?;
    let c_proj = critical_value(&sigma, &error_model, alpha, s.n_draws_critval, s.seed, false)?;

    // scenario grid and loss table, fixed across replications
    let grid = ParamGrid::unit_cube("winners", n_actions, s.grid_resolution)?;
    let spec = LossSpec::winners(n_actions)?;
    let losses: Vec<Vec<f64>> = (0..n_actions)
        .map(|a| {
            grid.points()
                .iter()
                .map(|p| spec.eval(a, p).expect("grid matches spec"))
                .collect()
        })
        .collect();

    let blocks = map_blocks(s.n_reps, |lo, hi| {
        let mut acc = BlockAcc::default();
        acc.r_samples.reserve((hi - lo) as usize);
        acc.r_challenger_samples.reserve((hi - lo) as usize);
        let mut z = vec![0.0f64; n_actions];
        let mut members: Vec<u32> = Vec::with_capacity(grid.len());
        for rep in lo..hi {
            let mut rng = derive_rng(s.seed, DOMAIN_REPLICATION, rep);
            error_model.draw(&mut rng, &mut z);
            let x: Vec<f64> = theta
                .iter()
                .zip(sigma.iter())
                .zip(z.iter())
                .map(|((&t, &s), &zi)| t + s * zi)
                .collect();
            let data =
                WinnersData::new(x, sigma.clone()).expect("simulated estimates are finite");
            let certs = projection_certificates_with(&data, c_proj, c_stud, alpha);

            let (delta_tilde, r_tilde) = match challenger {
                Challenger::Trivial => {
                    let r = if rng.random::<f64>() < 1.0 - alpha {
                        1.0
                    } else {
                        0.0
                    };
                    (0usize, r)
                }
                Challenger::StudentizedProjection => (
                    certs.studentized.action_index(),
                    certs.studentized.risk_bound,
                ),
                Challenger::SelfComparison => (
                    certs.risk_aware.action_index(),
                    certs.risk_aware.risk_bound,
                ),
                Challenger::Constant(r) => (certs.unstudentized.action_index(), r),
            };

            let loss_tilde = 1.0 - theta[delta_tilde];
            acc.challenger_valid.add(loss_tilde <= r_tilde);

            let (_, r) = inversion_redecision(&losses, delta_tilde, r_tilde, &mut members);
            if r > r_tilde {
                acc.violations += 1;
            }
            acc.mean_r.add(r);
            acc.mean_r_challenger.add(r_tilde);
            acc.r_samples.push(r);
            acc.r_challenger_samples.push(r_tilde);
        }
        acc
    });

    let mut acc = BlockAcc::default();
    for b in blocks {
        acc.challenger_valid.merge(&b.challenger_valid);
        acc.violations += b.violations;
        acc.mean_r.merge(&b.mean_r);
        acc.mean_r_challenger.merge(&b.mean_r_challenger);
        acc.r_samples.extend(b.r_samples);
        acc.r_challenger_samples.extend(b.r_challenger_samples);
    }

    // certificate gate: the dominance claim presumes a certified challenger
    let level = 1.0 - alpha;
    let gate_tol = 3.0 * acc.challenger_valid.se_at(level);
    let certified = acc.challenger_valid.rate() >= level - gate_tol;

    let mut metrics = vec![
        acc.challenger_valid.metric(metric::CHALLENGER_CERT_VALID),
        Metric::new(metric::CHALLENGER_CERTIFIED, f64::from(certified), 0.0),
        Metric::new(metric::PATHWISE_VIOLATIONS, acc.violations as f64, 0.0),
        acc.mean_r.metric(metric::MEAN_R),
        acc.mean_r_challenger.metric(metric::MEAN_R_CHALLENGER),
        Metric::new(metric::SUPPRESSED, f64::from(!certified), 0.0),
    ];

    let mut audit_failures = Vec::new();
    if certified {
        acc.r_samples.sort_by(f64::total_cmp);
        acc.r_challenger_samples.sort_by(f64::total_cmp);
        let n = s.n_reps as f64;
        let mut worst_gap = f64::NEG_INFINITY;
        let mut worst_tol = 0.0;
        let mut tail_violation = false;
        for k in 0..TAIL_GRID {
            let r = k as f64 / (TAIL_GRID - 1) as f64;
            let p_ours = tail_prob(&acc.r_samples, r);
            let p_chal = tail_prob(&acc.r_challenger_samples, r);
            let gap = p_ours - p_chal;
            let tol = 3.0 * ((p_ours * (1.0 - p_ours) + p_chal * (1.0 - p_chal)) / n).sqrt();
            if gap > worst_gap {
                worst_gap = gap;
                worst_tol = tol;
            }
            if gap > tol {
                tail_violation = true;
            }
        }
        metrics.push(Metric::new(
            metric::DOMINANCE_STATISTIC,
            worst_gap,
            worst_tol / 3.0,
        ));
        if acc.violations > 0 {
            audit_failures.push(format!(
                "pathwise_violations = {} (inversion re-decision exceeded the challenger bound)",
                acc.violations
            ));
        }
        if tail_violation {
            audit_failures.push(format!(
                "dominance statistic {worst_gap:.6} exceeded tolerance {worst_tol:.6}"
            ));
        }
    }

    Ok(SimReport {
        scenario: s.clone(),
        metrics,
        audit_failures,
    })
}
