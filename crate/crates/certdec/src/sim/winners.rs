//! Winners scenario runner.
//!
//! Per replication: draw `X(a) = θ(a) + σ(a) Z(a)`, form the three
//! projection certificates (unstudentized, studentized, risk-aware) plus
//! the inversion of a trivial certificate, apply the threshold adoption
//! rule `Q = 1(R <= C)`, and tally validity, coverage, realized risk, and
//! the pathwise dominance of the risk-aware bound over the studentized one.

use rand::Rng;

use super::{map_blocks, MeanAcc, Metric, RateAcc, Scenario, ScenarioKind, SimReport};
use crate::asif::{projection_certificates_with, winners_box_asif};
use crate::confset::{critical_value, WinnersData};
use crate::error::{Error, Result};
use crate::stream::{derive_rng, DOMAIN_REPLICATION};

/// Metric names emitted by [`run_winners`].
pub mod metric {
    pub const COVERAGE_PROJECTION: &str = "coverage_projection";
    pub const COVERAGE_STUDENTIZED: &str = "coverage_studentized";
    pub const CERT_VALID_PROJECTION: &str = "cert_valid_projection";
    pub const CERT_VALID_STUDENTIZED: &str = "cert_valid_studentized";
    pub const CERT_VALID_RISK_AWARE: &str = "cert_valid_risk_aware";
    pub const CERT_VALID_INVERSION_TRIVIAL: &str = "cert_valid_inversion_trivial";
    pub const MEAN_R_PROJECTION: &str = "mean_r_projection";
    pub const MEAN_R_STUDENTIZED: &str = "mean_r_studentized";
    pub const MEAN_R_RISK_AWARE: &str = "mean_r_risk_aware";
    pub const ADOPTION_PROJECTION: &str = "adoption_projection";
    pub const ADOPTION_STUDENTIZED: &str = "adoption_studentized";
    pub const ADOPTION_RISK_AWARE: &str = "adoption_risk_aware";
    pub const REALIZED_RISK_PROJECTION: &str = "realized_risk_projection";
    pub const REALIZED_RISK_STUDENTIZED: &str = "realized_risk_studentized";
    pub const REALIZED_RISK_RISK_AWARE: &str = "realized_risk_risk_aware";
    /// `α + mean(min(R, C)) - mean(realized)`; nonnegative within noise.
    pub const FOOTNOTE_MARGIN_PROJECTION: &str = "footnote_margin_projection";
    pub const FOOTNOTE_MARGIN_STUDENTIZED: &str = "footnote_margin_studentized";
    pub const FOOTNOTE_MARGIN_RISK_AWARE: &str = "footnote_margin_risk_aware";
    /// Replications where the risk-aware bound exceeded the studentized one.
    pub const DOMINANCE_VIOLATIONS: &str = "dominance_violations";
    /// Replications where the EWM and risk-aware recommendations differ.
    pub const ACTION_DISAGREEMENTS: &str = "action_disagreements";
    pub const CRITICAL_VALUE: &str = "critical_value";
    pub const CRITICAL_VALUE_STUDENTIZED: &str = "critical_value_studentized";
}

/// Per-certificate accumulators.
#[derive(Debug, Clone, Copy, Default)]
struct CertAcc {
    valid: RateAcc,
    adopted: RateAcc,
    mean_r: MeanAcc,
    realized: MeanAcc,
    /// `realized - min(R, C)` per replication, for the footnote margin.
    slack: MeanAcc,
}

impl CertAcc {
    fn absorb(&mut self, loss_true: f64, r: f64, c: f64) {
        let adopt = r <= c;
        let realized = if adopt { loss_true } else { c };
        self.valid.add(loss_true <= r);
        self.adopted.add(adopt);
        self.mean_r.add(r);
        self.realized.add(realized);
        self.slack.add(realized - r.min(c));
    }

    fn merge(&mut self, other: &CertAcc) {
        self.valid.merge(&other.valid);
        self.adopted.merge(&other.adopted);
        self.mean_r.merge(&other.mean_r);
        self.realized.merge(&other.realized);
        self.slack.merge(&other.slack);
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockAcc {
    coverage_proj: RateAcc,
    coverage_stud: RateAcc,
    projection: CertAcc,
    studentized: CertAcc,
    risk_aware: CertAcc,
    inversion_valid: RateAcc,
    dominance_violations: u64,
    action_disagreements: u64,
}

impl BlockAcc {
    fn merge(&mut self, other: &BlockAcc) {
        self.coverage_proj.merge(&other.coverage_proj);
        self.coverage_stud.merge(&other.coverage_stud);
        self.projection.merge(&other.projection);
        self.studentized.merge(&other.studentized);
        self.risk_aware.merge(&other.risk_aware);
        self.inversion_valid.merge(&other.inversion_valid);
        self.dominance_violations += other.dominance_violations;
        self.action_disagreements += other.action_disagreements;
    }
}

pub fn run_winners(s: &Scenario) -> Result<SimReport> {
    if s.kind != ScenarioKind::Winners {
        return Err(Error::invalid("run_winners requires a winners scenario"));
    }
    s.validate()?;

    let theta = s.theta.clone();
    let sigma = s.sigma.clone();
    let n_actions = theta.len();
    let alpha = s.alpha;
    let c_cost = s.default_cost();
    let error_model = s.error_model()?;

    // critical values are shared by every replication
    let c_proj = critical_value(&sigma, &error_model, alpha, s.n_draws_critval, s.seed, false)?;
    let c_stud = critical_value(&sigma, &error_model, alpha, s.n_draws_critval, s.seed, true)?;

    let blocks = map_blocks(s.n_reps, |lo, hi| {
        let mut acc = BlockAcc::default();
        let mut z = vec![0.0f64; n_actions];
        for rep in lo..hi {
            let mut rng = derive_rng(s.seed, DOMAIN_REPLICATION, rep);
            error_model.draw(&mut rng, &mut z);
            let x: Vec<f64> = theta
                .iter()
                .zip(sigma.iter())
                .zip(z.iter())
                .map(|((&t, &s), &zi)| t + s * zi)
                .collect();
            let data = WinnersData::new(x.clone(), sigma.clone())
                .expect("simulated estimates are finite");

            let certs = projection_certificates_with(&data, c_proj, c_stud, alpha);

            // coverage of the two boxes at the true parameter
            acc.coverage_proj
                .add(theta.iter().zip(x.iter()).all(|(&t, &xi)| t >= xi - c_proj));
            acc.coverage_stud.add(
                theta
                    .iter()
                    .zip(x.iter())
                    .zip(sigma.iter())
                    .all(|((&t, &xi), &si)| t >= xi - si * c_stud),
            );

            let loss_of = |action: usize| 1.0 - theta[action];
            acc.projection.absorb(
                loss_of(certs.unstudentized.action_index()),
                certs.unstudentized.risk_bound,
                c_cost,
            );
            acc.studentized.absorb(
                loss_of(certs.studentized.action_index()),
                certs.studentized.risk_bound,
                c_cost,
            );
            acc.risk_aware.absorb(
                loss_of(certs.risk_aware.action_index()),
                certs.risk_aware.risk_bound,
                c_cost,
            );

            if certs.risk_aware.risk_bound > certs.studentized.risk_bound {
                acc.dominance_violations += 1;
            }
            if certs.risk_aware.action_index() != certs.unstudentized.action_index() {
                acc.action_disagreements += 1;
            }

            // trivial certificate (R~ = 1 w.p. 1-α, else 0, δ~ = first
            // action) inverted through the as-if engine
            let r_trivial = if rng.random::<f64>() < 1.0 - alpha {
                1.0
            } else {
                0.0
            };
            let mut lower = vec![0.0f64; n_actions];
            lower[0] = 1.0 - r_trivial;
            let inv = winners_box_asif(&lower, 1.0 - alpha);
            acc.inversion_valid
                .add(loss_of(inv.action_index()) <= inv.risk_bound);
        }
        acc
    });

    let mut acc = BlockAcc::default();
    for b in &blocks {
        acc.merge(b);
    }

    let mut metrics = vec![
        acc.coverage_proj.metric(metric::COVERAGE_PROJECTION),
        acc.coverage_stud.metric(metric::COVERAGE_STUDENTIZED),
        acc.projection.valid.metric(metric::CERT_VALID_PROJECTION),
        acc.studentized.valid.metric(metric::CERT_VALID_STUDENTIZED),
        acc.risk_aware.valid.metric(metric::CERT_VALID_RISK_AWARE),
        acc.inversion_valid
            .metric(metric::CERT_VALID_INVERSION_TRIVIAL),
        acc.projection.mean_r.metric(metric::MEAN_R_PROJECTION),
        acc.studentized.mean_r.metric(metric::MEAN_R_STUDENTIZED),
        acc.risk_aware.mean_r.metric(metric::MEAN_R_RISK_AWARE),
        acc.projection.adopted.metric(metric::ADOPTION_PROJECTION),
        acc.studentized.adopted.metric(metric::ADOPTION_STUDENTIZED),
        acc.risk_aware.adopted.metric(metric::ADOPTION_RISK_AWARE),
        acc.projection
            .realized
            .metric(metric::REALIZED_RISK_PROJECTION),
        acc.studentized
            .realized
            .metric(metric::REALIZED_RISK_STUDENTIZED),
        acc.risk_aware
            .realized
            .metric(metric::REALIZED_RISK_RISK_AWARE),
        Metric::new(
            metric::DOMINANCE_VIOLATIONS,
            acc.dominance_violations as f64,
            0.0,
        ),
        Metric::new(
            metric::ACTION_DISAGREEMENTS,
            acc.action_disagreements as f64,
            0.0,
        ),
        Metric::new(metric::CRITICAL_VALUE, c_proj, 0.0),
        Metric::new(metric::CRITICAL_VALUE_STUDENTIZED, c_stud, 0.0),
    ];
    for (name, cert) in [
        (metric::FOOTNOTE_MARGIN_PROJECTION, &acc.projection),
        (metric::FOOTNOTE_MARGIN_STUDENTIZED, &acc.studentized),
        (metric::FOOTNOTE_MARGIN_RISK_AWARE, &acc.risk_aware),
    ] {
        metrics.push(Metric::new(
            name,
            alpha - cert.slack.mean(),
            cert.slack.se(),
        ));
    }

    let mut audit_failures = Vec::new();
    let level = 1.0 - alpha;
    for (name, rate) in [
        (metric::COVERAGE_PROJECTION, &acc.coverage_proj),
        (metric::COVERAGE_STUDENTIZED, &acc.coverage_stud),
        (metric::CERT_VALID_PROJECTION, &acc.projection.valid),
        (metric::CERT_VALID_STUDENTIZED, &acc.studentized.valid),
        (metric::CERT_VALID_RISK_AWARE, &acc.risk_aware.valid),
        (metric::CERT_VALID_INVERSION_TRIVIAL, &acc.inversion_valid),
    ] {
        let tol = 3.0 * rate.se_at(level);
        if rate.rate() < level - tol {
            audit_failures.push(format!(
                "{name} = {:.6} below {level} - {tol:.6}",
                rate.rate()
            ));
        }
    }
    for (name, cert) in [
        (metric::FOOTNOTE_MARGIN_PROJECTION, &acc.projection),
        (metric::FOOTNOTE_MARGIN_STUDENTIZED, &acc.studentized),
        (metric::FOOTNOTE_MARGIN_RISK_AWARE, &acc.risk_aware),
    ] {
        let margin = alpha - cert.slack.mean();
        let tol = 3.0 * cert.slack.se();
        if margin < -tol {
            audit_failures.push(format!("{name} = {margin:.6} below -{tol:.6}"));
        }
    }
    if acc.dominance_violations > 0 {
        audit_failures.push(format!(
            "dominance_violations = {} (risk-aware bound exceeded studentized bound)",
            acc.dominance_violations
        ));
    }

    Ok(SimReport {
        scenario: s.clone(),
        metrics,
        audit_failures,
    })
}
