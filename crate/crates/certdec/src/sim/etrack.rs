//! Two-point normal E-track scenario runner.
//!
//! The parameter grid holds two points; `Y ~ N(θ_true, σ²)`. For each
//! state θ the e-variable is the likelihood ratio
//! `E(Y, θ) = φ((Y - θ_alt)/σ) / φ((Y - θ)/σ)` against the other point,
//! which has expectation exactly 1 under θ. Per replication the runner
//! takes the E-posterior decision, its truncated variant when γ is set,
//! the threshold adoption `Q = 1(R <= C)`, and the re-decision through
//! certificate inversion, tallying the ratio means, post-adoption risk,
//! and pathwise dominance.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{map_blocks, MeanAcc, Metric, RateAcc, Scenario, ScenarioKind, SimReport};
use crate::ecert::{eposterior_decide, invert_e_certificate, EVariableField};
use crate::error::{Error, Result};
use crate::grid::{ParamGrid, ParamPoint};
use crate::loss::{LossSpec, LossTable};
use crate::stream::{derive_rng, DOMAIN_REPLICATION};

/// Metric names emitted by [`run_etrack`].
pub mod metric {
    /// Mean of `L(δ(Y), θ_true) / R(Y)`; at most 1 within noise.
    pub const E_RATIO_MEAN: &str = "e_ratio_mean";
    /// Mean of `max(L/R, 1)` for the truncated decision; at most `1+γ`.
    pub const E_RATIO_TRUNC_MEAN: &str = "e_ratio_trunc_mean";
    pub const MEAN_R: &str = "mean_r";
    pub const MEAN_R_TRUNC: &str = "mean_r_trunc";
    pub const ADOPTION: &str = "adoption";
    pub const ADOPTION_TRUNC: &str = "adoption_trunc";
    pub const REALIZED_RISK: &str = "realized_risk";
    pub const REALIZED_RISK_TRUNC: &str = "realized_risk_trunc";
    /// Smallest certificate produced over the run (positivity witness).
    pub const MIN_R: &str = "min_r";
    /// Re-decisions through inversion that exceeded the source bound.
    pub const EDOMINATE_VIOLATIONS: &str = "edominate_violations";
}

/// Default two-state loss values `[action][state]` (states sorted
/// ascending): a cautious action and a bold one that pays off in the
/// high-outcome state.
pub const DEFAULT_LOSS_TABLE: [[f64; 2]; 2] = [[0.6, 0.6], [0.9, 0.1]];

/// Relative guard for the pathwise dominance comparison: the re-decision
/// bound equals `R~` up to one division round-trip in floating point.
const DOMINANCE_ULP_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
struct BlockAcc {
    e_ratio: MeanAcc,
    e_ratio_trunc: MeanAcc,
    mean_r: MeanAcc,
    mean_r_trunc: MeanAcc,
    adopted: RateAcc,
    adopted_trunc: RateAcc,
    realized: MeanAcc,
    realized_trunc: MeanAcc,
    min_r: f64,
    edominate_violations: u64,
}

impl BlockAcc {
    fn new() -> Self {
        BlockAcc {
            min_r: f64::INFINITY,
            ..Default::default()
        }
    }

    fn merge(&mut self, other: &BlockAcc) {
        self.e_ratio.merge(&other.e_ratio);
        self.e_ratio_trunc.merge(&other.e_ratio_trunc);
        self.mean_r.merge(&other.mean_r);
        self.mean_r_trunc.merge(&other.mean_r_trunc);
        self.adopted.merge(&other.adopted);
        self.adopted_trunc.merge(&other.adopted_trunc);
        self.realized.merge(&other.realized);
        self.realized_trunc.merge(&other.realized_trunc);
        self.min_r = self.min_r.min(other.min_r);
        self.edominate_violations += other.edominate_violations;
    }
}

pub fn run_etrack(s: &Scenario) -> Result<SimReport> {
    if s.kind != ScenarioKind::ETrack {
        return Err(Error::invalid("run_etrack requires an etrack scenario"));
    }
    s.validate()?;

    let theta_true = s.theta[0];
    let theta_alt = s.theta_alt.expect("validated");
    let sigma = s.sigma[0];
    let c_cost = s.default_cost();
    let gamma = s.gamma;

    // two-point grid sorted ascending; remember which index is true
    let (lo, hi) = if theta_true < theta_alt {
        (theta_true, theta_alt)
    } else {
        (theta_alt, theta_true)
    };
    let true_idx = usize::from(theta_true >= theta_alt);
    let grid = ParamGrid::new(
        "two-point",
        vec![ParamPoint::scalar(lo)?, ParamPoint::scalar(hi)?],
    )?;
    let table_values: Vec<Vec<f64>> = s
        .loss_table
        .clone()
        .unwrap_or_else(|| DEFAULT_LOSS_TABLE.iter().map(|r| r.to_vec()).collect());
    let n_actions = table_values.len();
    let bounded = table_values
        .iter()
        .all(|row| row.iter().all(|&v| v <= 1.0));
    let spec = LossSpec::table(
        (0..n_actions).map(|i| format!("a{}", i + 1)).collect(),
        LossTable::new(grid.clone(), table_values.clone())?,
        bounded,
        true,
    )?;

    let states = [lo, hi];
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let loss_true = |action: usize| table_values[action][true_idx];

    let blocks = map_blocks(s.n_reps, |lo_rep, hi_rep| {
        let mut acc = BlockAcc::new();
        for rep in lo_rep..hi_rep {
            let mut rng = derive_rng(s.seed, DOMAIN_REPLICATION, rep);
            let z: f64 = rng.sample(StandardNormal);
            let y = theta_true + sigma * z;

            // likelihood-ratio e-values: E(Y, θ_j) = p(Y|θ_other)/p(Y|θ_j)
            let e_values: Vec<f64> = (0..2)
                .map(|j| {
                    let own = y - states[j];
                    let other = y - states[1 - j];
                    ((own * own - other * other) * inv_two_sigma_sq).exp()
                })
                .collect();
            let field = EVariableField::new("likelihood-ratio", e_values)
                .expect("likelihood ratios are nonnegative");

            let d = eposterior_decide(&field, &spec, &grid).expect("valid field");
            let r = d.risk_bound;
            let l_true = loss_true(d.action_index());
            acc.min_r = acc.min_r.min(r);
            acc.e_ratio.add(l_true / r);
            acc.mean_r.add(r);
            let adopt = r <= c_cost;
            acc.adopted.add(adopt);
            acc.realized.add(if adopt { l_true } else { c_cost });

            // re-decision through the inverted certificate never exceeds R
            if r.is_finite() {
                let inv_field = invert_e_certificate(d.action_index(), r, &spec, &grid)
                    .expect("finite positive bound");
                let redecided = eposterior_decide(&inv_field, &spec, &grid).expect("valid field");
                if redecided.risk_bound > r * (1.0 + DOMINANCE_ULP_GUARD) {
                    acc.edominate_violations += 1;
                }
            }

            if let Some(g) = gamma {
                let trunc_field = field.truncated(g);
                let dt = eposterior_decide(&trunc_field, &spec, &grid).expect("valid field");
                let rt = dt.risk_bound;
                let lt = loss_true(dt.action_index());
                acc.e_ratio_trunc.add((lt / rt).max(1.0));
                acc.mean_r_trunc.add(rt);
                let adopt_t = rt <= c_cost;
                acc.adopted_trunc.add(adopt_t);
                acc.realized_trunc.add(if adopt_t { lt } else { c_cost });
            }
        }
        acc
    });

    let mut acc = BlockAcc::new();
    for b in &blocks {
        acc.merge(b);
    }

    let mut metrics = vec![
        acc.e_ratio.metric(metric::E_RATIO_MEAN),
        acc.mean_r.metric(metric::MEAN_R),
        acc.adopted.metric(metric::ADOPTION),
        acc.realized.metric(metric::REALIZED_RISK),
        Metric::new(metric::MIN_R, acc.min_r, 0.0),
        Metric::new(
            metric::EDOMINATE_VIOLATIONS,
            acc.edominate_violations as f64,
            0.0,
        ),
    ];
    if gamma.is_some() {
        metrics.push(acc.e_ratio_trunc.metric(metric::E_RATIO_TRUNC_MEAN));
        metrics.push(acc.mean_r_trunc.metric(metric::MEAN_R_TRUNC));
        metrics.push(acc.adopted_trunc.metric(metric::ADOPTION_TRUNC));
        metrics.push(acc.realized_trunc.metric(metric::REALIZED_RISK_TRUNC));
    }

    let mut audit_failures = Vec::new();
    let ratio_tol = 3.0 * acc.e_ratio.se();
    if acc.e_ratio.mean() > 1.0 + ratio_tol {
        audit_failures.push(format!(
            "e_ratio_mean = {:.6} above 1 + {ratio_tol:.6}",
            acc.e_ratio.mean()
        ));
    }
    let realized_tol = 3.0 * acc.realized.se();
    if acc.realized.mean() > 2.0 * c_cost + realized_tol {
        audit_failures.push(format!(
            "realized_risk = {:.6} above 2C + {realized_tol:.6}",
            acc.realized.mean()
        ));
    }
    if acc.min_r.is_nan() || acc.min_r <= 0.0 {
        audit_failures.push(format!("min_r = {} is not positive", acc.min_r));
    }
    if acc.edominate_violations > 0 {
        audit_failures.push(format!(
            "edominate_violations = {}",
            acc.edominate_violations
        ));
    }
    if let Some(g) = gamma {
        let tol = 3.0 * acc.e_ratio_trunc.se();
        if acc.e_ratio_trunc.mean() > 1.0 + g + tol {
            audit_failures.push(format!(
                "e_ratio_trunc_mean = {:.6} above 1 + {g} + {tol:.6}",
                acc.e_ratio_trunc.mean()
            ));
        }
        let tol = 3.0 * acc.realized_trunc.se();
        if acc.realized_trunc.mean() > (1.0 + g) * c_cost + tol {
            audit_failures.push(format!(
                "realized_risk_trunc = {:.6} above (1+{g})C + {tol:.6}",
                acc.realized_trunc.mean()
            ));
        }
    }

    Ok(SimReport {
        scenario: s.clone(),
        metrics,
        audit_failures,
    })
}
