//! Treatment-proportion scenario runner.
//!
//! Per replication: draw `X ~ N(θ, σ²)`, take the uniformly most accurate
//! lower bound `θ̂ = X + σ z_α`, decide `δ = argmin_a L(a, θ̂)` over the
//! fraction grid with certificate `R = min_a L(a, θ̂)` (clamped below at
//! 0), and adopt when `R <= C`.
//!
//! Because the loss decreases in θ, adoption is equivalent to `θ̂ > θ̄`
//! where `θ̄` solves `min_a L(a, θ̄) = C`; the runner tallies disagreements
//! between the two indicators (expected: none). It also draws a trivial
//! challenger certificate each replication and compares upper-tail
//! probabilities of the two bounds on a grid restricted to values above
//! `min_a L(a, θ_true)`, where the lower-bound construction is optimal.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{map_blocks, tail_prob, MeanAcc, Metric, RateAcc, Scenario, ScenarioKind, SimReport};
use crate::error::{Error, Result};
use crate::loss::CostFn;
use crate::normal::norm_quantile;
use crate::stream::{derive_rng, DOMAIN_REPLICATION};

/// Metric names emitted by [`run_treatment`].
pub mod metric {
    pub const COVERAGE: &str = "coverage";
    pub const CERT_VALID: &str = "cert_valid";
    pub const MEAN_R: &str = "mean_r";
    pub const ADOPTION: &str = "adoption";
    pub const REALIZED_RISK: &str = "realized_risk";
    pub const FOOTNOTE_MARGIN: &str = "footnote_margin";
    /// Replications where `1(R <= C)` and `1(θ̂ > θ̄)` disagree.
    pub const THRESHOLD_MISMATCHES: &str = "threshold_mismatches";
    /// The adoption threshold `θ̄` solving `min_a L(a, θ̄) = C`.
    pub const THETA_BAR: &str = "theta_bar";
    /// `max_r [P(R >= r) - P(R_trivial >= r)]` over the restricted grid.
    pub const UMA_DOMINANCE_STATISTIC: &str = "uma_dominance_statistic";
    pub const UMA_DOMINANCE_TOLERANCE: &str = "uma_dominance_tolerance";
}

/// Number of tail-comparison grid points.
const TAIL_GRID: usize = 101;

/// Minimum loss over the action grid at outcome `theta`.
fn min_loss(fractions: &[(f64, f64)], theta: f64) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_v = f64::INFINITY;
    for (i, &(frac, psi)) in fractions.iter().enumerate() {
        let v = frac * (1.0 - theta) + psi;
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    (best, best_v)
}

/// Solve `min_a L(a, θ̄) = C` by bisection to `tol`. The envelope is
/// continuous and strictly decreasing (every fraction is positive), so a
/// root exists on the extended θ line; the bracket grows until it holds
/// the root.
pub fn adoption_threshold(fractions: &[(f64, f64)], c: f64, tol: f64) -> f64 {
    let m = |t: f64| min_loss(fractions, t).1;
    let (mut lo, mut hi) = (-1.0f64, 2.0f64);
    while m(lo) < c {
        lo = lo * 2.0 - 1.0;
    }
    while m(hi) > c {
        hi = hi * 2.0 + 1.0;
    }
    // m(lo) >= c >= m(hi)
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if m(mid) >= c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Default)]
struct BlockAcc {
    coverage: RateAcc,
    valid: RateAcc,
    mean_r: MeanAcc,
    adopted: RateAcc,
    realized: MeanAcc,
    slack: MeanAcc,
    mismatches: u64,
    r_samples: Vec<f64>,
    r_trivial_samples: Vec<f64>,
}

pub fn run_treatment(s: &Scenario) -> Result<SimReport> {
    if s.kind != ScenarioKind::Treatment {
        return Err(Error::invalid("run_treatment requires a treatment scenario"));
    }
    s.validate()?;

    let theta_true = s.theta[0];
    let sigma = s.sigma[0];
    let alpha = s.alpha;
    let c_cost = s.default_cost();
    let psi: &CostFn = s.psi.as_ref().expect("validated");

    // action grid over [ε, 1] with ψ evaluated once per fraction
    let n_fracs = s.grid_resolution;
    let fractions: Vec<(f64, f64)> = (0..n_fracs)
        .map(|i| {
            let a = s.epsilon + (1.0 - s.epsilon) * i as f64 / (n_fracs - 1) as f64;
            (a, psi.eval(a))
        })
        .collect();

    let theta_bar = adoption_threshold(&fractions, c_cost, 1e-9);
    let z_alpha_offset = sigma * norm_quantile(alpha);

    let blocks = map_blocks(s.n_reps, |lo, hi| {
        let mut acc = BlockAcc::default();
        acc.r_samples.reserve((hi - lo) as usize);
        acc.r_trivial_samples.reserve((hi - lo) as usize);
        for rep in lo..hi {
            let mut rng = derive_rng(s.seed, DOMAIN_REPLICATION, rep);
            let z: f64 = rng.sample(StandardNormal);
            let x = theta_true + sigma * z;
            let theta_hat = x + z_alpha_offset;

            let (delta, r_raw) = min_loss(&fractions, theta_hat);
            let r = r_raw.max(0.0);
            let loss_true = {
                let (frac, psi_v) = fractions[delta];
                frac * (1.0 - theta_true) + psi_v
            };

            let adopt = r <= c_cost;
            let realized = if adopt { loss_true } else { c_cost };

            acc.coverage.add(theta_hat <= theta_true);
            acc.valid.add(loss_true <= r);
            acc.mean_r.add(r);
            acc.adopted.add(adopt);
            acc.realized.add(realized);
            acc.slack.add(realized - r.min(c_cost));
            if adopt != (theta_hat > theta_bar) {
                acc.mismatches += 1;
            }
            acc.r_samples.push(r);

            // trivial challenger for the optimality comparison
            let r_trivial = if rng.random::<f64>() < 1.0 - alpha {
                1.0
            } else {
                0.0
            };
            acc.r_trivial_samples.push(r_trivial);
        }
        acc
    });

    let mut acc = BlockAcc::default();
    for b in blocks {
        acc.coverage.merge(&b.coverage);
        acc.valid.merge(&b.valid);
        acc.mean_r.merge(&b.mean_r);
        acc.adopted.merge(&b.adopted);
        acc.realized.merge(&b.realized);
        acc.slack.merge(&b.slack);
        acc.mismatches += b.mismatches;
        acc.r_samples.extend(b.r_samples);
        acc.r_trivial_samples.extend(b.r_trivial_samples);
    }

    // tail comparison on a grid strictly above min_a L(a, θ_true), the
    // region where lower-bound optimality orders the two certificates
    let n = s.n_reps as f64;
    let r_floor = min_loss(&fractions, theta_true).1;
    acc.r_samples.sort_by(f64::total_cmp);
    acc.r_trivial_samples.sort_by(f64::total_cmp);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_tol = 0.0;
    let mut tail_violation = false;
    for k in 1..=TAIL_GRID {
        // clamp the top point to 1.0: float rounding must not push it
        // past the challenger's largest attainable value
        let r = (r_floor + (1.0 - r_floor) * k as f64 / TAIL_GRID as f64).min(1.0);
        let p_ours = tail_prob(&acc.r_samples, r);
        let p_chal = tail_prob(&acc.r_trivial_samples, r);
        let gap = p_ours - p_chal;
        let tol =
            3.0 * ((p_ours * (1.0 - p_ours) + p_chal * (1.0 - p_chal)) / n).sqrt();
        if gap > worst_gap {
            worst_gap = gap;
            worst_tol = tol;
        }
        if gap > tol {
            tail_violation = true;
        }
    }

    let metrics = vec![
        acc.coverage.metric(metric::COVERAGE),
        acc.valid.metric(metric::CERT_VALID),
        acc.mean_r.metric(metric::MEAN_R),
        acc.adopted.metric(metric::ADOPTION),
        acc.realized.metric(metric::REALIZED_RISK),
        Metric::new(
            metric::FOOTNOTE_MARGIN,
            alpha - acc.slack.mean(),
            acc.slack.se(),
        ),
        Metric::new(metric::THRESHOLD_MISMATCHES, acc.mismatches as f64, 0.0),
        Metric::new(metric::THETA_BAR, theta_bar, 0.0),
        Metric::new(metric::UMA_DOMINANCE_STATISTIC, worst_gap, worst_tol / 3.0),
        Metric::new(metric::UMA_DOMINANCE_TOLERANCE, worst_tol, 0.0),
    ];

    let mut audit_failures = Vec::new();
    let level = 1.0 - alpha;
    for (name, rate) in [
        (metric::COVERAGE, &acc.coverage),
        (metric::CERT_VALID, &acc.valid),
    ] {
        let tol = 3.0 * rate.se_at(level);
        if rate.rate() < level - tol {
            audit_failures.push(format!(
                "{name} = {:.6} below {level} - {tol:.6}",
                rate.rate()
            ));
        }
    }
    if acc.mismatches > 0 {
        audit_failures.push(format!(
            "threshold_mismatches = {} (adoption indicator disagreed with theta_bar rule)",
            acc.mismatches
        ));
    }
    let margin = alpha - acc.slack.mean();
    let margin_tol = 3.0 * acc.slack.se();
    if margin < -margin_tol {
        audit_failures.push(format!(
            "footnote_margin = {margin:.6} below -{margin_tol:.6}"
        ));
    }
    if tail_violation {
        audit_failures.push(format!(
            "uma dominance: tail gap {worst_gap:.6} exceeded tolerance {worst_tol:.6}"
        ));
    }

    Ok(SimReport {
        scenario: s.clone(),
        metrics,
        audit_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_scenario() -> Scenario {
        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        Scenario::treatment(0.8, 0.1, psi, 0.5, 0.05, 0.05, 20_000, 77)
    }

    #[test]
    fn threshold_solves_min_loss_equation() {
        let fractions: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let a = 0.05 + 0.95 * i as f64 / 19.0;
                (a, 0.05 * a)
            })
            .collect();
        let c = 0.025;
        let t = adoption_threshold(&fractions, c, 1e-9);
        let m = min_loss(&fractions, t).1;
        assert!((m - c).abs() < 1e-7, "m(theta_bar) = {m}");
    }

    #[test]
    fn validity_and_threshold_equivalence() {
        let report = run_treatment(&base_scenario()).unwrap();
        assert!(
            report.audit_passed(),
            "audit failures: {:?}",
            report.audit_failures
        );
        assert_eq!(report.value(metric::THRESHOLD_MISMATCHES).unwrap(), 0.0);
        assert!(report.value(metric::CERT_VALID).unwrap() >= 0.94);
        assert!(report.value(metric::COVERAGE).unwrap() >= 0.94);
    }

    #[test]
    fn near_noiseless_run_recovers_full_information_decision() {
        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        let mut s = Scenario::treatment(0.8, 1e-6, psi, 0.5, 0.05, 0.05, 2_000, 5);
        s.grid_resolution = 41;
        let report = run_treatment(&s).unwrap();
        // θ̂ ≈ θ: R approaches min_a L(a, θ) and adoption is deterministic
        let fractions: Vec<(f64, f64)> = (0..41)
            .map(|i| {
                let a = 0.05 + 0.95 * i as f64 / 40.0;
                (a, 0.05 * a)
            })
            .collect();
        let full_info = min_loss(&fractions, 0.8).1;
        assert!((report.value(metric::MEAN_R).unwrap() - full_info).abs() < 1e-4);
        let adoption = report.value(metric::ADOPTION).unwrap();
        assert!(adoption == 0.0 || adoption == 1.0);
        assert_eq!(
            adoption == 1.0,
            full_info <= report.scenario.default_cost()
        );
    }

    #[test]
    fn nontrivial_adoption_when_cost_is_tight() {
        // C inside the range of min-loss values makes adoption data-driven
        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        let s = Scenario::treatment(0.8, 0.1, psi, 0.97, 0.005, 0.05, 20_000, 9);
        let report = run_treatment(&s).unwrap();
        assert!(report.audit_passed(), "{:?}", report.audit_failures);
        let adoption = report.value(metric::ADOPTION).unwrap();
        assert!(adoption > 0.05 && adoption < 0.995, "adoption = {adoption}");
        assert_eq!(report.value(metric::THRESHOLD_MISMATCHES).unwrap(), 0.0);
    }
}
