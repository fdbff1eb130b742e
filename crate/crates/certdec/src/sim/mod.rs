//! Seeded Monte Carlo harness.
//!
//! Each runner replays `data -> certificate -> adoption` for `n_reps`
//! replications and aggregates the empirical checks behind every
//! guarantee: coverage, certificate validity, realized risk against its
//! bounds, pathwise dominance tallies. Rates carry the binomial standard
//! error `sqrt(p(1-p)/n)`; means carry `s/sqrt(n)`.
//!
//! Replications are parallel and deterministic: replication `i` owns the
//! stream derived from `(seed, i)`, work is split into fixed-size blocks,
//! block partials are collected in block order, and the final reduction is
//! sequential with compensated sums. Worker count cannot change a single
//! bit of the report.

pub mod audit;
pub mod etrack;
pub mod treatment;
pub mod winners;

pub use audit::{run_dominance_audit, Challenger};
pub use etrack::run_etrack;
pub use treatment::run_treatment;
pub use winners::run_winners;

use rayon::prelude::*;

use crate::confset::ErrorModel;
use crate::error::{Error, Result};
use crate::loss::CostFn;

/// Replications per parallel block.
const BLOCK_SIZE: u64 = 4096;

/// Which scenario family a configuration drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Select the best of several noisy options (`L = 1 - θ(a)`).
    Winners,
    /// Choose a treatment fraction against a scalar outcome
    /// (`L = a(1-θ) + ψ(a)`, default cost `(1-ρ) - κ`).
    Treatment,
    /// Two-point normal E-track scenario with likelihood-ratio e-variables.
    ETrack,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Winners => "winners",
            ScenarioKind::Treatment => "treatment",
            ScenarioKind::ETrack => "etrack",
        }
    }
}

/// A fully specified simulation scenario. All randomness derives from
/// `seed`; identical scenarios produce bit-identical reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// True parameter: one coordinate per action (winners) or a scalar
    /// (treatment, etrack).
    pub theta: Vec<f64>,
    /// Noise scale per action (winners) or scalar (treatment, etrack).
    pub sigma: Vec<f64>,
    /// Optional correlation matrix for the winners error vector.
    pub correlation: Option<Vec<Vec<f64>>>,
    pub alpha: f64,
    /// Default-action cost. Required for winners and etrack; derived as
    /// `(1-ρ) - κ` for treatment and must then be left unset.
    pub c: Option<f64>,
    /// Adoption cap `u`.
    pub u: f64,
    /// Truncation multiple for the E-track.
    pub gamma: Option<f64>,
    /// Treatment: known control outcome and fixed cost.
    pub rho: Option<f64>,
    pub kappa: Option<f64>,
    /// Treatment: variable cost `ψ`.
    pub psi: Option<CostFn>,
    /// Treatment: smallest treatable fraction.
    pub epsilon: f64,
    /// ETrack: the second hypothesis point.
    pub theta_alt: Option<f64>,
    /// ETrack: loss values `[action][state]`, states sorted ascending.
    pub loss_table: Option<Vec<Vec<f64>>>,
    /// Grid resolution per parameter dimension (winners inversion grid,
    /// treatment action grid).
    pub grid_resolution: usize,
    pub n_reps: u64,
    pub seed: u64,
    /// Draws used when simulating critical values.
    pub n_draws_critval: u64,
    /// Challenger for dominance audits.
    pub challenger: Option<Challenger>,
}

impl Scenario {
    /// A winners scenario with sensible defaults for the remaining knobs.
    pub fn winners(
        theta: Vec<f64>,
        sigma: Vec<f64>,
        alpha: f64,
        c: f64,
        n_reps: u64,
        seed: u64,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::Winners,
            theta,
            sigma,
            correlation: None,
            alpha,
            c: Some(c),
            u: 1.0,
            gamma: None,
            rho: None,
            kappa: None,
            psi: None,
            epsilon: 0.05,
            theta_alt: None,
            loss_table: None,
            grid_resolution: 21,
            n_reps,
            seed,
            n_draws_critval: 400_000,
            challenger: None,
        }
    }

    /// A treatment scenario; `C = (1-ρ) - κ`.
    #[allow(clippy::too_many_arguments)]
    pub fn treatment(
        theta: f64,
        sigma: f64,
        psi: CostFn,
        rho: f64,
        kappa: f64,
        alpha: f64,
        n_reps: u64,
        seed: u64,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::Treatment,
            theta: vec![theta],
            sigma: vec![sigma],
            correlation: None,
            alpha,
            c: None,
            u: 1.0,
            gamma: None,
            rho: Some(rho),
            kappa: Some(kappa),
            psi: Some(psi),
            epsilon: 0.05,
            theta_alt: None,
            loss_table: None,
            grid_resolution: 21,
            n_reps,
            seed,
            n_draws_critval: 400_000,
            challenger: None,
        }
    }

    /// A two-point E-track scenario; `theta` is the true point.
    pub fn etrack(
        theta: f64,
        theta_alt: f64,
        sigma: f64,
        c: f64,
        gamma: Option<f64>,
        n_reps: u64,
        seed: u64,
    ) -> Self {
        Scenario {
            kind: ScenarioKind::ETrack,
            theta: vec![theta],
            sigma: vec![sigma],
            correlation: None,
            alpha: 0.05,
            c: Some(c),
            u: 1.0,
            gamma,
            rho: None,
            kappa: None,
            psi: None,
            epsilon: 0.05,
            theta_alt: Some(theta_alt),
            loss_table: None,
            grid_resolution: 21,
            n_reps,
            seed,
            n_draws_critval: 400_000,
            challenger: None,
        }
    }

    /// The decision-maker's default cost for this scenario.
    pub fn default_cost(&self) -> f64 {
        match self.kind {
            ScenarioKind::Treatment => {
                (1.0 - self.rho.unwrap_or(f64::NAN)) - self.kappa.unwrap_or(f64::NAN)
            }
            _ => self.c.unwrap_or(f64::NAN),
        }
    }

    /// The winners error model implied by the correlation setting.
    pub fn error_model(&self) -> Result<ErrorModel> {
        match &self.correlation {
            Some(m) => ErrorModel::correlated(m),
            None => Ok(ErrorModel::IidNormal),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::OutOfRange {
                field: "alpha",
                range: "(0, 1)",
                value: self.alpha,
            });
        }
        if self.n_reps < 1 {
            return Err(Error::invalid("n_reps must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.u) {
            return Err(Error::OutOfRange {
                field: "u",
                range: "[0, 1]",
                value: self.u,
            });
        }
        if self.grid_resolution < 2 {
            return Err(Error::invalid("grid_resolution must be at least 2"));
        }
        if let Some(g) = self.gamma {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::OutOfRange {
                    field: "gamma",
                    range: "(0, inf)",
                    value: g,
                });
            }
        }
        for &s in &self.sigma {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::OutOfRange {
                    field: "sigma",
                    range: "(0, inf)",
                    value: s,
                });
            }
        }
        match self.kind {
            ScenarioKind::Winners => {
                if self.theta.len() != self.sigma.len() || self.theta.is_empty() {
                    return Err(Error::invalid(
                        "winners: theta and sigma need equal, nonzero length",
                    ));
                }
                for &t in &self.theta {
                    if !(0.0..=1.0).contains(&t) {
                        return Err(Error::OutOfRange {
                            field: "theta",
                            range: "[0, 1]",
                            value: t,
                        });
                    }
                }
                let c = self
                    .c
                    .ok_or_else(|| Error::invalid("winners: C is required"))?;
                if !(0.0..1.0).contains(&c) {
                    return Err(Error::OutOfRange {
                        field: "C",
                        range: "[0, 1)",
                        value: c,
                    });
                }
                self.error_model()?;
                if let Some(m) = &self.correlation {
                    if m.len() != self.theta.len() {
                        return Err(Error::DimensionMismatch {
                            expected: self.theta.len(),
                            got: m.len(),
                        });
                    }
                }
            }
            ScenarioKind::Treatment => {
                if self.theta.len() != 1 || self.sigma.len() != 1 {
                    return Err(Error::invalid("treatment: theta and sigma are scalars"));
                }
                if !(0.0..=1.0).contains(&self.theta[0]) {
                    return Err(Error::OutOfRange {
                        field: "theta",
                        range: "[0, 1]",
                        value: self.theta[0],
                    });
                }
                if self.rho.is_none() || self.kappa.is_none() {
                    return Err(Error::invalid("treatment: rho and kappa are required"));
                }
                if self.c.is_some() {
                    return Err(Error::invalid(
                        "treatment: C is derived as (1-rho)-kappa; leave it unset",
                    ));
                }
                let psi = self
                    .psi
                    .as_ref()
                    .ok_or_else(|| Error::invalid("treatment: psi is required"))?;
                psi.validate()?;
                if self.epsilon.is_nan() || self.epsilon <= 0.0 || self.epsilon >= 1.0 {
                    return Err(Error::OutOfRange {
                        field: "epsilon",
                        range: "(0, 1)",
                        value: self.epsilon,
                    });
                }
                let c = self.default_cost();
                if c.is_nan() || c <= 0.0 {
                    return Err(Error::invalid(format!(
                        "treatment: derived C = (1-rho)-kappa = {c} must be positive; \
                         the default action would dominate by construction"
                    )));
                }
            }
            ScenarioKind::ETrack => {
                if self.theta.len() != 1 || self.sigma.len() != 1 {
                    return Err(Error::invalid("etrack: theta and sigma are scalars"));
                }
                let alt = self
                    .theta_alt
                    .ok_or_else(|| Error::invalid("etrack: theta_alt is required"))?;
                if alt == self.theta[0] {
                    return Err(Error::invalid("etrack: theta_alt must differ from theta"));
                }
                let c = self
                    .c
                    .ok_or_else(|| Error::invalid("etrack: C is required"))?;
                if c.is_nan() || c <= 0.0 {
                    return Err(Error::OutOfRange {
                        field: "C",
                        range: "(0, inf)",
                        value: c,
                    });
                }
                if let Some(table) = &self.loss_table {
                    if table.is_empty() || table.iter().any(|row| row.len() != 2) {
                        return Err(Error::invalid(
                            "etrack: loss_table rows must have one value per state (2 states)",
                        ));
                    }
                    for row in table {
                        for &v in row {
                            if !v.is_finite() || v <= 0.0 {
                                return Err(Error::OutOfRange {
                                    field: "loss_table entry",
                                    range: "(0, inf)",
                                    value: v,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// One aggregated quantity with its Monte Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub mc_se: f64,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64, mc_se: f64) -> Self {
        Metric {
            name: name.into(),
            value,
            mc_se,
        }
    }
}

/// Aggregates for one scenario run.
#[derive(Debug, Clone)]
pub struct SimReport {
    pub scenario: Scenario,
    pub metrics: Vec<Metric>,
    /// Guarantee checks that exceeded their 3-standard-error tolerance.
    pub audit_failures: Vec<String>,
}

impl SimReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.metric(name).map(|m| m.value)
    }

    pub fn audit_passed(&self) -> bool {
        self.audit_failures.is_empty()
    }
}

/// Dispatch a scenario to its runner.
pub fn run_scenario(s: &Scenario) -> Result<SimReport> {
    match s.kind {
        ScenarioKind::Winners => run_winners(s),
        ScenarioKind::Treatment => run_treatment(s),
        ScenarioKind::ETrack => run_etrack(s),
    }
}

// ---------------------------------------------------------------------------
// deterministic parallel reduction
// ---------------------------------------------------------------------------

/// Run `f(lo, hi)` over fixed-size blocks of the replication range in
/// parallel, returning block results in block order.
pub(crate) fn map_blocks<T: Send, F>(n_reps: u64, f: F) -> Vec<T>
where
    F: Fn(u64, u64) -> T + Sync,
{
    let n_blocks = n_reps.div_ceil(BLOCK_SIZE);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK_SIZE;
            let hi = (lo + BLOCK_SIZE).min(n_reps);
            f(lo, hi)
        })
        .collect()
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Mean-and-standard-error accumulator for a real-valued statistic.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MeanAcc {
    sum: KahanSum,
    sum_sq: KahanSum,
    n: u64,
}

impl MeanAcc {
    pub fn add(&mut self, x: f64) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
        self.n += 1;
    }

    pub fn merge(&mut self, other: &MeanAcc) {
        self.sum.add(other.sum.value());
        self.sum_sq.add(other.sum_sq.value());
        self.n += other.n;
    }

    pub fn mean(&self) -> f64 {
        self.sum.value() / self.n as f64
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = (self.sum_sq.value() - self.sum.value() * self.sum.value() / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }

    pub fn metric(&self, name: &str) -> Metric {
        Metric::new(name, self.mean(), self.se())
    }
}

/// Rate accumulator with binomial standard error.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RateAcc {
    hits: u64,
    n: u64,
}

impl RateAcc {
    pub fn add(&mut self, hit: bool) {
        self.hits += hit as u64;
        self.n += 1;
    }

    pub fn merge(&mut self, other: &RateAcc) {
        self.hits += other.hits;
        self.n += other.n;
    }

    pub fn rate(&self) -> f64 {
        self.hits as f64 / self.n as f64
    }

    /// `sqrt(p(1-p)/n)` at the observed rate.
    pub fn se(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// `sqrt(p(1-p)/n)` at a nominal rate, used when a tolerance is pinned
    /// to the guaranteed level rather than the observed one.
    pub fn se_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    pub fn metric(&self, name: &str) -> Metric {
        Metric::new(name, self.rate(), self.se())
    }
}

/// Empirical upper-tail probability `P(x >= r)` for a sorted sample.
pub(crate) fn tail_prob(sorted_ascending: &[f64], r: f64) -> f64 {
    let below = sorted_ascending.partition_point(|&x| x < r);
    (sorted_ascending.len() - below) as f64 / sorted_ascending.len() as f64
}
