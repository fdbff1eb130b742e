//! Confidence set constructions.
//!
//! Four families: projection boxes (unstudentized and studentized) for
//! inference on winners, uniformly-most-accurate scalar lower-bound
//! intervals, and sub-level inversion sets `{θ : L(δ̃, θ) <= R̃}` of an
//! existing certificate. Empty sets are legal values, not errors;
//! downstream minimax code applies the sup-over-empty-set = 0 convention.
//!
//! Critical values are empirical quantiles of the simulated maximum error,
//! with the order statistic taken at `ceil((1-α) n)`, the conservative
//! (higher) choice, preserving the `>= 1-α` direction of every guarantee.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{ParamGrid, ParamPoint};
use crate::loss::LossSpec;
use crate::normal::norm_quantile;
use crate::stream::{derive_rng, DOMAIN_CRITICAL_VALUE};

/// Estimates and standard errors for the winners setting, one per action.
#[derive(Debug, Clone, PartialEq)]
pub struct WinnersData {
    x: Vec<f64>,
    sigma: Vec<f64>,
}

impl WinnersData {
    pub fn new(x: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        if x.len() != sigma.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: sigma.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::invalid("winners data needs at least one action"));
        }
        for &v in &x {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: "winners estimate",
                    value: v,
                });
            }
        }
        for &s in &sigma {
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::OutOfRange {
                    field: "sigma",
                    range: "(0, inf)",
                    value: s,
                });
            }
        }
        Ok(WinnersData { x, sigma })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn n_actions(&self) -> usize {
        self.x.len()
    }
}

/// Joint law of the standardized error vector `Z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorModel {
    /// Independent standard normal coordinates.
    IidNormal,
    /// Jointly normal, unit variances, given correlation matrix.
    CorrelatedNormal { cholesky: Vec<Vec<f64>> },
    /// Every coordinate identically zero.
    Degenerate,
}

impl ErrorModel {
    /// Build the correlated model from a row-major correlation matrix.
    #[allow(clippy::needless_range_loop)] // index form keeps the Cholesky recurrences readable
    pub fn correlated(correlation: &[Vec<f64>]) -> Result<Self> {
        let n = correlation.len();
        if n == 0 || correlation.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("correlation matrix must be square"));
        }
        for i in 0..n {
            if (correlation[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("correlation matrix needs unit diagonal"));
            }
            for j in 0..n {
                if (correlation[i][j] - correlation[j][i]).abs() > 1e-12 {
                    return Err(Error::invalid("correlation matrix must be symmetric"));
                }
            }
        }
        // lower-triangular Cholesky factor
        let mut l = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = correlation[i][j];
                for k in 0..j {
                    sum -= l[i][k] * l[j][k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::invalid(
                            "correlation matrix is not positive definite",
                        ));
                    }
                    l[i][j] = sum.sqrt();
                } else {
                    l[i][j] = sum / l[j][j];
                }
            }
        }
        Ok(ErrorModel::CorrelatedNormal { cholesky: l })
    }

    pub fn dim_matches(&self, n: usize) -> bool {
        match self {
            ErrorModel::CorrelatedNormal { cholesky } => cholesky.len() == n,
            _ => true,
        }
    }

    /// Fill `z` with one draw of the error vector.
    pub fn draw<R: Rng>(&self, rng: &mut R, z: &mut [f64]) {
        match self {
            ErrorModel::IidNormal => {
                for v in z.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
            }
            ErrorModel::CorrelatedNormal { cholesky } => {
                let n = z.len();
                let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                for i in 0..n {
                    let mut acc = 0.0;
                    for (k, gk) in g.iter().enumerate().take(i + 1) {
                        acc += cholesky[i][k] * gk;
                    }
                    z[i] = acc;
                }
            }
            ErrorModel::Degenerate => z.fill(0.0),
        }
    }
}

/// How a confidence set was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Projection,
    StudentizedProjection,
    UmaLower,
    Inversion,
    Trivial,
}

/// Membership predicate, one variant per supported geometry.
#[derive(Debug, Clone)]
pub enum Membership {
    /// All coordinates bounded below, intersected with `[0,1]^A`.
    Box { lower: Vec<f64> },
    /// Scalar `θ >= lower`.
    HalfLine { lower: f64 },
    /// `{θ : L(action, θ) <= threshold}`.
    SubLevel {
        action: usize,
        threshold: f64,
        spec: Arc<LossSpec>,
    },
    /// The whole parameter space.
    All,
    /// Nothing.
    Empty,
}

/// A deterministic membership predicate with a nominal coverage level.
#[derive(Debug, Clone)]
pub struct ConfidenceSet {
    membership: Membership,
    nominal_level: f64,
    construction: Construction,
    grid_view: Option<Vec<ParamPoint>>,
}

impl ConfidenceSet {
    pub fn new(
        membership: Membership,
        nominal_level: f64,
        construction: Construction,
    ) -> Result<Self> {
        if !(nominal_level > 0.0 && nominal_level < 1.0) {
            return Err(Error::OutOfRange {
                field: "nominal_level",
                range: "(0, 1)",
                value: nominal_level,
            });
        }
        Ok(ConfidenceSet {
            membership,
            nominal_level,
            construction,
            grid_view: None,
        })
    }

    pub fn nominal_level(&self) -> f64 {
        self.nominal_level
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    /// Evaluate the membership predicate.
    pub fn contains(&self, theta: &ParamPoint) -> Result<bool> {
        match &self.membership {
            Membership::Box { lower } => {
                if theta.dim() != lower.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lower.len(),
                        got: theta.dim(),
                    });
                }
                Ok(theta.in_unit_cube()
                    && theta
                        .coords()
                        .iter()
                        .zip(lower.iter())
                        .all(|(&t, &lo)| t >= lo))
            }
            Membership::HalfLine { lower } => {
                if theta.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: theta.dim(),
                    });
                }
                Ok(theta.coord(0) >= *lower)
            }
            Membership::SubLevel {
                action,
                threshold,
                spec,
            } => Ok(spec.eval(*action, theta)? <= *threshold),
            Membership::All => Ok(true),
            Membership::Empty => Ok(false),
        }
    }

    /// Indices of the grid points inside the set.
    pub fn member_indices(&self, grid: &ParamGrid) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, p) in grid.points().iter().enumerate() {
            if self.contains(p)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Attach a materialized view: exactly the grid points satisfying the
    /// predicate.
    pub fn materialized(mut self, grid: &ParamGrid) -> Result<Self> {
        let view = self
            .member_indices(grid)?
            .into_iter()
            .map(|i| grid.points()[i].clone())
            .collect();
        self.grid_view = Some(view);
        Ok(self)
    }

    pub fn grid_view(&self) -> Option<&[ParamPoint]> {
        self.grid_view.as_deref()
    }
}

/// Empirical `1-α` quantile of the maximum error statistic.
///
/// Simulates `n_draws` i.i.d. vectors `Z` from `error_model` and returns the
/// order statistic at `ceil((1-α) n_draws)` of `max_a Z(a) σ(a)`
/// (unstudentized) or `max_a Z(a)` (studentized). Deterministic given
/// `seed`.
pub fn critical_value(
    sigma: &[f64],
    error_model: &ErrorModel,
    alpha: f64,
    n_draws: u64,
    seed: u64,
    studentized: bool,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    if n_draws < 1000 {
        return Err(Error::invalid(format!(
            "critical_value needs n_draws >= 1000, got {n_draws}"
        )));
    }
    if sigma.is_empty() {
        return Err(Error::invalid("critical_value needs at least one action"));
    }
    for &s in sigma {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::OutOfRange {
                field: "sigma",
                range: "(0, inf)",
                value: s,
            });
        }
    }
    if !error_model.dim_matches(sigma.len()) {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            got: match error_model {
                ErrorModel::CorrelatedNormal { cholesky } => cholesky.len(),
                _ => sigma.len(),
            },
        });
    }

    let mut rng = derive_rng(seed, DOMAIN_CRITICAL_VALUE, 0);
    let mut z = vec![0.0f64; sigma.len()];
    let mut stats = Vec::with_capacity(n_draws as usize);
    for _ in 0..n_draws {
        error_model.draw(&mut rng, &mut z);
        let stat = z
            .iter()
            .zip(sigma.iter())
            .map(|(&zi, &si)| if studentized { zi } else { zi * si })
            .fold(f64::NEG_INFINITY, f64::max);
        stats.push(stat);
    }
    stats.sort_by(f64::total_cmp);
    let rank = (((1.0 - alpha) * n_draws as f64).ceil() as usize).clamp(1, n_draws as usize);
    Ok(stats[rank - 1])
}

/// Projection-box confidence set for the winners setting.
///
/// Membership means `θ(a) >= X(a) - c` for every action (unstudentized) or
/// `θ(a) >= X(a) - σ(a) c` (studentized), intersected with `[0,1]^A`.
/// `nominal_level` records the level of the critical value `c`.
pub fn projection_box(
    data: &WinnersData,
    c: f64,
    studentized: bool,
    nominal_level: f64,
) -> Result<ConfidenceSet> {
    if !c.is_finite() {
        return Err(Error::NonFinite {
            context: "critical value",
            value: c,
        });
    }
    let lower: Vec<f64> = data
        .x
        .iter()
        .zip(data.sigma.iter())
        .map(|(&x, &s)| if studentized { x - s * c } else { x - c })
        .collect();
    ConfidenceSet::new(
        Membership::Box { lower },
        nominal_level,
        if studentized {
            Construction::StudentizedProjection
        } else {
            Construction::Projection
        },
    )
}

/// Uniformly most accurate `1-α` lower confidence bound for a normal mean:
/// `θ̂ = X + σ z_α`.
pub fn uma_lower_bound(x: f64, sigma: f64, alpha: f64) -> Result<f64> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::OutOfRange {
            field: "sigma",
            range: "(0, inf)",
            value: sigma,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    Ok(x + sigma * norm_quantile(alpha))
}

/// The half-line confidence set `[θ̂, inf) ∩ Θ` induced by the UMA bound.
pub fn uma_confidence_set(x: f64, sigma: f64, alpha: f64) -> Result<ConfidenceSet> {
    let lower = uma_lower_bound(x, sigma, alpha)?;
    ConfidenceSet::new(
        Membership::HalfLine { lower },
        1.0 - alpha,
        Construction::UmaLower,
    )
}

/// Inversion set of an existing certificate: `{θ : L(δ̃, θ) <= R̃}`.
///
/// Valid whenever `(δ̃, R̃)` is P-certified at the stated level; may be
/// empty. The returned set carries a materialized view over `grid`.
pub fn invert_certificate(
    delta_tilde: usize,
    r_tilde: f64,
    spec: &Arc<LossSpec>,
    grid: &ParamGrid,
    nominal_level: f64,
) -> Result<ConfidenceSet> {
    if r_tilde < 0.0 || r_tilde.is_nan() {
        return Err(Error::OutOfRange {
            field: "R~",
            range: "[0, inf)",
            value: r_tilde,
        });
    }
    if delta_tilde >= spec.n_actions() {
        return Err(Error::ActionOutOfRange {
            index: delta_tilde,
            n_actions: spec.n_actions(),
        });
    }
    ConfidenceSet::new(
        Membership::SubLevel {
            action: delta_tilde,
            threshold: r_tilde,
            spec: Arc::clone(spec),
        },
        nominal_level,
        Construction::Inversion,
    )?
    .materialized(grid)
}
