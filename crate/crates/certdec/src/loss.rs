//! Loss specifications and certified decisions.
//!
//! A [`LossSpec`] is a deterministic, total map `(action, θ) -> loss` over a
//! finite action set, carrying the flags every downstream guarantee depends
//! on: `bounded_unit` (loss in `[0,1]`, required by the P-track) and
//! `positive` (loss strictly positive, required by the E-track). The flags
//! are promises about the scenario; [`LossSpec::validate_flags`] sweeps the
//! full action x grid product to confirm them.
//!
//! A [`CertifiedDecision`] pairs a recommended action with a loss
//! certificate: either a high-probability bound (P-kind, level `1-α`) or an
//! expectation-ratio bound (E-kind, multiple `γ`). Risk bounds are extended
//! reals: `+inf` is a legal value on the E-track.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::grid::{ParamGrid, ParamPoint};

/// Variable treatment cost `ψ(a)`, increasing and continuous.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFn {
    /// `ψ(a) = slope * a + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// Piecewise-linear interpolation through `(a, ψ(a))` knots sorted by `a`.
    Table { knots: Vec<(f64, f64)> },
}

impl CostFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            CostFn::Affine { slope, intercept } => {
                if !slope.is_finite() || !intercept.is_finite() {
                    return Err(Error::invalid("psi: affine coefficients must be finite"));
                }
                if *slope < 0.0 {
                    return Err(Error::invalid("psi must be increasing: slope >= 0 required"));
                }
                Ok(())
            }
            CostFn::Table { knots } => {
                if knots.len() < 2 {
                    return Err(Error::invalid("psi table needs at least two knots"));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::invalid("psi table knots must have increasing a"));
                    }
                    if w[1].1 < w[0].1 {
                        return Err(Error::invalid("psi must be increasing in a"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluate `ψ(a)`. Table form extrapolates flat beyond its knot range.
    pub fn eval(&self, a: f64) -> f64 {
        match self {
            CostFn::Affine { slope, intercept } => slope * a + intercept,
            CostFn::Table { knots } => {
                if a <= knots[0].0 {
                    return knots[0].1;
                }
                if a >= knots[knots.len() - 1].0 {
                    return knots[knots.len() - 1].1;
                }
                let i = knots.partition_point(|k| k.0 <= a);
                let (a0, v0) = knots[i - 1];
                let (a1, v1) = knots[i];
                v0 + (v1 - v0) * (a - a0) / (a1 - a0)
            }
        }
    }
}

/// Explicit loss table bound to its own grid: `values[action][point index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTable {
    grid: ParamGrid,
    values: Vec<Vec<f64>>,
    index: HashMap<Vec<u64>, usize>,
}

impl LossTable {
    pub fn new(grid: ParamGrid, values: Vec<Vec<f64>>) -> Result<Self> {
        for row in &values {
            if row.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        context: "loss table entry",
                        value: v,
                    });
                }
            }
        }
        let index = grid
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| (p.bit_key(), i))
            .collect();
        Ok(LossTable {
            grid,
            values,
            index,
        })
    }

    pub fn grid(&self) -> &ParamGrid {
        &self.grid
    }
}

/// The analytic form of a loss function.
#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    /// `L(a, θ) = 1 - θ(a)`: maximize a bounded outcome, one coordinate of
    /// θ per action (linear-welfare structure).
    Winners,
    /// `L(a, θ) = a (1 - θ) + ψ(a)` for treatment fraction `a` and scalar
    /// outcome θ (monotone-decreasing-in-θ structure). `fractions[i]` is the
    /// numeric level of action `i`.
    Treatment { fractions: Vec<f64>, psi: CostFn },
    /// Arbitrary stored values on a bound grid.
    Table(LossTable),
}

/// Structure tag exposed for fast-path dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossStructure {
    LinearWelfare,
    ScalarMonotone,
    Table,
}

/// A loss function over a finite action set.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    actions: Vec<String>,
    kind: LossKind,
    bounded_unit: bool,
    positive: bool,
}

impl LossSpec {
    /// Winners loss over `n_actions` actions: `L(a, θ) = 1 - θ(a)`.
    /// Bounded in `[0,1]` whenever θ lies in the unit cube.
    pub fn winners(n_actions: usize) -> Result<Self> {
        if n_actions == 0 {
            return Err(Error::invalid("winners loss needs at least one action"));
        }
        Ok(LossSpec {
            actions: (0..n_actions).map(|i| format!("a{}", i + 1)).collect(),
            kind: LossKind::Winners,
            bounded_unit: true,
            positive: false,
        })
    }

    /// Treatment loss on an explicit grid of fractions in `[eps, 1]`.
    pub fn treatment(fractions: Vec<f64>, psi: CostFn) -> Result<Self> {
        psi.validate()?;
        if fractions.is_empty() {
            return Err(Error::invalid("treatment loss needs at least one fraction"));
        }
        for &a in &fractions {
            if !a.is_finite() || a <= 0.0 || a > 1.0 {
                return Err(Error::OutOfRange {
                    field: "treatment fraction",
                    range: "(0, 1]",
                    value: a,
                });
            }
        }
        Ok(LossSpec {
            actions: fractions.iter().map(|a| format!("a={a}")).collect(),
            kind: LossKind::Treatment { fractions, psi },
            bounded_unit: false,
            positive: false,
        })
    }

    /// Table loss with explicit flags.
    pub fn table(
        labels: Vec<String>,
        table: LossTable,
        bounded_unit: bool,
        positive: bool,
    ) -> Result<Self> {
        if labels.len() != table.values.len() {
            return Err(Error::DimensionMismatch {
                expected: table.values.len(),
                got: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::invalid("table loss needs at least one action"));
        }
        let spec = LossSpec {
            actions: labels,
            kind: LossKind::Table(table),
            bounded_unit,
            positive,
        };
        // a bound grid is available here, so confirm the flags up front
        if let LossKind::Table(t) = &spec.kind {
            let grid = t.grid.clone();
            spec.validate_flags(&grid)?;
        }
        Ok(spec)
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    pub fn kind(&self) -> &LossKind {
        &self.kind
    }

    pub fn structure(&self) -> LossStructure {
        match self.kind {
            LossKind::Winners => LossStructure::LinearWelfare,
            LossKind::Treatment { .. } => LossStructure::ScalarMonotone,
            LossKind::Table(_) => LossStructure::Table,
        }
    }

    pub fn bounded_unit(&self) -> bool {
        self.bounded_unit
    }

    pub fn positive(&self) -> bool {
        self.positive
    }

    /// Numeric level of a treatment action.
    pub fn fraction(&self, action: usize) -> Option<f64> {
        match &self.kind {
            LossKind::Treatment { fractions, .. } => fractions.get(action).copied(),
            _ => None,
        }
    }

    /// Override the flags (used when a caller knows tighter bounds hold,
    /// e.g. a treatment loss that stays within `[0,1]`). The next
    /// `validate_flags` sweep still has to confirm them.
    pub fn with_flags(mut self, bounded_unit: bool, positive: bool) -> Self {
        self.bounded_unit = bounded_unit;
        self.positive = positive;
        self
    }

    fn expected_dim(&self) -> usize {
        match &self.kind {
            LossKind::Winners => self.actions.len(),
            LossKind::Treatment { .. } => 1,
            LossKind::Table(t) => t.grid.dim().unwrap_or(0),
        }
    }

    /// Evaluate `L(action, θ)`.
    ///
    /// Deterministic: identical inputs give bit-identical results. Errors on
    /// out-of-range action, dimension mismatch, a point missing from a table
    /// grid, or a NaN result.
    pub fn eval(&self, action: usize, theta: &ParamPoint) -> Result<f64> {
        if action >= self.actions.len() {
            return Err(Error::ActionOutOfRange {
                index: action,
                n_actions: self.actions.len(),
            });
        }
        let expected = self.expected_dim();
        if theta.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: theta.dim(),
            });
        }
        let value = match &self.kind {
            LossKind::Winners => 1.0 - theta.coord(action),
            LossKind::Treatment { fractions, psi } => {
                let a = fractions[action];
                a * (1.0 - theta.coord(0)) + psi.eval(a)
            }
            LossKind::Table(t) => match t.index.get(&theta.bit_key()) {
                Some(&j) => t.values[action][j],
                None => {
                    return Err(Error::PointNotInTable {
                        point: theta.display(),
                        label: t.grid.label().to_string(),
                    })
                }
            },
        };
        if value.is_nan() {
            return Err(Error::NanLoss {
                action,
                point: theta.display(),
            });
        }
        Ok(value)
    }

    /// Sweep the full action x grid product and confirm the
    /// `bounded_unit` / `positive` flags.
    pub fn validate_flags(&self, grid: &ParamGrid) -> Result<()> {
        for a in 0..self.actions.len() {
            for p in grid.points() {
                let v = self.eval(a, p)?;
                if self.bounded_unit && !(0.0..=1.0).contains(&v) {
                    return Err(Error::FlagViolation {
                        flag: "bounded_unit",
                        action: a,
                        point: p.display(),
                        value: v,
                    });
                }
                if self.positive && v <= 0.0 {
                    return Err(Error::FlagViolation {
                        flag: "positive",
                        action: a,
                        point: p.display(),
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }
}

/// What a certificate promises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertificateKind {
    /// `P{ L(δ(Y), θ) <= R(Y) } >= level` for every model.
    P { level: f64 },
    /// `E[ L(δ(Y), θ) / R(Y) ] <= multiple` for every model.
    E { multiple: f64 },
}

/// Either one of the analyst's actions or the decision-maker's default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionChoice {
    Recommended(usize),
    Default,
}

impl ActionChoice {
    pub fn index(&self) -> Option<usize> {
        match self {
            ActionChoice::Recommended(i) => Some(*i),
            ActionChoice::Default => None,
        }
    }
}

/// A recommended action paired with a loss certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedDecision {
    pub action: ActionChoice,
    /// Extended real `>= 0`; `+inf` is legal on the E-track.
    pub risk_bound: f64,
    pub kind: CertificateKind,
    /// Slack of the approximate argmin. Finite action sets attain the
    /// minimum exactly, so every constructor here records 0; the field
    /// exists for action spaces where the infimum is only approached.
    pub argmin_slack: f64,
    /// Set when the decision came from an empty confidence set, so the
    /// sup-over-empty-set convention (`R = 0`) can be detected downstream.
    pub vacuous: bool,
}

impl CertifiedDecision {
    pub fn new(action: usize, risk_bound: f64, kind: CertificateKind) -> Self {
        debug_assert!(risk_bound >= 0.0);
        CertifiedDecision {
            action: ActionChoice::Recommended(action),
            risk_bound,
            kind,
            argmin_slack: 0.0,
            vacuous: false,
        }
    }

    pub fn vacuous(action: usize, kind: CertificateKind) -> Self {
        CertifiedDecision {
            action: ActionChoice::Recommended(action),
            risk_bound: 0.0,
            kind,
            argmin_slack: 0.0,
            vacuous: true,
        }
    }

    pub fn action_index(&self) -> usize {
        self.action
            .index()
            .expect("certified decisions recommend a concrete action")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> ParamPoint {
        ParamPoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn winners_loss_is_one_minus_selected_coordinate() {
        let spec = LossSpec::winners(2).unwrap();
        // θ(a) = 0.7 under the selected action gives loss 0.3
        let v = spec.eval(0, &pt(&[0.7, 0.2])).unwrap();
        assert_eq!(v, 1.0 - 0.7);
        assert_eq!(spec.structure(), LossStructure::LinearWelfare);
    }

    #[test]
    fn treatment_loss_kills_first_term_at_theta_one() {
        let psi = CostFn::Affine {
            slope: 0.1,
            intercept: 0.0,
        };
        let spec = LossSpec::treatment(vec![0.25, 0.5, 1.0], psi).unwrap();
        // a = 0.5, θ = 1: a(1-θ) vanishes, ψ(0.5) = 0.05 remains
        let v = spec.eval(1, &pt(&[1.0])).unwrap();
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn table_loss_returns_stored_value() {
        let grid = ParamGrid::new("g", vec![pt(&[0.1]), pt(&[0.9])]).unwrap();
        let table = LossTable::new(grid, vec![vec![0.3, 0.6], vec![0.42, 0.5]]).unwrap();
        let spec = LossSpec::table(
            vec!["a1".into(), "a2".into()],
            table,
            true,
            true,
        )
        .unwrap();
        assert_eq!(spec.eval(1, &pt(&[0.1])).unwrap(), 0.42);
        // off-grid point is a structured error, not a panic
        assert!(matches!(
            spec.eval(0, &pt(&[0.2])),
            Err(Error::PointNotInTable { .. })
        ));
    }

    #[test]
    fn dimension_and_range_errors() {
        let spec = LossSpec::winners(2).unwrap();
        assert!(matches!(
            spec.eval(0, &pt(&[0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            spec.eval(5, &pt(&[0.5, 0.5])),
            Err(Error::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn eval_is_deterministic() {
        let spec = LossSpec::treatment(
            vec![0.3, 0.7],
            CostFn::Table {
                knots: vec![(0.0, 0.0), (0.5, 0.02), (1.0, 0.1)],
            },
        )
        .unwrap();
        let p = pt(&[0.361]);
        let first = spec.eval(1, &p).unwrap();
        for _ in 0..100 {
            assert_eq!(spec.eval(1, &p).unwrap().to_bits(), first.to_bits());
        }
    }

    #[test]
    fn flag_sweep_rejects_out_of_unit_losses() {
        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        let spec = LossSpec::treatment(vec![1.0], psi)
            .unwrap()
            .with_flags(true, false);
        let grid = ParamGrid::linspace("theta", 0.0, 1.0, 3).unwrap();
        // L(1, 0) = 1.05 > 1 violates bounded_unit
        assert!(matches!(
            spec.validate_flags(&grid),
            Err(Error::FlagViolation { .. })
        ));
    }

    #[test]
    fn table_flag_check_runs_at_construction() {
        let grid = ParamGrid::new("g", vec![pt(&[0.0])]).unwrap();
        let table = LossTable::new(grid, vec![vec![0.0]]).unwrap();
        // positive flag contradicts the stored zero loss
        assert!(LossSpec::table(vec!["a1".into()], table, true, true).is_err());
    }

    #[test]
    fn piecewise_psi_interpolates() {
        let psi = CostFn::Table {
            knots: vec![(0.0, 0.0), (1.0, 0.1)],
        };
        assert!((psi.eval(0.5) - 0.05).abs() < 1e-15);
        assert_eq!(psi.eval(-1.0), 0.0);
        assert_eq!(psi.eval(2.0), 0.1);
    }
}
