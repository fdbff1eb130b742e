//! E-variables, E-posterior decisions, and their adoption bounds.
//!
//! An e-variable against θ is a nonnegative statistic with expectation at
//! most 1 under θ. Weighting each state's loss by the reciprocal e-value
//! and minimaxing gives an E-certified decision: `E[L(δ(Y), θ)/R(Y)] <= 1`.
//! The arithmetic is extended-real with `1/0 = inf` and `x/inf = 0`; no NaN
//! can escape because the E-track requires strictly positive losses.
//!
//! Truncating the e-variable as `E_γ = γ E + 1` floors the weights at 1,
//! keeps every ratio finite, and caps post-adoption risk at `(1+γ) C` in
//! exchange for certifying at multiple `1+γ`.

use crate::error::{Error, Result};
use crate::grid::ParamGrid;
use crate::loss::{CertificateKind, CertifiedDecision, LossSpec};

/// Realized e-values `E(Y, θ)` for one observed `Y`, aligned with a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EVariableField {
    values: Vec<f64>,
    label: String,
}

impl EVariableField {
    /// Values must be nonnegative; `+inf` is allowed. The defining property
    /// `E_P[E(Y, θ)] <= 1` is distributional and is checked empirically by
    /// the simulation harness, not per realization.
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NonFinite {
                    context: "e-variable value",
                    value: v,
                });
            }
        }
        Ok(EVariableField {
            values: values.clone(),
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The truncated field `E_γ = γ E + 1 >= 1`.
    pub fn truncated(&self, gamma: f64) -> EVariableField {
        EVariableField {
            values: self
                .values
                .iter()
                .map(|&e| if e.is_infinite() { e } else { gamma * e + 1.0 })
                .collect(),
            label: format!("{}_trunc", self.label),
        }
    }
}

/// Extended-real ratio `l / e` with the conventions `positive/0 = inf`
/// and `x/inf = 0`. Requires `l > 0`, which the E-track guarantees.
#[inline]
pub fn loss_over_e(l: f64, e: f64) -> f64 {
    debug_assert!(l > 0.0 && !l.is_nan() && e >= 0.0 && !e.is_nan());
    if e == 0.0 {
        f64::INFINITY
    } else if e.is_infinite() {
        0.0
    } else {
        l / e
    }
}

fn decide(
    field: &EVariableField,
    spec: &LossSpec,
    grid: &ParamGrid,
    kind: CertificateKind,
) -> Result<CertifiedDecision> {
    if !spec.positive() {
        return Err(Error::invalid(
            "E-posterior decisions require a strictly positive loss (spec.positive)",
        ));
    }
    if field.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: field.len(),
        });
    }
    if grid.is_empty() {
        return Err(Error::invalid("E-posterior decisions need a non-empty grid"));
    }
    let mut best_action = 0usize;
    let mut best_risk = f64::INFINITY;
    for a in 0..spec.n_actions() {
        let mut worst = 0.0f64;
        for (j, p) in grid.points().iter().enumerate() {
            let ratio = loss_over_e(spec.eval(a, p)?, field.values[j]);
            if ratio > worst {
                worst = ratio;
            }
        }
        if worst < best_risk {
            best_risk = worst;
            best_action = a;
        }
    }
    Ok(CertifiedDecision::new(best_action, best_risk, kind))
}

/// E-posterior decision: minimize `max_θ L(a, θ)/E(Y, θ)` over actions.
///
/// The pair `(a*, R)` it returns is E-certified at multiple 1 whenever the
/// field is a genuine e-variable collection. Infinite `R` is a legal value
/// (some state has `E = 0` under every action's positive loss); ties break
/// to the lowest action index.
pub fn eposterior_decide(
    field: &EVariableField,
    spec: &LossSpec,
    grid: &ParamGrid,
) -> Result<CertifiedDecision> {
    decide(field, spec, grid, CertificateKind::E { multiple: 1.0 })
}

/// Invert an E-certified pair into the e-variable field `L(δ̃, θ) / R̃`.
///
/// Feeding the result back through [`eposterior_decide`] yields a decision
/// whose bound never exceeds `R̃`. `R̃` must be positive and finite: an
/// E-certified bound is almost surely positive, and an infinite bound has
/// nothing to invert.
pub fn invert_e_certificate(
    delta_tilde: usize,
    r_tilde: f64,
    spec: &LossSpec,
    grid: &ParamGrid,
) -> Result<EVariableField> {
    if delta_tilde >= spec.n_actions() {
        return Err(Error::ActionOutOfRange {
            index: delta_tilde,
            n_actions: spec.n_actions(),
        });
    }
    if !r_tilde.is_finite() || r_tilde <= 0.0 {
        return Err(Error::OutOfRange {
            field: "R~",
            range: "(0, inf)",
            value: r_tilde,
        });
    }
    let values = grid
        .points()
        .iter()
        .map(|p| spec.eval(delta_tilde, p).map(|l| l / r_tilde))
        .collect::<Result<Vec<f64>>>()?;
    EVariableField::new("inverted", values)
}

/// E-posterior decision with the truncated field `E_γ = γ E + 1`.
///
/// Every weight is at least 1, so the bound is finite; the certificate is
/// E-kind at multiple `1 + γ`.
pub fn truncated_eposterior_decide(
    field: &EVariableField,
    gamma: f64,
    spec: &LossSpec,
    grid: &ParamGrid,
) -> Result<CertifiedDecision> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::OutOfRange {
            field: "gamma",
            range: "(0, inf)",
            value: gamma,
        });
    }
    decide(
        &field.truncated(gamma),
        spec,
        grid,
        CertificateKind::E {
            multiple: 1.0 + gamma,
        },
    )
}

/// Post-adoption worst-case expected loss factor for rules that never
/// adopt above `C`: `(1+γ) C`. With untruncated multiple-1 certificates
/// (`γ = 1` multiple 2 bound) this is the familiar `2C`.
pub fn e_adoption_risk_factor(gamma: f64, c: f64) -> Result<f64> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::OutOfRange {
            field: "gamma",
            range: "[0, inf)",
            value: gamma,
        });
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::OutOfRange {
            field: "C",
            range: "(0, inf)",
            value: c,
        });
    }
    Ok((1.0 + gamma) * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ParamPoint;
    use crate::loss::LossTable;

    fn pt(v: f64) -> ParamPoint {
        ParamPoint::new(vec![v]).unwrap()
    }

    /// The two-state example used throughout: losses
    /// a1: (0.8, 0.4), a2: (0.5, 0.7).
    fn two_state() -> (LossSpec, ParamGrid) {
        let grid = ParamGrid::new("pair", vec![pt(0.2), pt(0.6)]).unwrap();
        let table = LossTable::new(grid.clone(), vec![vec![0.8, 0.4], vec![0.5, 0.7]]).unwrap();
        let spec =
            LossSpec::table(vec!["a1".into(), "a2".into()], table, true, true).unwrap();
        (spec, grid)
    }

    #[test]
    fn unit_field_reduces_to_global_minimax() {
        let (spec, grid) = two_state();
        let field = EVariableField::new("unit", vec![1.0, 1.0]).unwrap();
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        // plain minimax: worst(a1) = 0.8, worst(a2) = 0.7
        assert_eq!(d.action_index(), 1);
        assert!((d.risk_bound - 0.7).abs() < 1e-15);
    }

    #[test]
    fn weighted_field_example() {
        let (spec, grid) = two_state();
        let field = EVariableField::new("lr", vec![2.0, 0.5]).unwrap();
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        // a1: max(0.4, 0.8) = 0.8; a2: max(0.25, 1.4) = 1.4
        assert_eq!(d.action_index(), 0);
        assert!((d.risk_bound - 0.8).abs() < 1e-15);
        assert!(matches!(d.kind, CertificateKind::E { multiple } if multiple == 1.0));
    }

    #[test]
    fn zero_e_value_gives_infinite_bound() {
        let (spec, grid) = two_state();
        let field = EVariableField::new("zero", vec![0.0, 1.0]).unwrap();
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        assert!(d.risk_bound.is_infinite());
    }

    #[test]
    fn inversion_of_constant_loss_gives_unit_field() {
        let grid = ParamGrid::new("pair", vec![pt(0.2), pt(0.6)]).unwrap();
        let table = LossTable::new(grid.clone(), vec![vec![0.3, 0.3]]).unwrap();
        let spec = LossSpec::table(vec!["a1".into()], table, true, true).unwrap();
        let field = invert_e_certificate(0, 0.3, &spec, &grid).unwrap();
        assert!(field.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        assert!(d.risk_bound <= 0.3 + 1e-15);
    }

    #[test]
    fn inversion_dominates_the_source_pair() {
        let (spec, grid) = two_state();
        // challenger (a2, 1.4) from the weighted example
        let field = invert_e_certificate(1, 1.4, &spec, &grid).unwrap();
        let expect = [0.5 / 1.4, 0.7 / 1.4];
        for (v, e) in field.values().iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        assert!(d.risk_bound <= 1.4 + 1e-12);
    }

    #[test]
    fn inversion_rejects_degenerate_bounds() {
        let (spec, grid) = two_state();
        assert!(invert_e_certificate(0, 0.0, &spec, &grid).is_err());
        assert!(invert_e_certificate(0, f64::INFINITY, &spec, &grid).is_err());
    }

    #[test]
    fn truncation_floors_weights_and_keeps_bounds_finite() {
        let (spec, grid) = two_state();
        // a zero e-value still yields a finite truncated bound
        let field = EVariableField::new("zero", vec![0.0, 1.0]).unwrap();
        let d = truncated_eposterior_decide(&field, 1.0, &spec, &grid).unwrap();
        assert!(d.risk_bound.is_finite());

        // γ -> 0 approaches plain minimax
        let field = EVariableField::new("lr", vec![2.0, 0.5]).unwrap();
        let d = truncated_eposterior_decide(&field, 1e-9, &spec, &grid).unwrap();
        assert!((d.risk_bound - 0.7).abs() < 1e-6);
    }

    #[test]
    fn truncated_two_state_example() {
        let (spec, grid) = two_state();
        let field = EVariableField::new("lr", vec![2.0, 0.5]).unwrap();
        let d = truncated_eposterior_decide(&field, 1.0, &spec, &grid).unwrap();
        // E_γ = (3, 1.5): a1 worst = 0.4/1.5 = 0.8/3 = 0.2667, a2 worst = 0.4667
        assert_eq!(d.action_index(), 0);
        assert!((d.risk_bound - 0.8 / 3.0).abs() < 1e-12);
        assert!(matches!(d.kind, CertificateKind::E { multiple } if (multiple - 2.0).abs() < 1e-15));
    }

    #[test]
    fn adoption_factor_values() {
        assert!((e_adoption_risk_factor(1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((e_adoption_risk_factor(0.2, 1.0).unwrap() - 1.2).abs() < 1e-15);
        assert!((e_adoption_risk_factor(0.0, 0.7).unwrap() - 0.7).abs() < 1e-15);
        assert!(e_adoption_risk_factor(1.0, 0.0).is_err());
    }

    #[test]
    fn ratio_conventions_never_produce_nan() {
        for l in [1e-9, 0.5, 1.0, 100.0] {
            for e in [0.0, 1e-12, 1.0, 1e12, f64::INFINITY] {
                assert!(!loss_over_e(l, e).is_nan());
            }
        }
    }

    #[test]
    fn field_rejects_negative_and_nan_values() {
        assert!(EVariableField::new("bad", vec![-0.1]).is_err());
        assert!(EVariableField::new("bad", vec![f64::NAN]).is_err());
        assert!(EVariableField::new("ok", vec![f64::INFINITY]).is_ok());
    }
}
