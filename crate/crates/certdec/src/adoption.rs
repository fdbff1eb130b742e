//! The decision-maker's adoption calculus.
//!
//! Given a certified decision `(δ, R)` and a default action of known cost
//! `C`, the decision-maker adopts with probability `q(R)`. Rules capped at
//! `u` that never adopt above `C` keep worst-case expected loss within
//! `C + u α (1-C)`; the threshold rule `u 1(r <= C)` is the optimal
//! non-randomized choice, and the saturating adversary is a two-point law
//! on `(L, R)` placing mass `a <= α` at `(1, r^-)` and the rest at
//! `(r^+, r^+)`.
//!
//! Rules live on a uniform grid over `[0,1]` (default 1001 points), the
//! computational stand-in for suprema over a continuum of certificate
//! values.

use rand::Rng;

use crate::error::{Error, Result};
use crate::stream::{derive_rng, DOMAIN_ADVERSARY};

/// Default resolution of the certificate-value grid.
pub const DEFAULT_R_RESOLUTION: usize = 1001;
/// Default resolution of the brute-force search over `q*`.
pub const DEFAULT_QSTAR_RESOLUTION: usize = 1001;

/// Uniform grid on `[0, 1]` for certificate values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RGrid {
    resolution: usize,
}

impl RGrid {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::invalid(format!(
                "r-grid resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(RGrid { resolution })
    }

    pub fn default_grid() -> Self {
        RGrid {
            resolution: DEFAULT_R_RESOLUTION,
        }
    }

    pub fn len(&self) -> usize {
        self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        i as f64 / (self.resolution - 1) as f64
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.resolution).map(|i| self.value(i))
    }

    /// Nearest grid index to `r` (clamped into `[0,1]`).
    pub fn nearest(&self, r: f64) -> usize {
        let r = r.clamp(0.0, 1.0);
        (r * (self.resolution - 1) as f64).round() as usize
    }
}

/// An adoption rule `r -> q(r)` on the grid, capped at `cap_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdoptionRule {
    grid: RGrid,
    q: Vec<f64>,
    cap_u: f64,
}

impl AdoptionRule {
    pub fn new(grid: RGrid, q: Vec<f64>, cap_u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&cap_u) {
            return Err(Error::OutOfRange {
                field: "u",
                range: "[0, 1]",
                value: cap_u,
            });
        }
        if q.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: q.len(),
            });
        }
        for &v in &q {
            if !v.is_finite() || v < 0.0 || v > cap_u + 1e-15 {
                return Err(Error::OutOfRange {
                    field: "q(r)",
                    range: "[0, u]",
                    value: v,
                });
            }
        }
        Ok(AdoptionRule { grid, q, cap_u })
    }

    pub fn grid(&self) -> &RGrid {
        &self.grid
    }

    pub fn cap_u(&self) -> f64 {
        self.cap_u
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    /// Adoption probability at certificate value `r` (nearest grid point).
    pub fn eval(&self, r: f64) -> f64 {
        self.q[self.grid.nearest(r)]
    }

    pub fn sup(&self) -> f64 {
        self.q.iter().copied().fold(0.0, f64::max)
    }
}

/// The threshold rule `q(r) = u 1(r <= C)`, the optimal adoption decision
/// over rules capped at `u` when the prior is optimistic, the model is
/// rich, and the risk budget is `τ = u α (1-C)`.
pub fn threshold_rule(c: f64, u: f64) -> Result<AdoptionRule> {
    threshold_rule_on(RGrid::default_grid(), c, u)
}

/// Threshold rule on an explicit grid.
pub fn threshold_rule_on(grid: RGrid, c: f64, u: f64) -> Result<AdoptionRule> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::OutOfRange {
            field: "C",
            range: "[0, 1)",
            value: c,
        });
    }
    let q: Vec<f64> = grid.values().map(|r| if r <= c { u } else { 0.0 }).collect();
    AdoptionRule::new(grid, q, u)
}

/// Worst-case expected loss of any rule `q(r) <= u 1(r <= C)` against a
/// `1-α` P-certified decision: `C + u α (1-C)`.
pub fn risk_bound(u: f64, alpha: f64, c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            field: "u",
            range: "[0, 1]",
            value: u,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::OutOfRange {
            field: "C",
            range: "[0, 1)",
            value: c,
        });
    }
    Ok(c + u * alpha * (1.0 - c))
}

/// Per-realization contribution to the P-specific bound under the
/// threshold rule: `α + min(R, C)`. Averaging it over realizations bounds
/// the realized risk, and is markedly tighter than [`risk_bound`] when `R`
/// is often far below `C`.
pub fn pathwise_bound(r: f64, c: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::OutOfRange {
            field: "R",
            range: "[0, 1]",
            value: r,
        });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::OutOfRange {
            field: "C",
            range: "[0, 1)",
            value: c,
        });
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "[0, 1)",
            value: alpha,
        });
    }
    Ok(alpha + r.min(c))
}

/// Worst-case excess-risk functional of a rule:
///
/// `sup_{a <= α} { a sup_r q(r)(1-C) + (1-a) sup_{r >= C} q(r)(r-C) }`.
///
/// The inner suprema are exact maxima over the rule's grid; the outer
/// expression is affine in `a`, so the sup over `a <= α` is attained at an
/// endpoint `a ∈ {0, α}` (tested against dense search over `a`).
/// The rule keeps worst-case risk within `C + u α (1-C)` exactly when this
/// value is at most `u α (1-C)`.
pub fn lemma_worst_case(rule: &AdoptionRule, alpha: f64, c: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::OutOfRange {
            field: "C",
            range: "[0, 1)",
            value: c,
        });
    }
    let t_violation = rule.sup() * (1.0 - c);
    let mut t_tail = 0.0f64;
    for (i, r) in rule.grid().values().enumerate() {
        if r >= c {
            t_tail = t_tail.max(rule.values()[i] * (r - c));
        }
    }
    Ok(t_tail.max(alpha * t_violation + (1.0 - alpha) * t_tail))
}

/// The saturating adversary from the richness condition: a joint law over
/// `(L, R)` with mass `a` at `(1, r^-)` and mass `1-a` at `(r^+, r^+)`.
/// Keeps `P{L <= R} >= 1-α` as long as `a <= α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointLaw {
    a: f64,
    r_minus: f64,
    r_plus: f64,
}

impl TwoPointLaw {
    pub fn new(a: f64, alpha: f64, r_minus: f64, r_plus: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                field: "alpha",
                range: "[0, 1)",
                value: alpha,
            });
        }
        if a > alpha {
            return Err(Error::invalid(format!(
                "violation mass a = {a} exceeds alpha = {alpha}; the certificate constraint would break"
            )));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::OutOfRange {
                field: "a",
                range: "[0, alpha]",
                value: a,
            });
        }
        for (name, v) in [("r_minus", r_minus), ("r_plus", r_plus)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    field: if name == "r_minus" { "r_minus" } else { "r_plus" },
                    range: "[0, 1]",
                    value: v,
                });
            }
        }
        Ok(TwoPointLaw { a, r_minus, r_plus })
    }

    /// Probability that the certificate holds, `P{L <= R}`.
    pub fn cert_holds_prob(&self) -> f64 {
        if self.r_minus < 1.0 {
            1.0 - self.a
        } else {
            1.0
        }
    }

    /// Exact expected loss of `δ_Q` under `rule` and this law, with default
    /// cost `c`: `E[q(R) L + (1 - q(R)) C]`.
    pub fn expected_risk(&self, rule: &AdoptionRule, c: f64) -> f64 {
        let q_minus = rule.eval(self.r_minus);
        let q_plus = rule.eval(self.r_plus);
        self.a * (q_minus * 1.0 + (1.0 - q_minus) * c)
            + (1.0 - self.a) * (q_plus * self.r_plus + (1.0 - q_plus) * c)
    }

    /// Draw `n` i.i.d. `(L, R)` pairs.
    pub fn sample(&self, n: u64, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = derive_rng(seed, DOMAIN_ADVERSARY, 0);
        (0..n)
            .map(|_| {
                if rng.random::<f64>() < self.a {
                    (1.0, self.r_minus)
                } else {
                    (self.r_plus, self.r_plus)
                }
            })
            .collect()
    }
}

/// Draws from the adversarial two-point law; `a` must not exceed `alpha`.
pub fn adversarial_two_point(
    a: f64,
    alpha: f64,
    r_minus: f64,
    r_plus: f64,
    n: u64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    Ok(TwoPointLaw::new(a, alpha, r_minus, r_plus)?.sample(n, seed))
}

/// Prior over `(L, R)` summarized by what the Bayes objective needs: the
/// conditional mean loss `E_π[L | R = r]` and the marginal mass of `R`,
/// both on an r-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSummary {
    grid: RGrid,
    cond_mean_loss: Vec<f64>,
    marginal: Vec<f64>,
}

impl PriorSummary {
    pub fn new(grid: RGrid, cond_mean_loss: Vec<f64>, marginal: Vec<f64>) -> Result<Self> {
        if cond_mean_loss.len() != grid.len() || marginal.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: cond_mean_loss.len().max(marginal.len()),
            });
        }
        for &v in &cond_mean_loss {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    field: "E[L|R=r]",
                    range: "[0, 1]",
                    value: v,
                });
            }
        }
        let mut total = 0.0;
        for &m in &marginal {
            if m.is_nan() || m < 0.0 {
                return Err(Error::OutOfRange {
                    field: "marginal mass",
                    range: "[0, inf)",
                    value: m,
                });
            }
            total += m;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "marginal masses must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(PriorSummary {
            grid,
            cond_mean_loss,
            marginal,
        })
    }

    pub fn grid(&self) -> &RGrid {
        &self.grid
    }

    /// True when the prior is optimistic: `E_π[L | R = r] <= r` everywhere
    /// with positive mass.
    pub fn is_optimistic(&self) -> bool {
        self.grid
            .values()
            .enumerate()
            .all(|(i, r)| self.marginal[i] == 0.0 || self.cond_mean_loss[i] <= r + 1e-12)
    }

    /// Bayes objective of a rule, relative to always taking the default:
    /// `Σ_r q(r) (E_π[L|R=r] - C) π_R(r)`. The rule must live on the
    /// prior's grid.
    pub fn bayes_objective(&self, rule: &AdoptionRule, c: f64) -> f64 {
        assert_eq!(
            rule.grid().len(),
            self.grid.len(),
            "adoption rule and prior summary must share the r-grid"
        );
        let mut acc = 0.0;
        for (i, _r) in self.grid.values().enumerate() {
            acc += rule.values()[i] * (self.cond_mean_loss[i] - c) * self.marginal[i];
        }
        acc
    }
}

/// Build the candidate rule `q_{q*}` for a given `q*`:
///
/// `q_{q*}(r) = (u - q*) 1{r <= C} +
///              1{E_π[L|R=r] <= C < r} min{ α(1-C) q* / ((1-α)(r-C)), u - q* }`.
pub fn candidate_rule(prior: &PriorSummary, q_star: f64, u: f64, alpha: f64, c: f64) -> AdoptionRule {
    let grid = prior.grid.clone();
    let q: Vec<f64> = grid
        .values()
        .enumerate()
        .map(|(i, r)| {
            if r <= c {
                u - q_star
            } else if prior.cond_mean_loss[i] <= c {
                let spend = alpha * (1.0 - c) * q_star / ((1.0 - alpha) * (r - c));
                spend.min(u - q_star)
            } else {
                0.0
            }
        })
        .collect();
    AdoptionRule::new(grid, q, u).expect("candidate rule values lie in [0, u] by construction")
}

/// Optimal randomized adoption rule over all rules depending on `R` alone.
///
/// Minimizes the Bayes objective over the one-parameter family `q_{q*}`
/// by brute-force search over `q* ∈ [0, u]` on a dense grid (at least 1000
/// points); the family is rich enough to contain an optimum, and the
/// objective may be non-smooth in `q*`, so no derivative conditions are
/// used. Ties break to the smallest `q*`, so priors that never reward
/// adoption above `C` recover the threshold rule exactly.
pub fn optimal_adoption(prior: &PriorSummary, u: f64, alpha: f64, c: f64) -> Result<AdoptionRule> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::OutOfRange {
            field: "u",
            range: "[0, 1]",
            value: u,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            field: "alpha",
            range: "(0, 1)",
            value: alpha,
        });
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::OutOfRange {
            field: "C",
            range: "[0, 1)",
            value: c,
        });
    }
    let n = DEFAULT_QSTAR_RESOLUTION;
    let mut best_q_star = 0.0;
    let mut best_value = f64::INFINITY;
    for i in 0..n {
        let q_star = u * i as f64 / (n - 1) as f64;
        let rule = candidate_rule(prior, q_star, u, alpha, c);
        let value = prior.bayes_objective(&rule, c);
        if value < best_value {
            best_value = value;
            best_q_star = q_star;
        }
    }
    Ok(candidate_rule(prior, best_q_star, u, alpha, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense grid-search oracle for the lemma functional: sweep `a` over
    /// `[0, α]` instead of trusting the endpoint argument.
    fn lemma_dense_oracle(rule: &AdoptionRule, alpha: f64, c: f64) -> f64 {
        let t1 = rule.sup() * (1.0 - c);
        let mut t2 = 0.0f64;
        for (i, r) in rule.grid().values().enumerate() {
            if r >= c {
                t2 = t2.max(rule.values()[i] * (r - c));
            }
        }
        let mut best = f64::NEG_INFINITY;
        for k in 0..=400 {
            let a = alpha * k as f64 / 400.0;
            best = best.max(a * t1 + (1.0 - a) * t2);
        }
        best
    }

    #[test]
    fn threshold_rule_indicator_values() {
        let rule = threshold_rule(0.5, 1.0).unwrap();
        assert_eq!(rule.eval(0.3), 1.0);
        assert_eq!(rule.eval(0.5), 1.0);
        assert_eq!(rule.eval(0.6), 0.0);

        let zero = threshold_rule(0.5, 0.0).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let boundary = threshold_rule(0.0, 1.0).unwrap();
        assert_eq!(boundary.eval(0.0), 1.0);
        assert_eq!(boundary.eval(0.01), 0.0);
    }

    #[test]
    fn risk_bound_values() {
        assert!((risk_bound(1.0, 0.05, 0.5).unwrap() - 0.525).abs() < 1e-15);
        assert!((risk_bound(0.0, 0.05, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((risk_bound(1.0, 0.05, 0.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(risk_bound(1.0, 0.05, 1.0).is_err());
    }

    #[test]
    fn pathwise_bound_values() {
        assert!((pathwise_bound(0.2, 0.5, 0.05).unwrap() - 0.25).abs() < 1e-15);
        assert!((pathwise_bound(0.9, 0.5, 0.05).unwrap() - 0.55).abs() < 1e-15);
        assert_eq!(pathwise_bound(0.0, 0.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn lemma_worst_case_examples() {
        let threshold = threshold_rule(0.5, 1.0).unwrap();
        let v = lemma_worst_case(&threshold, 0.05, 0.5).unwrap();
        assert!((v - 0.025).abs() < 1e-12, "got {v}");
        assert!((v - lemma_dense_oracle(&threshold, 0.05, 0.5)).abs() < 1e-12);

        let zero = threshold_rule(0.5, 0.0).unwrap();
        assert_eq!(lemma_worst_case(&zero, 0.05, 0.5).unwrap(), 0.0);

        let grid = RGrid::default_grid();
        let ones = AdoptionRule::new(grid.clone(), vec![1.0; grid.len()], 1.0).unwrap();
        let v = lemma_worst_case(&ones, 0.05, 0.5).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "got {v}");
        assert!((v - lemma_dense_oracle(&ones, 0.05, 0.5)).abs() < 1e-12);
    }

    #[test]
    fn two_point_law_certificate_mass() {
        let law = TwoPointLaw::new(0.05, 0.05, 0.0, 0.5).unwrap();
        assert!((law.cert_holds_prob() - 0.95).abs() < 1e-15);

        // no violation mass, all draws are (0.7, 0.7)
        let law = TwoPointLaw::new(0.0, 0.05, 0.0, 0.7).unwrap();
        assert_eq!(law.cert_holds_prob(), 1.0);
        let draws = law.sample(100, 1);
        assert!(draws.iter().all(|&(l, r)| l == 0.7 && r == 0.7));

        assert!(TwoPointLaw::new(0.06, 0.05, 0.0, 0.5).is_err());
    }

    #[test]
    fn two_point_saturates_prop_one_bound() {
        let alpha = 0.05;
        let c = 0.5;
        let rule = threshold_rule(c, 1.0).unwrap();
        let law = TwoPointLaw::new(alpha, alpha, 0.0, c + 0.2).unwrap();
        let exact = law.expected_risk(&rule, c);
        let bound = risk_bound(1.0, alpha, c).unwrap();
        assert!((exact - bound).abs() < 1e-12, "{exact} vs {bound}");

        // Monte Carlo agrees with the closed form
        let draws = law.sample(200_000, 42);
        let mc: f64 = draws
            .iter()
            .map(|&(l, r)| {
                let q = rule.eval(r);
                q * l + (1.0 - q) * c
            })
            .sum::<f64>()
            / draws.len() as f64;
        assert!((mc - exact).abs() < 0.005, "mc = {mc}, exact = {exact}");
    }

    #[test]
    fn feasible_rules_respect_prop_one_under_two_point_laws() {
        let alpha = 0.1;
        let c = 0.3;
        let u = 1.0;
        let rule = threshold_rule(c, u).unwrap();
        assert!(lemma_worst_case(&rule, alpha, c).unwrap() <= u * alpha * (1.0 - c) + 1e-12);
        let bound = risk_bound(u, alpha, c).unwrap();
        for (a, rm, rp) in [(0.1, 0.0, 0.3), (0.05, 0.2, 0.9), (0.0, 1.0, 0.31)] {
            let law = TwoPointLaw::new(a, alpha, rm, rp).unwrap();
            assert!(law.expected_risk(&rule, c) <= bound + 1e-12);
        }
    }

    #[test]
    fn optimal_adoption_collapses_to_threshold_when_prior_never_rewards_tail() {
        // E[L|R=r] = r: optimistic, and strictly above C for every r > C
        let grid = RGrid::new(101).unwrap();
        let cond: Vec<f64> = grid.values().collect();
        let marginal = vec![1.0 / 101.0; 101];
        let prior = PriorSummary::new(grid, cond, marginal).unwrap();
        assert!(prior.is_optimistic());

        let (u, alpha, c) = (1.0, 0.05, 0.5);
        let opt = optimal_adoption(&prior, u, alpha, c).unwrap();
        let threshold = threshold_rule_on(RGrid::new(101).unwrap(), c, u).unwrap();
        let sup_dist = opt
            .values()
            .iter()
            .zip(threshold.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_eq!(sup_dist, 0.0);
    }

    #[test]
    fn optimal_adoption_zero_cap_is_zero_rule() {
        let grid = RGrid::new(101).unwrap();
        let cond = vec![0.0; 101];
        let mut marginal = vec![0.0; 101];
        marginal[70] = 1.0;
        let prior = PriorSummary::new(grid, cond, marginal).unwrap();
        let opt = optimal_adoption(&prior, 0.0, 0.05, 0.5).unwrap();
        assert!(opt.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn optimal_adoption_spends_budget_on_a_rewarding_tail_point() {
        // all mass at r0 = 0.7 > C with E[L|r0] = 0
        let grid = RGrid::new(101).unwrap();
        let cond = vec![0.0; 101];
        let mut marginal = vec![0.0; 101];
        marginal[70] = 1.0;
        let prior = PriorSummary::new(grid.clone(), cond, marginal).unwrap();

        let (u, alpha, c) = (1.0, 0.05, 0.5);
        let opt = optimal_adoption(&prior, u, alpha, c).unwrap();
        let objective = prior.bayes_objective(&opt, c);
        let at_zero = prior.bayes_objective(&candidate_rule(&prior, 0.0, u, alpha, c), c);
        assert!(objective < 0.0);
        assert!(objective <= at_zero);

        // feasibility of the returned rule
        let lhs = lemma_worst_case(&opt, alpha, c).unwrap();
        assert!(lhs <= u * alpha * (1.0 - c) + 1e-9, "lhs = {lhs}");
    }

    #[test]
    fn candidate_rules_are_always_feasible() {
        let grid = RGrid::new(201).unwrap();
        let cond: Vec<f64> = grid.values().map(|r| (r * 0.5).min(1.0)).collect();
        let marginal = vec![1.0 / 201.0; 201];
        let prior = PriorSummary::new(grid, cond, marginal).unwrap();
        let (u, alpha, c) = (0.8, 0.1, 0.4);
        let budget = u * alpha * (1.0 - c);
        for k in 0..=10 {
            let rule = candidate_rule(&prior, u * k as f64 / 10.0, u, alpha, c);
            assert!(lemma_worst_case(&rule, alpha, c).unwrap() <= budget + 1e-9);
        }
    }

    #[test]
    fn prior_summary_validation() {
        let grid = RGrid::new(11).unwrap();
        assert!(PriorSummary::new(grid.clone(), vec![0.5; 11], vec![0.1; 11]).is_err());
        assert!(PriorSummary::new(grid.clone(), vec![1.5; 11], {
            let mut m = vec![0.0; 11];
            m[0] = 1.0;
            m
        })
        .is_err());
        assert!(PriorSummary::new(grid, vec![0.5; 10], {
            let mut m = vec![0.0; 11];
            m[0] = 1.0;
            m
        })
        .is_err());
    }
}
