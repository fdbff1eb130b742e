//! Property-based invariants.
//!
//! Structural guarantees that must hold for arbitrary inputs, not just
//! the shipped scenarios: monotonicity of the minimax bound in the
//! confidence set, agreement between materialized views and predicates,
//! exact feasibility arithmetic for adoption rules, dominance of
//! inversion re-decisions, and lossless config round-trips.

use std::sync::Arc;

use certdec::adoption::{lemma_worst_case, AdoptionRule, RGrid, TwoPointLaw};
use certdec::asif::asif_decide;
use certdec::config::{dump_config, parse_config};
use certdec::confset::{projection_box, ConfidenceSet, Construction, Membership, WinnersData};
use certdec::ecert::{eposterior_decide, invert_e_certificate, EVariableField};
use certdec::loss::{LossSpec, LossTable};
use certdec::normal::{norm_cdf, norm_quantile};
use certdec::sim::{Challenger, Scenario, ScenarioKind};
use certdec::{ParamGrid, ParamPoint};
use proptest::prelude::*;

fn scalar_grid(values: &[f64]) -> ParamGrid {
    ParamGrid::new(
        "g",
        values
            .iter()
            .map(|&v| ParamPoint::scalar(v).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Distinct sorted state values in [0, 1].
fn states(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::btree_set(0u32..=1000, n..=n)
        .prop_map(|s| s.into_iter().map(|v| v as f64 / 1000.0).collect::<Vec<f64>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Enlarging the confidence set never shrinks the as-if bound.
    #[test]
    fn asif_bound_monotone_in_set(
        values in states(6),
        losses in proptest::collection::vec(0.01f64..=1.0, 12),
        r_small in 0.0f64..=1.0,
        extra in 0.0f64..=1.0,
    ) {
        let grid = scalar_grid(&values);
        let table = LossTable::new(
            grid.clone(),
            vec![losses[..6].to_vec(), losses[6..].to_vec()],
        ).unwrap();
        let spec = Arc::new(
            LossSpec::table(vec!["a1".into(), "a2".into()], table, true, true).unwrap(),
        );
        let r_big = (r_small + extra).min(1.0);
        let small = certdec::invert_certificate(0, r_small, &spec, &grid, 0.95).unwrap();
        let big = certdec::invert_certificate(0, r_big, &spec, &grid, 0.95).unwrap();
        let d_small = asif_decide(&small, &spec, &grid).unwrap();
        let d_big = asif_decide(&big, &spec, &grid).unwrap();
        prop_assert!(d_big.risk_bound >= d_small.risk_bound);
    }

    /// A materialized grid view is exactly the predicate filter.
    #[test]
    fn grid_view_matches_predicate(
        x in proptest::collection::vec(0.0f64..=1.0, 2),
        sigma in proptest::collection::vec(0.01f64..=0.5, 2),
        c in 0.0f64..=2.0,
        studentized in any::<bool>(),
    ) {
        let data = WinnersData::new(x, sigma).unwrap();
        let grid = ParamGrid::unit_cube("g", 2, 7).unwrap();
        let set = projection_box(&data, c, studentized, 0.95)
            .unwrap()
            .materialized(&grid)
            .unwrap();
        let filtered: Vec<ParamPoint> = grid
            .points()
            .iter()
            .filter(|p| set.contains(p).unwrap())
            .cloned()
            .collect();
        prop_assert_eq!(set.grid_view().unwrap(), filtered.as_slice());
    }

    /// Bounded-unit losses produce bounds inside [0, 1], and the empty
    /// set produces the vacuous decision.
    #[test]
    fn asif_bounds_respect_unit_interval(
        values in states(5),
        losses in proptest::collection::vec(0.0f64..=1.0, 10),
        threshold in -0.5f64..=1.5,
    ) {
        let grid = scalar_grid(&values);
        let table = LossTable::new(
            grid.clone(),
            vec![losses[..5].to_vec(), losses[5..].to_vec()],
        ).unwrap();
        let spec = Arc::new(
            LossSpec::table(vec!["a1".into(), "a2".into()], table, true, false).unwrap(),
        );
        let cset = certdec::invert_certificate(0, threshold.max(0.0), &spec, &grid, 0.95).unwrap();
        let d = asif_decide(&cset, &spec, &grid).unwrap();
        prop_assert!((0.0..=1.0).contains(&d.risk_bound));
        if cset.grid_view().unwrap().is_empty() {
            prop_assert!(d.vacuous);
            prop_assert_eq!(d.risk_bound, 0.0);
        }
    }

    /// Any rule passing the worst-case functional keeps its exact
    /// expected risk under every two-point adversary within the bound.
    #[test]
    fn feasible_rules_survive_all_two_point_laws(
        raw in proptest::collection::vec(0.0f64..=1.0, 101),
        alpha in 0.01f64..=0.3,
        c in 0.0f64..=0.9,
        u in 0.05f64..=1.0,
        a_frac in 0.0f64..=1.0,
        r_minus in 0.0f64..=1.0,
        r_plus_frac in 0.0f64..=1.0,
    ) {
        let grid = RGrid::new(101).unwrap();
        let scaled: Vec<f64> = raw.iter().map(|&q| q * u).collect();
        let rule = AdoptionRule::new(grid, scaled, u).unwrap();
        let budget = u * alpha * (1.0 - c);
        let worst = lemma_worst_case(&rule, alpha, c).unwrap();

        // scale the rule into feasibility when it overshoots
        let rule = if worst > budget {
            let shrink = budget / worst;
            AdoptionRule::new(
                RGrid::new(101).unwrap(),
                rule.values().iter().map(|&q| q * shrink).collect(),
                u,
            ).unwrap()
        } else {
            rule
        };
        prop_assert!(lemma_worst_case(&rule, alpha, c).unwrap() <= budget + 1e-12);

        let a = a_frac * alpha;
        let r_plus = c + r_plus_frac * (1.0 - c);
        let law = TwoPointLaw::new(a, alpha, r_minus, r_plus).unwrap();
        let risk = law.expected_risk(&rule, c);
        prop_assert!(
            risk <= c + budget + 1e-9,
            "risk {} above bound {}",
            risk,
            c + budget
        );
    }

    /// Non-randomized rules that sometimes adopt are feasible exactly
    /// when they never adopt above C.
    #[test]
    fn binary_rules_feasible_iff_threshold_shaped(
        mask in proptest::collection::vec(any::<bool>(), 101),
        alpha in 0.01f64..=0.3,
        c in 0.0f64..=0.9,
    ) {
        let grid = RGrid::new(101).unwrap();
        let mut q: Vec<f64> = mask.iter().map(|&b| f64::from(b)).collect();
        q[0] = 1.0; // sup q = 1: the rule sometimes adopts
        let rule = AdoptionRule::new(grid.clone(), q.clone(), 1.0).unwrap();
        let feasible = lemma_worst_case(&rule, alpha, c).unwrap() <= alpha * (1.0 - c) + 1e-12;
        let threshold_shaped = grid
            .values()
            .enumerate()
            .all(|(i, r)| q[i] == 0.0 || r <= c);
        prop_assert_eq!(feasible, threshold_shaped);
    }

    /// Re-deciding through an inverted E-certificate never worsens the
    /// bound (up to one float division round-trip).
    #[test]
    fn e_inversion_never_worsens(
        values in states(4),
        losses in proptest::collection::vec(0.05f64..=5.0, 8),
        e_values in proptest::collection::vec(0.01f64..=20.0, 4),
    ) {
        let grid = scalar_grid(&values);
        let table = LossTable::new(
            grid.clone(),
            vec![losses[..4].to_vec(), losses[4..].to_vec()],
        ).unwrap();
        let spec = LossSpec::table(
            vec!["a1".into(), "a2".into()],
            table,
            false,
            true,
        ).unwrap();
        let field = EVariableField::new("f", e_values).unwrap();
        let d = eposterior_decide(&field, &spec, &grid).unwrap();
        prop_assert!(d.risk_bound > 0.0);
        let inverted = invert_e_certificate(d.action_index(), d.risk_bound, &spec, &grid).unwrap();
        let re = eposterior_decide(&inverted, &spec, &grid).unwrap();
        prop_assert!(
            re.risk_bound <= d.risk_bound * (1.0 + 1e-12),
            "re-decision {} above source {}",
            re.risk_bound,
            d.risk_bound
        );
    }

    /// Quantile and CDF invert each other.
    #[test]
    fn quantile_round_trip(p in 1e-4f64..=0.9999) {
        let err = (norm_cdf(norm_quantile(p)) - p).abs();
        prop_assert!(err < 1e-11, "round-trip error {} at p = {}", err, p);
    }

    /// Dumped configs re-parse to the identical scenario.
    #[test]
    fn config_dump_round_trips(
        kind in 0usize..3,
        theta in proptest::collection::vec(0.05f64..=0.95, 3),
        sigma in proptest::collection::vec(0.01f64..=0.4, 3),
        alpha in 0.01f64..=0.2,
        c in 0.05f64..=0.9,
        u in 0.0f64..=1.0,
        gamma in 0.1f64..=2.0,
        seed in any::<u64>(),
        n_reps in 1u64..=1_000_000,
        challenger in 0usize..4,
    ) {
        let scenario = match kind {
            0 => {
                let mut s = Scenario::winners(theta.clone(), sigma.clone(), alpha, c, n_reps, seed);
                s.u = u;
                s.challenger = Some(match challenger {
                    0 => Challenger::Trivial,
                    1 => Challenger::StudentizedProjection,
                    2 => Challenger::SelfComparison,
                    _ => Challenger::Constant(c),
                });
                s
            }
            1 => {
                let psi = certdec::loss::CostFn::Affine { slope: 0.05, intercept: 0.0 };
                // rho and kappa chosen so the derived cost stays positive
                Scenario::treatment(theta[0], sigma[0], psi, 0.5, 0.05, alpha, n_reps, seed)
            }
            _ => {
                let mut s = Scenario::etrack(
                    theta[0],
                    theta[0] + 0.01,
                    sigma[0],
                    c,
                    Some(gamma),
                    n_reps,
                    seed,
                );
                s.alpha = alpha;
                s
            }
        };
        prop_assert!(scenario.validate().is_ok());
        let dumped = dump_config(&scenario);
        let reparsed = parse_config(&dumped, &[]).unwrap();
        prop_assert_eq!(scenario, reparsed);
    }

    /// Certificate validity of the trivial pair is alpha-exact in law:
    /// its two-point representation always satisfies the constraint.
    #[test]
    fn trivial_two_point_respects_certificate(alpha in 0.01f64..=0.5, a_frac in 0.0f64..=1.0) {
        let law = TwoPointLaw::new(a_frac * alpha, alpha, 0.0, 1.0).unwrap();
        prop_assert!(law.cert_holds_prob() >= 1.0 - alpha - 1e-12);
    }
}

#[test]
fn worker_count_does_not_change_reports() {
    let mut s = Scenario::winners(vec![0.6, 0.6, 0.55], vec![0.1, 0.2, 0.05], 0.05, 0.5, 9_000, 5);
    s.n_draws_critval = 20_000;
    s.grid_resolution = 9;
    let runs: Vec<String> = [1usize, 2, 5]
        .iter()
        .map(|&threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    let mut out = String::new();
                    let w = certdec::sim::run_winners(&s).unwrap();
                    out.push_str(&certdec::report::report_csv(&w));
                    let a = certdec::sim::run_dominance_audit(&s, Challenger::Trivial).unwrap();
                    out.push_str(&certdec::report::report_csv(&a));
                    let mut e = Scenario::etrack(0.7, 0.4, 0.3, 0.4, Some(1.0), 9_000, 5);
                    e.kind = ScenarioKind::ETrack;
                    out.push_str(&certdec::report::report_csv(
                        &certdec::sim::run_etrack(&e).unwrap(),
                    ));
                    out
                })
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn empty_confidence_set_is_a_legal_value() {
    let spec = Arc::new(LossSpec::winners(2).unwrap());
    let grid = ParamGrid::new(
        "interior",
        vec![
            ParamPoint::new(vec![0.4, 0.4]).unwrap(),
            ParamPoint::new(vec![0.6, 0.2]).unwrap(),
        ],
    )
    .unwrap();
    // no interior point reaches zero loss, so a zero bound empties the set
    let set = certdec::invert_certificate(0, 0.0, &spec, &grid, 0.95).unwrap();
    assert!(set.grid_view().unwrap().is_empty());
    let d = asif_decide(&set, &spec, &grid).unwrap();
    assert!(d.vacuous);
    assert_eq!(d.risk_bound, 0.0);
    assert_eq!(d.action_index(), 0);
}

#[test]
fn shipped_loss_flags_survive_full_sweeps() {
    // winners: bounded_unit over the whole unit cube
    let spec = LossSpec::winners(3).unwrap();
    let grid = ParamGrid::unit_cube("g", 3, 11).unwrap();
    spec.validate_flags(&grid).unwrap();

    // treatment: flags are off (the loss can exceed 1), and claiming
    // bounded_unit is caught by the sweep
    let psi = certdec::loss::CostFn::Affine {
        slope: 0.05,
        intercept: 0.0,
    };
    let fractions: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let spec = LossSpec::treatment(fractions, psi).unwrap();
    let grid = ParamGrid::linspace("theta", 0.0, 1.0, 101).unwrap();
    spec.validate_flags(&grid).unwrap();
    assert!(spec
        .clone()
        .with_flags(true, false)
        .validate_flags(&grid)
        .is_err());

    // etrack: the default table is strictly positive and unit-bounded
    let values: Vec<Vec<f64>> = certdec::sim::etrack::DEFAULT_LOSS_TABLE
        .iter()
        .map(|r| r.to_vec())
        .collect();
    let grid = scalar_grid(&[0.4, 0.7]);
    let table = LossTable::new(grid.clone(), values).unwrap();
    let spec = LossSpec::table(vec!["a1".into(), "a2".into()], table, true, true).unwrap();
    spec.validate_flags(&grid).unwrap();
}

#[test]
fn report_rates_stay_in_unit_interval() {
    let mut s = Scenario::winners(vec![0.6, 0.55], vec![0.1, 0.05], 0.05, 0.5, 3_000, 77);
    s.n_draws_critval = 10_000;
    let report = certdec::sim::run_winners(&s).unwrap();
    for m in &report.metrics {
        if m.name.starts_with("coverage")
            || m.name.starts_with("cert_valid")
            || m.name.starts_with("adoption")
        {
            assert!((0.0..=1.0).contains(&m.value), "{} = {}", m.name, m.value);
            let expected_se = (m.value * (1.0 - m.value) / s.n_reps as f64).sqrt();
            assert!(
                (m.mc_se - expected_se).abs() < 1e-12,
                "{}: se {} vs binomial {}",
                m.name,
                m.mc_se,
                expected_se
            );
        }
    }
}

#[test]
fn degenerate_sigma_is_rejected_everywhere() {
    assert!(WinnersData::new(vec![0.5], vec![0.0]).is_err());
    let mut s = Scenario::winners(vec![0.6], vec![0.0], 0.05, 0.5, 10, 1);
    assert!(s.validate().is_err());
    s.sigma = vec![-0.1];
    assert!(s.validate().is_err());
}

#[test]
fn half_line_sets_and_sublevel_sets_agree_on_monotone_losses() {
    // for the winners loss restricted to one action, the inversion set
    // {θ : 1 - θ(a) <= r} is the box {θ(a) >= 1 - r}; dyadic grid and
    // thresholds keep both sides of the algebra exact in floats
    let spec = Arc::new(LossSpec::winners(1).unwrap());
    let grid = ParamGrid::unit_cube("g", 1, 129).unwrap();
    for r in [0.0, 0.25, 0.5, 0.8125, 1.0] {
        let inv = certdec::invert_certificate(0, r, &spec, &grid, 0.9).unwrap();
        let half = ConfidenceSet::new(
            Membership::Box {
                lower: vec![1.0 - r],
            },
            0.9,
            Construction::Projection,
        )
        .unwrap();
        for p in grid.points() {
            assert_eq!(inv.contains(p).unwrap(), half.contains(p).unwrap());
        }
    }
}
