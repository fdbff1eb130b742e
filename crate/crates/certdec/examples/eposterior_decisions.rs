//! E-certified decisions from e-variables.
//!
//! When losses are positive but unbounded, high-probability certificates
//! give way to expectation-ratio ones: `E[L(δ(Y), θ)/R(Y)] <= 1`. The
//! recipe mirrors as-if optimization: weight each state's loss by the
//! reciprocal of its e-value, then minimax. Truncating the e-variable as
//! `E_γ = γE + 1` keeps every weight at least 1, certifies at multiple
//! `1+γ`, and caps post-adoption risk at `(1+γ)C` instead of `2C`.
//!
//! Run with `cargo run --example eposterior_decisions`.

use std::sync::Arc;

use certdec::ecert::{
    e_adoption_risk_factor, eposterior_decide, invert_e_certificate, truncated_eposterior_decide,
    EVariableField,
};
use certdec::loss::LossTable;
use certdec::sim::etrack::{metric, run_etrack};
use certdec::{LossSpec, ParamGrid, ParamPoint, Scenario};

fn main() -> certdec::Result<()> {
    // two states, two actions: a1 is safe, a2 pays off in the high state
    let grid = ParamGrid::new(
        "two-point",
        vec![ParamPoint::scalar(0.2)?, ParamPoint::scalar(0.6)?],
    )?;
    let table = LossTable::new(grid.clone(), vec![vec![0.8, 0.4], vec![0.5, 0.7]])?;
    let spec = Arc::new(LossSpec::table(
        vec!["a1".into(), "a2".into()],
        table,
        true,
        true,
    )?);

    // a realized e-variable field: evidence speaks against the first state
    let field = EVariableField::new("observed", vec![2.0, 0.5])?;
    let d = eposterior_decide(&field, &spec, &grid)?;
    println!(
        "e-values (2.0, 0.5) -> recommend a{} with R = {:.4} (multiple 1)",
        d.action_index() + 1,
        d.risk_bound
    );

    for gamma in [0.5, 1.0] {
        let dt = truncated_eposterior_decide(&field, gamma, &spec, &grid)?;
        println!(
            "truncated at gamma = {gamma}: a{} with R = {:.4} (multiple {}), post-adoption cap {} x C",
            dt.action_index() + 1,
            dt.risk_bound,
            1.0 + gamma,
            1.0 + gamma,
        );
    }
    println!(
        "untruncated post-adoption cap: {} (2C at C = 0.5)",
        e_adoption_risk_factor(1.0, 0.5)?
    );
    println!();

    // inversion: any E-certified pair is matched or beaten by the
    // e-posterior decision built from its own ratio field
    let challenger = (1usize, 1.4f64);
    let inverted = invert_e_certificate(challenger.0, challenger.1, &spec, &grid)?;
    let re = eposterior_decide(&inverted, &spec, &grid)?;
    println!(
        "inverting the pair (a{}, {:.1}) re-decides to a{} with R = {:.4} <= {:.1}",
        challenger.0 + 1,
        challenger.1,
        re.action_index() + 1,
        re.risk_bound,
        challenger.1
    );
    println!();

    // the distributional guarantee, checked by simulation with
    // likelihood-ratio e-variables in a two-point normal model
    let scenario = Scenario::etrack(0.7, 0.4, 0.3, 0.4, Some(1.0), 50_000, 20250814);
    let report = run_etrack(&scenario)?;
    println!("two-point normal simulation, {} replications:", scenario.n_reps);
    for name in [
        metric::E_RATIO_MEAN,
        metric::E_RATIO_TRUNC_MEAN,
        metric::ADOPTION,
        metric::ADOPTION_TRUNC,
        metric::REALIZED_RISK,
        metric::REALIZED_RISK_TRUNC,
    ] {
        let m = report.metric(name).unwrap();
        println!("  {name:<22} {:.4} (mc se {:.4})", m.value, m.mc_se);
    }
    println!(
        "smallest certificate seen: {:.6} (always positive)",
        report.value(metric::MIN_R).unwrap()
    );
    Ok(())
}
