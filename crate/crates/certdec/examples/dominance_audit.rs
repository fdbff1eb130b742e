//! Certificate inversion: no certified pair beats its own inversion.
//!
//! Any P-certified `(δ̃, R̃)` defines a confidence set
//! `{θ : L(δ̃, θ) <= R̃}`; as-if optimization over that set yields a new
//! pair whose bound never exceeds `R̃`, realization by realization. This
//! audit demonstrates the construction against two challengers and also
//! shows the gate: a challenger that is not actually certified has its
//! dominance claim suppressed rather than reported.
//!
//! Run with `cargo run --example dominance_audit`.

use certdec::sim::audit::{metric, run_dominance_audit, Challenger};
use certdec::Scenario;

fn main() -> certdec::Result<()> {
    let mut scenario = Scenario::winners(
        vec![0.6, 0.6, 0.55],
        vec![0.1, 0.2, 0.05],
        0.05,
        0.5,
        30_000,
        20250815,
    );
    scenario.grid_resolution = 11;
    scenario.n_draws_critval = 100_000;

    for challenger in [Challenger::Trivial, Challenger::StudentizedProjection] {
        let report = run_dominance_audit(&scenario, challenger)?;
        println!("challenger: {}", challenger.name());
        println!(
            "  certificate validity {:.4} -> certified: {}",
            report.value(metric::CHALLENGER_CERT_VALID).unwrap(),
            report.value(metric::CHALLENGER_CERTIFIED).unwrap() == 1.0
        );
        println!(
            "  inversion bound exceeded the challenger in {} of {} replications",
            report.value(metric::PATHWISE_VIOLATIONS).unwrap(),
            scenario.n_reps
        );
        println!(
            "  mean bound: inversion {:.4} vs challenger {:.4}",
            report.value(metric::MEAN_R).unwrap(),
            report.value(metric::MEAN_R_CHALLENGER).unwrap()
        );
        println!(
            "  worst tail gap max_r [P(R >= r) - P(R~ >= r)] = {:.5}",
            report.value(metric::DOMINANCE_STATISTIC).unwrap()
        );
        println!();
    }

    // a constant bound of 0.05 is far too optimistic to be certified
    let report = run_dominance_audit(&scenario, Challenger::Constant(0.05))?;
    println!("challenger: constant:0.05");
    println!(
        "  certificate validity {:.4} -> claim suppressed: {}",
        report.value(metric::CHALLENGER_CERT_VALID).unwrap(),
        report.value(metric::SUPPRESSED).unwrap() == 1.0
    );
    Ok(())
}
