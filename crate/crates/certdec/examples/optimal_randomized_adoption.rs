//! Bayes-optimal randomized adoption under a worst-case constraint.
//!
//! Beyond the threshold rule, a decision-maker with a prior over
//! `(loss, certificate)` pairs can spend the same worst-case risk budget
//! on a randomized rule: hold back `q*` of the adoption probability below
//! `C` and spend it where the prior says certificates above `C` still
//! signal low loss. The optimal `q*` comes from brute-force search; when
//! the prior never rewards the tail, the search collapses back to the
//! threshold rule exactly.
//!
//! Run with `cargo run --example optimal_randomized_adoption`.

use certdec::adoption::threshold_rule_on;
use certdec::{lemma_worst_case, optimal_adoption, PriorSummary, RGrid};

fn main() -> certdec::Result<()> {
    let (alpha, c, u) = (0.05, 0.5, 1.0);
    let budget = u * alpha * (1.0 - c);

    // prior 1: conditional mean loss equals the certificate value, so
    // nothing above C is worth adopting
    let grid = RGrid::new(101)?;
    let cond: Vec<f64> = grid.values().collect();
    let marginal = vec![1.0 / 101.0; 101];
    let pessimistic = PriorSummary::new(grid.clone(), cond, marginal)?;

    let opt = optimal_adoption(&pessimistic, u, alpha, c)?;
    let thr = threshold_rule_on(RGrid::new(101)?, c, u)?;
    let same = opt.values() == thr.values();
    println!("prior with E[L | R=r] = r:");
    println!("  optimal rule equals the threshold rule exactly: {same}");
    println!(
        "  shared objective {:.6}",
        pessimistic.bayes_objective(&opt, c)
    );
    println!();

    // prior 2: all certificate mass lands at r0 = 0.7 > C, but the prior
    // believes the loss there is zero: the tail is worth paying for
    let cond = vec![0.0; 101];
    let mut marginal = vec![0.0; 101];
    marginal[70] = 1.0;
    let optimistic = PriorSummary::new(grid.clone(), cond, marginal)?;

    let opt = optimal_adoption(&optimistic, u, alpha, c)?;
    let r0_index = 70;
    println!("prior concentrated at r0 = 0.7 with E[L | R=r0] = 0:");
    println!(
        "  optimal rule adopts at r0 with probability {:.4} (threshold rule: 0)",
        opt.values()[r0_index]
    );
    println!(
        "  Bayes objective  optimal {:.6}  threshold {:.6}",
        optimistic.bayes_objective(&opt, c),
        optimistic.bayes_objective(&threshold_rule_on(RGrid::new(101)?, c, u)?, c)
    );
    let worst = lemma_worst_case(&opt, alpha, c)?;
    println!("  still feasible: excess-risk functional {worst:.6} <= budget {budget:.6}");
    Ok(())
}
