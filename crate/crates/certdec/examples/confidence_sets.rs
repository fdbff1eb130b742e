//! Confidence set constructions and Monte Carlo critical values.
//!
//! Everything upstream of a certified decision: simulate the `1-α`
//! quantile of the maximum estimation error, build projection boxes
//! (plain and studentized), scalar lower-bound intervals, and the
//! inversion set of an existing certificate, then materialize each set on
//! a grid.
//!
//! Run with `cargo run --example confidence_sets`.

use std::sync::Arc;

use certdec::{
    critical_value, invert_certificate, projection_box, uma_lower_bound, ErrorModel, LossSpec,
    ParamGrid, ParamPoint, WinnersData,
};

fn main() -> certdec::Result<()> {
    let alpha = 0.05;
    let sigma = vec![0.1, 0.3];

    // critical values: studentized ignores the scales, unstudentized does not
    let c = critical_value(&sigma, &ErrorModel::IidNormal, alpha, 400_000, 42, false)?;
    let c_star = critical_value(&sigma, &ErrorModel::IidNormal, alpha, 400_000, 42, true)?;
    println!("critical values at alpha = {alpha}: c = {c:.4}, c* = {c_star:.4}");

    // the same machinery accepts a correlated error law
    let correlated = ErrorModel::correlated(&[vec![1.0, 0.8], vec![0.8, 1.0]])?;
    let c_corr = critical_value(&sigma, &correlated, alpha, 400_000, 42, true)?;
    println!("with correlation 0.8 the studentized value drops to {c_corr:.4}");
    println!();

    // projection boxes from one data set
    let data = WinnersData::new(vec![0.6, 0.5], sigma.clone())?;
    let grid = ParamGrid::unit_cube("theta", 2, 21)?;
    for (name, studentized, cv) in [("plain", false, c), ("studentized", true, c_star)] {
        let set = projection_box(&data, cv, studentized, 1.0 - alpha)?.materialized(&grid)?;
        println!(
            "{name} projection box keeps {} of {} grid points",
            set.grid_view().unwrap().len(),
            grid.len()
        );
    }
    println!();

    // scalar lower bound: the uniformly most accurate one-sided interval
    let lower = uma_lower_bound(0.6, 0.1, alpha)?;
    println!("UMA lower bound for X = 0.6, sigma = 0.1: {lower:.5}");
    println!();

    // inversion: a certificate is a confidence set in disguise
    let spec = Arc::new(LossSpec::winners(2)?);
    let set = invert_certificate(0, 0.7, &spec, &grid, 1.0 - alpha)?;
    println!(
        "inverting (a1, R = 0.7) keeps {} grid points: exactly those with theta(a1) >= 0.3",
        set.grid_view().unwrap().len()
    );
    let check = grid
        .points()
        .iter()
        .filter(|p| p.coord(0) >= 0.3)
        .count();
    println!("direct count of such points: {check}");

    // empty sets are legal: an impossible bound excludes everything
    let empty = invert_certificate(0, -0.0, &spec, &ParamGrid::new(
        "interior",
        vec![ParamPoint::new(vec![0.4, 0.4])?, ParamPoint::new(vec![0.6, 0.2])?],
    )?, 1.0 - alpha)?;
    println!(
        "a zero bound over interior points leaves {} members (vacuous decisions carry R = 0)",
        empty.grid_view().unwrap().len()
    );
    Ok(())
}
