//! The `certdec` command line.
//!
//! Subcommands:
//!
//! - `run <config>`: execute a scenario and write `report.csv`.
//! - `adopt <config>`: evaluate the threshold adoption rule, its worst-case
//!   functional, risk bounds, and the saturating adversary check.
//! - `ecert <config>`: run an E-track scenario (config must say so).
//! - `audit <config>`: dominance audit against a challenger certificate.
//! - `selftest`: fast invariant battery across all modules.
//!
//! Trailing `key=value` arguments override config entries. Exit codes:
//! 0 success, 2 config error, 3 guarantee-audit failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::adoption::{lemma_worst_case, pathwise_bound, risk_bound, threshold_rule, TwoPointLaw};
use crate::config::{dump_config, load_config, parse_adopt_config, AdoptParams};
use crate::error::{Error, Result};
use crate::report::{render_csv, render_summary, render_table};
use crate::sim::{run_dominance_audit, run_scenario, Challenger, Metric, ScenarioKind, SimReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_AUDIT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "certdec",
    about = "Certified statistical decisions: scenario runner and guarantee audits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a flat key=value config file.
    config: PathBuf,
    /// Trailing key=value overrides.
    overrides: Vec<String>,
    /// Where to write the CSV report.
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
    /// Print the normalized config and exit without running.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the config.
    Run(RunArgs),
    /// Evaluate the threshold adoption rule for (alpha, C, u).
    Adopt(RunArgs),
    /// Run an E-track scenario (requires name = etrack).
    Ecert(RunArgs),
    /// Dominance audit against the configured challenger.
    Audit(RunArgs),
    /// Run the fast invariant battery.
    Selftest,
}

/// Entry point returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version via this path with code 0
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args, None),
        Command::Ecert(args) => cmd_run(&args, Some(ScenarioKind::ETrack)),
        Command::Audit(args) => cmd_audit(&args),
        Command::Adopt(args) => cmd_adopt(&args),
        Command::Selftest => return cmd_selftest(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Exit code implied by a report's audit outcome.
pub fn exit_code(report: &SimReport) -> i32 {
    if report.audit_passed() {
        EXIT_OK
    } else {
        EXIT_AUDIT
    }
}

fn finish(report: &SimReport, out: &PathBuf) -> Result<i32> {
    std::fs::write(out, crate::report::report_csv(report))?;
    print!("{}", render_summary(report));
    println!("report written to {}", out.display());
    Ok(exit_code(report))
}

fn cmd_run(args: &RunArgs, required_kind: Option<ScenarioKind>) -> Result<i32> {
    let scenario = load_config(&args.config, &args.overrides)?;
    if let Some(kind) = required_kind {
        if scenario.kind != kind {
            return Err(Error::config(
                None,
                format!(
                    "this subcommand requires name = {}, config says {}",
                    kind.name(),
                    scenario.kind.name()
                ),
            ));
        }
    }
    if args.dump_config {
        print!("{}", dump_config(&scenario));
        return Ok(EXIT_OK);
    }
    let report = run_scenario(&scenario)?;
    finish(&report, &args.out)
}

fn cmd_audit(args: &RunArgs) -> Result<i32> {
    let scenario = load_config(&args.config, &args.overrides)?;
    if args.dump_config {
        print!("{}", dump_config(&scenario));
        return Ok(EXIT_OK);
    }
    let challenger = scenario.challenger.unwrap_or(Challenger::Trivial);
    let report = run_dominance_audit(&scenario, challenger)?;
    finish(&report, &args.out)
}

fn cmd_adopt(args: &RunArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.config)?;
    let params = parse_adopt_config(&text, &args.overrides)?;
    if args.dump_config {
        let AdoptParams {
            alpha,
            c,
            u,
            tau,
            n_reps,
            seed,
        } = &params;
        print!("[adopt]\nname = adopt\nalpha = {alpha}\nC = {c}\nu = {u}\n");
        if let Some(tau) = tau {
            println!("tau = {tau}");
        }
        println!("n_reps = {n_reps}\nseed = {seed}");
        return Ok(EXIT_OK);
    }

    let budget = params.budget();
    // the threshold rule is optimal only at the pinned budget u*alpha*(1-C);
    // other budgets get a feasibility report, not a saturation claim
    let pinned = params.tau.is_none();
    let AdoptParams {
        alpha,
        c,
        u,
        n_reps,
        seed,
        ..
    } = params;
    let rule = threshold_rule(c, u)?;
    let lemma = lemma_worst_case(&rule, alpha, c)?;
    let bound = risk_bound(u, alpha, c)?;

    // saturating adversary: mass alpha at (1, 0), rest at (r+, r+)
    let r_plus = (c + 0.2).min(1.0);
    let law = TwoPointLaw::new(alpha, alpha, 0.0, r_plus)?;
    let exact = law.expected_risk(&rule, c);
    let draws = law.sample(n_reps, seed);
    let mut mean = 0.0;
    let mut sumsq = 0.0;
    for &(l, r) in &draws {
        let q = rule.eval(r);
        let v = q * l + (1.0 - q) * c;
        mean += v;
        sumsq += v * v;
    }
    mean /= n_reps as f64;
    let var = (sumsq - n_reps as f64 * mean * mean) / (n_reps as f64 - 1.0);
    let se = (var.max(0.0) / n_reps as f64).sqrt();

    let metrics = vec![
        Metric::new("lemma_worst_case", lemma, 0.0),
        Metric::new("risk_budget", budget, 0.0),
        Metric::new("prop1_bound", bound, 0.0),
        Metric::new("saturation_risk_exact", exact, 0.0),
        Metric::new("saturation_risk_mc", mean, se),
        Metric::new("saturation_gap", bound - mean, se),
    ];

    std::fs::write(&args.out, render_csv(&metrics, n_reps, seed))?;
    println!("threshold rule u*1(r <= C) at alpha = {alpha}, C = {c}, u = {u}");
    println!();
    print!("{}", render_table(&metrics));
    println!();
    println!("pathwise bound alpha + min(R, C) against certificate value R:");
    for k in 0..=10 {
        let r = k as f64 / 10.0;
        println!("  R = {r:>4.2}  bound = {:.4}", pathwise_bound(r, c, alpha)?);
    }
    println!();
    println!("report written to {}", args.out.display());

    let feasible = lemma <= budget + 1e-9;
    let saturated = !pinned || (mean - bound).abs() <= 3.0 * se;
    if !feasible {
        eprintln!("audit: lemma_worst_case {lemma} exceeds budget {budget}");
    }
    if !saturated {
        eprintln!("audit: MC risk {mean} not within 3*se of bound {bound}");
    }
    Ok(if feasible && saturated {
        EXIT_OK
    } else {
        EXIT_AUDIT
    })
}

fn cmd_selftest() -> i32 {
    let checks = selftest::all();
    let mut failed = 0;
    for (name, result) in checks {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        println!("selftest: all checks passed");
        EXIT_OK
    } else {
        println!("selftest: {failed} check(s) failed");
        EXIT_AUDIT
    }
}

/// Fast cross-module invariant battery backing `certdec selftest`.
pub mod selftest {
    use std::sync::Arc;

    use crate::adoption::{
        candidate_rule, lemma_worst_case, optimal_adoption, threshold_rule, threshold_rule_on,
        PriorSummary, RGrid, TwoPointLaw,
    };
    use crate::asif::{asif_decide, treatment_asif, winners_box_asif};
    use crate::confset::{critical_value, projection_box, ErrorModel, WinnersData};
    use crate::ecert::{eposterior_decide, invert_e_certificate, EVariableField};
    use crate::grid::{ParamGrid, ParamPoint};
    use crate::loss::{CostFn, LossSpec, LossTable};
    use crate::normal::{norm_cdf, norm_quantile};
    use crate::report::report_csv;
    use crate::sim::{run_etrack, run_treatment, run_winners, Scenario};
    use crate::stream::{derive_rng, DOMAIN_REPLICATION};
    use rand::Rng;

    type Check = (&'static str, std::result::Result<(), String>);

    fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
        if cond {
            Ok(())
        } else {
            Err(msg.into())
        }
    }

    fn normal_quantile_checks() -> std::result::Result<(), String> {
        ensure(
            (norm_quantile(0.05) + 1.6448536269514722).abs() < 1e-6,
            "z_0.05 off",
        )?;
        let mut p = 0.001;
        while p < 1.0 {
            let err = (norm_cdf(norm_quantile(p)) - p).abs();
            ensure(err < 1e-6, format!("round trip error {err} at p={p}"))?;
            p += 0.013;
        }
        Ok(())
    }

    fn critical_value_checks() -> std::result::Result<(), String> {
        let c = critical_value(&[1.0], &ErrorModel::IidNormal, 0.05, 50_000, 5, true)
            .map_err(|e| e.to_string())?;
        ensure((c - 1.6448536).abs() < 0.03, format!("1-action c = {c}"))?;
        let c = critical_value(&[1.0, 1.0], &ErrorModel::IidNormal, 0.05, 50_000, 6, true)
            .map_err(|e| e.to_string())?;
        ensure((c - 1.9545083).abs() < 0.03, format!("2-action c = {c}"))
    }

    fn winners_fast_path_checks() -> std::result::Result<(), String> {
        let spec = LossSpec::winners(3).map_err(|e| e.to_string())?;
        let mut rng = derive_rng(11, DOMAIN_REPLICATION, 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let sigma: Vec<f64> = (0..3).map(|_| 0.05 + rng.random::<f64>() * 0.3).collect();
            let c_star = rng.random::<f64>() * 2.0;
            let data = WinnersData::new(x.clone(), sigma.clone()).map_err(|e| e.to_string())?;
            let lower: Vec<f64> = x
                .iter()
                .zip(&sigma)
                .map(|(&x, &s)| x - s * c_star)
                .collect();
            let mut axes = Vec::new();
            for &lo in &lower {
                let mut axis = vec![0.0, 0.5, 1.0];
                if (0.0..=1.0).contains(&lo) {
                    axis.push(lo);
                }
                axis.sort_by(f64::total_cmp);
                axis.dedup();
                axes.push(axis);
            }
            let grid = ParamGrid::product("g", &axes).map_err(|e| e.to_string())?;
            let cset = projection_box(&data, c_star, true, 0.95).map_err(|e| e.to_string())?;
            let slow = asif_decide(&cset, &spec, &grid).map_err(|e| e.to_string())?;
            let fast = winners_box_asif(&lower, 0.95);
            ensure(
                (fast.risk_bound - slow.risk_bound).abs() < 1e-12
                    && fast.action_index() == slow.action_index(),
                format!("fast {fast:?} vs grid {slow:?}"),
            )?;
        }
        Ok(())
    }

    fn treatment_fast_path_checks() -> std::result::Result<(), String> {
        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        let fractions: Vec<f64> = (1..=19).map(|i| i as f64 / 19.0).collect();
        let spec = LossSpec::treatment(fractions, psi).map_err(|e| e.to_string())?;
        let mut rng = derive_rng(12, DOMAIN_REPLICATION, 0);
        for _ in 0..20 {
            let theta_hat = rng.random::<f64>() * 1.2 - 0.1;
            let mut axis: Vec<f64> = (0..=30).map(|i| i as f64 / 30.0).collect();
            axis.push(theta_hat.clamp(0.0, 1.0));
            axis.sort_by(f64::total_cmp);
            axis.dedup();
            let grid = ParamGrid::product("theta", &[axis]).map_err(|e| e.to_string())?;
            let fast = treatment_asif(&spec, theta_hat, 0.95).map_err(|e| e.to_string())?;
            // grid comparison is meaningful when θ̂ lies inside the grid span
            if (0.0..=1.0).contains(&theta_hat) {
                let cset = crate::confset::ConfidenceSet::new(
                    crate::confset::Membership::HalfLine { lower: theta_hat },
                    0.95,
                    crate::confset::Construction::UmaLower,
                )
                .map_err(|e| e.to_string())?;
                let slow = asif_decide(&cset, &spec, &grid).map_err(|e| e.to_string())?;
                ensure(
                    (fast.risk_bound - slow.risk_bound).abs() < 1e-12,
                    format!("fast {} vs grid {}", fast.risk_bound, slow.risk_bound),
                )?;
            }
        }
        Ok(())
    }

    fn lemma_endpoint_checks() -> std::result::Result<(), String> {
        let grid = RGrid::new(201).map_err(|e| e.to_string())?;
        let mut rng = derive_rng(13, DOMAIN_REPLICATION, 0);
        for _ in 0..50 {
            let alpha = 0.01 + rng.random::<f64>() * 0.2;
            let c = rng.random::<f64>() * 0.9;
            let q: Vec<f64> = (0..201).map(|_| rng.random::<f64>()).collect();
            let rule = crate::adoption::AdoptionRule::new(grid.clone(), q, 1.0)
                .map_err(|e| e.to_string())?;
            let fast = lemma_worst_case(&rule, alpha, c).map_err(|e| e.to_string())?;
            // dense sweep over the affine parameter
            let t1 = rule.sup() * (1.0 - c);
            let mut t2 = 0.0f64;
            for (i, r) in rule.grid().values().enumerate() {
                if r >= c {
                    t2 = t2.max(rule.values()[i] * (r - c));
                }
            }
            let mut dense = f64::NEG_INFINITY;
            for k in 0..=500 {
                let a = alpha * k as f64 / 500.0;
                dense = dense.max(a * t1 + (1.0 - a) * t2);
            }
            ensure(
                (fast - dense).abs() < 1e-12,
                format!("lemma {fast} vs dense {dense}"),
            )?;
        }
        Ok(())
    }

    fn saturation_checks() -> std::result::Result<(), String> {
        for (alpha, c) in [(0.05, 0.3), (0.1, 0.5)] {
            let rule = threshold_rule(c, 1.0).map_err(|e| e.to_string())?;
            let law = TwoPointLaw::new(alpha, alpha, 0.0, (c + 0.2).min(1.0))
                .map_err(|e| e.to_string())?;
            let bound = c + alpha * (1.0 - c);
            let exact = law.expected_risk(&rule, c);
            ensure(
                (exact - bound).abs() < 1e-12,
                format!("saturation {exact} vs {bound}"),
            )?;
            let draws = law.sample(50_000, 21);
            let mc: f64 = draws
                .iter()
                .map(|&(l, r)| {
                    let q = rule.eval(r);
                    q * l + (1.0 - q) * c
                })
                .sum::<f64>()
                / draws.len() as f64;
            ensure((mc - bound).abs() < 0.02, format!("mc {mc} vs {bound}"))?;
        }
        Ok(())
    }

    fn optimal_adoption_checks() -> std::result::Result<(), String> {
        let grid = RGrid::new(101).map_err(|e| e.to_string())?;
        let cond: Vec<f64> = grid.values().collect();
        let marginal = vec![1.0 / 101.0; 101];
        let prior = PriorSummary::new(grid.clone(), cond, marginal).map_err(|e| e.to_string())?;
        let opt = optimal_adoption(&prior, 1.0, 0.05, 0.5).map_err(|e| e.to_string())?;
        let thr = threshold_rule_on(RGrid::new(101).map_err(|e| e.to_string())?, 0.5, 1.0)
            .map_err(|e| e.to_string())?;
        ensure(opt.values() == thr.values(), "threshold collapse failed")?;

        let cond = vec![0.0; 101];
        let mut marginal = vec![0.0; 101];
        marginal[70] = 1.0;
        let prior = PriorSummary::new(grid, cond, marginal).map_err(|e| e.to_string())?;
        let opt = optimal_adoption(&prior, 1.0, 0.05, 0.5).map_err(|e| e.to_string())?;
        let lhs = lemma_worst_case(&opt, 0.05, 0.5).map_err(|e| e.to_string())?;
        ensure(lhs <= 0.025 + 1e-9, format!("infeasible optimal rule: {lhs}"))?;
        let obj = prior.bayes_objective(&opt, 0.5);
        let base = prior.bayes_objective(&candidate_rule(&prior, 0.0, 1.0, 0.05, 0.5), 0.5);
        ensure(obj <= base && obj < 0.0, format!("objective {obj} vs {base}"))
    }

    fn eposterior_checks() -> std::result::Result<(), String> {
        let grid = ParamGrid::new(
            "pair",
            vec![
                ParamPoint::scalar(0.2).unwrap(),
                ParamPoint::scalar(0.6).unwrap(),
            ],
        )
        .map_err(|e| e.to_string())?;
        let table = LossTable::new(grid.clone(), vec![vec![0.8, 0.4], vec![0.5, 0.7]])
            .map_err(|e| e.to_string())?;
        let spec = Arc::new(
            LossSpec::table(vec!["a1".into(), "a2".into()], table, true, true)
                .map_err(|e| e.to_string())?,
        );
        let field = EVariableField::new("lr", vec![2.0, 0.5]).map_err(|e| e.to_string())?;
        let d = eposterior_decide(&field, &spec, &grid).map_err(|e| e.to_string())?;
        ensure(
            d.action_index() == 0 && (d.risk_bound - 0.8).abs() < 1e-12,
            format!("decision {d:?}"),
        )?;
        let inv = invert_e_certificate(1, 1.4, &spec, &grid).map_err(|e| e.to_string())?;
        let re = eposterior_decide(&inv, &spec, &grid).map_err(|e| e.to_string())?;
        ensure(re.risk_bound <= 1.4 * (1.0 + 1e-12), "edominate failed")
    }

    fn scenario_audit_checks() -> std::result::Result<(), String> {
        let mut w = Scenario::winners(vec![0.6, 0.6], vec![0.1, 0.2], 0.05, 0.5, 5_000, 31);
        w.n_draws_critval = 20_000;
        let report = run_winners(&w).map_err(|e| e.to_string())?;
        ensure(
            report.audit_passed(),
            format!("winners audit: {:?}", report.audit_failures),
        )?;

        let psi = CostFn::Affine {
            slope: 0.05,
            intercept: 0.0,
        };
        let t = Scenario::treatment(0.8, 0.1, psi, 0.97, 0.005, 0.05, 5_000, 32);
        let report = run_treatment(&t).map_err(|e| e.to_string())?;
        ensure(
            report.audit_passed(),
            format!("treatment audit: {:?}", report.audit_failures),
        )?;

        let e = Scenario::etrack(0.7, 0.4, 0.3, 0.4, Some(1.0), 5_000, 33);
        let report = run_etrack(&e).map_err(|e| e.to_string())?;
        ensure(
            report.audit_passed(),
            format!("etrack audit: {:?}", report.audit_failures),
        )
    }

    fn determinism_checks() -> std::result::Result<(), String> {
        let mut s = Scenario::winners(vec![0.6, 0.55], vec![0.3, 0.05], 0.05, 0.5, 2_000, 8);
        s.n_draws_critval = 10_000;
        let a = run_winners(&s).map_err(|e| e.to_string())?;
        let b = run_winners(&s).map_err(|e| e.to_string())?;
        ensure(report_csv(&a) == report_csv(&b), "reports differ across runs")
    }

    /// Every check with its name, in execution order.
    pub fn all() -> Vec<(&'static str, std::result::Result<(), String>)> {
        let checks: Vec<Check> = vec![
            ("normal quantile", normal_quantile_checks()),
            ("critical values vs quantile oracle", critical_value_checks()),
            ("winners fast path vs grid", winners_fast_path_checks()),
            ("treatment fast path vs grid", treatment_fast_path_checks()),
            ("lemma endpoints vs dense search", lemma_endpoint_checks()),
            ("two-point saturation", saturation_checks()),
            ("optimal randomized adoption", optimal_adoption_checks()),
            ("e-posterior decisions", eposterior_checks()),
            ("scenario audits", scenario_audit_checks()),
            ("report determinism", determinism_checks()),
        ];
        checks
    }
}
