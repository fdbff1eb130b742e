//! Certified statistical decisions.
//!
//! A certified decision pairs a recommended action with a loss certificate:
//! either a P-certificate, a bound `R(Y)` with
//! `P{L(δ(Y), θ) <= R(Y)} >= 1-α` under every model, or an E-certificate,
//! a bound with `E[L(δ(Y), θ)/R(Y)] <= γ`. Both arise from as-if minimax
//! optimization: pick the action minimizing the worst-case loss over a
//! confidence set (P-track) or the worst-case e-posterior-weighted loss
//! (E-track), and report the minimized value. Certificates of either kind
//! support simple, safe adoption rules for a downstream decision-maker who
//! holds a default action of known cost.
//!
//! Every guarantee in the crate is verified empirically: seeded Monte Carlo
//! replication drives each certificate construction, and brute-force
//! enumeration backs each analytic shortcut.
//!
//! # Modules
//!
//! - [`grid`], [`loss`]: parameter grids, loss specifications, certified
//!   decisions.
//! - [`confset`]: projection boxes, UMA lower-bound intervals, certificate
//!   inversion, Monte Carlo critical values.
//! - [`asif`]: minimax over a confidence set; the winners projection
//!   certificates.
//! - [`adoption`]: threshold and randomized adoption rules, worst-case
//!   risk bounds, the saturating two-point adversary.
//! - [`ecert`]: e-variables, E-posterior decisions, truncation.
//! - [`sim`]: seeded, replication-parallel scenario harness and reports.
//! - [`config`], [`report`], [`cli`]: the `certdec` binary's config
//!   format, CSV reports, and subcommands.
//!
//! # Examples
//!
//! One runnable example per capability lives in `examples/`:
//!
//! ```bash
//! cargo run --example winners_certificates     # three projection certificates
//! cargo run --example confidence_sets          # set constructions, critical values
//! cargo run --example treatment_proportion     # UMA lower bound and threshold adoption
//! cargo run --example adoption_rules           # risk bounds and the saturating adversary
//! cargo run --example optimal_randomized_adoption  # Bayes-optimal randomized rules
//! cargo run --example eposterior_decisions     # E-track decisions and truncation
//! cargo run --example dominance_audit          # certificate inversion dominance
//! ```
//!
//! The `certdec` binary runs the same machinery from flat config files; see
//! the README and `configs/`.

pub mod adoption;
pub mod asif;
pub mod cli;
pub mod config;
pub mod confset;
pub mod ecert;
pub mod error;
pub mod grid;
pub mod loss;
pub mod normal;
pub mod report;
pub mod sim;
pub mod stream;

pub use adoption::{
    adversarial_two_point, lemma_worst_case, optimal_adoption, pathwise_bound, risk_bound,
    threshold_rule, AdoptionRule, PriorSummary, RGrid, TwoPointLaw,
};
pub use asif::{
    asif_decide, projection_certificates, worst_case_loss, ProjectionCertificates,
};
pub use confset::{
    critical_value, invert_certificate, projection_box, uma_lower_bound, ConfidenceSet,
    Construction, ErrorModel, WinnersData,
};
pub use ecert::{
    e_adoption_risk_factor, eposterior_decide, invert_e_certificate,
    truncated_eposterior_decide, EVariableField,
};
pub use error::{Error, Result};
pub use grid::{ParamGrid, ParamPoint};
pub use loss::{
    ActionChoice, CertificateKind, CertifiedDecision, CostFn, LossSpec, LossTable,
};
pub use sim::{Scenario, ScenarioKind, SimReport};
