//! Flat `key = value` scenario configs.
//!
//! The format is intentionally primitive: one key per line, `#` comments,
//! optional `[section]` headers that carry no meaning, no nesting. Every
//! value renders and re-parses losslessly, so `dump_config` followed by
//! `parse_config` reproduces the scenario exactly.
//!
//! Vector values are whitespace- or comma-separated (`theta = 0.6 0.6`),
//! matrices separate rows with `;`, and `psi` takes either
//! `affine <slope> <intercept>` or `table <a:v> <a:v> ...`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::loss::CostFn;
use crate::sim::{Challenger, Scenario, ScenarioKind};

const KNOWN_KEYS: &[&str] = &[
    "name",
    "alpha",
    "C",
    "u",
    "gamma",
    "theta",
    "sigma",
    "psi",
    "rho",
    "kappa",
    "epsilon",
    "theta_alt",
    "loss_table",
    "n_reps",
    "seed",
    "n_draws_critval",
    "grid_resolution",
    "correlation",
    "challenger",
    "tau",
];

#[derive(Debug, Default)]
struct Draft {
    values: HashMap<String, (String, Option<usize>)>,
}

fn parse_f64(key: &str, raw: &str, line: Option<usize>) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::config(line, format!("{key}: expected a number, got `{raw}`")))
}

fn parse_u64(key: &str, raw: &str, line: Option<usize>) -> Result<u64> {
    raw.trim()
        .parse::<u64>()
        .map_err(|_| Error::config(line, format!("{key}: expected a nonnegative integer, got `{raw}`")))
}

fn parse_vec(key: &str, raw: &str, line: Option<usize>) -> Result<Vec<f64>> {
    let parts: Vec<&str> = raw
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(Error::config(line, format!("{key}: empty list")));
    }
    parts
        .into_iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::config(line, format!("{key}: bad number `{p}`")))
        })
        .collect()
}

fn parse_matrix(key: &str, raw: &str, line: Option<usize>) -> Result<Vec<Vec<f64>>> {
    raw.split(';')
        .map(|row| parse_vec(key, row, line))
        .collect()
}

fn parse_psi(raw: &str, line: Option<usize>) -> Result<CostFn> {
    let raw = raw.trim();
    if let Some(rest) = raw.strip_prefix("affine") {
        let coefs = parse_vec("psi", rest, line)?;
        if coefs.len() != 2 {
            return Err(Error::config(
                line,
                "psi: affine form needs exactly `affine <slope> <intercept>`",
            ));
        }
        return Ok(CostFn::Affine {
            slope: coefs[0],
            intercept: coefs[1],
        });
    }
    if let Some(rest) = raw.strip_prefix("table") {
        let mut knots = Vec::new();
        for pair in rest.split_whitespace() {
            let (a, v) = pair.split_once(':').ok_or_else(|| {
                Error::config(line, format!("psi: table entries look like `a:value`, got `{pair}`"))
            })?;
            let a = parse_f64("psi", a, line)?;
            let v = parse_f64("psi", v, line)?;
            knots.push((a, v));
        }
        return Ok(CostFn::Table { knots });
    }
    Err(Error::config(
        line,
        format!("psi: expected `affine <slope> <intercept>` or `table <a:v> ...`, got `{raw}`"),
    ))
}

fn parse_challenger(raw: &str, line: Option<usize>) -> Result<Challenger> {
    let raw = raw.trim();
    match raw {
        "trivial" => Ok(Challenger::Trivial),
        "studentized" => Ok(Challenger::StudentizedProjection),
        "self" => Ok(Challenger::SelfComparison),
        _ => {
            if let Some(rest) = raw.strip_prefix("constant:") {
                let r = parse_f64("challenger", rest, line)?;
                return Ok(Challenger::Constant(r));
            }
            Err(Error::config(
                line,
                format!(
                    "challenger: expected trivial | studentized | self | constant:<r>, got `{raw}`"
                ),
            ))
        }
    }
}

impl Draft {
    fn feed_line(&mut self, raw_line: &str, line_no: usize) -> Result<()> {
        let stripped = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        }
        .trim();
        if stripped.is_empty() || (stripped.starts_with('[') && stripped.ends_with(']')) {
            return Ok(());
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| {
            Error::config(
                Some(line_no),
                format!("expected `key = value`, got `{stripped}`"),
            )
        })?;
        self.feed_kv(key.trim(), value.trim(), Some(line_no))
    }

    fn feed_kv(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(line, format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), (value.to_string(), line));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<(&str, Option<usize>)> {
        self.values.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.values.get(key).and_then(|(_, l)| *l)
    }

    fn build(&self) -> Result<Scenario> {
        let (name, name_line) = self
            .get("name")
            .ok_or_else(|| Error::config(None, "missing required key `name`"))?;
        let kind = match name {
            "winners" => ScenarioKind::Winners,
            "treatment" => ScenarioKind::Treatment,
            "etrack" => ScenarioKind::ETrack,
            "custom" => {
                return Err(Error::config(
                    name_line,
                    "name: custom scenarios are built through the library API; \
                     the runner supports winners | treatment | etrack",
                ))
            }
            other => {
                return Err(Error::config(
                    name_line,
                    format!("name: expected winners | treatment | etrack, got `{other}`"),
                ))
            }
        };

        let req_f64 = |key: &str| -> Result<f64> {
            let (v, l) = self
                .get(key)
                .ok_or_else(|| Error::config(None, format!("missing required key `{key}`")))?;
            parse_f64(key, v, l)
        };
        let opt_f64 = |key: &str| -> Result<Option<f64>> {
            self.get(key).map(|(v, l)| parse_f64(key, v, l)).transpose()
        };
        let opt_u64 = |key: &str| -> Result<Option<u64>> {
            self.get(key).map(|(v, l)| parse_u64(key, v, l)).transpose()
        };

        if let Some((_, line)) = self.get("tau") {
            return Err(Error::config(
                line,
                "tau parameterizes the adopt subcommand, not scenario runs",
            ));
        }
        let theta = {
            let (v, l) = self
                .get("theta")
                .ok_or_else(|| Error::config(None, "missing required key `theta`"))?;
            parse_vec("theta", v, l)?
        };
        let sigma = {
            let (v, l) = self
                .get("sigma")
                .ok_or_else(|| Error::config(None, "missing required key `sigma`"))?;
            parse_vec("sigma", v, l)?
        };

        let scenario = Scenario {
            kind,
            theta,
            sigma,
            correlation: self
                .get("correlation")
                .map(|(v, l)| parse_matrix("correlation", v, l))
                .transpose()?,
            alpha: req_f64("alpha")?,
            c: opt_f64("C")?,
            u: opt_f64("u")?.unwrap_or(1.0),
            gamma: opt_f64("gamma")?,
            rho: opt_f64("rho")?,
            kappa: opt_f64("kappa")?,
            psi: self
                .get("psi")
                .map(|(v, l)| parse_psi(v, l))
                .transpose()?,
            epsilon: opt_f64("epsilon")?.unwrap_or(0.05),
            theta_alt: opt_f64("theta_alt")?,
            loss_table: self
                .get("loss_table")
                .map(|(v, l)| parse_matrix("loss_table", v, l))
                .transpose()?,
            grid_resolution: opt_u64("grid_resolution")?.unwrap_or(21) as usize,
            n_reps: opt_u64("n_reps")?.unwrap_or(100_000),
            seed: opt_u64("seed")?.unwrap_or(0),
            n_draws_critval: opt_u64("n_draws_critval")?.unwrap_or(400_000),
            challenger: self
                .get("challenger")
                .map(|(v, l)| parse_challenger(v, l))
                .transpose()?,
        };

        scenario.validate().map_err(|e| self.attach_line(e))?;
        Ok(scenario)
    }

    /// Map a semantic validation error back to the config line that set
    /// the offending field, when one exists.
    fn attach_line(&self, err: Error) -> Error {
        if let Error::OutOfRange { field, range, value } = &err {
            let key = match *field {
                "alpha" => "alpha",
                "C" => "C",
                "u" => "u",
                "gamma" => "gamma",
                "theta" => "theta",
                "sigma" => "sigma",
                "epsilon" => "epsilon",
                "loss_table entry" => "loss_table",
                _ => return err,
            };
            return Error::config(
                self.line_of(key),
                format!("{key}: must lie in {range}, got {value}"),
            );
        }
        if let Error::Invalid(msg) = &err {
            return Error::config(None, msg.clone());
        }
        err
    }
}

/// Parse a config text, then apply `key=value` override strings.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<Scenario> {
    let mut draft = Draft::default();
    for (i, line) in text.lines().enumerate() {
        draft.feed_line(line, i + 1)?;
    }
    for ov in overrides {
        let (key, value) = ov.split_once('=').ok_or_else(|| {
            Error::config(None, format!("override `{ov}` is not of the form key=value"))
        })?;
        draft.feed_kv(key.trim(), value.trim(), None)?;
    }
    draft.build()
}

/// Load a config file, then apply overrides.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, overrides)
}

fn render_vec(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_matrix(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|r| render_vec(r))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn render_psi(psi: &CostFn) -> String {
    match psi {
        CostFn::Affine { slope, intercept } => format!("affine {slope} {intercept}"),
        CostFn::Table { knots } => {
            let pairs: Vec<String> = knots.iter().map(|(a, v)| format!("{a}:{v}")).collect();
            format!("table {}", pairs.join(" "))
        }
    }
}

/// Render a scenario as a config that parses back to the identical value.
pub fn dump_config(s: &Scenario) -> String {
    let mut out = String::from("[scenario]\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("name", s.kind.name().to_string());
    kv("alpha", s.alpha.to_string());
    if let Some(c) = s.c {
        kv("C", c.to_string());
    }
    kv("u", s.u.to_string());
    if let Some(g) = s.gamma {
        kv("gamma", g.to_string());
    }
    kv("theta", render_vec(&s.theta));
    kv("sigma", render_vec(&s.sigma));
    if let Some(m) = &s.correlation {
        kv("correlation", render_matrix(m));
    }
    if let Some(psi) = &s.psi {
        kv("psi", render_psi(psi));
    }
    if let Some(rho) = s.rho {
        kv("rho", rho.to_string());
    }
    if let Some(kappa) = s.kappa {
        kv("kappa", kappa.to_string());
    }
    if s.kind == ScenarioKind::Treatment {
        kv("epsilon", s.epsilon.to_string());
    }
    if let Some(alt) = s.theta_alt {
        kv("theta_alt", alt.to_string());
    }
    if let Some(table) = &s.loss_table {
        kv("loss_table", render_matrix(table));
    }
    kv("n_reps", s.n_reps.to_string());
    kv("seed", s.seed.to_string());
    kv("n_draws_critval", s.n_draws_critval.to_string());
    kv("grid_resolution", s.grid_resolution.to_string());
    if let Some(ch) = &s.challenger {
        kv("challenger", ch.name());
    }
    out
}

/// Parameters for the `adopt` subcommand: evaluate an adoption rule
/// without any data scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AdoptParams {
    pub alpha: f64,
    pub c: f64,
    pub u: f64,
    /// Excess-risk budget the decision-maker tolerates. Defaults to
    /// `u * alpha * (1-C)`, the only value the threshold rule is known to
    /// be optimal for; other values are reported against feasibility only.
    pub tau: Option<f64>,
    pub n_reps: u64,
    pub seed: u64,
}

impl AdoptParams {
    pub fn budget(&self) -> f64 {
        self.tau
            .unwrap_or(self.u * self.alpha * (1.0 - self.c))
    }
}

/// Parse an adopt config: keys `alpha`, `C`, `u`, `n_reps`, `seed` (and an
/// optional `name = adopt` header line).
pub fn parse_adopt_config(text: &str, overrides: &[String]) -> Result<AdoptParams> {
    let mut draft = Draft::default();
    for (i, line) in text.lines().enumerate() {
        draft.feed_line(line, i + 1)?;
    }
    for ov in overrides {
        let (key, value) = ov.split_once('=').ok_or_else(|| {
            Error::config(None, format!("override `{ov}` is not of the form key=value"))
        })?;
        draft.feed_kv(key.trim(), value.trim(), None)?;
    }
    if let Some((name, line)) = draft.get("name") {
        if name != "adopt" {
            return Err(Error::config(
                line,
                format!("name: adopt configs use `name = adopt`, got `{name}`"),
            ));
        }
    }
    for key in ["theta", "sigma", "gamma", "rho", "kappa", "psi"] {
        if let Some((_, line)) = draft.get(key) {
            return Err(Error::config(
                line,
                format!("{key}: not meaningful for the adopt subcommand"),
            ));
        }
    }
    let params = AdoptParams {
        alpha: parse_f64(
            "alpha",
            draft
                .get("alpha")
                .ok_or_else(|| Error::config(None, "missing required key `alpha`"))?
                .0,
            draft.line_of("alpha"),
        )?,
        c: parse_f64(
            "C",
            draft
                .get("C")
                .ok_or_else(|| Error::config(None, "missing required key `C`"))?
                .0,
            draft.line_of("C"),
        )?,
        u: draft
            .get("u")
            .map(|(v, l)| parse_f64("u", v, l))
            .transpose()?
            .unwrap_or(1.0),
        tau: draft
            .get("tau")
            .map(|(v, l)| parse_f64("tau", v, l))
            .transpose()?,
        n_reps: draft
            .get("n_reps")
            .map(|(v, l)| parse_u64("n_reps", v, l))
            .transpose()?
            .unwrap_or(100_000),
        seed: draft
            .get("seed")
            .map(|(v, l)| parse_u64("seed", v, l))
            .transpose()?
            .unwrap_or(0),
    };
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::config(
            draft.line_of("alpha"),
            format!("alpha: must lie in (0, 1), got {}", params.alpha),
        ));
    }
    if !(0.0..1.0).contains(&params.c) {
        return Err(Error::config(
            draft.line_of("C"),
            format!("C: must lie in [0, 1), got {}", params.c),
        ));
    }
    if !(0.0..=1.0).contains(&params.u) {
        return Err(Error::config(
            draft.line_of("u"),
            format!("u: must lie in [0, 1], got {}", params.u),
        ));
    }
    if let Some(tau) = params.tau {
        if !(tau > 0.0 && tau <= 1.0 - params.c) {
            return Err(Error::config(
                draft.line_of("tau"),
                format!("tau: must lie in (0, 1-C], got {tau}"),
            ));
        }
    }
    Ok(params)
}
