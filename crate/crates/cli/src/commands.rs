use std::fmt;
use std::path::PathBuf;

use serde_json::{Map, Value};

use phasebound::decision::{default_lambda_grid, BETA_SAMPLES};
use phasebound::{
    budget_grid, detection_probability, eigen_oracle_point, fit_power_law,
    optimal_squeezing_fraction, params_from_budget, simulate_strategy, squeezed_bound,
    sweep_budget, BoundReport, Error, Family, Hypothesis, StateSpec,
};

use crate::output::{int, json_line, num, opt_num, Cell, Table};
use crate::{Cli, Command, Format, HypothesisArg};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    NotDetectable(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
            CliError::NotDetectable(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
            CliError::NotDetectable(m) => write!(f, "not detectable: {m}"),
        }
    }
}

/// Errors raised while validating inputs.
fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Errors raised while computing.
fn compute(e: Error) -> CliError {
    match e {
        Error::NotDetectable { .. } => CliError::NotDetectable(e.to_string()),
        other => CliError::Compute(other.to_string()),
    }
}

struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display()))),
            None => {
                use std::io::Write;
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|e| CliError::Compute(format!("cannot write output: {e}")))
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if !(cli.tail_tol > 0.0 && cli.tail_tol < 1.0) {
        return Err(CliError::Usage(format!(
            "--tail-tol must lie in (0, 1), got {}",
            cli.tail_tol
        )));
    }
    if cli.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let sink = Sink {
        out: cli.out.clone(),
    };
    let result = match &cli.command {
        Command::Roc { state, phi, points } => roc(cli, &sink, state, *phi, *points),
        Command::Phimin {
            state,
            family,
            n,
            beta,
            p01,
            phi_max,
        } => phimin(cli, &sink, state.as_deref(), *family, *n, *beta, *p01, *phi_max),
        Command::Sweep {
            family,
            n_range,
            beta,
            p01,
        } => sweep(cli, &sink, *family, n_range, *beta, *p01),
        Command::BetaScan { n, p01 } => beta_scan(cli, &sink, *n, *p01),
        Command::Simulate {
            c,
            state,
            phi,
            lambda,
            hypothesis,
            trials,
            seed,
        } => simulate(
            cli,
            &sink,
            *c,
            state.as_deref(),
            *phi,
            *lambda,
            *hypothesis,
            *trials,
            *seed,
        ),
    };
    if let Err(CliError::NotDetectable(_)) = &result {
        let mut obj = Map::new();
        obj.insert("error".into(), Value::String("not_detectable".into()));
        sink.write(&json_line(&Value::Object(obj)))?;
    }
    result
}

fn check_p01(p01: f64) -> Result<(), CliError> {
    if !(0.0..0.5).contains(&p01) {
        return Err(CliError::Usage(format!(
            "--p01 must lie in [0, 0.5), got {p01}"
        )));
    }
    Ok(())
}

fn check_phi(phi: f64, flag: &str) -> Result<(), CliError> {
    if !(phi > 0.0 && phi <= std::f64::consts::PI) {
        return Err(CliError::Usage(format!("{flag} must lie in (0, π], got {phi}")));
    }
    Ok(())
}

fn roc(cli: &Cli, sink: &Sink, state: &str, phi: f64, points: usize) -> Result<(), CliError> {
    let spec = StateSpec::parse(state).map_err(usage)?;
    check_phi(phi, "--phi")?;
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }

    let dist = spec.distribution(cli.tail_tol).map_err(compute)?;
    let kappa = dist.overlap_kappa(phi);
    let c = kappa.sqrt();
    let mut rows = Vec::with_capacity(points);
    for lambda in default_lambda_grid(points) {
        let p = eigen_oracle_point(c, lambda).map_err(compute)?;
        let analytic = detection_probability(kappa, p.p01).map_err(compute)?;
        rows.push((p.p01, analytic, p.p11, lambda));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.3.total_cmp(&a.3)));

    let mut table = Table::new(&["p01", "p11_analytic", "p11_oracle", "lambda", "kappa"]);
    for (p01, analytic, oracle, lambda) in rows {
        table.push(vec![
            Cell::Float(Some(p01)),
            Cell::Float(Some(analytic)),
            Cell::Float(Some(oracle)),
            Cell::Float(Some(lambda)),
            Cell::Float(Some(kappa)),
        ]);
    }
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => sink.write(&table.to_csv()),
        Format::Json => sink.write(&json_line(&table.to_json_rows())),
    }
}

fn params_value(spec: &StateSpec) -> Value {
    let mut obj = Map::new();
    match spec {
        StateSpec::Coherent { alpha } => {
            obj.insert("alpha".into(), num(*alpha));
        }
        StateSpec::PhaseCoherent { x } => {
            obj.insert("x".into(), num(*x));
        }
        StateSpec::SqueezedCoherent { x, r } => {
            obj.insert("x".into(), num(*x));
            obj.insert("r".into(), num(*r));
        }
        StateSpec::TruncatedLondon { dim } => {
            obj.insert("dim".into(), int(*dim as u64));
        }
        StateSpec::Custom { weights, source } => {
            obj.insert(
                "source".into(),
                source.clone().map_or(Value::Null, Value::String),
            );
            obj.insert("dim".into(), int(weights.len() as u64));
        }
    }
    Value::Object(obj)
}

#[allow(clippy::too_many_arguments)]
fn phimin(
    cli: &Cli,
    sink: &Sink,
    state: Option<&str>,
    family: Option<Family>,
    n: Option<f64>,
    beta: Option<f64>,
    p01: f64,
    phi_max: f64,
) -> Result<(), CliError> {
    let spec = match (state, family, n) {
        (Some(text), _, _) => StateSpec::parse(text).map_err(usage)?,
        (None, Some(family), Some(n)) => params_from_budget(family, n, beta).map_err(usage)?,
        _ => {
            return Err(CliError::Usage(
                "phimin needs --state, or --family with --n".into(),
            ))
        }
    };
    check_p01(p01)?;
    check_phi(phi_max, "--phi-max")?;

    let report = BoundReport::compute(&spec, p01, cli.tail_tol, phi_max, cli.grid).map_err(compute)?;
    if report.phi_exact.is_none() {
        return Err(CliError::NotDetectable(format!(
            "{spec} never reaches κ* = {} on (0, {phi_max}]",
            report.kappa_star
        )));
    }
    let n_out = n.filter(|_| state.is_none()).unwrap_or(report.n);

    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("family".into(), Value::String(spec.family().name().into()));
            obj.insert("params".into(), params_value(&spec));
            obj.insert("N".into(), num(n_out));
            obj.insert("p01".into(), num(p01));
            obj.insert("kappa_star".into(), num(report.kappa_star));
            obj.insert("phi_min_exact".into(), opt_num(report.phi_exact));
            obj.insert("phi_min_paper_bound".into(), opt_num(report.phi_paper));
            obj.insert("phi_min_corrected_bound".into(), opt_num(report.phi_corrected));
            sink.write(&json_line(&Value::Object(obj)))
        }
        Format::Csv => {
            let mut table = Table::new(&[
                "family",
                "state",
                "N",
                "p01",
                "kappa_star",
                "phi_min_exact",
                "phi_min_paper_bound",
                "phi_min_corrected_bound",
            ]);
            table.push(vec![
                Cell::Text(spec.family().name().into()),
                Cell::Text(spec.to_string()),
                Cell::Float(Some(n_out)),
                Cell::Float(Some(p01)),
                Cell::Float(Some(report.kappa_star)),
                Cell::Float(report.phi_exact),
                Cell::Float(report.phi_paper),
                Cell::Float(report.phi_corrected),
            ]);
            sink.write(&table.to_csv())
        }
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--n-range expects lo:hi:count:log|lin, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    let log = match parts[3].trim() {
        "log" => true,
        "lin" => false,
        _ => return Err(bad()),
    };
    budget_grid(lo, hi, count, log).map_err(usage)
}

fn fit_value(points: &[(f64, f64)]) -> Value {
    match fit_power_law(points) {
        Ok(fit) => {
            let mut obj = Map::new();
            obj.insert("slope".into(), num(fit.slope));
            obj.insert("intercept".into(), num(fit.intercept));
            obj.insert("r_squared".into(), num(fit.r_squared));
            obj.insert("n_points".into(), int(fit.n_points as u64));
            Value::Object(obj)
        }
        Err(_) => Value::Null,
    }
}

fn sweep(
    cli: &Cli,
    sink: &Sink,
    family: Family,
    n_range: &str,
    beta: Option<f64>,
    p01: f64,
) -> Result<(), CliError> {
    let budgets = parse_range(n_range)?;
    check_p01(p01)?;
    params_from_budget(family, budgets[0], beta).map_err(usage)?;

    let reports =
        sweep_budget(family, &budgets, beta, p01, cli.tail_tol, cli.grid).map_err(compute)?;
    let mut table = Table::new(&["n", "phi_exact", "phi_paper", "phi_corrected"]);
    let mut fit_points = Vec::new();
    for (n, r) in budgets.iter().zip(&reports) {
        if let Some(phi) = r.phi_exact {
            fit_points.push((*n, phi));
        }
        table.push(vec![
            Cell::Float(Some(*n)),
            Cell::Float(r.phi_exact),
            Cell::Float(r.phi_paper),
            Cell::Float(r.phi_corrected),
        ]);
    }
    let fit = fit_value(&fit_points);
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = table.to_csv();
            text.push_str(&json_line(&fit));
            sink.write(&text)
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("rows".into(), table.to_json_rows());
            obj.insert("fit".into(), fit);
            sink.write(&json_line(&Value::Object(obj)))
        }
    }
}

fn beta_scan(cli: &Cli, sink: &Sink, n: f64, p01: f64) -> Result<(), CliError> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(CliError::Usage(format!("--n must be positive, got {n}")));
    }
    check_p01(p01)?;

    let scan = optimal_squeezing_fraction(n, p01, cli.tail_tol, cli.grid).map_err(compute)?;
    debug_assert_eq!(scan.samples.len(), BETA_SAMPLES);
    let mut table = Table::new(&["beta", "phi_exact", "phi_paper_bound"]);
    let mut paper_best: Option<(f64, f64)> = None;
    for &(beta, phi) in &scan.samples {
        let paper = squeezed_bound(n, beta, p01).ok();
        if let Some(v) = paper {
            if paper_best.is_none_or(|(_, best)| v < best) {
                paper_best = Some((beta, v));
            }
        }
        table.push(vec![
            Cell::Float(Some(beta)),
            Cell::Float(Some(phi)),
            Cell::Float(paper),
        ]);
    }
    let mut summary = Map::new();
    summary.insert("beta_star".into(), num(scan.beta_star));
    summary.insert("phi_exact_at_beta_star".into(), num(scan.phi_at_beta_star));
    summary.insert("paper_bound_argmin".into(), opt_num(paper_best.map(|b| b.0)));
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = table.to_csv();
            text.push_str(&json_line(&Value::Object(summary)));
            sink.write(&text)
        }
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("rows".into(), table.to_json_rows());
            obj.insert("summary".into(), Value::Object(summary));
            sink.write(&json_line(&Value::Object(obj)))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cli: &Cli,
    sink: &Sink,
    c: Option<f64>,
    state: Option<&str>,
    phi: Option<f64>,
    lambda: f64,
    hypothesis: HypothesisArg,
    trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    if !lambda.is_finite() {
        return Err(CliError::Usage(format!("--lambda must be finite, got {lambda}")));
    }
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let c = match (c, state, phi) {
        (Some(c), _, _) => {
            if !(0.0..=1.0).contains(&c) {
                return Err(CliError::Usage(format!("--c must lie in [0, 1], got {c}")));
            }
            c
        }
        (None, Some(text), Some(phi)) => {
            let spec = StateSpec::parse(text).map_err(usage)?;
            if !phi.is_finite() {
                return Err(CliError::Usage(format!("--phi must be finite, got {phi}")));
            }
            spec.distribution(cli.tail_tol)
                .map_err(compute)?
                .overlap_kappa(phi)
                .sqrt()
        }
        _ => {
            return Err(CliError::Usage(
                "simulate needs --c, or --state with --phi".into(),
            ))
        }
    };
    let hypothesis = match hypothesis {
        HypothesisArg::H0 => Hypothesis::H0,
        HypothesisArg::H1 => Hypothesis::H1,
    };
    let r = simulate_strategy(c, lambda, hypothesis, trials, seed).map_err(compute)?;

    let columns = [
        "hypothesis",
        "c",
        "lambda",
        "trials",
        "positives",
        "rate",
        "ci_low",
        "ci_high",
        "seed",
        "probability",
    ];
    let row = vec![
        Cell::Text(r.hypothesis.name().into()),
        Cell::Float(Some(c)),
        Cell::Float(Some(lambda)),
        Cell::Int(r.trials),
        Cell::Int(r.positives),
        Cell::Float(Some(r.rate)),
        Cell::Float(Some(r.ci_low)),
        Cell::Float(Some(r.ci_high)),
        Cell::Int(r.seed),
        Cell::Float(Some(r.probability)),
    ];
    let mut table = Table::new(&columns);
    table.push(row);
    match cli.format.unwrap_or(Format::Json) {
        Format::Csv => sink.write(&table.to_csv()),
        Format::Json => {
            let Value::Array(mut rows) = table.to_json_rows() else {
                unreachable!("rows serialize to an array")
            };
            sink.write(&json_line(&rows.remove(0)))
        }
    }
}
