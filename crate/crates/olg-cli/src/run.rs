//! Scenario execution: dispatch a parsed configuration to the library,
//! verify the resulting path, and emit the flat-file artifacts.
//!
//! Exit-code contract: 0 = equilibrium verified (or sweep completed),
//! 1 = configuration or input problem, 2 = the requested path is not an
//! equilibrium, 3 = every finite-date condition holds but a transversality
//! tail could not be certified on the available horizon.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use olg_core::bridge::DEFAULT_VERIFY_TOL;
use olg_core::scenarios::{self, Classification};
use olg_core::{
    bubble_component_path, map_olg_to_two_cycle, residual_report, simulate_olg,
    steady_state_and_gamma, verify_two_cycle_full, BubbleReport, ComponentSign, EconomyParams,
    EquilibriumPath, ModelError, PriceSystem, SequenceSpec, Technology, TechnologyFamily,
    UtilityFamily, Verdict,
};

use crate::config::{ConfigError, PriceSpec, RunConfig, Scenario, SweepVariable};
use crate::report::{self, ReportData, SweepRow};

/// Relative wobble allowed when calling a fiat price path geometric.
const GROWTH_RATIO_TOL: f64 = 1e-12;

/// Relative threshold below which a surviving bubble counts as vanished.
const VANISHING_REL: f64 = 1e-8;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Model(ModelError),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    /// Exit code for errors that abort a run before any verdict exists.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(ModelError::NonEquilibriumPath { .. }) => 2,
            _ => 1,
        }
    }
}

/// Outcome of a completed verb: what to print and how to exit.
pub struct Outcome {
    pub exit_code: i32,
    pub lines: Vec<String>,
}

/// A dispatched scenario, before verification.
struct Prepared {
    params: EconomyParams,
    path: EquilibriumPath,
    /// Classification fixed by the scenario itself, when it has one.
    classification: Option<Classification>,
    special: BTreeMap<String, f64>,
    p0: f64,
    p0_was_critical: bool,
    q0: f64,
}

fn cobb_douglas_fields(config: &RunConfig) -> Result<(f64, f64, f64, f64), CliError> {
    let tech = config.economy.technology.as_ref().ok_or_else(|| {
        ConfigError::global("this scenario requires technology = cobb_douglas")
    })?;
    let (tfp, alpha) = match tech.family {
        TechnologyFamily::CobbDouglas { tfp, alpha } => (tfp, alpha),
        TechnologyFamily::Linear { .. } => {
            return Err(ConfigError::global("this scenario requires technology = cobb_douglas").into())
        }
    };
    if tech.delta != 1.0 {
        return Err(ConfigError::global(format!(
            "the fiat trichotomy path assumes full depreciation; set delta = 1 (got {})",
            tech.delta
        ))
        .into());
    }
    let k0 = config.economy.k0.ok_or_else(|| {
        ConfigError::global("scenario cobb_douglas_bubble uses production; the [economy] field `k0` is required")
    })?;
    Ok((alpha, tfp, config.economy.utility.beta, k0))
}

fn linear_fields(config: &RunConfig) -> Result<(f64, f64, f64, f64), CliError> {
    let tech = config.economy.technology.as_ref().ok_or_else(|| {
        ConfigError::global("this scenario requires technology = linear")
    })?;
    match tech.family {
        TechnologyFamily::Linear { slope, intercept } => {
            Ok((slope, intercept, tech.delta, config.economy.utility.beta))
        }
        TechnologyFamily::CobbDouglas { .. } => {
            Err(ConfigError::global("this scenario requires technology = linear").into())
        }
    }
}

fn require_log_utility(config: &RunConfig, scenario: Scenario) -> Result<(), CliError> {
    match config.economy.utility.family {
        UtilityFamily::Logarithmic => Ok(()),
        UtilityFamily::Isoelastic { .. } => Err(ConfigError::global(format!(
            "scenario {} is a log-utility closed form; set utility = log",
            scenario.as_str()
        ))
        .into()),
    }
}

fn sigma_of(config: &RunConfig) -> f64 {
    match config.economy.utility.family {
        UtilityFamily::Logarithmic => 1.0,
        UtilityFamily::Isoelastic { sigma } => sigma,
    }
}

/// Resolve `p0 = critical` to the knife-edge initial fiat price, which
/// depends on the date-0 wage and therefore must be computed at run time.
fn resolve_p0(config: &RunConfig) -> Result<(f64, bool), CliError> {
    match config.p0 {
        PriceSpec::Value(v) => Ok((v, false)),
        PriceSpec::Critical => {
            if config.scenario != Scenario::CobbDouglasBubble {
                return Err(ConfigError::global(
                    "p0 = critical is only defined for scenario cobb_douglas_bubble",
                )
                .into());
            }
            let (alpha, tfp, beta, k0) = cobb_douglas_fields(config)?;
            let probe = scenarios::cobb_douglas_bubble_path(alpha, tfp, beta, k0, 0.0, 2)?;
            let b_bar = probe.special_values.get("b_bar").copied().ok_or_else(|| {
                ConfigError::global(
                    "p0 = critical is undefined here: the steady state cannot support a bubble",
                )
            })?;
            Ok((b_bar, true))
        }
    }
}

fn owned_specials(map: &BTreeMap<&'static str, f64>) -> BTreeMap<String, f64> {
    map.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn reject_free_price(value: f64, key: &str, scenario: Scenario) -> Result<(), CliError> {
    if value != 0.0 {
        return Err(ConfigError::global(format!(
            "scenario {} does not take a free {key}; remove it from [run]",
            scenario.as_str()
        ))
        .into());
    }
    Ok(())
}

fn dispatch(config: &RunConfig, horizon: usize) -> Result<Prepared, CliError> {
    let (p0, p0_was_critical) = resolve_p0(config)?;
    let q0 = config.q0;
    match config.scenario {
        Scenario::CobbDouglasBubble => {
            reject_free_price(q0, "q0", config.scenario)?;
            require_log_utility(config, config.scenario)?;
            let (alpha, tfp, beta, k0) = cobb_douglas_fields(config)?;
            let result = scenarios::cobb_douglas_bubble_path(alpha, tfp, beta, k0, p0, horizon)?;
            Ok(Prepared {
                params: result.params,
                path: result.path,
                classification: Some(result.classification),
                special: owned_specials(&result.special_values),
                p0,
                p0_was_critical,
                q0,
            })
        }
        Scenario::LinearTech => {
            require_log_utility(config, config.scenario)?;
            let (slope, intercept, delta, beta) = linear_fields(config)?;
            let result = scenarios::linear_tech_path(
                slope,
                intercept,
                delta,
                beta,
                &config.economy.dividends,
                q0,
                p0,
                horizon,
            )?;
            Ok(Prepared {
                params: result.params,
                path: result.path,
                classification: Some(result.classification),
                special: owned_specials(&result.special_values),
                p0,
                p0_was_critical,
                q0,
            })
        }
        Scenario::FiatContinuum => {
            reject_free_price(q0, "q0", config.scenario)?;
            let sigma = sigma_of(config);
            let beta = config.economy.utility.beta;
            let young = &config.economy.endow_young;
            let old = &config.economy.endow_old;
            let params = scenarios::fiat_params(young, old, sigma, beta)?;
            let path = scenarios::fiat_continuum_path(young, old, sigma, beta, p0, horizon)?;
            let mut special = BTreeMap::new();
            if let Some((y, o, growth)) = common_growth(young, old) {
                let stationary = scenarios::fiat_stationary_price(y, o, growth, sigma, beta)?;
                if stationary.feasible {
                    if let Some(price) = stationary.price {
                        special.insert("p_stationary".to_string(), price);
                    }
                }
            }
            Ok(Prepared { params, path, classification: None, special, p0, p0_was_critical, q0 })
        }
        Scenario::ExchangeLog => {
            reject_free_price(q0, "q0", config.scenario)?;
            reject_free_price(p0, "p0", config.scenario)?;
            let params = config.economy.build_params(config.scenario)?;
            let path = scenarios::exchange_log_dividend_path(&params, horizon)?;
            Ok(Prepared {
                params,
                path,
                classification: None,
                special: BTreeMap::new(),
                p0,
                p0_was_critical,
                q0,
            })
        }
        Scenario::OlgGeneral => {
            let params = config.economy.build_params(config.scenario)?;
            let path = simulate_olg(&params, q0, p0, horizon)?;
            let mut special = BTreeMap::new();
            if matches!(
                params.technology,
                Some(Technology { family: TechnologyFamily::CobbDouglas { .. }, .. })
            ) {
                if let Ok(ss) = steady_state_and_gamma(&params) {
                    special.insert("gamma".to_string(), ss.gamma);
                    special.insert("rho".to_string(), ss.rho);
                    special.insert("K_star".to_string(), ss.k_star);
                }
            }
            Ok(Prepared { params, path, classification: None, special, p0, p0_was_critical, q0 })
        }
        Scenario::VerifyPath => Err(ConfigError::global(
            "scenario verify_path is driven by the `verify` verb, not `simulate`",
        )
        .into()),
    }
}

/// Endowment pair `(young_0, old_0, growth)` when both sequences are
/// geometric with one common ratio (constants count as ratio 1).
fn common_growth(young: &SequenceSpec, old: &SequenceSpec) -> Option<(f64, f64, f64)> {
    let as_geometric = |s: &SequenceSpec| match *s {
        SequenceSpec::Constant(x) => Some((x, 1.0)),
        SequenceSpec::Geometric { base, ratio } => Some((base, ratio)),
        SequenceSpec::Explicit { .. } => None,
    };
    let (y, gy) = as_geometric(young)?;
    let (o, go) = as_geometric(old)?;
    (gy == go && y > 0.0 && o > 0.0).then_some((y, o, gy))
}

/// Bucket a verified path by the long-run size of its pure-bubble value
/// relative to aggregate consumption: absent, vanished, or persistent.
fn classify_generic(params: &EconomyParams, path: &EquilibriumPath, bubble: &BubbleReport) -> Classification {
    let h = path.horizon;
    let divs_zero = params.dividends.is_zero();
    let pure = |t: usize| path.fiat_price[t] + if divs_zero { path.tree_price[t] } else { 0.0 };
    let mut initial = pure(0);
    let mut terminal = pure(h);
    if !divs_zero && bubble.component_sign == ComponentSign::Positive {
        initial += bubble.bubble_component[0];
        terminal += bubble.bubble_component[h];
    }
    if !(initial > 0.0) {
        return Classification::BubblelessConvergingKstar;
    }
    let scale_initial = path.c_young[0] + path.c_old[0];
    let scale_terminal = path.c_young[h] + path.c_old[h];
    let share_initial = initial / scale_initial;
    let share_terminal = terminal / scale_terminal;
    if share_terminal < VANISHING_REL * share_initial.max(1.0) {
        Classification::BubblyVanishing
    } else {
        Classification::BubblyAsymptotic
    }
}

/// Everything the report writer needs, computed once per run.
struct Verified {
    residuals: olg_core::ResidualReport,
    verification: olg_core::VerificationReport,
    bubble: BubbleReport,
    classification: Classification,
    p_growth_ratio: Option<f64>,
}

fn verify_prepared(prepared: &Prepared) -> Result<Verified, CliError> {
    let residuals = residual_report(&prepared.params, &prepared.path);
    let alloc = map_olg_to_two_cycle(&prepared.params, &prepared.path)?;
    let prices = PriceSystem::from_path(&prepared.path);
    let verification =
        verify_two_cycle_full(&prepared.params, &alloc, &prices, DEFAULT_VERIFY_TOL);
    let bubble = bubble_component_path(&prepared.path, &prepared.params.dividends);
    let classification = prepared
        .classification
        .unwrap_or_else(|| classify_generic(&prepared.params, &prepared.path, &bubble));
    let p_growth_ratio =
        report::constant_growth_ratio(&prepared.path.fiat_price, GROWTH_RATIO_TOL);
    Ok(Verified { residuals, verification, bubble, classification, p_growth_ratio })
}

fn exit_for(classification: Classification, verdict: &Verdict) -> i32 {
    if classification == Classification::NonEquilibrium {
        return 2;
    }
    match verdict {
        Verdict::Verified => 0,
        Verdict::InconclusiveTvc => 3,
        Verdict::Failed { .. } => 2,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Report emitted when a run dies before producing any path at all.
fn minimal_failure_report(
    config: &RunConfig,
    horizon: usize,
    t: usize,
    reason: &str,
) -> String {
    let p0_line = match config.p0 {
        PriceSpec::Value(v) => report::fmt_float(v),
        PriceSpec::Critical => "critical".to_string(),
    };
    format!(
        "[run]\nscenario = {}\nhorizon = {}\nq0 = {}\np0 = {}\n\n\
         [classification]\nclassification = {}\nfirst_failure_t = {}\nfailure_reason = {}\n",
        config.scenario.as_str(),
        horizon,
        report::fmt_float(config.q0),
        p0_line,
        Classification::NonEquilibrium.as_str(),
        t,
        reason,
    )
}

/// `simulate`: run one scenario, verify it, and write trajectory + report.
pub fn run_simulate(
    config: &RunConfig,
    out_dir: &Path,
    horizon_override: Option<usize>,
) -> Result<Outcome, CliError> {
    let horizon = effective_horizon(config, horizon_override)?;
    if config.scenario == Scenario::VerifyPath {
        return run_verify(config, out_dir, horizon_override);
    }
    let prepared = match dispatch(config, horizon) {
        Ok(p) => p,
        Err(CliError::Model(ModelError::NonEquilibriumPath { t, reason })) => {
            let text = minimal_failure_report(config, horizon, t, &reason);
            let path = write_file(out_dir, "report.txt", &text)?;
            return Ok(Outcome {
                exit_code: 2,
                lines: vec![
                    format!("wrote {}", path.display()),
                    format!("classification = {}", Classification::NonEquilibrium.as_str()),
                    format!("no equilibrium continuation at t={t}: {reason}"),
                ],
            });
        }
        Err(other) => return Err(other),
    };
    let verified = verify_prepared(&prepared)?;

    let trajectory = report::render_trajectory(&prepared.path, &verified.residuals);
    let data = ReportData {
        scenario: config.scenario,
        horizon: prepared.path.horizon,
        q0: prepared.q0,
        p0: prepared.p0,
        p0_was_critical: prepared.p0_was_critical,
        verification: &verified.verification,
        bubble: &verified.bubble,
        classification: verified.classification,
        special_values: &prepared.special,
        p_growth_ratio: verified.p_growth_ratio,
    };
    let report_text = report::render_report(&data);

    let trajectory_path = write_file(out_dir, "trajectory.csv", &trajectory)?;
    let report_path = write_file(out_dir, "report.txt", &report_text)?;

    let exit_code = exit_for(verified.classification, &verified.verification.verdict);
    Ok(Outcome {
        exit_code,
        lines: vec![
            format!("wrote {}", trajectory_path.display()),
            format!("wrote {}", report_path.display()),
            format!("classification = {}", verified.classification.as_str()),
            format!(
                "verdict = {}",
                match &verified.verification.verdict {
                    Verdict::Verified => "verified".to_string(),
                    Verdict::InconclusiveTvc => "inconclusive_tvc".to_string(),
                    Verdict::Failed { reason, t } => format!("failed (t={t}: {reason})"),
                }
            ),
        ],
    })
}

fn effective_horizon(
    config: &RunConfig,
    horizon_override: Option<usize>,
) -> Result<usize, CliError> {
    let horizon = horizon_override.unwrap_or(config.horizon);
    if horizon < 2 {
        return Err(ConfigError::global(format!("horizon must be at least 2, got {horizon}")).into());
    }
    Ok(horizon)
}

/// `verify`: re-read an emitted trajectory and re-run the full verification.
pub fn run_verify(
    config: &RunConfig,
    out_dir: &Path,
    horizon_override: Option<usize>,
) -> Result<Outcome, CliError> {
    let trajectory_file = config.trajectory.as_ref().ok_or_else(|| {
        ConfigError::global("verification requires the [run] key `trajectory`")
    })?;
    let text = fs::read_to_string(trajectory_file)?;
    let params = config.economy.build_params(config.scenario)?;
    let prepared = rebuild_path(&params, &text, horizon_override);
    let prepared = match prepared {
        Ok(p) => p,
        Err(CliError::Model(ModelError::NonEquilibriumPath { t, reason })) => {
            let text = minimal_failure_report(config, 0, t, &reason);
            let path = write_file(out_dir, "report.txt", &text)?;
            return Ok(Outcome {
                exit_code: 2,
                lines: vec![
                    format!("wrote {}", path.display()),
                    format!("classification = {}", Classification::NonEquilibrium.as_str()),
                    format!("no equilibrium continuation at t={t}: {reason}"),
                ],
            });
        }
        Err(other) => return Err(other),
    };
    let verified = verify_prepared(&prepared)?;
    let data = ReportData {
        scenario: Scenario::VerifyPath,
        horizon: prepared.path.horizon,
        q0: prepared.q0,
        p0: prepared.p0,
        p0_was_critical: false,
        verification: &verified.verification,
        bubble: &verified.bubble,
        classification: verified.classification,
        special_values: &prepared.special,
        p_growth_ratio: verified.p_growth_ratio,
    };
    let report_text = report::render_report(&data);
    let report_path = write_file(out_dir, "report.txt", &report_text)?;
    let exit_code = exit_for(verified.classification, &verified.verification.verdict);
    Ok(Outcome {
        exit_code,
        lines: vec![
            format!("wrote {}", report_path.display()),
            format!("classification = {}", verified.classification.as_str()),
            format!(
                "verdict = {}",
                match &verified.verification.verdict {
                    Verdict::Verified => "verified".to_string(),
                    Verdict::InconclusiveTvc => "inconclusive_tvc".to_string(),
                    Verdict::Failed { reason, t } => format!("failed (t={t}: {reason})"),
                }
            ),
        ],
    })
}

/// Parse a trajectory table back into a path.
///
/// Only the primitive columns (`K`, `q`, `p`, and `R` for exchange paths) are
/// trusted; factor prices and consumptions are re-derived so the rebuilt path
/// is bitwise identical to one constructed natively.  The final capital stock
/// `K_{H+1}` is not a column, so it is reconstructed from the date-`H` young
/// budget `K_{H+1} = e^y_H + w_H - c^y_H - q_H - p_H` on production paths.
fn rebuild_path(
    params: &EconomyParams,
    text: &str,
    horizon_override: Option<usize>,
) -> Result<Prepared, CliError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != report::TRAJECTORY_HEADER {
        return Err(ConfigError::global(format!(
            "trajectory header mismatch: expected `{}`, found `{header}`",
            report::TRAJECTORY_HEADER
        ))
        .into());
    }
    let mut rows: Vec<[f64; 12]> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 12 {
            return Err(ConfigError::at_line(
                line_no,
                format!("expected 12 columns, found {}", cells.len()),
            )
            .into());
        }
        let mut row = [0.0; 12];
        for (j, cell) in cells.iter().enumerate() {
            row[j] = cell.trim().parse::<f64>().map_err(|_| {
                ConfigError::at_line(line_no, format!("column {} is not a number: `{cell}`", j + 1))
            })?;
        }
        if row[0] as usize != rows.len() {
            return Err(ConfigError::at_line(
                line_no,
                format!("dates must run 0,1,2,...; found t={}", row[0]),
            )
            .into());
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(ConfigError::global("trajectory needs at least two dates").into());
    }
    if let Some(t) = horizon_override {
        if t + 1 < rows.len() {
            rows.truncate(t + 1);
        }
    }
    let horizon = rows.len() - 1;

    let tree: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let fiat: Vec<f64> = rows.iter().map(|r| r[3]).collect();
    let path = if params.technology.is_some() {
        let mut capital: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let last = &rows[horizon];
        let (w_h, cy_h, q_h, p_h) = (last[5], last[6], last[2], last[3]);
        let k_final = params.endow_young.at(horizon) + w_h - cy_h - q_h - p_h;
        capital.push(k_final);
        EquilibriumPath::from_production(params, capital, tree, fiat)?
    } else {
        let gross: Vec<f64> = rows.iter().map(|r| r[4]).collect();
        EquilibriumPath::from_exchange(params, tree, fiat, gross)?
    };
    Ok(Prepared {
        q0: path.tree_price[0],
        p0: path.fiat_price[0],
        params: params.clone(),
        path,
        classification: None,
        special: BTreeMap::new(),
        p0_was_critical: false,
    })
}

/// One grid point of a sweep, executed independently of its neighbours.
fn sweep_point(config: &RunConfig, horizon: usize, index: usize, value: f64) -> SweepRow {
    let mut point = config.clone();
    match config.sweep.as_ref().expect("sweep config present").variable {
        SweepVariable::P0 => point.p0 = PriceSpec::Value(value),
        SweepVariable::Q0 => point.q0 = value,
    }
    let prepared = match dispatch(&point, horizon) {
        Ok(p) => p,
        Err(CliError::Model(ModelError::NonEquilibriumPath { t, .. })) => {
            return SweepRow {
                index,
                value,
                classification: Classification::NonEquilibrium,
                limit_k: None,
                limit_q: None,
                limit_p: None,
                first_failure_t: Some(t),
            }
        }
        Err(_) => {
            return SweepRow {
                index,
                value,
                classification: Classification::NonEquilibrium,
                limit_k: None,
                limit_q: None,
                limit_p: None,
                first_failure_t: None,
            }
        }
    };
    let classification = prepared.classification.unwrap_or_else(|| {
        let bubble = bubble_component_path(&prepared.path, &prepared.params.dividends);
        classify_generic(&prepared.params, &prepared.path, &bubble)
    });
    let h = prepared.path.horizon;
    let from_special = |key: &str| prepared.special.get(key).copied();
    SweepRow {
        index,
        value,
        classification,
        limit_k: from_special("limit_K").or(Some(prepared.path.capital[h + 1])),
        limit_q: from_special("limit_q").or(Some(prepared.path.tree_price[h])),
        limit_p: from_special("limit_p").or(Some(prepared.path.fiat_price[h])),
        first_failure_t: from_special("first_failure_t").map(|t| t as usize),
    }
}

/// `sweep`: classify a grid of initial prices, in parallel, in grid order.
pub fn run_sweep(
    config: &RunConfig,
    out_dir: &Path,
    horizon_override: Option<usize>,
    jobs: Option<usize>,
) -> Result<Outcome, CliError> {
    let horizon = effective_horizon(config, horizon_override)?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::global("the sweep verb requires a [sweep] section"))?;
    let sweepable = match (config.scenario, sweep.variable) {
        (Scenario::VerifyPath | Scenario::ExchangeLog, _) => false,
        (_, SweepVariable::P0) => true,
        (Scenario::LinearTech | Scenario::OlgGeneral, SweepVariable::Q0) => true,
        (_, SweepVariable::Q0) => false,
    };
    if !sweepable {
        return Err(ConfigError::global(format!(
            "scenario {} has no free {} to sweep",
            config.scenario.as_str(),
            match sweep.variable {
                SweepVariable::P0 => "p0",
                SweepVariable::Q0 => "q0",
            }
        ))
        .into());
    }
    if config.p0 == PriceSpec::Critical && sweep.variable == SweepVariable::P0 {
        // The swept values replace p0 anyway; disallow the sentinel to keep
        // the grid unambiguous.
        return Err(
            ConfigError::global("a p0 sweep replaces p0; remove `p0 = critical`").into()
        );
    }

    let count = sweep.count;
    let step = (sweep.max - sweep.min) / (count - 1) as f64;
    let grid: Vec<(usize, f64)> =
        (0..count).map(|i| (i, sweep.min + step * i as f64)).collect();

    let rows: Vec<SweepRow> = match jobs {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::global(format!("worker pool: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                grid.par_iter().map(|&(i, v)| sweep_point(config, horizon, i, v)).collect()
            })
        }
        _ => {
            use rayon::prelude::*;
            grid.par_iter().map(|&(i, v)| sweep_point(config, horizon, i, v)).collect()
        }
    };

    let table = report::render_sweep(&rows);
    let sweep_path = write_file(out_dir, "sweep.csv", &table)?;
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for row in &rows {
        *counts.entry(row.classification.as_str()).or_insert(0) += 1;
    }
    let summary = counts
        .iter()
        .map(|(k, v)| format!("{k}: {v}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome {
        exit_code: 0,
        lines: vec![
            format!("wrote {}", sweep_path.display()),
            format!("classified {} grid points ({summary})", rows.len()),
        ],
    })
}
