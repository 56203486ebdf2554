//! Flat-file emission: trajectory tables, structured run reports, and sweep
//! classification tables.
//!
//! Every float is printed as `{:.16e}` (17 significant digits), which
//! round-trips an `f64` losslessly; re-running a config therefore produces
//! byte-identical files, and a trajectory can be re-read without drift.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use olg_core::{
    BubbleReport, ComponentSign, EquilibriumPath, MontrucchioVerdict, ResidualReport, TvcTail,
    Verdict, VerificationReport,
};

use crate::config::Scenario;
use olg_core::scenarios::Classification;

/// Header of the trajectory table; columns t = date, then levels, then the
/// scaled equilibrium residuals recomputed from the stored path.
pub const TRAJECTORY_HEADER: &str =
    "t,K,q,p,R,w,c_young,c_old,euler_resid,price_resid,fiat_resid,resource_resid";

/// Header of the sweep classification table.
pub const SWEEP_HEADER: &str = "index,value,classification,limit_K,limit_q,limit_p,first_failure_t";

/// Lossless decimal rendering of a double.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Render the per-date trajectory table (one row per `t = 0..=horizon`).
pub fn render_trajectory(path: &EquilibriumPath, residuals: &ResidualReport) -> String {
    assert_eq!(residuals.rows.len(), path.horizon + 1);
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for row in &residuals.rows {
        let t = row.t;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            t,
            fmt_float(path.capital[t]),
            fmt_float(path.tree_price[t]),
            fmt_float(path.fiat_price[t]),
            fmt_float(path.gross_return[t]),
            fmt_float(path.wage[t]),
            fmt_float(path.c_young[t]),
            fmt_float(path.c_old[t]),
            fmt_float(row.euler),
            fmt_float(row.tree_pricing),
            fmt_float(row.fiat_pricing),
            fmt_float(row.resource),
        );
    }
    out
}

/// One grid point of a sweep, ready for serialisation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub value: f64,
    pub classification: Classification,
    pub limit_k: Option<f64>,
    pub limit_q: Option<f64>,
    pub limit_p: Option<f64>,
    pub first_failure_t: Option<usize>,
}

/// Render the sweep table; absent limits and failure dates are empty cells.
pub fn render_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.index,
            fmt_float(row.value),
            row.classification.as_str(),
            fmt_opt(row.limit_k),
            fmt_opt(row.limit_q),
            fmt_opt(row.limit_p),
            row.first_failure_t.map(|t| t.to_string()).unwrap_or_default(),
        );
    }
    out
}

/// Everything the structured report needs, already computed.
pub struct ReportData<'a> {
    pub scenario: Scenario,
    pub horizon: usize,
    pub q0: f64,
    pub p0: f64,
    pub p0_was_critical: bool,
    pub verification: &'a VerificationReport,
    pub bubble: &'a BubbleReport,
    pub classification: Classification,
    /// Named scalars, merged from the scenario and run-level diagnostics.
    pub special_values: &'a BTreeMap<String, f64>,
    /// Constant per-period fiat growth factor, when the path has one.
    pub p_growth_ratio: Option<f64>,
}

fn verdict_str(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Verified => "verified",
        Verdict::Failed { .. } => "failed",
        Verdict::InconclusiveTvc => "inconclusive_tvc",
    }
}

fn sign_str(sign: ComponentSign) -> &'static str {
    match sign {
        ComponentSign::Zero => "zero",
        ComponentSign::Positive => "positive",
        ComponentSign::Negative => "negative",
        ComponentSign::Mixed => "mixed",
    }
}

fn montrucchio_str(verdict: MontrucchioVerdict) -> &'static str {
    match verdict {
        MontrucchioVerdict::Bubbly => "bubbly",
        MontrucchioVerdict::Bubbleless => "bubbleless",
        MontrucchioVerdict::Undetermined => "undetermined",
    }
}

fn write_tail(out: &mut String, prefix: &str, tail: &TvcTail) {
    let _ = writeln!(out, "{prefix}_slope_per_period = {}", fmt_float(tail.slope_per_period));
    let _ = writeln!(out, "{prefix}_slope_per_pair = {}", fmt_float(tail.slope_per_pair));
    let _ = writeln!(out, "{prefix}_first = {}", fmt_float(tail.first));
    let _ = writeln!(out, "{prefix}_last = {}", fmt_float(tail.last));
    let _ = writeln!(out, "{prefix}_certified = {}", tail.certified);
}

/// Render the structured key=value report.
pub fn render_report(data: &ReportData<'_>) -> String {
    let mut out = String::new();

    let _ = writeln!(out, "[run]");
    let _ = writeln!(out, "scenario = {}", data.scenario.as_str());
    let _ = writeln!(out, "horizon = {}", data.horizon);
    let _ = writeln!(out, "q0 = {}", fmt_float(data.q0));
    let _ = writeln!(out, "p0 = {}", fmt_float(data.p0));
    if data.p0_was_critical {
        let _ = writeln!(out, "p0_mode = critical");
    }
    out.push('\n');

    let v = data.verification;
    let _ = writeln!(out, "[verification]");
    let _ = writeln!(out, "verdict = {}", verdict_str(&v.verdict));
    if let Verdict::Failed { reason, t } = &v.verdict {
        let _ = writeln!(out, "failure_reason = {reason}");
        let _ = writeln!(out, "failure_t = {t}");
    }
    let _ = writeln!(out, "euler_equalities = {}", fmt_float(v.euler_equalities));
    let _ = writeln!(out, "foc_inequalities = {}", fmt_float(v.foc_inequalities));
    let _ = writeln!(out, "budget_residuals = {}", fmt_float(v.budget_residuals));
    let _ = writeln!(out, "clearing_residuals = {}", fmt_float(v.clearing_residuals));
    let _ = writeln!(out, "pricing_residuals = {}", fmt_float(v.pricing_residuals));
    let _ = writeln!(out, "profit_residuals = {}", fmt_float(v.profit_residuals));
    let _ = writeln!(out, "multiplier_min = {}", fmt_float(v.multiplier_min));
    let _ = writeln!(out, "comp_slackness_max = {}", fmt_float(v.comp_slackness_max));
    let _ = writeln!(out, "tvc_variant = {}", v.tvc_variant);
    write_tail(&mut out, "tvc_even", &v.tvc_even);
    write_tail(&mut out, "tvc_odd", &v.tvc_odd);
    out.push('\n');

    let b = data.bubble;
    let _ = writeln!(out, "[bubble]");
    let _ = writeln!(out, "recursion_residual_max = {}", fmt_float(b.recursion_residual_max));
    let _ = writeln!(out, "component_sign = {}", sign_str(b.component_sign));
    let _ = writeln!(out, "montrucchio = {}", montrucchio_str(b.montrucchio));
    let _ = writeln!(out, "tail_exact = {}", b.tail_exact);
    let _ = writeln!(out, "pure_bubble = {}", b.pure_bubble);
    let _ = writeln!(out, "fv0 = {}", fmt_float(b.fv_truncated[0]));
    let _ = writeln!(out, "bubble0 = {}", fmt_float(b.bubble_component[0]));
    out.push('\n');

    let _ = writeln!(out, "[classification]");
    let _ = writeln!(out, "classification = {}", data.classification.as_str());
    if let Some(ratio) = data.p_growth_ratio {
        let _ = writeln!(out, "p_growth_ratio = {}", fmt_float(ratio));
    }
    out.push('\n');

    let _ = writeln!(out, "[special_values]");
    for (key, value) in data.special_values {
        let _ = writeln!(out, "{key} = {}", fmt_float(*value));
    }

    out
}

/// The constant ratio `x_{t+1} / x_t` of a series, when it has one to within
/// relative tolerance `tol`; `None` for series that hit zero or wobble.
pub fn constant_growth_ratio(series: &[f64], tol: f64) -> Option<f64> {
    if series.len() < 2 || series.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    let reference = series[1] / series[0];
    for pair in series.windows(2) {
        let ratio = pair[1] / pair[0];
        if (ratio / reference - 1.0).abs() > tol {
            return None;
        }
    }
    Some(reference)
}
