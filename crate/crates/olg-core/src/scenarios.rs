//! Closed-form equilibrium families.
//!
//! Four families with known structure, each returning a fully assembled
//! [`EquilibriumPath`] that downstream verification treats like any other:
//!
//! * **Log exchange with dividends** — with log utility and no old-age
//!   endowment the tree price is a fixed fraction of the young endowment,
//!   `q_t = beta/(1+beta) * e^y_t`, and returns follow from the pricing
//!   recursion.
//! * **Fiat exchange (isoelastic)** — a stationary price level exists when
//!   endowment growth and discounting line up; away from it the price follows
//!   a monotone one-step recursion, inverted here by bracketed bisection.
//!   The stationary level is a repelling fixed point of that recursion, so
//!   initial prices within `1e-12` relative of it are snapped onto the exact
//!   closed form instead of being destroyed by forward iteration.
//! * **Cobb-Douglas with fiat money** — log utility, full depreciation, no
//!   endowments.  Initial fiat prices in `[0, b_bar]` produce equilibria:
//!   zero gives the bubbleless path converging to the low-interest steady
//!   state, the critical value `b_bar` gives the path whose bubble stays
//!   asymptotically relevant, interior values give vanishing bubbles, and
//!   anything above `b_bar` crowds out capital until savings fail.  The
//!   critical path is likewise a repelling knife edge and is emitted in
//!   closed form.
//! * **Linear technology** — constant returns make every admissible initial
//!   tree price an equilibrium: a continuum indexed by the bubble component
//!   `q_0 - D`, where `D` is the discounted dividend stream.  The tree price
//!   is propagated in the numerically safe form `R^t * (bubble + tail_t)`,
//!   which cannot go negative when the bubble component is zero.

use std::collections::BTreeMap;

use crate::economy::{
    steady_state_and_gamma, EconomyParams, SequenceSpec, Technology, Utility,
};
use crate::error::{ModelError, Result};
use crate::numeric::{bisect_polished, rel_gap};
use crate::sim::EquilibriumPath;
use crate::tol;

/// Long-run behaviour of a scenario path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// No bubble; capital converges to the bubbleless steady state.
    BubblelessConvergingKstar,
    /// A bubble that stays proportionally relevant forever.
    BubblyAsymptotic,
    /// A bubble that is priced but decays to zero relative to the economy.
    BubblyVanishing,
    /// The initial prices admit no equilibrium continuation.
    NonEquilibrium,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::BubblelessConvergingKstar => "bubbleless_converging_Kstar",
            Classification::BubblyAsymptotic => "bubbly_asymptotic",
            Classification::BubblyVanishing => "bubbly_vanishing",
            Classification::NonEquilibrium => "non_equilibrium",
        }
    }
}

/// A scenario path plus its classification and headline quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    /// The economy the path belongs to, for downstream verification.
    pub params: EconomyParams,
    pub path: EquilibriumPath,
    pub classification: Classification,
    /// Named scalars (steady state, critical price, limits, ...); ordered map
    /// so reports serialise deterministically.
    pub special_values: BTreeMap<&'static str, f64>,
}

/// Log-utility exchange economy with a dividend tree and no old-age
/// endowment: the savings rule pins `q_t = beta/(1+beta) e^y_t` and the
/// pricing recursion pins every return.
pub fn exchange_log_dividend_path(
    params: &EconomyParams,
    horizon: usize,
) -> Result<EquilibriumPath> {
    params.validate()?;
    if params.technology.is_some() {
        return Err(ModelError::RegimeMismatch(
            "log dividend closed form applies to exchange economies".into(),
        ));
    }
    if params.utility.family != crate::economy::UtilityFamily::Logarithmic {
        return Err(ModelError::RegimeMismatch(
            "log dividend closed form requires logarithmic utility".into(),
        ));
    }
    if !params.endow_old.is_zero() {
        return Err(ModelError::RegimeMismatch(
            "log dividend closed form requires a zero old-age endowment".into(),
        ));
    }
    if !params.endow_young.strictly_positive() {
        return Err(ModelError::RegimeMismatch(
            "log dividend closed form requires strictly positive young endowments".into(),
        ));
    }
    let beta = params.beta();
    let frac = beta / (1.0 + beta);
    let mut tree = Vec::with_capacity(horizon + 1);
    let mut gross = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        tree.push(frac * params.endow_young.at(t));
        if t == 0 {
            gross.push(1.0);
        } else {
            gross.push((tree[t] + params.dividends.at(t)) / tree[t - 1]);
        }
    }
    EquilibriumPath::from_exchange(params, tree, vec![0.0; horizon + 1], gross)
}

/// Stationary normalised fiat price of the growing-endowment exchange economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryFiat {
    /// The stationary price level `p_t = price * growth^t`, when one exists
    /// algebraically (it may still be infeasible).
    pub price: Option<f64>,
    /// True when the stationary path is an equilibrium: positive price and
    /// discounted endowment utility vanishing in the limit.
    pub feasible: bool,
}

/// Solve for the stationary fiat price of the endowment economy
/// `(e^y_t, e^o_t) = (young, old) * growth^t` with isoelastic curvature
/// `sigma` (1 selects log) and discount factor `beta`.
///
/// Stationarity makes the Euler equation linear in the price: with
/// `m = (beta * growth^(1-sigma))^(1/sigma)` the price is
/// `(m * young - old) / (1 + m)`; it is positive exactly when
/// `beta * growth * (young / (old * growth))^sigma > 1`, and the path is an
/// equilibrium when additionally `m < 1`.
pub fn fiat_stationary_price(
    young: f64,
    old: f64,
    growth: f64,
    sigma: f64,
    beta: f64,
) -> Result<StationaryFiat> {
    if !(young > 0.0) || !(old > 0.0) || !(growth > 0.0) || !(sigma > 0.0) {
        return Err(ModelError::InvalidInput(format!(
            "stationary fiat price needs positive endowments, growth, and curvature; \
             got young={young}, old={old}, growth={growth}, sigma={sigma}"
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ModelError::InvalidInput(format!(
            "discount factor must lie in (0,1), got {beta}"
        )));
    }
    let m = (beta * growth.powf(1.0 - sigma)).powf(1.0 / sigma);
    let price = (m * young - old) / (1.0 + m);
    let positive = price > 0.0;
    Ok(StationaryFiat {
        price: positive.then_some(price),
        feasible: positive && m < 1.0,
    })
}

/// Economy parameters for the pure-fiat exchange family.
pub fn fiat_params(
    young: &SequenceSpec,
    old: &SequenceSpec,
    sigma: f64,
    beta: f64,
) -> Result<EconomyParams> {
    let utility = if sigma == 1.0 { Utility::log(beta) } else { Utility::isoelastic(sigma, beta) };
    let params = EconomyParams::new(
        utility,
        None,
        SequenceSpec::zero(),
        young.clone(),
        old.clone(),
        0.0,
    );
    params.validate()?;
    Ok(params)
}

/// Fiat-money path of the endowment exchange economy, one path per admissible
/// initial price (an equilibrium continuum).
///
/// The price recursion `p_t u'(e^y_t - p_t) = beta p_{t+1} u'(e^o_{t+1} + p_{t+1})`
/// is inverted for `p_{t+1}` by bracketed bisection on the branch below the
/// summand's peak; the upper branch prices the following young generation out
/// of the market and is discarded.  Initial prices within `1e-12` relative of
/// the stationary level are snapped onto the exact stationary closed form,
/// because that fixed point repels forward iteration.
pub fn fiat_continuum_path(
    young: &SequenceSpec,
    old: &SequenceSpec,
    sigma: f64,
    beta: f64,
    p0: f64,
    horizon: usize,
) -> Result<EquilibriumPath> {
    if !young.strictly_positive() || !old.strictly_positive() {
        return Err(ModelError::InvalidInput(
            "fiat continuum requires strictly positive endowment sequences".into(),
        ));
    }
    if !(sigma > 0.0) {
        return Err(ModelError::InvalidInput(format!("curvature must be positive, got {sigma}")));
    }
    let params = fiat_params(young, old, sigma, beta)?;
    if p0 < 0.0 {
        return Err(ModelError::InvalidInput(format!("initial fiat price {p0} is negative")));
    }

    // Discounted marginal utility of the endowment must vanish in the limit,
    // otherwise no fiat path (not even the zero one) satisfies the long-run
    // optimality conditions.
    let rho = young.tail_ratio();
    if !(beta * rho.powf(1.0 - sigma) < 1.0) {
        return Err(ModelError::NonEquilibriumPath {
            t: 0,
            reason: format!(
                "discounted endowment condition fails: beta * growth^(1-sigma) = {} >= 1",
                beta * rho.powf(1.0 - sigma)
            ),
        });
    }

    let u = params.utility;
    let feasible_at = |t: usize, p: f64| -> Result<()> {
        let y = young.at(t);
        let o = old.at(t);
        let scale = y.max(1.0);
        if p > y || y - o + 1e-12 * scale < 2.0 * p {
            return Err(ModelError::NonEquilibriumPath {
                t,
                reason: format!(
                    "fiat price {p:e} violates the transfer bound e^y - e^o >= 2p (e^y={y}, e^o={o})"
                ),
            });
        }
        Ok(())
    };

    // Knife edge: exactly stationary initial price.
    if p0 > 0.0 {
        if let (Some((yb, gy)), Some((ob, go))) = (young.as_geometric(), old.as_geometric()) {
            if gy == go {
                let stat = fiat_stationary_price(yb, ob, gy, sigma, beta)?;
                if let (Some(level), true) = (stat.price, stat.feasible) {
                    if rel_gap(p0, level) <= tol::KNIFE_EDGE_REL {
                        let mut fiat = Vec::with_capacity(horizon + 1);
                        let mut gross = Vec::with_capacity(horizon + 1);
                        let mut p = level;
                        for t in 0..=horizon {
                            feasible_at(t, p)?;
                            fiat.push(p);
                            p *= gy;
                            gross.push(if t == 0 { 1.0 } else { gy });
                        }
                        return EquilibriumPath::from_exchange(
                            &params,
                            vec![0.0; horizon + 1],
                            fiat,
                            gross,
                        );
                    }
                }
            }
        }
    }

    let mut fiat = Vec::with_capacity(horizon + 1);
    let mut gross = Vec::with_capacity(horizon + 1);
    fiat.push(p0);
    gross.push(1.0);
    feasible_at(0, p0)?;

    let mut p = p0;
    for t in 0..horizon {
        let y = young.at(t);
        let o_next = old.at(t + 1);
        let p_next = if p == 0.0 {
            0.0
        } else {
            let target = p * u.marginal(y - p);
            // f(x) = beta x u'(e^o_{t+1} + x) - target, increasing up to the
            // peak x = e^o/(sigma-1) (sigma > 1) and increasing everywhere
            // otherwise.  Because u' is decreasing, f is still negative at
            // x_low = target / (beta u'(e^o_{t+1})), which therefore brackets
            // the root from below no matter how small the price has become.
            let f = |x: f64| beta * x * u.marginal(o_next + x) - target;
            let x_low = target / (beta * u.marginal(o_next));
            // Once the price is small enough that `o_next + x` rounds to
            // `o_next`, x_low solves the recursion to a unit in the last
            // place and bracketing is meaningless.
            if f(x_low) >= 0.0 {
                feasible_at(t + 1, x_low)?;
                gross.push(x_low / p);
                fiat.push(x_low);
                p = x_low;
                continue;
            }
            let upper = if sigma > 1.0 {
                let peak = o_next / (sigma - 1.0);
                if !(f(peak) > 0.0) {
                    return Err(ModelError::NonEquilibriumPath {
                        t: t + 1,
                        reason: format!(
                            "fiat valuation cannot keep up: the price recursion has no solution \
                             (needed {target:e}, maximum {:e})",
                            beta * peak * u.marginal(o_next + peak)
                        ),
                    });
                }
                peak
            } else {
                let mut hi = x_low.max(p).max(o_next) * 2.0;
                let mut guard = 0;
                while !(f(hi) > 0.0) {
                    hi *= 2.0;
                    guard += 1;
                    if guard > 300 {
                        return Err(ModelError::NonEquilibriumPath {
                            t: t + 1,
                            reason: "fiat price recursion has no finite solution".into(),
                        });
                    }
                }
                hi
            };
            bisect_polished(f, x_low, upper, tol::BISECT_REL).root
        };
        feasible_at(t + 1, p_next)?;
        gross.push(if p > 0.0 {
            p_next / p
        } else {
            // Autarkic shadow return keeps the recorded series Euler-consistent.
            u.marginal(y) / (beta * u.marginal(o_next))
        });
        fiat.push(p_next);
        p = p_next;
    }

    EquilibriumPath::from_exchange(&params, vec![0.0; horizon + 1], fiat, gross)
}

/// Economy parameters for the Cobb-Douglas fiat-bubble family.
pub fn cobb_douglas_params(alpha: f64, tfp: f64, beta: f64, k0: f64) -> EconomyParams {
    EconomyParams::new(
        Utility::log(beta),
        Some(Technology::cobb_douglas(tfp, alpha, 1.0)),
        SequenceSpec::zero(),
        SequenceSpec::zero(),
        SequenceSpec::zero(),
        k0,
    )
}

/// Fiat-money path of the log/Cobb-Douglas economy, classified against the
/// critical initial price `b_bar = (gamma-1)/gamma * beta/(1+beta) * w_0`.
///
/// * `p0 = 0` — bubbleless, converges to the steady state.
/// * `p0 in (0, b_bar)` — vanishing bubble (stable forward recursion).
/// * `p0 = b_bar` (within `1e-12` relative) — the asymptotic bubble, emitted
///   in closed form `K_{t+1} = alpha A K_t^alpha`, `p_t = (gamma-1) K_{t+1}`,
///   because the knife edge repels forward iteration at rate `gamma` per step.
/// * `p0 > b_bar` (or any positive price when `gamma <= 1`) — not an
///   equilibrium; the recursion is run anyway and the classification records
///   the first date at which savings fail.
///
/// The returned result still contains the partial path for non-equilibria
/// (truncated just before the failure), so sweeps can tabulate them; an
/// immediate failure at `t = 0` has no path at all and errors instead.
pub fn cobb_douglas_bubble_path(
    alpha: f64,
    tfp: f64,
    beta: f64,
    k0: f64,
    p0: f64,
    horizon: usize,
) -> Result<ScenarioResult> {
    if horizon < 1 {
        return Err(ModelError::InvalidInput("horizon must be at least 1".into()));
    }
    let params = cobb_douglas_params(alpha, tfp, beta, k0);
    params.validate()?;
    if p0 < 0.0 {
        return Err(ModelError::InvalidInput(format!("initial fiat price {p0} is negative")));
    }
    let tech = params.technology.as_ref().unwrap();
    let ss = steady_state_and_gamma(&params)?;
    let gamma = ss.gamma;
    let w0 = tech.eval(k0).wage;
    let savings0 = beta / (1.0 + beta) * w0;
    let b_bar = if gamma > 1.0 { savings0 * (gamma - 1.0) / gamma } else { 0.0 };

    let mut special: BTreeMap<&'static str, f64> = BTreeMap::new();
    special.insert("gamma", gamma);
    special.insert("rho", ss.rho);
    special.insert("K_star", ss.k_star);
    if gamma > 1.0 {
        special.insert("b_bar", b_bar);
    }

    // Closed-form critical path.
    if gamma > 1.0 && p0 > 0.0 && rel_gap(p0, b_bar) <= tol::KNIFE_EDGE_REL {
        let mut capital = Vec::with_capacity(horizon + 2);
        let mut fiat = Vec::with_capacity(horizon + 1);
        capital.push(k0);
        let mut k = k0;
        for _ in 0..=horizon {
            let k_next = alpha * tfp * k.powf(alpha);
            capital.push(k_next);
            fiat.push((gamma - 1.0) * k_next);
            k = k_next;
        }
        let path =
            EquilibriumPath::from_production(&params, capital, vec![0.0; horizon + 1], fiat)?;
        let limit_k = (alpha * tfp).powf(1.0 / (1.0 - alpha));
        special.insert("z0", 1.0 / (gamma - 1.0));
        special.insert("limit_K", limit_k);
        special.insert("limit_p", (gamma - 1.0) * limit_k);
        special.insert("p_stationary", (gamma - 1.0) * limit_k);
        return Ok(ScenarioResult {
            params,
            path,
            classification: Classification::BubblyAsymptotic,
            special_values: special,
        });
    }

    // Forward recursion: K_{t+1} = beta/(1+beta) w_t - p_t, p_{t+1} = R_{t+1} p_t.
    let frac = beta / (1.0 + beta);
    let mut capital = vec![k0];
    let mut fiat = vec![p0];
    let mut failure_t: Option<usize> = None;
    let mut k = k0;
    let mut p = p0;
    for t in 0..=horizon {
        let fp = tech.eval(k);
        let k_next = frac * fp.wage - p;
        if !(k_next > 0.0) {
            failure_t = Some(t);
            break;
        }
        capital.push(k_next);
        if t < horizon {
            let p_next = p * tech.eval(k_next).gross_return;
            fiat.push(p_next);
            p = p_next;
        }
        k = k_next;
    }

    if let Some(t_fail) = failure_t {
        special.insert("first_failure_t", t_fail as f64);
        if p0 > 0.0 {
            special.insert("z0", if fiat[0] > 0.0 { capital.get(1).copied().unwrap_or(0.0) / fiat[0] } else { 0.0 });
        }
        if t_fail == 0 {
            return Err(ModelError::NonEquilibriumPath {
                t: 0,
                reason: format!(
                    "initial fiat price {p0:e} already exceeds date-0 savings {savings0:e}"
                ),
            });
        }
        // Partial path up to the last fully valid period.
        let usable = t_fail - 1;
        capital.truncate(usable + 2);
        fiat.truncate(usable + 1);
        let path = EquilibriumPath::from_production(
            &params,
            capital,
            vec![0.0; usable + 1],
            fiat,
        )?;
        return Ok(ScenarioResult {
            params,
            path,
            classification: Classification::NonEquilibrium,
            special_values: special,
        });
    }

    let path = EquilibriumPath::from_production(&params, capital, vec![0.0; horizon + 1], fiat)?;
    let classification = if p0 == 0.0 {
        special.insert("limit_K", ss.k_star);
        special.insert("limit_p", 0.0);
        Classification::BubblelessConvergingKstar
    } else {
        special.insert("z0", path.capital[1] / p0);
        special.insert("limit_K", ss.k_star);
        special.insert("limit_p", 0.0);
        Classification::BubblyVanishing
    };
    Ok(ScenarioResult { params, path, classification, special_values: special })
}

/// Economy parameters for the linear-technology family.
pub fn linear_params(
    slope: f64,
    intercept: f64,
    delta: f64,
    beta: f64,
    dividends: &SequenceSpec,
) -> EconomyParams {
    EconomyParams::new(
        Utility::log(beta),
        Some(Technology::linear(slope, intercept, delta)),
        dividends.clone(),
        SequenceSpec::zero(),
        SequenceSpec::zero(),
        1.0, // replaced by the stationary choice below
    )
}

/// Equilibrium continuum of the linear-technology economy with constant gross
/// return `R = 1 - delta + A <= 1`.
///
/// Admissible initial tree prices form the interval
/// `[D, beta/(1+beta) B - p0)` with `D` the discounted dividend stream; the
/// tree price then evolves as `q_t = R^t (q_0 - D_t)` with `D_t` the
/// dividends already paid, computed here in the cancellation-free form
/// `R^t ((q_0 - D) + tail_t)`.  Initial capital is set to the stationary
/// choice `K_0 = K_1`, which the date-0 conditions leave free.
pub fn linear_tech_path(
    slope: f64,
    intercept: f64,
    delta: f64,
    beta: f64,
    dividends: &SequenceSpec,
    q0: f64,
    p0: f64,
    horizon: usize,
) -> Result<ScenarioResult> {
    if horizon < 1 {
        return Err(ModelError::InvalidInput("horizon must be at least 1".into()));
    }
    let mut params = linear_params(slope, intercept, delta, beta, dividends);
    params.validate()?;
    if q0 < 0.0 || p0 < 0.0 {
        return Err(ModelError::InvalidInput(format!(
            "asset prices must be non-negative, got q0={q0}, p0={p0}"
        )));
    }
    let gross = 1.0 - delta + slope;
    if !(gross > 0.0 && gross <= 1.0) {
        return Err(ModelError::RegimeMismatch(format!(
            "the linear continuum requires a gross return in (0, 1], got {gross}"
        )));
    }
    let savings = beta / (1.0 + beta) * intercept;

    let discounted = match dividends.discounted_tail(gross, 0, 0) {
        Some(d) => d,
        None => {
            return Err(ModelError::NonEquilibriumPath {
                t: 0,
                reason: "discounted dividend stream diverges at this return".into(),
            })
        }
    };

    // Bubble component of the initial tree price, snapped to zero when the
    // input sits within float tolerance of the admissibility boundary.
    let mut bubble0 = q0 - discounted;
    if bubble0.abs() <= tol::KNIFE_EDGE_REL * (1.0 + q0) {
        bubble0 = 0.0;
    }
    if bubble0 < 0.0 {
        return Err(ModelError::NonEquilibriumPath {
            t: 0,
            reason: format!(
                "initial tree price {q0:e} is below the discounted dividend stream {discounted:e}"
            ),
        });
    }
    if !(q0 + p0 < savings) {
        return Err(ModelError::NonEquilibriumPath {
            t: 0,
            reason: format!(
                "initial asset value {:e} leaves no room for capital out of savings {savings:e}",
                q0 + p0
            ),
        });
    }

    let mut capital = Vec::with_capacity(horizon + 2);
    let mut tree = Vec::with_capacity(horizon + 1);
    let mut fiat = Vec::with_capacity(horizon + 1);
    let mut r_pow = 1.0;
    for t in 0..=horizon {
        let tail_t = dividends
            .discounted_tail(gross, 0, t)
            .expect("tail converges because the full stream does");
        let q_t = r_pow * (bubble0 + tail_t);
        let p_t = r_pow * p0;
        let k_next = savings - q_t - p_t;
        if !(k_next > 0.0) {
            // Cannot happen for admissible inputs (q_t + p_t <= q_0 + p_0),
            // but guard against pathological dividend tails.
            return Err(ModelError::NonEquilibriumPath {
                t,
                reason: format!("savings {savings:e} exhausted by asset value {:e}", q_t + p_t),
            });
        }
        if t == 0 {
            // Stationary initial stock: the date-0 conditions leave K_0 free.
            capital.push(k_next);
        }
        capital.push(k_next);
        tree.push(q_t);
        fiat.push(p_t);
        r_pow *= gross;
    }
    params.k0 = capital[0];

    let limit_q = if gross == 1.0 { bubble0 } else { 0.0 };
    let limit_p = if gross == 1.0 { p0 } else { 0.0 };
    let classification = if bubble0 > 0.0 || p0 > 0.0 {
        if gross == 1.0 {
            Classification::BubblyAsymptotic
        } else {
            Classification::BubblyVanishing
        }
    } else {
        Classification::BubblelessConvergingKstar
    };

    let mut special: BTreeMap<&'static str, f64> = BTreeMap::new();
    special.insert("gross_return", gross);
    special.insert("discounted_dividends", discounted);
    special.insert("savings", savings);
    special.insert("sup_fiat_price", savings - discounted);
    special.insert("bubble0", bubble0);
    special.insert("limit_q", limit_q);
    special.insert("limit_p", limit_p);
    special.insert("limit_K", savings - limit_q - limit_p);

    let path = EquilibriumPath::from_production(&params, capital, tree, fiat)?;
    Ok(ScenarioResult { params, path, classification, special_values: special })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::{
        check_side_conditions, map_olg_to_two_cycle, verify_two_cycle_full, PriceSystem, Verdict,
        DEFAULT_VERIFY_TOL,
    };
    use crate::economy::Tail;
    use crate::sim::residual_report;

    #[test]
    fn log_dividend_path_verifies_for_constant_and_growing_endowments() {
        for endow in [
            SequenceSpec::Constant(1.0),
            SequenceSpec::Geometric { base: 1.0, ratio: 1.05 },
        ] {
            let params = EconomyParams::new(
                Utility::log(0.9),
                None,
                SequenceSpec::Geometric { base: 0.02, ratio: 1.01 },
                endow,
                SequenceSpec::zero(),
                0.0,
            );
            let path = exchange_log_dividend_path(&params, 60).unwrap();
            let report = residual_report(&params, &path);
            assert!(report.max_any() < 1e-12, "max residual {:e}", report.max_any());
            // Savings rule: q_t / e^y_t constant.
            for t in 0..=60 {
                assert!(rel_gap(path.tree_price[t], 0.9 / 1.9 * params.endow_young.at(t)) < 1e-15);
            }
        }
    }

    #[test]
    fn stationary_price_closed_form() {
        let stat = fiat_stationary_price(70.0, 35.0, 8.0 / 7.0, 2.0, 0.875).unwrap();
        assert!(stat.feasible);
        let p = stat.price.unwrap();
        assert!((p - 14.0).abs() < 1e-10, "expected 14, got {p}");

        // Log curvature: (beta*y - o) / (1 + beta).
        let stat = fiat_stationary_price(2.0, 1.0, 1.0, 1.0, 0.9).unwrap();
        let expected = (0.9 * 2.0 - 1.0) / 1.9;
        assert!((stat.price.unwrap() - expected).abs() < 1e-15);

        // Old endowment too large: no positive stationary price.
        let stat = fiat_stationary_price(70.0, 69.0, 8.0 / 7.0, 2.0, 0.875).unwrap();
        assert!(stat.price.is_none());
        assert!(!stat.feasible);
    }

    #[test]
    fn stationary_fiat_path_is_emitted_exactly() {
        let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
        let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
        let path = fiat_continuum_path(&young, &old, 2.0, 0.875, 14.0, 100).unwrap();
        let params = fiat_params(&young, &old, 2.0, 0.875).unwrap();
        // Exact geometric growth of the price, no drift after 100 periods.
        for t in 0..=100 {
            assert!(
                rel_gap(path.fiat_price[t], 14.0 * (8.0_f64 / 7.0).powi(t as i32)) < 1e-12,
                "drift at t={t}"
            );
        }
        let report = residual_report(&params, &path);
        assert!(report.max_any() < 1e-10, "{:e}", report.max_any());
        let side = check_side_conditions(&params, &path, 100, DEFAULT_VERIFY_TOL);
        assert_eq!(side.verdict, Verdict::Verified);
        assert!(side.foc_slacks.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn continuum_paths_below_stationary_are_equilibria() {
        let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
        let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
        let params = fiat_params(&young, &old, 2.0, 0.875).unwrap();
        let mut previous_p1 = 0.0;
        for p0 in [3.5, 7.0, 10.5] {
            let path = fiat_continuum_path(&young, &old, 2.0, 0.875, p0, 100).unwrap();
            let report = residual_report(&params, &path);
            assert!(report.max_any() < 1e-10, "p0={p0}: {:e}", report.max_any());
            let alloc = map_olg_to_two_cycle(&params, &path).unwrap();
            let prices = PriceSystem::from_path(&path);
            let verdict =
                verify_two_cycle_full(&params, &alloc, &prices, DEFAULT_VERIFY_TOL).verdict;
            assert_eq!(verdict, Verdict::Verified, "p0={p0}");
            // Distinct positive paths.
            assert!(path.fiat_price[1] > previous_p1);
            previous_p1 = path.fiat_price[1];
            assert!(path.fiat_price.iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn autarkic_fiat_path_at_zero_price() {
        let young = SequenceSpec::Constant(2.0);
        let old = SequenceSpec::Constant(1.0);
        let path = fiat_continuum_path(&young, &old, 2.0, 0.5, 0.0, 20).unwrap();
        assert!(path.fiat_price.iter().all(|&p| p == 0.0));
        let params = fiat_params(&young, &old, 2.0, 0.5).unwrap();
        assert!(residual_report(&params, &path).max_any() < 1e-14);
    }

    #[test]
    fn overpriced_fiat_fails_with_a_date() {
        let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
        let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
        // Above the stationary level but inside the date-0 transfer bound:
        // the recursion super-exponentiates until feasibility breaks.
        let err = fiat_continuum_path(&young, &old, 2.0, 0.875, 17.0, 200);
        match err {
            Err(ModelError::NonEquilibriumPath { t, .. }) => assert!(t > 0, "failed at t={t}"),
            other => panic!("expected failure, got {other:?}"),
        }
        // Violating the transfer bound immediately fails at t=0.
        let err = fiat_continuum_path(&young, &old, 2.0, 0.875, 20.0, 50);
        assert!(matches!(err, Err(ModelError::NonEquilibriumPath { t: 0, .. })));
    }

    #[test]
    fn endowment_decay_condition_is_enforced() {
        // beta * growth^(1-sigma) = 0.9 * 0.5^(-1) = 1.8 >= 1: shrinking
        // endowments with sigma = 2 make discounted marginal utility explode.
        let young = SequenceSpec::Geometric { base: 10.0, ratio: 0.5 };
        let old = SequenceSpec::Geometric { base: 5.0, ratio: 0.5 };
        let err = fiat_continuum_path(&young, &old, 2.0, 0.9, 1.0, 10);
        assert!(matches!(err, Err(ModelError::NonEquilibriumPath { t: 0, .. })), "{err:?}");
    }

    #[test]
    fn cobb_douglas_critical_path_closed_form() {
        let res = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.0315789473684210526, 200).unwrap();
        assert_eq!(res.classification, Classification::BubblyAsymptotic);
        let gamma = res.special_values["gamma"];
        assert!((gamma - 21.0 / 19.0).abs() < 1e-15);
        // p_t = (gamma - 1) K_{t+1} along the whole path.
        for t in 0..=200 {
            assert!(
                rel_gap(res.path.fiat_price[t], (gamma - 1.0) * res.path.capital[t + 1]) < 1e-12
            );
        }
        // K_1 = alpha A K_0^alpha on the critical path.
        assert!((res.path.capital[1] - 0.3).abs() < 1e-15);
        // Capital converges to (alpha A)^(1/(1-alpha)), not to K*.
        assert!((res.path.capital[200] - 0.17907310493891381).abs() < 1e-8);
        let report = residual_report(&res.params, &res.path);
        assert!(report.max_any() < 1e-12, "{:e}", report.max_any());
    }

    #[test]
    fn critical_path_slack_ratio_is_beta_squared() {
        let res = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.0315789473684210526, 250).unwrap();
        let params = &res.params;
        let path = &res.path;
        let side = check_side_conditions(params, path, 250, DEFAULT_VERIFY_TOL);
        // u'(c^o_t) = beta^2 * beta R u'(c^y_{t+1})... the scaled slack is
        // exactly 1 - beta^2 every period on the critical path.
        for (t, s) in side.foc_slacks.iter().enumerate() {
            assert!((s - (1.0 - 0.81)).abs() < 1e-12, "slack {s} at t={t}");
        }
        assert_eq!(side.verdict, Verdict::Verified);
    }

    #[test]
    fn trichotomy_classifications() {
        let b_bar = 0.7 * (0.9 / 1.9) * (2.0 / 21.0);
        let cases = [
            (0.0, Classification::BubblelessConvergingKstar),
            (0.25 * b_bar, Classification::BubblyVanishing),
            (0.5 * b_bar, Classification::BubblyVanishing),
            (0.75 * b_bar, Classification::BubblyVanishing),
            (b_bar, Classification::BubblyAsymptotic),
            (1.2 * b_bar, Classification::NonEquilibrium),
        ];
        for (p0, expected) in cases {
            let res = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, p0, 500).unwrap();
            assert_eq!(res.classification, expected, "p0={p0}");
            match expected {
                Classification::BubblelessConvergingKstar | Classification::BubblyVanishing => {
                    assert!((res.path.capital[500] - 0.20659709576708206).abs() < 1e-8);
                    assert!(res.path.fiat_price[500].abs() < 1e-8);
                }
                Classification::BubblyAsymptotic => {
                    assert!((res.path.capital[500] - 0.17907310493891381).abs() < 1e-8);
                }
                Classification::NonEquilibrium => {
                    assert!(res.special_values.contains_key("first_failure_t"));
                    assert!(res.path.horizon < 500, "must truncate before the crash");
                }
            }
        }
    }

    #[test]
    fn z_diagnostic_constant_on_critical_path() {
        let res = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.0315789473684210526, 80).unwrap();
        let gamma = res.special_values["gamma"];
        let z_fix = 1.0 / (gamma - 1.0);
        assert!((res.special_values["z0"] - z_fix).abs() < 1e-12);
        for t in 0..=80 {
            let z_t = res.path.capital[t + 1] / res.path.fiat_price[t];
            assert!(rel_gap(z_t, z_fix) < 1e-12, "z drift at t={t}");
        }
    }

    #[test]
    fn immediate_overpricing_has_no_path() {
        // p0 above date-0 savings: not even one period can be built.
        let err = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.4, 50);
        assert!(matches!(err, Err(ModelError::NonEquilibriumPath { t: 0, .. })));
    }

    #[test]
    fn linear_continuum_bubbleless_and_bubbly() {
        // R = 1, B = 1, beta = 0.9, d_s = 0.1 * 2^-s (s >= 1): D = 0.1.
        let dividends = SequenceSpec::Explicit {
            values: vec![0.0, 0.05],
            tail: Tail::Geometric(0.5),
        };
        assert_eq!(dividends.at(1), 0.05);
        assert_eq!(dividends.at(2), 0.025);

        // Bubbleless: q0 = D exactly; the tree price must decay to zero.
        let res = linear_tech_path(1.0, 1.0, 1.0, 0.9, &dividends, 0.1, 0.0, 60).unwrap();
        assert_eq!(res.classification, Classification::BubblelessConvergingKstar);
        assert!((res.special_values["discounted_dividends"] - 0.1).abs() < 1e-15);
        assert!(res.path.tree_price[60].abs() < 1e-8);
        assert!(res.path.tree_price.iter().all(|&q| q >= 0.0), "no negative prices");
        assert!((res.special_values["sup_fiat_price"] - (0.9 / 1.9 - 0.1)).abs() < 1e-12);

        // Bubbly: q0 = 0.2; the bubble component 0.1 persists at R = 1.
        let res = linear_tech_path(1.0, 1.0, 1.0, 0.9, &dividends, 0.2, 0.0, 60).unwrap();
        assert_eq!(res.classification, Classification::BubblyAsymptotic);
        assert!((res.path.tree_price[60] - 0.1).abs() < 1e-8);
        let report = residual_report(&res.params, &res.path);
        assert!(report.max_any() < 1e-12, "{:e}", report.max_any());
    }

    #[test]
    fn linear_admissibility_is_enforced() {
        let dividends = SequenceSpec::Explicit {
            values: vec![0.0, 0.05],
            tail: Tail::Geometric(0.5),
        };
        // Below the discounted dividend stream.
        let err = linear_tech_path(1.0, 1.0, 1.0, 0.9, &dividends, 0.05, 0.0, 20);
        assert!(matches!(err, Err(ModelError::NonEquilibriumPath { t: 0, .. })));
        // Savings exhausted.
        let err = linear_tech_path(1.0, 1.0, 1.0, 0.9, &dividends, 0.3, 0.2, 20);
        assert!(matches!(err, Err(ModelError::NonEquilibriumPath { t: 0, .. })));
        // Returns above one are outside this family.
        let err = linear_tech_path(1.5, 1.0, 0.2, 0.9, &dividends, 0.2, 0.0, 20);
        assert!(matches!(err, Err(ModelError::RegimeMismatch(_))));
    }

    #[test]
    fn linear_pure_fiat_continuum() {
        // No dividends, R = 1: every p0 below savings gives a constant-price
        // equilibrium; the supremum of sustainable prices is the savings level.
        let d = SequenceSpec::zero();
        let res = linear_tech_path(1.0, 1.0, 1.0, 0.9, &d, 0.0, 0.2, 40).unwrap();
        assert_eq!(res.classification, Classification::BubblyAsymptotic);
        assert!(res.path.fiat_price.iter().all(|&p| p == 0.2));
        assert!(rel_gap(res.special_values["sup_fiat_price"], 0.9 / 1.9) < 1e-15);
        // With a discounted return the same price melts away.
        let res = linear_tech_path(0.9, 1.0, 1.0, 0.9, &d, 0.0, 0.2, 40).unwrap();
        assert_eq!(res.classification, Classification::BubblyVanishing);
        assert!(res.path.fiat_price[40] < 0.2 * 0.9_f64.powi(39));
    }
}
