//! Relabelling an overlapping-generations path as a two-agent
//! infinite-horizon allocation, and verifying that the relabelled allocation
//! is a competitive equilibrium in its own right.
//!
//! The relabelling is mechanical: agent 0 plays the working ("young") role at
//! even dates and the retired ("old") role at odd dates; agent 1 does the
//! opposite.  The working agent supplies the unit of labour, receives the
//! young endowment, and carries the whole capital stock and both asset
//! supplies into the next period; the retired agent consumes out of holdings
//! and supplies nothing.  Agent 1 starts retired, owning the initial capital
//! stock and both assets.
//!
//! Verification checks, date by date:
//!
//! * the no-arbitrage pricing recursions between consecutive dates,
//! * the saver's Euler equality and the retiree's first-order inequality,
//! * non-negativity and complementary slackness of the implied multipliers
//!   (expressed in gross-return units so they stay scale-free),
//! * each agent's budget identity and market clearing for labour and assets,
//! * consistency of the posted wage and return with the technology, and
//! * decay of both transversality tails (working-role wealth valued at
//!   marginal utility, discounted to date 0), including the fiat position.
//!
//! A tail that neither decays demonstrably nor explodes leaves the verdict
//! `InconclusiveTvc` rather than a false positive or negative.

use crate::economy::EconomyParams;
use crate::error::{ModelError, Result};
use crate::numeric::{ls_slope, rel_gap};
use crate::sim::EquilibriumPath;
use crate::tol;

/// Index of the agent playing the working role at date `t`.
#[inline]
pub fn working_agent(t: usize) -> usize {
    t % 2
}

/// The price system faced by both agents: asset prices, gross returns, wages.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSystem {
    pub tree_price: Vec<f64>,
    pub fiat_price: Vec<f64>,
    pub gross_return: Vec<f64>,
    pub wage: Vec<f64>,
}

impl PriceSystem {
    pub fn from_path(path: &EquilibriumPath) -> Self {
        PriceSystem {
            tree_price: path.tree_price.clone(),
            fiat_price: path.fiat_price.clone(),
            gross_return: path.gross_return.clone(),
            wage: path.wage.clone(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.tree_price.len().saturating_sub(1)
    }
}

/// A two-agent allocation over dates `0..=horizon`.
///
/// Per-date choices are indexed `[agent][t]`; `capital_next[i][t]` is the
/// capital the agent carries out of date `t`, and the `*_init` entries are the
/// holdings each agent brings into date 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCycleAllocation {
    pub horizon: usize,
    pub consumption: [Vec<f64>; 2],
    pub capital_next: [Vec<f64>; 2],
    pub tree: [Vec<f64>; 2],
    pub fiat: [Vec<f64>; 2],
    pub labor: [Vec<f64>; 2],
    /// Endowments after relabelling: the working agent receives the young
    /// endowment, the retired agent the old one.  Stored once here so that
    /// verification never has to re-derive who is in which role.
    pub endowment: [Vec<f64>; 2],
    pub capital_init: [f64; 2],
    pub tree_init: [f64; 2],
    pub fiat_init: [f64; 2],
}

impl TwoCycleAllocation {
    /// Capital the agent brings *into* date `t`.
    fn capital_entering(&self, agent: usize, t: usize) -> f64 {
        if t == 0 {
            self.capital_init[agent]
        } else {
            self.capital_next[agent][t - 1]
        }
    }

    fn tree_entering(&self, agent: usize, t: usize) -> f64 {
        if t == 0 {
            self.tree_init[agent]
        } else {
            self.tree[agent][t - 1]
        }
    }

    fn fiat_entering(&self, agent: usize, t: usize) -> f64 {
        if t == 0 {
            self.fiat_init[agent]
        } else {
            self.fiat[agent][t - 1]
        }
    }
}

/// Relabel an equilibrium path as the canonical alternating-role allocation.
pub fn map_olg_to_two_cycle(
    params: &EconomyParams,
    path: &EquilibriumPath,
) -> Result<TwoCycleAllocation> {
    let horizon = path.horizon;
    let mut consumption = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];
    let mut capital_next = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];
    let mut tree = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];
    let mut fiat = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];
    let mut labor = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];
    let mut endowment = [vec![0.0; horizon + 1], vec![0.0; horizon + 1]];

    for t in 0..=horizon {
        let w = working_agent(t);
        let r = 1 - w;
        let cy = path.c_young[t];
        let co = path.c_old[t];
        if !(cy > 0.0) {
            return Err(ModelError::NegativeConsumption { agent: w, t, value: cy });
        }
        if !(co > 0.0) {
            return Err(ModelError::NegativeConsumption { agent: r, t, value: co });
        }
        consumption[w][t] = cy;
        consumption[r][t] = co;
        capital_next[w][t] = path.capital[t + 1];
        tree[w][t] = 1.0;
        fiat[w][t] = 1.0;
        labor[w][t] = 1.0;
        endowment[w][t] = params.endow_young.at(t);
        endowment[r][t] = params.endow_old.at(t);
    }

    Ok(TwoCycleAllocation {
        horizon,
        consumption,
        capital_next,
        tree,
        fiat,
        labor,
        endowment,
        // Agent 1 starts retired, holding the initial capital and both assets.
        capital_init: [0.0, path.capital[0]],
        tree_init: [0.0, 1.0],
        fiat_init: [0.0, 1.0],
    })
}

/// Project an alternating-role allocation back onto an aggregate path.
///
/// The allocation must follow the canonical pattern exactly (the working
/// agent holds everything, the retired agent holds nothing); any deviation is
/// a [`ModelError::PatternViolation`].  Values are copied, not recomputed, so
/// a round trip through [`map_olg_to_two_cycle`] is bitwise exact.
pub fn project_two_cycle_to_olg(
    params: &EconomyParams,
    alloc: &TwoCycleAllocation,
    prices: &PriceSystem,
) -> Result<EquilibriumPath> {
    let horizon = alloc.horizon;
    if prices.horizon() != horizon {
        return Err(ModelError::InvalidInput(format!(
            "price system covers horizon {} but the allocation covers {}",
            prices.horizon(),
            horizon
        )));
    }
    let exchange = params.is_exchange();

    if alloc.capital_init[0] != 0.0 || alloc.tree_init != [0.0, 1.0] || alloc.fiat_init != [0.0, 1.0]
    {
        return Err(ModelError::PatternViolation {
            t: 0,
            detail: "initial holdings must all sit with the retired agent 1".into(),
        });
    }

    let mut capital = Vec::with_capacity(horizon + 2);
    capital.push(alloc.capital_init[1]);

    for t in 0..=horizon {
        let w = working_agent(t);
        let r = 1 - w;
        for (name, series, want_w, want_r) in [
            ("tree", &alloc.tree, 1.0, 0.0),
            ("fiat", &alloc.fiat, 1.0, 0.0),
            ("labor", &alloc.labor, 1.0, 0.0),
        ] {
            if series[w][t] != want_w || series[r][t] != want_r {
                return Err(ModelError::PatternViolation {
                    t,
                    detail: format!(
                        "{name} holdings ({}, {}) do not alternate",
                        series[0][t], series[1][t]
                    ),
                });
            }
        }
        if alloc.capital_next[r][t] != 0.0 {
            return Err(ModelError::PatternViolation {
                t,
                detail: "retired agent carries capital".into(),
            });
        }
        let k_next = alloc.capital_next[w][t];
        if exchange {
            if k_next != 0.0 {
                return Err(ModelError::PatternViolation {
                    t,
                    detail: "capital held in an exchange economy".into(),
                });
            }
        } else if !(k_next > 0.0) {
            return Err(ModelError::PatternViolation {
                t,
                detail: format!("working agent carries non-positive capital {k_next:e}"),
            });
        }
        capital.push(k_next);
    }

    let mut c_young = Vec::with_capacity(horizon + 1);
    let mut c_old = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let w = working_agent(t);
        c_young.push(alloc.consumption[w][t]);
        c_old.push(alloc.consumption[1 - w][t]);
    }

    Ok(EquilibriumPath {
        horizon,
        capital,
        tree_price: prices.tree_price.clone(),
        fiat_price: prices.fiat_price.clone(),
        gross_return: prices.gross_return.clone(),
        wage: prices.wage.clone(),
        c_young,
        c_old,
    })
}

/// One transversality tail: discounted marginal-utility value of the wealth
/// the working agent carries forward, recorded at every date of one parity.
#[derive(Debug, Clone, PartialEq)]
pub struct TvcTail {
    pub dates: Vec<usize>,
    pub terms: Vec<f64>,
    /// Least-squares slope of `ln(term)` against the calendar date, fitted on
    /// the last third of the recorded terms.
    pub slope_per_period: f64,
    /// The same slope expressed per two-period role cycle.
    pub slope_per_pair: f64,
    pub first: f64,
    pub last: f64,
    pub certified: bool,
}

impl TvcTail {
    fn from_terms(dates: Vec<usize>, terms: Vec<f64>) -> Self {
        let n = terms.len();
        if n == 0 {
            return TvcTail {
                dates,
                terms,
                slope_per_period: 0.0,
                slope_per_pair: 0.0,
                first: 0.0,
                last: 0.0,
                certified: true,
            };
        }
        let first = terms[0];
        let last = terms[n - 1];
        if terms.iter().all(|&x| x == 0.0) {
            // Nothing is carried forward; the tail vanishes identically.
            return TvcTail {
                dates,
                terms,
                slope_per_period: 0.0,
                slope_per_pair: 0.0,
                first,
                last,
                certified: true,
            };
        }
        let window = (n / 3).max(4.min(n));
        let start = n - window;
        let xs: Vec<f64> = dates[start..].iter().map(|&d| d as f64).collect();
        let ys: Vec<f64> = terms[start..].iter().map(|&v| v.max(1e-300).ln()).collect();
        let slope = ls_slope(&xs, &ys);
        let certified =
            slope <= tol::TVC_SLOPE_MAX && last < tol::TVC_FINAL_COEFF * (first + 1.0);
        TvcTail {
            dates,
            terms,
            slope_per_period: slope,
            slope_per_pair: 2.0 * slope,
            first,
            last,
            certified,
        }
    }
}

/// Verdict of a verification pass.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Verified,
    Failed { reason: String, t: usize },
    /// Every finite-date condition holds but a transversality tail could not
    /// be certified as decaying on the available horizon.
    InconclusiveTvc,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

/// First-order inequality slacks and transversality tails of a path.
#[derive(Debug, Clone, PartialEq)]
pub struct SideConditions {
    /// Scaled slack `u'(c^o_t) - beta R_{t+1} u'(c^y_{t+1})` for each date;
    /// non-negative slack means no retiree wants to re-enter the market.
    pub foc_slacks: Vec<f64>,
    pub tvc_even: TvcTail,
    pub tvc_odd: TvcTail,
    pub verdict: Verdict,
}

/// Check the retiree inequalities and both transversality tails on a path.
///
/// `horizon` may be smaller than the stored path horizon; slacks are computed
/// for `t = 0..horizon` and tails over all dates up to `horizon`.
pub fn check_side_conditions(
    params: &EconomyParams,
    path: &EquilibriumPath,
    horizon: usize,
    tolerance: f64,
) -> SideConditions {
    let horizon = horizon.min(path.horizon);
    let beta = params.beta();
    let u = &params.utility;

    let mut foc_slacks = Vec::with_capacity(horizon);
    let mut worst: Option<(usize, f64)> = None;
    for t in 0..horizon {
        let mu_old = u.marginal(path.c_old[t]);
        let discounted = beta * path.gross_return[t + 1] * u.marginal(path.c_young[t + 1]);
        let scale = mu_old.max(discounted).max(1.0);
        let slack = (mu_old - discounted) / scale;
        if slack < -tolerance && worst.map_or(true, |(_, s)| slack < s) {
            worst = Some((t, slack));
        }
        foc_slacks.push(slack);
    }

    let (tvc_even, tvc_odd) = tvc_tails_from_path(params, path, horizon);

    let verdict = if let Some((t, slack)) = worst {
        Verdict::Failed {
            reason: format!("retiree first-order inequality violated (slack {slack:e})"),
            t,
        }
    } else if tvc_even.certified && tvc_odd.certified {
        Verdict::Verified
    } else {
        Verdict::InconclusiveTvc
    };

    SideConditions { foc_slacks, tvc_even, tvc_odd, verdict }
}

/// Transversality terms `beta^t u'(c^y_t) (K_{t+1} + q_t + p_t)`, split by the
/// parity of `t` (one tail per agent).  The fiat position is part of the
/// carried wealth, so fiat bubbles must out-decay discounting to pass.
fn tvc_tails_from_path(
    params: &EconomyParams,
    path: &EquilibriumPath,
    horizon: usize,
) -> (TvcTail, TvcTail) {
    let u = &params.utility;
    let mut even = (Vec::new(), Vec::new());
    let mut odd = (Vec::new(), Vec::new());
    let mut beta_pow = 1.0;
    for t in 0..=horizon {
        let term = beta_pow * u.marginal(path.c_young[t]) * path.savings(t);
        if t % 2 == 0 {
            even.0.push(t);
            even.1.push(term);
        } else {
            odd.0.push(t);
            odd.1.push(term);
        }
        beta_pow *= params.beta();
    }
    (TvcTail::from_terms(even.0, even.1), TvcTail::from_terms(odd.0, odd.1))
}

/// Everything [`verify_two_cycle_full`] measures, with the worst date of each
/// block folded into the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Max scaled residual of the saver's Euler equalities.
    pub euler_equalities: f64,
    /// Min scaled slack of the retiree inequalities.
    pub foc_inequalities: f64,
    pub tvc_even: TvcTail,
    pub tvc_odd: TvcTail,
    /// Max scaled budget-identity residual over agents and dates.
    pub budget_residuals: f64,
    /// Max asset/labour market-clearing residual.
    pub clearing_residuals: f64,
    /// Max residual of the two no-arbitrage pricing recursions.
    pub pricing_residuals: f64,
    /// Max disagreement between posted factor prices and the technology
    /// (zero wage check in exchange economies).
    pub profit_residuals: f64,
    /// Smallest multiplier implied by the first-order conditions, in
    /// gross-return units; must not be materially negative.
    pub multiplier_min: f64,
    /// Largest `|min(multiplier, holding)|`: complementary slackness demands
    /// that every multiplier vanish wherever the holding is positive.
    pub comp_slackness_max: f64,
    /// Which transversality convention the tails use: carried wealth includes
    /// the fiat position alongside capital and the tree.
    pub tvc_variant: &'static str,
    pub verdict: Verdict,
}

/// Default tolerance for [`verify_two_cycle_full`].
pub const DEFAULT_VERIFY_TOL: f64 = tol::VERIFY_DEFAULT;

/// Full equilibrium verification of an alternating-role allocation against a
/// price system.
pub fn verify_two_cycle_full(
    params: &EconomyParams,
    alloc: &TwoCycleAllocation,
    prices: &PriceSystem,
    tolerance: f64,
) -> VerificationReport {
    let horizon = alloc.horizon;
    let beta = params.beta();
    let u = &params.utility;
    let exchange = params.is_exchange();

    let mut failure: Option<(String, usize)> = None;
    let fail = |cond: bool, t: usize, msg: &dyn Fn() -> String, failure: &mut Option<(String, usize)>| {
        if cond && failure.is_none() {
            *failure = Some((msg(), t));
        }
    };

    let mut euler_max = 0.0_f64;
    let mut foc_min = f64::INFINITY;
    let mut budget_max = 0.0_f64;
    let mut clearing_max = 0.0_f64;
    let mut pricing_max = 0.0_f64;
    let mut profit_max = 0.0_f64;
    let mut mult_min = f64::INFINITY;
    let mut comp_max = 0.0_f64;

    for t in 0..=horizon {
        let w = working_agent(t);
        let q = prices.tree_price[t];
        let p = prices.fiat_price[t];
        let d = params.dividends.at(t);

        // Consumption must be positive for marginal utilities to mean anything.
        for i in 0..2 {
            let c = alloc.consumption[i][t];
            fail(
                !(c > 0.0),
                t,
                &|| format!("agent {i} consumes {c:e}"),
                &mut failure,
            );
        }

        // Market clearing: unit supplies of labour and both assets.
        let clear = (alloc.tree[0][t] + alloc.tree[1][t] - 1.0)
            .abs()
            .max((alloc.fiat[0][t] + alloc.fiat[1][t] - 1.0).abs())
            .max((alloc.labor[0][t] + alloc.labor[1][t] - 1.0).abs());
        clearing_max = clearing_max.max(clear);
        fail(clear > tolerance, t, &|| format!("market clearing off by {clear:e}"), &mut failure);

        // Factor prices must come from the technology at the aggregate stock.
        match &params.technology {
            Some(tech) => {
                let k_agg = alloc.capital_entering(0, t) + alloc.capital_entering(1, t);
                if k_agg > 0.0 {
                    let fp = tech.eval(k_agg);
                    let gap = rel_gap(fp.wage, prices.wage[t])
                        .max(rel_gap(fp.gross_return, prices.gross_return[t]));
                    profit_max = profit_max.max(gap);
                    fail(
                        gap > tolerance,
                        t,
                        &|| format!("posted factor prices disagree with the technology by {gap:e}"),
                        &mut failure,
                    );
                } else {
                    fail(true, t, &|| "aggregate capital is not positive".into(), &mut failure);
                }
            }
            None => {
                let gap = prices.wage[t].abs();
                profit_max = profit_max.max(gap);
                fail(
                    gap > tolerance,
                    t,
                    &|| format!("exchange economy posts a non-zero wage {gap:e}"),
                    &mut failure,
                );
            }
        }

        // Budget identity of each agent.
        for i in 0..2 {
            let k_in = alloc.capital_entering(i, t);
            let a_in = alloc.tree_entering(i, t);
            let b_in = alloc.fiat_entering(i, t);
            let lhs = alloc.consumption[i][t]
                + alloc.capital_next[i][t]
                + q * alloc.tree[i][t]
                + p * alloc.fiat[i][t];
            let rhs = prices.wage[t] * alloc.labor[i][t]
                + alloc.endowment[i][t]
                + prices.gross_return[t] * k_in
                + (q + d) * a_in
                + p * b_in;
            let resid = rel_gap(lhs, rhs);
            budget_max = budget_max.max(resid);
            fail(
                resid > tolerance,
                t,
                &|| format!("agent {i} budget identity off by {resid:e}"),
                &mut failure,
            );
        }

        if t == horizon {
            break;
        }

        // Forward-looking conditions.
        let r_next = prices.gross_return[t + 1];
        let q_next = prices.tree_price[t + 1];
        let p_next = prices.fiat_price[t + 1];
        let d_next = params.dividends.at(t + 1);

        let tree_gap = rel_gap(q * r_next, q_next + d_next);
        let fiat_gap = rel_gap(p * r_next, p_next);
        pricing_max = pricing_max.max(tree_gap).max(fiat_gap);
        fail(
            tree_gap > tolerance,
            t,
            &|| format!("tree pricing recursion off by {tree_gap:e}"),
            &mut failure,
        );
        fail(
            fiat_gap > tolerance,
            t,
            &|| format!("fiat pricing recursion off by {fiat_gap:e}"),
            &mut failure,
        );

        // Saver's Euler equality (the working agent is the saver).
        let mu_w_now = u.marginal(alloc.consumption[w][t]);
        let mu_w_next = u.marginal(alloc.consumption[w][t + 1]);
        let euler = rel_gap(mu_w_now, beta * r_next * mu_w_next);
        euler_max = euler_max.max(euler);
        fail(
            euler > tolerance,
            t,
            &|| format!("saver Euler equality off by {euler:e}"),
            &mut failure,
        );

        // Retiree inequality: no strict gain from re-entering asset markets.
        let r_agent = 1 - w;
        let mu_r_now = u.marginal(alloc.consumption[r_agent][t]);
        let mu_r_next = u.marginal(alloc.consumption[r_agent][t + 1]);
        let discounted = beta * r_next * mu_r_next;
        let slack = (mu_r_now - discounted) / mu_r_now.max(discounted).max(1.0);
        foc_min = foc_min.min(slack);
        fail(
            slack < -tolerance,
            t,
            &|| format!("retiree inequality violated (slack {slack:e})"),
            &mut failure,
        );

        // Multipliers in gross-return units: price ratio minus discounted
        // marginal-utility growth.  Non-negativity is the first-order
        // inequality; complementary slackness ties each to its holding.
        for i in 0..2 {
            let growth = beta * u.marginal(alloc.consumption[i][t + 1])
                / u.marginal(alloc.consumption[i][t]);
            let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(3);
            if !exchange {
                pairs.push((1.0 / r_next - growth, alloc.capital_next[i][t]));
            }
            // A price that has decayed into the subnormal range carries too
            // few significand bits for its ratio to mean anything (a long
            // geometric path eventually underflows); the asset is worthless
            // there and the ratio conditions are vacuous, so they are only
            // checked while the denominator is a normal float.
            if q_next + d_next >= f64::MIN_POSITIVE {
                pairs.push((q / (q_next + d_next) - growth, alloc.tree[i][t]));
            }
            if p_next >= f64::MIN_POSITIVE {
                pairs.push((p / p_next - growth, alloc.fiat[i][t]));
            }
            for (mult, holding) in pairs {
                mult_min = mult_min.min(mult);
                let comp = mult.min(holding).abs();
                comp_max = comp_max.max(comp);
                fail(
                    mult < -tolerance,
                    t,
                    &|| format!("negative multiplier {mult:e} for agent {i}"),
                    &mut failure,
                );
                fail(
                    comp > tol::COMP_SLACK_ABS,
                    t,
                    &|| format!("complementary slackness off by {comp:e} for agent {i}"),
                    &mut failure,
                );
            }
        }
    }

    if mult_min == f64::INFINITY {
        mult_min = 0.0;
    }
    if foc_min == f64::INFINITY {
        foc_min = 0.0;
    }

    // Transversality tails straight from the allocation: the working agent's
    // carried wealth valued at its own marginal utility.
    let mut even = (Vec::new(), Vec::new());
    let mut odd = (Vec::new(), Vec::new());
    let mut beta_pow = 1.0;
    for t in 0..=horizon {
        let w = working_agent(t);
        let wealth = alloc.capital_next[w][t]
            + prices.tree_price[t] * alloc.tree[w][t]
            + prices.fiat_price[t] * alloc.fiat[w][t];
        let term = beta_pow * u.marginal(alloc.consumption[w][t]) * wealth;
        if t % 2 == 0 {
            even.0.push(t);
            even.1.push(term);
        } else {
            odd.0.push(t);
            odd.1.push(term);
        }
        beta_pow *= beta;
    }
    let tvc_even = TvcTail::from_terms(even.0, even.1);
    let tvc_odd = TvcTail::from_terms(odd.0, odd.1);

    let verdict = match failure {
        Some((reason, t)) => Verdict::Failed { reason, t },
        None if tvc_even.certified && tvc_odd.certified => Verdict::Verified,
        None => Verdict::InconclusiveTvc,
    };

    VerificationReport {
        euler_equalities: euler_max,
        foc_inequalities: foc_min,
        tvc_even,
        tvc_odd,
        budget_residuals: budget_max,
        clearing_residuals: clearing_max,
        pricing_residuals: pricing_max,
        profit_residuals: profit_max,
        multiplier_min: mult_min,
        comp_slackness_max: comp_max,
        tvc_variant: "wealth_inclusive_fiat",
        verdict,
    }
}
