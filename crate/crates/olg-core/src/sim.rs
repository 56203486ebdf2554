//! Forward simulation of overlapping-generations equilibrium paths.
//!
//! A path is pinned down by the initial capital stock and the initial asset
//! prices `(q_0, p_0)`.  Each period the young generation's savings choice
//! must satisfy the Euler equation
//!
//! ```text
//! u'(e^y_t + w_t - K_{t+1} - q_t - p_t)
//!     = beta * R_{t+1} * u'(e^o_{t+1} + R_{t+1} * (K_{t+1} + q_t + p_t))
//! ```
//!
//! while asset prices follow the no-arbitrage recursions
//! `q_t * R_{t+1} = q_{t+1} + d_{t+1}` and `p_t * R_{t+1} = p_{t+1}`.
//! In production economies the unknown each period is next capital `K_{t+1}`
//! (the gross return follows from the technology); in exchange economies the
//! unknown is the gross return itself.
//!
//! All solves are deterministic: fixed grids, bisection, and a clamped
//! derivative-free polish, so repeated runs are bitwise identical.

use crate::economy::{EconomyParams, Technology, UtilityFamily};
use crate::error::{ModelError, Result};
use crate::numeric::{bisect_polished, log_spaced, rel_gap};
use crate::tol;

/// Aggregate state entering a period of a production economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlgState {
    /// Capital stock installed for this period.
    pub capital: f64,
    /// Ex-dividend tree price this period.
    pub tree_price: f64,
    /// Fiat price this period.
    pub fiat_price: f64,
}

/// How many market-clearing solutions the step solver saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMultiplicity {
    Unique,
    MultipleRoots,
    NoRoot,
}

/// What to do when the exchange-economy return equation has several viable
/// solutions (possible with isoelastic curvature above one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootPolicy {
    /// Refuse to choose: return [`ModelError::MultipleRoots`].
    #[default]
    ErrorOnMultiple,
    /// Continue with the smallest viable return.
    Smallest,
    /// Continue with the largest viable return.
    Largest,
}

/// Solver options for [`simulate_olg_with`].
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub root_policy: RootPolicy,
    /// Points in the log-spaced return grid scanned by the exchange step.
    pub return_grid: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { root_policy: RootPolicy::ErrorOnMultiple, return_grid: 512 }
    }
}

/// Per-step solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// Scaled Euler residual at the accepted solution.
    pub euler_residual: f64,
    /// Final bracket around the accepted root.
    pub root_bracket: (f64, f64),
    /// Function evaluations spent by the solve.
    pub iterations: usize,
    pub multiplicity: RootMultiplicity,
}

/// Young-age budget identity: consumption left after saving and asset purchases.
#[inline]
pub(crate) fn young_consumption(e_y: f64, wage: f64, k_next: f64, q: f64, p: f64) -> f64 {
    e_y + wage - k_next - q - p
}

/// Old-age budget identity: endowment plus gross capital income plus cum-dividend
/// asset sales.
#[inline]
pub(crate) fn old_consumption(e_o: f64, gross: f64, k: f64, q: f64, d: f64, p: f64) -> f64 {
    e_o + gross * k + q + d + p
}

/// An equilibrium path over dates `t = 0..=horizon`.
///
/// `capital` has two extra entries (`K_0` through `K_{horizon+1}`) because the
/// last simulated period still chooses next-period capital; every other series
/// has `horizon + 1` entries.  Exchange economies store zero capital and wage,
/// and by convention `gross_return[0] = 1` (no date-0 return is defined there).
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPath {
    pub horizon: usize,
    pub capital: Vec<f64>,
    pub tree_price: Vec<f64>,
    pub fiat_price: Vec<f64>,
    pub gross_return: Vec<f64>,
    pub wage: Vec<f64>,
    pub c_young: Vec<f64>,
    pub c_old: Vec<f64>,
}

impl EquilibriumPath {
    /// Assemble and validate a production-economy path from its capital and
    /// price series.  Factor prices and consumptions are derived here, in one
    /// place, so every construction route produces bitwise-identical paths.
    pub fn from_production(
        params: &EconomyParams,
        capital: Vec<f64>,
        tree_price: Vec<f64>,
        fiat_price: Vec<f64>,
    ) -> Result<Self> {
        let tech = params.technology.as_ref().ok_or_else(|| {
            ModelError::RegimeMismatch("production path requested for an exchange economy".into())
        })?;
        assert!(capital.len() >= 2, "need at least K_0 and K_1");
        assert_eq!(capital.len(), tree_price.len() + 1);
        assert_eq!(tree_price.len(), fiat_price.len());
        let horizon = tree_price.len() - 1;

        let mut gross_return = Vec::with_capacity(horizon + 1);
        let mut wage = Vec::with_capacity(horizon + 1);
        let mut c_young = Vec::with_capacity(horizon + 1);
        let mut c_old = Vec::with_capacity(horizon + 1);

        for t in 0..=horizon {
            let k_t = capital[t];
            let k_next = capital[t + 1];
            if !(k_t > 0.0) || !(k_next > 0.0) {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("non-positive capital stock ({:e})", k_t.min(k_next)),
                });
            }
            let (q, p) = (tree_price[t], fiat_price[t]);
            if q < 0.0 || p < 0.0 {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("negative asset price (q={q:e}, p={p:e})"),
                });
            }
            let fp = tech.eval(k_t);
            let cy = young_consumption(params.endow_young.at(t), fp.wage, k_next, q, p);
            let co = old_consumption(
                params.endow_old.at(t),
                fp.gross_return,
                k_t,
                q,
                params.dividends.at(t),
                p,
            );
            if !(cy > 0.0) {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("young consumption {cy:e} not positive"),
                });
            }
            if !(co > 0.0) {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("old consumption {co:e} not positive"),
                });
            }
            gross_return.push(fp.gross_return);
            wage.push(fp.wage);
            c_young.push(cy);
            c_old.push(co);
        }

        Ok(EquilibriumPath {
            horizon,
            capital,
            tree_price,
            fiat_price,
            gross_return,
            wage,
            c_young,
            c_old,
        })
    }

    /// Assemble and validate an exchange-economy path from its price and
    /// return series (`gross_return[0]` is a convention, not a market price).
    pub fn from_exchange(
        params: &EconomyParams,
        tree_price: Vec<f64>,
        fiat_price: Vec<f64>,
        gross_return: Vec<f64>,
    ) -> Result<Self> {
        if params.technology.is_some() {
            return Err(ModelError::RegimeMismatch(
                "exchange path requested for a production economy".into(),
            ));
        }
        assert!(!tree_price.is_empty());
        assert_eq!(tree_price.len(), fiat_price.len());
        assert_eq!(tree_price.len(), gross_return.len());
        let horizon = tree_price.len() - 1;

        let mut c_young = Vec::with_capacity(horizon + 1);
        let mut c_old = Vec::with_capacity(horizon + 1);
        for t in 0..=horizon {
            let (q, p) = (tree_price[t], fiat_price[t]);
            if q < 0.0 || p < 0.0 {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("negative asset price (q={q:e}, p={p:e})"),
                });
            }
            let cy = young_consumption(params.endow_young.at(t), 0.0, 0.0, q, p);
            let co = old_consumption(params.endow_old.at(t), 0.0, 0.0, q, params.dividends.at(t), p);
            if !(cy > 0.0) {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("young consumption {cy:e} not positive"),
                });
            }
            if !(co > 0.0) {
                return Err(ModelError::NonEquilibriumPath {
                    t,
                    reason: format!("old consumption {co:e} not positive"),
                });
            }
            c_young.push(cy);
            c_old.push(co);
        }

        Ok(EquilibriumPath {
            horizon,
            capital: vec![0.0; horizon + 2],
            tree_price,
            fiat_price,
            gross_return,
            wage: vec![0.0; horizon + 1],
            c_young,
            c_old,
        })
    }

    /// Total savings vehicle value `K_{t+1} + q_t + p_t` carried out of date `t`.
    pub fn savings(&self, t: usize) -> f64 {
        self.capital[t + 1] + self.tree_price[t] + self.fiat_price[t]
    }
}

/// Scaled Euler residual `u'(c^y_t) - beta R u'(c^o_{t+1})`, normalised by the
/// larger of the two sides (and 1), so it is comparable across consumption scales.
fn euler_residual_scaled(params: &EconomyParams, cy: f64, gross_next: f64, co_next: f64) -> f64 {
    let lhs = params.utility.marginal(cy);
    let rhs = params.beta() * gross_next * params.utility.marginal(co_next);
    rel_gap(lhs, rhs)
}

/// Solve the within-period Euler equation of a production economy for next
/// capital, holding current asset prices fixed.
fn solve_capital_euler(
    params: &EconomyParams,
    tech: &Technology,
    wage_t: f64,
    t: usize,
    outside: f64, // q_t + p_t
) -> Result<(f64, StepDiagnostics)> {
    let ey = params.endow_young.at(t);
    let eo_next = params.endow_old.at(t + 1);
    let beta = params.beta();
    let cash = ey + wage_t - outside;
    if !(cash > 0.0) {
        return Err(ModelError::NonEquilibriumPath {
            t,
            reason: format!(
                "asset purchases {outside:e} exhaust young resources {:e}",
                ey + wage_t
            ),
        });
    }

    // g(K') = u'(c^y) - beta R(K') u'(c^o'); negative where the young would
    // rather save more, positive where they would rather save less.
    let g = |k_next: f64| {
        let fp = tech.eval(k_next);
        let cy = cash - k_next;
        let co = eo_next + fp.gross_return * (k_next + outside);
        params.utility.marginal(cy) - beta * fp.gross_return * params.utility.marginal(co)
    };

    // Upper end: consumption floor makes g blow up to +inf as K' -> cash.
    let mut hi = cash * (1.0 - 1e-14);
    let mut ghi = g(hi);
    let mut contract = 0;
    while !(ghi > 0.0) && contract < 40 {
        hi = cash - (cash - hi) * 0.0625;
        if hi >= cash {
            break;
        }
        ghi = g(hi);
        contract += 1;
    }

    // Lower end: expand geometrically towards zero until g turns negative.
    let lo0 = cash * 1e-14;
    let lower = crate::numeric::expand_down(&g, lo0, true, 0.125, 60);
    let (lo, _) = match lower {
        Some(pair) => pair,
        None => {
            // g stays positive everywhere: desired capital is not positive.
            return Err(ModelError::NonEquilibriumPath {
                t,
                reason: "desired capital is non-positive at these asset prices".into(),
            });
        }
    };
    if !(ghi > 0.0) {
        return Err(ModelError::BracketFailure { t, lo, hi });
    }

    let root = bisect_polished(&g, lo, hi, tol::BISECT_REL);
    let k_next = root.root;
    let fp = tech.eval(k_next);
    let cy = cash - k_next;
    let co = eo_next + fp.gross_return * (k_next + outside);
    let diag = StepDiagnostics {
        euler_residual: euler_residual_scaled(params, cy, fp.gross_return, co),
        root_bracket: root.bracket,
        iterations: root.iterations,
        multiplicity: RootMultiplicity::Unique,
    };
    Ok((k_next, diag))
}

/// Advance a production economy one period: solve for `K_{t+1}` and roll the
/// asset prices forward by no-arbitrage.
pub fn olg_step(
    params: &EconomyParams,
    state: &OlgState,
    t: usize,
) -> Result<(OlgState, StepDiagnostics)> {
    let tech = params.technology.as_ref().ok_or_else(|| {
        ModelError::RegimeMismatch("olg_step requires a production economy; use olg_step_exchange".into())
    })?;
    if !(state.capital > 0.0) {
        return Err(ModelError::NonPositiveCapital { value: state.capital });
    }
    let (q, p) = (state.tree_price, state.fiat_price);
    if q < 0.0 || p < 0.0 {
        return Err(ModelError::NonEquilibriumPath {
            t,
            reason: format!("negative asset price (q={q:e}, p={p:e})"),
        });
    }
    let wage_t = tech.eval(state.capital).wage;
    let (k_next, diag) = solve_capital_euler(params, tech, wage_t, t, q + p)?;

    let gross_next = tech.eval(k_next).gross_return;
    let d_next = params.dividends.at(t + 1);
    let q_next = q * gross_next - d_next;
    if q_next < 0.0 {
        let reason = if q == 0.0 && d_next > 0.0 {
            "tree price is zero while future dividends are positive".to_string()
        } else {
            format!("tree price driven negative ({q_next:e}) by the pricing recursion")
        };
        return Err(ModelError::NonEquilibriumPath { t: t + 1, reason });
    }
    let p_next = p * gross_next;
    Ok((OlgState { capital: k_next, tree_price: q_next, fiat_price: p_next }, diag))
}

/// Next prices and gross return produced by an exchange-economy step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeNext {
    pub tree_price: f64,
    pub fiat_price: f64,
    pub gross_return: f64,
}

/// Advance an exchange economy one period: find the gross return that makes
/// the young willing to buy the whole asset supply, then roll prices forward.
///
/// With isoelastic curvature above one the return equation can have two
/// solutions; solutions whose implied next prices leave the next young with
/// non-positive consumption (or a negative tree price) are discarded as
/// non-continuable, and `policy` arbitrates among the survivors.
pub fn olg_step_exchange(
    params: &EconomyParams,
    tree_price: f64,
    fiat_price: f64,
    t: usize,
    policy: RootPolicy,
    return_grid: usize,
) -> Result<(ExchangeNext, StepDiagnostics)> {
    if params.technology.is_some() {
        return Err(ModelError::RegimeMismatch(
            "olg_step_exchange requires an exchange economy".into(),
        ));
    }
    let (q, p) = (tree_price, fiat_price);
    if q < 0.0 || p < 0.0 {
        return Err(ModelError::NonEquilibriumPath {
            t,
            reason: format!("negative asset price (q={q:e}, p={p:e})"),
        });
    }
    let ey = params.endow_young.at(t);
    let eo_next = params.endow_old.at(t + 1);
    let d_next = params.dividends.at(t + 1);
    let beta = params.beta();
    let s = q + p;
    let cy = ey - s;
    if !(cy > 0.0) {
        return Err(ModelError::NonEquilibriumPath {
            t,
            reason: format!("asset purchases {s:e} exhaust the young endowment {ey:e}"),
        });
    }

    // No trade: with worthless assets the period is autarkic and the step is
    // degenerate.  A positive future dividend contradicts a zero tree price.
    if s == 0.0 {
        if d_next > 0.0 {
            return Err(ModelError::NonEquilibriumPath {
                t: t + 1,
                reason: "tree price is zero while future dividends are positive".into(),
            });
        }
        if !(eo_next > 0.0) {
            return Err(ModelError::NonEquilibriumPath {
                t: t + 1,
                reason: "autarky leaves the next old generation with nothing to consume".into(),
            });
        }
        // Shadow return off the autarkic Euler equation keeps the recorded
        // return series consistent with the (trivial) pricing recursions.
        let shadow =
            params.utility.marginal(cy) / (beta * params.utility.marginal(eo_next));
        return Ok((
            ExchangeNext { tree_price: 0.0, fiat_price: 0.0, gross_return: shadow },
            StepDiagnostics {
                euler_residual: 0.0,
                root_bracket: (shadow, shadow),
                iterations: 0,
                multiplicity: RootMultiplicity::Unique,
            },
        ));
    }

    // Degenerate corner: with log utility and no old endowment next period the
    // return cancels out of the Euler equation, which collapses to the static
    // restriction s_t = beta * c^y_t.  The return is then pinned by the same
    // restriction one period ahead.
    if params.utility.family == UtilityFamily::Logarithmic && eo_next == 0.0 {
        let target = beta * cy;
        if rel_gap(s, target) > 1e-9 {
            return Err(ModelError::NonEquilibriumPath {
                t,
                reason: format!(
                    "with log utility and no old endowment the savings rule requires \
                     q_t + p_t = beta/(1+beta) * e^y_t; got {s:e} vs {target:e}"
                ),
            });
        }
        let ey_next = params.endow_young.at(t + 1);
        let s_next = beta / (1.0 + beta) * ey_next;
        let gross = (s_next + d_next) / s;
        let q_next = q * gross - d_next;
        if q_next < 0.0 {
            return Err(ModelError::NonEquilibriumPath {
                t: t + 1,
                reason: format!("tree price driven negative ({q_next:e})"),
            });
        }
        return Ok((
            ExchangeNext { tree_price: q_next, fiat_price: p * gross, gross_return: gross },
            StepDiagnostics {
                euler_residual: 0.0,
                root_bracket: (gross, gross),
                iterations: 0,
                multiplicity: RootMultiplicity::Unique,
            },
        ));
    }

    // General case: scan a log-spaced return grid for sign changes of
    // h(R) = u'(c^y_t) - beta R u'(e^o_{t+1} + R s), refine each bracket.
    let lhs = params.utility.marginal(cy);
    let h = |r: f64| lhs - beta * r * params.utility.marginal(eo_next + r * s);

    let grid = log_spaced(1e-6, 1e6, return_grid.max(8));
    let mut roots: Vec<f64> = Vec::new();
    let mut iterations = grid.len();
    let mut prev = (grid[0], h(grid[0]));
    let mut bracket = (grid[0], *grid.last().unwrap());
    for &r in &grid[1..] {
        let hr = h(r);
        if prev.1 == 0.0 {
            roots.push(prev.0);
        } else if prev.1 * hr < 0.0 {
            let sol = bisect_polished(&h, prev.0, r, tol::BISECT_REL);
            iterations += sol.iterations;
            bracket = sol.bracket;
            roots.push(sol.root);
        }
        prev = (r, hr);
    }
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    roots.dedup_by(|a, b| rel_gap(*a, *b) < 1e-9);

    if roots.is_empty() {
        return Err(ModelError::BracketFailure { t, lo: 1e-6, hi: 1e6 });
    }

    // Keep only returns whose implied next prices can be bought by the next
    // young generation out of its endowment.
    let ey_next = params.endow_young.at(t + 1);
    let viable: Vec<f64> = roots
        .iter()
        .copied()
        .filter(|&r| {
            let q_next = q * r - d_next;
            let p_next = p * r;
            q_next >= 0.0 && ey_next - q_next - p_next > 0.0
        })
        .collect();
    if viable.is_empty() {
        return Err(ModelError::NonEquilibriumPath {
            t: t + 1,
            reason: format!(
                "every market-clearing return ({roots:?}) leaves the next young generation \
                 unable to buy the asset supply"
            ),
        });
    }

    let multiplicity = if viable.len() > 1 {
        RootMultiplicity::MultipleRoots
    } else {
        RootMultiplicity::Unique
    };
    let gross = match policy {
        RootPolicy::ErrorOnMultiple => {
            if viable.len() > 1 {
                return Err(ModelError::MultipleRoots { t, roots: viable });
            }
            viable[0]
        }
        RootPolicy::Smallest => viable[0],
        RootPolicy::Largest => *viable.last().unwrap(),
    };

    let q_next = q * gross - d_next;
    let p_next = p * gross;
    let co_next = eo_next + gross * s;
    Ok((
        ExchangeNext { tree_price: q_next, fiat_price: p_next, gross_return: gross },
        StepDiagnostics {
            euler_residual: euler_residual_scaled(params, cy, gross, co_next),
            root_bracket: bracket,
            iterations,
            multiplicity,
        },
    ))
}

/// Simulate an equilibrium path from initial asset prices with default options.
pub fn simulate_olg(params: &EconomyParams, q0: f64, p0: f64, horizon: usize) -> Result<EquilibriumPath> {
    simulate_olg_with(params, q0, p0, horizon, &SimOptions::default())
}

/// Simulate an equilibrium path from initial asset prices.
///
/// Production economies run the capital step for `t = 0..horizon-1` and one
/// final Euler solve at `t = horizon` (which needs no further price rollover);
/// exchange economies run the return step for `t = 0..horizon-1`.
pub fn simulate_olg_with(
    params: &EconomyParams,
    q0: f64,
    p0: f64,
    horizon: usize,
    options: &SimOptions,
) -> Result<EquilibriumPath> {
    params.validate()?;
    if horizon == 0 {
        return Err(ModelError::InvalidInput("horizon must be at least 1".into()));
    }
    if q0 < 0.0 || p0 < 0.0 {
        return Err(ModelError::InvalidInput(format!(
            "initial asset prices must be non-negative, got q0={q0}, p0={p0}"
        )));
    }

    match &params.technology {
        Some(tech) => {
            let mut capital = Vec::with_capacity(horizon + 2);
            let mut tree = Vec::with_capacity(horizon + 1);
            let mut fiat = Vec::with_capacity(horizon + 1);
            capital.push(params.k0);
            tree.push(q0);
            fiat.push(p0);
            let mut state = OlgState { capital: params.k0, tree_price: q0, fiat_price: p0 };
            for t in 0..horizon {
                let (next, _) = olg_step(params, &state, t)?;
                capital.push(next.capital);
                tree.push(next.tree_price);
                fiat.push(next.fiat_price);
                state = next;
            }
            // Final period still chooses next capital, but no further asset
            // prices are needed: the old at horizon+1 never sells on-path.
            let wage_last = tech.eval(state.capital).wage;
            let (k_last, _) = solve_capital_euler(
                params,
                tech,
                wage_last,
                horizon,
                state.tree_price + state.fiat_price,
            )?;
            capital.push(k_last);
            EquilibriumPath::from_production(params, capital, tree, fiat)
        }
        None => {
            let mut tree = Vec::with_capacity(horizon + 1);
            let mut fiat = Vec::with_capacity(horizon + 1);
            let mut gross = Vec::with_capacity(horizon + 1);
            tree.push(q0);
            fiat.push(p0);
            gross.push(1.0); // date-0 return is a reporting convention
            let (mut q, mut p) = (q0, p0);
            for t in 0..horizon {
                let (next, _) =
                    olg_step_exchange(params, q, p, t, options.root_policy, options.return_grid)?;
                tree.push(next.tree_price);
                fiat.push(next.fiat_price);
                gross.push(next.gross_return);
                q = next.tree_price;
                p = next.fiat_price;
            }
            EquilibriumPath::from_exchange(params, tree, fiat, gross)
        }
    }
}

/// Residuals of one date of a path.  Forward-looking entries (Euler and the
/// two pricing recursions) are zero at the final date, where they are undefined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRow {
    pub t: usize,
    pub euler: f64,
    pub tree_pricing: f64,
    pub fiat_pricing: f64,
    pub resource: f64,
}

/// Scaled residual report over a whole path.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub rows: Vec<ResidualRow>,
    pub max_euler: f64,
    pub max_tree_pricing: f64,
    pub max_fiat_pricing: f64,
    pub max_resource: f64,
}

impl ResidualReport {
    /// Largest residual of any kind on the path.
    pub fn max_any(&self) -> f64 {
        self.max_euler
            .max(self.max_tree_pricing)
            .max(self.max_fiat_pricing)
            .max(self.max_resource)
    }
}

/// Recompute every equilibrium residual of a stored path.
///
/// All residuals are relative (`|a-b| / max(1, |a|, |b|)`) so the report stays
/// meaningful on geometrically growing paths.
pub fn residual_report(params: &EconomyParams, path: &EquilibriumPath) -> ResidualReport {
    let horizon = path.horizon;
    let beta = params.beta();
    let mut rows = Vec::with_capacity(horizon + 1);
    let (mut me, mut mt, mut mf, mut mr) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);

    for t in 0..=horizon {
        let (euler, tree_pricing, fiat_pricing) = if t < horizon {
            let r_next = path.gross_return[t + 1];
            let lhs = params.utility.marginal(path.c_young[t]);
            let rhs = beta * r_next * params.utility.marginal(path.c_old[t + 1]);
            let euler = rel_gap(lhs, rhs);
            let tree = rel_gap(
                path.tree_price[t] * r_next,
                path.tree_price[t + 1] + params.dividends.at(t + 1),
            );
            let fiat = rel_gap(path.fiat_price[t] * r_next, path.fiat_price[t + 1]);
            (euler, tree, fiat)
        } else {
            (0.0, 0.0, 0.0)
        };

        let supply = match &params.technology {
            Some(tech) => {
                let fp = tech.eval(path.capital[t]);
                fp.output + (1.0 - tech.delta) * path.capital[t]
            }
            None => 0.0,
        };
        let lhs = path.capital[t + 1] + path.c_young[t] + path.c_old[t];
        let rhs = supply
            + params.endow_young.at(t)
            + params.endow_old.at(t)
            + params.dividends.at(t);
        let resource = rel_gap(lhs, rhs);

        me = me.max(euler);
        mt = mt.max(tree_pricing);
        mf = mf.max(fiat_pricing);
        mr = mr.max(resource);
        rows.push(ResidualRow { t, euler, tree_pricing, fiat_pricing, resource });
    }

    ResidualReport {
        rows,
        max_euler: me,
        max_tree_pricing: mt,
        max_fiat_pricing: mf,
        max_resource: mr,
    }
}
