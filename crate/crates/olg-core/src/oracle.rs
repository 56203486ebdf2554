//! Finite-horizon best-response oracle.
//!
//! Takes one agent of a two-agent candidate allocation, freezes prices and
//! the terminal asset position at a small horizon `T`, and searches for the
//! utility-maximising plan of that agent alone.  If the candidate really is
//! an equilibrium, the search cannot improve on it: the optimality gap is
//! zero up to solver noise.  This checks the allocation against a directly
//! optimised benchmark rather than against the same first-order conditions
//! the path was built from.
//!
//! The search exploits that all traded stores of value carry the same gross
//! return along an equilibrium path, so only *aggregate* savings matter for
//! the objective; this alignment is validated upfront (relative tolerance
//! `1e-9`) and the oracle refuses price systems that violate it.  The
//! optimisation is then a coordinate ascent over the savings levels
//! `s_0, ..., s_{T-1}`, each step solving a one-dimensional concave problem
//! by grid seeding plus golden-section refinement.  The objective is jointly
//! concave in the savings vector (incomes are linear in it, utility is
//! concave), so coordinate ascent converges to the global maximum.

use crate::bridge::{PriceSystem, TwoCycleAllocation};
use crate::economy::{EconomyParams, Utility};
use crate::error::{ModelError, Result};
use crate::numeric::{golden_max, rel_gap};
use crate::tol;

/// Which store of value absorbs deviation savings at a date where the
/// candidate saves nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Vehicle {
    Capital,
    Tree,
    Fiat,
}

/// One agent's decision problem over dates `0..=horizon` with prices and the
/// terminal position frozen at the candidate's values.
#[derive(Debug, Clone)]
pub struct TruncatedProblem {
    pub agent: usize,
    /// Last date of the problem; savings are chosen at `0..horizon`.
    pub horizon: usize,
    utility: Utility,
    /// Labor earnings plus endowment by date (the non-asset income).
    wage_income: Vec<f64>,
    /// `ret[t]` is the gross return earned between `t-1` and `t` on savings;
    /// `ret[0]` is unused.  `NaN` when no store of value exists at `t-1`.
    ret: Vec<f64>,
    /// Whether any savings vehicle exists at each choice date.
    can_save: Vec<bool>,
    /// Date-0 payoff of the holdings brought into the problem.
    init_income: f64,
    /// Cost at the final date of the pinned terminal position.
    terminal_outlay: f64,
    terminal_capital: f64,
    terminal_tree: f64,
    terminal_fiat: f64,
    /// Value shares `(capital, tree, fiat)` of the candidate's savings at
    /// each choice date, used to materialise per-asset plans; `None` where
    /// the candidate saved nothing (deviations go into `vehicle`).
    weights: Vec<Option<(f64, f64, f64)>>,
    vehicle: Vec<Option<Vehicle>>,
    tree_price: Vec<f64>,
    fiat_price: Vec<f64>,
    pub candidate_savings: Vec<f64>,
    /// Candidate utility evaluated with the problem's own income arithmetic.
    pub candidate_utility: f64,
}

/// Total discounted utility of a savings plan, or `None` if it forces
/// non-positive consumption somewhere.
pub fn plan_utility(problem: &TruncatedProblem, savings: &[f64]) -> Option<f64> {
    debug_assert_eq!(savings.len(), problem.horizon);
    let cons = consumption_of(problem, savings)?;
    let mut v = 0.0;
    let mut disc = 1.0;
    for &c in &cons {
        v += disc * problem.utility.value(c);
        disc *= problem.utility.beta;
    }
    Some(v)
}

/// Per-date consumption implied by a savings plan; `None` on infeasibility.
fn consumption_of(problem: &TruncatedProblem, savings: &[f64]) -> Option<Vec<f64>> {
    let t_end = problem.horizon;
    let mut cons = Vec::with_capacity(t_end + 1);
    for t in 0..=t_end {
        let income = if t == 0 {
            problem.wage_income[0] + problem.init_income
        } else {
            problem.wage_income[t] + savings[t - 1] * problem.ret[t]
        };
        let outlay = if t == t_end { problem.terminal_outlay } else { savings[t] };
        let c = income - outlay;
        if !(c > 0.0) {
            return None;
        }
        cons.push(c);
    }
    Some(cons)
}

/// The oracle's answer: an explicit plan at least as good as the candidate.
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub savings: Vec<f64>,
    pub consumption: Vec<f64>,
    pub capital: Vec<f64>,
    pub tree: Vec<f64>,
    pub fiat: Vec<f64>,
    pub utility: f64,
    pub sweeps: usize,
}

impl TruncatedProblem {
    /// Extract `agent`'s problem over `0..=t_small` from a candidate
    /// allocation and price system.
    pub fn from_candidate(
        params: &EconomyParams,
        alloc: &TwoCycleAllocation,
        prices: &PriceSystem,
        agent: usize,
        t_small: usize,
    ) -> Result<Self> {
        if agent > 1 {
            return Err(ModelError::InvalidInput(format!("agent index {agent} out of range")));
        }
        if t_small < 1 || t_small > alloc.horizon || t_small > prices.horizon() {
            return Err(ModelError::InvalidInput(format!(
                "truncation date {t_small} must lie in 1..={}",
                alloc.horizon.min(prices.horizon())
            )));
        }
        let has_capital = params.technology.is_some();
        let dividend: Vec<f64> = (0..=t_small).map(|t| params.dividends.at(t)).collect();

        // All stores of value must earn the same return, otherwise aggregate
        // savings do not determine the budget and this oracle does not apply.
        for t in 1..=t_small {
            let mut returns: Vec<f64> = Vec::with_capacity(3);
            if has_capital {
                returns.push(prices.gross_return[t]);
            }
            if prices.tree_price[t - 1] > 0.0 {
                returns.push((prices.tree_price[t] + dividend[t]) / prices.tree_price[t - 1]);
            }
            if prices.fiat_price[t - 1] > 0.0 {
                returns.push(prices.fiat_price[t] / prices.fiat_price[t - 1]);
            }
            for pair in returns.windows(2) {
                if rel_gap(pair[0], pair[1]) > tol::RETURN_ALIGN_REL {
                    return Err(ModelError::InvalidInput(format!(
                        "asset returns diverge at date {t} ({:e} vs {:e}); \
                         the savings-aggregation oracle does not apply",
                        pair[0], pair[1]
                    )));
                }
            }
        }

        let wage_income: Vec<f64> = (0..=t_small)
            .map(|t| prices.wage[t] * alloc.labor[agent][t] + alloc.endowment[agent][t])
            .collect();
        let init_income = prices.gross_return[0] * alloc.capital_init[agent]
            + (prices.tree_price[0] + dividend[0]) * alloc.tree_init[agent]
            + prices.fiat_price[0] * alloc.fiat_init[agent];

        // Candidate aggregate savings and their per-asset composition.
        let position_value = |t: usize| {
            alloc.capital_next[agent][t]
                + prices.tree_price[t] * alloc.tree[agent][t]
                + prices.fiat_price[t] * alloc.fiat[agent][t]
        };
        let candidate_savings: Vec<f64> = (0..t_small).map(&position_value).collect();
        let terminal_outlay = position_value(t_small);

        let mut ret = vec![f64::NAN; t_small + 1];
        let mut can_save = vec![false; t_small];
        let mut weights: Vec<Option<(f64, f64, f64)>> = vec![None; t_small];
        let mut vehicle: Vec<Option<Vehicle>> = vec![None; t_small];
        for t in 0..t_small {
            let s = candidate_savings[t];
            if s > 0.0 {
                let k = alloc.capital_next[agent][t];
                let a_val = prices.tree_price[t] * alloc.tree[agent][t];
                let b_val = prices.fiat_price[t] * alloc.fiat[agent][t];
                weights[t] = Some((k / s, a_val / s, b_val / s));
                ret[t + 1] = (prices.gross_return[t + 1] * k
                    + (prices.tree_price[t + 1] + dividend[t + 1]) * alloc.tree[agent][t]
                    + prices.fiat_price[t + 1] * alloc.fiat[agent][t])
                    / s;
                can_save[t] = true;
            } else {
                // Deviations need a vehicle the agent can actually buy.
                let v = if has_capital {
                    Some(Vehicle::Capital)
                } else if prices.tree_price[t] > 0.0 {
                    Some(Vehicle::Tree)
                } else if prices.fiat_price[t] > 0.0 {
                    Some(Vehicle::Fiat)
                } else {
                    None
                };
                vehicle[t] = v;
                can_save[t] = v.is_some();
                ret[t + 1] = match v {
                    Some(Vehicle::Capital) => prices.gross_return[t + 1],
                    Some(Vehicle::Tree) => {
                        (prices.tree_price[t + 1] + dividend[t + 1]) / prices.tree_price[t]
                    }
                    Some(Vehicle::Fiat) => prices.fiat_price[t + 1] / prices.fiat_price[t],
                    None => f64::NAN,
                };
            }
        }

        let mut problem = TruncatedProblem {
            agent,
            horizon: t_small,
            utility: params.utility,
            wage_income,
            ret,
            can_save,
            init_income,
            terminal_outlay,
            terminal_capital: alloc.capital_next[agent][t_small],
            terminal_tree: alloc.tree[agent][t_small],
            terminal_fiat: alloc.fiat[agent][t_small],
            weights,
            vehicle,
            tree_price: prices.tree_price[..=t_small].to_vec(),
            fiat_price: prices.fiat_price[..=t_small].to_vec(),
            candidate_savings,
            candidate_utility: f64::NAN,
        };

        // The candidate must be consistent with its own budget sets.
        let cons = consumption_of(&problem, &problem.candidate_savings).ok_or_else(|| {
            ModelError::InfeasibleTerminal(format!(
                "candidate plan of agent {agent} is infeasible at the pinned terminal position"
            ))
        })?;
        for (t, &c) in cons.iter().enumerate() {
            if rel_gap(c, alloc.consumption[agent][t]) > 1e-9 {
                return Err(ModelError::InvalidInput(format!(
                    "candidate consumption of agent {agent} at date {t} is not budget-consistent: \
                     reconstructed {c:e}, allocated {:e}",
                    alloc.consumption[agent][t]
                )));
            }
        }
        problem.candidate_utility =
            plan_utility(&problem, &problem.candidate_savings).expect("checked feasible above");
        Ok(problem)
    }

    /// Scaled Euler residuals `u'(c_t) - beta R_{t+1} u'(c_{t+1})` of the
    /// candidate at every date where it holds an interior savings position.
    pub fn interior_euler_residuals(&self) -> Vec<f64> {
        let cons = consumption_of(self, &self.candidate_savings)
            .expect("candidate was validated feasible");
        let beta = self.utility.beta;
        (0..self.horizon)
            .filter(|&t| self.candidate_savings[t] > 0.0)
            .map(|t| {
                let lhs = self.utility.marginal(cons[t]);
                let rhs = beta * self.ret[t + 1] * self.utility.marginal(cons[t + 1]);
                rel_gap(lhs, rhs)
            })
            .collect()
    }
}

/// Coordinate-ascent search for the best response.  `grid_density` controls
/// the per-coordinate seeding grid (at least 33 points are always used).
pub fn best_response_search(problem: &TruncatedProblem, grid_density: usize) -> BestResponse {
    let t_end = problem.horizon;
    let n_grid = grid_density.max(33);
    let mut s = problem.candidate_savings.clone();
    let mut best_v =
        plan_utility(problem, &s).expect("candidate plan is feasible by construction");
    let mut sweeps = 0;

    for sweep in 1..=500 {
        sweeps = sweep;
        let mut max_change: f64 = 0.0;
        for t in 0..t_end {
            if !problem.can_save[t] {
                continue;
            }
            // Income available at t given the (current) upstream choice.
            let income = if t == 0 {
                problem.wage_income[0] + problem.init_income
            } else {
                problem.wage_income[t] + s[t - 1] * problem.ret[t]
            };
            // Downstream consumption floor: next date must stay affordable.
            let floor_next =
                if t + 1 == t_end { problem.terminal_outlay } else { s[t + 1] };
            let lo = if problem.wage_income[t + 1] >= floor_next {
                0.0
            } else {
                ((floor_next - problem.wage_income[t + 1]) / problem.ret[t + 1])
                    * (1.0 + 1e-12)
            };
            let hi = income * (1.0 - 1e-12);
            if !(lo < hi) {
                continue;
            }

            let value_at = |x: f64, s: &mut Vec<f64>| -> f64 {
                let old = s[t];
                s[t] = x;
                let v = plan_utility(problem, s).unwrap_or(f64::NEG_INFINITY);
                s[t] = old;
                v
            };

            // Grid seed, then golden-section refinement around the best cell.
            let step = (hi - lo) / (n_grid - 1) as f64;
            let mut best_x = s[t].clamp(lo, hi);
            let mut best_here = value_at(best_x, &mut s);
            for i in 0..n_grid {
                let x = if i + 1 == n_grid { hi } else { lo + step * i as f64 };
                let v = value_at(x, &mut s);
                if v > best_here {
                    best_here = v;
                    best_x = x;
                }
            }
            let (a, b) = ((best_x - step).max(lo), (best_x + step).min(hi));
            let (x_star, v_star) =
                golden_max(|x| value_at(x, &mut s), a, b, 1e-13 * (1.0 + hi));
            let (x_new, v_new) =
                if v_star > best_here { (x_star, v_star) } else { (best_x, best_here) };
            if v_new > best_v {
                max_change = max_change.max((x_new - s[t]).abs());
                s[t] = x_new;
                best_v = v_new;
            }
        }
        let scale = 1.0 + s.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        if max_change <= 1e-11 * scale {
            break;
        }
    }

    materialize(problem, s, best_v, sweeps)
}

/// Turn an aggregate savings plan into per-asset holdings, splitting by the
/// candidate's value weights where it saved and by the deviation vehicle
/// where it did not.  Zero-price positions are copied from the candidate
/// verbatim since they cost nothing.
fn materialize(
    problem: &TruncatedProblem,
    savings: Vec<f64>,
    utility: f64,
    sweeps: usize,
) -> BestResponse {
    let t_end = problem.horizon;
    let consumption =
        consumption_of(problem, &savings).expect("search only accepts feasible plans");
    let mut capital = Vec::with_capacity(t_end + 1);
    let mut tree = Vec::with_capacity(t_end + 1);
    let mut fiat = Vec::with_capacity(t_end + 1);
    for t in 0..t_end {
        let s = savings[t];
        match (problem.weights[t], problem.vehicle[t]) {
            (Some((wk, wa, wb)), _) => {
                capital.push(wk * s);
                tree.push(if problem.tree_price[t] > 0.0 {
                    wa * s / problem.tree_price[t]
                } else {
                    0.0
                });
                fiat.push(if problem.fiat_price[t] > 0.0 {
                    wb * s / problem.fiat_price[t]
                } else {
                    0.0
                });
            }
            (None, Some(Vehicle::Capital)) => {
                capital.push(s);
                tree.push(0.0);
                fiat.push(0.0);
            }
            (None, Some(Vehicle::Tree)) => {
                capital.push(0.0);
                tree.push(s / problem.tree_price[t]);
                fiat.push(0.0);
            }
            (None, Some(Vehicle::Fiat)) => {
                capital.push(0.0);
                tree.push(0.0);
                fiat.push(s / problem.fiat_price[t]);
            }
            (None, None) => {
                capital.push(0.0);
                tree.push(0.0);
                fiat.push(0.0);
            }
        }
    }
    capital.push(problem.terminal_capital);
    tree.push(problem.terminal_tree);
    fiat.push(problem.terminal_fiat);
    BestResponse { savings, consumption, capital, tree, fiat, utility, sweeps }
}

/// How much utility the oracle's best response gains over the candidate;
/// gains below the solver-noise threshold count as zero.
pub fn optimality_gap(problem: &TruncatedProblem, best: &BestResponse) -> f64 {
    let diff = best.utility - problem.candidate_utility;
    if diff <= tol::ORACLE_UTILITY_ABS {
        0.0
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::map_olg_to_two_cycle;
    use crate::economy::SequenceSpec;
    use crate::scenarios::{cobb_douglas_bubble_path, fiat_continuum_path, fiat_params};

    fn critical_fixture(
        t_small: usize,
    ) -> (EconomyParams, TwoCycleAllocation, PriceSystem) {
        let res = cobb_douglas_bubble_path(0.3, 1.0, 0.9, 1.0, 0.0315789473684210526, 24)
            .unwrap();
        let alloc = map_olg_to_two_cycle(&res.params, &res.path).unwrap();
        let prices = PriceSystem::from_path(&res.path);
        assert!(t_small <= 24);
        (res.params.clone(), alloc, prices)
    }

    fn kocherlakota_fixture() -> (EconomyParams, TwoCycleAllocation, PriceSystem) {
        let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
        let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
        let params = fiat_params(&young, &old, 2.0, 0.875).unwrap();
        let path = fiat_continuum_path(&young, &old, 2.0, 0.875, 14.0, 24).unwrap();
        let alloc = map_olg_to_two_cycle(&params, &path).unwrap();
        let prices = PriceSystem::from_path(&path);
        (params, alloc, prices)
    }

    #[test]
    fn equilibrium_candidates_are_unimprovable() {
        let (params, alloc, prices) = critical_fixture(8);
        for agent in 0..2 {
            let problem =
                TruncatedProblem::from_candidate(&params, &alloc, &prices, agent, 8).unwrap();
            let best = best_response_search(&problem, 64);
            assert_eq!(
                optimality_gap(&problem, &best),
                0.0,
                "agent {agent} improved by {:e}",
                best.utility - problem.candidate_utility
            );
        }
    }

    #[test]
    fn stationary_fiat_candidate_is_unimprovable() {
        let (params, alloc, prices) = kocherlakota_fixture();
        for agent in 0..2 {
            let problem =
                TruncatedProblem::from_candidate(&params, &alloc, &prices, agent, 8).unwrap();
            let best = best_response_search(&problem, 64);
            assert_eq!(optimality_gap(&problem, &best), 0.0, "agent {agent}");
            // Interior Euler equations hold tightly at the candidate.
            for r in problem.interior_euler_residuals() {
                assert!(r < 1e-10, "euler residual {r:e}");
            }
        }
    }

    #[test]
    fn forced_deviations_lower_utility() {
        let (params, alloc, prices) = critical_fixture(8);
        let problem =
            TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 8).unwrap();
        let base = problem.candidate_utility;
        // Agent 0 works at even dates; its savings at t=0 are interior.
        assert!(problem.candidate_savings[0] > 0.0);
        let mut worst = 0.0_f64;
        for eps in [-0.05, -0.01, 0.01, 0.05] {
            let mut s = problem.candidate_savings.clone();
            s[0] *= 1.0 + eps;
            let v = plan_utility(&problem, &s).unwrap();
            assert!(v < base, "deviation eps={eps} should hurt: {v} vs {base}");
            worst = worst.max(base - v);
        }
        // Larger deviations hurt more (concavity around the optimum).
        let mut s = problem.candidate_savings.clone();
        s[0] *= 1.10;
        let v_far = plan_utility(&problem, &s).unwrap();
        assert!(base - v_far > worst);
    }

    #[test]
    fn objective_is_concave_along_chords() {
        let (params, alloc, prices) = kocherlakota_fixture();
        let problem =
            TruncatedProblem::from_candidate(&params, &alloc, &prices, 1, 8).unwrap();
        let s0 = problem.candidate_savings.clone();
        let mut s1 = s0.clone();
        for x in s1.iter_mut() {
            if *x > 0.0 {
                *x *= 1.2;
            }
        }
        let mid: Vec<f64> = s0.iter().zip(&s1).map(|(a, b)| 0.5 * (a + b)).collect();
        let (v0, v1, vm) = (
            plan_utility(&problem, &s0).unwrap(),
            plan_utility(&problem, &s1).unwrap(),
            plan_utility(&problem, &mid).unwrap(),
        );
        assert!(vm >= 0.5 * (v0 + v1), "chord violates concavity: {vm} < {}", 0.5 * (v0 + v1));
    }

    #[test]
    fn misaligned_returns_are_refused() {
        let (params, alloc, mut prices) = critical_fixture(8);
        prices.fiat_price[3] *= 1.01;
        let err = TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 8);
        assert!(matches!(err, Err(ModelError::InvalidInput(_))), "{err:?}");
    }

    #[test]
    fn unaffordable_terminal_position_is_rejected() {
        let (params, mut alloc, prices) = critical_fixture(8);
        alloc.capital_next[0][8] = 1.0e6;
        let err = TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 8);
        assert!(matches!(err, Err(ModelError::InfeasibleTerminal(_))), "{err:?}");
    }

    #[test]
    fn truncation_bounds_are_checked() {
        let (params, alloc, prices) = critical_fixture(8);
        assert!(TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 0).is_err());
        assert!(TruncatedProblem::from_candidate(&params, &alloc, &prices, 0, 999).is_err());
        assert!(TruncatedProblem::from_candidate(&params, &alloc, &prices, 2, 8).is_err());
    }
}
