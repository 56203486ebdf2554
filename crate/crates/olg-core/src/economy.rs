//! Economic primitives: preferences, production technologies, parametric
//! sequences, and the bundled parameter set for an overlapping-generations
//! economy.
//!
//! Agents live two periods, value consumption by a time-separable utility
//! `u(c_young) + beta * u(c_old)`, and store wealth in capital, a dividend
//! tree in unit supply, and intrinsically useless fiat money in unit supply.
//! Production, when present, is either Cobb-Douglas `A k^alpha L^(1-alpha)`
//! or linear `A k + B L`, with depreciation `delta`; factor markets are
//! competitive, so the wage is output minus capital income and the gross
//! return on capital is `1 - delta + f'(k)`.

use crate::error::{ModelError, Result};

/// Curvature family of the period utility function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityFamily {
    /// `u(c) = ln c`.
    Logarithmic,
    /// `u(c) = c^(1-sigma) / (1-sigma)` with `sigma > 0`, `sigma != 1`.
    Isoelastic { sigma: f64 },
}

/// Two-period preferences: a curvature family plus the discount factor
/// applied to old-age utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Utility {
    pub family: UtilityFamily,
    /// Discount factor in (0, 1).
    pub beta: f64,
}

impl Utility {
    pub fn log(beta: f64) -> Self {
        Utility { family: UtilityFamily::Logarithmic, beta }
    }

    pub fn isoelastic(sigma: f64, beta: f64) -> Self {
        Utility { family: UtilityFamily::Isoelastic { sigma }, beta }
    }

    /// Basic parameter sanity; called by [`EconomyParams::validate`].
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(ModelError::InvalidInput(format!(
                "discount factor must lie in (0,1), got {}",
                self.beta
            )));
        }
        if let UtilityFamily::Isoelastic { sigma } = self.family {
            if !(sigma > 0.0) || sigma == 1.0 {
                return Err(ModelError::InvalidInput(format!(
                    "isoelastic curvature must be positive and different from 1, got {sigma}; \
                     use the logarithmic family for unit curvature"
                )));
            }
        }
        Ok(())
    }

    /// Period utility.  Non-positive consumption maps to `-inf`, which lets
    /// maximisers treat the consumption floor as an infinite barrier.
    #[inline]
    pub fn value(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.family {
            UtilityFamily::Logarithmic => c.ln(),
            UtilityFamily::Isoelastic { sigma } => c.powf(1.0 - sigma) / (1.0 - sigma),
        }
    }

    /// Marginal utility.  Non-positive consumption maps to `+inf` so that
    /// first-order conditions act as a barrier at the consumption floor; use
    /// [`utility_marginal`] for the checked variant.
    #[inline]
    pub fn marginal(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return f64::INFINITY;
        }
        match self.family {
            UtilityFamily::Logarithmic => 1.0 / c,
            UtilityFamily::Isoelastic { sigma } => c.powf(-sigma),
        }
    }
}

/// Marginal utility with domain checking: errors on `c <= 0` instead of
/// returning the barrier value.
pub fn utility_marginal(u: &Utility, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(ModelError::NonPositiveConsumption { value: c });
    }
    Ok(u.marginal(c))
}

/// Functional form of the production technology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TechnologyFamily {
    /// `f(k) = A k^alpha` per unit of labour, `alpha` in (0, 1).
    CobbDouglas { tfp: f64, alpha: f64 },
    /// `F(K, L) = A K + B L`, so per unit of labour `f(k) = A k + B`.
    Linear { slope: f64, intercept: f64 },
}

/// A production technology together with its depreciation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Technology {
    pub family: TechnologyFamily,
    /// Depreciation rate in [0, 1].
    pub delta: f64,
}

/// Competitive factor prices implied by a capital stock (per unit of labour).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorPrices {
    /// Output `f(k)`.
    pub output: f64,
    /// Rental rate `f'(k)`.
    pub rental: f64,
    /// Wage `f(k) - k f'(k)`.
    pub wage: f64,
    /// Gross return on capital `1 - delta + f'(k)`.
    pub gross_return: f64,
}

impl Technology {
    pub fn cobb_douglas(tfp: f64, alpha: f64, delta: f64) -> Self {
        Technology { family: TechnologyFamily::CobbDouglas { tfp, alpha }, delta }
    }

    pub fn linear(slope: f64, intercept: f64, delta: f64) -> Self {
        Technology { family: TechnologyFamily::Linear { slope, intercept }, delta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(ModelError::InvalidInput(format!(
                "depreciation rate must lie in [0,1], got {}",
                self.delta
            )));
        }
        match self.family {
            TechnologyFamily::CobbDouglas { tfp, alpha } => {
                if !(tfp > 0.0) || !(alpha > 0.0 && alpha < 1.0) {
                    return Err(ModelError::InvalidInput(format!(
                        "Cobb-Douglas technology needs positive productivity and capital share in (0,1), \
                         got A={tfp}, alpha={alpha}"
                    )));
                }
            }
            TechnologyFamily::Linear { slope, intercept } => {
                if !(slope > 0.0) || !(intercept > 0.0) {
                    return Err(ModelError::InvalidInput(format!(
                        "linear technology needs positive coefficients, got A={slope}, B={intercept}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Factor prices at capital `k > 0` (per unit of labour).  Unchecked hot
    /// path; use [`technology_eval`] for the domain-checked variant.
    #[inline]
    pub fn eval(&self, k: f64) -> FactorPrices {
        debug_assert!(k > 0.0, "technology evaluated at non-positive capital");
        match self.family {
            TechnologyFamily::CobbDouglas { tfp, alpha } => {
                let output = tfp * k.powf(alpha);
                let rental = alpha * output / k;
                FactorPrices {
                    output,
                    rental,
                    wage: output - k * rental,
                    gross_return: 1.0 - self.delta + rental,
                }
            }
            TechnologyFamily::Linear { slope, intercept } => FactorPrices {
                output: slope * k + intercept,
                rental: slope,
                wage: intercept,
                gross_return: 1.0 - self.delta + slope,
            },
        }
    }
}

/// Factor prices with domain checking: errors on `k <= 0`.
pub fn technology_eval(tech: &Technology, k: f64) -> Result<FactorPrices> {
    if !(k > 0.0) {
        return Err(ModelError::NonPositiveCapital { value: k });
    }
    Ok(tech.eval(k))
}

/// Continuation rule for an explicitly listed sequence once the list runs out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Repeat the last listed value forever.
    Constant,
    /// Grow the last listed value by this ratio each period.
    Geometric(f64),
}

/// A deterministic scalar sequence indexed by the date `t >= 0`.
///
/// Sequences are parametric rather than pre-tabulated so that infinite-horizon
/// objects (discounted tails, asymptotic growth ratios) have closed forms.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpec {
    /// `x_t = c` for all `t`.
    Constant(f64),
    /// `x_t = base * ratio^t`.
    Geometric { base: f64, ratio: f64 },
    /// First values listed explicitly, then continued by the tail rule from
    /// the last listed value.
    Explicit { values: Vec<f64>, tail: Tail },
}

impl SequenceSpec {
    pub fn zero() -> Self {
        SequenceSpec::Constant(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::Constant(c) => {
                if !c.is_finite() {
                    return Err(ModelError::InvalidInput("non-finite constant sequence".into()));
                }
            }
            SequenceSpec::Geometric { base, ratio } => {
                if !base.is_finite() || !ratio.is_finite() || *ratio < 0.0 {
                    return Err(ModelError::InvalidInput(format!(
                        "geometric sequence needs finite base and non-negative ratio, got base={base}, ratio={ratio}"
                    )));
                }
            }
            SequenceSpec::Explicit { values, tail } => {
                if values.is_empty() {
                    return Err(ModelError::InvalidInput("explicit sequence with no values".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(ModelError::InvalidInput("non-finite value in explicit sequence".into()));
                }
                if let Tail::Geometric(r) = tail {
                    if !r.is_finite() || *r < 0.0 {
                        return Err(ModelError::InvalidInput(format!(
                            "explicit sequence tail ratio must be non-negative, got {r}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Value at date `t` (total function: the tail rule covers every date).
    pub fn at(&self, t: usize) -> f64 {
        match self {
            SequenceSpec::Constant(c) => *c,
            SequenceSpec::Geometric { base, ratio } => base * ratio.powi(t as i32),
            SequenceSpec::Explicit { values, tail } => {
                if t < values.len() {
                    values[t]
                } else {
                    let last = *values.last().expect("validated non-empty");
                    match tail {
                        Tail::Constant => last,
                        Tail::Geometric(r) => last * r.powi((t + 1 - values.len()) as i32),
                    }
                }
            }
        }
    }

    /// True when every value of the sequence is zero.
    pub fn is_zero(&self) -> bool {
        match self {
            SequenceSpec::Constant(c) => *c == 0.0,
            SequenceSpec::Geometric { base, .. } => *base == 0.0,
            SequenceSpec::Explicit { values, tail } => {
                values.iter().all(|v| *v == 0.0)
                    || (matches!(tail, Tail::Geometric(r) if *r == 0.0)
                        && values.last() == Some(&0.0))
            }
        }
    }

    /// True when `x_t > 0` for every `t`.
    pub fn strictly_positive(&self) -> bool {
        match self {
            SequenceSpec::Constant(c) => *c > 0.0,
            SequenceSpec::Geometric { base, ratio } => *base > 0.0 && *ratio > 0.0,
            SequenceSpec::Explicit { values, tail } => {
                values.iter().all(|v| *v > 0.0)
                    && match tail {
                        Tail::Constant => true,
                        Tail::Geometric(r) => *r > 0.0,
                    }
            }
        }
    }

    /// Asymptotic per-period growth factor of the sequence.
    pub fn tail_ratio(&self) -> f64 {
        match self {
            SequenceSpec::Constant(_) => 1.0,
            SequenceSpec::Geometric { ratio, .. } => *ratio,
            SequenceSpec::Explicit { tail, .. } => match tail {
                Tail::Constant => 1.0,
                Tail::Geometric(r) => *r,
            },
        }
    }

    /// View the sequence as a pure geometric `base * ratio^t` when possible.
    pub fn as_geometric(&self) -> Option<(f64, f64)> {
        match self {
            SequenceSpec::Constant(c) => Some((*c, 1.0)),
            SequenceSpec::Geometric { base, ratio } => Some((*base, *ratio)),
            SequenceSpec::Explicit { .. } => None,
        }
    }

    /// Closed-form discounted tail `sum_{s > tau} x_{t0+s} / R^s` at a constant
    /// gross return `R > 0`.  Returns `None` when the series diverges.
    pub fn discounted_tail(&self, gross_return: f64, t0: usize, tau: usize) -> Option<f64> {
        assert!(gross_return > 0.0);
        let geom = |coeff: f64, x: f64, s0: usize| -> Option<f64> {
            // coeff * sum_{s >= s0} x^s
            if coeff == 0.0 {
                return Some(0.0);
            }
            if x >= 1.0 {
                return None;
            }
            Some(coeff * x.powi(s0 as i32) / (1.0 - x))
        };
        match self {
            SequenceSpec::Constant(c) => geom(*c, 1.0 / gross_return, tau + 1),
            SequenceSpec::Geometric { base, ratio } => {
                if *base == 0.0 || *ratio == 0.0 {
                    return Some(0.0);
                }
                geom(base * ratio.powi(t0 as i32), ratio / gross_return, tau + 1)
            }
            SequenceSpec::Explicit { values, tail } => {
                let mut total = 0.0;
                let mut s = tau + 1;
                // Listed stretch, term by term.
                while t0 + s < values.len() {
                    total += values[t0 + s] / gross_return.powi(s as i32);
                    s += 1;
                }
                // Continuation from the last listed value.
                let last_idx = values.len() - 1;
                let last = values[last_idx];
                let tail_sum = match tail {
                    Tail::Constant => geom(last, 1.0 / gross_return, s)?,
                    Tail::Geometric(r) => {
                        if *r == 0.0 || last == 0.0 {
                            0.0
                        } else {
                            // x_{t0+s} = last * r^(t0+s-last_idx)
                            geom(last * r.powi(t0 as i32 - last_idx as i32), r / gross_return, s)?
                        }
                    }
                };
                Some(total + tail_sum)
            }
        }
    }
}

/// Evaluate a sequence at a date; total function, provided as a free operation
/// to mirror [`utility_marginal`] and [`technology_eval`].
pub fn sequence_eval(s: &SequenceSpec, t: usize) -> f64 {
    s.at(t)
}

/// Full parameter set of an overlapping-generations economy.
///
/// `technology = None` selects a pure exchange economy (no capital, no wage).
/// The date-0 old generation enters holding the initial capital stock `k0`,
/// the whole tree, and the whole fiat stock.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyParams {
    pub utility: Utility,
    pub technology: Option<Technology>,
    /// Dividend stream of the tree, `d_t >= 0`.
    pub dividends: SequenceSpec,
    /// Endowment received while young.
    pub endow_young: SequenceSpec,
    /// Endowment received while old.
    pub endow_old: SequenceSpec,
    /// Initial capital stock held by the date-0 old (ignored in exchange economies).
    pub k0: f64,
    /// Outstanding tree supply held by the date-0 old; fixed at 1.
    pub a_init: f64,
    /// Outstanding fiat supply held by the date-0 old; fixed at 1.
    pub b_init: f64,
}

impl EconomyParams {
    /// Convenience constructor with unit asset supplies.
    pub fn new(
        utility: Utility,
        technology: Option<Technology>,
        dividends: SequenceSpec,
        endow_young: SequenceSpec,
        endow_old: SequenceSpec,
        k0: f64,
    ) -> Self {
        EconomyParams {
            utility,
            technology,
            dividends,
            endow_young,
            endow_old,
            k0,
            a_init: 1.0,
            b_init: 1.0,
        }
    }

    pub fn is_exchange(&self) -> bool {
        self.technology.is_none()
    }

    pub fn beta(&self) -> f64 {
        self.utility.beta
    }

    pub fn validate(&self) -> Result<()> {
        self.utility.validate()?;
        if let Some(t) = &self.technology {
            t.validate()?;
            if !(self.k0 > 0.0) {
                return Err(ModelError::InvalidInput(format!(
                    "production economy needs a positive initial capital stock, got k0={}",
                    self.k0
                )));
            }
        } else if !(self.endow_young.at(0) > 0.0) {
            // With neither capital nor a date-0 young endowment there is
            // nothing for the young to consume or save.
            return Err(ModelError::InvalidInput(
                "exchange economy needs a positive young endowment at t=0".into(),
            ));
        }
        self.dividends.validate()?;
        self.endow_young.validate()?;
        self.endow_old.validate()?;
        if !self.dividends.is_zero() {
            // Negative dividends break the free-disposal pricing bounds.
            for t in 0..4 {
                if self.dividends.at(t) < 0.0 {
                    return Err(ModelError::InvalidInput(format!(
                        "dividends must be non-negative, found {} at t={t}",
                        self.dividends.at(t)
                    )));
                }
            }
        }
        if self.a_init != 1.0 || self.b_init != 1.0 {
            return Err(ModelError::InvalidInput(
                "asset supplies are normalised to 1".into(),
            ));
        }
        Ok(())
    }
}

/// Output of [`steady_state_and_gamma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Bubble-feasibility index `gamma = (beta/(1+beta)) * (1-alpha)/alpha`.
    pub gamma: f64,
    /// Savings coefficient `rho = gamma * alpha * A`, so the bubbleless
    /// capital recursion is `K_{t+1} = rho * K_t^alpha`.
    pub rho: f64,
    /// Bubbleless steady-state capital `K* = rho^(1/(1-alpha))`.
    pub k_star: f64,
    /// True when the steady-state rental rate is below one, i.e. the economy
    /// can sustain asset bubbles.
    pub low_interest: bool,
}

/// Steady state and bubble-feasibility index for the log-utility
/// Cobb-Douglas economy with full depreciation and no endowments.
///
/// Outside that regime the closed forms below do not apply, hence the
/// `RegimeMismatch` error rather than a silent wrong answer.
pub fn steady_state_and_gamma(params: &EconomyParams) -> Result<SteadyState> {
    let tech = params
        .technology
        .as_ref()
        .ok_or_else(|| ModelError::RegimeMismatch("steady state requires a production economy".into()))?;
    let (tfp, alpha) = match tech.family {
        TechnologyFamily::CobbDouglas { tfp, alpha } => (tfp, alpha),
        TechnologyFamily::Linear { .. } => {
            return Err(ModelError::RegimeMismatch(
                "steady state is defined for the Cobb-Douglas technology".into(),
            ))
        }
    };
    if tech.delta != 1.0 {
        return Err(ModelError::RegimeMismatch(format!(
            "steady state closed form assumes full depreciation, got delta={}",
            tech.delta
        )));
    }
    if params.utility.family != UtilityFamily::Logarithmic {
        return Err(ModelError::RegimeMismatch(
            "steady state closed form assumes logarithmic utility".into(),
        ));
    }
    if !params.dividends.is_zero() || !params.endow_young.is_zero() || !params.endow_old.is_zero() {
        return Err(ModelError::RegimeMismatch(
            "steady state closed form assumes no dividends and no endowments".into(),
        ));
    }
    let beta = params.beta();
    let gamma = beta / (1.0 + beta) * (1.0 - alpha) / alpha;
    let rho = gamma * alpha * tfp;
    let k_star = rho.powf(1.0 / (1.0 - alpha));
    let rental_at_star = alpha * tfp * k_star.powf(alpha - 1.0);
    Ok(SteadyState { gamma, rho, k_star, low_interest: rental_at_star < 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{log_spaced, rel_gap};

    #[test]
    fn log_marginal_is_reciprocal() {
        let u = Utility::log(0.9);
        assert_eq!(u.marginal(2.0), 0.5);
        assert_eq!(utility_marginal(&u, 4.0).unwrap(), 0.25);
        assert!(matches!(
            utility_marginal(&u, 0.0),
            Err(ModelError::NonPositiveConsumption { .. })
        ));
    }

    #[test]
    fn isoelastic_marginal_power_law() {
        let u = Utility::isoelastic(2.0, 0.875);
        assert!((u.marginal(56.0) - 56.0_f64.powi(-2)).abs() < 1e-20);
        assert!((u.marginal(56.0) - 3.188775510204082e-4).abs() < 1e-18);
    }

    #[test]
    fn marginal_utility_strictly_decreasing_on_log_grid() {
        for u in [Utility::log(0.5), Utility::isoelastic(2.0, 0.5), Utility::isoelastic(0.5, 0.5)] {
            let grid = log_spaced(1e-6, 1e6, 200);
            for w in grid.windows(2) {
                assert!(u.marginal(w[1]) < u.marginal(w[0]), "u' must fall as c rises");
            }
        }
    }

    #[test]
    fn cobb_douglas_factor_prices() {
        let tech = Technology::cobb_douglas(1.0, 0.3, 1.0);
        let grid = log_spaced(1e-3, 1e3, 64);
        for k in grid {
            let fp = tech.eval(k);
            let wage_direct = (1.0 - 0.3) * 1.0 * k.powf(0.3);
            assert!(rel_gap(fp.wage, wage_direct) < 1e-14);
            assert!(rel_gap(fp.output, fp.wage + k * fp.rental) < 1e-14);
            assert_eq!(fp.gross_return, fp.rental); // delta = 1
        }
    }

    #[test]
    fn linear_factor_prices_are_constant() {
        let tech = Technology::linear(0.4, 1.0, 0.6);
        let fp = tech.eval(3.0);
        assert_eq!(fp.wage, 1.0);
        assert_eq!(fp.rental, 0.4);
        assert!((fp.gross_return - 0.8).abs() < 1e-16);
        assert!(technology_eval(&tech, -1.0).is_err());
    }

    #[test]
    fn sequences_evaluate_and_continue() {
        let c = SequenceSpec::Constant(3.0);
        assert_eq!(sequence_eval(&c, 17), 3.0);

        let g = SequenceSpec::Geometric { base: 2.0, ratio: 0.5 };
        assert_eq!(g.at(0), 2.0);
        assert_eq!(g.at(3), 0.25);

        let e = SequenceSpec::Explicit { values: vec![1.0, 4.0], tail: Tail::Geometric(0.5) };
        assert_eq!(e.at(0), 1.0);
        assert_eq!(e.at(1), 4.0);
        assert_eq!(e.at(2), 2.0);
        assert_eq!(e.at(4), 0.5);

        let ec = SequenceSpec::Explicit { values: vec![1.0, 4.0], tail: Tail::Constant };
        assert_eq!(ec.at(10), 4.0);
    }

    #[test]
    fn discounted_tail_matches_brute_force() {
        let cases = [
            SequenceSpec::Constant(0.7),
            SequenceSpec::Geometric { base: 0.1, ratio: 0.5 },
            SequenceSpec::Explicit { values: vec![0.3, 0.2, 0.9], tail: Tail::Geometric(0.8) },
            SequenceSpec::Explicit { values: vec![0.3, 0.2, 0.9], tail: Tail::Constant },
        ];
        for s in &cases {
            for &(r, t0, tau) in &[(1.25_f64, 0_usize, 0_usize), (1.5, 2, 3), (2.0, 1, 0)] {
                let closed = s.discounted_tail(r, t0, tau).unwrap();
                let mut brute = 0.0;
                for k in (tau + 1)..400 {
                    brute += s.at(t0 + k) / r.powi(k as i32);
                }
                assert!(rel_gap(closed, brute) < 1e-12, "tail mismatch for {s:?} at R={r}");
            }
        }
    }

    #[test]
    fn discounted_tail_divergence_detected() {
        let s = SequenceSpec::Constant(1.0);
        assert!(s.discounted_tail(1.0, 0, 0).is_none());
        let g = SequenceSpec::Geometric { base: 1.0, ratio: 1.2 };
        assert!(g.discounted_tail(1.1, 0, 0).is_none());
        // A zero sequence converges no matter the return.
        assert_eq!(SequenceSpec::zero().discounted_tail(0.5, 0, 0), Some(0.0));
    }

    #[test]
    fn geometric_dividend_tail_for_unit_return() {
        // d_s = 0.1 * 0.5^s discounted at R = 1: sum_{s>=1} = 0.1.
        let d = SequenceSpec::Geometric { base: 0.1, ratio: 0.5 };
        let tail = d.discounted_tail(1.0, 0, 0).unwrap();
        assert_eq!(tail, 0.1);
    }

    #[test]
    fn steady_state_closed_form() {
        let params = EconomyParams::new(
            Utility::log(0.9),
            Some(Technology::cobb_douglas(1.0, 0.3, 1.0)),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            1.0,
        );
        let ss = steady_state_and_gamma(&params).unwrap();
        assert!((ss.gamma - 21.0 / 19.0).abs() < 1e-15);
        assert!((ss.rho - 0.33157894736842105).abs() < 1e-16);
        assert!((ss.k_star - 0.20659709576708206).abs() < 1e-16);
        // Fixed point: K* = rho * K*^alpha.
        assert!(rel_gap(ss.k_star, ss.rho * ss.k_star.powf(0.3)) < 1e-12);
        assert!(ss.low_interest);
    }

    #[test]
    fn steady_state_low_interest_flag_tracks_rental() {
        // Small beta starves savings, pushing the steady-state rental above 1.
        let params = EconomyParams::new(
            Utility::log(0.2),
            Some(Technology::cobb_douglas(1.0, 0.45, 1.0)),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            1.0,
        );
        let ss = steady_state_and_gamma(&params).unwrap();
        let rental = 0.45 * ss.k_star.powf(0.45 - 1.0);
        assert_eq!(ss.low_interest, rental < 1.0);
        assert!(!ss.low_interest);
    }

    #[test]
    fn steady_state_rejects_other_regimes() {
        let mut params = EconomyParams::new(
            Utility::log(0.9),
            Some(Technology::cobb_douglas(1.0, 0.3, 0.5)),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            1.0,
        );
        assert!(matches!(steady_state_and_gamma(&params), Err(ModelError::RegimeMismatch(_))));
        params.technology = None;
        assert!(matches!(steady_state_and_gamma(&params), Err(ModelError::RegimeMismatch(_))));
        params.technology = Some(Technology::cobb_douglas(1.0, 0.3, 1.0));
        params.utility = Utility::isoelastic(2.0, 0.9);
        assert!(matches!(steady_state_and_gamma(&params), Err(ModelError::RegimeMismatch(_))));
    }

    #[test]
    fn params_validation_catches_bad_inputs() {
        let good = EconomyParams::new(
            Utility::log(0.9),
            Some(Technology::cobb_douglas(1.0, 0.3, 1.0)),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            SequenceSpec::zero(),
            1.0,
        );
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.k0 = 0.0;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.utility = Utility { family: UtilityFamily::Isoelastic { sigma: 1.0 }, beta: 0.9 };
        assert!(bad.validate().is_err());

        let mut bad = good;
        bad.technology = None;
        // Exchange economy with zero young endowment at t=0 has nothing to trade.
        assert!(bad.validate().is_err());
        bad.endow_young = SequenceSpec::Constant(1.0);
        assert!(bad.validate().is_ok());
    }
}
