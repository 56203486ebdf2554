//! Overlapping-generations equilibria with capital, a dividend tree, and fiat
//! money — plus the machinery to re-read every such path as a competitive
//! equilibrium of a two-agent infinite-horizon economy in which the agents
//! alternate between a working role and a retired role.
//!
//! The crate is organised around that equivalence:
//!
//! * [`economy`] — preferences, technologies, parametric sequences.
//! * [`sim`] — forward simulation of equilibrium paths and residual reports.
//! * [`bridge`] — the alternating-role relabelling, first-order and
//!   transversality verification, and multiplier diagnostics.
//! * [`bubble`] — fundamental values, bubble components, and the dividend/price
//!   summability test for bubble existence.
//! * [`scenarios`] — closed-form path families: log exchange with dividends,
//!   stationary and non-stationary fiat paths, the Cobb-Douglas bubble
//!   trichotomy, and linear-technology economies with vanishing returns.
//! * [`oracle`] — a finite-horizon best-response search used to certify that
//!   candidate paths are individually optimal.
//! * [`tol`] — every numerical tolerance, each with its rationale.

pub mod bridge;
pub mod bubble;
pub mod economy;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod scenarios;
pub mod sim;
pub mod tol;

pub use economy::{
    sequence_eval, steady_state_and_gamma, technology_eval, utility_marginal, EconomyParams,
    FactorPrices, SequenceSpec, SteadyState, Tail, Technology, TechnologyFamily, Utility,
    UtilityFamily,
};
pub use error::{ModelError, Result};
pub use sim::{
    olg_step, olg_step_exchange, residual_report, simulate_olg, simulate_olg_with, EquilibriumPath,
    ExchangeNext, OlgState, ResidualReport, ResidualRow, RootMultiplicity, RootPolicy,
    SimOptions, StepDiagnostics,
};
pub use bridge::{
    check_side_conditions, map_olg_to_two_cycle, project_two_cycle_to_olg, verify_two_cycle_full,
    PriceSystem, SideConditions, TvcTail, TwoCycleAllocation, Verdict, VerificationReport,
};
pub use bubble::{
    bubble_component_path, discount_factor, fundamental_value, montrucchio_classify, BubbleReport,
    ComponentSign, FundamentalValue, MontrucchioResult, MontrucchioVerdict, PriceInput,
};
pub use oracle::{
    best_response_search, optimality_gap, plan_utility, BestResponse, TruncatedProblem,
};
pub use scenarios::{
    cobb_douglas_bubble_path, exchange_log_dividend_path, fiat_continuum_path,
    fiat_stationary_price, linear_tech_path, Classification, ScenarioResult, StationaryFiat,
};
