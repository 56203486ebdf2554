//! Centralised numerical tolerances.
//!
//! Every tolerance used by the solvers and verifiers lives here with a note on
//! why it has the value it has.  Scattering magic numbers through the solvers
//! makes it impossible to audit whether a reported "verified" actually means
//! anything; keeping them in one place makes the guarantees explicit.

/// Relative width at which interval bisection stops.
///
/// 1e-12 leaves ~4 decimal digits of slack above f64 machine epsilon so the
/// bracket endpoints still straddle the root reliably; a few derivative-free
/// polish steps afterwards push the iterate to the float-limited answer.
pub const BISECT_REL: f64 = 1e-12;

/// Default tolerance for equilibrium verification residuals.
///
/// All residuals are *relative* (see [`crate::numeric::rel_gap`]); verified
/// paths produced by the closed forms and the simulator sit around 1e-15, so
/// 1e-10 separates genuine equilibria from near-misses with a wide margin.
pub const VERIFY_DEFAULT: f64 = 1e-10;

/// Tolerance on first-order inequality slacks, scaled by the larger of the two
/// compared marginal utilities.  Slacks below `-SLACK_REL * scale` fail.
pub const SLACK_REL: f64 = 1e-10;

/// Absolute complementary-slackness tolerance: |min(multiplier, holding)|
/// must not exceed this.  Multipliers are expressed in gross-return units
/// (price ratio minus discounted marginal-utility growth), which keeps them
/// scale-free even on geometrically growing paths.
pub const COMP_SLACK_ABS: f64 = 1e-12;

/// Relative distance within which an initial price is snapped onto a
/// knife-edge closed form (critical bubble start, stationary fiat price).
///
/// The knife-edge recursions are repelling: forward iteration amplifies a
/// one-ulp deviation by a constant factor per period and destroys the path
/// long before typical horizons.  Inputs this close to the knife edge are
/// indistinguishable from it at f64 precision, so the exact closed form is
/// emitted instead.
pub const KNIFE_EDGE_REL: f64 = 1e-12;

/// A transversality tail is certified as decaying when the least-squares
/// slope of log(term) against the date is at most this.
pub const TVC_SLOPE_MAX: f64 = -1e-3;

/// ... and in addition the final tail term must be below
/// `TVC_FINAL_COEFF * (first term + 1)`.
pub const TVC_FINAL_COEFF: f64 = 1e-8;

/// Maximum relative disagreement between per-asset gross returns before the
/// finite-horizon oracle refuses to aggregate asset positions into a single
/// savings variable.
pub const RETURN_ALIGN_REL: f64 = 1e-9;

/// Utility differences below this are attributed to search tolerance: the
/// optimality gap reports zero when the oracle's improvement is smaller.
pub const ORACLE_UTILITY_ABS: f64 = 1e-9;
