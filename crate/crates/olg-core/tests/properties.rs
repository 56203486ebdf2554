//! Randomized invariant checks: preference and technology identities,
//! simulation self-consistency, bridge accounting, discount-factor algebra,
//! and best-response concavity, each quantified over generated economies.

use olg_core::scenarios::{cobb_douglas_params, fiat_params};
use olg_core::{
    best_response_search, cobb_douglas_bubble_path, discount_factor, exchange_log_dividend_path,
    fiat_continuum_path, map_olg_to_two_cycle, olg_step, plan_utility, project_two_cycle_to_olg,
    residual_report, simulate_olg, steady_state_and_gamma, verify_two_cycle_full, EconomyParams,
    OlgState, PriceSystem, SequenceSpec, Technology, TruncatedProblem, Utility,
};
use proptest::prelude::*;

/// Utilities drawn across both families; curvature keeps clear of the
/// logarithmic boundary so the isoelastic branch is exercised honestly.
fn any_utility() -> impl Strategy<Value = Utility> {
    (0.5..0.99_f64, prop_oneof![Just(1.0_f64), 0.3..0.95_f64, 1.05..4.0_f64]).prop_map(
        |(beta, sigma)| {
            if sigma == 1.0 {
                Utility::log(beta)
            } else {
                Utility::isoelastic(sigma, beta)
            }
        },
    )
}

/// Log-production economies in the regime every closed form covers
/// (full depreciation, no endowments, no dividends).
fn any_log_production() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.2..0.5_f64, 0.5..0.95_f64, 0.5..2.0_f64, 0.4..1.6_f64)
}

proptest! {
    // Marginal utility is strictly decreasing for every admissible family.
    #[test]
    fn marginal_utility_strictly_decreases(
        u in any_utility(),
        e1 in -3.0..3.0_f64,
        e2 in -3.0..3.0_f64,
    ) {
        let (c1, c2) = (10.0_f64.powf(e1.min(e2)), 10.0_f64.powf(e1.max(e2)));
        prop_assume!(c1 < c2);
        prop_assert!(u.marginal(c1) > u.marginal(c2));
    }

    // Factor prices satisfy the distribution identities: the wage is the
    // closed-form (1-alpha) A k^alpha and profits f(k) - f'(k) k - w vanish.
    #[test]
    fn cobb_douglas_factor_identities(
        alpha in 0.05..0.95_f64,
        tfp in 0.1..5.0_f64,
        delta in 0.0..1.0_f64,
        ek in -3.0..3.0_f64,
    ) {
        let k = 10.0_f64.powf(ek);
        let tech = Technology::cobb_douglas(tfp, alpha, delta);
        let fp = tech.eval(k);
        let wage = (1.0 - alpha) * tfp * k.powf(alpha);
        prop_assert!((fp.wage - wage).abs() <= 1e-14 * wage);
        let profit = fp.output - fp.rental * k - fp.wage;
        prop_assert!(profit.abs() <= 1e-14 * fp.output.max(1.0));
    }

    // The bubbleless steady state is a fixed point of the savings recursion
    // and the low-interest flag agrees with the rental rate at that point.
    #[test]
    fn steady_state_fixed_point_and_flag(
        (alpha, beta, tfp, _) in any_log_production(),
    ) {
        let params = cobb_douglas_params(alpha, tfp, beta, 1.0);
        let steady = steady_state_and_gamma(&params).unwrap();
        let recursed = steady.rho * steady.k_star.powf(alpha);
        prop_assert!((recursed - steady.k_star).abs() <= 1e-12 * steady.k_star);
        let rental = params.technology.as_ref().unwrap().eval(steady.k_star).rental;
        prop_assert_eq!(steady.low_interest, rental < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // One simulated production path, checked for: determinism (bitwise
    // identical reruns), shooting consistency (re-running any step reproduces
    // the stored successors), the aggregate savings rule of log utility, the
    // bitwise bridge round trip, exact market clearing, and accounting
    // residuals at float scale.
    #[test]
    fn simulated_paths_are_self_consistent(
        (alpha, beta, tfp, k0) in any_log_production(),
        p_frac in 0.0..0.8_f64,
        step_at in 0..11_usize,
    ) {
        let params = cobb_douglas_params(alpha, tfp, beta, k0);
        let steady = steady_state_and_gamma(&params).unwrap();
        let p0 = if steady.gamma > 1.0 {
            let wage0 = params.technology.as_ref().unwrap().eval(k0).wage;
            p_frac * beta / (1.0 + beta) * wage0 * (steady.gamma - 1.0) / steady.gamma
        } else {
            0.0
        };
        let horizon = 12;
        let path = simulate_olg(&params, 0.0, p0, horizon).unwrap();
        let again = simulate_olg(&params, 0.0, p0, horizon).unwrap();
        prop_assert_eq!(&again, &path, "identical inputs must give bitwise-identical paths");

        // Shooting consistency at an arbitrary interior date.
        let state = OlgState {
            capital: path.capital[step_at],
            tree_price: path.tree_price[step_at],
            fiat_price: path.fiat_price[step_at],
        };
        let (next, _) = olg_step(&params, &state, step_at).unwrap();
        prop_assert!((next.capital - path.capital[step_at + 1]).abs()
            <= 1e-12 * path.capital[step_at + 1]);
        prop_assert!((next.fiat_price - path.fiat_price[step_at + 1]).abs()
            <= 1e-12 * path.fiat_price[step_at + 1].max(1e-300));

        // Aggregate savings rule under log utility with no endowments.
        for t in 0..=horizon {
            let saved = path.capital[t + 1] + path.tree_price[t] + path.fiat_price[t];
            let rule = beta / (1.0 + beta) * path.wage[t];
            prop_assert!((saved - rule).abs() <= 1e-12 * rule);
        }

        let alloc = map_olg_to_two_cycle(&params, &path).unwrap();
        let prices = PriceSystem::from_path(&path);
        let back = project_two_cycle_to_olg(&params, &alloc, &prices).unwrap();
        prop_assert_eq!(&back, &path, "round trip must be bitwise");

        // Supplies clear exactly: the worker's holding is the whole stock.
        for t in 0..=horizon {
            prop_assert_eq!(
                alloc.capital_next[0][t] + alloc.capital_next[1][t],
                path.capital[t + 1]
            );
            prop_assert_eq!(alloc.tree[0][t] + alloc.tree[1][t], 1.0);
            prop_assert_eq!(alloc.fiat[0][t] + alloc.fiat[1][t], 1.0);
            prop_assert_eq!(alloc.labor[0][t] + alloc.labor[1][t], 1.0);
        }

        // Budget and resource accounting hold at float scale regardless of
        // whether the allocation passes the full equilibrium verdict.
        let report = verify_two_cycle_full(&params, &alloc, &prices, 1e-10);
        prop_assert!(report.budget_residuals <= 1e-12);
        prop_assert!(report.clearing_residuals <= 1e-12);
        prop_assert!(residual_report(&params, &path).max_any() <= 1e-10);
    }

    // Holding today's state fixed, a higher fiat price crowds out capital.
    #[test]
    fn fiat_crowds_out_capital(
        (alpha, beta, tfp, k0) in any_log_production(),
        f1 in 0.05..0.85_f64,
        bump in 1.05..1.15_f64,
    ) {
        let params = cobb_douglas_params(alpha, tfp, beta, k0);
        let steady = steady_state_and_gamma(&params).unwrap();
        prop_assume!(steady.gamma > 1.0);
        let wage0 = params.technology.as_ref().unwrap().eval(k0).wage;
        let ceiling = beta / (1.0 + beta) * wage0 * (steady.gamma - 1.0) / steady.gamma;
        let p_low = f1 * ceiling;
        let p_high = (f1 * bump).min(0.99) * ceiling;
        prop_assume!(p_high > p_low);

        let state = |p| OlgState { capital: k0, tree_price: 0.0, fiat_price: p };
        let (next_low, _) = olg_step(&params, &state(p_low), 0).unwrap();
        let (next_high, _) = olg_step(&params, &state(p_high), 0).unwrap();
        prop_assert!(next_high.capital < next_low.capital);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    // Compound discount factors are multiplicative, and the price equals
    // discounted future price plus discounted interim dividends at every
    // split of the horizon.
    #[test]
    fn discounting_is_multiplicative_and_decomposes_prices(
        base_y in 1.0..20.0_f64,
        ratio_y in 0.9..1.15_f64,
        div_frac in 0.001..0.2_f64,
        ratio_d in 0.8..1.2_f64,
        beta in 0.5..0.95_f64,
        t in 0..20_usize,
        s in 1..10_usize,
        r in 1..10_usize,
    ) {
        let young = SequenceSpec::Geometric { base: base_y, ratio: ratio_y };
        let dividends = SequenceSpec::Geometric { base: div_frac * base_y, ratio: ratio_d };
        let params = EconomyParams::new(
            Utility::log(beta),
            None,
            dividends.clone(),
            young,
            SequenceSpec::zero(),
            0.0,
        );
        let horizon = 40;
        let path = exchange_log_dividend_path(&params, horizon).unwrap();

        let q_ts = discount_factor(&path, t, s).unwrap();
        let q_sr = discount_factor(&path, t + s, r).unwrap();
        let q_tr = discount_factor(&path, t, s + r).unwrap();
        prop_assert!((q_ts * q_sr - q_tr).abs() <= 1e-13 * q_tr.abs());

        let tau = s + r;
        let mut value = discount_factor(&path, t, tau).unwrap() * path.tree_price[t + tau];
        for k in 1..=tau {
            value += discount_factor(&path, t, k).unwrap() * params.dividends.at(t + k);
        }
        prop_assert!((value - path.tree_price[t]).abs() <= 1e-10 * path.tree_price[t]);
    }

    // On the knife-edge bubbly path the capital-to-price diagnostic
    // z_t = K_{t+1} / p_t sits at its fixed point forever.
    #[test]
    fn critical_path_diagnostic_sits_at_fixed_point(
        alpha in 0.2..0.45_f64,
        beta in 0.6..0.95_f64,
        tfp in 0.5..2.0_f64,
        k0 in 0.5..1.5_f64,
    ) {
        let params = cobb_douglas_params(alpha, tfp, beta, k0);
        let steady = steady_state_and_gamma(&params).unwrap();
        prop_assume!(steady.gamma > 1.0);

        let probe = cobb_douglas_bubble_path(alpha, tfp, beta, k0, 0.0, 2).unwrap();
        let critical = probe.special_values["b_bar"];
        let res = cobb_douglas_bubble_path(alpha, tfp, beta, k0, critical, 40).unwrap();
        let z_star = 1.0 / (steady.gamma - 1.0);
        for t in 0..=40 {
            let z = res.path.capital[t + 1] / res.path.fiat_price[t];
            prop_assert!((z - z_star).abs() <= 1e-12 * z_star, "z_{t} = {z}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // The truncated planning objective is concave along feasible segments,
    // and refining the search grid never worsens the best response found.
    #[test]
    fn planning_objective_is_concave_and_search_is_monotone(
        agent in 0..2_usize,
        scale_a in proptest::collection::vec(0.3..1.7_f64, 4),
        scale_b in proptest::collection::vec(0.3..1.7_f64, 4),
    ) {
        let young = SequenceSpec::Geometric { base: 70.0, ratio: 8.0 / 7.0 };
        let old = SequenceSpec::Geometric { base: 35.0, ratio: 8.0 / 7.0 };
        let params = fiat_params(&young, &old, 2.0, 7.0 / 8.0).unwrap();
        let path = fiat_continuum_path(&young, &old, 2.0, 7.0 / 8.0, 14.0, 10).unwrap();
        let alloc = map_olg_to_two_cycle(&params, &path).unwrap();
        let prices = PriceSystem::from_path(&path);
        let problem = TruncatedProblem::from_candidate(&params, &alloc, &prices, agent, 4).unwrap();

        let plan = |scales: &[f64]| -> Vec<f64> {
            problem
                .candidate_savings
                .iter()
                .zip(scales)
                .map(|(&s, &m)| s * m)
                .collect()
        };
        let (pa, pb) = (plan(&scale_a), plan(&scale_b));
        let mid: Vec<f64> = pa.iter().zip(&pb).map(|(&x, &y)| 0.5 * (x + y)).collect();
        if let (Some(ua), Some(ub), Some(um)) = (
            plan_utility(&problem, &pa),
            plan_utility(&problem, &pb),
            plan_utility(&problem, &mid),
        ) {
            prop_assert!(um >= 0.5 * (ua + ub) - 1e-9 * (1.0 + um.abs()));
        }

        let coarse = best_response_search(&problem, 9);
        let fine = best_response_search(&problem, 33);
        prop_assert!(
            fine.utility >= coarse.utility - 1e-12 * (1.0 + coarse.utility.abs()),
            "finer grid lost utility: {} vs {}",
            fine.utility,
            coarse.utility
        );
    }
}
