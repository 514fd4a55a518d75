mod common;

use ncqbv_core::algebra::{apply_scaling, deconvolve_delay, deconvolve_tb_rl, residual, sum_tb};
use ncqbv_core::pwl::grid_hdev;
use ncqbv_core::rtx::{analyze, solve_rtx, stability_check};
use ncqbv_core::{
    ChannelConfig, DelayElement, Error, GridSpec, RateLatency, SolverOptions, TokenBucket,
};
use proptest::prelude::*;

const EPS: f64 = 3.3344e-4;

/// Largest absolute row sum of the burst update map. Below 1 the iteration
/// is a contraction.
fn burst_gain(beta: RateLatency, a0: TokenBucket, ch: &ChannelConfig) -> f64 {
    let rates = ch.level_rates(a0.rate);
    let n = ch.max_retx;
    (1..=n)
        .map(|i| {
            let tail: f64 = rates[i..].iter().sum();
            let from_prev = if i >= 2 { ch.loss } else { 0.0 };
            from_prev + (n - i + 1) as f64 * ch.loss * rates[i - 1] / (beta.rate - tail)
        })
        .fold(0.0, f64::max)
}

/// Instances whose total level load stays below 90% of `R` and whose burst
/// map contracts.
fn instance() -> impl Strategy<Value = (RateLatency, TokenBucket, ChannelConfig)> {
    (
        0.5..10.0f64,
        0.0..2.0f64,
        0.01..0.9f64,
        0.0..2.0f64,
        0.0..0.5f64,
        0usize..5,
        0.0..5.0f64,
    )
        .prop_map(|(rr, t, load, b, p, n, w)| {
            let ch = ChannelConfig::new(p, EPS, n, w).unwrap();
            let total: f64 = (0..=n).map(|i| p.powi(i as i32)).sum();
            let a0 = TokenBucket::new(load * rr / total, b).unwrap();
            (RateLatency::new(rr, t).unwrap(), a0, ch)
        })
        .prop_filter("burst map must contract", |(beta, a0, ch)| {
            burst_gain(*beta, *a0, ch) < 0.95
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn level_rates_follow_powers_of_p((beta, a0, ch) in instance()) {
        let sol = solve_rtx(beta, a0, &ch, SolverOptions::default()).unwrap();
        for (i, a) in sol.arrivals.iter().enumerate() {
            prop_assert_eq!(a.rate, ch.level_rates(a0.rate)[i]);
            prop_assert!((a.rate - a0.rate * ch.loss.powi(i as i32)).abs() <= 1e-15 * a0.rate.max(1.0));
        }
    }

    #[test]
    fn fixed_point_reproduces_itself((beta, a0, ch) in instance()) {
        let opts = SolverOptions::default();
        let sol = solve_rtx(beta, a0, &ch, opts).unwrap();
        let a = &sol.arrivals;
        for i in 1..a.len() {
            let prev_service = residual(beta, sum_tb(&a[i..])).unwrap();
            let again = deconvolve_delay(
                apply_scaling(ch.scaling(), deconvolve_tb_rl(a[i - 1], prev_service).unwrap()),
                DelayElement::new(ch.detect_wait).unwrap(),
            );
            prop_assert!((again.burst - a[i].burst).abs() <= 10.0 * opts.tol * a[i].burst.max(1.0));
        }
    }

    #[test]
    fn fixed_point_matches_linear_solve((beta, a0, ch) in instance()) {
        let sol = solve_rtx(beta, a0, &ch, SolverOptions::default()).unwrap();
        let direct = common::burst_linear_solve(beta, a0, &ch);
        for (i, b) in direct.iter().enumerate() {
            let got = sol.arrivals[i + 1].burst;
            prop_assert!((got - b).abs() <= 1e-9 * b.abs().max(1.0), "level {}: {} vs {}", i + 1, got, b);
        }
    }

    #[test]
    fn bound_nondecreasing_in_p((beta, a0, ch) in instance(), dp in 0.0..0.2f64) {
        let opts = SolverOptions::default();
        let lo = analyze(beta, a0, &ch, opts).unwrap();
        let hi_ch = ch.with_loss((ch.loss + dp).min(1.0)).unwrap();
        prop_assume!(burst_gain(beta, a0, &hi_ch) < 0.95);
        let hi = analyze(beta, a0, &hi_ch, opts).unwrap();
        if hi.stable {
            prop_assert!(lo.bound <= hi.bound + 1e-9 * hi.bound.max(1.0));
        }
    }

    #[test]
    fn bound_nondecreasing_in_retx((beta, a0, ch) in instance()) {
        let opts = SolverOptions::default();
        let fewer = analyze(beta, a0, &ch, opts).unwrap();
        let more_ch = ChannelConfig { max_retx: ch.max_retx + 1, ..ch };
        prop_assume!(burst_gain(beta, a0, &more_ch) < 0.95);
        let more = analyze(beta, a0, &more_ch, opts).unwrap();
        if more.stable {
            prop_assert!(fewer.bound <= more.bound + 1e-9 * more.bound.max(1.0));
        }
    }

    #[test]
    fn bound_matches_grid_hdev((beta, a0, ch) in instance()) {
        let res = analyze(beta, a0, &ch, SolverOptions::default()).unwrap();
        let agg = res.solution.as_ref().unwrap().aggregate;
        let horizon = 4.0 * (res.bound + beta.latency + 1.0);
        let grid = GridSpec::new(horizon, horizon / 2000.0).unwrap();
        let got = grid_hdev(&agg.to_pwl(), &beta.to_pwl(), grid);
        prop_assert!((got.value - res.bound).abs() <= grid.tolerance(agg.rate + beta.rate), "{} vs {}", got.value, res.bound);
    }

    #[test]
    fn instability_matches_load_condition(rr in 0.1..10.0f64, r in 0.01..10.0f64, p in 0.0..1.0f64, n in 0usize..6) {
        let ch = ChannelConfig::new(p, EPS, n, 1.0).unwrap();
        let beta = RateLatency::new(rr, 0.3).unwrap();
        let a0 = TokenBucket::new(r, 0.1).unwrap();
        let load: f64 = ch.level_rates(r).iter().sum();
        let flagged = matches!(
            solve_rtx(beta, a0, &ch, SolverOptions::default()),
            Err(Error::Unstable { .. })
        );
        prop_assert_eq!(flagged, load >= rr);
        prop_assert_eq!(stability_check(beta, a0, &ch).stable, load < rr);
        if load >= rr {
            prop_assert!(!analyze(beta, a0, &ch, SolverOptions::default()).unwrap().stable);
        }
    }
}
