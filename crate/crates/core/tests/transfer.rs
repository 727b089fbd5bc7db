use num_complex::Complex64;
use platoon_core::{
    counterexample_frequency, h_magnitude_sq, robust_sweep, sample_feasible_gains, gain_region,
    min_headway, sufficient_condition, sweep_surface, ControllerGains, FrequencyGrid,
};
use proptest::prelude::*;

/// `|sum_j H_j(j omega)|^2` built from the raw per-predecessor gains.
fn direct_magnitude_sq(g: &ControllerGains, omega: f64, tau: f64) -> f64 {
    let r = g.r as f64;
    let s = Complex64::new(0.0, omega);
    let num = (s * s * g.ka + s * g.kv + g.kp) * r;
    let gamma = r * g.kv + r * (r + 1.0) / 2.0 * g.kp * g.hw;
    let den = s * s * (s * tau).exp() + s * gamma + r * g.kp;
    (num / den).norm_sqr()
}

fn gains() -> impl Strategy<Value = ControllerGains> {
    (1u32..=4, 0.0..1.0f64, 0.01..3.0f64, 0.001..2.0f64, 0.05..3.0f64, 0.05..2.0f64).prop_map(
        |(r, frac, kv, kp, hw, tau0)| ControllerGains {
            ka: frac / r as f64,
            kv,
            kp,
            hw,
            r,
            tau0,
        },
    )
}

/// Gains drawn from a feasible region with `h_w` between 1.05 and 3 times the
/// minimum headway.
fn region_gains() -> impl Strategy<Value = ControllerGains> {
    (1u32..=4, 0.0..0.95f64, 1.05..3.0f64, 0.05..2.0f64, any::<u64>()).prop_map(
        |(r, frac, factor, tau0, seed)| {
            let ka = frac / r as f64;
            let mut base = ControllerGains { ka, kv: 0.1, kp: 0.01, hw: 1.0, r, tau0 };
            base.hw = factor * min_headway(base.mode(), ka, r, tau0).unwrap();
            let (kv, kp) = sample_feasible_gains(&gain_region(&base).unwrap(), 1, seed).unwrap()[0];
            ControllerGains { kv, kp, ..base }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_matches_complex_evaluation(
        g in gains(),
        log_w in -3.0..3.0f64,
        tau_frac in 0.01..=1.0f64,
    ) {
        let omega = 10f64.powf(log_w);
        let tau = g.tau0 * tau_frac;
        if let Ok(closed) = h_magnitude_sq(&g, omega, tau) {
            let direct = direct_magnitude_sq(&g, omega, tau);
            prop_assert!(((closed - direct) / direct).abs() < 1e-10, "{closed} vs {direct}");
        }
    }

    #[test]
    fn sufficient_condition_implies_grid_pass(
        g in region_gains(),
        points in 50usize..400,
        log_max in 1.0..3.0f64,
    ) {
        prop_assert!(sufficient_condition(&g).holds);
        let grid = FrequencyGrid {
            omega_max: 10f64.powf(log_max),
            omega_points: points,
            tau_points: 7,
            ..FrequencyGrid::default()
        };
        prop_assert!(robust_sweep(&g, &grid).unwrap().passed);
    }

    // Beyond the threshold the gap to k_a^2 is bounded by the leading terms
    // of `num - k_a^2 den` over `den >= 0.7 omega^4`, so it decays like 1/omega.
    #[test]
    fn tail_approaches_ka_squared(g in gains(), tau_frac in 0.01..=1.0f64, mult in 1.0..100.0f64) {
        let e = g.effective();
        let tau = g.tau0 * tau_frac;
        let gamma = e.gamma();
        let (ka2, kp) = (e.ka * e.ka, e.kp);
        let start = 10.0 * 1f64.max(gamma).max(kp.sqrt()) / tau.min(1.0);
        let omega = start * mult;
        let m = h_magnitude_sq(&g, omega, tau).unwrap();
        let w2 = omega * omega;
        let bound = (2.0 * ka2 * gamma * omega * w2
            + (e.kv * e.kv + 2.0 * e.ka * kp + ka2 * gamma * gamma + 2.0 * ka2 * kp) * w2
            + kp * kp)
            / (0.7 * w2 * w2);
        prop_assert!((m - ka2).abs() <= bound, "|H|^2 = {m}, k_a^2 = {ka2}, bound {bound}");
    }

    #[test]
    fn lookahead_sweep_equals_effective_sweep(g in gains()) {
        let grid = FrequencyGrid { omega_points: 200, tau_points: 5, ..FrequencyGrid::default() };
        let single = g.effective().as_single_lookahead(g.tau0);
        prop_assert_eq!(sweep_surface(&g, &grid).unwrap(), sweep_surface(&single, &grid).unwrap());
        prop_assert_eq!(robust_sweep(&g, &grid).unwrap(), robust_sweep(&single, &grid).unwrap());
    }

    #[test]
    fn unit_accel_gain_is_refuted(
        kv in 0.01..3.0f64,
        kp in 0.001..2.0f64,
        hw in 0.05..3.0f64,
        tau in 0.05..2.0f64,
    ) {
        let g = ControllerGains { ka: 1.0, kv, kp, hw, r: 1, tau0: tau };
        let omega = counterexample_frequency(&g, tau).unwrap();
        prop_assert!(h_magnitude_sq(&g, omega, tau).unwrap() > 1.0);
    }
}

#[test]
fn sampled_region_gains_pass_sweep() {
    let grid = FrequencyGrid { omega_points: 500, tau_points: 10, ..FrequencyGrid::default() };
    for (ka, r, hw) in [(0.5, 1, 0.7), (0.0, 1, 1.2), (0.2, 3, 0.32), (0.1, 2, 0.9)] {
        let base = ControllerGains { ka, kv: 0.1, kp: 0.01, hw, r, tau0: 0.5 };
        let region = gain_region(&base).unwrap();
        for (kv, kp) in sample_feasible_gains(&region, 40, 7).unwrap() {
            let g = ControllerGains { kv, kp, ..base };
            assert!(sufficient_condition(&g).holds, "{g:?}");
            assert!(robust_sweep(&g, &grid).unwrap().passed, "{g:?}");
        }
    }
}
