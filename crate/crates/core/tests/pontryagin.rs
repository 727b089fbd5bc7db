use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use platoon_core::{
    certify_internal, condition_b, find_roots_imag, find_roots_real, gain_region, min_headway,
    quasipoly_parts, sample_feasible_gains, Certification, ControllerGains, QuasiPolyParams,
};
use proptest::prelude::*;

fn cacc() -> ControllerGains {
    ControllerGains::new(0.5, 0.7, 0.06, 0.7, 1, 0.5).unwrap()
}

/// `D_i' D_r - D_i D_r'` with derivatives from central differences of the
/// unexpanded parts of `tau^2 D(j w)`.
fn condition_b_fd(g: &ControllerGains, tau: f64, w: f64) -> f64 {
    let e = g.effective();
    let gamma = e.gamma();
    let t2 = tau * tau;
    let dr = |w: f64| t2 * e.kp - t2 * w * w * (tau * w).cos();
    let di = |w: f64| t2 * gamma * w - t2 * w * w * (tau * w).sin();
    let h = 1e-5 * w.abs().max(1.0);
    let d = |f: &dyn Fn(f64) -> f64| (f(w + h) - f(w - h)) / (2.0 * h);
    d(&di) * dr(w) - di(w) * d(&dr)
}

fn feasible_gains() -> impl Strategy<Value = ControllerGains> {
    (1u32..=3, 0.0..0.95f64, 1.05..2.0f64, 0.1..1.5f64, any::<u64>()).prop_map(
        |(r, frac, factor, tau0, seed)| {
            let ka = frac / r as f64;
            let mut g = ControllerGains { ka, kv: 0.1, kp: 0.01, hw: 1.0, r, tau0 };
            g.hw = factor * min_headway(g.mode(), ka, r, tau0).unwrap();
            let (kv, kp) = sample_feasible_gains(&gain_region(&g).unwrap(), 1, seed).unwrap()[0];
            ControllerGains { kv, kp, ..g }
        },
    )
}

#[test]
fn condition_b_matches_finite_differences() {
    let g = cacc();
    for k in 0..=400 {
        let w = k as f64 * 0.05;
        let exact = condition_b(&g, 0.5, w);
        let fd = condition_b_fd(&g, 0.5, w);
        let scale = exact.abs().max(1e-3);
        assert!((exact - fd).abs() < 1e-6 * scale.max(1.0), "w = {w}: {exact} vs {fd}");
    }
}

#[test]
fn condition_b_positive_for_paper_gains() {
    let g = cacc();
    let at_zero = condition_b(&g, 0.5, 0.0);
    assert_eq!(at_zero, 0.5f64.powi(4) * g.gamma() * g.kp);
    for k in 0..=20_000 {
        let w = k as f64 * 1e-3;
        assert!(condition_b(&g, 0.5, w) > 0.0, "w = {w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_sit_in_brackets(g in feasible_gains()) {
        let p = QuasiPolyParams::from_gains(&g, g.tau0).unwrap();
        let real = find_roots_real(&p, 3).unwrap();
        let imag = find_roots_imag(&p, 3).unwrap();
        prop_assert!(real[0] > 0.0 && real[0] < FRAC_PI_4);
        for (n, &t) in real[1..].iter().enumerate() {
            let shift = 2.0 * PI * (n / 2) as f64;
            let (lo, hi) = if n % 2 == 0 {
                (FRAC_PI_4 + shift, FRAC_PI_2 + shift)
            } else {
                (1.5 * PI + shift, 1.75 * PI + shift)
            };
            prop_assert!(lo < t && t < hi, "real root {t} outside ({lo}, {hi})");
        }
        prop_assert_eq!(imag[0], 0.0);
        for (n, &t) in imag[1..].iter().enumerate() {
            let shift = 2.0 * PI * (n / 2) as f64;
            let (lo, hi) = if n % 2 == 0 {
                (shift, FRAC_PI_4 + shift)
            } else {
                (0.75 * PI + shift, PI + shift)
            };
            prop_assert!(lo < t && t < hi, "imag root {t} outside ({lo}, {hi})");
        }
        for &t in &real {
            prop_assert!(quasipoly_parts(&p, t).0.abs() < 1e-10);
        }
        for &t in &imag {
            prop_assert!(quasipoly_parts(&p, t).1.abs() < 1e-10);
        }

        let (r1_max, i2_min) = p.first_pair_bounds();
        prop_assert!(real[0] < r1_max, "{} >= {r1_max}", real[0]);
        prop_assert!(imag[1] > i2_min, "{} <= {i2_min}", imag[1]);
    }

    #[test]
    fn feasible_gains_are_certified(g in feasible_gains()) {
        let rep = certify_internal(&g, g.tau0, 3).unwrap();
        prop_assert!(rep.kp_ok && rep.gamma_ok);
        prop_assert!(rep.interlaced && rep.count_check);
        prop_assert!(rep.condition_b_value > 0.0);
        prop_assert_eq!(rep.certification, Certification::Stable);
    }
}
