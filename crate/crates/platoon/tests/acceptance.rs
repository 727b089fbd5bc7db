//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use platoon::preset;
use platoon_core::{
    certify_internal, counterexample_frequency, gain_region, h_magnitude_sq, interlacing_check,
    min_headway, quasipoly_parts, robust_sweep, sample_feasible_gains, simulate, sufficient_condition,
    Certification, ControllerGains, FrequencyGrid, LeadProfile, Mode,
    PlatoonScenario, QuasiPolyParams,
};
use platoon_core::internal_stability::window_counts;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// "To 4 decimals".
const DEC4: f64 = 5e-5;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() <= DEC4
}

fn gains(ka: f64, kv: f64, kp: f64, hw: f64, r: u32) -> ControllerGains {
    ControllerGains::new(ka, kv, kp, hw, r, 0.5).unwrap()
}

fn cacc_gains() -> ControllerGains {
    gains(0.5, 0.7, 0.06, 0.7, 1)
}

fn acc_gains(hw: f64) -> ControllerGains {
    gains(0.0, 0.8, 0.1, hw, 1)
}

fn caccplus_gains() -> ControllerGains {
    gains(0.2, 0.206, 0.01, 0.32, 3)
}

fn headway_bounds() -> Outcome {
    let acc = min_headway(Mode::Acc, 0.0, 1, 0.5).unwrap();
    let cacc = min_headway(Mode::Cacc, 0.5, 1, 0.5).unwrap();
    let plus = min_headway(Mode::CaccPlus, 0.2, 3, 0.5).unwrap();
    Outcome::new(
        near(acc, 1.0) && near(cacc, 0.6667) && near(plus, 0.3125),
        format!("acc {acc:.4}, cacc {cacc:.4}, cacc+ {plus:.4}"),
    )
}

fn region_coefficients() -> Outcome {
    let cases = [
        (cacc_gains(), [0.75, 1.0714, 0.7143, 2.0408]),
        (acc_gains(1.2), [1.0, 0.8333, 0.8333, 1.3889]),
        (caccplus_gains(), [0.64, 1.0, 0.625, 1.9531]),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (g, want) in cases {
        let r = gain_region(&g).unwrap();
        let got = [r.a1, r.b1, r.a2, r.b2];
        ok &= got.iter().zip(want).all(|(&x, w)| near(x, w));
        detail.push(format!("({:.4}, {:.4}, {:.4}, {:.4})", got[0], got[1], got[2], got[3]));
    }
    Outcome::new(ok, detail.join(" "))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn robust_string_stability() -> Outcome {
    let grid = FrequencyGrid::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g) in [("cacc", cacc_gains()), ("cacc+", caccplus_gains())] {
        let (rep, dt) = timed(|| robust_sweep(&g, &grid).unwrap());
        ok &= rep.sup_magnitude <= 1.0 + 1e-9 && dt < Duration::from_secs(2);
        detail.push(format!("{name} sup {:.6} in {:.0?}", rep.sup_magnitude, dt));
    }
    Outcome::new(ok, detail.join(", "))
}

fn refutation() -> Outcome {
    let grid = FrequencyGrid::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g) in [("cacc hw 0.6", gains(0.5, 0.7, 0.06, 0.6, 1)), ("acc hw 0.9", acc_gains(0.9))] {
        let rep = robust_sweep(&g, &grid).unwrap();
        let at = h_magnitude_sq(&g, rep.argmax_omega, rep.argmax_tau).unwrap().sqrt();
        ok &= !rep.passed && rep.argmax_omega.is_finite() && at > 1.0;
        detail.push(format!("{name}: |H({:.4}; {})| = {at:.6}", rep.argmax_omega, rep.argmax_tau));
    }
    Outcome::new(ok, detail.join(", "))
}

/// `|sum_j H_j(j omega)|^2` with complex arithmetic on the raw gains.
fn direct_magnitude_sq(g: &ControllerGains, omega: f64, tau: f64) -> f64 {
    let r = g.r as f64;
    let s = Complex64::new(0.0, omega);
    let num = (s * s * g.ka + s * g.kv + g.kp) * r;
    let gamma = r * g.kv + r * (r + 1.0) / 2.0 * g.kp * g.hw;
    let den = s * s * (s * tau).exp() + s * gamma + r * g.kp;
    (num / den).norm_sqr()
}

fn closed_form_vs_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r = rng.gen_range(1..=4u32);
        let g = ControllerGains {
            ka: rng.gen_range(0.0..1.0) / r as f64,
            kv: rng.gen_range(0.01..3.0),
            kp: rng.gen_range(0.001..2.0),
            hw: rng.gen_range(0.05..3.0),
            r,
            tau0: rng.gen_range(0.05..2.0),
        };
        let omega = 10f64.powf(rng.gen_range(-3.0..3.0));
        let tau = g.tau0 * rng.gen_range(0.01..=1.0);
        let closed = h_magnitude_sq(&g, omega, tau).unwrap();
        let direct = direct_magnitude_sq(&g, omega, tau);
        worst = worst.max(((closed - direct) / direct).abs());
    }
    Outcome::new(worst < 1e-10, format!("1000 draws, worst relative error {worst:.2e}"))
}

fn in_brackets(real: &[f64], imag: &[f64]) -> bool {
    let real_ok = real[0] > 0.0
        && real[0] < FRAC_PI_4
        && real[1..].iter().enumerate().all(|(n, &t)| {
            let shift = 2.0 * PI * (n / 2) as f64;
            let (lo, hi) = if n % 2 == 0 {
                (FRAC_PI_4 + shift, FRAC_PI_2 + shift)
            } else {
                (1.5 * PI + shift, 1.75 * PI + shift)
            };
            lo < t && t < hi
        });
    let imag_ok = imag[0] == 0.0
        && imag[1..].iter().enumerate().all(|(n, &t)| {
            let shift = 2.0 * PI * (n / 2) as f64;
            let (lo, hi) = if n % 2 == 0 {
                (shift, FRAC_PI_4 + shift)
            } else {
                (0.75 * PI + shift, PI + shift)
            };
            lo < t && t < hi
        });
    real_ok && imag_ok
}

fn internal_stability() -> Outcome {
    let g = cacc_gains();
    let (rep, dt) = timed(|| certify_internal(&g, 0.5, 3).unwrap());
    let p: QuasiPolyParams = rep.params;
    let residual = rep
        .roots
        .real
        .iter()
        .map(|&t| quasipoly_parts(&p, t).0.abs())
        .chain(rep.roots.imag.iter().map(|&t| quasipoly_parts(&p, t).1.abs()))
        .fold(0.0, f64::max);
    let counts = (1..=3).all(|l| window_counts(&rep.roots, l) == (4 * l as usize + 2, 4 * l as usize + 2));
    let cond_b = rep.condition_b_value;
    let exact_b = 0.5f64.powi(4) * g.gamma() * g.kp;
    let ok = near(p.kp_bar, 0.0150)
        && p.kp_bar < 4.0 / 27.0
        && near(p.gamma_bar, 0.3710)
        && p.gamma_bar <= 0.5
        && in_brackets(&rep.roots.real, &rep.roots.imag)
        && residual < 1e-10
        && interlacing_check(&rep.roots)
        && counts
        && cond_b == exact_b
        && cond_b > 0.0
        && (cond_b - 2.78e-3).abs() < 5e-6
        && rep.certification == Certification::Stable
        && dt < Duration::from_secs(1);
    Outcome::new(
        ok,
        format!(
            "kp_bar {:.4}, gamma_bar {:.4}, residual {residual:.1e}, condition B {cond_b:.4e}, {dt:.0?}",
            p.kp_bar, p.gamma_bar
        ),
    )
}

fn pipeline() -> Outcome {
    let grid = FrequencyGrid::default();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (n, ka) in [0.0, 0.2, 0.5, 0.8].into_iter().enumerate() {
        for (m, factor) in [1.05, 1.3, 1.6, 2.0].into_iter().enumerate() {
            let mut base = ControllerGains { ka, kv: 0.1, kp: 0.01, hw: 1.0, r: 1, tau0: 0.5 };
            base.hw = factor * min_headway(base.mode(), ka, 1, 0.5).unwrap();
            let region = gain_region(&base).unwrap();
            for (kv, kp) in sample_feasible_gains(&region, 13, (16 * n + m) as u64).unwrap() {
                let g = ControllerGains { kv, kp, ..base };
                checked += 1;
                let holds = sufficient_condition(&g).holds
                    && robust_sweep(&g, &grid).unwrap().passed
                    && certify_internal(&g, g.tau0, 3).unwrap().certification == Certification::Stable;
                if !holds {
                    failures.push(g);
                }
            }
        }
    }
    Outcome::new(
        checked >= 200 && failures.is_empty(),
        format!("{checked} gain sets, {} counterexamples", failures.len()),
    )
}

fn scenario_for(name: &str) -> PlatoonScenario {
    preset(name).unwrap().parse().unwrap().platoon
}

fn simulation_verdicts() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, expect) in [
        ("paper-cacc-0.7", true),
        ("paper-acc-1.2", true),
        ("paper-caccplus-r3", true),
        ("paper-cacc-0.6", false),
        ("paper-acc-0.9", false),
    ] {
        let sc = scenario_for(name);
        let (tr, dt) = timed(|| simulate(&sc).unwrap());
        let s = &tr.summary;
        let good = s.passed == expect && dt < Duration::from_secs(5);
        ok &= good;
        let verdict = if s.passed { "pass" } else { "fail" };
        let mark = if good { "" } else { " (expected the other verdict)" };
        detail.push(format!("{name} {verdict}{mark} {dt:.0?}"));

        let quiet = PlatoonScenario { lead: LeadProfile::Zero, ..sc.clone() };
        let rest = simulate(&quiet).unwrap();
        let drift = rest.followers.iter().flat_map(|f| &f.delta).fold(0.0, |m: f64, d| m.max(d.abs()));
        if drift >= 1e-12 {
            ok = false;
            detail.push(format!("{name} equilibrium drift {drift:.1e}"));
        }

        let shift = 1234.5;
        let moved = simulate(&PlatoonScenario { x_lead: sc.x_lead + shift, ..sc.clone() }).unwrap();
        let same = tr.followers.iter().zip(&moved.followers).all(|(a, b)| {
            a.delta == b.delta
                && a.v == b.v
                && a.a == b.a
                && a.x.iter().zip(&b.x).all(|(x, y)| ((y - x) - shift).abs() <= 1e-12 * y.abs().max(1.0))
        });
        if !same {
            ok = false;
            detail.push(format!("{name} translation invariance broken"));
        }

        let lag = (sc.tau / sc.dt).round() as usize;
        let faithful = tr.followers.iter().all(|f| {
            f.a[..lag].iter().all(|&a| a == 0.0) && (lag..f.a.len()).all(|k| f.a[k] == f.u[k - lag])
        });
        if !faithful {
            ok = false;
            detail.push(format!("{name} delayed acceleration differs from u(t - tau)"));
        }
    }
    Outcome::new(ok, detail.join(", "))
}

fn ka_necessity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let g = ControllerGains {
            ka: 1.0,
            kv: rng.gen_range(0.05..3.0),
            kp: rng.gen_range(0.01..2.0),
            hw: rng.gen_range(0.1..3.0),
            r: 1,
            tau0: rng.gen_range(0.1..2.0),
        };
        let tau = g.tau0 * rng.gen_range(0.05..=1.0);
        let omega = counterexample_frequency(&g, tau).unwrap();
        worst = worst.min(h_magnitude_sq(&g, omega, tau).unwrap().sqrt());
    }
    Outcome::new(worst > 1.0, format!("20 draws, smallest |H(omega_hat)| {worst:.6}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("headway bounds", headway_bounds),
        ("region coefficients", region_coefficients),
        ("robust string stability", robust_string_stability),
        ("refutation witnesses", refutation),
        ("closed form vs complex oracle", closed_form_vs_oracle),
        ("internal stability", internal_stability),
        ("synthesis pipeline", pipeline),
        ("simulation verdicts", simulation_verdicts),
        ("k_a necessity", ka_necessity),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        failed += usize::from(!out.ok);
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {}", n + 1, out.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
