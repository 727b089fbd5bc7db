//! Internal stability of the closed loop through root interlacing of
//! `tau^2 D(j omega)`, `D(s) = s^2 e^{tau s} + gamma s + k_p`.
//!
//! With `theta = tau omega`, `gamma_bar = tau gamma` and `kp_bar = tau^2 k_p`
//! the real and imaginary parts are
//!
//! ```text
//! D_r(theta) = kp_bar - theta^2 cos(theta)
//! D_i(theta) = gamma_bar theta - theta^2 sin(theta)
//! ```
//!
//! Under `kp_bar < 4/27` and `gamma_bar <= 1/2` every positive root sits alone
//! in a known bracket:
//!
//! | part | brackets |
//! |------|----------|
//! | `D_r` | `(0, pi/4)`, `(pi/4 + 2m pi, pi/2 + 2m pi)`, `(3pi/2 + 2n pi, 7pi/4 + 2n pi)` |
//! | `D_i` | `{0}`, `(2m pi, pi/4 + 2m pi)`, `(3pi/4 + 2n pi, pi + 2n pi)` |
//!
//! Roots are found by bisection on `kp_bar/theta^2 - cos(theta)` and
//! `gamma_bar/theta - sin(theta)`, then polished with Newton steps.
//! Certification is one-sided: outside the bound regime the verdict is
//! "not certified", never "unstable".

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use libm::{cos, fabs, sin, sqrt};

use crate::error::{Error, Result};
use crate::gains::ControllerGains;

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-13;
/// Largest accepted `|D_r|` / `|D_i|` at a returned root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Condition (B) must exceed this at `omega = 0`.
pub const CONDITION_B_MARGIN: f64 = 1e-15;
/// Step of the independent sign-change scan used to confirm root counts.
pub const SCAN_STEP: f64 = 1e-3;
pub const DEFAULT_L_MAX: u32 = 3;

const TWO_PI: f64 = 2.0 * PI;

/// Delay-normalized coefficients of the characteristic quasi-polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuasiPolyParams {
    /// `tau * gamma`.
    pub gamma_bar: f64,
    /// `tau^2 * k_p`.
    pub kp_bar: f64,
    pub tau: f64,
}

impl QuasiPolyParams {
    pub fn new(gamma_bar: f64, kp_bar: f64, tau: f64) -> Result<Self> {
        if !(gamma_bar.is_finite() && gamma_bar > 0.0) {
            return Err(Error::Domain { rule: "gamma_bar > 0", value: gamma_bar });
        }
        if !(kp_bar.is_finite() && kp_bar > 0.0) {
            return Err(Error::Domain { rule: "kp_bar > 0", value: kp_bar });
        }
        Ok(QuasiPolyParams { gamma_bar, kp_bar, tau })
    }

    /// Uses the effective gains, so CACC+ reduces to the same polynomial.
    pub fn from_gains(g: &ControllerGains, tau: f64) -> Result<Self> {
        g.check_positive()?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain { rule: "tau > 0", value: tau });
        }
        let e = g.effective();
        Self::new(tau * e.gamma(), tau * tau * e.kp, tau)
    }

    /// Upper bound on the first real-part root and lower bound on the first
    /// nonzero imaginary-part root: `(sqrt(1 - sqrt(1 - 2 kp_bar)), sqrt(gamma_bar))`.
    pub fn first_pair_bounds(&self) -> (f64, f64) {
        (sqrt(1.0 - sqrt(1.0 - 2.0 * self.kp_bar)), sqrt(self.gamma_bar))
    }

    /// [`condition_b`] with `gamma` and `k_p` recovered from the scaled
    /// coefficients.
    pub fn condition_b(&self, omega: f64) -> f64 {
        let tau = self.tau;
        condition_b_raw(tau, self.gamma_bar / tau, self.kp_bar / (tau * tau), omega)
    }
}

/// `(D_r(theta), D_i(theta))`.
pub fn quasipoly_parts(p: &QuasiPolyParams, theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    (p.kp_bar - t2 * cos(theta), p.gamma_bar * theta - t2 * sin(theta))
}

/// `(kp_bar < 4/27, gamma_bar <= 1/2)`.
pub fn bound_checks(p: &QuasiPolyParams) -> (bool, bool) {
    (p.kp_bar < 4.0 / 27.0, p.gamma_bar <= 0.5)
}

#[derive(Clone, Copy)]
enum Part {
    Real,
    Imag,
}

impl Part {
    fn name(self) -> &'static str {
        match self {
            Part::Real => "D_r",
            Part::Imag => "D_i",
        }
    }

    /// Normalized form and its derivative.
    fn reduced(self, p: &QuasiPolyParams, theta: f64) -> (f64, f64) {
        match self {
            Part::Real => (
                p.kp_bar / (theta * theta) - cos(theta),
                -2.0 * p.kp_bar / (theta * theta * theta) + sin(theta),
            ),
            Part::Imag => (
                p.gamma_bar / theta - sin(theta),
                -p.gamma_bar / (theta * theta) - cos(theta),
            ),
        }
    }

    fn residual(self, p: &QuasiPolyParams, theta: f64) -> f64 {
        let (dr, di) = quasipoly_parts(p, theta);
        match self {
            Part::Real => fabs(dr),
            Part::Imag => fabs(di),
        }
    }
}

/// Single root of `part` in `(lo, hi)`. The reduced form must be positive at
/// `lo` and negative at `hi` when `lo_positive`, the reverse otherwise. A zero
/// `lo` is the singular end, where the sign is the limit `+`.
fn bracketed_root(p: &QuasiPolyParams, part: Part, lo: f64, hi: f64, lo_positive: bool) -> Result<f64> {
    let sign_at = |theta: f64| part.reduced(p, theta).0;
    let f_lo = if lo == 0.0 { f64::INFINITY } else { sign_at(lo) };
    let f_hi = sign_at(hi);
    let ok = if lo_positive { f_lo > 0.0 && f_hi < 0.0 } else { f_lo < 0.0 && f_hi > 0.0 };
    if !ok {
        return Err(Error::BracketSign { part: part.name(), lo, hi });
    }

    let (mut a, mut b) = (lo, hi);
    while b - a >= BISECTION_WIDTH {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let f = sign_at(mid);
        if f == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (f > 0.0) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }

    let mut theta = 0.5 * (a + b);
    for _ in 0..3 {
        let (f, df) = part.reduced(p, theta);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let next = theta - f / df;
        if !(next > lo && next < hi) || part.residual(p, next) > part.residual(p, theta) {
            break;
        }
        theta = next;
    }

    let residual = part.residual(p, theta);
    if residual.is_nan() || residual >= RESIDUAL_TOL || !(lo < theta && theta < hi) {
        return Err(Error::RootResidual { part: part.name(), theta, residual });
    }
    Ok(theta)
}

/// `(lo, hi, reduced form positive at lo)`.
type Bracket = (f64, f64, bool);

fn real_brackets(l_max: u32) -> Vec<Bracket> {
    let mut out = Vec::with_capacity(2 * l_max as usize + 3);
    out.push((0.0, FRAC_PI_4, true));
    for k in 0..=l_max {
        let shift = TWO_PI * k as f64;
        out.push((FRAC_PI_4 + shift, FRAC_PI_2 + shift, false));
        out.push((1.5 * PI + shift, 1.75 * PI + shift, true));
    }
    out
}

fn imag_brackets(l_max: u32) -> Vec<Bracket> {
    let mut out = Vec::with_capacity(2 * l_max as usize + 2);
    for k in 0..=l_max {
        let shift = TWO_PI * k as f64;
        out.push((shift, FRAC_PI_4 + shift, true));
        out.push((0.75 * PI + shift, PI + shift, false));
    }
    out
}

/// Positive roots of `D_r`, one per bracket, through the window
/// `theta <= 2 l_max pi + pi/4` and one family step beyond it.
pub fn find_roots_real(p: &QuasiPolyParams, l_max: u32) -> Result<Vec<f64>> {
    real_brackets(l_max)
        .into_iter()
        .map(|(lo, hi, lo_positive)| bracketed_root(p, Part::Real, lo, hi, lo_positive))
        .collect()
}

/// Non-negative roots of `D_i` starting with the exact root at 0.
pub fn find_roots_imag(p: &QuasiPolyParams, l_max: u32) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * l_max as usize + 3);
    out.push(0.0);
    for (lo, hi, lo_positive) in imag_brackets(l_max) {
        out.push(bracketed_root(p, Part::Imag, lo, hi, lo_positive)?);
    }
    Ok(out)
}

/// Sorted non-negative roots of both parts. Negative roots are the mirror
/// images and are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RootList {
    pub real: Vec<f64>,
    pub imag: Vec<f64>,
    pub l_max: u32,
}

/// Strict alternation `0 = theta_i1 < theta_r1 < theta_i2 < theta_r2 < ...`
/// over every stored root.
pub fn interlacing_check(rl: &RootList) -> bool {
    let (re, im) = (&rl.real, &rl.imag);
    if re.is_empty() || im.first() != Some(&0.0) {
        return false;
    }
    if !(im.len() == re.len() || im.len() == re.len() + 1) {
        return false;
    }
    re.iter().enumerate().all(|(k, &r)| {
        im[k] < r && im.get(k + 1).is_none_or(|&next| r < next)
    })
}

fn window_edges(l: u32) -> (f64, f64) {
    if l == 0 {
        (FRAC_PI_4, FRAC_PI_4)
    } else {
        let centre = TWO_PI * l as f64;
        (centre + FRAC_PI_4, centre - FRAC_PI_4)
    }
}

fn mirrored_count(roots: &[f64], upper: f64, lower_abs: f64) -> usize {
    let non_negative = roots.iter().filter(|&&t| t <= upper).count();
    let negative = roots.iter().filter(|&&t| t > 0.0 && t <= lower_abs).count();
    non_negative + negative
}

/// Root counts of `(D_r, D_i)` on `[-2 l pi + pi/4, 2 l pi + pi/4]`, with
/// negative roots taken by symmetry. `l = 0` counts on `[-pi/4, pi/4]`.
pub fn window_counts(rl: &RootList, l: u32) -> (usize, usize) {
    let (upper, lower_abs) = window_edges(l);
    (mirrored_count(&rl.real, upper, lower_abs), mirrored_count(&rl.imag, upper, lower_abs))
}

/// Both parts have exactly `4l + 2` roots in the `l`-th window. Requires
/// `l >= 1` and lists reaching past the window.
pub fn root_count_window(rl: &RootList, l: u32) -> bool {
    if l == 0 {
        return false;
    }
    let (upper, _) = window_edges(l);
    let covers = |roots: &[f64]| roots.last().is_some_and(|&t| t > upper);
    if !covers(&rl.real) || !covers(&rl.imag) {
        return false;
    }
    let expected = 4 * l as usize + 2;
    window_counts(rl, l) == (expected, expected)
}

/// Sign changes of both parts on `(0, theta_max]`, seeded with the `+` sign
/// both reduced forms have at `0+`.
fn scan_sign_changes(p: &QuasiPolyParams, theta_max: f64) -> (usize, usize) {
    let steps = (theta_max / SCAN_STEP) as usize + 1;
    let (mut prev_r, mut prev_i) = (true, true);
    let (mut nr, mut ni) = (0, 0);
    for k in 1..=steps {
        let theta = (k as f64 * SCAN_STEP).min(theta_max);
        let (dr, di) = quasipoly_parts(p, theta);
        let (sr, si) = (dr > 0.0, di > 0.0);
        nr += (sr != prev_r) as usize;
        ni += (si != prev_i) as usize;
        prev_r = sr;
        prev_i = si;
    }
    (nr, ni)
}

/// `D_i'(w) D_r(w) - D_i(w) D_r'(w)` for the scaled `tau^2 D(j w)`:
///
/// `tau^4 gamma k_p + tau^5 w^4 - tau^3 w (2 tau k_p + tau^2 gamma w^2) sin(tau w)
///  + tau^4 w^2 (gamma - tau k_p) cos(tau w)`
pub fn condition_b(g: &ControllerGains, tau: f64, omega: f64) -> f64 {
    let e = g.effective();
    condition_b_raw(tau, e.gamma(), e.kp, omega)
}

fn condition_b_raw(tau: f64, gamma: f64, kp: f64, omega: f64) -> f64 {
    let t2 = tau * tau;
    let t3 = t2 * tau;
    let t4 = t2 * t2;
    let t5 = t4 * tau;
    let w2 = omega * omega;
    t4 * gamma * kp + t5 * w2 * w2
        - t3 * omega * (2.0 * tau * kp + t2 * gamma * w2) * sin(tau * omega)
        + t4 * w2 * (gamma - tau * kp) * cos(tau * omega)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Certification {
    /// Interlacing, window counts and condition (B) all hold.
    Stable,
    /// `kp_bar` or `gamma_bar` outside the regime the bracket argument covers.
    OutsideCertifiedRegime,
    /// Inside the regime, yet one of the checks failed.
    CheckFailed,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterlacingReport {
    pub params: QuasiPolyParams,
    pub kp_ok: bool,
    pub gamma_ok: bool,
    pub roots: RootList,
    pub interlaced: bool,
    /// Window counts `4l + 2` for `l = 1..=l_max`, confirmed by a sign scan.
    pub count_check: bool,
    /// Condition (B) at `omega = 0`, equal to `tau^4 gamma k_p`.
    pub condition_b_value: f64,
    pub stable: bool,
    pub certification: Certification,
}

/// Bound checks, both root families, interlacing, window counts for
/// `l = 1..=l_max` and condition (B) at `omega = 0`.
pub fn certify_internal(g: &ControllerGains, tau: f64, l_max: u32) -> Result<InterlacingReport> {
    if l_max == 0 {
        return Err(Error::Domain { rule: "l_max >= 1", value: 0.0 });
    }
    let params = QuasiPolyParams::from_gains(g, tau)?;
    let (kp_ok, gamma_ok) = bound_checks(&params);
    let condition_b_value = condition_b(g, tau, 0.0);

    if !(kp_ok && gamma_ok) {
        return Ok(InterlacingReport {
            params,
            kp_ok,
            gamma_ok,
            roots: RootList { l_max, ..RootList::default() },
            interlaced: false,
            count_check: false,
            condition_b_value,
            stable: false,
            certification: Certification::OutsideCertifiedRegime,
        });
    }

    let roots = RootList {
        real: find_roots_real(&params, l_max)?,
        imag: find_roots_imag(&params, l_max)?,
        l_max,
    };
    let interlaced = interlacing_check(&roots);

    let (theta_max, _) = window_edges(l_max);
    let listed_real = roots.real.iter().filter(|&&t| t <= theta_max).count();
    let listed_imag = roots.imag.iter().filter(|&&t| t > 0.0 && t <= theta_max).count();
    let count_check = (1..=l_max).all(|l| root_count_window(&roots, l))
        && scan_sign_changes(&params, theta_max) == (listed_real, listed_imag);

    let stable = interlaced && count_check && condition_b_value > CONDITION_B_MARGIN;
    Ok(InterlacingReport {
        params,
        kp_ok,
        gamma_ok,
        roots,
        interlaced,
        count_check,
        condition_b_value,
        stable,
        certification: if stable { Certification::Stable } else { Certification::CheckFailed },
    })
}
