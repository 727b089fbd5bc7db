//! Spacing-error propagation `H(s; tau) = (k_a s^2 + k_v s + k_p) / (s^2 e^{tau s} + gamma s + k_p)`
//! and robust string-stability checks over `tau in (0, tau0]`.
//!
//! CACC+ gains are evaluated through their effective (r-scaled) form, so
//! every magnitude here is `|r H_j|` in that case.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, floor, log, sin, sqrt};

use crate::error::{Error, Result};
use crate::gains::{ka_upper_bound, ControllerGains};

/// Slack allowed on the swept supremum before a sweep fails.
pub const PASS_TOLERANCE: f64 = 1e-9;

/// `|H(j omega; tau)|^2` from the closed-form quotient.
///
/// Returns exactly 1 at `omega = 0`. Fails with [`Error::JwAxisRoot`] when
/// the denominator collapses to rounding level.
pub fn h_magnitude_sq(g: &ControllerGains, omega: f64, tau: f64) -> Result<f64> {
    g.check_positive()?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::Domain { rule: "omega >= 0", value: omega });
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain { rule: "tau > 0", value: tau });
    }
    if omega == 0.0 {
        return Ok(1.0);
    }
    let e = g.effective();
    let gamma = e.gamma();
    let w2 = omega * omega;
    let w3 = w2 * omega;
    let w4 = w2 * w2;
    let (s, c) = (sin(tau * omega), cos(tau * omega));

    let num = e.ka * e.ka * w4 + (e.kv * e.kv - 2.0 * e.ka * e.kp) * w2 + e.kp * e.kp;
    let den = w4 + gamma * gamma * w2 - 2.0 * gamma * w3 * s + e.kp * e.kp - 2.0 * e.kp * w2 * c;
    let scale = w4 + gamma * gamma * w2 + 2.0 * gamma * w3 + e.kp * e.kp + 2.0 * e.kp * w2;
    if den.is_nan() || den <= 64.0 * f64::EPSILON * scale {
        return Err(Error::JwAxisRoot { omega, tau });
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Spacing {
    Log,
    Linear,
}

/// Discretization of the `(omega, tau)` quantifiers. Delays are sampled at
/// `tau0 * k / tau_points` for `k = 1..=tau_points`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrequencyGrid {
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub spacing: Spacing,
    pub tau_points: usize,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            omega_min: 1e-3,
            omega_max: 1e3,
            omega_points: 4000,
            spacing: Spacing::Log,
            tau_points: 50,
        }
    }
}

impl FrequencyGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min.is_finite() && self.omega_min > 0.0) {
            return Err(Error::Domain { rule: "omega_min > 0", value: self.omega_min });
        }
        if !(self.omega_max.is_finite() && self.omega_max > self.omega_min) {
            return Err(Error::Domain { rule: "omega_max > omega_min", value: self.omega_max });
        }
        if self.omega_points < 2 {
            return Err(Error::Domain { rule: "omega_points >= 2", value: self.omega_points as f64 });
        }
        if self.tau_points < 1 {
            return Err(Error::Domain { rule: "tau_points >= 1", value: 0.0 });
        }
        Ok(())
    }

    pub fn omega(&self, k: usize) -> f64 {
        if k == 0 {
            return self.omega_min;
        }
        if k + 1 == self.omega_points {
            return self.omega_max;
        }
        let frac = k as f64 / (self.omega_points - 1) as f64;
        match self.spacing {
            Spacing::Linear => self.omega_min + frac * (self.omega_max - self.omega_min),
            Spacing::Log => {
                let (lo, hi) = (log(self.omega_min), log(self.omega_max));
                exp(lo + frac * (hi - lo))
            }
        }
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.omega_points).map(move |k| self.omega(k))
    }

    pub fn taus(&self, tau0: f64) -> impl Iterator<Item = f64> {
        let n = self.tau_points;
        (1..=n).map(move |k| tau0 * k as f64 / n as f64)
    }
}

/// Outcome of a robust string-stability sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepReport {
    /// Supremum of `|H|` over the grid and the tail.
    pub sup_magnitude: f64,
    /// Frequency attaining the supremum; infinite when the tail limit wins.
    pub argmax_omega: f64,
    pub argmax_tau: f64,
    pub passed: bool,
    /// `1 - sup_magnitude`.
    pub margin: f64,
    /// `lim |H|` as `omega -> inf`, i.e. the effective `k_a`.
    pub tail_limit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfacePoint {
    pub omega: f64,
    pub tau: f64,
    pub magnitude: f64,
}

/// Supremum of `|H(j omega; tau)|` over `grid` for `tau in (0, tau0]`.
///
/// The grid is closed off by the high-frequency limit `|H| -> k_a`. When that
/// limit reaches 1 the counterexample frequencies `omega_hat(tau)` are
/// evaluated as well, so the witness is a finite point.
pub fn robust_sweep(g: &ControllerGains, grid: &FrequencyGrid) -> Result<SweepReport> {
    g.check_positive()?;
    grid.validate()?;
    let tail_limit = g.effective().ka;

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut consider = |mag_sq: f64, omega: f64, tau: f64| {
        let mag = sqrt(mag_sq);
        if mag > best.0 {
            best = (mag, omega, tau);
        }
    };
    for tau in grid.taus(g.tau0) {
        for omega in grid.omegas() {
            consider(h_magnitude_sq(g, omega, tau)?, omega, tau);
        }
    }
    if tail_limit >= 1.0 {
        for tau in grid.taus(g.tau0) {
            let omega = counterexample_frequency(g, tau)?;
            consider(h_magnitude_sq(g, omega, tau)?, omega, tau);
        }
    }
    if tail_limit > best.0 {
        best = (tail_limit, f64::INFINITY, g.tau0);
    }

    let (sup, argmax_omega, argmax_tau) = best;
    Ok(SweepReport {
        sup_magnitude: sup,
        argmax_omega,
        argmax_tau,
        passed: sup <= 1.0 + PASS_TOLERANCE,
        margin: 1.0 - sup,
        tail_limit,
    })
}

/// Every grid cell of the sweep, `tau` major.
pub fn sweep_surface(g: &ControllerGains, grid: &FrequencyGrid) -> Result<Vec<SurfacePoint>> {
    g.check_positive()?;
    grid.validate()?;
    let mut out = Vec::with_capacity(grid.omega_points * grid.tau_points);
    for tau in grid.taus(g.tau0) {
        for omega in grid.omegas() {
            let magnitude = sqrt(h_magnitude_sq(g, omega, tau)?);
            out.push(SurfacePoint { omega, tau, magnitude });
        }
    }
    Ok(out)
}

/// Slacks of the two inequalities that together imply `|H| <= 1` for all
/// `tau in (0, tau0]`, evaluated at `tau0`:
///
/// * `1 - k_a^2 - 2 gamma tau0 >= 0`
/// * `gamma^2 - 2 k_p + 2 k_a k_p - k_v^2 >= 0`
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SufficientCondition {
    pub lhs1: f64,
    pub lhs2: f64,
    pub holds: bool,
}

pub fn sufficient_condition(g: &ControllerGains) -> SufficientCondition {
    let e = g.effective();
    let gamma = e.gamma();
    let lhs1 = 1.0 - e.ka * e.ka - 2.0 * gamma * g.tau0;
    let lhs2 = gamma * gamma - 2.0 * e.kp + 2.0 * e.ka * e.kp - e.kv * e.kv;
    SufficientCondition { lhs1, lhs2, holds: lhs1 >= 0.0 && lhs2 >= 0.0 }
}

/// Smallest non-negative integer `k` with
/// `k > (gamma^2 - k_v^2 + 2 k_p) tau / (4 pi gamma) - 1/4`.
pub fn counterexample_index(g: &ControllerGains, tau: f64) -> Result<u64> {
    g.check_positive()?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain { rule: "tau > 0", value: tau });
    }
    let e = g.effective();
    let gamma = e.gamma();
    let bound = (gamma * gamma - e.kv * e.kv + 2.0 * e.kp) * tau / (4.0 * PI * gamma) - 0.25;
    let k = floor(bound) + 1.0;
    Ok(if k < 0.0 { 0 } else { k as u64 })
}

/// Frequency `omega_hat = pi/(2 tau) + 2 k pi / tau` at which
/// `|H(j omega_hat; tau)| > 1` once `k_a` reaches 1.
pub fn counterexample_frequency(g: &ControllerGains, tau: f64) -> Result<f64> {
    let k = counterexample_index(g, tau)? as f64;
    Ok(PI / (2.0 * tau) + 2.0 * k * PI / tau)
}

/// `k_a < 1` (single predecessor) or `k_a < 1/r` (CACC+).
pub fn ka_necessity_check(g: &ControllerGains) -> bool {
    g.ka < ka_upper_bound(g.r)
}
