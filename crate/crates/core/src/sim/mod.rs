//! Fixed-step simulation of a platoon under pure actuation delay,
//! `x' = v`, `v' = a`, `a(t) = u(t - tau)`.
//!
//! Positions are integrated in a frame moving at the initial speed, so a
//! platoon at equilibrium stays there to rounding and a constant shift of the
//! initial positions never touches the computed spacing errors.

mod lead;

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, floor, fabs, round};

use crate::error::{Error, Result};
use crate::gains::ControllerGains;

pub use lead::LeadProfile;

/// Relative slack on peak comparisons in the amplification verdicts.
pub const TOL_AMP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VehicleState {
    /// Position, m.
    pub x: f64,
    /// Velocity, m/s.
    pub v: f64,
    /// Realized acceleration, m/s^2.
    pub a: f64,
}

/// Exact double-integrator update with `a` held over the step.
pub fn advance_kinematics(s: VehicleState, a: f64, dt: f64) -> VehicleState {
    VehicleState { x: s.x + s.v * dt + 0.5 * a * dt * dt, v: s.v + a * dt, a }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DynamicsVariant {
    /// `a(t) = u(t - tau)`.
    #[default]
    PureDelay,
    /// `tau a' + a = u`, for comparison only.
    FirstOrderLag,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlatoonScenario {
    /// Standstill spacing `d`, m.
    pub spacing: f64,
    /// Actuation delay used by the plant, s.
    pub tau: f64,
    /// Common initial speed, m/s.
    pub v_init: f64,
    /// Initial position of the lead vehicle, m.
    pub x_lead: f64,
    /// Gains of followers `1..=N`; `vehicles[i - 1].r` is vehicle i's look-ahead.
    pub vehicles: Vec<ControllerGains>,
    pub lead: LeadProfile,
    pub dt: f64,
    pub t_end: f64,
    pub dynamics: DynamicsVariant,
}

impl PlatoonScenario {
    pub fn follower_count(&self) -> usize {
        self.vehicles.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.vehicles.is_empty() {
            return Err(Error::Config("at least one follower is required"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config("dt > 0 violated"));
        }
        if !(self.tau.is_finite() && self.tau >= self.dt) {
            return Err(Error::Config("tau >= dt violated"));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config("t_end > 0 violated"));
        }
        if !(self.spacing.is_finite() && self.spacing >= 0.0) {
            return Err(Error::Config("standstill spacing d >= 0 violated"));
        }
        if !self.v_init.is_finite() || !self.x_lead.is_finite() {
            return Err(Error::Config("initial speed and position must be finite"));
        }
        for (k, g) in self.vehicles.iter().enumerate() {
            if g.r as usize > k + 1 {
                return Err(Error::Config("r_i <= i violated"));
            }
            g.validate()?;
        }
        self.lead.validate()
    }
}

/// `u_i` for follower `i >= 1` given the states of vehicles `0..=i`
/// (index 0 is the lead) and the follower headways (`headways[k - 1]` for
/// vehicle k).
///
/// `sum_{j=1..r} [k_a a_{i-j} - k_v (v_i - v_{i-j}) - k_p (x_i - x_{i-j} + j d + H_j v_i)]`
/// where `H_j` sums the headways of vehicles `i-j+1..=i`, so `H_j = j h_w`
/// when they agree and `delta = 0` is an equilibrium when they do not.
pub fn control_law(
    i: usize,
    g: &ControllerGains,
    states: &[VehicleState],
    headways: &[f64],
    spacing: f64,
) -> f64 {
    let me = states[i];
    let mut window = 0.0;
    (1..=g.r as usize)
        .map(|j| {
            let ahead = states[i - j];
            window += headways[i - j];
            g.ka * ahead.a
                - g.kv * (me.v - ahead.v)
                - g.kp * (me.x - ahead.x + j as f64 * spacing + window * me.v)
        })
        .sum()
}

/// `delta_i = x_i - x_{i-1} + d + h_w v_i`.
pub fn spacing_error(me: &VehicleState, ahead: &VehicleState, spacing: f64, hw: f64) -> f64 {
    me.x - ahead.x + spacing + hw * me.v
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FollowerSeries {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    pub u: Vec<f64>,
    pub delta: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LeadSeries {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VerdictKind {
    /// Every peak bounded by its predecessor's.
    Chain,
    /// Every peak behind vehicle 1 bounded by vehicle 1's.
    Platoon,
}

/// Time-domain proxy for string stability.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AmplificationReport {
    /// `max_t |delta_i(t)|` for followers `1..=N`.
    pub peaks: Vec<f64>,
    /// `P_i / P_{i-1}` for `i = 2..=N` (NaN when both are zero).
    pub ratios: Vec<f64>,
    pub kind: VerdictKind,
    pub passed: bool,
    /// First follower (1-based) violating the verdict, if any.
    pub first_violation: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationTrace {
    pub time: Vec<f64>,
    pub lead: LeadSeries,
    pub followers: Vec<FollowerSeries>,
    pub spacing: f64,
    pub headways: Vec<f64>,
    pub lookahead: Vec<u32>,
    pub summary: AmplificationReport,
}

/// Stateful stepper; [`simulate`] drives it over the whole horizon.
#[derive(Clone, Debug)]
pub struct Simulator<'a> {
    scenario: &'a PlatoonScenario,
    step: usize,
    /// Vehicles `0..=N` in the co-moving frame: `x` relative, `v` absolute.
    states: Vec<VehicleState>,
    headways: Vec<f64>,
    /// `u_i(t_k)` for `k = 0..step`, one buffer per follower.
    history: Vec<Vec<f64>>,
    /// `Some(L)` when `tau = L dt` to rounding.
    whole_lag: Option<usize>,
}

impl<'a> Simulator<'a> {
    /// Places the platoon at equilibrium at speed `v_init`: every
    /// `delta_i(0) = 0` and the control history before `t = 0` is zero.
    pub fn new(scenario: &'a PlatoonScenario) -> Result<Self> {
        scenario.validate()?;
        let n = scenario.follower_count();
        let v = scenario.v_init;
        let mut states = vec![VehicleState { x: 0.0, v, a: 0.0 }; n + 1];
        for i in 1..=n {
            states[i].x = states[i - 1].x - scenario.spacing - scenario.vehicles[i - 1].hw * v;
        }
        let headways = scenario.vehicles.iter().map(|g| g.hw).collect();

        let ratio = scenario.tau / scenario.dt;
        let nearest = round(ratio);
        let whole_lag = (fabs(ratio - nearest) <= 1e-9 * nearest.max(1.0)).then_some(nearest as usize);

        Ok(Simulator { scenario, step: 0, states, headways, history: vec![Vec::new(); n], whole_lag })
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.scenario.dt
    }

    /// State of vehicle `i` in absolute coordinates.
    pub fn state(&self, i: usize) -> VehicleState {
        let s = self.states[i];
        VehicleState { x: s.x + self.scenario.v_init * self.time() + self.scenario.x_lead, ..s }
    }

    /// `u(t_k - tau)` by lookup (whole lag) or linear interpolation; zero
    /// before `t = 0`.
    fn delayed_control(&self, follower: usize) -> Result<f64> {
        let hist = &self.history[follower];
        let at = |j: isize| -> Result<f64> {
            if j < 0 {
                Ok(0.0)
            } else {
                hist.get(j as usize).copied().ok_or(Error::HistoryUnderrun { step: self.step })
            }
        };
        match self.whole_lag {
            Some(lag) => at(self.step as isize - lag as isize),
            None => {
                let q = self.step as f64 - self.scenario.tau / self.scenario.dt;
                let j0 = floor(q);
                let frac = q - j0;
                let j0 = j0 as isize;
                if frac == 0.0 {
                    at(j0)
                } else {
                    Ok(at(j0)? * (1.0 - frac) + at(j0 + 1)? * frac)
                }
            }
        }
    }

    /// Sets the realized accelerations at the current time, then returns the
    /// control inputs computed from that state.
    fn evaluate(&mut self) -> Result<Vec<f64>> {
        let sc = self.scenario;
        self.states[0].a = sc.lead.eval(self.time());
        if sc.dynamics == DynamicsVariant::PureDelay {
            for i in 1..self.states.len() {
                self.states[i].a = self.delayed_control(i - 1)?;
            }
        }
        Ok((1..self.states.len())
            .map(|i| control_law(i, &sc.vehicles[i - 1], &self.states, &self.headways, sc.spacing))
            .collect())
    }

    fn advance(&mut self, controls: &[f64]) {
        let sc = self.scenario;
        let dt = sc.dt;
        for (i, s) in self.states.iter_mut().enumerate() {
            let a = s.a;
            s.x += (s.v - sc.v_init) * dt + 0.5 * a * dt * dt;
            s.v += a * dt;
            if i > 0 && sc.dynamics == DynamicsVariant::FirstOrderLag {
                let u = controls[i - 1];
                s.a = u + (a - u) * exp(-dt / sc.tau);
            }
        }
        self.step += 1;
    }

    /// Evaluates controls at the current time, stores them and integrates one
    /// step. Returns the controls applied at the old time.
    pub fn step(&mut self) -> Result<Vec<f64>> {
        let controls = self.evaluate()?;
        for (h, &u) in self.history.iter_mut().zip(&controls) {
            h.push(u);
        }
        self.advance(&controls);
        Ok(controls)
    }
}

pub fn simulate(scenario: &PlatoonScenario) -> Result<SimulationTrace> {
    let mut sim = Simulator::new(scenario)?;
    let n = scenario.follower_count();
    let steps = round(scenario.t_end / scenario.dt) as usize;
    let d = scenario.spacing;

    let mut time = Vec::with_capacity(steps + 1);
    let mut lead = LeadSeries::default();
    let mut followers = vec![FollowerSeries::default(); n];

    for k in 0..=steps {
        let controls = sim.evaluate()?;
        time.push(sim.time());
        let l = sim.state(0);
        lead.x.push(l.x);
        lead.v.push(l.v);
        lead.a.push(l.a);
        for i in 1..=n {
            let s = sim.state(i);
            let f = &mut followers[i - 1];
            f.x.push(s.x);
            f.v.push(s.v);
            f.a.push(s.a);
            f.u.push(controls[i - 1]);
            let hw = scenario.vehicles[i - 1].hw;
            f.delta.push(spacing_error(&sim.states[i], &sim.states[i - 1], d, hw));
        }
        for (h, &u) in sim.history.iter_mut().zip(&controls) {
            h.push(u);
        }
        if k < steps {
            sim.advance(&controls);
        }
    }

    let mut trace = SimulationTrace {
        time,
        lead,
        followers,
        spacing: d,
        headways: scenario.vehicles.iter().map(|g| g.hw).collect(),
        lookahead: scenario.vehicles.iter().map(|g| g.r).collect(),
        summary: AmplificationReport {
            peaks: Vec::new(),
            ratios: Vec::new(),
            kind: VerdictKind::Chain,
            passed: true,
            first_violation: None,
        },
    };
    trace.summary = amplification_metrics(&trace);
    Ok(trace)
}

/// Spacing-error peaks and the chain (all `r = 1`) or platoon (any `r >= 2`)
/// verdict.
pub fn amplification_metrics(trace: &SimulationTrace) -> AmplificationReport {
    let peaks: Vec<f64> = trace
        .followers
        .iter()
        .map(|f| f.delta.iter().fold(0.0, |m: f64, &d| m.max(fabs(d))))
        .collect();
    let ratios = peaks.windows(2).map(|w| w[1] / w[0]).collect();
    let kind = if trace.lookahead.iter().all(|&r| r == 1) {
        VerdictKind::Chain
    } else {
        VerdictKind::Platoon
    };
    let first_violation = match kind {
        VerdictKind::Chain => {
            peaks.windows(2).position(|w| w[1] > w[0] * (1.0 + TOL_AMP)).map(|k| k + 2)
        }
        VerdictKind::Platoon => {
            let cap = peaks.first().copied().unwrap_or(0.0) * (1.0 + TOL_AMP);
            peaks.iter().skip(1).position(|&p| p > cap).map(|k| k + 2)
        }
    };
    AmplificationReport { peaks, ratios, kind, passed: first_violation.is_none(), first_violation }
}
