//! TOML scenario files.
//!
//! ```toml
//! [platoon]
//! followers = 10
//! spacing = 5.0
//! v_init = 25.0
//!
//! [delay]
//! tau = 0.5
//! tau0 = 0.5
//!
//! [controller]
//! mode = "cacc"
//! ka = 0.5
//! kv = 0.7
//! kp = 0.06
//! hw = 0.7
//! r = 1
//!
//! [lead]
//! profile = "paper-sine"
//!
//! [integration]
//! dt = 0.01
//! t_end = 80.0
//! ```
//!
//! `[controller]` holds the design gains that the analysis commands check.
//! Without `[[controller.vehicles]]` every follower uses them with
//! `r_i = min(i, r)`; with it, the entries (each repeated `count` times)
//! assign gains to followers `1..=N` in order.

use std::path::Path;

use platoon_core::{
    ControllerGains, DynamicsVariant, FrequencyGrid, LeadProfile, Mode, PlatoonScenario, Spacing,
};
use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub platoon: PlatoonSection,
    pub delay: DelaySection,
    pub controller: ControllerSection,
    pub lead: LeadSection,
    pub integration: IntegrationSection,
    #[serde(default)]
    pub verification: VerificationSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatoonSection {
    /// Number of followers N.
    pub followers: usize,
    /// Standstill spacing d, m.
    pub spacing: f64,
    /// Common initial speed, m/s.
    pub v_init: f64,
    /// Initial lead position, m.
    #[serde(default)]
    pub x_lead: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelaySection {
    /// Delay used by the simulated plant, s.
    pub tau: f64,
    /// Design bound on the delay, s.
    pub tau0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub mode: Mode,
    pub ka: f64,
    pub kv: f64,
    pub kp: f64,
    pub hw: f64,
    pub r: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vehicles: Vec<VehicleEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleEntry {
    pub ka: f64,
    pub kv: f64,
    pub kp: f64,
    pub hw: f64,
    pub r: u32,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

/// Lead acceleration profile. In TOML, `profile = "<name>"` plus exactly
/// the parameters that profile takes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LeadTable", into = "LeadTable")]
pub enum LeadSection {
    PaperSine,
    Zero,
    Constant { value: f64 },
    Sine { amplitude: f64, angular_frequency: f64, start: f64, end: f64 },
    PiecewiseConstant { steps: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LeadTable {
    profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    angular_frequency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<(f64, f64)>>,
}

impl TryFrom<LeadTable> for LeadSection {
    type Error = String;

    fn try_from(t: LeadTable) -> Result<Self, String> {
        let given = [
            ("value", t.value.is_some()),
            ("amplitude", t.amplitude.is_some()),
            ("angular_frequency", t.angular_frequency.is_some()),
            ("start", t.start.is_some()),
            ("end", t.end.is_some()),
            ("steps", t.steps.is_some()),
        ];
        let expected: &[&str] = match t.profile.as_str() {
            "paper-sine" | "zero" => &[],
            "constant" => &["value"],
            "sine" => &["amplitude", "angular_frequency", "start", "end"],
            "piecewise-constant" => &["steps"],
            other => {
                return Err(format!(
                    "unknown lead profile `{other}` \
                     (paper-sine, zero, constant, sine, piecewise-constant)"
                ))
            }
        };
        for (key, present) in given {
            if present != expected.contains(&key) {
                let verb = if present { "does not take" } else { "requires" };
                return Err(format!("lead profile `{}` {verb} `{key}`", t.profile));
            }
        }
        Ok(match t.profile.as_str() {
            "paper-sine" => LeadSection::PaperSine,
            "zero" => LeadSection::Zero,
            "constant" => LeadSection::Constant { value: t.value.unwrap_or_default() },
            "sine" => LeadSection::Sine {
                amplitude: t.amplitude.unwrap_or_default(),
                angular_frequency: t.angular_frequency.unwrap_or_default(),
                start: t.start.unwrap_or_default(),
                end: t.end.unwrap_or_default(),
            },
            _ => LeadSection::PiecewiseConstant { steps: t.steps.unwrap_or_default() },
        })
    }
}

impl From<LeadSection> for LeadTable {
    fn from(l: LeadSection) -> LeadTable {
        let named = |profile: &str| LeadTable { profile: profile.into(), ..LeadTable::default() };
        match l {
            LeadSection::PaperSine => named("paper-sine"),
            LeadSection::Zero => named("zero"),
            LeadSection::Constant { value } => LeadTable { value: Some(value), ..named("constant") },
            LeadSection::Sine { amplitude, angular_frequency, start, end } => LeadTable {
                amplitude: Some(amplitude),
                angular_frequency: Some(angular_frequency),
                start: Some(start),
                end: Some(end),
                ..named("sine")
            },
            LeadSection::PiecewiseConstant { steps } => {
                LeadTable { steps: Some(steps), ..named("piecewise-constant") }
            }
        }
    }
}

impl LeadSection {
    pub fn profile(&self) -> LeadProfile {
        match self {
            LeadSection::PaperSine => LeadProfile::paper_sine(),
            LeadSection::Zero => LeadProfile::Zero,
            LeadSection::Constant { value } => LeadProfile::Constant { value: *value },
            LeadSection::Sine { amplitude, angular_frequency, start, end } => LeadProfile::Sine {
                amplitude: *amplitude,
                angular_frequency: *angular_frequency,
                start: *start,
                end: *end,
            },
            LeadSection::PiecewiseConstant { steps } => {
                LeadProfile::PiecewiseConstant { steps: steps.clone() }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub dynamics: DynamicsVariant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerificationSection {
    pub omega_min: f64,
    pub omega_max: f64,
    pub omega_points: usize,
    pub spacing: Spacing,
    pub tau_points: usize,
    pub l_max: u32,
}

impl Default for VerificationSection {
    fn default() -> Self {
        let g = FrequencyGrid::default();
        VerificationSection {
            omega_min: g.omega_min,
            omega_max: g.omega_max,
            omega_points: g.omega_points,
            spacing: g.spacing,
            tau_points: g.tau_points,
            l_max: platoon_core::internal_stability::DEFAULT_L_MAX,
        }
    }
}

impl VerificationSection {
    pub fn grid(&self) -> FrequencyGrid {
        FrequencyGrid {
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_points: self.omega_points,
            spacing: self.spacing,
            tau_points: self.tau_points,
        }
    }
}

/// A scenario file checked against every rule, with the core types built.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedScenario {
    pub file: ScenarioFile,
    pub design: ControllerGains,
    pub platoon: PlatoonScenario,
    pub grid: FrequencyGrid,
    pub l_max: u32,
}

pub fn parse_scenario(path: &Path) -> Result<ParsedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Read { path: path.to_path_buf(), source })?;
    ScenarioFile::from_toml(&text)?.parse()
}

impl ScenarioFile {
    /// Syntax and unknown keys only; see [`ScenarioFile::parse`] for rules.
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn design_gains(&self) -> ControllerGains {
        let c = &self.controller;
        ControllerGains { ka: c.ka, kv: c.kv, kp: c.kp, hw: c.hw, r: c.r, tau0: self.delay.tau0 }
    }

    /// Gains of followers `1..=N`.
    pub fn vehicle_gains(&self) -> Result<Vec<ControllerGains>, ScenarioError> {
        let n = self.platoon.followers;
        let tau0 = self.delay.tau0;
        let c = &self.controller;
        if c.vehicles.is_empty() {
            let design = self.design_gains();
            return Ok((1..=n).map(|i| ControllerGains { r: c.r.min(i as u32), ..design }).collect());
        }
        let listed: usize = c.vehicles.iter().map(|v| v.count).sum();
        if listed != n {
            return Err(ScenarioError::Rule(format!(
                "controller.vehicles lists {listed} followers, platoon.followers = {n}"
            )));
        }
        Ok(c.vehicles
            .iter()
            .flat_map(|v| {
                let g = ControllerGains { ka: v.ka, kv: v.kv, kp: v.kp, hw: v.hw, r: v.r, tau0 };
                std::iter::repeat_n(g, v.count)
            })
            .collect())
    }

    pub fn parse(self) -> Result<ParsedScenario, ScenarioError> {
        let design = self.design_gains();
        design.validate()?;
        let implied = design.mode();
        if implied != self.controller.mode {
            return Err(ScenarioError::Rule(format!(
                "controller.mode = {} but ka = {}, r = {} describe {}",
                self.controller.mode.name(),
                design.ka,
                design.r,
                implied.name()
            )));
        }
        if self.platoon.followers == 0 {
            return Err(ScenarioError::Rule("platoon.followers >= 1 violated".into()));
        }
        let tau = self.delay.tau;
        if !(tau > 0.0 && tau <= self.delay.tau0) {
            return Err(ScenarioError::Rule(format!("0 < tau <= tau0 violated (tau = {tau})")));
        }
        let platoon = PlatoonScenario {
            spacing: self.platoon.spacing,
            tau,
            v_init: self.platoon.v_init,
            x_lead: self.platoon.x_lead,
            vehicles: self.vehicle_gains()?,
            lead: self.lead.profile(),
            dt: self.integration.dt,
            t_end: self.integration.t_end,
            dynamics: self.integration.dynamics,
        };
        platoon.validate()?;
        let grid = self.verification.grid();
        grid.validate()?;
        let l_max = self.verification.l_max;
        if l_max == 0 {
            return Err(ScenarioError::Rule("verification.l_max >= 1 violated".into()));
        }
        Ok(ParsedScenario { file: self, design, platoon, grid, l_max })
    }
}

/// Ten followers, 5 m standstill gap, 25 m/s, half-second delay, sine pulse
/// on the lead.
fn experiment(controller: ControllerSection) -> ScenarioFile {
    ScenarioFile {
        platoon: PlatoonSection { followers: 10, spacing: 5.0, v_init: 25.0, x_lead: 0.0 },
        delay: DelaySection { tau: 0.5, tau0: 0.5 },
        controller,
        lead: LeadSection::PaperSine,
        integration: IntegrationSection { dt: 0.01, t_end: 80.0, dynamics: DynamicsVariant::PureDelay },
        verification: VerificationSection::default(),
    }
}

fn single(mode: Mode, ka: f64, kv: f64, kp: f64, hw: f64) -> ControllerSection {
    ControllerSection { mode, ka, kv, kp, hw, r: 1, vehicles: Vec::new() }
}

pub const PRESETS: [&str; 5] =
    ["paper-cacc-0.7", "paper-cacc-0.6", "paper-acc-1.2", "paper-acc-0.9", "paper-caccplus-r3"];

pub fn preset(name: &str) -> Result<ScenarioFile, ScenarioError> {
    let controller = match name {
        "paper-cacc-0.7" => single(Mode::Cacc, 0.5, 0.7, 0.06, 0.7),
        "paper-cacc-0.6" => single(Mode::Cacc, 0.5, 0.7, 0.06, 0.6),
        "paper-acc-1.2" => single(Mode::Acc, 0.0, 0.8, 0.1, 1.2),
        "paper-acc-0.9" => single(Mode::Acc, 0.0, 0.8, 0.1, 0.9),
        "paper-caccplus-r3" => {
            let entry = |ka, kv, kp, hw, r, count| VehicleEntry { ka, kv, kp, hw, r, count };
            ControllerSection {
                mode: Mode::CaccPlus,
                ka: 0.2,
                kv: 0.206,
                kp: 0.01,
                hw: 0.32,
                r: 3,
                vehicles: vec![
                    entry(0.5, 0.7, 0.06, 0.7, 1, 1),
                    entry(0.2, 0.4, 0.02, 0.5, 2, 1),
                    entry(0.2, 0.206, 0.01, 0.32, 3, 8),
                ],
            }
        }
        _ => return Err(ScenarioError::UnknownPreset(name.into(), PRESETS.join(", "))),
    };
    Ok(experiment(controller))
}
