//! JSON report bundles.

use std::time::{SystemTime, UNIX_EPOCH};

use platoon_core::{
    certify_internal, gain_region, min_headway, region_contains, robust_sweep, simulate,
    sufficient_condition, AmplificationReport, Certification, GainRegion, InterlacingReport, Mode,
    SufficientCondition, SweepReport,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{OutputError, ScenarioError};
use crate::scenario::ParsedScenario;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub toolkit: &'static str,
    pub version: &'static str,
    /// SHA-256 of the canonical TOML form of the scenario.
    pub scenario_sha256: String,
    /// Seconds since the Unix epoch, or `SOURCE_DATE_EPOCH` when set.
    pub generated_at: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeadwayBounds {
    pub acc: f64,
    pub cacc: Option<f64>,
    pub cacc_plus: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesisSection {
    pub mode: Mode,
    pub min_headway: f64,
    pub bounds: HeadwayBounds,
    pub region: GainRegion,
    pub gains_in_region: bool,
    pub sufficient_condition: SufficientCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    pub synthesis: bool,
    pub string_stability: bool,
    pub internal_stability: bool,
    pub simulation: bool,
    pub all: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportBundle {
    pub provenance: Provenance,
    pub synthesis: SynthesisSection,
    pub string_stability: SweepReport,
    pub internal_stability: InterlacingReport,
    pub simulation: AmplificationReport,
    pub verdicts: Verdicts,
}

pub fn scenario_hash(scenario: &ParsedScenario) -> Result<String, ScenarioError> {
    let text = scenario.file.to_toml()?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn timestamp() -> u64 {
    if let Some(epoch) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return epoch;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Minimum headways of all three families at the design `k_a`, `r`, `tau0`
/// wherever they are defined.
pub fn headway_bounds(ka: f64, r: u32, tau0: f64) -> Result<HeadwayBounds, platoon_core::Error> {
    Ok(HeadwayBounds {
        acc: min_headway(Mode::Acc, 0.0, 1, tau0)?,
        cacc: (ka < 1.0).then(|| min_headway(Mode::Cacc, ka, 1, tau0)).transpose()?,
        cacc_plus: (r >= 2 && ka < 1.0 / r as f64)
            .then(|| min_headway(Mode::CaccPlus, ka, r, tau0))
            .transpose()?,
    })
}

pub fn synthesis_section(scenario: &ParsedScenario) -> Result<SynthesisSection, platoon_core::Error> {
    let g = scenario.design;
    let region = gain_region(&g)?;
    Ok(SynthesisSection {
        mode: g.mode(),
        min_headway: min_headway(g.mode(), g.ka, g.r, g.tau0)?,
        bounds: headway_bounds(g.ka, g.r, g.tau0)?,
        gains_in_region: region.feasible && region_contains(&region, g.kv, g.kp),
        region,
        sufficient_condition: sufficient_condition(&g),
    })
}

pub fn full_report(scenario: &ParsedScenario) -> Result<ReportBundle, OutputError> {
    let g = scenario.design;
    let synthesis = synthesis_section(scenario)?;
    let string_stability = robust_sweep(&g, &scenario.grid)?;
    let internal_stability = certify_internal(&g, scenario.platoon.tau, scenario.l_max)?;
    let simulation = simulate(&scenario.platoon)?.summary;
    let synthesis_ok = synthesis.gains_in_region && synthesis.sufficient_condition.holds;
    let internal_ok = internal_stability.certification == Certification::Stable;
    let verdicts = Verdicts {
        synthesis: synthesis_ok,
        string_stability: string_stability.passed,
        internal_stability: internal_ok,
        simulation: simulation.passed,
        all: synthesis_ok && string_stability.passed && internal_ok && simulation.passed,
    };
    let provenance = Provenance {
        toolkit: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario_sha256: scenario_hash(scenario)?,
        generated_at: timestamp(),
    };
    Ok(ReportBundle {
        provenance,
        synthesis,
        string_stability,
        internal_stability,
        simulation,
        verdicts,
    })
}
