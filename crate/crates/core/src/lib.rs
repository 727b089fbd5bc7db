//! Delay-robust platoon control: minimum time headways, admissible gain
//! regions, string- and internal-stability certificates, and a fixed-step
//! simulator for platoons whose actuators act after a pure delay.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line front end live in the companion `platoon` crate.
//!
//! Three controller families share one parameterization, [`ControllerGains`]:
//!
//! * ACC: `r = 1`, `k_a = 0`
//! * CACC: `r = 1`, `k_a > 0`
//! * CACC+: `r >= 2` predecessors, identical gains per predecessor
//!
//! CACC+ analysis is reduced to the single-predecessor case through
//! [`EffectiveGains`].
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod gains;
pub mod internal_stability;
pub mod sim;
pub mod string_stability;
pub mod synthesis;

pub use error::{Error, Result};
pub use gains::{ka_upper_bound, ControllerGains, EffectiveGains, Mode};
pub use internal_stability::{
    bound_checks, certify_internal, condition_b, find_roots_imag, find_roots_real,
    interlacing_check, quasipoly_parts, root_count_window, Certification, InterlacingReport,
    QuasiPolyParams, RootList,
};
pub use sim::{
    amplification_metrics, simulate, AmplificationReport, DynamicsVariant, LeadProfile,
    PlatoonScenario, SimulationTrace, VerdictKind,
};
pub use string_stability::{
    counterexample_frequency, h_magnitude_sq, ka_necessity_check, robust_sweep,
    sufficient_condition, sweep_surface, FrequencyGrid, Spacing, SufficientCondition,
    SurfacePoint, SweepReport,
};
pub use synthesis::{
    gain_region, min_headway, region_contains, sample_feasible_gains, to_effective, GainRegion,
};
