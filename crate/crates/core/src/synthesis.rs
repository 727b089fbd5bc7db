//! Minimum employable headways and admissible `(k_v, k_p)` regions.
//!
//! For a single predecessor the admissible set is the intersection of two
//! half-planes in the positive quadrant,
//!
//! ```text
//! S1: k_v/a1 + k_p/b1 <= 1,   a1 = (1 - k_a^2)/(2 tau0),  b1 = a1/h_w
//! S2: k_v/a2 + k_p/b2 >= 1,   a2 = (1 - k_a)/h_w,         b2 = 2 a2/h_w
//! ```
//!
//! which is non-empty exactly when `a2 < a1`, i.e. `h_w > 2 tau0/(1 + k_a)`.
//! CACC+ uses the same construction on the r-scaled gains with right-hand
//! side `1/r`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gains::{ka_upper_bound, ControllerGains, EffectiveGains, Mode};

/// Rejected draws tolerated per accepted sample.
pub const SAMPLING_BUDGET: u64 = 1_000_000;

/// Exclusive lower bound on the time headway, in seconds.
pub fn min_headway(mode: Mode, ka: f64, r: u32, tau0: f64) -> Result<f64> {
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::Domain { rule: "tau0 > 0", value: tau0 });
    }
    if !(ka.is_finite() && ka >= 0.0) {
        return Err(Error::Domain { rule: "k_a >= 0", value: ka });
    }
    match mode {
        Mode::Acc => {
            if r != 1 {
                return Err(Error::Domain { rule: "ACC uses r = 1", value: r as f64 });
            }
            if ka != 0.0 {
                return Err(Error::Domain { rule: "ACC uses k_a = 0", value: ka });
            }
            Ok(2.0 * tau0)
        }
        Mode::Cacc => {
            if r != 1 {
                return Err(Error::Domain { rule: "CACC uses r = 1", value: r as f64 });
            }
            if ka >= 1.0 {
                return Err(Error::AccelGainBound { mode: "CACC", k_a: ka, bound: 1.0 });
            }
            Ok(2.0 * tau0 / (1.0 + ka))
        }
        Mode::CaccPlus => {
            if r < 2 {
                return Err(Error::Domain { rule: "CACC+ uses r >= 2", value: r as f64 });
            }
            let bound = ka_upper_bound(r);
            if ka >= bound {
                return Err(Error::AccelGainBound { mode: "CACC+", k_a: ka, bound });
            }
            let r = r as f64;
            Ok(4.0 * tau0 / ((1.0 + r) * (1.0 + r * ka)))
        }
    }
}

/// Half-plane pair describing the admissible `(k_v, k_p)` set.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GainRegion {
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    /// 1 for ACC/CACC, `1/r` for CACC+.
    pub rhs: f64,
    pub feasible: bool,
}

pub fn gain_region(g: &ControllerGains) -> Result<GainRegion> {
    g.validate()?;
    let bound = min_headway(g.mode(), g.ka, g.r, g.tau0)?;
    let feasible = g.hw > bound;
    let region = if g.r == 1 {
        let a1 = (1.0 - g.ka * g.ka) / (2.0 * g.tau0);
        let a2 = (1.0 - g.ka) / g.hw;
        GainRegion { a1, b1: a1 / g.hw, a2, b2: 2.0 * a2 / g.hw, rhs: 1.0, feasible }
    } else {
        let r = g.r as f64;
        let hw = (1.0 + r) / 2.0 * g.hw;
        let a1 = (1.0 - r * r * g.ka * g.ka) / (2.0 * g.tau0);
        let a2 = (1.0 - r * g.ka) / hw;
        GainRegion { a1, b1: a1 / hw, a2, b2: 2.0 * a2 / hw, rhs: 1.0 / r, feasible }
    };
    Ok(region)
}

/// Closed membership test on `S1 ∩ S2` with strict positivity.
pub fn region_contains(region: &GainRegion, kv: f64, kp: f64) -> bool {
    kv > 0.0
        && kp > 0.0
        && kv / region.a1 + kp / region.b1 <= region.rhs
        && kv / region.a2 + kp / region.b2 >= region.rhs
}

/// `n` members of `region`, drawn by rejection from the box
/// `[0, a1] x [0, max(b1, b2)]`. Deterministic in `seed`.
pub fn sample_feasible_gains(region: &GainRegion, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if !region.feasible {
        return Err(Error::InfeasibleRegion);
    }
    if n == 0 {
        return Err(Error::Domain { rule: "n >= 1", value: 0.0 });
    }
    let kv_max = region.a1;
    let kp_max = region.b1.max(region.b2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut attempts = 0u64;
        loop {
            if attempts == SAMPLING_BUDGET {
                return Err(Error::SamplingBudget { attempts });
            }
            attempts += 1;
            let kv = rng.gen::<f64>() * kv_max;
            let kp = rng.gen::<f64>() * kp_max;
            if region_contains(region, kv, kp) {
                out.push((kv, kp));
                break;
            }
        }
    }
    Ok(out)
}

pub fn to_effective(g: &ControllerGains) -> EffectiveGains {
    g.effective()
}
