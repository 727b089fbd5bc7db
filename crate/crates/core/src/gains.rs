use crate::error::{Error, Result};

/// Controller family, implied by the look-ahead depth `r` and `k_a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mode {
    Acc,
    Cacc,
    CaccPlus,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Acc => "ACC",
            Mode::Cacc => "CACC",
            Mode::CaccPlus => "CACC+",
        }
    }
}

/// Exclusive upper bound on `k_a` for look-ahead depth `r` (`1/r`).
pub fn ka_upper_bound(r: u32) -> f64 {
    1.0 / r as f64
}

/// Gains of one follower's control law together with the delay bound it is
/// designed for.
///
/// `u_i = sum_{j=1..r} [k_a a_{i-j} - k_v (v_i - v_{i-j}) - k_p (x_i - x_{i-j} + j d + j h_w v_i)]`
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControllerGains {
    /// Feed-forward gain on communicated accelerations (dimensionless).
    pub ka: f64,
    /// Relative-velocity gain, 1/s.
    pub kv: f64,
    /// Spacing-error gain, 1/s^2.
    pub kp: f64,
    /// Time headway, s.
    pub hw: f64,
    /// Number of predecessors used.
    pub r: u32,
    /// Upper bound on the actuation delay, s.
    pub tau0: f64,
}

impl ControllerGains {
    pub fn new(ka: f64, kv: f64, kp: f64, hw: f64, r: u32, tau0: f64) -> Result<Self> {
        let g = ControllerGains { ka, kv, kp, hw, r, tau0 };
        g.validate()?;
        Ok(g)
    }

    pub fn mode(&self) -> Mode {
        if self.r >= 2 {
            Mode::CaccPlus
        } else if self.ka == 0.0 {
            Mode::Acc
        } else {
            Mode::Cacc
        }
    }

    /// `gamma = k_v + h_w k_p`.
    pub fn gamma(&self) -> f64 {
        self.kv + self.hw * self.kp
    }

    /// Positivity and finiteness of every field; does not bound `k_a` from
    /// above, so `k_a = 1` style probes stay representable.
    pub fn check_positive(&self) -> Result<()> {
        let positive = [
            ("k_v > 0", self.kv),
            ("k_p > 0", self.kp),
            ("h_w > 0", self.hw),
            ("tau0 > 0", self.tau0),
        ];
        for (rule, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain { rule, value });
            }
        }
        if !(self.ka.is_finite() && self.ka >= 0.0) {
            return Err(Error::Domain { rule: "k_a >= 0", value: self.ka });
        }
        if self.r == 0 {
            return Err(Error::Domain { rule: "r >= 1", value: 0.0 });
        }
        Ok(())
    }

    /// Full type invariants, including `k_a < 1/r`.
    pub fn validate(&self) -> Result<()> {
        self.check_positive()?;
        let bound = ka_upper_bound(self.r);
        if self.ka >= bound {
            return Err(Error::AccelGainBound { mode: self.mode().name(), k_a: self.ka, bound });
        }
        Ok(())
    }

    /// r-scaled gains reducing the CACC+ analysis to the single-predecessor
    /// form. The identity for `r = 1`.
    pub fn effective(&self) -> EffectiveGains {
        if self.r == 1 {
            return EffectiveGains { ka: self.ka, kv: self.kv, kp: self.kp, hw: self.hw };
        }
        let r = self.r as f64;
        EffectiveGains {
            ka: r * self.ka,
            kv: r * self.kv,
            kp: r * self.kp,
            hw: (1.0 + r) / 2.0 * self.hw,
        }
    }
}

/// Tilde gains `(r k_a, r k_v, r k_p, (1+r)/2 h_w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffectiveGains {
    pub ka: f64,
    pub kv: f64,
    pub kp: f64,
    pub hw: f64,
}

impl EffectiveGains {
    pub fn gamma(&self) -> f64 {
        self.kv + self.hw * self.kp
    }

    /// The single-predecessor controller with these gains.
    pub fn as_single_lookahead(&self, tau0: f64) -> ControllerGains {
        ControllerGains { ka: self.ka, kv: self.kv, kp: self.kp, hw: self.hw, r: 1, tau0 }
    }
}
