use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::sin;

use crate::error::{Error, Result};

/// Acceleration of the lead vehicle as a function of time.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "profile", rename_all = "kebab-case"))]
pub enum LeadProfile {
    Zero,
    Constant { value: f64 },
    /// `amplitude * sin(angular_frequency * (t - start))` on the open window
    /// `(start, end)`, zero elsewhere.
    Sine { amplitude: f64, angular_frequency: f64, start: f64, end: f64 },
    /// `(t_from, value)` pairs sorted by time; zero before the first one.
    PiecewiseConstant { steps: Vec<(f64, f64)> },
}

impl LeadProfile {
    /// `0.5 sin(0.1 pi (t - 10))` for `t in (10, 30)` s.
    pub fn paper_sine() -> Self {
        LeadProfile::Sine { amplitude: 0.5, angular_frequency: 0.1 * PI, start: 10.0, end: 30.0 }
    }

    /// Parameterless profiles by name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "paper-sine" => Ok(Self::paper_sine()),
            "zero" | "none" => Ok(LeadProfile::Zero),
            _ => Err(Error::UnknownProfile),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LeadProfile::Zero => Ok(()),
            LeadProfile::Constant { value } if value.is_finite() => Ok(()),
            LeadProfile::Constant { .. } => Err(Error::Config("lead constant must be finite")),
            LeadProfile::Sine { amplitude, angular_frequency, start, end } => {
                if [amplitude, angular_frequency, start, end].iter().all(|v| v.is_finite())
                    && start < end
                {
                    Ok(())
                } else {
                    Err(Error::Config("lead sine needs finite parameters and start < end"))
                }
            }
            LeadProfile::PiecewiseConstant { steps } => {
                let finite = steps.iter().all(|(t, v)| t.is_finite() && v.is_finite());
                let sorted = steps.windows(2).all(|w| w[0].0 < w[1].0);
                if finite && sorted {
                    Ok(())
                } else {
                    Err(Error::Config("piecewise lead steps must be finite and strictly increasing in time"))
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LeadProfile::Zero => 0.0,
            LeadProfile::Constant { value } => *value,
            LeadProfile::Sine { amplitude, angular_frequency, start, end } => {
                if t > *start && t < *end {
                    amplitude * sin(angular_frequency * (t - start))
                } else {
                    0.0
                }
            }
            LeadProfile::PiecewiseConstant { steps } => steps
                .iter()
                .take_while(|(from, _)| *from <= t)
                .last()
                .map_or(0.0, |&(_, v)| v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_sine_values() {
        let p = LeadProfile::from_name("paper-sine").unwrap();
        assert_eq!(p.eval(5.0), 0.0);
        assert!((p.eval(15.0) - 0.5).abs() < 1e-15);
        assert_eq!(p.eval(30.01), 0.0);
        assert_eq!(p.eval(10.0), 0.0);
        assert_eq!(p.eval(30.0), 0.0);
    }

    #[test]
    fn unknown_name() {
        assert_eq!(LeadProfile::from_name("square"), Err(Error::UnknownProfile));
    }

    #[test]
    fn piecewise() {
        let p = LeadProfile::PiecewiseConstant { steps: alloc::vec![(1.0, 0.5), (2.0, -0.5), (3.0, 0.0)] };
        assert!(p.validate().is_ok());
        assert_eq!(p.eval(0.5), 0.0);
        assert_eq!(p.eval(1.0), 0.5);
        assert_eq!(p.eval(2.5), -0.5);
        assert_eq!(p.eval(10.0), 0.0);
        let bad = LeadProfile::PiecewiseConstant { steps: alloc::vec![(2.0, 0.5), (1.0, 0.0)] };
        assert!(bad.validate().is_err());
    }
}
