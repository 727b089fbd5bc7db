use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A gain, headway or delay outside its admissible domain.
    Domain { rule: &'static str, value: f64 },
    /// `k_a` at or above the necessity bound of its mode.
    AccelGainBound { mode: &'static str, k_a: f64, bound: f64 },
    /// A region with `a2 >= a1` was asked for samples.
    InfeasibleRegion,
    /// Rejection sampling exhausted its attempt budget.
    SamplingBudget { attempts: u64 },
    /// `|D(jw)|` vanished: a characteristic root sits on the imaginary axis.
    JwAxisRoot { omega: f64, tau: f64 },
    /// A root bracket lacks the sign change its analytic argument requires.
    BracketSign { part: &'static str, lo: f64, hi: f64 },
    /// A polished root failed the residual or bracket check.
    RootResidual { part: &'static str, theta: f64, residual: f64 },
    /// Invalid simulation or verification setup.
    Config(&'static str),
    UnknownProfile,
    /// The control history does not reach back far enough.
    HistoryUnderrun { step: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { rule, value } => write!(f, "domain error: {rule} (got {value})"),
            Error::AccelGainBound { mode, k_a, bound } => write!(
                f,
                "{mode} requires k_a < {bound} for robust string stability (got k_a = {k_a})"
            ),
            Error::InfeasibleRegion => f.write_str("gain region is empty (headway at or below its bound)"),
            Error::SamplingBudget { attempts } => {
                write!(f, "rejection sampling gave up after {attempts} attempts")
            }
            Error::JwAxisRoot { omega, tau } => write!(
                f,
                "characteristic root on the imaginary axis at omega = {omega}, tau = {tau}"
            ),
            Error::BracketSign { part, lo, hi } => write!(
                f,
                "{part}: no sign change on bracket ({lo}, {hi}); parameters outside the certified regime"
            ),
            Error::RootResidual { part, theta, residual } => {
                write!(f, "{part}: root {theta} has residual {residual}")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::UnknownProfile => f.write_str("unknown lead acceleration profile"),
            Error::HistoryUnderrun { step } => {
                write!(f, "control history underrun at step {step}")
            }
        }
    }
}

impl core::error::Error for Error {}
