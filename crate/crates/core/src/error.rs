use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A signal needs at least two samples.
    TooFewSamples(usize),
    /// Grid spacing must be finite and strictly positive.
    InvalidStep(f64),
    NonFiniteValue { index: usize },
    /// Two signals were combined that do not live on the same grid.
    GridMismatch,
    /// A shift radius, kernel parameter or similar was not strictly positive.
    NonPositive { name: &'static str, value: f64 },
    InvalidParameter(&'static str),
    /// Rejection sampling gave up.
    Infeasible { attempts: usize },
    /// Persistence pair with birth after death.
    MalformedPoint { birth: f64, death: f64 },
    /// Brute-force matching was asked to enumerate too many points.
    TooLarge { points: usize, cap: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewSamples(n) => write!(f, "signal needs at least 2 samples, got {n}"),
            Error::InvalidStep(s) => write!(f, "grid step must be finite and > 0, got {s}"),
            Error::NonFiniteValue { index } => write!(f, "non-finite sample at index {index}"),
            Error::GridMismatch => f.write_str("signals are not defined on the same grid"),
            Error::NonPositive { name, value } => write!(f, "{name} must be > 0, got {value}"),
            Error::InvalidParameter(msg) => f.write_str(msg),
            Error::Infeasible { attempts } => {
                write!(f, "no admissible sample after {attempts} attempts")
            }
            Error::MalformedPoint { birth, death } => {
                write!(f, "malformed diagram point: birth {birth} > death {death}")
            }
            Error::TooLarge { points, cap } => {
                write!(f, "{points} points exceed the enumeration cap of {cap}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
