use std::path::PathBuf;

/// Errors raised across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} = {value} out of range [{min}, {max}]")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("port transmission {value:.4} lies between thresholds ({t_lo}, {t_hi})")]
    Indeterminate { value: f64, t_lo: f64, t_hi: f64 },
    #[error("accumulator saturated after {gamma} intervals")]
    Saturated { gamma: u64 },
    #[error("accumulator busy: other capacitor still discharging ({remaining} intervals left)")]
    Busy { remaining: u64 },
    #[error("step size {dt} ps outside (0, {max}] ps")]
    StepSize { dt: f64, max: f64 },
    #[error("detected signal is below the noise floor")]
    Sensitivity,
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("mapping error: {0}")]
    Mapping(String),
    #[error("layer `{layer}` needs {intervals} accumulation intervals, capacity is {gamma}")]
    Capacity {
        layer: String,
        intervals: u64,
        gamma: u64,
    },
    #[error("reservoir state diverged at step {step}")]
    Stability { step: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("{path}:{line}: {msg}")]
    Input {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures caused by the physics or capacity limits of a
    /// well-formed request, as opposed to malformed input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Saturated { .. }
                | Error::Busy { .. }
                | Error::Sensitivity
                | Error::Infeasible(_)
                | Error::Capacity { .. }
                | Error::Stability { .. }
                | Error::Indeterminate { .. }
        )
    }

    pub(crate) fn range(what: &'static str, value: f64, min: f64, max: f64) -> Self {
        Error::Range {
            what,
            value,
            min,
            max,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
