use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Z₀ is undefined because the shunt admittance per km vanishes (DC with G′ = 0).
    #[error("shunt admittance is zero; characteristic impedance undefined at {hertz} Hz")]
    DivisionByZeroAdmittance { hertz: f64 },

    #[error("singular system: {0}")]
    SingularSystem(&'static str),

    #[error("series resistance is zero at DC; branch conductance is unbounded")]
    ZeroResistanceAtDc,

    #[error("inductive shunt has unbounded susceptance at DC")]
    InductiveShuntAtDc,

    #[error("frequency mismatch: expected {expected} Hz, got {actual} Hz")]
    FrequencyMismatch { expected: f64, actual: f64 },

    #[error("operation requires f > 0; use the DC path at 0 Hz")]
    DcNotSupported,

    #[error("invalid operating point: {0}")]
    InvalidOperatingPoint(String),

    #[error("no feasible operating point at {hertz} Hz")]
    Infeasible { hertz: f64 },

    #[error("feasible region is empty at {hertz} Hz")]
    EmptyRegion { hertz: f64 },
}

impl Error {
    /// Stable variant name, used for diagnostics on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::DivisionByZeroAdmittance { .. } => "DivisionByZeroAdmittance",
            Error::SingularSystem(_) => "SingularSystem",
            Error::ZeroResistanceAtDc => "ZeroResistanceAtDc",
            Error::InductiveShuntAtDc => "InductiveShuntAtDc",
            Error::FrequencyMismatch { .. } => "FrequencyMismatch",
            Error::DcNotSupported => "DcNotSupported",
            Error::InvalidOperatingPoint(_) => "InvalidOperatingPoint",
            Error::Infeasible { .. } => "Infeasible",
            Error::EmptyRegion { .. } => "EmptyRegion",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
