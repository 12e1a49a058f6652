use thiserror::Error;

/// Errors produced by model construction, solvers and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit frequency formula is degenerate at this flux (E_J = 0)")]
    DegenerateQubit,

    #[error("dispersive formulas are undefined at zero detuning")]
    ZeroDetuning,

    #[error("negative dissipation rate: {0}")]
    NegativeRate(f64),

    #[error("transmission is undefined for a zero probe strength")]
    UndefinedTransmission,

    #[error("steady state is not unique (singular system after trace constraint)")]
    NonUniqueSteadyState,

    #[error("steady-state solve did not converge: relative residual {residual:.3e}")]
    Convergence { residual: f64 },

    #[error("secular population tail did not converge below the truncation threshold")]
    NonConvergentTail,

    #[error("solver failed at probe frequency {probe_mhz} MHz: {source}")]
    AtGridPoint {
        probe_mhz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("solver failed at flux {flux_phi0} Phi0, probe {probe_mhz} MHz: {source}")]
    AtMapPoint {
        flux_phi0: f64,
        probe_mhz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Wraps a solver error with the probe-grid coordinate it occurred at.
    pub fn at_probe(self, probe_mhz: f64) -> Self {
        Error::AtGridPoint {
            probe_mhz,
            source: Box::new(self),
        }
    }

    /// Wraps a solver error with the (flux, probe) map coordinate.
    pub fn at_map(self, flux_phi0: f64, probe_mhz: f64) -> Self {
        let (probe_mhz, inner) = match self {
            Error::AtGridPoint { probe_mhz, source } => (probe_mhz, *source),
            other => (probe_mhz, other),
        };
        Error::AtMapPoint {
            flux_phi0,
            probe_mhz,
            source: Box::new(inner),
        }
    }
}
