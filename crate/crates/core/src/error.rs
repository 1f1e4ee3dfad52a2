use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("particles {i} and {j} are too close: r = {distance:e} is below the floor {floor:e}")]
    Collision {
        i: usize,
        j: usize,
        distance: f64,
        floor: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid pair profile: {0}")]
    InvalidProfile(String),

    #[error("unsupported particle count {0}")]
    UnsupportedParticleCount(usize),

    #[error("side {side} = {length} violates the strict triangle inequality with the other sides {others:?}")]
    TriangleInequality {
        side: &'static str,
        length: f64,
        others: [f64; 2],
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what}: Jacobian is rank deficient beyond the gauged directions")]
    RankDeficient { what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency index j0 = {j0} is not admissible (admissible: {admissible:?})")]
    Inadmissible { j0: usize, admissible: Vec<usize> },

    #[error("no resonance-free window around 1/beta_{j0} with eps above {floor:e}")]
    ResonanceCrowding { j0: usize, floor: f64 },

    #[error("lambda = {lambda} is resonant with mode {k} (k^2 - lambda^2 mu = {gap:e})")]
    DegenerateMode { k: usize, lambda: f64, gap: f64 },

    #[error("truncation n0 = {n0} has non-positive margin {margin:e}; shrink the window")]
    TruncationMargin { n0: usize, margin: f64 },

    #[error("integer overflow in Euler ring arithmetic")]
    Overflow,

    #[error("vector field vanishes on the loop near t = {t} (|F| = {norm:e})")]
    VanishingField { t: f64, norm: f64 },

    #[error("insufficient angular resolution after {refinements} refinements")]
    AngularResolution { refinements: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
