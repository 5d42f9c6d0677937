use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("phase value {target} outside attainable range ({lo}, {hi})")]
    PhaseRange { target: f64, lo: f64, hi: f64 },

    #[error("interval of phase radius {radius} around {center} is unbounded on the {side} side")]
    UnboundedInterval {
        center: f64,
        radius: f64,
        side: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },

    #[error("radius {r} exceeds the phase measure {available} of the window")]
    RadiusTooLarge { r: f64, available: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("gram matrix is numerically singular (smallest eigenvalue {eig_min:e})")]
    IllPosedWindow { eig_min: f64 },

    #[error("quadrature grid too coarse: step {step} exceeds {limit}")]
    GridTooCoarse { step: f64, limit: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("moment {order} has magnitude {value:e}; rescale the problem")]
    MomentOverflow { order: usize, value: f64 },

    #[error("density margin violated: {0}")]
    DensityMargin(String),

    #[error("padding impossible without breaking separation: {0}")]
    PaddingImpossible(String),

    #[error("window too small: {blocks} block(s), need at least 3")]
    WindowTooSmall { blocks: usize },

    #[error("not enough nodes: requested {requested}, available {available}")]
    NotEnoughNodes { requested: usize, available: usize },

    #[error("ill-conditioned plan: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;
