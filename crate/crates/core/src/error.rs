use thiserror::Error;

use crate::domain::Mode;

/// Errors raised by the modal, trace, sensing and observer layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid domain: sides must be positive and finite (a1 = {a1}, a2 = {a2})")]
    InvalidDomain { a1: f64, a2: f64 },

    #[error("mode ({}, {}) is not admissible for the {family} family", .mode.n, .mode.m)]
    InvalidMode { mode: Mode, family: &'static str },

    #[error("mode ({}, {}) is not part of the basis", .0.n, .0.m)]
    ModeNotInBasis(Mode),

    #[error("truncation bounds must be positive (n_max = {n_max}, m_max = {m_max})")]
    InvalidTruncation { n_max: usize, m_max: usize },

    #[error("point ({x}, {y}) lies outside the closed rectangle")]
    PointOutsideDomain { x: f64, y: f64 },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("quadrature with {nodes} nodes per axis is below the minimum {minimum} for this truncation")]
    QuadratureTooCoarse { nodes: usize, minimum: usize },

    #[error("quadrature order must be positive")]
    EmptyQuadrature,

    #[error("invalid boundary segment: {0}")]
    InvalidSegment(String),

    #[error("boundary region must contain at least one segment")]
    EmptyRegion,

    #[error("boundary segments overlap on side {0}")]
    OverlappingSegments(&'static str),

    #[error("objects refer to different domains or bases")]
    DomainMismatch,

    #[error("invalid sensor: {0}")]
    InvalidSensor(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested {requested} eigenvalue groups but only {available} are available")]
    TooFewGroups { requested: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no eigenvalue groups supplied")]
    EmptyGroups,

    #[error("margin must be positive, got {0}")]
    InvalidMargin(f64),

    #[error("not detectable at this margin: rank-deficient eigenvalue groups {}", format_groups(.groups))]
    NotDetectable { groups: Vec<(f64, Vec<Mode>)> },

    #[error("estimator combiner violates M*C + N = I (max deviation {0:e})")]
    InvalidCombiner(f64),

    #[error("closed-loop spectrum check failed: max real part {max_real} exceeds {bound}")]
    SpectrumCheckFailed { max_real: f64, bound: f64 },

    #[error("decay fit needs at least {needed} tail samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

fn format_groups(groups: &[(f64, Vec<Mode>)]) -> String {
    groups
        .iter()
        .map(|(lam, modes)| {
            let modes: Vec<String> = modes.iter().map(|m| format!("({}, {})", m.n, m.m)).collect();
            format!("{{{}}} at eigenvalue {lam:.6}", modes.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
