use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("contour needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("contour encloses zero area")]
    ZeroArea,
    #[error("circles of radius {radius} around points {distance} apart do not intersect")]
    NoIntersection { distance: f64, radius: f64 },
    #[error("global descriptor A vanishes at point {0}")]
    DegenerateDescriptor(usize),
    #[error("no interesting points to evaluate")]
    EmptyIpSet,
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
