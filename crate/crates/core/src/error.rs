use thiserror::Error;

/// Failures raised by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("degenerate direction: cannot normalize a zero vector")]
    DegenerateDirection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("improper body: {0}")]
    ImproperBody(String),
    #[error("empty interior: {0}")]
    EmptyInterior(String),
    #[error("degenerate lune: hemisphere centers are equal or antipodal")]
    DegenerateLune,
    #[error("degenerate geodesic: endpoints are equal or antipodal")]
    DegenerateGeodesic,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point is not on the boundary (slack {0:e})")]
    NotOnBoundary(f64),
    #[error("point is not strictly interior (slack {0:e})")]
    NotInterior(f64),
    #[error("hemisphere does not support the body (slack {0:e})")]
    NotSupporting(f64),
    #[error("equator singularity: last coordinate {0:e} is not positive")]
    EquatorSingularity(f64),
    #[error("unbounded Wulff shape: directions do not positively span")]
    UnboundedWulff,
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

impl GeomError {
    /// True for errors that come from a violated geometric precondition
    /// rather than malformed input.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self,
            GeomError::ImproperBody(_)
                | GeomError::EmptyInterior(_)
                | GeomError::DegenerateLune
                | GeomError::DegenerateGeodesic
                | GeomError::NotOnBoundary(_)
                | GeomError::NotInterior(_)
                | GeomError::NotSupporting(_)
                | GeomError::EquatorSingularity(_)
                | GeomError::UnboundedWulff
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
