use thiserror::Error;

/// Failures raised by curve construction and the verification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("curve is not convex: radius of curvature {radius:.3e} at parameter {param:.6}")]
    NonConvex { param: f64, radius: f64 },
    #[error("need at least {min} samples, got {got}")]
    DegenerateSampling { got: usize, min: usize },
    #[error("profile is constant within tolerance: the mean is attained everywhere")]
    DegenerateProfile,
    #[error("samples are not uniformly spaced (max spacing deviation {0:.3e})")]
    NonUniformGrid(f64),
    #[error("need at least {need} samples to resolve harmonic {n_max}, got {got}")]
    TooFewSamples {
        n_max: usize,
        need: usize,
        got: usize,
    },
    #[error("every sample lies within the tolerance band around zero")]
    AllBelowTolerance,
    #[error("sample {index} sits on a cusp of the front (1 + t k = {factor:.3e})")]
    AtCusp { index: usize, factor: f64 },
    #[error("inner curve is not strictly inside the outer loop (sample {0})")]
    NotContained(usize),
    #[error("samples are not arc-length parametrized: |speed - 1| = {0:.3e}")]
    BadParametrization(f64),
    #[error("curve does not lie in an open hemisphere")]
    NotInHemisphere,
    #[error("curve does not bisect the sphere: area {0:.9} vs 2*pi")]
    NotBisecting(f64),
    #[error("Frenet frame breaks down: space curvature {0:.3e} at a sample")]
    FrenetBreakdown(f64),
    #[error("curve is not horocyclically convex: min curvature {min_k:.6} <= 1")]
    NotHorocyclicallyConvex { min_k: f64 },
    #[error("(2*pi + A)/L = {0:.9} is not above 1; collapse time undefined")]
    CothDomain(f64),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("point {index} is off the model surface by {residual:.3e}")]
    OffManifold { index: usize, residual: f64 },
    #[error("area estimates disagree: Gauss-Bonnet {gauss_bonnet:.9} vs shoelace {shoelace:.9}")]
    AreaMismatch { gauss_bonnet: f64, shoelace: f64 },
    #[error("curve is not closed or not positively oriented: {0}")]
    BadCurve(String),
    #[error("root finding failed: {0}")]
    NoConvergence(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
