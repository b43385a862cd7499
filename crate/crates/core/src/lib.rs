//! Closed convex curves in the Euclidean plane, on the unit sphere and in
//! the hyperbolic plane: equidistant fronts, where the average curvature is
//! attained, and the Fourier (Sturm-Hurwitz) side of the same question.

pub mod curve_model;
pub mod error;
pub mod hyperbolic;
pub mod io;
pub mod numerics;
pub mod population;
pub mod sphere;
pub mod sturm_hurwitz;
pub mod surface;
pub mod wavefront;

pub use curve_model::{
    average_curvature, build_oval, closure_residual, count_mean_crossings, CurvatureProfile,
    Geometry, MeanAttainment, SampledCurve, SupportFunction, SupportOval, Vec3,
};
pub use error::{GeomError, Result};
