//! Vectors, rigid transforms, pose curves and implicit solids.

mod curve;
mod solid;
mod transform;
mod vec3;

pub use curve::{ClosestPoint, FrenetFrame, PiecewiseBezierCurve, Segment};
pub use solid::{Aabb, BallClass, Cone, Region, Solid, Sphere, TubeShell};
pub use transform::RigidTransform;
pub use vec3::Vec3;

use thiserror::Error;

/// Default fraction of each incident segment consumed by a corner blend.
pub const DEFAULT_INTERPOLATION_FACTOR: f64 = 0.25;
/// Default number of chord subdivisions per curve segment.
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 64;
/// Corners whose direction change is below this angle stay straight.
pub const COLLINEAR_TOLERANCE_RAD: f64 = 0.5 * core::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("a curve needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("interpolation factor {0} outside (0, 0.5]")]
    InterpolationFactor(f64),
    #[error("samples per segment must be positive")]
    ZeroSamples,
    #[error("invalid cone: half angle {half_angle} rad, height {height} m")]
    Cone { half_angle: f64, height: f64 },
    #[error("sphere radius must be positive, got {0}")]
    SphereRadius(f64),
    #[error("tube shell radii must satisfy 0 <= inner < outer, got {inner}, {outer}")]
    TubeRadii { inner: f64, outer: f64 },
    #[error("axis vector has zero length")]
    ZeroAxis,
    #[error("union of no solids")]
    EmptyUnion,
}
