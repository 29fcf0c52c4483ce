//! Simulated minimum-distance readings of a spherical object.
//!
//! Each sensor casts a fan of rays through its cone: the axis, eight rays
//! on the cone boundary and eight at half the cone angle. A sensor reports
//! the nearest hit along any of its rays; a configuration reports the
//! nearest reading over all sensors. The reference distance is the gap
//! between the object surface and the robot's pose curve.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use thiserror::Error;

use crate::geom::{PiecewiseBezierCurve, Vec3};
use crate::math;
use crate::sensors::{PlacedSensor, SensorSpec};

/// Rays per ring of the fan (boundary ring and half-angle ring).
pub const FAN_RING_RAYS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("object radius must be positive, got {0}")]
    ObjectRadius(f64),
    #[error("probe trajectory is empty")]
    EmptyTrajectory,
}

/// Distance along a unit ray to the first point of a sphere, if within
/// `max_range`. Rays starting inside the sphere hit at 0.
pub fn ray_sphere_hit(origin: Vec3, dir: Vec3, center: Vec3, radius: f64, max_range: f64) -> Option<f64> {
    let oc = origin - center;
    let c = oc.norm_squared() - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = oc.dot(dir);
    let disc = b * b - c;
    if b >= 0.0 || disc < 0.0 {
        return None;
    }
    let t = -b - math::sqrt(disc);
    (t <= max_range).then_some(t)
}

/// Unit ray directions of one sensor's fan.
pub fn ray_fan(sensor: &PlacedSensor, half_angle: f64) -> Vec<Vec3> {
    let axis = sensor.axis();
    let (x, y) = (sensor.pose.axis(0), sensor.pose.axis(1));
    let mut rays = Vec::with_capacity(1 + 2 * FAN_RING_RAYS);
    rays.push(axis);
    for cone_angle in [half_angle, half_angle / 2.0] {
        let (s, c) = (math::sin(cone_angle), math::cos(cone_angle));
        for k in 0..FAN_RING_RAYS {
            let phi = TAU * k as f64 / FAN_RING_RAYS as f64;
            rays.push(axis * c + (x * math::cos(phi) + y * math::sin(phi)) * s);
        }
    }
    rays
}

/// Nearest reading of a sphere over all sensors, `None` if no ray reaches it.
pub fn measure_distance(sensors: &[PlacedSensor], spec: &SensorSpec, center: Vec3, radius: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for s in sensors {
        for dir in ray_fan(s, spec.half_angle()) {
            if let Some(t) = ray_sphere_hit(s.position(), dir, center, radius, spec.range()) {
                best = Some(best.map_or(t, |b| b.min(t)));
            }
        }
    }
    best
}

/// Gap between the sphere surface and the pose curve.
pub fn ground_truth_distance(curve: &PiecewiseBezierCurve, center: Vec3, radius: f64) -> f64 {
    curve.closest_point(center).distance - radius
}

/// Per-waypoint outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub ground_truth: f64,
    /// `None` when unseen.
    pub measured: Option<f64>,
}

impl ProbeSample {
    /// Reading with unseen objects clamped to the sensor range, as a real
    /// ToF sensor reports its maximum range when nothing returns.
    pub fn clamped(&self, range: f64) -> f64 {
        self.measured.unwrap_or(range)
    }
}

/// Error statistics of one configuration over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeStats {
    pub waypoints: usize,
    pub seen: usize,
    /// Root-mean-square of `measured − ground truth` over all waypoints,
    /// unseen ones clamped to the range. `None` if nothing was seen.
    pub rmse: Option<f64>,
    /// Largest absolute error under the same convention.
    pub max_error: Option<f64>,
    /// RMSE restricted to seen waypoints.
    pub rmse_seen: Option<f64>,
}

impl ProbeStats {
    pub fn seen_fraction(&self) -> f64 {
        if self.waypoints == 0 {
            0.0
        } else {
            self.seen as f64 / self.waypoints as f64
        }
    }
}

/// Runs the probe along `waypoints`.
pub fn run_probe(
    sensors: &[PlacedSensor],
    spec: &SensorSpec,
    curve: &PiecewiseBezierCurve,
    waypoints: &[Vec3],
    object_radius: f64,
) -> Result<(Vec<ProbeSample>, ProbeStats), ProbeError> {
    if !(object_radius > 0.0 && object_radius.is_finite()) {
        return Err(ProbeError::ObjectRadius(object_radius));
    }
    if waypoints.is_empty() {
        return Err(ProbeError::EmptyTrajectory);
    }
    let samples: Vec<ProbeSample> = waypoints
        .iter()
        .map(|&p| ProbeSample {
            ground_truth: ground_truth_distance(curve, p, object_radius),
            measured: measure_distance(sensors, spec, p, object_radius),
        })
        .collect();
    Ok((samples.clone(), summarize(&samples, spec.range())))
}

pub fn summarize(samples: &[ProbeSample], range: f64) -> ProbeStats {
    let seen = samples.iter().filter(|s| s.measured.is_some()).count();
    let rms = |errs: &mut dyn Iterator<Item = f64>| {
        let (sum, n) = errs.fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
        math::sqrt(sum / n as f64)
    };
    if seen == 0 {
        return ProbeStats { waypoints: samples.len(), seen, rmse: None, max_error: None, rmse_seen: None };
    }
    let all = || samples.iter().map(|s| s.clamped(range) - s.ground_truth);
    let seen_errs = || samples.iter().filter_map(|s| s.measured.map(|m| m - s.ground_truth));
    ProbeStats {
        waypoints: samples.len(),
        seen,
        rmse: Some(rms(&mut all())),
        max_error: Some(all().fold(0.0, |m, e| m.max(e.abs()))),
        rmse_seen: Some(rms(&mut seen_errs())),
    }
}
