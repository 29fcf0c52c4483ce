//! Implicit solids defined by a point-membership predicate.
//!
//! Every solid can also bound its distance field from a query ball, which
//! lets the voxelizer settle whole octree nodes without sampling them.
//! Membership on the boundary is inclusive.

use alloc::vec::Vec;

use super::{GeomError, PiecewiseBezierCurve, RigidTransform, Vec3};
use crate::math;

/// Slack applied to distance bounds so rounding never flips a decision.
const BOUND_EPS: f64 = 1e-7;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn around(center: Vec3, half: f64) -> Self {
        let h = Vec3::new(half, half, half);
        Self::new(center - h, center + h)
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb::new(self.min.min(o.min), self.max.max(o.max))
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        self.contains_point(o.min) && self.contains_point(o.max)
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= o.max[i] && o.min[i] <= self.max[i])
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }
}

/// How a ball relates to a solid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallClass {
    /// Every point of the ball is inside.
    Inside,
    /// Every point of the ball is outside.
    Outside,
    /// Undecided; the ball may straddle the boundary.
    Mixed,
}

/// Point-membership region, the interface the voxelizer consumes.
pub trait Region {
    fn contains(&self, p: Vec3) -> bool;

    /// Conservative classification of the closed ball `(center, radius)`.
    /// `Inside`/`Outside` must be exact; `Mixed` is always allowed.
    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass;

    fn bounding_box(&self) -> Aabb;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    apex: Vec3,
    axis: Vec3,
    half_angle: f64,
    height: f64,
    tan_half: f64,
    sin_half: f64,
    cos_half: f64,
}

impl Cone {
    pub fn new(apex: Vec3, axis: Vec3, half_angle: f64, height: f64) -> Result<Self, GeomError> {
        let ok_angle = half_angle > 0.0 && half_angle < core::f64::consts::FRAC_PI_2;
        if !(ok_angle && height > 0.0 && height.is_finite()) {
            return Err(GeomError::Cone { half_angle, height });
        }
        if !apex.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let axis = axis.try_normalize().ok_or(GeomError::ZeroAxis)?;
        Ok(Self {
            apex,
            axis,
            half_angle,
            height,
            tan_half: math::tan(half_angle),
            sin_half: math::sin(half_angle),
            cos_half: math::cos(half_angle),
        })
    }

    pub fn apex(&self) -> Vec3 {
        self.apex
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn base_radius(&self) -> f64 {
        self.height * self.tan_half
    }

    /// `π r² h / 3`.
    pub fn analytic_volume(&self) -> f64 {
        let r = self.base_radius();
        core::f64::consts::PI * r * r * self.height / 3.0
    }

    /// Signed-distance bound: exact inside, a lower bound outside.
    fn distance_bound(&self, p: Vec3) -> f64 {
        let d = p - self.apex;
        let a = d.dot(self.axis);
        let rho = math::sqrt((d.norm_squared() - a * a).max(0.0));
        let along_surface = a * self.cos_half + rho * self.sin_half;
        let lateral = if along_surface < 0.0 {
            d.norm()
        } else {
            rho * self.cos_half - a * self.sin_half
        };
        lateral.max(a - self.height)
    }
}

impl Region for Cone {
    #[inline]
    fn contains(&self, p: Vec3) -> bool {
        let d = p - self.apex;
        let a = d.dot(self.axis);
        if a < 0.0 || a > self.height {
            return false;
        }
        let rho2 = (d.norm_squared() - a * a).max(0.0);
        let lim = a * self.tan_half;
        rho2 <= lim * lim
    }

    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass {
        let sd = self.distance_bound(center);
        if sd > radius + BOUND_EPS {
            BallClass::Outside
        } else if sd < -radius - BOUND_EPS {
            BallClass::Inside
        } else {
            BallClass::Mixed
        }
    }

    fn bounding_box(&self) -> Aabb {
        let base = self.apex + self.axis * self.height;
        let r = self.base_radius();
        let ext = Vec3::new(
            r * math::sqrt((1.0 - self.axis.x * self.axis.x).max(0.0)),
            r * math::sqrt((1.0 - self.axis.y * self.axis.y).max(0.0)),
            r * math::sqrt((1.0 - self.axis.z * self.axis.z).max(0.0)),
        );
        Aabb::new(self.apex.min(base - ext), self.apex.max(base + ext))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
}

impl Sphere {
    pub fn new(center: Vec3, radius: f64) -> Result<Self, GeomError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeomError::SphereRadius(radius));
        }
        if !center.is_finite() {
            return Err(GeomError::NonFinite);
        }
        Ok(Self { center, radius })
    }

    pub fn analytic_volume(&self) -> f64 {
        4.0 / 3.0 * core::f64::consts::PI * self.radius * self.radius * self.radius
    }
}

impl Region for Sphere {
    #[inline]
    fn contains(&self, p: Vec3) -> bool {
        (p - self.center).norm_squared() <= self.radius * self.radius
    }

    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass {
        let sd = center.distance(self.center) - self.radius;
        if sd > radius + BOUND_EPS {
            BallClass::Outside
        } else if sd < -radius - BOUND_EPS {
            BallClass::Inside
        } else {
            BallClass::Mixed
        }
    }

    fn bounding_box(&self) -> Aabb {
        Aabb::around(self.center, self.radius)
    }
}

/// Points whose distance to a curve lies in `[r_inner, r_outer]`, cut flat
/// at both curve ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeShell {
    curve: PiecewiseBezierCurve,
    r_inner: f64,
    r_outer: f64,
    start: Vec3,
    start_tangent: Vec3,
    end: Vec3,
    end_tangent: Vec3,
    end_param: f64,
}

impl TubeShell {
    pub fn new(curve: PiecewiseBezierCurve, r_inner: f64, r_outer: f64) -> Result<Self, GeomError> {
        if !(r_inner >= 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(GeomError::TubeRadii { inner: r_inner, outer: r_outer });
        }
        Ok(Self {
            start: curve.start(),
            start_tangent: curve.start_tangent(),
            end: curve.end(),
            end_tangent: curve.end_tangent(),
            end_param: curve.segment_count() as f64,
            curve,
            r_inner,
            r_outer,
        })
    }

    pub fn curve(&self) -> &PiecewiseBezierCurve {
        &self.curve
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    /// Distance from `p` to the centerline.
    pub fn distance_to_curve(&self, p: Vec3) -> f64 {
        self.curve.closest_point(p).distance
    }
}

impl Region for TubeShell {
    fn contains(&self, p: Vec3) -> bool {
        let cp = self.curve.closest_point(p);
        if cp.distance < self.r_inner || cp.distance > self.r_outer {
            return false;
        }
        if cp.param <= 1e-6 && (p - self.start).dot(self.start_tangent) < 0.0 {
            return false;
        }
        if cp.param >= self.end_param - 1e-6 && (p - self.end).dot(self.end_tangent) > 0.0 {
            return false;
        }
        true
    }

    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass {
        let d = self.curve.closest_point(center).distance;
        if d - radius > self.r_outer + BOUND_EPS {
            return BallClass::Outside;
        }
        if self.r_inner > 0.0 && d + radius < self.r_inner - BOUND_EPS {
            return BallClass::Outside;
        }
        let radial_inside = d + radius < self.r_outer - BOUND_EPS
            && (self.r_inner == 0.0 || d - radius > self.r_inner + BOUND_EPS);
        // Strictly in front of the start plane and behind the end plane, no
        // ball point can have an end of the curve as its closest point.
        let caps_inside = (center - self.start).dot(self.start_tangent) > radius + BOUND_EPS
            && (self.end - center).dot(self.end_tangent) > radius + BOUND_EPS;
        if radial_inside && caps_inside {
            BallClass::Inside
        } else {
            BallClass::Mixed
        }
    }

    fn bounding_box(&self) -> Aabb {
        let (lo, hi) = self
            .curve
            .samples()
            .iter()
            .fold((self.start, self.start), |(lo, hi), p| (lo.min(*p), hi.max(*p)));
        let r = Vec3::new(self.r_outer, self.r_outer, self.r_outer);
        Aabb::new(lo - r, hi + r)
    }
}

/// An implicit solid.
#[derive(Debug, Clone, PartialEq)]
pub enum Solid {
    Cone(Cone),
    Sphere(Sphere),
    TubeShell(TubeShell),
    Union(Vec<Solid>),
}

impl Solid {
    pub fn cone(apex: Vec3, axis: Vec3, half_angle: f64, height: f64) -> Result<Self, GeomError> {
        Cone::new(apex, axis, half_angle, height).map(Solid::Cone)
    }

    pub fn sphere(center: Vec3, radius: f64) -> Result<Self, GeomError> {
        Sphere::new(center, radius).map(Solid::Sphere)
    }

    pub fn tube_shell(curve: PiecewiseBezierCurve, r_inner: f64, r_outer: f64) -> Result<Self, GeomError> {
        TubeShell::new(curve, r_inner, r_outer).map(Solid::TubeShell)
    }

    pub fn union(members: Vec<Solid>) -> Result<Self, GeomError> {
        if members.is_empty() {
            Err(GeomError::EmptyUnion)
        } else {
            Ok(Solid::Union(members))
        }
    }

    /// Non-union leaves of this solid, depth first.
    pub fn primitives(&self) -> Vec<&Solid> {
        let mut out = Vec::new();
        self.collect_primitives(&mut out);
        out
    }

    fn collect_primitives<'a>(&'a self, out: &mut Vec<&'a Solid>) {
        match self {
            Solid::Union(ms) => ms.iter().for_each(|m| m.collect_primitives(out)),
            s => out.push(s),
        }
    }

    /// The solid moved by `t`.
    pub fn transformed(&self, t: &RigidTransform) -> Solid {
        match self {
            Solid::Cone(c) => Solid::Cone(
                Cone::new(t.transform_point(c.apex), t.rotate(c.axis), c.half_angle, c.height)
                    .expect("rigid motion preserves cone validity"),
            ),
            Solid::Sphere(s) => Solid::Sphere(Sphere {
                center: t.transform_point(s.center),
                radius: s.radius,
            }),
            Solid::TubeShell(ts) => Solid::TubeShell(
                TubeShell::new(ts.curve.transformed(t), ts.r_inner, ts.r_outer)
                    .expect("rigid motion preserves shell radii"),
            ),
            Solid::Union(ms) => Solid::Union(ms.iter().map(|m| m.transformed(t)).collect()),
        }
    }

    pub fn translated(&self, v: Vec3) -> Solid {
        self.transformed(&RigidTransform::from_translation(v))
    }
}

impl Region for Solid {
    fn contains(&self, p: Vec3) -> bool {
        match self {
            Solid::Cone(c) => c.contains(p),
            Solid::Sphere(s) => s.contains(p),
            Solid::TubeShell(t) => t.contains(p),
            Solid::Union(ms) => ms.iter().any(|m| m.contains(p)),
        }
    }

    fn classify_ball(&self, center: Vec3, radius: f64) -> BallClass {
        match self {
            Solid::Cone(c) => c.classify_ball(center, radius),
            Solid::Sphere(s) => s.classify_ball(center, radius),
            Solid::TubeShell(t) => t.classify_ball(center, radius),
            Solid::Union(ms) => {
                let mut all_out = true;
                for m in ms {
                    match m.classify_ball(center, radius) {
                        BallClass::Inside => return BallClass::Inside,
                        BallClass::Mixed => all_out = false,
                        BallClass::Outside => {}
                    }
                }
                if all_out {
                    BallClass::Outside
                } else {
                    BallClass::Mixed
                }
            }
        }
    }

    fn bounding_box(&self) -> Aabb {
        match self {
            Solid::Cone(c) => c.bounding_box(),
            Solid::Sphere(s) => s.bounding_box(),
            Solid::TubeShell(t) => t.bounding_box(),
            Solid::Union(ms) => ms
                .iter()
                .map(|m| m.bounding_box())
                .reduce(|a, b| a.union(&b))
                .expect("unions are non-empty"),
        }
    }
}
