//! Piecewise Bezier pose curve through the robot link endpoints.
//!
//! Each interior corner that is not (nearly) collinear is replaced by a
//! quadratic Bezier blend whose control point is the corner itself. The
//! rest of the polyline stays straight.

use alloc::vec::Vec;

use super::{GeomError, RigidTransform, Vec3, COLLINEAR_TOLERANCE_RAD};

/// One piece of the pose curve, parameterized over `u ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Straight { start: Vec3, end: Vec3 },
    Bezier { start: Vec3, control: Vec3, end: Vec3 },
}

impl Segment {
    pub fn start(&self) -> Vec3 {
        match *self {
            Segment::Straight { start, .. } | Segment::Bezier { start, .. } => start,
        }
    }

    pub fn end(&self) -> Vec3 {
        match *self {
            Segment::Straight { end, .. } | Segment::Bezier { end, .. } => end,
        }
    }

    pub fn is_bezier(&self) -> bool {
        matches!(self, Segment::Bezier { .. })
    }

    #[inline]
    pub fn point(&self, u: f64) -> Vec3 {
        match *self {
            Segment::Straight { start, end } => start.lerp(end, u),
            Segment::Bezier { start, control, end } => {
                let v = 1.0 - u;
                start * (v * v) + control * (2.0 * v * u) + end * (u * u)
            }
        }
    }

    pub fn derivative(&self, u: f64) -> Vec3 {
        match *self {
            Segment::Straight { start, end } => end - start,
            Segment::Bezier { start, control, end } => {
                (control - start) * (2.0 * (1.0 - u)) + (end - control) * (2.0 * u)
            }
        }
    }

    pub fn second_derivative(&self) -> Vec3 {
        match *self {
            Segment::Straight { .. } => Vec3::ZERO,
            Segment::Bezier { start, control, end } => (end - control * 2.0 + start) * 2.0,
        }
    }

    /// Chord-sum length; exact for straight segments.
    pub fn length(&self, samples: usize) -> f64 {
        match *self {
            Segment::Straight { start, end } => start.distance(end),
            Segment::Bezier { .. } => {
                let mut prev = self.start();
                let mut total = 0.0;
                for j in 1..=samples {
                    let p = self.point(j as f64 / samples as f64);
                    total += prev.distance(p);
                    prev = p;
                }
                total
            }
        }
    }

    fn transformed(&self, t: &RigidTransform) -> Segment {
        match *self {
            Segment::Straight { start, end } => Segment::Straight {
                start: t.transform_point(start),
                end: t.transform_point(end),
            },
            Segment::Bezier { start, control, end } => Segment::Bezier {
                start: t.transform_point(start),
                control: t.transform_point(control),
                end: t.transform_point(end),
            },
        }
    }
}

/// Unit tangent and principal normal at a curve location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub tangent: Vec3,
    pub normal: Vec3,
}

/// Result of a closest-point query against the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosestPoint {
    /// Global parameter in `[0, segment_count]`.
    pub param: f64,
    pub point: Vec3,
    pub distance: f64,
}

const SAMPLES_PER_CHUNK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
struct Chunk {
    first: usize,
    last: usize,
    center: Vec3,
    radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseBezierCurve {
    control_points: Vec<Vec3>,
    segments: Vec<Segment>,
    interpolation_factor: f64,
    samples_per_segment: usize,
    lengths: Vec<f64>,
    cumulative: Vec<f64>,
    samples: Vec<Vec3>,
    chunks: Vec<Chunk>,
}

impl PiecewiseBezierCurve {
    pub fn build(
        points: &[Vec3],
        interpolation_factor: f64,
        samples_per_segment: usize,
    ) -> Result<Self, GeomError> {
        if points.len() < 2 {
            return Err(GeomError::TooFewPoints(points.len()));
        }
        if !(interpolation_factor > 0.0 && interpolation_factor <= 0.5) {
            return Err(GeomError::InterpolationFactor(interpolation_factor));
        }
        if samples_per_segment == 0 {
            return Err(GeomError::ZeroSamples);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) <= 1e-9 {
                return Err(GeomError::DuplicatePoint(i, i + 1));
            }
        }

        let n = points.len();
        let f = interpolation_factor;
        let mut segments = Vec::new();
        let mut cursor = points[0];
        for k in 1..n {
            let corner = points[k];
            let blended = k + 1 < n && {
                let d_in = corner - points[k - 1];
                let d_out = points[k + 1] - corner;
                d_in.angle_to(d_out) >= COLLINEAR_TOLERANCE_RAD
            };
            if blended {
                let mut start = corner - (corner - points[k - 1]) * f;
                if start.distance(cursor) <= 1e-12 {
                    start = cursor;
                } else {
                    segments.push(Segment::Straight { start: cursor, end: start });
                }
                let end = corner + (points[k + 1] - corner) * f;
                segments.push(Segment::Bezier { start, control: corner, end });
                cursor = end;
            } else {
                segments.push(Segment::Straight { start: cursor, end: corner });
                cursor = corner;
            }
        }
        Ok(Self::from_parts(
            points.to_vec(),
            segments,
            interpolation_factor,
            samples_per_segment,
        ))
    }

    fn from_parts(
        control_points: Vec<Vec3>,
        segments: Vec<Segment>,
        interpolation_factor: f64,
        samples_per_segment: usize,
    ) -> Self {
        let lengths: Vec<f64> = segments.iter().map(|s| s.length(samples_per_segment)).collect();
        let mut cumulative = Vec::with_capacity(lengths.len() + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for l in &lengths {
            acc += l;
            cumulative.push(acc);
        }

        let mut samples = Vec::with_capacity(segments.len() * samples_per_segment + 1);
        for s in &segments {
            for j in 0..samples_per_segment {
                samples.push(s.point(j as f64 / samples_per_segment as f64));
            }
        }
        samples.push(segments.last().map(|s| s.end()).unwrap_or(control_points[0]));

        let mut chunks = Vec::new();
        let mut first = 0;
        while first + 1 < samples.len() {
            let last = (first + SAMPLES_PER_CHUNK).min(samples.len() - 1);
            let (lo, hi) = samples[first..=last]
                .iter()
                .fold((samples[first], samples[first]), |(lo, hi), p| (lo.min(*p), hi.max(*p)));
            let center = (lo + hi) * 0.5;
            let radius = samples[first..=last]
                .iter()
                .map(|p| p.distance(center))
                .fold(0.0, f64::max);
            chunks.push(Chunk { first, last, center, radius });
            first = last;
        }

        Self {
            control_points,
            segments,
            interpolation_factor,
            samples_per_segment,
            lengths,
            cumulative,
            samples,
            chunks,
        }
    }

    pub fn control_points(&self) -> &[Vec3] {
        &self.control_points
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn interpolation_factor(&self) -> f64 {
        self.interpolation_factor
    }

    pub fn samples_per_segment(&self) -> usize {
        self.samples_per_segment
    }

    pub fn bezier_count(&self) -> usize {
        self.segments.iter().filter(|s| s.is_bezier()).count()
    }

    pub fn start(&self) -> Vec3 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Vec3 {
        self.segments[self.segments.len() - 1].end()
    }

    /// Dense samples used for distance queries; `segments × samples + 1` points.
    pub fn samples(&self) -> &[Vec3] {
        &self.samples
    }

    /// Length of the curve: chord sums over the Bezier blends, exact on
    /// straight segments.
    pub fn arclength(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    pub fn segment_lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Same curve with every control point mapped through `t`.
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        Self::from_parts(
            self.control_points.iter().map(|p| t.transform_point(*p)).collect(),
            self.segments.iter().map(|s| s.transformed(t)).collect(),
            self.interpolation_factor,
            self.samples_per_segment,
        )
    }

    /// Position at global parameter `u ∈ [0, segment_count]`.
    pub fn point_at_param(&self, u: f64) -> Vec3 {
        let (seg, local) = self.split_param(u);
        self.segments[seg].point(local)
    }

    fn split_param(&self, u: f64) -> (usize, f64) {
        let n = self.segments.len();
        let u = u.clamp(0.0, n as f64);
        let seg = (crate::math::floor(u) as usize).min(n - 1);
        (seg, u - seg as f64)
    }

    /// Maps normalized arclength `t ∈ [0, 1]` to (segment, local parameter).
    fn locate(&self, t: f64) -> (usize, f64) {
        let s = t.clamp(0.0, 1.0) * self.arclength();
        let seg = match self.cumulative[1..].iter().position(|&c| s <= c) {
            Some(i) => i,
            None => self.segments.len() - 1,
        };
        let len = self.lengths[seg];
        if len <= 0.0 {
            return (seg, 0.0);
        }
        let local_s = (s - self.cumulative[seg]).clamp(0.0, len);
        match self.segments[seg] {
            Segment::Straight { .. } => (seg, local_s / len),
            Segment::Bezier { .. } => {
                // Invert the chord-length table of this segment.
                let n = self.samples_per_segment;
                let segment = &self.segments[seg];
                let mut acc = 0.0;
                let mut prev = segment.start();
                for j in 1..=n {
                    let p = segment.point(j as f64 / n as f64);
                    let d = prev.distance(p);
                    if acc + d >= local_s || j == n {
                        let frac = if d > 0.0 { ((local_s - acc) / d).clamp(0.0, 1.0) } else { 0.0 };
                        return (seg, ((j - 1) as f64 + frac) / n as f64);
                    }
                    acc += d;
                    prev = p;
                }
                (seg, 1.0)
            }
        }
    }

    /// Position at normalized arclength `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Vec3 {
        let (seg, u) = self.locate(t);
        self.segments[seg].point(u)
    }

    /// Unit tangent and normal at normalized arclength `t ∈ [0, 1]`.
    ///
    /// Where the curvature vanishes (straight segments, collinear blends) the
    /// normal is `normalize(tangent × ẑ)`, or `normalize(tangent × x̂)` when
    /// the tangent is parallel to z.
    pub fn frenet_frame(&self, t: f64) -> FrenetFrame {
        let (seg, u) = self.locate(t);
        frame_on_segment(&self.segments[seg], u)
    }

    /// Unit tangent at the first point.
    pub fn start_tangent(&self) -> Vec3 {
        self.segments[0].derivative(0.0).normalize()
    }

    /// Unit tangent at the last point.
    pub fn end_tangent(&self) -> Vec3 {
        self.segments[self.segments.len() - 1].derivative(1.0).normalize()
    }

    /// Smallest radius of curvature over the sampled blends, `f64::INFINITY`
    /// for a curve without bends.
    pub fn min_curvature_radius(&self) -> f64 {
        let n = self.samples_per_segment;
        let mut best = f64::INFINITY;
        for s in self.segments.iter().filter(|s| s.is_bezier()) {
            let dd = s.second_derivative();
            for j in 0..=n {
                let d = s.derivative(j as f64 / n as f64);
                let speed = d.norm();
                let k = d.cross(dd).norm() / (speed * speed * speed);
                if k > 0.0 {
                    best = best.min(1.0 / k);
                }
            }
        }
        best
    }

    /// Closest point on the curve to `p`: nearest dense sample, refined by
    /// golden-section search over the neighbouring sample window.
    pub fn closest_point(&self, p: Vec3) -> ClosestPoint {
        let mut best_i = 0;
        let mut best_d2 = f64::INFINITY;
        for c in &self.chunks {
            let lb = (p.distance(c.center) - c.radius).max(0.0);
            if lb * lb >= best_d2 {
                continue;
            }
            for i in c.first..=c.last {
                let d2 = (self.samples[i] - p).norm_squared();
                if d2 < best_d2 {
                    best_d2 = d2;
                    best_i = i;
                }
            }
        }

        let step = 1.0 / self.samples_per_segment as f64;
        let u_best = best_i as f64 * step;
        let max_u = self.segments.len() as f64;
        let lo = (u_best - step).max(0.0);
        let hi = (u_best + step).min(max_u);
        let (u, d2) = golden_section(lo, hi, |u| (self.point_at_param(u) - p).norm_squared());
        let (u, d2) = if d2 <= best_d2 { (u, d2) } else { (u_best, best_d2) };
        ClosestPoint {
            param: u,
            point: self.point_at_param(u),
            distance: crate::math::sqrt(d2),
        }
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }
}

fn frame_on_segment(segment: &Segment, u: f64) -> FrenetFrame {
    let tangent = segment.derivative(u).normalize();
    let dd = segment.second_derivative();
    // τ' is parallel to the component of r'' orthogonal to r'.
    let perp = dd - tangent * dd.dot(tangent);
    let normal = if perp.norm() > 1e-6 * dd.norm() && perp.norm() > 1e-12 {
        let n = perp.normalize();
        (n - tangent * n.dot(tangent)).normalize()
    } else {
        tangent.any_perpendicular()
    };
    FrenetFrame { tangent, normal }
}

/// Minimizes a unimodal function on `[lo, hi]`; returns `(argmin, min)`.
fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn two_points_single_straight() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.)], 0.25, 64).unwrap();
        assert_eq!(c.segments().len(), 1);
        assert!(!c.segments()[0].is_bezier());
        assert_eq!(c.arclength(), 1.0);
    }

    #[test]
    fn collinear_points_stay_straight() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.), v(2., 0., 0.)], 0.25, 64)
            .unwrap();
        assert_eq!(c.bezier_count(), 0);
        assert_eq!(c.segments().len(), 2);
        assert!((c.arclength() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn right_angle_blend_geometry() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.)], 0.25, 64)
            .unwrap();
        assert_eq!(c.bezier_count(), 1);
        match c.segments()[1] {
            Segment::Bezier { start, control, end } => {
                assert!((start - v(0.75, 0., 0.)).norm() < 1e-15);
                assert_eq!(control, v(1., 0., 0.));
                assert!((end - v(1., 0.25, 0.)).norm() < 1e-15);
            }
            s => panic!("expected blend, got {s:?}"),
        }
        assert!(c.arclength() < 2.0);
    }

    #[test]
    fn straight_along_z_is_exact() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(0., 0., 2.)], 0.25, 64).unwrap();
        assert_eq!(c.arclength(), 2.0);
    }

    #[test]
    fn collinear_bezier_is_a_line() {
        let s = Segment::Bezier { start: v(0., 0., 0.), control: v(1., 0., 0.), end: v(2., 0., 0.) };
        assert!((s.length(64) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            PiecewiseBezierCurve::build(&[v(0., 0., 0.)], 0.25, 64),
            Err(GeomError::TooFewPoints(1))
        );
        assert_eq!(
            PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(0., 0., 0.)], 0.25, 64),
            Err(GeomError::DuplicatePoint(0, 1))
        );
        for f in [0.0, 0.51, -0.1, f64::NAN] {
            assert!(matches!(
                PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.)], f, 64),
                Err(GeomError::InterpolationFactor(_))
            ));
        }
        assert_eq!(
            PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.)], 0.25, 0),
            Err(GeomError::ZeroSamples)
        );
    }

    #[test]
    fn half_factor_leaves_no_zero_length_pieces() {
        let pts = [v(0., 0., 0.), v(1., 0., 0.), v(1., 1., 0.), v(2., 1., 0.)];
        let c = PiecewiseBezierCurve::build(&pts, 0.5, 16).unwrap();
        assert!(c.segment_lengths().iter().all(|&l| l > 1e-9));
        assert_eq!(c.bezier_count(), 2);
    }

    #[test]
    fn straight_frenet_normal_is_deterministic() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(1., 0., 0.)], 0.25, 64).unwrap();
        for t in [0.0, 0.3, 1.0] {
            let f = c.frenet_frame(t);
            assert!((f.tangent - Vec3::X).norm() < 1e-15);
            assert!((f.normal - v(0., -1., 0.)).norm() < 1e-15);
        }
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(0., 0., 1.)], 0.25, 64).unwrap();
        let f = c.frenet_frame(0.5);
        assert!(f.normal.dot(Vec3::Z).abs() < 1e-15);
        assert!((f.normal.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closest_point_respects_ends() {
        let c = PiecewiseBezierCurve::build(&[v(0., 0., 0.), v(0., 0., 1.)], 0.25, 64).unwrap();
        let q = c.closest_point(v(0.3, 0., 0.5));
        assert!((q.distance - 0.3).abs() < 1e-9);
        assert!((q.param - 0.5).abs() < 1e-6);
        let q = c.closest_point(v(0.0, 0., -0.4));
        assert!(q.param < 1e-9);
        assert!((q.distance - 0.4).abs() < 1e-9);
    }

    fn arb_polyline() -> impl Strategy<Value = Vec<Vec3>> {
        proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64), 2..8).prop_filter_map(
            "duplicate points",
            |pts| {
                let pts: Vec<Vec3> = pts.into_iter().map(|(x, y, z)| v(x, y, z)).collect();
                pts.windows(2).all(|w| w[0].distance(w[1]) > 1e-3).then_some(pts)
            },
        )
    }

    proptest! {
        #[test]
        fn c0_and_endpoints(pts in arb_polyline(), f in 0.05..=0.5f64) {
            let c = PiecewiseBezierCurve::build(&pts, f, 16).unwrap();
            prop_assert_eq!(c.start(), pts[0]);
            prop_assert_eq!(c.end(), *pts.last().unwrap());
            for w in c.segments().windows(2) {
                prop_assert!(w[0].end().distance(w[1].start()) <= 1e-9);
            }
        }

        #[test]
        fn collinear_triples_never_blend(
            a in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
            d in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            s1 in 0.1..2.0f64,
            s2 in 0.1..2.0f64,
        ) {
            let dir = v(d.0, d.1, d.2);
            prop_assume!(dir.norm() > 0.1);
            let dir = dir.normalize();
            let p0 = v(a.0, a.1, a.2);
            let p1 = p0 + dir * s1;
            let p2 = p1 + dir * s2;
            let c = PiecewiseBezierCurve::build(&[p0, p1, p2], 0.25, 16).unwrap();
            prop_assert_eq!(c.bezier_count(), 0);
        }

        #[test]
        fn arclength_invariant_under_rigid_motion(
            pts in arb_polyline(),
            ax in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            ang in -3.0..3.0f64,
            tr in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
        ) {
            let Ok(rot) = RigidTransform::from_axis_angle(v(ax.0, ax.1, ax.2), ang) else {
                return Ok(());
            };
            let t = rot.with_translation(v(tr.0, tr.1, tr.2));
            let c = PiecewiseBezierCurve::build(&pts, 0.25, 32).unwrap();
            let moved: Vec<Vec3> = pts.iter().map(|p| t.transform_point(*p)).collect();
            let c2 = PiecewiseBezierCurve::build(&moved, 0.25, 32).unwrap();
            prop_assert!((c.arclength() - c2.arclength()).abs() <= 1e-9);
            prop_assert!((c.arclength() - c.transformed(&t).arclength()).abs() <= 1e-9);
        }

        #[test]
        fn frenet_frame_orthonormal(pts in arb_polyline(), t in 0.0..=1.0f64) {
            let c = PiecewiseBezierCurve::build(&pts, 0.25, 32).unwrap();
            let f = c.frenet_frame(t);
            prop_assert!((f.tangent.norm() - 1.0).abs() <= 1e-9);
            prop_assert!((f.normal.norm() - 1.0).abs() <= 1e-9);
            prop_assert!(f.tangent.dot(f.normal).abs() <= 1e-9);
        }
    }
}
