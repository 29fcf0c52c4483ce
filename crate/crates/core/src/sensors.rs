//! ToF sensor rings: placement on robot links, cone fields of view and the
//! `n<i>_<j>_<θ>` configuration labels.
//!
//! A label names `i` rings per shoulder and elbow link, `j` sensors per
//! ring and a tilt of `θ` degrees. Every configuration also carries a fixed
//! tool ring at the TCP.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::geom::{GeomError, RigidTransform, Solid, Vec3};
use crate::kinematics::PoseSnapshot;
use crate::math;

/// Largest tilt accepted in a label, degrees.
pub const MAX_LABEL_TILT_DEG: u32 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorError {
    #[error("malformed configuration label {0:?}")]
    MalformedLabel(String),
    #[error("unsupported ring count {0} (expected 1, 2 or 3)")]
    UnsupportedRingCount(u32),
    #[error("tilt {0}° outside [0°, {MAX_LABEL_TILT_DEG}°]")]
    TiltOutOfRange(u32),
    #[error("single centre rings are untilted, got {0}°")]
    TiltOnCenterRing(u32),
    #[error("sensors per ring must be at least 1")]
    NoSensors,
    #[error("invalid sensor spec: range {range}, fov {fov}")]
    Spec { range: f64, fov: f64 },
    #[error("invalid ring placement: {0}")]
    Ring(&'static str),
    #[error("link {link} out of range for a pose with {links} links")]
    LinkOutOfRange { link: usize, links: usize },
    #[error("link {0} has zero length")]
    DegenerateLink(usize),
    #[error("cannot form the union of zero sensors")]
    NoCones,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Range and field of view of one ToF sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSpec {
    range: f64,
    fov_full_angle: f64,
}

impl Default for SensorSpec {
    /// 1.5 m range, 25° full field of view.
    fn default() -> Self {
        Self { range: 1.5, fov_full_angle: 25f64.to_radians() }
    }
}

impl SensorSpec {
    pub fn new(range: f64, fov_full_angle: f64) -> Result<Self, SensorError> {
        let ok = range > 0.0 && range.is_finite() && fov_full_angle > 0.0 && fov_full_angle < PI;
        if !ok {
            return Err(SensorError::Spec { range, fov: fov_full_angle });
        }
        Ok(Self { range, fov_full_angle })
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn fov_full_angle(&self) -> f64 {
        self.fov_full_angle
    }

    pub fn half_angle(&self) -> f64 {
        self.fov_full_angle / 2.0
    }
}

/// Which end of the link a tilted ring leans toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiltToward {
    Distal,
    Proximal,
}

impl TiltToward {
    fn sign(self) -> f64 {
        match self {
            TiltToward::Distal => 1.0,
            TiltToward::Proximal => -1.0,
        }
    }
}

/// One ring of sensors around a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPlacement {
    /// Link `k` spans pose endpoints `k → k+1`.
    pub link_index: usize,
    /// 0 at the proximal end of the link, 1 at the distal end.
    pub axial_position: f64,
    /// Lean of each sensor axis from the radial direction toward the link
    /// direction, radians.
    pub tilt: f64,
    pub tilt_toward: TiltToward,
    pub sensor_count: u32,
    /// Distance of the sensors from the link centerline, m.
    pub ring_radius: f64,
    /// Angle of the first sensor from the ring's reference direction, rad.
    pub phase: f64,
}

impl RingPlacement {
    pub fn validate(&self) -> Result<(), SensorError> {
        if self.sensor_count == 0 {
            return Err(SensorError::NoSensors);
        }
        if !(0.0..=1.0).contains(&self.axial_position) {
            return Err(SensorError::Ring("axial position outside [0, 1]"));
        }
        if !(self.ring_radius >= 0.0 && self.ring_radius.is_finite()) {
            return Err(SensorError::Ring("negative ring radius"));
        }
        if !(0.0..FRAC_PI_2).contains(&self.tilt) {
            return Err(SensorError::Ring("tilt outside [0, π/2)"));
        }
        if !self.phase.is_finite() {
            return Err(SensorError::Ring("non-finite phase"));
        }
        Ok(())
    }
}

/// Where label-driven rings go on the robot.
#[derive(Debug, Clone, PartialEq)]
pub struct RingLayout {
    pub shoulder_link: usize,
    pub elbow_link: usize,
    /// Axial position of the single, untilted centre ring.
    pub center_axial: f64,
    /// Axial positions of the two end rings.
    pub end_axial: [f64; 2],
    /// Lean of the ring at `end_axial[0]`; the other ring leans the opposite
    /// way.
    pub first_end_tilt: TiltToward,
    /// Rotate the end rings by half a sensor spacing against the centre
    /// ring so their sensors sit between its sensors.
    pub stagger_end_rings: bool,
    pub ring_radius: f64,
    pub tool_link: usize,
    pub tool_axial: f64,
    pub tool_sensor_count: u32,
    pub tool_ring_radius: f64,
}

impl Default for RingLayout {
    /// Layout for the bundled six-axis arm: shoulder link 1, elbow link 2,
    /// end rings at 20% and 80% leaning toward each other, 8-sensor tool
    /// ring at the flange.
    fn default() -> Self {
        Self {
            shoulder_link: 1,
            elbow_link: 2,
            center_axial: 0.5,
            end_axial: [0.2, 0.8],
            first_end_tilt: TiltToward::Distal,
            stagger_end_rings: true,
            ring_radius: 0.06,
            tool_link: 5,
            tool_axial: 1.0,
            tool_sensor_count: 8,
            tool_ring_radius: 0.06,
        }
    }
}

/// Parsed `n<i>_<j>_<θ>` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigLabel {
    pub rings_per_link: u32,
    pub sensors_per_ring: u32,
    pub tilt_deg: u32,
}

impl ConfigLabel {
    pub fn new(rings_per_link: u32, sensors_per_ring: u32, tilt_deg: u32) -> Result<Self, SensorError> {
        if !(1..=3).contains(&rings_per_link) {
            return Err(SensorError::UnsupportedRingCount(rings_per_link));
        }
        if sensors_per_ring == 0 {
            return Err(SensorError::NoSensors);
        }
        if tilt_deg > MAX_LABEL_TILT_DEG {
            return Err(SensorError::TiltOutOfRange(tilt_deg));
        }
        if rings_per_link == 1 && tilt_deg != 0 {
            return Err(SensorError::TiltOnCenterRing(tilt_deg));
        }
        Ok(Self { rings_per_link, sensors_per_ring, tilt_deg })
    }
}

fn parse_decimal(s: &str) -> Option<u32> {
    let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if canonical {
        s.parse().ok()
    } else {
        None
    }
}

impl FromStr for ConfigLabel {
    type Err = SensorError;

    fn from_str(s: &str) -> Result<Self, SensorError> {
        let malformed = || SensorError::MalformedLabel(String::from(s));
        let rest = s.strip_prefix('n').ok_or_else(malformed)?;
        let mut parts = rest.split('_');
        let mut next = || parts.next().and_then(parse_decimal).ok_or_else(malformed);
        let (i, j, theta) = (next()?, next()?, next()?);
        if parts.next().is_some() {
            return Err(malformed());
        }
        ConfigLabel::new(i, j, theta)
    }
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}_{}_{}", self.rings_per_link, self.sensors_per_ring, self.tilt_deg)
    }
}

/// Concrete ring set for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig {
    pub label: ConfigLabel,
    pub rings: Vec<RingPlacement>,
    pub spec: SensorSpec,
}

impl SensorConfig {
    /// Expands a label with the given layout:
    ///
    /// * `i = 1`: one untilted ring at the centre of the shoulder and elbow links;
    /// * `i = 2`: two rings per link at the end positions, tilted by `θ`
    ///   in opposite directions;
    /// * `i = 3`: the `i = 2` rings plus the untilted centre ring.
    ///
    /// The tool ring is appended last in every case.
    pub fn from_label(label: ConfigLabel, layout: &RingLayout, spec: SensorSpec) -> Result<Self, SensorError> {
        let tilt = f64::from(label.tilt_deg).to_radians();
        let opposite = match layout.first_end_tilt {
            TiltToward::Distal => TiltToward::Proximal,
            TiltToward::Proximal => TiltToward::Distal,
        };
        let end_phase = if layout.stagger_end_rings { PI / f64::from(label.sensors_per_ring) } else { 0.0 };
        let mut rings = Vec::new();
        for link in [layout.shoulder_link, layout.elbow_link] {
            let ring = |axial_position, tilt, tilt_toward, phase| RingPlacement {
                link_index: link,
                axial_position,
                tilt,
                tilt_toward,
                sensor_count: label.sensors_per_ring,
                ring_radius: layout.ring_radius,
                phase,
            };
            if label.rings_per_link != 2 {
                rings.push(ring(layout.center_axial, 0.0, TiltToward::Distal, 0.0));
            }
            if label.rings_per_link >= 2 {
                rings.push(ring(layout.end_axial[0], tilt, layout.first_end_tilt, end_phase));
                rings.push(ring(layout.end_axial[1], tilt, opposite, end_phase));
            }
        }
        rings.push(RingPlacement {
            link_index: layout.tool_link,
            axial_position: layout.tool_axial,
            tilt: 0.0,
            tilt_toward: TiltToward::Distal,
            sensor_count: layout.tool_sensor_count,
            ring_radius: layout.tool_ring_radius,
            phase: 0.0,
        });
        for r in &rings {
            r.validate()?;
        }
        Ok(Self { label, rings, spec })
    }

    pub fn label_string(&self) -> String {
        alloc::format!("{}", self.label)
    }

    pub fn sensor_count(&self) -> usize {
        self.rings.iter().map(|r| r.sensor_count as usize).sum()
    }
}

/// Parses a label and expands it with the default layout and sensor spec.
pub fn parse_config_label(label: &str) -> Result<SensorConfig, SensorError> {
    SensorConfig::from_label(label.parse()?, &RingLayout::default(), SensorSpec::default())
}

/// A mounted sensor. The pose's z axis is the viewing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedSensor {
    pub pose: RigidTransform,
    pub cone: Solid,
}

impl PlacedSensor {
    pub fn position(&self) -> Vec3 {
        self.pose.translation
    }

    pub fn axis(&self) -> Vec3 {
        self.pose.axis(2)
    }
}

/// Unit vector perpendicular to `dir` fixing angle zero of a ring: the link
/// frame's x axis projected off the link direction, or its y axis if x is
/// (nearly) parallel to the link.
fn ring_reference(frame: &RigidTransform, dir: Vec3) -> Vec3 {
    [frame.axis(0), frame.axis(1)]
        .into_iter()
        .map(|a| a - dir * a.dot(dir))
        .find(|v| v.norm() > 1e-6)
        .and_then(Vec3::try_normalize)
        .unwrap_or_else(|| dir.any_perpendicular())
}

/// Places every sensor of `config` on the robot at `pose`.
///
/// Sensors are spread at equal angles around the link axis, starting from a
/// reference direction fixed to the link frame. Each axis points radially
/// outward and then leans by the ring tilt toward the chosen link end.
pub fn place_sensors(config: &SensorConfig, pose: &PoseSnapshot) -> Result<Vec<PlacedSensor>, SensorError> {
    let links = pose.link_count();
    let mut out = Vec::with_capacity(config.sensor_count());
    for ring in &config.rings {
        ring.validate()?;
        if ring.link_index >= links {
            return Err(SensorError::LinkOutOfRange { link: ring.link_index, links });
        }
        let k = ring.link_index;
        let (a, b) = (pose.link_endpoints[k], pose.link_endpoints[k + 1]);
        let dir = (b - a).try_normalize().ok_or(SensorError::DegenerateLink(k))?;
        let e1 = ring_reference(&pose.link_frames[k], dir);
        let e2 = dir.cross(e1);
        let center = a.lerp(b, ring.axial_position);
        let lean = dir * (math::sin(ring.tilt) * ring.tilt_toward.sign());
        let out_scale = math::cos(ring.tilt);
        for s in 0..ring.sensor_count {
            let phi = ring.phase + TAU * f64::from(s) / f64::from(ring.sensor_count);
            let radial = e1 * math::cos(phi) + e2 * math::sin(phi);
            let position = center + radial * ring.ring_radius;
            let axis = radial * out_scale + lean;
            let x = dir.cross(axis).normalize();
            let y = axis.cross(x);
            out.push(PlacedSensor {
                pose: RigidTransform::from_axes(x, y, axis, position),
                cone: Solid::cone(position, axis, config.spec.half_angle(), config.spec.range())?,
            });
        }
    }
    Ok(out)
}

/// Set union of all sensor cones.
pub fn fov_union(sensors: &[PlacedSensor]) -> Result<Solid, SensorError> {
    if sensors.is_empty() {
        return Err(SensorError::NoCones);
    }
    Ok(Solid::union(sensors.iter().map(|s| s.cone.clone()).collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Region;
    use crate::kinematics::{forward_kinematics, JointState, RobotModel};
    use crate::octree::{voxelize, VoxelDomain};
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn vertical_link_pose() -> PoseSnapshot {
        PoseSnapshot {
            link_endpoints: alloc::vec![Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0)],
            link_frames: alloc::vec![RigidTransform::IDENTITY],
            tcp_frame: RigidTransform::from_translation(Vec3::new(0.0, 0.0, 1.0)),
        }
    }

    fn single_ring(count: u32, tilt_deg: f64) -> SensorConfig {
        SensorConfig {
            label: ConfigLabel::new(1, count, 0).unwrap(),
            rings: alloc::vec![RingPlacement {
                link_index: 0,
                axial_position: 0.5,
                tilt: tilt_deg.to_radians(),
                tilt_toward: TiltToward::Distal,
                sensor_count: count,
                ring_radius: 0.06,
                phase: 0.0,
            }],
            spec: SensorSpec::default(),
        }
    }

    #[test]
    fn label_examples() {
        let c = parse_config_label("n1_8_0").unwrap();
        assert_eq!(c.rings.len(), 3);
        assert!(c.rings.iter().all(|r| r.sensor_count == 8 && r.tilt == 0.0));

        let c = parse_config_label("n2_16_25").unwrap();
        assert_eq!(c.rings.len(), 5);
        for r in &c.rings[..4] {
            assert_eq!(r.sensor_count, 16);
            assert!((r.tilt - 25f64.to_radians()).abs() < 1e-15);
        }
        assert_eq!(c.rings[0].tilt_toward, TiltToward::Distal);
        assert_eq!(c.rings[1].tilt_toward, TiltToward::Proximal);
        assert_eq!(c.rings[4].sensor_count, 8);
        assert_eq!(c.sensor_count(), 72);

        let c = parse_config_label("n3_16_55").unwrap();
        assert_eq!(c.rings.len(), 7);
        assert_eq!(c.rings.iter().filter(|r| r.tilt == 0.0).count(), 3);

        assert_eq!(parse_config_label("n2_16_70"), Err(SensorError::TiltOutOfRange(70)));
        assert_eq!(parse_config_label("n4_16_0"), Err(SensorError::UnsupportedRingCount(4)));
        assert_eq!(parse_config_label("n1_16_10"), Err(SensorError::TiltOnCenterRing(10)));
        assert_eq!(parse_config_label("n2_0_10"), Err(SensorError::NoSensors));
        for bad in ["", "n", "n2_16", "n2_16_25_1", "x2_16_25", "n2_16_-5", "n2_016_25", "n2__25", "n2_16_2.5"] {
            assert!(matches!(parse_config_label(bad), Err(SensorError::MalformedLabel(_))), "{bad}");
        }
    }

    #[test]
    fn eight_sensor_ring_is_evenly_spaced() {
        let sensors = place_sensors(&single_ring(8, 0.0), &vertical_link_pose()).unwrap();
        assert_eq!(sensors.len(), 8);
        for i in 0..8 {
            let (a, b) = (sensors[i].axis(), sensors[(i + 1) % 8].axis());
            assert!(a.z.abs() < 1e-12);
            assert!((a.angle_to(b) - PI / 4.0).abs() < 1e-12);
            assert!((sensors[i].position().z - 0.5).abs() < 1e-12);
            assert!((Vec3::new(sensors[i].position().x, sensors[i].position().y, 0.0).norm() - 0.06).abs() < 1e-12);
        }
    }

    #[test]
    fn tilt_leans_toward_link_direction() {
        let sensors = place_sensors(&single_ring(16, 55.0), &vertical_link_pose()).unwrap();
        for s in &sensors {
            assert!((s.axis().dot(Vec3::Z) - 55f64.to_radians().sin()).abs() < 1e-9);
            assert!(s.pose.is_proper(1e-12));
        }
        let almost = place_sensors(&single_ring(4, 89.999), &vertical_link_pose()).unwrap();
        assert!(almost.iter().all(|s| s.axis().dot(Vec3::Z) > 0.999_999));
    }

    #[test]
    fn out_of_range_link() {
        let mut c = single_ring(8, 0.0);
        c.rings[0].link_index = 3;
        assert_eq!(
            place_sensors(&c, &vertical_link_pose()),
            Err(SensorError::LinkOutOfRange { link: 3, links: 1 })
        );
    }

    #[test]
    fn robot_ring_counts_and_orthogonality() {
        let m = RobotModel::ur10_like();
        let q = JointState::new(alloc::vec![0.4, 0.8, 1.1, -0.3, 0.6, 0.2]).unwrap();
        let pose = forward_kinematics(&m, &q).unwrap();
        assert_eq!(place_sensors(&parse_config_label("n2_16_25").unwrap(), &pose).unwrap().len(), 72);
        let c = parse_config_label("n1_16_0").unwrap();
        let sensors = place_sensors(&c, &pose).unwrap();
        let mut idx = 0;
        for ring in &c.rings {
            let dir = pose.link_direction(ring.link_index).unwrap();
            for _ in 0..ring.sensor_count {
                assert!(sensors[idx].axis().dot(dir).abs() < 1e-9);
                idx += 1;
            }
        }
    }

    #[test]
    fn eight_sensor_ring_is_a_subset_of_sixteen() {
        let pose = vertical_link_pose();
        let eight = place_sensors(&single_ring(8, 0.0), &pose).unwrap();
        let sixteen = place_sensors(&single_ring(16, 0.0), &pose).unwrap();
        for (i, s) in eight.iter().enumerate() {
            assert!(s.pose.approx_eq(&sixteen[2 * i].pose, 1e-12));
        }
    }

    #[test]
    fn union_volumes() {
        let domain = VoxelDomain::centered(Vec3::ZERO, 4.0, 7).unwrap();
        let cone = |apex: Vec3, axis: Vec3| PlacedSensor {
            pose: RigidTransform::from_translation(apex),
            cone: Solid::cone(apex, axis, 12.5f64.to_radians(), 1.5).unwrap(),
        };
        let a = cone(Vec3::new(-0.5, 0.0, -0.8), Vec3::Z);
        let single = voxelize(&fov_union(std::slice::from_ref(&a)).unwrap(), &domain).unwrap();
        assert_eq!(single, voxelize(&a.cone, &domain).unwrap());
        let twice = voxelize(&fov_union(&[a.clone(), a.clone()]).unwrap(), &domain).unwrap();
        assert_eq!(twice.voxel_count(), single.voxel_count());

        let b = cone(Vec3::new(0.7, 0.1, 0.8), -Vec3::Z);
        assert!(!a.cone.bounding_box().intersects(&b.cone.bounding_box()));
        let pair = voxelize(&fov_union(&[a, b.clone()]).unwrap(), &domain).unwrap();
        let vb = voxelize(&b.cone, &domain).unwrap();
        assert_eq!(pair.voxel_count(), single.voxel_count() + vb.voxel_count());
        let rel = (pair.volume() - 2.0 * single.volume()).abs() / (2.0 * single.volume());
        assert!(rel < 0.03, "{rel}");
        assert_eq!(fov_union(&[]), Err(SensorError::NoCones));
    }

    fn arb_label() -> impl Strategy<Value = ConfigLabel> {
        prop_oneof![
            (1u32..64).prop_map(|j| ConfigLabel::new(1, j, 0).unwrap()),
            (2u32..=3, 1u32..64, 0u32..=60).prop_map(|(i, j, t)| ConfigLabel::new(i, j, t).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn label_round_trip(label in arb_label()) {
            let text = label.to_string();
            prop_assert_eq!(text.parse::<ConfigLabel>().unwrap(), label);
            let cfg = parse_config_label(&text).unwrap();
            prop_assert_eq!(cfg.label_string(), text);
        }

        #[test]
        fn placement_is_equivariant(
            q in proptest::collection::vec(-3.0..3.0f64, 6),
            ang in -3.0..3.0f64,
            t in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            label in prop_oneof![Just("n1_8_0"), Just("n2_16_25"), Just("n3_16_55")],
        ) {
            let m = RobotModel::ur10_like();
            let pose = forward_kinematics(&m, &JointState::new(q).unwrap()).unwrap();
            let motion = RigidTransform::from_axis_angle(Vec3::new(-0.2, 0.9, 0.4), ang)
                .unwrap()
                .with_translation(Vec3::new(t.0, t.1, t.2));
            let cfg = parse_config_label(label).unwrap();
            let a = place_sensors(&cfg, &pose).unwrap();
            let b = place_sensors(&cfg, &pose.transformed(&motion)).unwrap();
            for (sa, sb) in a.iter().zip(&b) {
                prop_assert!(motion.compose(&sa.pose).approx_eq(&sb.pose, 1e-9));
            }
        }

        #[test]
        fn union_membership_commutes_and_associates(
            pts in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64), 64),
            q in proptest::collection::vec(-3.0..3.0f64, 6),
        ) {
            let m = RobotModel::ur10_like();
            let pose = forward_kinematics(&m, &JointState::new(q).unwrap()).unwrap();
            let sensors = place_sensors(&parse_config_label("n1_8_0").unwrap(), &pose).unwrap();
            let forward = fov_union(&sensors).unwrap();
            let mut rev = sensors.clone();
            rev.reverse();
            let backward = fov_union(&rev).unwrap();
            let (left, right) = sensors.split_at(5);
            let nested = Solid::union(alloc::vec![fov_union(left).unwrap(), fov_union(right).unwrap()]).unwrap();
            for (x, y, z) in pts {
                let p = Vec3::new(x, y, z);
                let any = sensors.iter().any(|s| s.cone.contains(p));
                prop_assert_eq!(forward.contains(p), any);
                prop_assert_eq!(backward.contains(p), any);
                prop_assert_eq!(nested.contains(p), any);
            }
        }
    }
}
