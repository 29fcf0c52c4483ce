//! Reference volumes, the robot self-volume and the coverage ratio ζ.
//!
//! ζ is the share of a reference volume `V_max` (minus the robot's own
//! volume `V_R`) that lies inside the union of sensor cones. It is computed
//! twice, as `Λ(V_max ∩ V_FOV) / Λ(V_max)` and as
//! `(Λ(V_max) − Λ(V_max ∖ V_FOV)) / Λ(V_max)`. Both are formed from integer
//! voxel counts, so the two forms agree to the bit or the call fails.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use thiserror::Error;

use crate::geom::{
    GeomError, PiecewiseBezierCurve, Solid, Vec3, DEFAULT_INTERPOLATION_FACTOR, DEFAULT_SAMPLES_PER_SEGMENT,
};
use crate::kinematics::{PoseSnapshot, RobotModel};
use crate::octree::{voxelize_with, Octree, OctreeError, VoxelDomain, VoxelizeOptions};
use crate::sensors::{fov_union, place_sensors, SensorConfig, SensorError};

pub const DEFAULT_WORKSPACE_RADIUS: f64 = 1.3;
pub const DEFAULT_TOOL_RADIUS: f64 = 1.5;
pub const DEFAULT_SHELL_RADIUS: f64 = 0.9;
pub const SHELL_SWEEP_RADII: [f64; 5] = [0.5, 0.7, 0.9, 1.1, 1.5];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("radius must be positive, got {0}")]
    Radius(f64),
    #[error("shell radius {r_shell} must exceed the self occupancy radius {self_radius}")]
    ShellInsideRobot { r_shell: f64, self_radius: f64 },
    #[error("reference volume is empty")]
    EmptyReference,
    #[error("coverage forms disagree: {intersection} vs {subtraction} voxels")]
    FormMismatch { intersection: u64, subtraction: u64 },
    #[error(transparent)]
    Octree(#[from] OctreeError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
}

/// Reference volume the sensors should cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxVolumeKind {
    /// Sphere around the robot base: the reachable workspace.
    OperatingWorkspace { radius: f64 },
    /// Sphere around the TCP, typically one sensor range.
    ToolSphere { radius: f64 },
    /// Union of the two spheres above.
    OperatingPlusTool { workspace_radius: f64, tool_radius: f64 },
    /// Tube of radius `r_shell` around the pose curve.
    Shell { r_shell: f64 },
}

impl MaxVolumeKind {
    /// Workspace sphere, TCP sphere, both, and the default shell.
    pub fn defaults() -> [MaxVolumeKind; 4] {
        [
            MaxVolumeKind::OperatingWorkspace { radius: DEFAULT_WORKSPACE_RADIUS },
            MaxVolumeKind::ToolSphere { radius: DEFAULT_TOOL_RADIUS },
            MaxVolumeKind::OperatingPlusTool {
                workspace_radius: DEFAULT_WORKSPACE_RADIUS,
                tool_radius: DEFAULT_TOOL_RADIUS,
            },
            MaxVolumeKind::Shell { r_shell: DEFAULT_SHELL_RADIUS },
        ]
    }

    /// Short tag used in tables: `VO`, `VT`, `VOT` or `VS`.
    pub fn tag(&self) -> &'static str {
        match self {
            MaxVolumeKind::OperatingWorkspace { .. } => "VO",
            MaxVolumeKind::ToolSphere { .. } => "VT",
            MaxVolumeKind::OperatingPlusTool { .. } => "VOT",
            MaxVolumeKind::Shell { .. } => "VS",
        }
    }

    /// The characteristic radius: the sphere or shell radius, or the
    /// workspace radius for the combined volume.
    pub fn r_param(&self) -> f64 {
        match *self {
            MaxVolumeKind::OperatingWorkspace { radius } | MaxVolumeKind::ToolSphere { radius } => radius,
            MaxVolumeKind::OperatingPlusTool { workspace_radius, .. } => workspace_radius,
            MaxVolumeKind::Shell { r_shell } => r_shell,
        }
    }

    fn validate(&self, self_radius: f64) -> Result<(), CoverageError> {
        let positive = |r: f64| if r > 0.0 && r.is_finite() { Ok(()) } else { Err(CoverageError::Radius(r)) };
        match *self {
            MaxVolumeKind::OperatingWorkspace { radius } | MaxVolumeKind::ToolSphere { radius } => positive(radius),
            MaxVolumeKind::OperatingPlusTool { workspace_radius, tool_radius } => {
                positive(workspace_radius)?;
                positive(tool_radius)
            }
            MaxVolumeKind::Shell { r_shell } => {
                positive(r_shell)?;
                if r_shell <= self_radius {
                    return Err(CoverageError::ShellInsideRobot { r_shell, self_radius });
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for MaxVolumeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MaxVolumeKind::OperatingPlusTool { workspace_radius, tool_radius } => {
                write!(f, "VOT({workspace_radius}+{tool_radius})")
            }
            _ => write!(f, "{}({})", self.tag(), self.r_param()),
        }
    }
}

/// Pose curve through the link endpoints with the default blending.
pub fn pose_curve(pose: &PoseSnapshot) -> Result<PiecewiseBezierCurve, GeomError> {
    PiecewiseBezierCurve::build(&pose.link_endpoints, DEFAULT_INTERPOLATION_FACTOR, DEFAULT_SAMPLES_PER_SEGMENT)
}

/// `V_R`: a solid tube of the self occupancy radius around the pose curve.
pub fn robot_self_volume(model: &RobotModel, curve: &PiecewiseBezierCurve) -> Result<Solid, GeomError> {
    Solid::tube_shell(curve.clone(), 0.0, model.self_occupancy_radius())
}

/// Builds `V_max` with the workspace sphere centered on the base origin.
pub fn make_vmax(
    kind: MaxVolumeKind,
    pose: &PoseSnapshot,
    model: &RobotModel,
    curve: &PiecewiseBezierCurve,
) -> Result<Solid, CoverageError> {
    make_vmax_offset(kind, pose, model, curve, Vec3::ZERO)
}

/// Like [`make_vmax`], with the workspace sphere moved by `workspace_offset`
/// from the base origin.
///
/// The result does not exclude `V_R`; [`coverage`] removes it.
pub fn make_vmax_offset(
    kind: MaxVolumeKind,
    pose: &PoseSnapshot,
    model: &RobotModel,
    curve: &PiecewiseBezierCurve,
    workspace_offset: Vec3,
) -> Result<Solid, CoverageError> {
    kind.validate(model.self_occupancy_radius())?;
    let base = pose.link_endpoints[0] + workspace_offset;
    let tcp = pose.tcp_position();
    Ok(match kind {
        MaxVolumeKind::OperatingWorkspace { radius } => Solid::sphere(base, radius)?,
        MaxVolumeKind::ToolSphere { radius } => Solid::sphere(tcp, radius)?,
        MaxVolumeKind::OperatingPlusTool { workspace_radius, tool_radius } => {
            Solid::union(alloc::vec![Solid::sphere(base, workspace_radius)?, Solid::sphere(tcp, tool_radius)?])?
        }
        MaxVolumeKind::Shell { r_shell } => {
            Solid::tube_shell(curve.clone(), model.self_occupancy_radius(), r_shell)?
        }
    })
}

/// Analytic shell volume by Pappus' centroid theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PappusVolume {
    pub volume: f64,
    /// Set when the curve bends tighter than the outer radius; the tube then
    /// overlaps itself and the formula over-counts.
    pub min_curvature_radius: Option<f64>,
}

impl PappusVolume {
    pub fn overlaps_itself(&self) -> bool {
        self.min_curvature_radius.is_some()
    }
}

/// `π (r_outer² − r_inner²) · arclength`.
pub fn pappus_shell_volume(
    curve: &PiecewiseBezierCurve,
    r_inner: f64,
    r_outer: f64,
) -> Result<PappusVolume, CoverageError> {
    if !(r_inner >= 0.0 && r_inner <= r_outer && r_outer.is_finite()) {
        return Err(GeomError::TubeRadii { inner: r_inner, outer: r_outer }.into());
    }
    let volume = PI * (r_outer * r_outer - r_inner * r_inner) * curve.arclength();
    let rho = curve.min_curvature_radius();
    Ok(PappusVolume { volume, min_curvature_radius: (rho < r_outer).then_some(rho) })
}

/// Whether a reference octree has already had `V_R` removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfVolume {
    Excluded,
    Included,
}

/// Voxel counts and volumes behind one ζ value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub zeta_percent: f64,
    pub reference_voxels: u64,
    pub leftover_voxels: u64,
    pub lambda_vmax: f64,
    pub lambda_leftover: f64,
    pub voxel_size: f64,
    pub max_depth: u8,
}

/// ζ of `vfov` against `vmax ∖ vr`.
pub fn coverage(vmax: &Octree, vfov: &Octree, vr: &Octree, vmax_state: SelfVolume) -> Result<Coverage, CoverageError> {
    vmax.check_domain(vfov)?;
    vmax.check_domain(vr)?;
    let reference = match vmax_state {
        SelfVolume::Included => vmax.subtract(vr)?,
        SelfVolume::Excluded => vmax.clone(),
    };
    let total = reference.voxel_count();
    if total == 0 {
        return Err(CoverageError::EmptyReference);
    }
    let covered = reference.intersect(vfov)?.voxel_count();
    let leftover = reference.subtract(vfov)?;
    let leftover_count = leftover.voxel_count();
    let by_subtraction = total - leftover_count;
    let double_subtraction = reference.subtract(&leftover)?.voxel_count();
    if covered != by_subtraction || covered != double_subtraction {
        return Err(CoverageError::FormMismatch { intersection: covered, subtraction: by_subtraction });
    }
    let domain = reference.domain();
    let zeta_intersection = 100.0 * covered as f64 / total as f64;
    let zeta_subtraction = 100.0 * (total - leftover_count) as f64 / total as f64;
    debug_assert_eq!(zeta_intersection.to_bits(), zeta_subtraction.to_bits());
    Ok(Coverage {
        zeta_percent: zeta_subtraction,
        reference_voxels: total,
        leftover_voxels: leftover_count,
        lambda_vmax: total as f64 * domain.voxel_volume(),
        lambda_leftover: leftover_count as f64 * domain.voxel_volume(),
        voxel_size: domain.voxel_size(),
        max_depth: domain.max_depth(),
    })
}

/// ζ by the intersection form alone, from raw octrees.
pub fn zeta_by_intersection(reference: &Octree, vfov: &Octree) -> Result<f64, CoverageError> {
    let total = reference.voxel_count();
    if total == 0 {
        return Err(CoverageError::EmptyReference);
    }
    Ok(100.0 * reference.intersect(vfov)?.voxel_count() as f64 / total as f64)
}

/// ζ by the double-subtraction form alone, from raw octrees.
pub fn zeta_by_subtraction(reference: &Octree, vfov: &Octree) -> Result<f64, CoverageError> {
    let total = reference.voxel_count();
    if total == 0 {
        return Err(CoverageError::EmptyReference);
    }
    let leftover = reference.subtract(vfov)?.voxel_count();
    Ok(100.0 * (total - leftover) as f64 / total as f64)
}

/// One labelled coverage measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageResult {
    pub config_label: String,
    pub vmax_kind: MaxVolumeKind,
    pub pose_id: String,
    pub coverage: Coverage,
    pub warnings: Vec<String>,
}

impl CoverageResult {
    pub fn zeta_percent(&self) -> f64 {
        self.coverage.zeta_percent
    }
}

/// Octrees of one robot pose that every configuration and reference volume
/// can share.
#[derive(Debug, Clone)]
pub struct PoseScene {
    pub model: RobotModel,
    pub pose: PoseSnapshot,
    pub curve: PiecewiseBezierCurve,
    pub domain: VoxelDomain,
    pub options: VoxelizeOptions,
    pub workspace_offset: Vec3,
    self_volume: Octree,
}

impl PoseScene {
    pub fn new(
        model: RobotModel,
        pose: PoseSnapshot,
        domain: VoxelDomain,
        options: VoxelizeOptions,
    ) -> Result<Self, CoverageError> {
        let curve = pose_curve(&pose)?;
        let self_volume = voxelize_with(&robot_self_volume(&model, &curve)?, &domain, options)?;
        Ok(Self { model, pose, curve, domain, options, workspace_offset: Vec3::ZERO, self_volume })
    }

    pub fn with_workspace_offset(mut self, offset: Vec3) -> Self {
        self.workspace_offset = offset;
        self
    }

    pub fn self_volume(&self) -> &Octree {
        &self.self_volume
    }

    /// `Ω(V_max) ∖ Ω(V_R)`, plus any modelling warnings for the kind.
    pub fn reference(&self, kind: MaxVolumeKind) -> Result<(Octree, Vec<String>), CoverageError> {
        let solid = make_vmax_offset(kind, &self.pose, &self.model, &self.curve, self.workspace_offset)?;
        let mut warnings = Vec::new();
        if let MaxVolumeKind::Shell { r_shell } = kind {
            let p = pappus_shell_volume(&self.curve, self.model.self_occupancy_radius(), r_shell)?;
            if let Some(rho) = p.min_curvature_radius {
                warnings.push(alloc::format!("curvature radius {rho:.4} m below shell radius"));
            }
        }
        let octree = voxelize_with(&solid, &self.domain, self.options)?.subtract(&self.self_volume)?;
        Ok((octree, warnings))
    }

    pub fn fov(&self, config: &SensorConfig) -> Result<Octree, CoverageError> {
        let sensors = place_sensors(config, &self.pose)?;
        Ok(voxelize_with(&fov_union(&sensors)?, &self.domain, self.options)?)
    }

    /// ζ of one configuration against one reference volume.
    pub fn measure(
        &self,
        config: &SensorConfig,
        kind: MaxVolumeKind,
        pose_id: &str,
    ) -> Result<CoverageResult, CoverageError> {
        let (reference, warnings) = self.reference(kind)?;
        let fov = self.fov(config)?;
        let coverage = coverage(&reference, &fov, &self.self_volume, SelfVolume::Excluded)?;
        Ok(CoverageResult {
            config_label: config.label_string(),
            vmax_kind: kind,
            pose_id: String::from(pose_id),
            coverage,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{RigidTransform, DEFAULT_SAMPLES_PER_SEGMENT};
    use crate::kinematics::{forward_kinematics, task_pose, JointState, TaskSpec};
    use crate::octree::voxelize;
    use crate::sensors::parse_config_label;
    use proptest::prelude::*;

    fn straight(len: f64) -> PiecewiseBezierCurve {
        PiecewiseBezierCurve::build(
            &[Vec3::ZERO, Vec3::new(0.0, 0.0, len / 2.0), Vec3::new(0.0, 0.0, len)],
            DEFAULT_INTERPOLATION_FACTOR,
            DEFAULT_SAMPLES_PER_SEGMENT,
        )
        .unwrap()
    }

    fn home_pose() -> (RobotModel, PoseSnapshot) {
        let m = RobotModel::ur10_like();
        let pose = forward_kinematics(&m, &JointState::zeros(6)).unwrap();
        (m, pose)
    }

    #[test]
    fn pappus_examples() {
        let p = pappus_shell_volume(&straight(1.0), 0.15, 0.9).unwrap();
        assert!((p.volume - 2.4740).abs() < 5e-5, "{}", p.volume);
        assert!(!p.overlaps_itself());
        let p = pappus_shell_volume(&straight(2.0), 0.15, 0.5).unwrap();
        assert!((p.volume - 1.42942).abs() < 5e-6, "{}", p.volume);
        assert_eq!(pappus_shell_volume(&straight(2.0), 0.3, 0.3).unwrap().volume, 0.0);
        assert!(pappus_shell_volume(&straight(2.0), 0.5, 0.3).is_err());
    }

    #[test]
    fn pappus_warns_on_tight_bends() {
        let (_, pose) = home_pose();
        let curve = pose_curve(&pose).unwrap();
        assert!(pappus_shell_volume(&curve, 0.15, 1.5).unwrap().overlaps_itself());
        assert!(!pappus_shell_volume(&straight(1.0), 0.15, 1.5).unwrap().overlaps_itself());
    }

    #[test]
    fn vmax_constructions() {
        let (m, pose) = home_pose();
        let curve = pose_curve(&pose).unwrap();
        let tcp = pose.tcp_position();
        let vt = make_vmax(MaxVolumeKind::ToolSphere { radius: 1.5 }, &pose, &m, &curve).unwrap();
        assert_eq!(vt, Solid::sphere(tcp, 1.5).unwrap());
        let vo = make_vmax(MaxVolumeKind::OperatingWorkspace { radius: 1.3 }, &pose, &m, &curve).unwrap();
        assert_eq!(vo, Solid::sphere(Vec3::ZERO, 1.3).unwrap());
        let vs = make_vmax(MaxVolumeKind::Shell { r_shell: 0.9 }, &pose, &m, &curve).unwrap();
        assert_eq!(vs, Solid::tube_shell(curve.clone(), 0.15, 0.9).unwrap());
        assert_eq!(
            make_vmax(MaxVolumeKind::Shell { r_shell: 0.15 }, &pose, &m, &curve),
            Err(CoverageError::ShellInsideRobot { r_shell: 0.15, self_radius: 0.15 })
        );
        assert_eq!(
            make_vmax(MaxVolumeKind::ToolSphere { radius: -1.0 }, &pose, &m, &curve),
            Err(CoverageError::Radius(-1.0))
        );
    }

    #[test]
    fn nested_spheres_union_equals_larger() {
        let m = RobotModel::ur10_like();
        // A single zero-length-free chain folded so the TCP lands on the base is
        // awkward; shift the base instead so the TCP sits at the workspace center.
        let pose = forward_kinematics(&m, &JointState::zeros(6)).unwrap();
        let curve = pose_curve(&pose).unwrap();
        let offset = pose.tcp_position() - pose.link_endpoints[0];
        let kind = MaxVolumeKind::OperatingPlusTool { workspace_radius: 1.3, tool_radius: 1.5 };
        let both = make_vmax_offset(kind, &pose, &m, &curve, offset).unwrap();
        let domain = VoxelDomain::centered(pose.tcp_position(), 3.2, 6).unwrap();
        let larger = Solid::sphere(pose.tcp_position(), 1.5).unwrap();
        assert_eq!(voxelize(&both, &domain).unwrap(), voxelize(&larger, &domain).unwrap());
    }

    fn box_domain() -> VoxelDomain {
        VoxelDomain::centered(Vec3::ZERO, 2.0, 6).unwrap()
    }

    #[test]
    fn coverage_extremes_and_errors() {
        let d = box_domain();
        let vmax = voxelize(&Solid::sphere(Vec3::ZERO, 0.6).unwrap(), &d).unwrap();
        let vr = Octree::empty(d);
        let c = coverage(&vmax, &Octree::empty(d), &vr, SelfVolume::Included).unwrap();
        assert_eq!(c.zeta_percent, 0.0);
        assert_eq!(c.lambda_leftover, c.lambda_vmax);
        let huge = voxelize(&Solid::sphere(Vec3::ZERO, 0.99).unwrap(), &d).unwrap();
        assert_eq!(coverage(&vmax, &huge, &vr, SelfVolume::Included).unwrap().zeta_percent, 100.0);
        assert_eq!(
            coverage(&Octree::empty(d), &huge, &vr, SelfVolume::Included),
            Err(CoverageError::EmptyReference)
        );
        let other = VoxelDomain::centered(Vec3::ZERO, 2.0, 5).unwrap();
        assert!(matches!(
            coverage(&vmax, &Octree::empty(other), &vr, SelfVolume::Included),
            Err(CoverageError::Octree(OctreeError::DomainMismatch))
        ));
    }

    #[test]
    fn cone_inside_robot_covers_nothing() {
        let d = VoxelDomain::centered(Vec3::ZERO, 3.0, 6).unwrap();
        let curve = straight(1.2).transformed(&RigidTransform::from_translation(Vec3::new(0.0, 0.0, -0.6)));
        let vr_solid = Solid::tube_shell(curve.clone(), 0.0, 0.3).unwrap();
        let vr = voxelize(&vr_solid, &d).unwrap();
        let cone = Solid::cone(Vec3::new(0.0, 0.0, -0.2), Vec3::Z, 0.2, 0.3).unwrap();
        let fov = voxelize(&cone, &d).unwrap();
        for vmax in [
            Solid::sphere(Vec3::ZERO, 0.9).unwrap(),
            Solid::tube_shell(curve.clone(), 0.3, 0.7).unwrap(),
        ] {
            let vmax = voxelize(&vmax, &d).unwrap();
            assert_eq!(coverage(&vmax, &fov, &vr, SelfVolume::Included).unwrap().zeta_percent, 0.0);
        }
    }

    #[test]
    fn self_volume_flag() {
        let d = box_domain();
        let vmax = voxelize(&Solid::sphere(Vec3::ZERO, 0.8).unwrap(), &d).unwrap();
        let vr = voxelize(&Solid::sphere(Vec3::ZERO, 0.3).unwrap(), &d).unwrap();
        let fov = voxelize(&Solid::cone(Vec3::ZERO, Vec3::X, 0.4, 0.9).unwrap(), &d).unwrap();
        let a = coverage(&vmax, &fov, &vr, SelfVolume::Included).unwrap();
        let b = coverage(&vmax.subtract(&vr).unwrap(), &fov, &vr, SelfVolume::Excluded).unwrap();
        assert_eq!(a, b);
        let expect = 100.0 * (a.lambda_vmax - a.lambda_leftover) / a.lambda_vmax;
        assert!((a.zeta_percent - expect).abs() < 1e-9);
    }

    #[test]
    fn whole_voxel_translation_keeps_zeta() {
        let d = VoxelDomain::centered(Vec3::ZERO, 4.0, 6).unwrap();
        let l = d.voxel_size();
        let solids = |shift: Vec3| {
            let vmax = Solid::sphere(Vec3::new(0.1, 0.0, 0.0) + shift, 1.0).unwrap();
            let fov = Solid::cone(Vec3::new(-0.3, 0.05, 0.0) + shift, Vec3::new(1.0, 0.2, 0.1), 0.3, 1.2).unwrap();
            let vr = Solid::sphere(Vec3::new(-0.2, 0.0, 0.0) + shift, 0.2).unwrap();
            let v = |s: &Solid| voxelize(s, &d).unwrap();
            coverage(&v(&vmax), &v(&fov), &v(&vr), SelfVolume::Included).unwrap()
        };
        let a = solids(Vec3::ZERO);
        let b = solids(Vec3::new(3.0 * l, -5.0 * l, 2.0 * l));
        assert_eq!(a.reference_voxels, b.reference_voxels);
        assert_eq!(a.zeta_percent, b.zeta_percent);
    }

    #[test]
    fn scene_measure_runs() {
        let m = RobotModel::ur10_like();
        let task = TaskSpec::pick_and_place();
        let pose = forward_kinematics(&m, &task_pose(&m, &task).unwrap()).unwrap();
        let domain = VoxelDomain::centered(Vec3::ZERO, 6.4, 6).unwrap();
        let scene = PoseScene::new(m, pose, domain, VoxelizeOptions::default()).unwrap();
        let cfg = parse_config_label("n1_8_0").unwrap();
        let r = scene.measure(&cfg, MaxVolumeKind::Shell { r_shell: 1.5 }, &task.pose_id()).unwrap();
        assert!(r.zeta_percent() > 0.0 && r.zeta_percent() < 100.0);
        assert_eq!(r.config_label, "n1_8_0");
        assert_eq!(r.warnings.len(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn adding_a_cone_never_lowers_zeta(
            cones in proptest::collection::vec(
                ((-0.8..0.8f64, -0.8..0.8f64, -0.8..0.8f64), (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 0.05..0.6f64, 0.2..0.9f64),
                1..6,
            ),
        ) {
            let d = VoxelDomain::centered(Vec3::ZERO, 4.0, 5).unwrap();
            let vmax = voxelize(&Solid::sphere(Vec3::ZERO, 1.0).unwrap(), &d).unwrap();
            let vr = voxelize(&Solid::sphere(Vec3::ZERO, 0.15).unwrap(), &d).unwrap();
            let mut fov = Octree::empty(d);
            let mut last = 0.0;
            for ((x, y, z), (ax, ay, az), half, h) in cones {
                let axis = Vec3::new(ax, ay, az);
                if axis.norm() < 1e-3 {
                    continue;
                }
                let cone = Solid::cone(Vec3::new(x, y, z), axis, half, h).unwrap();
                fov = fov.merge(&voxelize(&cone, &d).unwrap()).unwrap();
                let z = coverage(&vmax, &fov, &vr, SelfVolume::Included).unwrap().zeta_percent;
                prop_assert!(z >= last);
                last = z;
            }
        }
    }
}
