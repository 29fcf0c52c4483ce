//! Serial-chain robot model and forward kinematics.
//!
//! Joint `k` rotates about its axis (expressed in the frame reached so far)
//! and then applies its fixed `link_offset` to reach the next link
//! endpoint. The chain starts at the model's base frame, so the endpoints
//! `P_0 … P_n` are the base origin followed by the end of every link, and
//! the last one is the tool control point (TCP).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::geom::{RigidTransform, Vec3};

/// Radius of the self-occupancy shell of the bundled arm, m.
pub const DEFAULT_SELF_OCCUPANCY_RADIUS: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("robot model has no joints")]
    NoJoints,
    #[error("joint {0} axis is not unit length")]
    AxisNotUnit(usize),
    #[error("self occupancy radius must be positive, got {0}")]
    SelfOccupancyRadius(f64),
    #[error("expected {expected} joint values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("joint values must be finite")]
    NonFinite,
    #[error("task phase {0} outside [0, 1]")]
    Phase(f64),
    #[error("home endpoints list has {got} entries, expected {expected}")]
    HomeEndpoints { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    /// Unit rotation axis in the frame of the preceding link.
    pub axis: Vec3,
    /// Fixed transform from the joint frame to the next link endpoint.
    pub link_offset: RigidTransform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel {
    name: String,
    base: RigidTransform,
    joints: Vec<Joint>,
    self_occupancy_radius: f64,
    home_endpoints: Vec<Vec3>,
}

impl RobotModel {
    pub fn new(
        name: impl Into<String>,
        joints: Vec<Joint>,
        self_occupancy_radius: f64,
    ) -> Result<Self, KinematicsError> {
        if joints.is_empty() {
            return Err(KinematicsError::NoJoints);
        }
        for (i, j) in joints.iter().enumerate() {
            if !j.axis.is_finite() || (j.axis.norm() - 1.0).abs() > 1e-9 {
                return Err(KinematicsError::AxisNotUnit(i));
            }
        }
        if !(self_occupancy_radius > 0.0 && self_occupancy_radius.is_finite()) {
            return Err(KinematicsError::SelfOccupancyRadius(self_occupancy_radius));
        }
        Ok(Self {
            name: name.into(),
            base: RigidTransform::IDENTITY,
            joints,
            self_occupancy_radius,
            home_endpoints: Vec::new(),
        })
    }

    /// Reference endpoint positions at the zero joint state, checked by
    /// tests and model loaders.
    pub fn with_home_endpoints(mut self, home: Vec<Vec3>) -> Result<Self, KinematicsError> {
        if home.len() != self.link_endpoint_count() {
            return Err(KinematicsError::HomeEndpoints { expected: self.link_endpoint_count(), got: home.len() });
        }
        self.home_endpoints = home;
        Ok(self)
    }

    /// Mounts the robot at `base` instead of the world origin.
    pub fn with_base(mut self, base: RigidTransform) -> Self {
        self.base = base;
        self
    }

    /// A UR10-like six-axis arm: 0.1273 m base column, 0.612 m upper arm,
    /// 0.5723 m forearm and a three-axis wrist of 0.1639, 0.1157 and
    /// 0.0922 m. At the zero state the arm points straight up.
    pub fn ur10_like() -> Self {
        let j = |axis: Vec3, t: [f64; 3]| Joint {
            axis,
            link_offset: RigidTransform::from_translation(Vec3::from_array(t)),
        };
        let joints = alloc::vec![
            j(Vec3::Z, [0.0, 0.0, 0.1273]),
            j(Vec3::Y, [0.0, 0.0, 0.612]),
            j(Vec3::Y, [0.0, 0.0, 0.5723]),
            j(Vec3::Y, [0.0, 0.1639, 0.0]),
            j(Vec3::Z, [0.0, 0.0, 0.1157]),
            j(Vec3::Y, [0.0, 0.0922, 0.0]),
        ];
        let home = alloc::vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.0, 0.0, 0.1273),
            Vec3::new(0.0, 0.0, 0.7393),
            Vec3::new(0.0, 0.0, 1.3116),
            Vec3::new(0.0, 0.1639, 1.3116),
            Vec3::new(0.0, 0.1639, 1.4273),
            Vec3::new(0.0, 0.2561, 1.4273),
        ];
        Self::new("ur10-like", joints, DEFAULT_SELF_OCCUPANCY_RADIUS)
            .and_then(|m| m.with_home_endpoints(home))
            .expect("bundled model is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &RigidTransform {
        &self.base
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    /// `joints + 1` (base origin plus one endpoint per link).
    pub fn link_endpoint_count(&self) -> usize {
        self.joints.len() + 1
    }

    pub fn self_occupancy_radius(&self) -> f64 {
        self.self_occupancy_radius
    }

    pub fn home_endpoints(&self) -> &[Vec3] {
        &self.home_endpoints
    }

    /// Fixed distance between consecutive endpoints.
    pub fn link_lengths(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.link_offset.translation.norm()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    angles: Vec<f64>,
}

impl JointState {
    pub fn new(angles: Vec<f64>) -> Result<Self, KinematicsError> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(KinematicsError::NonFinite);
        }
        Ok(Self { angles })
    }

    pub fn zeros(n: usize) -> Self {
        Self { angles: alloc::vec![0.0; n] }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Robot geometry at one joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSnapshot {
    /// `P_0 … P_n`: base origin, then the far end of every link.
    pub link_endpoints: Vec<Vec3>,
    /// Frame rigidly attached to link `k`, spanning `P_k → P_{k+1}`.
    pub link_frames: Vec<RigidTransform>,
    pub tcp_frame: RigidTransform,
}

impl PoseSnapshot {
    pub fn link_count(&self) -> usize {
        self.link_frames.len()
    }

    /// Unit direction of link `k` from its proximal to its distal end.
    pub fn link_direction(&self, k: usize) -> Option<Vec3> {
        let a = *self.link_endpoints.get(k)?;
        let b = *self.link_endpoints.get(k + 1)?;
        (b - a).try_normalize()
    }

    pub fn tcp_position(&self) -> Vec3 {
        self.tcp_frame.translation
    }

    pub fn transformed(&self, t: &RigidTransform) -> PoseSnapshot {
        PoseSnapshot {
            link_endpoints: self.link_endpoints.iter().map(|p| t.transform_point(*p)).collect(),
            link_frames: self.link_frames.iter().map(|f| t.compose(f)).collect(),
            tcp_frame: t.compose(&self.tcp_frame),
        }
    }
}

/// Product-of-transforms forward kinematics.
pub fn forward_kinematics(model: &RobotModel, q: &JointState) -> Result<PoseSnapshot, KinematicsError> {
    if q.angles.len() != model.joints.len() {
        return Err(KinematicsError::Arity { expected: model.joints.len(), got: q.angles.len() });
    }
    let mut frame = model.base;
    let mut link_endpoints = Vec::with_capacity(model.link_endpoint_count());
    let mut link_frames = Vec::with_capacity(model.joints.len());
    link_endpoints.push(frame.translation);
    for (joint, &angle) in model.joints.iter().zip(&q.angles) {
        let joint_frame = frame.compose(&RigidTransform::rotation_about_unit(joint.axis, angle));
        link_frames.push(joint_frame);
        frame = joint_frame.compose(&joint.link_offset);
        link_endpoints.push(frame.translation);
    }
    Ok(PoseSnapshot { link_endpoints, link_frames, tcp_frame: frame })
}

/// A pick-and-place task: the base joint sweeps from `start_base` to
/// `end_base` while the remaining joints hold `posture`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub start_base: f64,
    pub end_base: f64,
    /// Angles of joints `1..n`, held fixed during the sweep.
    pub posture: Vec<f64>,
    /// Fraction of the sweep, `0.5` being the fastest and least safe pose.
    pub phase: f64,
}

/// Phase of the base sweep used for every coverage measurement.
pub const LEAST_SAFE_PHASE: f64 = 0.5;

impl TaskSpec {
    /// 180° base sweep with the default reaching posture, at mid-sweep.
    pub fn pick_and_place() -> Self {
        Self {
            start_base: 0.0,
            end_base: core::f64::consts::PI,
            posture: DEFAULT_POSTURE.to_vec(),
            phase: LEAST_SAFE_PHASE,
        }
    }

    pub fn at_phase(&self, phase: f64) -> Self {
        Self { phase, ..self.clone() }
    }

    /// Identifier used to label results, e.g. `"base0-180@0.50"`.
    pub fn pose_id(&self) -> String {
        let mut s = String::from("base");
        s.push_str(&fmt_deg(self.start_base));
        s.push('-');
        s.push_str(&fmt_deg(self.end_base));
        s.push('@');
        s.push_str(&fmt_fixed2(self.phase));
        s
    }
}

fn fmt_deg(rad: f64) -> String {
    (crate::math::round(rad.to_degrees()) as i64).to_string()
}

fn fmt_fixed2(x: f64) -> String {
    let hundredths = crate::math::round(x * 100.0) as i64;
    let mut s = (hundredths / 100).to_string();
    s.push('.');
    let frac = (hundredths % 100).abs();
    if frac < 10 {
        s.push('0');
    }
    s.push_str(&frac.to_string());
    s
}

/// Shoulder, elbow and wrist angles of the default reaching posture (rad).
pub const DEFAULT_POSTURE: [f64; 5] = [1.308_996_938_995_747_2, 1.047_197_551_196_597_7, 0.0, 0.0, 0.0];

/// Joint state at the task's phase; the base angle is interpolated linearly.
pub fn task_pose(model: &RobotModel, task: &TaskSpec) -> Result<JointState, KinematicsError> {
    if !(0.0..=1.0).contains(&task.phase) {
        return Err(KinematicsError::Phase(task.phase));
    }
    let expected = model.joint_count() - 1;
    if task.posture.len() != expected {
        return Err(KinematicsError::Arity { expected, got: task.posture.len() });
    }
    let base = task.start_base + task.phase * (task.end_base - task.start_base);
    let mut angles = Vec::with_capacity(model.joint_count());
    angles.push(base);
    angles.extend_from_slice(&task.posture);
    JointState::new(angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn zero_state_matches_home_constants() {
        let m = RobotModel::ur10_like();
        let pose = forward_kinematics(&m, &JointState::zeros(6)).unwrap();
        assert_eq!(pose.link_endpoints.len(), 7);
        for (p, h) in pose.link_endpoints.iter().zip(m.home_endpoints()) {
            assert!((*p - *h).norm() < 1e-12, "{p:?} vs {h:?}");
        }
        assert_eq!(pose.tcp_position(), pose.link_endpoints[6]);
    }

    #[test]
    fn base_half_turn_preserves_radial_distance() {
        let m = RobotModel::ur10_like();
        let mut q = alloc::vec![0.3, 0.7, -1.1, 0.4, 0.9, -0.2];
        let a = forward_kinematics(&m, &JointState::new(q.clone()).unwrap()).unwrap();
        q[0] += PI;
        let b = forward_kinematics(&m, &JointState::new(q).unwrap()).unwrap();
        for (p, r) in a.link_endpoints.iter().zip(&b.link_endpoints) {
            assert!((p.norm() - r.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn arity_and_validation_errors() {
        let m = RobotModel::ur10_like();
        assert_eq!(
            forward_kinematics(&m, &JointState::zeros(5)),
            Err(KinematicsError::Arity { expected: 6, got: 5 })
        );
        assert_eq!(JointState::new(alloc::vec![f64::NAN]), Err(KinematicsError::NonFinite));
        assert_eq!(RobotModel::new("x", alloc::vec![], 0.1), Err(KinematicsError::NoJoints));
        let bad = Joint { axis: Vec3::new(0.0, 0.0, 2.0), link_offset: RigidTransform::IDENTITY };
        assert_eq!(RobotModel::new("x", alloc::vec![bad], 0.1), Err(KinematicsError::AxisNotUnit(0)));
        let ok = Joint { axis: Vec3::Z, link_offset: RigidTransform::IDENTITY };
        assert!(RobotModel::new("x", alloc::vec![ok], 0.0).is_err());
    }

    #[test]
    fn task_phases() {
        let m = RobotModel::ur10_like();
        let t = TaskSpec::pick_and_place();
        let q0 = task_pose(&m, &t.at_phase(0.0)).unwrap();
        assert_eq!(q0.angles()[0], 0.0);
        assert_eq!(&q0.angles()[1..], &DEFAULT_POSTURE);
        assert_eq!(task_pose(&m, &t.at_phase(0.5)).unwrap().angles()[0], PI / 2.0);
        assert_eq!(task_pose(&m, &t.at_phase(1.0)).unwrap().angles()[0], PI);
        assert_eq!(task_pose(&m, &t.at_phase(1.5)), Err(KinematicsError::Phase(1.5)));
        assert!(task_pose(&m, &t.at_phase(-0.01)).is_err());
        assert_eq!(t.pose_id(), "base0-180@0.50");
    }

    #[test]
    fn fk_is_deterministic() {
        let m = RobotModel::ur10_like();
        let q = JointState::new(alloc::vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(forward_kinematics(&m, &q).unwrap(), forward_kinematics(&m, &q).unwrap());
    }

    fn arb_q() -> impl Strategy<Value = JointState> {
        proptest::collection::vec(-PI..PI, 6).prop_map(|v| JointState::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn link_lengths_are_conserved(q in arb_q()) {
            let m = RobotModel::ur10_like();
            let pose = forward_kinematics(&m, &q).unwrap();
            for (w, len) in pose.link_endpoints.windows(2).zip(m.link_lengths()) {
                prop_assert!((w[0].distance(w[1]) - len).abs() <= 1e-9);
            }
        }
    }

    proptest! {
        #[test]
        fn base_transform_moves_every_endpoint(
            q in arb_q(),
            ang in -3.0..3.0f64,
            t in (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64),
        ) {
            let base = RigidTransform::from_axis_angle(Vec3::new(0.3, -0.5, 0.8), ang)
                .unwrap()
                .with_translation(Vec3::new(t.0, t.1, t.2));
            let m = RobotModel::ur10_like();
            let a = forward_kinematics(&m, &q).unwrap();
            let b = forward_kinematics(&m.clone().with_base(base), &q).unwrap();
            for (p, r) in a.link_endpoints.iter().zip(&b.link_endpoints) {
                prop_assert!((base.transform_point(*p) - *r).norm() <= 1e-9);
            }
            prop_assert!(a.transformed(&base).tcp_frame.approx_eq(&b.tcp_frame, 1e-9));
        }
    }
}
