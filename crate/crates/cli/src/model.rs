//! Robot model files.
//!
//! ```toml
//! name = "ur10-like"
//! self_occupancy_radius = 0.15
//! home_endpoints = [[0.0, 0.0, 0.0], ...]   # optional, one per endpoint
//!
//! [[joints]]
//! axis = [0.0, 0.0, 1.0]        # unit rotation axis
//! offset = [0.0, 0.0, 0.1273]   # translation to the next endpoint, m
//! offset_rpy = [0.0, 0.0, 0.0]  # optional fixed rotation, rad
//! ```
//!
//! When `home_endpoints` is given, loading checks it against forward
//! kinematics at the zero joint state.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tofcov_core::kinematics::{forward_kinematics, Joint, JointState, RobotModel};
use tofcov_core::{RigidTransform, Vec3};

/// The bundled UR10-like arm.
pub const BUNDLED_MODEL: &str = include_str!("../data/ur10.toml");

const HOME_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub self_occupancy_radius: f64,
    #[serde(default)]
    pub home_endpoints: Vec<[f64; 3]>,
    pub joints: Vec<JointEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointEntry {
    pub axis: [f64; 3],
    pub offset: [f64; 3],
    #[serde(default)]
    pub offset_rpy: [f64; 3],
}

impl ModelFile {
    pub fn into_model(self) -> Result<RobotModel> {
        let joints = self
            .joints
            .iter()
            .map(|j| {
                let [r, p, y] = j.offset_rpy;
                Joint {
                    axis: Vec3::from_array(j.axis),
                    link_offset: RigidTransform::from_rpy(r, p, y).with_translation(Vec3::from_array(j.offset)),
                }
            })
            .collect();
        let mut model = RobotModel::new(self.name, joints, self.self_occupancy_radius)?;
        if !self.home_endpoints.is_empty() {
            let home: Vec<Vec3> = self.home_endpoints.iter().copied().map(Vec3::from_array).collect();
            model = model.with_home_endpoints(home)?;
            let pose = forward_kinematics(&model, &JointState::zeros(model.joint_count()))?;
            for (k, (p, h)) in pose.link_endpoints.iter().zip(model.home_endpoints()).enumerate() {
                if p.distance(*h) > HOME_TOLERANCE {
                    bail!("home endpoint {k} is {h:?} but forward kinematics gives {p:?}");
                }
            }
        }
        Ok(model)
    }
}

pub fn parse_model(text: &str) -> Result<RobotModel> {
    let file: ModelFile = toml::from_str(text).context("parsing robot model")?;
    file.into_model()
}

pub fn load_model(path: &Path) -> Result<RobotModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).with_context(|| format!("in {}", path.display()))
}

pub fn bundled_model() -> RobotModel {
    parse_model(BUNDLED_MODEL).expect("bundled model is valid")
}
