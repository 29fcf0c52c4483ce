//! Sensing-volume coverage of on-robot time-of-flight (ToF) sensor rings.
//!
//! The crate is `no_std` (with `alloc`) and purely computational: geometry,
//! forward kinematics, sensor ring placement, octree volumetry and the
//! coverage ratio. File formats, sweeps and the command line live in the
//! `tofcov` companion crate.
//!
//! The pipeline for one measurement is:
//!
//! 1. pose the robot with [`kinematics::forward_kinematics`],
//! 2. build the pose curve through the link endpoints
//!    ([`geom::PiecewiseBezierCurve`]),
//! 3. place the sensors of a ring configuration ([`sensors::place_sensors`])
//!    and form the union of their cones,
//! 4. voxelize the reference volume, the sensor union and the robot
//!    self-volume into octrees ([`octree::voxelize`]),
//! 5. compute the coverage ratio ([`coverage::coverage`]).

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod coverage;
pub mod geom;
pub mod kinematics;
mod math;
pub mod octree;
pub mod probe;
pub mod sensors;

pub use geom::{Aabb, GeomError, PiecewiseBezierCurve, RigidTransform, Solid, Vec3};
pub use coverage::{coverage, make_vmax, pappus_shell_volume, Coverage, CoverageError, CoverageResult, MaxVolumeKind, PoseScene};
pub use octree::{Octree, OctreeError, VoxelDomain};
pub use kinematics::{forward_kinematics, task_pose, JointState, KinematicsError, PoseSnapshot, RobotModel, TaskSpec};
pub use sensors::{fov_union, parse_config_label, place_sensors, ConfigLabel, PlacedSensor, RingLayout, RingPlacement, SensorConfig, SensorError, SensorSpec, TiltToward};
pub use probe::{run_probe, ProbeError, ProbeSample, ProbeStats};
