//! Experiment configuration files.
//!
//! Every field has a default, so an empty file is a valid experiment. The
//! full schema with its defaults:
//!
//! ```toml
//! robot_model = "data/ur10.toml"   # omit to use the bundled UR10-like arm
//! output_dir = "results"
//! seed = 2024
//! early_out = true                 # faster voxelization near the leaves
//! configs = ["n1_8_0", "n1_16_0", "n2_16_10", "n2_16_25", "n3_16_55"]
//! thetas_deg = [0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60]
//! shell_radii = [0.5, 0.7, 0.9, 1.1, 1.5]
//! workspace_offset = [0.0, 0.0, 0.0]
//!
//! [task]
//! start_base_deg = 0.0
//! end_base_deg = 180.0
//! posture_deg = [...]              # joints 2..n, see `TaskSpec::pick_and_place`
//! phase = 0.5
//!
//! [domain]
//! center = [0.0, 0.0, 0.0]
//! edge_length = 6.4
//! max_depth = 8
//!
//! [[vmax]]
//! kind = "operating_workspace"     # or tool_sphere, operating_plus_tool, shell
//! radius = 1.3                     # tool_radius / r_shell for the other kinds
//!
//! [sensor]
//! range = 1.5
//! fov_deg = 25.0
//!
//! [layout]                         # see `RingLayout`
//! end_axial = [0.2, 0.8]
//! end_tilt = "inward"              # or "outward"
//! ...
//!
//! [probe]
//! configs = ["n1_8_0", "n2_16_25"]
//! object_radius = 0.1
//! waypoints = 200
//! band = [0.3, 1.5]
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tofcov_core::coverage::SHELL_SWEEP_RADII;
use tofcov_core::kinematics::{TaskSpec, DEFAULT_POSTURE, LEAST_SAFE_PHASE};
use tofcov_core::sensors::{ConfigLabel, RingLayout, SensorSpec, TiltToward};
use tofcov_core::{MaxVolumeKind, RobotModel, Vec3, VoxelDomain};

use crate::model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub robot_model: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub early_out: bool,
    pub configs: Vec<String>,
    pub thetas_deg: Vec<u32>,
    pub shell_radii: Vec<f64>,
    pub workspace_offset: [f64; 3],
    pub task: TaskEntry,
    pub domain: DomainEntry,
    pub vmax: Vec<VmaxEntry>,
    pub sensor: SensorEntry,
    pub layout: LayoutEntry,
    pub probe: ProbeEntry,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            robot_model: None,
            output_dir: PathBuf::from("results"),
            seed: 2024,
            early_out: true,
            configs: ["n1_8_0", "n1_16_0", "n2_16_10", "n2_16_25", "n3_16_55"].map(String::from).to_vec(),
            thetas_deg: (0..=60).step_by(5).collect(),
            shell_radii: SHELL_SWEEP_RADII.to_vec(),
            workspace_offset: [0.0; 3],
            task: TaskEntry::default(),
            domain: DomainEntry::default(),
            vmax: VmaxEntry::defaults(),
            sensor: SensorEntry::default(),
            layout: LayoutEntry::default(),
            probe: ProbeEntry::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskEntry {
    pub start_base_deg: f64,
    pub end_base_deg: f64,
    pub posture_deg: Vec<f64>,
    pub phase: f64,
}

impl Default for TaskEntry {
    fn default() -> Self {
        Self {
            start_base_deg: 0.0,
            end_base_deg: 180.0,
            posture_deg: DEFAULT_POSTURE.iter().map(|q| q.to_degrees()).collect(),
            phase: LEAST_SAFE_PHASE,
        }
    }
}

impl TaskEntry {
    pub fn to_task(&self) -> TaskSpec {
        TaskSpec {
            start_base: self.start_base_deg.to_radians(),
            end_base: self.end_base_deg.to_radians(),
            posture: self.posture_deg.iter().map(|q| q.to_radians()).collect(),
            phase: self.phase,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainEntry {
    pub center: [f64; 3],
    pub edge_length: f64,
    pub max_depth: u8,
}

impl Default for DomainEntry {
    /// 6.4 m cube around the base at depth 8: 0.025 m voxels.
    fn default() -> Self {
        Self { center: [0.0; 3], edge_length: 6.4, max_depth: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VmaxEntry {
    OperatingWorkspace { radius: f64 },
    ToolSphere { radius: f64 },
    OperatingPlusTool { radius: f64, tool_radius: f64 },
    Shell { r_shell: f64 },
}

impl VmaxEntry {
    pub fn defaults() -> Vec<VmaxEntry> {
        MaxVolumeKind::defaults().into_iter().map(VmaxEntry::from).collect()
    }
}

impl From<MaxVolumeKind> for VmaxEntry {
    fn from(k: MaxVolumeKind) -> Self {
        match k {
            MaxVolumeKind::OperatingWorkspace { radius } => VmaxEntry::OperatingWorkspace { radius },
            MaxVolumeKind::ToolSphere { radius } => VmaxEntry::ToolSphere { radius },
            MaxVolumeKind::OperatingPlusTool { workspace_radius, tool_radius } => {
                VmaxEntry::OperatingPlusTool { radius: workspace_radius, tool_radius }
            }
            MaxVolumeKind::Shell { r_shell } => VmaxEntry::Shell { r_shell },
        }
    }
}

impl From<VmaxEntry> for MaxVolumeKind {
    fn from(e: VmaxEntry) -> Self {
        match e {
            VmaxEntry::OperatingWorkspace { radius } => MaxVolumeKind::OperatingWorkspace { radius },
            VmaxEntry::ToolSphere { radius } => MaxVolumeKind::ToolSphere { radius },
            VmaxEntry::OperatingPlusTool { radius, tool_radius } => {
                MaxVolumeKind::OperatingPlusTool { workspace_radius: radius, tool_radius }
            }
            VmaxEntry::Shell { r_shell } => MaxVolumeKind::Shell { r_shell },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorEntry {
    pub range: f64,
    pub fov_deg: f64,
}

impl Default for SensorEntry {
    fn default() -> Self {
        let s = SensorSpec::default();
        Self { range: s.range(), fov_deg: s.fov_full_angle().to_degrees() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndTilt {
    /// End rings lean toward each other.
    Inward,
    /// End rings lean away from each other, toward the link ends.
    Outward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutEntry {
    pub shoulder_link: usize,
    pub elbow_link: usize,
    pub center_axial: f64,
    pub end_axial: [f64; 2],
    pub end_tilt: EndTilt,
    pub stagger_end_rings: bool,
    pub ring_radius: f64,
    pub tool_link: usize,
    pub tool_axial: f64,
    pub tool_sensor_count: u32,
    pub tool_ring_radius: f64,
}

impl Default for LayoutEntry {
    fn default() -> Self {
        let l = RingLayout::default();
        let end_tilt = match l.first_end_tilt {
            TiltToward::Distal => EndTilt::Inward,
            TiltToward::Proximal => EndTilt::Outward,
        };
        Self {
            shoulder_link: l.shoulder_link,
            elbow_link: l.elbow_link,
            center_axial: l.center_axial,
            end_axial: l.end_axial,
            end_tilt,
            stagger_end_rings: l.stagger_end_rings,
            ring_radius: l.ring_radius,
            tool_link: l.tool_link,
            tool_axial: l.tool_axial,
            tool_sensor_count: l.tool_sensor_count,
            tool_ring_radius: l.tool_ring_radius,
        }
    }
}

impl LayoutEntry {
    pub fn to_layout(&self) -> RingLayout {
        let [a, b] = self.end_axial;
        // Inward means the ring nearer the proximal end leans distally.
        let proximal_first = a <= b;
        let first_end_tilt = match (self.end_tilt, proximal_first) {
            (EndTilt::Inward, true) | (EndTilt::Outward, false) => TiltToward::Distal,
            _ => TiltToward::Proximal,
        };
        RingLayout {
            shoulder_link: self.shoulder_link,
            elbow_link: self.elbow_link,
            center_axial: self.center_axial,
            end_axial: self.end_axial,
            first_end_tilt,
            stagger_end_rings: self.stagger_end_rings,
            ring_radius: self.ring_radius,
            tool_link: self.tool_link,
            tool_axial: self.tool_axial,
            tool_sensor_count: self.tool_sensor_count,
            tool_ring_radius: self.tool_ring_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeEntry {
    pub configs: Vec<String>,
    pub object_radius: f64,
    pub waypoints: usize,
    /// Distance band of waypoint centers from the pose curve, m.
    pub band: [f64; 2],
}

impl Default for ProbeEntry {
    fn default() -> Self {
        Self {
            configs: ["n1_8_0", "n2_16_25"].map(String::from).to_vec(),
            object_radius: 0.1,
            waypoints: 200,
            band: [0.3, 1.5],
        }
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub voxel_size: Option<f64>,
    pub max_depth: Option<u8>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).context("parsing experiment config")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut spec = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        if let Some(m) = &spec.robot_model {
            if m.is_relative() {
                if let Some(dir) = path.parent() {
                    spec.robot_model = Some(dir.join(m));
                }
            }
        }
        Ok(spec)
    }

    /// Applies command-line overrides. A voxel size sets the depth so that
    /// `edge / 2^depth` does not exceed it, growing the edge to keep the
    /// voxel size exact.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(d) = o.max_depth {
            self.domain.max_depth = d;
        }
        if let Some(l) = o.voxel_size {
            let d = VoxelDomain::with_voxel_size(Vec3::from_array(self.domain.center), l, self.domain.edge_length)?;
            self.domain.edge_length = d.edge_length();
            self.domain.max_depth = d.max_depth();
        }
        if let Some(out) = &o.output_dir {
            self.output_dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() {
            bail!("no configurations listed");
        }
        if self.vmax.is_empty() {
            bail!("no reference volumes listed");
        }
        for c in self.configs.iter().chain(&self.probe.configs) {
            c.parse::<ConfigLabel>().with_context(|| format!("configuration {c:?}"))?;
        }
        for &t in &self.thetas_deg {
            ConfigLabel::new(2, 16, t)?;
        }
        self.voxel_domain()?;
        self.sensor_spec()?;
        let [lo, hi] = self.probe.band;
        if !(0.0 <= lo && lo < hi) {
            bail!("probe band must satisfy 0 <= low < high, got [{lo}, {hi}]");
        }
        if self.probe.waypoints == 0 {
            bail!("probe needs at least one waypoint");
        }
        if self.probe.object_radius.is_nan() || self.probe.object_radius <= 0.0 {
            bail!("probe object radius must be positive");
        }
        Ok(())
    }

    pub fn voxel_domain(&self) -> Result<VoxelDomain> {
        let d = &self.domain;
        Ok(VoxelDomain::centered(Vec3::from_array(d.center), d.edge_length, d.max_depth)?)
    }

    pub fn sensor_spec(&self) -> Result<SensorSpec> {
        Ok(SensorSpec::new(self.sensor.range, self.sensor.fov_deg.to_radians())?)
    }

    pub fn robot(&self) -> Result<RobotModel> {
        match &self.robot_model {
            Some(p) => model::load_model(p),
            None => Ok(model::bundled_model()),
        }
    }

    pub fn labels(&self) -> Result<Vec<ConfigLabel>> {
        Ok(self.configs.iter().map(|c| c.parse()).collect::<Result<_, _>>()?)
    }

    pub fn vmax_kinds(&self) -> Vec<MaxVolumeKind> {
        self.vmax.iter().copied().map(MaxVolumeKind::from).collect()
    }
}
