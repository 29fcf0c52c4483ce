//! Coverage sweeps and their CSV tables.
//!
//! A sweep is a list of (configuration, reference volume) pairs evaluated
//! at one robot pose. Sensor unions and reference volumes are voxelized once
//! each and shared by all pairs. Rows are sorted before writing, so the
//! output does not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tofcov_core::coverage::{coverage, CoverageError, PoseScene, SelfVolume};
use tofcov_core::octree::VoxelizeOptions;
use tofcov_core::sensors::{ConfigLabel, RingLayout, SensorConfig, SensorSpec};
use tofcov_core::{forward_kinematics, task_pose, MaxVolumeKind, Octree, OctreeError, SensorError};

use crate::experiment::ExperimentSpec;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column order of every sweep table.
pub const CSV_HEADER: [&str; 12] = [
    "config",
    "vmax",
    "r_param",
    "theta_deg",
    "zeta_percent",
    "lambda_vmax_m3",
    "lambda_leftover_m3",
    "voxel_size_m",
    "max_depth",
    "pose_phase",
    "warnings",
    "code_version",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Every listed configuration against every listed reference volume.
    Configs,
    /// `n2_16_θ` over the tilt list against every listed reference volume.
    Theta,
    /// `n2_16_θ` over the tilt list and `n3_16_55`, against shells of every
    /// listed radius.
    Shell,
}

impl SweepKind {
    pub fn file_stem(self) -> &'static str {
        match self {
            SweepKind::Configs => "configs",
            SweepKind::Theta => "theta",
            SweepKind::Shell => "shell",
        }
    }
}

/// One CSV row, kept as the exact strings written to disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub config: String,
    pub vmax: String,
    pub r_param: String,
    pub theta_deg: String,
    pub zeta_percent: String,
    pub lambda_vmax_m3: String,
    pub lambda_leftover_m3: String,
    pub voxel_size_m: String,
    pub max_depth: String,
    pub pose_phase: String,
    pub warnings: String,
    pub code_version: String,
}

impl Row {
    pub fn zeta(&self) -> Option<f64> {
        self.zeta_percent.parse().ok()
    }

    pub fn is_complete(&self) -> bool {
        self.zeta().is_some() && !self.warnings.contains("error=")
    }

    /// Identity used to skip finished work when resuming.
    pub fn key(&self) -> String {
        [&self.config, &self.vmax, &self.r_param, &self.voxel_size_m, &self.max_depth, &self.pose_phase]
            .map(String::as_str)
            .join("|")
    }

    fn sort_key(&self) -> (Option<ConfigLabel>, String, u8, String) {
        let rank = match self.vmax.as_str() {
            "VO" => 0,
            "VT" => 1,
            "VOT" => 2,
            "VS" => 3,
            _ => 4,
        };
        (self.config.parse().ok(), self.config.clone(), rank, self.r_param.clone())
    }
}

pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by_cached_key(Row::sort_key);
}

fn fmt_r(r: f64) -> String {
    format!("{r:.4}")
}

/// Common per-row columns for one sweep setting.
struct RowContext {
    voxel_size: String,
    max_depth: String,
    pose_phase: String,
}

impl RowContext {
    fn row(&self, label: ConfigLabel, kind: MaxVolumeKind) -> Row {
        Row {
            config: label.to_string(),
            vmax: kind.tag().to_string(),
            r_param: fmt_r(kind.r_param()),
            theta_deg: label.tilt_deg.to_string(),
            zeta_percent: String::new(),
            lambda_vmax_m3: String::new(),
            lambda_leftover_m3: String::new(),
            voxel_size_m: self.voxel_size.clone(),
            max_depth: self.max_depth.clone(),
            pose_phase: self.pose_phase.clone(),
            warnings: String::new(),
            code_version: CODE_VERSION.to_string(),
        }
    }
}

/// Short machine-readable code for a failed row.
pub fn error_code(e: &CoverageError) -> &'static str {
    match e {
        CoverageError::Radius(_) => "bad-radius",
        CoverageError::ShellInsideRobot { .. } => "shell-inside-robot",
        CoverageError::EmptyReference => "empty-reference",
        CoverageError::FormMismatch { .. } => "form-mismatch",
        CoverageError::Octree(OctreeError::SolidExceedsDomain { .. }) => "exceeds-domain",
        CoverageError::Octree(_) => "octree",
        CoverageError::Geom(_) => "geometry",
        CoverageError::Sensor(SensorError::LinkOutOfRange { .. }) => "link-out-of-range",
        CoverageError::Sensor(_) => "sensor",
    }
}

/// The robot at the experiment pose plus everything needed to place and
/// voxelize sensors.
pub struct Runner {
    pub scene: PoseScene,
    pub layout: RingLayout,
    pub sensor: SensorSpec,
    pub phase: f64,
}

impl Runner {
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        let model = spec.robot()?;
        let task = spec.task.to_task();
        let pose = forward_kinematics(&model, &task_pose(&model, &task)?)?;
        let options = VoxelizeOptions { early_out: spec.early_out };
        let scene = PoseScene::new(model, pose, spec.voxel_domain()?, options)?
            .with_workspace_offset(tofcov_core::Vec3::from_array(spec.workspace_offset));
        Ok(Self { scene, layout: spec.layout.to_layout(), sensor: spec.sensor_spec()?, phase: task.phase })
    }

    pub fn config(&self, label: ConfigLabel) -> Result<SensorConfig, SensorError> {
        SensorConfig::from_label(label, &self.layout, self.sensor)
    }

    fn context(&self) -> RowContext {
        RowContext {
            voxel_size: format!("{:.6}", self.scene.domain.voxel_size()),
            max_depth: self.scene.domain.max_depth().to_string(),
            pose_phase: format!("{:.4}", self.phase),
        }
    }

    /// Rows for every pair, in sorted order. Failures become rows with an
    /// `error=` warning and empty results.
    pub fn evaluate(&self, pairs: &[(ConfigLabel, MaxVolumeKind)], dump: Option<&Path>) -> Result<Vec<Row>> {
        let labels: Vec<ConfigLabel> = pairs.iter().map(|p| p.0).collect::<BTreeSet<_>>().into_iter().collect();
        let mut kinds: Vec<MaxVolumeKind> = Vec::new();
        for (_, k) in pairs {
            if !kinds.contains(k) {
                kinds.push(*k);
            }
        }

        let fovs: BTreeMap<ConfigLabel, Result<Octree, CoverageError>> = labels
            .par_iter()
            .map(|&l| (l, self.config(l).map_err(CoverageError::from).and_then(|c| self.scene.fov(&c))))
            .collect();
        let refs: Vec<Result<(Octree, Vec<String>), CoverageError>> =
            kinds.par_iter().map(|&k| self.scene.reference(k)).collect();

        if let Some(dir) = dump {
            self.dump(dir, &fovs, &kinds, &refs)?;
        }

        let ctx = self.context();
        let mut rows: Vec<Row> = pairs
            .par_iter()
            .map(|&(label, kind)| {
                let mut row = ctx.row(label, kind);
                let k = kinds.iter().position(|x| *x == kind).expect("kind collected above");
                let result = match (&fovs[&label], &refs[k]) {
                    (Ok(fov), Ok((reference, warnings))) => {
                        coverage(reference, fov, self.scene.self_volume(), SelfVolume::Excluded)
                            .map(|c| (c, warnings.clone()))
                    }
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                match result {
                    Ok((c, warnings)) => {
                        row.zeta_percent = format!("{:.6}", c.zeta_percent);
                        row.lambda_vmax_m3 = format!("{:.9}", c.lambda_vmax);
                        row.lambda_leftover_m3 = format!("{:.9}", c.lambda_leftover);
                        row.warnings = warnings.join("; ");
                    }
                    Err(e) => row.warnings = format!("error={}: {e}", error_code(&e)),
                }
                row
            })
            .collect();
        sort_rows(&mut rows);
        Ok(rows)
    }

    fn dump(
        &self,
        dir: &Path,
        fovs: &BTreeMap<ConfigLabel, Result<Octree, CoverageError>>,
        kinds: &[MaxVolumeKind],
        refs: &[Result<(Octree, Vec<String>), CoverageError>],
    ) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let write = |name: String, o: &Octree| {
            let p = dir.join(name);
            fs::write(&p, o.to_bytes()).with_context(|| format!("writing {}", p.display()))
        };
        write("self.oct".into(), self.scene.self_volume())?;
        for (label, fov) in fovs {
            if let Ok(o) = fov {
                write(format!("fov_{label}.oct"), o)?;
            }
        }
        for (kind, r) in kinds.iter().zip(refs) {
            if let Ok((o, _)) = r {
                write(format!("vmax_{}_{}.oct", kind.tag(), fmt_r(kind.r_param())), o)?;
            }
        }
        Ok(())
    }
}

/// The (configuration, reference volume) pairs of a sweep.
pub fn sweep_pairs(spec: &ExperimentSpec, kind: SweepKind) -> Result<Vec<(ConfigLabel, MaxVolumeKind)>> {
    let tilted = || -> Result<Vec<ConfigLabel>> {
        Ok(spec.thetas_deg.iter().map(|&t| ConfigLabel::new(2, 16, t)).collect::<Result<_, _>>()?)
    };
    let (labels, kinds) = match kind {
        SweepKind::Configs => (spec.labels()?, spec.vmax_kinds()),
        SweepKind::Theta => (tilted()?, spec.vmax_kinds()),
        SweepKind::Shell => {
            let mut labels = tilted()?;
            labels.push(ConfigLabel::new(3, 16, 55)?);
            let shells = spec.shell_radii.iter().map(|&r| MaxVolumeKind::Shell { r_shell: r }).collect();
            (labels, shells)
        }
    };
    let mut pairs = Vec::new();
    for &l in &labels {
        for &k in &kinds {
            if !pairs.contains(&(l, k)) {
                pairs.push((l, k));
            }
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub force: bool,
    /// Worker threads; 0 uses the available parallelism.
    pub jobs: usize,
    pub dump_octrees: bool,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub path: PathBuf,
    pub rows: Vec<Row>,
    pub computed: usize,
    pub skipped: usize,
}

pub fn run_in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f))
}

/// Runs a sweep into `<output_dir>/<stem>.csv`, reusing complete rows of an
/// existing table unless `force` is set.
pub fn run_sweep(spec: &ExperimentSpec, kind: SweepKind, opts: &RunOptions) -> Result<SweepOutcome> {
    fs::create_dir_all(&spec.output_dir).with_context(|| format!("creating {}", spec.output_dir.display()))?;
    let path = spec.output_dir.join(format!("{}.csv", kind.file_stem()));
    let runner = Runner::new(spec)?;
    let ctx = runner.context();
    let pairs = sweep_pairs(spec, kind)?;

    let mut kept: Vec<Row> = Vec::new();
    if path.exists() && !opts.force {
        let wanted: BTreeSet<String> = pairs.iter().map(|&(l, k)| ctx.row(l, k).key()).collect();
        kept = read_rows(&path)?
            .into_iter()
            .filter(|r| r.is_complete() && wanted.contains(&r.key()))
            .collect();
    }
    let done: BTreeSet<String> = kept.iter().map(Row::key).collect();
    let todo: Vec<_> = pairs.into_iter().filter(|&(l, k)| !done.contains(&ctx.row(l, k).key())).collect();

    let dump = opts.dump_octrees.then(|| spec.output_dir.join("octrees"));
    let fresh = if todo.is_empty() {
        Vec::new()
    } else {
        run_in_pool(opts.jobs, || runner.evaluate(&todo, dump.as_deref()))??
    };
    let computed = fresh.len();
    let skipped = kept.len();
    let mut rows = kept;
    rows.extend(fresh);
    sort_rows(&mut rows);
    write_rows(&path, &rows)?;
    Ok(SweepOutcome { path, rows, computed, skipped })
}

pub fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != CSV_HEADER {
        anyhow::bail!("{} does not have the sweep table columns", path.display());
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
