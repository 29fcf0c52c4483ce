//! Minimum-distance probe: a spherical object visits seeded random
//! waypoints around the robot and every configuration reports its error
//! against the true surface-to-robot distance.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tofcov_core::probe::run_probe;
use tofcov_core::sensors::{place_sensors, ConfigLabel};
use tofcov_core::{PiecewiseBezierCurve, ProbeStats, Vec3};

use crate::experiment::ExperimentSpec;
use crate::sweep::{run_in_pool, Runner, CODE_VERSION};

pub const PROBE_HEADER: [&str; 10] = [
    "config",
    "rmse_m",
    "max_error_m",
    "rmse_seen_m",
    "seen_fraction",
    "waypoints",
    "object_radius_m",
    "seed",
    "pose_phase",
    "code_version",
];

/// Marker for statistics that do not exist (nothing was seen).
pub const NOT_APPLICABLE: &str = "NA";

/// `count` points whose distance from the curve lies in `band`, drawn
/// uniformly from the band's bounding box by rejection.
pub fn band_waypoints(curve: &PiecewiseBezierCurve, band: [f64; 2], count: usize, seed: u64) -> Vec<Vec3> {
    let [lo, hi] = band;
    let (mut min, mut max) = (curve.start(), curve.start());
    for p in curve.samples() {
        min = min.min(*p);
        max = max.max(*p);
    }
    let pad = Vec3::new(hi, hi, hi);
    let (min, max) = (min - pad, max + pad);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Vec3::new(rng.gen_range(min.x..max.x), rng.gen_range(min.y..max.y), rng.gen_range(min.z..max.z));
        let d = curve.closest_point(p).distance;
        if (lo..=hi).contains(&d) {
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub config: String,
    pub rmse_m: String,
    pub max_error_m: String,
    pub rmse_seen_m: String,
    pub seen_fraction: String,
    pub waypoints: usize,
    pub object_radius_m: String,
    pub seed: u64,
    pub pose_phase: String,
    pub code_version: String,
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NOT_APPLICABLE.to_string(), |v| format!("{v:.6}"))
}

/// Probe statistics per configuration, in the order listed.
pub fn probe_stats(spec: &ExperimentSpec, runner: &Runner) -> Result<Vec<(ConfigLabel, ProbeStats)>> {
    let scene = &runner.scene;
    let waypoints = band_waypoints(&scene.curve, spec.probe.band, spec.probe.waypoints, spec.seed);
    let labels: Vec<ConfigLabel> = spec.probe.configs.iter().map(|c| c.parse()).collect::<Result<_, _>>()?;
    labels
        .par_iter()
        .map(|&label| {
            let sensors = place_sensors(&runner.config(label)?, &scene.pose)?;
            let (_, stats) = run_probe(&sensors, &runner.sensor, &scene.curve, &waypoints, spec.probe.object_radius)?;
            Ok((label, stats))
        })
        .collect()
}

pub fn run_probe_sweep(spec: &ExperimentSpec, jobs: usize) -> Result<(PathBuf, Vec<ProbeRow>)> {
    fs::create_dir_all(&spec.output_dir).with_context(|| format!("creating {}", spec.output_dir.display()))?;
    let runner = Runner::new(spec)?;
    let stats = run_in_pool(jobs, || probe_stats(spec, &runner))??;
    let rows: Vec<ProbeRow> = stats
        .into_iter()
        .map(|(label, s)| ProbeRow {
            config: label.to_string(),
            rmse_m: opt(s.rmse),
            max_error_m: opt(s.max_error),
            rmse_seen_m: opt(s.rmse_seen),
            seen_fraction: format!("{:.4}", s.seen_fraction()),
            waypoints: s.waypoints,
            object_radius_m: format!("{:.4}", spec.probe.object_radius),
            seed: spec.seed,
            pose_phase: format!("{:.4}", runner.phase),
            code_version: CODE_VERSION.to_string(),
        })
        .collect();
    let path = spec.output_dir.join("probe.csv");
    write_probe_rows(&path, &rows)?;
    Ok((path, rows))
}

pub fn write_probe_rows(path: &Path, rows: &[ProbeRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    if rows.is_empty() {
        w.write_record(PROBE_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
