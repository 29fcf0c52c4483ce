use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tofcov::experiment::{ExperimentSpec, Overrides};
use tofcov::probe::run_probe_sweep;
use tofcov::render::render_dir;
use tofcov::sweep::{run_sweep, RunOptions, Runner, SweepKind};
use tofcov_core::coverage::pappus_shell_volume;
use tofcov_core::octree::{voxelize_with, VoxelizeOptions};
use tofcov_core::{Solid, Vec3};

/// Coverage of time-of-flight sensor rings mounted on a robot arm.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Experiment configuration (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Target voxel edge in metres; picks the octree depth.
    #[arg(long, global = true)]
    voxel_size: Option<f64>,
    #[arg(long, global = true)]
    max_depth: Option<u8>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Recompute rows already present in the output table.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the octrees behind every row.
    #[arg(long, global = true)]
    dump_octrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Every configuration against every reference volume.
    SweepConfigs,
    /// Two-ring configurations over the tilt grid.
    SweepTheta,
    /// Shell references over the tilt grid and shell radii.
    SweepShell,
    /// Minimum-distance error with a moving spherical object.
    Probe,
    /// Voxelized volume of a single solid next to its closed form.
    Volume {
        #[arg(value_enum)]
        shape: Shape,
        /// Sphere radius or outer tube radius.
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
    },
    /// Charts and pivot tables from the CSVs in the output directory.
    Render,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Shape {
    /// One sensor cone.
    Cone,
    Sphere,
    /// Shell around the task pose between the self-occupancy and outer radius.
    Tube,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut spec = match &cli.config {
        Some(p) => ExperimentSpec::load(p)?,
        None => ExperimentSpec::default(),
    };
    spec.apply(&Overrides {
        voxel_size: cli.voxel_size,
        max_depth: cli.max_depth,
        output_dir: cli.out.clone(),
        seed: cli.seed,
    })?;
    let opts = RunOptions { force: cli.force, jobs: cli.jobs, dump_octrees: cli.dump_octrees };

    let kind = match cli.command {
        Command::SweepConfigs => SweepKind::Configs,
        Command::SweepTheta => SweepKind::Theta,
        Command::SweepShell => SweepKind::Shell,
        Command::Probe => {
            let (path, rows) = run_probe_sweep(&spec, cli.jobs)?;
            for r in &rows {
                println!("{}: rmse {} m, seen {}", r.config, r.rmse_m, r.seen_fraction);
            }
            println!("wrote {}", path.display());
            return Ok(());
        }
        Command::Volume { shape, radius } => return volume(&spec, shape, radius),
        Command::Render => {
            for p in render_dir(&spec.output_dir)? {
                println!("wrote {}", p.display());
            }
            return Ok(());
        }
    };
    let outcome = run_sweep(&spec, kind, &opts)?;
    let failed = outcome.rows.iter().filter(|r| !r.is_complete()).count();
    println!(
        "wrote {} ({} computed, {} reused, {} failed)",
        outcome.path.display(),
        outcome.computed,
        outcome.skipped,
        failed
    );
    Ok(())
}

fn volume(spec: &ExperimentSpec, shape: Shape, radius: f64) -> Result<()> {
    let domain = spec.voxel_domain()?;
    let center = domain.bounds().center();
    let (solid, exact) = match shape {
        Shape::Cone => {
            let s = spec.sensor_spec()?;
            let apex = center - Vec3::new(0.0, 0.0, s.range() / 2.0);
            let cone = Solid::cone(apex, Vec3::new(0.0, 0.0, 1.0), s.half_angle(), s.range())?;
            let Solid::Cone(c) = &cone else { unreachable!() };
            let v = c.analytic_volume();
            (cone, v)
        }
        Shape::Sphere => {
            let sphere = Solid::sphere(center, radius)?;
            (sphere, 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3))
        }
        Shape::Tube => {
            let scene = Runner::new(spec)?.scene;
            let curve = scene.curve;
            let inner = scene.model.self_occupancy_radius();
            if radius <= inner {
                bail!("outer radius {radius} must exceed the self-occupancy radius {inner}");
            }
            let v = pappus_shell_volume(&curve, inner, radius)?;
            if v.overlaps_itself() {
                eprintln!("warning: the tube overlaps itself; the closed form over-counts");
            }
            (Solid::tube_shell(curve, inner, radius)?, v.volume)
        }
    };
    let tree = voxelize_with(&solid, &domain, VoxelizeOptions { early_out: spec.early_out })?;
    let lambda = tree.volume();
    println!("voxel_size_m {:.6}", domain.voxel_size());
    println!("max_depth {}", domain.max_depth());
    println!("voxelized_m3 {lambda:.9}");
    println!("closed_form_m3 {exact:.9}");
    println!("relative_error {:.6}", (lambda - exact) / exact);
    Ok(())
}
