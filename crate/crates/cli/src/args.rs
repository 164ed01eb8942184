use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracflow::{Axis, Direction, GammaTable, PenaltyStrategy};

use crate::directions::{parse_direction, parse_triple, NormalSet};

#[derive(Debug, Parser)]
#[command(name = "fracflow", version, about = "Effective crack energy of periodic voxel microstructures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated phase map as FFVX.
    Generate(GenerateArgs),
    /// Solve the cell problem for one mean crack normal.
    Solve(SolveArgs),
    /// Solve for a set of mean crack normals and write one CSV row each.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Sphere,
    Laminate,
    Pack,
    Capsules,
}

/// `thickness:phase` pairs along the laminate axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Layers(pub Vec<(usize, u8)>);

fn parse_layers(s: &str) -> Result<Layers, String> {
    s.split(',')
        .map(|item| {
            let (t, p) = item
                .split_once(':')
                .ok_or_else(|| format!("expected thickness:phase, got {item:?}"))?;
            let t = t.trim().parse().map_err(|_| format!("bad thickness {t:?}"))?;
            let p = p.trim().parse().map_err(|_| format!("bad phase id {p:?}"))?;
            Ok((t, p))
        })
        .collect::<Result<_, String>>()
        .map(Layers)
}

fn parse_dims(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected n1,n2,n3, got {s:?}"));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("bad extent {p:?}"))?;
    }
    Ok(out)
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse().map_err(|e: fracflow::Error| e.to_string())
}

fn parse_gamma(s: &str) -> Result<GammaTable, String> {
    s.parse().map_err(|e: fracflow::Error| e.to_string())
}

fn parse_penalty(s: &str) -> Result<PenaltyStrategy, String> {
    s.parse().map_err(|e: fracflow::Error| e.to_string())
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected MIN,MAX, got {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
    Ok((a, b))
}

#[derive(Clone, Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Cubic grid extent.
    #[arg(long, conflicts_with = "dims")]
    pub n: Option<usize>,
    /// Grid extents `n1,n2,n3`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<[usize; 3]>,
    /// Sphere, pore or fiber diameter in voxels.
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Sphere centre in voxel units; defaults to the cell centre.
    #[arg(long, value_parser = parse_triple)]
    pub center: Option<[f64; 3]>,
    #[arg(long, value_parser = parse_axis, default_value = "x")]
    pub axis: Axis,
    /// Laminate layers, e.g. `16:0,16:1`.
    #[arg(long, value_parser = parse_layers)]
    pub layers: Option<Layers>,
    /// Target volume fraction of the inclusion phase (packs).
    #[arg(long, conflicts_with = "count")]
    pub porosity: Option<f64>,
    /// Number of spheres or capsules.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Smallest centre distance of packed spheres, as a fraction of the diameter.
    #[arg(long, default_value_t = 1.0)]
    pub min_separation: f64,
    /// Capsule length over diameter.
    #[arg(long, default_value_t = 20.0)]
    pub aspect: f64,
    /// Capsule orientation weights per axis.
    #[arg(long, value_parser = parse_triple, default_value = "1,1,1")]
    pub weights: [f64; 3],
    #[arg(long, default_value_t = 0)]
    pub matrix_phase: u8,
    #[arg(long, default_value_t = 1)]
    pub inclusion_phase: u8,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    /// FFVX file holding phase ids (u8) or crack resistances (f32).
    #[arg(long)]
    pub input: PathBuf,
    /// Crack resistance per phase, e.g. `0=1.0,1=10`; required for phase maps.
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: Option<GammaTable>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// constant, bb, ltd or rb.
    #[arg(long, value_parser = parse_penalty, default_value = "bb")]
    pub penalty: PenaltyStrategy,
    /// Initial penalty; defaults to the smallest positive crack resistance.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Penalty bounds `MIN,MAX`.
    #[arg(long, value_parser = parse_bounds)]
    pub rho_bounds: Option<(f64, f64)>,
    #[arg(long, default_value_t = 0.25)]
    pub damping: f64,
    #[arg(long, default_value_t = 1)]
    pub check_every: usize,
    /// Fixed-order reductions and no wall-clock time in reports.
    #[arg(long)]
    pub deterministic: bool,
    /// Unit label echoed into reports, e.g. `MPa*um`.
    #[arg(long)]
    pub unit: Option<String>,
}

#[derive(Clone, Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Mean crack normal: `x`, `y`, `z` or three components.
    #[arg(long, value_parser = parse_direction)]
    pub normal: Direction,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV of residual, penalty and objective per checked iteration.
    #[arg(long)]
    pub history: Option<PathBuf>,
    /// Legacy structured-points volume with crack indicator, flow and multiplier norm.
    #[arg(long)]
    pub vtk: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// `axes` or `fibonacci:K`.
    #[arg(long, default_value = "axes")]
    pub normals: NormalSet,
    /// Directions solved concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// CSV path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
