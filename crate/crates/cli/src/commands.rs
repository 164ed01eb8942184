use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use fracflow::microstructure::{
    gen_capsules, gen_laminate, gen_sphere, gen_sphere_pack, load_voxel, phases_to_gamma,
    save_phase_map, CapsuleSpec, PackTarget, PhaseMap, SpherePackSpec, VoxelData,
};
use fracflow::solver::Admm;
use fracflow::{Direction, GridDims, Reduction, ScalarField, SolveResult, SolverConfig};
use rayon::prelude::*;

use crate::args::{GenerateArgs, Kind, ProblemArgs, SolveArgs, SweepArgs};
use crate::error::CliError;
use crate::export::{history_csv, structured_points, write_text};
use crate::report::{sweep_csv, ConfigEcho, SolveReport, SweepRow};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn generate_dims(args: &GenerateArgs) -> Result<GridDims, CliError> {
    let dims = match (args.n, args.dims) {
        (Some(n), None) => GridDims::cubic(n)?,
        (None, Some([a, b, c])) => GridDims::new(a, b, c)?,
        _ => return Err(usage("give the grid as --n N or --dims N1,N2,N3")),
    };
    Ok(dims)
}

/// Builds the requested phase map.
pub fn build_structure(args: &GenerateArgs) -> Result<PhaseMap, CliError> {
    let dims = generate_dims(args)?;
    let phases = (args.matrix_phase, args.inclusion_phase);
    let need_diameter = || args.diameter.ok_or_else(|| usage("--diameter is required for this kind"));
    let map = match args.kind {
        Kind::Sphere => {
            let centre = args
                .center
                .unwrap_or_else(|| dims.shape().map(|n| n as f64 / 2.0));
            gen_sphere(dims, centre, need_diameter()?, phases)?
        }
        Kind::Laminate => {
            let layers = args.layers.as_ref().ok_or_else(|| usage("--layers is required for laminates"))?;
            gen_laminate(dims, args.axis, &layers.0)?
        }
        Kind::Pack => {
            let target = match (args.porosity, args.count) {
                (Some(p), None) => PackTarget::Porosity(p),
                (None, Some(c)) => PackTarget::Count(c),
                _ => return Err(usage("packs need exactly one of --porosity or --count")),
            };
            let spec = SpherePackSpec {
                target,
                diameter: need_diameter()?,
                seed: args.seed,
                min_separation: args.min_separation,
                phases,
            };
            let pack = gen_sphere_pack(dims, &spec)?;
            log::info!("placed {} spheres", pack.centers.len());
            pack.map
        }
        Kind::Capsules => {
            let spec = CapsuleSpec {
                count: args.count.ok_or_else(|| usage("--count is required for capsules"))?,
                diameter: need_diameter()?,
                aspect_ratio: args.aspect,
                axis_weights: args.weights,
                seed: args.seed,
                phases,
            };
            gen_capsules(dims, &spec)?.map
        }
    };
    Ok(map)
}

pub fn run_generate(args: &GenerateArgs, out: &mut impl Write) -> Result<(), CliError> {
    let map = build_structure(args)?;
    save_phase_map(&args.out, &map)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let [n1, n2, n3] = map.dims().shape();
    writeln!(out, "wrote {}", args.out.display())?;
    writeln!(out, "dims {n1} {n2} {n3}")?;
    writeln!(out, "seed {}", args.seed)?;
    for (phase, count) in map.counts() {
        writeln!(out, "phase {phase}: fraction {}", count as f64 / map.ids().len() as f64)?;
    }
    Ok(())
}

/// The crack-resistance field described by `--input` and `--gamma`.
pub fn load_gamma(p: &ProblemArgs) -> Result<(ScalarField, Option<BTreeMap<String, f64>>), CliError> {
    let data = load_voxel(&p.input).map_err(|e| match CliError::from(e) {
        CliError::Io(msg) => CliError::Io(format!("{}: {msg}", p.input.display())),
        other => other,
    })?;
    match data {
        VoxelData::Phases(map) => {
            let table = p
                .gamma
                .as_ref()
                .ok_or_else(|| usage("--gamma is required for phase-map inputs"))?;
            let echo = table.entries().map(|(k, v)| (k.to_string(), v)).collect();
            Ok((phases_to_gamma(&map, table)?, Some(echo)))
        }
        data @ VoxelData::Scalars(_) => {
            if p.gamma.is_some() {
                log::warn!("--gamma ignored: the input already holds crack resistances");
            }
            Ok((data.into_scalar_field()?, None))
        }
    }
}

pub fn solver_config(p: &ProblemArgs) -> SolverConfig {
    SolverConfig {
        damping: p.damping,
        tol: p.tol,
        max_iter: p.max_iter,
        penalty: p.penalty,
        initial_penalty: p.rho,
        penalty_bounds: p.rho_bounds,
        check_every: p.check_every,
        reduction: if p.deterministic {
            Reduction::Deterministic
        } else {
            Reduction::Fast
        },
    }
}

/// Solves one direction and assembles its report.
pub fn solve_one(
    p: &ProblemArgs,
    gamma: &ScalarField,
    gamma_echo: &Option<BTreeMap<String, f64>>,
    dir: Direction,
) -> Result<(SolveReport, SolveResult), CliError> {
    let cfg = solver_config(p);
    let start = Instant::now();
    let mut admm = Admm::new(gamma.clone(), dir, cfg.clone())?;
    let bounds = admm.bounds();
    let result = admm.solve()?;
    let elapsed = start.elapsed().as_secs_f64();
    if !result.converged {
        log::warn!(
            "not converged after {} iterations (residual {:.3e}, tol {:.1e})",
            result.iterations, result.residual, cfg.tol
        );
    }
    let d = &result.diagnostics;
    let report = SolveReport {
        gamma_eff: result.gamma_eff,
        unit: p.unit.clone(),
        iterations: result.iterations,
        converged: result.converged,
        residual: result.residual,
        duality_gap: d.duality_gap,
        dual_value: d.dual,
        divergence_norm: d.divergence_norm,
        flow_norm: d.flow_norm,
        feasibility_violation: d.feasibility_violation,
        config: ConfigEcho {
            input: p.input.display().to_string(),
            dims: gamma.dims().shape(),
            gamma: gamma_echo.clone(),
            normal: dir.components(),
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            penalty: cfg.penalty.name().to_string(),
            initial_penalty: bounds.initial,
            penalty_bounds: [bounds.min, bounds.max],
            damping: cfg.damping,
            check_every: cfg.check_every,
            deterministic: p.deterministic,
        },
        wall_time: (!p.deterministic).then_some(elapsed),
    };
    Ok((report, result))
}

fn emit(path: Option<&Path>, text: &str, out: &mut impl Write) -> Result<(), CliError> {
    match path {
        Some(path) => write_text(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn run_solve(args: &SolveArgs, out: &mut impl Write) -> Result<SolveReport, CliError> {
    let p = &args.problem;
    let (gamma, echo) = load_gamma(p)?;
    let (report, result) = solve_one(p, &gamma, &echo, args.normal)?;
    if let Some(path) = &args.history {
        write_text(path, &history_csv(&result, p.check_every))?;
    }
    if let Some(path) = &args.vtk {
        let title = format!("fracflow solve, gamma_eff {}", report.gamma_eff);
        write_text(path, &structured_points(&result, &gamma, &title))?;
    }
    emit(args.report.as_deref(), &report.to_json()?, out)?;
    Ok(report)
}

/// Runs every direction; numerical failures become rows flagged `diverged`
/// and turn into exit code 4 once all rows are written.
pub fn run_sweep(args: &SweepArgs, out: &mut impl Write) -> Result<Vec<SweepRow>, CliError> {
    let p = &args.problem;
    let (gamma, echo) = load_gamma(p)?;
    let dirs = args.normals.directions();
    let solve_row = |dir: &Direction| -> Result<SweepRow, CliError> {
        match solve_one(p, &gamma, &echo, *dir) {
            Ok((r, _)) => Ok(SweepRow {
                normal: dir.components(),
                gamma_eff: r.gamma_eff,
                iterations: r.iterations,
                converged: r.converged,
                residual: r.residual,
                error: None,
            }),
            Err(CliError::Numerical(msg)) => {
                log::warn!("direction {:?}: {msg}", dir.components());
                Ok(SweepRow {
                    normal: dir.components(),
                    gamma_eff: f64::NAN,
                    iterations: 0,
                    converged: false,
                    residual: f64::NAN,
                    error: Some(msg),
                })
            }
            Err(e) => Err(e),
        }
    };
    let rows = match args.jobs {
        Some(0) => return Err(usage("--jobs must be at least 1")),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| usage(e.to_string()))?
            .install(|| dirs.par_iter().map(solve_row).collect::<Result<Vec<_>, _>>())?,
        None => dirs.iter().map(solve_row).collect::<Result<Vec<_>, _>>()?,
    };
    emit(args.out.as_deref(), &sweep_csv(&rows), out)?;
    if let Some(bad) = rows.iter().find_map(|r| r.error.as_ref()) {
        return Err(CliError::Numerical(format!("sweep finished with diverged directions: {bad}")));
    }
    Ok(rows)
}
