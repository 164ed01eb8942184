use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use fracflow::grid::pointwise_norm;
use fracflow::{ScalarField, SolveResult};

/// Residual, penalty and objective per checked iteration.
pub fn history_csv(result: &SolveResult, check_every: usize) -> String {
    let mut out = String::from("iteration,residual,penalty,objective\n");
    for (i, ((r, p), o)) in result
        .residual_history
        .iter()
        .zip(&result.penalty_history)
        .zip(&result.objective_history)
        .enumerate()
    {
        let it = ((i + 1) * check_every).min(result.iterations);
        let _ = writeln!(out, "{it},{r},{p},{o}");
    }
    out
}

/// Legacy ASCII structured points, one point per voxel centre.
pub fn structured_points(result: &SolveResult, gamma: &ScalarField, title: &str) -> String {
    let dims = gamma.dims();
    let [n1, n2, n3] = dims.shape();
    let h = dims.spacing();
    let n = dims.len();
    let mut out = String::with_capacity(64 * n);
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "{}", title.replace('\n', " "));
    let _ = writeln!(out, "ASCII\nDATASET STRUCTURED_POINTS");
    let _ = writeln!(out, "DIMENSIONS {n1} {n2} {n3}");
    let _ = writeln!(out, "ORIGIN {} {} {}", h / 2.0, h / 2.0, h / 2.0);
    let _ = writeln!(out, "SPACING {h} {h} {h}");
    let _ = writeln!(out, "POINT_DATA {n}");
    let scalars = |out: &mut String, name: &str, data: &[f64]| {
        let _ = writeln!(out, "SCALARS {name} float 1\nLOOKUP_TABLE default");
        for &x in data {
            let _ = writeln!(out, "{}", x as f32);
        }
    };
    scalars(&mut out, "crack_indicator", pointwise_norm(&result.e).as_slice());
    scalars(&mut out, "multiplier_norm", pointwise_norm(&result.v).as_slice());
    scalars(&mut out, "gamma", gamma.as_slice());
    let _ = writeln!(out, "VECTORS flow float");
    let [ux, uy, uz] = result.flow.components();
    for i in 0..n {
        let _ = writeln!(out, "{} {} {}", ux[i] as f32, uy[i] as f32, uz[i] as f32);
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    fs::write(path, text).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}
