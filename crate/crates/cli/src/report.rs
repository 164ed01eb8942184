use std::collections::BTreeMap;

use serde::Serialize;

/// Solver settings as used, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub dims: [usize; 3],
    /// Crack resistance per phase id, or `None` for a scalar input field.
    pub gamma: Option<BTreeMap<String, f64>>,
    pub normal: [f64; 3],
    pub tol: f64,
    pub max_iter: usize,
    pub penalty: String,
    pub initial_penalty: f64,
    pub penalty_bounds: [f64; 2],
    pub damping: f64,
    pub check_every: usize,
    pub deterministic: bool,
}

/// The JSON document written by `solve`. Key names are stable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub gamma_eff: f64,
    pub unit: Option<String>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub duality_gap: f64,
    pub dual_value: f64,
    pub divergence_norm: f64,
    pub flow_norm: f64,
    pub feasibility_violation: f64,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl SolveReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// One `sweep` row.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub normal: [f64; 3],
    pub gamma_eff: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    /// Set when the solve failed numerically; the row is kept.
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str = "nx,ny,nz,gamma_eff,iterations,converged,residual,status";

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let [x, y, z] = self.normal;
        let status = match &self.error {
            Some(_) => "diverged",
            None if self.converged => "ok",
            None => "not_converged",
        };
        format!(
            "{x},{y},{z},{},{},{},{},{status}",
            self.gamma_eff, self.iterations, self.converged, self.residual
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}
