use super::admm::AdmmState;
use crate::error::Result;
use crate::grid::{mean_field, norm, pointwise_norm, sum_indexed, Direction, Reduction, ScalarField};
use crate::operators::{constraint_violation, div_minus, restrict_a_star};
use crate::scalar::Real;

/// Optimality measures of an ADMM state, computed on the physical flow
/// `u = A* v`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Diagnostics<T> {
    /// `(1/N) Σ γ ‖e‖`
    pub primal: T,
    /// `⟨ξ̄, u⟩` with `ξ̄` as a constant field.
    pub dual: T,
    pub duality_gap: T,
    /// `‖div⁻ u‖`
    pub divergence_norm: T,
    /// `‖u‖`
    pub flow_norm: T,
    /// Largest per-voxel excess of `‖u‖² + ‖S u‖² − 2γ²`.
    pub feasibility_violation: T,
}

pub fn diagnostics<T: Real>(
    state: &AdmmState<T>,
    gamma: &ScalarField<T>,
    dir: &Direction<T>,
) -> Result<Diagnostics<T>> {
    state.dims().check(&gamma.dims())?;
    let e_norm = pointwise_norm(&state.e);
    let (en, g) = (e_norm.as_slice(), gamma.as_slice());
    let primal = sum_indexed(en.len(), Reduction::Deterministic, |i| g[i] * en[i])
        / T::lit(en.len() as f64);
    let u = restrict_a_star(&state.v);
    let mean_u = mean_field(&u);
    let xi = dir.components();
    let dual = mean_u[0] * xi[0] + mean_u[1] * xi[1] + mean_u[2] * xi[2];
    let violation = constraint_violation(&u, gamma)?
        .as_slice()
        .iter()
        .fold(T::zero(), |m, &x| m.max(x));
    Ok(Diagnostics {
        primal,
        dual,
        duality_gap: (primal - dual).abs(),
        divergence_norm: norm(&div_minus(&u)),
        flow_norm: norm(&u),
        feasibility_violation: violation,
    })
}
