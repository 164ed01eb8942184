use super::admm::AdmmState;
use super::config::{PenaltyBounds, PenaltyStrategy, SolverConfig};
use crate::scalar::Real;

/// Relative threshold below which Barzilai-Borwein quotients are rejected.
const BB_EPSILON: f64 = 1e-12;

/// Smallest correlation `⟨Δv, Δe⟩ / (‖Δv‖ ‖Δe‖)` for which the
/// Barzilai-Borwein quotient is trusted.
pub const BB_CORRELATION: f64 = 0.2;

/// Penalty for the next iteration, clamped to `bounds`. Degenerate quotients
/// keep the current penalty.
pub fn penalty_next<T: Real>(
    state: &AdmmState<T>,
    cfg: &SolverConfig<T>,
    bounds: &PenaltyBounds<T>,
) -> T {
    let rho = state.rho;
    let s = &state.stats;
    if state.iteration == 0 {
        return bounds.clamp(rho);
    }
    let eps = T::lit(BB_EPSILON);
    let next = match cfg.penalty {
        PenaltyStrategy::Constant => rho,
        PenaltyStrategy::BarzilaiBorwein => {
            let denom_ok = s.de_sq > eps * s.e_norm_sq && s.de_sq > T::min_positive_value();
            let numer_ok = s.dv_de > T::lit(BB_CORRELATION) * (s.dv_sq * s.de_sq).sqrt();
            if denom_ok && numer_ok {
                s.dv_de / s.de_sq
            } else {
                rho
            }
        }
        PenaltyStrategy::LorenzTranDinh => {
            if s.e_norm_sq > T::min_positive_value() && s.v_norm_sq > T::zero() {
                (s.v_norm_sq / s.e_norm_sq).sqrt()
            } else {
                rho
            }
        }
        PenaltyStrategy::ResidualBalancing { mu, tau } => {
            let primal = s.primal_sq.sqrt();
            let dual = rho * s.de_sq.sqrt();
            let (mu, tau) = (T::lit(mu), T::lit(tau));
            if primal > mu * dual {
                rho * tau
            } else if dual > mu * primal {
                rho / tau
            } else {
                rho
            }
        }
    };
    if next.is_finite() {
        bounds.clamp(next)
    } else {
        bounds.clamp(rho)
    }
}
