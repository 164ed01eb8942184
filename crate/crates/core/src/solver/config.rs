use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{Reduction, ScalarField};
use crate::scalar::Real;

/// Rule for choosing the penalty factor `ρᵏ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PenaltyStrategy {
    /// Keep the initial penalty.
    Constant,
    /// `ρ = ⟨Δv, Δe⟩ / ‖Δe‖²`.
    BarzilaiBorwein,
    /// `ρ = ‖v‖ / ‖e‖`.
    LorenzTranDinh,
    /// Multiply or divide by `tau` when the primal and dual residuals differ
    /// by more than a factor `mu`.
    ResidualBalancing { mu: f64, tau: f64 },
}

impl PenaltyStrategy {
    pub const RESIDUAL_BALANCING: PenaltyStrategy =
        PenaltyStrategy::ResidualBalancing { mu: 10.0, tau: 2.0 };

    pub fn name(&self) -> &'static str {
        match self {
            PenaltyStrategy::Constant => "constant",
            PenaltyStrategy::BarzilaiBorwein => "bb",
            PenaltyStrategy::LorenzTranDinh => "ltd",
            PenaltyStrategy::ResidualBalancing { .. } => "rb",
        }
    }
}

impl fmt::Display for PenaltyStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PenaltyStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" | "const" => Ok(Self::Constant),
            "bb" | "barzilai-borwein" => Ok(Self::BarzilaiBorwein),
            "ltd" | "lorenz-tran-dinh" => Ok(Self::LorenzTranDinh),
            "rb" | "residual-balancing" => Ok(Self::RESIDUAL_BALANCING),
            other => Err(Error::InvalidConfig(format!(
                "unknown penalty strategy {other:?} (expected constant, bb, ltd or rb)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    /// Damping `δ ∈ (0, 1)`; `δ = 1/2` is plain ADMM.
    pub damping: T,
    pub tol: T,
    pub max_iter: usize,
    pub penalty: PenaltyStrategy,
    /// Starting penalty. Defaults to the smallest positive crack resistance.
    pub initial_penalty: Option<T>,
    /// `(ρ_min, ρ_max)`. Defaults to `(1e-6 γ̄, 1e6 γ̄)`.
    pub penalty_bounds: Option<(T, T)>,
    /// Evaluate the convergence residual every `check_every` iterations.
    pub check_every: usize,
    pub reduction: Reduction,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            damping: T::lit(0.25),
            tol: T::lit(1e-4),
            max_iter: 10_000,
            penalty: PenaltyStrategy::BarzilaiBorwein,
            initial_penalty: None,
            penalty_bounds: None,
            check_every: 1,
            reduction: Reduction::Deterministic,
        }
    }
}

/// Penalty bounds and starting value resolved against a concrete γ field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyBounds<T> {
    pub min: T,
    pub max: T,
    pub initial: T,
}

impl<T: Real> PenaltyBounds<T> {
    #[inline]
    pub fn clamp(&self, rho: T) -> T {
        rho.max(self.min).min(self.max)
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.damping > T::zero() && self.damping < T::one()) {
            return bad(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        if !(self.tol > T::zero()) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.check_every == 0 {
            return bad("check_every must be at least 1".into());
        }
        if let Some((lo, hi)) = self.penalty_bounds {
            if !(lo > T::zero() && lo <= hi && hi.is_finite()) {
                return bad(format!("penalty bounds must satisfy 0 < min <= max, got ({lo}, {hi})"));
            }
        }
        if let Some(rho) = self.initial_penalty {
            if !(rho > T::zero() && rho.is_finite()) {
                return bad(format!("initial penalty must be positive, got {rho}"));
            }
        }
        if let PenaltyStrategy::ResidualBalancing { mu, tau } = self.penalty {
            if !(mu > 1.0 && tau > 1.0) {
                return bad(format!("residual balancing needs mu, tau > 1, got ({mu}, {tau})"));
            }
        }
        Ok(())
    }

    /// Resolves the penalty bounds and the starting penalty for `gamma`.
    pub fn resolve_penalty(&self, gamma: &ScalarField<T>) -> Result<PenaltyBounds<T>> {
        let g = gamma.as_slice();
        let n = T::lit(g.len() as f64);
        let mean = g.iter().fold(T::zero(), |s, &x| s + x) / n;
        let min_positive = g
            .iter()
            .copied()
            .filter(|&x| x > T::zero())
            .fold(T::infinity(), T::min);
        if !(mean > T::zero()) {
            return Err(Error::ZeroGamma);
        }
        let (min, max) = self
            .penalty_bounds
            .unwrap_or((T::lit(1e-6) * mean, T::lit(1e6) * mean));
        if min > max {
            return Err(Error::InvalidConfig(format!(
                "penalty bounds are inverted: ({min}, {max})"
            )));
        }
        let initial = self.initial_penalty.unwrap_or(min_positive.max(min));
        Ok(PenaltyBounds {
            min,
            max,
            initial: initial.max(min).min(max),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDims;

    #[test]
    fn defaults_are_valid() {
        let cfg = SolverConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.damping, 0.25);
        assert_eq!(cfg.tol, 1e-4);
        assert_eq!(cfg.penalty, PenaltyStrategy::BarzilaiBorwein);
    }

    #[test]
    fn rejects_bad_damping_and_bounds() {
        let mut cfg = SolverConfig::<f64>::default();
        cfg.damping = 1.0;
        assert!(cfg.validate().is_err());
        cfg.damping = 0.5;
        cfg.penalty_bounds = Some((2.0, 1.0));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn resolves_lower_bound_penalty() {
        let d = GridDims::new(4, 1, 1).unwrap();
        let gamma = ScalarField::from_vec(d, vec![0.0, 2.0, 10.0, 4.0]).unwrap();
        let b = SolverConfig::<f64>::default().resolve_penalty(&gamma).unwrap();
        assert_eq!(b.initial, 2.0);
        assert_eq!(b.min, 4e-6);
        assert_eq!(b.max, 4e6);
        let zero = ScalarField::<f64>::zeros(d);
        assert!(SolverConfig::default().resolve_penalty(&zero).is_err());
    }

    #[test]
    fn parses_strategy_names() {
        assert_eq!("bb".parse::<PenaltyStrategy>().unwrap(), PenaltyStrategy::BarzilaiBorwein);
        assert_eq!(
            "rb".parse::<PenaltyStrategy>().unwrap(),
            PenaltyStrategy::ResidualBalancing { mu: 10.0, tau: 2.0 }
        );
        assert!("nope".parse::<PenaltyStrategy>().is_err());
    }
}
