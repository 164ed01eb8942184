//! Reference values for the solver: a primal-dual hybrid gradient method on
//! the same discrete cut problem, and flat-cut upper bounds.
//!
//! The primal variable is `x = (φ, η)` with `B(φ, η) = A∇⁺φ + (Id − AA*)η`,
//! so `Aξ̄ + Bx` sweeps all compatible fields with mean normal `ξ̄`. The
//! stencils are written out directly; only the dense and property tests tie
//! them to the operators used by the main solver.

use crate::error::{Error, Result};
use crate::grid::{Axis, Direction, GridDims, ScalarField};
use crate::operators::check_gamma;
use crate::scalar::Real;
use crate::spectral::extended_direction;

#[derive(Clone, Debug, PartialEq)]
pub struct PdhgConfig<T> {
    pub sigma: T,
    pub tau: T,
    pub max_iter: usize,
    /// Relative decrease of the best objective per window below which the
    /// iteration is considered stagnant.
    pub tol: T,
    pub window: usize,
}

impl<T: Real> Default for PdhgConfig<T> {
    fn default() -> Self {
        let step = T::one() / (T::lit(2.0 * 3f64.sqrt()) + T::one());
        Self {
            sigma: step,
            tau: step,
            max_iter: 100_000,
            tol: T::lit(1e-6),
            window: 1000,
        }
    }
}

impl<T: Real> PdhgConfig<T> {
    /// Upper bound of `‖B‖`.
    pub fn operator_norm_bound() -> T {
        T::lit(2.0 * 3f64.sqrt())
    }

    /// Default steps rebalanced as `σ = r σ₀`, `τ = τ₀ / r` with `r = √γ̄`:
    /// the dual iterate scales with `γ` while the primal one does not.
    pub fn balanced(gamma: &ScalarField<T>) -> Self {
        let g = gamma.as_slice();
        let mean = g.iter().fold(T::zero(), |a, &x| a + x) / T::lit(g.len() as f64);
        let base = Self::default();
        if !(mean > T::zero() && mean.is_finite()) {
            return base;
        }
        let r = mean.sqrt();
        Self {
            sigma: base.sigma * r,
            tau: base.tau / r,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = Self::operator_norm_bound();
        if !(self.sigma > T::zero() && self.tau > T::zero()) {
            return Err(Error::InvalidConfig("PDHG steps must be positive".into()));
        }
        if !(self.sigma * self.tau * b * b < T::one()) {
            return Err(Error::InvalidConfig(format!(
                "PDHG steps violate σ·τ·‖B‖² < 1 (σ = {}, τ = {})",
                self.sigma, self.tau
            )));
        }
        if self.max_iter == 0 || self.window == 0 {
            return Err(Error::InvalidConfig("PDHG needs max_iter, window >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdhgResult<T> {
    /// Smallest primal objective seen.
    pub gamma_eff: T,
    pub iterations: usize,
    /// False when `max_iter` ran out before stagnation.
    pub converged: bool,
    /// Mean primal objective of each completed window.
    pub window_means: Vec<T>,
}

/// Periodic neighbour indices along each axis.
struct Stencil {
    fwd: [Vec<usize>; 3],
    bwd: [Vec<usize>; 3],
}

impl Stencil {
    fn new(dims: GridDims) -> Self {
        let n = dims.len();
        let mut fwd: [Vec<usize>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
        let mut bwd: [Vec<usize>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
        for idx in 0..n {
            let [i, j, k] = dims.coords(idx).map(|c| c as i64);
            let steps = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
            for (a, e) in steps.into_iter().enumerate() {
                fwd[a].push(dims.index_wrapped(i + e[0], j + e[1], k + e[2]));
                bwd[a].push(dims.index_wrapped(i - e[0], j - e[1], k - e[2]));
            }
        }
        Self { fwd, bwd }
    }

    /// `(Aξ̄ + A∇⁺φ + η)` at voxel `x`.
    #[inline]
    fn field_at<T: Real>(&self, x: usize, phi: &[T], eta: &[T; 6], shift: &[T; 6]) -> [T; 6] {
        let s = T::FRAC_1_SQRT_2();
        let mut w = [T::zero(); 6];
        for c in 0..3 {
            let forward = phi[self.fwd[c][x]] - phi[x];
            let backward = phi[x] - phi[self.bwd[c][x]];
            w[c] = s * forward + eta[c] + shift[c];
            w[c + 3] = s * backward + eta[c + 3] + shift[c + 3];
        }
        w
    }
}

#[inline]
fn norm6<T: Real>(w: &[T; 6]) -> T {
    w.iter().fold(T::zero(), |a, &x| a + x * x).sqrt()
}

/// `min_x (1/N) Σ γ ‖Aξ̄ + Bx‖` by PDHG with extrapolation on the primal side.
///
/// The primal iterate `(φ, η)` keeps `η` in the range of `Id − AA*`, where
/// `Bx = A∇⁺φ + η`.
pub fn pdhg_solve<T: Real>(
    gamma: &ScalarField<T>,
    dir: &Direction<T>,
    cfg: &PdhgConfig<T>,
) -> Result<PdhgResult<T>> {
    cfg.validate()?;
    check_gamma(gamma)?;
    let dims = gamma.dims();
    let n = dims.len();
    let g = gamma.as_slice();
    let shift = extended_direction(dir);
    let st = Stencil::new(dims);
    let s = T::FRAC_1_SQRT_2();
    let two = T::lit(2.0);
    let inv_n = T::one() / T::lit(n as f64);
    let (sigma, tau) = (cfg.sigma, cfg.tau);

    let mut phi = vec![T::zero(); n];
    let mut phi_bar = vec![T::zero(); n];
    let mut eta = vec![[T::zero(); 6]; n];
    let mut eta_bar = vec![[T::zero(); 6]; n];
    let mut y = vec![[T::zero(); 6]; n];
    let mut u = vec![[T::zero(); 3]; n];

    let objective = |phi: &[T], eta: &[[T; 6]]| {
        (0..n).fold(T::zero(), |acc, x| {
            acc + g[x] * norm6(&st.field_at(x, phi, &eta[x], &shift))
        }) * inv_n
    };

    let mut best = objective(&phi, &eta);
    let mut best_at_window = best;
    let mut window_sum = T::zero();
    let mut window_means = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        iterations = it;
        // y ← P_C(y + σ(Aξ̄ + Bx̄))
        for x in 0..n {
            let w = st.field_at(x, &phi_bar, &eta_bar[x], &shift);
            let mut z = y[x];
            for c in 0..6 {
                z[c] = z[c] + sigma * w[c];
            }
            let nz = norm6(&z);
            if nz > g[x] {
                let r = g[x] / nz;
                z = z.map(|a| a * r);
            }
            y[x] = z;
        }
        // u = A*y
        for x in 0..n {
            for c in 0..3 {
                u[x][c] = s * (y[x][c] + y[st.fwd[c][x]][c + 3]);
            }
        }
        // x ← x − τ B*y with B*y = (−div⁻u, y − Au), then x̄ = 2x⁺ − x
        for x in 0..n {
            let mut div = T::zero();
            let mut r = y[x];
            for c in 0..3 {
                let back = u[st.bwd[c][x]][c];
                div = div + u[x][c] - back;
                r[c] = r[c] - s * u[x][c];
                r[c + 3] = r[c + 3] - s * back;
            }
            let p = phi[x] + tau * div;
            phi_bar[x] = two * p - phi[x];
            phi[x] = p;
            for c in 0..6 {
                let e = eta[x][c] - tau * r[c];
                eta_bar[x][c] = two * e - eta[x][c];
                eta[x][c] = e;
            }
        }

        let obj = objective(&phi, &eta);
        if !obj.is_finite() {
            return Err(Error::Divergence {
                iteration: it,
                what: "non-finite PDHG objective".into(),
            });
        }
        best = best.min(obj);
        window_sum = window_sum + obj;
        if it % cfg.window == 0 {
            window_means.push(window_sum / T::lit(cfg.window as f64));
            window_sum = T::zero();
            if best_at_window - best <= cfg.tol * best.abs() {
                converged = true;
                break;
            }
            best_at_window = best;
        }
    }
    Ok(PdhgResult {
        gamma_eff: best,
        iterations,
        converged,
        window_means,
    })
}

/// Smallest layer mean of `gamma` across the layers normal to `axis`: the
/// energy of the best flat cut, an upper bound of the effective crack energy
/// for the normal along `axis`.
pub fn planar_cut_bound<T: Real>(gamma: &ScalarField<T>, axis: Axis) -> T {
    let dims = gamma.dims();
    let a = axis.index();
    let layers = dims.shape()[a];
    let mut sums = vec![T::zero(); layers];
    for (idx, &g) in gamma.as_slice().iter().enumerate() {
        let l = dims.coords(idx)[a];
        sums[l] = sums[l] + g;
    }
    let per_layer = T::lit((dims.len() / layers) as f64);
    sums.into_iter()
        .map(|s| s / per_layer)
        .fold(T::infinity(), T::min)
}
