use rayon::prelude::*;

use super::config::{PenaltyBounds, SolverConfig};
use super::diagnostics::{diagnostics, Diagnostics};
use super::penalty::penalty_next;
use crate::error::{Error, Result};
use crate::grid::{
    combine, mean_field_with, Direction, Field6, GridDims, Reduction, ScalarField,
    VectorField3, REDUCTION_CHUNK,
};
use crate::operators::{check_gamma, restrict_a_star, roll_into, Shift};
use crate::scalar::Real;
use crate::spectral::{extended_direction, shift_back_planes, SpectralPlan};

/// Denominator floor of the convergence residual.
pub const RESIDUAL_GUARD: f64 = 1e-30;

/// Voxel-averaged quantities gathered while performing one update.
///
/// Differences refer to the step `(vᵏ, eᵏ) → (vᵏ⁺¹, eᵏ⁺¹)`; norms are the
/// normalized `L²` norms squared.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats<T> {
    pub dv_de: T,
    pub de_sq: T,
    pub dv_sq: T,
    pub v_norm_sq: T,
    pub e_norm_sq: T,
    /// `‖ξᵏ⁺¹ − eᵏ⁺¹‖²`
    pub primal_sq: T,
    /// `‖eᵏ − ξᵏ⁺¹ᐟ²‖²`
    pub half_gap_sq: T,
    /// `(1/N) Σ γ ‖eᵏ⁺¹‖`
    pub objective: T,
    pub mean_v: [T; 6],
}

impl<T: Real> StepStats<T> {
    /// Statistics from explicit before/after snapshots (the fused solver loop
    /// computes the same sums without storing the old fields).
    pub fn from_snapshots(
        v_prev: &Field6<T>,
        v: &Field6<T>,
        e_prev: &Field6<T>,
        e: &Field6<T>,
        xi: &Field6<T>,
    ) -> Self {
        let n = T::lit(v.voxels() as f64);
        let dot = |a: &[T], b: &[T], c: &[T], d: &[T]| {
            a.iter()
                .zip(b)
                .zip(c.iter().zip(d))
                .fold(T::zero(), |s, ((&a, &b), (&c, &d))| s + (a - b) * (c - d))
        };
        let (vp, vn, ep, en, x) = (
            v_prev.as_slice(),
            v.as_slice(),
            e_prev.as_slice(),
            e.as_slice(),
            xi.as_slice(),
        );
        let zero = vec![T::zero(); vn.len()];
        Self {
            dv_de: dot(vn, vp, en, ep) / n,
            de_sq: dot(en, ep, en, ep) / n,
            dv_sq: dot(vn, vp, vn, vp) / n,
            v_norm_sq: dot(vn, &zero, vn, &zero) / n,
            e_norm_sq: dot(en, &zero, en, &zero) / n,
            primal_sq: dot(x, en, x, en) / n,
            half_gap_sq: T::zero(),
            objective: T::zero(),
            mean_v: mean_field_with(v, Reduction::Deterministic),
        }
    }

    fn is_finite(&self) -> bool {
        [
            self.dv_de,
            self.de_sq,
            self.dv_sq,
            self.v_norm_sq,
            self.e_norm_sq,
            self.primal_sq,
            self.half_gap_sq,
            self.objective,
        ]
        .iter()
        .chain(self.mean_v.iter())
        .all(|v| v.is_finite())
    }
}

/// Iterates of the damped ADMM.
#[derive(Clone, Debug)]
pub struct AdmmState<T: Real> {
    /// Damped iterate `ξᵏ`.
    pub xi: Field6<T>,
    /// Compatible iterate `ξᵏ⁻¹ᐟ²`, the projection computed in the last step.
    pub xi_half: Field6<T>,
    pub e: Field6<T>,
    /// Multiplier, always inside the γ-ball after an update.
    pub v: Field6<T>,
    pub rho: T,
    /// Completed iterations.
    pub iteration: usize,
    /// Sums gathered during the last update.
    pub stats: StepStats<T>,
}

impl<T: Real> AdmmState<T> {
    pub fn zeros(dims: GridDims, rho: T) -> Self {
        Self {
            xi: Field6::zeros(dims),
            xi_half: Field6::zeros(dims),
            e: Field6::zeros(dims),
            v: Field6::zeros(dims),
            rho,
            iteration: 0,
            stats: StepStats::default(),
        }
    }

    /// `ξ⁰ = e⁰ = Aξ̄`, `v⁰ = γ̄ Aξ̄`.
    pub fn canonical(gamma: &ScalarField<T>, dir: &Direction<T>, rho: T) -> Self {
        let dims = gamma.dims();
        let g = gamma.as_slice();
        let mean = g.iter().fold(T::zero(), |s, &x| s + x) / T::lit(g.len() as f64);
        let a_xi = extended_direction(dir);
        let base = Field6::constant(dims, a_xi);
        let v = Field6::constant(dims, a_xi.map(|x| x * mean));
        Self {
            xi: base.clone(),
            xi_half: base.clone(),
            e: base,
            v,
            rho,
            iteration: 0,
            stats: StepStats::default(),
        }
    }

    pub fn dims(&self) -> GridDims {
        self.e.dims()
    }
}

/// Per-voxel projection onto `{w : ‖w‖ ≤ γ}`.
pub fn project_ball<T: Real>(w: &Field6<T>, gamma: &ScalarField<T>) -> Result<Field6<T>> {
    w.dims().check(&gamma.dims())?;
    check_gamma(gamma)?;
    let g = gamma.as_slice();
    let mut out = w.clone();
    for idx in 0..w.voxels() {
        let x = w.at(idx);
        let n = x.iter().fold(T::zero(), |s, &a| s + a * a).sqrt();
        if n > g[idx] {
            let s = g[idx] / n;
            out.set(idx, x.map(|a| a * s));
        }
    }
    Ok(out)
}

/// `‖eᵏ − ξᵏ⁺¹ᐟ²‖ / max(‖⟨v⟩‖, guard)` from the sums of the last update.
pub fn convergence_residual<T: Real>(state: &AdmmState<T>) -> T {
    let mean = state.stats.mean_v;
    let mean_norm = mean.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    state.stats.half_gap_sq.sqrt() / mean_norm.max(T::lit(RESIDUAL_GUARD))
}

/// Result of [`solve`].
#[derive(Clone, Debug)]
pub struct SolveResult<T: Real> {
    /// `(1/N) Σ γ ‖e‖` at the final iterate.
    pub gamma_eff: T,
    pub iterations: usize,
    pub converged: bool,
    /// Last evaluated convergence residual.
    pub residual: T,
    /// Penalty used in the last iteration.
    pub penalty: T,
    pub residual_history: Vec<T>,
    pub penalty_history: Vec<T>,
    pub objective_history: Vec<T>,
    /// Compatible normal field `ξᵏ⁻¹ᐟ²`.
    pub xi: Field6<T>,
    pub e: Field6<T>,
    pub v: Field6<T>,
    /// Physical face flow `u = A* v`.
    pub flow: VectorField3<T>,
    pub diagnostics: Diagnostics<T>,
}

/// Reusable solver for one crack-resistance field and one direction.
pub struct Admm<T: Real> {
    gamma: ScalarField<T>,
    dir: Direction<T>,
    cfg: SolverConfig<T>,
    bounds: PenaltyBounds<T>,
    plan: SpectralPlan<T>,
    a: VectorField3<T>,
    g: VectorField3<T>,
}

impl<T: Real> Admm<T> {
    pub fn new(gamma: ScalarField<T>, dir: Direction<T>, cfg: SolverConfig<T>) -> Result<Self> {
        cfg.validate()?;
        check_gamma(&gamma)?;
        let bounds = cfg.resolve_penalty(&gamma)?;
        let dims = gamma.dims();
        Ok(Self {
            plan: SpectralPlan::new(dims),
            a: VectorField3::zeros(dims),
            g: VectorField3::zeros(dims),
            gamma,
            dir,
            cfg,
            bounds,
        })
    }

    pub fn bounds(&self) -> PenaltyBounds<T> {
        self.bounds
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.cfg
    }

    pub fn gamma(&self) -> &ScalarField<T> {
        &self.gamma
    }

    pub fn initial_state(&self) -> AdmmState<T> {
        AdmmState::canonical(&self.gamma, &self.dir, self.bounds.initial)
    }

    /// One damped ADMM update with the current penalty `state.rho`:
    ///
    /// ```text
    /// ξᵏ⁺¹ᐟ² = Aξ̄ − (1/ρ)(Id − AA* + AΓA*)(vᵏ − ρ eᵏ)
    /// ξᵏ⁺¹   = 2(1−δ) ξᵏ⁺¹ᐟ² − (1−2δ) eᵏ
    /// eᵏ⁺¹   = [vᵏ + ρ ξᵏ⁺¹ − P_C(vᵏ + ρ ξᵏ⁺¹)] / ρ
    /// vᵏ⁺¹   = vᵏ + ρ (ξᵏ⁺¹ − eᵏ⁺¹)
    /// ```
    ///
    /// The penalty itself is not changed here; see [`penalty_next`].
    pub fn iterate(&mut self, state: &mut AdmmState<T>) -> Result<()> {
        let dims = state.dims();
        self.gamma.dims().check(&dims)?;
        let rho = state.rho;
        let inv_rho = T::one() / rho;
        let s = T::FRAC_1_SQRT_2();
        let a_xi = extended_direction(&self.dir);

        // w = eᵏ − vᵏ/ρ, kept in xi_half
        state
            .xi_half
            .as_mut_slice()
            .par_iter_mut()
            .zip(state.e.as_slice().par_iter().zip(state.v.as_slice().par_iter()))
            .for_each(|(w, (&e, &v))| *w = e - v * inv_rho);

        // a = A* w
        {
            let w = &state.xi_half;
            for (c, plane) in self.a.components_mut().into_iter().enumerate() {
                roll_into(w.component(c + 3), plane, dims, crate::grid::Axis::ALL[c], Shift::Forward);
                plane
                    .par_iter_mut()
                    .zip(w.component(c).par_iter())
                    .for_each(|(o, &lo)| *o = (lo + *o) * s);
            }
        }

        // g = Γ a, then a ← a − Γa and g ← S(a − Γa)
        {
            let [ax, ay, az] = self.a.components();
            self.plan.gamma_apply_planes([ax, ay, az], self.g.components_mut());
        }
        self.a
            .as_mut_slice()
            .par_iter_mut()
            .zip(self.g.as_slice().par_iter())
            .for_each(|(a, &g)| *a = *a - g);
        {
            let [ax, ay, az] = self.a.components();
            shift_back_planes(dims, [ax, ay, az], self.g.components_mut());
        }

        // ξᵏ⁺¹ᐟ² = Aξ̄ + w − A(a − Γa)
        for (c, plane) in state.xi_half.components_mut().into_iter().enumerate() {
            let (src, shift) = if c < 3 {
                (self.a.component(c), a_xi[c])
            } else {
                (self.g.component(c - 3), a_xi[c])
            };
            plane
                .par_iter_mut()
                .zip(src.par_iter())
                .for_each(|(x, &d)| *x = *x - d * s + shift);
        }

        let damping = self.cfg.damping;
        let two = T::lit(2.0);
        let c_half = two * (T::one() - damping);
        let c_e = T::one() - two * damping;
        let gamma = self.gamma.as_slice();

        let xh_chunks = state.xi_half.voxel_chunks(REDUCTION_CHUNK);
        let xi_chunks = state.xi.voxel_chunks_mut(REDUCTION_CHUNK);
        let e_chunks = state.e.voxel_chunks_mut(REDUCTION_CHUNK);
        let v_chunks = state.v.voxel_chunks_mut(REDUCTION_CHUNK);
        let g_chunks: Vec<&[T]> = gamma.chunks(REDUCTION_CHUNK).collect();

        let partials: Vec<[T; 14]> = xh_chunks
            .into_par_iter()
            .zip(xi_chunks)
            .zip(e_chunks.into_par_iter().zip(v_chunks))
            .zip(g_chunks)
            .map_init(
                || (vec![T::zero(); REDUCTION_CHUNK], vec![T::zero(); REDUCTION_CHUNK]),
                |(zz, en), (((xh, xi), (e, v)), g)| {
                    let len = g.len();
                    let (zz, en) = (&mut zz[..len], &mut en[..len]);
                    zz.fill(T::zero());
                    en.fill(T::zero());
                    let mut acc = [T::zero(); 14];
                    // damping line, residual and |vᵏ + ρ ξᵏ⁺¹|²
                    for c in 0..6 {
                        let (xh, e, v) = (&xh[c][..len], &e[c][..len], &v[c][..len]);
                        let xi = &mut xi[c][..len];
                        let mut gap = T::zero();
                        for i in 0..len {
                            let d = e[i] - xh[i];
                            gap = gap + d * d;
                            let x = c_half * xh[i] - c_e * e[i];
                            xi[i] = x;
                            let z = v[i] + rho * x;
                            zz[i] = zz[i] + z * z;
                        }
                        acc[6] = acc[6] + gap;
                    }
                    // per-voxel shrink factor of the ball projection
                    for i in 0..len {
                        let nz = zz[i].sqrt();
                        zz[i] = if nz > g[i] { g[i] / nz } else { T::one() };
                    }
                    for c in 0..6 {
                        let xi = &xi[c][..len];
                        let (e, v) = (&mut e[c][..len], &mut v[c][..len]);
                        let mut sums = [T::zero(); 6];
                        for i in 0..len {
                            let z = v[i] + rho * xi[i];
                            let p = z * zz[i];
                            let e_new = (z - p) * inv_rho;
                            let dv = p - v[i];
                            let de = e_new - e[i];
                            let r = xi[i] - e_new;
                            sums[0] = sums[0] + dv * de;
                            sums[1] = sums[1] + de * de;
                            sums[2] = sums[2] + dv * dv;
                            sums[3] = sums[3] + p * p;
                            sums[4] = sums[4] + r * r;
                            sums[5] = sums[5] + p;
                            en[i] = en[i] + e_new * e_new;
                            e[i] = e_new;
                            v[i] = p;
                        }
                        acc[0] = acc[0] + sums[0];
                        acc[1] = acc[1] + sums[1];
                        acc[2] = acc[2] + sums[2];
                        acc[3] = acc[3] + sums[3];
                        acc[5] = acc[5] + sums[4];
                        acc[8 + c] = sums[5];
                    }
                    for i in 0..len {
                        acc[4] = acc[4] + en[i];
                        acc[7] = acc[7] + g[i] * en[i].sqrt();
                    }
                    acc
                },
            )
            .collect();

        let n = T::lit(dims.len() as f64);
        let mode = self.cfg.reduction;
        let sum = |q: usize| {
            let column: Vec<T> = partials.iter().map(|p| p[q]).collect();
            combine(&column, mode) / n
        };
        state.stats = StepStats {
            dv_de: sum(0),
            de_sq: sum(1),
            dv_sq: sum(2),
            v_norm_sq: sum(3),
            e_norm_sq: sum(4),
            primal_sq: sum(5),
            half_gap_sq: sum(6),
            objective: sum(7),
            mean_v: std::array::from_fn(|c| sum(8 + c)),
        };
        state.iteration += 1;
        if !state.stats.is_finite() {
            return Err(Error::Divergence {
                iteration: state.iteration,
                what: "non-finite iterate".into(),
            });
        }
        Ok(())
    }

    /// Runs to convergence (or `max_iter`) from the canonical initialization.
    pub fn solve(&mut self) -> Result<SolveResult<T>> {
        let mut state = self.initial_state();
        self.solve_from(&mut state)
    }

    pub fn solve_from(&mut self, state: &mut AdmmState<T>) -> Result<SolveResult<T>> {
        let mut residual_history = Vec::new();
        let mut penalty_history = Vec::new();
        let mut objective_history = Vec::new();
        let mut residual = T::infinity();
        let mut converged = false;
        let mut penalty = state.rho;
        let start = state.iteration;
        while state.iteration - start < self.cfg.max_iter {
            penalty = state.rho;
            self.iterate(state)?;
            let done = state.iteration - start;
            if done % self.cfg.check_every == 0 || done == self.cfg.max_iter {
                residual = convergence_residual(state);
                residual_history.push(residual);
                penalty_history.push(penalty);
                objective_history.push(state.stats.objective);
                // the first half step reproduces e⁰ whenever e⁰ is compatible and
                // v⁰ is constant, so its residual carries no information
                if residual <= self.cfg.tol && done >= 2 {
                    converged = true;
                    break;
                }
            }
            state.rho = penalty_next(state, &self.cfg, &self.bounds);
        }
        let diagnostics = diagnostics(state, &self.gamma, &self.dir)?;
        let flow = restrict_a_star(&state.v);
        Ok(SolveResult {
            gamma_eff: diagnostics.primal,
            iterations: state.iteration - start,
            converged,
            residual,
            penalty,
            residual_history,
            penalty_history,
            objective_history,
            xi: state.xi_half.clone(),
            e: state.e.clone(),
            v: state.v.clone(),
            flow,
            diagnostics,
        })
    }
}

/// One update on a fresh workspace. Convenient for tests; [`Admm`] reuses
/// its transform plans across iterations.
pub fn admm_iterate<T: Real>(
    state: &AdmmState<T>,
    gamma: &ScalarField<T>,
    dir: &Direction<T>,
    cfg: &SolverConfig<T>,
) -> Result<AdmmState<T>> {
    let mut admm = Admm::new(gamma.clone(), *dir, cfg.clone())?;
    let mut next = state.clone();
    admm.iterate(&mut next)?;
    next.rho = penalty_next(&next, cfg, &admm.bounds);
    Ok(next)
}

/// Computes the effective crack energy for `gamma` and mean normal `dir`.
pub fn solve<T: Real>(
    gamma: &ScalarField<T>,
    dir: &Direction<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveResult<T>> {
    Admm::new(gamma.clone(), *dir, cfg.clone())?.solve()
}
