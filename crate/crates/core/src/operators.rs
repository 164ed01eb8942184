//! Matrix-free finite-volume operators on periodic grids.
//!
//! Flows live on voxel faces and are stored at the voxel they leave in the
//! positive direction: `v_x[i,j,k]` is the flux through face `i + 1/2`.
//! With that convention the backward divergence `div⁻` and the forward
//! gradient `∇⁺` are negative adjoints, the backward shift `S` and the forward
//! shift `S*` are adjoint inverses, and `A v = (v, S v)/√2` is an isometric
//! embedding into six-component fields.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Axis, Field6, GridDims, ScalarField, VectorField3};
use crate::scalar::Real;

/// Shift direction along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    /// `out[x] = in[x - e]`
    Back,
    /// `out[x] = in[x + e]`
    Forward,
}

/// Periodically rolls one scalar plane along `axis`.
pub(crate) fn roll_into<T: Real>(
    src: &[T],
    dst: &mut [T],
    dims: GridDims,
    axis: Axis,
    shift: Shift,
) {
    let [n1, n2, _] = dims.shape();
    let n = dims.shape()[axis.index()];
    if n == 1 {
        dst.copy_from_slice(src);
        return;
    }
    // Source block offset for destination block `b` out of `n` blocks.
    let from = move |b: usize| match shift {
        Shift::Back => (b + n - 1) % n,
        Shift::Forward => (b + 1) % n,
    };
    match axis {
        Axis::X => {
            dst.par_chunks_mut(n1)
                .zip(src.par_chunks(n1))
                .for_each(|(d, s)| match shift {
                    Shift::Back => {
                        d[1..].copy_from_slice(&s[..n1 - 1]);
                        d[0] = s[n1 - 1];
                    }
                    Shift::Forward => {
                        d[..n1 - 1].copy_from_slice(&s[1..]);
                        d[n1 - 1] = s[0];
                    }
                });
        }
        Axis::Y => {
            let plane = n1 * n2;
            dst.par_chunks_mut(plane)
                .zip(src.par_chunks(plane))
                .for_each(|(d, s)| {
                    for j in 0..n2 {
                        let sj = from(j);
                        d[j * n1..(j + 1) * n1].copy_from_slice(&s[sj * n1..(sj + 1) * n1]);
                    }
                });
        }
        Axis::Z => {
            let plane = n1 * n2;
            dst.par_chunks_mut(plane).enumerate().for_each(|(k, d)| {
                let sk = from(k);
                d.copy_from_slice(&src[sk * plane..(sk + 1) * plane]);
            });
        }
    }
}

/// Caches the grid shape so operator applications can be shape-checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorContext {
    dims: GridDims,
}

impl OperatorContext {
    pub fn new(dims: GridDims) -> Self {
        Self { dims }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    fn check(&self, found: GridDims) -> Result<()> {
        self.dims.check(&found)
    }

    pub fn div_minus<T: Real>(&self, v: &VectorField3<T>) -> Result<ScalarField<T>> {
        self.check(v.dims())?;
        Ok(div_minus(v))
    }

    pub fn grad_plus<T: Real>(&self, phi: &ScalarField<T>) -> Result<VectorField3<T>> {
        self.check(phi.dims())?;
        Ok(grad_plus(phi))
    }

    pub fn shift_back<T: Real>(&self, v: &VectorField3<T>) -> Result<VectorField3<T>> {
        self.check(v.dims())?;
        Ok(shift_back(v))
    }

    pub fn shift_forward<T: Real>(&self, v: &VectorField3<T>) -> Result<VectorField3<T>> {
        self.check(v.dims())?;
        Ok(shift_forward(v))
    }

    pub fn extend_a<T: Real>(&self, v: &VectorField3<T>) -> Result<Field6<T>> {
        self.check(v.dims())?;
        Ok(extend_a(v))
    }

    pub fn restrict_a_star<T: Real>(&self, w: &Field6<T>) -> Result<VectorField3<T>> {
        self.check(w.dims())?;
        Ok(restrict_a_star(w))
    }

    pub fn constraint_violation<T: Real>(
        &self,
        v: &VectorField3<T>,
        gamma: &ScalarField<T>,
    ) -> Result<ScalarField<T>> {
        self.check(v.dims())?;
        constraint_violation(v, gamma)
    }
}

/// `(div⁻v)[x] = Σ_c v_c[x] − v_c[x − e_c]`.
pub fn div_minus<T: Real>(v: &VectorField3<T>) -> ScalarField<T> {
    let dims = v.dims();
    let [n1, n2, n3] = dims.shape();
    let plane = n1 * n2;
    let [vx, vy, vz] = v.components();
    let mut out = ScalarField::zeros(dims);
    out.as_mut_slice()
        .par_chunks_mut(plane)
        .enumerate()
        .for_each(|(k, o)| {
            let km = (k + n3 - 1) % n3;
            for j in 0..n2 {
                let jm = (j + n2 - 1) % n2;
                for i in 0..n1 {
                    let im = (i + n1 - 1) % n1;
                    let idx = i + n1 * j + plane * k;
                    o[i + n1 * j] = vx[idx] - vx[im + n1 * j + plane * k] + vy[idx]
                        - vy[i + n1 * jm + plane * k]
                        + vz[idx]
                        - vz[i + n1 * j + plane * km];
                }
            }
        });
    out
}

/// Forward differences `(∇⁺φ)_c[x] = φ[x + e_c] − φ[x]`.
pub fn grad_plus<T: Real>(phi: &ScalarField<T>) -> VectorField3<T> {
    let dims = phi.dims();
    let src = phi.as_slice();
    let mut out = VectorField3::zeros(dims);
    for (axis, plane) in Axis::ALL.into_iter().zip(out.components_mut()) {
        roll_into(src, plane, dims, axis, Shift::Forward);
        plane
            .par_iter_mut()
            .zip(src.par_iter())
            .for_each(|(o, &p)| *o = *o - p);
    }
    out
}

fn shift_components<T: Real>(v: &VectorField3<T>, shift: Shift) -> VectorField3<T> {
    let dims = v.dims();
    let mut out = VectorField3::zeros(dims);
    for (c, plane) in out.components_mut().into_iter().enumerate() {
        roll_into(v.component(c), plane, dims, Axis::ALL[c], shift);
    }
    out
}

/// `S v = (v_x[i−1,j,k], v_y[i,j−1,k], v_z[i,j,k−1])`.
pub fn shift_back<T: Real>(v: &VectorField3<T>) -> VectorField3<T> {
    shift_components(v, Shift::Back)
}

/// `S* v = (v_x[i+1,j,k], v_y[i,j+1,k], v_z[i,j,k+1])`, the inverse and adjoint of `S`.
pub fn shift_forward<T: Real>(v: &VectorField3<T>) -> VectorField3<T> {
    shift_components(v, Shift::Forward)
}

/// `A v = (v; S v)/√2`.
pub fn extend_a<T: Real>(v: &VectorField3<T>) -> Field6<T> {
    let dims = v.dims();
    let s = T::FRAC_1_SQRT_2();
    let mut out = Field6::zeros(dims);
    {
        let planes = out.components_mut();
        let [p0, p1, p2, p3, p4, p5] = planes;
        for (c, (lo, hi)) in [(p0, p3), (p1, p4), (p2, p5)].into_iter().enumerate() {
            let src = v.component(c);
            roll_into(src, hi, dims, Axis::ALL[c], Shift::Back);
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .zip(src.par_iter())
                .for_each(|((l, h), &x)| {
                    *l = x * s;
                    *h = *h * s;
                });
        }
    }
    out
}

/// `A* (w₁; w₂) = (w₁ + S* w₂)/√2`.
pub fn restrict_a_star<T: Real>(w: &Field6<T>) -> VectorField3<T> {
    let dims = w.dims();
    let s = T::FRAC_1_SQRT_2();
    let mut out = VectorField3::zeros(dims);
    for (c, plane) in out.components_mut().into_iter().enumerate() {
        roll_into(w.component(c + 3), plane, dims, Axis::ALL[c], Shift::Forward);
        plane
            .par_iter_mut()
            .zip(w.component(c).par_iter())
            .for_each(|(o, &a)| *o = (a + *o) * s);
    }
    out
}

pub(crate) fn check_gamma<T: Real>(gamma: &ScalarField<T>) -> Result<()> {
    for (index, &g) in gamma.as_slice().iter().enumerate() {
        if !g.is_finite() {
            return Err(Error::NonFinite {
                what: "crack resistance",
                index,
            });
        }
        if g < T::zero() {
            return Err(Error::NegativeGamma {
                index,
                value: g.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Per-voxel excess `max(0, ‖v‖² + ‖S v‖² − 2γ²)` of the face-flow bound.
pub fn constraint_violation<T: Real>(
    v: &VectorField3<T>,
    gamma: &ScalarField<T>,
) -> Result<ScalarField<T>> {
    v.dims().check(&gamma.dims())?;
    check_gamma(gamma)?;
    let sv = shift_back(v);
    let two = T::lit(2.0);
    let g = gamma.as_slice();
    let mut out = ScalarField::zeros(v.dims());
    out.as_mut_slice()
        .par_iter_mut()
        .enumerate()
        .for_each(|(idx, o)| {
            let a = v.at(idx);
            let b = sv.at(idx);
            let sq = a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + b[0] * b[0] + b[1] * b[1]
                + b[2] * b[2];
            *o = (sq - two * g[idx] * g[idx]).max(T::zero());
        });
    Ok(out)
}
