//! Fourier-space application of the discrete gradient projector
//! `Γ = ∇⁺ (div⁻ ∇⁺)† div⁻` and of the affine projector onto compatible
//! normal fields.
//!
//! With the forward-difference symbol `k̂_j(n) = e^{2πi n_j/N_j} − 1`, the
//! backward divergence has symbol `−conj(k̂)` and the Laplacian `−‖k̂‖²`, so
//! at every nonzero frequency `Γ̂ = k̂ k̂ᴴ / ‖k̂‖²`. The zero frequency is
//! mapped to zero.

use num_traits::Zero;
use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::Fft3;
use crate::grid::{Direction, Field6, GridDims, VectorField3};
use crate::operators::{extend_a, restrict_a_star, roll_into, Shift};
use crate::scalar::Real;

/// Precomputed symbols, transform plans and workspaces for one grid.
pub struct SpectralPlan<T: Real> {
    dims: GridDims,
    fft: Fft3<T>,
    symbols: [Vec<Complex<T>>; 3],
    buf_a: Vec<Complex<T>>,
    buf_b: Vec<Complex<T>>,
    buf_c: Vec<Complex<T>>,
    work: Vec<Complex<T>>,
    reference: bool,
}

impl<T: Real> Clone for SpectralPlan<T> {
    fn clone(&self) -> Self {
        Self {
            dims: self.dims,
            fft: self.fft.clone(),
            symbols: self.symbols.clone(),
            buf_a: self.buf_a.clone(),
            buf_b: self.buf_b.clone(),
            buf_c: self.buf_c.clone(),
            work: self.work.clone(),
            reference: self.reference,
        }
    }
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(dims: GridDims) -> Self {
        let symbols = std::array::from_fn(|axis| {
            let n = dims.shape()[axis];
            (0..n)
                .map(|m| {
                    let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                    // cos θ − 1 = −2 sin²(θ/2) avoids cancellation near zero.
                    let half = (0.5 * theta).sin();
                    Complex::new(T::lit(-2.0 * half * half), T::lit(theta.sin()))
                })
                .collect()
        });
        let len = dims.len();
        Self {
            dims,
            fft: Fft3::new(dims),
            symbols,
            buf_a: vec![Complex::zero(); len],
            buf_b: vec![Complex::zero(); len],
            buf_c: vec![Complex::zero(); len],
            work: vec![Complex::zero(); len],
            reference: false,
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Forces three separate complex transforms per direction instead of the
    /// packed real-pair path. Both compute the same operator.
    pub fn set_reference_transforms(&mut self, on: bool) {
        self.reference = on;
    }

    /// `k̂(n)` for the frequency with indices `n`.
    pub fn symbol(&self, n: [usize; 3]) -> [Complex<T>; 3] {
        std::array::from_fn(|a| self.symbols[a][n[a]])
    }

    /// `Γ w` for a three-component field.
    pub fn gamma_apply(&mut self, w: &VectorField3<T>) -> Result<VectorField3<T>> {
        self.dims.check(&w.dims())?;
        if let Some(index) = w.first_non_finite() {
            return Err(Error::NonFinite {
                what: "Green operator input",
                index,
            });
        }
        let mut out = VectorField3::zeros(self.dims);
        let [x, y, z] = w.components();
        self.gamma_apply_planes([x, y, z], out.components_mut());
        Ok(out)
    }

    /// Unchecked planar form of [`Self::gamma_apply`] used inside the solver loop.
    pub fn gamma_apply_planes(&mut self, input: [&[T]; 3], output: [&mut [T]; 3]) {
        if self.reference {
            self.apply_reference(input, output);
        } else {
            self.apply_packed(input, output);
        }
    }

    fn apply_packed(&mut self, input: [&[T]; 3], output: [&mut [T]; 3]) {
        let dims = self.dims;
        let [x, y, z] = input;
        self.buf_a
            .par_iter_mut()
            .zip(x.par_iter().zip(y.par_iter()))
            .for_each(|(c, (&a, &b))| *c = Complex::new(a, b));
        self.buf_b
            .par_iter_mut()
            .zip(z.par_iter())
            .for_each(|(c, &a)| *c = Complex::new(a, T::zero()));
        self.fft.forward(&mut self.buf_a, &mut self.work);
        self.fft.forward(&mut self.buf_b, &mut self.work);

        // the 1/N of both inverse transforms is folded into the symbol
        let half = T::lit(0.5) / T::lit(dims.len() as f64);
        let inv_n = T::one() / T::lit(dims.len() as f64);
        let packed = &self.buf_a;
        let symbols = &self.symbols;
        let [n1, n2, n3] = dims.shape();
        let plane = n1 * n2;
        let neg = |m: usize, n: usize| if m == 0 { 0 } else { n - m };
        self.buf_c
            .par_chunks_mut(plane)
            .zip(self.buf_b.par_chunks_mut(plane))
            .enumerate()
            .for_each(|(c, (out_xy, zs))| {
                let kz = symbols[2][c];
                let cn = neg(c, n3);
                for b in 0..n2 {
                    let ky = symbols[1][b];
                    let row_q = n1 * (neg(b, n2) + n2 * cn);
                    for a in 0..n1 {
                        let kx = symbols[0][a];
                        let o = a + n1 * b;
                        let k2 = kx.norm_sqr() + ky.norm_sqr() + kz.norm_sqr();
                        if k2 == T::zero() {
                            out_xy[o] = Complex::zero();
                            zs[o] = Complex::zero();
                            continue;
                        }
                        let cp = packed[o + plane * c];
                        let cq = packed[neg(a, n1) + row_q].conj();
                        let wx = (cp + cq).scale(half);
                        // (cp − cq)/(2i)
                        let d = (cp - cq).scale(half);
                        let wy = Complex::new(d.im, -d.re);
                        let wz = zs[o].scale(inv_n);
                        let s = (kx.conj() * wx + ky.conj() * wy + kz.conj() * wz).unscale(k2);
                        let ox = kx * s;
                        let oy = ky * s;
                        out_xy[o] = Complex::new(ox.re - oy.im, ox.im + oy.re);
                        zs[o] = kz * s;
                    }
                }
            });

        self.fft.inverse_unnormalized(&mut self.buf_c, &mut self.work);
        self.fft.inverse_unnormalized(&mut self.buf_b, &mut self.work);
        let [ox, oy, oz] = output;
        ox.par_iter_mut()
            .zip(oy.par_iter_mut())
            .zip(self.buf_c.par_iter())
            .for_each(|((a, b), c)| {
                *a = c.re;
                *b = c.im;
            });
        oz.par_iter_mut()
            .zip(self.buf_b.par_iter())
            .for_each(|(a, c)| *a = c.re);
    }

    fn apply_reference(&mut self, input: [&[T]; 3], output: [&mut [T]; 3]) {
        let dims = self.dims;
        let len = dims.len();
        let mut spectra: Vec<Vec<Complex<T>>> = input
            .iter()
            .map(|plane| {
                let mut buf: Vec<Complex<T>> =
                    plane.iter().map(|&v| Complex::new(v, T::zero())).collect();
                self.fft.forward(&mut buf, &mut self.work);
                buf
            })
            .collect();
        for p in 0..len {
            let [a, b, c] = dims.coords(p);
            let kh = self.symbol([a, b, c]);
            let k2 = kh[0].norm_sqr() + kh[1].norm_sqr() + kh[2].norm_sqr();
            if k2 == T::zero() {
                for s in spectra.iter_mut() {
                    s[p] = Complex::zero();
                }
                continue;
            }
            let s = (0..3)
                .map(|j| kh[j].conj() * spectra[j][p])
                .fold(Complex::zero(), |acc, t| acc + t)
                .unscale(k2);
            for j in 0..3 {
                spectra[j][p] = kh[j] * s;
            }
        }
        for (spec, out) in spectra.iter_mut().zip(output) {
            self.fft.inverse(spec, &mut self.work);
            for (o, c) in out.iter_mut().zip(spec.iter()) {
                *o = c.re;
            }
        }
    }

    /// Orthogonal projection of `w` onto the compatible normal fields
    /// `{ξ : A*ξ = ξ̄ + ∇⁺φ}`:
    /// `P(w) = Aξ̄ + w − A A* w + A Γ A* w`.
    pub fn project_compatible(&mut self, w: &Field6<T>, dir: &Direction<T>) -> Result<Field6<T>> {
        self.dims.check(&w.dims())?;
        let a = restrict_a_star(w);
        let g = self.gamma_apply(&a)?;
        let mut d = a;
        // d = A*w − Γ A*w
        d.axpy(-T::one(), &g)?;
        let ad = extend_a(&d);
        let s = T::FRAC_1_SQRT_2();
        let xi = dir.components();
        let mut out = w.clone();
        for (c, plane) in out.components_mut().into_iter().enumerate() {
            let shift = xi[c % 3] * s;
            let sub = ad.component(c);
            plane
                .par_iter_mut()
                .zip(sub.par_iter())
                .for_each(|(o, &x)| *o = *o - x + shift);
        }
        Ok(out)
    }
}

/// `A v` for a constant three-vector, written into the two halves of each voxel.
pub fn extended_direction<T: Real>(dir: &Direction<T>) -> [T; 6] {
    let s = T::FRAC_1_SQRT_2();
    let v = dir.components();
    [v[0] * s, v[1] * s, v[2] * s, v[0] * s, v[1] * s, v[2] * s]
}

/// `out = S d` with `S` the backward shift, plane by plane.
pub(crate) fn shift_back_planes<T: Real>(dims: GridDims, src: [&[T]; 3], dst: [&mut [T]; 3]) {
    for (c, (s, d)) in src.into_iter().zip(dst).enumerate() {
        roll_into(s, d, dims, crate::grid::Axis::ALL[c], Shift::Back);
    }
}
