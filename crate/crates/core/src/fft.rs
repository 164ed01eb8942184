//! Three-dimensional complex FFTs on the voxel layout, built from batched
//! one-dimensional `rustfft` plans. Non-contiguous axes are transposed into a
//! work buffer, transformed as contiguous lines and transposed back.

use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::grid::{Axis, GridDims};
use crate::scalar::Real;

/// Lines handed to one rayon task.
const LINE_BATCH_POINTS: usize = 1 << 14;

pub struct Fft3<T: Real> {
    dims: GridDims,
    forward: [Arc<dyn Fft<T>>; 3],
    inverse: [Arc<dyn Fft<T>>; 3],
}

impl<T: Real> Clone for Fft3<T> {
    fn clone(&self) -> Self {
        Self {
            dims: self.dims,
            forward: self.forward.clone(),
            inverse: self.inverse.clone(),
        }
    }
}

impl<T: Real> Fft3<T> {
    pub fn new(dims: GridDims) -> Self {
        let mut planner = FftPlanner::new();
        let shape = dims.shape();
        let forward = std::array::from_fn(|a| planner.plan_fft_forward(shape[a]));
        let inverse = std::array::from_fn(|a| planner.plan_fft_inverse(shape[a]));
        Self {
            dims,
            forward,
            inverse,
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Unnormalized forward transform `f̂(n) = Σ_x f(x) e^{−2πi n·x/N}`.
    pub fn forward(&self, data: &mut [Complex<T>], work: &mut [Complex<T>]) {
        self.transform(data, work, &self.forward);
    }

    /// Inverse transform including the `1/N` factor, so that
    /// `inverse ∘ forward` is the identity.
    pub fn inverse(&self, data: &mut [Complex<T>], work: &mut [Complex<T>]) {
        self.inverse_unnormalized(data, work);
        let s = T::one() / T::lit(self.dims.len() as f64);
        data.par_iter_mut().for_each(|c| *c = c.scale(s));
    }

    /// Inverse transform without the `1/N` factor.
    pub fn inverse_unnormalized(&self, data: &mut [Complex<T>], work: &mut [Complex<T>]) {
        self.transform(data, work, &self.inverse);
    }

    fn transform(
        &self,
        data: &mut [Complex<T>],
        work: &mut [Complex<T>],
        plans: &[Arc<dyn Fft<T>>; 3],
    ) {
        assert_eq!(data.len(), self.dims.len());
        assert_eq!(work.len(), self.dims.len());
        for axis in Axis::ALL {
            let plan = &plans[axis.index()];
            if plan.len() == 1 {
                continue;
            }
            match axis {
                Axis::X => lines(plan, data),
                _ => {
                    to_lines(data, work, self.dims, axis);
                    lines(plan, work);
                    from_lines(work, data, self.dims, axis);
                }
            }
        }
    }
}

fn lines<T: Real>(plan: &Arc<dyn Fft<T>>, data: &mut [Complex<T>]) {
    let n = plan.len();
    let batch = n * (LINE_BATCH_POINTS / n).max(1);
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(batch).for_each_init(
        || vec![Complex::<T>::zero(); scratch_len],
        |scratch, chunk| plan.process_with_scratch(chunk, scratch),
    );
}

/// Columns of the source matrix handled by one task, and rows per tile.
const TRANSPOSE_BLOCK: usize = 16;

/// Transposes `batches` consecutive `rows × cols` row-major matrices of `src`
/// into `cols × rows` matrices in `dst`, tile by tile.
fn transpose_batched<T: Real>(
    src: &[Complex<T>],
    dst: &mut [Complex<T>],
    batches: usize,
    rows: usize,
    cols: usize,
) {
    let size = rows * cols;
    debug_assert_eq!(src.len(), batches * size);
    dst.par_chunks_mut(size)
        .zip(src.par_chunks(size))
        .for_each(|(d, s)| {
            d.par_chunks_mut(TRANSPOSE_BLOCK * rows)
                .enumerate()
                .for_each(|(b, block)| {
                    let c0 = b * TRANSPOSE_BLOCK;
                    let width = block.len() / rows;
                    for r0 in (0..rows).step_by(TRANSPOSE_BLOCK) {
                        let r1 = (r0 + TRANSPOSE_BLOCK).min(rows);
                        for dc in 0..width {
                            let out = &mut block[dc * rows..(dc + 1) * rows];
                            for r in r0..r1 {
                                out[r] = s[r * cols + c0 + dc];
                            }
                        }
                    }
                });
        });
}

/// Reorders `src` so that `axis` becomes the fastest index of `dst`.
fn to_lines<T: Real>(src: &[Complex<T>], dst: &mut [Complex<T>], dims: GridDims, axis: Axis) {
    let [n1, n2, n3] = dims.shape();
    match axis {
        // per z-plane: (j, i) -> (i, j)
        Axis::Y => transpose_batched(src, dst, n3, n2, n1),
        // (k, l) -> (l, k) with l the in-plane index
        Axis::Z => transpose_batched(src, dst, 1, n3, n1 * n2),
        Axis::X => dst.copy_from_slice(src),
    }
}

fn from_lines<T: Real>(src: &[Complex<T>], dst: &mut [Complex<T>], dims: GridDims, axis: Axis) {
    let [n1, n2, n3] = dims.shape();
    match axis {
        Axis::Y => transpose_batched(src, dst, n3, n1, n2),
        Axis::Z => transpose_batched(src, dst, 1, n1 * n2, n3),
        Axis::X => dst.copy_from_slice(src),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(data: &[Complex<f64>], dims: GridDims) -> Vec<Complex<f64>> {
        let [n1, n2, n3] = dims.shape();
        let mut out = vec![Complex::zero(); data.len()];
        for (p, o) in out.iter_mut().enumerate() {
            let [a, b, c] = dims.coords(p);
            for (x, &v) in data.iter().enumerate() {
                let [i, j, k] = dims.coords(x);
                let phase = -2.0
                    * std::f64::consts::PI
                    * ((a * i) as f64 / n1 as f64
                        + (b * j) as f64 / n2 as f64
                        + (c * k) as f64 / n3 as f64);
                *o += v * Complex::from_polar(1.0, phase);
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_and_round_trips() {
        let dims = GridDims::new(4, 3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<Complex<f64>> = (0..dims.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fft = Fft3::new(dims);
        let mut work = vec![Complex::zero(); dims.len()];
        let mut buf = data.clone();
        fft.forward(&mut buf, &mut work);
        for (x, y) in buf.iter().zip(naive_dft(&data, dims)) {
            assert!((x - y).norm() < 1e-12);
        }
        fft.inverse(&mut buf, &mut work);
        for (x, y) in buf.iter().zip(&data) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn flat_axis_is_skipped() {
        let dims = GridDims::new(6, 2, 1).unwrap();
        let fft = Fft3::<f64>::new(dims);
        let mut buf = vec![Complex::new(1.0, 0.0); 12];
        let mut work = vec![Complex::zero(); 12];
        fft.forward(&mut buf, &mut work);
        assert!((buf[0].re - 12.0).abs() < 1e-12);
        assert!(buf[1..].iter().all(|c| c.norm() < 1e-12));
    }
}
