//! Periodic voxel grids and the dense fields living on them.
//!
//! Fields store their components planar: component `c` occupies the
//! contiguous block `c * len .. (c + 1) * len`, and within a block the voxel
//! index runs `i` fastest, then `j`, then `k`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Voxels per reduction chunk. Fixed so that reductions do not depend on the
/// thread count.
pub const REDUCTION_CHUNK: usize = 4096;

/// Voxel counts of a periodic grid together with the (cubic) voxel edge length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDims {
    n: [usize; 3],
    h: f64,
}

impl GridDims {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidGrid(format!(
                "voxel counts must be positive, got {n1}x{n2}x{n3}"
            )));
        }
        n1.checked_mul(n2)
            .and_then(|p| p.checked_mul(n3))
            .and_then(|p| p.checked_mul(6 * 16))
            .ok_or_else(|| Error::InvalidGrid(format!("{n1}x{n2}x{n3} is not addressable")))?;
        Ok(Self {
            n: [n1, n2, n3],
            h: 1.0,
        })
    }

    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn with_spacing(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("voxel spacing must be positive, got {h}")));
        }
        self.h = h;
        Ok(self)
    }

    #[inline]
    pub fn shape(&self) -> [usize; 3] {
        self.n
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.n[0]
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.n[1]
    }

    #[inline]
    pub fn n3(&self) -> usize {
        self.n[2]
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Number of voxels.
    #[inline]
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    /// Linear index of `(i, j, k)` with every coordinate wrapped periodically.
    #[inline]
    pub fn index_wrapped(&self, i: i64, j: i64, k: i64) -> usize {
        let w = |x: i64, n: usize| x.rem_euclid(n as i64) as usize;
        self.index(w(i, self.n[0]), w(j, self.n[1]), w(k, self.n[2]))
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let rest = idx / self.n[0];
        [i, rest % self.n[1], rest / self.n[1]]
    }

    /// Same voxel counts, ignoring the spacing.
    pub fn same_shape(&self, other: &GridDims) -> bool {
        self.n == other.n
    }

    pub fn check(&self, other: &GridDims) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: *self,
                found: *other,
            })
        }
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n[0], self.n[1], self.n[2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "0" => Ok(Axis::X),
            "y" | "1" => Ok(Axis::Y),
            "z" | "2" => Ok(Axis::Z),
            other => Err(Error::InvalidConfig(format!("unknown axis {other:?}"))),
        }
    }
}

/// Prescribed mean crack normal, a point on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    v: [T; 3],
}

impl<T: Real> Direction<T> {
    /// Accepts `v` only if it already has unit length (to 1e-12, or a few
    /// ulps for single precision).
    pub fn new(v: [T; 3]) -> Result<Self> {
        let norm = norm3(v);
        let tol = T::lit(1e-12).max(T::lit(8.0) * T::eps());
        if !norm.is_finite() || (norm - T::one()).abs() > tol {
            return Err(Error::NotUnitDirection {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self { v })
    }

    /// Normalizes `v`; fails for the zero vector.
    pub fn normalized(v: [T; 3]) -> Result<Self> {
        let norm = norm3(v);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::NotUnitDirection {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self {
            v: [v[0] / norm, v[1] / norm, v[2] / norm],
        })
    }

    pub fn axis(axis: Axis) -> Self {
        let mut v = [T::zero(); 3];
        v[axis.index()] = T::one();
        Self { v }
    }

    #[inline]
    pub fn components(&self) -> [T; 3] {
        self.v
    }
}

#[inline]
fn norm3<T: Real>(v: [T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Order in which partial sums are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    /// Fixed-size chunks combined by a pairwise tree; bitwise reproducible
    /// for any thread count.
    #[default]
    Deterministic,
    /// Work-stealing sum; the combination order may vary between runs.
    Fast,
}

/// Pairwise (tree) summation in a fixed order.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Combines per-chunk partial sums according to `mode`.
pub fn combine<T: Real>(partials: &[T], mode: Reduction) -> T {
    match mode {
        Reduction::Deterministic => pairwise_sum(partials),
        Reduction::Fast => partials.par_iter().copied().sum(),
    }
}

/// `Σ_{i < len} f(i)`, chunked by [`REDUCTION_CHUNK`].
pub fn sum_indexed<T, F>(len: usize, mode: Reduction, f: F) -> T
where
    T: Real,
    F: Fn(usize) -> T + Sync,
{
    let chunks = len.div_ceil(REDUCTION_CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCTION_CHUNK;
            let hi = (lo + REDUCTION_CHUNK).min(len);
            let mut acc = T::zero();
            for i in lo..hi {
                acc = acc + f(i);
            }
            acc
        })
        .collect();
    combine(&partials, mode)
}

/// Dense periodic field with `K` real components per voxel.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T, const K: usize> {
    dims: GridDims,
    data: Vec<T>,
}

pub type ScalarField<T> = Field<T, 1>;
pub type VectorField3<T> = Field<T, 3>;
pub type Field6<T> = Field<T, 6>;

impl<T: Real, const K: usize> Field<T, K> {
    pub fn zeros(dims: GridDims) -> Self {
        Self {
            dims,
            data: vec![T::zero(); K * dims.len()],
        }
    }

    pub fn constant(dims: GridDims, value: [T; K]) -> Self {
        let n = dims.len();
        let mut data = Vec::with_capacity(K * n);
        for v in value {
            data.extend(std::iter::repeat(v).take(n));
        }
        Self { dims, data }
    }

    /// Builds a field from planar data (`K` blocks of `dims.len()` values).
    pub fn from_vec(dims: GridDims, data: Vec<T>) -> Result<Self> {
        if data.len() != K * dims.len() {
            return Err(Error::LengthMismatch {
                expected: K * dims.len(),
                found: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    /// `f(voxel_index, component)` for every entry.
    pub fn from_fn(dims: GridDims, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let n = dims.len();
        let mut data = Vec::with_capacity(K * n);
        for c in 0..K {
            data.extend((0..n).map(|i| f(i, c)));
        }
        Self { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Number of voxels.
    #[inline]
    pub fn voxels(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[T] {
        let n = self.dims.len();
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.dims.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn components(&self) -> [&[T]; K] {
        let n = self.dims.len();
        std::array::from_fn(|c| &self.data[c * n..(c + 1) * n])
    }

    pub fn components_mut(&mut self) -> [&mut [T]; K] {
        let n = self.dims.len();
        let mut planes = self.data.chunks_mut(n.max(1));
        std::array::from_fn(|_| planes.next().expect("component plane"))
    }

    /// The `K` values at one voxel.
    #[inline]
    pub fn at(&self, idx: usize) -> [T; K] {
        let n = self.dims.len();
        std::array::from_fn(|c| self.data[c * n + idx])
    }

    #[inline]
    pub fn set(&mut self, idx: usize, value: [T; K]) {
        let n = self.dims.len();
        for (c, v) in value.into_iter().enumerate() {
            self.data[c * n + idx] = v;
        }
    }

    /// Splits every component plane into aligned chunks of `chunk` voxels.
    pub fn voxel_chunks(&self, chunk: usize) -> Vec<[&[T]; K]> {
        let n = self.dims.len();
        let mut iters: Vec<_> = self.data.chunks(n).map(|p| p.chunks(chunk)).collect();
        (0..n.div_ceil(chunk))
            .map(|_| std::array::from_fn(|c| iters[c].next().expect("chunk")))
            .collect()
    }

    pub fn voxel_chunks_mut(&mut self, chunk: usize) -> Vec<[&mut [T]; K]> {
        let n = self.dims.len();
        let mut iters: Vec<_> = self
            .data
            .chunks_mut(n)
            .map(|p| p.chunks_mut(chunk))
            .collect();
        (0..n.div_ceil(chunk))
            .map(|_| std::array::from_fn(|c| iters[c].next().expect("chunk")))
            .collect()
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|v| !v.is_finite())
    }

    pub fn is_finite(&self) -> bool {
        self.data.par_iter().all(|v| v.is_finite())
    }

    pub fn scale(&mut self, s: T) {
        self.data.par_iter_mut().for_each(|v| *v = *v * s);
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: T, other: &Self) -> Result<()> {
        self.dims.check(&other.dims)?;
        self.data
            .par_iter_mut()
            .zip(other.data.par_iter())
            .for_each(|(a, &b)| *a = *a + alpha * b);
        Ok(())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Converts the scalar type entry by entry.
    pub fn cast<U: Real>(&self) -> Field<U, K> {
        Field {
            dims: self.dims,
            data: self
                .data
                .iter()
                .map(|v| U::lit(v.to_f64_lossy()))
                .collect(),
        }
    }
}

/// `⟨a, b⟩ = (1/N) Σ_voxels Σ_components a·b`.
pub fn inner_product<T: Real, const K: usize>(a: &Field<T, K>, b: &Field<T, K>) -> Result<T> {
    inner_product_with(a, b, Reduction::Deterministic)
}

pub fn inner_product_with<T: Real, const K: usize>(
    a: &Field<T, K>,
    b: &Field<T, K>,
    mode: Reduction,
) -> Result<T> {
    a.dims.check(&b.dims)?;
    let (x, y) = (a.as_slice(), b.as_slice());
    let sum = sum_indexed(x.len(), mode, |i| x[i] * y[i]);
    Ok(sum / T::lit(a.voxels() as f64))
}

/// `‖a‖ = √⟨a, a⟩`.
pub fn norm<T: Real, const K: usize>(a: &Field<T, K>) -> T {
    norm_with(a, Reduction::Deterministic)
}

pub fn norm_with<T: Real, const K: usize>(a: &Field<T, K>, mode: Reduction) -> T {
    let x = a.as_slice();
    (sum_indexed(x.len(), mode, |i| x[i] * x[i]) / T::lit(a.voxels() as f64)).sqrt()
}

/// Componentwise voxel average.
pub fn mean_field<T: Real, const K: usize>(a: &Field<T, K>) -> [T; K] {
    mean_field_with(a, Reduction::Deterministic)
}

pub fn mean_field_with<T: Real, const K: usize>(a: &Field<T, K>, mode: Reduction) -> [T; K] {
    let n = T::lit(a.voxels() as f64);
    std::array::from_fn(|c| {
        let plane = a.component(c);
        sum_indexed(plane.len(), mode, |i| plane[i]) / n
    })
}

/// Euclidean norm over the `K` components at every voxel.
pub fn pointwise_norm<T: Real, const K: usize>(a: &Field<T, K>) -> ScalarField<T> {
    let n = a.voxels();
    let planes = a.components();
    let mut out = vec![T::zero(); n];
    out.par_chunks_mut(REDUCTION_CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let base = ci * REDUCTION_CHUNK;
            for (o, slot) in chunk.iter_mut().enumerate() {
                let idx = base + o;
                let mut s = T::zero();
                for p in planes.iter() {
                    s = s + p[idx] * p[idx];
                }
                *slot = s.sqrt();
            }
        });
    Field {
        dims: a.dims,
        data: out,
    }
}
