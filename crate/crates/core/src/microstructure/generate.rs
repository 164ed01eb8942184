use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::PhaseMap;
use crate::error::{Error, Result};
use crate::grid::{Axis, GridDims};

/// Consecutive rejected placements before a pack is declared jammed.
const MAX_FAILED_ATTEMPTS: usize = 200_000;

/// Layered map along `axis`, layers given as `(thickness, phase)`.
pub fn gen_laminate(dims: GridDims, axis: Axis, layers: &[(usize, u8)]) -> Result<PhaseMap> {
    let n = dims.shape()[axis.index()];
    let total: usize = layers.iter().map(|l| l.0).sum();
    if total != n {
        return Err(Error::InvalidGenerator(format!(
            "layer thicknesses sum to {total}, axis {} has {n} voxels",
            axis.name()
        )));
    }
    if layers.iter().any(|l| l.0 < 2) {
        log::warn!("laminate layers thinner than 2 voxels couple across neighbouring layers");
    }
    let mut phase_of = Vec::with_capacity(n);
    for &(t, p) in layers {
        phase_of.extend(std::iter::repeat(p).take(t));
    }
    let a = axis.index();
    let ids = (0..dims.len())
        .map(|idx| phase_of[dims.coords(idx)[a]])
        .collect();
    PhaseMap::from_vec(dims, ids)
}

fn check_diameter(dims: GridDims, diameter: f64, what: &str) -> Result<()> {
    if !(diameter.is_finite() && diameter >= 0.0) {
        return Err(Error::InvalidGenerator(format!(
            "{what} must be finite and non-negative, got {diameter}"
        )));
    }
    let limit = min_extent(dims);
    if diameter > limit as f64 {
        return Err(Error::InvalidGenerator(format!(
            "{what} {diameter} exceeds the smallest grid extent {limit}"
        )));
    }
    Ok(())
}

/// Smallest extent among axes with more than one voxel.
fn min_extent(dims: GridDims) -> usize {
    dims.shape()
        .into_iter()
        .filter(|&n| n > 1)
        .min()
        .unwrap_or(1)
}

/// Visits every voxel whose centre offset from `center` (in voxel units,
/// unwrapped) lies inside the box `±extent`, with periodic wrapping.
fn for_each_near(
    dims: GridDims,
    center: [f64; 3],
    extent: [f64; 3],
    mut f: impl FnMut(usize, [f64; 3]),
) {
    let range = |a: usize| {
        let lo = (center[a] - extent[a] - 0.5).ceil() as i64;
        let hi = (center[a] + extent[a] - 0.5).floor() as i64;
        lo..=hi
    };
    for k in range(2) {
        let oz = k as f64 + 0.5 - center[2];
        for j in range(1) {
            let oy = j as f64 + 0.5 - center[1];
            for i in range(0) {
                let ox = i as f64 + 0.5 - center[0];
                f(dims.index_wrapped(i, j, k), [ox, oy, oz]);
            }
        }
    }
}

fn sphere_voxels(dims: GridDims, center: [f64; 3], diameter: f64, mut f: impl FnMut(usize)) {
    let r = 0.5 * diameter;
    let r2 = r * r;
    for_each_near(dims, center, [r; 3], |idx, o| {
        if o[0] * o[0] + o[1] * o[1] + o[2] * o[2] < r2 {
            f(idx)
        }
    });
}

/// Single sphere; `center` in voxel units, voxel `(i, j, k)` has its centre
/// at `(i + ½, j + ½, k + ½)`.
pub fn gen_sphere(
    dims: GridDims,
    center: [f64; 3],
    diameter: f64,
    phases: (u8, u8),
) -> Result<PhaseMap> {
    check_diameter(dims, diameter, "sphere diameter")?;
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidGenerator("sphere center must be finite".into()));
    }
    let mut map = PhaseMap::uniform(dims, phases.0);
    let ids = map.ids_mut();
    sphere_voxels(dims, center, diameter, |idx| ids[idx] = phases.1);
    Ok(map)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PackTarget {
    Count(usize),
    /// Pore volume fraction in `[0, 1)`.
    Porosity(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpherePackSpec {
    pub target: PackTarget,
    pub diameter: f64,
    pub seed: u64,
    /// Smallest admissible centre distance as a fraction of the diameter.
    /// `1.0` forbids overlap.
    pub min_separation: f64,
    /// `(matrix, pore)`.
    pub phases: (u8, u8),
}

impl SpherePackSpec {
    pub fn porosity(porosity: f64, diameter: f64, seed: u64) -> Self {
        Self {
            target: PackTarget::Porosity(porosity),
            diameter,
            seed,
            min_separation: 1.0,
            phases: (0, 1),
        }
    }

    pub fn count(count: usize, diameter: f64, seed: u64) -> Self {
        Self {
            target: PackTarget::Count(count),
            ..Self::porosity(0.0, diameter, seed)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpherePack {
    pub map: PhaseMap,
    pub centers: Vec<[f64; 3]>,
    /// Voxel fraction of the pore phase.
    pub porosity: f64,
}

fn sample_center(rng: &mut ChaCha8Rng, dims: GridDims) -> [f64; 3] {
    let mut c = [0.0; 3];
    for (a, &n) in dims.shape().iter().enumerate() {
        let u: f64 = rng.gen();
        c[a] = if n == 1 { 0.5 } else { u * n as f64 };
    }
    c
}

fn periodic_dist_sq(dims: GridDims, a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for (ax, &n) in dims.shape().iter().enumerate() {
        let n = n as f64;
        let mut d = a[ax] - b[ax];
        d -= n * (d / n).round();
        s += d * d;
    }
    s
}

/// Random sequential adsorption of equal spheres.
///
/// Candidate centres closer than `min_separation · diameter` (periodic
/// distance) to an accepted one are rejected. For a porosity target the pack
/// stops at whichever of the last two sphere counts is closer to the target.
pub fn gen_sphere_pack(dims: GridDims, spec: &SpherePackSpec) -> Result<SpherePack> {
    check_diameter(dims, spec.diameter, "pore diameter")?;
    if !(spec.min_separation.is_finite() && spec.min_separation >= 0.0) {
        return Err(Error::InvalidGenerator(format!(
            "min_separation must be non-negative, got {}",
            spec.min_separation
        )));
    }
    let target_porosity = match spec.target {
        PackTarget::Porosity(p) if !(0.0..1.0).contains(&p) => {
            return Err(Error::InvalidGenerator(format!(
                "porosity must lie in [0, 1), got {p}"
            )))
        }
        PackTarget::Porosity(p) => Some(p),
        PackTarget::Count(_) => None,
    };
    let (matrix, pore) = spec.phases;
    let n_vox = dims.len();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut map = PhaseMap::uniform(dims, matrix);
    let mut centers: Vec<[f64; 3]> = Vec::new();
    let mut pore_count = usize::from(matrix == pore) * n_vox;
    let sep_sq = (spec.min_separation * spec.diameter).powi(2);
    let mut failures = 0usize;
    let mut fresh = Vec::new();

    loop {
        match (spec.target, target_porosity) {
            (PackTarget::Count(c), _) if centers.len() >= c => break,
            (_, Some(p)) if pore_count as f64 / n_vox as f64 >= p => break,
            _ => {}
        }
        let c = sample_center(&mut rng, dims);
        if centers.iter().any(|&o| periodic_dist_sq(dims, c, o) < sep_sq) {
            failures += 1;
            if failures >= MAX_FAILED_ATTEMPTS {
                return Err(Error::Jammed {
                    placed: centers.len(),
                    porosity: pore_count as f64 / n_vox as f64,
                    target: target_porosity.unwrap_or(f64::NAN),
                });
            }
            continue;
        }
        failures = 0;
        fresh.clear();
        {
            let ids = map.ids();
            sphere_voxels(dims, c, spec.diameter, |idx| {
                if ids[idx] != pore {
                    fresh.push(idx)
                }
            });
        }
        fresh.sort_unstable();
        fresh.dedup();
        if let Some(p) = target_porosity {
            let before = pore_count as f64 / n_vox as f64;
            let after = (pore_count + fresh.len()) as f64 / n_vox as f64;
            if after >= p && (after - p) > (p - before) {
                break;
            }
        }
        let ids = map.ids_mut();
        for &idx in &fresh {
            ids[idx] = pore;
        }
        pore_count += fresh.len();
        centers.push(c);
    }
    let porosity = map.fraction(pore);
    Ok(SpherePack {
        map,
        centers,
        porosity,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapsuleSpec {
    pub count: usize,
    pub diameter: f64,
    /// Total length over diameter.
    pub aspect_ratio: f64,
    /// Relative preference for orientations along x, y, z.
    pub axis_weights: [f64; 3],
    pub seed: u64,
    /// `(matrix, fiber)`.
    pub phases: (u8, u8),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capsule {
    pub center: [f64; 3],
    /// Unit axis of the capsule.
    pub axis: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapsulePack {
    pub map: PhaseMap,
    pub capsules: Vec<Capsule>,
    /// Voxel fraction of the fiber phase.
    pub fraction: f64,
}

fn sample_axis(rng: &mut ChaCha8Rng, weights: [f64; 3]) -> [f64; 3] {
    loop {
        let mut a = [0.0; 3];
        for (c, w) in a.iter_mut().zip(weights) {
            let z: f64 = rng.sample(StandardNormal);
            *c = w.sqrt() * z;
        }
        let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
        if norm > 1e-12 {
            return a.map(|c| c / norm);
        }
    }
}

/// Overlapping spherocylinders (a segment with hemispherical caps) with
/// uniform centres. Each axis is the normalisation of `(√w_x z_x, √w_y z_y,
/// √w_z z_z)` for independent standard normal `z`.
pub fn gen_capsules(dims: GridDims, spec: &CapsuleSpec) -> Result<CapsulePack> {
    check_diameter(dims, spec.diameter, "capsule diameter")?;
    if !(spec.aspect_ratio.is_finite() && spec.aspect_ratio >= 1.0) {
        return Err(Error::InvalidGenerator(format!(
            "aspect ratio must be at least 1, got {}",
            spec.aspect_ratio
        )));
    }
    let length = spec.aspect_ratio * spec.diameter;
    let limit = min_extent(dims);
    if length >= limit as f64 && spec.count > 0 {
        return Err(Error::InvalidGenerator(format!(
            "capsule length {length} must stay below the smallest grid extent {limit}"
        )));
    }
    let w = spec.axis_weights;
    if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || w.iter().sum::<f64>() <= 0.0 {
        return Err(Error::InvalidGenerator(format!(
            "axis weights must be non-negative with a positive sum, got {w:?}"
        )));
    }
    let (matrix, fiber) = spec.phases;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut map = PhaseMap::uniform(dims, matrix);
    let r = 0.5 * spec.diameter;
    let r2 = r * r;
    let half = 0.5 * (length - spec.diameter).max(0.0);
    let mut capsules = Vec::with_capacity(spec.count);
    for _ in 0..spec.count {
        let center = sample_center(&mut rng, dims);
        let axis = sample_axis(&mut rng, w);
        let extent = axis.map(|a| half * a.abs() + r);
        let ids = map.ids_mut();
        for_each_near(dims, center, extent, |idx, o| {
            let t = (o[0] * axis[0] + o[1] * axis[1] + o[2] * axis[2]).clamp(-half, half);
            let d = [o[0] - t * axis[0], o[1] - t * axis[1], o[2] - t * axis[2]];
            if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] < r2 {
                ids[idx] = fiber;
            }
        });
        capsules.push(Capsule { center, axis });
    }
    let fraction = map.fraction(fiber);
    Ok(CapsulePack {
        map,
        capsules,
        fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_and_half_laminate() {
        let d = GridDims::new(8, 4, 4).unwrap();
        let m = gen_laminate(d, Axis::X, &[(4, 0), (4, 1)]).unwrap();
        for idx in 0..d.len() {
            let [i, _, _] = d.coords(idx);
            assert_eq!(m.ids()[idx], u8::from(i >= 4));
        }
        let single = gen_laminate(d, Axis::Z, &[(4, 3)]).unwrap();
        assert_eq!(single, PhaseMap::uniform(d, 3));
        assert!(gen_laminate(d, Axis::X, &[(4, 0), (3, 1)]).is_err());
    }

    #[test]
    fn centered_sphere_volume() {
        let d = GridDims::cubic(64).unwrap();
        let m = gen_sphere(d, [32.0; 3], 32.0, (0, 1)).unwrap();
        let analytic = PI / 6.0 * 32f64.powi(3) / 64f64.powi(3);
        let f = m.fraction(1);
        assert!((f - analytic).abs() / analytic < 0.02, "{f} vs {analytic}");
    }

    #[test]
    fn sphere_membership_matches_periodic_distance() {
        let d = GridDims::new(10, 7, 5).unwrap();
        let c = [9.3, 0.2, 2.5];
        let m = gen_sphere(d, c, 4.6, (0, 1)).unwrap();
        for idx in 0..d.len() {
            let [i, j, k] = d.coords(idx);
            let p = [i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5];
            let inside = periodic_dist_sq(d, p, c) < 2.3 * 2.3;
            assert_eq!(m.ids()[idx] == 1, inside, "voxel {i},{j},{k}");
        }
    }

    #[test]
    fn sphere_degenerate_and_periodic() {
        let d = GridDims::cubic(16).unwrap();
        assert_eq!(gen_sphere(d, [0.5; 3], 0.0, (0, 1)).unwrap(), PhaseMap::uniform(d, 0));
        let a = gen_sphere(d, [3.0, 15.0, 7.0], 9.0, (0, 1)).unwrap();
        let b = gen_sphere(d, [19.0, -1.0, 23.0], 9.0, (0, 1)).unwrap();
        assert_eq!(a, b);
        assert!(gen_sphere(d, [0.0; 3], 17.0, (0, 1)).is_err());
    }

    #[test]
    fn porosity_target_and_determinism() {
        let d = GridDims::cubic(64).unwrap();
        let spec = SpherePackSpec::porosity(0.05, 8.0, 42);
        let a = gen_sphere_pack(d, &spec).unwrap();
        assert!((a.porosity - 0.05).abs() <= 0.005, "{}", a.porosity);
        assert_eq!(a.porosity, a.map.fraction(1));
        let b = gen_sphere_pack(d, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_sphere_pack_equals_sphere() {
        let d = GridDims::new(20, 18, 16).unwrap();
        let pack = gen_sphere_pack(d, &SpherePackSpec::count(1, 7.0, 3)).unwrap();
        assert_eq!(pack.centers.len(), 1);
        let m = gen_sphere(d, pack.centers[0], 7.0, (0, 1)).unwrap();
        assert_eq!(pack.map, m);
    }

    #[test]
    fn hard_pack_respects_separation_and_jams() {
        let d = GridDims::cubic(24).unwrap();
        let pack = gen_sphere_pack(d, &SpherePackSpec::count(12, 6.0, 9)).unwrap();
        for (i, a) in pack.centers.iter().enumerate() {
            for b in &pack.centers[..i] {
                assert!(periodic_dist_sq(d, *a, *b) >= 36.0);
            }
        }
        let impossible = SpherePackSpec::porosity(0.6, 6.0, 1);
        assert!(matches!(gen_sphere_pack(d, &impossible), Err(Error::Jammed { .. })));
    }

    #[test]
    fn flat_grid_disks_are_centred_in_the_slab() {
        let d = GridDims::new(32, 32, 1).unwrap();
        let pack = gen_sphere_pack(d, &SpherePackSpec::count(4, 6.0, 5)).unwrap();
        assert!(pack.centers.iter().all(|c| c[2] == 0.5));
        assert!(pack.porosity > 0.0);
    }

    fn capsule_spec(weights: [f64; 3], count: usize) -> CapsuleSpec {
        CapsuleSpec {
            count,
            diameter: 3.0,
            aspect_ratio: 6.0,
            axis_weights: weights,
            seed: 11,
            phases: (0, 1),
        }
    }

    #[test]
    fn capsules_follow_single_axis_weight() {
        let d = GridDims::cubic(24).unwrap();
        let pack = gen_capsules(d, &capsule_spec([0.0, 1.0, 0.0], 10)).unwrap();
        for c in &pack.capsules {
            assert_eq!(c.axis[0], 0.0);
            assert_eq!(c.axis[2], 0.0);
            assert_eq!(c.axis[1].abs(), 1.0);
        }
        assert_eq!(pack.fraction, pack.map.fraction(1));
        let again = gen_capsules(d, &capsule_spec([0.0, 1.0, 0.0], 10)).unwrap();
        assert_eq!(pack, again);
    }

    #[test]
    fn zero_capsules_is_homogeneous_and_length_is_checked() {
        let d = GridDims::cubic(16).unwrap();
        let pack = gen_capsules(d, &capsule_spec([1.0; 3], 0)).unwrap();
        assert_eq!(pack.map, PhaseMap::uniform(d, 0));
        let mut long = capsule_spec([1.0; 3], 1);
        long.aspect_ratio = 6.0;
        long.diameter = 3.0;
        assert!(gen_capsules(GridDims::cubic(18).unwrap(), &long).is_err());
    }

    #[test]
    fn axis_aligned_capsule_voxel_count() {
        let d = GridDims::cubic(32).unwrap();
        let spec = CapsuleSpec {
            count: 1,
            diameter: 5.0,
            aspect_ratio: 4.0,
            axis_weights: [1.0, 0.0, 0.0],
            seed: 0,
            phases: (0, 1),
        };
        let pack = gen_capsules(d, &spec).unwrap();
        let c = pack.capsules[0].center;
        // independent membership test: distance to the segment along x
        let mut expected = 0;
        for idx in 0..d.len() {
            let [i, j, k] = d.coords(idx);
            let p = [i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5];
            let mut off = [0.0; 3];
            for a in 0..3 {
                let mut x = p[a] - c[a];
                x -= 32.0 * (x / 32.0).round();
                off[a] = x;
            }
            let along = (off[0].abs() - 7.5).max(0.0);
            if along * along + off[1] * off[1] + off[2] * off[2] < 6.25 {
                expected += 1;
            }
        }
        assert_eq!(pack.map.counts()[&1], expected);
    }
}
