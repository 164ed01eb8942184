//! Phase maps, phase-to-crack-resistance tables, generators and the FFVX
//! voxel container.

mod generate;
mod voxel_io;

use std::collections::BTreeMap;
use std::str::FromStr;

pub use generate::{
    gen_capsules, gen_laminate, gen_sphere, gen_sphere_pack, Capsule, CapsulePack, CapsuleSpec,
    PackTarget, SpherePack, SpherePackSpec,
};
pub use voxel_io::{
    load_voxel, read_voxel, save_phase_map, save_scalar_field, write_phase_map,
    write_scalar_field, VoxelData, FFVX_MAGIC, FFVX_VERSION,
};

use crate::error::{Error, Result};
use crate::grid::{GridDims, ScalarField};
use crate::scalar::Real;

/// One small phase id per voxel, same layout as the fields.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMap {
    dims: GridDims,
    ids: Vec<u8>,
}

impl PhaseMap {
    pub fn uniform(dims: GridDims, phase: u8) -> Self {
        Self {
            dims,
            ids: vec![phase; dims.len()],
        }
    }

    pub fn from_vec(dims: GridDims, ids: Vec<u8>) -> Result<Self> {
        if ids.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                found: ids.len(),
            });
        }
        Ok(Self { dims, ids })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn ids(&self) -> &[u8] {
        &self.ids
    }

    pub fn ids_mut(&mut self) -> &mut [u8] {
        &mut self.ids
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u8 {
        self.ids[self.dims.index(i, j, k)]
    }

    /// Voxel count of each phase present, by ascending id.
    pub fn counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for &p in &self.ids {
            *counts.entry(p).or_insert(0) += 1;
        }
        counts
    }

    /// Volume fraction of `phase`, an exact voxel count ratio.
    pub fn fraction(&self, phase: u8) -> f64 {
        self.ids.iter().filter(|&&p| p == phase).count() as f64 / self.ids.len() as f64
    }

    /// Applies `f` to every phase id.
    pub fn relabel(&self, f: impl Fn(u8) -> u8) -> Self {
        Self {
            dims: self.dims,
            ids: self.ids.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Crack resistance per phase id.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaTable<T> {
    entries: BTreeMap<u8, T>,
}

impl<T: Real> GammaTable<T> {
    pub fn new(entries: impl IntoIterator<Item = (u8, T)>) -> Result<Self> {
        let entries: BTreeMap<u8, T> = entries.into_iter().collect();
        if let Some((&id, &g)) = entries.iter().find(|(_, &g)| !(g >= T::zero()) || !g.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "crack resistance of phase {id} must be finite and non-negative, got {g}"
            )));
        }
        if entries.values().all(|&g| g == T::zero()) {
            return Err(Error::ZeroGamma);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, phase: u8) -> Option<T> {
        self.entries.get(&phase).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u8, T)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

impl<T: Real> FromStr for GammaTable<T> {
    type Err = Error;

    /// Parses `"0=1.0,1=10"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for item in s.split(',').filter(|t| !t.trim().is_empty()) {
            let (id, value) = item.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("expected phase=value, got {item:?}"))
            })?;
            let id: u8 = id
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad phase id {id:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad crack resistance {value:?}")))?;
            entries.push((id, T::lit(value)));
        }
        Self::new(entries)
    }
}

/// Per-voxel table lookup.
pub fn phases_to_gamma<T: Real>(map: &PhaseMap, table: &GammaTable<T>) -> Result<ScalarField<T>> {
    let data = map
        .ids
        .iter()
        .map(|&p| table.get(p).ok_or(Error::MissingPhase(p)))
        .collect::<Result<Vec<T>>>()?;
    ScalarField::from_vec(map.dims, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_two_phases() {
        let d = GridDims::new(4, 1, 1).unwrap();
        let map = PhaseMap::from_vec(d, vec![0, 1, 1, 0]).unwrap();
        let table: GammaTable<f64> = "0=1,1=10".parse().unwrap();
        assert_eq!(phases_to_gamma(&map, &table).unwrap().as_slice(), &[1.0, 10.0, 10.0, 1.0]);
        let pores: GammaTable<f64> = "0=1, 1=0".parse().unwrap();
        assert_eq!(phases_to_gamma(&map, &pores).unwrap().as_slice(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn relabeling_with_permuted_table() {
        let d = GridDims::new(3, 2, 1).unwrap();
        let map = PhaseMap::from_vec(d, vec![0, 1, 2, 2, 1, 0]).unwrap();
        let table = GammaTable::new([(0, 1.0), (1, 5.0), (2, 7.0)]).unwrap();
        let perm = |p: u8| (p + 1) % 3;
        let swapped = GammaTable::new(table.entries().map(|(k, v)| (perm(k), v))).unwrap();
        assert_eq!(
            phases_to_gamma(&map, &table).unwrap(),
            phases_to_gamma(&map.relabel(perm), &swapped).unwrap()
        );
    }

    #[test]
    fn missing_phase_and_bad_tables() {
        let d = GridDims::new(2, 1, 1).unwrap();
        let map = PhaseMap::from_vec(d, vec![0, 3]).unwrap();
        let table = GammaTable::new([(0, 1.0)]).unwrap();
        assert!(matches!(phases_to_gamma(&map, &table), Err(Error::MissingPhase(3))));
        assert!(GammaTable::new([(0, -1.0)]).is_err());
        assert!(GammaTable::new([(0, 0.0)]).is_err());
        assert!("0:1".parse::<GammaTable<f64>>().is_err());
    }

    #[test]
    fn counts_and_fractions() {
        let d = GridDims::new(4, 1, 1).unwrap();
        let map = PhaseMap::from_vec(d, vec![0, 1, 1, 1]).unwrap();
        assert_eq!(map.fraction(1), 0.75);
        assert_eq!(map.counts().get(&0), Some(&1));
    }
}
