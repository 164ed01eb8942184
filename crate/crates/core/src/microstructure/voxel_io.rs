use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::PhaseMap;
use crate::error::{FormatError, Result};
use crate::grid::{GridDims, ScalarField};
use crate::scalar::Real;

pub const FFVX_MAGIC: [u8; 4] = *b"FFVX";
pub const FFVX_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;
const DTYPE_U8: u8 = 0;
const DTYPE_F32: u8 = 1;

/// Contents of an FFVX file.
#[derive(Clone, Debug, PartialEq)]
pub enum VoxelData {
    Phases(PhaseMap),
    Scalars(ScalarField<f32>),
}

impl VoxelData {
    pub fn dims(&self) -> GridDims {
        match self {
            VoxelData::Phases(m) => m.dims(),
            VoxelData::Scalars(f) => f.dims(),
        }
    }

    pub fn dtype_name(&self) -> &'static str {
        match self {
            VoxelData::Phases(_) => "u8",
            VoxelData::Scalars(_) => "f32",
        }
    }

    pub fn into_phase_map(self) -> Result<PhaseMap> {
        match self {
            VoxelData::Phases(m) => Ok(m),
            other => Err(FormatError::DtypeMismatch {
                expected: "u8",
                found: other.dtype_name(),
            }
            .into()),
        }
    }

    /// The stored scalars widened (or kept) in `T`.
    pub fn into_scalar_field<T: Real>(self) -> Result<ScalarField<T>> {
        match self {
            VoxelData::Scalars(f) => Ok(f.cast()),
            other => Err(FormatError::DtypeMismatch {
                expected: "f32",
                found: other.dtype_name(),
            }
            .into()),
        }
    }
}

fn header(dims: GridDims, dtype: u8) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(&FFVX_MAGIC);
    h[4..8].copy_from_slice(&FFVX_VERSION.to_le_bytes());
    for (a, n) in dims.shape().into_iter().enumerate() {
        let n = u32::try_from(n).expect("grid extent exceeds u32");
        h[8 + 4 * a..12 + 4 * a].copy_from_slice(&n.to_le_bytes());
    }
    h[20] = dtype;
    h
}

pub fn write_phase_map<W: Write>(mut w: W, map: &PhaseMap) -> Result<()> {
    let io = |e| FormatError::Io(e);
    w.write_all(&header(map.dims(), DTYPE_U8)).map_err(io)?;
    w.write_all(map.ids()).map_err(io)?;
    w.flush().map_err(io)?;
    Ok(())
}

/// Stores the field as f32.
pub fn write_scalar_field<W: Write, T: Real>(mut w: W, field: &ScalarField<T>) -> Result<()> {
    let io = |e| FormatError::Io(e);
    w.write_all(&header(field.dims(), DTYPE_F32)).map_err(io)?;
    let mut payload = Vec::with_capacity(4 * field.voxels());
    for &x in field.as_slice() {
        payload.extend_from_slice(&(x.to_f64_lossy() as f32).to_le_bytes());
    }
    w.write_all(&payload).map_err(io)?;
    w.flush().map_err(io)?;
    Ok(())
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

pub fn read_voxel<R: Read>(mut r: R) -> Result<VoxelData> {
    let mut h = [0u8; HEADER_LEN];
    let got = read_full(&mut r, &mut h).map_err(FormatError::Io)?;
    if got < HEADER_LEN {
        return Err(FormatError::TruncatedHeader(got).into());
    }
    let magic: [u8; 4] = h[..4].try_into().unwrap();
    if magic != FFVX_MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let u32_at = |o: usize| u32::from_le_bytes(h[o..o + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != FFVX_VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let dims = GridDims::new(u32_at(8) as usize, u32_at(12) as usize, u32_at(16) as usize)
        .map_err(|e| FormatError::BadDims(e.to_string()))?;
    let width = match h[20] {
        DTYPE_U8 => 1,
        DTYPE_F32 => 4,
        t => return Err(FormatError::UnknownDtype(t).into()),
    };
    let expected = dims.len() * width;
    let mut payload = vec![0u8; expected];
    let got = read_full(&mut r, &mut payload).map_err(FormatError::Io)?;
    if got < expected {
        return Err(FormatError::Truncated {
            expected,
            found: got,
        }
        .into());
    }
    if width == 1 {
        return Ok(VoxelData::Phases(PhaseMap::from_vec(dims, payload)?));
    }
    let values = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok(VoxelData::Scalars(ScalarField::from_vec(dims, values)?))
}

pub fn save_phase_map(path: impl AsRef<Path>, map: &PhaseMap) -> Result<()> {
    let f = File::create(path).map_err(FormatError::Io)?;
    write_phase_map(BufWriter::new(f), map)
}

pub fn save_scalar_field<T: Real>(path: impl AsRef<Path>, field: &ScalarField<T>) -> Result<()> {
    let f = File::create(path).map_err(FormatError::Io)?;
    write_scalar_field(BufWriter::new(f), field)
}

pub fn load_voxel(path: impl AsRef<Path>) -> Result<VoxelData> {
    let f = File::open(path).map_err(FormatError::Io)?;
    read_voxel(BufReader::new(f))
}
