//! Binary field snapshots.
//!
//! Layout (all little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `SDNS` |
//! | 4     | format version, `u32` |
//! | 1     | kind: 0 vector3d, 1 scalar3d, 2 axisym |
//! | 24    | grid dims, `3 × u64` |
//! | 24    | box sizes, `3 × f64` |
//! | 8     | time, `f64` |
//! | 8     | viscosity, `f64` |
//! | 1     | scheme id |
//! | rest  | physical values, `f64`, component-major, x fastest |
//!
//! Axisymmetric snapshots store dims `[Nr, 1, Nz]` and box `[R, 0, Lz]`,
//! with values on the radial quadrature nodes.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::axisym::{make_axisym_grid, AxisymScalar};
use crate::integrate::Scheme;
use crate::spectral::{make_grid, Grid, SpectralScalar, SpectralVector};

pub const MAGIC: &[u8; 4] = b"SDNS";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 1 + 24 + 24 + 8 + 8 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotKind {
    Vector3d,
    Scalar3d,
    Axisym,
}

impl SnapshotKind {
    fn id(self) -> u8 {
        match self {
            Self::Vector3d => 0,
            Self::Scalar3d => 1,
            Self::Axisym => 2,
        }
    }

    fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::Vector3d),
            1 => Some(Self::Scalar3d),
            2 => Some(Self::Axisym),
            _ => None,
        }
    }

    pub fn components(self) -> usize {
        match self {
            Self::Vector3d => 3,
            Self::Scalar3d | Self::Axisym => 1,
        }
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot I/O: {0}")]
    Io(#[from] io::Error),
    #[error("not a snapshot: magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("truncated snapshot: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown snapshot kind tag {0}")]
    UnknownKind(u8),
    #[error("snapshot holds a {found:?} field, expected {expected:?}")]
    KindMismatch { expected: SnapshotKind, found: SnapshotKind },
    #[error("snapshot header is inconsistent: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub version: u32,
    pub kind: SnapshotKind,
    pub dims: [u64; 3],
    pub box_size: [f64; 3],
    pub time: f64,
    pub nu: f64,
    pub scheme: u8,
    pub data: Vec<f64>,
}

impl Snapshot {
    fn for_grid(kind: SnapshotKind, grid: &Grid, time: f64, nu: f64, scheme: Scheme, data: Vec<f64>) -> Self {
        let l = grid.length();
        Self {
            version: VERSION,
            kind,
            dims: grid.n().map(|n| n as u64),
            box_size: [l; 3],
            time,
            nu,
            scheme: scheme.id(),
            data,
        }
    }

    pub fn from_vector(u: &SpectralVector, time: f64, nu: f64, scheme: Scheme) -> Self {
        Self::for_grid(SnapshotKind::Vector3d, u.grid(), time, nu, scheme, u.to_physical())
    }

    pub fn from_scalar(v: &SpectralScalar, time: f64, nu: f64, scheme: Scheme) -> Self {
        Self::for_grid(SnapshotKind::Scalar3d, v.grid(), time, nu, scheme, v.to_physical())
    }

    pub fn from_axisym(v: &AxisymScalar, time: f64, nu: f64, scheme: Scheme) -> Self {
        let g = v.grid();
        Self {
            version: VERSION,
            kind: SnapshotKind::Axisym,
            dims: [g.nr() as u64, 1, g.nz() as u64],
            box_size: [g.radius(), 0.0, g.lz()],
            time,
            nu,
            scheme: scheme.id(),
            data: v.values().to_vec(),
        }
    }

    pub fn expect_kind(&self, expected: SnapshotKind) -> Result<(), SnapshotError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(SnapshotError::KindMismatch { expected, found: self.kind })
        }
    }

    pub fn scheme(&self) -> Option<Scheme> {
        Scheme::from_id(self.scheme)
    }

    /// The periodic grid described by a 3D snapshot.
    pub fn grid(&self) -> crate::Result<Arc<Grid>> {
        if self.kind == SnapshotKind::Axisym {
            return Err(SnapshotError::Layout("axisymmetric snapshots carry no periodic grid".into()).into());
        }
        let [a, b, c] = self.box_size;
        if a != b || b != c {
            return Err(SnapshotError::Layout(format!("non-cubic box {:?}", self.box_size)).into());
        }
        make_grid(self.dims.map(|n| n as usize), a)
    }

    pub fn to_vector(&self) -> crate::Result<SpectralVector> {
        self.expect_kind(SnapshotKind::Vector3d)?;
        let g = self.grid()?;
        Ok(SpectralVector::from_physical(&g, &self.data))
    }

    pub fn to_scalar(&self) -> crate::Result<SpectralScalar> {
        self.expect_kind(SnapshotKind::Scalar3d)?;
        let g = self.grid()?;
        Ok(SpectralScalar::from_physical(&g, &self.data))
    }

    pub fn to_axisym(&self) -> crate::Result<AxisymScalar> {
        self.expect_kind(SnapshotKind::Axisym)?;
        let [nr, one, nz] = self.dims.map(|n| n as usize);
        if one != 1 {
            return Err(SnapshotError::Layout(format!("axisymmetric dims {:?} must have 1 in the middle", self.dims)).into());
        }
        let g = make_axisym_grid(nr, nz, self.box_size[0], self.box_size[2])?;
        AxisymScalar::from_values(&g, self.data.clone())
    }

    fn expected_values(&self) -> usize {
        self.dims.iter().product::<u64>() as usize * self.kind.components()
    }
}

pub fn write_snapshot_to<W: Write>(mut w: W, s: &Snapshot) -> Result<(), SnapshotError> {
    if s.data.len() != s.expected_values() {
        return Err(SnapshotError::Layout(format!(
            "{} values for dims {:?} and {} component(s)",
            s.data.len(),
            s.dims,
            s.kind.components()
        )));
    }
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * s.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&s.version.to_le_bytes());
    buf.push(s.kind.id());
    s.dims.iter().for_each(|d| buf.extend_from_slice(&d.to_le_bytes()));
    s.box_size.iter().for_each(|d| buf.extend_from_slice(&d.to_le_bytes()));
    buf.extend_from_slice(&s.time.to_le_bytes());
    buf.extend_from_slice(&s.nu.to_le_bytes());
    buf.push(s.scheme);
    s.data.iter().for_each(|x| buf.extend_from_slice(&x.to_le_bytes()));
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_snapshot_from<R: Read>(mut r: R) -> Result<Snapshot, SnapshotError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Truncated { expected: HEADER_LEN, actual: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(SnapshotError::BadMagic(magic));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());

    let version = u32_at(4);
    if version == 0 {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    if version != VERSION {
        log::warn!("snapshot version {version} differs from {VERSION}; reading with the current layout");
    }
    let kind = SnapshotKind::from_id(bytes[8]).ok_or(SnapshotError::UnknownKind(bytes[8]))?;
    let dims = [0, 1, 2].map(|i| u64_at(9 + 8 * i));
    let box_size = [0, 1, 2].map(|i| f64_at(33 + 8 * i));
    let time = f64_at(57);
    let nu = f64_at(65);
    let scheme = bytes[73];

    let values = dims
        .iter()
        .try_fold(kind.components() as u64, |acc, &d| acc.checked_mul(d))
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| SnapshotError::Layout(format!("dims {dims:?} overflow")))?;
    let expected = HEADER_LEN + 8 * values;
    if bytes.len() < expected {
        return Err(SnapshotError::Truncated { expected, actual: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(SnapshotError::Layout(format!("{} trailing bytes", bytes.len() - expected)));
    }
    let data = bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(Snapshot { version, kind, dims, box_size, time, nu, scheme, data })
}

pub fn write_snapshot(path: impl AsRef<Path>, s: &Snapshot) -> Result<(), SnapshotError> {
    write_snapshot_to(BufWriter::new(File::create(path)?), s)
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, SnapshotError> {
    read_snapshot_from(BufReader::new(File::open(path)?))
}
