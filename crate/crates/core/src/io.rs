//! On-disk formats.
//!
//! Volumes are stored as a JSON header plus a little-endian `f64` payload,
//! either inline as base64 or in a sidecar `.bin` file next to the header.
//! The payload is voxel-major (x fastest) with `channels` values per voxel.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_core::spd::unique_len;
use crate::geodesic::{GeodesicTrack, Termination, TrackingParams};
use crate::tensor_core::{SpdTensor, Vec3};
use crate::tensor_field::{Grid, TensorField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    #[default]
    Base64,
    Sidecar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub dim: usize,
    /// Tensor order (2 or 4); absent for signal volumes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    /// Gradient count for signal volumes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_gradients: Option<usize>,
    pub encoding: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_file: Option<String>,
}

impl Envelope {
    pub fn grid(&self) -> Result<Grid> {
        if self.dims.len() != self.dim {
            return Err(Error::Format(format!("header dim {} but {} dims", self.dim, self.dims.len())));
        }
        Grid::new(&self.dims, &self.spacing, &self.origin)
    }

    fn blank(grid: &Grid, encoding: Encoding) -> Self {
        Self {
            dims: grid.dims.clone(),
            spacing: grid.spacing.clone(),
            origin: grid.origin.clone(),
            dim: grid.dim,
            order: None,
            n_gradients: None,
            encoding,
            data: None,
            data_file: None,
        }
    }
}

pub fn encode_f64(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode_f64(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!("payload of {} bytes is not a whole number of f64", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn sidecar_path(header: &Path) -> PathBuf {
    header.with_extension("bin")
}

/// Files produced for one volume, as (path, contents).
pub type FileSet = Vec<(PathBuf, Vec<u8>)>;

pub fn envelope_files(path: &Path, mut env: Envelope, values: &[f64]) -> Result<FileSet> {
    let payload = encode_f64(values);
    let mut files = Vec::new();
    match env.encoding {
        Encoding::Base64 => env.data = Some(B64.encode(&payload)),
        Encoding::Sidecar => {
            let side = sidecar_path(path);
            env.data_file = Some(side.file_name().unwrap().to_string_lossy().into_owned());
            files.push((side, payload));
        }
    }
    let mut header = serde_json::to_vec_pretty(&env)?;
    header.push(b'\n');
    files.insert(0, (path.to_path_buf(), header));
    Ok(files)
}

pub fn write_files(files: &FileSet) -> Result<()> {
    for (p, bytes) in files {
        write_atomic(p, bytes)?;
    }
    Ok(())
}

pub fn read_envelope(path: &Path) -> Result<(Envelope, Vec<f64>)> {
    let env: Envelope = serde_json::from_slice(&fs::read(path)?)?;
    let bytes = match (&env.data, &env.data_file) {
        (Some(d), None) => B64.decode(d).map_err(|e| Error::Format(format!("bad base64 payload: {e}")))?,
        (None, Some(f)) => {
            let side = path.parent().unwrap_or(Path::new(".")).join(f);
            fs::read(side)?
        }
        _ => return Err(Error::Format("header needs exactly one of `data` and `data_file`".into())),
    };
    let values = decode_f64(&bytes)?;
    Ok((env, values))
}

fn check_len(env: &Envelope, grid: &Grid, channels: usize, got: usize) -> Result<()> {
    let want = grid.n_voxels() * channels;
    if got != want {
        return Err(Error::Format(format!(
            "payload has {got} values, header {:?} needs {want}",
            env.dims
        )));
    }
    Ok(())
}

pub fn field_files(path: &Path, field: &TensorField, encoding: Encoding) -> Result<FileSet> {
    let mut env = Envelope::blank(field.grid(), encoding);
    env.order = Some(2);
    let values: Vec<f64> = field.data().iter().flat_map(|t| t.unique()).collect();
    envelope_files(path, env, &values)
}

pub fn write_field(path: &Path, field: &TensorField, encoding: Encoding) -> Result<()> {
    write_files(&field_files(path, field, encoding)?)
}

pub fn read_field(path: &Path) -> Result<TensorField> {
    let (env, values) = read_envelope(path)?;
    if env.order != Some(2) {
        return Err(Error::Format(format!("expected an order-2 field, header says {:?}", env.order)));
    }
    let grid = env.grid()?;
    let k = unique_len(grid.dim);
    check_len(&env, &grid, k, values.len())?;
    let data = values
        .chunks_exact(k)
        .map(|c| SpdTensor::from_unique(grid.dim, c))
        .collect::<Result<Vec<_>>>()?;
    TensorField::new(grid, data)
}

/// Per-voxel measurement volume, `n_gradients` values per voxel.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalVolume {
    pub grid: Grid,
    pub n_gradients: usize,
    pub values: Vec<f64>,
}

impl SignalVolume {
    pub fn voxel(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_gradients..(i + 1) * self.n_gradients]
    }
}

pub fn signal_files(path: &Path, s: &SignalVolume, encoding: Encoding) -> Result<FileSet> {
    let mut env = Envelope::blank(&s.grid, encoding);
    env.n_gradients = Some(s.n_gradients);
    envelope_files(path, env, &s.values)
}

pub fn read_signals(path: &Path) -> Result<SignalVolume> {
    let (env, values) = read_envelope(path)?;
    let n = env
        .n_gradients
        .ok_or_else(|| Error::Format("signal header lacks n_gradients".into()))?;
    let grid = env.grid()?;
    check_len(&env, &grid, n, values.len())?;
    Ok(SignalVolume { grid, n_gradients: n, values })
}

/// One traced path as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    pub termination: Termination,
    #[serde(default)]
    pub hit: bool,
    pub vertices: Vec<[f64; 3]>,
    pub directions: Vec<[f64; 3]>,
}

impl TrackRecord {
    pub fn new(t: &GeodesicTrack, hit: bool) -> Self {
        let arr = |v: &[Vec3]| v.iter().map(|p| [p.x, p.y, p.z]).collect();
        Self { termination: t.termination, hit, vertices: arr(&t.vertices), directions: arr(&t.directions) }
    }

    pub fn to_track(&self) -> GeodesicTrack {
        let vecs = |v: &[[f64; 3]]| v.iter().map(|p| Vec3::from(*p)).collect();
        GeodesicTrack { vertices: vecs(&self.vertices), directions: vecs(&self.directions), termination: self.termination }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackFile {
    pub params: TrackingParams,
    pub grid: Grid,
    pub tracks: Vec<TrackRecord>,
}

/// `path` as JSON plus a CSV next to it with one row per vertex:
/// `track_id,vertex_id,x,y,z`.
pub fn track_files(path: &Path, file: &TrackFile) -> Result<FileSet> {
    let mut json = serde_json::to_vec(file)?;
    json.push(b'\n');
    let mut csv = String::from("track_id,vertex_id,x,y,z\n");
    for (i, t) in file.tracks.iter().enumerate() {
        for (j, v) in t.vertices.iter().enumerate() {
            csv.push_str(&format!("{i},{j},{},{},{}\n", v[0], v[1], v[2]));
        }
    }
    Ok(vec![(path.to_path_buf(), json), (path.with_extension("csv"), csv.into_bytes())])
}

pub fn read_tracks(path: &Path) -> Result<TrackFile> {
    let file: TrackFile = serde_json::from_slice(&fs::read(path)?)?;
    file.grid.validate()?;
    Ok(file)
}
