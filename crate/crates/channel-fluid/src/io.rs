//! Field snapshots and diagnostic time series.
//!
//! A snapshot is one text header line
//! `GEOFLOW-FIELD v1 name=<id> Nx=<int> Ny=<int> X=<float> Y=<float> t=<float>`
//! followed by (Ny + 1)·Nx little-endian f64 values, row by row from y = 0.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::{ChannelGeometry, Diagnostics, FluidError};

pub const SNAPSHOT_TAG: &str = "GEOFLOW-FIELD v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub x_len: f64,
    pub y_len: f64,
    pub t: f64,
    pub data: Array2<f64>,
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), FluidError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file = path
        .file_name()
        .ok_or_else(|| FluidError::Format(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", file.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn encode_snapshot(name: &str, geom: &ChannelGeometry, t: f64, field: ArrayView2<f64>) -> Result<Vec<u8>, FluidError> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '=') {
        return Err(FluidError::Format(format!("invalid field name {name:?}")));
    }
    if field.dim() != (geom.ny + 1, geom.nx) {
        return Err(FluidError::Shape(format!(
            "snapshot needs {}×{}, got {:?}",
            geom.ny + 1,
            geom.nx,
            field.dim()
        )));
    }
    let mut out = format!(
        "{SNAPSHOT_TAG} name={name} Nx={} Ny={} X={} Y={} t={}\n",
        geom.nx, geom.ny, geom.x_len, geom.y_len, t
    )
    .into_bytes();
    out.reserve(field.len() * 8);
    for v in field.iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot, FluidError> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| FluidError::Format("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| FluidError::Format("header is not UTF-8".into()))?;
    let rest = header
        .strip_prefix(SNAPSHOT_TAG)
        .ok_or_else(|| FluidError::Format(format!("expected tag {SNAPSHOT_TAG:?}")))?;
    let get = |key: &str| -> Result<String, FluidError> {
        rest.split_whitespace()
            .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .map(str::to_string)
            .ok_or_else(|| FluidError::Format(format!("header lacks {key}")))
    };
    let num = |s: String, key: &str| -> Result<f64, FluidError> {
        s.parse().map_err(|_| FluidError::Format(format!("bad value for {key}: {s}")))
    };
    let int = |s: String, key: &str| -> Result<usize, FluidError> {
        s.parse().map_err(|_| FluidError::Format(format!("bad value for {key}: {s}")))
    };
    let name = get("name")?;
    let nx = int(get("Nx")?, "Nx")?;
    let ny = int(get("Ny")?, "Ny")?;
    let x_len = num(get("X")?, "X")?;
    let y_len = num(get("Y")?, "Y")?;
    let t = num(get("t")?, "t")?;
    let body = &bytes[nl + 1..];
    let count = (ny + 1) * nx;
    if body.len() != count * 8 {
        return Err(FluidError::Format(format!(
            "payload holds {} bytes, header implies {}",
            body.len(),
            count * 8
        )));
    }
    let vals: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight")))
        .collect();
    let data = Array2::from_shape_vec((ny + 1, nx), vals).map_err(|e| FluidError::Format(e.to_string()))?;
    Ok(Snapshot { name, nx, ny, x_len, y_len, t, data })
}

pub fn write_snapshot(path: &Path, name: &str, geom: &ChannelGeometry, t: f64, field: ArrayView2<f64>) -> Result<(), FluidError> {
    atomic_write(path, &encode_snapshot(name, geom, t, field)?)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, FluidError> {
    decode_snapshot(&fs::read(path)?)
}

pub fn encode_timeseries(rows: &[Diagnostics]) -> Result<Vec<u8>, FluidError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(Diagnostics::CSV_HEADER)?;
    for r in rows {
        w.write_record(r.values().iter().map(|v| format!("{v:.17e}")))?;
    }
    w.into_inner().map_err(|e| FluidError::Format(e.to_string()))
}

pub fn write_timeseries(path: &Path, rows: &[Diagnostics]) -> Result<(), FluidError> {
    atomic_write(path, &encode_timeseries(rows)?)
}

pub fn read_timeseries(path: &Path) -> Result<Vec<Diagnostics>, FluidError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != Diagnostics::CSV_HEADER {
        return Err(FluidError::Format(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.parse().map_err(|_| FluidError::Format(format!("bad number {s}"))))
            .collect::<Result<_, _>>()?;
        if v.len() != 7 {
            return Err(FluidError::Format(format!("expected 7 columns, got {}", v.len())));
        }
        out.push(Diagnostics {
            t: v[0],
            energy: v[1],
            enstrophy: v[2],
            pert_enstrophy: v[3],
            circulation: v[4],
            h2: v[5],
            p_norm: v[6],
        });
    }
    Ok(out)
}
