//! Field snapshot format ".lfs".
//!
//! Line 1 is a JSON header
//! `{"dim":d,"L":…,"N":…,"Nx":…,"X":…,"gamma":…,"t":…,"layout":"row-major-x-then-v"}`
//! followed by a newline and raw little-endian 64-bit floats, x-major then v
//! lexicographic. Round trips are bit-exact. `Nx`/`X` are present only for
//! inhomogeneous fields. The same container stores coefficient planes, with
//! the extra header key `planes`.

use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::{PhaseGrid, VelocityGrid};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

pub const LAYOUT: &str = "row-major-x-then-v";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Header {
    pub dim: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    #[serde(rename = "N")]
    pub points_per_axis: usize,
    #[serde(rename = "Nx", skip_serializing_if = "Option::is_none", default)]
    pub x_points: Option<usize>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none", default)]
    pub x_period: Option<f64>,
    pub gamma: f64,
    pub t: f64,
    pub layout: String,
    /// Number of stacked planes; absent means 1 (a plain density field).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planes: Option<usize>,
}

impl Header {
    pub fn for_field(field: &DistributionField, gamma: f64) -> Self {
        let g = field.grid();
        Self {
            dim: g.vgrid.dim(),
            half_width: g.vgrid.half_width(),
            points_per_axis: g.vgrid.points_per_axis(),
            x_points: g.is_inhomogeneous().then(|| g.x_points()),
            x_period: g.x_period(),
            gamma,
            t: field.time(),
            layout: LAYOUT.to_string(),
            planes: None,
        }
    }

    pub fn phase_grid(&self) -> Result<PhaseGrid> {
        let vg = VelocityGrid::new(self.dim, self.half_width, self.points_per_axis)?;
        match (self.x_period, self.x_points) {
            (Some(x), Some(nx)) => PhaseGrid::inhomogeneous(vg, x, nx),
            (None, None) => Ok(PhaseGrid::homogeneous(vg)),
            _ => Err(Error::Format("header must carry both Nx and X or neither".into())),
        }
    }

    pub fn value_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
            * self.x_points.unwrap_or(1)
            * self.planes.unwrap_or(1)
    }
}

/// Serialize a header plus raw plane data.
pub fn write_planes(path: &Path, header: &Header, values: &[f64]) -> Result<()> {
    if values.len() != header.value_count() {
        return Err(Error::Format(format!(
            "value count {} does not match header ({} expected)",
            values.len(),
            header.value_count()
        )));
    }
    let mut out = Vec::with_capacity(values.len() * 8 + 256);
    serde_json::to_writer(&mut out, header).map_err(|e| Error::Format(e.to_string()))?;
    out.push(b'\n');
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

pub fn read_planes(path: &Path) -> Result<(Header, Vec<f64>)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("missing header line".into()))?;
    let header: Header =
        serde_json::from_slice(&bytes[..nl]).map_err(|e| Error::Format(e.to_string()))?;
    if header.layout != LAYOUT {
        return Err(Error::Format(format!("unsupported layout {:?}", header.layout)));
    }
    let body = &bytes[nl + 1..];
    let expected = header.value_count();
    if body.len() != expected * 8 {
        return Err(Error::Format(format!(
            "expected {} bytes of payload, got {}",
            expected * 8,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((header, values))
}

/// Write a distribution snapshot.
pub fn write_field(path: &Path, field: &DistributionField, gamma: f64) -> Result<()> {
    let header = Header::for_field(field, gamma);
    write_planes(path, &header, field.values())
}

/// Read a distribution snapshot, returning the field and its γ.
pub fn read_field(path: &Path) -> Result<(DistributionField, f64)> {
    let (header, values) = read_planes(path)?;
    if header.planes.unwrap_or(1) != 1 {
        return Err(Error::Format("snapshot has multiple planes; expected a density field".into()));
    }
    let grid = header.phase_grid()?;
    let field = DistributionField::from_raw(grid, header.t, values)?;
    Ok((field, header.gamma))
}
