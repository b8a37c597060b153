//! Truncated uniform velocity lattice and the optional periodic spatial axis.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use serde::{Deserialize, Serialize};

/// Cell-centered velocity lattice on `[-L, L]^d`.
///
/// Nodes sit at `v_k = -L + (k + 1/2) h` per axis, `k = 0..N-1`, so no node
/// falls on `v = 0` where the collision kernels are singular. The stored
/// half-width is snapped to `N*h/2`, which makes `N·h = 2L` hold exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
    spacing: f64,
}

impl VelocityGrid {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim < 2 || dim > 3 {
            return Err(Error::Domain(format!("dim must be 2 or 3, got {dim}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Domain(format!("half width must be positive, got {half_width}")));
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return Err(Error::Domain(format!(
                "points per axis must be even and at least 4, got {points_per_axis}"
            )));
        }
        let spacing = 2.0 * half_width / points_per_axis as f64;
        // snap so that N*h = 2L exactly in the stored representation
        let half_width = points_per_axis as f64 * spacing / 2.0;
        Ok(Self { dim, half_width, points_per_axis, spacing })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of velocity nodes, `N^d`.
    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Quadrature weight of one cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Coordinate of node index `k` along one axis.
    #[inline]
    pub fn axis_coord(&self, k: usize) -> f64 {
        -self.half_width + (k as f64 + 0.5) * self.spacing
    }

    /// Velocity of the node with lexicographic index `lex`.
    pub fn node(&self, lex: usize) -> Vec3 {
        let mut v = [0.0; 3];
        let mut rem = lex;
        for a in (0..self.dim).rev() {
            v[a] = self.axis_coord(rem % self.points_per_axis);
            rem /= self.points_per_axis;
        }
        v
    }

    /// Multi-index of a lexicographic node index (row-major, axis 0 slowest).
    pub fn multi_index(&self, lex: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = lex;
        for a in (0..self.dim).rev() {
            idx[a] = rem % self.points_per_axis;
            rem /= self.points_per_axis;
        }
        idx
    }

    pub fn lex_index(&self, idx: &[usize; 3]) -> usize {
        let mut lex = 0;
        for a in 0..self.dim {
            lex = lex * self.points_per_axis + idx[a];
        }
        lex
    }

    /// Node nearest to an arbitrary velocity, clamped to the lattice.
    pub fn nearest_node(&self, v: &Vec3) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in 0..self.dim {
            let t = (v[a] + self.half_width) / self.spacing - 0.5;
            let k = t.round().max(0.0) as usize;
            idx[a] = k.min(self.points_per_axis - 1);
        }
        idx
    }

    /// Multilinear interpolation weights and corner indices for a point.
    /// Returns `None` when the point leaves the lattice hull.
    pub fn interp_stencil(&self, v: &Vec3) -> Option<Vec<(usize, f64)>> {
        let n = self.points_per_axis;
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..self.dim {
            let t = (v[a] + self.half_width) / self.spacing - 0.5;
            if t < 0.0 || t > (n - 1) as f64 {
                return None;
            }
            let k = (t.floor() as usize).min(n - 2);
            base[a] = k;
            frac[a] = t - k as f64;
        }
        let corners = 1usize << self.dim;
        let mut out = Vec::with_capacity(corners);
        for c in 0..corners {
            let mut idx = base;
            let mut w = 1.0;
            for a in 0..self.dim {
                if c >> a & 1 == 1 {
                    idx[a] += 1;
                    w *= frac[a];
                } else {
                    w *= 1.0 - frac[a];
                }
            }
            out.push((self.lex_index(&idx), w));
        }
        Some(out)
    }
}

/// Velocity lattice plus an optional periodic spatial axis.
///
/// The spatial domain, when present, is one periodic dimension `x ∈ [0, X)`
/// sampled at `N_x` cell-centered points; the velocity stays d-dimensional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub vgrid: VelocityGrid,
    space: Option<(f64, usize)>,
}

impl PhaseGrid {
    pub fn homogeneous(vgrid: VelocityGrid) -> Self {
        Self { vgrid, space: None }
    }

    pub fn inhomogeneous(vgrid: VelocityGrid, x_period: f64, x_points: usize) -> Result<Self> {
        if !(x_period > 0.0) {
            return Err(Error::Domain(format!("x period must be positive, got {x_period}")));
        }
        if x_points < 2 {
            return Err(Error::Domain(format!("need at least 2 spatial points, got {x_points}")));
        }
        Ok(Self { vgrid, space: Some((x_period, x_points)) })
    }

    pub fn is_inhomogeneous(&self) -> bool {
        self.space.is_some()
    }

    pub fn x_period(&self) -> Option<f64> {
        self.space.map(|(x, _)| x)
    }

    pub fn x_points(&self) -> usize {
        self.space.map(|(_, n)| n).unwrap_or(1)
    }

    pub fn x_spacing(&self) -> Option<f64> {
        self.space.map(|(x, n)| x / n as f64)
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        match self.space {
            Some((x, n)) => (i as f64 + 0.5) * x / n as f64,
            None => 0.0,
        }
    }

    /// Total number of phase-space nodes.
    pub fn node_count(&self) -> usize {
        self.x_points() * self.vgrid.node_count()
    }
}
