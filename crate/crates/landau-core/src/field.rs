//! Nonnegative phase-space densities on a `PhaseGrid`, with the initial-data
//! presets used by the solver and the compact-support enforcement that the
//! padded convolutions rely on.

use crate::error::{Error, Result};
use crate::geom::{norm, sub, Vec3};
use crate::grid::{PhaseGrid, VelocityGrid};

/// Fraction of the half-width where the support cutoff reaches zero, and
/// where it is still identically one. Fixed physical radii keep initial data
/// independent of the resolution, so refinement pairs compare the same
/// function.
pub const CUTOFF_OUTER_FRACTION: f64 = 0.875;
pub const CUTOFF_INNER_FRACTION: f64 = 0.75;

/// Smooth radial cutoff: 1 for `r <= inner`, 0 for `r >= outer`, quintic
/// (C²) in between.
pub fn support_cutoff(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        let u = (r - inner) / (outer - inner);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// Scalar field `f(t, x, v) ≥ 0` over a phase grid.
///
/// Layout is x-major then v-lexicographic. Values vanish identically on the
/// outermost velocity cell layer; this is validated at every construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionField {
    grid: PhaseGrid,
    time: f64,
    values: Vec<f64>,
}

impl DistributionField {
    /// Wrap raw values, validating nonnegativity and compact support.
    pub fn from_raw(grid: PhaseGrid, time: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        let field = Self { grid, time, values };
        field.validate_support()?;
        if let Some((i, &v)) = field.values.iter().enumerate().find(|(_, &v)| v < 0.0) {
            return Err(Error::Domain(format!(
                "negative density {v:e} at flat index {i}"
            )));
        }
        Ok(field)
    }

    /// Sample `profile(x, v)`, multiply by the smooth support cutoff, and
    /// validate. The cutoff vanishes on the outer layers provided
    /// `h ≤ L/16` (N ≥ 32), which is checked here.
    pub fn from_profile(
        grid: PhaseGrid,
        time: f64,
        profile: impl Fn(f64, &Vec3) -> f64,
    ) -> Result<Self> {
        let vg = grid.vgrid;
        let l = vg.half_width();
        let outer = CUTOFF_OUTER_FRACTION * l;
        let inner = CUTOFF_INNER_FRACTION * l;
        if outer > l - 2.0 * vg.spacing() {
            return Err(Error::Domain(format!(
                "grid too coarse for the support cutoff: need h <= L/16, got h = {}",
                vg.spacing()
            )));
        }
        let nv = vg.node_count();
        let mut values = vec![0.0; grid.node_count()];
        for ix in 0..grid.x_points() {
            let x = grid.x_coord(ix);
            for lex in 0..nv {
                let v = vg.node(lex);
                let chi = support_cutoff(norm(&v), inner, outer);
                if chi > 0.0 {
                    values[ix * nv + lex] = profile(x, &v) * chi;
                }
            }
        }
        Self::from_raw(grid, time, values)
    }

    fn validate_support(&self) -> Result<()> {
        let vg = self.grid.vgrid;
        let n = vg.points_per_axis();
        let nv = vg.node_count();
        for ix in 0..self.grid.x_points() {
            for lex in 0..nv {
                let idx = vg.multi_index(lex);
                let on_outer = (0..vg.dim()).any(|a| idx[a] == 0 || idx[a] == n - 1);
                let v = self.values[ix * nv + lex];
                if on_outer && v != 0.0 {
                    return Err(Error::SupportViolation {
                        node: idx[..vg.dim()].to_vec(),
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    #[inline]
    pub fn vgrid(&self) -> &VelocityGrid {
        &self.grid.vgrid
    }

    #[inline]
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable access for the time steppers. Callers are responsible for
    /// keeping the outer layer at zero.
    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn x_slice(&self, ix: usize) -> &[f64] {
        let nv = self.grid.vgrid.node_count();
        &self.values[ix * nv..(ix + 1) * nv]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Max-norm distance to another field on the same grid.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Shift the velocity support by an integer number of cells per axis.
    /// Values pushed outside the lattice are dropped; the result is
    /// re-validated, so shifting real mass onto the boundary errors out.
    pub fn shift_v_cells(&self, cells: [isize; 3]) -> Result<Self> {
        let vg = self.grid.vgrid;
        let n = vg.points_per_axis() as isize;
        let nv = vg.node_count();
        let mut values = vec![0.0; self.values.len()];
        for ix in 0..self.grid.x_points() {
            for lex in 0..nv {
                let idx = vg.multi_index(lex);
                let mut src = [0usize; 3];
                let mut ok = true;
                for a in 0..vg.dim() {
                    let s = idx[a] as isize - cells[a];
                    if s < 0 || s >= n {
                        ok = false;
                        break;
                    }
                    src[a] = s as usize;
                }
                if ok {
                    values[ix * nv + lex] = self.values[ix * nv + vg.lex_index(&src)];
                }
            }
        }
        Self::from_raw(self.grid, self.time, values)
    }

    /// Periodic shift in x by a real displacement, with linear interpolation.
    pub fn shift_x_periodic(&self, displacement: f64) -> Result<Self> {
        let (period, nx) = match (self.grid.x_period(), self.grid.x_points()) {
            (Some(p), n) => (p, n),
            _ => return Err(Error::Precondition("x shift needs an inhomogeneous grid".into())),
        };
        let dx = period / nx as f64;
        let nv = self.grid.vgrid.node_count();
        let mut values = vec![0.0; self.values.len()];
        let t = displacement / dx;
        let k0 = t.floor();
        let frac = t - k0;
        let k0 = k0 as isize;
        for ix in 0..nx {
            let src_a = (ix as isize - k0).rem_euclid(nx as isize) as usize;
            let src_b = (ix as isize - k0 - 1).rem_euclid(nx as isize) as usize;
            for lex in 0..nv {
                values[ix * nv + lex] = (1.0 - frac) * self.values[src_a * nv + lex]
                    + frac * self.values[src_b * nv + lex];
            }
        }
        Self::from_raw(self.grid, self.time, values)
    }
}

/// Maxwellian with prescribed mass, temperature, and drift center.
pub fn maxwellian(grid: PhaseGrid, mass: f64, temperature: f64, center: Vec3) -> Result<DistributionField> {
    let d = grid.vgrid.dim() as f64;
    let amp = mass / (2.0 * std::f64::consts::PI * temperature).powf(d / 2.0);
    DistributionField::from_profile(grid, 0.0, move |_, v| {
        let dv = sub(v, &center);
        amp * (-crate::geom::dot(&dv, &dv) / (2.0 * temperature)).exp()
    })
}

/// Two equal Maxwellian bumps at `±offset`, total mass `mass`.
pub fn bimodal(grid: PhaseGrid, mass: f64, temperature: f64, offset: Vec3) -> Result<DistributionField> {
    let d = grid.vgrid.dim() as f64;
    let amp = 0.5 * mass / (2.0 * std::f64::consts::PI * temperature).powf(d / 2.0);
    DistributionField::from_profile(grid, 0.0, move |_, v| {
        let a = sub(v, &offset);
        let b = crate::geom::add(v, &offset);
        amp * ((-crate::geom::dot(&a, &a) / (2.0 * temperature)).exp()
            + (-crate::geom::dot(&b, &b) / (2.0 * temperature)).exp())
    })
}

/// All of `mass` in the single cell nearest to `center`.
pub fn spike(grid: PhaseGrid, mass: f64, center: Vec3) -> Result<DistributionField> {
    let vg = grid.vgrid;
    let idx = vg.nearest_node(&center);
    let lex = vg.lex_index(&idx);
    let nv = vg.node_count();
    let mut values = vec![0.0; grid.node_count()];
    for ix in 0..grid.x_points() {
        values[ix * nv + lex] = mass / vg.cell_volume();
    }
    DistributionField::from_raw(grid, 0.0, values)
}

/// Polynomial tail `c0 (1 + |v|)^{-p}`.
pub fn polynomial_tail(grid: PhaseGrid, c0: f64, p: f64) -> Result<DistributionField> {
    DistributionField::from_profile(grid, 0.0, move |_, v| c0 * (1.0 + norm(v)).powf(-p))
}

/// Gaussian envelope `c0 e^{-alpha |v|^2}`.
pub fn gaussian_envelope(grid: PhaseGrid, c0: f64, alpha: f64) -> Result<DistributionField> {
    DistributionField::from_profile(grid, 0.0, move |_, v| {
        c0 * (-alpha * crate::geom::dot(v, v)).exp()
    })
}

/// Multiply an x-independent profile by `1 + eps sin(2π x / X)`.
pub fn density_modulated(
    grid: PhaseGrid,
    eps: f64,
    profile: impl Fn(&Vec3) -> f64,
) -> Result<DistributionField> {
    let period = grid
        .x_period()
        .ok_or_else(|| Error::Precondition("density modulation needs an inhomogeneous grid".into()))?;
    DistributionField::from_profile(grid, 0.0, move |x, v| {
        (1.0 + eps * (2.0 * std::f64::consts::PI * x / period).sin()) * profile(v)
    })
}
