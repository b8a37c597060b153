//! Collision kernel tabulation and the spectral transforms used by the
//! coefficient convolutions.
//!
//! The three kernel families are
//! `(I − ŵ⊗ŵ)|w|^{γ+2}` (matrix), `|w|^γ w` (vector), and `|w|^γ` (scalar).
//! They are tabulated on the zero-padded lattice of extent `[−2L, 2L]^d`
//! (2N points per axis): samples within two cells of w = 0 carry exact cell
//! averages, everything else is midpoint-sampled. Padding plus compact
//! support of f in `[−L, L]^d` makes the cyclic convolution equal the linear
//! one on the original window, with no wrap-around.

use crate::error::{Error, Result};
use crate::fftnd::NdFft;
use crate::geom::{sym_len, Vec3};
use crate::grid::VelocityGrid;
use crate::quadrature::cell_average;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

/// Interaction exponent γ and the three kernel constants.
///
/// The defaults tie the constants together so that the divergence identities
/// `b̄_i = −∂_j ā_{ij}` and `∇·b̄ = c̄` hold, which is what makes the
/// divergence and non-divergence forms of the equation agree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub gamma: f64,
    pub a_const: f64,
    pub b_const: f64,
    pub c_const: f64,
}

impl PotentialParams {
    /// Default constants: a = 1, b = d−1, c = (d−1)(d+γ), from
    /// ∂_j[|w|^{γ+2}(δ_ij − ŵ_iŵ_j)] = −(d−1)|w|^γ w_i and
    /// ∂_i[(d−1)|w|^γ w_i] = (d−1)(d+γ)|w|^γ.
    pub fn default_for(dim: usize, gamma: f64) -> Result<Self> {
        validate_gamma(gamma)?;
        let d = dim as f64;
        Ok(Self {
            gamma,
            a_const: 1.0,
            b_const: d - 1.0,
            c_const: (d - 1.0) * (d + gamma),
        })
    }
}

pub fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma > -2.0 && gamma <= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "gamma must lie in (-2, 0], got {gamma}"
        )))
    }
}

/// Identifies one scalar component of the three kernel families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelComponent {
    /// Entry (i, j), i ≤ j, of the matrix kernel (without a_const).
    A(usize, usize),
    /// Entry i of the vector kernel (without b_const).
    B(usize),
    /// The scalar kernel (without c_const).
    C,
}

pub fn component_count(dim: usize) -> usize {
    sym_len(dim) + dim + 1
}

pub fn component(dim: usize, index: usize) -> KernelComponent {
    let na = sym_len(dim);
    if index < na {
        let mut k = index;
        for i in 0..dim {
            let row = dim - i;
            if k < row {
                return KernelComponent::A(i, i + k);
            }
            k -= row;
        }
        unreachable!()
    } else if index < na + dim {
        KernelComponent::B(index - na)
    } else {
        KernelComponent::C
    }
}

/// Pointwise kernel value; returns 0 at w = 0 (a measure-zero point, never
/// sampled by the midpoint rule and harmless under quadrature).
pub fn kernel_value(gamma: f64, comp: KernelComponent, w: &Vec3) -> f64 {
    let r2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    if r2 == 0.0 {
        return 0.0;
    }
    let rg = r2.powf(gamma / 2.0);
    match comp {
        KernelComponent::A(i, j) => {
            let delta = if i == j { r2 } else { 0.0 };
            rg * (delta - w[i] * w[j])
        }
        KernelComponent::B(i) => rg * w[i],
        KernelComponent::C => rg,
    }
}

/// Spectral transforms plus real-space tables of all kernel components on
/// the padded lattice. Immutable after construction and shareable.
pub struct KernelPack {
    grid: VelocityGrid,
    params: PotentialParams,
    padded: usize,
    fft: NdFft,
    spectra: Vec<Vec<Complex<f64>>>,
    tables: Vec<Vec<f64>>,
}

/// Number of cells around the origin (in the max norm) whose kernel samples
/// are replaced by exact cell averages.
pub const AVERAGED_ZONE: isize = 2;

/// Tabulate and transform the kernel families for a grid.
pub fn precompute_kernels(grid: &VelocityGrid, params: &PotentialParams) -> Result<KernelPack> {
    validate_gamma(params.gamma)?;
    let dim = grid.dim();
    let n = grid.points_per_axis();
    let m = 2 * n;
    let h = grid.spacing();
    let fft = NdFft::new(dim, m);
    let total = fft.total_len();
    let ncomp = component_count(dim);

    let tables: Vec<Vec<f64>> = (0..ncomp)
        .into_par_iter()
        .map(|ci| {
            let comp = component(dim, ci);
            let mut table = vec![0.0f64; total];
            for (flat, entry) in table.iter_mut().enumerate() {
                let mut rem = flat;
                let mut offset = [0isize; 3];
                for a in (0..dim).rev() {
                    let j = (rem % m) as isize;
                    rem /= m;
                    offset[a] = if j >= m as isize / 2 { j - m as isize } else { j };
                }
                let w = [
                    offset[0] as f64 * h,
                    offset[1] as f64 * h,
                    offset[2] as f64 * h,
                ];
                let near = (0..dim).all(|a| offset[a].abs() <= AVERAGED_ZONE);
                *entry = if near {
                    cell_average(|p| kernel_value(params.gamma, comp, p), dim, &w, h)
                } else {
                    kernel_value(params.gamma, comp, &w)
                };
            }
            table
        })
        .collect();

    let spectra: Vec<Vec<Complex<f64>>> = tables
        .par_iter()
        .map(|table| {
            let mut buf: Vec<Complex<f64>> =
                table.iter().map(|&x| Complex::new(x, 0.0)).collect();
            fft.forward(&mut buf);
            buf
        })
        .collect();

    Ok(KernelPack { grid: *grid, params: *params, padded: m, fft, spectra, tables })
}

impl KernelPack {
    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn params(&self) -> &PotentialParams {
        &self.params
    }

    pub fn padded_len(&self) -> usize {
        self.padded
    }

    pub fn fft(&self) -> &NdFft {
        &self.fft
    }

    pub fn spectrum(&self, index: usize) -> &[Complex<f64>] {
        &self.spectra[index]
    }

    /// Real-space table value for an integer offset (components of `offset`
    /// must lie in `[-N, N-1]`).
    pub fn table_value(&self, index: usize, offset: &[isize; 3]) -> f64 {
        let m = self.padded as isize;
        let dim = self.grid.dim();
        let mut flat = 0usize;
        for a in 0..dim {
            debug_assert!(offset[a] >= -(m / 2) && offset[a] < m / 2);
            flat = flat * self.padded + offset[a].rem_euclid(m) as usize;
        }
        self.tables[index][flat]
    }

    /// Constant multiplying a given component at assembly time.
    pub fn component_scale(&self, index: usize) -> f64 {
        match component(self.grid.dim(), index) {
            KernelComponent::A(..) => self.params.a_const,
            KernelComponent::B(_) => self.params.b_const,
            KernelComponent::C => self.params.c_const,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn component_order_roundtrip() {
        let comps: Vec<KernelComponent> = (0..component_count(2)).map(|i| component(2, i)).collect();
        assert_eq!(
            comps,
            vec![
                KernelComponent::A(0, 0),
                KernelComponent::A(0, 1),
                KernelComponent::A(1, 1),
                KernelComponent::B(0),
                KernelComponent::B(1),
                KernelComponent::C,
            ]
        );
        assert_eq!(component_count(3), 10);
    }

    #[test]
    fn matrix_kernel_at_unit_vector() {
        // at w = e1 the matrix is diag(0, 1, ..., 1) for any gamma
        for gamma in [-0.5, -1.0, -1.9] {
            let w = [1.0, 0.0, 0.0];
            assert_eq!(kernel_value(gamma, KernelComponent::A(0, 0), &w), 0.0);
            assert_relative_eq!(kernel_value(gamma, KernelComponent::A(1, 1), &w), 1.0);
            assert_eq!(kernel_value(gamma, KernelComponent::A(0, 1), &w), 0.0);
        }
    }

    #[test]
    fn kernel_parity() {
        let w = [0.7, -0.3, 0.2];
        let mw = [-0.7, 0.3, -0.2];
        for ci in 0..component_count(3) {
            let comp = component(3, ci);
            let a = kernel_value(-1.2, comp, &w);
            let b = kernel_value(-1.2, comp, &mw);
            match comp {
                KernelComponent::B(_) => assert_eq!(a, -b),
                _ => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn origin_cell_average_matches_quadrature_oracle() {
        // d = 2, gamma = -1, h = 0.5: the averaged origin sample of the
        // scalar kernel equals (4/h) ln(1+sqrt 2), evaluated independently
        // in quadrature::tests; here we check the tabulated value directly.
        let grid = VelocityGrid::new(2, 2.0, 8).unwrap(); // h = 0.5
        let params = PotentialParams::default_for(2, -1.0).unwrap();
        let pack = precompute_kernels(&grid, &params).unwrap();
        let c_index = component_count(2) - 1;
        let got = pack.table_value(c_index, &[0, 0, 0]);
        let expect = (4.0 / 0.5) * (1.0 + 2.0f64.sqrt()).ln();
        assert!(got.is_finite() && got > 0.0);
        assert_relative_eq!(got, expect, max_relative = 1e-7);
    }

    #[test]
    fn far_samples_are_midpoint_values() {
        let grid = VelocityGrid::new(2, 2.0, 8).unwrap();
        let params = PotentialParams::default_for(2, -1.0).unwrap();
        let pack = precompute_kernels(&grid, &params).unwrap();
        let h = grid.spacing();
        let offset = [5isize, -3, 0];
        let w = [5.0 * h, -3.0 * h, 0.0];
        for ci in 0..component_count(2) {
            let comp = component(2, ci);
            assert_eq!(pack.table_value(ci, &offset), kernel_value(-1.0, comp, &w));
        }
    }

    #[test]
    fn tabulated_parity_including_averages() {
        let grid = VelocityGrid::new(2, 2.0, 8).unwrap();
        let params = PotentialParams::default_for(2, -0.7).unwrap();
        let pack = precompute_kernels(&grid, &params).unwrap();
        for ci in 0..component_count(2) {
            let comp = component(2, ci);
            for off in [[1isize, 2, 0], [2, 0, 0], [1, 1, 0], [4, 7, 0]] {
                let neg = [-off[0], -off[1], 0];
                let a = pack.table_value(ci, &off);
                let b = pack.table_value(ci, &neg);
                match comp {
                    KernelComponent::B(_) => assert_relative_eq!(a, -b, max_relative = 1e-9),
                    _ => assert_relative_eq!(a, b, max_relative = 1e-9),
                }
            }
        }
    }

    #[test]
    fn rejects_gamma_out_of_range() {
        assert!(PotentialParams::default_for(2, -2.0).is_err());
        assert!(PotentialParams::default_for(2, 0.5).is_err());
        let grid = VelocityGrid::new(2, 2.0, 8).unwrap();
        let bad = PotentialParams { gamma: -2.5, a_const: 1.0, b_const: 1.0, c_const: 1.0 };
        assert!(precompute_kernels(&grid, &bad).is_err());
    }
}
