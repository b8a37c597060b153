//! Minimal d-dimensional complex FFT over flat row-major arrays, built on
//! 1-D transforms applied axis by axis.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Clone)]
pub struct NdFft {
    dim: usize,
    len_per_axis: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl NdFft {
    pub fn new(dim: usize, len_per_axis: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            len_per_axis,
            forward: planner.plan_fft_forward(len_per_axis),
            inverse: planner.plan_fft_inverse(len_per_axis),
        }
    }

    pub fn total_len(&self) -> usize {
        self.len_per_axis.pow(self.dim as u32)
    }

    fn apply(&self, data: &mut [Complex<f64>], fft: &Arc<dyn Fft<f64>>) {
        let m = self.len_per_axis;
        let total = self.total_len();
        assert_eq!(data.len(), total);
        let mut line = vec![Complex::default(); m];
        // axis `a` has stride m^(dim-1-a) in row-major layout
        for a in 0..self.dim {
            let stride = m.pow((self.dim - 1 - a) as u32);
            let lines = total / m;
            for l in 0..lines {
                // decompose the line index into the non-a coordinates
                let block = l / stride; // index over coordinates before axis a
                let offset = l % stride;
                let start = block * stride * m + offset;
                for k in 0..m {
                    line[k] = data[start + k * stride];
                }
                fft.process(&mut line);
                for k in 0..m {
                    data[start + k * stride] = line[k];
                }
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex<f64>]) {
        self.apply(data, &self.forward.clone());
    }

    /// Inverse transform including the 1/M^d normalization.
    pub fn inverse(&self, data: &mut [Complex<f64>]) {
        self.apply(data, &self.inverse.clone());
        let scale = 1.0 / self.total_len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip() {
        let fft = NdFft::new(2, 8);
        let mut data: Vec<Complex<f64>> = (0..64)
            .map(|i| Complex::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let orig = data.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cyclic_convolution_matches_direct_sum() {
        let m = 8;
        let fft = NdFft::new(2, m);
        let f: Vec<f64> = (0..m * m).map(|i| ((i * 7 + 3) % 11) as f64 / 11.0).collect();
        let k: Vec<f64> = (0..m * m).map(|i| ((i * 5 + 1) % 13) as f64 / 13.0).collect();
        let mut fc: Vec<Complex<f64>> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let mut kc: Vec<Complex<f64>> = k.iter().map(|&x| Complex::new(x, 0.0)).collect();
        fft.forward(&mut fc);
        fft.forward(&mut kc);
        for (a, b) in fc.iter_mut().zip(&kc) {
            *a *= *b;
        }
        fft.inverse(&mut fc);
        // direct cyclic convolution at a few sites
        for &(i, j) in &[(0usize, 0usize), (3, 5), (7, 2)] {
            let mut s = 0.0;
            for p in 0..m {
                for q in 0..m {
                    let ip = (i + m - p) % m;
                    let jq = (j + m - q) % m;
                    s += f[p * m + q] * k[ip * m + jq];
                }
            }
            assert!((fc[i * m + j].re - s).abs() < 1e-10, "site ({i},{j})");
        }
    }
}
