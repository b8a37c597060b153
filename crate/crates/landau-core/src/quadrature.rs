//! Adaptive cell integrals for kernels with an integrable singularity.
//!
//! The collision kernels behave like |w|^γ with γ ∈ (−2, 0] near the origin;
//! they are integrable over a cell but unbounded, so midpoint sampling loses
//! an order there. Cells near the origin therefore carry exact averages,
//! computed here by recursive panel subdivision with a tensor Gauss rule.

const GAUSS3_NODES: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

fn gauss3_panel(f: &impl Fn(&[f64; 3]) -> f64, dim: usize, lo: &[f64; 3], hi: &[f64; 3]) -> f64 {
    let mut sum = 0.0;
    let mut idx = [0usize; 3];
    loop {
        let mut w = 1.0;
        let mut p = [0.0f64; 3];
        for a in 0..dim {
            let c = 0.5 * (lo[a] + hi[a]);
            let half = 0.5 * (hi[a] - lo[a]);
            p[a] = c + half * GAUSS3_NODES[idx[a]];
            w *= GAUSS3_WEIGHTS[idx[a]] * half;
        }
        sum += w * f(&p);
        let mut a = 0;
        loop {
            if a == dim {
                return sum;
            }
            idx[a] += 1;
            if idx[a] < 3 {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == dim {
            return sum;
        }
    }
}

fn adaptive(
    f: &impl Fn(&[f64; 3]) -> f64,
    dim: usize,
    lo: &[f64; 3],
    hi: &[f64; 3],
    tol: f64,
    depth: usize,
) -> f64 {
    let coarse = gauss3_panel(f, dim, lo, hi);
    let mut fine = 0.0;
    let panels = 1usize << dim;
    for c in 0..panels {
        let mut plo = *lo;
        let mut phi = *hi;
        for a in 0..dim {
            let mid = 0.5 * (lo[a] + hi[a]);
            if c >> a & 1 == 1 {
                plo[a] = mid;
            } else {
                phi[a] = mid;
            }
        }
        fine += gauss3_panel(f, dim, &plo, &phi);
    }
    if (fine - coarse).abs() <= tol || depth >= 48 {
        return fine;
    }
    let mut total = 0.0;
    for c in 0..panels {
        let mut plo = *lo;
        let mut phi = *hi;
        for a in 0..dim {
            let mid = 0.5 * (lo[a] + hi[a]);
            if c >> a & 1 == 1 {
                plo[a] = mid;
            } else {
                phi[a] = mid;
            }
        }
        total += adaptive(f, dim, &plo, &phi, tol / panels as f64, depth + 1);
    }
    total
}

/// Average of `f` over the cube cell centered at `center` with side `h`.
///
/// `f` may be unbounded at isolated points (the collision kernels at w = 0);
/// the recursion concentrates panels there and the integral converges for
/// any integrable singularity.
pub fn cell_average(f: impl Fn(&[f64; 3]) -> f64, dim: usize, center: &[f64; 3], h: f64) -> f64 {
    let mut lo = [0.0f64; 3];
    let mut hi = [0.0f64; 3];
    for a in 0..dim {
        lo[a] = center[a] - 0.5 * h;
        hi[a] = center[a] + 0.5 * h;
    }
    let volume = h.powi(dim as i32);
    let rough = gauss3_panel(&f, dim, &lo, &hi).abs().max(volume);
    let tol = 1e-11 * rough;
    adaptive(&f, dim, &lo, &hi, tol, 0) / volume
}
