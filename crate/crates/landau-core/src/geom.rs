//! Small fixed-size vector and symmetric-matrix helpers.
//!
//! Velocities and positions are stored as `[f64; 3]` with trailing zeros when
//! the active dimension is 2, so dot products and norms need no dimension
//! argument. Symmetric d×d matrices (d ≤ 3) are stored as the upper triangle
//! in row-major order: `[a00, a01, a02, a11, a12, a22]` for d = 3 and
//! `[a00, a01, a11]` for d = 2.

pub type Vec3 = [f64; 3];

pub const ZERO3: Vec3 = [0.0; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// a + s·b
#[inline]
pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

/// Number of independent entries of a symmetric d×d matrix.
#[inline]
pub fn sym_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Position of entry (i, j), i ≤ j, in the packed upper triangle.
#[inline]
pub fn sym_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i starts after i full rows of shrinking length
    i * dim - i * (i + 1) / 2 + i + (j - i)
}

/// Quadratic form e·(A e) for a packed symmetric matrix.
pub fn sym_quad(dim: usize, a: &[f64], e: &Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += a[sym_index(dim, i, j)] * e[i] * e[j];
        }
    }
    s
}

/// Matrix-vector product of a packed symmetric matrix.
pub fn sym_apply(dim: usize, a: &[f64], e: &Vec3) -> Vec3 {
    let mut out = ZERO3;
    for i in 0..dim {
        for j in 0..dim {
            out[i] += a[sym_index(dim, i, j)] * e[j];
        }
    }
    out
}

#[inline]
pub fn sym_trace(dim: usize, a: &[f64]) -> f64 {
    (0..dim).map(|i| a[sym_index(dim, i, i)]).sum()
}

/// Eigenvalues of a packed symmetric d×d matrix, ascending.
///
/// Cyclic Jacobi on a dense copy; d ≤ 3 so a handful of sweeps reaches
/// machine precision.
pub fn sym_eigenvalues(dim: usize, packed: &[f64]) -> Vec<f64> {
    debug_assert!(dim >= 1 && dim <= 3);
    let mut m = [[0.0f64; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            m[i][j] = packed[sym_index(dim, i, j)];
        }
    }
    let scale = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| acc.max(m[i][j].abs()));
    if scale > 0.0 {
        for _ in 0..30 {
            let mut off = 0.0;
            for i in 0..dim {
                for j in (i + 1)..dim {
                    off += m[i][j] * m[i][j];
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..dim {
                for q in (p + 1)..dim {
                    if m[p][q].abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..dim {
                        let mkp = m[k][p];
                        let mkq = m[k][q];
                        m[k][p] = c * mkp - s * mkq;
                        m[k][q] = s * mkp + c * mkq;
                    }
                    for k in 0..dim {
                        let mpk = m[p][k];
                        let mqk = m[q][k];
                        m[p][k] = c * mpk - s * mqk;
                        m[q][k] = s * mpk + c * mqk;
                    }
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..dim).map(|i| m[i][i]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Unit vectors orthogonal to `v` spanning its orthogonal complement
/// (d−1 of them). `v` must be nonzero.
pub fn orthonormal_complement(dim: usize, v: &Vec3) -> Vec<Vec3> {
    let n = norm(v);
    debug_assert!(n > 0.0);
    let vhat = scale(v, 1.0 / n);
    if dim == 2 {
        vec![[-vhat[1], vhat[0], 0.0]]
    } else {
        // pick the coordinate axis least aligned with v
        let mut k = 0;
        for i in 1..3 {
            if vhat[i].abs() < vhat[k].abs() {
                k = i;
            }
        }
        let mut e1 = ZERO3;
        e1[k] = 1.0;
        let e1 = axpy(&e1, -dot(&e1, &vhat), &vhat);
        let e1 = scale(&e1, 1.0 / norm(&e1));
        let e2 = [
            vhat[1] * e1[2] - vhat[2] * e1[1],
            vhat[2] * e1[0] - vhat[0] * e1[2],
            vhat[0] * e1[1] - vhat[1] * e1[0],
        ];
        vec![e1, e2]
    }
}
