//! Kinetic geometry: Galilean shifts, scaling cylinders, the velocity-adapted
//! anisotropic change of variables, and the two kinetic distances.

use crate::error::{Error, Result};
use crate::geom::{add, axpy, dot, norm, scale, sub, Vec3, ZERO3};

/// A point z = (t, x, v) in kinetic phase space. The spatial and velocity
/// parts are stored as 3-vectors with trailing zeros in dimension 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticPoint {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
}

impl KineticPoint {
    pub fn new(t: f64, x: Vec3, v: Vec3) -> Self {
        Self { t, x, v }
    }

    pub fn origin() -> Self {
        Self { t: 0.0, x: ZERO3, v: ZERO3 }
    }
}

/// Galilean shift: S_{z0}(t, x, v) = (t0 + t, x0 + x + t v0, v0 + v).
/// It leaves the transport operator invariant.
pub fn galilean_shift(z0: &KineticPoint, z: &KineticPoint) -> KineticPoint {
    KineticPoint {
        t: z0.t + z.t,
        x: axpy(&add(&z0.x, &z.x), z.t, &z0.v),
        v: add(&z0.v, &z.v),
    }
}

/// Inverse shift: S_{z0}^{-1}(t, x, v) = (t − t0, x − x0 − (t − t0) v0, v − v0).
pub fn galilean_shift_inv(z0: &KineticPoint, z: &KineticPoint) -> KineticPoint {
    let dt = z.t - z0.t;
    KineticPoint {
        t: dt,
        x: axpy(&sub(&z.x, &z0.x), -dt, &z0.v),
        v: sub(&z.v, &z0.v),
    }
}

/// Scaling-adapted cylinder
/// Q_r(z0) = (t0 − r², t0] × {x : |x − x0 − (t − t0) v0| < r³} × B_r(v0).
#[derive(Debug, Clone, Copy)]
pub struct KineticCylinder {
    pub center: KineticPoint,
    pub radius: f64,
}

impl KineticCylinder {
    pub fn new(center: KineticPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("cylinder radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: &KineticPoint) -> bool {
        let r = self.radius;
        let z0 = &self.center;
        let dt = z.t - z0.t;
        if !(dt > -r * r && dt <= 0.0) {
            return false;
        }
        let xrel = axpy(&sub(&z.x, &z0.x), -dt, &z0.v);
        if norm(&xrel) >= r * r * r {
            return false;
        }
        norm(&sub(&z.v, &z0.v)) < r
    }
}

/// The linear map T of the velocity-adapted change of variables:
/// `T e = |v0|^{1+γ/2} e` for `e ⟂ v0` and `T e = |v0|^{γ/2} e` for `e ∥ v0`.
/// Symmetric positive definite; only defined for `|v0| ≥ 2`.
#[derive(Debug, Clone, Copy)]
pub struct AnisotropicTransform {
    base_velocity: Vec3,
    gamma: f64,
    par_factor: f64,
    perp_factor: f64,
}

impl AnisotropicTransform {
    pub fn new(base_velocity: Vec3, gamma: f64) -> Result<Self> {
        let speed = norm(&base_velocity);
        if speed < 2.0 {
            return Err(Error::Domain(format!(
                "anisotropic transform needs |v0| >= 2, got {speed}"
            )));
        }
        if !(gamma > -2.0 && gamma < 0.0) {
            return Err(Error::Domain(format!("gamma must lie in (-2, 0), got {gamma}")));
        }
        Ok(Self {
            base_velocity,
            gamma,
            par_factor: speed.powf(gamma / 2.0),
            perp_factor: speed.powf(1.0 + gamma / 2.0),
        })
    }

    pub fn base_velocity(&self) -> Vec3 {
        self.base_velocity
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn parallel_factor(&self) -> f64 {
        self.par_factor
    }

    pub fn perpendicular_factor(&self) -> f64 {
        self.perp_factor
    }

    pub fn determinant(&self, dim: usize) -> f64 {
        self.perp_factor.powi(dim as i32 - 1) * self.par_factor
    }

    fn split(&self, w: &Vec3) -> (Vec3, Vec3) {
        let speed2 = dot(&self.base_velocity, &self.base_velocity);
        let par = scale(&self.base_velocity, dot(w, &self.base_velocity) / speed2);
        (par, sub(w, &par))
    }

    pub fn apply(&self, w: &Vec3) -> Vec3 {
        let (par, perp) = self.split(w);
        add(&scale(&par, self.par_factor), &scale(&perp, self.perp_factor))
    }

    pub fn apply_inv(&self, w: &Vec3) -> Vec3 {
        let (par, perp) = self.split(w);
        add(&scale(&par, 1.0 / self.par_factor), &scale(&perp, 1.0 / self.perp_factor))
    }
}

/// T or the identity, following the convention that the transform degenerates
/// to a plain Galilean shift below speed 2.
#[derive(Debug, Clone, Copy)]
enum MaybeTransform {
    Identity,
    Aniso(AnisotropicTransform),
}

impl MaybeTransform {
    fn for_base(v0: &Vec3, gamma: f64) -> Result<Self> {
        if norm(v0) < 2.0 {
            Ok(MaybeTransform::Identity)
        } else {
            Ok(MaybeTransform::Aniso(AnisotropicTransform::new(*v0, gamma)?))
        }
    }

    fn apply(&self, w: &Vec3) -> Vec3 {
        match self {
            MaybeTransform::Identity => *w,
            MaybeTransform::Aniso(t) => t.apply(w),
        }
    }

    fn apply_inv(&self, w: &Vec3) -> Vec3 {
        match self {
            MaybeTransform::Identity => *w,
            MaybeTransform::Aniso(t) => t.apply_inv(w),
        }
    }
}

/// 𝒯_{z0}(t, x, v) = (t0 + t, x0 + T x + t v0, v0 + T v), with T = identity
/// when |v0| < 2.
pub fn kinetic_transform(z0: &KineticPoint, z: &KineticPoint, gamma: f64) -> Result<KineticPoint> {
    let t = MaybeTransform::for_base(&z0.v, gamma)?;
    Ok(KineticPoint {
        t: z0.t + z.t,
        x: axpy(&add(&z0.x, &t.apply(&z.x)), z.t, &z0.v),
        v: add(&z0.v, &t.apply(&z.v)),
    })
}

/// Exact inverse of `kinetic_transform`.
pub fn kinetic_transform_inv(z0: &KineticPoint, z: &KineticPoint, gamma: f64) -> Result<KineticPoint> {
    let t = MaybeTransform::for_base(&z0.v, gamma)?;
    let dt = z.t - z0.t;
    Ok(KineticPoint {
        t: dt,
        x: t.apply_inv(&axpy(&sub(&z.x, &z0.x), -dt, &z0.v)),
        v: t.apply_inv(&sub(&z.v, &z0.v)),
    })
}

/// Transport-invariant distance,
/// d_P(z1, z2) = |t1−t2|^{1/2} + |x1−x2−(t1−t2)(v1+v2)/2|^{1/3} + |v1−v2|.
pub fn metric_dp(z1: &KineticPoint, z2: &KineticPoint) -> f64 {
    let dt = z1.t - z2.t;
    let vmid = scale(&add(&z1.v, &z2.v), 0.5);
    let xrel = axpy(&sub(&z1.x, &z2.x), -dt, &vmid);
    dt.abs().sqrt() + norm(&xrel).cbrt() + norm(&sub(&z1.v, &z2.v))
}

/// Result of the d_L minimization: the achieved value and the minimizing
/// base velocity.
#[derive(Debug, Clone, Copy)]
pub struct MetricDl {
    pub value: f64,
    pub base_velocity: Vec3,
}

/// Cost of one candidate base velocity in the d_L minimization.
///
/// The base time and position are optimal in closed form: the cylinder-top
/// time must dominate both points, so `t_z = max(t1, t2)`, and concavity of
/// the cube root puts the whole spatial offset on one point. What is left is
/// the weighted sum of the per-point sizes, which reduces to d_P when the
/// base speed is below 2.
fn dl_cost(z1: &KineticPoint, z2: &KineticPoint, gamma: f64, v_base: &Vec3) -> f64 {
    let speed = norm(v_base);
    let dt = z1.t - z2.t;
    let dx = sub(&z1.x, &z2.x);
    let dxi = axpy(&dx, -dt, v_base);
    let (weight, x_part, v_part) = if speed < 2.0 {
        (
            1.0,
            norm(&dxi).cbrt(),
            norm(&sub(&z1.v, v_base)) + norm(&sub(&z2.v, v_base)),
        )
    } else {
        // construction fails only for |v0| < 2, excluded here
        let t = AnisotropicTransform::new(*v_base, gamma).expect("speed checked");
        (
            speed.powf(1.0 + gamma / 2.0),
            norm(&t.apply_inv(&dxi)).cbrt(),
            norm(&t.apply_inv(&sub(&z1.v, v_base))) + norm(&t.apply_inv(&sub(&z2.v, v_base))),
        )
    };
    weight * (dt.abs().sqrt() + x_part + v_part)
}

/// Transform-deformed kinetic distance d_L, computed by minimizing over
/// candidate base velocities: a coarse lattice over the ball of radius
/// `2|v1−v2| + 1` around the midpoint, followed by pattern-search refinement
/// down to relative tolerance 1e-6.
pub fn metric_dl(z1: &KineticPoint, z2: &KineticPoint, gamma: f64) -> Result<MetricDl> {
    if !(gamma > -2.0 && gamma < 0.0) {
        return Err(Error::Domain(format!("gamma must lie in (-2, 0), got {gamma}")));
    }
    let dim = if z1.v[2] == 0.0 && z2.v[2] == 0.0 && z1.x[2] == 0.0 && z2.x[2] == 0.0 {
        2
    } else {
        3
    };
    let mid = scale(&add(&z1.v, &z2.v), 0.5);
    let radius = 2.0 * norm(&sub(&z1.v, &z2.v)) + 1.0;

    let mut best_v = mid;
    let mut best = dl_cost(z1, z2, gamma, &mid);
    let mut consider = |v: Vec3, best: &mut f64, best_v: &mut Vec3| {
        let c = dl_cost(z1, z2, gamma, &v);
        if c < *best {
            *best = c;
            *best_v = v;
        }
    };

    // endpoints and a coarse lattice over the search ball
    consider(z1.v, &mut best, &mut best_v);
    consider(z2.v, &mut best, &mut best_v);
    let coarse = 7usize;
    let step = 2.0 * radius / (coarse - 1) as f64;
    let mut lat = [0usize; 3];
    loop {
        let mut v = mid;
        for a in 0..dim {
            v[a] += -radius + lat[a] as f64 * step;
        }
        consider(v, &mut best, &mut best_v);
        let mut a = 0;
        loop {
            if a == dim {
                break;
            }
            lat[a] += 1;
            if lat[a] < coarse {
                break;
            }
            lat[a] = 0;
            a += 1;
        }
        if a == dim {
            break;
        }
    }

    // pattern search refinement
    let scale_ref = best.max(metric_dp(z1, z2)).max(1e-30);
    let tol = 1e-6 * scale_ref;
    let mut h = step.max(1e-3);
    let mut iterations = 0usize;
    while h > 1e-9 * radius.max(1.0) {
        let mut improved = false;
        for a in 0..dim {
            for sgn in [-1.0, 1.0] {
                let mut v = best_v;
                v[a] += sgn * h;
                let c = dl_cost(z1, z2, gamma, &v);
                if c < best - 1e-18 * scale_ref {
                    best = c;
                    best_v = v;
                    improved = true;
                }
            }
        }
        if !improved {
            if h < tol {
                break;
            }
            h *= 0.5;
        }
        iterations += 1;
        if iterations > 500 {
            return Err(Error::NonConvergence { iterations });
        }
    }
    Ok(MetricDl { value: best, base_velocity: best_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pt(t: f64, x: [f64; 2], v: [f64; 2]) -> KineticPoint {
        KineticPoint::new(t, [x[0], x[1], 0.0], [v[0], v[1], 0.0])
    }

    #[test]
    fn shift_identity_base_point() {
        let z = pt(0.7, [1.0, -2.0], [0.5, 3.0]);
        let s = galilean_shift(&KineticPoint::origin(), &z);
        assert_eq!(s, z);
    }

    #[test]
    fn shift_worked_example() {
        let z0 = pt(1.0, [0.0, 0.0], [1.0, 0.0]);
        let z = pt(2.0, [0.0, 0.0], [0.0, 0.0]);
        let s = galilean_shift(&z0, &z);
        assert_eq!(s.t, 3.0);
        assert_eq!(s.x, [2.0, 0.0, 0.0]);
        assert_eq!(s.v, [1.0, 0.0, 0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn shift_roundtrip(
            a in proptest::array::uniform9(-5.0f64..5.0),
        ) {
            let z0 = KineticPoint::new(a[0], [a[1], a[2], 0.0], [a[3], a[4], 0.0]);
            let z = KineticPoint::new(a[5], [a[6], a[7], 0.0], [a[8], 0.3, 0.0]);
            let back = galilean_shift_inv(&z0, &galilean_shift(&z0, &z));
            prop_assert!((back.t - z.t).abs() < 1e-12);
            prop_assert!(norm(&sub(&back.x, &z.x)) < 1e-12);
            prop_assert!(norm(&sub(&back.v, &z.v)) < 1e-12);
        }

        #[test]
        fn shift_is_group_action(
            a in proptest::array::uniform9(-3.0f64..3.0),
            b in proptest::array::uniform5(-3.0f64..3.0),
        ) {
            let z0 = KineticPoint::new(a[0], [a[1], a[2], 0.0], [a[3], a[4], 0.0]);
            let z1 = KineticPoint::new(a[5], [a[6], a[7], 0.0], [a[8], b[4], 0.0]);
            let z = KineticPoint::new(b[0], [b[1], b[2], 0.0], [b[3], -1.0, 0.0]);
            // S_{z1} ∘ S_{z0} = S_{S_{z1}(z0)}
            let lhs = galilean_shift(&z1, &galilean_shift(&z0, &z));
            let composed = galilean_shift(&z1, &z0);
            let rhs = galilean_shift(&composed, &z);
            prop_assert!((lhs.t - rhs.t).abs() < 1e-10);
            prop_assert!(norm(&sub(&lhs.x, &rhs.x)) < 1e-10);
            prop_assert!(norm(&sub(&lhs.v, &rhs.v)) < 1e-10);
        }

        #[test]
        fn cylinder_membership_shift_invariant(
            a in proptest::array::uniform9(-2.0f64..2.0),
            r in 0.3f64..2.0,
        ) {
            let z0 = KineticPoint::new(a[0].abs() + 4.0, [a[1], a[2], 0.0], [a[3], a[4], 0.0]);
            let z = KineticPoint::new(z0.t + a[5] * 0.1, [a[6], a[7], 0.0], [a[8], 0.0, 0.0]);
            let shift = pt(1.3, [0.4, -0.2], [0.8, 0.5]);
            let q = KineticCylinder::new(z0, r).unwrap();
            let qs = KineticCylinder::new(galilean_shift(&shift, &z0), r).unwrap();
            prop_assert_eq!(q.contains(&z), qs.contains(&galilean_shift(&shift, &z)));
        }

        #[test]
        fn dp_scaling_identity(
            a in proptest::array::uniform10(-4.0f64..4.0),
        ) {
            let z1 = KineticPoint::new(a[0], [a[1], a[2], 0.0], [a[3], a[4], 0.0]);
            let z2 = KineticPoint::new(a[5], [a[6], a[7], 0.0], [a[8], a[9], 0.0]);
            let base = metric_dp(&z1, &z2);
            for r in [0.5f64, 2.0] {
                let s1 = KineticPoint::new(r * r * z1.t, scale(&z1.x, r * r * r), scale(&z1.v, r));
                let s2 = KineticPoint::new(r * r * z2.t, scale(&z2.x, r * r * r), scale(&z2.v, r));
                let scaled = metric_dp(&s1, &s2);
                prop_assert!((scaled - r * base).abs() <= 1e-13 * (1.0 + base));
            }
        }
    }

    #[test]
    fn cylinder_examples() {
        let q = KineticCylinder::new(KineticPoint::origin(), 1.0).unwrap();
        assert!(q.contains(&KineticPoint::origin()));
        assert!(!q.contains(&pt(-1.5, [0.0, 0.0], [0.0, 0.0])));
        let q = KineticCylinder::new(pt(0.0, [0.0, 0.0], [1.0, 0.0]), 1.0).unwrap();
        // |x - x0 - (t - t0) v0| = |-0.5 - (-0.5)(1)| = 0 < 1
        assert!(q.contains(&pt(-0.5, [-0.5, 0.0], [1.0, 0.0])));
    }

    #[test]
    fn transform_factors_match_formula() {
        let t = AnisotropicTransform::new([2.0, 0.0, 0.0], -1.0).unwrap();
        assert_relative_eq!(t.parallel_factor(), 2.0f64.powf(-0.5), max_relative = 1e-15);
        assert_relative_eq!(t.perpendicular_factor(), 2.0f64.powf(0.5), max_relative = 1e-15);
        let t = AnisotropicTransform::new([0.0, 3.0, 0.0], -1.0).unwrap();
        assert_relative_eq!(t.parallel_factor(), 3.0f64.powf(-0.5), max_relative = 1e-15);
        assert_relative_eq!(t.perpendicular_factor(), 3.0f64.powf(0.5), max_relative = 1e-15);
        // applying to aligned and orthogonal unit vectors reproduces them
        let par = t.apply(&[0.0, 1.0, 0.0]);
        assert_relative_eq!(par[1], 3.0f64.powf(-0.5), max_relative = 1e-14);
        let perp = t.apply(&[1.0, 0.0, 0.0]);
        assert_relative_eq!(perp[0], 3.0f64.powf(0.5), max_relative = 1e-14);
        assert!(AnisotropicTransform::new([1.0, 0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn transform_determinant() {
        let t = AnisotropicTransform::new([0.0, 4.0, 0.0], -0.6).unwrap();
        for dim in [2usize, 3] {
            let expect = 4.0f64.powf((dim as f64 - 1.0) * (1.0 - 0.3) + (-0.3));
            assert_relative_eq!(t.determinant(dim), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn transform_eigenvalue_multiplicities() {
        // exactly two distinct factors, multiplicity (d-1) for the
        // perpendicular one; sweep |v0| and check the scaling exponents
        for speed in [2.0f64, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let t = AnisotropicTransform::new([speed, 0.0, 0.0], -1.2).unwrap();
            assert_relative_eq!(t.parallel_factor(), speed.powf(-0.6), max_relative = 1e-14);
            assert_relative_eq!(t.perpendicular_factor(), speed.powf(0.4), max_relative = 1e-14);
            let i1 = t.apply(&[0.0, 1.0, 0.0]);
            let i2 = t.apply(&[0.0, 0.0, 1.0]);
            assert_relative_eq!(i1[1], i2[2], max_relative = 1e-15);
        }
    }

    #[test]
    fn transform_keeps_shifted_speed_comparable() {
        // |v0 + Tv| / |v0| stays in a speed-independent band over |v| <= 1
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for speed in [2.0f64, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let v0 = [speed / 2.0f64.sqrt(), speed / 2.0f64.sqrt(), 0.0];
            let t = AnisotropicTransform::new(v0, -1.0).unwrap();
            for k in 0..64 {
                let ang = k as f64 * std::f64::consts::TAU / 64.0;
                let v = [ang.cos(), ang.sin(), 0.0];
                let ratio = norm(&add(&v0, &t.apply(&v))) / speed;
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
        }
        assert!(lo > 0.2, "lower ratio {lo}");
        assert!(hi < 2.0, "upper ratio {hi}");
    }

    #[test]
    fn kinetic_transform_worked_example() {
        let z0 = KineticPoint::new(1.5, [0.2, 0.0, 0.0], [2.0, 0.0, 0.0]);
        let z = KineticPoint::new(0.0, ZERO3, [1.0, 0.0, 0.0]);
        let out = kinetic_transform(&z0, &z, -1.0).unwrap();
        assert_eq!(out.t, z0.t);
        assert_eq!(out.x, z0.x);
        assert_relative_eq!(out.v[0], 2.0 + 2.0f64.powf(-0.5), max_relative = 1e-14);
    }

    #[test]
    fn kinetic_transform_origin_maps_to_base() {
        let z0 = KineticPoint::new(2.0, [1.0, -1.0, 0.0], [3.0, 1.0, 0.0]);
        let out = kinetic_transform(&z0, &KineticPoint::origin(), -0.7).unwrap();
        assert_eq!(out.t, z0.t);
        assert_eq!(out.x, z0.x);
        assert_eq!(out.v, z0.v);
    }

    #[test]
    fn kinetic_transform_roundtrip_random() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0
        };
        for _ in 0..100 {
            let z0 = KineticPoint::new(rnd().abs(), [rnd(), rnd(), 0.0], [rnd(), rnd() + 4.0, 0.0]);
            let z = KineticPoint::new(rnd(), [rnd(), rnd(), 0.0], [rnd(), rnd(), 0.0]);
            let fwd = kinetic_transform(&z0, &z, -1.3).unwrap();
            let back = kinetic_transform_inv(&z0, &fwd, -1.3).unwrap();
            assert!((back.t - z.t).abs() < 1e-10);
            assert!(norm(&sub(&back.x, &z.x)) < 1e-10);
            assert!(norm(&sub(&back.v, &z.v)) < 1e-10);
        }
    }

    #[test]
    fn dp_examples() {
        let z = pt(0.3, [1.0, 2.0], [0.5, -0.5]);
        assert_eq!(metric_dp(&z, &z), 0.0);
        let z1 = pt(0.0, [0.0, 0.0], [0.0, 0.0]);
        let z2 = pt(0.0, [0.0, 0.0], [0.5, 0.0]);
        assert_relative_eq!(metric_dp(&z1, &z2), 0.5, max_relative = 1e-15);
        let z2 = pt(1.0, [0.5, 0.0], [1.0, 0.0]);
        assert_relative_eq!(metric_dp(&z1, &z2), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn dl_zero_for_coincident_points() {
        let z = pt(0.5, [0.1, 0.2], [1.0, 0.3]);
        let out = metric_dl(&z, &z, -1.0).unwrap();
        assert!(out.value.abs() < 1e-12);
    }

    #[test]
    fn dl_matches_dp_for_slow_velocity_pairs() {
        // same t and x, both speeds below 2: the transform degenerates to the
        // plain shift and the minimization collapses onto d_P
        let cases = [
            ([0.5, 0.3], [-0.4, 0.8]),
            ([1.2, 0.0], [0.0, 1.1]),
            ([0.1, -0.2], [0.3, 0.1]),
        ];
        for (v1, v2) in cases {
            let z1 = pt(0.7, [0.4, -0.1], v1);
            let z2 = pt(0.7, [0.4, -0.1], v2);
            let dl = metric_dl(&z1, &z2, -1.0).unwrap().value;
            let dp = metric_dp(&z1, &z2);
            assert!(
                (dl - dp).abs() <= 1e-3 * dp,
                "dl = {dl}, dp = {dp} for pair {v1:?}, {v2:?}"
            );
        }
    }

    #[test]
    fn dl_agrees_with_dense_lattice_oracle() {
        // brute-force minimization over a dense base-velocity lattice is the
        // independent oracle for the pattern search
        let z1 = pt(0.5, [0.0, 0.0], [8.0, 0.05]);
        let z2 = pt(0.5, [0.0, 0.0], [8.0, -0.05]);
        let gamma = -1.0;
        let impl_val = metric_dl(&z1, &z2, gamma).unwrap().value;
        let mid = scale(&add(&z1.v, &z2.v), 0.5);
        let radius = 2.0 * norm(&sub(&z1.v, &z2.v)) + 1.0;
        let m = 101;
        let mut oracle = f64::INFINITY;
        for i in 0..m {
            for j in 0..m {
                let v = [
                    mid[0] - radius + 2.0 * radius * i as f64 / (m - 1) as f64,
                    mid[1] - radius + 2.0 * radius * j as f64 / (m - 1) as f64,
                    0.0,
                ];
                oracle = oracle.min(dl_cost(&z1, &z2, gamma, &v));
            }
        }
        assert!(
            impl_val <= oracle * (1.0 + 1e-3),
            "pattern search {impl_val} worse than lattice oracle {oracle}"
        );
        // perpendicular separation at high speed: d_L stays between the
        // anisotropy-rescaled scale and the flat scale
        let dp = metric_dp(&z1, &z2);
        let aniso = 8.0f64.powf(gamma / 2.0);
        assert!(impl_val <= dp * 1.001, "dl {impl_val} vs dp {dp}");
        assert!(impl_val >= 0.5 * aniso * dp, "dl {impl_val} below anisotropic floor");
    }

    #[test]
    fn dl_symmetry_and_positivity() {
        let z1 = pt(0.4, [0.2, 0.0], [3.0, 1.0]);
        let z2 = pt(0.9, [0.1, 0.3], [2.5, -0.5]);
        let a = metric_dl(&z1, &z2, -0.8).unwrap().value;
        let b = metric_dl(&z2, &z1, -0.8).unwrap().value;
        assert!(a > 0.0);
        assert_relative_eq!(a, b, max_relative = 1e-5);
    }
}
