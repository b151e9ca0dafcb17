//! Closed-form models: Poincare disk, hyperbolic strip, flat cylinder,
//! and the taxicab half-slab.
//!
//! Conventions:
//! * Disk: {|z| < 1} with curvature -1, density 2/(1 - |z|^2), so
//!   d(0, r) = 2 artanh r.
//! * Strip: {|Im z| < 1} with curvature -1, density (pi/2)/cos(pi y / 2).
//!   Conformally equivalent to the disk via z -> tanh(pi z / 4).
//! * Cylinder: R x S^1 with the flat product metric; the circle has
//!   circumference 2 pi and angles are tracked in [0, 2 pi).
//! * Slab: [0, inf) x [-1, 1] with the l^1 metric.

use num_complex::Complex64;
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// 2 artanh applied to the Mobius modulus, evaluated in a cancellation-free
/// log form: the denominator |1 - conj(z) w|^2 - |z - w|^2 collapses to
/// (1 - |z|^2)(1 - |w|^2) exactly, which avoids losing digits when both
/// points sit near the boundary.
pub fn disk_distance(z: Complex64, w: Complex64) -> f64 {
    let s = (z - w).norm();
    if s == 0.0 {
        return 0.0;
    }
    let q = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    let pz = 1.0 - z.norm_sqr();
    let pw = 1.0 - w.norm_sqr();
    ((q + s) * (q + s) / (pz * pw)).ln()
}

/// Disk automorphism sending `a` to 0.
pub fn mobius_to_zero(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of `mobius_to_zero`: sends 0 back to `a`.
pub fn mobius_from_zero(a: Complex64, w: Complex64) -> Complex64 {
    (w + a) / (Complex64::new(1.0, 0.0) + a.conj() * w)
}

/// Point at parameter t on the unit-speed disk geodesic that leaves 0
/// toward the unimodular direction `dir`.
pub fn disk_radial(dir: Complex64, t: f64) -> Complex64 {
    dir * (t / 2.0).tanh()
}

/// Hyperbolic density of the disk model.
pub fn disk_density(z: Complex64) -> f64 {
    2.0 / (1.0 - z.norm_sqr())
}

/// Conformal map from the strip {|Im z| < 1} onto the disk.
pub fn strip_to_disk(z: Complex64) -> Complex64 {
    (z * (PI / 4.0)).tanh()
}

/// Inverse conformal map, disk onto strip.
pub fn disk_to_strip(w: Complex64) -> Complex64 {
    w.atanh() * (4.0 / PI)
}

/// Hyperbolic density of the strip model; independent of Re z.
pub fn strip_density(y: f64) -> f64 {
    (PI / 2.0) / (PI * y / 2.0).cos()
}

/// Strip distance in closed form:
///   d = arcosh(1 + 2 (sinh^2(pi dx/4) + sin^2(pi dy/4)) / (cos(pi y1/2) cos(pi y2/2))).
/// Derived by transporting the half-plane formula along z -> i exp(pi z/2);
/// unlike the conformal route through the disk it does not saturate for
/// large |Re z|, so translation orbits can run to arbitrary length.
pub fn strip_distance(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let a = PI * (x2 - x1).abs() / 4.0;
    let b = PI * (y2 - y1) / 4.0;
    let c = (PI * y1 / 2.0).cos() * (PI * y2 / 2.0).cos();
    if a > 250.0 {
        // sinh^2 would overflow; use the exact asymptotic 2a - ln c,
        // whose error is O(exp(-2a)).
        return 2.0 * a - c.ln();
    }
    let u = 2.0 * (a.sinh().powi(2) + b.sin().powi(2)) / c;
    // arcosh(1 + u) written through ln_1p for stability near u = 0.
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

/// Angle difference wrapped to [-pi, pi].
pub fn wrap_angle(dt: f64) -> f64 {
    let r = (dt + PI).rem_euclid(TAU);
    r - PI
}

/// Angle reduced to [0, 2 pi).
pub fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Flat cylinder distance: Euclidean in the axial direction, shortest arc
/// in the angular direction.
pub fn cylinder_distance(x1: f64, t1: f64, x2: f64, t2: f64) -> f64 {
    let dx = x2 - x1;
    let dt = wrap_angle(t2 - t1);
    dx.hypot(dt)
}

/// Taxicab distance on the slab.
pub fn slab_distance(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    (x2 - x1).abs() + (y2 - y1).abs()
}
