//! Fixed-size attitude math: 3-vectors, 3x3 matrices, scalar-last
//! quaternions, and the inertia model.
//!
//! Conventions used everywhere in this crate:
//! * quaternions store the vector part first, scalar last: `[x, y, z, w]`;
//! * products are Hamilton products;
//! * `rotation_matrix(q)` is the frame-transformation matrix, i.e. the
//!   matrix of conjugation by `q`'s inverse, so for an error quaternion
//!   `q_e = quat_error(q_d, q_s)` it maps desired-frame coordinates into
//!   body-frame coordinates.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

/// Scalar quaternion components below this magnitude make the kinematics
/// Jacobian numerically non-invertible.
pub const Q0_SINGULAR_TOL: f64 = 1e-6;

// ─── Vec3 ───────────────────────────────────────────────────────────────

/// Column 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(&self, rhs: Vec3) -> f64 {
        self.0[0] * rhs.0[0] + self.0[1] * rhs.0[1] + self.0[2] * rhs.0[2]
    }

    pub fn cross(&self, rhs: Vec3) -> Vec3 {
        Vec3([
            self.0[1] * rhs.0[2] - self.0[2] * rhs.0[1],
            self.0[2] * rhs.0[0] - self.0[0] * rhs.0[2],
            self.0[0] * rhs.0[1] - self.0[1] * rhs.0[0],
        ])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(*self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Componentwise map (used for `tanh` and saturation-style shaping).
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vec3 {
        Vec3([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] + rhs[0], self[1] + rhs[1], self[2] + rhs[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3([self[0] - rhs[0], self[1] - rhs[1], self[2] - rhs[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self[0], -self[1], -self[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self[0] * s, self[1] * s, self[2] * s])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

// ─── Mat3 ───────────────────────────────────────────────────────────────

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn identity() -> Mat3 {
        Mat3::from_diag(Vec3([1.0, 1.0, 1.0]))
    }

    pub fn from_diag(d: Vec3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Skew-symmetric cross-product matrix: `skew(a) * b == a.cross(b)`.
    pub fn skew(a: Vec3) -> Mat3 {
        Mat3([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    }

    /// Outer product `a * b^T`.
    pub fn outer(a: Vec3, b: Vec3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Adjugate-based inverse. Errors when `|det|` is smaller than
    /// `1e-12 * max_abs^3` (scale-aware near-singularity guard).
    pub fn inverse(&self) -> Result<Mat3> {
        let m = &self.0;
        let det = self.det();
        let scale = self.max_abs().max(1e-300);
        if det.abs() <= 1e-12 * scale * scale * scale {
            return Err(Error::Singular { what: "matrix determinant", value: det });
        }
        let inv_det = 1.0 / det;
        let mut out = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                // cofactor expansion, transposed
                let a = m[(j + 1) % 3][(i + 1) % 3];
                let b = m[(j + 2) % 3][(i + 2) % 3];
                let c = m[(j + 1) % 3][(i + 2) % 3];
                let d = m[(j + 2) % 3][(i + 1) % 3];
                out.0[i][j] = (a * b - c * d) * inv_det;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|c| c.is_finite())
    }

    /// Max absolute asymmetry `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.0;
        (m[0][1] - m[1][0])
            .abs()
            .max((m[0][2] - m[2][0]).abs())
            .max((m[1][2] - m[2][1]).abs())
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] - rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][j] * s;
            }
        }
        m
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        let mut out = Vec3::ZERO;
        for i in 0..3 {
            out[i] = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }
}

impl Mul<Mat3> for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

// ─── Quaternion ─────────────────────────────────────────────────────────

/// Scalar-last quaternion `[x, y, z, w]`.
///
/// Most operations expect unit norm; `renormalize` restores it after
/// integration steps. No sign convention is enforced: `q` and `-q` encode
/// the same rotation and both are accepted as-is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat(pub [f64; 4]);

impl Quat {
    pub const IDENTITY: Quat = Quat([0.0, 0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Quat([x, y, z, w])
    }

    pub fn from_parts(v: Vec3, w: f64) -> Self {
        Quat([v[0], v[1], v[2], w])
    }

    /// Vector part `[x, y, z]`.
    pub fn vec(&self) -> Vec3 {
        Vec3([self.0[0], self.0[1], self.0[2]])
    }

    /// Scalar part `w`.
    pub fn w(&self) -> f64 {
        self.0[3]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn conjugate(&self) -> Quat {
        Quat([-self.0[0], -self.0[1], -self.0[2], self.0[3]])
    }

    /// Rescale to unit norm. Errors when the norm is below 1e-9, which can
    /// only happen after a severe integration failure.
    pub fn renormalize(&self) -> Result<Quat> {
        let n = self.norm();
        if !(n > 1e-9) || !n.is_finite() {
            return Err(Error::Singular { what: "quaternion norm", value: n });
        }
        let inv = 1.0 / n;
        Ok(Quat(self.0.map(|c| c * inv)))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

/// Hamilton product `a (x) b`, scalar-last layout.
pub fn quat_product(a: &Quat, b: &Quat) -> Quat {
    let (av, aw) = (a.vec(), a.w());
    let (bv, bw) = (b.vec(), b.w());
    let v = aw * bv + bw * av + av.cross(bv);
    let w = aw * bw - av.dot(bv);
    Quat::from_parts(v, w)
}

/// Attitude error `q_e = q_d^{-1} (x) q_s` between a desired attitude `q_d`
/// and the actual attitude `q_s` (both unit).
///
/// With this composition, `rotation_matrix(q_e)` maps desired-frame
/// coordinates to body-frame coordinates, and the relative rate expressed
/// in the body frame is `omega_e = omega_s - rotation_matrix(q_e) * omega_d`.
pub fn quat_error(q_d: &Quat, q_s: &Quat) -> Quat {
    quat_product(&q_d.conjugate(), q_s)
}

/// Kinematics Jacobian `G(q) = (w * I + skew(v)) / 2`, mapping body rates to
/// the vector-part derivative: `d/dt vec(q) = G(q) * omega`.
///
/// Smallest singular value is `|w| / 2`, so the inverse blows up near
/// `w = 0` (a 180 degree error).
pub fn gamma_matrix(q: &Quat) -> Mat3 {
    (Mat3::from_diag(Vec3([q.w(), q.w(), q.w()])) + Mat3::skew(q.vec())) * 0.5
}

/// Closed-form inverse of `gamma_matrix`. Errors when `|w| <= 1e-6`.
///
/// For unit `q` the spectral norm of the result is exactly `2 / |w|`.
pub fn gamma_inverse(q: &Quat) -> Result<Mat3> {
    let (v, w) = (q.vec(), q.w());
    if w.abs() <= Q0_SINGULAR_TOL {
        return Err(Error::Singular { what: "scalar quaternion component", value: w });
    }
    // (w I + skew(v))^{-1} = (w^2 I - w skew(v) + v v^T) / (w (w^2 + |v|^2))
    let num = Mat3::from_diag(Vec3([w * w, w * w, w * w])) - Mat3::skew(v) * w
        + Mat3::outer(v, v);
    Ok(num * (2.0 / (w * (w * w + v.norm_sq()))))
}

/// Frame-transformation matrix of a unit quaternion:
/// `C(q) = (w^2 - |v|^2) I + 2 v v^T - 2 w skew(v)`.
///
/// Equals conjugation by the inverse, `C(q) x = vec(q^{-1} (x) [x,0] (x) q)`,
/// so it is orthonormal with determinant +1 for unit `q`.
pub fn rotation_matrix(q: &Quat) -> Mat3 {
    let (v, w) = (q.vec(), q.w());
    Mat3::identity() * (w * w - v.norm_sq()) + Mat3::outer(v, v) * 2.0
        - Mat3::skew(v) * (2.0 * w)
}

/// Quaternion derivative under body rate `omega`:
/// vector part `G(q) omega`, scalar part `-v . omega / 2`.
/// Algebraically this is `q (x) [omega, 0] / 2`.
pub fn kinematics_rhs(q: &Quat, omega: Vec3) -> Quat {
    let vdot = gamma_matrix(q) * omega;
    let wdot = -0.5 * q.vec().dot(omega);
    Quat::from_parts(vdot, wdot)
}

// ─── Symmetric eigenvalue bounds ─────────────────────────────────────────

/// Smallest and largest eigenvalue of a symmetric 3x3 matrix via the
/// trigonometric solution of the characteristic cubic. Deterministic, no
/// iteration. Errors on non-finite input or asymmetry above
/// `1e-9 * max(1, max_abs)`.
pub fn sym_eig_bounds(m: &Mat3) -> Result<(f64, f64)> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix", "non-finite entries"));
    }
    if m.asymmetry() > 1e-9 * m.max_abs().max(1.0) {
        return Err(Error::invalid("matrix", "not symmetric"));
    }
    let mean = m.trace() / 3.0;
    let b = *m - Mat3::from_diag(Vec3([mean, mean, mean]));
    let p = b.0.iter().flatten().map(|c| c * c).sum::<f64>() / 6.0;
    if p <= f64::EPSILON * mean * mean + f64::MIN_POSITIVE {
        // already (numerically) a multiple of the identity
        return Ok((mean, mean));
    }
    let q = b.det() / 2.0;
    let ratio = (q / (p * p.sqrt())).clamp(-1.0, 1.0);
    let phi = ratio.acos() / 3.0;
    let two_sqrt_p = 2.0 * p.sqrt();
    // cos(phi) is the largest of the three cosines, cos(phi + 2pi/3) the smallest
    let lambda_max = mean + two_sqrt_p * phi.cos();
    let lambda_min = mean + two_sqrt_p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    Ok((lambda_min, lambda_max))
}

// ─── Inertia model ───────────────────────────────────────────────────────

/// Inertia tensor with its cached inverse and extreme eigenvalues.
#[derive(Debug, Clone, Copy)]
pub struct InertiaModel {
    j: Mat3,
    j_inv: Mat3,
    lambda_min: f64,
    lambda_max: f64,
}

impl InertiaModel {
    /// Validates symmetry (within 1e-12, scale-aware) and positive
    /// definiteness, then caches the inverse and eigenvalue bounds.
    pub fn new(j: Mat3) -> Result<InertiaModel> {
        if !j.is_finite() {
            return Err(Error::invalid("inertia", "non-finite entries"));
        }
        if j.asymmetry() > 1e-12 * j.max_abs().max(1.0) {
            return Err(Error::invalid("inertia", "not symmetric"));
        }
        let (lambda_min, lambda_max) = sym_eig_bounds(&j)?;
        if lambda_min <= 0.0 {
            return Err(Error::invalid(
                "inertia",
                format!("not positive definite (lambda_min = {lambda_min:e})"),
            ));
        }
        let j_inv = j.inverse()?;
        Ok(InertiaModel { j, j_inv, lambda_min, lambda_max })
    }

    pub fn j(&self) -> &Mat3 {
        &self.j
    }

    pub fn j_inv(&self) -> &Mat3 {
        &self.j_inv
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Rotational kinetic energy `omega^T J omega / 2`.
    pub fn kinetic_energy(&self, omega: Vec3) -> f64 {
        0.5 * omega.dot(self.j * omega)
    }
}
