//! Lorentz singular value decomposition of 2x2 matrices,
//!
//! ```text
//! [[x, y], [z, t]] = R_a · diag(K, L) · R_b,   R_h = [[cosh h, sinh h], [sinh h, cosh h]],
//! ```
//!
//! and the hyperbolic rotations `R_h` embedded in `n x n` identity matrices.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::kernel::Matrix;

/// Row-major `[[x, y], [z, t]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl Mat2 {
    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    /// `[[cosh h, sinh h], [sinh h, cosh h]]`.
    pub fn hyperbolic(h: f64) -> Self {
        let (c, s) = (h.cosh(), h.sinh());
        Self::new(c, s, s, c)
    }

    /// Top-left 2x2 block of `m`.
    pub fn top_left(m: &Matrix) -> Self {
        Self::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    }

    pub fn det(&self) -> f64 {
        self.x * self.t - self.z * self.y
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z + self.t * self.t).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
            self.t - other.t,
        ]
        .iter()
        .fold(0.0, |a, d| a.max(d.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.t.is_finite()
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.x * o.x + self.y * o.z,
            self.x * o.y + self.y * o.t,
            self.z * o.x + self.t * o.z,
            self.z * o.y + self.t * o.t,
        )
    }
}

/// `R_left · diag(k, l) · R_right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzFactors {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Left rotation parameter.
    pub t: f64,
    /// Right rotation parameter.
    pub s: f64,
}

impl LorentzFactors {
    pub fn compose(&self) -> Mat2 {
        Mat2::hyperbolic(self.t) * Mat2::diag(self.k, self.l) * Mat2::hyperbolic(self.s)
    }
}

/// Domain of [`lorentz_svd`]: `x − t > |z − y|`, `x + t > |z + y|`,
/// `xt − zy > 0`. Equality `z ± y = 0` is allowed.
pub fn lorentz_admissible(m: &Mat2) -> bool {
    m.is_finite() && m.x - m.t > (m.z - m.y).abs() && m.x + m.t > (m.z + m.y).abs() && m.det() > 0.0
}

/// `sqrt(a² − b²)` evaluated as `sqrt((a − |b|)(a + |b|))`.
fn hyperbolic_norm(a: f64, b: f64) -> f64 {
    let b = b.abs();
    ((a - b) * (a + b)).max(0.0).sqrt()
}

/// Factors with
///
/// ```text
/// K + L = sqrt((x + t)² − (z + y)²),   t_L + s_R = asinh((z + y) / (K + L)),
/// K − L = sqrt((x − t)² − (z − y)²),   t_L − s_R = asinh((z − y) / (K − L)).
/// ```
pub fn lorentz_svd(m: &Mat2) -> Result<LorentzFactors> {
    if !lorentz_admissible(m) {
        return Err(GeometryError::NotAdmissible(format!(
            "[[{}, {}], [{}, {}]] violates x−t > |z−y|, x+t > |z+y|, det > 0",
            m.x, m.y, m.z, m.t
        )));
    }
    let sum_off = m.z + m.y;
    let diff_off = m.z - m.y;
    let k_plus_l = hyperbolic_norm(m.x + m.t, sum_off);
    let k_minus_l = hyperbolic_norm(m.x - m.t, diff_off);
    let scale = m.frobenius_norm().max(1.0);
    if k_minus_l <= 1e-14 * scale {
        return Err(GeometryError::NotAdmissible(format!(
            "K − L = {k_minus_l:e} underflows at scale {scale:e}"
        )));
    }
    let k = 0.5 * (k_plus_l + k_minus_l);
    let l = 0.5 * (k_plus_l - k_minus_l);
    if !(l > 0.0) {
        return Err(GeometryError::NotAdmissible(format!(
            "L = {l:e} is not positive"
        )));
    }
    let sum = (sum_off / k_plus_l).asinh();
    let diff = (diff_off / k_minus_l).asinh();
    Ok(LorentzFactors {
        k,
        l,
        t: 0.5 * (sum + diff),
        s: 0.5 * (sum - diff),
    })
}

/// `n x n` identity with `[[cosh x, sinh x], [sinh x, cosh x]]` in the
/// top-left corner.
pub fn hyperbolic_rotation(x: f64, n: usize) -> Matrix {
    assert!(n >= 2, "hyperbolic rotation needs n >= 2");
    let mut m = Matrix::identity(n, n);
    let (c, s) = (x.cosh(), x.sinh());
    m[(0, 0)] = c;
    m[(0, 1)] = s;
    m[(1, 0)] = s;
    m[(1, 1)] = c;
    m
}

/// `diag(1, −1, …, −1)`.
pub fn signature_matrix(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |r, c| match (r, c) {
        (0, 0) => 1.0,
        (r, c) if r == c => -1.0,
        _ => 0.0,
    })
}
