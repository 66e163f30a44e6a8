//! Spherical simplices on `S^{m−1}`: circumscribed caps, polar simplices and
//! inscribed caps obtained through polar duality.
//!
//! Caps are evaluated along one of two algebraically equivalent routes,
//! picked by cap size:
//!
//! * small caps (radius below 45°): the Euclidean circumcenter `c` of the
//!   vertices inside their affine hull is the foot of the perpendicular from
//!   the origin, so the cap center is `c / ‖c‖` and `tan α = ρ / ‖c‖` with
//!   `ρ` the circumradius in the hull. Everything is expressed through edge
//!   vectors and keeps relative accuracy for tiny caps.
//! * large caps: the center solves `Uᵀ t = 1` and `cos α = 1 / ‖t‖`.
//!
//! Both the cosine and the sine of every cap radius are kept so that
//! complementary radii (`π/2 − α`) lose no digits.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::kernel::{affine_circumcenter, invert, solve_linear, Matrix, Vector, RTOL};

/// Minimum distance from the origin to the affine hull of the vertices;
/// below it the vertex vectors are treated as linearly dependent.
pub const LINEAR_DEPENDENCE_THRESHOLD: f64 = 1e-9;

/// Absolute tolerance used by [`verify_polarity`].
pub const POLARITY_ATOL: f64 = 1e-9;

/// `m` linearly independent unit vectors in `R^m`, `m >= 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSimplex {
    vertices: Vec<Vector>,
    hull_center: Vector,
    hull_radius: f64,
}

impl SphericalSimplex {
    /// Validates and renormalizes the vertices.
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let m = vertices.len();
        if m < 3 {
            return Err(GeometryError::InvalidInput(format!(
                "a spherical simplex needs at least 3 vertices (got {m})"
            )));
        }
        let mut unit = Vec::with_capacity(m);
        for v in vertices {
            if v.len() != m {
                return Err(GeometryError::DimensionMismatch {
                    expected: m,
                    actual: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::InvalidInput("non-finite coordinate".into()));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > RTOL {
                return Err(GeometryError::NotUnit { norm });
            }
            unit.push(v / norm);
        }
        let (hull_center, hull_radius) = affine_circumcenter(&unit)?;
        let offset = hull_center.norm();
        if offset < LINEAR_DEPENDENCE_THRESHOLD {
            return Err(GeometryError::Degenerate(format!(
                "vertices are linearly dependent (affine hull at distance {offset:e} from the origin)"
            )));
        }
        Ok(Self {
            vertices: unit,
            hull_center,
            hull_radius,
        })
    }

    /// Normalizes each row first; used for user input and generators.
    pub fn from_directions(rows: &[Vector]) -> Result<Self> {
        let mut unit = Vec::with_capacity(rows.len());
        for r in rows {
            let n = r.norm();
            if !(n > 0.0) || !n.is_finite() {
                return Err(GeometryError::InvalidInput(
                    "zero or non-finite direction".into(),
                ));
            }
            unit.push(r / n);
        }
        Self::new(unit)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    /// The self-polar simplex `e_1, …, e_m`.
    pub fn identity(m: usize) -> Self {
        Self::new(
            (0..m)
                .map(|i| Vector::from_fn(m, |r, _| if r == i { 1.0 } else { 0.0 }))
                .collect(),
        )
        .expect("identity simplex is valid for m >= 3")
    }

    pub fn m(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Vertices as matrix columns.
    pub fn vertex_matrix(&self) -> Matrix {
        Matrix::from_columns(&self.vertices)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect()
    }
}

/// Cap of angular radius `α ∈ (0, π/2)` around a unit center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCap {
    pub center: Vector,
    pub angular_radius: f64,
    #[serde(skip)]
    cos_radius: f64,
    #[serde(skip)]
    sin_radius: f64,
}

impl SphericalCap {
    fn from_cos_sin(center: Vector, cos: f64, sin: f64) -> Self {
        let h = cos.hypot(sin);
        let (cos, sin) = (cos / h, sin / h);
        Self {
            center,
            angular_radius: sin.atan2(cos),
            cos_radius: cos,
            sin_radius: sin,
        }
    }

    pub fn cos_radius(&self) -> f64 {
        self.cos_radius
    }

    pub fn sin_radius(&self) -> f64 {
        self.sin_radius
    }

    pub fn tan_radius(&self) -> f64 {
        self.sin_radius / self.cos_radius
    }

    /// Same center, radius `π/2 − α`.
    pub fn complement(&self) -> Self {
        Self::from_cos_sin(self.center.clone(), self.sin_radius, self.cos_radius)
    }
}

/// Circumscribed cap: `u_i · t = cos α > 0` for every vertex.
pub fn circum_cap(s: &SphericalSimplex) -> Result<SphericalCap> {
    let offset = s.hull_center.norm();
    if offset >= FRAC_1_SQRT_2 {
        let center = &s.hull_center / offset;
        return Ok(SphericalCap::from_cos_sin(center, offset, s.hull_radius));
    }
    let m = s.m();
    let t = solve_linear(
        &s.vertex_matrix().transpose(),
        &Vector::from_element(m, 1.0),
    )
    .map_err(|e| GeometryError::Degenerate(format!("circumcenter solve failed: {e}")))?;
    let norm = t.norm();
    let cos = 1.0 / norm;
    let sin = ((1.0 - cos) * (1.0 + cos)).max(0.0).sqrt();
    Ok(SphericalCap::from_cos_sin(t / norm, cos, sin))
}

/// Polar simplex: normalized columns of `U⁻ᵀ`, so that `u_i · v_j = 0` for
/// `i ≠ j` and `u_i · v_i > 0`.
pub fn polar_simplex(s: &SphericalSimplex) -> Result<SphericalSimplex> {
    let inv_t = invert(&s.vertex_matrix())
        .map_err(|e| GeometryError::Degenerate(format!("vertex matrix not invertible: {e}")))?
        .transpose();
    let cols = inv_t
        .column_iter()
        .map(|c| {
            let c = c.into_owned();
            let n = c.norm();
            c / n
        })
        .collect();
    SphericalSimplex::new(cols)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityCheck {
    pub polar: bool,
    pub max_offdiag: f64,
    pub min_diag: f64,
}

/// Checks that `Uᵀ V` is diagonal with positive diagonal, up to
/// [`POLARITY_ATOL`].
pub fn verify_polarity(u: &SphericalSimplex, v: &SphericalSimplex) -> Result<PolarityCheck> {
    if u.m() != v.m() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.m(),
            actual: v.m(),
        });
    }
    let mut max_offdiag = 0.0_f64;
    let mut min_diag = f64::INFINITY;
    for (i, ui) in u.vertices().iter().enumerate() {
        for (j, vj) in v.vertices().iter().enumerate() {
            let dot = ui.dot(vj);
            if i == j {
                min_diag = min_diag.min(dot);
            } else {
                max_offdiag = max_offdiag.max(dot.abs());
            }
        }
    }
    Ok(PolarityCheck {
        polar: max_offdiag <= POLARITY_ATOL && min_diag > POLARITY_ATOL,
        max_offdiag,
        min_diag,
    })
}

/// Inscribed cap, read off the polar simplex: same center as its
/// circumscribed cap, complementary radius.
pub fn inscribed_cap(s: &SphericalSimplex) -> Result<SphericalCap> {
    Ok(circum_cap(&polar_simplex(s)?)?.complement())
}

/// A simplex together with a polar of it.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPair {
    u: SphericalSimplex,
    v: SphericalSimplex,
}

impl PolarPair {
    pub fn new(u: SphericalSimplex, v: SphericalSimplex) -> Result<Self> {
        let check = verify_polarity(&u, &v)?;
        if !check.polar {
            return Err(GeometryError::NotPolar {
                max_offdiag: check.max_offdiag,
                min_diag: check.min_diag,
            });
        }
        Ok(Self { u, v })
    }

    pub fn from_simplex(u: SphericalSimplex) -> Result<Self> {
        let v = polar_simplex(&u)?;
        Self::new(u, v)
    }

    pub fn u(&self) -> &SphericalSimplex {
        &self.u
    }

    pub fn v(&self) -> &SphericalSimplex {
        &self.v
    }

    pub fn m(&self) -> usize {
        self.u.m()
    }
}
