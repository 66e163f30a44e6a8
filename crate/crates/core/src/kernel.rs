//! Dense linear-algebra primitives and simplex volume formulas.
//!
//! Vectors and matrices are `nalgebra` dynamic types; everything here is a
//! pure function of its inputs.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Default relative tolerance.
pub const RTOL: f64 = 1e-9;
/// Absolute fallback used when the relative scale is near zero.
pub const ATOL: f64 = 1e-12;
/// Edge-normalized Gram determinant below which a simplex is degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Edge-normalized Gram determinant below which a simplex is flagged as
/// near-degenerate (still accepted).
pub const NEAR_DEGENERACY_THRESHOLD: f64 = 1e-9;
/// Largest 1-norm condition number accepted by [`solve_linear`].
pub const MAX_CONDITION: f64 = 1e12;

/// `rtol * |scale|`, never below [`ATOL`].
pub fn tolerance(rtol: f64, scale: f64) -> f64 {
    (rtol * scale.abs()).max(ATOL)
}

fn norm1(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// 1-norm condition number `‖m‖₁‖m⁻¹‖₁`; infinite for singular input.
pub fn condition_number(m: &Matrix) -> f64 {
    if !m.is_square() || m.nrows() == 0 {
        return f64::INFINITY;
    }
    match m.clone().lu().try_inverse() {
        Some(inv) => {
            let c = norm1(m) * norm1(&inv);
            if c.is_finite() {
                c
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// Solves `m x = b` by LU with partial pivoting.
///
/// Fails with [`GeometryError::SingularMatrix`] when the condition estimate
/// exceeds [`MAX_CONDITION`].
pub fn solve_linear(m: &Matrix, b: &Vector) -> Result<Vector> {
    if !m.is_square() {
        return Err(GeometryError::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    if m.nrows() != b.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: m.nrows(),
            actual: b.len(),
        });
    }
    if m.nrows() == 0 {
        return Err(GeometryError::InvalidInput("empty linear system".into()));
    }
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or(GeometryError::SingularMatrix {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(m) * norm1(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(GeometryError::SingularMatrix { condition });
    }
    lu.solve(b)
        .ok_or(GeometryError::SingularMatrix { condition })
}

/// Inverse with the same condition guard as [`solve_linear`].
pub fn invert(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(GeometryError::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let inv = m
        .clone()
        .lu()
        .try_inverse()
        .ok_or(GeometryError::SingularMatrix {
            condition: f64::INFINITY,
        })?;
    let condition = norm1(m) * norm1(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(GeometryError::SingularMatrix { condition });
    }
    Ok(inv)
}

/// Columns `v_i - v_0`, `i = 1..=k`.
pub fn edge_matrix(vertices: &[Vector]) -> Matrix {
    let base = &vertices[0];
    let dim = base.len();
    let k = vertices.len() - 1;
    Matrix::from_fn(dim, k, |r, c| vertices[c + 1][r] - base[r])
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// k-dimensional volume of the simplex spanned by `k + 1` vertices,
/// `sqrt(det G) / k!` with `G` the Gram matrix of the edge vectors.
///
/// Affinely dependent input gives 0.
///
/// # Panics
///
/// If the vertex count is not `k + 1` or the ambient dimension is below `k`.
pub fn gram_volume(vertices: &[Vector], k: usize) -> f64 {
    assert_eq!(vertices.len(), k + 1, "gram_volume needs k + 1 vertices");
    if k == 0 {
        return 1.0;
    }
    assert!(
        vertices.iter().all(|v| v.len() >= k),
        "gram_volume needs ambient dimension >= k"
    );
    let edges = edge_matrix(vertices);
    let gram = edges.transpose() * &edges;
    gram.determinant().max(0.0).sqrt() / factorial(k)
}

/// `det(EᵀE) / Π‖e_i‖²` for the edge vectors `e_i = v_i - v_0`: 1 for an
/// orthogonal corner, 0 for affinely dependent vertices.
pub fn normalized_gram_det(vertices: &[Vector]) -> f64 {
    if vertices.len() < 2 {
        return 0.0;
    }
    let edges = edge_matrix(vertices);
    if edges.ncols() > edges.nrows() {
        return 0.0;
    }
    let lengths: f64 = edges.column_iter().map(|c| c.norm_squared()).product();
    if lengths == 0.0 {
        return 0.0;
    }
    let r = edges.qr().r();
    let det: f64 = r.diagonal().iter().map(|x| x * x).product();
    det / lengths
}

/// k-volume from squared pairwise distances via the Cayley-Menger
/// determinant.
pub fn cayley_menger_volume(sq_dists: &Matrix, k: usize) -> Result<f64> {
    let n = k + 1;
    if sq_dists.nrows() != n || sq_dists.ncols() != n {
        return Err(GeometryError::DimensionMismatch {
            expected: n,
            actual: sq_dists.nrows().max(sq_dists.ncols()),
        });
    }
    let scale = sq_dists.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let tol = tolerance(RTOL, scale);
    for i in 0..n {
        if sq_dists[(i, i)].abs() > tol {
            return Err(GeometryError::InvalidMetric(format!(
                "nonzero diagonal entry {} at {i}",
                sq_dists[(i, i)]
            )));
        }
        for j in 0..n {
            let x = sq_dists[(i, j)];
            if !x.is_finite() || x < -tol {
                return Err(GeometryError::InvalidMetric(format!(
                    "invalid squared distance {x} at ({i}, {j})"
                )));
            }
            if (x - sq_dists[(j, i)]).abs() > tol {
                return Err(GeometryError::InvalidMetric(format!(
                    "asymmetric entries at ({i}, {j})"
                )));
            }
        }
    }
    if k == 0 {
        return Ok(1.0);
    }
    let bordered = Matrix::from_fn(n + 1, n + 1, |r, c| match (r, c) {
        (0, 0) => 0.0,
        (0, _) | (_, 0) => 1.0,
        _ => sq_dists[(r - 1, c - 1)],
    });
    let sign = if (k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let denom = 2f64.powi(k as i32) * factorial(k).powi(2);
    let vol_sq = sign * bordered.determinant() / denom;
    let vol_scale = scale.powi(k as i32) / denom;
    if vol_sq < -RTOL * vol_scale {
        return Err(GeometryError::InvalidMetric(format!(
            "squared volume {vol_sq:e} is negative"
        )));
    }
    Ok(vol_sq.max(0.0).sqrt())
}

fn check_unit(v: &Vector) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > RTOL || !norm.is_finite() {
        return Err(GeometryError::NotUnit { norm });
    }
    Ok(())
}

/// Angle in `[0, π]` between two unit vectors.
///
/// Evaluated as `2·atan2(‖u − v‖, ‖u + v‖)`, which equals the arccosine of
/// the clamped dot product but keeps full relative accuracy for nearly
/// parallel and nearly antiparallel inputs.
pub fn angle_between(u: &Vector, v: &Vector) -> Result<f64> {
    if u.len() != v.len() {
        return Err(GeometryError::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    check_unit(u)?;
    check_unit(v)?;
    Ok(2.0 * (u - v).norm().atan2((u + v).norm()))
}

/// Center and radius of the sphere through `k + 1` points, taken inside
/// their affine hull (the ambient dimension may exceed `k`).
///
/// Uses a thin QR of the edge matrix so only the `k x k` triangular factor
/// is solved.
pub fn affine_circumcenter(vertices: &[Vector]) -> Result<(Vector, f64)> {
    if vertices.len() < 2 {
        return Err(GeometryError::InvalidInput(
            "circumcenter needs at least two points".into(),
        ));
    }
    let dim = vertices[0].len();
    if let Some(bad) = vertices.iter().find(|v| v.len() != dim) {
        return Err(GeometryError::DimensionMismatch {
            expected: dim,
            actual: bad.len(),
        });
    }
    let edges = edge_matrix(vertices);
    let k = edges.ncols();
    if k > dim {
        return Err(GeometryError::Degenerate(format!(
            "{} points cannot be affinely independent in dimension {dim}",
            k + 1
        )));
    }
    let half_sq = Vector::from_iterator(k, edges.column_iter().map(|c| 0.5 * c.norm_squared()));
    let lengths: f64 = edges.column_iter().map(|c| c.norm_squared()).product();
    let qr = edges.qr();
    let r = qr.r();
    let gram_det: f64 = r.diagonal().iter().map(|x| x * x).product();
    if lengths == 0.0 || gram_det / lengths < DEGENERACY_THRESHOLD {
        return Err(GeometryError::Degenerate(format!(
            "normalized Gram determinant {:e}",
            if lengths == 0.0 {
                0.0
            } else {
                gram_det / lengths
            }
        )));
    }
    let z = solve_linear(&r.transpose(), &half_sq)?;
    let offset = qr.q() * z;
    let radius = offset.norm();
    Ok((&vertices[0] + offset, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn regular_tetrahedron() -> Vec<Vector> {
        let s = 1.0 / (2.0 * 2f64.sqrt());
        vec![
            v(&[s, s, s]),
            v(&[s, -s, -s]),
            v(&[-s, s, -s]),
            v(&[-s, -s, s]),
        ]
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let x = solve_linear(&Matrix::identity(3, 3), &v(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(x, v(&[1.0, 2.0, 3.0]));
        let m = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = solve_linear(&m, &v(&[2.0, 4.0])).unwrap();
        assert_relative_eq!(x, v(&[1.0, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn solve_rank_deficient_is_singular() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            solve_linear(&m, &v(&[1.0, 2.0])),
            Err(GeometryError::SingularMatrix { .. })
        ));
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 + 1e-15]);
        assert!(matches!(
            solve_linear(&m, &v(&[1.0, 2.0])),
            Err(GeometryError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn solve_shape_errors() {
        let m = Matrix::identity(3, 3);
        assert!(matches!(
            solve_linear(&m, &v(&[1.0, 2.0])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gram_volume_examples() {
        let tri = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert_relative_eq!(gram_volume(&tri, 2), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            gram_volume(&regular_tetrahedron(), 3),
            0.117_851_130_197_757_9,
            epsilon = 1e-12
        );
        let line = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 0.0])];
        assert_eq!(gram_volume(&line, 2), 0.0);
    }

    #[test]
    fn gram_volume_of_facet_in_higher_dimension() {
        let facet = [
            v(&[0.0, 0.0, 5.0]),
            v(&[3.0, 0.0, 5.0]),
            v(&[0.0, 4.0, 5.0]),
        ];
        assert_relative_eq!(gram_volume(&facet, 2), 6.0, epsilon = 1e-14);
    }

    #[test]
    fn cayley_menger_examples() {
        let sq = Matrix::from_row_slice(3, 3, &[0.0, 9.0, 25.0, 9.0, 0.0, 16.0, 25.0, 16.0, 0.0]);
        assert_relative_eq!(cayley_menger_volume(&sq, 2).unwrap(), 6.0, epsilon = 1e-12);

        let tet = regular_tetrahedron();
        let sq = Matrix::from_fn(4, 4, |i, j| (&tet[i] - &tet[j]).norm_squared());
        assert_relative_eq!(
            cayley_menger_volume(&sq, 3).unwrap(),
            1.0 / (6.0 * 2f64.sqrt()),
            epsilon = 1e-12
        );

        let bad = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 9.0, 1.0, 9.0, 0.0]);
        assert!(matches!(
            cayley_menger_volume(&bad, 2),
            Err(GeometryError::InvalidMetric(_))
        ));
    }

    #[test]
    fn cayley_menger_rejects_malformed_grids() {
        let asym = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 2.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(cayley_menger_volume(&asym, 2).is_err());
        let diag = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert!(cayley_menger_volume(&diag, 1).is_err());
        assert!(cayley_menger_volume(&Matrix::zeros(3, 3), 3).is_err());
    }

    #[test]
    fn angle_examples() {
        let e1 = v(&[1.0, 0.0, 0.0]);
        let e2 = v(&[0.0, 1.0, 0.0]);
        let d = v(&[1.0, 1.0, 1.0]) / 3f64.sqrt();
        assert_eq!(angle_between(&e1, &e1).unwrap(), 0.0);
        assert_relative_eq!(
            angle_between(&e1, &e2).unwrap(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            angle_between(&e1, &d).unwrap(),
            0.955_316_618_124_509_3,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            angle_between(&e1, &(-&e1)).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn angle_rejects_non_unit() {
        let e1 = v(&[1.0, 0.0]);
        assert!(matches!(
            angle_between(&e1, &v(&[2.0, 0.0])),
            Err(GeometryError::NotUnit { .. })
        ));
        assert!(matches!(
            angle_between(&e1, &v(&[1.0, 0.0, 0.0])),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn angle_of_nearly_parallel_vectors_keeps_precision() {
        let theta = 1e-9_f64;
        let a = v(&[1.0, 0.0]);
        let b = v(&[theta.cos(), theta.sin()]);
        assert_relative_eq!(angle_between(&a, &b).unwrap(), theta, max_relative = 1e-7);
    }

    #[test]
    fn affine_circumcenter_of_right_triangle_in_space() {
        let pts = [
            v(&[0.0, 0.0, 1.0]),
            v(&[3.0, 0.0, 1.0]),
            v(&[0.0, 4.0, 1.0]),
        ];
        let (c, r) = affine_circumcenter(&pts).unwrap();
        assert_relative_eq!(c, v(&[1.5, 2.0, 1.0]), epsilon = 1e-14);
        assert_relative_eq!(r, 2.5, epsilon = 1e-14);
    }

    #[test]
    fn affine_circumcenter_rejects_collinear() {
        let pts = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 0.0])];
        assert!(matches!(
            affine_circumcenter(&pts),
            Err(GeometryError::Degenerate(_))
        ));
    }

    #[test]
    fn normalized_gram_det_bounds() {
        let corner = [v(&[0.0, 0.0]), v(&[2.0, 0.0]), v(&[0.0, 5.0])];
        assert_relative_eq!(normalized_gram_det(&corner), 1.0, epsilon = 1e-15);
        let flat = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[2.0, 1e-7])];
        assert!(normalized_gram_det(&flat) < 1e-13);
    }
}
