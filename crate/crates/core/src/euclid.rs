//! Euclidean simplices, their circumscribed and inscribed spheres, and the
//! slack `(R − n r)(R + (n − 2) r) − d²`.

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::kernel::{
    affine_circumcenter, gram_volume, normalized_gram_det, Vector, DEGENERACY_THRESHOLD,
    NEAR_DEGENERACY_THRESHOLD,
};

/// `d + 1` affinely independent vertices in `R^d`, `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSimplex {
    vertices: Vec<Vector>,
    gram_det: f64,
}

impl EuclideanSimplex {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(GeometryError::InvalidInput(format!(
                "a Euclidean simplex needs dimension >= 2 (got {} vertices)",
                vertices.len()
            )));
        }
        let dim = vertices.len() - 1;
        for v in &vertices {
            if v.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    expected: dim,
                    actual: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::InvalidInput("non-finite coordinate".into()));
            }
        }
        let gram_det = normalized_gram_det(&vertices);
        if !(gram_det >= DEGENERACY_THRESHOLD) {
            return Err(GeometryError::Degenerate(format!(
                "normalized Gram determinant {gram_det:e}"
            )));
        }
        Ok(Self { vertices, gram_det })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    /// Regular simplex with unit edges, centered at the origin.
    pub fn regular(dim: usize) -> Self {
        assert!(dim >= 2, "regular simplex needs dim >= 2");
        let d = dim as f64;
        let c = (1.0 - (d + 1.0).sqrt()) / d;
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        let mut vertices: Vec<Vector> = (0..dim)
            .map(|i| Vector::from_fn(dim, |r, _| if r == i { scale } else { 0.0 }))
            .collect();
        vertices.push(Vector::from_element(dim, c * scale));
        let centroid = vertices.iter().fold(Vector::zeros(dim), |a, v| a + v) / (d + 1.0);
        let vertices = vertices.into_iter().map(|v| v - &centroid).collect();
        Self::new(vertices).expect("regular simplex is nondegenerate")
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.vertices
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect()
    }

    /// Edge-normalized Gram determinant of the vertex set.
    pub fn gram_det(&self) -> f64 {
        self.gram_det
    }

    pub fn is_near_degenerate(&self) -> bool {
        self.gram_det < NEAR_DEGENERACY_THRESHOLD
    }

    pub fn volume(&self) -> f64 {
        gram_volume(&self.vertices, self.dim())
    }

    /// Vertices of the facet opposite vertex `i`.
    pub fn facet(&self, i: usize) -> Vec<Vector> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// (d−1)-volumes of the facets, indexed by opposite vertex.
    pub fn facet_volumes(&self) -> Vec<f64> {
        let k = self.dim() - 1;
        (0..=self.dim())
            .map(|i| gram_volume(&self.facet(i), k))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    pub center: Vector,
    pub radius: f64,
}

/// Circumscribed sphere, solved inside the affine hull of the vertices.
pub fn circumsphere(s: &EuclideanSimplex) -> Result<Sphere> {
    let (center, radius) = affine_circumcenter(s.vertices())?;
    Ok(Sphere { center, radius })
}

/// Inscribed sphere from the facet-volume barycentric formula
/// `I = Σ V_i u_i / Σ V_i`, `r = n Vol_n / Σ V_i`.
pub fn insphere(s: &EuclideanSimplex) -> Result<Sphere> {
    let n = s.dim();
    let facets = s.facet_volumes();
    let total: f64 = facets.iter().sum();
    let volume = s.volume();
    if !(total > 0.0) || !(volume > 0.0) {
        return Err(GeometryError::Degenerate(format!(
            "volume {volume:e}, facet area sum {total:e}"
        )));
    }
    let center = s
        .vertices()
        .iter()
        .zip(&facets)
        .fold(Vector::zeros(n), |acc, (v, w)| acc + v * *w)
        / total;
    Ok(Sphere {
        center,
        radius: n as f64 * volume / total,
    })
}

/// `(R − n r)(R + (n − 2) r) − d²`.
pub fn egan_slack(n: usize, big_r: f64, r: f64, d: f64) -> f64 {
    let n = n as f64;
    (big_r - n * r) * (big_r + (n - 2.0) * r) - d * d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EganReport {
    pub dim: usize,
    #[serde(rename = "R")]
    pub circumradius: f64,
    #[serde(rename = "r")]
    pub inradius: f64,
    pub d_centers: f64,
    pub slack: f64,
    /// `slack / R²`; invariant under similarity transforms.
    pub relative_slack: f64,
    pub near_degenerate: bool,
}

pub fn egan_report(s: &EuclideanSimplex) -> Result<EganReport> {
    let outer = circumsphere(s)?;
    let inner = insphere(s)?;
    let d_centers = (&outer.center - &inner.center).norm();
    let slack = egan_slack(s.dim(), outer.radius, inner.radius, d_centers);
    Ok(EganReport {
        dim: s.dim(),
        circumradius: outer.radius,
        inradius: inner.radius,
        d_centers,
        slack,
        relative_slack: slack / (outer.radius * outer.radius),
        near_degenerate: s.is_near_degenerate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn simplex(rows: &[&[f64]]) -> EuclideanSimplex {
        EuclideanSimplex::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn right_triangle() -> EuclideanSimplex {
        simplex(&[&[0.0, 0.0], &[3.0, 0.0], &[0.0, 4.0]])
    }

    #[test]
    fn circumsphere_examples() {
        let s = circumsphere(&right_triangle()).unwrap();
        assert_relative_eq!(
            s.center,
            Vector::from_column_slice(&[1.5, 2.0]),
            epsilon = 1e-14
        );
        assert_relative_eq!(s.radius, 2.5, epsilon = 1e-14);

        let eq = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]);
        let s = circumsphere(&eq).unwrap();
        assert_relative_eq!(s.center[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.center[1], 0.288_675_134_594_812_9, epsilon = 1e-14);
        assert_relative_eq!(s.radius, 0.577_350_269_189_625_8, epsilon = 1e-14);

        let s = circumsphere(&EuclideanSimplex::regular(3)).unwrap();
        assert_relative_eq!(s.radius, 6f64.sqrt() / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn insphere_examples() {
        let s = insphere(&right_triangle()).unwrap();
        assert_relative_eq!(
            s.center,
            Vector::from_column_slice(&[1.0, 1.0]),
            epsilon = 1e-14
        );
        assert_relative_eq!(s.radius, 1.0, epsilon = 1e-14);

        let eq = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 3f64.sqrt() / 2.0]]);
        assert_relative_eq!(
            insphere(&eq).unwrap().radius,
            3f64.sqrt() / 6.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            insphere(&EuclideanSimplex::regular(3)).unwrap().radius,
            6f64.sqrt() / 12.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn egan_report_of_right_triangle() {
        let rep = egan_report(&right_triangle()).unwrap();
        assert_relative_eq!(rep.circumradius, 2.5, epsilon = 1e-12);
        assert_relative_eq!(rep.inradius, 1.0, epsilon = 1e-12);
        assert_relative_eq!(rep.d_centers * rep.d_centers, 1.25, epsilon = 1e-12);
        assert!(rep.slack.abs() < 1e-12);
        assert!(!rep.near_degenerate);
    }

    #[test]
    fn regular_tetrahedron_is_an_equality_case() {
        let rep = egan_report(&EuclideanSimplex::regular(3)).unwrap();
        assert_relative_eq!(rep.circumradius, 3.0 * rep.inradius, epsilon = 1e-14);
        assert!(rep.d_centers < 1e-14);
        assert!(rep.slack.abs() < 1e-14);
    }

    #[test]
    fn regular_simplex_has_unit_edges() {
        for d in 2..=9 {
            let s = EuclideanSimplex::regular(d);
            for i in 0..=d {
                for j in 0..i {
                    let e = (&s.vertices()[i] - &s.vertices()[j]).norm();
                    assert_relative_eq!(e, 1.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let collinear =
            EuclideanSimplex::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
        assert!(matches!(collinear, Err(GeometryError::Degenerate(_))));
        let segment = EuclideanSimplex::from_rows(&[vec![0.0], vec![1.0]]);
        assert!(matches!(segment, Err(GeometryError::InvalidInput(_))));
        let ragged = EuclideanSimplex::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0]]);
        assert!(matches!(
            ragged,
            Err(GeometryError::DimensionMismatch { .. })
        ));
        let nan =
            EuclideanSimplex::from_rows(&[vec![0.0, 0.0], vec![1.0, f64::NAN], vec![0.0, 1.0]]);
        assert!(nan.is_err());
    }

    #[test]
    fn near_degenerate_simplices_are_flagged() {
        let s = simplex(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, 1e-5]]);
        assert!(s.is_near_degenerate());
        assert!(egan_report(&s).unwrap().near_degenerate);
    }
}
