//! Lifting a Euclidean simplex onto a large sphere.
//!
//! A simplex in `R^n` with circumcenter `O` and circumradius `R` is placed in
//! the hyperplane at depth `−H` below the origin of `R^{n+1}`, centered at
//! `O`, so every lifted vertex `(u_i − O, −H)` has norm `√(H² + R²)`. The
//! normalized vertices form a spherical simplex whose radii shrink like
//! `1/H`; rescaled by `√(H² + R²)` its tangent radii converge to the
//! Euclidean `R`, `r`, `d` with error `O(1/H²)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::euclid::{circumsphere, egan_report, egan_slack, insphere, EuclideanSimplex};
use crate::kernel::{angle_between, tolerance, Vector, RTOL};
use crate::spherical::{circum_cap, inscribed_cap, SphericalSimplex};

/// Heights above this multiple of `R` are rejected.
pub const MAX_HEIGHT_RATIO: f64 = 1e6;

/// Default height schedule, in units of the circumradius.
pub const DEFAULT_HEIGHT_FACTORS: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

fn check_height(h: f64, big_r: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(GeometryError::NonPositiveHeight(h));
    }
    let limit = MAX_HEIGHT_RATIO * big_r;
    if h > limit {
        return Err(GeometryError::HeightOutOfRange { height: h, limit });
    }
    Ok(())
}

/// Normalized lifted vertices `(u_i − O, −H) / √(H² + R²)`.
pub fn embed_on_sphere(s: &EuclideanSimplex, h: f64) -> Result<SphericalSimplex> {
    let outer = circumsphere(s)?;
    check_height(h, outer.radius)?;
    lift(s, &outer.center, h)
}

fn lift(s: &EuclideanSimplex, center: &Vector, h: f64) -> Result<SphericalSimplex> {
    let n = s.dim();
    let lifted: Vec<Vector> = s
        .vertices()
        .iter()
        .map(|u| {
            let mut w = Vector::zeros(n + 1);
            w.rows_mut(0, n).copy_from(&(u - center));
            w[n] = -h;
            w
        })
        .collect();
    SphericalSimplex::from_directions(&lifted)
}

/// Spherical quantities of the lifted simplex at one height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRow {
    #[serde(rename = "H")]
    pub h: f64,
    /// Angular circumradius.
    #[serde(rename = "beta_H")]
    pub beta_h: f64,
    /// Angular inradius.
    #[serde(rename = "Gamma_H")]
    pub gamma_h: f64,
    /// Angle between the spherical circumcenter and incenter.
    #[serde(rename = "alpha_H")]
    pub alpha_h: f64,
    #[serde(rename = "scaled_R")]
    pub scaled_big_r: f64,
    pub scaled_r: f64,
    pub scaled_d: f64,
    /// `(R_H − n r_H)(R_H + (n − 2) r_H) − d_H²` with tangent radii.
    pub spherical_slack: f64,
    /// `spherical_slack · (H² + R²)`, comparable with the Euclidean slack.
    pub scaled_slack: f64,
    /// `√(H² + R²) − H`, the gap between the sphere and the hyperplane at
    /// the circumcenter.
    pub center_offset: f64,
    /// Chord `|O_H I_H|` on the sphere of radius `√(H² + R²)`.
    pub center_chord: f64,
    /// Distance from the incenter, radially projected onto the hyperplane,
    /// to the Euclidean incenter.
    pub incenter_offset: f64,
}

/// `√(H² + R²) − H` without cancellation.
fn sphere_gap(h: f64, big_r: f64) -> f64 {
    big_r * big_r / (h.hypot(big_r) + h)
}

pub fn embedding_metrics(s: &EuclideanSimplex, h: f64) -> Result<EmbeddingRow> {
    let outer = circumsphere(s)?;
    let inner = insphere(s)?;
    check_height(h, outer.radius)?;
    row_at(
        s,
        &outer.center,
        outer.radius,
        &(&inner.center - &outer.center),
        h,
    )
}

fn row_at(
    s: &EuclideanSimplex,
    center: &Vector,
    big_r: f64,
    incenter_rel: &Vector,
    h: f64,
) -> Result<EmbeddingRow> {
    let n = s.dim();
    let sph = lift(s, center, h)?;
    let outer = circum_cap(&sph)?;
    let inner = inscribed_cap(&sph)?;
    let alpha = angle_between(&outer.center, &inner.center)?;
    let radius = h.hypot(big_r);
    let (rh, rrh, dh) = (outer.tan_radius(), inner.tan_radius(), alpha.tan());
    let spherical_slack = egan_slack(n, rh, rrh, dh);

    let c = &inner.center;
    if !(c[n] < 0.0) {
        return Err(GeometryError::Degenerate(
            "spherical incenter does not face the hyperplane".into(),
        ));
    }
    let projected = c.rows(0, n) * (-h / c[n]);
    let incenter_offset = (projected - incenter_rel).norm();

    Ok(EmbeddingRow {
        h,
        beta_h: outer.angular_radius,
        gamma_h: inner.angular_radius,
        alpha_h: alpha,
        scaled_big_r: rh * radius,
        scaled_r: rrh * radius,
        scaled_d: dh * radius,
        spherical_slack,
        scaled_slack: spherical_slack * radius * radius,
        center_offset: sphere_gap(h, big_r),
        center_chord: 2.0 * radius * (0.5 * alpha).sin(),
        incenter_offset,
    })
}

/// Euclidean values the rows converge to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanLimits {
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub d: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<EmbeddingRow>,
    pub limits: EuclideanLimits,
    /// `|scaled_slack − slack|` per row.
    pub slack_errors: Vec<f64>,
    /// `|scaled_R − R|` per row.
    pub radius_errors: Vec<f64>,
}

impl ConvergenceTable {
    /// Ratios of consecutive slack errors.
    pub fn slack_error_ratios(&self) -> Vec<f64> {
        self.slack_errors.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Whether the slack error decreases strictly along the rows.
    pub fn slack_error_decreasing(&self) -> bool {
        self.slack_errors.windows(2).all(|w| w[1] < w[0])
    }

    /// Whether `|scaled_R − R|` decreases strictly along the rows.
    pub fn radius_error_decreasing(&self) -> bool {
        self.radius_errors.windows(2).all(|w| w[1] < w[0])
    }
}

/// Heights `factor · R` for the default schedule.
pub fn default_heights(s: &EuclideanSimplex) -> Result<Vec<f64>> {
    let big_r = circumsphere(s)?.radius;
    Ok(DEFAULT_HEIGHT_FACTORS.iter().map(|f| f * big_r).collect())
}

/// Rows for every height, computed in parallel and kept in height order.
///
/// Each row must satisfy `d_H √(H² + R²) ≥ |O_H I_H|`; a failure is
/// reported as a degenerate configuration.
pub fn convergence_table(s: &EuclideanSimplex, heights: &[f64]) -> Result<ConvergenceTable> {
    if heights.len() < 2 {
        return Err(GeometryError::InvalidInput(
            "a convergence table needs at least two heights".into(),
        ));
    }
    if heights.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(GeometryError::InvalidInput(
            "heights must be strictly increasing".into(),
        ));
    }
    let outer = circumsphere(s)?;
    let inner = insphere(s)?;
    for &h in heights {
        check_height(h, outer.radius)?;
    }
    let report = egan_report(s)?;
    let incenter_rel = &inner.center - &outer.center;
    let rows = heights
        .par_iter()
        .map(|&h| row_at(s, &outer.center, outer.radius, &incenter_rel, h))
        .collect::<Result<Vec<_>>>()?;
    for row in &rows {
        if row.scaled_d < row.center_chord - tolerance(RTOL, row.center_chord) {
            return Err(GeometryError::Degenerate(format!(
                "scaled center distance {:e} below chord {:e} at H = {:e}",
                row.scaled_d, row.center_chord, row.h
            )));
        }
    }
    let limits = EuclideanLimits {
        big_r: report.circumradius,
        r: report.inradius,
        d: report.d_centers,
        slack: report.slack,
    };
    let slack_errors = rows
        .iter()
        .map(|r| (r.scaled_slack - limits.slack).abs())
        .collect();
    let radius_errors = rows
        .iter()
        .map(|r| (r.scaled_big_r - limits.big_r).abs())
        .collect();
    Ok(ConvergenceTable {
        rows,
        limits,
        slack_errors,
        radius_errors,
    })
}
