//! Matrix certificate of the spherical inequality
//!
//! ```text
//! sqrt((bc − 1)² cos²α − (b + c)² sin²α) ≥ m − 2,   b = tan β, c = tan γ,
//! ```
//!
//! for a polar pair `U`, `V` on `S^{m−1}` with circumradii `β`, `γ` and
//! circumcenter distance `α`.
//!
//! [`run_certificate`] rebuilds every intermediate object of the argument:
//! the aligned basis, the matrices `A`, `B`, `C`, `J`, the Lorentz
//! decomposition `CAB = R_t D R_s`, the transformed simplices
//! `U' = D^{-1/2} R_{-s} B U` and `V' = D^{-1/2} R_{-t} C V`, and checks
//! the structural identities they must satisfy. The trace `Tr(JD)` it
//! returns equals `K − L − (m − 2)`, the margin of the inequality.
//!
//! The module also evaluates the Euclidean-style slack of a single
//! spherical simplex and the residual of the spherical Euler relation for
//! triangles.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::euclid::egan_slack;
use crate::kernel::{angle_between, tolerance, Matrix, Vector, RTOL};
use crate::lorentz::{hyperbolic_rotation, lorentz_svd, signature_matrix, LorentzFactors, Mat2};
use crate::spherical::{
    circum_cap, inscribed_cap, verify_polarity, PolarPair, SphericalCap, SphericalSimplex,
};

/// Relative tolerance of the structural checks, scaled by the magnitude of
/// the matrices involved.
pub const STRUCTURAL_RTOL: f64 = 1e-9;

/// Below this `sin α` the two circumcenters are treated as coincident.
const COINCIDENT_CENTERS: f64 = 1e-14;

/// Circumscribed caps of both members of a polar pair and the distance
/// between their centers.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGeometry {
    pub outer_u: SphericalCap,
    pub outer_v: SphericalCap,
    pub alpha: f64,
}

pub fn pair_geometry(p: &PolarPair) -> Result<PairGeometry> {
    let outer_u = circum_cap(p.u())?;
    let outer_v = circum_cap(p.v())?;
    let alpha = angle_between(&outer_u.center, &outer_v.center)?;
    Ok(PairGeometry {
        outer_u,
        outer_v,
        alpha,
    })
}

/// Orthonormal basis adapted to a polar pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    /// Basis vectors as columns; the first is the circumcenter of `U`.
    pub basis: Matrix,
    /// Vertices of `U` (columns) in the basis.
    pub u_mat: Matrix,
    /// Vertices of `V` (columns) in the rotated basis whose first vector is
    /// the circumcenter of `V`.
    pub v_mat: Matrix,
    /// Rotation by `α` in the first coordinate plane.
    pub rotation: Matrix,
    pub geometry: PairGeometry,
}

impl AlignedPair {
    pub fn alpha(&self) -> f64 {
        self.geometry.alpha
    }
}

/// Completes `first` (and optionally `second`) to an orthonormal basis with
/// Gram-Schmidt over the canonical vectors, starting at index `start`.
fn complete_basis(first: &Vector, second: Option<&Vector>, start: usize) -> Matrix {
    let m = first.len();
    let mut cols: Vec<Vector> = vec![first.clone()];
    cols.extend(second.cloned());
    for step in 0..m {
        if cols.len() == m {
            break;
        }
        let idx = (start + step) % m;
        let mut w = Vector::from_fn(m, |r, _| if r == idx { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dot(&w);
                w -= c * proj;
            }
        }
        let n = w.norm();
        if n > 1e-6 {
            cols.push(w / n);
        }
    }
    Matrix::from_columns(&cols)
}

fn givens(alpha: f64, m: usize) -> Matrix {
    let mut a = Matrix::identity(m, m);
    let (c, s) = (alpha.cos(), alpha.sin());
    a[(0, 0)] = c;
    a[(0, 1)] = s;
    a[(1, 0)] = -s;
    a[(1, 1)] = c;
    a
}

fn align_with_completion(p: &PolarPair, start: usize) -> Result<AlignedPair> {
    let geometry = pair_geometry(p)?;
    let e1 = geometry.outer_u.center.clone();
    let ov = &geometry.outer_v.center;
    let along = ov.dot(&e1);
    let mut across = ov - &e1 * along;
    // the difference cancels for small α; a second pass restores orthogonality
    let drift = across.dot(&e1);
    across -= &e1 * drift;
    let sin_alpha = across.norm();
    let (basis, alpha) = if sin_alpha > COINCIDENT_CENTERS {
        let e2 = &across / sin_alpha;
        (
            complete_basis(&e1, Some(&e2), start),
            sin_alpha.atan2(along),
        )
    } else {
        (complete_basis(&e1, None, start), 0.0)
    };
    let m = p.m();
    if basis.ncols() != m {
        return Err(GeometryError::Degenerate("basis completion failed".into()));
    }
    let rotation = givens(alpha, m);
    let u_mat = basis.transpose() * p.u().vertex_matrix();
    let v_mat = &rotation * basis.transpose() * p.v().vertex_matrix();
    Ok(AlignedPair {
        basis,
        u_mat,
        v_mat,
        rotation,
        geometry: PairGeometry { alpha, ..geometry },
    })
}

/// Basis with `e_1 = O_u` and `O_v = cos α e_1 + sin α e_2`.
///
/// With coincident centers (`α = 0`) `e_2` is an arbitrary completion.
pub fn align_pair(p: &PolarPair) -> Result<AlignedPair> {
    align_with_completion(p, 0)
}

/// Like [`align_pair`] but starts the basis completion at canonical vector
/// `start`; only the arbitrary part of the basis depends on it.
pub fn align_pair_with_completion(p: &PolarPair, start: usize) -> Result<AlignedPair> {
    align_with_completion(p, start)
}

/// Aligns two simplices that are expected to be polar.
pub fn align_simplices(u: &SphericalSimplex, v: &SphericalSimplex) -> Result<AlignedPair> {
    let check = verify_polarity(u, v)?;
    if !check.polar {
        return Err(GeometryError::Degenerate(format!(
            "simplices are not polar (max off-diagonal {:e}, min diagonal {:e})",
            check.max_offdiag, check.min_diag
        )));
    }
    align_pair(&PolarPair::new(u.clone(), v.clone())?)
}

/// Left-hand side minus right-hand side of the spherical inequality,
/// evaluated directly from `α`, `b = tan β`, `c = tan γ`.
pub fn direct_margin(alpha: f64, b: f64, c: f64, m: usize) -> Result<f64> {
    let p = (b * c - 1.0) * alpha.cos();
    let q = (b + c) * alpha.sin();
    let arg = (p - q) * (p + q);
    let scale = p * p + q * q;
    if arg < 0.0 {
        if arg < -tolerance(1e-12, scale) {
            return Err(GeometryError::Degenerate(format!(
                "negative radicand {arg:e} in the margin formula"
            )));
        }
        return Ok(-(m as f64 - 2.0));
    }
    Ok(arg.sqrt() - (m as f64 - 2.0))
}

/// Every intermediate quantity of one certificate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Left hyperbolic rotation parameter of `CAB`.
    pub t: f64,
    /// Right hyperbolic rotation parameter of `CAB`.
    pub s: f64,
    /// Direct evaluation of the inequality margin.
    pub margin: f64,
    /// `K − L − (m − 2)` from the decomposition.
    #[serde(rename = "trace_JD")]
    pub trace_jd: f64,
    #[serde(rename = "max_offdiag_UtV")]
    pub max_offdiag_utv: f64,
    #[serde(rename = "min_diag_UtV")]
    pub min_diag_utv: f64,
    #[serde(rename = "max_diag_JB2U")]
    pub max_diag_jb2u: f64,
    #[serde(rename = "max_diag_JC2V")]
    pub max_diag_jc2v: f64,
    pub semispace_ok: bool,
    pub angle_lemma_margin: f64,
    /// Residual of the trace expansion of `Tr(JD)`, relative to its scale.
    pub trace_identity_residual: f64,
}

impl CertificateReport {
    /// Whether the two margin evaluations agree within `rtol`.
    pub fn margins_agree(&self, rtol: f64) -> bool {
        (self.margin - self.trace_jd).abs() <= tolerance(rtol, self.margin.abs().max(1.0))
    }
}

fn diag_matrix(entries: &[f64], m: usize) -> Matrix {
    Matrix::from_fn(m, m, |r, c| {
        if r != c {
            0.0
        } else if r < entries.len() {
            entries[r]
        } else {
            1.0
        }
    })
}

/// Maximum |diagonal| of `Xᵀ M X` for diagonal `M`, and the matching scale
/// `Σ_k |M_kk| x_ki²`.
fn isotropy_defect(x: &Matrix, m_diag: &[f64]) -> (f64, f64) {
    let mut defect = 0.0_f64;
    let mut scale = 0.0_f64;
    for col in x.column_iter() {
        let mut val = 0.0;
        let mut mag = 0.0;
        for (k, &mk) in m_diag.iter().enumerate() {
            val += mk * col[k] * col[k];
            mag += mk.abs() * col[k] * col[k];
        }
        defect = defect.max(val.abs());
        scale = scale.max(mag);
    }
    (defect, scale)
}

/// Runs the full certificate for a polar pair.
pub fn run_certificate(p: &PolarPair) -> Result<CertificateReport> {
    certify_aligned(&align_pair(p)?)
}

/// Runs the certificate on an existing alignment.
pub fn certify_aligned(aligned: &AlignedPair) -> Result<CertificateReport> {
    let m = aligned.u_mat.ncols();
    let geo = &aligned.geometry;
    let (alpha, beta, gamma) = (
        geo.alpha,
        geo.outer_u.angular_radius,
        geo.outer_v.angular_radius,
    );
    let b = geo.outer_u.tan_radius();
    let c = geo.outer_v.tan_radius();

    let b_mat = diag_matrix(&[b], m);
    let c_mat = diag_matrix(&[c], m);
    let cab = &c_mat * &aligned.rotation * &b_mat;
    let factors: LorentzFactors = lorentz_svd(&Mat2::top_left(&cab)).map_err(|e| {
        GeometryError::Degenerate(format!("CAB corner has no Lorentz decomposition: {e}"))
    })?;
    let (k, l) = (factors.k, factors.l);

    let inv_sqrt_d = diag_matrix(&[1.0 / k.sqrt(), 1.0 / l.sqrt()], m);
    let u_prime = &inv_sqrt_d * hyperbolic_rotation(-factors.s, m) * &b_mat * &aligned.u_mat;
    let v_prime = &inv_sqrt_d * hyperbolic_rotation(-factors.t, m) * &c_mat * &aligned.v_mat;
    let jd = signature_matrix(m) * diag_matrix(&[k, l], m);
    let jd_diag: Vec<f64> = jd.diagonal().iter().copied().collect();

    // (i) U'ᵀ V' is diagonal with positive entries
    let utv = u_prime.transpose() * &v_prime;
    let mut max_offdiag_utv = 0.0_f64;
    let mut min_diag_utv = f64::INFINITY;
    for i in 0..m {
        for j in 0..m {
            if i == j {
                min_diag_utv = min_diag_utv.min(utv[(i, j)]);
            } else {
                max_offdiag_utv = max_offdiag_utv.max(utv[(i, j)].abs());
            }
        }
    }
    let col_u = u_prime.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let col_v = v_prime.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let utv_scale = (col_u * col_v).max(1.0);

    // (ii) U'ᵀ JD U' and V'ᵀ JD V' have zero diagonals
    let (max_diag_jb2u, u_iso_scale) = isotropy_defect(&u_prime, &jd_diag);
    let (max_diag_jc2v, v_iso_scale) = isotropy_defect(&v_prime, &jd_diag);

    // (iii) top rows of U', V' are positive
    let semispace_ok = (0..m).all(|i| u_prime[(0, i)] > 0.0 && v_prime[(0, i)] > 0.0);

    let trace_jd = jd_diag.iter().sum::<f64>();
    let margin = direct_margin(alpha, b, c, m)?;
    let identity = trace_identity_check(&u_prime, &v_prime, &Vector::from_vec(jd_diag.clone()))?;

    let mut failures = Vec::new();
    if max_offdiag_utv > STRUCTURAL_RTOL * utv_scale || !(min_diag_utv > 0.0) {
        failures.push(format!(
            "U'ᵀV' not diagonal positive (off {max_offdiag_utv:e}, min diag {min_diag_utv:e})"
        ));
    }
    if max_diag_jb2u > STRUCTURAL_RTOL * u_iso_scale.max(1.0) {
        failures.push(format!("U'ᵀJDU' diagonal {max_diag_jb2u:e}"));
    }
    if max_diag_jc2v > STRUCTURAL_RTOL * v_iso_scale.max(1.0) {
        failures.push(format!("V'ᵀJDV' diagonal {max_diag_jc2v:e}"));
    }
    if !semispace_ok {
        failures.push("top row of U' or V' not positive".into());
    }
    if !failures.is_empty() {
        return Err(GeometryError::CertificateViolation(failures.join("; ")));
    }

    Ok(CertificateReport {
        m,
        alpha,
        beta,
        gamma,
        b,
        c,
        k,
        l,
        t: factors.t,
        s: factors.s,
        margin,
        trace_jd,
        max_offdiag_utv,
        min_diag_utv,
        max_diag_jb2u,
        max_diag_jc2v,
        semispace_ok,
        angle_lemma_margin: beta + gamma - alpha - FRAC_PI_2,
        trace_identity_residual: identity.relative_residual,
    })
}

/// Outcome of [`trace_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceIdentity {
    pub trace: f64,
    /// `Σ M(u_i, v_i) / (u_i · v_i)`.
    pub expansion: f64,
    pub residual: f64,
    /// `residual / max(1, Σ |terms|, Σ |M_kk|)`.
    pub relative_residual: f64,
    /// All columns are `M`-isotropic, so each pairing must be nonnegative.
    pub isotropic: bool,
    pub min_pairing: f64,
}

/// Checks `Tr M = Σ_i M(u_i, v_i) / (u_i · v_i)` for column sets with
/// diagonal `UᵀV` and diagonal `M = diag(m_diag)`.
///
/// When every column is `M`-isotropic and `M` has signature `(+, −, …, −)`
/// with positive first coordinates, each pairing `M(u_i, v_i)` must be
/// nonnegative; a negative one is reported as a violation.
pub fn trace_identity_check(u: &Matrix, v: &Matrix, m_diag: &Vector) -> Result<TraceIdentity> {
    let n = m_diag.len();
    for mat in [u, v] {
        if mat.nrows() != n || mat.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                actual: mat.nrows().max(mat.ncols()),
            });
        }
    }
    let utv = u.transpose() * v;
    let mut max_offdiag = 0.0_f64;
    let mut min_diag = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                min_diag = min_diag.min(utv[(i, j)]);
            } else {
                max_offdiag = max_offdiag.max(utv[(i, j)].abs());
            }
        }
    }
    let col_u = u.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let col_v = v.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = (col_u * col_v).max(f64::MIN_POSITIVE);
    if max_offdiag > STRUCTURAL_RTOL * scale || !(min_diag > 0.0) {
        return Err(GeometryError::NotPolar {
            max_offdiag,
            min_diag,
        });
    }

    let pairing = |x: &Vector, y: &Vector| -> f64 { (0..n).map(|k| m_diag[k] * x[k] * y[k]).sum() };
    let mut expansion = 0.0;
    let mut magnitude = 0.0;
    let mut min_pairing = f64::INFINITY;
    let cols_u: Vec<Vector> = u.column_iter().map(|c| c.into_owned()).collect();
    let cols_v: Vec<Vector> = v.column_iter().map(|c| c.into_owned()).collect();
    for (ui, vi) in cols_u.iter().zip(&cols_v) {
        let pair = pairing(ui, vi);
        let term = pair / ui.dot(vi);
        expansion += term;
        magnitude += term.abs();
        min_pairing = min_pairing.min(pair);
    }
    let trace: f64 = m_diag.iter().sum();
    let m_mag: f64 = m_diag.iter().map(|x| x.abs()).sum();
    let residual = (trace - expansion).abs();
    let relative_residual = residual / magnitude.max(m_mag).max(1.0);

    let signature = m_diag[0] > 0.0 && m_diag.iter().skip(1).all(|&x| x < 0.0);
    let positive_top = (0..n).all(|i| u[(0, i)] > 0.0 && v[(0, i)] > 0.0);
    let m_abs: Vec<f64> = m_diag.iter().copied().collect();
    let (du, su) = isotropy_defect(u, &m_abs);
    let (dv, sv) = isotropy_defect(v, &m_abs);
    let isotropic = signature
        && positive_top
        && du <= STRUCTURAL_RTOL * su.max(1.0)
        && dv <= STRUCTURAL_RTOL * sv.max(1.0);
    if isotropic {
        let bound = STRUCTURAL_RTOL * (su * sv).sqrt().max(1.0);
        if min_pairing < -bound {
            return Err(GeometryError::CertificateViolation(format!(
                "negative pairing {min_pairing:e} between isotropic columns"
            )));
        }
    }
    Ok(TraceIdentity {
        trace,
        expansion,
        residual,
        relative_residual,
        isotropic,
        min_pairing,
    })
}

/// `β + γ − α − π/2`, positive for every polar pair.
pub fn angle_lemma_margin(p: &PolarPair) -> Result<f64> {
    let g = pair_geometry(p)?;
    Ok(g.outer_u.angular_radius + g.outer_v.angular_radius - g.alpha - FRAC_PI_2)
}

/// Terms of the spherical analogue of the Euclidean slack, with
/// `R = tan β`, `r = tan Γ`, `d = tan α` for circumradius `β`, inradius `Γ`
/// and center distance `α`, and `n = m − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalSlack {
    pub n: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub d: f64,
    pub slack: f64,
    /// The slack vanishes to tolerance.
    pub equality: bool,
}

pub fn spherical_slack_terms(s: &SphericalSimplex) -> Result<SphericalSlack> {
    let outer = circum_cap(s)?;
    let inner = inscribed_cap(s)?;
    let alpha = angle_between(&outer.center, &inner.center)?;
    let n = s.m() - 1;
    let (big_r, r, d) = (outer.tan_radius(), inner.tan_radius(), alpha.tan());
    let slack = egan_slack(n, big_r, r, d);
    Ok(SphericalSlack {
        n,
        big_r,
        r,
        d,
        slack,
        equality: slack.abs() <= tolerance(RTOL, big_r * big_r),
    })
}

/// `(R − n r)(R + (n − 2) r) − d²` for a spherical simplex with `n + 1`
/// vertices.
pub fn spherical_gd_slack(s: &SphericalSimplex) -> Result<f64> {
    Ok(spherical_slack_terms(s)?.slack)
}

/// `sin²(R − r) − sin²r cos²R − sin²d` for a spherical triangle, with the
/// angular circumradius `R`, inradius `r` and center distance `d`.
pub fn spherical_euler_residual(s: &SphericalSimplex) -> Result<f64> {
    if s.m() != 3 {
        return Err(GeometryError::DimensionMismatch {
            expected: 3,
            actual: s.m(),
        });
    }
    let outer = circum_cap(s)?;
    let inner = inscribed_cap(s)?;
    let d = angle_between(&outer.center, &inner.center)?;
    let (big_r, r) = (outer.angular_radius, inner.angular_radius);
    Ok((big_r - r).sin().powi(2) - r.sin().powi(2) * big_r.cos().powi(2) - d.sin().powi(2))
}
