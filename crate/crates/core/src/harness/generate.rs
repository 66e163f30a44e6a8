use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{trial_rng, Generator, TrialConfig};
use crate::certificate::angle_lemma_margin;
use crate::error::{GeometryError, Result};
use crate::euclid::EuclideanSimplex;
use crate::kernel::{normalized_gram_det, Matrix, Vector};
use crate::spherical::{PolarPair, SphericalSimplex};

/// Attempts per trial before giving up.
pub const MAX_RETRIES: usize = 100;

/// Random spherical simplices must satisfy `β + γ − α − π/2` at least this
/// large. Below it the certificate margin loses most of its digits to
/// cancellation.
pub const MIN_ANGLE_LEMMA_MARGIN: f64 = 1e-6;

/// Gram-determinant window targeted by the near-degenerate generator, in
/// log10 units; kept inside `[1e-12, 1e-6]` with some headroom.
const FLAT_LOG10_RANGE: (f64, f64) = (-11.5, -6.5);

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// Haar-distributed orthogonal matrix.
fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let g = Matrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Scales the component of every vertex along `normal` by `factor`.
fn squash(vertices: &[Vector], normal: &Vector, factor: f64) -> Vec<Vector> {
    vertices
        .iter()
        .map(|v| v - normal * ((1.0 - factor) * normal.dot(v)))
        .collect()
}

fn flattened(rng: &mut ChaCha8Rng, dim: usize) -> Option<Vec<Vector>> {
    let vertices: Vec<Vector> = (0..=dim).map(|_| gaussian_vector(rng, dim)).collect();
    let normal = unit_vector(rng, dim);
    let (lo, hi) = FLAT_LOG10_RANGE;
    let target = 10f64.powf(rng.random_range(lo..hi));
    // the determinant scales like factor², so a few fixed-point steps suffice
    let mut factor = 1.0_f64;
    let mut current = vertices.clone();
    for _ in 0..8 {
        let g = normalized_gram_det(&current);
        if !(g > 0.0) {
            return None;
        }
        factor *= (target / g).sqrt();
        current = squash(&vertices, &normal, factor);
    }
    let g = normalized_gram_det(&current);
    (1e-12..=1e-6).contains(&g).then_some(current)
}

fn euclidean_candidate(cfg: &TrialConfig, rng: &mut ChaCha8Rng) -> Option<Vec<Vector>> {
    let dim = cfg.dim;
    match cfg.generator {
        Generator::Gaussian => Some((0..=dim).map(|_| gaussian_vector(rng, dim)).collect()),
        Generator::NearDegenerate => flattened(rng, dim),
        Generator::RegularPerturbed => {
            let q = random_orthogonal(rng, dim);
            Some(
                EuclideanSimplex::regular(dim)
                    .vertices()
                    .iter()
                    .map(|v| &q * v + gaussian_vector(rng, dim) * cfg.perturbation)
                    .collect(),
            )
        }
    }
}

/// Simplex number `index` of the configured family; regenerates on
/// degeneracy.
pub fn gen_euclidean(cfg: &TrialConfig, index: u64) -> Result<EuclideanSimplex> {
    cfg.validate_euclidean()?;
    let mut rng = trial_rng(cfg.seed, index);
    for _ in 0..MAX_RETRIES {
        if let Some(vertices) = euclidean_candidate(cfg, &mut rng) {
            if let Ok(s) = EuclideanSimplex::new(vertices) {
                return Ok(s);
            }
        }
    }
    Err(GeometryError::GenerationExhausted {
        attempts: MAX_RETRIES,
    })
}

fn spherical_candidate(cfg: &TrialConfig, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    let m = cfg.dim;
    match cfg.generator {
        Generator::Gaussian => (0..m).map(|_| gaussian_vector(rng, m)).collect(),
        Generator::NearDegenerate => {
            let pole = unit_vector(rng, m);
            let spread = 10f64.powf(rng.random_range(-4.0..-2.0));
            (0..m)
                .map(|_| &pole + gaussian_vector(rng, m) * spread)
                .collect()
        }
        Generator::RegularPerturbed => {
            let q = random_orthogonal(rng, m);
            q.column_iter()
                .map(|c| c.into_owned() + gaussian_vector(rng, m) * cfg.perturbation)
                .collect()
        }
    }
}

/// Spherical simplex number `index` of the configured family. Accepted
/// simplices have a valid polar and an angle-lemma margin of at least
/// [`MIN_ANGLE_LEMMA_MARGIN`].
pub fn gen_spherical(cfg: &TrialConfig, index: u64) -> Result<SphericalSimplex> {
    cfg.validate_spherical()?;
    let mut rng = trial_rng(cfg.seed, index);
    for _ in 0..MAX_RETRIES {
        let rows = spherical_candidate(cfg, &mut rng);
        let Ok(s) = SphericalSimplex::from_directions(&rows) else {
            continue;
        };
        let Ok(pair) = PolarPair::from_simplex(s.clone()) else {
            continue;
        };
        if matches!(angle_lemma_margin(&pair), Ok(l) if l >= MIN_ANGLE_LEMMA_MARGIN) {
            return Ok(s);
        }
    }
    Err(GeometryError::GenerationExhausted {
        attempts: MAX_RETRIES,
    })
}
