use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_euclidean, TrialConfig};
use crate::error::Result;
use crate::euclid::{circumsphere, egan_report, EuclideanSimplex};
use crate::io::SimplexFile;
use crate::kernel::{Vector, NEAR_DEGENERACY_THRESHOLD};

/// Result of one minimization of the relative slack `slack / R²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalRun {
    pub start_index: Option<u64>,
    pub start: SimplexFile,
    pub best: SimplexFile,
    pub best_slack: f64,
    /// Best value after each iteration; nonincreasing.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub restarts: usize,
}

fn flatten(s: &EuclideanSimplex) -> Vec<f64> {
    s.vertices()
        .iter()
        .flat_map(|v| v.iter().copied())
        .collect()
}

fn unflatten(x: &[f64], dim: usize) -> Vec<Vector> {
    x.chunks(dim).map(Vector::from_column_slice).collect()
}

/// Relative slack, or `+∞` near degeneracy.
fn objective(x: &[f64], dim: usize) -> f64 {
    let Ok(s) = EuclideanSimplex::new(unflatten(x, dim)) else {
        return f64::INFINITY;
    };
    if s.gram_det() < NEAR_DEGENERACY_THRESHOLD {
        return f64::INFINITY;
    }
    egan_report(&s).map_or(f64::INFINITY, |r| r.relative_slack)
}

struct NelderMead {
    dim: usize,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    evaluations: usize,
}

impl NelderMead {
    fn new(dim: usize, center: &[f64], step: f64) -> Self {
        let mut nm = Self {
            dim,
            points: Vec::new(),
            values: Vec::new(),
            evaluations: 0,
        };
        nm.reset(center, step);
        nm
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        objective(x, self.dim)
    }

    fn reset(&mut self, center: &[f64], step: f64) {
        let mut points = vec![center.to_vec()];
        for i in 0..center.len() {
            let mut p = center.to_vec();
            p[i] += step;
            points.push(p);
        }
        self.values = points.iter().map(|p| self.eval(p)).collect();
        self.points = points;
        self.sort();
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        self.points = idx.iter().map(|&i| self.points[i].clone()).collect();
        self.values = idx.iter().map(|&i| self.values[i]).collect();
    }

    fn diameter(&self) -> f64 {
        let best = &self.points[0];
        self.points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(best)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// One iteration with dimension-adapted coefficients.
    fn step(&mut self) {
        let n = self.points.len() - 1;
        let nf = n as f64;
        let (reflect, expand) = (1.0, 1.0 + 2.0 / nf);
        let (contract, shrink) = (0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
        let mut centroid = vec![0.0; n];
        for p in &self.points[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let worst = self.points[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(reflect);
        let fr = self.eval(&xr);
        if fr < self.values[0] {
            let xe = along(reflect * expand);
            let fe = self.eval(&xe);
            if fe < fr {
                self.replace_worst(xe, fe);
            } else {
                self.replace_worst(xr, fr);
            }
        } else if fr < self.values[n - 1] {
            self.replace_worst(xr, fr);
        } else {
            let (xc, fc) = if fr < self.values[n] {
                let x = along(reflect * contract);
                let f = self.eval(&x);
                (x, f)
            } else {
                let x = along(-contract);
                let f = self.eval(&x);
                (x, f)
            };
            if fc < fr.min(self.values[n]) {
                self.replace_worst(xc, fc);
            } else {
                let best = self.points[0].clone();
                for i in 1..=n {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&self.points[i])
                        .map(|(b, x)| b + shrink * (x - b))
                        .collect();
                    self.values[i] = self.eval(&p);
                    self.points[i] = p;
                }
            }
        }
        self.sort();
    }

    fn replace_worst(&mut self, x: Vec<f64>, f: f64) {
        let n = self.points.len() - 1;
        self.points[n] = x;
        self.values[n] = f;
    }
}

/// Minimizes the relative slack over vertex coordinates from `start`,
/// restarting around the incumbent whenever the working simplex collapses.
pub fn extremal_search_from(start: &EuclideanSimplex, iterations: usize) -> Result<ExtremalRun> {
    let dim = start.dim();
    let scale = circumsphere(start)?.radius;
    let x0 = flatten(start);
    let mut nm = NelderMead::new(dim, &x0, 0.1 * scale);
    let mut trace = Vec::with_capacity(iterations);
    let mut restarts = 0;
    for _ in 0..iterations {
        nm.step();
        if nm.diameter() < 1e-9 * scale {
            let best = nm.points[0].clone();
            nm.reset(&best, 1e-2 * scale);
            restarts += 1;
        }
        trace.push(nm.values[0]);
    }
    let best = EuclideanSimplex::new(unflatten(&nm.points[0], dim))?;
    Ok(ExtremalRun {
        start_index: None,
        start: SimplexFile::from_euclidean(start),
        best: SimplexFile::from_euclidean(&best),
        best_slack: nm.values[0],
        trace,
        evaluations: nm.evaluations,
        restarts,
    })
}

/// Search from generated simplex number 0 of `cfg`.
pub fn extremal_search(cfg: &TrialConfig, iterations: usize) -> Result<ExtremalRun> {
    let mut run = extremal_search_from(&gen_euclidean(cfg, 0)?, iterations)?;
    run.start_index = Some(0);
    Ok(run)
}

/// One search per trial index, run in parallel and returned in index order.
pub fn extremal_batch(cfg: &TrialConfig, iterations: usize) -> Result<Vec<ExtremalRun>> {
    cfg.validate_euclidean()?;
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut run = extremal_search_from(&gen_euclidean(cfg, i)?, iterations)?;
            run.start_index = Some(i);
            Ok(run)
        })
        .collect()
}
