use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gen_euclidean, gen_spherical, Generator, TrialConfig};
use crate::certificate::run_certificate;
use crate::error::Result;
use crate::euclid::egan_report;
use crate::io::SimplexFile;
use crate::spherical::PolarPair;

/// Cap on the number of violating indices listed in a report.
const MAX_LISTED: usize = 16;

/// Nearest-rank quantiles of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub p01: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

impl Quantiles {
    /// Panics on an empty sample.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "quantiles of an empty sample");
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let at = |q: f64| v[((q * (v.len() - 1) as f64).round() as usize).min(v.len() - 1)];
        Self {
            min: v[0],
            p01: at(0.01),
            p10: at(0.10),
            p50: at(0.50),
            p90: at(0.90),
            max: v[v.len() - 1],
        }
    }
}

/// Outcome of a Euclidean falsification scan. Slacks are relative,
/// `slack / R²`, so simplices of different sizes are comparable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub dim: usize,
    pub generator: Generator,
    pub seed: u64,
    pub trials_run: usize,
    pub min_slack: f64,
    pub argmin_index: u64,
    pub argmin: SimplexFile,
    /// Trials with `slack < −rtol · R²`.
    pub violations: usize,
    pub violation_indices: Vec<u64>,
    pub near_degenerate: usize,
    pub quantiles: Quantiles,
    /// Wall-clock seconds; left out of artifacts so they stay reproducible.
    #[serde(skip)]
    pub elapsed: f64,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn falsify_scan(cfg: &TrialConfig) -> Result<ScanReport> {
    cfg.validate_euclidean()?;
    let start = Instant::now();
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let rep = egan_report(&gen_euclidean(cfg, i)?)?;
            Ok((rep.relative_slack, rep.near_degenerate))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut argmin_index = 0;
    let mut violation_indices = Vec::new();
    let mut violations = 0;
    for (i, &(rel, _)) in results.iter().enumerate() {
        if rel < results[argmin_index].0 {
            argmin_index = i;
        }
        if rel < -cfg.rtol {
            violations += 1;
            if violation_indices.len() < MAX_LISTED {
                violation_indices.push(i as u64);
            }
        }
    }
    let slacks: Vec<f64> = results.iter().map(|r| r.0).collect();
    let argmin = SimplexFile::from_euclidean(&gen_euclidean(cfg, argmin_index as u64)?);
    Ok(ScanReport {
        dim: cfg.dim,
        generator: cfg.generator,
        seed: cfg.seed,
        trials_run: results.len(),
        min_slack: slacks[argmin_index],
        argmin_index: argmin_index as u64,
        argmin,
        violations,
        violation_indices,
        near_degenerate: results.iter().filter(|r| r.1).count(),
        quantiles: Quantiles::of(&slacks),
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Outcome of running the certificate on random polar pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateScan {
    pub m: usize,
    pub generator: Generator,
    pub seed: u64,
    pub trials_run: usize,
    pub min_margin: f64,
    pub max_abs_margin: f64,
    pub argmin_index: u64,
    pub argmin: SimplexFile,
    /// Largest `|margin − Tr(JD)| / max(1, |margin|)`.
    pub max_margin_gap: f64,
    pub max_trace_residual: f64,
    /// Trials with `margin < −rtol`.
    pub violations: usize,
    /// Trials whose structural checks failed.
    pub failures: usize,
    pub first_failure: Option<String>,
    #[serde(skip)]
    pub elapsed: f64,
}

impl CertificateScan {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.failures == 0
    }
}

pub fn certificate_scan(cfg: &TrialConfig) -> Result<CertificateScan> {
    cfg.validate_spherical()?;
    let start = Instant::now();
    let results = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let pair = PolarPair::from_simplex(gen_spherical(cfg, i)?)?;
            Ok(run_certificate(&pair))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scan = CertificateScan {
        m: cfg.dim,
        generator: cfg.generator,
        seed: cfg.seed,
        trials_run: results.len(),
        min_margin: f64::INFINITY,
        max_abs_margin: 0.0,
        argmin_index: 0,
        argmin: SimplexFile::from_spherical(&gen_spherical(cfg, 0)?),
        max_margin_gap: 0.0,
        max_trace_residual: 0.0,
        violations: 0,
        failures: 0,
        first_failure: None,
        elapsed: 0.0,
    };
    for (i, res) in results.iter().enumerate() {
        match res {
            Ok(rep) => {
                if rep.margin < scan.min_margin {
                    scan.min_margin = rep.margin;
                    scan.argmin_index = i as u64;
                }
                scan.max_abs_margin = scan.max_abs_margin.max(rep.margin.abs());
                let gap = (rep.margin - rep.trace_jd).abs() / rep.margin.abs().max(1.0);
                scan.max_margin_gap = scan.max_margin_gap.max(gap);
                scan.max_trace_residual = scan.max_trace_residual.max(rep.trace_identity_residual);
                if rep.margin < -cfg.rtol {
                    scan.violations += 1;
                }
            }
            Err(e) => {
                scan.failures += 1;
                if scan.first_failure.is_none() {
                    scan.first_failure = Some(format!("trial {i}: {e}"));
                }
            }
        }
    }
    scan.argmin = SimplexFile::from_spherical(&gen_spherical(cfg, scan.argmin_index)?);
    scan.elapsed = start.elapsed().as_secs_f64();
    Ok(scan)
}
