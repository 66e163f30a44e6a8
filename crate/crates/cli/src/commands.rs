use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use egan_core::certificate::{run_certificate, spherical_euler_residual, spherical_slack_terms};
use egan_core::embedding::{convergence_table, default_heights};
use egan_core::euclid::{egan_report, EuclideanSimplex};
use egan_core::harness::{
    certificate_scan, extremal_batch, falsify_scan, gen_spherical, TrialConfig,
};
use egan_core::io::{convergence_csv_string, read_simplex, to_json, SimplexFile};
use egan_core::spherical::{PolarPair, SphericalSimplex};
use serde::Serialize;

use crate::{Cli, Command, Common, Geometry, Verdict};

fn verdict(pass: bool) -> Verdict {
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn emit<T: Serialize>(common: &Common, value: &T) -> Result<()> {
    let text = to_json(value)?;
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn input_file(common: &Common) -> Result<SimplexFile> {
    let Some(path) = &common.input else {
        bail!("--input is required");
    };
    Ok(read_simplex(path)?)
}

fn euclidean_input(common: &Common) -> Result<EuclideanSimplex> {
    Ok(input_file(common)?.euclidean()?)
}

fn spherical_input(common: &Common) -> Result<SphericalSimplex> {
    Ok(input_file(common)?.spherical()?)
}

fn config(common: &Common, default_dim: usize) -> TrialConfig {
    TrialConfig::new(
        common.dim.unwrap_or(default_dim),
        common.trials,
        common.seed,
    )
    .with_rtol(common.rtol)
}

pub fn run(cli: &Cli) -> Result<Verdict> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify { geometry } => verify(common, *geometry),
        Command::Certificate { random, generator } => certificate(
            common,
            *random,
            config(common, 3).with_generator((*generator).into()),
        ),
        Command::Falsify {
            generator,
            perturbation,
        } => {
            let cfg = config(common, 3)
                .with_generator((*generator).into())
                .with_perturbation(*perturbation);
            let report = falsify_scan(&cfg)?;
            emit(common, &report)?;
            Ok(verdict(report.passed()))
        }
        Command::Extremal {
            iterations,
            generator,
        } => {
            let cfg = config(common, 3).with_generator((*generator).into());
            let runs = extremal_batch(&cfg, *iterations)?;
            emit(common, &runs)?;
            Ok(verdict(runs.iter().all(|r| r.best_slack >= -common.rtol)))
        }
        Command::Converge { heights } => converge(common, heights.as_deref()),
        Command::EulerResidual { random } => euler_residual(common, *random),
    }
}

fn verify(common: &Common, geometry: Geometry) -> Result<Verdict> {
    match geometry {
        Geometry::Euclid => {
            let report = egan_report(&euclidean_input(common)?)?;
            emit(common, &report)?;
            Ok(verdict(report.relative_slack >= -common.rtol))
        }
        Geometry::Spherical => {
            let terms = spherical_slack_terms(&spherical_input(common)?)?;
            emit(common, &terms)?;
            Ok(verdict(
                terms.slack >= -common.rtol * terms.big_r * terms.big_r,
            ))
        }
    }
}

fn certificate(common: &Common, random: bool, cfg: TrialConfig) -> Result<Verdict> {
    if random && cfg.trials > 1 {
        let scan = certificate_scan(&cfg)?;
        emit(common, &scan)?;
        return Ok(verdict(
            scan.passed() && scan.max_margin_gap <= cfg.rtol && scan.max_trace_residual <= cfg.rtol,
        ));
    }
    let simplex = if random {
        gen_spherical(&cfg, 0)?
    } else {
        spherical_input(common)?
    };
    let report = run_certificate(&PolarPair::from_simplex(simplex)?)?;
    emit(common, &report)?;
    Ok(verdict(
        report.margin >= -cfg.rtol
            && report.margins_agree(cfg.rtol)
            && report.trace_identity_residual <= cfg.rtol,
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn converge(common: &Common, heights: Option<&[f64]>) -> Result<Verdict> {
    let s = euclidean_input(common)?;
    let heights = match heights {
        Some(h) => h.to_vec(),
        None => default_heights(&s)?,
    };
    let table = convergence_table(&s, &heights)?;
    let csv = convergence_csv_string(&table)?;
    if let Some(path) = &common.csv {
        write_text(path, &csv)?;
    }
    if common.out.is_some() || common.csv.is_none() {
        if common.out.is_some() {
            emit(common, &table)?;
        } else {
            print!("{csv}");
        }
    }
    let inequality_holds = table.rows.iter().all(|r| r.spherical_slack >= -common.rtol);
    Ok(verdict(inequality_holds && table.slack_error_decreasing()))
}

#[derive(Serialize)]
struct EulerSummary {
    trials: usize,
    max_abs_residual: f64,
    argmax_index: u64,
    residuals: Vec<f64>,
}

fn euler_residual(common: &Common, random: bool) -> Result<Verdict> {
    let residuals: Vec<f64> = if random {
        let cfg = config(common, 3);
        if cfg.dim != 3 {
            bail!("the Euler relation applies to spherical triangles (--dim 3)");
        }
        (0..cfg.trials as u64)
            .map(|i| Ok(spherical_euler_residual(&gen_spherical(&cfg, i)?)?))
            .collect::<Result<_>>()?
    } else {
        vec![spherical_euler_residual(&spherical_input(common)?)?]
    };
    let (argmax, max) = residuals
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |acc, (i, r)| {
            if r.abs() > acc.1 {
                (i, r.abs())
            } else {
                acc
            }
        });
    let summary = EulerSummary {
        trials: residuals.len(),
        max_abs_residual: max,
        argmax_index: argmax as u64,
        residuals: if residuals.len() <= 100 {
            residuals
        } else {
            Vec::new()
        },
    };
    emit(common, &summary)?;
    Ok(verdict(max <= common.rtol))
}
