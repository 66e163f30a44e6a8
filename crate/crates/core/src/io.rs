//! JSON and CSV artifacts.
//!
//! Simplices use one schema for both geometries,
//! `{"kind": "euclidean" | "spherical", "dim": n, "vertices": [[...], ...]}`,
//! one row per vertex. `dim` is the length of each vertex row: `n` for a
//! Euclidean `n`-simplex (`n + 1` rows) and `m` for a spherical simplex of
//! `m` unit vectors in `R^m`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::ConvergenceTable;
use crate::error::{GeometryError, Result};
use crate::euclid::EuclideanSimplex;
use crate::spherical::SphericalSimplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimplexKind {
    Euclidean,
    Spherical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexFile {
    pub kind: SimplexKind,
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedSimplex {
    Euclidean(EuclideanSimplex),
    Spherical(SphericalSimplex),
}

impl SimplexFile {
    pub fn from_euclidean(s: &EuclideanSimplex) -> Self {
        Self {
            kind: SimplexKind::Euclidean,
            dim: s.dim(),
            vertices: s.to_rows(),
        }
    }

    pub fn from_spherical(s: &SphericalSimplex) -> Self {
        Self {
            kind: SimplexKind::Spherical,
            dim: s.m(),
            vertices: s.to_rows(),
        }
    }

    fn check_rows(&self, expected_rows: usize) -> Result<()> {
        if self.vertices.len() != expected_rows {
            return Err(GeometryError::InvalidInput(format!(
                "dim {} needs {} vertices, found {}",
                self.dim,
                expected_rows,
                self.vertices.len()
            )));
        }
        if let Some(row) = self.vertices.iter().find(|r| r.len() != self.dim) {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                actual: row.len(),
            });
        }
        Ok(())
    }

    pub fn into_simplex(&self) -> Result<LoadedSimplex> {
        match self.kind {
            SimplexKind::Euclidean => {
                self.check_rows(self.dim + 1)?;
                EuclideanSimplex::from_rows(&self.vertices).map(LoadedSimplex::Euclidean)
            }
            SimplexKind::Spherical => {
                self.check_rows(self.dim)?;
                let rows: Vec<_> = self
                    .vertices
                    .iter()
                    .map(|r| crate::kernel::Vector::from_column_slice(r))
                    .collect();
                SphericalSimplex::from_directions(&rows).map(LoadedSimplex::Spherical)
            }
        }
    }

    pub fn euclidean(&self) -> Result<EuclideanSimplex> {
        match self.into_simplex()? {
            LoadedSimplex::Euclidean(s) => Ok(s),
            LoadedSimplex::Spherical(_) => Err(GeometryError::InvalidInput(
                "expected a euclidean simplex".into(),
            )),
        }
    }

    pub fn spherical(&self) -> Result<SphericalSimplex> {
        match self.into_simplex()? {
            LoadedSimplex::Spherical(s) => Ok(s),
            LoadedSimplex::Euclidean(_) => Err(GeometryError::InvalidInput(
                "expected a spherical simplex".into(),
            )),
        }
    }
}

pub fn parse_simplex(json: &str) -> Result<SimplexFile> {
    serde_json::from_str(json).map_err(|e| GeometryError::InvalidInput(e.to_string()))
}

pub fn read_simplex(path: &Path) -> Result<SimplexFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| GeometryError::Io(format!("{}: {e}", path.display())))?;
    parse_simplex(&text)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| GeometryError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)
        .map_err(|e| GeometryError::Io(format!("{}: {e}", path.display())))
}

/// Header of the convergence CSV.
pub const CONVERGENCE_COLUMNS: [&str; 10] = [
    "H",
    "beta_H",
    "Gamma_H",
    "alpha_H",
    "scaled_R",
    "scaled_r",
    "scaled_d",
    "spherical_slack",
    "euclid_slack",
    "scaled_slack",
];

/// 17 significant digits, so every value round-trips exactly.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_convergence_csv<W: Write>(table: &ConvergenceTable, out: W) -> Result<()> {
    let io_err = |e: csv::Error| GeometryError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CONVERGENCE_COLUMNS).map_err(io_err)?;
    for row in &table.rows {
        let fields = [
            row.h,
            row.beta_h,
            row.gamma_h,
            row.alpha_h,
            row.scaled_big_r,
            row.scaled_r,
            row.scaled_d,
            row.spherical_slack,
            table.limits.slack,
            row.scaled_slack,
        ];
        w.write_record(fields.iter().map(|&x| fmt17(x)))
            .map_err(io_err)?;
    }
    w.flush().map_err(|e| GeometryError::Io(e.to_string()))
}

pub fn convergence_csv_string(table: &ConvergenceTable) -> Result<String> {
    let mut buf = Vec::new();
    write_convergence_csv(table, &mut buf)?;
    String::from_utf8(buf).map_err(|e| GeometryError::Io(e.to_string()))
}
