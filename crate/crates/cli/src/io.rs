//! Input files: point lists (CSV), oval configurations, polynomials (JSON).

use std::path::Path;

use smoothrig::geometry::{validate_configuration_with, ConfigurationFile, OvalConfiguration, ValidationOptions};
use smoothrig::poly::MultiPoly;

use crate::manifest::RunManifest;
use crate::CliError;

pub fn read_bytes(path: &Path, manifest: &mut RunManifest) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    Ok(bytes)
}

/// Rows of numbers, one point per row. A first row that does not parse is
/// taken as a header.
pub fn parse_points(path: &Path, bytes: &[u8]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(bytes);
    let mut points = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let parsed: Result<Vec<f64>, (usize, String)> = rec
            .iter()
            .enumerate()
            .map(|(col, s)| s.parse::<f64>().map_err(|_| (col, s.to_string())))
            .collect();
        match parsed {
            Ok(p) if p.iter().all(|v| v.is_finite()) => points.push(p),
            Ok(_) => {
                return Err(CliError::Input(format!(
                    "{}: row {} has a non-finite coordinate",
                    path.display(),
                    row + 1
                )))
            }
            Err(_) if row == 0 => continue,
            Err((col, s)) => {
                return Err(CliError::Input(format!(
                    "{}: row {}, column {}: {s:?} is not a number",
                    path.display(),
                    row + 1,
                    col + 1
                )))
            }
        }
    }
    if points.is_empty() {
        return Err(CliError::Input(format!("{}: no points", path.display())));
    }
    let n = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != n) {
        return Err(CliError::Input(format!(
            "{}: row {} has {} coordinates, expected {n}",
            path.display(),
            i + 1,
            points[i].len()
        )));
    }
    Ok(points)
}

pub fn read_points(path: &Path, manifest: &mut RunManifest) -> Result<Vec<Vec<f64>>, CliError> {
    let bytes = read_bytes(path, manifest)?;
    parse_points(path, &bytes)
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

pub fn parse_config(path: &Path, bytes: &[u8], relaxed: bool) -> Result<OvalConfiguration, CliError> {
    let file: ConfigurationFile = serde_json::from_slice(bytes).map_err(|e| json_error(path, e))?;
    let opts = ValidationOptions {
        require_unit_ball: !relaxed,
    };
    validate_configuration_with(file.ovals, opts)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn read_config(path: &Path, relaxed: bool, manifest: &mut RunManifest) -> Result<OvalConfiguration, CliError> {
    let bytes = read_bytes(path, manifest)?;
    parse_config(path, &bytes, relaxed)
}

pub fn read_poly(path: &Path, manifest: &mut RunManifest) -> Result<MultiPoly, CliError> {
    let bytes = read_bytes(path, manifest)?;
    serde_json::from_slice(&bytes).map_err(|e| json_error(path, e))
}

/// Comma separated reals.
pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Input(format!("{what}: {t:?} is not a number")))
        })
        .collect()
}
