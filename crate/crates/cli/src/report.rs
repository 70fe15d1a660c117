//! Drift reports, run manifests and the CSV number format.

use std::path::Path;

use hbvm::HamiltonianSystem;
use serde::Serialize;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(fmt_num)
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses one CSV row of numbers (whitespace around fields is ignored).
pub fn parse_row(line: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    line.split(',').map(|f| f.trim().parse::<f64>()).collect()
}

/// Per-step error of one invariant along a trajectory,
/// `r_n = |I(y_n) − I(y_0)| / |I(y_0)|`, or the absolute error when `I(y_0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    pub name: String,
    pub errors: Vec<f64>,
    pub max: f64,
    pub last: f64,
    /// Set when `I(y_0) = 0` and `errors` are absolute.
    pub absolute: bool,
}

impl DriftReport {
    /// `None` when the system does not know the invariant.
    pub fn compute<S: HamiltonianSystem<f64> + ?Sized>(
        sys: &S,
        name: &str,
        states: &[Vec<f64>],
    ) -> Option<Self> {
        let first = sys.invariant(name, states.first()?)?;
        let absolute = first == 0.0;
        let scale = if absolute { 1.0 } else { first.abs() };
        let errors: Vec<f64> = states
            .iter()
            .map(|y| {
                let v = sys.invariant(name, y).unwrap_or(f64::NAN);
                (v - first).abs() / scale
            })
            .collect();
        let max = errors.iter().copied().fold(0.0, f64::max);
        let last = *errors.last().unwrap_or(&0.0);
        Some(Self {
            name: name.to_string(),
            errors,
            max,
            last,
            absolute,
        })
    }

    pub fn column_name(&self) -> String {
        if self.absolute {
            format!("{}_abs_err", self.name)
        } else {
            format!("{}_rel_err", self.name)
        }
    }
}

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub problem: String,
    pub s: usize,
    pub k: usize,
    pub h: f64,
    pub steps: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub y0: Vec<f64>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    pub determinism: &'static str,
}

pub const DETERMINISM_NOTE: &str =
    "no random input; identical arguments reproduce byte-identical outputs";

impl RunManifest {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }
}
