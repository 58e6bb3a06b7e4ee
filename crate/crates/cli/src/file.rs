//! JSON problem documents. Complex numbers are `[re, im]` pairs and matrices
//! are lists of rows.

use polydist_core::{CMatrix, Complex64, MatrixPolynomial, TargetSet, WeightSet};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Pair = [f64; 2];
pub type MatrixRows = Vec<Vec<Pair>>;

/// A problem instance; also the shape of the perturbed-polynomial document,
/// which adds the `perturbation` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    pub m: usize,
    /// `A_0, ..., A_m`.
    pub coefficients: Vec<MatrixRows>,
    pub targets: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub gamma: f64,
    /// `"gamma"` or `"gamma0"`.
    pub branch: String,
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_rho: Option<f64>,
    pub degenerate_svd: bool,
    /// `Delta_0, ..., Delta_m`.
    pub delta: Vec<MatrixRows>,
    pub residuals: Vec<f64>,
}

/// The validated contents of a [`ProblemFile`].
#[derive(Debug, Clone)]
pub struct Parsed {
    pub p: MatrixPolynomial,
    pub targets: TargetSet,
    /// `None` when the file leaves the weights to the caller.
    pub weights: Option<WeightSet>,
    pub gamma_range: Option<(f64, f64)>,
    pub strategy: Option<String>,
}

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn matrix_rows(a: &CMatrix) -> MatrixRows {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| to_pair(a[(i, j)])).collect()).collect()
}

fn matrix_from_rows(rows: &MatrixRows, n: usize, field: &str) -> Result<CMatrix, CliError> {
    if rows.len() != n {
        return Err(CliError::parse(format!("{field}: expected {n} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(CliError::parse(format!("{field}[{i}]: expected {n} entries, found {}", row.len())));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| from_pair(&rows[i][j])))
}

pub fn parse_str(text: &str) -> Result<ProblemFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(format!("problem file: {e}")))
}

pub fn to_json(file: &ProblemFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("problem files always serialize");
    s.push('\n');
    s
}

/// Coefficients of the polynomial without the nonsingular-leading requirement.
pub fn coefficients(file: &ProblemFile) -> Result<Vec<CMatrix>, CliError> {
    if file.n == 0 {
        return Err(CliError::parse("n: must be at least 1"));
    }
    if file.coefficients.len() != file.m + 1 {
        return Err(CliError::parse(format!(
            "coefficients: expected m + 1 = {} matrices, found {}",
            file.m + 1,
            file.coefficients.len()
        )));
    }
    file.coefficients
        .iter()
        .enumerate()
        .map(|(j, rows)| matrix_from_rows(rows, file.n, &format!("coefficients[{j}]")))
        .collect()
}

pub fn targets(list: &[Pair]) -> Result<TargetSet, CliError> {
    TargetSet::new(list.iter().map(from_pair).collect()).map_err(|e| CliError::parse(format!("targets: {e}")))
}

pub fn validate(file: &ProblemFile) -> Result<Parsed, CliError> {
    let coeffs = coefficients(file)?;
    let p = MatrixPolynomial::new(coeffs).map_err(|e| CliError::parse(format!("coefficients: {e}")))?;
    let targets = targets(&file.targets)?;
    if targets.len() > file.n {
        return Err(CliError::parse(format!("targets: k = {} exceeds n = {}", targets.len(), file.n)));
    }
    let weights = match &file.weights {
        None => None,
        Some(w) => {
            if w.len() != file.m + 1 {
                return Err(CliError::parse(format!("weights: expected m + 1 = {} values, found {}", file.m + 1, w.len())));
            }
            Some(WeightSet::new(w.clone()).map_err(|e| CliError::parse(format!("weights: {e}")))?)
        }
    };
    let gamma_range = match file.gamma_range {
        None => None,
        Some([lo, hi]) => {
            if !(lo >= 0.0 && hi > lo) {
                return Err(CliError::parse(format!("gamma_range: need 0 <= lo < hi, found [{lo}, {hi}]")));
            }
            Some((lo, hi))
        }
    };
    if let Some(s) = &file.strategy {
        s.parse::<polydist_core::Strategy>().map_err(|e| CliError::parse(format!("strategy: {e}")))?;
    }
    Ok(Parsed { p, targets, weights, gamma_range, strategy: file.strategy.clone() })
}

/// Inverse of [`validate`] for a problem without a perturbation section.
pub fn from_problem(p: &MatrixPolynomial, targets: &TargetSet, weights: Option<&WeightSet>) -> ProblemFile {
    ProblemFile {
        n: p.dim(),
        m: p.degree(),
        coefficients: p.coeffs().iter().map(matrix_rows).collect(),
        targets: targets.as_slice().iter().map(|&z| to_pair(z)).collect(),
        weights: weights.map(|w| w.as_slice().to_vec()),
        gamma_range: None,
        strategy: None,
        perturbation: None,
    }
}
