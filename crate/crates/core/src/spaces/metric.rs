//! Validation of explicit distance matrices and the dense finite metric type
//! shared by the extremal-function and Vietoris-Rips code.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute slack allowed on the metric axioms.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// One failed metric axiom.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricViolation {
    NonFinite {
        i: usize,
        j: usize,
    },
    NonzeroDiagonal {
        i: usize,
        value: f64,
    },
    Negative {
        i: usize,
        j: usize,
        value: f64,
    },
    Asymmetry {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },
    /// `d(i, k) > d(i, via) + d(via, k)`.
    Triangle {
        i: usize,
        k: usize,
        via: usize,
        excess: f64,
    },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MetricViolation::NonFinite { i, j } => write!(f, "non-finite entry at ({i},{j})"),
            MetricViolation::NonzeroDiagonal { i, value } => {
                write!(f, "nonzero diagonal at ({i},{i}): {value}")
            }
            MetricViolation::Negative { i, j, value } => {
                write!(f, "negative entry at ({i},{j}): {value}")
            }
            MetricViolation::Asymmetry { i, j, dij, dji } => {
                write!(f, "asymmetry at ({i},{j}): {dij} != {dji}")
            }
            MetricViolation::Triangle { i, k, via, excess } => {
                write!(f, "triangle ({i},{k}) via {via} exceeded by {excess}")
            }
        }
    }
}

/// Outcome of [`validate_metric`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<MetricViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks symmetry, zero diagonal, nonnegativity and every triangle
/// inequality of a square matrix, each within [`METRIC_TOLERANCE`].
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<ValidationReport> {
    let n = matrix.len();
    for (row, entries) in matrix.iter().enumerate() {
        if entries.len() != n {
            return Err(Error::NonSquareInput {
                row,
                found: entries.len(),
                expected: n,
            });
        }
    }
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = matrix[i][j];
            if !v.is_finite() {
                violations.push(MetricViolation::NonFinite { i, j });
            } else if i == j && v.abs() > METRIC_TOLERANCE {
                violations.push(MetricViolation::NonzeroDiagonal { i, value: v });
            } else if v < -METRIC_TOLERANCE {
                violations.push(MetricViolation::Negative { i, j, value: v });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (dij, dji) = (matrix[i][j], matrix[j][i]);
            if (dij - dji).abs() > METRIC_TOLERANCE {
                violations.push(MetricViolation::Asymmetry { i, j, dij, dji });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for via in 0..n {
                if via == i || via == k {
                    continue;
                }
                let excess = matrix[i][k] - (matrix[i][via] + matrix[via][k]);
                if excess > METRIC_TOLERANCE {
                    violations.push(MetricViolation::Triangle { i, k, via, excess });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// Dense symmetric distance matrix over `n` labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetric {
    n: usize,
    data: Vec<f64>,
}

impl FiniteMetric {
    /// Builds a metric after [`validate_metric`] succeeds.
    pub fn new(matrix: &[Vec<f64>]) -> Result<Self> {
        let report = validate_metric(matrix)?;
        if !report.is_ok() {
            return Err(Error::InvalidMetric(report.violations));
        }
        let n = matrix.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                // symmetrize within the accepted slack
                data[i * n + j] = if i == j {
                    0.0
                } else {
                    0.5 * (matrix[i][j] + matrix[j][i])
                };
            }
        }
        Ok(FiniteMetric { n, data })
    }

    /// Builds a matrix from a distance closure without validation. The
    /// closure must already be a metric.
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        FiniteMetric { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}
