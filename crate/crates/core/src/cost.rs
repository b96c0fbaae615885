//! Edge costs between observations.
//!
//! Three families are provided, all scaled so that they converge as the
//! dimension grows: the normalized `γ`-norm ([`gamma_cost`]), the
//! difference of row sums ([`average_cost`]) and the Euclidean cost augmented
//! by successive-difference norms ([`diff_augmented_cost`]), which reacts to
//! covariance changes as well as mean shifts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// `N` observations by `d` features, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl DataMatrix {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if n_rows < 2 {
            return Err(Error::Data(format!("need at least 2 observations, got {n_rows}")));
        }
        if n_cols < 1 {
            return Err(Error::Data("need at least 1 feature".into()));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value at row {}, column {}",
                pos / n_cols,
                pos % n_cols
            )));
        }
        Ok(Self { values, n_rows, n_cols })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(Error::Shape(format!(
                "row {bad} has {} columns, expected {n_cols}",
                rows[bad].len()
            )));
        }
        Self::new(n_rows, n_cols, rows.into_iter().flatten().collect())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.n_cols..(t + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-feature z-scaling. Constant features are centred and left at zero.
    pub fn standardized(&self) -> Self {
        let n = self.n_rows as f64;
        let mut out = self.values.clone();
        for q in 0..self.n_cols {
            let mean = self.rows().map(|r| r[q]).sum::<f64>() / n;
            let var = self.rows().map(|r| (r[q] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sd = var.sqrt();
            for t in 0..self.n_rows {
                let v = &mut out[t * self.n_cols + q];
                *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
            }
        }
        Self { values: out, n_rows: self.n_rows, n_cols: self.n_cols }
    }
}

/// Symmetric `N x N` matrix of edge costs with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    costs: Vec<f64>,
    n: usize,
}

impl CostMatrix {
    /// Wraps a raw row-major grid. Only the shape and finiteness are checked;
    /// the regularity conditions are reported by [`validate_assumptions`].
    pub fn from_raw(n: usize, costs: Vec<f64>) -> Result<Self> {
        if costs.len() != n * n {
            return Err(Error::Shape(format!("{} entries for a {n}x{n} cost matrix", costs.len())));
        }
        if costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("cost matrix contains non-finite entries".into()));
        }
        Ok(Self { costs, n })
    }

    /// Builds a cost matrix by evaluating `f(t1, t2)` once per unordered pair
    /// `t1 < t2` and mirroring, so the result is exactly symmetric.
    pub fn from_pair_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect())
            .collect();
        let mut costs = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, c) in row.into_iter().enumerate() {
                let j = i + 1 + off;
                costs[i * n + j] = c;
                costs[j * n + i] = c;
            }
        }
        Self { costs, n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.costs
    }
}

/// Selector for the cost family used by the pipeline and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Gamma(f64),
    Average,
    DiffAugmented,
}

impl CostKind {
    pub fn compute(&self, data: &DataMatrix) -> Result<CostMatrix> {
        match *self {
            CostKind::Gamma(g) => gamma_cost(data, g),
            CostKind::Average => average_cost(data),
            CostKind::DiffAugmented => diff_augmented_cost(data),
        }
    }
}

impl std::str::FromStr for CostKind {
    type Err = Error;

    /// Accepts `gamma:G`, `average` and `diff` (or `diff-augmented`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(g) = s.strip_prefix("gamma:") {
            let g: f64 = g
                .parse()
                .map_err(|_| Error::Parameter(format!("cannot parse gamma value {g:?}")))?;
            check_gamma(g)?;
            return Ok(CostKind::Gamma(g));
        }
        match s {
            "average" | "avg" => Ok(CostKind::Average),
            "diff" | "diff-augmented" | "diff_augmented" => Ok(CostKind::DiffAugmented),
            other => param(format!("unknown cost {other:?}; expected gamma:G, average or diff")),
        }
    }
}

impl std::fmt::Display for CostKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostKind::Gamma(g) => write!(f, "gamma:{g}"),
            CostKind::Average => f.write_str("average"),
            CostKind::DiffAugmented => f.write_str("diff"),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 2.0) {
        return param(format!("gamma must lie in (0, 2], got {gamma}"));
    }
    Ok(())
}

/// `d^(-1/γ) · ||X_t1 − X_t2||_γ` for `0 < γ ≤ 2`.
pub fn gamma_cost(data: &DataMatrix, gamma: f64) -> Result<CostMatrix> {
    check_gamma(gamma)?;
    let d = data.n_cols() as f64;
    let scale = d.powf(-1.0 / gamma);
    let cost = |i: usize, j: usize| -> f64 {
        let (a, b) = (data.row(i), data.row(j));
        let norm = if gamma == 2.0 {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        } else if gamma == 1.0 {
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
        } else {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs().powf(gamma))
                .sum::<f64>()
                .powf(1.0 / gamma)
        };
        scale * norm
    };
    Ok(CostMatrix::from_pair_fn(data.n_rows(), cost))
}

/// `d^(-1) · |X_t1• − X_t2•|` where `X_t•` is the row sum.
pub fn average_cost(data: &DataMatrix) -> Result<CostMatrix> {
    let d = data.n_cols() as f64;
    let sums: Vec<f64> = data.rows().map(|r| r.iter().sum()).collect();
    Ok(CostMatrix::from_pair_fn(data.n_rows(), |i, j| (sums[i] - sums[j]).abs() / d))
}

/// `d^(-1/2) · sqrt(||X_t1 − X_t2||² + ||Ẋ_t1||² + ||Ẋ_t2||²)` where `Ẋ_t` holds
/// successive feature differences.
pub fn diff_augmented_cost(data: &DataMatrix) -> Result<CostMatrix> {
    if data.n_cols() < 2 {
        return param("the difference-augmented cost needs at least 2 features");
    }
    let d = data.n_cols() as f64;
    let diff_sq: Vec<f64> = data
        .rows()
        .map(|r| r.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum())
        .collect();
    let cost = |i: usize, j: usize| -> f64 {
        let sq: f64 = data.row(i).iter().zip(data.row(j)).map(|(x, y)| (x - y) * (x - y)).sum();
        ((sq + diff_sq[i] + diff_sq[j]) / d).sqrt()
    };
    Ok(CostMatrix::from_pair_fn(data.n_rows(), cost))
}

const SYMMETRY_TOL: f64 = 1e-12;
const TRIANGLE_TOL: f64 = 1e-9;
const MAX_LISTED: usize = 64;

/// Violations of the positivity, symmetry and triangle conditions on a cost
/// matrix. Advisory only.
///
/// At most 64 offending pairs or triples are listed per condition; the
/// `*_count` fields hold the full totals.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub nonpositive: Vec<(usize, usize)>,
    pub nonpositive_count: usize,
    pub asymmetric: Vec<(usize, usize)>,
    pub asymmetric_count: usize,
    /// `(a, b, c)` with `D(a,b) > D(a,c) + D(b,c)`.
    pub triangle: Vec<(usize, usize, usize)>,
    pub triangle_count: usize,
}

impl DiagnosticReport {
    pub fn is_clean(&self) -> bool {
        self.nonpositive_count == 0 && self.asymmetric_count == 0 && self.triangle_count == 0
    }

    pub fn messages(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.nonpositive_count > 0 {
            out.push(format!(
                "{} pair(s) of distinct observations have zero or negative cost (e.g. {:?})",
                self.nonpositive_count,
                self.nonpositive.first().unwrap()
            ));
        }
        if self.asymmetric_count > 0 {
            out.push(format!("{} asymmetric cost pair(s)", self.asymmetric_count));
        }
        if self.triangle_count > 0 {
            out.push(format!(
                "{} triple(s) violate the triangle inequality (e.g. {:?})",
                self.triangle_count,
                self.triangle.first().unwrap()
            ));
        }
        out
    }
}

fn push_capped<T>(list: &mut Vec<T>, count: &mut usize, item: T) {
    *count += 1;
    if list.len() < MAX_LISTED {
        list.push(item);
    }
}

pub fn validate_assumptions(costs: &CostMatrix) -> DiagnosticReport {
    let n = costs.n();
    let mut report = DiagnosticReport::default();
    for a in 0..n {
        for b in (a + 1)..n {
            let (ab, ba) = (costs.get(a, b), costs.get(b, a));
            if ab <= 0.0 || ba <= 0.0 {
                push_capped(&mut report.nonpositive, &mut report.nonpositive_count, (a, b));
            }
            if (ab - ba).abs() > SYMMETRY_TOL {
                push_capped(&mut report.asymmetric, &mut report.asymmetric_count, (a, b));
            }
        }
    }
    // every unordered pair {a, b} against every third point c
    let violations: Vec<Vec<(usize, usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut found = Vec::new();
            for b in (a + 1)..n {
                let ab = costs.get(a, b);
                for c in (0..n).filter(|&c| c != a && c != b) {
                    if ab > costs.get(a, c) + costs.get(b, c) + TRIANGLE_TOL {
                        found.push((a, b, c));
                    }
                }
            }
            found
        })
        .collect();
    for t in violations.into_iter().flatten() {
        push_capped(&mut report.triangle, &mut report.triangle_count, t);
    }
    report
}
