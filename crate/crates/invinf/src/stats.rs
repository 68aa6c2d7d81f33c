//! OLS with categorical fixed effects, heteroskedasticity-robust (HC1)
//! standard errors, VIF diagnostics, and predicted margins.
//!
//! Coefficients are solved through a column-pivoted Householder QR, never
//! the normal equations; rank deficiency is detected from the pivoted R
//! diagonal and reported with the names of the offending columns. Fixed
//! effects are expanded to dummies with the alphabetically-first level
//! dropped, p-values are two-tailed from the t distribution with n − k
//! degrees of freedom, and R² is the conventional centered version.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::collections::BTreeSet;
use std::io::Read;
use thiserror::Error;

/// One column of a [`DataTable`]. Numeric missing values are NaN;
/// categorical missing values are empty strings.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A rectangular, column-typed table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataTable {
    names: Vec<String>,
    columns: Vec<Column>,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("column '{0}' already exists")]
    Duplicate(String),
    #[error("column '{name}' has {got} rows, expected {expected}")]
    Ragged {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty table: no header row")]
    NoHeader,
}

impl DataTable {
    pub fn new() -> DataTable {
        DataTable::default()
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn push_column(&mut self, name: &str, column: Column) -> Result<(), TableError> {
        if self.names.iter().any(|n| n == name) {
            return Err(TableError::Duplicate(name.to_string()));
        }
        if !self.columns.is_empty() && column.len() != self.nrows() {
            return Err(TableError::Ragged {
                name: name.to_string(),
                got: column.len(),
                expected: self.nrows(),
            });
        }
        self.names.push(name.to_string());
        self.columns.push(column);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.columns[i])
    }

    /// Keeps only rows where `mask` is true. Returns the number removed.
    pub fn retain_rows(&mut self, mask: &[bool]) -> usize {
        let removed = mask.iter().filter(|m| !**m).count();
        for col in &mut self.columns {
            match col {
                Column::Numeric(v) => {
                    let mut it = mask.iter();
                    v.retain(|_| *it.next().unwrap());
                }
                Column::Categorical(v) => {
                    let mut it = mask.iter();
                    v.retain(|_| *it.next().unwrap());
                }
            }
        }
        removed
    }

    /// Reads a CSV with a header row. A column is numeric when every
    /// non-empty cell parses as a float; empty cells become NaN. Everything
    /// else is categorical.
    pub fn from_csv<R: Read>(reader: R) -> Result<DataTable, TableError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if headers.is_empty() {
            return Err(TableError::NoHeader);
        }
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
        for record in rdr.records() {
            let record = record?;
            for (i, cell) in record.iter().enumerate() {
                if i < cells.len() {
                    cells[i].push(cell.to_string());
                }
            }
            for col in cells.iter_mut().skip(record.len()) {
                col.push(String::new());
            }
        }
        let mut table = DataTable::new();
        for (name, raw) in headers.iter().zip(cells) {
            let numeric = raw.iter().any(|c| !c.is_empty())
                && raw
                    .iter()
                    .all(|c| c.is_empty() || c.parse::<f64>().is_ok());
            let column = if numeric {
                Column::Numeric(
                    raw.iter()
                        .map(|c| {
                            if c.is_empty() {
                                f64::NAN
                            } else {
                                c.parse().unwrap()
                            }
                        })
                        .collect(),
                )
            } else {
                Column::Categorical(raw)
            };
            table.push_column(name, column)?;
        }
        Ok(table)
    }
}

/// What to regress on what. Fixed-effect columns are expanded to dummies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub outcome: String,
    pub predictors: Vec<String>,
    pub fixed_effects: Vec<String>,
    /// HC1 sandwich errors when true, classical otherwise.
    pub robust: bool,
}

/// One fitted coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub p_value: f64,
}

/// Full fit output.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub terms: Vec<Term>,
    pub r_squared: f64,
    pub n: usize,
    pub df_resid: usize,
    /// VIF per design column (intercept excluded); +INF marks perfect
    /// collinearity.
    pub vifs: Vec<(String, f64)>,
    pub robust: bool,
    spec: ModelSpec,
}

impl RegressionResult {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }
}

/// Predicted outcomes at the two focal levels with everything else at its
/// sample mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    pub pred_0: f64,
    pub pred_1: f64,
    /// `(pred_1 - pred_0) / pred_0 × 100`; `None` when `pred_0` is zero.
    pub pct_diff: Option<f64>,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("column '{0}' not found")]
    MissingColumn(String),
    #[error("column '{0}' is not numeric")]
    NotNumeric(String),
    #[error("outcome '{0}' also appears among the predictors")]
    OutcomeIsPredictor(String),
    #[error("{n} rows cannot identify {k} parameters")]
    TooFewRows { n: usize, k: usize },
    #[error("missing values in column '{0}'")]
    MissingValues(String),
    #[error("design is rank-deficient; collinear columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("focal predictor '{0}' must be binary (0/1)")]
    NotBinary(String),
    #[error("focal predictor '{0}' is not in the fitted model")]
    NotInModel(String),
    #[error("margins data is inconsistent with the fitted design")]
    DesignMismatch,
    #[error("VIF needs at least 2 predictors")]
    TooFewPredictors,
}

const INTERCEPT: &str = "Intercept";

struct Design {
    names: Vec<String>,
    matrix: DMatrix<f64>,
}

fn numeric_column<'t>(table: &'t DataTable, name: &str) -> Result<&'t Vec<f64>, FitError> {
    match table.column(name) {
        Some(Column::Numeric(v)) => {
            if v.iter().any(|x| x.is_nan()) {
                Err(FitError::MissingValues(name.to_string()))
            } else {
                Ok(v)
            }
        }
        Some(Column::Categorical(_)) => Err(FitError::NotNumeric(name.to_string())),
        None => Err(FitError::MissingColumn(name.to_string())),
    }
}

/// Fixed-effect labels: categorical columns as-is, numeric columns through
/// their display form ("1995"), so numeric year columns work directly.
fn fe_labels(table: &DataTable, name: &str) -> Result<Vec<String>, FitError> {
    match table.column(name) {
        Some(Column::Categorical(v)) => {
            if v.iter().any(|s| s.is_empty()) {
                Err(FitError::MissingValues(name.to_string()))
            } else {
                Ok(v.clone())
            }
        }
        Some(Column::Numeric(v)) => {
            if v.iter().any(|x| x.is_nan()) {
                Err(FitError::MissingValues(name.to_string()))
            } else {
                Ok(v.iter().map(|x| x.to_string()).collect())
            }
        }
        None => Err(FitError::MissingColumn(name.to_string())),
    }
}

fn build_design(table: &DataTable, spec: &ModelSpec) -> Result<Design, FitError> {
    let n = table.nrows();
    let mut names = vec![INTERCEPT.to_string()];
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
    for p in &spec.predictors {
        names.push(p.clone());
        cols.push(numeric_column(table, p)?.clone());
    }
    for fe in &spec.fixed_effects {
        let labels = fe_labels(table, fe)?;
        let levels: BTreeSet<&String> = labels.iter().collect();
        // alphabetically-first level is the reference
        for level in levels.iter().skip(1) {
            names.push(format!("{fe}={level}"));
            cols.push(
                labels
                    .iter()
                    .map(|l| if l == *level { 1.0 } else { 0.0 })
                    .collect(),
            );
        }
    }
    let k = cols.len();
    let matrix = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    Ok(Design { names, matrix })
}

struct QrFit {
    rank: usize,
    perm: Vec<usize>,
    /// Upper-triangular factor in pivoted column order.
    r: DMatrix<f64>,
    /// Qᵀy, first k entries.
    qty: DVector<f64>,
}

/// Column-pivoted Householder QR, applied in place to a copy of the design
/// and to y. The pivot order exposes rank deficiency and names the columns
/// that were never pivoted in.
fn pivoted_qr(x: &DMatrix<f64>, y: &DVector<f64>) -> QrFit {
    let n = x.nrows();
    let k = x.ncols();
    let mut work = x.clone();
    let mut qty = y.clone();
    let mut perm: Vec<usize> = (0..k).collect();

    let max_norm = (0..k)
        .map(|c| work.column(c).norm())
        .fold(0.0_f64, f64::max);
    let tol = f64::EPSILON * (n.max(k) as f64) * max_norm;

    let mut rank = k.min(n);
    for j in 0..k.min(n) {
        // largest remaining column, by the norm of its unprocessed tail
        let (cmax, norm_max) = (j..k)
            .map(|c| (c, work.view((j, c), (n - j, 1)).norm()))
            .fold((j, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if norm_max <= tol {
            rank = j;
            break;
        }
        if cmax != j {
            work.swap_columns(j, cmax);
            perm.swap(j, cmax);
        }

        let m = n - j;
        let mut v = DVector::zeros(m);
        for i in 0..m {
            v[i] = work[(j + i, j)];
        }
        let alpha = -v[0].signum() * v.norm();
        v[0] -= alpha;
        let vtv = v.norm_squared();
        if vtv > 0.0 {
            let beta = 2.0 / vtv;
            for c in j..k {
                let mut s = 0.0;
                for i in 0..m {
                    s += v[i] * work[(j + i, c)];
                }
                s *= beta;
                for i in 0..m {
                    work[(j + i, c)] -= s * v[i];
                }
            }
            let mut s = 0.0;
            for i in 0..m {
                s += v[i] * qty[j + i];
            }
            s *= beta;
            for i in 0..m {
                qty[j + i] -= s * v[i];
            }
        }
        work[(j, j)] = alpha;
        for i in (j + 1)..n {
            work[(i, j)] = 0.0;
        }
    }

    let r = work.rows(0, k.min(n)).into_owned();
    QrFit {
        rank,
        perm,
        r,
        qty,
    }
}

/// Back-substitution for the leading `rank × rank` block of R.
fn solve_upper(r: &DMatrix<f64>, rhs: &[f64], rank: usize) -> Vec<f64> {
    let mut z = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..rank {
            s -= r[(i, j)] * z[j];
        }
        z[i] = s / r[(i, i)];
    }
    z
}

/// R² of regressing `y` on `x`, using a rank-truncated solve so perfectly
/// collinear designs still yield well-defined fitted values.
fn r_squared_of(x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let qr = pivoted_qr(x, y);
    let rhs: Vec<f64> = (0..qr.rank).map(|i| qr.qty[i]).collect();
    let z = solve_upper(&qr.r, &rhs, qr.rank);
    let mut beta = DVector::zeros(x.ncols());
    for (j, val) in z.iter().enumerate() {
        beta[qr.perm[j]] = *val;
    }
    let resid = y - x * beta;
    let ssr = resid.norm_squared();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Fits the model. Coefficients come from the pivoted QR; robust=true uses
/// the HC1 sandwich. Rank deficiency and missing values are hard errors.
pub fn fit_ols(table: &DataTable, spec: &ModelSpec) -> Result<RegressionResult, FitError> {
    if spec.predictors.contains(&spec.outcome) {
        return Err(FitError::OutcomeIsPredictor(spec.outcome.clone()));
    }
    let y_raw = numeric_column(table, &spec.outcome)?;
    let design = build_design(table, spec)?;
    let n = design.matrix.nrows();
    let k = design.matrix.ncols();
    if n <= k {
        return Err(FitError::TooFewRows { n, k });
    }
    let y = DVector::from_column_slice(y_raw);

    let qr = pivoted_qr(&design.matrix, &y);
    if qr.rank < k {
        let mut columns: Vec<String> = qr.perm[qr.rank..]
            .iter()
            .map(|&j| design.names[j].clone())
            .collect();
        columns.sort();
        return Err(FitError::RankDeficient { columns });
    }

    let rhs: Vec<f64> = (0..k).map(|i| qr.qty[i]).collect();
    let z = solve_upper(&qr.r, &rhs, k);
    let mut beta = DVector::zeros(k);
    for (j, val) in z.iter().enumerate() {
        beta[qr.perm[j]] = *val;
    }

    let resid = &y - &design.matrix * &beta;
    let ssr = resid.norm_squared();
    let mean = y.mean();
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if sst > 0.0 {
        1.0 - ssr / sst
    } else {
        // constant outcome: define R² as 0
        0.0
    };

    // (XᵀX)⁻¹ from the pivoted R: X P = Q R, so
    // (XᵀX)⁻¹[perm i, perm j] = (R⁻¹ R⁻ᵀ)[i, j]
    let mut rinv = DMatrix::zeros(k, k);
    for col in 0..k {
        let mut e = vec![0.0; k];
        e[col] = 1.0;
        let w = solve_upper(&qr.r, &e, k);
        for row in 0..k {
            rinv[(row, col)] = w[row];
        }
    }
    let a_perm = &rinv * rinv.transpose();
    let mut xtx_inv = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            xtx_inv[(qr.perm[i], qr.perm[j])] = a_perm[(i, j)];
        }
    }

    let df_resid = n - k;
    let cov = if spec.robust {
        // HC1: (n / (n-k)) (XᵀX)⁻¹ Xᵀ diag(e²) X (XᵀX)⁻¹
        let mut meat = DMatrix::zeros(k, k);
        for i in 0..n {
            let e2 = resid[i] * resid[i];
            for a in 0..k {
                let xa = design.matrix[(i, a)] * e2;
                for b in a..k {
                    meat[(a, b)] += xa * design.matrix[(i, b)];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                meat[(a, b)] = meat[(b, a)];
            }
        }
        &xtx_inv * meat * &xtx_inv * (n as f64 / df_resid as f64)
    } else {
        let sigma2 = ssr / df_resid as f64;
        &xtx_inv * sigma2
    };

    let tdist = StudentsT::new(0.0, 1.0, df_resid as f64).expect("df_resid > 0");
    let terms: Vec<Term> = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = beta[j];
            let var = cov[(j, j)].max(0.0);
            let std_error = var.sqrt();
            let p_value = if std_error > 0.0 {
                2.0 * (1.0 - tdist.cdf((estimate / std_error).abs()))
            } else if estimate.abs() > 0.0 {
                0.0
            } else {
                1.0
            };
            Term {
                name: name.clone(),
                estimate,
                std_error,
                p_value,
            }
        })
        .collect();

    // VIFs over the design columns (dummies included), intercept excluded
    let mut vifs = Vec::with_capacity(k.saturating_sub(1));
    for j in 1..k {
        let others: Vec<usize> = (0..k).filter(|&c| c != j).collect();
        let sub = DMatrix::from_fn(n, others.len(), |i, c| design.matrix[(i, others[c])]);
        let target = DVector::from_fn(n, |i, _| design.matrix[(i, j)]);
        let r2 = r_squared_of(&sub, &target);
        let vif = if r2 >= 1.0 - 1e-12 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - r2)
        };
        vifs.push((design.names[j].clone(), vif));
    }

    Ok(RegressionResult {
        terms,
        r_squared,
        n,
        df_resid,
        vifs,
        robust: spec.robust,
        spec: spec.clone(),
    })
}

/// Standalone VIF diagnostics for a set of numeric predictors: each is
/// regressed on all the others plus an intercept. Perfect collinearity
/// yields the +INF sentinel.
pub fn vif(table: &DataTable, predictors: &[String]) -> Result<Vec<(String, f64)>, FitError> {
    if predictors.len() < 2 {
        return Err(FitError::TooFewPredictors);
    }
    let cols: Vec<&Vec<f64>> = predictors
        .iter()
        .map(|p| numeric_column(table, p))
        .collect::<Result<_, _>>()?;
    let n = table.nrows();
    let mut out = Vec::with_capacity(predictors.len());
    for (j, name) in predictors.iter().enumerate() {
        let others: Vec<usize> = (0..predictors.len()).filter(|&c| c != j).collect();
        let mut x = DMatrix::zeros(n, others.len() + 1);
        for i in 0..n {
            x[(i, 0)] = 1.0;
            for (c, &o) in others.iter().enumerate() {
                x[(i, c + 1)] = cols[o][i];
            }
        }
        let y = DVector::from_column_slice(cols[j]);
        let r2 = r_squared_of(&x, &y);
        let v = if r2 >= 1.0 - 1e-12 {
            f64::INFINITY
        } else {
            1.0 / (1.0 - r2)
        };
        out.push((name.clone(), v));
    }
    Ok(out)
}

/// Predictions at `focal` = 0 and 1 with every other design column
/// (dummies included) held at its sample mean, over the same table the
/// model was fitted on.
pub fn margins(
    result: &RegressionResult,
    table: &DataTable,
    focal: &str,
) -> Result<Margins, FitError> {
    if !result.spec.predictors.iter().any(|p| p == focal) {
        return Err(FitError::NotInModel(focal.to_string()));
    }
    let focal_col = numeric_column(table, focal)?;
    if !focal_col.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Err(FitError::NotBinary(focal.to_string()));
    }
    let design = build_design(table, &result.spec)?;
    if design.names.len() != result.terms.len()
        || design
            .names
            .iter()
            .zip(&result.terms)
            .any(|(n, t)| *n != t.name)
    {
        return Err(FitError::DesignMismatch);
    }
    let n = design.matrix.nrows() as f64;
    let means: Vec<f64> = (0..design.matrix.ncols())
        .map(|j| design.matrix.column(j).sum() / n)
        .collect();
    let focal_idx = design
        .names
        .iter()
        .position(|name| name == focal)
        .expect("focal verified in spec");
    let predict = |level: f64| -> f64 {
        design
            .names
            .iter()
            .enumerate()
            .map(|(j, _)| {
                let x = if j == focal_idx { level } else { means[j] };
                result.terms[j].estimate * x
            })
            .sum()
    };
    let pred_0 = predict(0.0);
    let pred_1 = predict(1.0);
    let pct_diff = if pred_0 != 0.0 {
        Some((pred_1 - pred_0) / pred_0 * 100.0)
    } else {
        None
    };
    Ok(Margins {
        pred_0,
        pred_1,
        pct_diff,
    })
}

/// Significance-star legend. `ThreeLevel` is `*`/`**`/`***` at
/// 0.05/0.01/0.001; `FourLevel` is `+`/`*`/`**`/`***` at 0.1/0.05/0.01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Legend {
    ThreeLevel,
    FourLevel,
}

impl std::str::FromStr for Legend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t4" => Ok(Legend::ThreeLevel),
            "t6" => Ok(Legend::FourLevel),
            other => Err(format!("unknown legend '{other}' (expected t4 or t6)")),
        }
    }
}

pub fn significance_stars(p: f64, legend: Legend) -> &'static str {
    match legend {
        Legend::ThreeLevel => {
            if p < 0.001 {
                "***"
            } else if p < 0.01 {
                "**"
            } else if p < 0.05 {
                "*"
            } else {
                ""
            }
        }
        Legend::FourLevel => {
            if p < 0.01 {
                "***"
            } else if p < 0.05 {
                "**"
            } else if p < 0.1 {
                "*"
            } else {
                ""
            }
        }
    }
}
