//! Correlation, fixed-effects OLS, and logit estimators over panel and
//! firm-level datasets.

mod logit;
mod ols;

pub use logit::{
    logit_fit, logit_fit_design, logit_gradient, logit_log_likelihood, FirmRecord,
};
pub use ols::ols_fe;

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EconError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("duplicate variable {0:?}")]
    DuplicateVariable(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("row {0} has {1} values, expected {2}")]
    RaggedRow(usize, usize, usize),
    #[error("too few observations: {n} for {params} parameters")]
    TooFewObservations { n: usize, params: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("design matrix is rank deficient; column {0:?} is collinear")]
    RankDeficient(String),
    #[error("outcome has no variation")]
    NoVariation,
    #[error("perfect separation: maximum-likelihood estimate does not exist")]
    Separation,
    #[error("estimator did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Rectangular observations: unit id, optional period, named numeric
/// variables with empty-field missing markers.
#[derive(Debug, Clone)]
pub struct PanelDataset {
    variables: Vec<String>,
    ids: Vec<String>,
    periods: Vec<Option<String>>,
    /// Row-major, aligned with `variables`.
    values: Vec<Vec<Option<f64>>>,
}

impl PanelDataset {
    pub fn new(
        variables: Vec<String>,
        ids: Vec<String>,
        periods: Vec<Option<String>>,
        values: Vec<Vec<Option<f64>>>,
    ) -> Result<Self, EconError> {
        for name in &variables {
            if variables.iter().filter(|v| *v == name).count() > 1 {
                return Err(EconError::DuplicateVariable(name.clone()));
            }
        }
        if ids.is_empty() {
            return Err(EconError::EmptyDataset);
        }
        if periods.len() != ids.len() || values.len() != ids.len() {
            return Err(EconError::RaggedRow(0, values.len(), ids.len()));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != variables.len() {
                return Err(EconError::RaggedRow(i, row.len(), variables.len()));
            }
        }
        Ok(PanelDataset {
            variables,
            ids,
            periods,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn periods(&self) -> &[Option<String>] {
        &self.periods
    }

    fn var_index(&self, name: &str) -> Result<usize, EconError> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| EconError::UnknownVariable(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>, EconError> {
        let idx = self.var_index(name)?;
        Ok(self.values.iter().map(|row| row[idx]).collect())
    }

    /// Row grouping key for a variable: the unit id for "id", the period
    /// for "period", otherwise the variable's value rendered as text
    /// (missing values yield no key).
    pub fn group_key(&self, name: &str, row: usize) -> Result<Option<String>, EconError> {
        match name {
            "id" => Ok(Some(self.ids[row].clone())),
            "period" => Ok(self.periods[row].clone()),
            _ => {
                let idx = self.var_index(name)?;
                Ok(self.values[row][idx].map(|v| format!("{v}")))
            }
        }
    }
}

/// Estimation output shared by the regression estimators.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n_obs: usize,
    pub dropped_rows: usize,
    pub iterations: usize,
    pub converged: bool,
    pub r_squared: Option<f64>,
    pub log_likelihood: Option<f64>,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }
}

/// Product-moment correlation. Requires at least 3 paired observations
/// and positive variance on both sides.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EconError> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Err(EconError::TooFewObservations { n, params: 2 });
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(EconError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Per-group summary of one variable.
#[derive(Debug, Clone)]
pub struct GroupStats {
    pub count: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

fn median_of(sorted: &[f64]) -> Option<f64> {
    match sorted.len() {
        0 => None,
        n if n % 2 == 1 => Some(sorted[n / 2]),
        n => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

/// Groupwise mean/median/count per requested variable, excluding missing
/// values per variable.
pub fn describe_by_group(
    panel: &PanelDataset,
    group_var: &str,
    stats_vars: &[String],
) -> Result<BTreeMap<String, BTreeMap<String, GroupStats>>, EconError> {
    // Validate up front so unknown names fail before any work.
    if group_var != "id" && group_var != "period" {
        panel.var_index(group_var)?;
    }
    for v in stats_vars {
        panel.var_index(v)?;
    }
    let mut grouped: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for row in 0..panel.len() {
        let Some(key) = panel.group_key(group_var, row)? else {
            continue;
        };
        let entry = grouped.entry(key).or_default();
        for v in stats_vars {
            let idx = panel.var_index(v)?;
            let slot = entry.entry(v.clone()).or_default();
            if let Some(value) = panel.values[row][idx] {
                slot.push(value);
            }
        }
    }
    Ok(grouped
        .into_iter()
        .map(|(key, vars)| {
            let stats = vars
                .into_iter()
                .map(|(name, mut vals)| {
                    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let count = vals.len();
                    let mean = (count > 0).then(|| vals.iter().sum::<f64>() / count as f64);
                    (
                        name,
                        GroupStats {
                            count,
                            mean,
                            median: median_of(&vals),
                        },
                    )
                })
                .collect();
            (key, stats)
        })
        .collect())
}
