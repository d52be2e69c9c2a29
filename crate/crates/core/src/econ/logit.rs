//! Logit model of firm GVC entry, fit by Newton-Raphson maximum
//! likelihood.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{EconError, FitResult};

const MAX_ITER: usize = 100;
const COEF_TOL: f64 = 1e-8;
/// Coefficients drifting past this with a still-favorable gradient mean
/// the likelihood is unbounded (perfect separation).
const SEPARATION_BOUND: f64 = 30.0;

/// One firm observation with the regressors named in the entry model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirmRecord {
    pub id: String,
    pub size: f64,
    pub age: f64,
    pub foreign_owned: f64,
    pub skill_share: f64,
    pub productivity: f64,
    pub gvc_participant: f64,
}

impl FirmRecord {
    pub fn regressor(&self, name: &str) -> Result<f64, EconError> {
        match name {
            "size" => Ok(self.size),
            "age" => Ok(self.age),
            "foreign_owned" => Ok(self.foreign_owned),
            "skill_share" => Ok(self.skill_share),
            "productivity" => Ok(self.productivity),
            other => Err(EconError::UnknownVariable(other.to_string())),
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Log-likelihood of a logit model at `beta`.
pub fn logit_log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let z = x * beta;
    y.iter()
        .zip(z.iter())
        .map(|(&yi, &zi)| yi * zi - (1.0 + zi.exp()).ln())
        .sum()
}

/// Gradient of the log-likelihood: X'(y - p).
pub fn logit_gradient(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    let p = (x * beta).map(sigmoid);
    x.transpose() * (y - p)
}

/// Fit on an explicit design matrix (first column is typically the
/// intercept). `names` label the columns of `x`.
pub fn logit_fit_design(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    names: Vec<String>,
) -> Result<FitResult, EconError> {
    let n = x.nrows();
    let p = x.ncols();
    if y.iter().all(|&v| v == y[0]) {
        return Err(EconError::NoVariation);
    }
    if n <= p {
        return Err(EconError::TooFewObservations { n, params: p });
    }

    let mut beta = DVector::zeros(p);
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=MAX_ITER {
        iterations = iter;
        let probs = (x * &beta).map(sigmoid);
        let grad = x.transpose() * (y - &probs);
        // Observed information X' W X with W = p(1-p).
        let mut info = DMatrix::zeros(p, p);
        for i in 0..n {
            let w = probs[i] * (1.0 - probs[i]);
            let xi = x.row(i).transpose();
            info += &xi * xi.transpose() * w;
        }
        let step = info
            .clone()
            .lu()
            .solve(&grad)
            .ok_or(EconError::Separation)?;
        beta += &step;
        if beta.amax() > SEPARATION_BOUND {
            return Err(EconError::Separation);
        }
        if step.amax() < COEF_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(EconError::NoConvergence(MAX_ITER));
    }

    let probs = (x * &beta).map(sigmoid);
    let mut info = DMatrix::zeros(p, p);
    for i in 0..n {
        let w = probs[i] * (1.0 - probs[i]);
        let xi = x.row(i).transpose();
        info += &xi * xi.transpose() * w;
    }
    let cov = info
        .try_inverse()
        .ok_or(EconError::Separation)?;
    let std_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    let ll = logit_log_likelihood(x, y, &beta);

    Ok(FitResult {
        names,
        coefficients: beta.iter().copied().collect(),
        std_errors,
        n_obs: n,
        dropped_rows: 0,
        iterations,
        converged,
        r_squared: None,
        log_likelihood: Some(ll),
    })
}

/// Fit the firm GVC-entry model with an intercept plus the named
/// regressors.
pub fn logit_fit(firms: &[FirmRecord], xs: &[String]) -> Result<FitResult, EconError> {
    let n = firms.len();
    let p = xs.len() + 1;
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for (i, firm) in firms.iter().enumerate() {
        x[(i, 0)] = 1.0;
        for (k, name) in xs.iter().enumerate() {
            x[(i, k + 1)] = firm.regressor(name)?;
        }
        y[i] = firm.gvc_participant;
    }
    let mut names = vec!["intercept".to_string()];
    names.extend(xs.iter().cloned());
    logit_fit_design(&x, &y, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn design_2x2() -> (DMatrix<f64>, DVector<f64>) {
        // x=0: 1 of 4 participate; x=1: 3 of 4 participate.
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        for i in 0..4 {
            rows.push([1.0, 0.0]);
            ys.push(if i == 0 { 1.0 } else { 0.0 });
        }
        for i in 0..4 {
            rows.push([1.0, 1.0]);
            ys.push(if i < 3 { 1.0 } else { 0.0 });
        }
        let x = DMatrix::from_fn(8, 2, |i, j| rows[i][j]);
        (x, DVector::from_vec(ys))
    }

    #[test]
    fn saturated_2x2_closed_form() {
        let (x, y) = design_2x2();
        let fit = logit_fit_design(&x, &y, vec!["intercept".into(), "x".into()]).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0], (1.0f64 / 3.0).ln(), epsilon = 1e-6);
        assert_abs_diff_eq!(fit.coefficients[1], 9.0f64.ln(), epsilon = 1e-6);
        assert!(fit.converged);
    }

    #[test]
    fn fitted_probabilities_average_to_participation_rate() {
        let (x, y) = design_2x2();
        let fit = logit_fit_design(&x, &y, vec!["b0".into(), "b1".into()]).unwrap();
        let beta = DVector::from_vec(fit.coefficients.clone());
        let mean_p = (x * beta).map(sigmoid).mean();
        assert_abs_diff_eq!(mean_p, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn gradient_vanishes_at_optimum() {
        let (x, y) = design_2x2();
        let fit = logit_fit_design(&x, &y, vec!["b0".into(), "b1".into()]).unwrap();
        let beta = DVector::from_vec(fit.coefficients.clone());
        assert!(logit_gradient(&x, &y, &beta).amax() < 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = design_2x2();
        let beta = DVector::from_vec(vec![0.3, -0.7]);
        let grad = logit_gradient(&x, &y, &beta);
        for j in 0..2 {
            let mut up = beta.clone();
            let mut down = beta.clone();
            up[j] += 1e-5;
            down[j] -= 1e-5;
            let fd = (logit_log_likelihood(&x, &y, &up) - logit_log_likelihood(&x, &y, &down))
                / 2e-5;
            assert_abs_diff_eq!(grad[j], fd, epsilon = 1e-5 * grad[j].abs().max(1.0));
        }
    }

    fn firm(x: f64, y: f64) -> FirmRecord {
        FirmRecord {
            id: "f".into(),
            size: x,
            age: 0.0,
            foreign_owned: 0.0,
            skill_share: 0.0,
            productivity: 0.0,
            gvc_participant: y,
        }
    }

    #[test]
    fn no_variation_rejected() {
        let firms: Vec<FirmRecord> = (0..6).map(|i| firm(i as f64, 1.0)).collect();
        assert!(matches!(
            logit_fit(&firms, &["size".to_string()]),
            Err(EconError::NoVariation)
        ));
    }

    #[test]
    fn perfect_separation_rejected() {
        let firms: Vec<FirmRecord> = (0..10)
            .map(|i| firm(i as f64, if i < 5 { 0.0 } else { 1.0 }))
            .collect();
        assert!(matches!(
            logit_fit(&firms, &["size".to_string()]),
            Err(EconError::Separation)
        ));
    }
}
