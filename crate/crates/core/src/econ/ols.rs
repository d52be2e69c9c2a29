//! Fixed-effects OLS by within-group demeaning, with robust and
//! cluster-robust standard errors.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{EconError, FitResult, PanelDataset};

/// Least squares on group-demeaned data. Fixed effects are absorbed by
/// demeaning: exactly for one dimension, iteratively (alternating
/// projections, stop when the largest cell change is below 1e-10) for
/// several. Standard errors are HC1-robust, or cluster-robust when
/// `cluster_var` is given. Without fixed effects an intercept is
/// included.
pub fn ols_fe(
    panel: &PanelDataset,
    y: &str,
    xs: &[String],
    fe_vars: &[String],
    cluster_var: Option<&str>,
) -> Result<FitResult, EconError> {
    let y_col = panel.column(y)?;
    let x_cols: Vec<Vec<Option<f64>>> = xs
        .iter()
        .map(|name| panel.column(name))
        .collect::<Result<_, _>>()?;

    // Listwise deletion over every used column, including group keys.
    let mut rows = Vec::new();
    let mut fe_keys: Vec<Vec<String>> = vec![Vec::new(); fe_vars.len()];
    let mut cluster_keys: Vec<String> = Vec::new();
    'rows: for row in 0..panel.len() {
        if y_col[row].is_none() || x_cols.iter().any(|c| c[row].is_none()) {
            continue;
        }
        let mut keys = Vec::with_capacity(fe_vars.len());
        for fe in fe_vars {
            match panel.group_key(fe, row)? {
                Some(k) => keys.push(k),
                None => continue 'rows,
            }
        }
        let cluster = match cluster_var {
            Some(cv) => match panel.group_key(cv, row)? {
                Some(k) => k,
                None => continue 'rows,
            },
            None => String::new(),
        };
        for (dim, key) in keys.into_iter().enumerate() {
            fe_keys[dim].push(key);
        }
        cluster_keys.push(cluster);
        rows.push(row);
    }

    let n = rows.len();
    let with_intercept = fe_vars.is_empty();
    let p = xs.len() + usize::from(with_intercept);
    if n <= p {
        return Err(EconError::TooFewObservations { n, params: p });
    }

    let mut names: Vec<String> = Vec::with_capacity(p);
    if with_intercept {
        names.push("intercept".to_string());
    }
    names.extend(xs.iter().cloned());

    let mut x = DMatrix::zeros(n, p);
    let mut yv = DVector::zeros(n);
    for (out_row, &row) in rows.iter().enumerate() {
        let mut col = 0;
        if with_intercept {
            x[(out_row, 0)] = 1.0;
            col = 1;
        }
        for (k, c) in x_cols.iter().enumerate() {
            x[(out_row, col + k)] = c[row].unwrap();
        }
        yv[out_row] = y_col[row].unwrap();
    }

    let groups: Vec<Vec<usize>> = fe_keys.iter().map(|keys| index_groups(keys)).collect();
    demean(&mut x, &mut yv, &groups);

    // A column wiped out by demeaning is collinear with the fixed
    // effects; otherwise detect general collinearity through the
    // smallest singular value.
    let scale = x.amax().max(1.0);
    for j in 0..p {
        if x.column(j).amax() <= 1e-10 * scale {
            return Err(EconError::RankDeficient(names[j].clone()));
        }
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let (jmin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(j, s)| (j, *s))
        .unwrap();
    if smin <= 1e-10 * smax {
        let v_t = svd.v_t.as_ref().unwrap();
        let culprit = (0..p)
            .max_by(|&a, &b| {
                v_t[(jmin, a)]
                    .abs()
                    .partial_cmp(&v_t[(jmin, b)].abs())
                    .unwrap()
            })
            .unwrap();
        return Err(EconError::RankDeficient(names[culprit].clone()));
    }

    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &yv;
    let xtx_inv = xtx
        .try_inverse()
        .ok_or_else(|| EconError::RankDeficient(names[0].clone()))?;
    let beta = &xtx_inv * xty;
    let residuals = &yv - &x * &beta;
    let rss: f64 = residuals.iter().map(|u| u * u).sum();

    // R^2 on the demeaned data (centered when an intercept is present).
    let tss = if with_intercept {
        let mean = yv.iter().sum::<f64>() / n as f64;
        yv.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
    } else {
        yv.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = (tss > 0.0).then(|| 1.0 - rss / tss);

    let meat = match cluster_var {
        None => {
            let mut m = DMatrix::zeros(p, p);
            for i in 0..n {
                let xi = x.row(i).transpose();
                m += &xi * xi.transpose() * (residuals[i] * residuals[i]);
            }
            m * (n as f64 / (n - p) as f64)
        }
        Some(_) => {
            let clusters = index_groups(&cluster_keys);
            let n_clusters = clusters.iter().copied().max().map_or(0, |m| m + 1);
            let mut m = DMatrix::zeros(p, p);
            let mut scores: HashMap<usize, DVector<f64>> = HashMap::new();
            for i in 0..n {
                let xi = x.row(i).transpose() * residuals[i];
                scores
                    .entry(clusters[i])
                    .and_modify(|s| *s += &xi)
                    .or_insert(xi);
            }
            for s in scores.values() {
                m += s * s.transpose();
            }
            let adj = if n_clusters > 1 {
                (n_clusters as f64 / (n_clusters - 1) as f64)
                    * ((n - 1) as f64 / (n - p) as f64)
            } else {
                1.0
            };
            m * adj
        }
    };
    let cov = &xtx_inv * meat * &xtx_inv;
    let std_errors: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();

    Ok(FitResult {
        names,
        coefficients: beta.iter().copied().collect(),
        std_errors,
        n_obs: n,
        dropped_rows: panel.len() - n,
        iterations: 0,
        converged: true,
        r_squared,
        log_likelihood: None,
    })
}

/// Map each row's key to a dense group index.
fn index_groups(keys: &[String]) -> Vec<usize> {
    let mut lookup: HashMap<&str, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = lookup.len();
            *lookup.entry(k.as_str()).or_insert(next)
        })
        .collect()
}

fn demean_once(col: &mut DVector<f64>, groups: &[usize]) -> f64 {
    let n_groups = groups.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![0.0; n_groups];
    let mut counts = vec![0usize; n_groups];
    for (i, &g) in groups.iter().enumerate() {
        sums[g] += col[i];
        counts[g] += 1;
    }
    let mut max_change = 0.0f64;
    for (i, &g) in groups.iter().enumerate() {
        let mean = sums[g] / counts[g] as f64;
        col[i] -= mean;
        max_change = max_change.max(mean.abs());
    }
    max_change
}

fn demean(x: &mut DMatrix<f64>, y: &mut DVector<f64>, groups: &[Vec<usize>]) {
    if groups.is_empty() {
        return;
    }
    let p = x.ncols();
    for pass in 0..10_000 {
        let mut max_change = 0.0f64;
        for dim in groups {
            for j in 0..p {
                let mut col = x.column(j).into_owned();
                max_change = max_change.max(demean_once(&mut col, dim));
                x.set_column(j, &col);
            }
            max_change = max_change.max(demean_once(y, dim));
        }
        // One pass is exact for a single dimension.
        if groups.len() == 1 || max_change < 1e-10 {
            break;
        }
        debug_assert!(pass < 9_999, "demeaning failed to converge");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn panel(vars: &[&str], rows: Vec<Vec<Option<f64>>>) -> PanelDataset {
        let n = rows.len();
        PanelDataset::new(
            vars.iter().map(|s| s.to_string()).collect(),
            (0..n).map(|i| format!("u{i}")).collect(),
            vec![None; n],
            rows,
        )
        .unwrap()
    }

    #[test]
    fn exact_fit_without_fe() {
        let rows = (1..=6)
            .map(|i| vec![Some(2.0 * i as f64), Some(i as f64)])
            .collect();
        let p = panel(&["y", "x"], rows);
        let fit = ols_fe(&p, "y", &["x".to_string()], &[], None).unwrap();
        assert_abs_diff_eq!(fit.coefficient("x").unwrap(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficient("intercept").unwrap(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared.unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn fe_absorbs_group_offsets() {
        // y = 3x + 10 in group 1, y = 3x - 10 in group 2.
        let mut rows = Vec::new();
        for i in 1..=5 {
            rows.push(vec![Some(3.0 * i as f64 + 10.0), Some(i as f64), Some(1.0)]);
            rows.push(vec![
                Some(3.0 * (i as f64 + 0.5) - 10.0),
                Some(i as f64 + 0.5),
                Some(2.0),
            ]);
        }
        let p = panel(&["y", "x", "g"], rows);
        let fit = ols_fe(&p, "y", &["x".to_string()], &["g".to_string()], None).unwrap();
        assert_abs_diff_eq!(fit.coefficient("x").unwrap(), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_within_groups_is_rank_deficient() {
        let mut rows = Vec::new();
        for i in 0..4 {
            let g = if i < 2 { 1.0 } else { 2.0 };
            rows.push(vec![Some(i as f64), Some(g * 5.0), Some(g)]);
        }
        let p = panel(&["y", "x", "g"], rows);
        let err = ols_fe(&p, "y", &["x".to_string()], &["g".to_string()], None).unwrap_err();
        assert!(matches!(err, EconError::RankDeficient(name) if name == "x"));
    }

    #[test]
    fn listwise_deletion_counts() {
        let rows = vec![
            vec![Some(1.0), Some(1.0)],
            vec![None, Some(2.0)],
            vec![Some(3.0), Some(3.0)],
            vec![Some(4.0), Some(4.0)],
            vec![Some(5.0), Some(5.0)],
        ];
        let p = panel(&["y", "x"], rows);
        let fit = ols_fe(&p, "y", &["x".to_string()], &[], None).unwrap();
        assert_eq!(fit.n_obs, 4);
        assert_eq!(fit.dropped_rows, 1);
    }

    #[test]
    fn cluster_se_positive() {
        let mut rows = Vec::new();
        for i in 0..12 {
            let x = i as f64;
            let noise = if i % 3 == 0 { 0.5 } else { -0.25 };
            rows.push(vec![Some(2.0 * x + noise), Some(x), Some((i % 4) as f64)]);
        }
        let p = panel(&["y", "x", "c"], rows);
        let fit = ols_fe(&p, "y", &["x".to_string()], &[], Some("c")).unwrap();
        assert!(fit.std_errors.iter().all(|s| *s >= 0.0));
        assert_abs_diff_eq!(fit.coefficient("x").unwrap(), 2.0, epsilon = 0.1);
    }

    #[test]
    fn too_few_observations() {
        let rows = vec![vec![Some(1.0), Some(1.0)], vec![Some(2.0), Some(2.0)]];
        let p = panel(&["y", "x"], rows);
        assert!(matches!(
            ols_fe(&p, "y", &["x".to_string()], &[], None),
            Err(EconError::TooFewObservations { .. })
        ));
    }
}
