//! Seller's-perspective measures and the combined GVC participation
//! index.

use nalgebra::{DMatrix, DVector};

use crate::backward::{domestic_leontief, va_source_matrix};
use crate::icio::{exports_vector, IcioTable};
use crate::leontief::{LeontiefError, LeontiefSystem};

/// Share of intermediates in a country's gross output and gross exports.
#[derive(Debug, Clone)]
pub struct IntermediatesShares {
    pub country: String,
    pub share_in_output: Option<f64>,
    pub share_in_exports: Option<f64>,
}

pub fn intermediates_shares(table: &IcioTable) -> Vec<IntermediatesShares> {
    let exports = exports_vector(table);
    let n = table.n();
    (0..table.num_countries())
        .map(|c| {
            let range = table.block(c);
            let mut intermediate_sales = 0.0;
            let mut intermediate_exports = 0.0;
            for i in range.clone() {
                for j in 0..n {
                    intermediate_sales += table.z()[(i, j)];
                    if table.country_of(j) != c {
                        intermediate_exports += table.z()[(i, j)];
                    }
                }
            }
            let output: f64 = range.clone().map(|i| table.x()[i]).sum();
            let gross_exports: f64 = range.clone().map(|i| exports[i]).sum();
            IntermediatesShares {
                country: table.countries()[c].clone(),
                share_in_output: (output > 0.0).then(|| intermediate_sales / output),
                share_in_exports: (gross_exports > 0.0)
                    .then(|| intermediate_exports / gross_exports),
            }
        })
        .collect()
}

/// Seller-side I2E: intermediates a country sells that its buyers embody
/// in their own exports.
#[derive(Debug, Clone)]
pub struct I2eSelling {
    pub country: String,
    pub value: f64,
    pub share_of_exports: Option<f64>,
}

pub fn i2e_selling(table: &IcioTable) -> Result<Vec<I2eSelling>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    i2e_selling_with(table, &sys)
}

/// As [`i2e_selling`], reusing an already-computed coefficient system.
pub fn i2e_selling_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<I2eSelling>, LeontiefError> {
    let exports = exports_vector(table);
    let c_count = table.num_countries();
    // Domestic output required by each buyer to produce its exports.
    let mut buyer_needs: Vec<DVector<f64>> = Vec::with_capacity(c_count);
    for r in 0..c_count {
        let range = table.block(r);
        let e_r = exports.rows(range.start, range.len()).into_owned();
        buyer_needs.push(domestic_leontief(&sys.a, range)? * e_r);
    }
    let mut out = Vec::with_capacity(c_count);
    for s in 0..c_count {
        let src = table.block(s);
        let mut value = 0.0;
        for (r, needs) in buyer_needs.iter().enumerate() {
            if r == s {
                continue;
            }
            let dst = table.block(r);
            for i in src.clone() {
                for (offset, k) in dst.clone().enumerate() {
                    value += sys.a[(i, k)] * needs[offset];
                }
            }
        }
        let gross: f64 = src.clone().map(|i| exports[i]).sum();
        out.push(I2eSelling {
            country: table.countries()[s].clone(),
            value,
            share_of_exports: (gross > 0.0).then(|| value / gross),
        });
    }
    Ok(out)
}

/// Weighting variant for the forward-linkage measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DvxWeighting {
    /// Third countries' gross exports (includes their foreign content).
    #[default]
    GrossExports,
    /// Third countries' domestic output produced for export (domestic
    /// Leontief propagation of their export vectors).
    DomesticOutputForExport,
}

/// Domestic value added embodied in third countries' exports, per
/// country (aligned with `table.countries()`).
pub fn dvx(table: &IcioTable) -> Result<Vec<f64>, LeontiefError> {
    dvx_weighted(table, DvxWeighting::GrossExports)
}

pub fn dvx_weighted(table: &IcioTable, weighting: DvxWeighting) -> Result<Vec<f64>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    dvx_weighted_with(table, &sys, weighting)
}

/// As [`dvx_weighted`], reusing an already-computed coefficient system.
pub fn dvx_weighted_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
    weighting: DvxWeighting,
) -> Result<Vec<f64>, LeontiefError> {
    let exports = exports_vector(table);
    let weights = match weighting {
        DvxWeighting::GrossExports => exports.clone(),
        DvxWeighting::DomesticOutputForExport => {
            let mut w = DVector::zeros(table.n());
            for r in 0..table.num_countries() {
                let range = table.block(r);
                let e_r = exports.rows(range.start, range.len()).into_owned();
                let needs = domestic_leontief(&sys.a, range.clone())? * e_r;
                for (offset, i) in range.enumerate() {
                    w[i] = needs[offset];
                }
            }
            w
        }
    };
    let t = va_source_matrix(&sys, &weights)?;
    let mut out = vec![0.0; table.num_countries()];
    for (s, slot) in out.iter_mut().enumerate() {
        let src = table.block(s);
        for i in src {
            for j in 0..table.n() {
                if table.country_of(j) != s {
                    *slot += t[(i, j)];
                }
            }
        }
    }
    Ok(out)
}

/// C x C matrix of value added by country of origin (rows) and country
/// of final absorption (columns). Row sums equal each country's total
/// value added.
pub fn va_by_destination(table: &IcioTable) -> Result<DMatrix<f64>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    va_by_destination_with(table, &sys)
}

/// As [`va_by_destination`], reusing an already-computed coefficient
/// system.
pub fn va_by_destination_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<DMatrix<f64>, LeontiefError> {
    let c_count = table.num_countries();
    // Producer-level value added absorbed in each destination.
    let bf = &sys.b * table.f();
    let mut w = DMatrix::zeros(c_count, c_count);
    for s in 0..c_count {
        for i in table.block(s) {
            for r in 0..c_count {
                w[(s, r)] += sys.v[i] * bf[(i, r)];
            }
        }
    }
    Ok(w)
}

/// Expected number of downstream stages between each producer and final
/// demand: U = (I - Delta)^-1 * 1 with Delta[i,j] = Z[i,j]/x[i].
pub fn upstreamness(table: &IcioTable) -> Result<DVector<f64>, LeontiefError> {
    let n = table.n();
    for i in 0..n {
        if table.x()[i] <= 0.0 {
            return Err(LeontiefError::ZeroOutput(i));
        }
    }
    let delta = DMatrix::from_fn(n, n, |i, j| {
        let v = if i == j { 1.0 } else { 0.0 };
        v - table.z()[(i, j)] / table.x()[i]
    });
    let u = delta
        .lu()
        .solve(&DVector::from_element(n, 1.0))
        .ok_or(LeontiefError::NonProductive)?;
    if u.iter().any(|v| !v.is_finite() || *v < 1.0 - 1e-9) {
        return Err(LeontiefError::NonProductive);
    }
    Ok(u)
}

/// Gap between each sector's selling and buying chain lengths on the
/// domestic-only submatrix of its country (inter-country flows treated
/// as final/primary).
pub fn chain_gap(table: &IcioTable) -> Result<DVector<f64>, LeontiefError> {
    let n = table.n();
    let mut gap = DVector::zeros(n);
    for c in 0..table.num_countries() {
        let range = table.block(c);
        let len = range.len();
        for i in range.clone() {
            if table.x()[i] <= 0.0 {
                return Err(LeontiefError::ZeroOutput(i));
            }
        }
        let a_cc = DMatrix::from_fn(len, len, |i, j| {
            table.z()[(range.start + i, range.start + j)] / table.x()[range.start + j]
        });
        let delta_cc = DMatrix::from_fn(len, len, |i, j| {
            table.z()[(range.start + i, range.start + j)] / table.x()[range.start + i]
        });
        let u_dom = crate::leontief::leontief_inverse(&delta_cc)? * DVector::from_element(len, 1.0);
        let l_dd = crate::leontief::leontief_inverse(&a_cc)?;
        for (offset, i) in range.enumerate() {
            let n_dom: f64 = l_dd.column(offset).iter().sum();
            gap[i] = u_dom[offset] - n_dom;
        }
    }
    Ok(gap)
}

/// Backward plus forward GVC engagement as shares of gross exports;
/// absent for countries with zero exports.
#[derive(Debug, Clone)]
pub struct Participation {
    pub country: String,
    pub backward: Option<f64>,
    pub forward: Option<f64>,
    pub total: Option<f64>,
}

pub fn participation_index(table: &IcioTable) -> Result<Vec<Participation>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    participation_index_with(table, &sys)
}

/// As [`participation_index`], reusing an already-computed coefficient
/// system.
pub fn participation_index_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<Participation>, LeontiefError> {
    let decompositions = crate::backward::dva_fva_with(table, sys)?;
    let forward = dvx_weighted_with(table, sys, DvxWeighting::GrossExports)?;
    Ok(decompositions
        .iter()
        .zip(forward)
        .map(|(d, dvx_value)| {
            let defined = d.gross_exports > 0.0;
            Participation {
                country: d.exporter.clone(),
                backward: defined.then(|| d.fva / d.gross_exports),
                forward: defined.then(|| dvx_value / d.gross_exports),
                total: defined.then(|| (d.fva + dvx_value) / d.gross_exports),
            }
        })
        .collect())
}
