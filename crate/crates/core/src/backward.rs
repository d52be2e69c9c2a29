//! Buyer's-perspective measures: where a country's exports are made and
//! whose value added they embody.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::icio::{exports_vector, IcioTable};
use crate::leontief::{leontief_inverse, LeontiefError, LeontiefSystem};

/// Inverse of the domestic block (I - A^cc) for one country.
pub(crate) fn domestic_leontief(
    a: &DMatrix<f64>,
    range: std::ops::Range<usize>,
) -> Result<DMatrix<f64>, LeontiefError> {
    let block = a.view_range(range.clone(), range).into_owned();
    leontief_inverse(&block)
}

/// T[i,j] = v[i] * B[i,j] * E[j]: value added originating at producer i
/// embodied in producer j's gross exports.
pub fn va_source_matrix(
    sys: &LeontiefSystem,
    exports: &DVector<f64>,
) -> Result<DMatrix<f64>, LeontiefError> {
    let n = sys.n();
    if exports.len() != n {
        return Err(LeontiefError::DimensionMismatch(format!(
            "exports length {} vs system order {n}",
            exports.len()
        )));
    }
    let mut t = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            t[(i, j)] = sys.v[i] * sys.b[(i, j)] * exports[j];
        }
    }
    Ok(t)
}

/// Per-exporter split of gross exports into domestic and foreign value
/// added, with the three-way domestic decomposition.
#[derive(Debug, Clone)]
pub struct SourceDecomposition {
    pub exporter: String,
    pub gross_exports: f64,
    pub dva: f64,
    pub fva: f64,
    pub dva_direct: f64,
    pub dva_indirect: f64,
    pub dva_reimported: f64,
    pub fva_by_source: BTreeMap<String, f64>,
    /// Component shares of gross exports; absent when exports are zero.
    pub shares: Option<DecompositionShares>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecompositionShares {
    pub dva: f64,
    pub fva: f64,
    pub dva_direct: f64,
    pub dva_indirect: f64,
    pub dva_reimported: f64,
}

/// DVA/FVA decomposition of each country's gross exports.
///
/// Domestic value added splits into direct (the exporting producer's own
/// value added), indirect (upstream domestic suppliers, via the domestic
/// Leontief block), and re-imported (domestic content that left the
/// country and came back, the gap between the global and domestic
/// own-country blocks).
pub fn dva_fva(table: &IcioTable) -> Result<Vec<SourceDecomposition>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    dva_fva_with(table, &sys)
}

/// As [`dva_fva`], reusing an already-computed coefficient system.
pub fn dva_fva_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<SourceDecomposition>, LeontiefError> {
    let exports = exports_vector(table);
    let t = va_source_matrix(sys, &exports)?;
    let mut out = Vec::with_capacity(table.num_countries());
    for c in 0..table.num_countries() {
        let range = table.block(c);
        let e_c = exports.rows(range.start, range.len()).into_owned();
        let gross: f64 = e_c.iter().sum();

        let mut dva = 0.0;
        let mut fva_by_source = BTreeMap::new();
        for s in 0..table.num_countries() {
            let src = table.block(s);
            let mut total = 0.0;
            for i in src.clone() {
                for j in range.clone() {
                    total += t[(i, j)];
                }
            }
            if s == c {
                dva = total;
            } else {
                fva_by_source.insert(table.countries()[s].clone(), total);
            }
        }
        let fva: f64 = fva_by_source.values().sum();

        let v_c = sys.v.rows(range.start, range.len()).into_owned();
        let direct: f64 = v_c.iter().zip(e_c.iter()).map(|(v, e)| v * e).sum();
        let l_dd = domestic_leontief(&sys.a, range.clone())?;
        let b_cc = sys
            .b
            .view_range(range.clone(), range.clone())
            .into_owned();
        let indirect =
            (v_c.transpose() * (&l_dd - DMatrix::identity(range.len(), range.len())) * &e_c)[0];
        let reimported = (v_c.transpose() * (&b_cc - &l_dd) * &e_c)[0];

        let shares = if gross > 0.0 {
            Some(DecompositionShares {
                dva: dva / gross,
                fva: fva / gross,
                dva_direct: direct / gross,
                dva_indirect: indirect / gross,
                dva_reimported: reimported / gross,
            })
        } else {
            None
        };
        out.push(SourceDecomposition {
            exporter: table.countries()[c].clone(),
            gross_exports: gross,
            dva,
            fva,
            dva_direct: direct,
            dva_indirect: indirect,
            dva_reimported: reimported,
            fva_by_source,
            shares,
        });
    }
    Ok(out)
}

/// Imported intermediates embodied in a country's exports, against its
/// total intermediate imports.
#[derive(Debug, Clone)]
pub struct I2eBackward {
    pub country: String,
    pub embodied_imports: f64,
    pub total_intermediate_imports: f64,
    /// Absent when the country imports no intermediates.
    pub ratio: Option<f64>,
    pub by_source: BTreeMap<String, f64>,
}

/// Buyer-side I2E: foreign intermediates absorbed, directly or through
/// domestic suppliers, into each country's gross exports.
pub fn i2e_backward(table: &IcioTable) -> Result<Vec<I2eBackward>, LeontiefError> {
    let sys = LeontiefSystem::from_table(table)?;
    i2e_backward_with(table, &sys)
}

/// As [`i2e_backward`], reusing an already-computed coefficient system.
pub fn i2e_backward_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<I2eBackward>, LeontiefError> {
    let exports = exports_vector(table);
    let mut out = Vec::with_capacity(table.num_countries());
    for c in 0..table.num_countries() {
        let range = table.block(c);
        let e_c = exports.rows(range.start, range.len()).into_owned();
        let l_dd = domestic_leontief(&sys.a, range.clone())?;
        // Gross output required domestically to produce the exports.
        let m = &l_dd * &e_c;

        let mut by_source = BTreeMap::new();
        let mut total_imports = 0.0;
        for s in 0..table.num_countries() {
            if s == c {
                continue;
            }
            let src = table.block(s);
            let mut embodied = 0.0;
            for i in src.clone() {
                for (offset, k) in range.clone().enumerate() {
                    embodied += sys.a[(i, k)] * m[offset];
                    total_imports += table.z()[(i, k)];
                }
            }
            by_source.insert(table.countries()[s].clone(), embodied);
        }
        let embodied: f64 = by_source.values().sum();
        let ratio = if total_imports > 0.0 {
            Some(embodied / total_imports)
        } else {
            None
        };
        out.push(I2eBackward {
            country: table.countries()[c].clone(),
            embodied_imports: embodied,
            total_intermediate_imports: total_imports,
            ratio,
            by_source,
        });
    }
    Ok(out)
}

/// Average number of production stages embodied in each producer's
/// inputs: column sums of B. Always >= 1.
pub fn sourcing_chain_length(sys: &LeontiefSystem) -> DVector<f64> {
    let n = sys.n();
    DVector::from_fn(n, |j, _| sys.b.column(j).iter().sum())
}
