//! Decomposition of gross export growth between two table years into
//! value-added components.

use thiserror::Error;

use crate::backward::dva_fva;
use crate::icio::IcioTable;
use crate::leontief::LeontiefError;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("tables do not share the same country/sector scheme")]
    SchemeMismatch,
    #[error(transparent)]
    Leontief(#[from] LeontiefError),
}

/// Per-country change in gross exports and its four components, in
/// levels.
#[derive(Debug, Clone)]
pub struct GrowthDecomposition {
    pub country: String,
    pub delta_exports: f64,
    pub delta_direct: f64,
    pub delta_indirect: f64,
    pub delta_reimported: f64,
    pub delta_fva: f64,
    /// Deltas over base-year exports; absent when base exports are zero.
    pub contributions: Option<GrowthContributions>,
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthContributions {
    pub exports: f64,
    pub direct: f64,
    pub indirect: f64,
    pub reimported: f64,
    pub fva: f64,
}

pub fn export_growth_decomposition(
    t0: &IcioTable,
    t1: &IcioTable,
) -> Result<Vec<GrowthDecomposition>, GrowthError> {
    if t0.countries() != t1.countries()
        || t0.sectors().len() != t1.sectors().len()
        || t0
            .sectors()
            .iter()
            .zip(t1.sectors())
            .any(|(a, b)| a.code != b.code)
    {
        return Err(GrowthError::SchemeMismatch);
    }
    let base = dva_fva(t0)?;
    let next = dva_fva(t1)?;
    Ok(base
        .iter()
        .zip(next)
        .map(|(d0, d1)| {
            let delta_exports = d1.gross_exports - d0.gross_exports;
            let delta_direct = d1.dva_direct - d0.dva_direct;
            let delta_indirect = d1.dva_indirect - d0.dva_indirect;
            let delta_reimported = d1.dva_reimported - d0.dva_reimported;
            let delta_fva = d1.fva - d0.fva;
            let contributions = (d0.gross_exports > 0.0).then(|| GrowthContributions {
                exports: delta_exports / d0.gross_exports,
                direct: delta_direct / d0.gross_exports,
                indirect: delta_indirect / d0.gross_exports,
                reimported: delta_reimported / d0.gross_exports,
                fva: delta_fva / d0.gross_exports,
            });
            GrowthDecomposition {
                country: d0.exporter.clone(),
                delta_exports,
                delta_direct,
                delta_indirect,
                delta_reimported,
                delta_fva,
                contributions,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_tables_give_zero_deltas() {
        let t = fixtures::e2();
        let d = export_growth_decomposition(&t, &t).unwrap();
        for row in d {
            assert_abs_diff_eq!(row.delta_exports, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(row.delta_direct, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(row.delta_fva, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn uniform_scaling_scales_components() {
        let t0 = fixtures::e2();
        let t1 = t0.scaled(1.1);
        let d = export_growth_decomposition(&t0, &t1).unwrap();
        let a = &d[0];
        assert_abs_diff_eq!(a.delta_exports, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a.delta_direct, 2.1, epsilon = 1e-9);
        assert_abs_diff_eq!(a.delta_indirect, 0.525, epsilon = 1e-9);
        assert_abs_diff_eq!(a.delta_reimported, 0.1 * 0.477272727273, epsilon = 1e-9);
        assert_abs_diff_eq!(a.delta_fva, 0.1 * 3.272727272727, epsilon = 1e-9);
        let sum = a.delta_direct + a.delta_indirect + a.delta_reimported + a.delta_fva;
        assert_abs_diff_eq!(sum, a.delta_exports, epsilon = 1e-9);
    }

    #[test]
    fn scheme_mismatch_rejected() {
        let err = export_growth_decomposition(&fixtures::e2(), &fixtures::aut()).unwrap_err();
        assert!(matches!(err, GrowthError::SchemeMismatch));
    }
}
