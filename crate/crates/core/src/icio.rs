//! Inter-country input-output table: data model, balance validation,
//! aggregation and export extraction.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IcioError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative entry in {field} at index {index}: {value}")]
    NegativeEntry {
        field: &'static str,
        index: usize,
        value: f64,
    },
    #[error("non-finite entry in {field} at index {index}")]
    NonFinite { field: &'static str, index: usize },
    #[error("wages exceed value added at producer {0}")]
    WagesExceedValueAdded(usize),
    #[error("code {0:?} missing from aggregation map")]
    UnmappedCode(String),
    #[error("duplicate code {0:?}")]
    DuplicateCode(String),
}

/// Sector descriptor with broad activity flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub code: String,
    #[serde(default)]
    pub manufacturing: bool,
    #[serde(default)]
    pub services: bool,
}

impl Sector {
    pub fn new(code: impl Into<String>) -> Self {
        Sector {
            code: code.into(),
            manufacturing: false,
            services: false,
        }
    }

    pub fn manufacturing(code: impl Into<String>) -> Self {
        Sector {
            code: code.into(),
            manufacturing: true,
            services: false,
        }
    }

    pub fn services(code: impl Into<String>) -> Self {
        Sector {
            code: code.into(),
            manufacturing: false,
            services: true,
        }
    }
}

/// A balanced multi-country, multi-sector input-output snapshot.
///
/// Producers are indexed country-major: producer `i` belongs to country
/// `i / sectors.len()` and sector `i % sectors.len()`. Immutable after
/// construction; every operation on it is a pure function.
#[derive(Debug, Clone, PartialEq)]
pub struct IcioTable {
    countries: Vec<String>,
    sectors: Vec<Sector>,
    year: i32,
    z: DMatrix<f64>,
    f: DMatrix<f64>,
    va: DVector<f64>,
    x: DVector<f64>,
    emp: Option<DVector<f64>>,
    wages: Option<DVector<f64>>,
}

fn check_nonneg(field: &'static str, v: impl Iterator<Item = f64>) -> Result<(), IcioError> {
    for (index, value) in v.enumerate() {
        if !value.is_finite() {
            return Err(IcioError::NonFinite { field, index });
        }
        if value < 0.0 {
            return Err(IcioError::NegativeEntry {
                field,
                index,
                value,
            });
        }
    }
    Ok(())
}

impl IcioTable {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        countries: Vec<String>,
        sectors: Vec<Sector>,
        year: i32,
        z: DMatrix<f64>,
        f: DMatrix<f64>,
        va: DVector<f64>,
        x: DVector<f64>,
        emp: Option<DVector<f64>>,
        wages: Option<DVector<f64>>,
    ) -> Result<Self, IcioError> {
        let n = countries.len() * sectors.len();
        let c = countries.len();
        if z.nrows() != n || z.ncols() != n {
            return Err(IcioError::DimensionMismatch(format!(
                "Z is {}x{}, expected {n}x{n}",
                z.nrows(),
                z.ncols()
            )));
        }
        if f.nrows() != n || f.ncols() != c {
            return Err(IcioError::DimensionMismatch(format!(
                "F is {}x{}, expected {n}x{c}",
                f.nrows(),
                f.ncols()
            )));
        }
        for (name, v) in [("va", &va), ("x", &x)] {
            if v.len() != n {
                return Err(IcioError::DimensionMismatch(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
        }
        for (name, v) in [("emp", &emp), ("wages", &wages)] {
            if let Some(v) = v {
                if v.len() != n {
                    return Err(IcioError::DimensionMismatch(format!(
                        "{name} has length {}, expected {n}",
                        v.len()
                    )));
                }
            }
        }
        for code in countries.iter() {
            if countries.iter().filter(|c| *c == code).count() > 1 {
                return Err(IcioError::DuplicateCode(code.clone()));
            }
        }
        for s in sectors.iter() {
            if sectors.iter().filter(|t| t.code == s.code).count() > 1 {
                return Err(IcioError::DuplicateCode(s.code.clone()));
            }
        }
        check_nonneg("Z", z.iter().copied())?;
        check_nonneg("F", f.iter().copied())?;
        check_nonneg("va", va.iter().copied())?;
        check_nonneg("x", x.iter().copied())?;
        if let Some(e) = &emp {
            check_nonneg("emp", e.iter().copied())?;
        }
        if let Some(w) = &wages {
            check_nonneg("wages", w.iter().copied())?;
            for i in 0..n {
                if w[i] > va[i] + 1e-9 * va[i].max(1.0) {
                    return Err(IcioError::WagesExceedValueAdded(i));
                }
            }
        }
        Ok(IcioTable {
            countries,
            sectors,
            year,
            z,
            f,
            va,
            x,
            emp,
            wages,
        })
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn z(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    pub fn va(&self) -> &DVector<f64> {
        &self.va
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn emp(&self) -> Option<&DVector<f64>> {
        self.emp.as_ref()
    }

    pub fn wages(&self) -> Option<&DVector<f64>> {
        self.wages.as_ref()
    }

    /// Number of producers (countries x sectors).
    pub fn n(&self) -> usize {
        self.countries.len() * self.sectors.len()
    }

    pub fn num_countries(&self) -> usize {
        self.countries.len()
    }

    pub fn num_sectors(&self) -> usize {
        self.sectors.len()
    }

    /// Country index of producer `i`.
    pub fn country_of(&self, i: usize) -> usize {
        i / self.sectors.len()
    }

    /// Sector index of producer `i`.
    pub fn sector_of(&self, i: usize) -> usize {
        i % self.sectors.len()
    }

    /// Producer index range of country `c`.
    pub fn block(&self, c: usize) -> std::ops::Range<usize> {
        let s = self.sectors.len();
        c * s..(c + 1) * s
    }

    /// Producer label of the form `CCC.SSS`.
    pub fn label(&self, i: usize) -> String {
        format!(
            "{}.{}",
            self.countries[self.country_of(i)],
            self.sectors[self.sector_of(i)].code
        )
    }

    /// Uniformly rescale every monetary field by `lambda` (Z, F, va, x,
    /// wages; employment in persons is untouched).
    pub fn scaled(&self, lambda: f64) -> IcioTable {
        IcioTable {
            countries: self.countries.clone(),
            sectors: self.sectors.clone(),
            year: self.year,
            z: &self.z * lambda,
            f: &self.f * lambda,
            va: &self.va * lambda,
            x: &self.x * lambda,
            emp: self.emp.clone(),
            wages: self.wages.as_ref().map(|w| w * lambda),
        }
    }
}

/// Which side of the accounting identity a residual violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BalanceKind {
    Row,
    Column,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceViolation {
    pub index: usize,
    pub label: String,
    pub kind: BalanceKind,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    pub passed: bool,
    pub worst_row_residual: f64,
    pub worst_col_residual: f64,
    pub violations: Vec<BalanceViolation>,
}

/// Check the row identity `x[i] = sum_j Z[i,j] + sum_r F[i,r]` and the
/// column identity `x[j] = sum_i Z[i,j] + va[j]`. Residuals are relative,
/// normalized by `max(1, x)` so tiny economies do not trip the check.
pub fn validate_balance(table: &IcioTable, tol: f64) -> BalanceReport {
    let n = table.n();
    let mut worst_row = 0.0f64;
    let mut worst_col = 0.0f64;
    let mut violations = Vec::new();
    for i in 0..n {
        let rowsum: f64 = table.z.row(i).iter().sum::<f64>() + table.f.row(i).iter().sum::<f64>();
        let residual = (table.x[i] - rowsum).abs() / table.x[i].max(1.0);
        worst_row = worst_row.max(residual);
        if residual > tol {
            violations.push(BalanceViolation {
                index: i,
                label: table.label(i),
                kind: BalanceKind::Row,
                residual,
            });
        }
    }
    for j in 0..n {
        let colsum: f64 = table.z.column(j).iter().sum::<f64>() + table.va[j];
        let residual = (table.x[j] - colsum).abs() / table.x[j].max(1.0);
        worst_col = worst_col.max(residual);
        if residual > tol {
            violations.push(BalanceViolation {
                index: j,
                label: table.label(j),
                kind: BalanceKind::Column,
                residual,
            });
        }
    }
    BalanceReport {
        passed: violations.is_empty(),
        worst_row_residual: worst_row,
        worst_col_residual: worst_col,
        violations,
    }
}

/// Gross exports per producer: intermediate plus final sales to any
/// foreign country.
pub fn exports_vector(table: &IcioTable) -> DVector<f64> {
    let n = table.n();
    let mut e = DVector::zeros(n);
    for i in 0..n {
        let home = table.country_of(i);
        let mut total = 0.0;
        for j in 0..n {
            if table.country_of(j) != home {
                total += table.z[(i, j)];
            }
        }
        for r in 0..table.num_countries() {
            if r != home {
                total += table.f[(i, r)];
            }
        }
        e[i] = total;
    }
    e
}

fn group_targets(
    codes: &[String],
    map: &BTreeMap<String, String>,
) -> Result<(Vec<String>, Vec<usize>), IcioError> {
    // New codes ordered by first appearance in the old ordering.
    let mut new_codes: Vec<String> = Vec::new();
    let mut assignment = Vec::with_capacity(codes.len());
    for code in codes {
        let target = map
            .get(code)
            .ok_or_else(|| IcioError::UnmappedCode(code.clone()))?;
        let pos = match new_codes.iter().position(|c| c == target) {
            Some(p) => p,
            None => {
                new_codes.push(target.clone());
                new_codes.len() - 1
            }
        };
        assignment.push(pos);
    }
    Ok((new_codes, assignment))
}

/// Sum producers into country/sector groups. Grand totals of Z, F, va, x
/// are preserved exactly (fixed ascending-index summation order); the
/// result satisfies the same balance invariants as the input.
pub fn aggregate(
    table: &IcioTable,
    country_groups: &BTreeMap<String, String>,
    sector_groups: &BTreeMap<String, String>,
) -> Result<IcioTable, IcioError> {
    let (new_countries, cmap) = group_targets(table.countries(), country_groups)?;
    let old_sector_codes: Vec<String> = table.sectors.iter().map(|s| s.code.clone()).collect();
    let (new_sector_codes, smap) = group_targets(&old_sector_codes, sector_groups)?;

    // Group sector flags are the union of member flags.
    let mut new_sectors: Vec<Sector> = new_sector_codes.into_iter().map(Sector::new).collect();
    for (old, s) in table.sectors.iter().enumerate() {
        let t = &mut new_sectors[smap[old]];
        t.manufacturing |= s.manufacturing;
        t.services |= s.services;
    }

    let ns = new_sectors.len();
    let n_new = new_countries.len() * ns;
    let remap = |i: usize| cmap[table.country_of(i)] * ns + smap[table.sector_of(i)];

    let n = table.n();
    let mut z = DMatrix::zeros(n_new, n_new);
    let mut f = DMatrix::zeros(n_new, new_countries.len());
    let mut va = DVector::zeros(n_new);
    let mut x = DVector::zeros(n_new);
    let mut emp = table.emp.as_ref().map(|_| DVector::zeros(n_new));
    let mut wages = table.wages.as_ref().map(|_| DVector::zeros(n_new));

    for i in 0..n {
        let ni = remap(i);
        for j in 0..n {
            z[(ni, remap(j))] += table.z[(i, j)];
        }
        for r in 0..table.num_countries() {
            f[(ni, cmap[r])] += table.f[(i, r)];
        }
        va[ni] += table.va[i];
        x[ni] += table.x[i];
        if let (Some(acc), Some(src)) = (emp.as_mut(), table.emp.as_ref()) {
            acc[ni] += src[i];
        }
        if let (Some(acc), Some(src)) = (wages.as_mut(), table.wages.as_ref()) {
            acc[ni] += src[i];
        }
    }

    IcioTable::new(
        new_countries,
        new_sectors,
        table.year,
        z,
        f,
        va,
        x,
        emp,
        wages,
    )
}

/// Identity aggregation map over a code list.
pub fn identity_map<'a>(codes: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, String> {
    codes
        .into_iter()
        .map(|c| (c.to_string(), c.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    #[test]
    fn e2_balances_exactly() {
        let t = fixtures::e2();
        let report = validate_balance(&t, 1e-9);
        assert!(report.passed);
        assert_abs_diff_eq!(report.worst_row_residual, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.worst_col_residual, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn perturbed_e2_fails_with_row_residual() {
        let t = fixtures::e2();
        let mut z = t.z().clone();
        z[(0, 0)] = 21.0;
        let t = IcioTable::new(
            t.countries().to_vec(),
            t.sectors().to_vec(),
            t.year(),
            z,
            t.f().clone(),
            t.va().clone(),
            t.x().clone(),
            None,
            None,
        )
        .unwrap();
        let report = validate_balance(&t, 1e-9);
        assert!(!report.passed);
        let row_violation = report
            .violations
            .iter()
            .find(|v| v.kind == BalanceKind::Row)
            .unwrap();
        assert_eq!(row_violation.index, 0);
        assert_abs_diff_eq!(row_violation.residual, 0.01, epsilon = 1e-12);
    }

    #[test]
    fn noint_balances() {
        assert!(validate_balance(&fixtures::noint(), 1e-9).passed);
    }

    #[test]
    fn exports_of_fixtures() {
        let e = exports_vector(&fixtures::e2());
        assert_abs_diff_eq!(e[0], 30.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 25.0, epsilon = 1e-12);

        let e = exports_vector(&fixtures::aut());
        assert_abs_diff_eq!(e[0], 0.0, epsilon = 1e-12);

        let e = exports_vector(&fixtures::noint());
        assert_abs_diff_eq!(e[0], 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn aggregate_to_world() {
        let t = fixtures::e2();
        let cmap: BTreeMap<String, String> = [("A", "W"), ("B", "W")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let smap = identity_map(["S"]);
        let w = aggregate(&t, &cmap, &smap).unwrap();
        assert_eq!(w.num_countries(), 1);
        assert_abs_diff_eq!(w.z()[(0, 0)], 70.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.x()[0], 200.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.va()[0], 130.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.f()[(0, 0)], 130.0, epsilon = 1e-12);
        assert!(validate_balance(&w, 1e-9).passed);
    }

    #[test]
    fn aggregate_identity_is_noop() {
        let t = fixtures::e2();
        let cmap = identity_map(t.countries().iter().map(|s| s.as_str()));
        let smap = identity_map(t.sectors().iter().map(|s| s.code.as_str()));
        let u = aggregate(&t, &cmap, &smap).unwrap();
        assert_eq!(t, u);
    }

    #[test]
    fn aggregate_partial_map_rejected() {
        let t = fixtures::e2();
        let cmap: BTreeMap<String, String> = [("A".to_string(), "W".to_string())].into();
        let smap = identity_map(["S"]);
        match aggregate(&t, &cmap, &smap) {
            Err(IcioError::UnmappedCode(code)) => assert_eq!(code, "B"),
            other => panic!("expected UnmappedCode, got {other:?}"),
        }
    }

    #[test]
    fn negative_entry_rejected() {
        let z = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let err = IcioTable::new(
            vec!["A".into()],
            vec![Sector::new("S")],
            2020,
            z,
            DMatrix::from_row_slice(1, 1, &[101.0]),
            DVector::from_vec(vec![80.0]),
            DVector::from_vec(vec![100.0]),
            None,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, IcioError::NegativeEntry { field: "Z", .. }));
    }
}
