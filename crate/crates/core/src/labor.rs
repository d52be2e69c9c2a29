//! Labor and jobs content of trade: direct social-upgrading measures.

use nalgebra::DVector;
use thiserror::Error;

use crate::backward::domestic_leontief;
use crate::icio::{exports_vector, IcioTable};
use crate::leontief::{LeontiefError, LeontiefSystem};

#[derive(Debug, Error)]
pub enum LaborError {
    #[error("table has no {0} vector")]
    MissingVector(&'static str),
    #[error("no sector is flagged manufacturing")]
    NoManufacturingSectors,
    #[error(transparent)]
    Leontief(#[from] LeontiefError),
}

/// Denominator basis for labor coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaborBasis {
    /// Employment in persons.
    Persons,
    /// Wage bill in currency units.
    WageCost,
}

fn basis_vector<'t>(table: &'t IcioTable, basis: LaborBasis) -> Result<&'t DVector<f64>, LaborError> {
    match basis {
        LaborBasis::Persons => table.emp().ok_or(LaborError::MissingVector("emp")),
        LaborBasis::WageCost => table.wages().ok_or(LaborError::MissingVector("wages")),
    }
}

/// l[i] = emp[i]/x[i] (or wages[i]/x[i]); zero where output is zero.
pub fn labor_coefficients(table: &IcioTable, basis: LaborBasis) -> Result<DVector<f64>, LaborError> {
    let source = basis_vector(table, basis)?;
    Ok(DVector::from_fn(table.n(), |i, _| {
        if table.x()[i] > 0.0 {
            source[i] / table.x()[i]
        } else {
            0.0
        }
    }))
}

/// Labor embodied in a country's gross exports, split by where the
/// workers are.
#[derive(Debug, Clone)]
pub struct LaborContent {
    pub country: String,
    pub total: f64,
    pub domestic: f64,
    pub foreign: f64,
}

pub fn labor_content_of_exports(
    table: &IcioTable,
    basis: LaborBasis,
) -> Result<Vec<LaborContent>, LaborError> {
    let sys = LeontiefSystem::from_table(table)?;
    labor_content_of_exports_with(table, &sys, basis)
}

/// As [`labor_content_of_exports`], reusing a coefficient system.
pub fn labor_content_of_exports_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
    basis: LaborBasis,
) -> Result<Vec<LaborContent>, LaborError> {
    let l = labor_coefficients(table, basis)?;
    let exports = exports_vector(table);
    let mut out = Vec::with_capacity(table.num_countries());
    for c in 0..table.num_countries() {
        let mut domestic = 0.0;
        let mut foreign = 0.0;
        for j in table.block(c) {
            for i in 0..table.n() {
                let content = l[i] * sys.b[(i, j)] * exports[j];
                if table.country_of(i) == c {
                    domestic += content;
                } else {
                    foreign += content;
                }
            }
        }
        out.push(LaborContent {
            country: table.countries()[c].clone(),
            total: domestic + foreign,
            domestic,
            foreign,
        });
    }
    Ok(out)
}

/// Jobs in each country sustained by final demand expressed abroad
/// (persons basis), aligned with `table.countries()`.
pub fn jobs_foreign_final_demand(table: &IcioTable) -> Result<Vec<f64>, LaborError> {
    let sys = LeontiefSystem::from_table(table)?;
    jobs_foreign_final_demand_with(table, &sys)
}

/// As [`jobs_foreign_final_demand`], reusing a coefficient system.
pub fn jobs_foreign_final_demand_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<f64>, LaborError> {
    let l = labor_coefficients(table, LaborBasis::Persons)?;
    let mut out = vec![0.0; table.num_countries()];
    for (c, slot) in out.iter_mut().enumerate() {
        let f_foreign = DVector::from_fn(table.n(), |i, _| {
            (0..table.num_countries())
                .filter(|&r| r != c)
                .map(|r| table.f()[(i, r)])
                .sum()
        });
        let sustained = &sys.b * f_foreign;
        for i in table.block(c) {
            *slot += l[i] * sustained[i];
        }
    }
    Ok(out)
}

/// Split of foreign-demand jobs into the final-goods and intermediates
/// trade channels.
#[derive(Debug, Clone)]
pub struct JobsByChannel {
    pub country: String,
    pub final_goods_trade: f64,
    pub intermediates_trade: f64,
}

/// The final-goods channel counts jobs reachable through domestic-only
/// input propagation serving directly exported final goods; the
/// remainder of foreign-demand jobs is attributed to intermediates
/// trade.
pub fn jobs_by_channel(table: &IcioTable) -> Result<Vec<JobsByChannel>, LaborError> {
    let sys = LeontiefSystem::from_table(table)?;
    jobs_by_channel_with(table, &sys)
}

/// As [`jobs_by_channel`], reusing a coefficient system.
pub fn jobs_by_channel_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<Vec<JobsByChannel>, LaborError> {
    let l = labor_coefficients(table, LaborBasis::Persons)?;
    let total = jobs_foreign_final_demand_with(table, sys)?;
    let mut out = Vec::with_capacity(table.num_countries());
    for c in 0..table.num_countries() {
        let range = table.block(c);
        let f_exported = DVector::from_fn(range.len(), |offset, _| {
            let i = range.start + offset;
            (0..table.num_countries())
                .filter(|&r| r != c)
                .map(|r| table.f()[(i, r)])
                .sum()
        });
        let l_dd = domestic_leontief(&sys.a, range.clone())?;
        let sustained = l_dd * f_exported;
        let mut final_goods = 0.0;
        for (offset, i) in range.enumerate() {
            final_goods += l[i] * sustained[offset];
        }
        out.push(JobsByChannel {
            country: table.countries()[c].clone(),
            final_goods_trade: final_goods,
            intermediates_trade: total[c] - final_goods,
        });
    }
    Ok(out)
}

/// Jobs anywhere in the system involved in producing final manufacturing
/// goods, per producer.
pub fn gvc_manufacturing_jobs(table: &IcioTable) -> Result<DVector<f64>, LaborError> {
    let sys = LeontiefSystem::from_table(table)?;
    gvc_manufacturing_jobs_with(table, &sys)
}

/// As [`gvc_manufacturing_jobs`], reusing a coefficient system.
pub fn gvc_manufacturing_jobs_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<DVector<f64>, LaborError> {
    if !table.sectors().iter().any(|s| s.manufacturing) {
        return Err(LaborError::NoManufacturingSectors);
    }
    let l = labor_coefficients(table, LaborBasis::Persons)?;
    let f_manuf = DVector::from_fn(table.n(), |i, _| {
        if table.sectors()[table.sector_of(i)].manufacturing {
            table.f().row(i).iter().sum()
        } else {
            0.0
        }
    });
    let sustained = &sys.b * f_manuf;
    Ok(DVector::from_fn(table.n(), |i, _| l[i] * sustained[i]))
}

/// All jobs sustained by all final demand; equals total employment for
/// balanced tables.
pub fn total_embodied_jobs(table: &IcioTable) -> Result<f64, LaborError> {
    let sys = LeontiefSystem::from_table(table)?;
    total_embodied_jobs_with(table, &sys)
}

/// As [`total_embodied_jobs`], reusing a coefficient system.
pub fn total_embodied_jobs_with(
    table: &IcioTable,
    sys: &LeontiefSystem,
) -> Result<f64, LaborError> {
    let l = labor_coefficients(table, LaborBasis::Persons)?;
    let f_total = table.f() * DVector::from_element(table.num_countries(), 1.0);
    let sustained = &sys.b * f_total;
    Ok(l.iter().zip(sustained.iter()).map(|(a, b)| a * b).sum())
}
