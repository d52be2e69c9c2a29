//! Small reference tables used across the test suites and shipped as
//! bundles under `fixtures/`.

use nalgebra::{DMatrix, DVector};

use crate::icio::{IcioTable, Sector};

/// Two countries {A,B}, one sector each, with intermediate trade in both
/// directions, employment attached.
pub fn e2() -> IcioTable {
    IcioTable::new(
        vec!["A".into(), "B".into()],
        vec![Sector::manufacturing("S")],
        2020,
        DMatrix::from_row_slice(2, 2, &[20.0, 10.0, 10.0, 30.0]),
        DMatrix::from_row_slice(2, 2, &[50.0, 20.0, 15.0, 45.0]),
        DVector::from_vec(vec![70.0, 60.0]),
        DVector::from_vec(vec![100.0, 100.0]),
        Some(DVector::from_vec(vec![50.0, 80.0])),
        None,
    )
    .expect("E2 fixture is balanced")
}

/// E2 with the shared sector not flagged manufacturing.
pub fn e2_no_manufacturing() -> IcioTable {
    IcioTable::new(
        vec!["A".into(), "B".into()],
        vec![Sector::new("S")],
        2020,
        DMatrix::from_row_slice(2, 2, &[20.0, 10.0, 10.0, 30.0]),
        DMatrix::from_row_slice(2, 2, &[50.0, 20.0, 15.0, 45.0]),
        DVector::from_vec(vec![70.0, 60.0]),
        DVector::from_vec(vec![100.0, 100.0]),
        Some(DVector::from_vec(vec![50.0, 80.0])),
        None,
    )
    .expect("fixture is balanced")
}

/// E2 where only country A's activity counts as manufacturing. Sector
/// flags are shared across countries, so this is modeled as a two-sector
/// table with one dormant sector per country: A produces in flagged SA,
/// B in unflagged SB.
pub fn e2_only_a_manufacturing() -> IcioTable {
    let mut z = DMatrix::zeros(4, 4);
    z[(0, 0)] = 20.0;
    z[(0, 3)] = 10.0;
    z[(3, 0)] = 10.0;
    z[(3, 3)] = 30.0;
    let mut f = DMatrix::zeros(4, 2);
    f[(0, 0)] = 50.0;
    f[(0, 1)] = 20.0;
    f[(3, 0)] = 15.0;
    f[(3, 1)] = 45.0;
    IcioTable::new(
        vec!["A".into(), "B".into()],
        vec![Sector::manufacturing("SA"), Sector::new("SB")],
        2020,
        z,
        f,
        DVector::from_vec(vec![70.0, 0.0, 0.0, 60.0]),
        DVector::from_vec(vec![100.0, 0.0, 0.0, 100.0]),
        Some(DVector::from_vec(vec![50.0, 0.0, 0.0, 80.0])),
        None,
    )
    .expect("fixture is balanced")
}

/// Two countries {A,B}, one sector each, no intermediates at all.
pub fn noint() -> IcioTable {
    IcioTable::new(
        vec!["A".into(), "B".into()],
        vec![Sector::new("S")],
        2020,
        DMatrix::zeros(2, 2),
        DMatrix::from_row_slice(2, 2, &[80.0, 20.0, 10.0, 90.0]),
        DVector::from_vec(vec![100.0, 100.0]),
        DVector::from_vec(vec![100.0, 100.0]),
        Some(DVector::from_vec(vec![50.0, 80.0])),
        None,
    )
    .expect("NOINT fixture is balanced")
}

/// Single closed economy, one sector, zero exports.
pub fn aut() -> IcioTable {
    IcioTable::new(
        vec!["A".into()],
        vec![Sector::new("S")],
        2020,
        DMatrix::from_row_slice(1, 1, &[20.0]),
        DMatrix::from_row_slice(1, 1, &[80.0]),
        DVector::from_vec(vec![80.0]),
        DVector::from_vec(vec![100.0]),
        Some(DVector::from_vec(vec![40.0])),
        None,
    )
    .expect("AUT fixture is balanced")
}
