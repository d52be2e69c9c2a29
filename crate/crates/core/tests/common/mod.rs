//! Shared test support: an independent brute-force oracle built on plain
//! `Vec<Vec<f64>>` arithmetic (no nalgebra) and a seeded generator for
//! random balanced tables.
//!
//! The oracle deliberately re-derives everything from the raw table data
//! so that it cannot share a bug with the library implementation.

#![allow(dead_code)]

use gvckit_core::icio::Sector;
use gvckit_core::IcioTable;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for l in 0..k {
            let av = a[i][l];
            if av == 0.0 {
                continue;
            }
            for j in 0..c {
                out[i][j] += av * b[l][j];
            }
        }
    }
    out
}

/// Technical coefficients from raw table data.
pub fn coeffs(table: &IcioTable) -> Mat {
    let n = table.n();
    let mut a = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let xj = table.x()[j];
            if xj > 0.0 {
                a[i][j] = table.z()[(i, j)] / xj;
            }
        }
    }
    a
}

/// Truncated Neumann series I + A + A^2 + ... (term_count powers of A).
pub fn neumann(a: &Mat, term_count: usize) -> Mat {
    let n = a.len();
    let mut sum = identity(n);
    let mut power = identity(n);
    for _ in 0..term_count {
        power = matmul(&power, a);
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += power[i][j];
            }
        }
    }
    sum
}

/// Closed-form inverse of (I - A) for a 2x2 coefficient matrix.
pub fn inverse_2x2(a: &Mat) -> Mat {
    let m = [[1.0 - a[0][0], -a[0][1]], [-a[1][0], 1.0 - a[1][1]]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    vec![
        vec![m[1][1] / det, -m[0][1] / det],
        vec![-m[1][0] / det, m[0][0] / det],
    ]
}

/// Gross exports per producer, straight from the table.
pub fn exports(table: &IcioTable) -> Vec<f64> {
    let n = table.n();
    let mut e = vec![0.0; n];
    for i in 0..n {
        let ci = table.country_of(i);
        for j in 0..n {
            if table.country_of(j) != ci {
                e[i] += table.z()[(i, j)];
            }
        }
        for d in 0..table.countries().len() {
            if d != ci {
                e[i] += table.f()[(i, d)];
            }
        }
    }
    e
}

pub fn va_coeffs(table: &IcioTable) -> Vec<f64> {
    (0..table.n())
        .map(|i| {
            if table.x()[i] > 0.0 {
                table.va()[i] / table.x()[i]
            } else {
                0.0
            }
        })
        .collect()
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Seeded generator for balanced tables with 2-8 countries and 1-6 sectors.
///
/// Columns of Z are scaled so intermediate input shares stay at or below
/// 0.6, then rows are scaled to keep row sums below output; the leftover
/// output goes to final demand, split across destinations, so the table
/// balances by construction.
pub fn random_table(seed: u64) -> IcioTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = rng.gen_range(2..=8usize);
    let s = rng.gen_range(1..=6usize);
    random_table_dims(seed.wrapping_add(1), c, s)
}

/// As [`random_table`] with a fixed country/sector scheme, so that two
/// draws can form a comparable table pair.
pub fn random_table_dims(seed: u64, c: usize, s: usize) -> IcioTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c * s;

    let countries: Vec<String> = (0..c).map(|i| format!("C{i:02}")).collect();
    let sectors: Vec<Sector> = (0..s)
        .map(|i| Sector {
            code: format!("S{i:02}"),
            manufacturing: i % 2 == 0,
            services: i % 2 == 1,
        })
        .collect();

    let x = DVector::from_fn(n, |_, _| rng.gen_range(50.0..150.0));
    let mut z = DMatrix::from_fn(n, n, |_, _| rng.gen_range(0.0..1.0));

    // Cap column intermediate shares at a random level <= 0.6.
    for j in 0..n {
        let share = rng.gen_range(0.2..0.6);
        let col_sum: f64 = z.column(j).sum();
        let scale = share * x[j] / col_sum;
        for i in 0..n {
            z[(i, j)] *= scale;
        }
    }
    // Then cap row sums below output so final demand stays positive.
    for i in 0..n {
        let row_sum: f64 = z.row(i).sum();
        if row_sum > 0.8 * x[i] {
            let scale = 0.8 * x[i] / row_sum;
            for j in 0..n {
                z[(i, j)] *= scale;
            }
        }
    }

    let mut f = DMatrix::zeros(n, c);
    for i in 0..n {
        let remainder = x[i] - z.row(i).sum();
        let weights: Vec<f64> = (0..c).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for d in 0..c {
            f[(i, d)] = remainder * weights[d] / total;
        }
    }

    let va = DVector::from_fn(n, |i, _| x[i] - z.column(i).sum());
    let emp = DVector::from_fn(n, |_, _| rng.gen_range(1.0..100.0));

    IcioTable::new(countries, sectors, 2020, z, f, va, x, Some(emp), None)
        .expect("generated table is valid")
}
