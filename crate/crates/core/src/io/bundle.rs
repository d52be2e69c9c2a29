//! ICIO bundle directories: meta.json plus Z/F/va/x and optional
//! emp/wages CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::icio::{validate_balance, BalanceReport, IcioTable, IcioError, Sector};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("missing bundle file {0}")]
    MissingFile(PathBuf),
    #[error("parse error in {file} at row {row}, column {col}: {message}")]
    ParseError {
        file: String,
        row: usize,
        col: usize,
        message: String,
    },
    #[error("bad meta.json: {0}")]
    BadMeta(String),
    #[error("label mismatch in {file} at row {row}: expected {expected:?}, found {found:?}")]
    LabelMismatch {
        file: String,
        row: usize,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Icio(#[from] IcioError),
    #[error("table is not balanced (worst row residual {worst_row}, worst column residual {worst_col})")]
    Imbalanced { worst_row: f64, worst_col: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    countries: Vec<String>,
    sectors: Vec<Sector>,
    year: i32,
    #[serde(default)]
    currency: String,
}

/// How negative cells encountered at load time are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativePolicy {
    /// Refuse the bundle (the default; every formula assumes
    /// nonnegativity).
    #[default]
    Reject,
    /// Clamp to zero and report the clamped mass.
    ClampToZero,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub tolerance: f64,
    pub allow_imbalance: bool,
    pub negatives: NegativePolicy,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            tolerance: 1e-9,
            allow_imbalance: false,
            negatives: NegativePolicy::Reject,
        }
    }
}

#[derive(Debug)]
pub struct LoadedBundle {
    pub table: IcioTable,
    pub balance: BalanceReport,
    /// Total absolute value clamped away under
    /// `NegativePolicy::ClampToZero`.
    pub clamped_mass: f64,
}

fn read_to_string(path: &Path) -> Result<String, BundleError> {
    if !path.exists() {
        return Err(BundleError::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

struct CsvGrid {
    file: String,
    header: Vec<String>,
    rows: Vec<(String, Vec<f64>)>,
}

fn parse_csv(path: &Path, clamp: &mut Option<&mut f64>) -> Result<CsvGrid, BundleError> {
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line.split(',').skip(1).map(|s| s.trim().to_string()).collect(),
        None => {
            return Err(BundleError::ParseError {
                file,
                row: 1,
                col: 1,
                message: "empty file".into(),
            })
        }
    };
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let label = cells.next().unwrap_or("").trim().to_string();
        let mut values = Vec::new();
        for (col, cell) in cells.enumerate() {
            let parsed: f64 = cell.trim().parse().map_err(|e| BundleError::ParseError {
                file: file.clone(),
                row: idx + 1,
                col: col + 2,
                message: format!("{e}: {cell:?}"),
            })?;
            let value = if parsed < 0.0 {
                match clamp {
                    Some(mass) => {
                        **mass += -parsed;
                        0.0
                    }
                    None => {
                        return Err(BundleError::ParseError {
                            file: file.clone(),
                            row: idx + 1,
                            col: col + 2,
                            message: format!("negative value {parsed}"),
                        })
                    }
                }
            } else {
                parsed
            };
            values.push(value);
        }
        rows.push((label, values));
    }
    Ok(CsvGrid { file, header, rows })
}

fn check_labels(grid: &CsvGrid, expected: &[String]) -> Result<(), BundleError> {
    for (i, want) in expected.iter().enumerate() {
        let found = grid.rows.get(i).map(|(l, _)| l.as_str()).unwrap_or("");
        if found != want {
            return Err(BundleError::LabelMismatch {
                file: grid.file.clone(),
                row: i + 2,
                expected: want.clone(),
                found: found.to_string(),
            });
        }
    }
    if grid.rows.len() != expected.len() {
        return Err(BundleError::ParseError {
            file: grid.file.clone(),
            row: grid.rows.len() + 2,
            col: 1,
            message: format!("expected {} rows, found {}", expected.len(), grid.rows.len()),
        });
    }
    Ok(())
}

fn grid_to_matrix(grid: &CsvGrid, ncols: usize) -> Result<DMatrix<f64>, BundleError> {
    let nrows = grid.rows.len();
    let mut m = DMatrix::zeros(nrows, ncols);
    for (i, (_, values)) in grid.rows.iter().enumerate() {
        if values.len() != ncols {
            return Err(BundleError::ParseError {
                file: grid.file.clone(),
                row: i + 2,
                col: values.len() + 1,
                message: format!("expected {ncols} value cells, found {}", values.len()),
            });
        }
        for (j, v) in values.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    Ok(m)
}

fn grid_to_vector(grid: &CsvGrid) -> Result<DVector<f64>, BundleError> {
    let m = grid_to_matrix(grid, 1)?;
    Ok(m.column(0).into_owned())
}

/// Load an ICIO bundle directory and validate its balance.
pub fn load_bundle(dir: &Path, options: &LoadOptions) -> Result<LoadedBundle, BundleError> {
    let meta_text = read_to_string(&dir.join("meta.json"))?;
    let meta: Meta =
        serde_json::from_str(&meta_text).map_err(|e| BundleError::BadMeta(e.to_string()))?;

    let mut labels = Vec::new();
    for country in &meta.countries {
        for sector in &meta.sectors {
            labels.push(format!("{}.{}", country, sector.code));
        }
    }
    let n = labels.len();

    let mut clamped_mass = 0.0;
    let mut load_grid = |name: &str| -> Result<CsvGrid, BundleError> {
        let mut clamp = match options.negatives {
            NegativePolicy::Reject => None,
            NegativePolicy::ClampToZero => Some(&mut clamped_mass),
        };
        let grid = parse_csv(&dir.join(name), &mut clamp)?;
        check_labels(&grid, &labels)?;
        Ok(grid)
    };

    let z_grid = load_grid("Z.csv")?;
    let f_grid = load_grid("F.csv")?;
    let va_grid = load_grid("va.csv")?;
    let x_grid = load_grid("x.csv")?;
    let emp_grid = if dir.join("emp.csv").exists() {
        Some(load_grid("emp.csv")?)
    } else {
        None
    };
    let wages_grid = if dir.join("wages.csv").exists() {
        Some(load_grid("wages.csv")?)
    } else {
        None
    };

    if f_grid.header != meta.countries {
        return Err(BundleError::BadMeta(format!(
            "F.csv columns {:?} do not match meta countries {:?}",
            f_grid.header, meta.countries
        )));
    }

    let z = grid_to_matrix(&z_grid, n)?;
    let f = grid_to_matrix(&f_grid, meta.countries.len())?;
    let va = grid_to_vector(&va_grid)?;
    let x = grid_to_vector(&x_grid)?;
    let emp = emp_grid.as_ref().map(grid_to_vector).transpose()?;
    let wages = wages_grid.as_ref().map(grid_to_vector).transpose()?;

    let table = IcioTable::new(
        meta.countries, meta.sectors, meta.year, z, f, va, x, emp, wages,
    )?;
    let balance = validate_balance(&table, options.tolerance);
    if !balance.passed && !options.allow_imbalance {
        return Err(BundleError::Imbalanced {
            worst_row: balance.worst_row_residual,
            worst_col: balance.worst_col_residual,
        });
    }
    Ok(LoadedBundle {
        table,
        balance,
        clamped_mass,
    })
}

/// Write a table as a bundle directory. Values use Rust's shortest
/// round-trip float formatting, so a reload reproduces the table
/// exactly.
pub fn write_bundle(table: &IcioTable, dir: &Path, currency: &str) -> Result<(), BundleError> {
    fs::create_dir_all(dir)?;
    let meta = Meta {
        countries: table.countries().to_vec(),
        sectors: table.sectors().to_vec(),
        year: table.year(),
        currency: currency.to_string(),
    };
    fs::write(
        dir.join("meta.json"),
        serde_json::to_string_pretty(&meta).expect("meta serializes"),
    )?;

    let n = table.n();
    let labels: Vec<String> = (0..n).map(|i| table.label(i)).collect();

    let mut z_text = String::new();
    z_text.push_str(&format!("label,{}\n", labels.join(",")));
    for i in 0..n {
        let cells: Vec<String> = (0..n).map(|j| format!("{}", table.z()[(i, j)])).collect();
        z_text.push_str(&format!("{},{}\n", labels[i], cells.join(",")));
    }
    fs::write(dir.join("Z.csv"), z_text)?;

    let mut f_text = String::new();
    f_text.push_str(&format!("label,{}\n", table.countries().join(",")));
    for i in 0..n {
        let cells: Vec<String> = (0..table.num_countries())
            .map(|r| format!("{}", table.f()[(i, r)]))
            .collect();
        f_text.push_str(&format!("{},{}\n", labels[i], cells.join(",")));
    }
    fs::write(dir.join("F.csv"), f_text)?;

    let write_vector = |name: &str, v: &DVector<f64>| -> Result<(), BundleError> {
        let mut text = String::from("label,value\n");
        for i in 0..n {
            text.push_str(&format!("{},{}\n", labels[i], v[i]));
        }
        fs::write(dir.join(name), text)?;
        Ok(())
    };
    write_vector("va.csv", table.va())?;
    write_vector("x.csv", table.x())?;
    if let Some(emp) = table.emp() {
        write_vector("emp.csv", emp)?;
    }
    if let Some(wages) = table.wages() {
        write_vector("wages.csv", wages)?;
    }
    Ok(())
}
