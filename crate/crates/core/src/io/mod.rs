//! File formats: ICIO bundles, trade/panel CSVs, report tables, charts.

pub mod bundle;
pub mod chart;
pub mod report;

use std::path::Path;

use thiserror::Error;

use crate::econ::{EconError, FirmRecord, PanelDataset};
use crate::grosstrade::{Category, ClassificationMap, Flow, TradeError, TradeRecord};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("missing file {0}")]
    MissingFile(std::path::PathBuf),
    #[error("{file} row {row}: {message}")]
    Row {
        file: String,
        row: usize,
        message: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Trade(#[from] TradeError),
    #[error(transparent)]
    Econ(#[from] EconError),
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CsvError> {
    if !path.exists() {
        return Err(CsvError::MissingFile(path.to_path_buf()));
    }
    Ok(csv::ReaderBuilder::new()
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Trade records CSV with header
/// `flow,year,reporter,partner,product,value,quantity`.
pub fn read_trade_records(path: &Path) -> Result<Vec<TradeRecord>, CsvError> {
    let file = file_name(path);
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let cell = |idx: usize| -> &str { record.get(idx).unwrap_or("") };
        let flow: Flow = cell(0).parse().map_err(|e| CsvError::Row {
            file: file.clone(),
            row,
            message: e,
        })?;
        let year: i32 = cell(1).parse().map_err(|e| CsvError::Row {
            file: file.clone(),
            row,
            message: format!("bad year: {e}"),
        })?;
        let value: f64 = cell(5).parse().map_err(|e| CsvError::Row {
            file: file.clone(),
            row,
            message: format!("bad value: {e}"),
        })?;
        let quantity = match cell(6) {
            "" => None,
            q => Some(q.parse().map_err(|e| CsvError::Row {
                file: file.clone(),
                row,
                message: format!("bad quantity: {e}"),
            })?),
        };
        if value < 0.0 || quantity.is_some_and(|q: f64| q < 0.0) {
            return Err(CsvError::Row {
                file: file.clone(),
                row,
                message: "negative value or quantity".into(),
            });
        }
        out.push(TradeRecord {
            flow,
            year,
            reporter: cell(2).to_string(),
            partner: cell(3).to_string(),
            product: cell(4).to_string(),
            value,
            quantity,
        });
    }
    Ok(out)
}

/// Classification map CSV with header `prefix,category`.
pub fn read_classification_map(path: &Path) -> Result<ClassificationMap, CsvError> {
    let file = file_name(path);
    let mut rdr = reader(path)?;
    let mut entries = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let category: Category =
            record
                .get(1)
                .unwrap_or("")
                .parse()
                .map_err(|e| CsvError::Row {
                    file: file.clone(),
                    row: i + 2,
                    message: e,
                })?;
        entries.push((record.get(0).unwrap_or("").to_string(), category));
    }
    Ok(ClassificationMap::new(entries)?)
}

/// Panel CSV: header of variable names, unit id column named `id`,
/// optional `period` column, empty fields are missing values.
pub fn read_panel(path: &Path) -> Result<PanelDataset, CsvError> {
    let file = file_name(path);
    let mut rdr = reader(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_string()).collect();
    let id_idx = headers.iter().position(|h| h == "id");
    let period_idx = headers.iter().position(|h| h == "period");
    let variables: Vec<String> = headers
        .iter()
        .filter(|h| *h != "id" && *h != "period")
        .cloned()
        .collect();
    let mut ids = Vec::new();
    let mut periods = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        ids.push(
            id_idx
                .and_then(|idx| record.get(idx))
                .unwrap_or(&format!("row{row}"))
                .to_string(),
        );
        periods.push(
            period_idx
                .and_then(|idx| record.get(idx))
                .filter(|p| !p.is_empty())
                .map(|p| p.to_string()),
        );
        let mut row_values = Vec::with_capacity(variables.len());
        for (h, cell) in headers.iter().zip(record.iter()) {
            if h == "id" || h == "period" {
                continue;
            }
            let v = match cell {
                "" => None,
                c => Some(c.parse::<f64>().map_err(|e| CsvError::Row {
                    file: file.clone(),
                    row,
                    message: format!("bad value for {h}: {e}"),
                })?),
            };
            row_values.push(v);
        }
        values.push(row_values);
    }
    Ok(PanelDataset::new(variables, ids, periods, values)?)
}

/// Firm CSV with columns `id,size,age,foreign_owned,skill_share,
/// productivity,gvc_participant`.
pub fn read_firms(path: &Path) -> Result<Vec<FirmRecord>, CsvError> {
    let file = file_name(path);
    let mut rdr = reader(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_string()).collect();
    let idx_of = |name: &str| -> Result<usize, CsvError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CsvError::Row {
                file: file.clone(),
                row: 1,
                message: format!("missing column {name:?}"),
            })
    };
    let cols = [
        idx_of("size")?,
        idx_of("age")?,
        idx_of("foreign_owned")?,
        idx_of("skill_share")?,
        idx_of("productivity")?,
        idx_of("gvc_participant")?,
    ];
    let id_idx = headers.iter().position(|h| h == "id");
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let mut numbers = [0.0f64; 6];
        for (slot, &idx) in numbers.iter_mut().zip(cols.iter()) {
            *slot = record
                .get(idx)
                .unwrap_or("")
                .parse()
                .map_err(|e| CsvError::Row {
                    file: file.clone(),
                    row,
                    message: format!("bad value in {:?}: {e}", headers[idx]),
                })?;
        }
        out.push(FirmRecord {
            id: id_idx
                .and_then(|idx| record.get(idx))
                .unwrap_or(&format!("firm{row}"))
                .to_string(),
            size: numbers[0],
            age: numbers[1],
            foreign_owned: numbers[2],
            skill_share: numbers[3],
            productivity: numbers[4],
            gvc_participant: numbers[5],
        });
    }
    Ok(out)
}
