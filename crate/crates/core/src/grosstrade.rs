//! First-cut analysis of product-level gross trade with informed
//! classifications.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TradeError {
    #[error("duplicate classification prefix {0:?}")]
    DuplicatePrefix(String),
    #[error("classification map is empty")]
    EmptyMap,
    #[error("no records for the requested flow")]
    EmptyFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Export,
    Import,
}

impl std::str::FromStr for Flow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "export" => Ok(Flow::Export),
            "import" => Ok(Flow::Import),
            other => Err(format!("unknown flow {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    RawMaterials,
    Intermediates,
    ConsumerGoods,
    CapitalGoods,
    Unclassified,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::RawMaterials => "raw_materials",
            Category::Intermediates => "intermediates",
            Category::ConsumerGoods => "consumer_goods",
            Category::CapitalGoods => "capital_goods",
            Category::Unclassified => "unclassified",
        }
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "raw_materials" => Ok(Category::RawMaterials),
            "intermediates" => Ok(Category::Intermediates),
            "consumer_goods" => Ok(Category::ConsumerGoods),
            "capital_goods" => Ok(Category::CapitalGoods),
            other => Err(format!("unknown category {other:?}")),
        }
    }
}

/// One product-level gross trade flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub flow: Flow,
    pub year: i32,
    pub reporter: String,
    pub partner: String,
    pub product: String,
    pub value: f64,
    pub quantity: Option<f64>,
}

/// Longest-prefix product classification.
#[derive(Debug, Clone)]
pub struct ClassificationMap {
    prefixes: BTreeMap<String, Category>,
}

impl ClassificationMap {
    pub fn new(entries: impl IntoIterator<Item = (String, Category)>) -> Result<Self, TradeError> {
        let mut prefixes = BTreeMap::new();
        for (prefix, category) in entries {
            if prefixes.insert(prefix.clone(), category).is_some() {
                return Err(TradeError::DuplicatePrefix(prefix));
            }
        }
        if prefixes.is_empty() {
            return Err(TradeError::EmptyMap);
        }
        Ok(ClassificationMap { prefixes })
    }

    pub fn classify_code(&self, product: &str) -> Category {
        self.prefixes
            .iter()
            .filter(|(prefix, _)| product.starts_with(prefix.as_str()))
            .max_by_key(|(prefix, _)| prefix.len())
            .map(|(_, &cat)| cat)
            .unwrap_or(Category::Unclassified)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifiedRecord {
    pub record: TradeRecord,
    pub category: Category,
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub total_value: f64,
    pub classified_value: f64,
    /// Value share carrying a category; absent when total value is zero.
    pub coverage: Option<f64>,
}

pub fn classify(
    records: &[TradeRecord],
    map: &ClassificationMap,
) -> (Vec<ClassifiedRecord>, CoverageReport) {
    let mut total = 0.0;
    let mut classified = 0.0;
    let annotated = records
        .iter()
        .map(|r| {
            let category = map.classify_code(&r.product);
            total += r.value;
            if category != Category::Unclassified {
                classified += r.value;
            }
            ClassifiedRecord {
                record: r.clone(),
                category,
            }
        })
        .collect();
    let coverage = (total > 0.0).then(|| classified / total);
    (
        annotated,
        CoverageReport {
            total_value: total,
            classified_value: classified,
            coverage,
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankKey {
    Value,
    Quantity,
}

#[derive(Debug, Clone)]
pub struct ProductTotal {
    pub product: String,
    pub value: f64,
    pub quantity: f64,
}

/// Top `n` products of one flow, aggregated over partners, descending by
/// the rank key with ties broken by ascending product code.
pub fn top_products(records: &[TradeRecord], flow: Flow, n: usize, key: RankKey) -> Vec<ProductTotal> {
    let mut totals: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.flow == flow) {
        let entry = totals.entry(r.product.clone()).or_insert((0.0, 0.0));
        entry.0 += r.value;
        entry.1 += r.quantity.unwrap_or(0.0);
    }
    let mut rows: Vec<ProductTotal> = totals
        .into_iter()
        .map(|(product, (value, quantity))| ProductTotal {
            product,
            value,
            quantity,
        })
        .collect();
    // BTreeMap already yields ascending codes; a stable sort on the key
    // keeps that order among ties.
    rows.sort_by(|a, b| {
        let (ka, kb) = match key {
            RankKey::Value => (a.value, b.value),
            RankKey::Quantity => (a.quantity, b.quantity),
        };
        kb.partial_cmp(&ka).unwrap()
    });
    rows.truncate(n);
    rows
}

#[derive(Debug, Clone)]
pub struct UnitValueRow {
    pub product: String,
    pub export_uv: Option<f64>,
    pub import_uv: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct UnitValueComparison {
    pub rows: Vec<UnitValueRow>,
    /// Records without usable quantity, excluded from the unit values.
    pub skipped_rows: usize,
}

/// Aggregate unit values (total value over total quantity) per product
/// and flow, and their export/import ratio.
pub fn unit_value_comparison(records: &[TradeRecord]) -> UnitValueComparison {
    let mut acc: BTreeMap<String, [(f64, f64); 2]> = BTreeMap::new();
    let mut skipped = 0usize;
    for r in records {
        match r.quantity {
            Some(q) if q > 0.0 => {
                let slot = acc.entry(r.product.clone()).or_insert([(0.0, 0.0); 2]);
                let side = match r.flow {
                    Flow::Export => &mut slot[0],
                    Flow::Import => &mut slot[1],
                };
                side.0 += r.value;
                side.1 += q;
            }
            _ => skipped += 1,
        }
    }
    let rows = acc
        .into_iter()
        .map(|(product, [(ev, eq), (iv, iq)])| {
            let export_uv = (eq > 0.0).then(|| ev / eq);
            let import_uv = (iq > 0.0).then(|| iv / iq);
            let ratio = match (export_uv, import_uv) {
                (Some(e), Some(i)) if i > 0.0 => Some(e / i),
                _ => None,
            };
            UnitValueRow {
                product,
                export_uv,
                import_uv,
                ratio,
            }
        })
        .collect();
    UnitValueComparison {
        rows,
        skipped_rows: skipped,
    }
}

/// Value shares by category for one flow; shares sum to 1.
pub fn category_shares(
    annotated: &[ClassifiedRecord],
    flow: Flow,
) -> Result<BTreeMap<Category, f64>, TradeError> {
    let mut totals: BTreeMap<Category, f64> = BTreeMap::new();
    let mut grand = 0.0;
    for r in annotated.iter().filter(|r| r.record.flow == flow) {
        *totals.entry(r.category).or_insert(0.0) += r.record.value;
        grand += r.record.value;
    }
    if grand <= 0.0 {
        return Err(TradeError::EmptyFlow);
    }
    Ok(totals.into_iter().map(|(c, v)| (c, v / grand)).collect())
}
