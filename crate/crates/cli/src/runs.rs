//! Analysis dispatch: each subcommand loads its inputs, builds report
//! tables, and writes them through the deterministic report writer.

use std::fmt;
use std::path::Path;

use gvckit_core::econ::{
    self, describe_by_group, logit_fit, ols_fe, pearson, EconError, FitResult,
};
use gvckit_core::grosstrade::{
    category_shares, classify, top_products, unit_value_comparison, Flow, RankKey,
};
use gvckit_core::growth::{export_growth_decomposition, GrowthError};
use gvckit_core::icio::BalanceReport;
use gvckit_core::io::bundle::{load_bundle, BundleError, LoadedBundle};
use gvckit_core::io::chart::{render_chart, ChartError};
use gvckit_core::io::report::{write_reports, ChartKind, ReportSet, Series, Table};
use gvckit_core::io::{read_classification_map, read_firms, read_panel, read_trade_records};
use gvckit_core::labor::{self, LaborBasis, LaborError};
use gvckit_core::leontief::LeontiefError;
use gvckit_core::network::{self, GraphFormat, NetworkError};
use gvckit_core::{backward, forward, IcioTable, LeontiefSystem};

use crate::config::Settings;
use crate::{Command, EconCommand};

/// Failure classes mapped onto the process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2: the data is readable but violates the balance contract.
    Validation(String),
    /// Exit 3: missing, malformed, or mis-specified inputs.
    Input(String),
    /// Exit 4: the computation itself broke down.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Input(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Input(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<BundleError> for Failure {
    fn from(e: BundleError) -> Failure {
        match e {
            BundleError::Imbalanced { .. } => Failure::Validation(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<LeontiefError> for Failure {
    fn from(e: LeontiefError) -> Failure {
        Failure::Numerical(e.to_string())
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Failure {
        match e {
            NetworkError::UnknownFormat(_) => Failure::Input(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<LaborError> for Failure {
    fn from(e: LaborError) -> Failure {
        match e {
            LaborError::Leontief(inner) => Failure::Numerical(inner.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<GrowthError> for Failure {
    fn from(e: GrowthError) -> Failure {
        match e {
            GrowthError::SchemeMismatch => Failure::Input(e.to_string()),
            GrowthError::Leontief(inner) => Failure::Numerical(inner.to_string()),
        }
    }
}

impl From<EconError> for Failure {
    fn from(e: EconError) -> Failure {
        match e {
            EconError::RankDeficient(_) | EconError::Separation | EconError::NoConvergence(_) => {
                Failure::Numerical(e.to_string())
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<ChartError> for Failure {
    fn from(e: ChartError) -> Failure {
        Failure::Input(e.to_string())
    }
}

fn input_err(e: impl fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

pub fn dispatch(command: &Command, settings: &Settings) -> Result<(), Failure> {
    match command {
        Command::Validate { bundle } => validate(bundle, settings),
        Command::Tiva {
            bundle,
            dvx_weighting,
        } => {
            let loaded = load(bundle, settings)?;
            let weighting = parse_weighting(dvx_weighting)?;
            let reports = tiva_reports(&loaded.table, weighting)?;
            emit(&reports, settings)
        }
        Command::Position { bundle } => {
            let loaded = load(bundle, settings)?;
            let reports = position_reports(&loaded.table)?;
            emit(&reports, settings)
        }
        Command::Labor { bundle, basis } => {
            let loaded = load(bundle, settings)?;
            let basis = parse_basis(basis)?;
            let reports = labor_reports(&loaded.table, basis)?;
            emit(&reports, settings)
        }
        Command::Network {
            bundle,
            threshold,
            graph,
            min_edge,
        } => {
            let loaded = load(bundle, settings)?;
            network_run(&loaded.table, *threshold, graph.as_deref(), *min_edge, settings)
        }
        Command::GrossTrade {
            trade,
            classmap,
            top,
        } => gross_trade(trade, classmap, *top, settings),
        Command::Growth { base, next } => {
            let t0 = load(base, settings)?;
            let t1 = load(next, settings)?;
            let reports = growth_reports(&t0.table, &t1.table)?;
            emit(&reports, settings)
        }
        Command::Econ { command } => econ_run(command, settings),
        Command::Report {
            bundle,
            trade,
            classmap,
        } => report_all(bundle, trade.as_deref(), classmap.as_deref(), settings),
    }
}

fn load(path: &Path, settings: &Settings) -> Result<LoadedBundle, Failure> {
    Ok(load_bundle(path, &settings.load_options())?)
}

fn emit(reports: &ReportSet, settings: &Settings) -> Result<(), Failure> {
    let manifest = write_reports(reports, &settings.out, &settings.formats)
        .map_err(|e| Failure::Input(format!("cannot write reports: {e}")))?;
    for entry in &manifest.files {
        println!(
            "wrote {} ({} rows)",
            settings.out.join(&entry.file).display(),
            entry.rows
        );
    }
    Ok(())
}

fn parse_basis(name: &str) -> Result<LaborBasis, Failure> {
    match name {
        "persons" => Ok(LaborBasis::Persons),
        "wage-cost" => Ok(LaborBasis::WageCost),
        other => Err(Failure::Input(format!("unknown labor basis {other:?}"))),
    }
}

fn parse_weighting(name: &str) -> Result<forward::DvxWeighting, Failure> {
    match name {
        "gross-exports" => Ok(forward::DvxWeighting::GrossExports),
        "domestic-output" => Ok(forward::DvxWeighting::DomesticOutputForExport),
        other => Err(Failure::Input(format!("unknown DVX weighting {other:?}"))),
    }
}

fn print_balance(report: &BalanceReport) {
    println!(
        "balance: {} (worst row residual {:.3e}, worst column residual {:.3e})",
        if report.passed { "PASS" } else { "FAIL" },
        report.worst_row_residual,
        report.worst_col_residual
    );
    for v in report.violations.iter().take(10) {
        println!("  {} ({:?}): residual {:.3e}", v.label, v.kind, v.residual);
    }
    if report.violations.len() > 10 {
        println!("  ... and {} more", report.violations.len() - 10);
    }
}

fn validate(bundle: &Path, settings: &Settings) -> Result<(), Failure> {
    // Always load with imbalance allowed so the report can be shown;
    // the exit code carries the verdict.
    let mut options = settings.load_options();
    options.allow_imbalance = true;
    let loaded = load_bundle(bundle, &options)?;
    print_balance(&loaded.balance);
    if loaded.clamped_mass > 0.0 {
        println!("clamped negative mass: {}", loaded.clamped_mass);
    }
    if loaded.balance.passed {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} balance violations at tolerance {:.1e}",
            loaded.balance.violations.len(),
            settings.tol
        )))
    }
}

fn tiva_reports(
    table: &IcioTable,
    weighting: forward::DvxWeighting,
) -> Result<ReportSet, Failure> {
    let sys = LeontiefSystem::from_table(table)?;
    let mut reports = ReportSet::default();

    let decomp = backward::dva_fva_with(table, &sys)?;
    let mut t = Table::new(
        "dva_fva",
        &[
            "country",
            "gross_exports",
            "dva",
            "fva",
            "dva_direct",
            "dva_indirect",
            "dva_reimported",
            "dva_share",
        ],
    );
    for d in &decomp {
        t.push(vec![
            d.exporter.as_str().into(),
            d.gross_exports.into(),
            d.dva.into(),
            d.fva.into(),
            d.dva_direct.into(),
            d.dva_indirect.into(),
            d.dva_reimported.into(),
            d.shares.as_ref().map(|s| s.dva).into(),
        ]);
    }
    reports.tables.push(t);

    let backward_i2e = backward::i2e_backward_with(table, &sys)?;
    let selling = forward::i2e_selling_with(table, &sys)?;
    let mut t = Table::new(
        "i2e",
        &[
            "country",
            "embodied_imports",
            "intermediate_imports",
            "backward_ratio",
            "selling_value",
            "selling_share",
        ],
    );
    for (b, s) in backward_i2e.iter().zip(&selling) {
        t.push(vec![
            b.country.as_str().into(),
            b.embodied_imports.into(),
            b.total_intermediate_imports.into(),
            b.ratio.into(),
            s.value.into(),
            s.share_of_exports.into(),
        ]);
    }
    reports.tables.push(t);

    let dvx = forward::dvx_weighted_with(table, &sys, weighting)?;
    let participation = forward::participation_index_with(table, &sys)?;
    let mut t = Table::new(
        "participation",
        &["country", "dvx", "backward", "forward", "total"],
    );
    for (p, dvx_value) in participation.iter().zip(&dvx) {
        t.push(vec![
            p.country.as_str().into(),
            (*dvx_value).into(),
            p.backward.into(),
            p.forward.into(),
            p.total.into(),
        ]);
    }
    reports.tables.push(t);
    Ok(reports)
}

fn position_reports(table: &IcioTable) -> Result<ReportSet, Failure> {
    let sys = LeontiefSystem::from_table(table)?;
    let upstream = forward::upstreamness(table)?;
    let lengths = backward::sourcing_chain_length(&sys);
    let gap = forward::chain_gap(table)?;
    let shares = forward::intermediates_shares(table);

    let mut t = Table::new(
        "position",
        &["producer", "upstreamness", "sourcing_length", "chain_gap"],
    );
    for i in 0..table.n() {
        t.push(vec![
            table.label(i).into(),
            upstream[i].into(),
            lengths[i].into(),
            gap[i].into(),
        ]);
    }

    let mut s = Table::new(
        "intermediates_shares",
        &["country", "share_in_output", "share_in_exports"],
    );
    for row in &shares {
        s.push(vec![
            row.country.as_str().into(),
            row.share_in_output.into(),
            row.share_in_exports.into(),
        ]);
    }

    Ok(ReportSet {
        tables: vec![t, s],
        charts: Vec::new(),
    })
}

fn labor_reports(table: &IcioTable, basis: LaborBasis) -> Result<ReportSet, Failure> {
    let sys = LeontiefSystem::from_table(table)?;
    let mut reports = ReportSet::default();

    let content = labor::labor_content_of_exports_with(table, &sys, basis)?;
    let mut t = Table::new("labor_content", &["country", "total", "domestic", "foreign"]);
    for c in &content {
        t.push(vec![
            c.country.as_str().into(),
            c.total.into(),
            c.domestic.into(),
            c.foreign.into(),
        ]);
    }
    reports.tables.push(t);

    let jobs = labor::jobs_foreign_final_demand_with(table, &sys)?;
    let channels = labor::jobs_by_channel_with(table, &sys)?;
    let mut t = Table::new(
        "jobs",
        &[
            "country",
            "foreign_demand_jobs",
            "final_goods_channel",
            "intermediates_channel",
        ],
    );
    for (c, ch) in channels.iter().enumerate() {
        t.push(vec![
            ch.country.as_str().into(),
            jobs[c].into(),
            ch.final_goods_trade.into(),
            ch.intermediates_trade.into(),
        ]);
    }
    reports.tables.push(t);

    // Manufacturing GVC jobs need at least one flagged sector; skip the
    // table otherwise rather than failing the whole run.
    match labor::gvc_manufacturing_jobs_with(table, &sys) {
        Ok(by_producer) => {
            let mut t = Table::new("gvc_manufacturing_jobs", &["producer", "jobs"]);
            for i in 0..table.n() {
                t.push(vec![table.label(i).into(), by_producer[i].into()]);
            }
            reports.tables.push(t);
        }
        Err(LaborError::NoManufacturingSectors) => {
            eprintln!("note: no manufacturing sectors; skipping gvc_manufacturing_jobs");
        }
        Err(other) => return Err(other.into()),
    }
    Ok(reports)
}

fn network_run(
    table: &IcioTable,
    threshold: f64,
    graph: Option<&str>,
    min_edge: f64,
    settings: &Settings,
) -> Result<(), Failure> {
    let fm = network::bilateral_va_flows(table)?;
    let metrics = network::node_metrics(&fm, threshold)?;
    let mut t = Table::new(
        "network",
        &[
            "country",
            "out_strength",
            "in_strength",
            "degree_out",
            "degree_in",
            "eigenvector_centrality",
            "partner_hhi",
        ],
    );
    for m in &metrics {
        t.push(vec![
            m.node.as_str().into(),
            m.out_strength.into(),
            m.in_strength.into(),
            (m.degree_out as f64).into(),
            (m.degree_in as f64).into(),
            m.eigenvector_centrality.into(),
            m.partner_hhi.into(),
        ]);
    }
    emit(
        &ReportSet {
            tables: vec![t],
            charts: Vec::new(),
        },
        settings,
    )?;

    if let Some(name) = graph {
        let format: GraphFormat = name.parse()?;
        let ext = match format {
            GraphFormat::Dot => "dot",
            GraphFormat::GraphMl => "graphml",
        };
        let doc = network::export_graph(&fm, format, min_edge);
        let path = settings.out.join(format!("va_flows.{ext}"));
        std::fs::write(&path, doc).map_err(input_err)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn gross_trade(
    trade: &Path,
    classmap: &Path,
    top: usize,
    settings: &Settings,
) -> Result<(), Failure> {
    let records = read_trade_records(trade).map_err(input_err)?;
    let map = read_classification_map(classmap).map_err(input_err)?;
    let (annotated, coverage) = classify(&records, &map);

    let mut reports = ReportSet::default();

    let mut t = Table::new(
        "coverage",
        &["total_value", "classified_value", "coverage"],
    );
    t.push(vec![
        coverage.total_value.into(),
        coverage.classified_value.into(),
        coverage.coverage.into(),
    ]);
    reports.tables.push(t);

    let mut t = Table::new("category_shares", &["flow", "category", "share"]);
    for flow in [Flow::Export, Flow::Import] {
        if let Ok(shares) = category_shares(&annotated, flow) {
            let label = match flow {
                Flow::Export => "export",
                Flow::Import => "import",
            };
            for (category, share) in shares {
                t.push(vec![label.into(), category.as_str().into(), share.into()]);
            }
        }
    }
    reports.tables.push(t);

    let mut t = Table::new("top_exports", &["product", "value", "quantity"]);
    for row in top_products(&records, Flow::Export, top, RankKey::Value) {
        t.push(vec![
            row.product.as_str().into(),
            row.value.into(),
            row.quantity.into(),
        ]);
    }
    reports.tables.push(t);

    let comparison = unit_value_comparison(&records);
    let mut t = Table::new(
        "unit_values",
        &["product", "export_uv", "import_uv", "ratio"],
    );
    for row in &comparison.rows {
        t.push(vec![
            row.product.as_str().into(),
            row.export_uv.into(),
            row.import_uv.into(),
            row.ratio.into(),
        ]);
    }
    reports.tables.push(t);
    if comparison.skipped_rows > 0 {
        eprintln!(
            "note: {} records lacked usable quantity and were skipped in unit values",
            comparison.skipped_rows
        );
    }
    emit(&reports, settings)
}

fn growth_reports(t0: &IcioTable, t1: &IcioTable) -> Result<ReportSet, Failure> {
    let decomp = export_growth_decomposition(t0, t1)?;
    let mut t = Table::new(
        "export_growth",
        &[
            "country",
            "delta_exports",
            "delta_direct",
            "delta_indirect",
            "delta_reimported",
            "delta_fva",
            "growth_rate",
        ],
    );
    for d in &decomp {
        t.push(vec![
            d.country.as_str().into(),
            d.delta_exports.into(),
            d.delta_direct.into(),
            d.delta_indirect.into(),
            d.delta_reimported.into(),
            d.delta_fva.into(),
            d.contributions.as_ref().map(|c| c.exports).into(),
        ]);
    }
    Ok(ReportSet {
        tables: vec![t],
        charts: Vec::new(),
    })
}

fn fit_table(name: &str, fit: &FitResult) -> Table {
    let mut t = Table::new(name, &["term", "coefficient", "std_error"]);
    for ((term, coef), se) in fit
        .names
        .iter()
        .zip(&fit.coefficients)
        .zip(&fit.std_errors)
    {
        t.push(vec![term.as_str().into(), (*coef).into(), (*se).into()]);
    }
    t
}

fn numeric_column(
    panel: &econ::PanelDataset,
    name: &str,
) -> Result<Vec<Option<f64>>, Failure> {
    Ok(panel.column(name)?)
}

fn econ_run(command: &EconCommand, settings: &Settings) -> Result<(), Failure> {
    match command {
        EconCommand::Corr { panel, x, y } => {
            let data = read_panel(panel).map_err(input_err)?;
            let xs = numeric_column(&data, x)?;
            let ys = numeric_column(&data, y)?;
            let pairs: Vec<(f64, f64)> = xs
                .iter()
                .zip(&ys)
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .collect();
            let (px, py): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = pearson(&px, &py)?;
            println!("pearson({x}, {y}) = {r} over {} observations", px.len());
            let mut t = Table::new("correlation", &["x", "y", "r", "n"]);
            t.push(vec![
                x.as_str().into(),
                y.as_str().into(),
                r.into(),
                (px.len() as f64).into(),
            ]);
            emit(
                &ReportSet {
                    tables: vec![t],
                    charts: Vec::new(),
                },
                settings,
            )
        }
        EconCommand::Ols {
            panel,
            y,
            x,
            fe,
            cluster,
        } => {
            let data = read_panel(panel).map_err(input_err)?;
            let fit = ols_fe(&data, y, x, fe, cluster.as_deref())?;
            println!(
                "ols: {} observations, {} dropped, r_squared = {}",
                fit.n_obs,
                fit.dropped_rows,
                fit.r_squared.map_or("n/a".into(), |r| r.to_string())
            );
            emit(
                &ReportSet {
                    tables: vec![fit_table("ols", &fit)],
                    charts: Vec::new(),
                },
                settings,
            )
        }
        EconCommand::Logit { firms, x } => {
            let records = read_firms(firms).map_err(input_err)?;
            let fit = logit_fit(&records, x)?;
            println!(
                "logit: {} observations, converged in {} iterations, log-likelihood = {}",
                fit.n_obs,
                fit.iterations,
                fit.log_likelihood.map_or("n/a".into(), |l| l.to_string())
            );
            emit(
                &ReportSet {
                    tables: vec![fit_table("logit", &fit)],
                    charts: Vec::new(),
                },
                settings,
            )
        }
        EconCommand::Describe { panel, by, var } => {
            let data = read_panel(panel).map_err(input_err)?;
            let stats = describe_by_group(&data, by, var)?;
            let mut t = Table::new(
                "describe",
                &["group", "variable", "count", "mean", "median"],
            );
            for (group, vars) in &stats {
                for (variable, s) in vars {
                    t.push(vec![
                        group.as_str().into(),
                        variable.as_str().into(),
                        (s.count as f64).into(),
                        s.mean.into(),
                        s.median.into(),
                    ]);
                }
            }
            emit(
                &ReportSet {
                    tables: vec![t],
                    charts: Vec::new(),
                },
                settings,
            )
        }
    }
}

fn report_all(
    bundle: &Path,
    trade: Option<&Path>,
    classmap: Option<&Path>,
    settings: &Settings,
) -> Result<(), Failure> {
    let loaded = load(bundle, settings)?;
    let table = &loaded.table;
    print_balance(&loaded.balance);

    let mut reports = tiva_reports(table, forward::DvxWeighting::GrossExports)?;
    reports
        .tables
        .extend(position_reports(table)?.tables);
    if table.emp().is_some() {
        reports
            .tables
            .extend(labor_reports(table, LaborBasis::Persons)?.tables);
    } else {
        eprintln!("note: bundle has no employment vector; skipping labor tables");
    }

    let fm = network::bilateral_va_flows(table)?;
    let metrics = network::node_metrics(&fm, 0.0)?;
    let mut t = Table::new(
        "network",
        &["country", "out_strength", "in_strength", "eigenvector_centrality"],
    );
    for m in &metrics {
        t.push(vec![
            m.node.as_str().into(),
            m.out_strength.into(),
            m.in_strength.into(),
            m.eigenvector_centrality.into(),
        ]);
    }
    reports.tables.push(t);

    emit(&reports, settings)?;

    // Summary chart: DVA and FVA per exporter.
    let decomp = backward::dva_fva(table)?;
    let series = vec![
        Series {
            label: "dva".into(),
            points: decomp
                .iter()
                .map(|d| (d.exporter.clone(), d.dva))
                .collect(),
        },
        Series {
            label: "fva".into(),
            points: decomp
                .iter()
                .map(|d| (d.exporter.clone(), d.fva))
                .collect(),
        },
    ];
    let chart_path = settings.out.join("dva_fva.svg");
    render_chart(&series, ChartKind::Bar, &chart_path)?;
    println!("wrote {}", chart_path.display());

    if let (Some(trade), Some(classmap)) = (trade, classmap) {
        gross_trade(trade, classmap, 10, settings)?;
    }
    Ok(())
}
