//! Command-line front end: loads ICIO bundles and auxiliary CSVs, runs
//! the selected analyses, and writes deterministic report files.

mod config;
mod runs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Settings;

#[derive(Parser)]
#[command(name = "gvckit", version, about = "Trade-in-value-added analytics over inter-country input-output tables")]
struct Cli {
    /// Balance tolerance (overrides GVCKIT_TOL and --config).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format, repeatable: csv, json.
    #[arg(long, global = true)]
    format: Vec<String>,

    /// Attach the balance report instead of refusing imbalanced bundles.
    #[arg(long, global = true)]
    allow_imbalance: bool,

    /// Clamp negative cells to zero at load time instead of rejecting.
    #[arg(long, global = true)]
    clamp_negatives: bool,

    /// Key-value JSON file with defaults for tol, out, format,
    /// allow_imbalance.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check row/column balance of a bundle.
    Validate { bundle: PathBuf },
    /// Backward and forward value-added decomposition plus participation.
    Tiva {
        bundle: PathBuf,
        /// Weight DVX by third countries' gross exports or their
        /// domestic output for export.
        #[arg(long, default_value = "gross-exports")]
        dvx_weighting: String,
    },
    /// Upstreamness, sourcing chain length, and the chain-position gap.
    Position { bundle: PathBuf },
    /// Labor content of exports and jobs sustained by foreign demand.
    Labor {
        bundle: PathBuf,
        /// Coefficient basis: persons or wage-cost.
        #[arg(long, default_value = "persons")]
        basis: String,
    },
    /// Bilateral value-added flow network metrics and graph export.
    Network {
        bundle: PathBuf,
        /// Minimum flow for an edge to count toward degrees.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        /// Also write the flow graph: dot or graphml.
        #[arg(long)]
        graph: Option<String>,
        /// Drop graph edges below this flow.
        #[arg(long, default_value_t = 0.0)]
        min_edge: f64,
    },
    /// Classify product-level trade and compare unit values.
    GrossTrade {
        #[arg(long)]
        trade: PathBuf,
        #[arg(long)]
        classmap: PathBuf,
        /// How many products to rank.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Decompose export growth between two bundles of the same scheme.
    Growth { base: PathBuf, next: PathBuf },
    /// Correlation, panel regression, and firm-entry estimation.
    Econ {
        #[command(subcommand)]
        command: EconCommand,
    },
    /// Run every bundle analysis and render summary charts.
    Report {
        bundle: PathBuf,
        #[arg(long)]
        trade: Option<PathBuf>,
        #[arg(long)]
        classmap: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EconCommand {
    /// Pearson correlation between two panel variables.
    Corr {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Fixed-effects OLS with robust or cluster-robust errors.
    Ols {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        y: String,
        #[arg(long, required = true)]
        x: Vec<String>,
        #[arg(long)]
        fe: Vec<String>,
        #[arg(long)]
        cluster: Option<String>,
    },
    /// Logit model of firm GVC entry.
    Logit {
        #[arg(long)]
        firms: PathBuf,
        #[arg(long, required = true)]
        x: Vec<String>,
    },
    /// Groupwise mean/median/count summaries.
    Describe {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        by: String,
        #[arg(long, required = true)]
        var: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::resolve(&cli) {
        Ok(s) => s,
        Err(why) => {
            eprintln!("error: {why}");
            return ExitCode::from(3);
        }
    };
    match runs::dispatch(&cli.command, &settings) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
