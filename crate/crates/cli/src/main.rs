use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use insightrank_core::engine::Recommendations;
use insightrank_core::{analyze_with, load_csv, AnalyzeOptions, Config, EngineError, IngestConfig};
use insightrank_service::{serve, ServiceConfig};

mod markdown;

#[derive(Parser)]
#[command(
    name = "insightrank",
    version,
    about = "Ranked insight and chart recommendations for CSV data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a CSV file and print the recommendation report.
    Analyze {
        csv: PathBuf,
        #[arg(long)]
        top_r: Option<usize>,
        #[arg(long)]
        top_k: Option<usize>,
        /// Comma-separated attributes every insight must involve.
        #[arg(long, value_delimiter = ',')]
        filter: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        seed: Option<u64>,
        /// JSON config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        /// Overrides INSIGHTRANK_PORT.
        #[arg(long)]
        port: Option<u16>,
        /// Overrides INSIGHTRANK_DATA_DIR.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

const INPUT_ERROR: u8 = 1;
const CONFIG_ERROR: u8 = 2;

struct Failure(u8, String);

fn load_config(path: Option<&PathBuf>) -> Result<Config, Failure> {
    match path {
        Some(p) => Config::from_path(p).map_err(|e| Failure(CONFIG_ERROR, e.to_string())),
        None => Ok(Config::default()),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_analyze(
    csv: PathBuf,
    top_r: Option<usize>,
    top_k: Option<usize>,
    filter: Vec<String>,
    format: Format,
    seed: Option<u64>,
    config: Option<PathBuf>,
    threads: Option<usize>,
    output: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut cfg = load_config(config.as_ref())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = top_r {
        cfg.top_r = r;
    }
    if let Some(k) = top_k {
        cfg.top_k = k;
    }
    cfg.validate().map_err(|e| Failure(CONFIG_ERROR, e.to_string()))?;

    let ds = load_csv(&csv, &IngestConfig::from(&cfg)).map_err(|e| Failure(INPUT_ERROR, e.to_string()))?;
    let analysis = analyze_with(&ds, &cfg, AnalyzeOptions { threads }).map_err(|e| match e {
        EngineError::Config(e) => Failure(CONFIG_ERROR, e.to_string()),
        other => Failure(INPUT_ERROR, other.to_string()),
    })?;
    let filter: Vec<String> = filter.into_iter().filter(|f| !f.is_empty()).collect();
    let rec: Recommendations = analysis
        .recommendations(&filter, cfg.top_r, cfg.top_k)
        .map_err(|e| Failure(INPUT_ERROR, e.to_string()))?;
    let mut text = match format {
        Format::Json => rec.to_json(),
        Format::Markdown => markdown::render(&rec),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure(INPUT_ERROR, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_serve(port: Option<u16>, data_dir: Option<PathBuf>, config: Option<PathBuf>) -> Result<(), Failure> {
    let mut cfg = ServiceConfig::from_env().map_err(|e| Failure(CONFIG_ERROR, e.to_string()))?;
    if let Some(p) = port {
        cfg.port = p;
    }
    if let Some(d) = data_dir {
        cfg.data_dir = d;
    }
    if config.is_some() {
        cfg.engine = load_config(config.as_ref())?;
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure(INPUT_ERROR, e.to_string()))?;
    runtime
        .block_on(serve(cfg))
        .map_err(|e| Failure(INPUT_ERROR, e.to_string()))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            csv,
            top_r,
            top_k,
            filter,
            format,
            seed,
            config,
            threads,
            output,
        } => run_analyze(csv, top_r, top_k, filter, format, seed, config, threads, output),
        Command::Serve { port, data_dir, config } => run_serve(port, data_dir, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
