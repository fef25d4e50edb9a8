use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vapp_cli::{
    cmd_correlate, cmd_fixtures, cmd_scan, cmd_timeline, parse_apps, parse_fixed_clock,
    parse_formats, parse_states, FixtureConfig, RunConfig, EXIT_FATAL,
};
use vapp_core::fixtures::AccountState;

/// Forensic analysis of vehicle assistant app artifacts: scan device
/// extractions, reconstruct driver activity timelines, and correlate them
/// with manufacturer GDPR data exports.
#[derive(Parser)]
#[command(name = "vapp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Extraction to analyze: directory, zip or tar archive (repeatable).
    #[arg(long = "source")]
    sources: Vec<PathBuf>,
    /// Registry JSON overriding the built-in app descriptors
    /// (falls back to $VAPP_REGISTRY).
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Strip this leading path component from archive entry names.
    #[arg(long)]
    root_prefix: Option<String>,
    /// Parallel hashing workers.
    #[arg(long)]
    jobs: Option<usize>,
    /// Pin the session clock (RFC 3339) for reproducible outputs.
    #[arg(long)]
    fixed_clock: Option<String>,
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate, hash and list detected app containers.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reconstruct the activity timeline and write report artifacts.
    Timeline {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory for events.json, events.csv, summary.json,
        /// custody.ndjson (and report.html with --format html).
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated outputs: json,csv,html.
        #[arg(long, default_value = "json,csv")]
        format: String,
    },
    /// Decode a SAR interchange container and report its contents.
    Sar {
        #[command(flatten)]
        common: CommonArgs,
        /// SAR container directory (holds manifest.json).
        #[arg(long)]
        sar: PathBuf,
        /// Manufacturer id; defaults to the manifest's.
        #[arg(long)]
        manufacturer: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlate a phone timeline against a SAR container.
    Correlate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        sar: PathBuf,
        #[arg(long)]
        manufacturer: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Match window in seconds.
        #[arg(long, default_value_t = 60)]
        window: u64,
    },
    /// Render synthetic ground-truth extractions and SAR containers.
    Fixtures {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of scenario action steps.
        #[arg(long, default_value_t = 9)]
        length: usize,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated app ids (default: all ten).
        #[arg(long)]
        apps: Option<String>,
        /// Comma-separated states: logged_in,logged_out,uninstalled.
        #[arg(long, default_value = "logged_in")]
        states: String,
        /// Also render one SAR container per manufacturer.
        #[arg(long)]
        with_sar: bool,
        /// Export the availability matrix as JSON.
        #[arg(long)]
        export_matrix: bool,
    },
}

fn run_config(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    Ok(RunConfig {
        sources: common.sources.clone(),
        registry_override: common.registry.clone(),
        root_prefix: common.root_prefix.clone(),
        jobs: common.jobs,
        fixed_clock: common
            .fixed_clock
            .as_deref()
            .map(parse_fixed_clock)
            .transpose()?,
        verbose: common.verbose,
        ..RunConfig::default()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout();

    let result = match &cli.command {
        Command::Scan { common } => run_config(common).and_then(|c| cmd_scan(&c, &mut stdout)),
        Command::Timeline {
            common,
            out,
            format,
        } => run_config(common).and_then(|mut c| {
            c.out_dir = Some(out.clone());
            c.formats = parse_formats(format)?;
            cmd_timeline(&c, &mut stdout)
        }),
        Command::Sar {
            common,
            sar,
            manufacturer,
            out,
        } => run_config(common).and_then(|mut c| {
            c.sar_input = Some(sar.clone());
            c.manufacturer = manufacturer.clone();
            c.out_dir = Some(out.clone());
            cmd_correlate(&c, &mut stdout)
        }),
        Command::Correlate {
            common,
            sar,
            manufacturer,
            out,
            window,
        } => run_config(common).and_then(|mut c| {
            c.sar_input = Some(sar.clone());
            c.manufacturer = manufacturer.clone();
            c.out_dir = Some(out.clone());
            c.window_ms = (*window as i64) * 1000;
            cmd_correlate(&c, &mut stdout)
        }),
        Command::Fixtures {
            seed,
            length,
            out,
            apps,
            states,
            with_sar,
            export_matrix,
        } => (|| {
            let config = FixtureConfig {
                seed: *seed,
                length: *length,
                out_dir: out.clone(),
                apps: apps.as_deref().map(parse_apps).transpose()?,
                states: if states.trim().is_empty() {
                    vec![AccountState::LoggedIn]
                } else {
                    parse_states(states)?
                },
                with_sar: *with_sar,
                export_matrix: *export_matrix,
            };
            cmd_fixtures(&config, &mut stdout)
        })(),
    };

    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("vapp: {e:#}");
            ExitCode::from(EXIT_FATAL as u8)
        }
    }
}
