//! Command implementations behind the `vapp` binary. Kept as a library so
//! the acceptance suite can drive the exact command paths in-process.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use vapp_core::event::normalize;
use vapp_core::evidence::EvidenceStore;
use vapp_core::extract::extract_artifacts;
use vapp_core::fixtures::{self, AccountState};
use vapp_core::locator::{
    detect_android, detect_ios, registry, registry_from_json, AppDescriptor, AppId, Platform,
    StoreMarkerReader,
};
use vapp_core::sar::{correlate, import_sar, CorrelationReport, Manufacturer, SarDataset};
use vapp_core::timeline::{self, Timeline};
use vapp_core::{report, ContainerMatch};

/// Exit codes are a stable contract: 0 success, 1 partial, 2 usage or fatal.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Html,
}

/// Everything one invocation needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sources: Vec<PathBuf>,
    pub registry_override: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub sar_input: Option<PathBuf>,
    pub manufacturer: Option<String>,
    pub root_prefix: Option<String>,
    pub jobs: Option<usize>,
    pub fixed_clock: Option<i64>,
    pub window_ms: i64,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sources: Vec::new(),
            registry_override: None,
            out_dir: None,
            formats: vec![OutputFormat::Json, OutputFormat::Csv],
            sar_input: None,
            manufacturer: None,
            root_prefix: None,
            jobs: None,
            fixed_clock: None,
            window_ms: 60_000,
            verbose: false,
        }
    }
}

fn load_registry(config: &RunConfig) -> Result<Vec<AppDescriptor>> {
    let path = config
        .registry_override
        .clone()
        .or_else(|| std::env::var_os("VAPP_REGISTRY").map(PathBuf::from));
    match path {
        Some(p) => {
            let bytes = std::fs::read(&p).with_context(|| format!("registry {}", p.display()))?;
            Ok(registry_from_json(&bytes)?)
        }
        None => Ok(registry()),
    }
}

fn configure_jobs(config: &RunConfig) {
    if let Some(n) = config.jobs {
        // Ignore failure: the global pool can only be sized once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

struct ScanOutcome {
    store: EvidenceStore,
    source_ids: Vec<String>,
    matches: Vec<(String, ContainerMatch)>,
}

/// Open, inventory and detect across all sources. Sources are processed in
/// sorted order so results never depend on argument order.
fn scan_sources(config: &RunConfig, reg: &[AppDescriptor]) -> Result<ScanOutcome> {
    if config.sources.is_empty() {
        bail!("at least one --source is required");
    }
    let mut store = EvidenceStore::new("vapp").with_root_prefix(config.root_prefix.clone());
    if let Some(ms) = config.fixed_clock {
        store = store.with_fixed_clock(ms);
    }

    let mut sources = config.sources.clone();
    sources.sort();
    sources.dedup();

    let mut source_ids = Vec::new();
    let mut matches = Vec::new();
    for path in &sources {
        let source = store
            .open_source(path, None)
            .with_context(|| format!("opening source {}", path.display()))?;
        let inventory = store.enumerate_files(&source.id)?;
        if config.verbose {
            eprintln!(
                "{}: {} file(s) inventoried, {} issue(s), {} symlink(s)",
                source.id,
                inventory.entries.len(),
                inventory.issues.len(),
                inventory.symlinks.len()
            );
        }
        let mut found = detect_android(reg, &inventory.entries);
        let reader = StoreMarkerReader {
            store: &store,
            source_id: &source.id,
        };
        found.extend(detect_ios(reg, &inventory.entries, &reader)?);
        for m in found {
            matches.push((source.id.clone(), m));
        }
        source_ids.push(source.id);
    }
    Ok(ScanOutcome {
        store,
        source_ids,
        matches,
    })
}

/// `vapp scan`: list detected app containers.
pub fn cmd_scan(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    configure_jobs(config);
    let reg = load_registry(config)?;
    let scan = scan_sources(config, &reg)?;
    for (source_id, m) in &scan.matches {
        writeln!(
            out,
            "{}\t{}\t{}\t{:?}\t{}",
            m.descriptor.app_id.as_str(),
            m.descriptor.platform.as_str(),
            m.container_root,
            m.confidence,
            source_id
        )?;
    }
    writeln!(out, "{} containers", scan.matches.len())?;
    Ok(EXIT_OK)
}

struct TimelineOutcome {
    store: EvidenceStore,
    timeline: Timeline,
    wholly_failed: Vec<String>,
}

fn build_timeline(config: &RunConfig, reg: &[AppDescriptor]) -> Result<TimelineOutcome> {
    let scan = scan_sources(config, reg)?;
    let mut events = Vec::new();
    let mut wholly_failed = Vec::new();
    for (source_id, m) in &scan.matches {
        match extract_artifacts(&scan.store, source_id, m) {
            Ok(result) => {
                if result.records.is_empty() && !result.skipped.is_empty() {
                    wholly_failed.push(m.container_root.clone());
                }
                let outcome = normalize(&result.records);
                events.extend(outcome.events);
            }
            Err(e) => {
                wholly_failed.push(format!("{}: {e}", m.container_root));
            }
        }
    }
    let built_at = config
        .fixed_clock
        .unwrap_or_else(|| chrono::Utc::now().timestamp_millis());
    let t = timeline::build(events, scan.source_ids.clone(), built_at);
    Ok(TimelineOutcome {
        store: scan.store,
        timeline: t,
        wholly_failed,
    })
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), content.as_bytes())
        .with_context(|| format!("writing {name}"))?;
    Ok(())
}

/// `vapp timeline`: reconstruct events and write the report artifacts.
pub fn cmd_timeline(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    configure_jobs(config);
    let reg = load_registry(config)?;
    let dir = config.out_dir.clone().context("--out is required")?;
    let outcome = build_timeline(config, &reg)?;
    let summary = timeline::summarize(&outcome.timeline);

    if config.formats.contains(&OutputFormat::Json) {
        write_out(&dir, "events.json", &report::events_json(&outcome.timeline))?;
        write_out(&dir, "summary.json", &report::summary_json(&summary))?;
    }
    if config.formats.contains(&OutputFormat::Csv) {
        write_out(&dir, "events.csv", &report::events_csv(&outcome.timeline))?;
    }
    if config.formats.contains(&OutputFormat::Html) {
        let custody = outcome.store.custody_log_all();
        write_out(
            &dir,
            "report.html",
            &report::html_report(&outcome.timeline, &summary, None, &custody),
        )?;
    }
    write_out(&dir, "custody.ndjson", &outcome.store.custody_ndjson())?;

    writeln!(
        out,
        "{} events from {} source(s) -> {}",
        outcome.timeline.events.len(),
        outcome.timeline.sources.len(),
        dir.display()
    )?;
    if !outcome.wholly_failed.is_empty() {
        for c in &outcome.wholly_failed {
            writeln!(out, "container failed: {c}")?;
        }
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

fn load_sar(config: &RunConfig) -> Result<SarDataset> {
    let container = config.sar_input.clone().context("--sar is required")?;
    let manifest_path = container.join("manifest.json");
    let manufacturer = match &config.manufacturer {
        Some(m) => Manufacturer::parse(m).with_context(|| format!("unknown manufacturer {m:?}"))?,
        None => {
            let bytes = std::fs::read(&manifest_path)
                .with_context(|| format!("reading {}", manifest_path.display()))?;
            let manifest: serde_json::Value = serde_json::from_slice(&bytes)?;
            let name = manifest
                .get("manufacturer")
                .and_then(|v| v.as_str())
                .context("manifest has no manufacturer")?;
            Manufacturer::parse(name).with_context(|| format!("unknown manufacturer {name:?}"))?
        }
    };
    Ok(import_sar(&container, manufacturer)?)
}

/// `vapp sar` / `vapp correlate`: decode a SAR container, optionally merge a
/// phone timeline, and write correlation artifacts.
pub fn cmd_correlate(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    configure_jobs(config);
    let dir = config.out_dir.clone().context("--out is required")?;
    let sar = load_sar(config)?;

    let built_at = config
        .fixed_clock
        .unwrap_or_else(|| chrono::Utc::now().timestamp_millis());
    let (timeline_data, store, partial) = if config.sources.is_empty() {
        (
            timeline::build(Vec::new(), Vec::new(), built_at),
            None,
            false,
        )
    } else {
        let reg = load_registry(config)?;
        let outcome = build_timeline(config, &reg)?;
        let partial = !outcome.wholly_failed.is_empty();
        (outcome.timeline, Some(outcome.store), partial)
    };

    let correlation: CorrelationReport = correlate(&timeline_data, &sar, config.window_ms);
    let summary = timeline::summarize(&timeline_data);
    let custody = store
        .as_ref()
        .map(|s| s.custody_log_all())
        .unwrap_or_default();

    write_out(
        &dir,
        "correlation.json",
        &report::correlation_json(&correlation),
    )?;
    write_out(&dir, "sar.json", &{
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(&sar).unwrap()).unwrap();
        s.push('\n');
        s
    })?;
    write_out(
        &dir,
        "report.html",
        &report::html_report(&timeline_data, &summary, Some(&correlation), &custody),
    )?;
    if let Some(store) = &store {
        write_out(&dir, "custody.ndjson", &store.custody_ndjson())?;
    }

    writeln!(
        out,
        "{} matched, {} telemetry-confirmed trips, {} phone-only, {} SAR-only -> {}",
        correlation.matched.len(),
        correlation.telemetry_trips.len(),
        correlation.phone_only.len(),
        correlation.sar_only.len(),
        dir.display()
    )?;
    Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
}

/// `vapp fixtures`: render synthetic extractions (and optionally SAR
/// containers) from a seeded scenario.
#[derive(Debug, Clone)]
pub struct FixtureConfig {
    pub seed: u64,
    pub length: usize,
    pub out_dir: PathBuf,
    pub apps: Option<Vec<AppId>>,
    pub states: Vec<AccountState>,
    pub with_sar: bool,
    pub export_matrix: bool,
}

pub fn cmd_fixtures(config: &FixtureConfig, out: &mut dyn Write) -> Result<i32> {
    let gt = fixtures::GroundTruth::generate(config.seed, config.length)?;
    let apps: Vec<(AppId, Platform)> = match &config.apps {
        Some(list) => list
            .iter()
            .flat_map(|a| [(*a, Platform::Android), (*a, Platform::Ios)])
            .collect(),
        None => AppId::ALL
            .iter()
            .flat_map(|a| [(*a, Platform::Android), (*a, Platform::Ios)])
            .collect(),
    };

    for state in &config.states {
        let state_dir = config.out_dir.join(state.as_str());
        fixtures::render_many(&gt.scenario, &apps, *state, &state_dir)?;
        writeln!(
            out,
            "rendered {} container(s) under {}",
            apps.len(),
            state_dir.display()
        )?;
    }

    if config.with_sar {
        let sar_dir = config.out_dir.join("sar");
        for manufacturer in Manufacturer::ALL {
            let path = fixtures::render_sar(&gt.scenario, manufacturer, &sar_dir)?;
            writeln!(out, "rendered SAR container {}", path.display())?;
        }
    }

    if config.export_matrix {
        let matrix = fixtures::availability_matrix();
        write_out(
            &config.out_dir,
            "availability_matrix.json",
            &matrix.to_json(),
        )?;
        writeln!(out, "exported availability matrix")?;
    }

    let scenario_json =
        serde_json::to_string_pretty(&serde_json::to_value(&gt.scenario).unwrap()).unwrap();
    write_out(&config.out_dir, "scenario.json", &scenario_json)?;
    Ok(EXIT_OK)
}

/// Parse an RFC 3339 clock override.
pub fn parse_fixed_clock(text: &str) -> Result<i64> {
    Ok(chrono::DateTime::parse_from_rfc3339(text)
        .with_context(|| format!("--fixed-clock {text:?} is not RFC 3339"))?
        .timestamp_millis())
}

/// Apps listed as comma-separated ids.
pub fn parse_apps(text: &str) -> Result<Vec<AppId>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| AppId::parse(s).with_context(|| format!("unknown app id {s:?}")))
        .collect()
}

pub fn parse_states(text: &str) -> Result<Vec<AccountState>> {
    let states: Result<BTreeSet<AccountState>> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| AccountState::parse(s).with_context(|| format!("unknown state {s:?}")))
        .collect();
    Ok(states?.into_iter().collect())
}

pub fn parse_formats(text: &str) -> Result<Vec<OutputFormat>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "html" => Ok(OutputFormat::Html),
            other => bail!("unknown format {other:?} (expected json, csv or html)"),
        })
        .collect()
}
