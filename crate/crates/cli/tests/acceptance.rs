//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (`cargo test --test acceptance -- --nocapture` shows them).
//!
//! Every tolerance is pinned in the assertions below; nothing is deferred to
//! later calibration.

use std::path::Path;
use std::time::Instant;

use vapp_cli::{cmd_timeline, OutputFormat, RunConfig};
use vapp_core::event::normalize;
use vapp_core::evidence::EvidenceStore;
use vapp_core::extract::extract_artifacts;
use vapp_core::fixtures::conformance::compare;
use vapp_core::fixtures::scenario::{Action, RoutePoint, Scenario};
use vapp_core::fixtures::writers::scramble;
use vapp_core::fixtures::{
    render_extraction, render_sar, telemetry_csv, AccountState, GroundTruth,
    TESLA_TELEMETRY_COLUMNS,
};
use vapp_core::locator::{
    detect_android, detect_ios, registry, AppId, Platform, StoreMarkerReader,
};
use vapp_core::sar::{correlate, import_sar, import_telemetry, Manufacturer};
use vapp_core::timeline::{self, Timeline};
use vapp_core::{CanonicalEvent, EventKind, IdentityRecord};

const FIXED_CLOCK: i64 = 1_606_780_800_000; // 2020-12-01T00:00:00Z

fn pass(n: u32, name: &str) {
    println!("ACCEPTANCE criterion {n} ({name}): PASS");
}

fn all_pairs() -> Vec<(AppId, Platform)> {
    AppId::ALL
        .iter()
        .flat_map(|a| [(*a, Platform::Android), (*a, Platform::Ios)])
        .collect()
}

struct PipelineRun {
    store: EvidenceStore,
    source_id: String,
    timeline: Timeline,
}

/// Full pipeline over an already-rendered device tree.
fn run_pipeline(root: &Path) -> PipelineRun {
    let mut store = EvidenceStore::new("acceptance").with_fixed_clock(FIXED_CLOCK);
    let source = store.open_source(root, None).unwrap();
    let inventory = store.enumerate_files(&source.id).unwrap();
    let reg = registry();
    let mut matches = detect_android(&reg, &inventory.entries);
    let reader = StoreMarkerReader {
        store: &store,
        source_id: &source.id,
    };
    matches.extend(detect_ios(&reg, &inventory.entries, &reader).unwrap());

    let mut events = Vec::new();
    for m in &matches {
        let result = extract_artifacts(&store, &source.id, m).unwrap();
        assert!(
            result.skipped.is_empty(),
            "skipped artifacts: {:?}",
            result.skipped
        );
        let outcome = normalize(&result.records);
        assert!(
            outcome.skips.is_empty(),
            "normalize skips: {:?}",
            outcome.skips
        );
        events.extend(outcome.events);
    }
    let timeline = timeline::build(events, vec![source.id.clone()], FIXED_CLOCK);
    PipelineRun {
        store,
        source_id: source.id,
        timeline,
    }
}

fn render_one(
    gt: &GroundTruth,
    app: AppId,
    platform: Platform,
    state: AccountState,
) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    render_extraction(&gt.scenario, app, platform, state, dir.path()).unwrap();
    dir
}

/// Criterion 1: fixture round-trip recovery equals the expected-recovery
/// oracle for all twenty (app, platform) pairs in all three account states —
/// 60 runs, zero mismatches — in under 60 seconds.
#[test]
fn criterion_1_matrix_conformance() {
    let started = Instant::now();
    let gt = GroundTruth::generate(1, 9).unwrap();
    let mut cells = 0u32;
    let mut failures = Vec::new();

    for (app, platform) in all_pairs() {
        for state in AccountState::ALL {
            cells += 1;
            let dir = render_one(&gt, app, platform, state);
            let run = run_pipeline(dir.path());
            let expected = gt.expected(app, platform, state);
            let mismatches = compare(&expected, &run.timeline.events);
            if !mismatches.is_empty() {
                failures.push(format!(
                    "{app:?}/{platform:?}/{state:?}: {}",
                    mismatches.join("; ")
                ));
            }
        }
    }

    assert_eq!(cells, 60);
    assert!(
        failures.is_empty(),
        "{} mismatched cells:\n{}",
        failures.len(),
        failures.join("\n")
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "conformance took {elapsed:?}, budget is 60 s"
    );
    pass(1, "matrix conformance, 60 cells");
}

/// Criterion 2: single-byte tampering is detected on exactly the touched
/// file, and every emitted event's provenance digest matches the custody log.
#[test]
fn criterion_2_custody_integrity() {
    let gt = GroundTruth::generate(2, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (app, platform) in all_pairs() {
        render_extraction(
            &gt.scenario,
            app,
            platform,
            AccountState::LoggedIn,
            dir.path(),
        )
        .unwrap();
    }

    let run = run_pipeline(dir.path());
    assert!(!run.timeline.events.is_empty());

    // Provenance digest of every event matches the inventoried digest.
    for e in &run.timeline.events {
        for p in &e.provenance {
            let digest = run.store.inventory_digest(&run.source_id, &p.artifact_path);
            assert_eq!(
                digest.as_deref(),
                Some(p.sha256.as_str()),
                "provenance digest drift for {}",
                p.artifact_path
            );
        }
    }

    // Flip one byte in every fixture artifact in turn; verify() must flag
    // exactly that file.
    let mut store = EvidenceStore::new("acceptance");
    let source = store.open_source(dir.path(), None).unwrap();
    let inventory = store.enumerate_files(&source.id).unwrap();
    assert!(
        inventory.entries.len() > 40,
        "fixture corpus unexpectedly small"
    );
    for entry in &inventory.entries {
        let on_disk = dir.path().join(entry.path.trim_start_matches('/'));
        let original = std::fs::read(&on_disk).unwrap();
        if original.is_empty() {
            continue;
        }
        let mut mutated = original.clone();
        let idx = mutated.len() / 2;
        mutated[idx] ^= 0x20;
        std::fs::write(&on_disk, &mutated).unwrap();

        let report = store.verify(&source.id, &inventory.entries).unwrap();
        assert_eq!(
            report.changed,
            vec![entry.path.clone()],
            "flip in {}",
            entry.path
        );
        assert!(report.missing.is_empty());

        std::fs::write(&on_disk, &original).unwrap();
    }
    let report = store.verify(&source.id, &inventory.entries).unwrap();
    assert!(report.all_ok());
    pass(2, "custody integrity");
}

fn haversine_oracle(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let r = 6_371_000.0_f64;
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = (lat2 - lat1).to_radians();
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * r * a.sqrt().atan2((1.0 - a).sqrt())
}

/// Criterion 3: the ten-minute drive sampled every ten seconds yields 61±1
/// trackpoint fixes bound to one trip, and the reconstructed polyline length
/// is within 1% of the scenario's ground truth.
#[test]
fn criterion_3_mercedes_trackpoint_reconstruction() {
    let gt = GroundTruth::generate(3, 9).unwrap();
    let drives = gt.scenario.drives();
    let drive = &drives[0];
    assert_eq!(drive.duration_s(), 600, "first drive is the ten-minute one");

    let dir = render_one(
        &gt,
        AppId::MercedesMe,
        Platform::Ios,
        AccountState::LoggedIn,
    );
    let run = run_pipeline(dir.path());

    let trips: Vec<&CanonicalEvent> = run
        .timeline
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Trip)
        .collect();
    assert_eq!(trips.len(), 1);
    let trip_ref = trips[0]
        .attr_str("trip_ref")
        .expect("trip carries its reference")
        .to_string();
    assert_eq!(trips[0].attr_f64("trackpoint_count"), Some(61.0));

    let mut fixes: Vec<&CanonicalEvent> = run
        .timeline
        .events
        .iter()
        .filter(|e| e.kind == EventKind::LocationFix && e.attr_str("trip_ref") == Some(&trip_ref))
        .collect();
    fixes.sort_by_key(|e| e.start);
    assert!(
        (60..=62).contains(&fixes.len()),
        "expected 61 +/- 1 fixes, got {}",
        fixes.len()
    );

    let reconstructed_m: f64 = fixes
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].geo_start.unwrap(), w[1].geo_start.unwrap());
            haversine_oracle(a.lat, a.lon, b.lat, b.lon)
        })
        .sum();
    let truth_m: f64 = drive
        .route
        .windows(2)
        .map(|w| haversine_oracle(w[0].lat, w[0].lon, w[1].lat, w[1].lon))
        .sum();
    let error = (reconstructed_m - truth_m).abs() / truth_m;
    assert!(
        error < 0.01,
        "polyline error {:.4}% exceeds 1%",
        error * 100.0
    );
    pass(3, "trackpoint reconstruction, 61 fixes, <1% length error");
}

/// Criterion 4: a 60-second, 229-column, 10 Hz telemetry fixture imports at
/// 10 Hz (±1%) and correlates with the concurrent phone trip within 2 s.
#[test]
fn criterion_4_tesla_telemetry() {
    // Desk-scale scenario: one 56-second drive, so the telemetry covers
    // almost exactly one minute including the parked margins.
    let start = 1_604_395_000_000_i64;
    let end = start + 56_000;
    let scenario = Scenario {
        seed: 4,
        vin: "5YJSA1E2XJF000001".into(),
        user: IdentityRecord {
            email: Some("driver@example.org".into()),
            ..Default::default()
        },
        base_time: start,
        actions: vec![Action::Drive {
            start,
            end,
            route: vec![
                RoutePoint {
                    t: start,
                    lat: 51.9500,
                    lon: 7.6000,
                },
                RoutePoint {
                    t: end,
                    lat: 51.9560,
                    lon: 7.6080,
                },
            ],
        }],
    };

    let csv = telemetry_csv(&scenario);
    let series = import_telemetry(&csv, None).unwrap();
    assert_eq!(series.columns.len(), TESLA_TELEMETRY_COLUMNS);
    assert_eq!(series.columns.len(), 229);
    assert!(
        (series.nominal_rate_hz - 10.0).abs() / 10.0 <= 0.01,
        "rate {} Hz outside 10 Hz +/- 1%",
        series.nominal_rate_hz
    );
    let span_ms = series.rows.last().unwrap().t - series.rows.first().unwrap().t;
    assert_eq!(span_ms, 60_000, "fixture covers 60 s");

    // Phone side: the same scenario through We Connect Go.
    let gt = GroundTruth::new(scenario.clone());
    let dir = render_one(
        &gt,
        AppId::WeconnectGo,
        Platform::Android,
        AccountState::LoggedIn,
    );
    let run = run_pipeline(dir.path());
    let trips: Vec<_> = run
        .timeline
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Trip)
        .collect();
    assert_eq!(trips.len(), 1);

    let sar_dir = tempfile::tempdir().unwrap();
    let container = render_sar(&scenario, Manufacturer::Tesla, sar_dir.path()).unwrap();
    let dataset = import_sar(&container, Manufacturer::Tesla).unwrap();
    assert_eq!(dataset.telemetry.as_ref().unwrap().columns.len(), 229);

    let report = correlate(&run.timeline, &dataset, 60_000);
    let matched: Vec<_> = report
        .telemetry_trips
        .iter()
        .filter(|m| m.trip_event_id == trips[0].event_id)
        .collect();
    assert_eq!(
        matched.len(),
        1,
        "the concurrent phone trip must match telemetry"
    );
    assert!(
        matched[0].start_delta_ms <= 2_000,
        "start delta {} ms",
        matched[0].start_delta_ms
    );
    assert!(
        matched[0].end_delta_ms <= 2_000,
        "end delta {} ms",
        matched[0].end_delta_ms
    );
    pass(4, "telemetry import at 10 Hz and trip match within 2 s");
}

/// Criterion 5: logout semantics. We Connect Go keeps only the parking image
/// and DataPlug identifiers; myAudi Android keeps the full logbook.
#[test]
fn criterion_5_logout_semantics() {
    let gt = GroundTruth::generate(5, 9).unwrap();

    // We Connect Go iOS, logged out.
    let dir = render_one(
        &gt,
        AppId::WeconnectGo,
        Platform::Ios,
        AccountState::LoggedOut,
    );
    let run = run_pipeline(dir.path());
    let events = &run.timeline.events;
    assert!(events.iter().all(|e| !matches!(
        e.kind,
        EventKind::Trip | EventKind::Refuel | EventKind::Parking
    )));
    assert!(
        events.iter().any(|e| e.kind == EventKind::StatusSnapshot
            && e.attr_str("snapshot") == Some("parking_photo")),
        "parking image must survive logout"
    );
    assert!(
        events.iter().any(
            |e| e.kind == EventKind::VehicleInfo && e.attributes.contains_key("adapter_serial")
        ),
        "DataPlug identifiers must survive logout"
    );
    let expected = gt.expected(AppId::WeconnectGo, Platform::Ios, AccountState::LoggedOut);
    let mismatches = compare(&expected, events);
    assert!(
        mismatches.is_empty(),
        "exact expected-event equality: {mismatches:?}"
    );

    // myAudi Android, logged out: the logbook survives in full.
    let dir = render_one(
        &gt,
        AppId::Myaudi,
        Platform::Android,
        AccountState::LoggedOut,
    );
    let run = run_pipeline(dir.path());
    let trips = run
        .timeline
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Trip)
        .count();
    let refuels = run
        .timeline
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Refuel)
        .count();
    assert_eq!(trips, gt.scenario.drives().len());
    assert_eq!(refuels, gt.scenario.refuels().len());
    let expected = gt.expected(AppId::Myaudi, Platform::Android, AccountState::LoggedOut);
    let mismatches = compare(&expected, &run.timeline.events);
    assert!(
        mismatches.is_empty(),
        "exact expected-event equality: {mismatches:?}"
    );
    pass(5, "logout semantics");
}

/// Criterion 6: uninstalled-state fixtures yield zero app events for every
/// (app, platform) pair.
#[test]
fn criterion_6_uninstall_semantics() {
    let gt = GroundTruth::generate(6, 9).unwrap();
    for (app, platform) in all_pairs() {
        let dir = render_one(&gt, app, platform, AccountState::Uninstalled);
        let run = run_pipeline(dir.path());
        assert!(
            run.timeline.events.is_empty(),
            "{app:?}/{platform:?} uninstalled yielded {} events",
            run.timeline.events.len()
        );
        assert!(gt
            .expected(app, platform, AccountState::Uninstalled)
            .is_empty());
    }
    pass(6, "uninstall semantics, 20 pairs");
}

/// Criterion 7: `timeline` outputs are byte-identical across repeat runs and
/// across shuffled source order when the clock is pinned.
#[test]
fn criterion_7_determinism() {
    let gt = GroundTruth::generate(7, 9).unwrap();
    // Two separate sources so argument order can actually vary.
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for (app, platform) in [
        (AppId::WeconnectGo, Platform::Android),
        (AppId::Tesla, Platform::Android),
    ] {
        render_extraction(
            &gt.scenario,
            app,
            platform,
            AccountState::LoggedIn,
            dir_a.path(),
        )
        .unwrap();
    }
    for (app, platform) in [
        (AppId::MercedesMe, Platform::Ios),
        (AppId::Myaudi, Platform::Android),
    ] {
        render_extraction(
            &gt.scenario,
            app,
            platform,
            AccountState::LoggedIn,
            dir_b.path(),
        )
        .unwrap();
    }

    let run = |sources: Vec<std::path::PathBuf>| {
        let out = tempfile::tempdir().unwrap();
        let config = RunConfig {
            sources,
            out_dir: Some(out.path().to_path_buf()),
            formats: vec![OutputFormat::Json, OutputFormat::Csv, OutputFormat::Html],
            fixed_clock: Some(FIXED_CLOCK),
            ..RunConfig::default()
        };
        let mut sink = Vec::new();
        let code = cmd_timeline(&config, &mut sink).unwrap();
        assert_eq!(code, 0);
        let read = |name: &str| std::fs::read(out.path().join(name)).unwrap();
        (
            read("events.json"),
            read("events.csv"),
            read("summary.json"),
            read("custody.ndjson"),
            read("report.html"),
        )
    };

    let forward = vec![dir_a.path().to_path_buf(), dir_b.path().to_path_buf()];
    let shuffled = vec![dir_b.path().to_path_buf(), dir_a.path().to_path_buf()];
    let first = run(forward.clone());
    let second = run(forward);
    let third = run(shuffled);
    assert_eq!(first, second, "repeat run must be byte-identical");
    assert_eq!(first, third, "source order must not affect output bytes");
    pass(7, "deterministic outputs under --fixed-clock");
}

/// Criterion 8: 10,000 random mutations across the fixture corpus, every
/// reader total, no crashes, no per-case stall beyond 10 s.
#[test]
fn criterion_8_format_reader_robustness() {
    use rand::{Rng, SeedableRng};
    let gt = GroundTruth::generate(8, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (app, platform) in all_pairs() {
        render_extraction(
            &gt.scenario,
            app,
            platform,
            AccountState::LoggedIn,
            dir.path(),
        )
        .unwrap();
    }
    let mut files = Vec::new();
    collect_files(dir.path(), &mut files);
    files.sort();
    assert!(files.len() > 40);
    let corpus: Vec<Vec<u8>> = files.iter().map(|p| std::fs::read(p).unwrap()).collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0ddba11);
    for case in 0..10_000u32 {
        let mut bytes = corpus[rng.gen_range(0..corpus.len())].clone();
        match rng.gen_range(0..4) {
            0 => {
                // Flip a handful of bytes.
                for _ in 0..rng.gen_range(1..8) {
                    if bytes.is_empty() {
                        break;
                    }
                    let i = rng.gen_range(0..bytes.len());
                    bytes[i] ^= rng.gen_range(1..=255u8);
                }
            }
            1 => {
                let keep = rng.gen_range(0..=bytes.len());
                bytes.truncate(keep);
            }
            2 => {
                let at = rng.gen_range(0..=bytes.len());
                let n = rng.gen_range(1..32);
                let junk: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
                bytes.splice(at..at, junk);
            }
            _ => {
                // Swap two random windows.
                if bytes.len() > 64 {
                    let a = rng.gen_range(0..bytes.len() - 32);
                    let b = rng.gen_range(0..bytes.len() - 32);
                    for k in 0..32 {
                        bytes.swap(a + k, b + k);
                    }
                }
            }
        }

        let started = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            use vapp_core::formats::*;
            let _ = read_sqlite(&bytes);
            let _ = read_plist(&bytes);
            let _ = read_json(&bytes);
            let _ = read_gzip_json(&bytes);
            let _ = read_xml_prefs(&bytes);
            let _ = read_tlv_strings(&bytes);
            let _ = detect_encrypted_db(&bytes);
            let _ = decode_base64_image(&String::from_utf8_lossy(&bytes[..bytes.len().min(512)]));
        }));
        assert!(outcome.is_ok(), "reader panicked on fuzz case {case}");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs() < 10, "fuzz case {case} took {elapsed:?}");
    }
    pass(8, "10,000-case mutation fuzz, zero crashes");
}

fn collect_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, out);
        } else {
            out.push(path);
        }
    }
}

/// Criterion 9: scrambled stores are flagged as encrypted artifacts and never
/// partially parsed; their plaintext equivalents parse fully; no plaintext
/// fixture file is ever flagged.
#[test]
fn criterion_9_encryption_flagging() {
    let gt = GroundTruth::generate(9, 9).unwrap();

    let encrypted_suffixes = [
        "databases/driverlogbookDatabase.db",
        "databases/mbfa.db",
        "fav/locations.sqlite",
        "fav/markers.sqlite",
        "itn/itineraries.sqlite",
        "tracks/tracks.sqlite",
    ];

    for (app, platform) in [
        (AppId::MercedesMe, Platform::Android),
        (AppId::Drivemii, Platform::Android),
        (AppId::Drivemii, Platform::Ios),
    ] {
        let dir = render_one(&gt, app, platform, AccountState::LoggedIn);
        let run = run_pipeline(dir.path());

        let flagged: Vec<&CanonicalEvent> = run
            .timeline
            .events
            .iter()
            .filter(|e| e.kind == EventKind::EncryptedArtifact)
            .collect();
        let expected_flagged = match (app, platform) {
            (AppId::MercedesMe, _) => 2,
            (AppId::Drivemii, _) => 4,
            _ => unreachable!(),
        };
        assert_eq!(flagged.len(), expected_flagged, "{app:?}/{platform:?}");

        // Never partial records: nothing else decoded out of those paths.
        for e in &run.timeline.events {
            if e.kind == EventKind::EncryptedArtifact {
                continue;
            }
            for p in &e.provenance {
                assert!(
                    !encrypted_suffixes
                        .iter()
                        .any(|s| p.artifact_path.ends_with(s)),
                    "decoded record out of encrypted store {}",
                    p.artifact_path
                );
            }
        }

        // Plaintext equivalents parse fully: the scrambler is a keyed XOR
        // stream, so applying it again restores the plaintext database.
        let mut scrambled_files = Vec::new();
        collect_files(dir.path(), &mut scrambled_files);
        for path in scrambled_files {
            let rel = path.to_string_lossy().into_owned();
            let Some(suffix) = encrypted_suffixes.iter().find(|s| rel.ends_with(**s)) else {
                continue;
            };
            let bytes = std::fs::read(&path).unwrap();
            assert!(
                vapp_core::formats::detect_encrypted_db(&bytes),
                "{suffix} not flagged"
            );
            let label_start = rel.rfind(suffix).unwrap();
            let label = match (app, platform) {
                (AppId::Drivemii, Platform::Android) => format!("files/{suffix}"),
                (AppId::Drivemii, Platform::Ios) => format!("home/{suffix}"),
                _ => rel[label_start..].to_string(),
            };
            let plain = scramble(&bytes, gt.scenario.seed, &label);
            let set = vapp_core::formats::read_sqlite(&plain)
                .unwrap_or_else(|e| panic!("plaintext equivalent of {suffix} failed: {e}"));
            assert!(!set.tables.is_empty());
            assert!(!vapp_core::formats::detect_encrypted_db(&plain));
        }
    }

    // Zero false positives across the whole fixture corpus.
    let dir = tempfile::tempdir().unwrap();
    for (app, platform) in all_pairs() {
        render_extraction(
            &gt.scenario,
            app,
            platform,
            AccountState::LoggedIn,
            dir.path(),
        )
        .unwrap();
    }
    let mut files = Vec::new();
    collect_files(dir.path(), &mut files);
    for path in files {
        let rel = path.to_string_lossy().into_owned();
        let bytes = std::fs::read(&path).unwrap();
        let flagged = vapp_core::formats::detect_encrypted_db(&bytes);
        let is_scrambled = encrypted_suffixes.iter().any(|s| rel.ends_with(s));
        assert_eq!(flagged, is_scrambled, "false classification for {rel}");
    }
    pass(9, "encryption flagging with zero false positives");
}
