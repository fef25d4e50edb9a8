//! Command-level behavior: exit codes, output files, registry overrides.

use std::path::Path;
use std::process::Command;

use vapp_core::fixtures::{render_extraction, render_sar, AccountState, GroundTruth};
use vapp_core::locator::{AppId, Platform};
use vapp_core::sar::Manufacturer;

fn vapp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vapp"))
}

fn render_tesla(dir: &Path) -> GroundTruth {
    let gt = GroundTruth::generate(21, 9).unwrap();
    render_extraction(
        &gt.scenario,
        AppId::Tesla,
        Platform::Android,
        AccountState::LoggedIn,
        dir,
    )
    .unwrap();
    gt
}

#[test]
fn scan_lists_detected_containers() {
    let dir = tempfile::tempdir().unwrap();
    render_tesla(dir.path());
    let output = vapp()
        .args(["scan", "--source"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("tesla\tandroid\t/data/data/com.teslamotors.tesla"),
        "{stdout}"
    );
    assert!(stdout.trim_end().ends_with("1 containers"), "{stdout}");
}

#[test]
fn scan_of_empty_directory_reports_zero_containers() {
    let dir = tempfile::tempdir().unwrap();
    let output = vapp()
        .args(["scan", "--source"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stdout).contains("0 containers"));
}

#[test]
fn unreadable_source_exits_2_with_message_on_stderr() {
    let output = vapp()
        .args(["scan", "--source", "/definitely/not/here"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!output.stderr.is_empty());
    assert!(output.stdout.is_empty());
}

#[test]
fn timeline_writes_artifacts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    render_tesla(dir.path());
    let out1 = tempfile::tempdir().unwrap();
    let out2 = tempfile::tempdir().unwrap();
    for out in [&out1, &out2] {
        let status = vapp()
            .args([
                "timeline",
                "--fixed-clock",
                "2020-12-01T00:00:00Z",
                "--format",
                "json,csv,html",
                "--source",
            ])
            .arg(dir.path())
            .arg("--out")
            .arg(out.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    for name in [
        "events.json",
        "events.csv",
        "summary.json",
        "custody.ndjson",
        "report.html",
    ] {
        let a = std::fs::read(out1.path().join(name)).unwrap();
        let b = std::fs::read(out2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs across runs");
        assert!(!a.is_empty());
    }
    // The report stands alone: no network references, no scripts.
    let html = std::fs::read_to_string(out1.path().join("report.html")).unwrap();
    assert!(
        !html.contains("http://") && !html.contains("https://"),
        "external refs in report"
    );
    assert!(!html.contains("<script"));
}

#[test]
fn timeline_of_encrypted_only_container_succeeds() {
    // A container holding nothing but the two encrypted stores.
    let gt = GroundTruth::generate(22, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    render_extraction(
        &gt.scenario,
        AppId::MercedesMe,
        Platform::Android,
        AccountState::LoggedIn,
        dir.path(),
    )
    .unwrap();
    let root = dir.path().join("data/data/com.daimler.mbfa.android");
    for keep in ["app_webview", "cache", "resources", "shared_prefs"] {
        std::fs::remove_dir_all(root.join(keep)).unwrap();
    }

    let out = tempfile::tempdir().unwrap();
    let output = vapp()
        .args([
            "timeline",
            "--fixed-clock",
            "2020-12-01T00:00:00Z",
            "--source",
        ])
        .arg(dir.path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let events: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join("events.json")).unwrap()).unwrap();
    let kinds: Vec<&str> = events["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["kind"].as_str().unwrap())
        .collect();
    assert!(!kinds.is_empty());
    assert!(
        kinds.iter().all(|k| *k == "encrypted_artifact"),
        "{kinds:?}"
    );
}

#[test]
fn sar_only_report_has_sar_sections() {
    let gt = GroundTruth::generate(23, 9).unwrap();
    let sar_dir = tempfile::tempdir().unwrap();
    let container = render_sar(&gt.scenario, Manufacturer::Onstar, sar_dir.path()).unwrap();

    let out = tempfile::tempdir().unwrap();
    let output = vapp()
        .args(["sar", "--sar"])
        .arg(&container)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let correlation: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join("correlation.json")).unwrap())
            .unwrap();
    assert_eq!(correlation["phone_considered"], 0);
    assert!(correlation["sar_considered"].as_u64().unwrap() > 0);
    assert!(!correlation["sar_only"].as_array().unwrap().is_empty());
    assert!(out.path().join("report.html").exists());
    assert!(out.path().join("sar.json").exists());
}

#[test]
fn correlate_joint_fixture_produces_matches() {
    let gt = GroundTruth::generate(24, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    render_extraction(
        &gt.scenario,
        AppId::WeconnectGo,
        Platform::Android,
        AccountState::LoggedIn,
        dir.path(),
    )
    .unwrap();
    let sar_dir = tempfile::tempdir().unwrap();
    let container = render_sar(&gt.scenario, Manufacturer::Volkswagen, sar_dir.path()).unwrap();

    let out = tempfile::tempdir().unwrap();
    let output = vapp()
        .args([
            "correlate",
            "--fixed-clock",
            "2020-12-01T00:00:00Z",
            "--source",
        ])
        .arg(dir.path())
        .arg("--sar")
        .arg(&container)
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let correlation: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join("correlation.json")).unwrap())
            .unwrap();
    assert!(
        !correlation["matched"].as_array().unwrap().is_empty(),
        "joint fixture must produce at least one matched pair"
    );
}

#[test]
fn malformed_sar_manifest_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("manifest.json"),
        b"{\"manufacturer\":\"ford\",\"categories\":[]}",
    )
    .unwrap();
    let out = tempfile::tempdir().unwrap();
    let output = vapp()
        .args(["sar", "--sar"])
        .arg(dir.path())
        .arg("--out")
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn registry_override_via_flag_and_env() {
    // Export the registry through the library, strip it down to Tesla only,
    // and confirm both the flag and the environment variable are honored.
    let reg = vapp_core::locator::registry();
    let tesla_only: Vec<_> = reg
        .into_iter()
        .filter(|d| d.app_id == AppId::Tesla)
        .collect();
    let json = vapp_core::locator::registry_to_json(&tesla_only);
    let reg_file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(reg_file.path(), json).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let gt = GroundTruth::generate(25, 9).unwrap();
    render_extraction(
        &gt.scenario,
        AppId::Tesla,
        Platform::Android,
        AccountState::LoggedIn,
        dir.path(),
    )
    .unwrap();
    render_extraction(
        &gt.scenario,
        AppId::Myopel,
        Platform::Android,
        AccountState::LoggedIn,
        dir.path(),
    )
    .unwrap();

    let output = vapp()
        .args(["scan", "--registry"])
        .arg(reg_file.path())
        .arg("--source")
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("tesla") && !stdout.contains("myopel"),
        "{stdout}"
    );

    let output = vapp()
        .env("VAPP_REGISTRY", reg_file.path())
        .args(["scan", "--source"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(
        stdout.contains("tesla") && !stdout.contains("myopel"),
        "{stdout}"
    );
}

#[test]
fn fixtures_command_renders_requested_states() {
    let out = tempfile::tempdir().unwrap();
    let status = vapp()
        .args([
            "fixtures",
            "--seed",
            "9",
            "--apps",
            "tesla,weconnect_go",
            "--states",
            "logged_in,uninstalled",
            "--export-matrix",
        ])
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out
        .path()
        .join("logged_in/data/data/com.teslamotors.tesla")
        .exists());
    assert!(out
        .path()
        .join("logged_in/data/data/en.volkswagen.vwconnect")
        .exists());
    // Uninstalled renders an empty tree.
    assert!(!out.path().join("uninstalled/data").exists());
    assert!(out.path().join("availability_matrix.json").exists());
    assert!(out.path().join("scenario.json").exists());
}
