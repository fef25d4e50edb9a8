//! Renderer properties: determinism and registry/pattern agreement.

use std::collections::BTreeMap;
use std::path::Path;

use vapp_core::fixtures::{render_extraction, render_sar, AccountState, GroundTruth};
use vapp_core::locator::{descriptor, registry, AppId, Platform, IOS_METADATA_PLIST};
use vapp_core::sar::Manufacturer;
use vapp_core::util::glob_match;

fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    walk(root, root, &mut out);
    out
}

#[test]
fn render_is_byte_deterministic() {
    let gt = GroundTruth::generate(13, 9).unwrap();
    for state in AccountState::ALL {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for app in [
            AppId::WeconnectGo,
            AppId::MercedesMe,
            AppId::Tesla,
            AppId::Drivemii,
        ] {
            for platform in [Platform::Android, Platform::Ios] {
                render_extraction(&gt.scenario, app, platform, state, a.path()).unwrap();
                render_extraction(&gt.scenario, app, platform, state, b.path()).unwrap();
            }
        }
        let ta = tree_bytes(a.path());
        let tb = tree_bytes(b.path());
        assert_eq!(ta.keys().collect::<Vec<_>>(), tb.keys().collect::<Vec<_>>());
        for (path, bytes) in &ta {
            assert_eq!(
                bytes, &tb[path],
                "{state:?}: {path} differs between renders"
            );
        }
    }
}

#[test]
fn sar_render_is_byte_deterministic() {
    let gt = GroundTruth::generate(14, 9).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for m in Manufacturer::ALL {
        render_sar(&gt.scenario, m, a.path()).unwrap();
        render_sar(&gt.scenario, m, b.path()).unwrap();
    }
    assert_eq!(tree_bytes(a.path()), tree_bytes(b.path()));
}

/// Every rendered file inside a container is reachable through the
/// descriptor: it matches an artifact spec or a marker pattern (or is the
/// container metadata plist). Catches drift between renderers and registry.
#[test]
fn rendered_files_match_registry_patterns() {
    let gt = GroundTruth::generate(15, 9).unwrap();
    let reg = registry();
    for app in AppId::ALL {
        for platform in [Platform::Android, Platform::Ios] {
            let dir = tempfile::tempdir().unwrap();
            render_extraction(
                &gt.scenario,
                app,
                platform,
                AccountState::LoggedIn,
                dir.path(),
            )
            .unwrap();
            let desc = descriptor(&reg, app, platform).unwrap();
            let container =
                vapp_core::fixtures::container_root(gt.scenario.seed, app, platform).unwrap();
            let container = dir.path().join(container);
            if !container.exists() {
                continue;
            }
            for (rel, _) in tree_bytes(&container) {
                if rel == IOS_METADATA_PLIST || rel == "cache/journal" {
                    continue; // container plumbing, not an artifact
                }
                let matched = desc
                    .artifact_specs
                    .iter()
                    .map(|s| s.relative_path_pattern.as_str())
                    .chain(
                        desc.package_or_bundle_markers
                            .iter()
                            .map(|m| m.pattern.as_str()),
                    )
                    .any(|pattern| glob_match(pattern, &rel));
                assert!(
                    matched,
                    "{app:?}/{platform:?}: rendered {rel} matches no registry pattern"
                );
            }
        }
    }
}
