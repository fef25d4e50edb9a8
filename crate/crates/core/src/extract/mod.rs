//! Per-app artifact extraction: turn located containers into raw records.
//!
//! Every artifact spec of the matched descriptor is applied to the container.
//! Missing files are silently absent (logout and uninstall states look like
//! that), unparseable files land in `skipped`, and known-encrypted stores are
//! flagged without being parsed. Reads go through the evidence store, so the
//! custody log records every parsed artifact.

mod drivemii;
mod fordpass;
mod helpers;
mod mercedes;
mod my_bmw;
mod myaudi;
mod myopel;
mod onstar;
mod seat;
mod tesla;
mod weconnect;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::event::{EventKind, Provenance};
use crate::evidence::{EvidenceError, EvidenceStore};
use crate::formats::{detect_encrypted_db, read_sqlite, TreeValue};
use crate::locator::{AppId, ArtifactSpec, ContainerMatch, Platform};
use crate::util::glob_match;
use crate::EXTRACTOR_VERSION;

/// One raw record lifted out of an artifact, before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub app_id: AppId,
    pub platform: Platform,
    /// Device-absolute path of the artifact this record came from.
    pub artifact_path: String,
    /// Table/row, tree key path, or byte range within the artifact.
    pub locator: String,
    pub kind_hint: EventKind,
    pub fields: BTreeMap<String, TreeValue>,
    pub encrypted: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedArtifact {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExtractionResult {
    pub records: Vec<RawRecord>,
    pub skipped: Vec<SkippedArtifact>,
    pub encrypted_artifacts: Vec<String>,
    /// Every artifact-spec match that was processed, whether or not it
    /// yielded records; records ∪ skipped ∪ encrypted ⊆ processed.
    pub processed: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("unknown app {0}")]
    UnknownApp(String),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
}

/// The event-yielding artifact catalog for one app and platform (marker-only
/// rows are identification aids, not artifacts).
pub fn list_artifact_specs(app_id: AppId, platform: Platform) -> Vec<ArtifactSpec> {
    let reg = crate::locator::registry();
    crate::locator::descriptor(&reg, app_id, platform)
        .map(|d| {
            d.artifact_specs
                .iter()
                .filter(|s| !s.yields.is_empty())
                .cloned()
                .collect()
        })
        .unwrap_or_default()
}

/// Everything an app extractor sees for one artifact file.
pub struct ArtifactCtx<'a> {
    pub app_id: AppId,
    pub platform: Platform,
    pub spec: &'a ArtifactSpec,
    /// Device-absolute path.
    pub path: &'a str,
    /// Path relative to the container root.
    pub rel_path: &'a str,
    pub bytes: &'a [u8],
    pub source_id: &'a str,
    pub sha256: &'a str,
}

impl<'a> ArtifactCtx<'a> {
    pub fn provenance(&self, locator: &str) -> Provenance {
        Provenance {
            source_id: self.source_id.to_string(),
            artifact_path: self.path.to_string(),
            sha256: self.sha256.to_string(),
            locator: locator.to_string(),
            extractor_version: EXTRACTOR_VERSION.to_string(),
        }
    }

    pub fn record(&self, kind: EventKind, locator: &str) -> RawRecord {
        RawRecord {
            app_id: self.app_id,
            platform: self.platform,
            artifact_path: self.path.to_string(),
            locator: locator.to_string(),
            kind_hint: kind,
            fields: BTreeMap::new(),
            encrypted: false,
            provenance: self.provenance(locator),
        }
    }

    /// Base name of the artifact file.
    pub fn file_name(&self) -> &str {
        self.rel_path.rsplit('/').next().unwrap_or(self.rel_path)
    }
}

/// Apply every artifact spec of the matched descriptor against the container.
///
/// Read-only over the source; deterministic record order (specs in registry
/// order, files lexicographic, rows in storage order).
pub fn extract_artifacts(
    store: &EvidenceStore,
    source_id: &str,
    cm: &ContainerMatch,
) -> Result<ExtractionResult, ExtractError> {
    let mut result = ExtractionResult::default();
    let desc = &cm.descriptor;

    // Container-relative view of the inventory.
    let prefix = format!("{}/", cm.container_root);
    let inventory: Vec<String> = {
        let mut v: Vec<String> = store
            .custody_log(source_id)
            .iter()
            .filter(|r| r.action == crate::evidence::CustodyAction::Inventoried)
            .filter(|r| r.file_path.starts_with(&prefix))
            .map(|r| r.file_path.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    };

    for spec in desc.artifact_specs.iter().filter(|s| !s.yields.is_empty()) {
        let matched: Vec<&String> = inventory
            .iter()
            .filter(|p| glob_match(&spec.relative_path_pattern, &p[prefix.len()..]))
            .collect();
        for path in matched {
            result.processed.push(path.clone());
            let rel_path = &path[prefix.len()..];
            let bytes = match store.read_parsed(source_id, path) {
                Ok(b) => b,
                Err(e) => {
                    result.skipped.push(SkippedArtifact {
                        path: path.clone(),
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            let sha256 = store.inventory_digest(source_id, path).unwrap_or_default();
            let ctx = ArtifactCtx {
                app_id: desc.app_id,
                platform: desc.platform,
                spec,
                path,
                rel_path,
                bytes: &bytes,
                source_id,
                sha256: &sha256,
            };

            if spec.expect_encrypted {
                handle_expected_encrypted(&ctx, &mut result);
                continue;
            }

            match dispatch(&ctx) {
                Ok(records) => result.records.extend(records),
                Err(reason) => result.skipped.push(SkippedArtifact {
                    path: path.clone(),
                    reason,
                }),
            }
        }
    }
    result.processed.sort();
    result.processed.dedup();
    Ok(result)
}

/// Known-encrypted stores: flag high-entropy content, fully decode anything
/// that turns out to be plaintext (structure only, no semantic mapping).
fn handle_expected_encrypted(ctx: &ArtifactCtx, result: &mut ExtractionResult) {
    if detect_encrypted_db(ctx.bytes) {
        result.encrypted_artifacts.push(ctx.path.to_string());
        let mut rec = ctx.record(EventKind::EncryptedArtifact, "whole file");
        rec.encrypted = true;
        result.records.push(rec);
        return;
    }
    if ctx.bytes.is_empty() {
        result.skipped.push(SkippedArtifact {
            path: ctx.path.to_string(),
            reason: "empty file where encrypted database was expected".into(),
        });
        return;
    }
    match read_sqlite(ctx.bytes) {
        Ok(set) => {
            // Plaintext after all; record the decoded structure.
            for (name, table) in &set.tables {
                let mut rec = ctx.record(EventKind::SchemaPresent, &format!("table {name}"));
                rec.fields
                    .insert("table".into(), TreeValue::Text(name.clone()));
                rec.fields
                    .insert("row_count".into(), TreeValue::Int(table.rows.len() as i64));
                rec.fields
                    .insert("unexpected_plaintext".into(), TreeValue::Bool(true));
                result.records.push(rec);
            }
        }
        Err(e) => result.skipped.push(SkippedArtifact {
            path: ctx.path.to_string(),
            reason: format!(
                "expected encrypted database, content is neither ciphertext nor SQLite: {e}"
            ),
        }),
    }
}

fn dispatch(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match ctx.app_id {
        AppId::Myaudi => myaudi::extract(ctx),
        AppId::MyBmw => my_bmw::extract(ctx),
        AppId::Fordpass => fordpass::extract(ctx),
        AppId::MercedesMe => mercedes::extract(ctx),
        AppId::Myopel => myopel::extract(ctx),
        AppId::Onstar => onstar::extract(ctx),
        AppId::Drivemii => drivemii::extract(ctx),
        AppId::SeatConnect => seat::extract(ctx),
        AppId::Tesla => tesla::extract(ctx),
        AppId::WeconnectGo => weconnect::extract(ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn artifact_catalog_rows() {
        // Neither iOS build of my BMW nor OnStar stores relevant data.
        assert!(list_artifact_specs(AppId::MyBmw, Platform::Ios).is_empty());
        assert!(list_artifact_specs(AppId::Onstar, Platform::Ios).is_empty());

        let vw = list_artifact_specs(AppId::WeconnectGo, Platform::Android);
        assert!(vw
            .iter()
            .any(|s| s.relative_path_pattern.contains("avacar.db")));

        // Every other pair yields at least one decodable artifact.
        for app in AppId::ALL {
            for platform in [Platform::Android, Platform::Ios] {
                let specs = list_artifact_specs(app, platform);
                let exempt = matches!(
                    (app, platform),
                    (AppId::MyBmw, Platform::Ios) | (AppId::Onstar, Platform::Ios)
                );
                assert_eq!(specs.is_empty(), exempt, "{app:?}/{platform:?}");
            }
        }
    }
}
