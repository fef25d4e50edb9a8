//! Comparison of expected-recovery skeletons against pipeline output.
//!
//! Dated expectations must match on (kind, start, vin) exactly; undated ones
//! on (kind, vin). Encrypted expectations match flagged artifacts by path
//! suffix. Every recovered event must be claimed by exactly one expectation —
//! extras are mismatches too.

use std::collections::BTreeMap;

use crate::event::{CanonicalEvent, EventKind};

use super::rules::ExpectedEvent;

/// Empty when the recovery matches the oracle exactly.
pub fn compare(expected: &[ExpectedEvent], recovered: &[CanonicalEvent]) -> Vec<String> {
    let mut mismatches = Vec::new();
    let mut claimed = vec![false; recovered.len()];

    // Encrypted artifacts first: matched by path suffix.
    for exp in expected.iter().filter(|e| e.encrypted) {
        let found = recovered.iter().enumerate().find(|(i, ev)| {
            !claimed[*i]
                && ev.kind == EventKind::EncryptedArtifact
                && ev
                    .provenance
                    .iter()
                    .any(|p| p.artifact_path.ends_with(&exp.note))
        });
        match found {
            Some((i, _)) => claimed[i] = true,
            None => mismatches.push(format!(
                "missing encrypted artifact {} ({})",
                exp.note,
                categories_label(exp)
            )),
        }
    }

    // Remaining expectations by (kind, start, vin) multiset.
    for exp in expected.iter().filter(|e| !e.encrypted) {
        let found = recovered.iter().enumerate().find(|(i, ev)| {
            !claimed[*i] && ev.kind == exp.kind && ev.start == exp.start && ev.vin == exp.vin
        });
        match found {
            Some((i, _)) => claimed[i] = true,
            None => mismatches.push(format!(
                "missing {:?} at {:?} vin {:?} [{}] ({})",
                exp.kind,
                exp.start,
                exp.vin,
                exp.note,
                categories_label(exp)
            )),
        }
    }

    for (i, ev) in recovered.iter().enumerate() {
        if !claimed[i] {
            let path = ev
                .provenance
                .first()
                .map(|p| p.artifact_path.as_str())
                .unwrap_or("");
            mismatches.push(format!(
                "unexpected {:?} at {:?} vin {:?} from {path}",
                ev.kind, ev.start, ev.vin
            ));
        }
    }

    mismatches
}

fn categories_label(e: &ExpectedEvent) -> String {
    if e.categories.is_empty() {
        "uncategorized".to_string()
    } else {
        e.categories
            .iter()
            .map(|c| format!("{c:?}"))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Expected-event counts per category, for reporting.
pub fn category_counts(expected: &[ExpectedEvent]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for e in expected {
        if e.categories.is_empty() {
            *out.entry("uncategorized".to_string()).or_insert(0) += 1;
        }
        for c in &e.categories {
            *out.entry(format!("{c:?}")).or_insert(0) += 1;
        }
    }
    out
}
