//! GDPR Subject Access Request imports and phone/SAR correlation.
//!
//! Real SAR responses arrive as heterogeneous documents; this toolkit defines
//! a normalized interchange container — `manifest.json` plus one CSV
//! (RFC 4180, UTF-8, header row) or JSON file per category — and decodes
//! that. Telemetry tables (wide, high-frequency vehicle signals) keep their
//! signal names verbatim.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::event::{
    compute_event_id, CanonicalEvent, EventKind, GeoPoint, IdentityRecord, Provenance,
    TimeConfidence,
};
use crate::formats::TreeValue;
use crate::timeline::Timeline;
use crate::util;
use crate::EXTRACTOR_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manufacturer {
    Audi,
    Bmw,
    Ford,
    Mercedes,
    Opel,
    Onstar,
    Seat,
    Tesla,
    Volkswagen,
}

impl Manufacturer {
    pub const ALL: [Manufacturer; 9] = [
        Manufacturer::Audi,
        Manufacturer::Bmw,
        Manufacturer::Ford,
        Manufacturer::Mercedes,
        Manufacturer::Opel,
        Manufacturer::Onstar,
        Manufacturer::Seat,
        Manufacturer::Tesla,
        Manufacturer::Volkswagen,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Manufacturer::Audi => "audi",
            Manufacturer::Bmw => "bmw",
            Manufacturer::Ford => "ford",
            Manufacturer::Mercedes => "mercedes",
            Manufacturer::Opel => "opel",
            Manufacturer::Onstar => "onstar",
            Manufacturer::Seat => "seat",
            Manufacturer::Tesla => "tesla",
            Manufacturer::Volkswagen => "volkswagen",
        }
    }

    pub fn parse(s: &str) -> Option<Manufacturer> {
        Manufacturer::ALL.iter().copied().find(|m| m.as_str() == s)
    }
}

/// The data categories manufacturers answer SARs with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SarCategory {
    CustomerData,
    VehicleData,
    InfotainmentUsage,
    Correspondence,
    OrderHistory,
    PositionData,
    AdditionalData,
}

/// How much of a category a response carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presence {
    Data,
    Partial,
    Metadata,
    None,
    Extensive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarVehicle {
    pub vin: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ownership_from: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ownership_to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryRow {
    /// UTC milliseconds.
    pub t: i64,
    /// One slot per signal column; text cells keep their string.
    pub values: Vec<Option<TreeValue>>,
}

/// A wide, high-frequency signal table keyed by timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySeries {
    pub columns: Vec<String>,
    pub rows: Vec<TelemetryRow>,
    pub nominal_rate_hz: f64,
    /// Input rows were out of order and have been re-sorted.
    pub resorted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarDataset {
    pub manufacturer: Manufacturer,
    pub customer: IdentityRecord,
    pub vehicles: Vec<SarVehicle>,
    pub categories: BTreeMap<SarCategory, Presence>,
    /// Decoded record count per category; presence claims are checked
    /// against these.
    pub record_counts: BTreeMap<SarCategory, u64>,
    pub event_logs: Vec<CanonicalEvent>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub telemetry: Option<TelemetrySeries>,
}

#[derive(Debug, thiserror::Error)]
pub enum SarError {
    #[error("unknown manufacturer {0:?}")]
    UnknownManufacturer(String),
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("telemetry has no usable timestamp column")]
    NoTimestampColumn,
    #[error("category file {file}: {detail}")]
    BadCategoryFile { file: String, detail: String },
}

// ---------------------------------------------------------------------------
// Manifest

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub manufacturer: String,
    pub categories: Vec<ManifestCategory>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestCategory {
    pub category: SarCategory,
    pub presence: Presence,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub file: Option<String>,
    #[serde(default)]
    pub telemetry: bool,
}

/// Import a SAR interchange container (a directory holding `manifest.json`).
pub fn import_sar(container: &Path, manufacturer: Manufacturer) -> Result<SarDataset, SarError> {
    let manifest_path = container.join("manifest.json");
    let manifest_bytes = std::fs::read(&manifest_path)
        .map_err(|e| SarError::MalformedManifest(format!("{}: {e}", manifest_path.display())))?;
    let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| SarError::MalformedManifest(e.to_string()))?;

    let declared = Manufacturer::parse(&manifest.manufacturer)
        .ok_or_else(|| SarError::UnknownManufacturer(manifest.manufacturer.clone()))?;
    if declared != manufacturer {
        return Err(SarError::MalformedManifest(format!(
            "manifest says {}, caller expected {}",
            declared.as_str(),
            manufacturer.as_str()
        )));
    }
    if manifest.categories.is_empty() {
        return Err(SarError::MalformedManifest("empty category list".into()));
    }

    let mut dataset = SarDataset {
        manufacturer,
        customer: IdentityRecord::default(),
        vehicles: Vec::new(),
        categories: BTreeMap::new(),
        record_counts: BTreeMap::new(),
        event_logs: Vec::new(),
        telemetry: None,
    };

    for entry in &manifest.categories {
        dataset.categories.insert(entry.category, entry.presence);
        if entry.presence == Presence::None {
            continue;
        }
        let Some(file) = &entry.file else {
            return Err(SarError::MalformedManifest(format!(
                "category {:?} marked present without a file",
                entry.category
            )));
        };
        let path = container.join(file);
        let bytes = std::fs::read(&path).map_err(|e| SarError::BadCategoryFile {
            file: file.clone(),
            detail: e.to_string(),
        })?;
        let digest = util::hex_digest(&util::sha256(&bytes));

        let count = if entry.telemetry {
            let series = import_telemetry(&bytes, None)?;
            let n = series.rows.len() as u64;
            dataset.telemetry = Some(series);
            n
        } else {
            decode_category(&mut dataset, entry.category, file, &bytes, &digest)?
        };
        dataset.record_counts.insert(entry.category, count);

        if count == 0 {
            return Err(SarError::BadCategoryFile {
                file: file.clone(),
                detail: format!(
                    "category {:?} marked present but decoded no records",
                    entry.category
                ),
            });
        }
    }

    Ok(dataset)
}

fn decode_category(
    dataset: &mut SarDataset,
    category: SarCategory,
    file: &str,
    bytes: &[u8],
    digest: &str,
) -> Result<u64, SarError> {
    let bad = |detail: String| SarError::BadCategoryFile {
        file: file.to_string(),
        detail,
    };
    match category {
        SarCategory::CustomerData => {
            let rec: IdentityRecord =
                serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
            let count = rec.attributes().len() as u64;
            dataset.customer = rec;
            Ok(count)
        }
        SarCategory::VehicleData => {
            let vehicles: Vec<SarVehicle> =
                serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
            let n = vehicles.len() as u64;
            dataset.vehicles.extend(vehicles);
            Ok(n)
        }
        _ => {
            // Everything else is tabular; rows with timestamps become events.
            if file.ends_with(".json") {
                let rows: Vec<TreeValue> =
                    serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
                Ok(rows.len() as u64)
            } else {
                let events = event_log_csv(bytes, file, digest).map_err(bad)?;
                let n = events.len() as u64;
                dataset.event_logs.extend(events);
                Ok(n)
            }
        }
    }
}

/// Event-log CSV: `kind,start[,end,lat,lon,vin,...]`; extra columns become
/// event attributes.
fn event_log_csv(bytes: &[u8], file: &str, digest: &str) -> Result<Vec<CanonicalEvent>, String> {
    let mut reader = csv::Reader::from_reader(bytes);
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let get = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .and_then(|idx| row.get(idx))
                .filter(|v| !v.is_empty())
        };
        let kind = match get("kind") {
            Some("trip") => EventKind::Trip,
            Some("refuel") => EventKind::Refuel,
            Some("parking") => EventKind::Parking,
            Some("lock_state") => EventKind::LockState,
            Some("location_fix") => EventKind::LocationFix,
            Some("status_snapshot") | None => EventKind::StatusSnapshot,
            Some(other) => return Err(format!("row {}: unknown kind {other:?}", i + 1)),
        };
        let parse_ts = |v: &str| -> Option<i64> {
            v.parse::<i64>().ok().or_else(|| {
                chrono::DateTime::parse_from_rfc3339(v)
                    .ok()
                    .map(|dt| dt.timestamp_millis())
            })
        };
        let start = get("start").and_then(parse_ts);
        let end = get("end").and_then(parse_ts);
        let geo = match (
            get("lat").and_then(|v| v.parse::<f64>().ok()),
            get("lon").and_then(|v| v.parse::<f64>().ok()),
        ) {
            (Some(lat), Some(lon)) => GeoPoint::new(lat, lon),
            _ => None,
        };
        let vin = get("vin").map(str::to_string);

        let mut attributes: BTreeMap<String, TreeValue> = BTreeMap::new();
        for (idx, header) in headers.iter().enumerate() {
            if ["kind", "start", "end", "lat", "lon", "vin"]
                .contains(&header.to_ascii_lowercase().as_str())
            {
                continue;
            }
            if let Some(v) = row.get(idx).filter(|v| !v.is_empty()) {
                let value = v
                    .parse::<i64>()
                    .map(TreeValue::Int)
                    .or_else(|_| v.parse::<f64>().map(TreeValue::Real))
                    .unwrap_or_else(|_| TreeValue::Text(v.to_string()));
                attributes.insert(header.clone(), value);
            }
        }

        let locator = format!("row {}", i + 2); // header is line 1
        let provenance = Provenance {
            source_id: "sar".to_string(),
            artifact_path: file.to_string(),
            sha256: digest.to_string(),
            locator: locator.clone(),
            extractor_version: EXTRACTOR_VERSION.to_string(),
        };
        out.push(CanonicalEvent {
            event_id: compute_event_id(kind, start, vin.as_deref(), &attributes, file, &locator),
            kind,
            start,
            end,
            geo_start: geo,
            geo_end: None,
            vin,
            time_confidence: if start.is_some() {
                TimeConfidence::Exact
            } else {
                TimeConfidence::Undated
            },
            attributes,
            provenance: vec![provenance],
        });
    }
    Ok(out)
}

/// Parse a telemetry CSV. The first column must be a timestamp (RFC 3339 or
/// epoch milliseconds); the remaining columns are signals, names verbatim.
/// The nominal rate is the median inter-row spacing.
pub fn import_telemetry(
    csv_bytes: &[u8],
    signal_dictionary: Option<&[String]>,
) -> Result<TelemetrySeries, SarError> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let headers = reader
        .headers()
        .map_err(|e| SarError::MalformedManifest(e.to_string()))?;
    if headers.is_empty() {
        return Err(SarError::NoTimestampColumn);
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if let Some(dict) = signal_dictionary {
        for col in &columns {
            if !dict.iter().any(|d| d == col) {
                return Err(SarError::BadCategoryFile {
                    file: "telemetry".into(),
                    detail: format!("signal {col:?} missing from dictionary"),
                });
            }
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| SarError::BadCategoryFile {
            file: "telemetry".into(),
            detail: e.to_string(),
        })?;
        let Some(ts_raw) = record.get(0) else {
            continue;
        };
        let t = ts_raw
            .parse::<i64>()
            .ok()
            .or_else(|| {
                chrono::DateTime::parse_from_rfc3339(ts_raw)
                    .ok()
                    .map(|dt| dt.timestamp_millis())
            })
            .ok_or(SarError::NoTimestampColumn)?;
        let values: Vec<Option<TreeValue>> = (1..=columns.len())
            .map(|i| {
                record.get(i).filter(|v| !v.is_empty()).map(|v| {
                    v.parse::<f64>()
                        .map(TreeValue::Real)
                        .unwrap_or_else(|_| TreeValue::Text(v.into()))
                })
            })
            .collect();
        rows.push(TelemetryRow { t, values });
    }

    let sorted = rows.windows(2).all(|w| w[0].t <= w[1].t);
    if !sorted {
        rows.sort_by_key(|r| r.t);
    }

    let mut deltas: Vec<i64> = rows
        .windows(2)
        .map(|w| w[1].t - w[0].t)
        .filter(|&d| d > 0)
        .collect();
    deltas.sort_unstable();
    let nominal_rate_hz = if deltas.is_empty() {
        0.0
    } else {
        1000.0 / deltas[deltas.len() / 2] as f64
    };

    Ok(TelemetrySeries {
        columns,
        rows,
        nominal_rate_hz,
        resorted: !sorted,
    })
}

// ---------------------------------------------------------------------------
// Correlation

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub phone_event_id: String,
    pub phone_kind: EventKind,
    pub sar_event_id: String,
    pub delta_ms: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TelemetryTripMatch {
    pub trip_event_id: String,
    /// Span over which speed-like signals were nonzero.
    pub active_from: i64,
    pub active_to: i64,
    pub start_delta_ms: i64,
    pub end_delta_ms: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub matched: Vec<MatchedPair>,
    pub telemetry_trips: Vec<TelemetryTripMatch>,
    /// Dated phone events with no SAR counterpart.
    pub phone_only: Vec<String>,
    /// SAR events (including those predating phone coverage) with no phone
    /// counterpart.
    pub sar_only: Vec<String>,
    pub phone_considered: u64,
    pub sar_considered: u64,
}

/// Pair phone events with SAR evidence by VIN, kind and time proximity;
/// match trips against telemetry activity. Unmatched items on both sides are
/// listed as discrepancies.
pub fn correlate(t: &Timeline, sar: &SarDataset, window_ms: i64) -> CorrelationReport {
    assert!(window_ms > 0, "window must be positive");
    let mut report = CorrelationReport::default();

    let phone: Vec<&CanonicalEvent> = t.events.iter().filter(|e| e.start.is_some()).collect();
    let sar_events: Vec<&CanonicalEvent> = sar
        .event_logs
        .iter()
        .filter(|e| e.start.is_some())
        .collect();
    report.phone_considered = phone.len() as u64;
    report.sar_considered = sar_events.len() as u64;

    let mut sar_used = vec![false; sar_events.len()];
    let mut phone_matched = vec![false; phone.len()];

    for (pi, pe) in phone.iter().enumerate() {
        let mut best: Option<(usize, i64)> = None;
        for (si, se) in sar_events.iter().enumerate() {
            if sar_used[si] || se.kind != pe.kind {
                continue;
            }
            if se.vin.is_none() || se.vin != pe.vin {
                continue;
            }
            let delta = (se.start.unwrap() - pe.start.unwrap()).abs();
            if delta <= window_ms && best.is_none_or(|(_, d)| delta < d) {
                best = Some((si, delta));
            }
        }
        if let Some((si, delta)) = best {
            sar_used[si] = true;
            phone_matched[pi] = true;
            report.matched.push(MatchedPair {
                phone_event_id: pe.event_id.clone(),
                phone_kind: pe.kind,
                sar_event_id: sar_events[si].event_id.clone(),
                delta_ms: delta,
            });
        }
    }

    // Telemetry: a trip matches when speed-like signals are nonzero within
    // its span. Coverage is sparse by design; absence of telemetry never
    // implies absence of driving.
    if let Some(telemetry) = &sar.telemetry {
        let sar_vins: Vec<&str> = sar.vehicles.iter().map(|v| v.vin.as_str()).collect();
        let speed_cols: Vec<usize> = telemetry
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.to_ascii_lowercase().contains("speed"))
            .map(|(i, _)| i)
            .collect();
        if !speed_cols.is_empty() {
            for (pi, pe) in phone.iter().enumerate() {
                if pe.kind != EventKind::Trip {
                    continue;
                }
                if let Some(vin) = &pe.vin {
                    if !sar_vins.is_empty() && !sar_vins.contains(&vin.as_str()) {
                        continue;
                    }
                }
                let (start, end) = (pe.start.unwrap(), pe.end.unwrap_or(pe.start.unwrap()));
                let active: Vec<i64> = telemetry
                    .rows
                    .iter()
                    .filter(|r| r.t >= start - window_ms && r.t <= end + window_ms)
                    .filter(|r| {
                        speed_cols.iter().any(|&c| {
                            r.values
                                .get(c)
                                .and_then(|v| v.as_ref())
                                .and_then(TreeValue::as_f64)
                                .is_some_and(|s| s > 0.0)
                        })
                    })
                    .map(|r| r.t)
                    .collect();
                if let (Some(&from), Some(&to)) = (active.first(), active.last()) {
                    let start_delta = (from - start).abs();
                    let end_delta = (to - end).abs();
                    if start_delta <= window_ms && end_delta <= window_ms {
                        phone_matched[pi] = true;
                        report.telemetry_trips.push(TelemetryTripMatch {
                            trip_event_id: pe.event_id.clone(),
                            active_from: from,
                            active_to: to,
                            start_delta_ms: start_delta,
                            end_delta_ms: end_delta,
                        });
                    }
                }
            }
        }
    }

    for (pi, pe) in phone.iter().enumerate() {
        if !phone_matched[pi] {
            report.phone_only.push(pe.event_id.clone());
        }
    }
    for (si, se) in sar_events.iter().enumerate() {
        if !sar_used[si] {
            report.sar_only.push(se.event_id.clone());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn telemetry_rate_from_uniform_spacing() {
        let mut csv = String::from("Timestamp,Speed (MPH)\n");
        for i in 0..10 {
            csv.push_str(&format!("{},{}\n", 1_604_412_000_000i64 + i * 100, 30));
        }
        let series = import_telemetry(csv.as_bytes(), None).unwrap();
        assert_eq!(series.columns, vec!["Speed (MPH)"]);
        assert!((series.nominal_rate_hz - 10.0).abs() < 1e-9);
        assert!(!series.resorted);
    }

    #[test]
    fn telemetry_resorts_out_of_order_rows() {
        let csv = "t,Speed\n1000,1\n3000,2\n2000,3\n";
        let series = import_telemetry(csv.as_bytes(), None).unwrap();
        assert!(series.resorted);
        assert_eq!(
            series.rows.iter().map(|r| r.t).collect::<Vec<_>>(),
            vec![1000, 2000, 3000]
        );
    }

    #[test]
    fn telemetry_rfc3339_timestamps() {
        let csv = "Timestamp,X\n2020-11-03T14:00:00Z,1\n2020-11-03T14:00:01Z,2\n";
        let series = import_telemetry(csv.as_bytes(), None).unwrap();
        assert_eq!(series.rows[0].t, 1_604_412_000_000);
        assert!((series.nominal_rate_hz - 1.0).abs() < 1e-9);
    }

    #[test]
    fn telemetry_rejects_bad_timestamp() {
        assert!(matches!(
            import_telemetry(b"a,b\nnot-a-time,1\n", None),
            Err(SarError::NoTimestampColumn)
        ));
    }
}
