//! Canonical driver-activity events and the raw-record normalization pass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::extract::RawRecord;
use crate::formats::{TreeValue, Value, APPLE_EPOCH_OFFSET_S};
use crate::util;

/// The driver-activity taxonomy every artifact is normalized into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Trip,
    Refuel,
    Parking,
    LockState,
    LocationFix,
    StatusSnapshot,
    Identity,
    VehicleInfo,
    NavDestination,
    Recuperation,
    EncryptedArtifact,
    SchemaPresent,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Trip => "trip",
            EventKind::Refuel => "refuel",
            EventKind::Parking => "parking",
            EventKind::LockState => "lock_state",
            EventKind::LocationFix => "location_fix",
            EventKind::StatusSnapshot => "status_snapshot",
            EventKind::Identity => "identity",
            EventKind::VehicleInfo => "vehicle_info",
            EventKind::NavDestination => "nav_destination",
            EventKind::Recuperation => "recuperation",
            EventKind::EncryptedArtifact => "encrypted_artifact",
            EventKind::SchemaPresent => "schema_present",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeConfidence {
    Exact,
    Inferred,
    Undated,
}

/// A WGS84 position. Out-of-range coordinates never construct; (0, 0) is
/// accepted but flagged suspect by normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy_m: Option<f64>,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Option<GeoPoint> {
        if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) {
            Some(GeoPoint {
                lat,
                lon,
                accuracy_m: None,
            })
        } else {
            None
        }
    }

    pub fn is_null_island(&self) -> bool {
        self.lat == 0.0 && self.lon == 0.0
    }
}

/// Where an event came from, pinned to the custody log by digest.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Provenance {
    pub source_id: String,
    pub artifact_path: String,
    pub sha256: String,
    pub locator: String,
    pub extractor_version: String,
}

/// One normalized driver-activity record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalEvent {
    pub event_id: String,
    pub kind: EventKind,
    /// UTC milliseconds; absent only for undated events.
    pub start: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub end: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub geo_start: Option<GeoPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub geo_end: Option<GeoPoint>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vin: Option<String>,
    pub time_confidence: TimeConfidence,
    pub attributes: BTreeMap<String, TreeValue>,
    pub provenance: Vec<Provenance>,
}

impl CanonicalEvent {
    pub fn attr_str(&self, key: &str) -> Option<&str> {
        self.attributes.get(key).and_then(TreeValue::as_str)
    }

    pub fn attr_f64(&self, key: &str) -> Option<f64> {
        self.attributes.get(key).and_then(TreeValue::as_f64)
    }

    /// Global ordering: dated events by (start, kind, id); undated events
    /// last, by provenance path then locator.
    pub fn sort_key(&self) -> (i64, u8, String, String, String) {
        let first = self.provenance.first();
        match self.start {
            Some(t) => (
                t,
                0,
                self.kind.as_str().into(),
                self.event_id.clone(),
                String::new(),
            ),
            None => (
                i64::MAX,
                1,
                first.map(|p| p.artifact_path.clone()).unwrap_or_default(),
                first.map(|p| p.locator.clone()).unwrap_or_default(),
                self.event_id.clone(),
            ),
        }
    }
}

/// A person as evidenced by one artifact. At least one field is present.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub email: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub date_of_birth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub address: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub user_id: Option<String>,
}

impl IdentityRecord {
    pub fn is_empty(&self) -> bool {
        self.name.is_none()
            && self.email.is_none()
            && self.phone.is_none()
            && self.date_of_birth.is_none()
            && self.address.is_none()
            && self.user_id.is_none()
    }

    pub fn attributes(&self) -> BTreeMap<String, TreeValue> {
        let mut out = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                out.insert(k.to_string(), TreeValue::Text(v.clone()));
            }
        };
        put("name", &self.name);
        put("email", &self.email);
        put("phone", &self.phone);
        put("date_of_birth", &self.date_of_birth);
        put("address", &self.address);
        put("user_id", &self.user_id);
        out
    }
}

// ---------------------------------------------------------------------------
// Timestamps

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Epoch {
    UnixS,
    UnixMs,
    AppleS,
    Iso8601,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TimeError {
    #[error("unparseable timestamp {0:?}")]
    Unparseable(String),
    #[error("timestamp {0} resolves outside the years 2000-2100")]
    ImplausibleYear(i64),
}

/// 2000-01-01T00:00:00Z .. 2100-01-01T00:00:00Z in Unix milliseconds.
pub const PLAUSIBLE_MS: std::ops::Range<i64> = 946_684_800_000..4_102_444_800_000;

/// Convert a raw stored value to UTC milliseconds under the stated epoch.
/// Pure conversion; plausibility is the caller's policy (see
/// [`resolve_timestamp`]).
pub fn normalize_timestamp(raw: &Value, epoch: Epoch) -> Result<i64, TimeError> {
    let unparseable = || TimeError::Unparseable(format!("{raw:?}"));
    match epoch {
        Epoch::Iso8601 => {
            let text = raw.as_str().ok_or_else(unparseable)?;
            chrono::DateTime::parse_from_rfc3339(text.trim())
                .map(|dt| dt.timestamp_millis())
                .map_err(|_| unparseable())
        }
        Epoch::UnixS | Epoch::UnixMs | Epoch::AppleS => {
            let n = match raw {
                Value::Integer(i) => *i as f64,
                Value::Real(r) => *r,
                Value::Text(s) => s.trim().parse::<f64>().map_err(|_| unparseable())?,
                _ => return Err(unparseable()),
            };
            if !n.is_finite() || n.abs() > 9.0e15 {
                return Err(unparseable());
            }
            Ok(match epoch {
                Epoch::UnixS => (n * 1000.0) as i64,
                Epoch::UnixMs => n as i64,
                Epoch::AppleS => ((n + APPLE_EPOCH_OFFSET_S as f64) * 1000.0) as i64,
                Epoch::Iso8601 => unreachable!(),
            })
        }
    }
}

pub fn plausible(ms: i64) -> bool {
    PLAUSIBLE_MS.contains(&ms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedTime {
    pub ms: i64,
    pub epoch_used: Epoch,
    /// True when the preferred epoch produced an implausible year and a
    /// different epoch was inferred instead.
    pub reinferred: bool,
}

/// Convert under the platform's preferred epoch, re-inferring the epoch when
/// the result lands outside the years 2000-2100.
///
/// Candidates are limited to confusions that actually occur: second vs
/// millisecond scale everywhere, plus Unix values copied into Core-Data
/// (Apple-epoch) slots. Unix-epoch stores never re-infer toward the Apple
/// epoch.
pub fn resolve_timestamp(raw: &Value, preferred: Epoch) -> Result<ResolvedTime, TimeError> {
    let first = normalize_timestamp(raw, preferred)?;
    if plausible(first) {
        return Ok(ResolvedTime {
            ms: first,
            epoch_used: preferred,
            reinferred: false,
        });
    }
    let candidates: &[Epoch] = match preferred {
        Epoch::AppleS => &[Epoch::UnixMs, Epoch::UnixS],
        Epoch::UnixMs => &[Epoch::UnixS],
        Epoch::UnixS => &[Epoch::UnixMs],
        Epoch::Iso8601 => &[],
    };
    for &epoch in candidates {
        if let Ok(ms) = normalize_timestamp(raw, epoch) {
            if plausible(ms) {
                return Ok(ResolvedTime {
                    ms,
                    epoch_used: epoch,
                    reinferred: true,
                });
            }
        }
    }
    Err(TimeError::ImplausibleYear(first))
}

// ---------------------------------------------------------------------------
// VIN validation

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VinCheck {
    pub valid: bool,
    pub reason: Option<String>,
}

/// ISO 3779 length and alphabet check; the position-9 check digit is verified
/// only on request and only when that position holds a digit or 'X' (the
/// check digit is not used on all markets).
pub fn validate_vin(text: &str, verify_check_digit: bool) -> VinCheck {
    let invalid = |reason: &str| VinCheck {
        valid: false,
        reason: Some(reason.to_string()),
    };
    let vin: Vec<char> = text.chars().collect();
    if vin.len() != 17 {
        return invalid("length is not 17");
    }
    if !vin.iter().all(|c| c.is_ascii_alphanumeric()) {
        return invalid("non-alphanumeric character");
    }
    if vin
        .iter()
        .any(|c| matches!(c.to_ascii_uppercase(), 'I' | 'O' | 'Q'))
    {
        return invalid("contains excluded letter I, O or Q");
    }
    if verify_check_digit {
        let ninth = vin[8].to_ascii_uppercase();
        if ninth.is_ascii_digit() || ninth == 'X' {
            let expect = vin_check_digit(text);
            if expect != Some(ninth) {
                return invalid("check digit mismatch");
            }
        }
    }
    VinCheck {
        valid: true,
        reason: None,
    }
}

/// Compute the ISO 3779 check digit for a 17-character VIN.
pub fn vin_check_digit(vin: &str) -> Option<char> {
    const WEIGHTS: [u32; 17] = [8, 7, 6, 5, 4, 3, 2, 10, 0, 9, 8, 7, 6, 5, 4, 3, 2];
    fn transliterate(c: char) -> Option<u32> {
        Some(match c.to_ascii_uppercase() {
            d @ '0'..='9' => d as u32 - '0' as u32,
            'A' | 'J' => 1,
            'B' | 'K' | 'S' => 2,
            'C' | 'L' | 'T' => 3,
            'D' | 'M' | 'U' => 4,
            'E' | 'N' | 'V' => 5,
            'F' | 'W' => 6,
            'G' | 'P' | 'X' => 7,
            'H' | 'Y' => 8,
            'R' | 'Z' => 9,
            _ => return None,
        })
    }
    let chars: Vec<char> = vin.chars().collect();
    if chars.len() != 17 {
        return None;
    }
    let mut sum = 0u32;
    for (i, &c) in chars.iter().enumerate() {
        sum += transliterate(c)? * WEIGHTS[i];
    }
    Some(match sum % 11 {
        10 => 'X',
        d => char::from_digit(d, 10).unwrap(),
    })
}

// ---------------------------------------------------------------------------
// Normalization

/// A record normalize() could not turn into an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRecord {
    pub artifact_path: String,
    pub locator: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct NormalizeOutcome {
    pub events: Vec<CanonicalEvent>,
    pub skips: Vec<SkippedRecord>,
}

/// Reserved field names understood by `normalize`; everything else becomes an
/// event attribute verbatim.
const F_START: &str = "start";
const F_END: &str = "end";
const F_VIN: &str = "vin";
const F_LAT: &str = "lat";
const F_LON: &str = "lon";
const F_START_LAT: &str = "start_lat";
const F_START_LON: &str = "start_lon";
const F_END_LAT: &str = "end_lat";
const F_END_LON: &str = "end_lon";
const F_ACCURACY: &str = "accuracy_m";
const F_CONFIDENCE: &str = "time_confidence";

/// Attribute keys accepted under non-canonical units, converted on sight.
fn canonicalize_unit(key: &str, value: &TreeValue) -> Option<(String, TreeValue)> {
    let conv = |factor: f64| value.as_f64().map(|v| TreeValue::Real(v * factor));
    match key {
        "fuel_ml" => Some(("fuel_liters".into(), conv(1e-3)?)),
        "distance_m" => Some(("distance_km".into(), conv(1e-3)?)),
        "mileage_m" => Some(("mileage_km".into(), conv(1e-3)?)),
        "mileage_miles" => Some(("mileage_km".into(), conv(1.609_344)?)),
        "speed_ms" => Some(("speed_kmh".into(), conv(3.6)?)),
        "speed_mph" => Some(("speed_kmh".into(), conv(1.609_344)?)),
        "interior_temp_f" => {
            let v = value.as_f64()?;
            Some((
                "interior_temp_c".into(),
                TreeValue::Real((v - 32.0) * 5.0 / 9.0),
            ))
        }
        _ => None,
    }
}

/// Normalize raw records into canonical events.
///
/// Total: every record yields at least one event or one skip entry. Geo
/// violations skip rather than clamp; invalid VINs are demoted to a raw
/// attribute. Output is sorted by (start, kind, event_id).
pub fn normalize(records: &[RawRecord]) -> NormalizeOutcome {
    let mut out = NormalizeOutcome::default();

    // First pass: count trackpoints per trip reference so trips can carry
    // trackpoint_count without nesting.
    let mut trackpoints: BTreeMap<String, i64> = BTreeMap::new();
    for rec in records {
        if rec.kind_hint == EventKind::LocationFix {
            if let Some(TreeValue::Text(trip_ref)) = rec.fields.get("trip_ref") {
                *trackpoints.entry(trip_ref.clone()).or_insert(0) += 1;
            }
        }
    }

    for rec in records {
        match normalize_one(rec, &trackpoints) {
            Ok(ev) => out.events.push(ev),
            Err(reason) => out.skips.push(SkippedRecord {
                artifact_path: rec.artifact_path.clone(),
                locator: rec.locator.clone(),
                reason,
            }),
        }
    }

    out.events.sort_by_key(|a| a.sort_key());
    out
}

fn normalize_one(
    rec: &RawRecord,
    trackpoints: &BTreeMap<String, i64>,
) -> Result<CanonicalEvent, String> {
    let get_ts = |key: &str| -> Result<Option<i64>, String> {
        match rec.fields.get(key) {
            None | Some(TreeValue::Null) => Ok(None),
            Some(TreeValue::Timestamp(t)) => Ok(Some(*t)),
            Some(TreeValue::Int(t)) if plausible(*t) => Ok(Some(*t)),
            Some(other) => Err(format!("field {key} is not a timestamp: {other:?}")),
        }
    };
    let get_coord = |lat_key: &str, lon_key: &str| -> Result<Option<GeoPoint>, String> {
        let lat = rec.fields.get(lat_key).and_then(TreeValue::as_f64);
        let lon = rec.fields.get(lon_key).and_then(TreeValue::as_f64);
        match (lat, lon) {
            (Some(lat), Some(lon)) => GeoPoint::new(lat, lon)
                .map(Some)
                .ok_or_else(|| format!("coordinates out of range: {lat}, {lon}")),
            (None, None) => Ok(None),
            _ => Err(format!("incomplete coordinate pair {lat_key}/{lon_key}")),
        }
    };

    if rec.encrypted && rec.kind_hint != EventKind::EncryptedArtifact {
        return Err("encrypted record with non-encrypted kind hint".to_string());
    }

    let start = get_ts(F_START)?;
    let end = get_ts(F_END)?;
    if let (Some(s), Some(e)) = (start, end) {
        if e < s {
            return Err(format!("end {e} precedes start {s}"));
        }
    }
    if start.is_none() && matches!(rec.kind_hint, EventKind::Trip | EventKind::Refuel) {
        return Err(format!(
            "{} record without start time",
            rec.kind_hint.as_str()
        ));
    }

    let mut geo_start = get_coord(F_START_LAT, F_START_LON)?;
    if geo_start.is_none() {
        geo_start = get_coord(F_LAT, F_LON)?;
    }
    let geo_end = get_coord(F_END_LAT, F_END_LON)?;
    if let (Some(g), Some(acc)) = (
        geo_start.as_mut(),
        rec.fields.get(F_ACCURACY).and_then(TreeValue::as_f64),
    ) {
        g.accuracy_m = Some(acc);
    }

    let mut attributes: BTreeMap<String, TreeValue> = BTreeMap::new();
    let mut vin = None;
    for (key, value) in &rec.fields {
        match key.as_str() {
            F_START | F_END | F_LAT | F_LON | F_START_LAT | F_START_LON | F_END_LAT | F_END_LON
            | F_ACCURACY | F_CONFIDENCE => {}
            F_VIN => {
                let raw = value.as_str().unwrap_or_default().to_string();
                if validate_vin(&raw, false).valid {
                    vin = Some(raw.to_ascii_uppercase());
                } else {
                    attributes.insert("vin_raw".into(), TreeValue::Text(raw));
                }
            }
            _ => {
                if let Some((ck, cv)) = canonicalize_unit(key, value) {
                    attributes.insert(ck, cv);
                } else {
                    attributes.insert(key.clone(), value.clone());
                }
            }
        }
    }

    if let Some(TreeValue::Text(trip_ref)) = rec.fields.get("trip_ref") {
        if rec.kind_hint == EventKind::Trip {
            if let Some(count) = trackpoints.get(trip_ref) {
                attributes.insert("trackpoint_count".into(), TreeValue::Int(*count));
            }
        }
    }

    if geo_start.is_some_and(|g| g.is_null_island()) || geo_end.is_some_and(|g| g.is_null_island())
    {
        attributes.insert("geo_suspect".into(), TreeValue::Bool(true));
    }

    let time_confidence = match rec.fields.get(F_CONFIDENCE).and_then(TreeValue::as_str) {
        Some("inferred") => TimeConfidence::Inferred,
        Some("undated") => TimeConfidence::Undated,
        Some("exact") => TimeConfidence::Exact,
        Some(other) => return Err(format!("unknown time confidence {other:?}")),
        None if start.is_some() => TimeConfidence::Exact,
        None => TimeConfidence::Undated,
    };
    if start.is_none() && time_confidence != TimeConfidence::Undated {
        return Err("dated confidence without start time".to_string());
    }

    let provenance = rec.provenance.clone();
    let event_id = compute_event_id(
        rec.kind_hint,
        start,
        vin.as_deref(),
        &attributes,
        &rec.artifact_path,
        &rec.locator,
    );

    Ok(CanonicalEvent {
        event_id,
        kind: rec.kind_hint,
        start,
        end,
        geo_start,
        geo_end,
        vin,
        time_confidence,
        attributes,
        provenance: vec![provenance],
    })
}

/// Content-hash identity: stable across re-runs, independent of wall clock.
pub fn compute_event_id(
    kind: EventKind,
    start: Option<i64>,
    vin: Option<&str>,
    attributes: &BTreeMap<String, TreeValue>,
    artifact_path: &str,
    locator: &str,
) -> String {
    let attrs_json = serde_json::to_string(attributes).unwrap_or_default();
    let material = format!(
        "{}\x1f{}\x1f{}\x1f{}\x1f{}\x1f{}",
        kind.as_str(),
        start.map(|t| t.to_string()).unwrap_or_default(),
        vin.unwrap_or_default(),
        attrs_json,
        artifact_path,
        locator
    );
    util::hex_digest(&util::sha256(material.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_conversions() {
        assert_eq!(
            normalize_timestamp(&Value::Integer(0), Epoch::AppleS).unwrap(),
            978_307_200_000
        );
        assert_eq!(
            normalize_timestamp(&Value::Integer(0), Epoch::UnixS).unwrap(),
            0
        );
        assert_eq!(
            normalize_timestamp(&Value::Text("2020-11-03T14:00:00Z".into()), Epoch::Iso8601)
                .unwrap(),
            1_604_412_000_000
        );
        assert!(matches!(
            normalize_timestamp(&Value::Text("yesterday".into()), Epoch::Iso8601),
            Err(TimeError::Unparseable(_))
        ));
    }

    #[test]
    fn epoch_reinference() {
        // Unix milliseconds misread as seconds would land far in the future;
        // re-inference corrects the epoch and flags it.
        let r = resolve_timestamp(&Value::Integer(1_604_412_000_000), Epoch::UnixS).unwrap();
        assert_eq!(r.ms, 1_604_412_000_000);
        assert_eq!(r.epoch_used, Epoch::UnixMs);
        assert!(r.reinferred);

        let ok = resolve_timestamp(&Value::Integer(1_604_412_000), Epoch::UnixS).unwrap();
        assert!(!ok.reinferred);

        assert!(matches!(
            resolve_timestamp(&Value::Integer(12), Epoch::UnixS),
            Err(TimeError::ImplausibleYear(_))
        ));
    }

    #[test]
    fn vin_alphabet_and_length() {
        assert!(!validate_vin("WVWZZZ5NZJMI00000", false).valid); // contains I
        assert!(!validate_vin("WVWZZZ5NZJM00000", false).valid); // 16 chars
        assert!(validate_vin("WVWZZZ5NZJM000000", false).valid);
    }

    #[test]
    fn vin_check_digit_path() {
        // 11111111111111111 has weighted sum 1*(8+7+6+5+4+3+2+10+0+9+8+7+6+5+4+3+2)=89; 89 % 11 = 1.
        assert_eq!(vin_check_digit("11111111111111111"), Some('1'));
        assert!(validate_vin("11111111111111111", true).valid);
        assert!(!validate_vin("11111111511111111", true).valid);
    }

    fn raw(kind: EventKind, fields: &[(&str, TreeValue)]) -> RawRecord {
        RawRecord {
            app_id: crate::locator::AppId::WeconnectGo,
            platform: crate::locator::Platform::Android,
            artifact_path: "/data/data/en.volkswagen.vwconnect/databases/avacar.db".into(),
            locator: "table trips, row 1".into(),
            kind_hint: kind,
            fields: fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            encrypted: false,
            provenance: Provenance {
                source_id: "s1-x".into(),
                artifact_path: "/data/data/en.volkswagen.vwconnect/databases/avacar.db".into(),
                sha256: "d".repeat(64),
                locator: "table trips, row 1".into(),
                extractor_version: "test".into(),
            },
        }
    }

    #[test]
    fn normalize_is_total_over_records() {
        let records = vec![
            raw(
                EventKind::Refuel,
                &[
                    ("start", TreeValue::Timestamp(1_604_412_000_000)),
                    ("fuel_liters", TreeValue::Real(40.0)),
                    ("price", TreeValue::Real(62.0)),
                ],
            ),
            // Out-of-range coordinates become a skip, never clamped values.
            raw(
                EventKind::LocationFix,
                &[
                    ("start", TreeValue::Timestamp(1_604_412_000_000)),
                    ("lat", TreeValue::Real(123.0)),
                    ("lon", TreeValue::Real(7.6)),
                ],
            ),
            // Refuel without a start time is a skip.
            raw(EventKind::Refuel, &[("fuel_liters", TreeValue::Real(10.0))]),
            // End before start is a skip.
            raw(
                EventKind::Trip,
                &[
                    ("start", TreeValue::Timestamp(2_000)),
                    ("end", TreeValue::Timestamp(1_000)),
                ],
            ),
        ];
        let out = normalize(&records);
        assert_eq!(out.events.len(), 1);
        assert_eq!(out.skips.len(), 3);
        assert!(out.events.len() + out.skips.len() >= records.len());
        assert_eq!(out.events[0].attr_f64("fuel_liters"), Some(40.0));
    }

    #[test]
    fn normalize_is_deterministic_and_ids_are_stable() {
        let records = vec![raw(
            EventKind::Refuel,
            &[
                ("start", TreeValue::Timestamp(1_604_412_000_000)),
                ("fuel_liters", TreeValue::Real(40.0)),
            ],
        )];
        let a = normalize(&records);
        let b = normalize(&records);
        assert_eq!(a.events, b.events);
        assert_eq!(a.events[0].event_id.len(), 64);
    }

    #[test]
    fn normalize_canonicalizes_units() {
        let records = vec![raw(
            EventKind::LocationFix,
            &[
                ("start", TreeValue::Timestamp(1_604_412_000_000)),
                ("lat", TreeValue::Real(51.9)),
                ("lon", TreeValue::Real(7.6)),
                ("speed_mph", TreeValue::Real(30.0)),
                ("mileage_miles", TreeValue::Real(100.0)),
            ],
        )];
        let out = normalize(&records);
        let e = &out.events[0];
        assert!((e.attr_f64("speed_kmh").unwrap() - 48.28032).abs() < 1e-6);
        assert!((e.attr_f64("mileage_km").unwrap() - 160.9344).abs() < 1e-6);
        assert!(!e.attributes.contains_key("speed_mph"));
    }

    #[test]
    fn normalize_flags_null_island_and_demotes_invalid_vins() {
        let records = vec![raw(
            EventKind::LocationFix,
            &[
                ("start", TreeValue::Timestamp(1_604_412_000_000)),
                ("lat", TreeValue::Real(0.0)),
                ("lon", TreeValue::Real(0.0)),
                ("vin", TreeValue::Text("TOO-SHORT".into())),
            ],
        )];
        let out = normalize(&records);
        let e = &out.events[0];
        assert_eq!(
            e.attributes.get("geo_suspect"),
            Some(&TreeValue::Bool(true))
        );
        assert_eq!(e.vin, None);
        assert_eq!(e.attr_str("vin_raw"), Some("TOO-SHORT"));
    }

    #[test]
    fn trackpoints_link_to_trips() {
        let mut records = vec![raw(
            EventKind::Trip,
            &[
                ("start", TreeValue::Timestamp(1_604_412_000_000)),
                ("end", TreeValue::Timestamp(1_604_412_030_000)),
                ("trip_ref", TreeValue::Text("ZDLTRIP/1".into())),
            ],
        )];
        for k in 0..3 {
            records.push(raw(
                EventKind::LocationFix,
                &[
                    (
                        "start",
                        TreeValue::Timestamp(1_604_412_000_000 + k * 10_000),
                    ),
                    ("lat", TreeValue::Real(51.9)),
                    ("lon", TreeValue::Real(7.6)),
                    ("trip_ref", TreeValue::Text("ZDLTRIP/1".into())),
                ],
            ));
        }
        let out = normalize(&records);
        let trip = out
            .events
            .iter()
            .find(|e| e.kind == EventKind::Trip)
            .unwrap();
        assert_eq!(trip.attr_f64("trackpoint_count"), Some(3.0));
    }
}
