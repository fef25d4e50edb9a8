//! Cross-source timeline: ordered, deduplicated event store plus aggregate
//! activity summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::event::{CanonicalEvent, EventKind, GeoPoint, TimeConfidence};
use crate::util::haversine_m;

/// Cross-source duplicate window for events with exact timestamps; apps and
/// backends round the same activity differently.
pub const MERGE_TOLERANCE_MS: i64 = 60_000;
/// Two coordinates within this radius count as the same place for merging.
pub const MERGE_GEO_M: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    /// Sorted by (start, kind, event_id); undated events last.
    pub events: Vec<CanonicalEvent>,
    pub sources: Vec<String>,
    pub built_at: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub from: i64,
    pub to: i64,
}

impl Interval {
    pub fn new(from: i64, to: i64) -> Option<Interval> {
        (from <= to).then_some(Interval { from, to })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParkingEpisode {
    pub geo: Option<GeoPoint>,
    pub start: i64,
    /// Absent while no later movement bounds the episode.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duration_ms: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VinActivity {
    pub trip_count: u64,
    pub total_distance_km: f64,
    pub refuel_count: u64,
    pub total_fuel_liters: f64,
    pub parking_episodes: Vec<ParkingEpisode>,
    pub lock_unlock_count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_seen: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub last_seen: Option<i64>,
}

/// Aggregate answers to what/where/when/how, per VIN. Events without a VIN
/// are pooled under the empty key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActivitySummary {
    pub per_vin: BTreeMap<String, VinActivity>,
    pub event_count: u64,
}

/// Merge, deduplicate and sort normalized events into a timeline.
///
/// Exact duplicates collapse by event id. Cross-source duplicates — same
/// kind and VIN, starts within the tolerance, and agreeing key attributes —
/// merge into one event carrying every provenance. Input order never affects
/// the result.
pub fn build(events: Vec<CanonicalEvent>, sources: Vec<String>, built_at: i64) -> Timeline {
    let mut events = events;
    events.sort_by_key(|a| a.sort_key());

    // Exact dedup by id, keeping all distinct provenance entries.
    let mut by_id: Vec<CanonicalEvent> = Vec::with_capacity(events.len());
    for ev in events {
        match by_id.last_mut() {
            Some(prev) if prev.event_id == ev.event_id => merge_provenance(prev, ev.provenance),
            _ => by_id.push(ev),
        }
    }
    // The sort is by (start, kind, id); equal ids can be non-adjacent only
    // when starts differ, which content hashing rules out.

    // Fuzzy cross-source merge: cluster against the leader of each run.
    let mut merged: Vec<CanonicalEvent> = Vec::with_capacity(by_id.len());
    for ev in by_id {
        let candidate = merged
            .iter_mut()
            .rev()
            .take_while(|m| match (m.start, ev.start) {
                (Some(a), Some(b)) => (b - a).abs() <= MERGE_TOLERANCE_MS,
                _ => false,
            });
        let mut absorbed = false;
        for leader in candidate {
            if duplicates(leader, &ev) {
                let provenance = ev.provenance.clone();
                merge_provenance(leader, provenance);
                if leader.event_id > ev.event_id {
                    leader.event_id = ev.event_id.clone();
                }
                absorbed = true;
                break;
            }
        }
        if !absorbed {
            merged.push(ev);
        }
    }

    merged.sort_by_key(|a| a.sort_key());
    let mut sources = sources;
    sources.sort();
    sources.dedup();
    Timeline {
        events: merged,
        sources,
        built_at,
    }
}

fn merge_provenance(target: &mut CanonicalEvent, provenance: Vec<crate::event::Provenance>) {
    for p in provenance {
        if !target.provenance.contains(&p) {
            target.provenance.push(p);
        }
    }
    target.provenance.sort();
}

/// Same activity seen twice? Requires same kind and VIN, exact-confidence
/// starts within the window, and at least one agreeing key attribute:
/// fuel amount, position within 50 m, or identical address.
fn duplicates(a: &CanonicalEvent, b: &CanonicalEvent) -> bool {
    if a.kind != b.kind || a.vin != b.vin || a.vin.is_none() {
        return false;
    }
    if a.time_confidence != TimeConfidence::Exact || b.time_confidence != TimeConfidence::Exact {
        return false;
    }
    let (Some(sa), Some(sb)) = (a.start, b.start) else {
        return false;
    };
    if (sa - sb).abs() > MERGE_TOLERANCE_MS {
        return false;
    }

    let fuel = match (a.attr_f64("fuel_liters"), b.attr_f64("fuel_liters")) {
        (Some(x), Some(y)) => Some((x - y).abs() < 1e-9),
        _ => None,
    };
    let geo = match (a.geo_start, b.geo_start) {
        (Some(x), Some(y)) => Some(haversine_m(x.lat, x.lon, y.lat, y.lon) <= MERGE_GEO_M),
        _ => None,
    };
    let address = match (a.attr_str("address_start"), b.attr_str("address_start")) {
        (Some(x), Some(y)) => Some(x == y),
        _ => match (a.attr_str("address"), b.attr_str("address")) {
            (Some(x), Some(y)) => Some(x == y),
            _ => None,
        },
    };

    let keys = [fuel, geo, address];
    let compared: Vec<bool> = keys.iter().flatten().copied().collect();
    if compared.is_empty() {
        // Nothing comparable beyond kind/vin/time; merge only exact-attribute twins.
        return a.attributes == b.attributes;
    }
    compared.into_iter().all(|ok| ok)
}

/// Events whose span overlaps the interval, optionally filtered by kind and
/// VIN. Undated events cannot be excluded on time — they could fall inside
/// any window — so every query returns them (kind and VIN filters still
/// apply); a whole-range query therefore yields every event exactly once.
pub fn query(
    t: &Timeline,
    interval: Interval,
    kinds: Option<&[EventKind]>,
    vin: Option<&str>,
) -> Vec<CanonicalEvent> {
    t.events
        .iter()
        .filter(|e| match e.start {
            Some(start) => {
                let end = e.end.unwrap_or(start);
                start <= interval.to && end >= interval.from
            }
            None => true,
        })
        .filter(|e| kinds.is_none_or(|ks| ks.contains(&e.kind)))
        .filter(|e| vin.is_none_or(|v| e.vin.as_deref() == Some(v)))
        .cloned()
        .collect()
}

pub fn summarize(t: &Timeline) -> ActivitySummary {
    let mut summary = ActivitySummary {
        event_count: t.events.len() as u64,
        ..Default::default()
    };

    for ev in &t.events {
        let key = ev.vin.clone().unwrap_or_default();
        let entry = summary.per_vin.entry(key).or_default();
        if let Some(start) = ev.start {
            entry.first_seen = Some(entry.first_seen.map_or(start, |f| f.min(start)));
            let end = ev.end.unwrap_or(start);
            entry.last_seen = Some(entry.last_seen.map_or(end, |l| l.max(end)));
        }
        match ev.kind {
            EventKind::Trip => {
                entry.trip_count += 1;
                // mileage_km is an odometer reading, not a trip length.
                entry.total_distance_km += ev.attr_f64("distance_km").unwrap_or(0.0);
            }
            EventKind::Refuel => {
                entry.refuel_count += 1;
                entry.total_fuel_liters += ev.attr_f64("fuel_liters").unwrap_or(0.0);
            }
            EventKind::LockState => entry.lock_unlock_count += 1,
            _ => {}
        }
    }

    // Parking duration: bounded by the next movement-implying event of the
    // same VIN (trip start or a moving location fix); lock/unlock alone does
    // not end an episode.
    for (vin, entry) in summary.per_vin.iter_mut() {
        let vin_events: Vec<&CanonicalEvent> = t
            .events
            .iter()
            .filter(|e| e.vin.as_deref().unwrap_or_default() == vin)
            .collect();
        for ev in &vin_events {
            if ev.kind != EventKind::Parking {
                continue;
            }
            let Some(start) = ev.start else { continue };
            let next_movement = vin_events
                .iter()
                .filter(|m| match m.kind {
                    EventKind::Trip => true,
                    EventKind::LocationFix => m.attr_f64("speed_kmh").is_some_and(|s| s > 0.0),
                    _ => false,
                })
                .filter_map(|m| m.start)
                .find(|&ms| ms > start);
            entry.parking_episodes.push(ParkingEpisode {
                geo: ev.geo_start,
                start,
                duration_ms: next_movement.map(|m| m - start),
            });
        }
        entry.parking_episodes.sort_by_key(|p| p.start);
    }

    summary
}

/// Maximal event-free intervals of at least `min_gap` between the first and
/// last dated events. Undated events are excluded.
pub fn gaps(t: &Timeline, min_gap_ms: i64) -> Vec<Interval> {
    assert!(min_gap_ms > 0, "min_gap must be positive");
    let mut spans: Vec<(i64, i64)> = t
        .events
        .iter()
        .filter_map(|e| e.start.map(|s| (s, e.end.unwrap_or(s))))
        .collect();
    spans.sort_unstable();
    let mut out = Vec::new();
    let mut covered_until = match spans.first() {
        Some(&(s, e)) => e.max(s),
        None => return out,
    };
    for (s, e) in spans.into_iter().skip(1) {
        if s - covered_until >= min_gap_ms {
            out.push(Interval {
                from: covered_until,
                to: s,
            });
        }
        covered_until = covered_until.max(e);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{compute_event_id, Provenance};
    use std::collections::BTreeMap;

    fn prov(path: &str) -> Provenance {
        Provenance {
            source_id: "s1-test".into(),
            artifact_path: path.into(),
            sha256: "c".repeat(64),
            locator: "row 1".into(),
            extractor_version: "test".into(),
        }
    }

    fn event(kind: EventKind, start: i64, vin: &str, path: &str) -> CanonicalEvent {
        let attributes = BTreeMap::new();
        CanonicalEvent {
            event_id: compute_event_id(kind, Some(start), Some(vin), &attributes, path, "row 1"),
            kind,
            start: Some(start),
            end: None,
            geo_start: None,
            geo_end: None,
            vin: Some(vin.into()),
            time_confidence: TimeConfidence::Exact,
            attributes,
            provenance: vec![prov(path)],
        }
    }

    fn with_fuel(mut e: CanonicalEvent, liters: f64) -> CanonicalEvent {
        e.attributes.insert(
            "fuel_liters".into(),
            crate::formats::TreeValue::Real(liters),
        );
        e.event_id = compute_event_id(
            e.kind,
            e.start,
            e.vin.as_deref(),
            &e.attributes,
            &e.provenance[0].artifact_path,
            "row 1",
        );
        e
    }

    const VIN: &str = "WVWZZZ5NZJM000000";

    #[test]
    fn empty_build() {
        let t = build(vec![], vec![], 0);
        assert!(t.events.is_empty());
        assert_eq!(summarize(&t).event_count, 0);
    }

    #[test]
    fn cross_source_refuel_merges_with_two_provenances() {
        let a = with_fuel(
            event(EventKind::Refuel, 1_604_412_000_000, VIN, "/a/avacar.db"),
            40.0,
        );
        let b = with_fuel(
            event(EventKind::Refuel, 1_604_412_030_000, VIN, "/b/avacar.db"),
            40.0,
        );
        let t = build(vec![a.clone(), b.clone()], vec![], 0);
        assert_eq!(t.events.len(), 1);
        assert_eq!(t.events[0].provenance.len(), 2);

        // Order independence.
        let t2 = build(vec![b, a], vec![], 0);
        assert_eq!(t.events, t2.events);
    }

    #[test]
    fn different_fuel_amounts_do_not_merge() {
        let a = with_fuel(
            event(EventKind::Refuel, 1_604_412_000_000, VIN, "/a/x.db"),
            40.0,
        );
        let b = with_fuel(
            event(EventKind::Refuel, 1_604_412_030_000, VIN, "/b/x.db"),
            31.0,
        );
        assert_eq!(build(vec![a, b], vec![], 0).events.len(), 2);
    }

    #[test]
    fn build_is_idempotent() {
        let a = with_fuel(
            event(EventKind::Refuel, 1_604_412_000_000, VIN, "/a/x.db"),
            40.0,
        );
        let b = with_fuel(
            event(EventKind::Refuel, 1_604_412_030_000, VIN, "/b/x.db"),
            40.0,
        );
        let t1 = build(vec![a, b], vec!["s".into()], 7);
        let t2 = build(t1.events.clone(), vec!["s".into()], 7);
        assert_eq!(t1.events, t2.events);
    }

    #[test]
    fn query_by_interval_kind_and_overlap() {
        let mut trip = event(EventKind::Trip, 1000, VIN, "/a");
        trip.end = Some(5000);
        let fix = event(EventKind::LocationFix, 8000, VIN, "/b");
        let t = build(vec![trip, fix], vec![], 0);

        assert!(query(&t, Interval::new(90_000, 95_000).unwrap(), None, None).is_empty());
        // Span overlap: the trip runs into the window even though it started before it.
        let hits = query(
            &t,
            Interval::new(4000, 6000).unwrap(),
            Some(&[EventKind::Trip]),
            None,
        );
        assert_eq!(hits.len(), 1);
        let all = query(&t, Interval::new(0, i64::MAX).unwrap(), None, None);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn whole_range_query_returns_every_event_once() {
        let dated = event(EventKind::Trip, 1000, VIN, "/a");
        let mut undated = event(EventKind::NavDestination, 0, VIN, "/n");
        undated.start = None;
        undated.time_confidence = TimeConfidence::Undated;
        let t = build(vec![dated, undated], vec![], 0);

        let all = query(&t, Interval::new(i64::MIN, i64::MAX).unwrap(), None, None);
        assert_eq!(all.len(), t.events.len());
        let ids: std::collections::BTreeSet<&str> =
            all.iter().map(|e| e.event_id.as_str()).collect();
        assert_eq!(ids.len(), all.len(), "no duplicates");

        // Undated events cannot be excluded on time; narrow windows still
        // surface them.
        let narrow = query(&t, Interval::new(5000, 6000).unwrap(), None, None);
        assert_eq!(narrow.len(), 1);
        assert_eq!(narrow[0].kind, EventKind::NavDestination);
    }

    #[test]
    fn summary_totals_partition_by_vin() {
        let mut a = with_fuel(event(EventKind::Refuel, 1_604_412_000_000, VIN, "/a"), 41.5);
        a.vin = Some("A1111111111111111".into());
        let mut b = with_fuel(event(EventKind::Refuel, 1_604_412_000_000, VIN, "/b"), 20.0);
        b.vin = Some("B1111111111111111".into());
        let t = build(vec![a, b], vec![], 0);
        let s = summarize(&t);
        let whole = Interval::new(i64::MIN, i64::MAX).unwrap();
        for (vin, activity) in &s.per_vin {
            let per_vin_events = query(&t, whole, Some(&[EventKind::Refuel]), Some(vin));
            let total: f64 = per_vin_events
                .iter()
                .filter_map(|e| e.attr_f64("fuel_liters"))
                .sum();
            assert!((total - activity.total_fuel_liters).abs() < 1e-9);
        }
    }

    #[test]
    fn parking_duration_until_next_movement() {
        let base = 1_604_412_000_000;
        let parking = event(EventKind::Parking, base, VIN, "/p");
        let lock = event(EventKind::LockState, base + 600_000, VIN, "/l");
        let trip = event(EventKind::Trip, base + 2_700_000, VIN, "/t");
        let t = build(vec![parking, lock, trip], vec![], 0);
        let s = summarize(&t);
        let episodes = &s.per_vin[VIN].parking_episodes;
        assert_eq!(episodes.len(), 1);
        // The lock event does not end the episode; the trip 45 min later does.
        assert_eq!(episodes[0].duration_ms, Some(2_700_000));
    }

    #[test]
    fn gap_detection() {
        let a = event(EventKind::Trip, 0, VIN, "/a");
        let t1 = build(vec![a.clone()], vec![], 0);
        assert!(gaps(&t1, 60_000).is_empty());

        let b = event(EventKind::Trip, 7_200_000, VIN, "/b");
        let t2 = build(vec![a, b], vec![], 0);
        let gs = gaps(&t2, 3_600_000);
        assert_eq!(gs.len(), 1);
        assert_eq!((gs[0].from, gs[0].to), (0, 7_200_000));
    }
}
