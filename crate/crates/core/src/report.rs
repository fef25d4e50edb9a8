//! Machine- and human-readable output emitters. Every emitter is a pure
//! function of already-built data, and the HTML report is generated from the
//! same values the JSON outputs carry.

use std::collections::BTreeSet;

use crate::event::CanonicalEvent;
use crate::sar::CorrelationReport;
use crate::timeline::{ActivitySummary, Timeline};

/// Deterministic pretty JSON: map keys sorted, trailing newline.
fn stable_json<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut out = serde_json::to_string_pretty(&v).expect("serializable");
    out.push('\n');
    out
}

pub fn events_json(t: &Timeline) -> String {
    stable_json(t)
}

pub fn summary_json(s: &ActivitySummary) -> String {
    stable_json(s)
}

pub fn correlation_json(r: &CorrelationReport) -> String {
    stable_json(r)
}

/// Fixed, documented column order (see README).
pub const EVENTS_CSV_HEADER: &str = "event_id,kind,start_utc,end_utc,vin,lat,lon,lat_end,lon_end,time_confidence,artifact_paths,attributes_json";

pub fn events_csv(t: &Timeline) -> String {
    let mut out = String::from(EVENTS_CSV_HEADER);
    out.push('\n');
    for e in &t.events {
        out.push_str(&event_csv_row(e));
        out.push('\n');
    }
    out
}

fn rfc3339(ms: i64) -> String {
    chrono::DateTime::from_timestamp_millis(ms)
        .unwrap_or_default()
        .to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn event_csv_row(e: &CanonicalEvent) -> String {
    let fmt_f = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
    let paths: Vec<String> = {
        let set: BTreeSet<String> = e
            .provenance
            .iter()
            .map(|p| p.artifact_path.clone())
            .collect();
        set.into_iter().collect()
    };
    let confidence = match e.time_confidence {
        crate::event::TimeConfidence::Exact => "exact",
        crate::event::TimeConfidence::Inferred => "inferred",
        crate::event::TimeConfidence::Undated => "undated",
    };
    [
        e.event_id.clone(),
        e.kind.as_str().to_string(),
        e.start.map(rfc3339).unwrap_or_default(),
        e.end.map(rfc3339).unwrap_or_default(),
        e.vin.clone().unwrap_or_default(),
        fmt_f(e.geo_start.map(|g| g.lat)),
        fmt_f(e.geo_start.map(|g| g.lon)),
        fmt_f(e.geo_end.map(|g| g.lat)),
        fmt_f(e.geo_end.map(|g| g.lon)),
        confidence.to_string(),
        paths.join("|"),
        serde_json::to_string(&serde_json::to_value(&e.attributes).unwrap()).unwrap(),
    ]
    .map(|f| csv_quote(&f))
    .join(",")
}

fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Static, self-contained report: no scripts, no external references.
pub fn html_report(
    t: &Timeline,
    summary: &ActivitySummary,
    correlation: Option<&CorrelationReport>,
    custody_records: &[crate::evidence::CustodyRecord],
) -> String {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str("<title>Vehicle assistant app analysis</title>\n<style>\n");
    html.push_str(
        "body{font-family:sans-serif;margin:2em;color:#222}table{border-collapse:collapse;margin:1em 0}\n\
         th,td{border:1px solid #999;padding:4px 8px;font-size:13px;text-align:left}\n\
         th{background:#eee}h2{margin-top:1.6em}code{font-size:12px}.muted{color:#666}\n",
    );
    html.push_str("</style>\n</head>\n<body>\n<h1>Vehicle assistant app analysis</h1>\n");

    html.push_str(&format!(
        "<p>Timeline built {} from {} source(s); {} event(s).</p>\n",
        html_escape(&rfc3339(t.built_at)),
        t.sources.len(),
        t.events.len()
    ));

    html.push_str("<h2>Activity per vehicle</h2>\n<table>\n<tr><th>VIN</th><th>Trips</th><th>Distance (km)</th><th>Refuels</th><th>Fuel (L)</th><th>Parking episodes</th><th>Lock/unlock</th><th>First seen</th><th>Last seen</th></tr>\n");
    for (vin, a) in &summary.per_vin {
        let label = if vin.is_empty() {
            "(no VIN)".to_string()
        } else {
            vin.clone()
        };
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{:.1}</td><td>{}</td><td>{:.1}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
            html_escape(&label),
            a.trip_count,
            a.total_distance_km,
            a.refuel_count,
            a.total_fuel_liters,
            a.parking_episodes.len(),
            a.lock_unlock_count,
            a.first_seen.map(rfc3339).unwrap_or_default(),
            a.last_seen.map(rfc3339).unwrap_or_default(),
        ));
    }
    html.push_str("</table>\n");

    html.push_str("<h2>Events</h2>\n<table>\n<tr><th>Start (UTC)</th><th>Kind</th><th>VIN</th><th>Position</th><th>Sources</th><th>Attributes</th></tr>\n");
    for e in &t.events {
        let pos = e
            .geo_start
            .map(|g| format!("{:.4}, {:.4}", g.lat, g.lon))
            .unwrap_or_default();
        let paths: BTreeSet<String> = e
            .provenance
            .iter()
            .map(|p| p.artifact_path.clone())
            .collect();
        let attrs = serde_json::to_string(&serde_json::to_value(&e.attributes).unwrap()).unwrap();
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td class=\"muted\">{}</td><td><code>{}</code></td></tr>\n",
            e.start.map(rfc3339).unwrap_or_else(|| "undated".into()),
            e.kind.as_str(),
            html_escape(e.vin.as_deref().unwrap_or("")),
            pos,
            html_escape(&paths.into_iter().collect::<Vec<_>>().join(", ")),
            html_escape(&attrs),
        ));
    }
    html.push_str("</table>\n");

    if let Some(c) = correlation {
        html.push_str("<h2>Correlation with manufacturer data</h2>\n");
        html.push_str(&format!(
            "<p>{} phone event(s) considered, {} SAR event(s) considered; {} matched pair(s), {} telemetry-confirmed trip(s), {} phone-only, {} SAR-only.</p>\n",
            c.phone_considered,
            c.sar_considered,
            c.matched.len(),
            c.telemetry_trips.len(),
            c.phone_only.len(),
            c.sar_only.len()
        ));
        if !c.matched.is_empty() {
            html.push_str("<table>\n<tr><th>Phone event</th><th>Kind</th><th>SAR event</th><th>|&Delta;t| (ms)</th></tr>\n");
            for m in &c.matched {
                html.push_str(&format!(
                    "<tr><td><code>{}</code></td><td>{}</td><td><code>{}</code></td><td>{}</td></tr>\n",
                    &m.phone_event_id[..16.min(m.phone_event_id.len())],
                    m.phone_kind.as_str(),
                    &m.sar_event_id[..16.min(m.sar_event_id.len())],
                    m.delta_ms
                ));
            }
            html.push_str("</table>\n");
        }
        if !c.telemetry_trips.is_empty() {
            html.push_str("<table>\n<tr><th>Trip</th><th>Telemetry active</th><th>&Delta;start (ms)</th><th>&Delta;end (ms)</th></tr>\n");
            for m in &c.telemetry_trips {
                html.push_str(&format!(
                    "<tr><td><code>{}</code></td><td>{} .. {}</td><td>{}</td><td>{}</td></tr>\n",
                    &m.trip_event_id[..16.min(m.trip_event_id.len())],
                    rfc3339(m.active_from),
                    rfc3339(m.active_to),
                    m.start_delta_ms,
                    m.end_delta_ms
                ));
            }
            html.push_str("</table>\n");
        }
    }

    html.push_str("<h2>Chain of custody</h2>\n");
    html.push_str(&format!(
        "<p>{} custody record(s). Full log: <code>custody.ndjson</code>.</p>\n<table>\n<tr><th>When (UTC)</th><th>Action</th><th>Path</th><th>SHA-256</th></tr>\n",
        custody_records.len()
    ));
    for r in custody_records.iter().take(2000) {
        let action = match r.action {
            crate::evidence::CustodyAction::Inventoried => "inventoried",
            crate::evidence::CustodyAction::Parsed => "parsed",
            crate::evidence::CustodyAction::Exported => "exported",
        };
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{}</td><td><code>{}</code></td></tr>\n",
            rfc3339(r.at),
            action,
            html_escape(&r.file_path),
            &r.sha256[..16.min(r.sha256.len())]
        ));
    }
    html.push_str("</table>\n</body>\n</html>\n");
    html
}
