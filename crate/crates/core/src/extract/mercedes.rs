//! Mercedes me Adapter: the iOS build stores everything in the clear — the
//! driver logbook with ten-second trackpoints, the live dashboard snapshot,
//! refuelings and user info. The Android build encrypts its two databases;
//! only the autofill store, map-tile cache, parking photo and preferences
//! are readable.

use crate::event::{Epoch, EventKind};
use crate::formats::{read_json, read_xml_prefs, sniff_image, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Ios, "000000000000") => last_trip(ctx),
        (Platform::Ios, "live.json") => live_dashboard(ctx),
        (Platform::Ios, "DriverLogbook.sqlite") => driver_logbook(ctx),
        (Platform::Ios, "MBFA") => mbfa(ctx),
        (Platform::Android, "Web Data") => {
            autofill_records(ctx, &[("address", "address"), ("email", "email")])
        }
        (Platform::Android, _) if ctx.rel_path.contains("volley") => volley_cache(ctx),
        (Platform::Android, _) if ctx.rel_path.starts_with("resources/") => parking_photo(ctx),
        (Platform::Android, "com.daimler.mbfa.android_preferences.xml") => preferences(ctx),
        _ => Err(format!("no Mercedes me handler for {}", ctx.rel_path)),
    }
}

/// `Documents/<32-hex>/000000000000`: distance of the last trip taken.
fn last_trip(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut rec = ctx.record(EventKind::StatusSnapshot, "$").set_opt(
        "last_trip_distance_km",
        tree.get("last_trip_distance_km").cloned(),
    );
    if let Some(TreeValue::Int(at)) = tree.get("at") {
        rec = rec.ts("start", *at);
    }
    Ok(vec![rec])
}

/// `Documents/live.json`: the app dashboard as key-value pairs, including the
/// parked-vehicle position.
fn live_dashboard(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let vin = tree.get("vin").cloned();

    let mut rec = ctx
        .record(EventKind::StatusSnapshot, "$")
        .set_opt(
            "fuel_level_percent",
            tree.get("fuel_level_percent").cloned(),
        )
        .set_opt("mileage_km", tree.get("mileage_km").cloned())
        .set_opt("coolant_temp_c", tree.get("coolant_temp_c").cloned())
        .set_opt("vin", vin.clone());
    if let Some(TreeValue::Int(at)) = tree.get("timestamp") {
        rec = rec.ts("start", *at);
    }
    out.push(rec);

    if let Some(pp) = tree.get("parking_position") {
        let mut rec = ctx
            .record(EventKind::Parking, "$.parking_position")
            .set_opt("lat", pp.get("lat").cloned())
            .set_opt("lon", pp.get("lon").cloned())
            .set_opt("vin", vin);
        if let Some(TreeValue::Int(at)) = pp.get("at") {
            rec = rec.ts("start", *at);
        }
        out.push(rec);
    }
    Ok(out)
}

/// `DriverLogbook.sqlite`: trips joined to `ZDLCOREDATRACKPOINTS`, which
/// samples the vehicle position every ten seconds while driving.
fn driver_logbook(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();

    if let Some(rows) = rows(&set, "ZDLTRIP") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("ZSTARTTIME", 1, Epoch::AppleS) else {
                continue;
            };
            let pk = row.i64("Z_PK", 0).unwrap_or(row.index as i64 + 1);
            let mut rec = ctx
                .record(EventKind::Trip, &row.locator())
                .ts("start", start)
                .reinferred_note(re)
                .set("trip_ref", text_tv(format!("ZDLTRIP/{pk}")))
                .set_opt(
                    "address_start",
                    row.text("ZSTARTADDRESS", 3).map(TreeValue::Text),
                )
                .set_opt(
                    "address_end",
                    row.text("ZDESTINATIONADDRESS", 4).map(TreeValue::Text),
                )
                .set_opt("distance_km", row.f64("ZDISTANCE", 5).map(real_tv));
            if let Some((end, _)) = row.timestamp("ZENDTIME", 2, Epoch::AppleS) {
                rec = rec.ts("end", end);
            }
            out.push(rec);
        }
    }
    if let Some(rows) = rows(&set, "ZDLCOREDATRACKPOINTS") {
        for row in rows.iter() {
            let Some((at, re)) = row.timestamp("ZTIMESTAMP", 2, Epoch::AppleS) else {
                continue;
            };
            let trip_fk = row.i64("ZTRIP", 1).unwrap_or(0);
            out.push(
                ctx.record(EventKind::LocationFix, &row.locator())
                    .ts("start", at)
                    .reinferred_note(re)
                    .set("trip_ref", text_tv(format!("ZDLTRIP/{trip_fk}")))
                    .set_opt("lat", row.f64("ZLATITUDE", 3).map(real_tv))
                    .set_opt("lon", row.f64("ZLONGITUDE", 4).map(real_tv)),
            );
        }
    }
    Ok(out)
}

/// `Library/Application Support/Live/MBFA`: refuelings and user info. The
/// table names are not Core-Data prefixed; timestamps are Unix milliseconds.
fn mbfa(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "refuelings") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("at", 1, Epoch::UnixMs) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Refuel, &row.locator())
                    .ts("start", start)
                    .reinferred_note(re)
                    .set_opt("fuel_liters", row.f64("liters", 2).map(real_tv))
                    .set_opt("price", row.f64("price", 3).map(real_tv))
                    .set_opt("mileage_km", row.f64("mileage_km", 4).map(real_tv)),
            );
        }
    }
    if let Some(rows) = rows(&set, "user_info") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::Identity, &row.locator())
                    .set_opt("name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("email", row.text("email", 2).map(TreeValue::Text))
                    .set_opt("phone", row.text("phone", 3).map(TreeValue::Text))
                    .set_opt(
                        "date_of_birth",
                        row.text("date_of_birth", 4).map(TreeValue::Text),
                    )
                    .set_opt("address", row.text("address", 5).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

/// Volley cache entries: map-tile URLs viewed during app use.
fn volley_cache(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let urls = scan_urls(ctx.bytes);
    if urls.is_empty() {
        return Err("no URLs in cache entry".into());
    }
    Ok(vec![ctx.record(EventKind::StatusSnapshot, "url scan").set(
        "viewed_map_tiles",
        TreeValue::List(urls.into_iter().map(TreeValue::Text).collect()),
    )])
}

/// `resources/`: a photo the user took of the parking position.
fn parking_photo(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let format = sniff_image(ctx.bytes);
    Ok(vec![ctx
        .record(EventKind::StatusSnapshot, "whole file")
        .set("snapshot", text_tv("parking_photo"))
        .set(
            "image_format",
            text_tv(format!("{format:?}").to_lowercase()),
        )
        .set(
            "image_bytes",
            TreeValue::Int(ctx.bytes.len() as i64),
        )])
}

fn preferences(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::VehicleInfo, "preferences")
        .set_opt("vin", map.get("vin").cloned())
        .set_opt("adapter_id", map.get("adapter_id").cloned())
        .set_opt(
            "km_to_next_service",
            map.get("km_to_next_service").cloned(),
        )])
}
