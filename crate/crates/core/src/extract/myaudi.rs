//! myAudi: driver's logbook and cost book databases, vehicle/user JSON
//! stores, navigation coordinate cache, and the web-request cache holding
//! lock/unlock logs and door status.

use crate::event::{Epoch, EventKind};
use crate::formats::{read_gzip_json, read_json, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Ios, "maps.db") => maps_db(ctx),
        (Platform::Android, "audiMapsDatabase.db") => logbook_db(ctx),
        (Platform::Android, "vehicleList") => vehicle_list(ctx),
        (Platform::Android, "PERSISTENCE_KEY_USER_ACCOUNT") => user_account(ctx),
        (Platform::Android, _) if ctx.rel_path.contains("GeoKitDecodedCoordinate") => {
            nav_cache(ctx)
        }
        (Platform::Android, _) if ctx.rel_path.contains("WebRequestManagerCache") => web_cache(ctx),
        _ => Err(format!("no myAudi handler for {}", ctx.rel_path)),
    }
}

/// iOS `Documents/maps.db`: CostBookItem (refuelings), DriverLogItem (trips),
/// SettingsItem (last vehicle synchronization).
fn maps_db(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();

    if let Some(rows) = rows(&set, "CostBookItem") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("ZTIMESTAMP", 1, Epoch::AppleS) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Refuel, &row.locator())
                    .ts("start", start)
                    .reinferred_note(re)
                    .set_opt("fuel_liters", row.f64("ZFUELAMOUNT", 2).map(real_tv))
                    .set_opt("price", row.f64("ZPRICE", 3).map(real_tv)),
            );
        }
    }
    if let Some(rows) = rows(&set, "DriverLogItem") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("ZSTARTTIME", 1, Epoch::AppleS) else {
                continue;
            };
            let mut rec = ctx
                .record(EventKind::Trip, &row.locator())
                .ts("start", start)
                .reinferred_note(re)
                .set_opt(
                    "address_start",
                    row.text("ZSTARTADDRESS", 3).map(TreeValue::Text),
                )
                .set_opt(
                    "address_end",
                    row.text("ZDESTINATIONADDRESS", 4).map(TreeValue::Text),
                );
            if let Some((end, _)) = row.timestamp("ZENDTIME", 2, Epoch::AppleS) {
                rec = rec.ts("end", end);
            }
            out.push(rec);
        }
    }
    if let Some(rows) = rows(&set, "SettingsItem") {
        for row in rows.iter() {
            let Some((sync, re)) = row.timestamp("ZLASTSYNC", 1, Epoch::AppleS) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::StatusSnapshot, &row.locator())
                    .ts("start", sync)
                    .reinferred_note(re)
                    .ts("last_sync", sync),
            );
        }
    }
    Ok(out)
}

/// Android `databases/audiMapsDatabase.db`: `drivers_log_item` trips with
/// mileage, `cost_book_item` refuelings.
fn logbook_db(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();

    if let Some(rows) = rows(&set, "drivers_log_item") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("start_time", 1, Epoch::UnixMs) else {
                continue;
            };
            let mut rec = ctx
                .record(EventKind::Trip, &row.locator())
                .ts("start", start)
                .reinferred_note(re)
                .set_opt(
                    "address_start",
                    row.text("start_address", 3).map(TreeValue::Text),
                )
                .set_opt(
                    "address_end",
                    row.text("destination_address", 4).map(TreeValue::Text),
                )
                .set_opt("mileage_km", row.f64("mileage_km", 5).map(real_tv));
            if let Some((end, _)) = row.timestamp("end_time", 2, Epoch::UnixMs) {
                rec = rec.ts("end", end);
            }
            out.push(rec);
        }
    }
    if let Some(rows) = rows(&set, "cost_book_item") {
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("timestamp", 1, Epoch::UnixMs) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Refuel, &row.locator())
                    .ts("start", start)
                    .reinferred_note(re)
                    .set_opt("fuel_liters", row.f64("fuel_liters", 2).map(real_tv))
                    .set_opt("price", row.f64("price_eur", 3).map(real_tv))
                    .set_opt("mileage_km", row.f64("mileage_km", 4).map(real_tv)),
            );
        }
    }
    Ok(out)
}

/// `files/vehicleList`: model name and installed assistance systems.
fn vehicle_list(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let Some(vehicles) = tree.get("vehicles").and_then(TreeValue::as_list) else {
        return Ok(out);
    };
    for (i, v) in vehicles.iter().enumerate() {
        out.push(
            ctx.record(EventKind::VehicleInfo, &format!("$.vehicles[{i}]"))
                .set_opt("model", v.get("model").cloned())
                .set_opt("vin", v.get("vin").cloned())
                .set_opt("assistance_systems", v.get("assistance_systems").cloned()),
        );
    }
    Ok(out)
}

/// `PERSISTENCE_KEY_USER_ACCOUNT`: account holder identity.
fn user_account(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::Identity, "$")
        .set_opt("name", tree.get("name").cloned())
        .set_opt("email", tree.get("email").cloned())
        .set_opt("date_of_birth", tree.get("date_of_birth").cloned())
        .set_opt("user_id", tree.get("user_id").cloned())])
}

/// `DiskLruCache/GeoKitDecodedCoordinate`: decoded navigation start and
/// destination coordinates.
fn nav_cache(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let entries = match &tree {
        TreeValue::List(l) => l.as_slice(),
        other => std::slice::from_ref(other),
    };
    let mut out = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let mut rec = ctx.record(EventKind::NavDestination, &format!("$[{i}]"));
        if let Some(TreeValue::Int(ms)) = e.get("requested_at") {
            rec = rec.ts("start", *ms);
        }
        if let Some(start) = e.get("start") {
            rec = rec
                .set_opt("start_lat", start.get("lat").cloned())
                .set_opt("start_lon", start.get("lon").cloned());
        }
        if let Some(dest) = e.get("destination") {
            rec = rec
                .set_opt("end_lat", dest.get("lat").cloned())
                .set_opt("end_lon", dest.get("lon").cloned());
        }
        out.push(rec);
    }
    Ok(out)
}

/// `WebRequestManagerCache/*`: gzip JSON bodies cached from the backend —
/// lock/unlock log, door status with mileage, historical coordinates.
fn web_cache(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_gzip_json(ctx.bytes)
        .or_else(|_| read_json(ctx.bytes))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    match tree.get("kind").and_then(TreeValue::as_str) {
        Some("lock_log") => {
            for (i, e) in tree
                .get("entries")
                .and_then(TreeValue::as_list)
                .unwrap_or(&[])
                .iter()
                .enumerate()
            {
                let Some(TreeValue::Int(at)) = e.get("at") else {
                    continue;
                };
                out.push(
                    ctx.record(EventKind::LockState, &format!("$.entries[{i}]"))
                        .ts("start", *at)
                        .set_opt("doors_locked", e.get("locked").cloned()),
                );
            }
        }
        Some("vehicle_status") => {
            let mut rec = ctx
                .record(EventKind::StatusSnapshot, "$")
                .set_opt("doors_locked", tree.get("doors_locked").cloned())
                .set_opt("doors", tree.get("doors").cloned())
                .set_opt("mileage_km", tree.get("mileage_km").cloned())
                .set_opt("nickname", tree.get("nickname").cloned());
            if let Some(TreeValue::Int(at)) = tree.get("at") {
                rec = rec.ts("start", *at);
            }
            out.push(rec);
        }
        Some("historical_coordinates") => {
            for (i, p) in tree
                .get("points")
                .and_then(TreeValue::as_list)
                .unwrap_or(&[])
                .iter()
                .enumerate()
            {
                // Emitted as exact fixes only when each point carries its own
                // timestamp; otherwise the cadence is unknowable.
                let Some(TreeValue::Int(at)) = p.get("at") else {
                    continue;
                };
                out.push(
                    ctx.record(EventKind::LocationFix, &format!("$.points[{i}]"))
                        .ts("start", *at)
                        .set_opt("lat", p.get("lat").cloned())
                        .set_opt("lon", p.get("lon").cloned()),
                );
            }
        }
        _ => return Err("unrecognized web-request cache body".into()),
    }
    Ok(out)
}
