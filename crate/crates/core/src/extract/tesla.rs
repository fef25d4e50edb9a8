//! Tesla: cached backend responses on both platforms. iOS keeps the static
//! vehicle data in the CFURL cache database and dynamic state (last location,
//! interior temperature, charge) in `fsCachedData`; Android caches the same
//! API bodies in `http-cache`, including speed and gear while driving, plus
//! the account email in the WebView autofill store.

use crate::event::{resolve_timestamp, Epoch, EventKind};
use crate::formats::{read_json, TreeValue, Value};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Ios, "Cache.db") => cfurl_cache(ctx),
        (Platform::Ios, _) if ctx.rel_path.contains("fsCachedData") => cached_body(ctx),
        (Platform::Android, "Web Data") => autofill_records(ctx, &[("email", "email")]),
        (Platform::Android, _) if ctx.rel_path.starts_with("cache/http-cache/") => cached_body(ctx),
        _ => Err(format!("no Tesla handler for {}", ctx.rel_path)),
    }
}

/// `cfurl_cache_receiver_data` rows carry raw response bodies.
fn cfurl_cache(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "cfurl_cache_receiver_data") {
        for row in rows.iter() {
            let body = match row.value("receiver_data", 2) {
                Some(Value::Bytes(b)) => b.clone(),
                Some(Value::Text(t)) => t.clone().into_bytes(),
                _ => continue,
            };
            let Ok(tree) = read_json(&body) else { continue };
            out.extend(api_body_records(ctx, &tree, &row.locator()));
        }
    }
    Ok(out)
}

fn cached_body(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let records = api_body_records(ctx, &tree, "$");
    if records.is_empty() {
        return Err("cache body holds no recognized API object".into());
    }
    Ok(records)
}

/// Route one cached API body to events by its content.
fn api_body_records(ctx: &ArtifactCtx, tree: &TreeValue, locator: &str) -> Vec<RawRecord> {
    let response = tree.get("response").unwrap_or(tree);
    let mut out = Vec::new();
    let vin = response.get("vin").cloned();

    if let Some(drive) = response.get("drive_state") {
        let at = drive
            .get("gps_as_of")
            .and_then(TreeValue::as_i64)
            .and_then(|s| resolve_timestamp(&Value::Integer(s), Epoch::UnixS).ok())
            .map(|r| r.ms)
            .or_else(|| drive.get("timestamp").and_then(TreeValue::as_i64));
        let speed_mph = drive.get("speed").and_then(TreeValue::as_f64);
        let gear = drive
            .get("shift_state")
            .and_then(TreeValue::as_str)
            .map(str::to_string);

        let mut fix = ctx
            .record(EventKind::LocationFix, &format!("{locator}.drive_state"))
            .set_opt("lat", drive.get("latitude").cloned())
            .set_opt("lon", drive.get("longitude").cloned())
            .set_opt("vin", vin.clone())
            .set_opt("gear", gear.clone().map(text_tv));
        if let Some(mph) = speed_mph {
            fix = fix.set("speed_mph", real_tv(mph));
        }
        if let Some(at) = at {
            fix = fix.ts("start", at);
        }
        out.push(fix);

        if gear.as_deref() == Some("P") {
            let mut park = ctx
                .record(EventKind::Parking, &format!("{locator}.drive_state"))
                .set_opt("lat", drive.get("latitude").cloned())
                .set_opt("lon", drive.get("longitude").cloned())
                .set_opt("vin", vin.clone())
                .set("gear", text_tv("P"));
            if let Some(at) = at {
                park = park.ts("start", at);
            }
            out.push(park);
        }
    }

    if let Some(climate) = response.get("climate_state") {
        let mut rec = ctx
            .record(
                EventKind::StatusSnapshot,
                &format!("{locator}.climate_state"),
            )
            .set_opt("interior_temp_c", climate.get("inside_temp").cloned())
            .set_opt("vin", vin.clone());
        if let Some(at) = climate.get("timestamp").and_then(TreeValue::as_i64) {
            rec = rec.ts("start", at);
        }
        out.push(rec);
    }

    if let Some(charge) = response.get("charge_state") {
        let mut rec = ctx
            .record(EventKind::Refuel, &format!("{locator}.charge_state"))
            .set_opt("charge_percent", charge.get("battery_level").cloned())
            .set_opt("vin", vin.clone());
        if let Some(at) = charge.get("timestamp").and_then(TreeValue::as_i64) {
            rec = rec.ts("start", at);
        }
        out.push(rec);
    }

    if let Some(vstate) = response.get("vehicle_state") {
        let mut rec = ctx
            .record(
                EventKind::StatusSnapshot,
                &format!("{locator}.vehicle_state"),
            )
            .set_opt(
                "mileage_miles",
                vstate
                    .get("odometer")
                    .and_then(TreeValue::as_f64)
                    .map(real_tv),
            )
            .set_opt("vin", vin.clone());
        if let Some(at) = vstate.get("timestamp").and_then(TreeValue::as_i64) {
            rec = rec.ts("start", at);
        }
        out.push(rec);
    }

    if let Some(config) = response.get("vehicle_config") {
        out.push(
            ctx.record(EventKind::VehicleInfo, &format!("{locator}.vehicle_config"))
                .set_opt("car_type", config.get("car_type").cloned())
                .set_opt("trim_badging", config.get("trim_badging").cloned())
                .set_opt("vehicle_name", response.get("display_name").cloned())
                .set_opt("vin", vin.clone()),
        );
    } else if vin.is_some() && response.get("drive_state").is_none() {
        // Static vehicle record (vehicle list responses).
        out.push(
            ctx.record(EventKind::VehicleInfo, locator)
                .set_opt("vehicle_name", response.get("display_name").cloned())
                .set_opt("vin", vin.clone()),
        );
    }

    let email = response.get("email").cloned();
    let name = response.get("full_name").cloned();
    let user_id = match response.get("user_id") {
        Some(TreeValue::Int(i)) => Some(text_tv(i.to_string())),
        Some(TreeValue::Text(t)) => Some(text_tv(t.clone())),
        _ => None,
    };
    if email.is_some() || name.is_some() || user_id.is_some() {
        out.push(
            ctx.record(EventKind::Identity, &format!("{locator}.account"))
                .set_opt("email", email)
                .set_opt("name", name)
                .set_opt("user_id", user_id),
        );
    }

    out
}
