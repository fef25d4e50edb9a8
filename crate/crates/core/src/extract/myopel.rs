//! myOpel: user and vehicle profile databases, log files carrying the email
//! address and VIN, and (iOS) a preferences plist that also holds the
//! smartphone's own coordinates. The route-recording tables existed but were
//! empty on the tested vehicle.

use crate::event::{Epoch, EventKind};
use crate::formats::{read_plist, read_xml_prefs, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let name = ctx.file_name().to_string();
    match (ctx.platform, name.as_str()) {
        (Platform::Ios, _) if ctx.rel_path.starts_with("Documents/LogDirectory/") => log_file(ctx),
        (Platform::Ios, "UserProfileModel.sqlite") => user_profile_ios(ctx),
        (Platform::Ios, "BTAModel.sqlite") => bta_model(ctx),
        (Platform::Ios, "BOUserMyMarqueModel.sqlite") => marque_ios(ctx),
        (Platform::Ios, "com.psa.mym.myopel.plist") => preferences_plist(ctx),
        (Platform::Android, _) if ctx.rel_path.starts_with("cache/logs/") => log_file(ctx),
        (Platform::Android, "BOUserMymarque.db") => marque_android(ctx),
        (Platform::Android, "UserProfile.db") => user_profile_android(ctx),
        (Platform::Android, "com.psa.mym.myopel_preferences.xml") => preferences_xml(ctx),
        (
            Platform::Android,
            "CarProtocolStrategy.db"
            | "LocalisationSmartphone.db"
            | "SmartAppsV1.db"
            | "SmartAppsV2.db",
        ) => coordinate_schema(ctx),
        _ => Err(format!("no myOpel handler for {}", ctx.rel_path)),
    }
}

/// Plain-text log files: `user=` and `vin=` lines.
fn log_file(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let mut out = Vec::new();
    for (key, value) in log_pairs(ctx.bytes) {
        match key.as_str() {
            "user" | "email" => {
                out.push(
                    ctx.record(EventKind::Identity, "log line")
                        .set("email", text_tv(value)),
                );
            }
            "vin" => {
                out.push(
                    ctx.record(EventKind::VehicleInfo, "log line")
                        .set("vin", text_tv(value)),
                );
            }
            _ => {}
        }
    }
    if out.is_empty() {
        return Err("log file carries no account or vehicle lines".into());
    }
    Ok(out)
}

fn user_profile_ios(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZUSERPROFILE") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::Identity, &row.locator())
                    .set_opt("name", row.text("ZNAME", 1).map(TreeValue::Text))
                    .set_opt("email", row.text("ZEMAIL", 2).map(TreeValue::Text))
                    .set_opt("phone", row.text("ZPHONE", 3).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "ZVEHICLE") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("ZVIN", 1).map(TreeValue::Text))
                    .set_opt("model", row.text("ZMODEL", 2).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "ZDEALER") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("dealer_name", row.text("ZNAME", 1).map(TreeValue::Text))
                    .set_opt("dealer_city", row.text("ZCITY", 2).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

/// Route recording exists in the schema; populated rows become trips.
fn bta_model(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZROUTE") {
        if rows.is_empty() {
            out.extend(schema_present(ctx, &set, "ZROUTE"));
        }
        for row in rows.iter() {
            let Some((start, re)) = row.timestamp("ZSTARTTIME", 1, Epoch::AppleS) else {
                continue;
            };
            let mut rec = ctx
                .record(EventKind::Trip, &row.locator())
                .ts("start", start)
                .reinferred_note(re)
                .set_opt("start_lat", row.f64("ZSTARTLAT", 3).map(real_tv))
                .set_opt("start_lon", row.f64("ZSTARTLON", 4).map(real_tv))
                .set_opt("end_lat", row.f64("ZENDLAT", 5).map(real_tv))
                .set_opt("end_lon", row.f64("ZENDLON", 6).map(real_tv));
            if let Some((end, _)) = row.timestamp("ZENDTIME", 2, Epoch::AppleS) {
                rec = rec.ts("end", end);
            }
            out.push(rec);
        }
    }
    Ok(out)
}

fn marque_ios(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZACCOUNT") {
        for row in rows.iter() {
            if let Some(email) = row.text("ZEMAIL", 1) {
                out.push(
                    ctx.record(EventKind::Identity, &row.locator())
                        .set("email", text_tv(email)),
                );
            }
            let mut rec = ctx
                .record(EventKind::VehicleInfo, &row.locator())
                .set_opt("vin", row.text("ZVIN", 3).map(TreeValue::Text));
            if let Some((until, _)) = row.timestamp("ZWARRANTYEND", 2, Epoch::AppleS) {
                rec = rec.ts("warranty_until", until);
            }
            out.push(rec);
        }
    }
    Ok(out)
}

fn marque_android(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "account") {
        for row in rows.iter() {
            if let Some(email) = row.text("email", 1) {
                out.push(
                    ctx.record(EventKind::Identity, &row.locator())
                        .set("email", text_tv(email)),
                );
            }
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("vin", 3).map(TreeValue::Text))
                    .set_opt(
                        "warranty_until",
                        row.text("warranty_until", 2).map(TreeValue::Text),
                    ),
            );
        }
    }
    Ok(out)
}

fn user_profile_android(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "user_profile") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::Identity, &row.locator())
                    .set_opt("name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("email", row.text("email", 2).map(TreeValue::Text))
                    .set_opt("phone", row.text("phone", 3).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "vehicle") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("vin", 1).map(TreeValue::Text))
                    .set_opt("model", row.text("model", 2).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "dealer") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("dealer_name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("dealer_city", row.text("city", 2).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

/// Databases holding empty coordinate tables, presumably for newer vehicles.
fn coordinate_schema(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    for name in set.tables.keys() {
        out.extend(schema_present(ctx, &set, name));
    }
    if out.is_empty() {
        return Err("no tables decoded".into());
    }
    Ok(out)
}

/// iOS preferences: user info, VIN, and the smartphone's own position.
fn preferences_plist(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_plist(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    if let Some(TreeValue::Text(email)) = tree.get("email") {
        out.push(
            ctx.record(EventKind::Identity, "email")
                .set("email", text_tv(email.clone())),
        );
    }
    if let Some(TreeValue::Text(vin)) = tree.get("vin") {
        out.push(
            ctx.record(EventKind::VehicleInfo, "vin")
                .set("vin", text_tv(vin.clone())),
        );
    }
    if let Some(loc) = tree.get("phone_location") {
        let mut rec = ctx
            .record(EventKind::LocationFix, "phone_location")
            .set_opt("lat", loc.get("lat").cloned())
            .set_opt("lon", loc.get("lon").cloned())
            .set("subject", text_tv("phone"));
        if let Some(TreeValue::Timestamp(at)) = loc.get("at") {
            rec = rec.ts("start", *at);
        }
        out.push(rec);
    }
    Ok(out)
}

fn preferences_xml(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    if let Some(email) = map.get("email").and_then(TreeValue::as_str) {
        out.push(
            ctx.record(EventKind::Identity, "preferences")
                .set("email", text_tv(email)),
        );
    }
    if let Some(vin) = map.get("vin").and_then(TreeValue::as_str) {
        out.push(
            ctx.record(EventKind::VehicleInfo, "preferences")
                .set("vin", text_tv(vin)),
        );
    }
    Ok(out)
}
