//! FordPass: Core Data stores and the main preferences plist on iOS
//! (refuelings with gas-station coordinates, last position, parking photo,
//! navigation destinations); vehicle databases, account preferences and PIN
//! material on Android. Trip and position tables existed but were empty on
//! the tested vehicle generation and are recorded as schema-only.

use crate::event::EventKind;
use crate::formats::{decode_base64_image, read_json, read_plist, read_xml_prefs, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Ios, "CoreData.sqlite") => core_data(ctx),
        (Platform::Ios, "CVCoreDataModel.sqlite") => cv_modules(ctx),
        (Platform::Ios, "snapshot") => copilot_snapshot(ctx),
        (Platform::Ios, name) if name.starts_with("DTX_") => dtx_email(ctx),
        (Platform::Ios, "com.ford.fordpasseu.plist") => preferences_plist(ctx),
        (Platform::Android, "NGSDN_DATABASE") => ngsdn(ctx),
        (Platform::Android, "VIN_DETAILS_LOOKUP") => vin_details(ctx),
        (Platform::Android, "com.ford.fordpasseu_preferences.xml") => account_prefs(ctx),
        (Platform::Android, "encryptedValues.xml") => token_prefs(ctx),
        (Platform::Android, "pinValues.xml") => pin_prefs(ctx),
        _ => Err(format!("no FordPass handler for {}", ctx.rel_path)),
    }
}

fn core_data(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZVEHICLE") {
        if rows.is_empty() {
            out.extend(schema_present(ctx, &set, "ZVEHICLE"));
        }
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("model", row.text("ZMODEL", 1).map(TreeValue::Text))
                    .set_opt("nickname", row.text("ZNICKNAME", 2).map(TreeValue::Text))
                    .set_opt("vin", row.text("ZVIN", 3).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

fn cv_modules(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZMODULE") {
        if rows.is_empty() {
            out.extend(schema_present(ctx, &set, "ZMODULE"));
        }
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("module_name", row.text("ZNAME", 1).map(TreeValue::Text))
                    .set_opt("module_serial", row.text("ZSERIAL", 2).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

/// `Documents/DigitalCoPilot/dataPoints/<VIN>/snapshot`: fuel level.
fn copilot_snapshot(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut rec = ctx
        .record(EventKind::StatusSnapshot, "$")
        .set_opt(
            "fuel_level_percent",
            tree.get("fuel_level_percent").cloned(),
        )
        .set_opt("vin", tree.get("vin").cloned());
    // The VIN also names the parent directory.
    if !rec.fields.contains_key("vin") {
        if let Some(dir_vin) = ctx.rel_path.split('/').rev().nth(1) {
            rec = rec.set("vin", text_tv(dir_vin));
        }
    }
    if let Some(TreeValue::Int(ms)) = tree.get("timestamp") {
        rec = rec.ts("start", *ms);
    }
    Ok(vec![rec])
}

fn dtx_email(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "user_session") {
        for row in rows.iter() {
            if let Some(email) = row.text("email", 1) {
                out.push(
                    ctx.record(EventKind::Identity, &row.locator())
                        .set("email", text_tv(email)),
                );
            }
        }
    }
    Ok(out)
}

/// The iOS preferences plist is the densest FordPass artifact.
fn preferences_plist(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_plist(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();

    for (i, r) in tree
        .get("refuelings")
        .and_then(TreeValue::as_list)
        .unwrap_or(&[])
        .iter()
        .enumerate()
    {
        let Some(TreeValue::Timestamp(at)) = r.get("date") else {
            continue;
        };
        out.push(
            ctx.record(EventKind::Refuel, &format!("refuelings[{i}]"))
                .ts("start", *at)
                .set_opt("lat", r.get("lat").cloned())
                .set_opt("lon", r.get("lon").cloned())
                .set_opt("fuel_liters", r.get("liters").cloned()),
        );
    }

    if let Some(pos) = tree.get("lastVehiclePosition") {
        let mut rec = ctx
            .record(EventKind::Parking, "lastVehiclePosition")
            .set_opt("lat", pos.get("lat").cloned())
            .set_opt("lon", pos.get("lon").cloned())
            .set_opt("address", pos.get("address").cloned());
        if let Some(TreeValue::Timestamp(at)) = pos.get("date") {
            rec = rec.ts("start", *at);
        }
        if let Some(TreeValue::Text(b64)) = tree.get("parkingPhotoBase64") {
            if let Ok(img) = decode_base64_image(b64) {
                rec = rec
                    .set(
                        "parking_photo_format",
                        text_tv(format!("{:?}", img.format).to_lowercase()),
                    )
                    .set(
                        "parking_photo_bytes",
                        TreeValue::Int(img.bytes.len() as i64),
                    );
            }
        }
        out.push(rec);
    }

    for (i, d) in tree
        .get("navigationDestinations")
        .and_then(TreeValue::as_list)
        .unwrap_or(&[])
        .iter()
        .enumerate()
    {
        if let TreeValue::Text(dest) = d {
            out.push(
                ctx.record(
                    EventKind::NavDestination,
                    &format!("navigationDestinations[{i}]"),
                )
                .set("destination", text_tv(dest.clone())),
            );
        }
    }

    if let Some(TreeValue::Text(user_id)) = tree.get("userId") {
        out.push(
            ctx.record(EventKind::Identity, "userId")
                .set("user_id", text_tv(user_id.clone())),
        );
    }

    if let Some(device) = tree.get("deviceMetadata") {
        out.push(
            ctx.record(EventKind::StatusSnapshot, "deviceMetadata")
                .set_opt("device_model", device.get("model").cloned())
                .set_opt("device_os", device.get("os").cloned()),
        );
    }

    Ok(out)
}

fn ngsdn(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "vehicles") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vehicle_name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("vin", row.text("vin", 2).map(TreeValue::Text))
                    .set_opt(
                        "year_of_manufacture",
                        row.i64("year", 3).map(TreeValue::Int),
                    )
                    .set_opt("nickname", row.text("nickname", 4).map(TreeValue::Text)),
            );
        }
    }
    // Trip and position capability observed only as empty schemas.
    for table in ["journeys", "vehicle_positions"] {
        if let Some(rows) = rows(&set, table) {
            if rows.is_empty() {
                out.extend(schema_present(ctx, &set, table));
            }
        }
    }
    Ok(out)
}

fn vin_details(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "vin_details") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("vin", 1).map(TreeValue::Text))
                    .set_opt("engine", row.text("engine", 2).map(TreeValue::Text))
                    .set_opt(
                        "transmission",
                        row.text("transmission", 3).map(TreeValue::Text),
                    )
                    .set_opt(
                        "warranty_until",
                        row.text("warranty_until", 4).map(TreeValue::Text),
                    )
                    .set_opt(
                        "emission_class",
                        row.text("emission_class", 5).map(TreeValue::Text),
                    ),
            );
        }
    }
    Ok(out)
}

fn account_prefs(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    let email = map.get("email").and_then(TreeValue::as_str);
    let name = map.get("name").and_then(TreeValue::as_str);
    if email.is_some() || name.is_some() {
        out.push(
            ctx.record(EventKind::Identity, "preferences")
                .set_opt("email", email.map(text_tv))
                .set_opt("name", name.map(text_tv)),
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

/// Token and PIN stores: presence is the finding, values stay on the device.
fn token_prefs(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::StatusSnapshot, "encryptedValues")
        .set(
            "has_access_token",
            TreeValue::Bool(map.contains_key("access_token")),
        )])
}

fn pin_prefs(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::StatusSnapshot, "pinValues")
        .set(
            "has_pin",
            TreeValue::Bool(map.contains_key("pin_salt") && map.contains_key("pin_hash")),
        )])
}
