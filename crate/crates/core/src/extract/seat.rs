//! Seat Connect: one preferences plist on iOS (last login, VIN, phone
//! metadata, user details); autofill plus the Mod2 app database on Android.

use crate::event::EventKind;
use crate::formats::{read_plist, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Ios, "com.seat.connectedcar.mod3connectapp.plist") => preferences(ctx),
        (Platform::Android, "Web Data") => autofill_records(ctx, &[("email", "email")]),
        (Platform::Android, "ModAppDatabase.db") => mod_app_db(ctx),
        _ => Err(format!("no Seat Connect handler for {}", ctx.rel_path)),
    }
}

fn preferences(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_plist(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();

    if let Some(TreeValue::Timestamp(at)) = tree.get("last_login") {
        out.push(
            ctx.record(EventKind::StatusSnapshot, "last_login")
                .ts("start", *at)
                .ts("last_login", *at),
        );
    }
    if let Some(TreeValue::Text(vin)) = tree.get("vin") {
        out.push(
            ctx.record(EventKind::VehicleInfo, "vin")
                .set("vin", text_tv(vin.clone())),
        );
    }
    if let Some(user) = tree.get("user") {
        out.push(
            ctx.record(EventKind::Identity, "user")
                .set_opt("phone", user.get("phone").cloned())
                .set_opt("date_of_birth", user.get("date_of_birth").cloned())
                .set_opt("email", user.get("email").cloned()),
        );
    }
    if let Some(device) = tree.get("device") {
        out.push(
            ctx.record(EventKind::StatusSnapshot, "device")
                .set_opt("device_model", device.get("model").cloned())
                .set_opt("device_os", device.get("os").cloned()),
        );
    }
    Ok(out)
}

fn mod_app_db(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "PersistentUser") {
        for row in rows.iter() {
            if let Some(email) = row.text("email", 1) {
                out.push(
                    ctx.record(EventKind::Identity, &row.locator())
                        .set("email", text_tv(email)),
                );
            }
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("vin", 2).map(TreeValue::Text))
                    .set_opt("nickname", row.text("nickname", 3).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "PersistentVehicleMetadata") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vehicle_name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("vin", row.text("vin", 2).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}
