//! OnStar Europe (Android only on disk): gzip-JSON backend responses in the
//! Gemini cache and the `mylink` database with diagnostics. Parking and
//! route tables were empty on the tested vehicle.

use crate::event::{Epoch, EventKind};
use crate::formats::{read_gzip_json, TreeValue};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    match (ctx.platform, ctx.file_name()) {
        (Platform::Android, "mylink") => mylink(ctx),
        (Platform::Android, _) if ctx.rel_path.starts_with("cache/GeminiCache/") => gemini(ctx),
        _ => Err(format!("no OnStar handler for {}", ctx.rel_path)),
    }
}

fn gemini(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_gzip_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    if tree.get("vin").is_some() || tree.get("model").is_some() {
        out.push(
            ctx.record(EventKind::VehicleInfo, "$")
                .set_opt("vin", tree.get("vin").cloned())
                .set_opt("model", tree.get("model").cloned()),
        );
    }
    if let Some(TreeValue::Text(account)) = tree.get("account_number") {
        out.push(
            ctx.record(EventKind::Identity, "$.account_number")
                .set("user_id", text_tv(account.clone())),
        );
    }
    if out.is_empty() {
        return Err("cache entry without vehicle or account fields".into());
    }
    Ok(out)
}

fn mylink(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "vehicles") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("model", row.text("model", 1).map(TreeValue::Text))
                    .set_opt("vin", row.text("vin", 2).map(TreeValue::Text)),
            );
        }
    }
    if let Some(rows) = rows(&set, "vehicle_diagnostics") {
        for row in rows.iter() {
            let mut rec = ctx
                .record(EventKind::StatusSnapshot, &row.locator())
                .set_opt(
                    "tire_pressure_bar",
                    row.f64("tire_pressure_bar", 2).map(real_tv),
                )
                .set_opt("mileage_km", row.f64("mileage_km", 3).map(real_tv));
            if let Some((at, re)) = row.timestamp("at", 1, Epoch::UnixMs) {
                rec = rec.ts("start", at).reinferred_note(re);
            }
            out.push(rec);
        }
    }
    for table in ["parking_positions", "routes"] {
        if let Some(rows) = rows(&set, table) {
            if rows.is_empty() {
                out.extend(schema_present(ctx, &set, table));
            }
        }
    }
    Ok(out)
}
