//! my BMW: everything lives in the Flutter state file `.hydrated_bloc.json`
//! on Android. The iOS build keeps no relevant data on disk.

use crate::event::EventKind;
use crate::formats::{read_json, TreeValue};

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    if ctx.file_name() != ".hydrated_bloc.json" {
        return Err(format!("no my BMW handler for {}", ctx.rel_path));
    }
    let tree = read_json(ctx.bytes).map_err(|e| e.to_string())?;
    let mut out = Vec::new();

    if let Some(vehicle) = tree.get("vehicle") {
        out.push(
            ctx.record(EventKind::VehicleInfo, "$.vehicle")
                .set_opt("vin", vehicle.get("vin").cloned())
                .set_opt(
                    "year_of_manufacture",
                    vehicle.get("year_of_manufacture").cloned(),
                )
                .set_opt("features", vehicle.get("features").cloned()),
        );
    }

    if let Some(status) = tree.get("vehicle_status") {
        let at = match status.get("timestamp") {
            Some(TreeValue::Int(ms)) => Some(*ms),
            _ => None,
        };
        let vin = tree.get_path("vehicle.vin").cloned();
        if status.get("lat").is_some() && status.get("lon").is_some() {
            let mut rec = ctx
                .record(EventKind::LocationFix, "$.vehicle_status")
                .set_opt("lat", status.get("lat").cloned())
                .set_opt("lon", status.get("lon").cloned())
                .set_opt("vin", vin.clone());
            if let Some(at) = at {
                rec = rec.ts("start", at);
            }
            out.push(rec);
        }
        let mut rec = ctx
            .record(EventKind::StatusSnapshot, "$.vehicle_status")
            .set_opt("doors_locked", status.get("doors_locked").cloned())
            .set_opt("doors", status.get("doors").cloned())
            .set_opt(
                "upcoming_services",
                status.get("upcoming_services").cloned(),
            )
            .set_opt("vin", vin)
            .set_opt("mileage_km", status.get("mileage_km").cloned());
        if let Some(at) = at {
            rec = rec.ts("start", at);
        }
        out.push(rec);
    }

    if out.is_empty() {
        out.push(
            ctx.record(EventKind::SchemaPresent, "$")
                .set("table", text_tv("hydrated_bloc")),
        );
    }
    Ok(out)
}
