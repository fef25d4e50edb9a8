//! We Connect Go: `avacar.db` is the main store on both platforms — static
//! vehicle data, fuel levels, refuelings and trips with coordinates,
//! acceleration extremes, and parking positions. The iOS build additionally
//! leaves the parking photo and the DataPlug adapter identifiers behind,
//! which is all that survives a logout.

use crate::event::{Epoch, EventKind};
use crate::formats::{sniff_image, TreeValue};

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let name = ctx.file_name().to_string();
    if name == "avacar.db" {
        return avacar(ctx);
    }
    if name.starts_with("VW_DataPlug_") {
        return dataplug(ctx);
    }
    if ctx.rel_path.contains("_EXTERNAL_DATA") {
        return parking_photo(ctx);
    }
    Err(format!("no We Connect Go handler for {}", ctx.rel_path))
}

fn avacar(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();

    // The store belongs to one paired vehicle; its VIN is carried onto the
    // dated records of the same database.
    let store_vin: Option<String> =
        rows(&set, "vehicle").and_then(|r| r.iter().next().and_then(|row| row.text("vin", 1)));
    let vin_tv = store_vin.clone().map(TreeValue::Text);

    if let Some(rows) = rows(&set, "vehicle") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("vin", row.text("vin", 1).map(TreeValue::Text))
                    .set_opt("model_code", row.text("model_code", 2).map(TreeValue::Text))
                    .set_opt("engine", row.text("engine", 3).map(TreeValue::Text))
                    .set_opt(
                        "transmission",
                        row.text("transmission", 4).map(TreeValue::Text),
                    )
                    .set_opt(
                        "avg_consumption_l_100km",
                        row.f64("avg_consumption_l_100km", 5).map(real_tv),
                    ),
            );
        }
    }

    if let Some(rows) = rows(&set, "fuel_levels") {
        for row in rows.iter() {
            let Some((at, re)) = row.timestamp("at", 1, Epoch::UnixMs) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::StatusSnapshot, &row.locator())
                    .ts("start", at)
                    .reinferred_note(re)
                    .set_opt(
                        "fuel_level_percent",
                        row.f64("level_percent", 2).map(real_tv),
                    )
                    .set_opt("vin", vin_tv.clone()),
            );
        }
    }

    if let Some(rows) = rows(&set, "refuelings") {
        for row in rows.iter() {
            let Some((at, re)) = row.timestamp("at", 1, Epoch::UnixMs) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Refuel, &row.locator())
                    .ts("start", at)
                    .reinferred_note(re)
                    .set_opt("lat", row.f64("lat", 2).map(real_tv))
                    .set_opt("lon", row.f64("lon", 3).map(real_tv))
                    .set_opt("fuel_liters", row.f64("liters", 4).map(real_tv))
                    .set_opt("price", row.f64("price", 5).map(real_tv))
                    .set_opt("vin", vin_tv.clone()),
            );
        }
    }

    if let Some(rows) = rows(&set, "trips") {
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
                .set_opt("start_lat", row.f64("start_lat", 5).map(real_tv))
                .set_opt("start_lon", row.f64("start_lon", 6).map(real_tv))
                .set_opt("end_lat", row.f64("end_lat", 7).map(real_tv))
                .set_opt("end_lon", row.f64("end_lon", 8).map(real_tv))
                .set_opt("distance_km", row.f64("distance_km", 9).map(real_tv))
                .set_opt(
                    "max_acceleration_ms2",
                    row.f64("max_acceleration_ms2", 10).map(real_tv),
                )
                .set_opt(
                    "max_deceleration_ms2",
                    row.f64("max_deceleration_ms2", 11).map(real_tv),
                )
                .set_opt(
                    "velocity_at_max_accel_kmh",
                    row.f64("velocity_at_max_accel_kmh", 12).map(real_tv),
                )
                .set_opt("vin", vin_tv.clone());
            if let Some((end, _)) = row.timestamp("end_time", 2, Epoch::UnixMs) {
                rec = rec.ts("end", end);
            }
            out.push(rec);
        }
    }

    if let Some(rows) = rows(&set, "parking_positions") {
        for row in rows.iter() {
            let Some((at, re)) = row.timestamp("at", 1, Epoch::UnixMs) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Parking, &row.locator())
                    .ts("start", at)
                    .reinferred_note(re)
                    .set_opt("lat", row.f64("lat", 2).map(real_tv))
                    .set_opt("lon", row.f64("lon", 3).map(real_tv))
                    .set_opt("vin", vin_tv.clone()),
            );
        }
    }

    Ok(out)
}

/// DataPlug adapter names and identification numbers.
fn dataplug(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "adapters") {
        for row in rows.iter() {
            out.push(
                ctx.record(EventKind::VehicleInfo, &row.locator())
                    .set_opt("adapter_name", row.text("name", 1).map(TreeValue::Text))
                    .set_opt("adapter_serial", row.text("serial", 2).map(TreeValue::Text)),
            );
        }
    }
    Ok(out)
}

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
