//! DriveMii: the paired VIN in preferences, per-minute recuperation records
//! (iOS), and user-entered navigation destinations in the MapSettings TLV
//! container. The location/itinerary/track databases are encrypted and are
//! handled by the encrypted-artifact path before reaching this module.

use crate::event::{Epoch, EventKind};
use crate::formats::{read_plist, read_tlv_strings, read_xml_prefs};
use crate::locator::Platform;

use super::helpers::*;
use super::{ArtifactCtx, RawRecord};

pub fn extract(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let name = ctx.file_name();
    match (ctx.platform, name) {
        (Platform::Ios, "com.seat.connectedcar.drivemii.plist") => vin_plist(ctx),
        (Platform::Ios, "ElectricalService.sql") => recuperation(ctx),
        (Platform::Android, "App4EntryPrefs.xml") => vin_prefs(ctx),
        _ if name.ends_with("MapSettings_.tlv") => map_settings(ctx),
        _ => Err(format!("no DriveMii handler for {}", ctx.rel_path)),
    }
}

fn vin_plist(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let tree = read_plist(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::VehicleInfo, "vin")
        .set_opt("vin", tree.get("vin").cloned())])
}

fn vin_prefs(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let map = read_xml_prefs(ctx.bytes).map_err(|e| e.to_string())?;
    Ok(vec![ctx
        .record(EventKind::VehicleInfo, "preferences")
        .set_opt("vin", map.get("vin").cloned())])
}

/// `ZRECUPERATIONHISTORY`: one record per minute while driving.
fn recuperation(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "ZRECUPERATIONHISTORY") {
        for row in rows.iter() {
            let Some((at, re)) = row.timestamp("ZTIMESTAMP", 1, Epoch::AppleS) else {
                continue;
            };
            out.push(
                ctx.record(EventKind::Recuperation, &row.locator())
                    .ts("start", at)
                    .reinferred_note(re)
                    .set_opt(
                        "recuperated_kwh",
                        row.f64("ZRECUPERATEDENERGY", 2).map(real_tv),
                    ),
            );
        }
    }
    Ok(out)
}

/// Navigation destinations: plain text, in order, without timestamps.
fn map_settings(ctx: &ArtifactCtx) -> Result<Vec<RawRecord>, String> {
    let mut out = Vec::new();
    for (i, dest) in read_tlv_strings(ctx.bytes).into_iter().enumerate() {
        out.push(
            ctx.record(EventKind::NavDestination, &format!("string run {i}"))
                .set("destination", text_tv(dest)),
        );
    }
    Ok(out)
}
