//! Render a scenario into SAR interchange containers, one per manufacturer,
//! mirroring how much each manufacturer actually returned.

use std::path::Path;

use serde_json::json;

use crate::event::IdentityRecord;
use crate::sar::{Manufacturer, Presence, SarCategory};

use super::scenario::{Action, Scenario};
use super::writers::{write_file, RenderError};

/// Tesla's widest observed table: 229 signal columns at up to 10 Hz.
pub const TESLA_TELEMETRY_COLUMNS: usize = 229;
const TELEMETRY_MARGIN_MS: i64 = 2_000;

struct CategoryPlan {
    category: SarCategory,
    presence: Presence,
    file: Option<(&'static str, Vec<u8>)>,
    telemetry: bool,
}

/// Render the SAR container for one manufacturer. Returns the container path.
pub fn render_sar(
    scenario: &Scenario,
    manufacturer: Manufacturer,
    out_dir: &Path,
) -> Result<std::path::PathBuf, RenderError> {
    let container = out_dir.join(format!("sar_{}", manufacturer.as_str()));
    std::fs::create_dir_all(&container)?;

    let plans = category_plans(scenario, manufacturer);
    let mut manifest_categories = Vec::new();
    for plan in &plans {
        let mut entry = json!({
            "category": category_key(plan.category),
            "presence": presence_key(plan.presence),
        });
        if let Some((name, bytes)) = &plan.file {
            write_file(&container.join(name), bytes)?;
            entry["file"] = json!(name);
        }
        if plan.telemetry {
            entry["telemetry"] = json!(true);
        }
        manifest_categories.push(entry);
    }

    let manifest = json!({
        "manufacturer": manufacturer.as_str(),
        "categories": manifest_categories,
    });
    write_file(
        &container.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap().as_bytes(),
    )?;
    Ok(container)
}

fn category_key(c: SarCategory) -> &'static str {
    match c {
        SarCategory::CustomerData => "customer_data",
        SarCategory::VehicleData => "vehicle_data",
        SarCategory::InfotainmentUsage => "infotainment_usage",
        SarCategory::Correspondence => "correspondence",
        SarCategory::OrderHistory => "order_history",
        SarCategory::PositionData => "position_data",
        SarCategory::AdditionalData => "additional_data",
    }
}

fn presence_key(p: Presence) -> &'static str {
    match p {
        Presence::Data => "data",
        Presence::Partial => "partial",
        Presence::Metadata => "metadata",
        Presence::None => "none",
        Presence::Extensive => "extensive",
    }
}

fn customer_json(user: &IdentityRecord, fields: &[&str]) -> Vec<u8> {
    let mut doc = serde_json::Map::new();
    let all = [
        ("name", &user.name),
        ("email", &user.email),
        ("phone", &user.phone),
        ("date_of_birth", &user.date_of_birth),
        ("address", &user.address),
        ("user_id", &user.user_id),
    ];
    for (key, value) in all {
        if fields.contains(&key) {
            if let Some(v) = value {
                doc.insert(key.to_string(), json!(v));
            }
        }
    }
    serde_json::to_string_pretty(&serde_json::Value::Object(doc))
        .unwrap()
        .into_bytes()
}

fn vehicle_json(scenario: &Scenario, model: &str) -> Vec<u8> {
    serde_json::to_string_pretty(&json!([{
        "vin": scenario.vin,
        "model": model,
        "ownership_from": "2019-02-01",
        "ownership_to": null,
    }]))
    .unwrap()
    .into_bytes()
}

fn rfc3339(ms: i64) -> String {
    chrono::DateTime::from_timestamp_millis(ms)
        .unwrap_or_default()
        .to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn category_plans(s: &Scenario, manufacturer: Manufacturer) -> Vec<CategoryPlan> {
    use Manufacturer::*;
    use Presence::*;
    use SarCategory::*;

    let plan = |category, presence, file, telemetry| CategoryPlan {
        category,
        presence,
        file,
        telemetry,
    };
    let full_customer = || {
        customer_json(
            &s.user,
            &[
                "name",
                "email",
                "phone",
                "date_of_birth",
                "address",
                "user_id",
            ],
        )
    };
    let correspondence = || {
        serde_json::to_string_pretty(&json!([
            {"date": "2020-11-20", "channel": "email", "content_included": false},
            {"date": "2020-12-02", "channel": "letter", "content_included": false},
        ]))
        .unwrap()
        .into_bytes()
    };
    let orders = || {
        serde_json::to_string_pretty(&json!([
            {"date": "2019-02-01", "item": "vehicle purchase"},
            {"date": "2020-03-15", "item": "connected services subscription"},
        ]))
        .unwrap()
        .into_bytes()
    };

    match manufacturer {
        Audi => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some(("vehicle_data.json", vehicle_json(s, "Audi A4 B9"))),
                false,
            ),
            plan(
                InfotainmentUsage,
                Data,
                Some(("infotainment_usage.csv", audi_services_csv(s))),
                false,
            ),
            plan(
                Correspondence,
                Metadata,
                Some(("correspondence.json", correspondence())),
                false,
            ),
            plan(
                OrderHistory,
                Partial,
                Some(("order_history.json", orders())),
                false,
            ),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Bmw => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some(("vehicle_data.json", vehicle_json(s, "BMW 1er F20 140i"))),
                false,
            ),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(
                Correspondence,
                Metadata,
                Some(("correspondence.json", correspondence())),
                false,
            ),
            plan(OrderHistory, None, Option::None, false),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Ford => vec![
            // Only the customer name and account email.
            plan(
                CustomerData,
                Data,
                Some((
                    "customer_data.json",
                    customer_json(&s.user, &["name", "email"]),
                )),
                false,
            ),
            plan(VehicleData, None, Option::None, false),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(Correspondence, None, Option::None, false),
            plan(OrderHistory, None, Option::None, false),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Mercedes => vec![
            plan(
                CustomerData,
                Data,
                Some((
                    "customer_data.json",
                    customer_json(&s.user, &["name", "date_of_birth", "email", "address"]),
                )),
                false,
            ),
            plan(VehicleData, None, Option::None, false),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(Correspondence, None, Option::None, false),
            plan(OrderHistory, None, Option::None, false),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Opel => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some(("vehicle_data.json", vehicle_json(s, "Opel Astra K"))),
                false,
            ),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(Correspondence, None, Option::None, false),
            plan(OrderHistory, None, Option::None, false),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Onstar => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Extensive,
                Some(("vehicle_data.json", vehicle_json(s, "Opel Astra K"))),
                false,
            ),
            plan(
                InfotainmentUsage,
                Data,
                Some(("infotainment_usage.csv", onstar_calls_csv(s))),
                false,
            ),
            plan(
                Correspondence,
                Metadata,
                Some(("correspondence.json", correspondence())),
                false,
            ),
            plan(
                OrderHistory,
                Data,
                Some(("order_history.json", orders())),
                false,
            ),
            plan(
                PositionData,
                Partial,
                Some(("position_data.csv", onstar_positions_csv(s))),
                false,
            ),
            plan(
                AdditionalData,
                Extensive,
                Some(("additional_data.csv", onstar_warnings_csv(s))),
                false,
            ),
        ],
        Seat => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some((
                    "vehicle_data.json",
                    vehicle_json(s, "Seat Mii electric Plus"),
                )),
                false,
            ),
            plan(
                InfotainmentUsage,
                Data,
                Some(("infotainment_usage.csv", seat_access_csv(s))),
                false,
            ),
            plan(Correspondence, None, Option::None, false),
            plan(OrderHistory, None, Option::None, false),
            plan(PositionData, None, Option::None, false),
            plan(AdditionalData, None, Option::None, false),
        ],
        Tesla => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some(("vehicle_data.json", vehicle_json(s, "Tesla Model S 75D"))),
                false,
            ),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(Correspondence, None, Option::None, false),
            plan(
                OrderHistory,
                Data,
                Some(("order_history.json", orders())),
                false,
            ),
            plan(
                PositionData,
                Data,
                Some(("position_data.csv", drive_positions_csv(s))),
                false,
            ),
            plan(
                AdditionalData,
                Extensive,
                Some(("telemetry.csv", telemetry_csv(s))),
                true,
            ),
        ],
        Volkswagen => vec![
            plan(
                CustomerData,
                Data,
                Some(("customer_data.json", full_customer())),
                false,
            ),
            plan(
                VehicleData,
                Data,
                Some(("vehicle_data.json", vehicle_json(s, "VW Tiguan II"))),
                false,
            ),
            plan(InfotainmentUsage, None, Option::None, false),
            plan(Correspondence, None, Option::None, false),
            plan(
                OrderHistory,
                Data,
                Some(("order_history.json", orders())),
                false,
            ),
            plan(
                PositionData,
                Data,
                Some(("position_data.csv", parking_positions_csv(s))),
                false,
            ),
            plan(
                AdditionalData,
                Extensive,
                Some((
                    "additional_data.json",
                    serde_json::to_string_pretty(&json!([
                        {"category": "Car2X data", "copy_included": false},
                        {"category": "accident data", "copy_included": false},
                        {"category": "contract data", "copy_included": false},
                        {"category": "position data", "copy_included": true},
                    ]))
                    .unwrap()
                    .into_bytes(),
                )),
                false,
            ),
        ],
    }
}

// ---------------------------------------------------------------------------
// Event-log CSVs

fn audi_services_csv(_s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,label,service\n");
    for svc in ["remote lock", "refuel log", "logbook"] {
        out.push_str(&format!("status_snapshot,,connected_service,{svc}\n"));
    }
    out.into_bytes()
}

/// Advisor calls with vehicle coordinates. The first entry predates the
/// scenario by half a year: the log reaches back before the current
/// ownership.
fn onstar_calls_csv(s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,end,lat,lon,vin,label\n");
    let historical = s.base_time - 180 * 86_400_000;
    out.push_str(&format!(
        "status_snapshot,{},{},51.9412,7.6001,{},advisor_call\n",
        rfc3339(historical),
        rfc3339(historical + 240_000),
        s.vin
    ));
    for a in &s.actions {
        if let Action::Locate { at, lat, lon } = a {
            out.push_str(&format!(
                "status_snapshot,{},{},{lat},{lon},{},advisor_call\n",
                rfc3339(*at),
                rfc3339(*at + 180_000),
                s.vin
            ));
        }
    }
    out.into_bytes()
}

fn onstar_positions_csv(s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,lat,lon,vin,label\n");
    let (at, lat, lon) = s.last_parking().unwrap_or((s.base_time, 51.95, 7.60));
    out.push_str(&format!(
        "location_fix,{},{lat},{lon},{},last_contact\n",
        rfc3339(at),
        s.vin
    ));
    out.into_bytes()
}

fn onstar_warnings_csv(s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,vin,label,message\n");
    let t = s.status_time();
    out.push_str(&format!(
        "status_snapshot,{},{},warning,oil\n",
        rfc3339(t),
        s.vin
    ));
    out.push_str(&format!(
        "status_snapshot,{},{},warning,low tires\n",
        rfc3339(t + 60_000),
        s.vin
    ));
    out.into_bytes()
}

/// One access-log row per lock and unlock action.
fn seat_access_csv(s: &Scenario) -> Vec<u8> {
    let mut rows: Vec<(i64, &str)> = s
        .locks()
        .into_iter()
        .map(|at| (at, "lock"))
        .chain(s.unlocks().into_iter().map(|at| (at, "unlock")))
        .collect();
    rows.sort();
    let mut out = String::from("kind,start,vin,label,access\n");
    for (at, access) in rows {
        out.push_str(&format!(
            "lock_state,{},{},vehicle_access,{access}\n",
            rfc3339(at),
            s.vin
        ));
    }
    out.into_bytes()
}

fn drive_positions_csv(s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,lat,lon,vin,label\n");
    for d in s.drives() {
        let from = d.route.first().unwrap();
        let to = d.route.last().unwrap();
        out.push_str(&format!(
            "location_fix,{},{},{},{},drive_start\n",
            rfc3339(d.start),
            from.lat,
            from.lon,
            s.vin
        ));
        out.push_str(&format!(
            "location_fix,{},{},{},{},drive_end\n",
            rfc3339(d.end),
            to.lat,
            to.lon,
            s.vin
        ));
    }
    out.into_bytes()
}

fn parking_positions_csv(s: &Scenario) -> Vec<u8> {
    let mut out = String::from("kind,start,lat,lon,vin,label\n");
    for d in s.drives() {
        let to = d.route.last().unwrap();
        out.push_str(&format!(
            "parking,{},{},{},{},engine_off\n",
            rfc3339(d.end),
            to.lat,
            to.lon,
            s.vin
        ));
    }
    out.into_bytes()
}

// ---------------------------------------------------------------------------
// Telemetry

/// The wide signal table: 229 columns, 10 Hz over every drive (with a short
/// parked margin), speed nonzero exactly while driving. Sparse by design —
/// only the leading signals carry values.
pub fn telemetry_csv(s: &Scenario) -> Vec<u8> {
    let columns = telemetry_columns();
    let mut out = String::from("Timestamp");
    for c in &columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');

    for d in s.drives() {
        let mut t = d.start - TELEMETRY_MARGIN_MS;
        while t <= d.end + TELEMETRY_MARGIN_MS {
            let driving = t >= d.start && t <= d.end;
            let phase = (t - d.start) as f64 / 1000.0;
            let speed_mph = if driving {
                28.0 + 6.0 * (phase / 45.0).sin()
            } else {
                0.0
            };
            let accel = if driving {
                14.0 + 9.0 * (phase / 12.0).sin()
            } else {
                0.0
            };
            let brake = if driving && (phase as i64 % 50) < 4 {
                0.3
            } else {
                0.0
            };
            let hands_on = i64::from(driving);
            let steering = if driving {
                9.0 * (phase / 8.0).sin()
            } else {
                0.0
            };

            out.push_str(&rfc3339(t));
            for (i, _name) in columns.iter().enumerate() {
                out.push(',');
                match i {
                    0 => out.push_str(&format!("{accel:.2}")),
                    1 => out.push_str(&format!("{brake:.2}")),
                    2 => out.push_str(&hands_on.to_string()),
                    3 => out.push_str(&format!("{steering:.2}")),
                    4 => out.push_str(&format!("{speed_mph:.2}")),
                    5 => out.push_str(&format!("{:.1}", 360.0 + phase / 10.0)),
                    _ => {} // transmitted sparsely; most fields are empty
                }
            }
            out.push('\n');
            t += 100; // ten samples per second
        }
    }
    out.into_bytes()
}

pub fn telemetry_columns() -> Vec<String> {
    let mut cols = vec![
        "Accelerator Pedal Position (%)".to_string(),
        "Estimated Brake Pedal Position".to_string(),
        "Autosteer Driver Hands On Detection".to_string(),
        "Primary Steering Angle Sensor (degrees) (Positive indicates right turn)".to_string(),
        "Vehicle Speed (MPH)".to_string(),
        "Battery Voltage (V)".to_string(),
    ];
    for i in cols.len() + 1..=TESLA_TELEMETRY_COLUMNS {
        cols.push(format!("Signal {i:03}"));
    }
    cols
}
