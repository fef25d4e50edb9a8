//! Render a scenario into a synthetic extraction for one app, platform and
//! account state, writing exactly the files the real apps leave behind.
//!
//! The renderers and the recovery rules in [`super::rules`] are two views of
//! the same artifact knowledge; the conformance suite round-trips one against
//! the other through the full pipeline.

use std::path::{Path, PathBuf};

use serde_json::json;

use crate::locator::{descriptor, registry, AppId, Platform, IOS_METADATA_PLIST};
use crate::util;

use super::matrix::AccountState;
use super::rules::mid_drive_ms;
use super::scenario::Scenario;
use super::writers::*;

/// Deterministic per-installation container UUID (8-4-4-4-12 hex).
pub fn container_uuid(seed: u64, app: AppId) -> String {
    let digest = util::sha256(format!("container\x1f{seed}\x1f{}", app.as_str()).as_bytes());
    let hex = hex::encode_upper(&digest[..16]);
    format!(
        "{}-{}-{}-{}-{}",
        &hex[0..8],
        &hex[8..12],
        &hex[12..16],
        &hex[16..20],
        &hex[20..32]
    )
}

fn hex32(seed: u64, app: AppId, label: &str) -> String {
    let digest = util::sha256(format!("{label}\x1f{seed}\x1f{}", app.as_str()).as_bytes());
    hex::encode(&digest[..16])
}

/// Where the container lives inside the rendered device tree.
pub fn container_root(scenario_seed: u64, app: AppId, platform: Platform) -> Option<PathBuf> {
    let reg = registry();
    let desc = descriptor(&reg, app, platform)?;
    Some(match platform {
        Platform::Android => {
            let pkg = &desc.package_or_bundle_markers[0].pattern;
            PathBuf::from(format!("data/data/{pkg}"))
        }
        Platform::Ios => PathBuf::from(format!(
            "private/var/mobile/Containers/Data/Application/{}",
            container_uuid(scenario_seed, app)
        )),
    })
}

/// Render one app's container under `out_root`. The uninstalled state renders
/// nothing: the application folder no longer exists.
pub fn render_extraction(
    scenario: &Scenario,
    app: AppId,
    platform: Platform,
    state: AccountState,
    out_root: &Path,
) -> Result<(), RenderError> {
    if state == AccountState::Uninstalled {
        std::fs::create_dir_all(out_root)?;
        return Ok(());
    }
    let root = out_root.join(container_root(scenario.seed, app, platform).expect("registry pair"));
    std::fs::create_dir_all(&root)?;

    if platform == Platform::Ios {
        let reg = registry();
        if let Some(desc) = descriptor(&reg, app, Platform::Ios) {
            if let Some(bundle) = &desc.bundle_id {
                write_plist(
                    &root.join(IOS_METADATA_PLIST),
                    &plist_dict(vec![
                        (
                            "MCMMetadataIdentifier",
                            plist::Value::String(bundle.clone()),
                        ),
                        ("MCMMetadataVersion", plist::Value::Integer(6.into())),
                    ]),
                    true,
                )?;
            }
        }
    }

    let logged_in = state == AccountState::LoggedIn;
    match (app, platform) {
        (AppId::Myaudi, Platform::Android) => myaudi_android(scenario, &root),
        (AppId::Myaudi, Platform::Ios) => myaudi_ios(scenario, logged_in, &root),
        (AppId::MyBmw, Platform::Android) => my_bmw_android(scenario, logged_in, &root),
        (AppId::MyBmw, Platform::Ios) => Ok(()),
        (AppId::Fordpass, Platform::Android) => fordpass_android(scenario, logged_in, &root),
        (AppId::Fordpass, Platform::Ios) => fordpass_ios(scenario, logged_in, &root),
        (AppId::MercedesMe, Platform::Android) => mercedes_android(scenario, &root),
        (AppId::MercedesMe, Platform::Ios) => mercedes_ios(scenario, &root),
        (AppId::Myopel, Platform::Android) => myopel_android(scenario, &root),
        (AppId::Myopel, Platform::Ios) => myopel_ios(scenario, &root),
        (AppId::Onstar, Platform::Android) => onstar_android(scenario, &root),
        (AppId::Onstar, Platform::Ios) => Ok(()),
        (AppId::Drivemii, Platform::Android) => drivemii_android(scenario, &root),
        (AppId::Drivemii, Platform::Ios) => drivemii_ios(scenario, &root),
        (AppId::SeatConnect, Platform::Android) => seat_android(scenario, &root),
        (AppId::SeatConnect, Platform::Ios) => seat_ios(scenario, &root),
        (AppId::Tesla, Platform::Android) => tesla_android(scenario, &root),
        (AppId::Tesla, Platform::Ios) => tesla_ios(scenario, &root),
        (AppId::WeconnectGo, Platform::Android) => weconnect_android(scenario, logged_in, &root),
        (AppId::WeconnectGo, Platform::Ios) => weconnect_ios(scenario, logged_in, &root),
    }
}

/// Render several app containers into one device tree.
pub fn render_many(
    scenario: &Scenario,
    pairs: &[(AppId, Platform)],
    state: AccountState,
    out_root: &Path,
) -> Result<(), RenderError> {
    for (app, platform) in pairs {
        render_extraction(scenario, *app, *platform, state, out_root)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared derivations

fn apple_s(ms: i64) -> f64 {
    ms as f64 / 1000.0 - 978_307_200.0
}

fn addr_of(lat: f64, lon: f64) -> String {
    format!("{lat:.4} N, {lon:.4} E")
}

fn cumulative_mileage(s: &Scenario) -> Vec<f64> {
    let mut total = 41_250.0; // odometer base
    s.drives()
        .iter()
        .map(|d| {
            total += d.distance_km();
            total
        })
        .collect()
}

/// Lock/unlock log entries in time order.
fn lock_entries(s: &Scenario) -> Vec<(i64, bool)> {
    let mut entries: Vec<(i64, bool)> = s
        .locks()
        .into_iter()
        .map(|at| (at, true))
        .chain(s.unlocks().into_iter().map(|at| (at, false)))
        .collect();
    entries.sort_unstable();
    entries
}

fn parking_rows(s: &Scenario) -> Vec<(i64, f64, f64)> {
    let mut rows: Vec<(i64, f64, f64)> = s
        .drives()
        .iter()
        .filter_map(|d| d.route.last().map(|p| (d.end, p.lat, p.lon)))
        .chain(
            s.save_parkings()
                .into_iter()
                .map(|(at, lat, lon, _)| (at, lat, lon)),
        )
        .collect();
    rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rows
}

// ---------------------------------------------------------------------------
// myAudi

fn myaudi_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    // The Android build keeps everything across logout.
    let mileage = cumulative_mileage(s);
    let trips: Vec<Vec<Sv>> = s
        .drives()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let from = d.route.first().unwrap();
            let to = d.route.last().unwrap();
            vec![
                Sv::I(i as i64 + 1),
                Sv::I(d.start),
                Sv::I(d.end),
                Sv::t(addr_of(from.lat, from.lon)),
                Sv::t(addr_of(to.lat, to.lon)),
                Sv::R(mileage[i]),
            ]
        })
        .collect();
    let refuels: Vec<Vec<Sv>> = s
        .refuels()
        .iter()
        .enumerate()
        .map(|(i, (at, liters, price, _, _))| {
            vec![
                Sv::I(i as i64 + 1),
                Sv::I(*at),
                Sv::R(*liters),
                Sv::R(*price),
                Sv::R(mileage[0]),
            ]
        })
        .collect();
    write_sqlite(
        &root.join("databases/audiMapsDatabase.db"),
        &[
            TableFixture {
                ddl: "CREATE TABLE drivers_log_item (id INTEGER PRIMARY KEY, start_time INTEGER, end_time INTEGER, start_address TEXT, destination_address TEXT, mileage_km REAL)",
                insert: "INSERT INTO drivers_log_item VALUES (?1,?2,?3,?4,?5,?6)",
                rows: trips,
            },
            TableFixture {
                ddl: "CREATE TABLE cost_book_item (id INTEGER PRIMARY KEY, timestamp INTEGER, fuel_liters REAL, price_eur REAL, mileage_km REAL)",
                insert: "INSERT INTO cost_book_item VALUES (?1,?2,?3,?4,?5)",
                rows: refuels,
            },
        ],
    )?;

    write_file(
        &root.join("files/vehicleList"),
        serde_json::to_string_pretty(&json!({
            "vehicles": [{
                "model": "A4 B9",
                "vin": s.vin,
                "assistance_systems": ["adaptive_cruise_control", "lane_assist"],
            }]
        }))
        .unwrap()
        .as_bytes(),
    )?;

    write_file(
        &root.join("files/PERSISTENCE_KEY_USER_ACCOUNT"),
        serde_json::to_string_pretty(&json!({
            "name": s.user.name,
            "email": s.user.email,
            "date_of_birth": s.user.date_of_birth,
            "user_id": s.user.user_id,
        }))
        .unwrap()
        .as_bytes(),
    )?;

    let navs: Vec<serde_json::Value> = s
        .navigates()
        .iter()
        .map(|a| match a {
            super::scenario::Action::Navigate {
                at,
                dest_lat,
                dest_lon,
                origin_lat,
                origin_lon,
                ..
            } => json!({
                "requested_at": at,
                "start": {"lat": origin_lat, "lon": origin_lon},
                "destination": {"lat": dest_lat, "lon": dest_lon},
            }),
            _ => unreachable!(),
        })
        .collect();
    if !navs.is_empty() {
        write_file(
            &root.join("cache/DiskLruCache/GeoKitDecodedCoordinate/1"),
            serde_json::to_string(&navs).unwrap().as_bytes(),
        )?;
    }

    let locks = lock_entries(s);
    if !locks.is_empty() {
        let entries: Vec<serde_json::Value> = locks
            .iter()
            .map(|(at, locked)| json!({"at": at, "locked": locked}))
            .collect();
        write_file(
            &root.join("files/WebRequestManagerCache/lock_log.1"),
            &gzip(
                serde_json::to_string(&json!({"kind": "lock_log", "entries": entries}))
                    .unwrap()
                    .as_bytes(),
            ),
        )?;
    }
    let locked_now = locks.last().map(|(_, l)| *l).unwrap_or(true);
    write_file(
        &root.join("files/WebRequestManagerCache/status.2"),
        &gzip(
            serde_json::to_string(&json!({
                "kind": "vehicle_status",
                "at": s.status_time(),
                "doors_locked": locked_now,
                "doors": {"front_left": "closed", "front_right": "closed"},
                "mileage_km": mileage.last().copied().unwrap_or(41_250.0),
                "nickname": "A4",
            }))
            .unwrap()
            .as_bytes(),
        ),
    )?;
    Ok(())
}

fn myaudi_ios(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    // Logout clears the rows; the database file itself stays.
    let refuels: Vec<Vec<Sv>> = if logged_in {
        s.refuels()
            .iter()
            .enumerate()
            .map(|(i, (at, liters, price, _, _))| {
                vec![
                    Sv::I(i as i64 + 1),
                    Sv::R(apple_s(*at)),
                    Sv::R(*liters),
                    Sv::R(*price),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    let trips: Vec<Vec<Sv>> = if logged_in {
        s.drives()
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let from = d.route.first().unwrap();
                let to = d.route.last().unwrap();
                vec![
                    Sv::I(i as i64 + 1),
                    Sv::R(apple_s(d.start)),
                    Sv::R(apple_s(d.end)),
                    Sv::t(addr_of(from.lat, from.lon)),
                    Sv::t(addr_of(to.lat, to.lon)),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    let settings: Vec<Vec<Sv>> = if logged_in {
        vec![vec![Sv::I(1), Sv::R(apple_s(s.status_time()))]]
    } else {
        Vec::new()
    };

    write_sqlite(
        &root.join("Documents/maps.db"),
        &[
            TableFixture {
                ddl: "CREATE TABLE CostBookItem (Z_PK INTEGER PRIMARY KEY, ZTIMESTAMP REAL, ZFUELAMOUNT REAL, ZPRICE REAL)",
                insert: "INSERT INTO CostBookItem VALUES (?1,?2,?3,?4)",
                rows: refuels,
            },
            TableFixture {
                ddl: "CREATE TABLE DriverLogItem (Z_PK INTEGER PRIMARY KEY, ZSTARTTIME REAL, ZENDTIME REAL, ZSTARTADDRESS TEXT, ZDESTINATIONADDRESS TEXT)",
                insert: "INSERT INTO DriverLogItem VALUES (?1,?2,?3,?4,?5)",
                rows: trips,
            },
            TableFixture {
                ddl: "CREATE TABLE SettingsItem (Z_PK INTEGER PRIMARY KEY, ZLASTSYNC REAL)",
                insert: "INSERT INTO SettingsItem VALUES (?1,?2)",
                rows: settings,
            },
        ],
    )
}

// ---------------------------------------------------------------------------
// my BMW

fn my_bmw_android(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    if !logged_in {
        // Logout deletes the state file; an empty cache keeps the
        // container present on disk.
        return write_file(&root.join("cache/journal"), b"");
    }
    let (lat, lon) = s
        .last_parking()
        .map(|(_, lat, lon)| (lat, lon))
        .unwrap_or((51.95, 7.62));
    let doc = json!({
        "vehicle": {
            "vin": s.vin,
            "year_of_manufacture": 2017,
            "features": ["remote_door_lock", "send_destination", "vehicle_finder"],
        },
        "vehicle_status": {
            "timestamp": s.status_time(),
            "lat": lat,
            "lon": lon,
            "doors_locked": true,
            "doors": {"driver_front": "closed", "passenger_front": "closed"},
            "mileage_km": cumulative_mileage(s).last().copied().unwrap_or(0.0),
            "upcoming_services": [{"kind": "oil", "due_km": 12_000}],
        }
    });
    write_file(
        &root.join("app_flutter/.hydrated_bloc.json"),
        serde_json::to_string_pretty(&doc).unwrap().as_bytes(),
    )
}

// ---------------------------------------------------------------------------
// FordPass

fn fordpass_android(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    let vehicles: Vec<Vec<Sv>> = if logged_in {
        vec![vec![
            Sv::I(1),
            Sv::t("Ford Kuga"),
            Sv::t(&s.vin),
            Sv::I(2013),
            Sv::t("Kuga"),
        ]]
    } else {
        Vec::new()
    };
    write_sqlite(
        &root.join("databases/NGSDN_DATABASE"),
        &[
            TableFixture {
                ddl: "CREATE TABLE vehicles (id INTEGER PRIMARY KEY, name TEXT, vin TEXT, year INTEGER, nickname TEXT)",
                insert: "INSERT INTO vehicles VALUES (?1,?2,?3,?4,?5)",
                rows: vehicles,
            },
            TableFixture {
                ddl: "CREATE TABLE journeys (id INTEGER PRIMARY KEY, start_time INTEGER, end_time INTEGER, start_lat REAL, start_lon REAL)",
                insert: "INSERT INTO journeys VALUES (?1,?2,?3,?4,?5)",
                rows: Vec::new(),
            },
            TableFixture {
                ddl: "CREATE TABLE vehicle_positions (id INTEGER PRIMARY KEY, at INTEGER, lat REAL, lon REAL)",
                insert: "INSERT INTO vehicle_positions VALUES (?1,?2,?3,?4)",
                rows: Vec::new(),
            },
        ],
    )?;

    let details: Vec<Vec<Sv>> = if logged_in {
        vec![vec![
            Sv::I(1),
            Sv::t(&s.vin),
            Sv::t("Duratorq 2.0 TDCi"),
            Sv::t("6-speed manual"),
            Sv::t("2025-03-01"),
            Sv::t("Euro 5"),
        ]]
    } else {
        Vec::new()
    };
    write_sqlite(
        &root.join("databases/VIN_DETAILS_LOOKUP"),
        &[TableFixture {
            ddl: "CREATE TABLE vin_details (id INTEGER PRIMARY KEY, vin TEXT, engine TEXT, transmission TEXT, warranty_until TEXT, emission_class TEXT)",
            insert: "INSERT INTO vin_details VALUES (?1,?2,?3,?4,?5,?6)",
            rows: details,
        }],
    )?;

    let mut prefs = vec![("units", PrefValue::Str("metric".into()))];
    if logged_in {
        prefs.push((
            "email",
            PrefValue::Str(s.user.email.clone().unwrap_or_default()),
        ));
        prefs.push((
            "name",
            PrefValue::Str(s.user.name.clone().unwrap_or_default()),
        ));
        prefs.push(("vin", PrefValue::Str(s.vin.clone())));
    }
    write_file(
        &root.join("shared_prefs/com.ford.fordpasseu_preferences.xml"),
        prefs_xml(&prefs).as_bytes(),
    )?;

    // Set at first start-up; survive logout.
    let token = hex32(s.seed, AppId::Fordpass, "token");
    write_file(
        &root.join("shared_prefs/encryptedValues.xml"),
        prefs_xml(&[("access_token", PrefValue::Str(token))]).as_bytes(),
    )?;
    write_file(
        &root.join("shared_prefs/pinValues.xml"),
        prefs_xml(&[
            (
                "pin_salt",
                PrefValue::Str(hex32(s.seed, AppId::Fordpass, "salt")),
            ),
            (
                "pin_hash",
                PrefValue::Str(hex32(s.seed, AppId::Fordpass, "hash")),
            ),
        ])
        .as_bytes(),
    )?;
    Ok(())
}

fn fordpass_ios(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    // Vehicle Core Data stores: schemas observed, rows never populated on the
    // tested vehicle generation.
    write_sqlite(
        &root.join("Documents/CoreData.sqlite"),
        &[TableFixture {
            ddl: "CREATE TABLE ZVEHICLE (Z_PK INTEGER PRIMARY KEY, ZMODEL TEXT, ZNICKNAME TEXT, ZVIN TEXT)",
            insert: "INSERT INTO ZVEHICLE VALUES (?1,?2,?3,?4)",
            rows: Vec::new(),
        }],
    )?;
    write_sqlite(
        &root.join("Documents/CVCoreDataModel.sqlite"),
        &[TableFixture {
            ddl: "CREATE TABLE ZMODULE (Z_PK INTEGER PRIMARY KEY, ZNAME TEXT, ZSERIAL TEXT)",
            insert: "INSERT INTO ZMODULE VALUES (?1,?2,?3)",
            rows: Vec::new(),
        }],
    )?;

    let sessions: Vec<Vec<Sv>> = if logged_in {
        vec![vec![
            Sv::I(1),
            Sv::t(s.user.email.clone().unwrap_or_default()),
        ]]
    } else {
        Vec::new()
    };
    write_sqlite(
        &root.join("Documents/DTX_8.183.1.1002.sqlite"),
        &[TableFixture {
            ddl: "CREATE TABLE user_session (id INTEGER PRIMARY KEY, email TEXT)",
            insert: "INSERT INTO user_session VALUES (?1,?2)",
            rows: sessions,
        }],
    )?;

    if logged_in {
        write_file(
            &root.join(format!(
                "Documents/DigitalCoPilot/dataPoints/{}/snapshot",
                s.vin
            )),
            serde_json::to_string(&json!({
                "vin": s.vin,
                "fuel_level_percent": 62.5,
                "timestamp": s.status_time(),
            }))
            .unwrap()
            .as_bytes(),
        )?;
    }

    let plist_value = if logged_in {
        let refuels = plist::Value::Array(
            s.refuels()
                .iter()
                .map(|(at, liters, _, lat, lon)| {
                    plist_dict(vec![
                        ("date", plist_date(*at)),
                        ("lat", plist::Value::Real(*lat)),
                        ("lon", plist::Value::Real(*lon)),
                        ("liters", plist::Value::Real(*liters)),
                    ])
                })
                .collect(),
        );
        let mut entries = vec![("refuelings", refuels)];
        if let Some((at, lat, lon)) = s.last_parking() {
            entries.push((
                "lastVehiclePosition",
                plist_dict(vec![
                    ("date", plist_date(at)),
                    ("lat", plist::Value::Real(lat)),
                    ("lon", plist::Value::Real(lon)),
                    ("address", plist::Value::String(addr_of(lat, lon))),
                ]),
            ));
        }
        if s.save_parkings().iter().any(|(_, _, _, photo)| *photo) {
            use base64::Engine;
            entries.push((
                "parkingPhotoBase64",
                plist::Value::String(
                    base64::engine::general_purpose::STANDARD.encode(jpeg_stub(s.seed)),
                ),
            ));
        }
        entries.push((
            "navigationDestinations",
            plist::Value::Array(
                s.navigates()
                    .iter()
                    .map(|a| match a {
                        super::scenario::Action::Navigate { destination, .. } => {
                            plist::Value::String(destination.clone())
                        }
                        _ => unreachable!(),
                    })
                    .collect(),
            ),
        ));
        entries.push((
            "userId",
            plist::Value::String(s.user.user_id.clone().unwrap_or_default()),
        ));
        entries.push((
            "deviceMetadata",
            plist_dict(vec![
                ("model", plist::Value::String("iPhone 6s".into())),
                ("os", plist::Value::String("iOS 13.4".into())),
            ]),
        ));
        plist_dict(entries)
    } else {
        plist_dict(vec![("launchCount", plist::Value::Integer(12.into()))])
    };
    write_plist(
        &root.join("Library/Preferences/com.ford.fordpasseu.plist"),
        &plist_value,
        true,
    )
}

// ---------------------------------------------------------------------------
// Mercedes me Adapter

/// Plaintext image of the logbook before scrambling; mirrors the iOS schema,
/// which the encrypted Android stores are assumed to share.
fn mercedes_logbook_tables(s: &Scenario) -> Vec<TableFixture<'static>> {
    let trips: Vec<Vec<Sv>> = s
        .drives()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let from = d.route.first().unwrap();
            let to = d.route.last().unwrap();
            vec![
                Sv::I(i as i64 + 1),
                Sv::R(apple_s(d.start)),
                Sv::R(apple_s(d.end)),
                Sv::t(addr_of(from.lat, from.lon)),
                Sv::t(addr_of(to.lat, to.lon)),
                Sv::R(d.distance_km()),
            ]
        })
        .collect();
    let mut points = Vec::new();
    let mut pk = 0i64;
    for (i, d) in s.drives().iter().enumerate() {
        let mut t = d.start;
        while t <= d.end {
            let (lat, lon) = d.position_at(t);
            pk += 1;
            points.push(vec![
                Sv::I(pk),
                Sv::I(i as i64 + 1),
                Sv::R(apple_s(t)),
                Sv::R(lat),
                Sv::R(lon),
            ]);
            t += 10_000; // one sample every ten seconds
        }
    }
    vec![
        TableFixture {
            ddl: "CREATE TABLE ZDLTRIP (Z_PK INTEGER PRIMARY KEY, ZSTARTTIME REAL, ZENDTIME REAL, ZSTARTADDRESS TEXT, ZDESTINATIONADDRESS TEXT, ZDISTANCE REAL)",
            insert: "INSERT INTO ZDLTRIP VALUES (?1,?2,?3,?4,?5,?6)",
            rows: trips,
        },
        TableFixture {
            ddl: "CREATE TABLE ZDLCOREDATRACKPOINTS (Z_PK INTEGER PRIMARY KEY, ZTRIP INTEGER, ZTIMESTAMP REAL, ZLATITUDE REAL, ZLONGITUDE REAL)",
            insert: "INSERT INTO ZDLCOREDATRACKPOINTS VALUES (?1,?2,?3,?4,?5)",
            rows: points,
        },
    ]
}

fn mercedes_mbfa_tables(s: &Scenario) -> Vec<TableFixture<'static>> {
    let refuels: Vec<Vec<Sv>> = s
        .refuels()
        .iter()
        .enumerate()
        .map(|(i, (at, liters, price, _, _))| {
            vec![
                Sv::I(i as i64 + 1),
                Sv::I(*at),
                Sv::R(*liters),
                Sv::R(*price),
                Sv::R(52_000.0),
            ]
        })
        .collect();
    let user = vec![vec![
        Sv::I(1),
        Sv::t(s.user.name.clone().unwrap_or_default()),
        Sv::t(s.user.email.clone().unwrap_or_default()),
        Sv::t(s.user.phone.clone().unwrap_or_default()),
        Sv::t(s.user.date_of_birth.clone().unwrap_or_default()),
        Sv::t(s.user.address.clone().unwrap_or_default()),
    ]];
    vec![
        TableFixture {
            ddl: "CREATE TABLE refuelings (id INTEGER PRIMARY KEY, at INTEGER, liters REAL, price REAL, mileage_km REAL)",
            insert: "INSERT INTO refuelings VALUES (?1,?2,?3,?4,?5)",
            rows: refuels,
        },
        TableFixture {
            ddl: "CREATE TABLE user_info (id INTEGER PRIMARY KEY, name TEXT, email TEXT, phone TEXT, date_of_birth TEXT, address TEXT)",
            insert: "INSERT INTO user_info VALUES (?1,?2,?3,?4,?5,?6)",
            rows: user,
        },
    ]
}

/// Write a database plaintext, then scramble it in place.
fn write_scrambled(
    path: &Path,
    tables: &[TableFixture],
    seed: u64,
    label: &str,
) -> Result<(), RenderError> {
    write_sqlite(path, tables)?;
    let plain = std::fs::read(path)?;
    std::fs::write(path, scramble(&plain, seed, label))?;
    Ok(())
}

fn mercedes_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    // Everything readable survives logout; the two databases are encrypted.
    write_scrambled(
        &root.join("databases/driverlogbookDatabase.db"),
        &mercedes_logbook_tables(s),
        s.seed,
        "databases/driverlogbookDatabase.db",
    )?;
    write_scrambled(
        &root.join("databases/mbfa.db"),
        &mercedes_mbfa_tables(s),
        s.seed,
        "databases/mbfa.db",
    )?;

    let status_s = s.status_time() / 1000;
    write_sqlite(
        &root.join("app_webview/Web Data"),
        &[TableFixture {
            ddl: "CREATE TABLE autofill (name TEXT, value TEXT, date_created INTEGER, date_last_used INTEGER)",
            insert: "INSERT INTO autofill VALUES (?1,?2,?3,?4)",
            rows: vec![vec![
                Sv::t("address"),
                Sv::t(s.user.address.clone().unwrap_or_default()),
                Sv::I(status_s),
                Sv::I(status_s),
            ]],
        }],
    )?;

    let mut volley = vec![0x00u8, 0x01, 0xfe, 0x84, 0x91];
    volley.extend_from_slice(b"https://tiles.example.invalid/15/17204/10954.png");
    volley.extend_from_slice(&[0x00, 0x9c, 0xff]);
    volley.extend_from_slice(b"https://tiles.example.invalid/15/17205/10954.png");
    volley.push(0x00);
    write_file(&root.join("cache/volley/tile-cache-0001"), &volley)?;

    write_file(
        &root.join("resources/parking_photo.jpg"),
        &jpeg_stub(s.seed),
    )?;

    write_file(
        &root.join("shared_prefs/com.daimler.mbfa.android_preferences.xml"),
        prefs_xml(&[
            ("vin", PrefValue::Str(s.vin.clone())),
            (
                "adapter_id",
                PrefValue::Str(format!("MBA-{:06}", s.seed % 1_000_000)),
            ),
            ("km_to_next_service", PrefValue::Int(7_400)),
        ])
        .as_bytes(),
    )?;
    Ok(())
}

fn mercedes_ios(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    // The iOS build stores everything in the clear and keeps it across logout.
    let last_distance = s.drives().last().map(|d| d.distance_km()).unwrap_or(0.0);
    write_file(
        &root.join(format!(
            "Documents/{}/000000000000",
            hex32(s.seed, AppId::MercedesMe, "docdir")
        )),
        serde_json::to_string(&json!({
            "last_trip_distance_km": last_distance,
            "at": s.status_time(),
        }))
        .unwrap()
        .as_bytes(),
    )?;

    let parking = s.last_parking();
    let mut live = json!({
        "timestamp": s.status_time(),
        "vin": s.vin,
        "fuel_level_percent": 54.0,
        "mileage_km": cumulative_mileage(s).last().copied().unwrap_or(52_000.0),
        "coolant_temp_c": 71.0,
    });
    if let Some((at, lat, lon)) = parking {
        live["parking_position"] = json!({"lat": lat, "lon": lon, "at": at});
    }
    write_file(
        &root.join("Documents/live.json"),
        serde_json::to_string_pretty(&live).unwrap().as_bytes(),
    )?;

    write_sqlite(
        &root.join("Documents/DriverLogbook.sqlite"),
        &mercedes_logbook_tables(s),
    )?;
    write_sqlite(
        &root.join("Library/Application Support/Live/MBFA"),
        &mercedes_mbfa_tables(s),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// myOpel

fn myopel_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    write_file(
        &root.join("cache/logs/session.log"),
        format!("vin={}\n", s.vin).as_bytes(),
    )?;

    write_sqlite(
        &root.join("databases/BOUserMymarque.db"),
        &[TableFixture {
            ddl: "CREATE TABLE account (id INTEGER PRIMARY KEY, email TEXT, warranty_until TEXT, vin TEXT)",
            insert: "INSERT INTO account VALUES (?1,?2,?3,?4)",
            rows: vec![vec![
                Sv::I(1),
                Sv::t(s.user.email.clone().unwrap_or_default()),
                Sv::t("2023-06-30"),
                Sv::t(&s.vin),
            ]],
        }],
    )?;

    write_sqlite(
        &root.join("databases/UserProfile.db"),
        &[
            TableFixture {
                ddl: "CREATE TABLE user_profile (id INTEGER PRIMARY KEY, name TEXT, email TEXT, phone TEXT)",
                insert: "INSERT INTO user_profile VALUES (?1,?2,?3,?4)",
                rows: vec![vec![
                    Sv::I(1),
                    Sv::t(s.user.name.clone().unwrap_or_default()),
                    Sv::t(s.user.email.clone().unwrap_or_default()),
                    Sv::t(s.user.phone.clone().unwrap_or_default()),
                ]],
            },
            TableFixture {
                ddl: "CREATE TABLE vehicle (id INTEGER PRIMARY KEY, vin TEXT, model TEXT)",
                insert: "INSERT INTO vehicle VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t(&s.vin), Sv::t("Astra K")]],
            },
            TableFixture {
                ddl: "CREATE TABLE dealer (id INTEGER PRIMARY KEY, name TEXT, city TEXT)",
                insert: "INSERT INTO dealer VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t("Autohaus Nord"), Sv::t("Muenster")]],
            },
        ],
    )?;

    for db in [
        "CarProtocolStrategy.db",
        "LocalisationSmartphone.db",
        "SmartAppsV1.db",
        "SmartAppsV2.db",
    ] {
        write_sqlite(
            &root.join("databases").join(db),
            &[TableFixture {
                ddl: "CREATE TABLE coordinates (id INTEGER PRIMARY KEY, lat REAL, lon REAL, at INTEGER)",
                insert: "INSERT INTO coordinates VALUES (?1,?2,?3,?4)",
                rows: Vec::new(),
            }],
        )?;
    }

    write_file(
        &root.join("shared_prefs/com.psa.mym.myopel_preferences.xml"),
        prefs_xml(&[
            ("vin", PrefValue::Str(s.vin.clone())),
            (
                "email",
                PrefValue::Str(s.user.email.clone().unwrap_or_default()),
            ),
            ("notifications", PrefValue::Bool(true)),
        ])
        .as_bytes(),
    )?;
    Ok(())
}

fn myopel_ios(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    write_file(
        &root.join("Documents/LogDirectory/com.psa.myopel/app.log"),
        format!(
            "user={}\nvin={}\n",
            s.user.email.clone().unwrap_or_default(),
            s.vin
        )
        .as_bytes(),
    )?;

    write_sqlite(
        &root.join("Documents/UserProfileModel.sqlite"),
        &[
            TableFixture {
                ddl: "CREATE TABLE ZUSERPROFILE (Z_PK INTEGER PRIMARY KEY, ZNAME TEXT, ZEMAIL TEXT, ZPHONE TEXT)",
                insert: "INSERT INTO ZUSERPROFILE VALUES (?1,?2,?3,?4)",
                rows: vec![vec![
                    Sv::I(1),
                    Sv::t(s.user.name.clone().unwrap_or_default()),
                    Sv::t(s.user.email.clone().unwrap_or_default()),
                    Sv::t(s.user.phone.clone().unwrap_or_default()),
                ]],
            },
            TableFixture {
                ddl: "CREATE TABLE ZVEHICLE (Z_PK INTEGER PRIMARY KEY, ZVIN TEXT, ZMODEL TEXT)",
                insert: "INSERT INTO ZVEHICLE VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t(&s.vin), Sv::t("Astra K")]],
            },
            TableFixture {
                ddl: "CREATE TABLE ZDEALER (Z_PK INTEGER PRIMARY KEY, ZNAME TEXT, ZCITY TEXT)",
                insert: "INSERT INTO ZDEALER VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t("Autohaus Nord"), Sv::t("Muenster")]],
            },
        ],
    )?;

    write_sqlite(
        &root.join("Documents/BTAModel.sqlite"),
        &[TableFixture {
            ddl: "CREATE TABLE ZROUTE (Z_PK INTEGER PRIMARY KEY, ZSTARTTIME REAL, ZENDTIME REAL, ZSTARTLAT REAL, ZSTARTLON REAL, ZENDLAT REAL, ZENDLON REAL)",
            insert: "INSERT INTO ZROUTE VALUES (?1,?2,?3,?4,?5,?6,?7)",
            rows: Vec::new(),
        }],
    )?;

    write_sqlite(
        &root.join("Documents/BOUserMyMarqueModel.sqlite"),
        &[TableFixture {
            ddl: "CREATE TABLE ZACCOUNT (Z_PK INTEGER PRIMARY KEY, ZEMAIL TEXT, ZWARRANTYEND REAL, ZVIN TEXT)",
            insert: "INSERT INTO ZACCOUNT VALUES (?1,?2,?3,?4)",
            rows: vec![vec![
                Sv::I(1),
                Sv::t(s.user.email.clone().unwrap_or_default()),
                Sv::R(apple_s(s.status_time() + 86_400_000)),
                Sv::t(&s.vin),
            ]],
        }],
    )?;

    let (lat, lon) = s
        .last_parking()
        .map(|(_, lat, lon)| (lat, lon))
        .unwrap_or((51.96, 7.61));
    write_plist(
        &root.join("Library/Preferences/com.psa.mym.myopel.plist"),
        &plist_dict(vec![
            (
                "email",
                plist::Value::String(s.user.email.clone().unwrap_or_default()),
            ),
            ("vin", plist::Value::String(s.vin.clone())),
            (
                "phone_location",
                plist_dict(vec![
                    ("lat", plist::Value::Real(lat)),
                    ("lon", plist::Value::Real(lon)),
                    ("at", plist_date(s.status_time())),
                ]),
            ),
        ]),
        true,
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// OnStar Europe

fn onstar_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    write_file(
        &root.join("cache/GeminiCache/16d8b336686532339c0e35c784c68215.1"),
        &gzip(
            serde_json::to_string(&json!({
                "vin": s.vin,
                "model": "Astra K",
                "account_number": s.user.user_id,
            }))
            .unwrap()
            .as_bytes(),
        ),
    )?;

    write_sqlite(
        &root.join("databases/mylink"),
        &[
            TableFixture {
                ddl: "CREATE TABLE vehicles (id INTEGER PRIMARY KEY, model TEXT, vin TEXT)",
                insert: "INSERT INTO vehicles VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t("Astra K"), Sv::t(&s.vin)]],
            },
            TableFixture {
                ddl: "CREATE TABLE vehicle_diagnostics (id INTEGER PRIMARY KEY, at INTEGER, tire_pressure_bar REAL, mileage_km REAL)",
                insert: "INSERT INTO vehicle_diagnostics VALUES (?1,?2,?3,?4)",
                rows: vec![vec![Sv::I(1), Sv::I(s.status_time()), Sv::R(2.3), Sv::R(63_210.0)]],
            },
            TableFixture {
                ddl: "CREATE TABLE parking_positions (id INTEGER PRIMARY KEY, lat REAL, lon REAL, at INTEGER)",
                insert: "INSERT INTO parking_positions VALUES (?1,?2,?3,?4)",
                rows: Vec::new(),
            },
            TableFixture {
                ddl: "CREATE TABLE routes (id INTEGER PRIMARY KEY, start_time INTEGER, end_time INTEGER)",
                insert: "INSERT INTO routes VALUES (?1,?2,?3)",
                rows: Vec::new(),
            },
        ],
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// DriveMii

fn nav_destinations(s: &Scenario) -> Vec<String> {
    s.navigates()
        .iter()
        .map(|a| match a {
            super::scenario::Action::Navigate { destination, .. } => destination.clone(),
            _ => unreachable!(),
        })
        .collect()
}

fn drivemii_encrypted(s: &Scenario, base: &Path, prefix: &str) -> Result<(), RenderError> {
    for rel in [
        "fav/locations.sqlite",
        "fav/markers.sqlite",
        "itn/itineraries.sqlite",
        "tracks/tracks.sqlite",
    ] {
        let table = TableFixture {
            ddl: "CREATE TABLE entries (id INTEGER PRIMARY KEY, lat REAL, lon REAL, label TEXT)",
            insert: "INSERT INTO entries VALUES (?1,?2,?3,?4)",
            rows: vec![vec![Sv::I(1), Sv::R(51.96), Sv::R(7.62), Sv::t("home")]],
        };
        write_scrambled(
            &base.join(rel),
            &[table],
            s.seed,
            &format!("{prefix}/{rel}"),
        )?;
    }
    Ok(())
}

fn drivemii_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    // No account exists; only installed and uninstalled states differ.
    write_file(
        &root.join("shared_prefs/App4EntryPrefs.xml"),
        prefs_xml(&[
            ("vin", PrefValue::Str(s.vin.clone())),
            ("icon_order", PrefValue::Str("nav,eco,media".into())),
        ])
        .as_bytes(),
    )?;
    write_file(
        &root.join("files/DE_AT_CH-102666_MapSettings_.tlv"),
        &tlv_map_settings(&nav_destinations(s), s.seed),
    )?;
    drivemii_encrypted(s, &root.join("files"), "files")
}

fn drivemii_ios(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    write_plist(
        &root.join("Library/Preferences/com.seat.connectedcar.drivemii.plist"),
        &plist_dict(vec![("vin", plist::Value::String(s.vin.clone()))]),
        true,
    )?;

    let mut rows = Vec::new();
    let mut pk = 0i64;
    for d in s.drives() {
        let minutes = d.duration_s() / 60;
        for k in 1..=minutes {
            pk += 1;
            rows.push(vec![
                Sv::I(pk),
                Sv::R(apple_s(d.start + k * 60_000)),
                Sv::R(0.05 * (k as f64 % 4.0 + 1.0)),
            ]);
        }
    }
    write_sqlite(
        &root.join("Documents/ElectricalService.sql"),
        &[TableFixture {
            ddl: "CREATE TABLE ZRECUPERATIONHISTORY (Z_PK INTEGER PRIMARY KEY, ZTIMESTAMP REAL, ZRECUPERATEDENERGY REAL)",
            insert: "INSERT INTO ZRECUPERATIONHISTORY VALUES (?1,?2,?3)",
            rows,
        }],
    )?;

    let home = root.join("Library/Application Support/com.seat.connectedcar.drivemii/home");
    write_file(
        &home.join("DE_AT_CH_MapSettings_.tlv"),
        &tlv_map_settings(&nav_destinations(s), s.seed),
    )?;
    drivemii_encrypted(s, &home, "home")
}

// ---------------------------------------------------------------------------
// Seat Connect

fn seat_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    let status_s = s.status_time() / 1000;
    write_sqlite(
        &root.join("app_webview/Default/Web Data"),
        &[TableFixture {
            ddl: "CREATE TABLE autofill (name TEXT, value TEXT, date_created INTEGER, date_last_used INTEGER)",
            insert: "INSERT INTO autofill VALUES (?1,?2,?3,?4)",
            rows: vec![vec![
                Sv::t("email"),
                Sv::t(s.user.email.clone().unwrap_or_default()),
                Sv::I(status_s),
                Sv::I(status_s),
            ]],
        }],
    )?;

    write_sqlite(
        &root.join("databases/ModAppDatabase.db"),
        &[
            TableFixture {
                ddl: "CREATE TABLE PersistentUser (id INTEGER PRIMARY KEY, email TEXT, vin TEXT, nickname TEXT)",
                insert: "INSERT INTO PersistentUser VALUES (?1,?2,?3,?4)",
                rows: vec![vec![
                    Sv::I(1),
                    Sv::t(s.user.email.clone().unwrap_or_default()),
                    Sv::t(&s.vin),
                    Sv::t("Mii"),
                ]],
            },
            TableFixture {
                ddl: "CREATE TABLE PersistentVehicleMetadata (id INTEGER PRIMARY KEY, name TEXT, vin TEXT)",
                insert: "INSERT INTO PersistentVehicleMetadata VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::t("SEAT Mii electric Plus"), Sv::t(&s.vin)]],
            },
        ],
    )?;
    Ok(())
}

fn seat_ios(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    write_plist(
        &root.join("Library/Preferences/com.seat.connectedcar.mod3connectapp.plist"),
        &plist_dict(vec![
            ("last_login", plist_date(s.status_time())),
            ("vin", plist::Value::String(s.vin.clone())),
            (
                "user",
                plist_dict(vec![
                    (
                        "phone",
                        plist::Value::String(s.user.phone.clone().unwrap_or_default()),
                    ),
                    (
                        "date_of_birth",
                        plist::Value::String(s.user.date_of_birth.clone().unwrap_or_default()),
                    ),
                    (
                        "email",
                        plist::Value::String(s.user.email.clone().unwrap_or_default()),
                    ),
                ]),
            ),
            (
                "device",
                plist_dict(vec![
                    ("model", plist::Value::String("iPhone 6s".into())),
                    ("os", plist::Value::String("iOS 13.4".into())),
                ]),
            ),
        ]),
        true,
    )
}

// ---------------------------------------------------------------------------
// Tesla

fn tesla_parked_status(s: &Scenario) -> serde_json::Value {
    let (lat, lon) = s
        .last_parking()
        .map(|(_, lat, lon)| (lat, lon))
        .unwrap_or((51.95, 7.60));
    let status = s.status_time();
    json!({
        "response": {
            "vin": s.vin,
            "drive_state": {
                "gps_as_of": status / 1000,
                "latitude": lat,
                "longitude": lon,
                "speed": null,
                "shift_state": "P",
            },
            "climate_state": {"inside_temp": 21.5, "timestamp": status},
            "charge_state": {"battery_level": 76, "timestamp": status},
        }
    })
}

fn tesla_android(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    let status_s = s.status_time() / 1000;
    write_sqlite(
        &root.join("app_webview/Web Data"),
        &[TableFixture {
            ddl: "CREATE TABLE autofill (name TEXT, value TEXT, date_created INTEGER, date_last_used INTEGER)",
            insert: "INSERT INTO autofill VALUES (?1,?2,?3,?4)",
            rows: vec![vec![
                Sv::t("email"),
                Sv::t(s.user.email.clone().unwrap_or_default()),
                Sv::I(status_s),
                Sv::I(status_s),
            ]],
        }],
    )?;

    let drives = s.drives();
    let first = drives.first().expect("scenario always has a drive");
    let mid = mid_drive_ms(first.start, first.end);
    let (lat, lon) = first.position_at(mid);
    let driving = json!({
        "response": {
            "vin": s.vin,
            "drive_state": {
                "gps_as_of": mid / 1000,
                "latitude": lat,
                "longitude": lon,
                "speed": 30.0,
                "shift_state": "D",
            },
            "vehicle_state": {
                "odometer": 26_500.0,
                "timestamp": mid,
            },
        }
    });
    write_file(
        &root.join("cache/http-cache/status_drive.json"),
        serde_json::to_string(&driving).unwrap().as_bytes(),
    )?;
    write_file(
        &root.join("cache/http-cache/status_parked.json"),
        serde_json::to_string(&tesla_parked_status(s))
            .unwrap()
            .as_bytes(),
    )?;
    write_file(
        &root.join("cache/http-cache/profile.json"),
        serde_json::to_string(&json!({
            "response": {
                "email": s.user.email,
                "full_name": s.user.name,
            }
        }))
        .unwrap()
        .as_bytes(),
    )?;
    write_file(
        &root.join("cache/http-cache/config.json"),
        serde_json::to_string(&json!({
            "response": {
                "vin": s.vin,
                "display_name": "Blitz",
                "vehicle_config": {"car_type": "models", "trim_badging": "75d"},
            }
        }))
        .unwrap()
        .as_bytes(),
    )?;
    Ok(())
}

fn tesla_ios(s: &Scenario, root: &Path) -> Result<(), RenderError> {
    let caches = root.join("Library/Caches/com.teslamotors.TeslaApp");
    let static_body = serde_json::to_string(&json!({
        "response": {
            "vin": s.vin,
            "display_name": "Blitz",
            "email": s.user.email,
        }
    }))
    .unwrap();
    write_sqlite(
        &caches.join("Cache.db"),
        &[
            TableFixture {
                ddl: "CREATE TABLE cfurl_cache_response (entry_ID INTEGER PRIMARY KEY, request_key TEXT)",
                insert: "INSERT INTO cfurl_cache_response VALUES (?1,?2)",
                rows: vec![vec![Sv::I(1), Sv::t("https://owner-api.example.invalid/api/1/vehicles")]],
            },
            TableFixture {
                ddl: "CREATE TABLE cfurl_cache_receiver_data (entry_ID INTEGER PRIMARY KEY, isDataOnFS INTEGER, receiver_data BLOB)",
                insert: "INSERT INTO cfurl_cache_receiver_data VALUES (?1,?2,?3)",
                rows: vec![vec![Sv::I(1), Sv::I(0), Sv::B(static_body.into_bytes())]],
            },
        ],
    )?;

    write_file(
        &caches.join(format!(
            "fsCachedData/{}",
            hex32(s.seed, AppId::Tesla, "fscache")
        )),
        serde_json::to_string(&tesla_parked_status(s))
            .unwrap()
            .as_bytes(),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// We Connect Go

fn avacar_tables(s: &Scenario, logged_in: bool) -> Vec<TableFixture<'static>> {
    let drives = s.drives();
    let fuel_rows: Vec<Vec<Sv>> = if logged_in {
        drives
            .iter()
            .enumerate()
            .map(|(i, d)| {
                vec![
                    Sv::I(i as i64 + 1),
                    Sv::I(d.end),
                    Sv::R(70.0 - 4.0 * i as f64),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    let refuel_rows: Vec<Vec<Sv>> = if logged_in {
        s.refuels()
            .iter()
            .enumerate()
            .map(|(i, (at, liters, price, lat, lon))| {
                vec![
                    Sv::I(i as i64 + 1),
                    Sv::I(*at),
                    Sv::R(*lat),
                    Sv::R(*lon),
                    Sv::R(*liters),
                    Sv::R(*price),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    let trip_rows: Vec<Vec<Sv>> = if logged_in {
        drives
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let from = d.route.first().unwrap();
                let to = d.route.last().unwrap();
                vec![
                    Sv::I(i as i64 + 1),
                    Sv::I(d.start),
                    Sv::I(d.end),
                    Sv::t(addr_of(from.lat, from.lon)),
                    Sv::t(addr_of(to.lat, to.lon)),
                    Sv::R(from.lat),
                    Sv::R(from.lon),
                    Sv::R(to.lat),
                    Sv::R(to.lon),
                    Sv::R(d.distance_km()),
                    Sv::R(2.4),
                    Sv::R(-3.1),
                    Sv::R(38.0),
                ]
            })
            .collect()
    } else {
        Vec::new()
    };
    let parking: Vec<Vec<Sv>> = if logged_in {
        parking_rows(s)
            .into_iter()
            .enumerate()
            .map(|(i, (at, lat, lon))| vec![Sv::I(i as i64 + 1), Sv::I(at), Sv::R(lat), Sv::R(lon)])
            .collect()
    } else {
        Vec::new()
    };
    let vehicle: Vec<Vec<Sv>> = if logged_in {
        vec![vec![
            Sv::I(1),
            Sv::t(&s.vin),
            Sv::t("5N1"),
            Sv::t("2.0 TDI"),
            Sv::t("DSG-7"),
            Sv::R(6.4),
        ]]
    } else {
        Vec::new()
    };

    vec![
        TableFixture {
            ddl: "CREATE TABLE vehicle (id INTEGER PRIMARY KEY, vin TEXT, model_code TEXT, engine TEXT, transmission TEXT, avg_consumption_l_100km REAL)",
            insert: "INSERT INTO vehicle VALUES (?1,?2,?3,?4,?5,?6)",
            rows: vehicle,
        },
        TableFixture {
            ddl: "CREATE TABLE fuel_levels (id INTEGER PRIMARY KEY, at INTEGER, level_percent REAL)",
            insert: "INSERT INTO fuel_levels VALUES (?1,?2,?3)",
            rows: fuel_rows,
        },
        TableFixture {
            ddl: "CREATE TABLE refuelings (id INTEGER PRIMARY KEY, at INTEGER, lat REAL, lon REAL, liters REAL, price REAL)",
            insert: "INSERT INTO refuelings VALUES (?1,?2,?3,?4,?5,?6)",
            rows: refuel_rows,
        },
        TableFixture {
            ddl: "CREATE TABLE trips (id INTEGER PRIMARY KEY, start_time INTEGER, end_time INTEGER, start_address TEXT, destination_address TEXT, start_lat REAL, start_lon REAL, end_lat REAL, end_lon REAL, distance_km REAL, max_acceleration_ms2 REAL, max_deceleration_ms2 REAL, velocity_at_max_accel_kmh REAL)",
            insert: "INSERT INTO trips VALUES (?1,?2,?3,?4,?5,?6,?7,?8,?9,?10,?11,?12,?13)",
            rows: trip_rows,
        },
        TableFixture {
            ddl: "CREATE TABLE parking_positions (id INTEGER PRIMARY KEY, at INTEGER, lat REAL, lon REAL)",
            insert: "INSERT INTO parking_positions VALUES (?1,?2,?3,?4)",
            rows: parking,
        },
    ]
}

fn weconnect_android(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    // Logout clears the rows of avacar.db; the file remains.
    write_sqlite(
        &root.join("databases/avacar.db"),
        &avacar_tables(s, logged_in),
    )
}

fn weconnect_ios(s: &Scenario, logged_in: bool, root: &Path) -> Result<(), RenderError> {
    if logged_in {
        // Logout deletes the main database entirely.
        write_sqlite(&root.join("Documents/avacar.db"), &avacar_tables(s, true))?;
    }
    if s.save_parkings().iter().any(|(_, _, _, photo)| *photo) {
        write_file(
            &root.join("Documents/.avacar_SUPPORT/_EXTERNAL_DATA/0000000000000001.jpg"),
            &jpeg_stub(s.seed),
        )?;
    }
    write_sqlite(
        &root.join("Documents/VW_DataPlug_2_1_ClientURLTranslation_5_1.sqlite3"),
        &[TableFixture {
            ddl: "CREATE TABLE adapters (id INTEGER PRIMARY KEY, name TEXT, serial TEXT)",
            insert: "INSERT INTO adapters VALUES (?1,?2,?3)",
            rows: vec![vec![
                Sv::I(1),
                Sv::t("VW DataPlug"),
                Sv::t(format!("DP-{:08}", s.seed % 100_000_000)),
            ]],
        }],
    )?;
    Ok(())
}
