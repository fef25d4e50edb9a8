//! The recovery oracle: which events a scenario must yield per app, platform
//! and account state, computed from the scenario and this rule data alone —
//! deliberately independent of the extractor implementations it judges.
//!
//! Each rule names the artifact it reflects, the event kind, the categories
//! the availability matrix files it under (an empty list means the record is
//! real but outside the six-category accounting), and how scenario actions
//! map onto expected events.

use serde::{Deserialize, Serialize};

use crate::event::EventKind;
use crate::locator::{AppId, Platform};

use super::matrix::{AccountState, Category};
use super::scenario::Scenario;

/// How a rule expands against a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Per {
    /// One event per refuel action, at its time.
    Refuels,
    /// One event per drive, at the drive start.
    Drives,
    /// One event per drive, at the drive end.
    DriveEnds,
    /// Position samples along every drive at a fixed cadence, endpoints
    /// included.
    Trackpoints { cadence_s: i64 },
    /// One record per full minute of driving (cadence from the first minute
    /// mark, start excluded).
    RecuperationMinutes,
    /// One event per navigation action.
    Navigates { dated: bool },
    /// One event per lock action and one per unlock action.
    LocksAndUnlocks,
    /// One event per explicit parking save.
    SaveParkings,
    /// Exactly one event per fixture.
    Singleton(When),
    /// One undated event if the scenario saved a parking photo.
    PhotoIfParking,
    /// A fixed number of undated records (schema-only observations).
    Fixed(usize),
}

/// Timestamp carried by singleton events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum When {
    /// Cached status written just after the last action.
    StatusTime,
    /// The most recent parked position.
    LastParking,
    /// Midpoint of the first drive (mid-drive cached statuses).
    MidDrive,
    Undated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRule {
    pub kind: EventKind,
    pub categories: &'static [Category],
    pub per: Per,
    /// Events carry the scenario VIN.
    pub vin: bool,
    /// Which artifact this reflects (diagnostics only).
    pub note: &'static str,
}

/// An encrypted store the fixture renders and the pipeline must flag.
#[derive(Debug, Clone, PartialEq)]
pub struct EncryptedExpect {
    pub path_suffix: &'static str,
    pub categories: &'static [Category],
}

/// One expected canonical event, in skeleton form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedEvent {
    pub kind: EventKind,
    pub categories: Vec<Category>,
    /// UTC milliseconds; `None` for undated events.
    pub start: Option<i64>,
    pub vin: Option<String>,
    pub encrypted: bool,
    pub note: String,
}

fn rule(
    kind: EventKind,
    categories: &'static [Category],
    per: Per,
    vin: bool,
    note: &'static str,
) -> RecoveryRule {
    RecoveryRule {
        kind,
        categories,
        per,
        vin,
        note,
    }
}

use Category::*;
use EventKind as K;

/// Expected-recovery rules per app, platform and account state.
pub fn rules(app: AppId, platform: Platform, state: AccountState) -> Vec<RecoveryRule> {
    use AccountState::*;
    use Platform::*;

    if state == Uninstalled {
        return Vec::new(); // the application folder no longer exists
    }
    let logged_in = state == LoggedIn;

    match (app, platform) {
        (AppId::Myaudi, Android) => vec![
            // The logbook survives logout on Android.
            rule(K::Trip, &[DriveLog], Per::Drives, false, "drivers_log_item"),
            rule(
                K::Refuel,
                &[Refueling],
                Per::Refuels,
                false,
                "cost_book_item",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "vehicleList",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "user account store",
            ),
            rule(
                K::NavDestination,
                &[DriveLog],
                Per::Navigates { dated: true },
                false,
                "geo cache",
            ),
            rule(
                K::LockState,
                &[CarInfo],
                Per::LocksAndUnlocks,
                false,
                "web cache lock log",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::StatusTime),
                false,
                "web cache door status",
            ),
        ],
        (AppId::Myaudi, Ios) => {
            if !logged_in {
                return Vec::new(); // logbook rows are cleared on logout
            }
            vec![
                rule(K::Refuel, &[Refueling], Per::Refuels, false, "CostBookItem"),
                rule(K::Trip, &[DriveLog], Per::Drives, false, "DriverLogItem"),
                rule(
                    K::StatusSnapshot,
                    &[],
                    Per::Singleton(When::StatusTime),
                    false,
                    "SettingsItem last sync",
                ),
            ]
        }
        (AppId::MyBmw, Android) => {
            if !logged_in {
                return Vec::new(); // the state file is deleted on logout
            }
            vec![
                rule(
                    K::VehicleInfo,
                    &[CarInfo],
                    Per::Singleton(When::Undated),
                    true,
                    "hydrated state vehicle",
                ),
                rule(
                    K::LocationFix,
                    &[RecentLocation],
                    Per::Singleton(When::StatusTime),
                    true,
                    "hydrated state position",
                ),
                rule(
                    K::StatusSnapshot,
                    &[CarInfo],
                    Per::Singleton(When::StatusTime),
                    true,
                    "hydrated state doors/services",
                ),
            ]
        }
        (AppId::MyBmw, Ios) => Vec::new(),
        (AppId::Fordpass, Android) => {
            let mut v = vec![
                rule(
                    K::StatusSnapshot,
                    &[],
                    Per::Singleton(When::Undated),
                    false,
                    "access token present",
                ),
                rule(
                    K::StatusSnapshot,
                    &[],
                    Per::Singleton(When::Undated),
                    false,
                    "pin salt+hash present",
                ),
                rule(
                    K::SchemaPresent,
                    &[],
                    Per::Fixed(2),
                    false,
                    "empty journeys/vehicle_positions",
                ),
            ];
            if logged_in {
                v.extend([
                    rule(
                        K::VehicleInfo,
                        &[CarInfo],
                        Per::Singleton(When::Undated),
                        true,
                        "NGSDN vehicle",
                    ),
                    rule(
                        K::VehicleInfo,
                        &[CarInfo],
                        Per::Singleton(When::Undated),
                        true,
                        "VIN details",
                    ),
                    rule(
                        K::Identity,
                        &[UserInfo],
                        Per::Singleton(When::Undated),
                        false,
                        "preferences account",
                    ),
                    rule(
                        K::VehicleInfo,
                        &[CarInfo],
                        Per::Singleton(When::Undated),
                        true,
                        "preferences vin",
                    ),
                ]);
            }
            v
        }
        (AppId::Fordpass, Ios) => {
            let mut v = vec![rule(
                K::SchemaPresent,
                &[],
                Per::Fixed(2),
                false,
                "empty ZVEHICLE/ZMODULE",
            )];
            if logged_in {
                v.extend([
                    rule(
                        K::StatusSnapshot,
                        &[Refueling],
                        Per::Singleton(When::StatusTime),
                        true,
                        "fuel snapshot",
                    ),
                    rule(
                        K::Identity,
                        &[UserInfo],
                        Per::Singleton(When::Undated),
                        false,
                        "session email",
                    ),
                    rule(
                        K::Refuel,
                        &[Refueling],
                        Per::Refuels,
                        false,
                        "plist refuelings",
                    ),
                    rule(
                        K::Parking,
                        &[Parking, RecentLocation],
                        Per::Singleton(When::LastParking),
                        false,
                        "plist last position",
                    ),
                    rule(
                        K::NavDestination,
                        &[],
                        Per::Navigates { dated: false },
                        false,
                        "plist destinations",
                    ),
                    rule(
                        K::Identity,
                        &[UserInfo],
                        Per::Singleton(When::Undated),
                        false,
                        "plist user id",
                    ),
                    rule(
                        K::StatusSnapshot,
                        &[],
                        Per::Singleton(When::Undated),
                        false,
                        "plist device metadata",
                    ),
                ]);
            }
            v
        }
        (AppId::MercedesMe, Android) => vec![
            // Everything readable survives logout.
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::StatusTime),
                false,
                "autofill address",
            ),
            rule(
                K::StatusSnapshot,
                &[],
                Per::Singleton(When::Undated),
                false,
                "volley tile urls",
            ),
            rule(
                K::StatusSnapshot,
                &[],
                Per::Singleton(When::Undated),
                false,
                "parking photo",
            ),
            rule(
                K::VehicleInfo,
                &[],
                Per::Singleton(When::Undated),
                true,
                "preferences vin/adapter",
            ),
        ],
        (AppId::MercedesMe, Ios) => vec![
            rule(
                K::StatusSnapshot,
                &[],
                Per::Singleton(When::StatusTime),
                false,
                "last trip distance",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::StatusTime),
                true,
                "live dashboard",
            ),
            rule(
                K::Parking,
                &[Parking],
                Per::Singleton(When::LastParking),
                true,
                "live parking position",
            ),
            rule(K::Trip, &[DriveLog], Per::Drives, false, "ZDLTRIP"),
            rule(
                K::LocationFix,
                &[RecentLocation],
                Per::Trackpoints { cadence_s: 10 },
                false,
                "ZDLCOREDATRACKPOINTS",
            ),
            rule(
                K::Refuel,
                &[Refueling],
                Per::Refuels,
                false,
                "MBFA refuelings",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "MBFA user info",
            ),
        ],
        (AppId::Myopel, Android) => vec![
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "log vin",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "marque email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "marque warranty",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "user_profile",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "vehicle",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                false,
                "dealer",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "preferences email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "preferences vin",
            ),
            rule(
                K::SchemaPresent,
                &[],
                Per::Fixed(4),
                false,
                "empty coordinate tables",
            ),
        ],
        (AppId::Myopel, Ios) => vec![
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "log email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "log vin",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "ZUSERPROFILE",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "ZVEHICLE",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                false,
                "ZDEALER",
            ),
            rule(K::SchemaPresent, &[], Per::Fixed(1), false, "empty ZROUTE"),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "ZACCOUNT email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "ZACCOUNT warranty",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "plist email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "plist vin",
            ),
            rule(
                K::LocationFix,
                &[],
                Per::Singleton(When::StatusTime),
                false,
                "smartphone coordinates",
            ),
        ],
        (AppId::Onstar, Android) => vec![
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "gemini cache vehicle",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "gemini cache account",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "mylink vehicles",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::StatusTime),
                false,
                "vehicle_diagnostics",
            ),
            rule(
                K::SchemaPresent,
                &[],
                Per::Fixed(2),
                false,
                "empty parking/route tables",
            ),
        ],
        (AppId::Onstar, Ios) => Vec::new(),
        (AppId::Drivemii, Android) => vec![
            // No account exists, so the logout state is identical.
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "App4EntryPrefs vin",
            ),
            rule(
                K::NavDestination,
                &[DriveLog],
                Per::Navigates { dated: false },
                false,
                "MapSettings tlv",
            ),
        ],
        (AppId::Drivemii, Ios) => vec![
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "preferences vin",
            ),
            rule(
                K::Recuperation,
                &[DriveLog],
                Per::RecuperationMinutes,
                false,
                "ZRECUPERATIONHISTORY",
            ),
            rule(
                K::NavDestination,
                &[DriveLog],
                Per::Navigates { dated: false },
                false,
                "MapSettings tlv",
            ),
        ],
        (AppId::SeatConnect, Android) => vec![
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::StatusTime),
                false,
                "autofill email",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "PersistentUser email",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "PersistentUser vehicle",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "PersistentVehicleMetadata",
            ),
        ],
        (AppId::SeatConnect, Ios) => vec![
            rule(
                K::StatusSnapshot,
                &[],
                Per::Singleton(When::StatusTime),
                false,
                "last login",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "plist vin",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "plist user",
            ),
            rule(
                K::StatusSnapshot,
                &[],
                Per::Singleton(When::Undated),
                false,
                "plist device",
            ),
        ],
        (AppId::Tesla, Android) => vec![
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::StatusTime),
                false,
                "autofill email",
            ),
            // Mid-drive cached status: position with speed and gear.
            rule(
                K::LocationFix,
                &[RecentLocation, DriveLog],
                Per::Singleton(When::MidDrive),
                true,
                "cached driving status",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::MidDrive),
                true,
                "cached odometer",
            ),
            // Parked cached status.
            rule(
                K::LocationFix,
                &[RecentLocation],
                Per::Singleton(When::StatusTime),
                true,
                "cached parked position",
            ),
            rule(
                K::Parking,
                &[Parking],
                Per::Singleton(When::StatusTime),
                true,
                "cached gear P",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::StatusTime),
                true,
                "cached interior temp",
            ),
            rule(
                K::Refuel,
                &[Refueling],
                Per::Singleton(When::StatusTime),
                true,
                "cached charge state",
            ),
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "cached configuration",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "cached profile",
            ),
        ],
        (AppId::Tesla, Ios) => vec![
            rule(
                K::VehicleInfo,
                &[CarInfo],
                Per::Singleton(When::Undated),
                true,
                "CFURL cached static data",
            ),
            rule(
                K::Identity,
                &[UserInfo],
                Per::Singleton(When::Undated),
                false,
                "CFURL cached account",
            ),
            rule(
                K::LocationFix,
                &[RecentLocation],
                Per::Singleton(When::StatusTime),
                true,
                "fsCachedData position",
            ),
            rule(
                K::Parking,
                &[Parking],
                Per::Singleton(When::StatusTime),
                true,
                "fsCachedData gear P",
            ),
            rule(
                K::StatusSnapshot,
                &[CarInfo],
                Per::Singleton(When::StatusTime),
                true,
                "fsCachedData interior temp",
            ),
            rule(
                K::Refuel,
                &[Refueling],
                Per::Singleton(When::StatusTime),
                true,
                "fsCachedData charge state",
            ),
        ],
        (AppId::WeconnectGo, Android) => {
            if !logged_in {
                return Vec::new(); // avacar.db is emptied on logout
            }
            avacar_rules()
        }
        (AppId::WeconnectGo, Ios) => {
            let mut v = vec![
                rule(
                    K::StatusSnapshot,
                    &[],
                    Per::PhotoIfParking,
                    false,
                    "parking photo",
                ),
                rule(
                    K::VehicleInfo,
                    &[],
                    Per::Singleton(When::Undated),
                    false,
                    "DataPlug identifiers",
                ),
            ];
            if logged_in {
                v.extend(avacar_rules()); // the database itself is deleted on logout
            }
            v
        }
    }
}

fn avacar_rules() -> Vec<RecoveryRule> {
    vec![
        rule(
            K::VehicleInfo,
            &[CarInfo],
            Per::Singleton(When::Undated),
            true,
            "vehicle table",
        ),
        rule(
            K::StatusSnapshot,
            &[Refueling],
            Per::DriveEnds,
            true,
            "fuel_levels",
        ),
        rule(K::Refuel, &[Refueling], Per::Refuels, true, "refuelings"),
        rule(K::Trip, &[DriveLog], Per::Drives, true, "trips"),
        rule(
            K::Parking,
            &[Parking, RecentLocation],
            Per::DriveEnds,
            true,
            "parking_positions (auto)",
        ),
        rule(
            K::Parking,
            &[Parking, RecentLocation],
            Per::SaveParkings,
            true,
            "parking_positions (saved)",
        ),
    ]
}

/// Encrypted stores the fixture renders for this app/platform/state.
pub fn encrypted_expects(
    app: AppId,
    platform: Platform,
    state: AccountState,
) -> Vec<EncryptedExpect> {
    if state == AccountState::Uninstalled {
        return Vec::new();
    }
    match (app, platform) {
        (AppId::MercedesMe, Platform::Android) => vec![
            EncryptedExpect {
                path_suffix: "databases/driverlogbookDatabase.db",
                categories: &[DriveLog, RecentLocation, Parking],
            },
            EncryptedExpect {
                path_suffix: "databases/mbfa.db",
                categories: &[Refueling, CarInfo],
            },
        ],
        (AppId::Drivemii, Platform::Android) => vec![
            EncryptedExpect {
                path_suffix: "files/fav/locations.sqlite",
                categories: &[RecentLocation],
            },
            EncryptedExpect {
                path_suffix: "files/fav/markers.sqlite",
                categories: &[RecentLocation],
            },
            EncryptedExpect {
                path_suffix: "files/itn/itineraries.sqlite",
                categories: &[RecentLocation],
            },
            EncryptedExpect {
                path_suffix: "files/tracks/tracks.sqlite",
                categories: &[RecentLocation],
            },
        ],
        (AppId::Drivemii, Platform::Ios) => vec![
            EncryptedExpect {
                path_suffix: "home/fav/locations.sqlite",
                categories: &[],
            },
            EncryptedExpect {
                path_suffix: "home/fav/markers.sqlite",
                categories: &[],
            },
            EncryptedExpect {
                path_suffix: "home/itn/itineraries.sqlite",
                categories: &[],
            },
            EncryptedExpect {
                path_suffix: "home/tracks/tracks.sqlite",
                categories: &[],
            },
        ],
        _ => Vec::new(),
    }
}

/// Expand the rules against a scenario into expected event skeletons.
pub fn expected_recovery(
    scenario: &Scenario,
    app: AppId,
    platform: Platform,
    state: AccountState,
) -> Vec<ExpectedEvent> {
    let mut out = Vec::new();
    let vin = |wanted: bool| wanted.then(|| scenario.vin.clone());

    for r in rules(app, platform, state) {
        let push = |out: &mut Vec<ExpectedEvent>, start: Option<i64>| {
            out.push(ExpectedEvent {
                kind: r.kind,
                categories: r.categories.to_vec(),
                start,
                vin: vin(r.vin),
                encrypted: false,
                note: r.note.to_string(),
            })
        };
        match r.per {
            Per::Refuels => {
                for (at, ..) in scenario.refuels() {
                    push(&mut out, Some(at));
                }
            }
            Per::Drives => {
                for d in scenario.drives() {
                    push(&mut out, Some(d.start));
                }
            }
            Per::DriveEnds => {
                for d in scenario.drives() {
                    push(&mut out, Some(d.end));
                }
            }
            Per::Trackpoints { cadence_s } => {
                for d in scenario.drives() {
                    let mut t = d.start;
                    while t <= d.end {
                        push(&mut out, Some(t));
                        t += cadence_s * 1000;
                    }
                }
            }
            Per::RecuperationMinutes => {
                for d in scenario.drives() {
                    let minutes = d.duration_s() / 60;
                    for k in 1..=minutes {
                        push(&mut out, Some(d.start + k * 60_000));
                    }
                }
            }
            Per::Navigates { dated } => {
                for n in scenario.navigates() {
                    push(&mut out, dated.then(|| n.time()));
                }
            }
            Per::LocksAndUnlocks => {
                for at in scenario.locks().into_iter().chain(scenario.unlocks()) {
                    push(&mut out, Some(at));
                }
            }
            Per::SaveParkings => {
                for (at, ..) in scenario.save_parkings() {
                    push(&mut out, Some(at));
                }
            }
            Per::Singleton(when) => {
                let start = match when {
                    When::StatusTime => Some(scenario.status_time()),
                    When::LastParking => scenario.last_parking().map(|(at, ..)| at),
                    When::MidDrive => scenario
                        .drives()
                        .first()
                        .map(|d| mid_drive_ms(d.start, d.end)),
                    When::Undated => None,
                };
                push(&mut out, start);
            }
            Per::PhotoIfParking => {
                if scenario
                    .save_parkings()
                    .iter()
                    .any(|(_, _, _, photo)| *photo)
                {
                    push(&mut out, None);
                }
            }
            Per::Fixed(n) => {
                for _ in 0..n {
                    push(&mut out, None);
                }
            }
        }
    }

    for enc in encrypted_expects(app, platform, state) {
        out.push(ExpectedEvent {
            kind: EventKind::EncryptedArtifact,
            categories: enc.categories.to_vec(),
            start: None,
            vin: None,
            encrypted: true,
            note: enc.path_suffix.to_string(),
        });
    }

    out
}

/// Midpoint of the first drive, aligned to whole seconds; the mid-drive
/// cached status fixture uses the same instant.
pub fn mid_drive_ms(start: i64, end: i64) -> i64 {
    (start + (end - start) / 2) / 1000 * 1000
}
