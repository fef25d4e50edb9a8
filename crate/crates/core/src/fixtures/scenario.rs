//! Ground-truth scenarios: a seeded, deterministic sequence of driver
//! actions over one day, used to render synthetic extractions and to compute
//! the expected recovery independently of any extractor code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::event::{vin_check_digit, IdentityRecord};
use crate::util::haversine_m;

/// The nine driver-action kinds exercised against every app.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    LockUnlock,
    Refuel,
    Drive,
    Navigate,
    SendTrip,
    SaveParking,
    Locate,
    Summon,
    Climate,
}

impl ActionKind {
    pub const ALL: [ActionKind; 9] = [
        ActionKind::LockUnlock,
        ActionKind::Refuel,
        ActionKind::Drive,
        ActionKind::Navigate,
        ActionKind::SendTrip,
        ActionKind::SaveParking,
        ActionKind::Locate,
        ActionKind::Summon,
        ActionKind::Climate,
    ];
}

/// One position on a drive route, absolute UTC milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutePoint {
    pub t: i64,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "action")]
pub enum Action {
    Lock {
        at: i64,
    },
    Unlock {
        at: i64,
    },
    Refuel {
        at: i64,
        liters: f64,
        price: f64,
        lat: f64,
        lon: f64,
    },
    Drive {
        start: i64,
        end: i64,
        route: Vec<RoutePoint>,
    },
    Navigate {
        at: i64,
        destination: String,
        dest_lat: f64,
        dest_lon: f64,
        origin_lat: f64,
        origin_lon: f64,
    },
    SendTrip {
        at: i64,
        destination: String,
    },
    SaveParking {
        at: i64,
        lat: f64,
        lon: f64,
        photo: bool,
    },
    Locate {
        at: i64,
        lat: f64,
        lon: f64,
    },
    Summon {
        at: i64,
        distance_m: f64,
    },
    Climate {
        at: i64,
        temp_c: f64,
    },
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Lock { .. } | Action::Unlock { .. } => ActionKind::LockUnlock,
            Action::Refuel { .. } => ActionKind::Refuel,
            Action::Drive { .. } => ActionKind::Drive,
            Action::Navigate { .. } => ActionKind::Navigate,
            Action::SendTrip { .. } => ActionKind::SendTrip,
            Action::SaveParking { .. } => ActionKind::SaveParking,
            Action::Locate { .. } => ActionKind::Locate,
            Action::Summon { .. } => ActionKind::Summon,
            Action::Climate { .. } => ActionKind::Climate,
        }
    }

    pub fn time(&self) -> i64 {
        match self {
            Action::Lock { at }
            | Action::Unlock { at }
            | Action::Refuel { at, .. }
            | Action::Navigate { at, .. }
            | Action::SendTrip { at, .. }
            | Action::SaveParking { at, .. }
            | Action::Locate { at, .. }
            | Action::Summon { at, .. }
            | Action::Climate { at, .. } => *at,
            Action::Drive { start, .. } => *start,
        }
    }

    pub fn end_time(&self) -> i64 {
        match self {
            Action::Drive { end, .. } => *end,
            other => other.time(),
        }
    }
}

/// A drive with its sampled route.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveView<'a> {
    pub start: i64,
    pub end: i64,
    pub route: &'a [RoutePoint],
}

impl DriveView<'_> {
    pub fn duration_s(&self) -> i64 {
        (self.end - self.start) / 1000
    }

    /// Position at an absolute time, linearly interpolated along the route.
    pub fn position_at(&self, t: i64) -> (f64, f64) {
        let route = self.route;
        if route.is_empty() {
            return (0.0, 0.0);
        }
        if t <= route[0].t {
            return (route[0].lat, route[0].lon);
        }
        for w in route.windows(2) {
            let (a, b) = (w[0], w[1]);
            if t <= b.t {
                let f = (t - a.t) as f64 / (b.t - a.t).max(1) as f64;
                return (a.lat + (b.lat - a.lat) * f, a.lon + (b.lon - a.lon) * f);
            }
        }
        let last = route[route.len() - 1];
        (last.lat, last.lon)
    }

    /// Route length over the polyline vertices.
    pub fn distance_km(&self) -> f64 {
        self.route
            .windows(2)
            .map(|w| haversine_m(w[0].lat, w[0].lon, w[1].lat, w[1].lon))
            .sum::<f64>()
            / 1000.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub vin: String,
    pub user: IdentityRecord,
    pub base_time: i64,
    /// Time-ordered driver actions.
    pub actions: Vec<Action>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScenarioError {
    #[error("scenario length must be at least 1")]
    ZeroLength,
}

/// 2020-11-03T08:00:00Z: inside the plausibility window and the app-testing
/// period the registry versions correspond to.
pub const SCENARIO_BASE_MS: i64 = 1_604_390_400_000;

// Synthetic coordinate box (no real map data).
const BOX_LAT: (f64, f64) = (51.90, 52.00);
const BOX_LON: (f64, f64) = (7.55, 7.70);

const DESTINATIONS: [&str; 8] = [
    "Hafenweg 22",
    "Leonardo-Campus 3",
    "Bahnhofstrasse 14",
    "Schlossplatz 1",
    "Warendorfer Strasse 99",
    "Albersloher Weg 450",
    "Domplatz 10",
    "Kanalstrasse 52",
];

const FIRST_NAMES: [&str; 4] = ["Jo", "Alex", "Sam", "Kim"];
const LAST_NAMES: [&str; 4] = ["Fischer", "Weber", "Schmidt", "Vogel"];

/// Deterministically generate a scenario with `length` action steps.
///
/// Step one is always a drive of at least ten minutes; the remaining steps
/// cycle through the other action kinds in a seeded order, so nine steps
/// cover the whole catalog.
pub fn generate_scenario(seed: u64, length: usize) -> Result<Scenario, ScenarioError> {
    if length == 0 {
        return Err(ScenarioError::ZeroLength);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let vin = generate_vin(&mut rng);
    let first = FIRST_NAMES[rng.gen_range(0..FIRST_NAMES.len())];
    let last = LAST_NAMES[rng.gen_range(0..LAST_NAMES.len())];
    let user = IdentityRecord {
        name: Some(format!("{first} {last}")),
        email: Some(format!(
            "{}.{}@example.org",
            first.to_lowercase(),
            last.to_lowercase()
        )),
        phone: Some(format!(
            "+49 251 {:07}",
            rng.gen_range(1_000_000..9_999_999)
        )),
        date_of_birth: Some(format!(
            "19{:02}-{:02}-{:02}",
            rng.gen_range(60..99),
            rng.gen_range(1..13),
            rng.gen_range(1..29)
        )),
        address: Some(format!(
            "Musterweg {}, 48155 Muenster",
            rng.gen_range(1..80)
        )),
        user_id: Some(format!("u{:08}", rng.gen_range(10_000_000u64..100_000_000))),
    };

    // Step kinds: a guaranteed long drive first, the rest shuffled and cycled.
    let mut others: Vec<ActionKind> = ActionKind::ALL
        .iter()
        .copied()
        .filter(|k| *k != ActionKind::Drive)
        .collect();
    for i in (1..others.len()).rev() {
        others.swap(i, rng.gen_range(0..=i));
    }
    let mut steps = vec![ActionKind::Drive];
    for i in 0..length.saturating_sub(1) {
        steps.push(others[i % others.len()]);
    }

    let mut actions = Vec::new();
    let mut clock = SCENARIO_BASE_MS;
    let mut position = (
        round6(rng.gen_range(BOX_LAT.0..BOX_LAT.1)),
        round6(rng.gen_range(BOX_LON.0..BOX_LON.1)),
    );
    let mut first_drive = true;

    for step in steps {
        clock += rng.gen_range(10..40) * 60_000; // 10-40 min between steps
        match step {
            ActionKind::Drive => {
                let duration_s: i64 = if first_drive {
                    600
                } else {
                    rng.gen_range(2..15) * 60
                };
                first_drive = false;
                let (route, end_pos) = generate_route(&mut rng, position, clock, duration_s);
                actions.push(Action::Drive {
                    start: clock,
                    end: clock + duration_s * 1000,
                    route,
                });
                position = end_pos;
                clock += duration_s * 1000;
            }
            ActionKind::LockUnlock => {
                actions.push(Action::Lock { at: clock });
                let delta = rng.gen_range(30..120) * 1000;
                actions.push(Action::Unlock { at: clock + delta });
                clock += delta;
            }
            ActionKind::Refuel => {
                let liters = round1(rng.gen_range(20.0..60.0));
                let price = round2(liters * rng.gen_range(1.2..1.9));
                actions.push(Action::Refuel {
                    at: clock,
                    liters,
                    price,
                    lat: position.0,
                    lon: position.1,
                });
            }
            ActionKind::Navigate => {
                let dest = DESTINATIONS[rng.gen_range(0..DESTINATIONS.len())];
                actions.push(Action::Navigate {
                    at: clock,
                    destination: dest.to_string(),
                    dest_lat: round6(rng.gen_range(BOX_LAT.0..BOX_LAT.1)),
                    dest_lon: round6(rng.gen_range(BOX_LON.0..BOX_LON.1)),
                    origin_lat: position.0,
                    origin_lon: position.1,
                });
            }
            ActionKind::SendTrip => {
                let dest = DESTINATIONS[rng.gen_range(0..DESTINATIONS.len())];
                actions.push(Action::SendTrip {
                    at: clock,
                    destination: dest.to_string(),
                });
            }
            ActionKind::SaveParking => {
                actions.push(Action::SaveParking {
                    at: clock,
                    lat: position.0,
                    lon: position.1,
                    photo: true,
                });
            }
            ActionKind::Locate => {
                actions.push(Action::Locate {
                    at: clock,
                    lat: position.0,
                    lon: position.1,
                });
            }
            ActionKind::Summon => {
                actions.push(Action::Summon {
                    at: clock,
                    distance_m: round1(rng.gen_range(3.0..12.0)),
                });
            }
            ActionKind::Climate => {
                actions.push(Action::Climate {
                    at: clock,
                    temp_c: round1(rng.gen_range(18.0..26.0)),
                });
            }
        }
    }

    Ok(Scenario {
        seed,
        vin,
        user,
        base_time: SCENARIO_BASE_MS,
        actions,
    })
}

/// Piecewise-linear route with a vertex every 60 s (and at both endpoints).
fn generate_route(
    rng: &mut ChaCha8Rng,
    start_pos: (f64, f64),
    start_ms: i64,
    duration_s: i64,
) -> (Vec<RoutePoint>, (f64, f64)) {
    let mut points = vec![RoutePoint {
        t: start_ms,
        lat: start_pos.0,
        lon: start_pos.1,
    }];
    let mut pos = start_pos;
    let mut t = 0i64;
    while t < duration_s {
        let leg = (duration_s - t).min(60);
        t += leg;
        // 20-50 km/h as degree deltas (1 degree of latitude is ~111 km).
        let step_km = rng.gen_range(0.33..0.85) * (leg as f64 / 60.0);
        let dlat = rng.gen_range(-1.0..1.0f64);
        let dlon = rng.gen_range(-1.0..1.0f64);
        let norm = (dlat * dlat + dlon * dlon).sqrt().max(1e-9);
        pos = (
            round6((pos.0 + dlat / norm * step_km / 111.0).clamp(BOX_LAT.0, BOX_LAT.1)),
            round6((pos.1 + dlon / norm * step_km / 68.0).clamp(BOX_LON.0, BOX_LON.1)),
        );
        points.push(RoutePoint {
            t: start_ms + t * 1000,
            lat: pos.0,
            lon: pos.1,
        });
    }
    (points, pos)
}

/// Random VIN with a correct check digit at position nine.
fn generate_vin(rng: &mut ChaCha8Rng) -> String {
    const ALPHABET: &[u8] = b"ABCDEFGHJKLMNPRSTUVWXYZ0123456789";
    let mut vin: Vec<u8> = (0..17)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())])
        .collect();
    let digits = b"0123456789";
    for slot in vin.iter_mut().skip(11) {
        *slot = digits[rng.gen_range(0..10)]; // serial tail is numeric
    }
    let mut s = String::from_utf8(vin).unwrap();
    let check = vin_check_digit(&s).unwrap();
    s.replace_range(8..9, &check.to_string());
    s
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

// ---------------------------------------------------------------------------
// Scenario views shared by renderers and the recovery oracle.

impl Scenario {
    pub fn drives(&self) -> Vec<DriveView<'_>> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                Action::Drive { start, end, route } => Some(DriveView {
                    start: *start,
                    end: *end,
                    route,
                }),
                _ => None,
            })
            .collect()
    }

    pub fn refuels(&self) -> Vec<(i64, f64, f64, f64, f64)> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                Action::Refuel {
                    at,
                    liters,
                    price,
                    lat,
                    lon,
                } => Some((*at, *liters, *price, *lat, *lon)),
                _ => None,
            })
            .collect()
    }

    pub fn navigates(&self) -> Vec<&Action> {
        self.actions
            .iter()
            .filter(|a| matches!(a, Action::Navigate { .. }))
            .collect()
    }

    pub fn locks(&self) -> Vec<i64> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                Action::Lock { at } => Some(*at),
                _ => None,
            })
            .collect()
    }

    pub fn unlocks(&self) -> Vec<i64> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                Action::Unlock { at } => Some(*at),
                _ => None,
            })
            .collect()
    }

    pub fn save_parkings(&self) -> Vec<(i64, f64, f64, bool)> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                Action::SaveParking {
                    at,
                    lat,
                    lon,
                    photo,
                } => Some((*at, *lat, *lon, *photo)),
                _ => None,
            })
            .collect()
    }

    /// One moment after the last action; cached status snapshots carry it.
    pub fn status_time(&self) -> i64 {
        self.actions
            .iter()
            .map(Action::end_time)
            .max()
            .unwrap_or(self.base_time)
            + 60_000
    }

    /// The most recent parked position: the later of the last drive's end
    /// and the last explicit parking save.
    pub fn last_parking(&self) -> Option<(i64, f64, f64)> {
        let mut best: Option<(i64, f64, f64)> = None;
        for a in &self.actions {
            let candidate = match a {
                Action::Drive { end, route, .. } => route.last().map(|p| (*end, p.lat, p.lon)),
                Action::SaveParking { at, lat, lon, .. } => Some((*at, *lat, *lon)),
                _ => None,
            };
            if let Some(c) = candidate {
                if best.is_none_or(|b| c.0 >= b.0) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Total mileage proxy used by odometer-style fields.
    pub fn total_distance_km(&self) -> f64 {
        self.drives().iter().map(DriveView::distance_km).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::validate_vin;
    use std::collections::BTreeSet;

    #[test]
    fn deterministic_in_seed() {
        let a = generate_scenario(42, 9).unwrap();
        let b = generate_scenario(42, 9).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(43, 9).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn nine_steps_cover_all_action_kinds() {
        let s = generate_scenario(1, 9).unwrap();
        let kinds: BTreeSet<String> = s
            .actions
            .iter()
            .map(|a| format!("{:?}", a.kind()))
            .collect();
        assert_eq!(kinds.len(), 9, "kinds seen: {kinds:?}");
    }

    #[test]
    fn zero_length_rejected() {
        assert_eq!(generate_scenario(1, 0), Err(ScenarioError::ZeroLength));
    }

    #[test]
    fn first_drive_is_at_least_ten_minutes() {
        for seed in [1, 2, 77] {
            let s = generate_scenario(seed, 3).unwrap();
            let drives = s.drives();
            assert!(!drives.is_empty());
            assert!(drives[0].duration_s() >= 600, "seed {seed}");
            assert!(drives[0].route.len() >= 2);
        }
    }

    #[test]
    fn actions_are_time_ordered() {
        let s = generate_scenario(7, 12).unwrap();
        for w in s.actions.windows(2) {
            assert!(w[0].time() <= w[1].time());
        }
    }

    #[test]
    fn vin_is_valid_with_check_digit() {
        let s = generate_scenario(5, 1).unwrap();
        assert!(validate_vin(&s.vin, true).valid, "{}", s.vin);
    }

    #[test]
    fn route_interpolation_stays_on_segments() {
        let s = generate_scenario(11, 1).unwrap();
        let drives = s.drives();
        let d = &drives[0];
        let (lat, lon) = d.position_at(d.start + 5_000);
        assert!((BOX_LAT.0..=BOX_LAT.1).contains(&lat));
        assert!((BOX_LON.0..=BOX_LON.1).contains(&lon));
        assert!(d.distance_km() > 0.5);
    }
}
