//! The availability matrix: which forensic data category survives on which
//! app, platform and account state. Shipped as versioned data; the fixture
//! round-trip conformance suite treats it as the oracle's ground truth.

use serde::{Deserialize, Serialize};

use crate::locator::{AppId, Platform};

pub const MATRIX_VERSION: &str = "2020.2";

/// Account state a synthetic extraction is rendered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountState {
    LoggedIn,
    LoggedOut,
    Uninstalled,
}

impl AccountState {
    pub const ALL: [AccountState; 3] = [
        AccountState::LoggedIn,
        AccountState::LoggedOut,
        AccountState::Uninstalled,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AccountState::LoggedIn => "logged_in",
            AccountState::LoggedOut => "logged_out",
            AccountState::Uninstalled => "uninstalled",
        }
    }

    pub fn parse(s: &str) -> Option<AccountState> {
        AccountState::ALL.iter().copied().find(|a| a.as_str() == s)
    }
}

/// The six forensic data categories scored per app and platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    DriveLog,
    RecentLocation,
    Parking,
    Refueling,
    UserInfo,
    CarInfo,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::DriveLog,
        Category::RecentLocation,
        Category::Parking,
        Category::Refueling,
        Category::UserInfo,
        Category::CarInfo,
    ];
}

/// Per-cell availability symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSymbol {
    /// Extensive data available.
    Extensive,
    /// Data cached or partially available.
    Partial,
    /// Encrypted database available.
    Encrypted,
    /// No data available.
    None,
    /// Feature not available or not tested.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub app_id: AppId,
    pub platform: Platform,
    pub drive_log: CellSymbol,
    pub recent_location: CellSymbol,
    pub parking: CellSymbol,
    pub refueling: CellSymbol,
    pub user_info: CellSymbol,
    pub car_info: CellSymbol,
    /// Whether (and how much) data survives an account logout.
    pub logout: CellSymbol,
    /// Data surviving uninstallation: none, for every tested app.
    pub uninstall: CellSymbol,
}

impl MatrixRow {
    pub fn cell(&self, category: Category) -> CellSymbol {
        match category {
            Category::DriveLog => self.drive_log,
            Category::RecentLocation => self.recent_location,
            Category::Parking => self.parking,
            Category::Refueling => self.refueling,
            Category::UserInfo => self.user_info,
            Category::CarInfo => self.car_info,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityMatrix {
    pub version: String,
    pub rows: Vec<MatrixRow>,
}

impl AvailabilityMatrix {
    pub fn row(&self, app: AppId, platform: Platform) -> Option<&MatrixRow> {
        self.rows
            .iter()
            .find(|r| r.app_id == app && r.platform == platform)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn from_json(bytes: &[u8]) -> Result<AvailabilityMatrix, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

/// The built-in matrix, one row per (app, platform) as observed on the
/// tested late-2020 builds.
pub fn availability_matrix() -> AvailabilityMatrix {
    use AppId::*;
    use CellSymbol::*;
    use Platform::*;

    #[allow(clippy::too_many_arguments)]
    fn row(
        app_id: AppId,
        platform: Platform,
        cells: [CellSymbol; 6],
        logout: CellSymbol,
    ) -> MatrixRow {
        MatrixRow {
            app_id,
            platform,
            drive_log: cells[0],
            recent_location: cells[1],
            parking: cells[2],
            refueling: cells[3],
            user_info: cells[4],
            car_info: cells[5],
            logout,
            uninstall: None,
        }
    }

    AvailabilityMatrix {
        version: MATRIX_VERSION.to_string(),
        rows: vec![
            row(
                Myaudi,
                Android,
                [Partial, None, None, Extensive, Extensive, Extensive],
                Extensive,
            ),
            row(
                Myaudi,
                Ios,
                [Partial, None, None, Extensive, None, None],
                None,
            ),
            row(
                MyBmw,
                Android,
                [
                    NotApplicable,
                    Extensive,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Extensive,
                ],
                None,
            ),
            row(
                MyBmw,
                Ios,
                [
                    NotApplicable,
                    None,
                    NotApplicable,
                    NotApplicable,
                    None,
                    None,
                ],
                None,
            ),
            row(
                Fordpass,
                Android,
                [
                    None,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Extensive,
                    Extensive,
                ],
                None,
            ),
            row(
                Fordpass,
                Ios,
                [None, Extensive, Extensive, Extensive, Extensive, None],
                None,
            ),
            row(
                MercedesMe,
                Android,
                [
                    Encrypted, Encrypted, Encrypted, Encrypted, Partial, Encrypted,
                ],
                NotApplicable,
            ),
            row(
                MercedesMe,
                Ios,
                [
                    Extensive, Extensive, Extensive, Extensive, Extensive, Extensive,
                ],
                Extensive,
            ),
            row(
                Myopel,
                Android,
                [
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Extensive,
                    Extensive,
                ],
                Extensive,
            ),
            row(
                Myopel,
                Ios,
                [
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Extensive,
                    Extensive,
                ],
                Extensive,
            ),
            row(
                Onstar,
                Android,
                [
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Partial,
                    Extensive,
                ],
                Extensive,
            ),
            row(
                Onstar,
                Ios,
                [
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    None,
                    None,
                ],
                NotApplicable,
            ),
            row(
                Drivemii,
                Android,
                [
                    Partial,
                    Encrypted,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Partial,
                ],
                NotApplicable,
            ),
            row(
                Drivemii,
                Ios,
                [
                    Partial,
                    None,
                    NotApplicable,
                    NotApplicable,
                    NotApplicable,
                    Partial,
                ],
                NotApplicable,
            ),
            row(
                SeatConnect,
                Android,
                [
                    NotApplicable,
                    None,
                    None,
                    NotApplicable,
                    Extensive,
                    Extensive,
                ],
                Extensive,
            ),
            row(
                SeatConnect,
                Ios,
                [
                    NotApplicable,
                    None,
                    None,
                    NotApplicable,
                    Extensive,
                    Extensive,
                ],
                Extensive,
            ),
            row(
                Tesla,
                Android,
                [Partial, Partial, Partial, Partial, Partial, Partial],
                Extensive,
            ),
            row(
                Tesla,
                Ios,
                [None, Partial, Partial, Partial, Partial, Partial],
                Extensive,
            ),
            row(
                WeconnectGo,
                Android,
                [Extensive, Extensive, Extensive, Extensive, None, Extensive],
                None,
            ),
            row(
                WeconnectGo,
                Ios,
                [Extensive, Extensive, Extensive, Extensive, None, Extensive],
                None,
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_covers_all_twenty_pairs() {
        let m = availability_matrix();
        assert_eq!(m.rows.len(), 20);
        for app in AppId::ALL {
            for platform in [Platform::Android, Platform::Ios] {
                assert!(m.row(app, platform).is_some(), "{app:?}/{platform:?}");
            }
        }
        // Uninstallation deletes every tested app's data.
        assert!(m.rows.iter().all(|r| r.uninstall == CellSymbol::None));
    }

    #[test]
    fn matrix_round_trips_as_json() {
        let m = availability_matrix();
        let back = AvailabilityMatrix::from_json(m.to_json().as_bytes()).unwrap();
        assert_eq!(m, back);
    }
}
