//! App container location: find installed (or residual) vehicle assistant
//! apps in an extraction and bind them to registry descriptors.
//!
//! Android containers live under `/data/data/<package>/`; iOS containers
//! under `/private/var/mobile/Containers/Data/Application/<UUID>/` with a
//! random per-install UUID, so iOS identification goes through marker files
//! inside the container (well-known preference plists and databases, plus
//! the container-manager metadata plist when the extraction includes it).

use serde::{Deserialize, Serialize};

use crate::event::EventKind;
use crate::evidence::{EvidenceStore, FileEntry};
use crate::formats::{read_plist, TreeValue};
use crate::util::glob_match;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Platform {
    Android,
    Ios,
}

impl Platform {
    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Android => "android",
            Platform::Ios => "ios",
        }
    }
}

/// Stable toolkit identifiers for the supported apps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppId {
    Myaudi,
    MyBmw,
    Fordpass,
    MercedesMe,
    Myopel,
    Onstar,
    Drivemii,
    SeatConnect,
    Tesla,
    WeconnectGo,
}

impl AppId {
    pub const ALL: [AppId; 10] = [
        AppId::Myaudi,
        AppId::MyBmw,
        AppId::Fordpass,
        AppId::MercedesMe,
        AppId::Myopel,
        AppId::Onstar,
        AppId::Drivemii,
        AppId::SeatConnect,
        AppId::Tesla,
        AppId::WeconnectGo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AppId::Myaudi => "myaudi",
            AppId::MyBmw => "my_bmw",
            AppId::Fordpass => "fordpass",
            AppId::MercedesMe => "mercedes_me",
            AppId::Myopel => "myopel",
            AppId::Onstar => "onstar",
            AppId::Drivemii => "drivemii",
            AppId::SeatConnect => "seat_connect",
            AppId::Tesla => "tesla",
            AppId::WeconnectGo => "weconnect_go",
        }
    }

    pub fn parse(s: &str) -> Option<AppId> {
        AppId::ALL.iter().copied().find(|a| a.as_str() == s)
    }
}

/// The artifact file formats the extractors know how to decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactFormat {
    Sqlite,
    Plist,
    Json,
    XmlPrefs,
    GzipJson,
    TlvMapsettings,
    Base64ImageField,
    TextLog,
    /// Raw image file stored on disk (parking photos).
    Image,
}

/// One artifact the app is known to leave behind, with the path pattern it
/// matches inside the container and the event kinds it yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactSpec {
    /// Glob relative to the container root.
    pub relative_path_pattern: String,
    pub format: ArtifactFormat,
    pub yields: Vec<EventKind>,
    /// Known-encrypted stores: detected and flagged, never parsed.
    #[serde(default)]
    pub expect_encrypted: bool,
    /// Where this knowledge comes from (tested app build and vehicle).
    pub reference: String,
}

/// A path pattern whose presence identifies the app.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub pattern: String,
    /// Package-name or bundle-id strength; weaker content markers yield
    /// `Inferred` confidence.
    pub definitive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppDescriptor {
    pub app_id: AppId,
    pub display_name: String,
    pub platform: Platform,
    /// Android: the package name. iOS: container-relative marker patterns.
    pub package_or_bundle_markers: Vec<Marker>,
    /// Bundle identifier used to match the iOS container-manager metadata
    /// plist when present (reconstructed where the tested build did not
    /// expose one on disk).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bundle_id: Option<String>,
    pub artifact_specs: Vec<ArtifactSpec>,
    pub tested_version: String,
    pub tested_vehicle: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    Definitive,
    Inferred,
}

/// A located app container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerMatch {
    pub descriptor: AppDescriptor,
    /// Device-absolute container root.
    pub container_root: String,
    pub confidence: Confidence,
    pub matched_markers: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LocatorError {
    #[error("container {container} matches several apps: {apps:?}")]
    AmbiguousContainer {
        container: String,
        apps: Vec<String>,
    },
    #[error("registry: {0}")]
    BadRegistry(String),
}

pub const IOS_METADATA_PLIST: &str = ".com.apple.mobile_container_manager.metadata.plist";

// ---------------------------------------------------------------------------
// Registry

fn spec(
    pattern: &str,
    format: ArtifactFormat,
    yields: &[EventKind],
    reference: &str,
) -> ArtifactSpec {
    ArtifactSpec {
        relative_path_pattern: pattern.to_string(),
        format,
        yields: yields.to_vec(),
        expect_encrypted: false,
        reference: reference.to_string(),
    }
}

fn spec_encrypted(pattern: &str, reference: &str) -> ArtifactSpec {
    ArtifactSpec {
        relative_path_pattern: pattern.to_string(),
        format: ArtifactFormat::Sqlite,
        yields: vec![EventKind::EncryptedArtifact],
        expect_encrypted: true,
        reference: reference.to_string(),
    }
}

/// The built-in registry: ten apps on both platforms, as tested in late 2020.
pub fn registry() -> Vec<AppDescriptor> {
    use ArtifactFormat::*;
    use EventKind::*;

    let mut out = Vec::with_capacity(20);

    // -- myAudi ------------------------------------------------------------
    let audi_ref = "observed: myAudi/Android v3.18.0, Audi A4 B9";
    out.push(AppDescriptor {
        app_id: AppId::Myaudi,
        display_name: "myAudi".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "en.myaudi.mobile.assistant".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec(
                "databases/audiMapsDatabase.db",
                Sqlite,
                &[Trip, Refuel],
                audi_ref,
            ),
            spec("files/vehicleList", Json, &[VehicleInfo], audi_ref),
            spec(
                "files/PERSISTENCE_KEY_USER_ACCOUNT",
                Json,
                &[Identity],
                audi_ref,
            ),
            spec(
                "cache/DiskLruCache/GeoKitDecodedCoordinate/**",
                Json,
                &[NavDestination],
                audi_ref,
            ),
            spec(
                "files/WebRequestManagerCache/*",
                GzipJson,
                &[LockState, StatusSnapshot, LocationFix],
                audi_ref,
            ),
        ],
        tested_version: "3.18.0".into(),
        tested_vehicle: "Audi A4 B9".into(),
    });
    let audi_ios_ref = "observed: myAudi/iOS v3.18.1, Audi A4 B9";
    out.push(AppDescriptor {
        app_id: AppId::Myaudi,
        display_name: "myAudi".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Documents/maps.db".into(),
            definitive: false,
        }],
        bundle_id: Some("de.myaudi.mobile.assistant".into()),
        artifact_specs: vec![spec(
            "Documents/maps.db",
            Sqlite,
            &[Refuel, Trip, StatusSnapshot],
            audi_ios_ref,
        )],
        tested_version: "3.18.1".into(),
        tested_vehicle: "Audi A4 B9".into(),
    });

    // -- my BMW ------------------------------------------------------------
    let bmw_ref = "observed: my BMW/Android v1.0.1, BMW 1er F20 140i";
    out.push(AppDescriptor {
        app_id: AppId::MyBmw,
        display_name: "my BMW".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "de.bmw.connected.mobile20.row".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![spec(
            "**/.hydrated_bloc.json",
            Json,
            &[VehicleInfo, LocationFix, StatusSnapshot],
            bmw_ref,
        )],
        tested_version: "1.0.1".into(),
        tested_vehicle: "BMW 1er F20 140i".into(),
    });
    out.push(AppDescriptor {
        app_id: AppId::MyBmw,
        display_name: "my BMW".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: IOS_METADATA_PLIST.into(),
            definitive: true,
        }],
        bundle_id: Some("de.bmw.connected.mobile20.row".into()),
        // No relevant data is stored on the iOS filesystem; the container is
        // identified by its metadata plist alone.
        artifact_specs: vec![spec(
            IOS_METADATA_PLIST,
            Plist,
            &[],
            "observed: my BMW/iOS v1.0.1, BMW 1er F20 140i (no relevant app data on disk)",
        )],
        tested_version: "1.0.1".into(),
        tested_vehicle: "BMW 1er F20 140i".into(),
    });

    // -- FordPass ----------------------------------------------------------
    let ford_ref = "observed: FordPass/Android v3.1.0, Ford Kuga '13";
    out.push(AppDescriptor {
        app_id: AppId::Fordpass,
        display_name: "FordPass".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.ford.fordpasseu".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec(
                "databases/NGSDN_DATABASE",
                Sqlite,
                &[VehicleInfo, SchemaPresent],
                ford_ref,
            ),
            spec(
                "databases/VIN_DETAILS_LOOKUP",
                Sqlite,
                &[VehicleInfo],
                ford_ref,
            ),
            spec(
                "shared_prefs/com.ford.fordpasseu_preferences.xml",
                XmlPrefs,
                &[Identity, VehicleInfo],
                ford_ref,
            ),
            spec(
                "shared_prefs/encryptedValues.xml",
                XmlPrefs,
                &[StatusSnapshot],
                ford_ref,
            ),
            spec(
                "shared_prefs/pinValues.xml",
                XmlPrefs,
                &[StatusSnapshot],
                ford_ref,
            ),
        ],
        tested_version: "3.1.0".into(),
        tested_vehicle: "Ford Kuga '13".into(),
    });
    let ford_ios_ref = "observed: FordPass/iOS v3.0.0, Ford Kuga '13";
    out.push(AppDescriptor {
        app_id: AppId::Fordpass,
        display_name: "FordPass".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Library/Preferences/com.ford.fordpasseu.plist".into(),
            definitive: true,
        }],
        bundle_id: Some("com.ford.fordpasseu".into()),
        artifact_specs: vec![
            spec(
                "Documents/CoreData.sqlite",
                Sqlite,
                &[VehicleInfo, SchemaPresent],
                ford_ios_ref,
            ),
            spec(
                "Documents/CVCoreDataModel.sqlite",
                Sqlite,
                &[VehicleInfo, SchemaPresent],
                ford_ios_ref,
            ),
            spec(
                "Documents/DigitalCoPilot/dataPoints/*/snapshot",
                Json,
                &[StatusSnapshot],
                ford_ios_ref,
            ),
            spec("Documents/DTX_*.sqlite", Sqlite, &[Identity], ford_ios_ref),
            spec(
                "Library/Preferences/com.ford.fordpasseu.plist",
                Plist,
                &[Refuel, Parking, NavDestination, Identity],
                ford_ios_ref,
            ),
        ],
        tested_version: "3.0.0".into(),
        tested_vehicle: "Ford Kuga '13".into(),
    });

    // -- Mercedes me Adapter -----------------------------------------------
    let mb_ref = "observed: Mercedes me Adapter/Android v3.11.50, Mercedes C-Klasse W204";
    out.push(AppDescriptor {
        app_id: AppId::MercedesMe,
        display_name: "Mercedes me Adapter".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.daimler.mbfa.android".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec_encrypted("databases/driverlogbookDatabase.db", mb_ref),
            spec_encrypted("databases/mbfa.db", mb_ref),
            spec("app_webview/Web Data", Sqlite, &[Identity], mb_ref),
            spec("cache/*volley*/*", TextLog, &[StatusSnapshot], mb_ref),
            spec("resources/*", Image, &[StatusSnapshot], mb_ref),
            spec(
                "shared_prefs/com.daimler.mbfa.android_preferences.xml",
                XmlPrefs,
                &[VehicleInfo],
                mb_ref,
            ),
        ],
        tested_version: "3.11.50".into(),
        tested_vehicle: "Mercedes C-Klasse W204".into(),
    });
    let mb_ios_ref = "observed: Mercedes me Adapter/iOS v3.6.50, Mercedes C-Klasse W204";
    out.push(AppDescriptor {
        app_id: AppId::MercedesMe,
        display_name: "Mercedes me Adapter".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![
            Marker {
                pattern: "Documents/live.json".into(),
                definitive: false,
            },
            Marker {
                pattern: "Documents/DriverLogbook.sqlite".into(),
                definitive: false,
            },
            Marker {
                pattern: "Library/Application Support/Live/MBFA".into(),
                definitive: false,
            },
        ],
        bundle_id: Some("com.daimler.mbfa.ios".into()),
        artifact_specs: vec![
            spec(
                "Documents/*/000000000000",
                Json,
                &[StatusSnapshot],
                mb_ios_ref,
            ),
            spec(
                "Documents/live.json",
                Json,
                &[StatusSnapshot, Parking],
                mb_ios_ref,
            ),
            spec(
                "Documents/DriverLogbook.sqlite",
                Sqlite,
                &[Trip, LocationFix],
                mb_ios_ref,
            ),
            spec(
                "Library/Application Support/Live/MBFA",
                Sqlite,
                &[Refuel, Identity],
                mb_ios_ref,
            ),
        ],
        tested_version: "3.6.50".into(),
        tested_vehicle: "Mercedes C-Klasse W204".into(),
    });

    // -- myOpel --------------------------------------------------------------
    let opel_ref = "observed: myOpel/Android v1.23.4, Opel Astra K";
    out.push(AppDescriptor {
        app_id: AppId::Myopel,
        display_name: "myOpel".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.psa.mym.myopel".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec("cache/logs/*", TextLog, &[VehicleInfo], opel_ref),
            spec(
                "databases/BOUserMymarque.db",
                Sqlite,
                &[Identity, VehicleInfo],
                opel_ref,
            ),
            spec(
                "databases/UserProfile.db",
                Sqlite,
                &[Identity, VehicleInfo],
                opel_ref,
            ),
            spec(
                "databases/CarProtocolStrategy.db",
                Sqlite,
                &[SchemaPresent],
                opel_ref,
            ),
            spec(
                "databases/LocalisationSmartphone.db",
                Sqlite,
                &[SchemaPresent],
                opel_ref,
            ),
            spec(
                "databases/SmartAppsV1.db",
                Sqlite,
                &[SchemaPresent],
                opel_ref,
            ),
            spec(
                "databases/SmartAppsV2.db",
                Sqlite,
                &[SchemaPresent],
                opel_ref,
            ),
            spec(
                "shared_prefs/com.psa.mym.myopel_preferences.xml",
                XmlPrefs,
                &[Identity, VehicleInfo],
                opel_ref,
            ),
        ],
        tested_version: "1.23.4".into(),
        tested_vehicle: "Opel Astra K".into(),
    });
    let opel_ios_ref = "observed: myOpel/iOS v1.23.4, Opel Astra K";
    out.push(AppDescriptor {
        app_id: AppId::Myopel,
        display_name: "myOpel".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Documents/LogDirectory/com.psa.myopel/**".into(),
            definitive: true,
        }],
        bundle_id: Some("com.psa.mym.myopel".into()),
        artifact_specs: vec![
            spec(
                "Documents/LogDirectory/com.psa.myopel/*",
                TextLog,
                &[Identity, VehicleInfo],
                opel_ios_ref,
            ),
            spec(
                "Documents/UserProfileModel.sqlite",
                Sqlite,
                &[Identity, VehicleInfo],
                opel_ios_ref,
            ),
            spec(
                "Documents/BTAModel.sqlite",
                Sqlite,
                &[Trip, SchemaPresent],
                opel_ios_ref,
            ),
            spec(
                "Documents/BOUserMyMarqueModel.sqlite",
                Sqlite,
                &[Identity, VehicleInfo],
                opel_ios_ref,
            ),
            spec(
                "Library/Preferences/com.psa.mym.myopel.plist",
                Plist,
                &[Identity, VehicleInfo, LocationFix],
                opel_ios_ref,
            ),
        ],
        tested_version: "1.23.4".into(),
        tested_vehicle: "Opel Astra K".into(),
    });

    // -- OnStar Europe -------------------------------------------------------
    let onstar_ref = "observed: OnStar Europe/Android v3.28.0, Opel Astra K";
    out.push(AppDescriptor {
        app_id: AppId::Onstar,
        display_name: "OnStar Europe".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.gme.opel.owner.android".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec(
                "cache/GeminiCache/*.1",
                GzipJson,
                &[VehicleInfo, Identity],
                onstar_ref,
            ),
            spec(
                "databases/mylink",
                Sqlite,
                &[VehicleInfo, StatusSnapshot, SchemaPresent],
                onstar_ref,
            ),
        ],
        tested_version: "3.28.0".into(),
        tested_vehicle: "Opel Astra K".into(),
    });
    out.push(AppDescriptor {
        app_id: AppId::Onstar,
        display_name: "OnStar Europe".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: IOS_METADATA_PLIST.into(),
            definitive: true,
        }],
        bundle_id: Some("com.gme.opel.owner.ios".into()),
        artifact_specs: vec![spec(
            IOS_METADATA_PLIST,
            Plist,
            &[],
            "observed: OnStar Europe/iOS v3.28.0, Opel Astra K (no relevant app data on disk)",
        )],
        tested_version: "3.28.0".into(),
        tested_vehicle: "Opel Astra K".into(),
    });

    // -- DriveMii ------------------------------------------------------------
    let mii_ref = "observed: DriveMii App/Android v3.0, Seat Mii electric Plus";
    out.push(AppDescriptor {
        app_id: AppId::Drivemii,
        display_name: "DriveMii App".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.seat.connectedcar.drivemii".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec(
                "files/*MapSettings_.tlv",
                TlvMapsettings,
                &[NavDestination],
                mii_ref,
            ),
            spec_encrypted("files/fav/locations.sqlite", mii_ref),
            spec_encrypted("files/fav/markers.sqlite", mii_ref),
            spec_encrypted("files/itn/itineraries.sqlite", mii_ref),
            spec_encrypted("files/tracks/tracks.sqlite", mii_ref),
            spec(
                "shared_prefs/App4EntryPrefs.xml",
                XmlPrefs,
                &[VehicleInfo],
                mii_ref,
            ),
        ],
        tested_version: "3.0".into(),
        tested_vehicle: "Seat Mii electric Plus".into(),
    });
    let mii_ios_ref = "observed: DriveMii App/iOS v3.0, Seat Mii electric Plus";
    let mii_home = "Library/Application Support/com.seat.connectedcar.drivemii/home";
    out.push(AppDescriptor {
        app_id: AppId::Drivemii,
        display_name: "DriveMii App".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Library/Preferences/com.seat.connectedcar.drivemii.plist".into(),
            definitive: true,
        }],
        bundle_id: Some("com.seat.connectedcar.drivemii".into()),
        artifact_specs: vec![
            spec(
                "Library/Preferences/com.seat.connectedcar.drivemii.plist",
                Plist,
                &[VehicleInfo],
                mii_ios_ref,
            ),
            spec(
                "Documents/ElectricalService.sql",
                Sqlite,
                &[Recuperation],
                mii_ios_ref,
            ),
            spec(
                &format!("{mii_home}/*MapSettings_.tlv"),
                TlvMapsettings,
                &[NavDestination],
                mii_ios_ref,
            ),
            spec_encrypted(&format!("{mii_home}/fav/locations.sqlite"), mii_ios_ref),
            spec_encrypted(&format!("{mii_home}/fav/markers.sqlite"), mii_ios_ref),
            spec_encrypted(&format!("{mii_home}/itn/itineraries.sqlite"), mii_ios_ref),
            spec_encrypted(&format!("{mii_home}/tracks/tracks.sqlite"), mii_ios_ref),
        ],
        tested_version: "3.0".into(),
        tested_vehicle: "Seat Mii electric Plus".into(),
    });

    // -- Seat Connect ----------------------------------------------------------
    let seat_ref = "observed: Seat Connect/Android v1.1.29, Seat Mii electric Plus";
    out.push(AppDescriptor {
        app_id: AppId::SeatConnect,
        display_name: "Seat Connect".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.seat.connectedcar.mod2connectapp".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec(
                "app_webview/Default/Web Data",
                Sqlite,
                &[Identity],
                seat_ref,
            ),
            spec(
                "databases/ModAppDatabase.db",
                Sqlite,
                &[Identity, VehicleInfo],
                seat_ref,
            ),
        ],
        tested_version: "1.1.29".into(),
        tested_vehicle: "Seat Mii electric Plus".into(),
    });
    out.push(AppDescriptor {
        app_id: AppId::SeatConnect,
        display_name: "Seat Connect App".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Library/Preferences/com.seat.connectedcar.mod3connectapp.plist".into(),
            definitive: true,
        }],
        bundle_id: Some("com.seat.connectedcar.mod3connectapp".into()),
        artifact_specs: vec![spec(
            "Library/Preferences/com.seat.connectedcar.mod3connectapp.plist",
            Plist,
            &[Identity, VehicleInfo, StatusSnapshot],
            "observed: Seat Connect App/iOS v1.1.29, Seat Mii electric Plus",
        )],
        tested_version: "1.1.29".into(),
        tested_vehicle: "Seat Mii electric Plus".into(),
    });

    // -- Tesla -----------------------------------------------------------------
    let tesla_ref = "observed: Tesla/Android v3.10.8-v3.10.9, Tesla Model S 75D and Model 3";
    out.push(AppDescriptor {
        app_id: AppId::Tesla,
        display_name: "Tesla".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "com.teslamotors.tesla".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![
            spec("app_webview/Web Data", Sqlite, &[Identity], tesla_ref),
            spec(
                "cache/http-cache/*",
                Json,
                &[
                    LocationFix,
                    StatusSnapshot,
                    Refuel,
                    Parking,
                    VehicleInfo,
                    Identity,
                ],
                tesla_ref,
            ),
        ],
        tested_version: "3.10.8 / 3.10.9".into(),
        tested_vehicle: "Tesla Model S 75D / Model 3".into(),
    });
    let tesla_ios_ref = "observed: Tesla/iOS v3.10.8-v3.10.9, Tesla Model S 75D and Model 3";
    out.push(AppDescriptor {
        app_id: AppId::Tesla,
        display_name: "Tesla".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![Marker {
            pattern: "Library/Caches/com.teslamotors.TeslaApp/Cache.db".into(),
            definitive: true,
        }],
        bundle_id: Some("com.teslamotors.TeslaApp".into()),
        artifact_specs: vec![
            spec(
                "Library/Caches/com.teslamotors.TeslaApp/Cache.db",
                Sqlite,
                &[VehicleInfo, Identity],
                tesla_ios_ref,
            ),
            spec(
                "Library/Caches/com.teslamotors.TeslaApp/fsCachedData/*",
                Json,
                &[LocationFix, StatusSnapshot, Refuel, Parking],
                tesla_ios_ref,
            ),
        ],
        tested_version: "3.10.8 / 3.10.9".into(),
        tested_vehicle: "Tesla Model S 75D / Model 3".into(),
    });

    // -- We Connect Go -----------------------------------------------------------
    let vw_ref = "observed: We Connect Go/Android v2.13.8, VW Tiguan II";
    out.push(AppDescriptor {
        app_id: AppId::WeconnectGo,
        display_name: "We Connect Go".into(),
        platform: Platform::Android,
        package_or_bundle_markers: vec![Marker {
            pattern: "en.volkswagen.vwconnect".into(),
            definitive: true,
        }],
        bundle_id: None,
        artifact_specs: vec![spec(
            "databases/avacar.db",
            Sqlite,
            &[VehicleInfo, Trip, Refuel, Parking, StatusSnapshot],
            vw_ref,
        )],
        tested_version: "2.13.8".into(),
        tested_vehicle: "VW Tiguan II".into(),
    });
    let vw_ios_ref = "observed: We Connect Go/iOS v2.13.6, VW Tiguan II";
    out.push(AppDescriptor {
        app_id: AppId::WeconnectGo,
        display_name: "We Connect Go".into(),
        platform: Platform::Ios,
        package_or_bundle_markers: vec![
            Marker {
                pattern: "**/avacar.db".into(),
                definitive: false,
            },
            Marker {
                pattern: "Documents/.avacar_SUPPORT/**".into(),
                definitive: false,
            },
            Marker {
                pattern: "**/VW_DataPlug_*.sqlite3".into(),
                definitive: false,
            },
        ],
        bundle_id: Some("de.volkswagen.vwconnect".into()),
        artifact_specs: vec![
            spec(
                "**/avacar.db",
                Sqlite,
                &[VehicleInfo, Trip, Refuel, Parking, StatusSnapshot],
                vw_ios_ref,
            ),
            spec(
                "Documents/.avacar_SUPPORT/_EXTERNAL_DATA/*",
                Image,
                &[StatusSnapshot],
                vw_ios_ref,
            ),
            spec(
                "**/VW_DataPlug_*.sqlite3",
                Sqlite,
                &[VehicleInfo],
                vw_ios_ref,
            ),
        ],
        tested_version: "2.13.6".into(),
        tested_vehicle: "VW Tiguan II".into(),
    });

    out
}

pub fn descriptor(reg: &[AppDescriptor], app: AppId, platform: Platform) -> Option<&AppDescriptor> {
    reg.iter()
        .find(|d| d.app_id == app && d.platform == platform)
}

/// Serialize the registry for export or field overrides.
pub fn registry_to_json(reg: &[AppDescriptor]) -> String {
    serde_json::to_string_pretty(&serde_json::to_value(reg).unwrap()).unwrap()
}

pub fn registry_from_json(bytes: &[u8]) -> Result<Vec<AppDescriptor>, LocatorError> {
    serde_json::from_slice(bytes).map_err(|e| LocatorError::BadRegistry(e.to_string()))
}

// ---------------------------------------------------------------------------
// Detection

/// Content access for iOS marker files; detection needs only paths plus the
/// bytes of candidate markers.
pub trait MarkerRead {
    fn read_marker(&self, path: &str) -> Option<Vec<u8>>;
}

/// Adapter logging marker reads into the custody trail.
pub struct StoreMarkerReader<'a> {
    pub store: &'a EvidenceStore,
    pub source_id: &'a str,
}

impl MarkerRead for StoreMarkerReader<'_> {
    fn read_marker(&self, path: &str) -> Option<Vec<u8>> {
        self.store.read_parsed(self.source_id, path).ok()
    }
}

/// In-memory reader for tests and registry tooling.
impl MarkerRead for std::collections::BTreeMap<String, Vec<u8>> {
    fn read_marker(&self, path: &str) -> Option<Vec<u8>> {
        self.get(path).cloned()
    }
}

/// Find Android containers: one definitive match per registry package whose
/// `/data/data/<package>/` prefix holds at least one file.
pub fn detect_android(reg: &[AppDescriptor], entries: &[FileEntry]) -> Vec<ContainerMatch> {
    let mut out = Vec::new();
    for desc in reg.iter().filter(|d| d.platform == Platform::Android) {
        for marker in &desc.package_or_bundle_markers {
            let root = format!("/data/data/{}", marker.pattern);
            let prefix = format!("{root}/");
            let mut hits: Vec<String> = entries
                .iter()
                .map(|e| e.path.clone())
                .filter(|p| p.starts_with(&prefix))
                .collect();
            hits.sort();
            if !hits.is_empty() {
                out.push(ContainerMatch {
                    descriptor: desc.clone(),
                    container_root: root,
                    confidence: Confidence::Definitive,
                    matched_markers: hits.into_iter().take(3).collect(),
                });
                break;
            }
        }
    }
    out.sort_by(|a, b| a.container_root.cmp(&b.container_root));
    out
}

/// Find iOS containers under the application-data root by probing marker
/// files inside each UUID directory. Unmatched containers are ignored;
/// a container matching two different apps is a registry or fixture error.
pub fn detect_ios(
    reg: &[AppDescriptor],
    entries: &[FileEntry],
    reader: &dyn MarkerRead,
) -> Result<Vec<ContainerMatch>, LocatorError> {
    let mut containers: Vec<String> = Vec::new();
    for e in entries {
        if let Some(root) = ios_container_root(&e.path) {
            if !containers.contains(&root) {
                containers.push(root);
            }
        }
    }
    containers.sort();

    let mut out = Vec::new();
    for root in containers {
        let prefix = format!("{root}/");
        let inside: Vec<&str> = entries
            .iter()
            .filter_map(|e| e.path.strip_prefix(&prefix))
            .collect();

        // Bundle id from the container-manager metadata, when present.
        let metadata_bundle: Option<String> = inside
            .contains(&IOS_METADATA_PLIST)
            .then(|| {
                let bytes = reader.read_marker(&format!("{prefix}{IOS_METADATA_PLIST}"))?;
                let tree = read_plist(&bytes).ok()?;
                tree.get("MCMMetadataIdentifier")
                    .and_then(TreeValue::as_str)
                    .map(str::to_string)
            })
            .flatten();

        let mut matched: Vec<ContainerMatch> = Vec::new();
        for desc in reg.iter().filter(|d| d.platform == Platform::Ios) {
            let mut matched_markers = Vec::new();
            let mut definitive = false;
            for marker in &desc.package_or_bundle_markers {
                if marker.pattern == IOS_METADATA_PLIST {
                    continue; // only meaningful through the bundle id below
                }
                let mut paths: Vec<String> = inside
                    .iter()
                    .filter(|p| glob_match(&marker.pattern, p))
                    .map(|p| format!("{prefix}{p}"))
                    .collect();
                paths.sort();
                if !paths.is_empty() {
                    definitive |= marker.definitive;
                    matched_markers.extend(paths.into_iter().take(2));
                }
            }
            if let (Some(meta), Some(bundle)) = (&metadata_bundle, &desc.bundle_id) {
                if meta == bundle {
                    definitive = true;
                    matched_markers.push(format!("{prefix}{IOS_METADATA_PLIST}"));
                }
            }
            if !matched_markers.is_empty() {
                matched_markers.dedup();
                matched.push(ContainerMatch {
                    descriptor: desc.clone(),
                    container_root: root.clone(),
                    confidence: if definitive {
                        Confidence::Definitive
                    } else {
                        Confidence::Inferred
                    },
                    matched_markers,
                });
            }
        }

        match matched.len() {
            0 => {}
            1 => out.push(matched.pop().unwrap()),
            _ => {
                return Err(LocatorError::AmbiguousContainer {
                    container: root,
                    apps: matched
                        .iter()
                        .map(|m| m.descriptor.app_id.as_str().to_string())
                        .collect(),
                })
            }
        }
    }
    Ok(out)
}

/// Extract `/…/Containers/Data/Application/<UUID>` from a path inside it.
fn ios_container_root(path: &str) -> Option<String> {
    for base in [
        "/private/var/mobile/Containers/Data/Application/",
        "/var/mobile/Containers/Data/Application/",
    ] {
        if let Some(rest) = path.strip_prefix(base) {
            let uuid = rest.split('/').next()?;
            if is_uuid(uuid) {
                return Some(format!("{base}{uuid}"));
            }
        }
    }
    None
}

/// 8-4-4-4-12 hex groups, case-insensitive.
fn is_uuid(s: &str) -> bool {
    let groups: Vec<&str> = s.split('-').collect();
    groups.len() == 5
        && [8usize, 4, 4, 4, 12]
            .iter()
            .zip(&groups)
            .all(|(len, g)| g.len() == *len && g.chars().all(|c| c.is_ascii_hexdigit()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(path: &str) -> FileEntry {
        FileEntry {
            path: path.into(),
            size: 0,
            sha256: "0".repeat(64),
            mtime: None,
        }
    }

    #[test]
    fn registry_is_complete() {
        let reg = registry();
        assert_eq!(reg.len(), 20);
        for app in AppId::ALL {
            for platform in [Platform::Android, Platform::Ios] {
                let d = descriptor(&reg, app, platform)
                    .unwrap_or_else(|| panic!("missing {app:?}/{platform:?}"));
                assert!(
                    !d.package_or_bundle_markers.is_empty(),
                    "{app:?}/{platform:?} markers"
                );
                assert!(
                    !d.artifact_specs.is_empty(),
                    "{app:?}/{platform:?} artifact specs"
                );
                for s in &d.artifact_specs {
                    assert!(!s.reference.is_empty());
                }
            }
        }
        // The Android package names are load-bearing detection anchors.
        let packages = [
            (AppId::Myaudi, "en.myaudi.mobile.assistant"),
            (AppId::MyBmw, "de.bmw.connected.mobile20.row"),
            (AppId::Fordpass, "com.ford.fordpasseu"),
            (AppId::MercedesMe, "com.daimler.mbfa.android"),
            (AppId::Myopel, "com.psa.mym.myopel"),
            (AppId::Onstar, "com.gme.opel.owner.android"),
            (AppId::Drivemii, "com.seat.connectedcar.drivemii"),
            (AppId::SeatConnect, "com.seat.connectedcar.mod2connectapp"),
            (AppId::Tesla, "com.teslamotors.tesla"),
            (AppId::WeconnectGo, "en.volkswagen.vwconnect"),
        ];
        for (app, pkg) in packages {
            let d = descriptor(&reg, app, Platform::Android).unwrap();
            assert_eq!(d.package_or_bundle_markers[0].pattern, pkg);
        }
    }

    #[test]
    fn registry_round_trips_through_json() {
        let reg = registry();
        let json = registry_to_json(&reg);
        let back = registry_from_json(json.as_bytes()).unwrap();
        assert_eq!(reg, back);
    }

    #[test]
    fn android_detection_by_package_prefix() {
        let reg = registry();
        let inv = vec![
            entry("/data/data/com.psa.mym.myopel/shared_prefs/com.psa.mym.myopel_preferences.xml"),
            entry("/data/data/com.example.foo/files/x"),
        ];
        let matches = detect_android(&reg, &inv);
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].descriptor.app_id, AppId::Myopel);
        assert_eq!(matches[0].container_root, "/data/data/com.psa.mym.myopel");
        assert_eq!(matches[0].confidence, Confidence::Definitive);
        assert!(matches[0].matched_markers[0].starts_with(&matches[0].container_root));

        assert!(detect_android(&reg, &[]).is_empty());
    }

    #[test]
    fn ios_detection_by_marker_file() {
        let reg = registry();
        let c1 =
            "/private/var/mobile/Containers/Data/Application/11111111-2222-3333-4444-555555555555";
        let c2 =
            "/private/var/mobile/Containers/Data/Application/AAAAAAAA-BBBB-CCCC-DDDD-EEEEEEEEEEEE";
        let inv = vec![
            entry(&format!(
                "{c1}/Library/Preferences/com.seat.connectedcar.drivemii.plist"
            )),
            entry(&format!("{c2}/Documents/unrelated.txt")),
        ];
        let empty = std::collections::BTreeMap::new();
        let matches = detect_ios(&reg, &inv, &empty).unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].descriptor.app_id, AppId::Drivemii);
        assert_eq!(matches[0].confidence, Confidence::Definitive);
        assert!(matches[0].matched_markers[0].starts_with(c1));
    }

    #[test]
    fn two_apps_in_one_container_is_ambiguous() {
        let reg = registry();
        let c =
            "/private/var/mobile/Containers/Data/Application/11111111-2222-3333-4444-555555555555";
        let inv = vec![
            entry(&format!(
                "{c}/Library/Preferences/com.seat.connectedcar.drivemii.plist"
            )),
            entry(&format!(
                "{c}/Library/Preferences/com.seat.connectedcar.mod3connectapp.plist"
            )),
        ];
        let empty = std::collections::BTreeMap::new();
        let err = detect_ios(&reg, &inv, &empty).unwrap_err();
        assert!(
            matches!(err, LocatorError::AmbiguousContainer { .. }),
            "{err}"
        );
    }

    #[test]
    fn same_app_in_two_containers_is_two_matches() {
        let reg = registry();
        let c1 =
            "/private/var/mobile/Containers/Data/Application/11111111-2222-3333-4444-555555555555";
        let c2 =
            "/private/var/mobile/Containers/Data/Application/99999999-2222-3333-4444-555555555555";
        let inv = vec![
            entry(&format!(
                "{c1}/Library/Caches/com.teslamotors.TeslaApp/Cache.db"
            )),
            entry(&format!(
                "{c2}/Library/Caches/com.teslamotors.TeslaApp/Cache.db"
            )),
        ];
        let empty = std::collections::BTreeMap::new();
        let matches = detect_ios(&reg, &inv, &empty).unwrap();
        assert_eq!(matches.len(), 2);
    }

    #[test]
    fn weak_marker_yields_inferred_confidence() {
        let reg = registry();
        let c =
            "/private/var/mobile/Containers/Data/Application/11111111-2222-3333-4444-555555555555";
        let inv = vec![entry(&format!("{c}/Documents/maps.db"))];
        let empty = std::collections::BTreeMap::new();
        let matches = detect_ios(&reg, &inv, &empty).unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].descriptor.app_id, AppId::Myaudi);
        assert_eq!(matches[0].confidence, Confidence::Inferred);
    }

    #[test]
    fn uuid_recognition() {
        assert!(is_uuid("1e9b5df8-855a-8f49-0f84-8099ef3e550c"));
        assert!(is_uuid("AAAAAAAA-BBBB-CCCC-DDDD-EEEEEEEEEEEE"));
        assert!(!is_uuid("not-a-uuid"));
        assert!(!is_uuid("1e9b5df8855a8f490f848099ef3e550c"));
    }
}
