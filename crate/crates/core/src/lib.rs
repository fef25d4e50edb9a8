//! Forensic toolkit for vehicle assistant app artifacts.
//!
//! The crate turns logical extractions of Android and iOS devices into a
//! provenance-tracked timeline of driver activity (trips, refuelings,
//! parking, lock/unlock, locations) and correlates that timeline against
//! manufacturer GDPR Subject Access Request exports.
//!
//! Pipeline stages, each its own module:
//!
//! * [`evidence`] — open an extraction (directory, zip, tar), inventory and
//!   hash every file, maintain the chain-of-custody log.
//! * [`locator`] — find known app containers in the inventory and bind them
//!   to registry descriptors.
//! * [`formats`] — low-level decoders shared by all extractors (SQLite,
//!   property lists, JSON, gzip, shared-preferences XML, TLV strings,
//!   Base64 images) plus encrypted-database detection.
//! * [`extract`] — per-app artifact extraction into raw records.
//! * [`event`] — normalization of raw records into canonical events.
//! * [`timeline`] — cross-source merge, dedup, queries and summaries.
//! * [`sar`] — Subject Access Request import, telemetry, correlation.
//! * [`fixtures`] — synthetic ground-truth extraction generator, the
//!   independent oracle used by the test suite.
//! * [`report`] — machine- and human-readable output emitters.

pub mod event;
pub mod evidence;
pub mod extract;
pub mod fixtures;
pub mod formats;
pub mod locator;
pub mod report;
pub mod sar;
pub mod timeline;

pub mod util;

pub use event::{CanonicalEvent, EventKind, GeoPoint, IdentityRecord, Provenance};
pub use evidence::{EvidenceSource, EvidenceStore, FileEntry, SourceKind};
pub use formats::{TableSet, TreeValue, Value};
pub use locator::{AppDescriptor, AppId, ContainerMatch, Platform};
pub use timeline::Timeline;

/// Version string stamped into provenance records.
pub const EXTRACTOR_VERSION: &str = env!("CARGO_PKG_VERSION");
