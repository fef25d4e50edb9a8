//! Low-level file-format decoders shared by every extractor.
//!
//! All readers are total over arbitrary bytes: they return a value or a typed
//! error and perform no filesystem or network access. Encrypted databases are
//! detected, never partially parsed.

mod json;
mod media;
mod plist;
mod prefs;
mod sqlite;
mod tlv;
mod value;

pub use json::{
    gunzip, read_gzip_json, read_gzip_json_doc, read_json, read_json_doc, JsonDoc, JsonError,
};
pub use media::{decode_base64_image, sniff_image, DecodedImage, ImageFormat, NotBase64};
pub use plist::{read_plist, PlistError, APPLE_EPOCH_OFFSET_S};
pub use prefs::{read_xml_prefs, NotPrefsXml};
pub use sqlite::{
    detect_encrypted_db, read_sqlite, read_sqlite_with_sidecars, SqliteError, SQLITE_MAGIC,
};
pub use tlv::read_tlv_strings;
pub use value::{Table, TableSet, TreeValue, Value};

/// Umbrella error for callers dispatching over several formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Sqlite(#[from] SqliteError),
    #[error(transparent)]
    Plist(#[from] PlistError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    PrefsXml(#[from] NotPrefsXml),
    #[error(transparent)]
    Base64(#[from] NotBase64),
}
