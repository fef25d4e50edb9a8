//! Low-level fixture writers. The SQLite and plist writers go through
//! independent third-party encoders, so reading them back exercises our own
//! decoders against externally produced bytes.

use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rusqlite::Connection;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("sqlite writer: {0}")]
    Sqlite(#[from] rusqlite::Error),
    #[error("plist writer: {0}")]
    Plist(#[from] plist::Error),
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RenderError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// SQLite cell for the fixture writer.
#[derive(Debug, Clone)]
pub enum Sv {
    Null,
    I(i64),
    R(f64),
    T(String),
    B(Vec<u8>),
}

impl Sv {
    pub fn t(s: impl Into<String>) -> Sv {
        Sv::T(s.into())
    }
}

impl rusqlite::ToSql for Sv {
    fn to_sql(&self) -> rusqlite::Result<rusqlite::types::ToSqlOutput<'_>> {
        use rusqlite::types::{ToSqlOutput, Value};
        Ok(match self {
            Sv::Null => ToSqlOutput::Owned(Value::Null),
            Sv::I(i) => ToSqlOutput::Owned(Value::Integer(*i)),
            Sv::R(r) => ToSqlOutput::Owned(Value::Real(*r)),
            Sv::T(t) => ToSqlOutput::Owned(Value::Text(t.clone())),
            Sv::B(b) => ToSqlOutput::Owned(Value::Blob(b.clone())),
        })
    }
}

pub struct TableFixture<'a> {
    pub ddl: &'a str,
    pub insert: &'a str,
    pub rows: Vec<Vec<Sv>>,
}

/// Write a database with a standard SQLite engine, one transaction, so the
/// image is byte-deterministic for identical content.
pub fn write_sqlite(path: &Path, tables: &[TableFixture]) -> Result<(), RenderError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    if path.exists() {
        std::fs::remove_file(path)?;
    }
    let conn = Connection::open(path)?;
    conn.execute_batch("BEGIN;")?;
    for t in tables {
        conn.execute_batch(t.ddl)?;
        if !t.rows.is_empty() {
            let mut stmt = conn.prepare(t.insert)?;
            for row in &t.rows {
                stmt.execute(rusqlite::params_from_iter(row.iter()))?;
            }
        }
    }
    conn.execute_batch("COMMIT;")?;
    Ok(())
}

/// Serialize a plist value in the requested encoding.
pub fn write_plist(path: &Path, value: &plist::Value, binary: bool) -> Result<(), RenderError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let file = std::fs::File::create(path)?;
    if binary {
        plist::to_writer_binary(file, value)?;
    } else {
        plist::to_writer_xml(file, value)?;
    }
    Ok(())
}

pub fn plist_dict(entries: Vec<(&str, plist::Value)>) -> plist::Value {
    let mut dict = plist::Dictionary::new();
    for (k, v) in entries {
        dict.insert(k.to_string(), v);
    }
    plist::Value::Dictionary(dict)
}

pub fn plist_date(utc_ms: i64) -> plist::Value {
    let st = std::time::UNIX_EPOCH + std::time::Duration::from_millis(utc_ms as u64);
    plist::Value::Date(plist::Date::from(st))
}

/// Android shared-preferences XML.
pub fn prefs_xml(entries: &[(&str, PrefValue)]) -> String {
    let mut out = String::from("<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n");
    for (name, value) in entries {
        match value {
            PrefValue::Str(s) => out.push_str(&format!(
                "    <string name=\"{name}\">{}</string>\n",
                xml_escape(s)
            )),
            PrefValue::Bool(b) => {
                out.push_str(&format!("    <boolean name=\"{name}\" value=\"{b}\" />\n"))
            }
            PrefValue::Int(i) => {
                out.push_str(&format!("    <int name=\"{name}\" value=\"{i}\" />\n"))
            }
            PrefValue::Long(l) => {
                out.push_str(&format!("    <long name=\"{name}\" value=\"{l}\" />\n"))
            }
        }
    }
    out.push_str("</map>\n");
    out
}

pub enum PrefValue {
    Str(String),
    Bool(bool),
    Int(i32),
    Long(i64),
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn gzip(bytes: &[u8]) -> Vec<u8> {
    use std::io::Write;
    let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::new(6));
    enc.write_all(bytes).unwrap();
    enc.finish().unwrap()
}

/// TLV container: destination strings as length-prefixed UTF-8 records among
/// binary noise fields. Noise bytes stay outside the printable ranges so the
/// string scan recovers exactly the planted text.
pub fn tlv_map_settings(destinations: &[String], seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7d5f_a001);
    let mut out = Vec::new();
    out.extend_from_slice(&[0x02, 0x00, 0x01, 0x1a]); // container preamble
    for dest in destinations {
        // Binary field: tag, length, high-bit noise.
        let noise_len = (rng.next_u32() % 6 + 2) as usize;
        out.push(0x81);
        out.push(noise_len as u8);
        for _ in 0..noise_len {
            out.push(0xf0 | (rng.next_u32() % 8) as u8);
        }
        // Text field: tag, u16 length, UTF-8 payload.
        let payload = dest.as_bytes();
        out.push(0x10);
        out.extend_from_slice(&(payload.len() as u16).to_le_bytes());
        out.extend_from_slice(payload);
        out.push(0x00);
    }
    out.extend_from_slice(&[0x81, 0x02, 0xfe, 0xff]);
    out
}

/// Scramble a plaintext database image with a keyed ChaCha keystream; the
/// result has ciphertext-grade entropy and no recognizable header.
pub fn scramble(bytes: &[u8], seed: u64, label: &str) -> Vec<u8> {
    let mut key = [0u8; 32];
    let label_hash = crate::util::sha256(label.as_bytes());
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..32].copy_from_slice(&label_hash[..24]);
    let mut rng = ChaCha8Rng::from_seed(key);
    let mut keystream = vec![0u8; bytes.len()];
    rng.fill_bytes(&mut keystream);
    bytes.iter().zip(keystream).map(|(b, k)| b ^ k).collect()
}

/// Minimal JPEG: valid SOI/APP0 header, enough for magic-number sniffing.
pub fn jpeg_stub(seed: u64) -> Vec<u8> {
    let mut out = vec![
        0xff, 0xd8, 0xff, 0xe0, 0x00, 0x10, b'J', b'F', b'I', b'F', 0x00, 0x01, 0x01, 0x00, 0x00,
        0x48, 0x00, 0x48, 0x00, 0x00,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00ca_fe01);
    let mut body = vec![0u8; 256];
    rng.fill_bytes(&mut body);
    out.extend_from_slice(&body);
    out.extend_from_slice(&[0xff, 0xd9]);
    out
}

pub fn png_stub(seed: u64) -> Vec<u8> {
    let mut out = vec![0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00ca_fe02);
    let mut body = vec![0u8; 128];
    rng.fill_bytes(&mut body);
    out.extend_from_slice(&body);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{detect_encrypted_db, read_sqlite, read_tlv_strings, Value};

    #[test]
    fn sqlite_writer_round_trips_through_own_reader() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("avacar.db");
        write_sqlite(
            &path,
            &[TableFixture {
                ddl: "CREATE TABLE trips (id INTEGER PRIMARY KEY, start_time INTEGER, end_time INTEGER, start_address TEXT, destination_address TEXT, distance_km REAL)",
                insert: "INSERT INTO trips VALUES (?1, ?2, ?3, ?4, ?5, ?6)",
                rows: vec![
                    vec![Sv::I(1), Sv::I(1_604_400_000_000), Sv::I(1_604_400_600_000), Sv::t("A"), Sv::t("B"), Sv::R(7.5)],
                    vec![Sv::I(2), Sv::I(1_604_404_000_000), Sv::I(1_604_404_500_000), Sv::t("B"), Sv::t("C"), Sv::R(4.25)],
                    vec![Sv::I(3), Sv::I(1_604_408_000_000), Sv::Null, Sv::t("C"), Sv::Null, Sv::Null],
                ],
            }],
        )
        .unwrap();

        let bytes = std::fs::read(&path).unwrap();
        let set = read_sqlite(&bytes).unwrap();
        let trips = set.table("trips").unwrap();
        assert_eq!(
            trips.columns,
            vec![
                "id",
                "start_time",
                "end_time",
                "start_address",
                "destination_address",
                "distance_km"
            ]
        );
        assert_eq!(trips.rows.len(), 3);
        assert_eq!(trips.rows[0][3], Value::Text("A".into()));
        assert_eq!(trips.rows[1][5], Value::Real(4.25));
        assert_eq!(trips.rows[2][2], Value::Null);
        // Rowid aliasing fills the INTEGER PRIMARY KEY column.
        assert_eq!(trips.rows[2][0], Value::Integer(3));
        assert!(!detect_encrypted_db(&bytes));
    }

    #[test]
    fn sqlite_writer_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let fixture = || {
            vec![TableFixture {
                ddl: "CREATE TABLE t (a INTEGER, b TEXT)",
                insert: "INSERT INTO t VALUES (?1, ?2)",
                rows: (0..50)
                    .map(|i| vec![Sv::I(i), Sv::t(format!("row {i}"))])
                    .collect(),
            }]
        };
        let p1 = dir.path().join("a.db");
        let p2 = dir.path().join("b.db");
        write_sqlite(&p1, &fixture()).unwrap();
        write_sqlite(&p2, &fixture()).unwrap();
        assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
    }

    #[test]
    fn scrambled_database_detected_as_encrypted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.db");
        write_sqlite(
            &path,
            &[TableFixture {
                ddl: "CREATE TABLE secrets (v TEXT)",
                insert: "INSERT INTO secrets VALUES (?1)",
                rows: (0..200)
                    .map(|i| vec![Sv::t(format!("value {i}"))])
                    .collect(),
            }],
        )
        .unwrap();
        let plain = std::fs::read(&path).unwrap();
        assert!(!detect_encrypted_db(&plain));
        let scrambled = scramble(&plain, 9, "databases/mbfa.db");
        assert!(detect_encrypted_db(&scrambled));
        assert_eq!(scrambled.len(), plain.len());
    }

    #[test]
    fn tlv_round_trip_preserves_order_and_duplicates() {
        let dests = vec![
            "M\u{fc}nster".to_string(),
            "Hafenweg".to_string(),
            "M\u{fc}nster".to_string(),
        ];
        let bytes = tlv_map_settings(&dests, 3);
        assert_eq!(read_tlv_strings(&bytes), dests);
    }

    #[test]
    fn image_stubs_sniff_correctly() {
        use crate::formats::{sniff_image, ImageFormat};
        assert_eq!(sniff_image(&jpeg_stub(1)), ImageFormat::Jpeg);
        assert_eq!(sniff_image(&png_stub(1)), ImageFormat::Png);
    }

    #[test]
    fn plist_cross_encoding_reads_identically() {
        use crate::formats::read_plist;
        let dir = tempfile::tempdir().unwrap();
        let value = plist_dict(vec![
            ("vin", plist::Value::String("WVWZZZ5NZJM000000".into())),
            ("last_login", plist_date(1_604_412_000_000)),
            ("count", plist::Value::Integer(3.into())),
            ("ratio", plist::Value::Real(0.5)),
            (
                "nested",
                plist::Value::Array(vec![
                    plist::Value::String("a".into()),
                    plist::Value::Boolean(true),
                ]),
            ),
        ]);
        let xml = dir.path().join("x.plist");
        let bin = dir.path().join("b.plist");
        write_plist(&xml, &value, false).unwrap();
        write_plist(&bin, &value, true).unwrap();
        let tx = read_plist(&std::fs::read(&xml).unwrap()).unwrap();
        let tb = read_plist(&std::fs::read(&bin).unwrap()).unwrap();
        assert_eq!(tx, tb);
        assert_eq!(
            tx.get("vin").and_then(|v| v.as_str()),
            Some("WVWZZZ5NZJM000000")
        );
        assert_eq!(
            tx.get("last_login"),
            Some(&crate::formats::TreeValue::Timestamp(1_604_412_000_000))
        );
    }
}
