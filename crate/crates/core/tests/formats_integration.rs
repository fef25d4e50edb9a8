//! Format readers against externally produced inputs: databases written by a
//! standard SQLite engine (including WAL and overflow structures), plists
//! from the reference encoder, and independently computed expected values.

use proptest::prelude::*;
use rusqlite::Connection;

use vapp_core::event::{normalize_timestamp, Epoch};
use vapp_core::formats::{
    detect_encrypted_db, read_gzip_json, read_json, read_plist, read_sqlite,
    read_sqlite_with_sidecars, read_tlv_strings, read_xml_prefs, SqliteError, TreeValue, Value,
};

/// Civil-calendar day arithmetic, written independently of chrono, as the
/// oracle for ISO 8601 conversions.
fn civil_to_unix_ms(y: i64, m: i64, d: i64, hh: i64, mm: i64, ss: i64) -> i64 {
    let (y, m_adj) = if m <= 2 { (y - 1, m + 9) } else { (y, m - 3) };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let doy = (153 * m_adj + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    let days = era * 146_097 + doe - 719_468;
    ((days * 86_400) + hh * 3600 + mm * 60 + ss) * 1000
}

#[test]
fn iso8601_matches_independent_calendar_arithmetic() {
    let cases = [
        ("2020-11-03T14:00:00Z", 2020, 11, 3, 14, 0, 0),
        ("2001-01-01T00:00:00Z", 2001, 1, 1, 0, 0, 0),
        ("2020-02-29T23:59:59Z", 2020, 2, 29, 23, 59, 59),
        ("2099-12-31T00:00:01Z", 2099, 12, 31, 0, 0, 1),
    ];
    for (text, y, m, d, hh, mm, ss) in cases {
        let expected = civil_to_unix_ms(y, m, d, hh, mm, ss);
        let got = normalize_timestamp(&Value::Text(text.into()), Epoch::Iso8601).unwrap();
        assert_eq!(got, expected, "{text}");
    }
    // Frozen value used throughout the fixtures.
    assert_eq!(civil_to_unix_ms(2020, 11, 3, 14, 0, 0), 1_604_412_000_000);
}

fn scratch_db(name: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    (dir, path)
}

#[test]
fn multi_page_btree_and_overflow_payloads() {
    let (_dir, path) = scratch_db("big.db");
    let conn = Connection::open(&path).unwrap();
    conn.execute_batch(
        "CREATE TABLE blobs (id INTEGER PRIMARY KEY, body TEXT, raw BLOB);
         CREATE TABLE numbers (n INTEGER, half REAL);",
    )
    .unwrap();
    let long_text = "artifact-".repeat(3000); // ~27 KB: forces overflow pages
    let blob: Vec<u8> = (0..9000u32).map(|i| (i % 251) as u8).collect();
    conn.execute(
        "INSERT INTO blobs VALUES (1, ?1, ?2)",
        rusqlite::params![long_text, blob],
    )
    .unwrap();
    // Enough rows for interior b-tree pages.
    {
        let mut stmt = conn.prepare("INSERT INTO numbers VALUES (?1, ?2)").unwrap();
        for i in 0..3000i64 {
            stmt.execute(rusqlite::params![i, i as f64 / 2.0]).unwrap();
        }
    }
    drop(conn);

    let set = read_sqlite(&std::fs::read(&path).unwrap()).unwrap();
    let blobs = set.table("blobs").unwrap();
    assert_eq!(blobs.rows.len(), 1);
    assert_eq!(blobs.rows[0][1], Value::Text(long_text));
    assert_eq!(blobs.rows[0][2], Value::Bytes(blob));

    let numbers = set.table("numbers").unwrap();
    assert_eq!(numbers.rows.len(), 3000);
    assert_eq!(numbers.rows[2999][0], Value::Integer(2999));
    assert_eq!(numbers.rows[1][1], Value::Real(0.5));
}

#[test]
fn utf16_encoded_database_decodes() {
    let (_dir, path) = scratch_db("utf16.db");
    let conn = Connection::open(&path).unwrap();
    conn.pragma_update(None, "encoding", "UTF-16le").unwrap();
    conn.execute_batch("CREATE TABLE t (name TEXT); INSERT INTO t VALUES ('M\u{fc}nster');")
        .unwrap();
    drop(conn);
    let set = read_sqlite(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(
        set.table("t").unwrap().rows[0][0],
        Value::Text("M\u{fc}nster".into())
    );
}

#[test]
fn empty_database_has_no_user_tables() {
    let (_dir, path) = scratch_db("empty.db");
    let conn = Connection::open(&path).unwrap();
    // Force the file to materialize with a valid header.
    conn.pragma_update(None, "user_version", 7).unwrap();
    drop(conn);
    let set = read_sqlite(&std::fs::read(&path).unwrap()).unwrap();
    assert!(set.tables.is_empty());
}

#[test]
fn wal_sidecar_merges_committed_frames() {
    let (_dir, path) = scratch_db("waldb.db");
    let conn = Connection::open(&path).unwrap();
    conn.pragma_update(None, "journal_mode", "WAL").unwrap();
    conn.pragma_update(None, "wal_autocheckpoint", 0).unwrap();
    conn.execute_batch(
        "CREATE TABLE trips (id INTEGER PRIMARY KEY, dest TEXT);
         INSERT INTO trips VALUES (1, 'Hafenweg');
         INSERT INTO trips VALUES (2, 'Schlossplatz');",
    )
    .unwrap();
    // Copy both files while the connection is open, so nothing has been
    // checkpointed back into the main database yet.
    let db_bytes = std::fs::read(&path).unwrap();
    let wal_bytes = std::fs::read(path.with_extension("db-wal")).unwrap();
    assert!(!wal_bytes.is_empty());
    drop(conn);

    // Without the sidecar the table is invisible or empty.
    let plain_rows = match read_sqlite(&db_bytes) {
        Ok(set) => set.table("trips").map(|t| t.rows.len()).unwrap_or(0),
        Err(SqliteError::Corrupt { partial, .. }) => partial
            .tables
            .get("trips")
            .map(|t| t.rows.len())
            .unwrap_or(0),
        Err(SqliteError::NotSqlite) => panic!("header should parse"),
    };
    assert_eq!(plain_rows, 0);

    // With the WAL merged, the committed rows appear.
    let set = read_sqlite_with_sidecars(&db_bytes, Some(&wal_bytes), None).unwrap();
    let trips = set.table("trips").unwrap();
    assert_eq!(trips.rows.len(), 2);
    assert_eq!(trips.rows[1][1], Value::Text("Schlossplatz".into()));
    assert!(set.notes.iter().any(|n| n.contains("wal merged")));
}

#[test]
fn rollback_journal_restores_pre_transaction_pages() {
    // Two structurally identical databases: "before" and "after" images.
    let (_dir, before_path) = scratch_db("before.db");
    let conn = Connection::open(&before_path).unwrap();
    conn.execute_batch("CREATE TABLE t (v TEXT); INSERT INTO t VALUES ('original');")
        .unwrap();
    drop(conn);
    let before = std::fs::read(&before_path).unwrap();

    let (_dir2, after_path) = scratch_db("after.db");
    let conn = Connection::open(&after_path).unwrap();
    conn.execute_batch("CREATE TABLE t (v TEXT); INSERT INTO t VALUES ('tampered');")
        .unwrap();
    drop(conn);
    let after = std::fs::read(&after_path).unwrap();

    // Synthesize a hot journal holding every pre-transaction page image.
    let page_size = u16::from_be_bytes([before[16], before[17]]) as usize;
    let n_pages = before.len() / page_size;
    let mut journal = vec![0u8; 512];
    journal[..8].copy_from_slice(&[0xd9, 0xd5, 0x05, 0xf9, 0x20, 0xa1, 0x63, 0xd7]);
    journal[8..12].copy_from_slice(&(n_pages as u32).to_be_bytes());
    journal[12..16].copy_from_slice(&0u32.to_be_bytes()); // nonce
    journal[16..20].copy_from_slice(&(n_pages as u32).to_be_bytes()); // initial size
    journal[20..24].copy_from_slice(&512u32.to_be_bytes()); // sector size
    journal[24..28].copy_from_slice(&(page_size as u32).to_be_bytes());
    for page in 0..n_pages {
        journal.extend_from_slice(&(page as u32 + 1).to_be_bytes());
        journal.extend_from_slice(&before[page * page_size..(page + 1) * page_size]);
        journal.extend_from_slice(&0u32.to_be_bytes()); // record checksum
    }

    let set = read_sqlite_with_sidecars(&after, None, Some(&journal)).unwrap();
    assert_eq!(
        set.table("t").unwrap().rows[0][0],
        Value::Text("original".into())
    );
    assert!(set
        .notes
        .iter()
        .any(|n| n.contains("rollback journal applied")));
}

#[test]
fn encrypted_detection_has_no_false_positives_on_real_databases() {
    for rows in [0usize, 5, 500] {
        let (_dir, path) = scratch_db("plain.db");
        let conn = Connection::open(&path).unwrap();
        conn.execute_batch("CREATE TABLE t (a TEXT)").unwrap();
        for i in 0..rows {
            conn.execute("INSERT INTO t VALUES (?1)", [format!("value {i}")])
                .unwrap();
        }
        drop(conn);
        let bytes = std::fs::read(&path).unwrap();
        assert!(
            !detect_encrypted_db(&bytes),
            "false positive at {rows} rows"
        );
        assert!(read_sqlite(&bytes).is_ok());
        std::fs::remove_file(&path).unwrap();
    }
}

// ---------------------------------------------------------------------------
// Totality: every reader returns a value or a typed error over arbitrary
// bytes — no panics, no unbounded work.

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn readers_never_panic_on_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..2048)) {
        let _ = read_sqlite(&bytes);
        let _ = read_plist(&bytes);
        let _ = read_json(&bytes);
        let _ = read_gzip_json(&bytes);
        let _ = read_xml_prefs(&bytes);
        let _ = read_tlv_strings(&bytes);
        let _ = detect_encrypted_db(&bytes);
    }

    #[test]
    fn sqlite_prefix_mutations_never_panic(seed_rows in 1usize..20, flip in any::<(u16, u8)>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.db");
        let conn = Connection::open(&path).unwrap();
        conn.execute_batch("CREATE TABLE t (a INTEGER, b TEXT)").unwrap();
        for i in 0..seed_rows {
            conn.execute("INSERT INTO t VALUES (?1, ?2)", rusqlite::params![i as i64, "x".repeat(i)]).unwrap();
        }
        drop(conn);
        let mut bytes = std::fs::read(&path).unwrap();
        let idx = (flip.0 as usize) % bytes.len();
        bytes[idx] ^= flip.1 | 1;
        let _ = read_sqlite(&bytes);
    }

    #[test]
    fn tree_value_json_round_trip(v in tree_value_strategy()) {
        let json = serde_json::to_string(&v).unwrap();
        let back: TreeValue = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(v, back);
    }
}

fn tree_value_strategy() -> impl Strategy<Value = TreeValue> {
    let leaf = prop_oneof![
        Just(TreeValue::Null),
        any::<bool>().prop_map(TreeValue::Bool),
        any::<i64>().prop_map(TreeValue::Int),
        // Finite reals only; NaN never round-trips by definition.
        (-1e15f64..1e15).prop_map(TreeValue::Real),
        "[a-zA-Z0-9 ]{0,12}".prop_map(TreeValue::Text),
        proptest::collection::vec(any::<u8>(), 0..16).prop_map(TreeValue::Bytes),
        (946_684_800_000i64..4_102_444_800_000).prop_map(TreeValue::Timestamp),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 0..4).prop_map(TreeValue::List),
            proptest::collection::btree_map("[a-z]{1,6}", inner, 0..4).prop_map(TreeValue::Map),
        ]
    })
}
