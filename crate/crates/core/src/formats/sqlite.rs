//! Read-only decoder for the SQLite 3 single-file database format.
//!
//! Implemented against the published file format (header, table b-trees,
//! record serial types, overflow chains) rather than an embedded engine, so
//! damaged or partially overwritten databases still yield whatever structure
//! survives. WAL and rollback-journal sidecars can be merged in before
//! decoding. Deleted-record recovery is out of scope; freelist pages are
//! walked only to validate structure.

use std::collections::{BTreeMap, BTreeSet};

use super::value::{Table, TableSet, Value};

pub const SQLITE_MAGIC: &[u8; 16] = b"SQLite format 3\0";

/// Result of decoding; `Corrupt` still carries everything decoded so far.
#[derive(Debug, thiserror::Error)]
pub enum SqliteError {
    #[error("not an SQLite database (magic header mismatch)")]
    NotSqlite,
    #[error("corrupt database structure: {detail}")]
    Corrupt {
        detail: String,
        partial: Box<TableSet>,
    },
}

/// Decode all user tables from a database image.
pub fn read_sqlite(bytes: &[u8]) -> Result<TableSet, SqliteError> {
    read_sqlite_with_sidecars(bytes, None, None)
}

/// Decode with optional `-wal` / `-journal` sidecar contents merged in.
///
/// A valid WAL overlays committed frames onto their pages; a hot rollback
/// journal restores the pre-transaction page images it holds.
pub fn read_sqlite_with_sidecars(
    bytes: &[u8],
    wal: Option<&[u8]>,
    journal: Option<&[u8]>,
) -> Result<TableSet, SqliteError> {
    if bytes.len() < 100 || &bytes[..16] != SQLITE_MAGIC {
        return Err(SqliteError::NotSqlite);
    }
    let mut notes = Vec::new();

    let raw_page_size = u16::from_be_bytes([bytes[16], bytes[17]]);
    let page_size: usize = if raw_page_size == 1 {
        65536
    } else {
        raw_page_size as usize
    };
    if !(512..=65536).contains(&page_size) || !page_size.is_power_of_two() {
        return Err(corrupt("invalid page size", TableSet::default()));
    }
    let reserved = bytes[20] as usize;
    // The format requires a usable page size of at least 480 bytes; smaller
    // values also break the local-payload arithmetic below.
    if page_size.saturating_sub(reserved) < 480 {
        return Err(corrupt(
            "reserved region exhausts page",
            TableSet::default(),
        ));
    }
    let encoding = match u32::from_be_bytes(bytes[56..60].try_into().unwrap()) {
        0 | 1 => TextEncoding::Utf8, // 0 appears in never-written databases
        2 => TextEncoding::Utf16Le,
        3 => TextEncoding::Utf16Be,
        other => {
            return Err(corrupt(
                &format!("unknown text encoding {other}"),
                TableSet::default(),
            ));
        }
    };

    let mut overlay: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
    let mut page_count = declared_page_count(bytes, page_size);

    if let Some(j) = journal {
        match apply_journal(j, page_size) {
            Ok(pages) if !pages.is_empty() => {
                notes.push(format!(
                    "rollback journal applied: {} page(s) restored",
                    pages.len()
                ));
                overlay.extend(pages);
            }
            Ok(_) => {}
            Err(e) => notes.push(format!("rollback journal ignored: {e}")),
        }
    }
    if let Some(w) = wal {
        match apply_wal(w, page_size) {
            Ok((pages, commit_size)) if !pages.is_empty() => {
                notes.push(format!("wal merged: {} committed frame(s)", pages.len()));
                if commit_size > 0 {
                    page_count = commit_size;
                }
                overlay.extend(pages);
            }
            Ok(_) => {}
            Err(e) => notes.push(format!("wal ignored: {e}")),
        }
    }

    let db = Pager {
        bytes,
        page_size,
        reserved,
        encoding,
        overlay,
        page_count,
    };

    let mut set = TableSet {
        tables: BTreeMap::new(),
        notes: Vec::new(),
    };
    // sqlite_master lives in the b-tree rooted at page 1.
    let master = match db.walk_table(1) {
        Ok(rows) => rows,
        Err(e) => {
            set.notes = notes;
            return Err(corrupt(&format!("schema table: {e}"), set));
        }
    };

    let mut failure: Option<String> = None;
    for (_rowid, rec) in &master {
        let kind = rec.first().and_then(Value::as_str).unwrap_or("");
        if kind != "table" {
            continue;
        }
        let name = match rec.get(1).and_then(Value::as_str) {
            Some(n) if !n.starts_with("sqlite_") => n.to_string(),
            _ => continue,
        };
        let root = match rec.get(3).and_then(Value::as_i64) {
            Some(r) if r > 0 => r as u32,
            _ => {
                notes.push(format!("table {name}: missing root page"));
                continue;
            }
        };
        let sql = rec.get(4).and_then(Value::as_str).unwrap_or("");
        let schema = parse_create_table(sql);
        if schema.without_rowid {
            notes.push(format!("table {name}: WITHOUT ROWID not decoded"));
            set.tables.insert(
                name,
                Table {
                    columns: schema.columns,
                    rows: Vec::new(),
                },
            );
            continue;
        }
        match db.walk_table(root) {
            Ok(rows) => {
                let ncols = schema.columns.len();
                let mut table = Table {
                    columns: schema.columns,
                    rows: Vec::new(),
                };
                for (rowid, mut rec) in rows {
                    // An INTEGER PRIMARY KEY column is stored NULL; the rowid
                    // carries its value.
                    if let Some(ipk) = schema.ipk_column {
                        if let Some(slot) = rec.get_mut(ipk) {
                            if slot.is_null() {
                                *slot = Value::Integer(rowid);
                            }
                        }
                    }
                    rec.resize(ncols.max(rec.len()), Value::Null);
                    table.rows.push(rec);
                }
                set.tables.insert(name, table);
            }
            Err(e) => {
                set.tables.insert(
                    name.clone(),
                    Table {
                        columns: schema.columns,
                        rows: Vec::new(),
                    },
                );
                failure = Some(format!("table {name}: {e}"));
            }
        }
    }

    if let Err(e) = db.check_freelist() {
        notes.push(format!("freelist: {e}"));
    }

    set.notes = notes;
    match failure {
        Some(detail) => Err(corrupt(&detail, set)),
        None => Ok(set),
    }
}

fn corrupt(detail: &str, partial: TableSet) -> SqliteError {
    SqliteError::Corrupt {
        detail: detail.to_string(),
        partial: Box::new(partial),
    }
}

fn declared_page_count(bytes: &[u8], page_size: usize) -> u32 {
    let header_count = u32::from_be_bytes(bytes[28..32].try_into().unwrap());
    // Header size is only trustworthy when the version-valid-for number
    // matches the change counter; otherwise fall back to the file length.
    let change = u32::from_be_bytes(bytes[24..28].try_into().unwrap());
    let valid_for = u32::from_be_bytes(bytes[92..96].try_into().unwrap());
    if header_count > 0 && change == valid_for {
        header_count
    } else {
        (bytes.len() / page_size) as u32
    }
}

#[derive(Clone, Copy, PartialEq)]
enum TextEncoding {
    Utf8,
    Utf16Le,
    Utf16Be,
}

struct Pager<'a> {
    bytes: &'a [u8],
    page_size: usize,
    reserved: usize,
    encoding: TextEncoding,
    overlay: BTreeMap<u32, Vec<u8>>,
    page_count: u32,
}

impl<'a> Pager<'a> {
    fn usable(&self) -> usize {
        self.page_size - self.reserved
    }

    fn page(&self, number: u32) -> Result<&[u8], String> {
        if number == 0 {
            return Err("page number 0".into());
        }
        if let Some(p) = self.overlay.get(&number) {
            return Ok(p.as_slice());
        }
        let start = (number as usize - 1) * self.page_size;
        let end = start + self.page_size;
        if end > self.bytes.len() {
            return Err(format!("page {number} beyond end of file"));
        }
        Ok(&self.bytes[start..end])
    }

    fn max_pages(&self) -> u32 {
        let by_len = (self.bytes.len() / self.page_size) as u32;
        let by_overlay = self.overlay.keys().next_back().copied().unwrap_or(0);
        by_len.max(by_overlay).max(self.page_count)
    }

    /// Walk a table b-tree, returning `(rowid, record)` in key order.
    fn walk_table(&self, root: u32) -> Result<Vec<(i64, Vec<Value>)>, String> {
        let mut out = Vec::new();
        let mut visited = BTreeSet::new();
        self.walk_page(root, 0, &mut visited, &mut out)?;
        Ok(out)
    }

    fn walk_page(
        &self,
        number: u32,
        depth: u32,
        visited: &mut BTreeSet<u32>,
        out: &mut Vec<(i64, Vec<Value>)>,
    ) -> Result<(), String> {
        if depth > 32 {
            return Err("b-tree deeper than 32 levels".into());
        }
        if !visited.insert(number) {
            return Err(format!("b-tree cycle through page {number}"));
        }
        let page = self.page(number)?;
        // Page 1 carries the 100-byte file header before its b-tree header.
        let base = if number == 1 { 100 } else { 0 };
        let hdr = page.get(base..).ok_or("truncated page")?;
        let page_type = *hdr.first().ok_or("empty page")?;
        let (is_leaf, header_len) = match page_type {
            5 => (false, 12),
            13 => (true, 8),
            2 | 10 => return Err("index b-tree page inside table tree".into()),
            t => return Err(format!("bad b-tree page type {t}")),
        };
        if hdr.len() < header_len {
            return Err("truncated b-tree header".into());
        }
        let ncells = u16::from_be_bytes([hdr[3], hdr[4]]) as usize;
        if ncells > self.page_size / 2 {
            return Err(format!("implausible cell count {ncells}"));
        }
        let ptr_array = base + header_len;
        for i in 0..ncells {
            let off = ptr_array + 2 * i;
            let cell_off = u16::from_be_bytes([
                *page.get(off).ok_or("cell pointer beyond page")?,
                *page.get(off + 1).ok_or("cell pointer beyond page")?,
            ]) as usize;
            let cell = page.get(cell_off..).ok_or("cell offset beyond page")?;
            if is_leaf {
                let (payload_len, n1) = read_varint(cell)?;
                let (rowid, n2) = read_varint(cell.get(n1..).ok_or("truncated cell")?)?;
                let payload = self.assemble_payload(cell, n1 + n2, payload_len as usize)?;
                let record = decode_record(&payload, self.encoding)?;
                out.push((rowid, record));
            } else {
                let child = u32::from_be_bytes(
                    cell.get(..4)
                        .ok_or("truncated interior cell")?
                        .try_into()
                        .unwrap(),
                );
                self.walk_page(child, depth + 1, visited, out)?;
            }
        }
        if !is_leaf {
            let right = u32::from_be_bytes(hdr[8..12].try_into().unwrap());
            self.walk_page(right, depth + 1, visited, out)?;
        }
        Ok(())
    }

    /// Collect a cell payload, following the overflow chain when it spills.
    fn assemble_payload(&self, cell: &[u8], start: usize, total: usize) -> Result<Vec<u8>, String> {
        if total > 1 << 31 {
            return Err("implausible payload length".into());
        }
        let usable = self.usable();
        let max_local = usable - 35;
        if total <= max_local {
            return cell
                .get(start..start + total)
                .map(<[u8]>::to_vec)
                .ok_or_else(|| "payload beyond cell".into());
        }
        let min_local = (usable - 12) * 32 / 255 - 23;
        let k = min_local + (total - min_local) % (usable - 4);
        let local = if k <= max_local { k } else { min_local };

        let mut payload = cell
            .get(start..start + local)
            .map(<[u8]>::to_vec)
            .ok_or("local payload beyond cell")?;
        let mut next = u32::from_be_bytes(
            cell.get(start + local..start + local + 4)
                .ok_or("missing overflow pointer")?
                .try_into()
                .unwrap(),
        );
        let mut seen = BTreeSet::new();
        while next != 0 {
            if payload.len() >= total {
                break;
            }
            if !seen.insert(next) || seen.len() as u32 > self.max_pages().saturating_add(1) {
                return Err("overflow chain cycle".into());
            }
            let page = self.page(next)?;
            next = u32::from_be_bytes(page[..4].try_into().unwrap());
            let take = (total - payload.len()).min(usable - 4);
            payload.extend_from_slice(page.get(4..4 + take).ok_or("overflow page truncated")?);
        }
        if payload.len() != total {
            return Err("overflow chain shorter than payload length".into());
        }
        Ok(payload)
    }

    /// Walk the freelist trunk chain, confirming it matches the header count.
    fn check_freelist(&self) -> Result<(), String> {
        let first = u32::from_be_bytes(self.bytes[32..36].try_into().unwrap());
        let declared = u32::from_be_bytes(self.bytes[36..40].try_into().unwrap());
        if first == 0 {
            return if declared == 0 {
                Ok(())
            } else {
                Err("count nonzero but no trunk".into())
            };
        }
        let mut trunk = first;
        let mut counted: u64 = 0;
        let mut seen = BTreeSet::new();
        while trunk != 0 {
            if !seen.insert(trunk) {
                return Err("trunk cycle".into());
            }
            let page = self.page(trunk)?;
            counted += 1;
            let n_leaves = u32::from_be_bytes(page[4..8].try_into().unwrap()) as u64;
            if n_leaves > (self.usable() as u64 - 8) / 4 {
                return Err("implausible leaf count in trunk".into());
            }
            counted += n_leaves;
            trunk = u32::from_be_bytes(page[..4].try_into().unwrap());
        }
        if counted != declared as u64 {
            return Err(format!(
                "header declares {declared} pages, walked {counted}"
            ));
        }
        Ok(())
    }
}

/// SQLite varint: 1-9 bytes, big-endian, 7 bits per byte, 9th byte full.
fn read_varint(bytes: &[u8]) -> Result<(i64, usize), String> {
    let mut value: u64 = 0;
    for i in 0..9 {
        let b = *bytes.get(i).ok_or("truncated varint")?;
        if i == 8 {
            value = (value << 8) | b as u64;
            return Ok((value as i64, 9));
        }
        value = (value << 7) | (b & 0x7f) as u64;
        if b & 0x80 == 0 {
            return Ok((value as i64, i + 1));
        }
    }
    unreachable!()
}

/// Decode one record (row image) per the serial-type table.
fn decode_record(payload: &[u8], encoding: TextEncoding) -> Result<Vec<Value>, String> {
    let (header_len, n) = read_varint(payload)?;
    let header_len = header_len as usize;
    if header_len < n || header_len > payload.len() {
        return Err("record header length out of range".into());
    }
    let mut serials = Vec::new();
    let mut pos = n;
    while pos < header_len {
        let (serial, used) = read_varint(&payload[pos..header_len.max(pos)])?;
        serials.push(serial);
        pos += used;
    }
    let mut values = Vec::with_capacity(serials.len());
    let mut body = header_len;
    for serial in serials {
        let (value, size) = decode_serial(serial, payload.get(body..).unwrap_or(&[]), encoding)?;
        values.push(value);
        body += size;
    }
    Ok(values)
}

fn decode_serial(
    serial: i64,
    body: &[u8],
    encoding: TextEncoding,
) -> Result<(Value, usize), String> {
    fn int_be(body: &[u8], n: usize) -> Result<i64, String> {
        let bytes = body.get(..n).ok_or("record body truncated")?;
        let mut v: i64 = if bytes[0] & 0x80 != 0 { -1 } else { 0 };
        for &b in bytes {
            v = (v << 8) | b as i64;
        }
        Ok(v)
    }
    Ok(match serial {
        0 => (Value::Null, 0),
        1 => (Value::Integer(int_be(body, 1)?), 1),
        2 => (Value::Integer(int_be(body, 2)?), 2),
        3 => (Value::Integer(int_be(body, 3)?), 3),
        4 => (Value::Integer(int_be(body, 4)?), 4),
        5 => (Value::Integer(int_be(body, 6)?), 6),
        6 => (Value::Integer(int_be(body, 8)?), 8),
        7 => {
            let raw = body.get(..8).ok_or("record body truncated")?;
            (Value::Real(f64::from_be_bytes(raw.try_into().unwrap())), 8)
        }
        8 => (Value::Integer(0), 0),
        9 => (Value::Integer(1), 0),
        10 | 11 => return Err(format!("reserved serial type {serial}")),
        s if s >= 12 => {
            let len = ((s as usize) - 12) / 2;
            let raw = body.get(..len).ok_or("record body truncated")?;
            if s % 2 == 0 {
                (Value::Bytes(raw.to_vec()), len)
            } else {
                (Value::Text(decode_text(raw, encoding)), len)
            }
        }
        s => return Err(format!("negative serial type {s}")),
    })
}

fn decode_text(raw: &[u8], encoding: TextEncoding) -> String {
    match encoding {
        TextEncoding::Utf8 => String::from_utf8_lossy(raw).into_owned(),
        TextEncoding::Utf16Le | TextEncoding::Utf16Be => {
            let units: Vec<u16> = raw
                .chunks_exact(2)
                .map(|c| {
                    if encoding == TextEncoding::Utf16Le {
                        u16::from_le_bytes([c[0], c[1]])
                    } else {
                        u16::from_be_bytes([c[0], c[1]])
                    }
                })
                .collect();
            String::from_utf16_lossy(&units)
        }
    }
}

// ---------------------------------------------------------------------------
// CREATE TABLE parsing (column names, rowid alias, WITHOUT ROWID)

#[derive(Debug, Default)]
struct TableSchema {
    columns: Vec<String>,
    ipk_column: Option<usize>,
    without_rowid: bool,
}

fn parse_create_table(sql: &str) -> TableSchema {
    let mut schema = TableSchema::default();
    let open = match sql.find('(') {
        Some(i) => i,
        None => return schema,
    };
    let mut depth = 0i64;
    let mut close = sql.len();
    for (i, c) in sql[open..].char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth <= 0 {
                    close = open + i;
                    break;
                }
            }
            _ => {}
        }
    }
    let body = &sql[open + 1..close];
    schema.without_rowid = sql[close..].to_ascii_uppercase().contains("WITHOUT ROWID");

    const TABLE_CONSTRAINTS: [&str; 5] = ["PRIMARY", "UNIQUE", "CHECK", "FOREIGN", "CONSTRAINT"];
    for def in split_top_level(body) {
        let def = def.trim();
        if def.is_empty() {
            continue;
        }
        let (name, rest) = take_identifier(def);
        if name.is_empty() || TABLE_CONSTRAINTS.contains(&name.to_ascii_uppercase().as_str()) {
            continue;
        }
        let upper = rest.to_ascii_uppercase();
        if upper.contains("INTEGER") && upper.contains("PRIMARY KEY") {
            schema.ipk_column = Some(schema.columns.len());
        }
        schema.columns.push(name);
    }
    schema
}

fn split_top_level(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut quote: Option<char> = None;
    for (i, c) in body.char_indices() {
        if let Some(q) = quote {
            if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '\'' | '"' | '`' => quote = Some(c),
            '[' => quote = Some(']'),
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    parts
}

/// Split a column definition into its (possibly quoted) name and remainder.
fn take_identifier(def: &str) -> (String, &str) {
    let def = def.trim_start();
    let mut chars = def.char_indices();
    match chars.next() {
        Some((_, q @ ('"' | '\'' | '`'))) => {
            for (i, c) in chars {
                if c == q {
                    return (def[1..i].to_string(), &def[i + 1..]);
                }
            }
            (def[1..].to_string(), "")
        }
        Some((_, '[')) => match def.find(']') {
            Some(i) => (def[1..i].to_string(), &def[i + 1..]),
            None => (def[1..].to_string(), ""),
        },
        Some(_) => {
            let end = def
                .char_indices()
                .find(|(_, c)| c.is_whitespace() || *c == '(')
                .map(|(i, _)| i)
                .unwrap_or(def.len());
            (def[..end].to_string(), &def[end..])
        }
        None => (String::new(), ""),
    }
}

// ---------------------------------------------------------------------------
// WAL sidecar

const WAL_MAGIC_LE: u32 = 0x377f_0682;
const WAL_MAGIC_BE: u32 = 0x377f_0683;

/// Extract committed frames from a WAL image: page overrides plus the
/// database size (in pages) recorded by the last commit.
fn apply_wal(wal: &[u8], page_size: usize) -> Result<(BTreeMap<u32, Vec<u8>>, u32), String> {
    if wal.len() < 32 {
        return Err("wal shorter than header".into());
    }
    let magic = u32::from_be_bytes(wal[0..4].try_into().unwrap());
    let big_endian_sums = match magic {
        WAL_MAGIC_BE => true,
        WAL_MAGIC_LE => false,
        _ => return Err("bad wal magic".into()),
    };
    let wal_page_size = u32::from_be_bytes(wal[8..12].try_into().unwrap()) as usize;
    if wal_page_size != page_size {
        return Err(format!(
            "wal page size {wal_page_size} != db page size {page_size}"
        ));
    }
    let salt1 = u32::from_be_bytes(wal[16..20].try_into().unwrap());
    let salt2 = u32::from_be_bytes(wal[20..24].try_into().unwrap());

    let mut sum = wal_checksum((0, 0), &wal[..24], big_endian_sums)?;
    if sum != header_sums(&wal[24..32]) {
        return Err("wal header checksum mismatch".into());
    }

    let frame_size = 24 + page_size;
    let mut committed: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
    let mut pending: BTreeMap<u32, Vec<u8>> = BTreeMap::new();
    let mut commit_size = 0u32;
    let mut off = 32usize;
    while off + frame_size <= wal.len() {
        let frame = &wal[off..off + frame_size];
        let page_no = u32::from_be_bytes(frame[0..4].try_into().unwrap());
        let db_size = u32::from_be_bytes(frame[4..8].try_into().unwrap());
        let fs1 = u32::from_be_bytes(frame[8..12].try_into().unwrap());
        let fs2 = u32::from_be_bytes(frame[12..16].try_into().unwrap());
        if (fs1, fs2) != (salt1, salt2) {
            break; // stale frame from an earlier checkpoint generation
        }
        sum = wal_checksum(sum, &frame[0..8], big_endian_sums)?;
        sum = wal_checksum(sum, &frame[24..], big_endian_sums)?;
        if sum != header_sums(&frame[16..24]) {
            break; // torn write; everything after is unreliable
        }
        if page_no == 0 {
            break;
        }
        pending.insert(page_no, frame[24..].to_vec());
        if db_size != 0 {
            committed.append(&mut pending);
            commit_size = db_size;
        }
        off += frame_size;
    }
    Ok((committed, commit_size))
}

fn header_sums(bytes: &[u8]) -> (u32, u32) {
    (
        u32::from_be_bytes(bytes[0..4].try_into().unwrap()),
        u32::from_be_bytes(bytes[4..8].try_into().unwrap()),
    )
}

/// The WAL checksum: a Fibonacci-weighted sum over 32-bit words.
fn wal_checksum(seed: (u32, u32), data: &[u8], big_endian: bool) -> Result<(u32, u32), String> {
    if !data.len().is_multiple_of(8) {
        return Err("wal checksum input not 8-byte aligned".into());
    }
    let (mut s1, mut s2) = seed;
    for pair in data.chunks_exact(8) {
        let (x0, x1) = if big_endian {
            (
                u32::from_be_bytes(pair[0..4].try_into().unwrap()),
                u32::from_be_bytes(pair[4..8].try_into().unwrap()),
            )
        } else {
            (
                u32::from_le_bytes(pair[0..4].try_into().unwrap()),
                u32::from_le_bytes(pair[4..8].try_into().unwrap()),
            )
        };
        s1 = s1.wrapping_add(x0).wrapping_add(s2);
        s2 = s2.wrapping_add(x1).wrapping_add(s1);
    }
    Ok((s1, s2))
}

// ---------------------------------------------------------------------------
// Rollback-journal sidecar

const JOURNAL_MAGIC: [u8; 8] = [0xd9, 0xd5, 0x05, 0xf9, 0x20, 0xa1, 0x63, 0xd7];

/// Restore the pre-transaction page images held by a hot rollback journal.
fn apply_journal(journal: &[u8], page_size: usize) -> Result<BTreeMap<u32, Vec<u8>>, String> {
    if journal.len() < 28 || journal[..8] != JOURNAL_MAGIC {
        return Err("bad journal magic".into());
    }
    let record_count = u32::from_be_bytes(journal[8..12].try_into().unwrap());
    let sector_size = u32::from_be_bytes(journal[20..24].try_into().unwrap()) as usize;
    let journal_page_size = u32::from_be_bytes(journal[24..28].try_into().unwrap()) as usize;
    if journal_page_size != 0 && journal_page_size != page_size {
        return Err("journal page size mismatch".into());
    }
    let header_span = sector_size.clamp(28, journal.len());
    let mut pages = BTreeMap::new();
    let record_size = 4 + page_size + 4;
    let mut off = header_span;
    let limit = if record_count == u32::MAX {
        usize::MAX // no-sync journal: read until the data runs out
    } else {
        record_count as usize
    };
    while pages.len() < limit && off + record_size <= journal.len() {
        let page_no = u32::from_be_bytes(journal[off..off + 4].try_into().unwrap());
        if page_no == 0 {
            break;
        }
        pages.insert(page_no, journal[off + 4..off + 4 + page_size].to_vec());
        off += record_size;
    }
    Ok(pages)
}

/// Heuristic for encrypted (or otherwise opaque) database files: the magic
/// header is absent and the leading bytes look like uniform noise.
///
/// Files failing only the header check (low entropy) are corrupt or foreign,
/// not encrypted. Empty input is neither.
pub fn detect_encrypted_db(bytes: &[u8]) -> bool {
    if bytes.is_empty() {
        return false;
    }
    if bytes.len() >= 16 && &bytes[..16] == SQLITE_MAGIC {
        return false;
    }
    let window = &bytes[..bytes.len().min(4096)];
    crate::util::shannon_entropy(window) > 7.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_magic() {
        assert!(matches!(
            read_sqlite(b"not a database"),
            Err(SqliteError::NotSqlite)
        ));
        assert!(matches!(read_sqlite(&[]), Err(SqliteError::NotSqlite)));
    }

    #[test]
    fn varint_decoding() {
        assert_eq!(read_varint(&[0x7f]).unwrap(), (127, 1));
        assert_eq!(read_varint(&[0x81, 0x00]).unwrap(), (128, 2));
        assert_eq!(
            read_varint(&[0x80]).err(),
            Some("truncated varint".to_string())
        );
        // Nine-byte form uses all eight bits of the final byte.
        let nine = [0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff];
        assert_eq!(read_varint(&nine).unwrap(), (-1, 9));
    }

    #[test]
    fn create_table_columns() {
        let s = parse_create_table(
            "CREATE TABLE trips (id INTEGER PRIMARY KEY, \"start time\" TEXT, [end] TEXT, km REAL, \
             UNIQUE(km), FOREIGN KEY(id) REFERENCES x(y))",
        );
        assert_eq!(s.columns, vec!["id", "start time", "end", "km"]);
        assert_eq!(s.ipk_column, Some(0));
        assert!(!s.without_rowid);
    }

    #[test]
    fn create_table_without_rowid_flagged() {
        let s = parse_create_table("CREATE TABLE t(a TEXT PRIMARY KEY, b) WITHOUT ROWID");
        assert!(s.without_rowid);
        assert_eq!(s.columns, vec!["a", "b"]);
    }

    #[test]
    fn empty_input_not_encrypted() {
        assert!(!detect_encrypted_db(&[]));
        assert!(!detect_encrypted_db(&[0u8; 4096]));
    }
}
