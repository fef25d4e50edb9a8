//! Shared decoding helpers for the per-app extractors.

use crate::event::{resolve_timestamp, Epoch, EventKind};
use crate::formats::{read_sqlite, Table, TableSet, TreeValue, Value};

use super::{ArtifactCtx, RawRecord};

pub fn sqlite(ctx: &ArtifactCtx) -> Result<TableSet, String> {
    read_sqlite(ctx.bytes).map_err(|e| e.to_string())
}

/// Row-wise view over one table with name-or-position cell access.
pub struct Rows<'a> {
    pub table: &'a Table,
    pub name: String,
}

pub fn rows<'a>(set: &'a TableSet, name: &str) -> Option<Rows<'a>> {
    set.table(name).map(|table| Rows {
        table,
        name: name.to_string(),
    })
}

impl<'a> Rows<'a> {
    pub fn iter(&self) -> impl Iterator<Item = Row<'a, '_>> {
        self.table
            .rows
            .iter()
            .enumerate()
            .map(move |(i, cells)| Row {
                rows: self,
                cells,
                index: i,
            })
    }

    pub fn is_empty(&self) -> bool {
        self.table.rows.is_empty()
    }
}

pub struct Row<'a, 'r> {
    rows: &'r Rows<'a>,
    cells: &'a [Value],
    pub index: usize,
}

impl Row<'_, '_> {
    pub fn locator(&self) -> String {
        format!("table {}, row {}", self.rows.name, self.index + 1)
    }

    pub fn value(&self, column: &str, fallback_pos: usize) -> Option<&Value> {
        self.rows
            .table
            .cell(self.cells, column, fallback_pos)
            .filter(|v| !v.is_null())
    }

    pub fn text(&self, column: &str, fallback_pos: usize) -> Option<String> {
        self.value(column, fallback_pos)
            .and_then(Value::as_str)
            .map(str::to_string)
    }

    pub fn f64(&self, column: &str, fallback_pos: usize) -> Option<f64> {
        self.value(column, fallback_pos).and_then(Value::as_f64)
    }

    pub fn i64(&self, column: &str, fallback_pos: usize) -> Option<i64> {
        self.value(column, fallback_pos).and_then(Value::as_i64)
    }

    /// Decode a timestamp column under the table's default epoch, marking the
    /// record when the epoch had to be re-inferred.
    pub fn timestamp(
        &self,
        column: &str,
        fallback_pos: usize,
        epoch: Epoch,
    ) -> Option<(i64, bool)> {
        let v = self.value(column, fallback_pos)?;
        let v = match v {
            Value::Text(s) if s.contains('T') => {
                return resolve_iso(s);
            }
            other => other,
        };
        resolve_timestamp(v, epoch)
            .ok()
            .map(|r| (r.ms, r.reinferred))
    }
}

fn resolve_iso(s: &str) -> Option<(i64, bool)> {
    chrono::DateTime::parse_from_rfc3339(s.trim())
        .ok()
        .map(|dt| (dt.timestamp_millis(), false))
}

/// Field-setting sugar for record construction.
pub trait RecordExt {
    fn set(self, key: &str, value: TreeValue) -> Self;
    fn set_opt(self, key: &str, value: Option<TreeValue>) -> Self;
    fn ts(self, key: &str, ms: i64) -> Self;
    fn reinferred_note(self, reinferred: bool) -> Self;
}

impl RecordExt for RawRecord {
    fn set(mut self, key: &str, value: TreeValue) -> Self {
        self.fields.insert(key.to_string(), value);
        self
    }

    fn set_opt(self, key: &str, value: Option<TreeValue>) -> Self {
        match value {
            Some(v) => self.set(key, v),
            None => self,
        }
    }

    fn ts(self, key: &str, ms: i64) -> Self {
        self.set(key, TreeValue::Timestamp(ms))
    }

    fn reinferred_note(self, reinferred: bool) -> Self {
        if reinferred {
            self.set("timestamp_epoch_reinferred", TreeValue::Bool(true))
                .set("time_confidence", TreeValue::Text("inferred".into()))
        } else {
            self
        }
    }
}

pub fn text_tv(s: impl Into<String>) -> TreeValue {
    TreeValue::Text(s.into())
}

pub fn real_tv(v: f64) -> TreeValue {
    TreeValue::Real(v)
}

/// Chromium `Web Data` autofill: name/value pairs with Unix-second usage
/// timestamps. Shared by the Mercedes, Seat Connect and Tesla Android apps.
pub fn autofill_records(
    ctx: &ArtifactCtx,
    wanted: &[(&str, &str)],
) -> Result<Vec<RawRecord>, String> {
    let set = sqlite(ctx)?;
    let mut out = Vec::new();
    if let Some(rows) = rows(&set, "autofill") {
        for row in rows.iter() {
            let Some(name) = row.text("name", 0) else {
                continue;
            };
            let Some(value) = row.text("value", 1) else {
                continue;
            };
            let Some((_, field)) = wanted.iter().find(|(n, _)| n.eq_ignore_ascii_case(&name))
            else {
                continue;
            };
            let mut rec = ctx
                .record(EventKind::Identity, &row.locator())
                .set(field, text_tv(value));
            if let Some((ms, re)) = row.timestamp("date_created", 2, Epoch::UnixS) {
                rec = rec.ts("start", ms).reinferred_note(re);
            }
            if let Some((ms, _)) = row.timestamp("date_last_used", 3, Epoch::UnixS) {
                rec = rec.ts("last_used", ms);
            }
            out.push(rec);
        }
    }
    Ok(out)
}

/// Schema-only observation: the capability exists but no rows were recorded.
pub fn schema_present(ctx: &ArtifactCtx, set: &TableSet, table: &str) -> Option<RawRecord> {
    set.table(table).map(|t| {
        ctx.record(EventKind::SchemaPresent, &format!("table {table}"))
            .set("table", text_tv(table))
            .set("row_count", TreeValue::Int(t.rows.len() as i64))
    })
}

/// `key=value` pairs from plain-text log files.
pub fn log_pairs(bytes: &[u8]) -> Vec<(String, String)> {
    let text = String::from_utf8_lossy(bytes);
    let mut out = Vec::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            let k = k.rsplit(|c: char| c.is_whitespace()).next().unwrap_or(k);
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    out
}

/// URLs embedded in otherwise binary cache files.
pub fn scan_urls(bytes: &[u8]) -> Vec<String> {
    let mut out = Vec::new();
    let hay = bytes;
    let mut i = 0;
    while i < hay.len() {
        let rest = &hay[i..];
        let hit = rest
            .windows(7)
            .position(|w| w == b"http://" || w.starts_with(b"https:/"));
        let Some(off) = hit else { break };
        let start = i + off;
        let mut end = start;
        while end < hay.len() {
            let b = hay[end];
            if b.is_ascii_graphic() && b != b'"' && b != b'\'' && b != b'>' && b != b'<' {
                end += 1;
            } else {
                break;
            }
        }
        out.push(String::from_utf8_lossy(&hay[start..end]).into_owned());
        i = end.max(start + 1);
    }
    out
}
