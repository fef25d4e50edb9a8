//! Value models shared by every format reader.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A single SQLite storage cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Integer(i64),
    Real(f64),
    Text(String),
    Bytes(Vec<u8>),
}

impl Value {
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Integer(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(*r),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }
}

impl From<Value> for TreeValue {
    fn from(v: Value) -> Self {
        match v {
            Value::Null => TreeValue::Null,
            Value::Integer(i) => TreeValue::Int(i),
            Value::Real(r) => TreeValue::Real(r),
            Value::Text(s) => TreeValue::Text(s),
            Value::Bytes(b) => TreeValue::Bytes(b),
        }
    }
}

/// One decoded table: ordered column names plus rows of cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    /// Cell lookup by column name with positional fallback.
    ///
    /// Real-world schemas drift from the documented ones; extractors read by
    /// name first and fall back to the stated position.
    pub fn cell<'a>(
        &'a self,
        row: &'a [Value],
        name: &str,
        fallback_pos: usize,
    ) -> Option<&'a Value> {
        if let Some(idx) = self
            .columns
            .iter()
            .position(|c| c.eq_ignore_ascii_case(name))
        {
            return row.get(idx);
        }
        row.get(fallback_pos)
    }
}

/// All user tables decoded from one database file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableSet {
    pub tables: BTreeMap<String, Table>,
    /// Structural oddities observed while decoding (never fatal on their own).
    pub notes: Vec<String>,
}

impl TableSet {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.get(name).or_else(|| {
            self.tables
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(name))
                .map(|(_, t)| t)
        })
    }
}

/// Tree-structured value produced by the JSON, plist and preferences readers.
///
/// JSON and plist inputs carrying equivalent content decode to identical
/// trees. Maps are ordered so serialized output is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeValue {
    Null,
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
    Bytes(Vec<u8>),
    /// UTC timestamp in milliseconds since the Unix epoch.
    Timestamp(i64),
    List(Vec<TreeValue>),
    Map(BTreeMap<String, TreeValue>),
}

impl TreeValue {
    pub fn map(entries: impl IntoIterator<Item = (&'static str, TreeValue)>) -> TreeValue {
        TreeValue::Map(
            entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn get(&self, key: &str) -> Option<&TreeValue> {
        match self {
            TreeValue::Map(m) => m.get(key),
            _ => None,
        }
    }

    /// Walk a `.`-separated key path through nested maps.
    pub fn get_path(&self, path: &str) -> Option<&TreeValue> {
        let mut cur = self;
        for part in path.split('.') {
            cur = cur.get(part)?;
        }
        Some(cur)
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            TreeValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            TreeValue::Int(i) => Some(*i),
            TreeValue::Timestamp(t) => Some(*t),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            TreeValue::Real(r) => Some(*r),
            TreeValue::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            TreeValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[TreeValue]> {
        match self {
            TreeValue::List(l) => Some(l),
            _ => None,
        }
    }
}

impl From<&str> for TreeValue {
    fn from(s: &str) -> Self {
        TreeValue::Text(s.to_string())
    }
}

impl From<String> for TreeValue {
    fn from(s: String) -> Self {
        TreeValue::Text(s)
    }
}

impl From<i64> for TreeValue {
    fn from(i: i64) -> Self {
        TreeValue::Int(i)
    }
}

impl From<f64> for TreeValue {
    fn from(r: f64) -> Self {
        TreeValue::Real(r)
    }
}

impl From<bool> for TreeValue {
    fn from(b: bool) -> Self {
        TreeValue::Bool(b)
    }
}

// Bytes and timestamps have no native JSON form; they round-trip through
// single-key marker objects so serialized attributes re-parse losslessly.
const BYTES_KEY: &str = "$bytes_hex";
const TS_KEY: &str = "$utc_ms";

impl Serialize for TreeValue {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            TreeValue::Null => ser.serialize_unit(),
            TreeValue::Bool(b) => ser.serialize_bool(*b),
            TreeValue::Int(i) => ser.serialize_i64(*i),
            TreeValue::Real(r) => ser.serialize_f64(*r),
            TreeValue::Text(s) => ser.serialize_str(s),
            TreeValue::Bytes(b) => {
                let mut m = ser.serialize_map(Some(1))?;
                m.serialize_entry(BYTES_KEY, &hex::encode(b))?;
                m.end()
            }
            TreeValue::Timestamp(t) => {
                let mut m = ser.serialize_map(Some(1))?;
                m.serialize_entry(TS_KEY, t)?;
                m.end()
            }
            TreeValue::List(l) => {
                let mut s = ser.serialize_seq(Some(l.len()))?;
                for v in l {
                    s.serialize_element(v)?;
                }
                s.end()
            }
            TreeValue::Map(m) => {
                let mut s = ser.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    s.serialize_entry(k, v)?;
                }
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for TreeValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct V;

        impl<'de> Visitor<'de> for V {
            type Value = TreeValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON-compatible tree value")
            }

            fn visit_unit<E>(self) -> Result<TreeValue, E> {
                Ok(TreeValue::Null)
            }

            fn visit_none<E>(self) -> Result<TreeValue, E> {
                Ok(TreeValue::Null)
            }

            fn visit_bool<E>(self, b: bool) -> Result<TreeValue, E> {
                Ok(TreeValue::Bool(b))
            }

            fn visit_i64<E>(self, i: i64) -> Result<TreeValue, E> {
                Ok(TreeValue::Int(i))
            }

            fn visit_u64<E: de::Error>(self, u: u64) -> Result<TreeValue, E> {
                if u <= i64::MAX as u64 {
                    Ok(TreeValue::Int(u as i64))
                } else {
                    Ok(TreeValue::Real(u as f64))
                }
            }

            fn visit_f64<E>(self, r: f64) -> Result<TreeValue, E> {
                Ok(TreeValue::Real(r))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<TreeValue, E> {
                Ok(TreeValue::Text(s.to_string()))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<TreeValue, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element()? {
                    out.push(v);
                }
                Ok(TreeValue::List(out))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<TreeValue, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, TreeValue>()? {
                    out.insert(k, v);
                }
                if out.len() == 1 {
                    if let Some(TreeValue::Text(h)) = out.get(BYTES_KEY) {
                        if let Ok(bytes) = hex::decode(h) {
                            return Ok(TreeValue::Bytes(bytes));
                        }
                    }
                    if let Some(TreeValue::Int(t)) = out.get(TS_KEY) {
                        return Ok(TreeValue::Timestamp(*t));
                    }
                }
                Ok(TreeValue::Map(out))
            }
        }

        de.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_value_round_trips_through_json() {
        let v = TreeValue::map([
            ("name", "Hafenweg".into()),
            ("liters", TreeValue::Real(40.5)),
            ("count", TreeValue::Int(3)),
            ("flag", TreeValue::Bool(true)),
            ("nothing", TreeValue::Null),
            ("when", TreeValue::Timestamp(1_604_412_000_000)),
            ("raw", TreeValue::Bytes(vec![0xff, 0xd8, 0xff])),
            (
                "nested",
                TreeValue::List(vec![TreeValue::Int(1), TreeValue::Text("two".into())]),
            ),
        ]);
        let json = serde_json::to_string(&v).unwrap();
        let back: TreeValue = serde_json::from_str(&json).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn table_cell_by_name_and_position() {
        let t = Table {
            columns: vec!["id".into(), "fuel".into()],
            rows: vec![vec![Value::Integer(1), Value::Real(41.0)]],
        };
        assert_eq!(t.cell(&t.rows[0], "fuel", 0), Some(&Value::Real(41.0)));
        // Unknown name falls back to the stated position.
        assert_eq!(t.cell(&t.rows[0], "amount", 1), Some(&Value::Real(41.0)));
    }
}
