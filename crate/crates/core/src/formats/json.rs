//! Strict JSON decoding, plain or gzip-wrapped.

use std::io::Read;

use super::value::TreeValue;

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("not valid JSON: {0}")]
    NotJson(String),
    #[error("not a gzip stream")]
    NotGzip,
}

/// Decoded document plus a flag for integers that lost precision on the way
/// to `f64` (values outside the 64-bit signed range).
#[derive(Debug, Clone, PartialEq)]
pub struct JsonDoc {
    pub value: TreeValue,
    pub precision_loss: bool,
}

pub fn read_json(bytes: &[u8]) -> Result<TreeValue, JsonError> {
    Ok(read_json_doc(bytes)?.value)
}

pub fn read_json_doc(bytes: &[u8]) -> Result<JsonDoc, JsonError> {
    let raw: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| JsonError::NotJson(e.to_string()))?;
    let mut precision_loss = false;
    let value = convert(&raw, &mut precision_loss);
    Ok(JsonDoc {
        value,
        precision_loss,
    })
}

fn convert(v: &serde_json::Value, loss: &mut bool) -> TreeValue {
    use serde_json::Value as J;
    match v {
        J::Null => TreeValue::Null,
        J::Bool(b) => TreeValue::Bool(*b),
        J::Number(n) => {
            if let Some(i) = n.as_i64() {
                TreeValue::Int(i)
            } else {
                let r = n.as_f64().unwrap_or(f64::NAN);
                // Integral magnitudes beyond i64 cannot round-trip exactly.
                if n.is_u64() || (r.is_finite() && r.fract() == 0.0) {
                    *loss = true;
                }
                TreeValue::Real(r)
            }
        }
        J::String(s) => TreeValue::Text(s.clone()),
        J::Array(a) => TreeValue::List(a.iter().map(|x| convert(x, loss)).collect()),
        J::Object(o) => TreeValue::Map(
            o.iter()
                .map(|(k, x)| (k.clone(), convert(x, loss)))
                .collect(),
        ),
    }
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];
/// Decompression ceiling; artifact JSON bodies are small, anything beyond
/// this is hostile input.
const MAX_INFLATED: u64 = 256 << 20;

/// Gunzip then parse. Stored/uncompressed input is reported as `NotGzip` so
/// callers can fall back to [`read_json`].
pub fn read_gzip_json(bytes: &[u8]) -> Result<TreeValue, JsonError> {
    Ok(read_gzip_json_doc(bytes)?.value)
}

pub fn read_gzip_json_doc(bytes: &[u8]) -> Result<JsonDoc, JsonError> {
    let inflated = gunzip(bytes)?;
    read_json_doc(&inflated)
}

pub fn gunzip(bytes: &[u8]) -> Result<Vec<u8>, JsonError> {
    if bytes.len() < 2 || bytes[..2] != GZIP_MAGIC {
        return Err(JsonError::NotGzip);
    }
    let mut out = Vec::new();
    let mut decoder = flate2::read::GzDecoder::new(bytes).take(MAX_INFLATED);
    decoder
        .read_to_end(&mut out)
        .map_err(|e| JsonError::NotJson(format!("gzip stream: {e}")))?;
    Ok(out)
}
