//! Apple property-list decoding, both binary (`bplist00`) and XML encodings.
//!
//! Equivalent content decodes to the same [`TreeValue`] tree regardless of
//! encoding. CFDates are normalized to UTC Unix milliseconds.

use std::collections::{BTreeMap, BTreeSet};

use super::value::TreeValue;

/// Offset between the Apple reference epoch (2001-01-01T00:00:00Z) and the
/// Unix epoch, in seconds.
pub const APPLE_EPOCH_OFFSET_S: i64 = 978_307_200;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlistError {
    #[error("not a property list: {0}")]
    NotPlist(String),
    #[error("unsupported property list version {0:?}")]
    UnsupportedVersion(String),
}

/// Decode a property list of either encoding.
pub fn read_plist(bytes: &[u8]) -> Result<TreeValue, PlistError> {
    if bytes.starts_with(b"bplist") {
        let version = String::from_utf8_lossy(bytes.get(6..8).unwrap_or(b"")).into_owned();
        if !matches!(version.as_str(), "00" | "01") {
            return Err(PlistError::UnsupportedVersion(version));
        }
        return read_binary(bytes);
    }
    read_xml(bytes)
}

// ---------------------------------------------------------------------------
// Binary encoding

struct Binary<'a> {
    bytes: &'a [u8],
    offsets: Vec<u64>,
    ref_size: usize,
}

fn read_binary(bytes: &[u8]) -> Result<TreeValue, PlistError> {
    let err = |m: &str| PlistError::NotPlist(m.to_string());
    if bytes.len() < 8 + 32 {
        return Err(err("binary plist shorter than header plus trailer"));
    }
    let trailer = &bytes[bytes.len() - 32..];
    let offset_int_size = trailer[6] as usize;
    let ref_size = trailer[7] as usize;
    let num_objects = u64::from_be_bytes(trailer[8..16].try_into().unwrap());
    let top_object = u64::from_be_bytes(trailer[16..24].try_into().unwrap());
    let table_offset = u64::from_be_bytes(trailer[24..32].try_into().unwrap());

    if !(1..=8).contains(&offset_int_size) || !(1..=8).contains(&ref_size) {
        return Err(err("implausible trailer field sizes"));
    }
    if num_objects == 0 || num_objects > (bytes.len() as u64) {
        return Err(err("implausible object count"));
    }
    let table_end = table_offset
        .checked_add(num_objects * offset_int_size as u64)
        .filter(|&e| e <= (bytes.len() - 32) as u64)
        .ok_or_else(|| err("offset table out of range"))? as usize;

    let mut offsets = Vec::with_capacity(num_objects as usize);
    let table = &bytes[table_offset as usize..table_end];
    for entry in table.chunks_exact(offset_int_size) {
        offsets.push(be_uint(entry));
    }
    if top_object >= num_objects {
        return Err(err("top object out of range"));
    }

    let bin = Binary {
        bytes,
        offsets,
        ref_size,
    };
    let mut in_progress = BTreeSet::new();
    bin.object(top_object as usize, &mut in_progress, 0)
}

fn be_uint(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64)
}

impl<'a> Binary<'a> {
    fn object(
        &self,
        index: usize,
        in_progress: &mut BTreeSet<usize>,
        depth: u32,
    ) -> Result<TreeValue, PlistError> {
        let err = |m: String| PlistError::NotPlist(m);
        if depth > 128 {
            return Err(err("plist nesting deeper than 128".into()));
        }
        if !in_progress.insert(index) {
            return Err(err(format!("reference cycle through object {index}")));
        }
        let result = self.object_inner(index, in_progress, depth);
        in_progress.remove(&index);
        result
    }

    fn object_inner(
        &self,
        index: usize,
        in_progress: &mut BTreeSet<usize>,
        depth: u32,
    ) -> Result<TreeValue, PlistError> {
        let err = |m: &str| PlistError::NotPlist(format!("object {index}: {m}"));
        let offset = *self
            .offsets
            .get(index)
            .ok_or_else(|| err("reference out of range"))? as usize;
        let marker = *self
            .bytes
            .get(offset)
            .ok_or_else(|| err("offset beyond file"))?;
        let body = &self.bytes[offset + 1..];
        let nibble = (marker & 0x0f) as usize;
        match marker >> 4 {
            0x0 => match marker {
                0x00 => Ok(TreeValue::Null),
                0x08 => Ok(TreeValue::Bool(false)),
                0x09 => Ok(TreeValue::Bool(true)),
                _ => Err(err("unknown singleton marker")),
            },
            0x1 => {
                let n = 1usize
                    .checked_shl(nibble as u32)
                    .ok_or_else(|| err("int size"))?;
                if n > 16 {
                    return Err(err("integer wider than 16 bytes"));
                }
                let raw = body.get(..n).ok_or_else(|| err("truncated integer"))?;
                if n <= 8 {
                    // Integers of 8 bytes or fewer are two's complement.
                    let mut v: i64 = if n == 8 && raw[0] & 0x80 != 0 { -1 } else { 0 };
                    for &b in raw {
                        v = (v << 8) | b as i64;
                    }
                    // 1-4 byte encodings are always unsigned.
                    if n < 8 {
                        v = be_uint(raw) as i64;
                    }
                    Ok(TreeValue::Int(v))
                } else {
                    let hi = be_uint(&raw[..n - 8]);
                    let lo = be_uint(&raw[n - 8..]);
                    if hi == 0 && lo <= i64::MAX as u64 {
                        Ok(TreeValue::Int(lo as i64))
                    } else {
                        Ok(TreeValue::Real(((hi as f64) * 2f64.powi(64)) + lo as f64))
                    }
                }
            }
            0x2 => {
                let n = 1usize
                    .checked_shl(nibble as u32)
                    .ok_or_else(|| err("real size"))?;
                let raw = body.get(..n).ok_or_else(|| err("truncated real"))?;
                match n {
                    4 => Ok(TreeValue::Real(
                        f32::from_be_bytes(raw.try_into().unwrap()) as f64
                    )),
                    8 => Ok(TreeValue::Real(f64::from_be_bytes(raw.try_into().unwrap()))),
                    _ => Err(err("unsupported real width")),
                }
            }
            0x3 => {
                if marker != 0x33 {
                    return Err(err("unknown date marker"));
                }
                let raw = body.get(..8).ok_or_else(|| err("truncated date"))?;
                let secs = f64::from_be_bytes(raw.try_into().unwrap());
                if !secs.is_finite() || secs.abs() > 1e13 {
                    return Err(err("implausible date"));
                }
                Ok(TreeValue::Timestamp(
                    ((secs + APPLE_EPOCH_OFFSET_S as f64) * 1000.0) as i64,
                ))
            }
            0x4 => {
                let (len, data) = self.sized(body, nibble, index)?;
                let raw = data.get(..len).ok_or_else(|| err("truncated data"))?;
                Ok(TreeValue::Bytes(raw.to_vec()))
            }
            0x5 => {
                let (len, data) = self.sized(body, nibble, index)?;
                let raw = data
                    .get(..len)
                    .ok_or_else(|| err("truncated ascii string"))?;
                Ok(TreeValue::Text(String::from_utf8_lossy(raw).into_owned()))
            }
            0x6 => {
                let (len, data) = self.sized(body, nibble, index)?;
                let raw = data
                    .get(..len * 2)
                    .ok_or_else(|| err("truncated utf16 string"))?;
                let units: Vec<u16> = raw
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect();
                Ok(TreeValue::Text(String::from_utf16_lossy(&units)))
            }
            0x8 => {
                // Keyed-archiver UID; surfaced as its integer value.
                let raw = body.get(..nibble + 1).ok_or_else(|| err("truncated uid"))?;
                Ok(TreeValue::Int(be_uint(raw) as i64))
            }
            0xa | 0xc => {
                let (len, data) = self.sized(body, nibble, index)?;
                let refs = data
                    .get(..len * self.ref_size)
                    .ok_or_else(|| err("truncated array refs"))?;
                let mut out = Vec::with_capacity(len);
                for r in refs.chunks_exact(self.ref_size) {
                    out.push(self.object(be_uint(r) as usize, in_progress, depth + 1)?);
                }
                Ok(TreeValue::List(out))
            }
            0xd => {
                let (len, data) = self.sized(body, nibble, index)?;
                let refs = data
                    .get(..len * 2 * self.ref_size)
                    .ok_or_else(|| err("truncated dict refs"))?;
                let mut out = BTreeMap::new();
                for i in 0..len {
                    let kref = be_uint(&refs[i * self.ref_size..(i + 1) * self.ref_size]);
                    let vref =
                        be_uint(&refs[(len + i) * self.ref_size..(len + i + 1) * self.ref_size]);
                    let key = match self.object(kref as usize, in_progress, depth + 1)? {
                        TreeValue::Text(s) => s,
                        other => format!("{other:?}"),
                    };
                    let value = self.object(vref as usize, in_progress, depth + 1)?;
                    out.insert(key, value);
                }
                Ok(TreeValue::Map(out))
            }
            _ => Err(err("unknown object marker")),
        }
    }

    /// Resolve the collection/string length nibble (0xF means a following int).
    fn sized<'b>(
        &self,
        body: &'b [u8],
        nibble: usize,
        index: usize,
    ) -> Result<(usize, &'b [u8]), PlistError> {
        let err = |m: &str| PlistError::NotPlist(format!("object {index}: {m}"));
        if nibble != 0xf {
            return Ok((nibble, body));
        }
        let marker = *body.first().ok_or_else(|| err("missing length int"))?;
        if marker >> 4 != 0x1 {
            return Err(err("length is not an int"));
        }
        let n = 1usize
            .checked_shl((marker & 0x0f) as u32)
            .filter(|&n| n <= 8)
            .ok_or_else(|| err("length int too wide"))?;
        let raw = body
            .get(1..1 + n)
            .ok_or_else(|| err("truncated length int"))?;
        let len = be_uint(raw);
        if len > self.bytes.len() as u64 {
            return Err(err("length exceeds file size"));
        }
        Ok((len as usize, &body[1 + n..]))
    }
}

// ---------------------------------------------------------------------------
// XML encoding

fn read_xml(bytes: &[u8]) -> Result<TreeValue, PlistError> {
    use quick_xml::events::Event;

    let err = |m: &str| PlistError::NotPlist(m.to_string());
    let text = std::str::from_utf8(bytes).map_err(|_| err("not UTF-8 XML"))?;
    let mut reader = quick_xml::Reader::from_str(text);
    reader.config_mut().trim_text(true);

    // Find the root element, unwrapping an optional <plist> wrapper.
    let mut saw_plist_wrapper = false;
    loop {
        match reader.read_event().map_err(|e| err(&format!("xml: {e}")))? {
            Event::Start(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if name == "plist" && !saw_plist_wrapper {
                    saw_plist_wrapper = true;
                    continue;
                }
                return parse_xml_element(&mut reader, &name);
            }
            Event::Empty(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                return empty_xml_element(&name);
            }
            Event::Decl(_) | Event::DocType(_) | Event::Comment(_) | Event::Text(_) => continue,
            Event::Eof => return Err(err("no root element")),
            _ => return Err(err("unexpected xml event at root")),
        }
    }
}

fn empty_xml_element(name: &str) -> Result<TreeValue, PlistError> {
    match name {
        "true" => Ok(TreeValue::Bool(true)),
        "false" => Ok(TreeValue::Bool(false)),
        "dict" => Ok(TreeValue::Map(BTreeMap::new())),
        "array" => Ok(TreeValue::List(Vec::new())),
        "string" => Ok(TreeValue::Text(String::new())),
        "data" => Ok(TreeValue::Bytes(Vec::new())),
        other => Err(PlistError::NotPlist(format!(
            "unexpected empty element <{other}/>"
        ))),
    }
}

fn parse_xml_element(
    reader: &mut quick_xml::Reader<&[u8]>,
    name: &str,
) -> Result<TreeValue, PlistError> {
    use quick_xml::events::Event;

    let err = |m: String| PlistError::NotPlist(m);
    match name {
        "dict" => {
            let mut map = BTreeMap::new();
            let mut key: Option<String> = None;
            loop {
                match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
                    Event::Start(e) => {
                        let child = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                        if child == "key" {
                            key = Some(read_text(reader, "key")?);
                        } else {
                            let k = key.take().ok_or_else(|| err("value without key".into()))?;
                            map.insert(k, parse_xml_element(reader, &child)?);
                        }
                    }
                    Event::Empty(e) => {
                        let child = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                        let k = key.take().ok_or_else(|| err("value without key".into()))?;
                        map.insert(k, empty_xml_element(&child)?);
                    }
                    Event::End(e) if e.name().as_ref() == b"dict" => {
                        return Ok(TreeValue::Map(map))
                    }
                    Event::Comment(_) | Event::Text(_) => continue,
                    Event::Eof => return Err(err("unterminated <dict>".into())),
                    _ => return Err(err("unexpected event in <dict>".into())),
                }
            }
        }
        "array" => {
            let mut list = Vec::new();
            loop {
                match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
                    Event::Start(e) => {
                        let child = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                        list.push(parse_xml_element(reader, &child)?);
                    }
                    Event::Empty(e) => {
                        let child = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                        list.push(empty_xml_element(&child)?);
                    }
                    Event::End(e) if e.name().as_ref() == b"array" => {
                        return Ok(TreeValue::List(list))
                    }
                    Event::Comment(_) | Event::Text(_) => continue,
                    Event::Eof => return Err(err("unterminated <array>".into())),
                    _ => return Err(err("unexpected event in <array>".into())),
                }
            }
        }
        "string" => Ok(TreeValue::Text(read_text(reader, "string")?)),
        "integer" => {
            let t = read_text(reader, "integer")?;
            t.trim()
                .parse::<i64>()
                .map(TreeValue::Int)
                .map_err(|_| err(format!("bad integer {t:?}")))
        }
        "real" => {
            let t = read_text(reader, "real")?;
            t.trim()
                .parse::<f64>()
                .map(TreeValue::Real)
                .map_err(|_| err(format!("bad real {t:?}")))
        }
        "true" => {
            consume_end(reader, "true")?;
            Ok(TreeValue::Bool(true))
        }
        "false" => {
            consume_end(reader, "false")?;
            Ok(TreeValue::Bool(false))
        }
        "date" => {
            let t = read_text(reader, "date")?;
            let parsed = chrono::DateTime::parse_from_rfc3339(t.trim())
                .map_err(|_| err(format!("bad date {t:?}")))?;
            Ok(TreeValue::Timestamp(parsed.timestamp_millis()))
        }
        "data" => {
            use base64::Engine;
            let t = read_text(reader, "data")?;
            let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
            base64::engine::general_purpose::STANDARD
                .decode(compact.as_bytes())
                .map(TreeValue::Bytes)
                .map_err(|_| err("bad base64 in <data>".into()))
        }
        other => Err(err(format!("unknown plist element <{other}>"))),
    }
}

fn read_text(reader: &mut quick_xml::Reader<&[u8]>, tag: &str) -> Result<String, PlistError> {
    use quick_xml::events::Event;
    let err = |m: String| PlistError::NotPlist(m);
    let mut out = String::new();
    loop {
        match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
            Event::Text(t) => {
                out.push_str(&t.decode().map_err(|e| err(format!("xml text: {e}")))?);
            }
            Event::End(e) if e.name().as_ref() == tag.as_bytes() => return Ok(out),
            Event::Eof => return Err(err(format!("unterminated <{tag}>"))),
            _ => return Err(err(format!("unexpected event in <{tag}>"))),
        }
    }
}

fn consume_end(reader: &mut quick_xml::Reader<&[u8]>, tag: &str) -> Result<(), PlistError> {
    use quick_xml::events::Event;
    let err = |m: String| PlistError::NotPlist(m);
    loop {
        match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
            Event::End(e) if e.name().as_ref() == tag.as_bytes() => return Ok(()),
            Event::Text(_) | Event::Comment(_) => continue,
            _ => return Err(err(format!("unexpected content in <{tag}>"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xml_plist_single_key() {
        let xml = br#"<?xml version="1.0" encoding="UTF-8"?>
<!DOCTYPE plist PUBLIC "-//Apple//DTD PLIST 1.0//EN" "http://www.apple.com/DTDs/PropertyList-1.0.dtd">
<plist version="1.0">
<dict><key>vin</key><string>WVWZZZ5NZJM000000</string></dict>
</plist>"#;
        let v = read_plist(xml).unwrap();
        assert_eq!(
            v.get("vin").and_then(TreeValue::as_str),
            Some("WVWZZZ5NZJM000000")
        );
        match v {
            TreeValue::Map(m) => assert_eq!(m.len(), 1),
            other => panic!("expected map, got {other:?}"),
        }
    }

    #[test]
    fn xml_plist_date_normalized_to_utc_ms() {
        let xml = br#"<plist version="1.0"><dict><key>t</key><date>2020-11-03T14:00:00Z</date></dict></plist>"#;
        let v = read_plist(xml).unwrap();
        assert_eq!(v.get("t"), Some(&TreeValue::Timestamp(1_604_412_000_000)));
    }

    #[test]
    fn truncated_binary_rejected() {
        assert!(matches!(
            read_plist(b"bplist00abc"),
            Err(PlistError::NotPlist(_))
        ));
    }

    #[test]
    fn future_binary_version_unsupported() {
        let mut data = b"bplist99".to_vec();
        data.extend_from_slice(&[0u8; 40]);
        assert!(matches!(
            read_plist(&data),
            Err(PlistError::UnsupportedVersion(_))
        ));
    }

    #[test]
    fn garbage_rejected() {
        assert!(read_plist(b"\x00\x01\x02\x03").is_err());
        assert!(read_plist(b"<html><body>nope</body></html>").is_err());
    }
}
