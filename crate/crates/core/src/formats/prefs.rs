//! Android shared-preferences XML (`shared_prefs/*.xml`) decoding.

use std::collections::BTreeMap;

use quick_xml::events::Event;

use super::value::TreeValue;

#[derive(Debug, thiserror::Error)]
#[error("not a shared-preferences document: {0}")]
pub struct NotPrefsXml(pub String);

/// Decode a preferences file into a typed key/value map.
///
/// Handles `<string>`, `<boolean>`, `<int>`, `<long>`, `<float>` and
/// `<set>` entries under the `<map>` root.
pub fn read_xml_prefs(bytes: &[u8]) -> Result<BTreeMap<String, TreeValue>, NotPrefsXml> {
    let err = |m: String| NotPrefsXml(m);
    let text = std::str::from_utf8(bytes).map_err(|_| err("not UTF-8".into()))?;
    let mut reader = quick_xml::Reader::from_str(text);
    reader.config_mut().trim_text(true);

    // The root element must be <map>.
    loop {
        match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
            Event::Start(e) if e.name().as_ref() == b"map" => break,
            Event::Empty(e) if e.name().as_ref() == b"map" => return Ok(BTreeMap::new()),
            Event::Decl(_) | Event::DocType(_) | Event::Comment(_) | Event::Text(_) => continue,
            Event::Eof => return Err(err("no root element".into())),
            _ => return Err(err("root element is not <map>".into())),
        }
    }

    let mut map = BTreeMap::new();
    loop {
        let event = reader.read_event().map_err(|e| err(format!("xml: {e}")))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let tag = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let mut name = None;
                let mut value_attr = None;
                for attr in e.attributes().flatten() {
                    let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
                    let val = attr
                        .decoded_and_normalized_value(
                            quick_xml::XmlVersion::default(),
                            reader.decoder(),
                        )
                        .map_err(|e| err(format!("attr: {e}")))?
                        .into_owned();
                    match key.as_str() {
                        "name" => name = Some(val),
                        "value" => value_attr = Some(val),
                        _ => {}
                    }
                }
                let is_empty = matches!(event, Event::Empty(_));
                let name = name.ok_or_else(|| err(format!("<{tag}> without name")))?;
                let value = match tag.as_str() {
                    "string" => {
                        let body = if is_empty {
                            String::new()
                        } else {
                            element_text(&mut reader, "string")?
                        };
                        TreeValue::Text(body)
                    }
                    "boolean" => {
                        let v = value_attr.ok_or_else(|| err("<boolean> without value".into()))?;
                        if !is_empty {
                            skip_to_end(&mut reader, "boolean")?;
                        }
                        TreeValue::Bool(v == "true")
                    }
                    "int" | "long" => {
                        let v = value_attr.ok_or_else(|| err(format!("<{tag}> without value")))?;
                        if !is_empty {
                            skip_to_end(&mut reader, &tag)?;
                        }
                        TreeValue::Int(v.parse().map_err(|_| err(format!("bad {tag} {v:?}")))?)
                    }
                    "float" => {
                        let v = value_attr.ok_or_else(|| err("<float> without value".into()))?;
                        if !is_empty {
                            skip_to_end(&mut reader, "float")?;
                        }
                        TreeValue::Real(v.parse().map_err(|_| err(format!("bad float {v:?}")))?)
                    }
                    "set" => {
                        let mut items = Vec::new();
                        if !is_empty {
                            loop {
                                match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
                                    Event::Start(s) if s.name().as_ref() == b"string" => {
                                        items.push(TreeValue::Text(element_text(
                                            &mut reader,
                                            "string",
                                        )?));
                                    }
                                    Event::Empty(s) if s.name().as_ref() == b"string" => {
                                        items.push(TreeValue::Text(String::new()));
                                    }
                                    Event::End(s) if s.name().as_ref() == b"set" => break,
                                    Event::Text(_) | Event::Comment(_) => continue,
                                    Event::Eof => return Err(err("unterminated <set>".into())),
                                    _ => return Err(err("unexpected content in <set>".into())),
                                }
                            }
                        }
                        TreeValue::List(items)
                    }
                    other => return Err(err(format!("unknown preference element <{other}>"))),
                };
                map.insert(name, value);
            }
            Event::End(e) if e.name().as_ref() == b"map" => return Ok(map),
            Event::Text(_) | Event::Comment(_) => continue,
            Event::Eof => return Err(err("unterminated <map>".into())),
            _ => return Err(err("unexpected event in <map>".into())),
        }
    }
}

fn element_text(reader: &mut quick_xml::Reader<&[u8]>, tag: &str) -> Result<String, NotPrefsXml> {
    let err = |m: String| NotPrefsXml(m);
    let mut out = String::new();
    loop {
        match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
            Event::Text(t) => out.push_str(&t.decode().map_err(|e| err(format!("text: {e}")))?),
            Event::End(e) if e.name().as_ref() == tag.as_bytes() => return Ok(out),
            Event::Eof => return Err(err(format!("unterminated <{tag}>"))),
            _ => return Err(err(format!("unexpected content in <{tag}>"))),
        }
    }
}

fn skip_to_end(reader: &mut quick_xml::Reader<&[u8]>, tag: &str) -> Result<(), NotPrefsXml> {
    let err = |m: String| NotPrefsXml(m);
    loop {
        match reader.read_event().map_err(|e| err(format!("xml: {e}")))? {
            Event::End(e) if e.name().as_ref() == tag.as_bytes() => return Ok(()),
            Event::Text(_) | Event::Comment(_) => continue,
            Event::Eof => return Err(err(format!("unterminated <{tag}>"))),
            _ => return Err(err(format!("unexpected content in <{tag}>"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map() {
        assert!(read_xml_prefs(b"<map/>").unwrap().is_empty());
        assert!(read_xml_prefs(b"<?xml version='1.0'?><map></map>")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn typed_entries() {
        let xml = br#"<?xml version='1.0' encoding='utf-8' standalone='yes' ?>
<map>
    <string name="vin">VF1RFB00066666666</string>
    <boolean name="paired" value="true" />
    <int name="launch_count" value="4" />
    <long name="last_sync" value="1604412000000" />
    <set name="features"><string>maps</string><string>logbook</string></set>
</map>"#;
        let m = read_xml_prefs(xml).unwrap();
        assert_eq!(m["vin"].as_str(), Some("VF1RFB00066666666"));
        assert_eq!(m["paired"], TreeValue::Bool(true));
        assert_eq!(m["launch_count"], TreeValue::Int(4));
        assert_eq!(m["last_sync"], TreeValue::Int(1_604_412_000_000));
        assert_eq!(m["features"].as_list().map(<[TreeValue]>::len), Some(2));
    }

    #[test]
    fn non_prefs_xml_rejected() {
        assert!(read_xml_prefs(b"<manifest><uses-sdk/></manifest>").is_err());
        assert!(read_xml_prefs(b"plain text").is_err());
    }
}
