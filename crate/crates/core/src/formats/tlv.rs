//! Best-effort text extraction from the navigation `*_MapSettings_.tlv`
//! containers.
//!
//! The container grammar is undocumented; destination names are stored as
//! plain text among binary fields, so a conservative string-run scan is used:
//! UTF-8 and UTF-16LE runs of at least four printable code points, in order
//! of appearance. Length prefixes, when present, fall out naturally as
//! non-printable bytes. These files carry no timestamps.

const MIN_RUN: usize = 4;

pub fn read_tlv_strings(bytes: &[u8]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        if let Some((s, consumed)) = utf16le_run(&bytes[i..]) {
            out.push(s);
            i += consumed;
            continue;
        }
        if let Some((s, consumed)) = utf8_run(&bytes[i..]) {
            out.push(s);
            i += consumed;
            continue;
        }
        i += 1;
    }
    out
}

/// Printable for navigation text: ASCII graphic, space, and the Latin
/// supplements covering European place names. Wider ranges would let random
/// binary pairs masquerade as CJK text.
fn is_printable(c: char) -> bool {
    c == ' ' || c.is_ascii_graphic() || ('\u{00A0}'..'\u{0250}').contains(&c)
}

fn utf8_run(bytes: &[u8]) -> Option<(String, usize)> {
    let mut chars: Vec<char> = Vec::new();
    let mut used = 0usize;
    while used < bytes.len() {
        match decode_utf8(&bytes[used..]) {
            Some((c, n)) if is_printable(c) => {
                chars.push(c);
                used += n;
            }
            _ => break,
        }
    }
    if chars.len() >= MIN_RUN {
        Some((chars.into_iter().collect(), used))
    } else {
        None
    }
}

fn decode_utf8(bytes: &[u8]) -> Option<(char, usize)> {
    let b0 = *bytes.first()?;
    let len = match b0 {
        0x00..=0x7f => 1,
        0xc2..=0xdf => 2,
        0xe0..=0xef => 3,
        0xf0..=0xf4 => 4,
        _ => return None,
    };
    let slice = bytes.get(..len)?;
    std::str::from_utf8(slice)
        .ok()?
        .chars()
        .next()
        .map(|c| (c, len))
}

fn utf16le_run(bytes: &[u8]) -> Option<(String, usize)> {
    let mut units: Vec<char> = Vec::new();
    let mut used = 0usize;
    while used + 1 < bytes.len() {
        let unit = u16::from_le_bytes([bytes[used], bytes[used + 1]]);
        match char::from_u32(unit as u32) {
            Some(c) if is_printable(c) => units.push(c),
            _ => break,
        }
        used += 2;
    }
    if units.len() >= MIN_RUN {
        Some((units.into_iter().collect(), used))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_printable_runs() {
        assert!(read_tlv_strings(&[]).is_empty());
        assert!(read_tlv_strings(&[0xff, 0xfe, 0x03, 0x80, 0x81]).is_empty());
        // Runs shorter than the threshold are noise.
        assert!(read_tlv_strings(b"\x01ab\x02cd\x03").is_empty());
    }

    #[test]
    fn length_prefixed_utf8_strings_in_order() {
        let mut data = vec![0x10u8, 0x02, 0x00]; // tag + binary field
        let a = "M\u{fc}nster".as_bytes(); // Münster
        data.push(a.len() as u8);
        data.extend_from_slice(a);
        data.extend_from_slice(&[0x00, 0x07, 0x81, 0x85]);
        let b = b"Hafenweg";
        data.push(b.len() as u8);
        data.extend_from_slice(b);
        assert_eq!(
            read_tlv_strings(&data),
            vec!["M\u{fc}nster".to_string(), "Hafenweg".to_string()]
        );
    }

    #[test]
    fn duplicates_preserved() {
        let data = b"\x00Aachen\x00Aachen\x00".to_vec();
        assert_eq!(read_tlv_strings(&data), vec!["Aachen", "Aachen"]);
    }

    #[test]
    fn utf16le_runs_extracted() {
        let text: Vec<u8> = "Dortmund"
            .encode_utf16()
            .flat_map(u16::to_le_bytes)
            .collect();
        let mut data = vec![0xfeu8, 0x03];
        data.extend_from_slice(&text);
        data.push(0x00);
        assert_eq!(read_tlv_strings(&data), vec!["Dortmund"]);
    }
}
