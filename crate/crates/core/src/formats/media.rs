//! Base64-embedded image decoding (parking-position photos).

use base64::Engine;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("not Base64 data")]
pub struct NotBase64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    Jpeg,
    Png,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedImage {
    pub bytes: Vec<u8>,
    pub format: ImageFormat,
}

/// Decode standard or URL-safe Base64 text and sniff the image type from the
/// leading magic bytes.
pub fn decode_base64_image(text: &str) -> Result<DecodedImage, NotBase64> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(compact.as_bytes())
        .or_else(|_| base64::engine::general_purpose::URL_SAFE.decode(compact.as_bytes()))
        .or_else(|_| base64::engine::general_purpose::URL_SAFE_NO_PAD.decode(compact.as_bytes()))
        .map_err(|_| NotBase64)?;
    Ok(DecodedImage {
        format: sniff_image(&bytes),
        bytes,
    })
}

pub fn sniff_image(bytes: &[u8]) -> ImageFormat {
    if bytes.starts_with(&[0xff, 0xd8, 0xff]) {
        ImageFormat::Jpeg
    } else if bytes.starts_with(&[0x89, 0x50, 0x4e, 0x47]) {
        ImageFormat::Png
    } else {
        ImageFormat::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sniffs_jpeg_and_png() {
        use base64::Engine;
        let jpeg = base64::engine::general_purpose::STANDARD.encode([0xff, 0xd8, 0xff, 0xe0, 0x00]);
        assert_eq!(
            decode_base64_image(&jpeg).unwrap().format,
            ImageFormat::Jpeg
        );
        let png = base64::engine::general_purpose::STANDARD.encode([0x89, 0x50, 0x4e, 0x47, 0x0d]);
        assert_eq!(decode_base64_image(&png).unwrap().format, ImageFormat::Png);
        let other = base64::engine::general_purpose::STANDARD.encode(b"plain");
        assert_eq!(
            decode_base64_image(&other).unwrap().format,
            ImageFormat::Unknown
        );
    }

    #[test]
    fn rejects_non_base64() {
        assert_eq!(decode_base64_image("not base64!!"), Err(NotBase64));
    }
}
