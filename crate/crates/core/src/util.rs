//! Small shared helpers.

use sha2::{Digest, Sha256};

/// SHA-256 of a byte slice, returned as the raw 32-byte digest.
pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().into()
}

/// Lowercase-hex rendering of a digest.
pub fn hex_digest(digest: &[u8; 32]) -> String {
    hex::encode(digest)
}

/// Shannon entropy of a byte slice, in bits per byte (0.0..=8.0).
pub fn shannon_entropy(bytes: &[u8]) -> f64 {
    if bytes.is_empty() {
        return 0.0;
    }
    let mut counts = [0u64; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    let n = bytes.len() as f64;
    let mut entropy = 0.0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        let p = c as f64 / n;
        entropy -= p * p.log2();
    }
    entropy
}

/// Great-circle distance between two WGS84 points in meters.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    const R: f64 = 6_371_000.0;
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = (lat2 - lat1).to_radians();
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * R * a.sqrt().atan2((1.0 - a).sqrt())
}

/// Minimal glob matcher over forward-slash paths.
///
/// Supports `*` (within one segment), `?` (one char within a segment) and
/// `**` (any number of whole segments, including zero). Case-sensitive.
pub fn glob_match(pattern: &str, path: &str) -> bool {
    let pat: Vec<&str> = pattern.split('/').filter(|s| !s.is_empty()).collect();
    let segs: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    match_segments(&pat, &segs)
}

fn match_segments(pat: &[&str], segs: &[&str]) -> bool {
    match pat.first() {
        None => segs.is_empty(),
        Some(&"**") => {
            // `**` swallows zero or more segments.
            (0..=segs.len()).any(|k| match_segments(&pat[1..], &segs[k..]))
        }
        Some(p) => match segs.first() {
            Some(s) if match_one(p, s) => match_segments(&pat[1..], &segs[1..]),
            _ => false,
        },
    }
}

fn match_one(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    // Iterative wildcard match with backtracking over the last `*`.
    let (mut pi, mut ti) = (0usize, 0usize);
    let (mut star, mut mark) = (usize::MAX, 0usize);
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == t[ti]) {
            pi += 1;
            ti += 1;
        } else if pi < p.len() && p[pi] == '*' {
            star = pi;
            mark = ti;
            pi += 1;
        } else if star != usize::MAX {
            pi = star + 1;
            mark += 1;
            ti = mark;
        } else {
            return false;
        }
    }
    while pi < p.len() && p[pi] == '*' {
        pi += 1;
    }
    pi == p.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_extremes() {
        assert_eq!(shannon_entropy(&[]), 0.0);
        assert_eq!(shannon_entropy(&[7u8; 4096]), 0.0);
        let uniform: Vec<u8> = (0..=255u8).cycle().take(4096).collect();
        assert!((shannon_entropy(&uniform) - 8.0).abs() < 1e-9);
    }

    #[test]
    fn glob_segments() {
        assert!(glob_match("databases/*.db", "databases/avacar.db"));
        assert!(!glob_match("databases/*.db", "databases/sub/avacar.db"));
        assert!(glob_match(
            "WebRequestManagerCache/**",
            "WebRequestManagerCache/a/b/c"
        ));
        assert!(glob_match(
            "**/Cache.db",
            "Library/Caches/com.teslamotors.TeslaApp/Cache.db"
        ));
        assert!(glob_match("files/vehicleList", "files/vehicleList"));
        assert!(!glob_match("files/vehicleList", "files/vehicleList2"));
        assert!(glob_match(
            "cache/GeminiCache/*.1",
            "cache/GeminiCache/16d8b336.1"
        ));
        assert!(glob_match(
            "Documents/*/000000000000",
            "Documents/1e9b5df8855a8f490f848099ef3e550c/000000000000"
        ));
        assert!(glob_match("a/**", "a"));
    }

    #[test]
    fn haversine_sanity() {
        // One degree of latitude is about 111.19 km.
        let d = haversine_m(51.0, 7.0, 52.0, 7.0);
        assert!((d - 111_195.0).abs() < 200.0, "{d}");
        assert_eq!(haversine_m(51.5, 7.5, 51.5, 7.5), 0.0);
    }
}
