//! Evidence ingestion: open an extraction, inventory and hash every file,
//! and keep a tamper-evident chain-of-custody log for everything later
//! parsed or exported.
//!
//! Sources are directory trees, ZIP archives or POSIX tar archives
//! (optionally gzip-compressed). Archive entries are read in place (zip) or
//! into a session-held map (tar); nothing is unpacked to disk. File
//! timestamps are recorded when present but never used as evidence times.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Directory,
    ZipArchive,
    TarArchive,
}

/// One opened extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceSource {
    pub id: String,
    pub kind: SourceKind,
    /// Original mount point of the imaged tree, e.g. `/`.
    pub root_label: String,
    pub opened_at: i64,
}

/// One hashed regular file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Normalized device-absolute path: forward slashes, no `..`, case preserved.
    pub path: String,
    pub size: u64,
    /// Lowercase-hex SHA-256 of the content.
    pub sha256: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mtime: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CustodyAction {
    Inventoried,
    Parsed,
    Exported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustodyRecord {
    pub source_id: String,
    pub file_path: String,
    pub sha256: String,
    pub action: CustodyAction,
    pub actor: String,
    /// UTC milliseconds; rendered as RFC 3339 in the NDJSON export.
    pub at: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: Vec<String>,
    pub changed: Vec<String>,
    pub missing: Vec<String>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.changed.is_empty() && self.missing.is_empty()
    }
}

/// Per-file problems collected during enumeration instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileIssue {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inventory {
    /// Lexicographically ordered by path.
    pub entries: Vec<FileEntry>,
    pub symlinks: Vec<(String, String)>,
    pub issues: Vec<FileIssue>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvidenceError {
    #[error("not found: {0}")]
    NotFound(PathBuf),
    #[error("unreadable: {0}")]
    Unreadable(String),
    #[error("unsupported archive {path}: {detail}")]
    UnsupportedArchive { path: PathBuf, detail: String },
    #[error("unknown source {0}")]
    UnknownSource(String),
    #[error("source {0} has not been enumerated")]
    NotEnumerated(String),
    #[error("path {0} is not in the inventory")]
    NotInInventory(String),
    #[error("integrity violation: {path} digest changed since inventory")]
    IntegrityViolation { path: String },
}

// ---------------------------------------------------------------------------
// Path normalization

/// Normalize to a device-absolute forward-slash path. Idempotent.
pub fn normalize_path(raw: &str) -> String {
    let unified = raw.replace('\\', "/");
    let mut parts: Vec<&str> = Vec::new();
    for part in unified.split('/') {
        match part {
            "" | "." => {}
            ".." => {
                parts.pop();
            }
            other => parts.push(other),
        }
    }
    let mut out = String::with_capacity(raw.len() + 1);
    for part in parts {
        out.push('/');
        out.push_str(part);
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

/// Strip one optional leading component (e.g. an archive wrapper directory)
/// from a raw archive entry name. Applied once at ingestion, before
/// [`normalize_path`].
fn strip_root_prefix<'a>(raw: &'a str, prefix: Option<&str>) -> &'a str {
    let Some(prefix) = prefix else { return raw };
    let trimmed = raw.trim_start_matches('/');
    let prefix = prefix.trim_matches('/');
    if let Some(rest) = trimmed.strip_prefix(prefix) {
        if let Some(rest) = rest.strip_prefix('/') {
            return rest;
        }
        if rest.is_empty() {
            return "";
        }
    }
    raw
}

// ---------------------------------------------------------------------------
// Store

enum Backend {
    Dir {
        root: PathBuf,
    },
    Zip {
        path: PathBuf,
        name_map: BTreeMap<String, String>,
    },
    TarMem {
        files: BTreeMap<String, Vec<u8>>,
        mtimes: BTreeMap<String, i64>,
    },
}

struct SourceState {
    source: EvidenceSource,
    backend: Backend,
    inventory: Option<BTreeMap<String, FileEntry>>,
    symlinks: Vec<(String, String)>,
    issues: Vec<FileIssue>,
}

/// Session over one or more opened sources, holding the custody log.
///
/// Returned inventories and custody records are immutable snapshots, safe to
/// share across readers. The log itself is a single serialized append point.
pub struct EvidenceStore {
    actor: String,
    fixed_clock: Option<i64>,
    root_prefix: Option<String>,
    sources: Vec<SourceState>,
    custody: std::sync::Mutex<Vec<CustodyRecord>>,
}

impl EvidenceStore {
    pub fn new(actor: &str) -> Self {
        EvidenceStore {
            actor: actor.to_string(),
            fixed_clock: None,
            root_prefix: None,
            sources: Vec::new(),
            custody: std::sync::Mutex::new(Vec::new()),
        }
    }

    /// Pin the session clock, making every custody timestamp deterministic.
    pub fn with_fixed_clock(mut self, utc_ms: i64) -> Self {
        self.fixed_clock = Some(utc_ms);
        self
    }

    /// Strip this leading component from archive entry names (rooting
    /// conventions differ between acquisition tools).
    pub fn with_root_prefix(mut self, prefix: Option<String>) -> Self {
        self.root_prefix = prefix;
        self
    }

    fn now(&self) -> i64 {
        self.fixed_clock
            .unwrap_or_else(|| chrono::Utc::now().timestamp_millis())
    }

    /// Open an extraction. The kind is determined by content sniffing; a
    /// declared kind is only checked for consistency. No file content is
    /// parsed here.
    pub fn open_source(
        &mut self,
        location: &Path,
        declared_kind: Option<SourceKind>,
    ) -> Result<EvidenceSource, EvidenceError> {
        let meta = fs::metadata(location).map_err(|_| EvidenceError::NotFound(location.into()))?;
        let kind = if meta.is_dir() {
            SourceKind::Directory
        } else {
            sniff_archive(location)?
        };
        if let Some(declared) = declared_kind {
            if declared != kind {
                return Err(EvidenceError::UnsupportedArchive {
                    path: location.into(),
                    detail: format!("declared {declared:?} but content is {kind:?}"),
                });
            }
        }

        let basename: String = location
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "source".into())
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                    c
                } else {
                    '_'
                }
            })
            .collect();
        let id = format!("s{}-{}", self.sources.len() + 1, basename);

        let backend = match kind {
            SourceKind::Directory => Backend::Dir {
                root: location.into(),
            },
            SourceKind::ZipArchive => Backend::Zip {
                path: location.into(),
                name_map: BTreeMap::new(),
            },
            SourceKind::TarArchive => {
                let (files, mtimes) = load_tar(location, self.root_prefix.as_deref())?;
                Backend::TarMem { files, mtimes }
            }
        };

        let source = EvidenceSource {
            id,
            kind,
            root_label: "/".to_string(),
            opened_at: self.now(),
        };
        self.sources.push(SourceState {
            source: source.clone(),
            backend,
            inventory: None,
            symlinks: Vec::new(),
            issues: Vec::new(),
        });
        Ok(source)
    }

    pub fn sources(&self) -> Vec<EvidenceSource> {
        self.sources.iter().map(|s| s.source.clone()).collect()
    }

    fn state(&self, source_id: &str) -> Result<&SourceState, EvidenceError> {
        self.sources
            .iter()
            .find(|s| s.source.id == source_id)
            .ok_or_else(|| EvidenceError::UnknownSource(source_id.to_string()))
    }

    fn state_mut(&mut self, source_id: &str) -> Result<&mut SourceState, EvidenceError> {
        self.sources
            .iter_mut()
            .find(|s| s.source.id == source_id)
            .ok_or_else(|| EvidenceError::UnknownSource(source_id.to_string()))
    }

    /// Inventory and hash every regular file. Deterministic: same bytes in,
    /// same (path, size, sha256) list out, lexicographic by path. Per-file
    /// errors are collected, not fatal. Symlinks are recorded, never followed.
    pub fn enumerate_files(&mut self, source_id: &str) -> Result<Inventory, EvidenceError> {
        let root_prefix = self.root_prefix.clone();
        let state = self.state_mut(source_id)?;
        let mut inv = Inventory::default();

        match &mut state.backend {
            Backend::Dir { root } => {
                let root = root.clone();
                let mut files = Vec::new();
                walk_dir(&root, &root, &mut files, &mut inv.symlinks, &mut inv.issues);
                files.sort();
                let hashed: Vec<Result<FileEntry, FileIssue>> = files
                    .par_iter()
                    .map(|rel| {
                        let full = root.join(rel.trim_start_matches('/'));
                        hash_file(&full).map(|(size, sha256, mtime)| FileEntry {
                            path: rel.clone(),
                            size,
                            sha256,
                            mtime,
                        })
                    })
                    .collect();
                for h in hashed {
                    match h {
                        Ok(e) => inv.entries.push(e),
                        Err(issue) => inv.issues.push(issue),
                    }
                }
            }
            Backend::Zip { path, name_map } => {
                let file = fs::File::open(&*path)
                    .map_err(|e| EvidenceError::Unreadable(format!("{}: {e}", path.display())))?;
                let mut zip =
                    zip::ZipArchive::new(file).map_err(|e| EvidenceError::UnsupportedArchive {
                        path: path.clone(),
                        detail: e.to_string(),
                    })?;
                for i in 0..zip.len() {
                    let mut entry = match zip.by_index(i) {
                        Ok(e) => e,
                        Err(e) => {
                            inv.issues.push(FileIssue {
                                path: format!("#{i}"),
                                reason: format!("zip entry unreadable: {e}"),
                            });
                            continue;
                        }
                    };
                    if entry.is_dir() {
                        continue;
                    }
                    let raw_name = entry.name().to_string();
                    let path = normalize_path(strip_root_prefix(&raw_name, root_prefix.as_deref()));
                    if entry.is_symlink() {
                        let mut target = String::new();
                        let _ = entry.read_to_string(&mut target);
                        inv.symlinks.push((path, target));
                        continue;
                    }
                    let mut bytes = Vec::new();
                    if let Err(e) = entry.read_to_end(&mut bytes) {
                        inv.issues.push(FileIssue {
                            path,
                            reason: format!("read: {e}"),
                        });
                        continue;
                    }
                    let mtime = entry.last_modified().and_then(zip_mtime_ms);
                    name_map.insert(path.clone(), raw_name);
                    inv.entries.push(FileEntry {
                        path,
                        size: bytes.len() as u64,
                        sha256: util::hex_digest(&util::sha256(&bytes)),
                        mtime,
                    });
                }
                inv.entries.sort_by(|a, b| a.path.cmp(&b.path));
            }
            Backend::TarMem { files, mtimes } => {
                for (path, bytes) in files.iter() {
                    inv.entries.push(FileEntry {
                        path: path.clone(),
                        size: bytes.len() as u64,
                        sha256: util::hex_digest(&util::sha256(bytes)),
                        mtime: mtimes.get(path).copied(),
                    });
                }
            }
        }

        inv.symlinks.sort();
        state.symlinks = inv.symlinks.clone();
        state.issues = inv.issues.clone();
        state.inventory = Some(
            inv.entries
                .iter()
                .map(|e| (e.path.clone(), e.clone()))
                .collect(),
        );

        let at = self.now();
        let actor = self.actor.clone();
        let mut log = self.custody.lock().unwrap();
        for e in &inv.entries {
            log.push(CustodyRecord {
                source_id: source_id.to_string(),
                file_path: e.path.clone(),
                sha256: e.sha256.clone(),
                action: CustodyAction::Inventoried,
                actor: actor.clone(),
                at,
            });
        }
        Ok(inv)
    }

    /// Raw bytes of an inventoried file, without custody side effects.
    pub fn read_raw(&self, source_id: &str, path: &str) -> Result<Vec<u8>, EvidenceError> {
        let state = self.state(source_id)?;
        read_backend(&state.backend, path)
    }

    /// Read a file for parsing: returns its bytes, confirms the digest still
    /// matches the inventory, and appends a `parsed` custody record.
    pub fn read_parsed(&self, source_id: &str, path: &str) -> Result<Vec<u8>, EvidenceError> {
        let state = self.state(source_id)?;
        let inventory = state
            .inventory
            .as_ref()
            .ok_or_else(|| EvidenceError::NotEnumerated(source_id.into()))?;
        let entry = inventory
            .get(path)
            .ok_or_else(|| EvidenceError::NotInInventory(path.to_string()))?;
        let bytes = read_backend(&state.backend, path)?;
        let digest = util::hex_digest(&util::sha256(&bytes));
        if digest != entry.sha256 {
            return Err(EvidenceError::IntegrityViolation {
                path: path.to_string(),
            });
        }
        self.custody.lock().unwrap().push(CustodyRecord {
            source_id: source_id.to_string(),
            file_path: path.to_string(),
            sha256: digest,
            action: CustodyAction::Parsed,
            actor: self.actor.clone(),
            at: self.now(),
        });
        Ok(bytes)
    }

    /// Record that a file's content left the session (report, image export).
    pub fn mark_exported(&self, source_id: &str, path: &str) -> Result<(), EvidenceError> {
        let state = self.state(source_id)?;
        let inventory = state
            .inventory
            .as_ref()
            .ok_or_else(|| EvidenceError::NotEnumerated(source_id.into()))?;
        let entry = inventory
            .get(path)
            .ok_or_else(|| EvidenceError::NotInInventory(path.to_string()))?;
        self.custody.lock().unwrap().push(CustodyRecord {
            source_id: source_id.to_string(),
            file_path: path.to_string(),
            sha256: entry.sha256.clone(),
            action: CustodyAction::Exported,
            actor: self.actor.clone(),
            at: self.now(),
        });
        Ok(())
    }

    /// Re-hash all files of a previous inventory and report per-path status.
    /// Discrepancies are report content, never errors.
    pub fn verify(
        &self,
        source_id: &str,
        entries: &[FileEntry],
    ) -> Result<VerificationReport, EvidenceError> {
        let state = self.state(source_id)?;
        let mut report = VerificationReport::default();
        for e in entries {
            match read_backend(&state.backend, &e.path) {
                Ok(bytes) => {
                    if util::hex_digest(&util::sha256(&bytes)) == e.sha256 {
                        report.ok.push(e.path.clone());
                    } else {
                        report.changed.push(e.path.clone());
                    }
                }
                Err(_) => report.missing.push(e.path.clone()),
            }
        }
        Ok(report)
    }

    /// The append-only custody log for one source, in append order.
    pub fn custody_log(&self, source_id: &str) -> Vec<CustodyRecord> {
        self.custody
            .lock()
            .unwrap()
            .iter()
            .filter(|r| r.source_id == source_id)
            .cloned()
            .collect()
    }

    pub fn custody_log_all(&self) -> Vec<CustodyRecord> {
        self.custody.lock().unwrap().clone()
    }

    /// Inventory digest lookup for provenance checks.
    pub fn inventory_digest(&self, source_id: &str, path: &str) -> Option<String> {
        self.state(source_id)
            .ok()?
            .inventory
            .as_ref()?
            .get(path)
            .map(|e| e.sha256.clone())
    }

    /// Newline-delimited JSON rendering of the whole custody log, with
    /// RFC 3339 UTC timestamps, deterministically ordered.
    pub fn custody_ndjson(&self) -> String {
        let mut records = self.custody_log_all();
        records.sort_by(|a, b| {
            (a.at, &a.source_id, &a.file_path, a.action).cmp(&(
                b.at,
                &b.source_id,
                &b.file_path,
                b.action,
            ))
        });
        let mut out = String::new();
        for r in records {
            let at = chrono::DateTime::from_timestamp_millis(r.at)
                .unwrap_or_default()
                .to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
            let line = serde_json::json!({
                "source_id": r.source_id,
                "file_path": r.file_path,
                "sha256": r.sha256,
                "action": match r.action {
                    CustodyAction::Inventoried => "inventoried",
                    CustodyAction::Parsed => "parsed",
                    CustodyAction::Exported => "exported",
                },
                "actor": r.actor,
                "at": at,
            });
            out.push_str(&serde_json::to_string(&line).unwrap());
            out.push('\n');
        }
        out
    }
}

fn read_backend(backend: &Backend, path: &str) -> Result<Vec<u8>, EvidenceError> {
    match backend {
        Backend::Dir { root } => {
            let full = root.join(path.trim_start_matches('/'));
            fs::read(&full).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => EvidenceError::NotFound(full),
                _ => EvidenceError::Unreadable(format!("{}: {e}", full.display())),
            })
        }
        Backend::Zip {
            path: zip_path,
            name_map,
        } => {
            let raw_name = name_map
                .get(path)
                .cloned()
                .ok_or_else(|| EvidenceError::NotInInventory(path.to_string()))?;
            let file = fs::File::open(zip_path)
                .map_err(|e| EvidenceError::Unreadable(format!("{}: {e}", zip_path.display())))?;
            let mut zip =
                zip::ZipArchive::new(file).map_err(|e| EvidenceError::Unreadable(e.to_string()))?;
            let mut entry = zip
                .by_name(&raw_name)
                .map_err(|_| EvidenceError::NotInInventory(path.to_string()))?;
            let mut bytes = Vec::new();
            entry
                .read_to_end(&mut bytes)
                .map_err(|e| EvidenceError::Unreadable(format!("{path}: {e}")))?;
            Ok(bytes)
        }
        Backend::TarMem { files, .. } => files
            .get(path)
            .cloned()
            .ok_or_else(|| EvidenceError::NotFound(PathBuf::from(path))),
    }
}

// ---------------------------------------------------------------------------
// Sniffing and archive loading

fn sniff_archive(location: &Path) -> Result<SourceKind, EvidenceError> {
    let mut file = fs::File::open(location)
        .map_err(|e| EvidenceError::Unreadable(format!("{}: {e}", location.display())))?;
    let mut head = [0u8; 512];
    let n = file
        .read(&mut head)
        .map_err(|e| EvidenceError::Unreadable(e.to_string()))?;
    let head = &head[..n];

    if head.starts_with(b"PK\x03\x04") || head.starts_with(b"PK\x05\x06") {
        return Ok(SourceKind::ZipArchive);
    }
    if head.starts_with(&[0x1f, 0x8b]) {
        return Ok(SourceKind::TarArchive); // gzip wrapper; content validated on load
    }
    // ustar magic sits at offset 257 of the first header block.
    let mut block = [0u8; 512];
    block[..n.min(512)].copy_from_slice(&head[..n.min(512)]);
    if n >= 512 && (&block[257..262] == b"ustar" || tar_checksum_ok(&block)) {
        return Ok(SourceKind::TarArchive);
    }
    Err(EvidenceError::UnsupportedArchive {
        path: location.into(),
        detail: "not a directory, zip or tar".into(),
    })
}

/// Pre-POSIX tar has no magic; validate the header checksum instead.
fn tar_checksum_ok(block: &[u8; 512]) -> bool {
    let stored = std::str::from_utf8(&block[148..156])
        .ok()
        .map(|s| s.trim_matches(|c: char| c == '\0' || c == ' '))
        .and_then(|s| u32::from_str_radix(s, 8).ok());
    let Some(stored) = stored else { return false };
    if stored == 0 {
        return false;
    }
    let mut sum: u32 = 0;
    for (i, &b) in block.iter().enumerate() {
        sum += if (148..156).contains(&i) {
            0x20
        } else {
            b as u32
        };
    }
    sum == stored
}

type TarContents = (BTreeMap<String, Vec<u8>>, BTreeMap<String, i64>);

fn load_tar(location: &Path, root_prefix: Option<&str>) -> Result<TarContents, EvidenceError> {
    let file = fs::File::open(location)
        .map_err(|e| EvidenceError::Unreadable(format!("{}: {e}", location.display())))?;
    let mut magic = [0u8; 2];
    let mut probe =
        fs::File::open(location).map_err(|e| EvidenceError::Unreadable(e.to_string()))?;
    let gz = probe
        .read(&mut magic)
        .map_err(|e| EvidenceError::Unreadable(e.to_string()))?
        == 2
        && magic == [0x1f, 0x8b];

    let reader: Box<dyn Read> = if gz {
        Box::new(flate2::read::GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    let mut archive = tar::Archive::new(reader);
    let mut files = BTreeMap::new();
    let mut mtimes = BTreeMap::new();
    let entries = archive
        .entries()
        .map_err(|e| EvidenceError::UnsupportedArchive {
            path: location.into(),
            detail: e.to_string(),
        })?;
    for entry in entries {
        let mut entry = entry.map_err(|e| EvidenceError::UnsupportedArchive {
            path: location.into(),
            detail: e.to_string(),
        })?;
        if !entry.header().entry_type().is_file() {
            continue;
        }
        let raw = entry
            .path()
            .map_err(|e| EvidenceError::Unreadable(e.to_string()))?;
        let raw = raw.to_string_lossy().into_owned();
        let path = normalize_path(strip_root_prefix(&raw, root_prefix));
        let mut bytes = Vec::new();
        entry
            .read_to_end(&mut bytes)
            .map_err(|e| EvidenceError::Unreadable(e.to_string()))?;
        if let Ok(mtime) = entry.header().mtime() {
            if mtime > 0 {
                mtimes.insert(path.clone(), (mtime as i64) * 1000);
            }
        }
        files.insert(path, bytes);
    }
    Ok((files, mtimes))
}

fn walk_dir(
    root: &Path,
    dir: &Path,
    files: &mut Vec<String>,
    symlinks: &mut Vec<(String, String)>,
    issues: &mut Vec<FileIssue>,
) {
    let rel_of = |p: &Path| {
        let rel = p.strip_prefix(root).unwrap_or(p);
        normalize_path(&rel.to_string_lossy())
    };
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            issues.push(FileIssue {
                path: rel_of(dir),
                reason: format!("readdir: {e}"),
            });
            return;
        }
    };
    for entry in entries {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                issues.push(FileIssue {
                    path: rel_of(dir),
                    reason: format!("readdir: {e}"),
                });
                continue;
            }
        };
        let path = entry.path();
        let meta = match fs::symlink_metadata(&path) {
            Ok(m) => m,
            Err(e) => {
                issues.push(FileIssue {
                    path: rel_of(&path),
                    reason: format!("stat: {e}"),
                });
                continue;
            }
        };
        if meta.file_type().is_symlink() {
            let target = fs::read_link(&path)
                .map(|t| t.to_string_lossy().into_owned())
                .unwrap_or_default();
            symlinks.push((rel_of(&path), target));
        } else if meta.is_dir() {
            walk_dir(root, &path, files, symlinks, issues);
        } else if meta.is_file() {
            files.push(rel_of(&path));
        }
    }
}

fn hash_file(path: &Path) -> Result<(u64, String, Option<i64>), FileIssue> {
    use sha2::Digest;
    let mut file = fs::File::open(path).map_err(|e| FileIssue {
        path: path.to_string_lossy().into_owned(),
        reason: format!("open: {e}"),
    })?;
    let meta = file.metadata().ok();
    let mut hasher = sha2::Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    let mut size = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(|e| FileIssue {
            path: path.to_string_lossy().into_owned(),
            reason: format!("read: {e}"),
        })?;
        if n == 0 {
            break;
        }
        size += n as u64;
        hasher.update(&buf[..n]);
    }
    let digest: [u8; 32] = hasher.finalize().into();
    let mtime = meta
        .and_then(|m| m.modified().ok())
        .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
        .map(|d| d.as_millis() as i64);
    Ok((size, util::hex_digest(&digest), mtime))
}

fn zip_mtime_ms(dt: zip::DateTime) -> Option<i64> {
    use chrono::TimeZone;
    let date = chrono::Utc
        .with_ymd_and_hms(
            dt.year() as i32,
            dt.month() as u32,
            dt.day() as u32,
            dt.hour() as u32,
            dt.minute() as u32,
            dt.second() as u32,
        )
        .single()?;
    Some(date.timestamp_millis())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_idempotent_and_absolute() {
        for raw in [
            "a/b/../c",
            "//x//y/./z",
            "data/data/app",
            "",
            "/already/normal",
            r"win\style\p",
        ] {
            let once = normalize_path(raw);
            assert_eq!(normalize_path(&once), once, "idempotence for {raw:?}");
            assert!(once.starts_with('/'));
            assert!(!once.contains(".."));
        }
        assert_eq!(normalize_path("a/b/../c"), "/a/c");
        assert_eq!(normalize_path("private/var/mobile"), "/private/var/mobile");
    }

    #[test]
    fn root_prefix_stripping() {
        assert_eq!(strip_root_prefix("private/var/x", Some("private")), "var/x");
        assert_eq!(
            strip_root_prefix("/private/var/x", Some("private")),
            "var/x"
        );
        assert_eq!(strip_root_prefix("var/x", Some("private")), "var/x");
        assert_eq!(
            strip_root_prefix("privateer/x", Some("private")),
            "privateer/x"
        );
    }
}
