use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::request::Usage;
use super::ClientError;

/// One recorded exchange. Requests are stored as fingerprints only;
/// replay rebuilds requests from the same inputs and looks them up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub fingerprint: String,
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub usage: Option<Usage>,
}

/// Append-only JSON-lines store of request/response pairs. On duplicate
/// fingerprints the first entry wins, both at load and at record time, so
/// replay is deterministic.
#[derive(Debug)]
pub struct Cassette {
    path: PathBuf,
    by_fingerprint: HashMap<String, CassetteEntry>,
}

impl Cassette {
    pub fn open(path: &Path) -> Result<Self, ClientError> {
        let raw = std::fs::read_to_string(path)?;
        let mut by_fingerprint = HashMap::new();
        for (lineno, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: CassetteEntry = serde_json::from_str(line).map_err(|e| {
                ClientError::MalformedResponse(format!(
                    "cassette {} line {}: {e}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            by_fingerprint.entry(entry.fingerprint.clone()).or_insert(entry);
        }
        Ok(Self { path: path.to_path_buf(), by_fingerprint })
    }

    pub fn open_or_create(path: &Path) -> Result<Self, ClientError> {
        if path.exists() {
            Self::open(path)
        } else {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, b"")?;
            Ok(Self { path: path.to_path_buf(), by_fingerprint: HashMap::new() })
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.by_fingerprint.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_fingerprint.is_empty()
    }

    pub fn lookup(&self, fingerprint: &str) -> Option<&CassetteEntry> {
        self.by_fingerprint.get(fingerprint)
    }

    /// Append an entry unless its fingerprint is already present.
    pub fn record(&mut self, entry: CassetteEntry) -> Result<(), ClientError> {
        if self.by_fingerprint.contains_key(&entry.fingerprint) {
            return Ok(());
        }
        let mut file = std::fs::OpenOptions::new().append(true).open(&self.path)?;
        let mut line = serde_json::to_string(&entry)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        self.by_fingerprint.insert(entry.fingerprint.clone(), entry);
        Ok(())
    }
}
