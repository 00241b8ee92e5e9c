use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CensusReport;
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Progress of an interrupted census: everything before `next_index` is
/// folded into `partial`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub space_hash: String,
    pub next_index: u64,
    pub partial: CensusReport,
}

impl Checkpoint {
    /// `Ok(None)` when no file exists yet.
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(path, e)),
        };
        let cp: Checkpoint =
            serde_json::from_slice(&bytes).map_err(|e| Error::Json { path: path.into(), source: e })?;
        if cp.schema_version != CHECKPOINT_VERSION {
            return Err(Error::schema(
                path.display().to_string(),
                format!("unsupported checkpoint version {}", cp.schema_version),
            ));
        }
        Ok(Some(cp))
    }

    /// Writes through a temporary file and a rename, so a crash never
    /// leaves a truncated checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let json = serde_json::to_vec(self).map_err(|e| Error::Json { path: path.into(), source: e })?;
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(&json).map_err(|e| Error::io(&tmp, e))?;
        file.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}
