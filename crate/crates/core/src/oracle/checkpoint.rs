//! Scan checkpoints: the `(n, t)` cursor plus the `(n, t)` pairs of records,
//! threshold hits and exact hits. Sums are recomputed on resume.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::{crossing, hdiff_exact, EpsilonRecord};
use crate::Rat;
use num_traits::One;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    /// Last fully scanned `n` and its `t(n)`.
    pub cursor: (u64, u64),
    pub records: Vec<(u64, u64)>,
    pub below: Vec<(u64, u64)>,
    pub hits: Vec<u64>,
}

fn corrupt(path: &Path, reason: impl Into<String>) -> Error {
    Error::CorruptCheckpoint {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

impl Checkpoint {
    /// Reads a checkpoint; `Ok(None)` if the file does not exist.
    pub fn load(path: &Path) -> Result<Option<Checkpoint>> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let cp: Checkpoint =
            serde_json::from_str(&text).map_err(|e| corrupt(path, e.to_string()))?;
        cp.validate(path)?;
        Ok(Some(cp))
    }

    /// Writes through a temporary file and a rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = PathBuf::from(path);
        tmp.as_mut_os_string().push(".tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, self)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Semantic checks: cursor and every stored pair must satisfy
    /// `t = t(n)`, and records must strictly improve.
    fn validate(&self, path: &Path) -> Result<()> {
        if self.version != FORMAT_VERSION {
            return Err(corrupt(path, format!("unsupported version {}", self.version)));
        }
        let (n, t) = self.cursor;
        if n < 2 {
            return Err(corrupt(path, "cursor below 2"));
        }
        let check = |n: u64, t: u64| -> Result<()> {
            if n > self.cursor.0 || crossing(n)? != t {
                return Err(corrupt(path, format!("pair ({n}, {t}) is not a crossing")));
            }
            Ok(())
        };
        check(n, t)?;
        for &(n, t) in self.records.iter().chain(&self.below) {
            check(n, t)?;
        }
        if self.records.is_empty() || self.records[0].0 != 2 {
            return Err(corrupt(path, "records must start at n = 2"));
        }
        let exact = self.exact_records()?;
        if !exact.windows(2).all(|w| w[0].n < w[1].n && w[1].scaled < w[0].scaled) {
            return Err(corrupt(path, "records are not strictly decreasing"));
        }
        for &h in &self.hits {
            if h > self.cursor.0 || h < 2 || hdiff_exact(h, crossing(h)?)? != Rat::one() {
                return Err(corrupt(path, format!("{h} is not an exact hit")));
            }
        }
        Ok(())
    }

    /// Records with exact overshoots recomputed.
    pub fn exact_records(&self) -> Result<Vec<EpsilonRecord>> {
        self.records
            .iter()
            .map(|&(n, t)| {
                let eps = hdiff_exact(n, t)? - Rat::one();
                Ok(EpsilonRecord::from_exact(n, t, eps))
            })
            .collect()
    }
}
