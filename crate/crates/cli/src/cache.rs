//! Persistent `χ_n` tables under `PROLATE_CACHE_DIR`, one JSON file per
//! band limit and truncation policy.

use std::fs;
use std::path::{Path, PathBuf};

use prolate::{ChiEntry, ProlateContext};
use serde::{Deserialize, Serialize};

pub const CACHE_ENV: &str = "PROLATE_CACHE_DIR";
const FORMAT: &str = "prolate-chi-cache";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format: String,
    version: u32,
    c: f64,
    truncation: String,
    entries: Vec<(usize, ChiEntry)>,
}

pub struct ChiCache {
    dir: PathBuf,
    truncation: String,
}

impl ChiCache {
    pub fn from_env(truncation_dim: Option<usize>) -> Option<Self> {
        let dir = std::env::var_os(CACHE_ENV)?;
        Some(ChiCache {
            dir: PathBuf::from(dir),
            truncation: truncation_dim.map_or_else(|| "auto".to_string(), |d| format!("fixed{d}")),
        })
    }

    fn path(&self, c: f64) -> PathBuf {
        self.dir
            .join(format!("chi_{:016x}_{}.json", c.to_bits(), self.truncation))
    }

    /// Seeds `ctx` from its file; unreadable or mismatched files are skipped.
    pub fn load(&self, ctx: &ProlateContext) {
        let path = self.path(ctx.c());
        let Ok(text) = fs::read_to_string(&path) else {
            return;
        };
        match serde_json::from_str::<CacheFile>(&text) {
            Ok(file)
                if file.format == FORMAT
                    && file.version == VERSION
                    && file.c.to_bits() == ctx.c().to_bits()
                    && file.truncation == self.truncation =>
            {
                for (n, entry) in file.entries {
                    ctx.seed_chi(n, entry);
                }
            }
            _ => eprintln!("warning: ignoring incompatible cache file {}", path.display()),
        }
    }

    pub fn store(&self, ctx: &ProlateContext) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let file = CacheFile {
            format: FORMAT.to_string(),
            version: VERSION,
            c: ctx.c(),
            truncation: self.truncation.clone(),
            entries: ctx.chi_table(),
        };
        write_atomic(&self.path(ctx.c()), &serde_json::to_string(&file)?)
    }
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(tmp, path)
}
