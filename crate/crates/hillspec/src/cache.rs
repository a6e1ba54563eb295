//! Content-addressed result directories.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::CampaignConfig;
use crate::error::{HarnessError, Result};
use crate::formats::to_json;

/// Overrides the default `results` cache root.
pub const CACHE_DIR_ENV: &str = "HILLSPEC_CACHE_DIR";

/// Hex SHA-256 of the canonical JSON of `config`.
///
/// Canonical means keys sorted, no whitespace, every float with 17
/// significant digits and defaults filled in, so reordered or abbreviated
/// files describing the same campaign share a key. The output directory is
/// excluded.
pub fn cache_key(config: &CampaignConfig) -> String {
    let mut c = config.clone();
    c.out_dir = None;
    // a serde_json::Value sorts object keys
    let value = serde_json::to_value(&c).expect("configs serialize");
    let canonical = to_json(&value).expect("values serialize");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `--out` if given, else the config's `out_dir`, else
/// `<cache root>/<cache key>` with the root from [`CACHE_DIR_ENV`] or
/// `results`.
pub fn output_dir(config: &CampaignConfig, out: Option<&Path>) -> PathBuf {
    if let Some(out) = out.or(config.out_dir.as_deref()) {
        return out.to_path_buf();
    }
    let root = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"));
    root.join(cache_key(config))
}

/// Writes `bytes` to `dir/name` via a temporary file and a rename, so a
/// reader never observes a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let fail = |source| HarnessError::Write {
        path: target.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(fail)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    f.write_all(bytes).map_err(fail)?;
    f.sync_all().map_err(fail)?;
    drop(f);
    fs::rename(&tmp, &target).map_err(fail)?;
    Ok(target)
}
