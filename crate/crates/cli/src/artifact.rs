// SPDX-License-Identifier: Apache-2.0

//! Run configuration, input hashing and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Format;

/// Default output directory when no explicit path is given.
pub const OUT_DIR_ENV: &str = "HOPCOV_OUT_DIR";

#[derive(Debug, Clone, Serialize)]
pub struct InputSpec {
    pub path: PathBuf,
    pub format: Option<Format>,
    pub name: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FingerprintSettings {
    pub preset: Option<String>,
    pub features: Vec<u8>,
    pub eigenvectors: usize,
    pub hops: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsSettings {
    pub alpha: f64,
    pub convention: hopcov_core::CdConvention,
    pub algorithms: Option<Vec<String>>,
}

/// Everything that determines a run, echoed into each artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub input: Option<InputSpec>,
    pub fingerprint: Option<FingerprintSettings>,
    pub evaluation: Option<hopcov_core::ProtocolConfig>,
    pub stats: Option<StatsSettings>,
    pub outputs: Vec<PathBuf>,
    pub threads: Option<usize>,
    pub seed: u64,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    run_config: &'a RunConfig,
    input_sha256: &'a str,
    result: &'a T,
}

/// SHA-256 of a file, or of every regular file in a directory (sorted by
/// name, each prefixed by its name).
pub fn hash_input(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        entries.sort();
        for p in entries {
            let name = p
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            hasher.update(name.as_bytes());
            hasher.update([0]);
            hasher.update(fs::read(&p).with_context(|| format!("reading {}", p.display()))?);
        }
    } else {
        hasher.update(fs::read(path).with_context(|| format!("reading {}", path.display()))?);
    }
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// `explicit`, or `default_name` inside `$HOPCOV_OUT_DIR` (or the working
/// directory).
pub fn output_path(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join(default_name),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

/// Writes `result` wrapped with the run configuration and input hash.
pub fn write_json<T: Serialize>(
    path: &Path,
    config: &RunConfig,
    input_sha256: &str,
    result: &T,
) -> Result<()> {
    let text = serde_json::to_string_pretty(&Envelope {
        run_config: config,
        input_sha256,
        result,
    })?;
    write_atomic(path, (text + "\n").as_bytes())
}

/// Sidecar for artifacts that cannot carry metadata themselves.
pub fn meta_path(artifact: &Path) -> PathBuf {
    let mut p = artifact.as_os_str().to_owned();
    p.push(".meta.json");
    PathBuf::from(p)
}
