use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// One record per run. Everything except `wall_time_ms` is a function of
/// the input bytes and the flags.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: Option<String>,
    pub config: Value,
    pub tool_version: String,
    pub outputs: Vec<OutputFile>,
    pub details: Value,
    pub exit_code: u8,
    pub wall_time_ms: u128,
}

pub struct Run {
    started: Instant,
    pub manifest: RunManifest,
}

impl Run {
    pub fn new(command: &str, config: Value) -> Run {
        Run {
            started: Instant::now(),
            manifest: RunManifest {
                command: command.to_string(),
                input_digest: None,
                config,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                outputs: Vec::new(),
                details: Value::Null,
                exit_code: 0,
                wall_time_ms: 0,
            },
        }
    }

    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.input_digest = Some(sha256_hex(&bytes));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    /// Writes `text` to `path`, or to standard output when `path` is `None`.
    pub fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<()> {
        match path {
            Some(p) => self.write(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.push(OutputFile { path: path.to_path_buf(), sha256: sha256_hex(text.as_bytes()) });
        Ok(())
    }

    /// Writes the manifest to `path`, or as one line on standard error.
    pub fn finish(mut self, path: Option<&Path>, exit_code: u8) -> Result<()> {
        self.manifest.exit_code = exit_code;
        self.manifest.wall_time_ms = self.started.elapsed().as_millis();
        let text = serde_json::to_string(&self.manifest)?;
        match path {
            Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
            None => eprintln!("{text}"),
        }
        Ok(())
    }
}
