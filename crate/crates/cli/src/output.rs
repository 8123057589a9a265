use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliResult;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    /// Fully resolved config; passing this file back as `--config`
    /// reproduces the run.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub arguments: Vec<String>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("decohere".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("decohere-core".to_string(), decohere_core::VERSION.to_string()),
    ])
}

/// Output directory with write-then-rename file creation.
#[derive(Debug)]
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| crate::CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn write_manifest(&mut self, manifest: &Manifest) -> CliResult<PathBuf> {
        self.write_json(MANIFEST, manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_atomically_and_tracks_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::create(&dir.path().join("nested")).unwrap();
        out.write("a.csv", "x\n1\n").unwrap();
        out.write("a.csv", "x\n2\n").unwrap();
        out.write_json("b.json", &serde_json::json!({"k": 1})).unwrap();
        assert_eq!(out.files(), ["a.csv", "b.json"]);
        assert_eq!(std::fs::read_to_string(out.dir().join("a.csv")).unwrap(), "x\n2\n");
        let leftovers = std::fs::read_dir(out.dir()).unwrap().count();
        assert_eq!(leftovers, 2);
    }
}
