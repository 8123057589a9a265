use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::{CliError, CliResult};

/// `--key value` pairs from the command line, keyed by dotted config path.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    entries: Vec<(String, Value)>,
}

fn key_of(flag: &str) -> String {
    flag.trim_start_matches("--").replace('-', "_").to_lowercase()
}

/// Scalars, arrays and inline tables in TOML syntax; bare words are strings.
fn parse_value(raw: &str) -> Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => serde_json::to_value(t.remove("v").expect("key v")).unwrap_or(Value::String(raw.into())),
        Err(_) => Value::String(raw.into()),
    }
}

impl Overrides {
    pub fn parse(tokens: &[String]) -> CliResult<Self> {
        let mut entries = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let tok = &tokens[i];
            if !tok.starts_with("--") || tok.len() == 2 {
                return Err(CliError::Config(format!("expected `--key`, found `{tok}`")));
            }
            if let Some((k, v)) = tok.split_once('=') {
                entries.push((key_of(k), parse_value(v)));
                i += 1;
            } else if i + 1 < tokens.len() && !is_flag(&tokens[i + 1]) {
                entries.push((key_of(tok), parse_value(&tokens[i + 1])));
                i += 2;
            } else {
                entries.push((key_of(tok), Value::Bool(true)));
                i += 1;
            }
        }
        let mut o = Self { entries };
        for (alias, key) in [("out", "output")] {
            for e in o.entries.iter_mut().filter(|e| e.0 == alias) {
                e.0 = key.to_string();
            }
        }
        Ok(o)
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.entries.push((key.to_string(), value));
    }

    /// Removes and returns a `--config` entry.
    pub fn take_config(&mut self) -> Option<PathBuf> {
        let pos = self.entries.iter().rposition(|e| e.0 == "config")?;
        let (_, v) = self.entries.remove(pos);
        Some(PathBuf::from(match v {
            Value::String(s) => s,
            other => other.to_string(),
        }))
    }

    fn apply(&self, root: &mut Map<String, Value>) -> CliResult<()> {
        for (key, value) in &self.entries {
            let parts: Vec<&str> = key.split('.').collect();
            let mut table = &mut *root;
            for part in &parts[..parts.len() - 1] {
                let slot = table.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
                table = slot
                    .as_object_mut()
                    .ok_or_else(|| CliError::Config(format!("`{key}`: `{part}` is not a table")))?;
            }
            table.insert(parts[parts.len() - 1].to_string(), value.clone());
        }
        Ok(())
    }
}

fn is_flag(tok: &str) -> bool {
    tok.starts_with("--") && tok.len() > 2 && !tok[2..].starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

/// Reads a TOML config, or the `config` object of a run manifest (`.json`).
pub fn read_config_file(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value = if path.extension().is_some_and(|e| e == "json") {
        let manifest: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        manifest
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::Config(format!("{}: manifest has no `config` object", path.display())))?
    } else {
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::to_value(table).map_err(|e| CliError::Config(e.to_string()))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Config(format!("{}: config must be a table", path.display()))),
    }
}

/// Merges file and overrides, then deserializes strictly; errors name the
/// offending field path.
pub fn load_config<T: DeserializeOwned>(path: Option<&Path>, overrides: &Overrides) -> CliResult<T> {
    let mut root = match path {
        Some(p) => read_config_file(p)?,
        None => Map::new(),
    };
    overrides.apply(&mut root)?;
    serde_path_to_error::deserialize(Value::Object(root)).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { String::new() } else { format!("`{path}`: ") };
        CliError::Config(format!("{field}{}", e.inner()))
    })
}
