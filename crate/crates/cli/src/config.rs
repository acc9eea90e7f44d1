//! Config files: a TOML or JSON table with optional `[global]` (`threads`,
//! `strict`) and one section per subcommand whose keys are the long flag
//! names. Flags given on the command line win.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub struct ConfigFile {
    root: Map<String, Value>,
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k.replace('_', "-"), normalize(v))).collect()),
        other => other,
    }
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self { root: Map::new() }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let value: Value = if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        } else {
            let t: toml::Value =
                toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::to_value(t).map_err(|e| CliError::Usage(e.to_string()))?
        };
        match normalize(value) {
            Value::Object(root) => Ok(Self { root }),
            _ => Err(CliError::Usage(format!("{}: config must be a table", path.display()))),
        }
    }

    fn section(&self, name: &str) -> Result<Map<String, Value>, CliError> {
        match self.root.get(name) {
            None => Ok(Map::new()),
            Some(Value::Object(m)) => Ok(m.clone()),
            Some(_) => Err(CliError::Usage(format!("config section `{name}` must be a table"))),
        }
    }

    pub fn check_sections(&self, commands: &[&str]) -> Result<(), CliError> {
        for key in self.root.keys() {
            if key != "global" && !commands.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown config section `{key}`")));
            }
        }
        Ok(())
    }

    pub fn global_threads(&self) -> Result<Option<usize>, CliError> {
        match self.section("global")?.get("threads") {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|t| Some(t as usize))
                .ok_or_else(|| CliError::Usage("config `threads` must be a positive integer".into())),
        }
    }

    pub fn global_strict(&self) -> Result<bool, CliError> {
        match self.section("global")?.get("strict") {
            None => Ok(false),
            Some(v) => v.as_bool().ok_or_else(|| CliError::Usage("config `strict` must be a boolean".into())),
        }
    }

    /// Overlays the flags given on the command line onto the section of
    /// `command`. `known` lists the accepted keys.
    pub fn merge<T: Serialize + DeserializeOwned>(&self, command: &str, known: &[String], cli: &T) -> Result<T, CliError> {
        let mut base = self.section(command)?;
        for key in base.keys() {
            if !known.contains(key) {
                return Err(CliError::Usage(format!("unknown key `{key}` in config section `{command}`")));
            }
        }
        if let Value::Object(flags) = serde_json::to_value(cli).map_err(|e| CliError::Usage(e.to_string()))? {
            base.extend(flags);
        }
        serde_json::from_value(Value::Object(base))
            .map_err(|e| CliError::Usage(format!("config section `{command}`: {e}")))
    }
}
