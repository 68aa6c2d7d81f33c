//! Optional plain-text key=value configuration file. Flags always win;
//! the file only fills in values the user did not pass.

use crate::error::CliError;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<ConfigFile, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        ConfigFile::parse(&src)
    }

    pub fn parse(src: &str) -> Result<ConfigFile, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::spec(format!(
                    "config line {}: expected key = value, got '{line}'",
                    i + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// Flag value if given, else config value, else default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| CliError::spec(format!("config key '{key}': cannot parse '{raw}'"))),
            None => Ok(default),
        }
    }

    /// Boolean flags: a passed flag forces true; otherwise the config value.
    pub fn resolve_flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key) {
            Some(raw) => match raw.as_str() {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                other => Err(CliError::spec(format!(
                    "config key '{key}': expected a boolean, got '{other}'"
                ))),
            },
            None => Ok(false),
        }
    }
}
