//! Flat `key = value` configuration files. Values from flags take precedence.

use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    table: Table,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| e.message().to_string())?;
        if let Some((k, _)) = table.iter().find(|(_, v)| matches!(v, Value::Table(_) | Value::Array(_))) {
            return Err(format!("key '{k}' must hold a single value; sections and arrays are not supported"));
        }
        Ok(Self { table })
    }

    fn raw(&self, key: &str) -> Option<String> {
        // accept both z_from and z-from spellings
        let alt = key.replace('_', "-");
        self.table.get(key).or_else(|| self.table.get(&alt)).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    /// The flag value if given, else the file value parsed as `T`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Input(format!("config key '{key}' = '{s}' is invalid: {e}"))),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Input(format!("missing required value '{key}' (flag --{})", key.replace('_', "-"))))
    }

    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = FileConfig::parse("omega = 1\nalpha = 0.2\nrealization = \"discrete:k=0.75\"\nz-from = -0.5\n").unwrap();
        assert_eq!(c.pick::<f64>(None, "omega").unwrap(), Some(1.0));
        assert_eq!(c.pick(Some(2.0), "omega").unwrap(), Some(2.0));
        assert_eq!(c.pick::<String>(None, "realization").unwrap().unwrap(), "discrete:k=0.75");
        assert_eq!(c.pick::<f64>(None, "z_from").unwrap(), Some(-0.5));
        assert!(c.require::<f64>(None, "beta").is_err());
        assert!(c.pick::<usize>(None, "alpha").is_err());
    }

    #[test]
    fn rejects_sections() {
        assert!(FileConfig::parse("[params]\nomega = 1\n").is_err());
    }
}
