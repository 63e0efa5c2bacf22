use crate::error::CliError;
use answer_sim::report::{parse_kv, RunConfig};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Keys used only by the command line, next to the evaluation keys.
const CLI_KEYS: &[&str] = &[
    "input",
    "out",
    "nationality",
    "max_variants",
    "max_n",
    "mode",
    "metric",
    "layer_files",
    "id",
    "lang",
];
const PATH_KEYS: &[&str] = &["input", "out"];

/// Config file contents plus command-line overrides.
#[derive(Debug, Default)]
pub struct Settings {
    pub run: RunConfig,
    extra: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(config: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
            s.run = RunConfig::with_base_dir(&base);
            for (line, k, v) in parse_kv(&text)? {
                s.set_in(&k, &v, &base)
                    .map_err(|e| CliError::validation(format!("{}:{line}: {e}", path.display())))?;
            }
            s.run = s.run.with_cwd_paths();
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("--set expects KEY=VALUE, got `{o}`")))?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    fn set_in(&mut self, key: &str, value: &str, base: &Path) -> Result<(), String> {
        if CLI_KEYS.contains(&key) {
            let v = if PATH_KEYS.contains(&key) {
                base.join(value).to_string_lossy().into_owned()
            } else if key == "layer_files" {
                value
                    .split(',')
                    .map(|p| base.join(p.trim()).to_string_lossy().into_owned())
                    .collect::<Vec<_>>()
                    .join(",")
            } else {
                value.to_owned()
            };
            self.extra.insert(key.to_owned(), v);
            Ok(())
        } else {
            self.run.set(key, value)
        }
    }

    /// Override from a flag; relative paths stay relative to the working directory.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        self.set_in(key, value, Path::new(""))
            .map_err(|e| CliError::validation(format!("{key}: {e}")))
    }

    pub fn set_opt(&mut self, key: &str, value: Option<impl ToString>) -> Result<(), CliError> {
        match value {
            Some(v) => self.set(key, &v.to_string()),
            None => Ok(()),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.extra.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::validation(format!("missing `{key}` (flag or config key)")))
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse().map_err(|e| CliError::validation(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.require(key).map(PathBuf::from)
    }

    pub fn dataset_path(&self) -> Result<&Path, CliError> {
        self.run
            .dataset
            .as_deref()
            .ok_or_else(|| CliError::validation("missing `dataset` (flag or config key)"))
    }
}
