//! TOML experiment manifests replayed through the ordinary argument parser.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    /// e.g. `"approx sweep"` or `"fig12"`.
    pub subcommand: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, toml::Value>,
    #[serde(default)]
    pub outputs: Outputs,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Relative paths are taken from the manifest's directory.
    pub dir: Option<PathBuf>,
}

impl ExperimentManifest {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    /// Command-line arguments equivalent to the manifest.
    pub fn to_args(&self, manifest_path: &Path, check: bool, csv_only: bool) -> CliResult<Vec<String>> {
        let mut args = vec!["crat".to_string()];
        let words: Vec<&str> = self.subcommand.split_whitespace().collect();
        if words.is_empty() {
            return Err(CliError::Usage(format!("manifest `{}` has an empty subcommand", self.name)));
        }
        if words[0] == "run" {
            return Err(CliError::Usage("manifests cannot run other manifests".into()));
        }
        args.extend(words.iter().map(|w| w.to_string()));
        for (key, value) in &self.parameters {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                toml::Value::Boolean(true) => args.push(flag),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => args.extend([flag, s.clone()]),
                toml::Value::Integer(i) => args.extend([flag, i.to_string()]),
                toml::Value::Float(x) => args.extend([flag, format!("{x:?}")]),
                other => return Err(CliError::Invalid(format!("parameter `{key}` has unsupported value {other}"))),
            }
        }
        if let Some(dir) = &self.outputs.dir {
            let base = manifest_path.parent().unwrap_or(Path::new("."));
            args.extend(["--out".to_string(), base.join(dir).display().to_string()]);
        }
        if let Some(seed) = self.seed {
            args.extend(["--seed".to_string(), seed.to_string()]);
        }
        if check {
            args.push("--check".into());
        }
        if csv_only {
            args.push("--csv-only".into());
        }
        Ok(args)
    }
}
