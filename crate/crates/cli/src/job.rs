//! Job files: one JSON document per file,
//!
//! ```json
//! {"command": "analyze",
//!  "parameters": {"n": 4, "c": [0, 2, 0]},
//!  "output": {"path": "out.json", "format": "json"}}
//! ```
//!
//! Parameter names are the long flag names (underscores or hyphens); arrays
//! become comma-separated values and `true` a bare flag.

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::{Cli, CliError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub output: Option<JobOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOutput {
    pub path: Option<PathBuf>,
    pub format: Option<String>,
}

const COMMANDS: [&str; 7] = [
    "analyze",
    "spectrum",
    "degenerate",
    "verify",
    "isopar",
    "identities",
    "plot",
];

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::Number(x) => Ok(x.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(CliError::Invalid(format!(
            "parameter '{key}' must be a number, string or list of those"
        ))),
    }
}

impl JobSpec {
    pub fn to_args(&self) -> Result<Vec<String>, CliError> {
        if !COMMANDS.contains(&self.command.as_str()) {
            return Err(CliError::Invalid(format!(
                "unknown job command '{}'",
                self.command
            )));
        }
        let mut args = vec!["isorigid".to_string(), self.command.clone()];
        for (key, value) in &self.parameters {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                Value::Bool(true) => args.push(flag),
                Value::Bool(false) | Value::Null => {}
                Value::Array(items) => {
                    let parts = items
                        .iter()
                        .map(|v| scalar(key, v))
                        .collect::<Result<Vec<_>, _>>()?;
                    args.push(format!("{flag}={}", parts.join(",")));
                }
                other => args.push(format!("{flag}={}", scalar(key, other)?)),
            }
        }
        if let Some(out) = &self.output {
            if let Some(p) = &out.path {
                args.push("--out".into());
                args.push(p.to_string_lossy().into_owned());
            }
            if let Some(f) = &out.format {
                args.push(format!("--format={f}"));
            }
        }
        Ok(args)
    }
}

pub fn load(path: &Path) -> Result<Cli, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let spec: JobSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let args = spec.to_args()?;
    Cli::try_parse_from(&args).map_err(|e| CliError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters_become_flags() {
        let spec: JobSpec = serde_json::from_str(
            r#"{"command": "analyze", "parameters": {"n": 4, "c": [0, -2.5, 0]},
                "output": {"path": "r.json", "format": "json"}}"#,
        )
        .unwrap();
        let args = spec.to_args().unwrap();
        assert_eq!(
            args,
            ["isorigid", "analyze", "--c=0,-2.5,0", "--n=4", "--out", "r.json", "--format=json"]
        );
        let cli = Cli::try_parse_from(&args).unwrap();
        assert_eq!(cli.command.name(), "analyze");
    }

    #[test]
    fn nested_jobs_rejected() {
        let spec: JobSpec =
            serde_json::from_str(r#"{"command": "job", "parameters": {}}"#).unwrap();
        assert!(spec.to_args().is_err());
    }
}
