use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;

/// Environment variable supplying the default worker count.
pub const THREADS_ENV: &str = "SCOPESHIELD_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObfuscationConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub threads: usize,
    pub rename: bool,
    pub strings: bool,
    pub prop_access: bool,
    pub minify: bool,
    /// Extra host names, one per line, added to the built-in list.
    pub allowlist: Option<PathBuf>,
    /// Command template for the equivalence harness; `{file}` is replaced
    /// by the entry script path.
    pub engine: String,
    /// Reserved; the pipeline is fully deterministic without it.
    pub seed: Option<u64>,
    pub dump_scopes: bool,
    pub dump_renames: bool,
    /// Make decoders count their table decodes in a global (testing aid).
    pub instrument_decoder: bool,
    /// Where to write the run report; defaults to `<output>.report.json`.
    pub report: Option<PathBuf>,
}

impl Default for ObfuscationConfig {
    fn default() -> Self {
        ObfuscationConfig {
            input: PathBuf::from("src"),
            output: PathBuf::from("dist"),
            threads: default_threads(),
            rename: true,
            strings: true,
            prop_access: true,
            minify: true,
            allowlist: None,
            engine: "node {file}".into(),
            seed: None,
            dump_scopes: false,
            dump_renames: false,
            instrument_decoder: false,
            report: None,
        }
    }
}

/// Worker count from the environment, else the machine's parallelism.
pub fn default_threads() -> usize {
    std::env::var(super::THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let name = output.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    output.with_file_name(format!("{name}{suffix}"))
}

impl ObfuscationConfig {
    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::FatalConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::FatalConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.threads == 0 {
            return Err(PipelineError::FatalConfig("threads must be at least 1".into()));
        }
        if self.input == self.output {
            return Err(PipelineError::FatalConfig("input and output must differ".into()));
        }
        Ok(())
    }

    pub fn report_path(&self) -> PathBuf {
        self.report.clone().unwrap_or_else(|| sibling(&self.output, ".report.json"))
    }

    pub fn scopes_dump_path(&self) -> PathBuf {
        sibling(&self.output, ".scopes.txt")
    }

    pub fn renames_dump_path(&self) -> PathBuf {
        sibling(&self.output, ".renames.tsv")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_snake_case_and_partial() {
        let c = ObfuscationConfig::from_json(r#"{"input": "a", "output": "b", "threads": 3, "prop_access": false}"#)
            .unwrap();
        assert_eq!(c.threads, 3);
        assert!(!c.prop_access);
        assert!(c.strings);
        assert_eq!(c.report_path(), PathBuf::from("b.report.json"));
    }

    #[test]
    fn unknown_keys_and_zero_threads_rejected() {
        assert!(ObfuscationConfig::from_json(r#"{"thread": 3}"#).is_err());
        let c = ObfuscationConfig { threads: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
