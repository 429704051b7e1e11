//! Differential testing: run each case against the original and the
//! obfuscated tree under an external engine and compare stdout.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsparse::{tokenize, FileId, TokenKind};
use crate::pipeline::{is_script, list_files, run_queue};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("engine `{0}` not found; install it or pass a different --engine template")]
    EngineNotFound(String),
    #[error("engine template must contain `{{file}}`: {0}")]
    BadTemplate(String),
    #[error("root {0} does not exist")]
    MissingRoot(PathBuf),
    #[error("cannot read case manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    #[default]
    Exact,
    /// Ignores trailing whitespace on each line and trailing blank lines.
    Normalized,
}

fn default_timeout() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    /// Entry script, relative to the tree root.
    pub entry: PathBuf,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default)]
    pub stdin: Option<String>,
    #[serde(default)]
    pub mode: CompareMode,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
}

impl TestCase {
    pub fn new(entry: impl Into<PathBuf>) -> Self {
        TestCase {
            entry: entry.into(),
            args: Vec::new(),
            stdin: None,
            mode: CompareMode::Exact,
            timeout_s: default_timeout(),
        }
    }
}

/// Reads a manifest: a JSON array of cases.
pub fn load_cases(path: &Path) -> Result<Vec<TestCase>, HarnessError> {
    let err = |message: String| HarnessError::Manifest { path: path.to_path_buf(), message };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Original,
    Obfuscated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    Divergent {
        /// 1-based line number of the first difference.
        line: usize,
        original: String,
        obfuscated: String,
        rename_map: PathBuf,
    },
    Error {
        side: Side,
        message: String,
    },
    Timeout {
        side: Side,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub entry: PathBuf,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub results: Vec<CaseResult>,
    pub total: usize,
    pub equivalent: usize,
    pub equivalence_rate: f64,
}

impl HarnessReport {
    pub fn to_jsonl(&self) -> String {
        self.results.iter().map(|r| serde_json::to_string(r).expect("verdict serializes") + "\n").collect()
    }

    pub fn divergences(&self) -> impl Iterator<Item = &CaseResult> {
        self.results.iter().filter(|r| !matches!(r.verdict, Verdict::Equivalent))
    }
}

/// A parsed engine command template such as `node {file}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Engine {
    words: Vec<String>,
}

impl Engine {
    pub fn parse(template: &str) -> Result<Self, HarnessError> {
        let words = shlex::split(template).ok_or_else(|| HarnessError::BadTemplate(template.into()))?;
        if words.is_empty() || !words.iter().any(|w| w.contains("{file}")) {
            return Err(HarnessError::BadTemplate(template.into()));
        }
        Ok(Engine { words })
    }

    pub fn program(&self) -> &str {
        &self.words[0]
    }

    fn command(&self, file: &Path, args: &[String]) -> Command {
        let file = file.to_string_lossy();
        let mut cmd = Command::new(self.words[0].replace("{file}", &file));
        cmd.args(self.words[1..].iter().map(|w| w.replace("{file}", &file)));
        cmd.args(args);
        cmd
    }

    /// Fails with `EngineNotFound` when the program cannot be spawned.
    pub fn probe(&self) -> Result<(), HarnessError> {
        let mut cmd = Command::new(self.program());
        cmd.arg("--version").stdin(Stdio::null()).stdout(Stdio::null()).stderr(Stdio::null());
        match cmd.status() {
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(HarnessError::EngineNotFound(self.program().into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug)]
enum Run {
    Done { stdout: String, stderr: String, ok: bool },
    Timeout,
    Failed(String),
}

fn run_one(engine: &Engine, root: &Path, case: &TestCase) -> Run {
    let file = root.join(&case.entry);
    let mut cmd = engine.command(&file, &case.args);
    cmd.current_dir(root).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return Run::Failed(e.to_string()),
    };
    let mut stdin = child.stdin.take().unwrap();
    let input = case.stdin.clone().unwrap_or_default();
    let feeder = std::thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut out_pipe = child.stdout.take().unwrap();
    let mut err_pipe = child.stderr.take().unwrap();
    let out_reader = std::thread::spawn(move || {
        let mut v = Vec::new();
        let _ = out_pipe.read_to_end(&mut v);
        v
    });
    let err_reader = std::thread::spawn(move || {
        let mut v = Vec::new();
        let _ = err_pipe.read_to_end(&mut v);
        v
    });
    let deadline = Instant::now() + Duration::from_secs_f64(case.timeout_s.max(0.01));
    let status = loop {
        match child.try_wait() {
            Ok(Some(s)) => break Some(s),
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => return Run::Failed(e.to_string()),
        }
    };
    let _ = feeder.join();
    let stdout = String::from_utf8_lossy(&out_reader.join().unwrap_or_default()).into_owned();
    let stderr = String::from_utf8_lossy(&err_reader.join().unwrap_or_default()).into_owned();
    match status {
        None => Run::Timeout,
        Some(s) => Run::Done { stdout, stderr, ok: s.success() },
    }
}

fn normalize(s: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = s.lines().map(str::trim_end).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

/// First differing line (1-based) with both sides, or `None` if equal.
pub fn first_difference(a: &str, b: &str, mode: CompareMode) -> Option<(usize, String, String)> {
    let equal = match mode {
        CompareMode::Exact => a == b,
        CompareMode::Normalized => normalize(a) == normalize(b),
    };
    if equal {
        return None;
    }
    let (la, lb): (Vec<&str>, Vec<&str>) = match mode {
        CompareMode::Exact => (a.split('\n').collect(), b.split('\n').collect()),
        CompareMode::Normalized => (normalize(a), normalize(b)),
    };
    let n = la.len().max(lb.len());
    (0..n).find(|&i| la.get(i) != lb.get(i)).map(|i| {
        (
            i + 1,
            la.get(i).unwrap_or(&"<end of output>").to_string(),
            lb.get(i).unwrap_or(&"<end of output>").to_string(),
        )
    })
}

/// Reports reads of `Date.now` or `Math.random` in `source`, unless the
/// source installs its own `Math.random`.
pub fn determinism_lint(source: &str) -> Vec<String> {
    let Ok(tokens) = tokenize(source, FileId(0)) else { return Vec::new() };
    let toks: Vec<(&str, TokenKind)> = tokens
        .iter()
        .filter(|t| !matches!(t.kind, TokenKind::Comment | TokenKind::Whitespace))
        .map(|t| (t.text, t.kind))
        .collect();
    let mut findings = Vec::new();
    let mut shimmed = false;
    for (i, w) in toks.windows(3).enumerate() {
        let pair = (w[0].0, w[1].0, w[2].0);
        let assigned = toks.get(i + 3).is_some_and(|t| t.0 == "=");
        match pair {
            ("Math", ".", "random") if assigned => shimmed = true,
            ("Math", ".", "random") | ("Date", ".", "now") => findings.push(format!("{}.{}", pair.0, pair.2)),
            _ => {}
        }
        if (w[0].0, w[1].0, w[2].0) == ("new", "Date", "(") && toks.get(i + 3).is_some_and(|t| t.0 == ")") {
            findings.push("new Date()".into());
        }
    }
    if shimmed {
        findings.retain(|f| f != "Math.random");
    }
    findings.dedup();
    findings
}

fn lint_case(root: &Path, case: &TestCase) -> Option<String> {
    let dir = root.join(&case.entry).parent().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
    let files = list_files(&dir, None).ok()?;
    for rel in files.iter().filter(|p| is_script(p)) {
        let Ok(text) = std::fs::read_to_string(dir.join(rel)) else { continue };
        let found = determinism_lint(&text);
        if !found.is_empty() {
            return Some(format!("nondeterministic input in {}: {}", rel.display(), found.join(", ")));
        }
    }
    None
}

fn renames_path(obf: &Path) -> PathBuf {
    let name = obf.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    obf.with_file_name(format!("{name}.renames.tsv"))
}

fn judge(engine: &Engine, orig: &Path, obf: &Path, case: &TestCase) -> Verdict {
    if let Some(msg) = lint_case(orig, case) {
        return Verdict::Error { side: Side::Original, message: msg };
    }
    let a = run_one(engine, orig, case);
    let b = run_one(engine, obf, case);
    let (sa, sb) = match (a, b) {
        (Run::Timeout, _) => return Verdict::Timeout { side: Side::Original },
        (Run::Failed(m), _) => return Verdict::Error { side: Side::Original, message: m },
        (_, Run::Timeout) => return Verdict::Timeout { side: Side::Obfuscated },
        (_, Run::Failed(m)) => return Verdict::Error { side: Side::Obfuscated, message: m },
        (Run::Done { ok: false, stderr, .. }, _) => {
            return Verdict::Error { side: Side::Original, message: last_line(&stderr) }
        }
        (Run::Done { stdout: sa, .. }, Run::Done { stdout: sb, ok, stderr }) => {
            if !ok && first_difference(&sa, &sb, case.mode).is_none() {
                return Verdict::Error { side: Side::Obfuscated, message: last_line(&stderr) };
            }
            (sa, sb)
        }
    };
    match first_difference(&sa, &sb, case.mode) {
        None => Verdict::Equivalent,
        Some((line, original, obfuscated)) => {
            Verdict::Divergent { line, original, obfuscated, rename_map: renames_path(obf) }
        }
    }
}

/// The engine's error line (`TypeError: ...`), else its last line.
fn last_line(s: &str) -> String {
    s.lines()
        .find(|l| l.contains("Error"))
        .or_else(|| s.lines().rev().find(|l| !l.trim().is_empty()))
        .unwrap_or("exited with failure")
        .trim()
        .to_string()
}

/// Runs every case against both trees on up to `workers` concurrent cases.
pub fn run_differential(
    orig: &Path,
    obf: &Path,
    cases: &[TestCase],
    engine_template: &str,
    workers: usize,
) -> Result<HarnessReport, HarnessError> {
    let engine = Engine::parse(engine_template)?;
    let mut roots = Vec::new();
    for root in [orig, obf] {
        // Engines run inside the root, so paths handed to them must be absolute.
        match root.canonicalize() {
            Ok(p) if p.is_dir() => roots.push(p),
            _ => return Err(HarnessError::MissingRoot(root.to_path_buf())),
        }
    }
    engine.probe()?;
    let verdicts = run_queue(cases, workers, |c| judge(&engine, &roots[0], &roots[1], c));
    let results: Vec<CaseResult> =
        cases.iter().zip(verdicts).map(|(c, verdict)| CaseResult { entry: c.entry.clone(), verdict }).collect();
    let equivalent = results.iter().filter(|r| r.verdict == Verdict::Equivalent).count();
    let total = results.len();
    Ok(HarnessReport {
        results,
        total,
        equivalent,
        equivalence_rate: if total == 0 { 1.0 } else { equivalent as f64 / total as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_difference_modes() {
        assert_eq!(first_difference("a\nb\n", "a\nb\n", CompareMode::Exact), None);
        assert_eq!(first_difference("a\nb\n", "a\nc\n", CompareMode::Exact), Some((2, "b".into(), "c".into())));
        assert_eq!(first_difference("a  \nb\n\n", "a\nb", CompareMode::Normalized), None);
        assert!(first_difference("a  \nb\n\n", "a\nb", CompareMode::Exact).is_some());
        assert_eq!(
            first_difference("a\n", "a\nx\n", CompareMode::Normalized),
            Some((2, "<end of output>".into(), "x".into()))
        );
    }

    #[test]
    fn lint_flags_clock_and_randomness() {
        assert_eq!(determinism_lint("let t = Date.now();"), vec!["Date.now"]);
        assert_eq!(determinism_lint("x = Math.random() * 2"), vec!["Math.random"]);
        assert_eq!(determinism_lint("x = new Date()"), vec!["new Date()"]);
        assert!(determinism_lint("new Date(0); // Date.now()").is_empty());
        assert!(determinism_lint("Math.random = seeded(1); Math.random()").is_empty());
        assert!(determinism_lint("console.log('Math.random')").is_empty());
    }

    #[test]
    fn template_needs_placeholder() {
        assert!(Engine::parse("node").is_err());
        let e = Engine::parse("node --stack-size=2000 {file}").unwrap();
        assert_eq!(e.program(), "node");
    }

    #[test]
    fn missing_engine_aborts() {
        let d = tempfile::tempdir().unwrap();
        let err = run_differential(d.path(), d.path(), &[TestCase::new("a.js")], "no-such-engine-xyz {file}", 1);
        assert!(matches!(err, Err(HarnessError::EngineNotFound(_))));
    }

    #[test]
    fn manifest_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("cases.json");
        std::fs::write(&p, r#"[{"entry": "a/main.js", "stdin": "1 2", "mode": "normalized"}, {"entry": "b.js", "args": ["x"], "timeout_s": 2}]"#).unwrap();
        let cases = load_cases(&p).unwrap();
        assert_eq!(cases[0].mode, CompareMode::Normalized);
        assert_eq!(cases[0].timeout_s, 10.0);
        assert_eq!(cases[1].args, vec!["x"]);
        let v = CaseResult { entry: "b.js".into(), verdict: Verdict::Timeout { side: Side::Obfuscated } };
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"entry":"b.js","verdict":"timeout","side":"obfuscated"}"#);
    }
}
