//! Size inflation, cyclomatic complexity and compression distance between
//! an original tree and its obfuscated counterpart.

use std::io::Write;
use std::path::{Path, PathBuf};

use bzip2::write::BzEncoder;
use bzip2::Compression;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use xz2::write::XzEncoder;

use crate::jsparse::ast::{CatchClause, Expr, Function, LogicalOp, Program, Stmt, SwitchCase};
use crate::jsparse::visit::{walk_program, Visitor};
use crate::jsparse::{parse_source, FileId};
use crate::pipeline::{is_script, list_files, run_queue};

/// Compressor behind `C(.)` in the distance formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compressor {
    /// LZMA2 at preset 9; its dictionary spans both inputs, so `nid(x, x)`
    /// stays near zero.
    #[default]
    Xz,
    /// bzip2 at level 9. Block sorting leaves a noticeable self-distance.
    Bzip2,
}

impl Compressor {
    pub fn compressed_len(self, data: &[u8]) -> Result<u64, MetricsError> {
        let out = match self {
            Compressor::Xz => {
                let mut enc = XzEncoder::new(Vec::new(), 9);
                enc.write_all(data).map_err(MetricsError::CompressorFailure)?;
                enc.finish().map_err(MetricsError::CompressorFailure)?
            }
            Compressor::Bzip2 => {
                let mut enc = BzEncoder::new(Vec::new(), Compression::best());
                enc.write_all(data).map_err(MetricsError::CompressorFailure)?;
                enc.finish().map_err(MetricsError::CompressorFailure)?
            }
        };
        Ok(out.len() as u64)
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("input size is zero")]
    ZeroInput,
    #[error("compressor failed: {0}")]
    CompressorFailure(std::io::Error),
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// `(output - input) / input * 100`, rounded to two decimals.
pub fn size_inflation(input: u64, output: u64) -> Result<f64, MetricsError> {
    if input == 0 {
        return Err(MetricsError::ZeroInput);
    }
    Ok(round2((output as f64 - input as f64) / input as f64 * 100.0))
}

#[derive(Default)]
struct Complexity(u32);

impl Visitor for Complexity {
    fn stmt(&mut self, s: &Stmt) {
        if matches!(
            s,
            Stmt::If { .. } | Stmt::For { .. } | Stmt::ForIn { .. } | Stmt::While { .. } | Stmt::DoWhile { .. }
        ) {
            self.0 += 1;
        }
    }
    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Cond { .. } => self.0 += 1,
            Expr::Logical { op: LogicalOp::And | LogicalOp::Or, .. } => self.0 += 1,
            _ => {}
        }
    }
    fn function(&mut self, _f: &Function) {
        self.0 += 1;
    }
    fn catch_clause(&mut self, _c: &CatchClause) {
        self.0 += 1;
    }
    fn switch_case(&mut self, c: &SwitchCase) {
        if c.test.is_some() {
            self.0 += 1;
        }
    }
}

/// Sum over every function and the module body of one plus its decision
/// points (`if`, loops, non-default `case`, `catch`, `?:`, `&&`, `||`).
pub fn cyclomatic_complexity(program: &Program) -> u32 {
    let mut c = Complexity(1);
    walk_program(&mut c, program);
    c.0
}

/// Complexity of source text, or `None` if it does not parse.
pub fn source_complexity(source: &str) -> Option<u32> {
    parse_source(source, FileId(0)).ok().map(|(p, _)| cyclomatic_complexity(&p))
}

/// `(C(xy) - min(C(x), C(y))) / max(C(x), C(y))`.
pub fn nid_from_sizes(cx: u64, cy: u64, cxy: u64) -> f64 {
    let (lo, hi) = (cx.min(cy), cx.max(cy));
    if hi == 0 {
        return 0.0;
    }
    (cxy as f64 - lo as f64) / hi as f64
}

/// Normalised information distance, concatenating `x` then `y` with no
/// delimiter.
pub fn nid(x: &[u8], y: &[u8], c: Compressor) -> Result<f64, MetricsError> {
    let cx = c.compressed_len(x)?;
    let cy = c.compressed_len(y)?;
    let mut xy = Vec::with_capacity(x.len() + y.len());
    xy.extend_from_slice(x);
    xy.extend_from_slice(y);
    Ok(nid_from_sizes(cx, cy, c.compressed_len(&xy)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileMetrics {
    pub path: String,
    pub size_class: String,
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub inflation_percent: f64,
    pub complexity_original: Option<u32>,
    pub complexity_obfuscated: Option<u32>,
    pub complexity_ratio: Option<f64>,
    pub nid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub files: usize,
    pub input_bytes: u64,
    pub output_bytes: u64,
    pub inflation_percent: f64,
    pub complexity_original: u64,
    pub complexity_obfuscated: u64,
    pub complexity_ratio: f64,
    /// Mean of per-file NID weighted by original size.
    pub nid: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub compressor: Compressor,
    pub files: Vec<FileMetrics>,
    pub aggregate: AggregateMetrics,
}

pub fn size_class(bytes: u64) -> &'static str {
    match bytes {
        0..=102_399 => "< 100 KB",
        102_400..=1_048_575 => "100 KB - 1 MB",
        1_048_576..=10_485_759 => "1 MB - 10 MB",
        _ => ">= 10 MB",
    }
}

fn human(bytes: u64) -> String {
    match bytes {
        0..=1023 => format!("{bytes} B"),
        1024..=1_048_575 => format!("{:.1} KB", bytes as f64 / 1024.0),
        _ => format!("{:.1} MB", bytes as f64 / 1_048_576.0),
    }
}

/// Metrics for one original/obfuscated pair.
pub fn file_metrics(
    path: &str,
    original: &[u8],
    obfuscated: &[u8],
    c: Compressor,
) -> Result<FileMetrics, MetricsError> {
    let input = original.len() as u64;
    let output = obfuscated.len() as u64;
    let complexity = |b: &[u8]| std::str::from_utf8(b).ok().and_then(source_complexity);
    let (co, cb) = (complexity(original), complexity(obfuscated));
    Ok(FileMetrics {
        path: path.to_string(),
        size_class: size_class(input).to_string(),
        input_bytes: input,
        output_bytes: output,
        inflation_percent: size_inflation(input, output)?,
        complexity_original: co,
        complexity_obfuscated: cb,
        complexity_ratio: co.zip(cb).filter(|(o, _)| *o > 0).map(|(o, b)| b as f64 / o as f64),
        nid: nid(original, obfuscated, c)?,
    })
}

pub fn aggregate(files: &[FileMetrics]) -> AggregateMetrics {
    let input: u64 = files.iter().map(|f| f.input_bytes).sum();
    let output: u64 = files.iter().map(|f| f.output_bytes).sum();
    let both = || files.iter().filter(|f| f.complexity_original.is_some() && f.complexity_obfuscated.is_some());
    let co: u64 = both().map(|f| f.complexity_original.unwrap() as u64).sum();
    let cb: u64 = both().map(|f| f.complexity_obfuscated.unwrap() as u64).sum();
    let weighted: f64 = files.iter().map(|f| f.nid * f.input_bytes as f64).sum();
    AggregateMetrics {
        files: files.len(),
        input_bytes: input,
        output_bytes: output,
        inflation_percent: size_inflation(input, output).unwrap_or(0.0),
        complexity_original: co,
        complexity_obfuscated: cb,
        complexity_ratio: if co > 0 { cb as f64 / co as f64 } else { 0.0 },
        nid: if input > 0 { weighted / input as f64 } else { 0.0 },
    }
}

/// Compares every script under `orig` with the same path under `obf`.
/// Empty originals are skipped.
pub fn compare_trees(orig: &Path, obf: &Path, threads: usize, c: Compressor) -> Result<MetricsReport, MetricsError> {
    let files = list_files(orig, Some(obf))
        .map_err(|e| MetricsError::Io { path: orig.to_path_buf(), source: std::io::Error::other(e.to_string()) })?;
    let scripts: Vec<PathBuf> = files.into_iter().filter(|p| is_script(p)).collect();
    let results = run_queue(&scripts, threads, |rel| -> Result<Option<FileMetrics>, MetricsError> {
        let (a, b) = (orig.join(rel), obf.join(rel));
        let x = std::fs::read(&a).map_err(|source| MetricsError::Io { path: a.clone(), source })?;
        let y = std::fs::read(&b).map_err(|source| MetricsError::Io { path: b.clone(), source })?;
        if x.is_empty() {
            return Ok(None);
        }
        let name = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        file_metrics(&name, &x, &y, c).map(Some)
    });
    let mut out = Vec::new();
    for r in results {
        if let Some(m) = r? {
            out.push(m);
        }
    }
    let aggregate = aggregate(&out);
    Ok(MetricsReport { compressor: c, files: out, aggregate })
}

impl MetricsReport {
    /// Per size class: file count, input size, output size, inflation.
    pub fn table(&self) -> String {
        let classes = ["< 100 KB", "100 KB - 1 MB", "1 MB - 10 MB", ">= 10 MB"];
        let mut s = format!(
            "{:<16}{:>7}{:>12}{:>12}{:>12}{:>8}\n",
            "size class", "files", "input", "output", "inflation", "NID"
        );
        for class in classes {
            let rows: Vec<FileMetrics> = self.files.iter().filter(|f| f.size_class == class).cloned().collect();
            if rows.is_empty() {
                continue;
            }
            let a = aggregate(&rows);
            s.push_str(&format!(
                "{:<16}{:>7}{:>12}{:>12}{:>11.2}%{:>8.3}\n",
                class,
                a.files,
                human(a.input_bytes),
                human(a.output_bytes),
                a.inflation_percent,
                a.nid
            ));
        }
        let a = &self.aggregate;
        s.push_str(&format!(
            "{:<16}{:>7}{:>12}{:>12}{:>11.2}%{:>8.3}\n",
            "total",
            a.files,
            human(a.input_bytes),
            human(a.output_bytes),
            a.inflation_percent,
            a.nid
        ));
        s.push_str(&format!(
            "cyclomatic complexity: {} -> {} ({:.2}x)\n",
            a.complexity_original, a.complexity_obfuscated, a.complexity_ratio
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inflation_arithmetic() {
        assert_eq!(size_inflation(100, 120).unwrap(), 20.0);
        assert_eq!(size_inflation(7, 7).unwrap(), 0.0);
        assert_eq!(size_inflation(3, 4).unwrap(), 33.33);
        assert!(matches!(size_inflation(0, 4), Err(MetricsError::ZeroInput)));
    }

    #[test]
    fn nid_formula_worked_example() {
        let v = nid_from_sizes(100, 120, 180);
        assert!((v - 0.6667).abs() < 5e-5, "{v}");
        assert_eq!(nid_from_sizes(120, 100, 180), v);
    }

    #[test]
    fn nid_identical_and_random() {
        let text: String = (0..400).map(|i| format!("function f{i}(a){{return a*{i}+g(a)}}\n")).collect();
        assert!(text.len() >= 4096);
        assert!(nid(text.as_bytes(), text.as_bytes(), Compressor::Xz).unwrap() <= 0.1);
        let own = include_bytes!("mod.rs");
        assert!(nid(own, own, Compressor::Xz).unwrap() <= 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut x = vec![0u8; 65536];
        let mut y = vec![0u8; 65536];
        rng.fill_bytes(&mut x);
        rng.fill_bytes(&mut y);
        // Oracle: with no shared content the joint compression is about
        // the sum of the parts.
        for c in [Compressor::Xz, Compressor::Bzip2] {
            let (cx, cy) = (c.compressed_len(&x).unwrap(), c.compressed_len(&y).unwrap());
            let cxy = c.compressed_len(&[x.clone(), y.clone()].concat()).unwrap();
            // Up to shared framing, the joint stream costs the sum of the parts.
            assert!(cxy as f64 >= 0.99 * (cx + cy) as f64, "{c:?} {cx} {cy} {cxy}");
            let (a, b) = (nid(&x, &y, c).unwrap(), nid(&y, &x, c).unwrap());
            assert!(a >= 0.95, "{c:?} {a}");
            assert!((a - b).abs() <= 0.05);
        }
    }

    fn cc(src: &str) -> u32 {
        source_complexity(src).unwrap()
    }

    /// Enumerates acyclic paths through straight-line code and `if`
    /// statements: alternatives add, sequences multiply.
    fn paths(stmts: &[Stmt]) -> u32 {
        stmts
            .iter()
            .map(|s| match s {
                Stmt::If { cons, alt, .. } => {
                    paths(std::slice::from_ref(cons)) + alt.as_ref().map_or(1, |a| paths(std::slice::from_ref(a)))
                }
                Stmt::Block { body, .. } => paths(body),
                _ => 1,
            })
            .product()
    }

    fn function_paths(src: &str) -> u32 {
        let (p, _) = parse_source(src, FileId(0)).unwrap();
        let Stmt::Function(f) = &p.body[0] else { panic!() };
        let crate::jsparse::ast::FunctionBody::Block(b) = &f.body else { panic!() };
        paths(b)
    }

    #[test]
    fn complexity_counts() {
        assert_eq!(cc(""), 1);
        assert_eq!(cc("function f(a){ var b = a; return b }"), 2);
        // Function complexity (total minus the module body) equals the path
        // count for tree-shaped branching.
        for src in [
            "function f(a){ if (a) { return 1 } else { return 2 } }",
            "function f(a){ g(); if (a) { if (b) { x() } } else { if (c) { y() } else { z() } } }",
        ] {
            assert_eq!(cc(src) - 1, function_paths(src), "{src}");
        }
        assert_eq!(function_paths("function f(a){ if (a) { return 1 } else { return 2 } }"), 2);
        assert_eq!(cc("for (;;) {} while (x) {} do {} while (y); for (k in o) {}"), 5);
        assert_eq!(cc("switch (x) { case 1: case 2: break; default: }"), 3);
        assert_eq!(cc("try {} catch (e) {} a && b || c ?? d; x ? y : z"), 5);
        assert_eq!(cc("const f = () => a ? 1 : 2; class C { m() {} }"), 4);
    }

    #[test]
    fn complexity_invariant_under_renaming() {
        let a = "function outer(alpha){ let beta = alpha && 1; return function(){ return beta ? alpha : 0 } }";
        let b = "function a(b){ let c = b && 1; return function(){ return c ? b : 0 } }";
        assert_eq!(cc(a), cc(b));
    }

    #[test]
    fn aggregate_nid_is_size_weighted() {
        let mk = |n: u64, v: f64| FileMetrics {
            path: String::new(),
            size_class: size_class(n).into(),
            input_bytes: n,
            output_bytes: n,
            inflation_percent: 0.0,
            complexity_original: Some(1),
            complexity_obfuscated: Some(2),
            complexity_ratio: Some(2.0),
            nid: v,
        };
        let a = aggregate(&[mk(100, 1.0), mk(300, 0.0)]);
        assert!((a.nid - 0.25).abs() < 1e-12);
        assert_eq!(a.complexity_ratio, 2.0);
    }
}
