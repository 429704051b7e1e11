//! End-to-end orchestration: parse and summarize every file in parallel,
//! link across files, then transform files in parallel and write them out.
//!
//! Only per-file summaries survive the first phase; each worker re-reads
//! its file in the second phase, so no whole-program AST is ever held.

mod config;
mod units;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

use crate::jsparse::{self, emit, minify::minify, FileId, FileSummary};
use crate::pasa::{
    build_dependency_graph, build_scope_tree, dump_graph, dump_scopes, link_cross_file, partition_graph, Allowlist,
    BoundaryMarker, DependencyGraph, PasaError,
};
use crate::renamer::{check_safety, merge_maps, rename_patches, rename_tree, RenameContext};
use crate::transforms::{plan_file, TransformOptions};

pub use config::{ObfuscationConfig, THREADS_ENV};
pub use units::{plan_units, IndependentUnit, LinkView, MIN_UNIT_BYTES};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    FatalConfig(String),
    #[error("cannot read input tree {path}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Link(#[from] PasaError),
    #[error("cannot write {path}")]
    Output { path: PathBuf, source: std::io::Error },
}

/// A per-file problem; the file is copied through unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileIssue {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub parse: f64,
    pub pasa: f64,
    pub rename: f64,
    pub transform: f64,
    pub emit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub files_total: usize,
    pub files_transformed: usize,
    pub files_copied: usize,
    pub cut_weight: usize,
    pub phase_times_ms: PhaseTimes,
    pub wall_time_ms: f64,
    pub peak_memory_bytes: u64,
    pub output_bytes: u64,
    pub input_bytes: u64,
    pub threads: usize,
    pub markers: usize,
    pub units: usize,
    /// Files that could not be transformed (syntax errors, I/O failures).
    pub errors: Vec<FileIssue>,
    /// Files copied through unchanged.
    pub copied: Vec<String>,
    pub config: ObfuscationConfig,
}

impl RunReport {
    pub fn has_file_errors(&self) -> bool {
        !self.errors.is_empty()
    }
}

/// Peak resident set size of this process, in bytes (0 where unavailable).
pub fn peak_memory_bytes() -> u64 {
    let Ok(status) = fs::read_to_string("/proc/self/status") else { return 0 };
    status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|kb| kb.parse::<u64>().ok())
        .map(|kb| kb * 1024)
        .unwrap_or(0)
}

/// Runs `f` over `items` on `threads` workers pulling from a shared queue
/// in the given order. Results come back in input order.
pub fn run_queue<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.max(1).min(items.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every item processed")).collect()
}

pub fn is_script(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("js" | "mjs" | "cjs"))
}

fn rel_string(p: &Path) -> String {
    p.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}

/// Project-relative paths of every regular file under `root`, sorted,
/// skipping `exclude` (typically the output directory).
pub fn list_files(root: &Path, exclude: Option<&Path>) -> Result<Vec<PathBuf>, PipelineError> {
    let exclude = exclude.and_then(|e| e.canonicalize().ok());
    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| exclude.as_ref().is_none_or(|ex| e.path().canonicalize().map(|c| &c != ex).unwrap_or(true)));
    for entry in walker {
        let entry = entry.map_err(|e| PipelineError::Input {
            path: root.to_path_buf(),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if entry.file_type().is_file() {
            out.push(entry.path().strip_prefix(root).unwrap().to_path_buf());
        }
    }
    out.sort();
    Ok(out)
}

fn prepare(text: &str, do_minify: bool) -> String {
    if do_minify {
        minify(text)
    } else {
        text.to_string()
    }
}

enum Phase1 {
    Parsed(FileSummary, u64),
    Failed(String, u64),
}

struct FileJob {
    index: usize,
    id: FileId,
    rel: PathBuf,
    size: u64,
}

#[derive(Default)]
struct FileOutcome {
    bytes_out: u64,
    issue: Option<String>,
    copied: bool,
    rename: Duration,
    transform: Duration,
    emit: Duration,
    parse: Duration,
    units: usize,
    scope_dump: Option<String>,
    rename_dump: Option<String>,
}

struct Shared<'a> {
    config: &'a ObfuscationConfig,
    markers: &'a [BoundaryMarker],
    graph: &'a DependencyGraph,
    ctx: RenameContext,
}

fn write_file(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)
}

/// Transforms one file; on any failure writes the original through.
fn process_file(job: &FileJob, sh: &Shared<'_>) -> FileOutcome {
    let cfg = sh.config;
    let src_path = cfg.input.join(&job.rel);
    let dst_path = cfg.output.join(&job.rel);
    let rel = rel_string(&job.rel);
    let mut out = FileOutcome::default();
    let original = match fs::read(&src_path) {
        Ok(b) => b,
        Err(e) => {
            out.issue = Some(format!("read failed: {e}"));
            return out;
        }
    };
    let copy_through = |mut out: FileOutcome, msg: Option<String>| {
        out.issue = msg;
        out.copied = true;
        out.bytes_out = original.len() as u64;
        if let Err(e) = write_file(&dst_path, &original) {
            out.issue = Some(format!("write failed: {e}"));
        }
        out
    };
    let Ok(text) = std::str::from_utf8(&original) else {
        return copy_through(out, Some("not valid UTF-8".into()));
    };

    let t0 = Instant::now();
    let source = prepare(text, cfg.minify);
    let parsed = jsparse::parse_source(&source, job.id);
    let (program, _) = match parsed {
        Ok(p) => p,
        Err(e) => return copy_through(out, Some(e.to_string())),
    };
    let mut tree = build_scope_tree(&program, job.id);
    out.parse = t0.elapsed();

    let t1 = Instant::now();
    let resolved: BTreeMap<String, FileId> = sh
        .graph
        .resolved_sources
        .range((job.id, String::new())..)
        .take_while(|((f, _), _)| *f == job.id)
        .map(|((_, s), t)| (s.clone(), *t))
        .collect();
    let file_markers: Vec<BoundaryMarker> = sh.markers.iter().filter(|m| m.files.contains(&job.id)).cloned().collect();
    let link = LinkView { markers: &file_markers, resolved };
    let units = plan_units(job.id, source.len(), &program, &tree, &link);
    out.units = units.len();
    if units.is_empty() {
        out.parse = t0.elapsed();
        return copy_through(out, None);
    }
    let spans: Vec<_> = units.iter().map(|u| u.span).collect();
    let opts =
        TransformOptions { strings: cfg.strings, properties: cfg.prop_access, instrument: cfg.instrument_decoder };
    let plan = plan_file(&source, &program, &mut tree, &spans, &rel, opts);
    drop(program);
    out.transform = t1.elapsed();

    let t2 = Instant::now();
    let map = match rename_tree(&tree, &sh.ctx) {
        Ok(m) => m,
        Err(e) => return copy_through(out, Some(format!("renaming failed: {e}"))),
    };
    let verdict = check_safety(std::slice::from_ref(&tree), &map);
    if !verdict.is_safe() {
        let v = &verdict.violations[0];
        return copy_through(out, Some(format!("unsafe renaming of `{}` at byte {}", v.original, v.span.start)));
    }
    let map = match merge_maps(vec![map], &file_markers) {
        Ok(m) => m,
        Err(e) => return copy_through(out, Some(e.to_string())),
    };
    out.rename = t2.elapsed();

    let t3 = Instant::now();
    let mut patches = rename_patches(&tree, &map);
    patches.extend(plan.patches(&map, cfg.instrument_decoder));
    patches.sort();
    let text_out = match emit(&source, &patches) {
        Ok(t) => t,
        Err(e) => return copy_through(out, Some(e.to_string())),
    };
    if cfg.dump_scopes {
        out.scope_dump = Some(dump_scopes(&rel, &tree));
    }
    if cfg.dump_renames {
        out.rename_dump = Some(format!("# {rel}\n{}", map.dump()));
    }
    out.bytes_out = text_out.len() as u64;
    if let Err(e) = write_file(&dst_path, text_out.as_bytes()) {
        out.issue = Some(format!("write failed: {e}"));
    }
    out.emit = t3.elapsed();
    out
}

/// Reads and parses every script, keeping only the summaries.
fn parse_phase(config: &ObfuscationConfig, scripts: &[&PathBuf]) -> Vec<Phase1> {
    run_queue(&scripts.iter().enumerate().collect::<Vec<_>>(), config.threads, |(i, rel)| {
        let path = config.input.join(rel);
        match fs::read(&path) {
            Ok(bytes) => {
                let size = bytes.len() as u64;
                match std::str::from_utf8(&bytes) {
                    Ok(text) => {
                        let source = prepare(text, config.minify);
                        match jsparse::parse_source(&source, FileId(*i as u32)) {
                            Ok((_, summary)) => Phase1::Parsed(summary, size),
                            Err(e) => Phase1::Failed(e.to_string(), size),
                        }
                    }
                    Err(_) => Phase1::Failed("not valid UTF-8".into(), size),
                }
            }
            Err(e) => Phase1::Failed(format!("read failed: {e}"), 0),
        }
    })
}

/// Result of the analysis phases alone, without transforming anything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub files: usize,
    pub edges: usize,
    pub unresolved: usize,
    pub cut_weight: usize,
    pub markers: usize,
    pub errors: Vec<FileIssue>,
    /// Dependency graph and partition assignment in the dump format.
    pub graph_dump: String,
}

/// Parses, builds the dependency graph, partitions and links; writes nothing.
pub fn analyze_project(config: &ObfuscationConfig) -> Result<Analysis, PipelineError> {
    if config.threads == 0 {
        return Err(PipelineError::FatalConfig("threads must be at least 1".into()));
    }
    if !config.input.is_dir() {
        return Err(PipelineError::Input {
            path: config.input.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "input directory not found"),
        });
    }
    let allowlist = load_allowlist(config)?;
    let files = list_files(&config.input, None)?;
    let scripts: Vec<&PathBuf> = files.iter().filter(|p| is_script(p)).collect();
    let mut summaries = Vec::new();
    let mut paths = Vec::new();
    let mut errors = Vec::new();
    for (rel, r) in scripts.iter().zip(parse_phase(config, &scripts)) {
        match r {
            Phase1::Parsed(summary, _) => {
                summaries.push(summary);
                paths.push(rel_string(rel));
            }
            Phase1::Failed(message, _) => errors.push(FileIssue { path: rel_string(rel), message }),
        }
    }
    let graph = build_dependency_graph(&summaries, &paths, &allowlist);
    let map = partition_graph(&graph, config.threads);
    let markers = link_cross_file(&summaries, &graph, &map)?;
    Ok(Analysis {
        files: graph.files.len(),
        edges: graph.edges.len(),
        unresolved: graph.unresolved.len(),
        cut_weight: map.cut_weight,
        markers: markers.len(),
        errors,
        graph_dump: dump_graph(&graph, &map),
    })
}

fn load_allowlist(config: &ObfuscationConfig) -> Result<Allowlist, PipelineError> {
    let mut allowlist = Allowlist::default();
    if let Some(p) = &config.allowlist {
        let extra =
            Allowlist::load(p).map_err(|e| PipelineError::FatalConfig(format!("allowlist {}: {e}", p.display())))?;
        allowlist.extend(extra.names().map(str::to_string));
    }
    Ok(allowlist)
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0 * 1000.0).round() / 1000.0
}

/// Obfuscates every script under `config.input` into `config.output`.
pub fn obfuscate_project(config: &ObfuscationConfig) -> Result<RunReport, PipelineError> {
    config.validate()?;
    let start = Instant::now();
    let threads = config.threads;
    if !config.input.is_dir() {
        return Err(PipelineError::Input {
            path: config.input.clone(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "input directory not found"),
        });
    }
    let files = list_files(&config.input, Some(&config.output))?;
    fs::create_dir_all(&config.output).map_err(|e| PipelineError::Output { path: config.output.clone(), source: e })?;

    let allowlist = load_allowlist(config)?;

    let (scripts, others): (Vec<&PathBuf>, Vec<&PathBuf>) = files.iter().partition(|p| is_script(p));
    let mut errors: Vec<FileIssue> = Vec::new();
    let mut copied: Vec<String> = Vec::new();
    let mut input_bytes = 0u64;
    let mut output_bytes = 0u64;

    // Phase 1: parse and summarize.
    let t_parse = Instant::now();
    let phase1 = parse_phase(config, &scripts);
    let parse_time = t_parse.elapsed();

    let mut summaries: Vec<FileSummary> = Vec::new();
    let mut paths: Vec<String> = Vec::new();
    let mut jobs: Vec<FileJob> = Vec::new();
    for (rel, r) in scripts.iter().zip(phase1) {
        match r {
            Phase1::Parsed(summary, size) => {
                input_bytes += size;
                jobs.push(FileJob { index: jobs.len(), id: summary.file, rel: (*rel).clone(), size });
                summaries.push(summary);
                paths.push(rel_string(rel));
            }
            Phase1::Failed(msg, size) => {
                input_bytes += size;
                let dst = config.output.join(rel);
                match fs::copy(config.input.join(rel), &dst).or_else(|_| {
                    fs::create_dir_all(dst.parent().unwrap())?;
                    fs::copy(config.input.join(rel), &dst)
                }) {
                    Ok(n) => output_bytes += n,
                    Err(e) => errors.push(FileIssue { path: rel_string(rel), message: format!("copy failed: {e}") }),
                }
                errors.push(FileIssue { path: rel_string(rel), message: msg });
                copied.push(rel_string(rel));
            }
        }
    }

    // PASA: dependency graph, partitioning, boundary markers.
    let t_pasa = Instant::now();
    let graph = build_dependency_graph(&summaries, &paths, &allowlist);
    let map = partition_graph(&graph, threads);
    let markers = link_cross_file(&summaries, &graph, &map)?;
    let mut ctx = RenameContext::from_markers(&markers);
    ctx.rename_locals = config.rename;
    let free: BTreeSet<String> = summaries.iter().flat_map(|s| s.free_names.iter().cloned()).collect();
    ctx.module_forbidden = free;
    ctx.module_forbidden.extend(allowlist.names().map(str::to_string));
    if config.dump_scopes {
        let dump = dump_graph(&graph, &map);
        write_file(&config.scopes_dump_path(), dump.as_bytes())
            .map_err(|e| PipelineError::Output { path: config.scopes_dump_path(), source: e })?;
    }
    drop(summaries);
    let pasa_time = t_pasa.elapsed();

    // Phase 2: per-file transformation, largest files first.
    let t_phase2 = Instant::now();
    let shared = Shared { config, markers: &markers, graph: &graph, ctx };
    let mut order: Vec<&FileJob> = jobs.iter().collect();
    order.sort_by(|a, b| b.size.cmp(&a.size).then(a.rel.cmp(&b.rel)));
    let outcomes = run_queue(&order, threads, |job| (job.index, process_file(job, &shared)));
    let phase2 = t_phase2.elapsed();
    let mut outcomes: Vec<(usize, FileOutcome)> = outcomes;
    outcomes.sort_by_key(|(i, _)| *i);

    let mut sum = PhaseTimes::default();
    let mut transformed = 0;
    let mut unit_count = 0;
    let mut scope_dump = String::new();
    let mut rename_dump = String::new();
    for (i, o) in &outcomes {
        let rel = rel_string(&jobs[*i].rel);
        output_bytes += o.bytes_out;
        unit_count += o.units;
        if let Some(msg) = &o.issue {
            errors.push(FileIssue { path: rel.clone(), message: msg.clone() });
        }
        if o.copied || o.issue.is_some() {
            copied.push(rel);
        } else {
            transformed += 1;
        }
        sum.parse += o.parse.as_secs_f64();
        sum.rename += o.rename.as_secs_f64();
        sum.transform += o.transform.as_secs_f64();
        sum.emit += o.emit.as_secs_f64();
        if let Some(d) = &o.scope_dump {
            scope_dump.push_str(d);
        }
        if let Some(d) = &o.rename_dump {
            rename_dump.push_str(d);
        }
    }

    // Non-script files are copied verbatim.
    for rel in &others {
        let src = config.input.join(rel);
        let dst = config.output.join(rel);
        match fs::read(&src).and_then(|b| {
            input_bytes += b.len() as u64;
            write_file(&dst, &b).map(|_| b.len() as u64)
        }) {
            Ok(n) => output_bytes += n,
            Err(e) => errors.push(FileIssue { path: rel_string(rel), message: format!("copy failed: {e}") }),
        }
        copied.push(rel_string(rel));
    }

    if config.dump_scopes {
        let path = config.scopes_dump_path();
        let mut all = fs::read_to_string(&path).unwrap_or_default();
        all.push_str(&scope_dump);
        write_file(&path, all.as_bytes()).map_err(|e| PipelineError::Output { path, source: e })?;
    }
    if config.dump_renames {
        let path = config.renames_dump_path();
        write_file(&path, rename_dump.as_bytes()).map_err(|e| PipelineError::Output { path, source: e })?;
    }

    // Worker time per step, scaled onto phase-2 wall time.
    let busy = sum.parse + sum.rename + sum.transform + sum.emit;
    let scale = if busy > 0.0 { phase2.as_secs_f64() / busy } else { 0.0 };
    let scaled = |x: f64| ms(Duration::from_secs_f64(x * scale));
    errors.sort_by(|a, b| a.path.cmp(&b.path).then(a.message.cmp(&b.message)));
    copied.sort();
    copied.dedup();
    Ok(RunReport {
        files_total: files.len(),
        files_transformed: transformed,
        files_copied: copied.len(),
        cut_weight: map.cut_weight,
        phase_times_ms: PhaseTimes {
            parse: ms(parse_time) + scaled(sum.parse),
            pasa: ms(pasa_time),
            rename: scaled(sum.rename),
            transform: scaled(sum.transform),
            emit: scaled(sum.emit),
        },
        wall_time_ms: ms(start.elapsed()),
        peak_memory_bytes: peak_memory_bytes(),
        output_bytes,
        input_bytes,
        threads,
        markers: markers.len(),
        units: unit_count,
        errors,
        copied,
        config: config.clone(),
    })
}

/// Writes the report as pretty JSON next to the output tree.
pub fn write_report(config: &ObfuscationConfig, report: &RunReport) -> Result<PathBuf, PipelineError> {
    let path = config.report_path();
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    write_file(&path, json.as_bytes()).map_err(|e| PipelineError::Output { path: path.clone(), source: e })?;
    Ok(path)
}
