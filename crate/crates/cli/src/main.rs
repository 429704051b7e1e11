use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scopeshield::corpus::write_bench_corpus;
use scopeshield::equivharness::{load_cases, run_differential};
use scopeshield::metrics::{compare_trees, Compressor};
use scopeshield::pipeline::{analyze_project, list_files, obfuscate_project, write_report, ObfuscationConfig};

const EXIT_FILE_ERRORS: u8 = 2;
const EXIT_FATAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "scopeshield", version, about = "Parallel scope-aware JavaScript obfuscator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Obfuscate every script under the input tree into the output tree.
    Obfuscate(ObfuscateArgs),
    /// Print the file dependency graph and partitioning without writing output.
    Analyze(AnalyzeArgs),
    /// Compare an original and an obfuscated tree: inflation, complexity, NID.
    Metrics(MetricsArgs),
    /// Run both trees under a JavaScript engine and compare their output.
    Verify(VerifyArgs),
    /// Generate a synthetic corpus and time obfuscation at several worker counts.
    Bench(BenchArgs),
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    no_rename: bool,
    #[arg(long)]
    no_strings: bool,
    #[arg(long)]
    no_prop_access: bool,
    #[arg(long)]
    no_minify: bool,
    /// Extra host global names, one per line.
    #[arg(long)]
    allowlist: Option<PathBuf>,
    #[arg(long)]
    dump_scopes: bool,
    #[arg(long)]
    dump_renames: bool,
    /// Emit decoders that count table decodes in `globalThis.__ssDecodes`.
    #[arg(long)]
    instrument_decoder: bool,
    /// Engine command template, e.g. "node {file}".
    #[arg(long)]
    engine: Option<String>,
    /// Run report path (default: `<out>.report.json`).
    #[arg(long)]
    report: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ObfuscationConfig> {
        let mut c = match &self.config {
            Some(p) => ObfuscationConfig::load(p)?,
            None => ObfuscationConfig::default(),
        };
        if let Some(v) = &self.input {
            c.input = v.clone();
        }
        if let Some(v) = &self.output {
            c.output = v.clone();
        }
        if let Some(v) = self.threads {
            c.threads = v;
        }
        if let Some(v) = &self.allowlist {
            c.allowlist = Some(v.clone());
        }
        if let Some(v) = &self.engine {
            c.engine = v.clone();
        }
        if let Some(v) = &self.report {
            c.report = Some(v.clone());
        }
        c.rename &= !self.no_rename;
        c.strings &= !self.no_strings;
        c.prop_access &= !self.no_prop_access;
        c.minify &= !self.no_minify;
        c.dump_scopes |= self.dump_scopes;
        c.dump_renames |= self.dump_renames;
        c.instrument_decoder |= self.instrument_decoder;
        Ok(c)
    }
}

#[derive(Args)]
struct ObfuscateArgs {
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Print the summary as JSON instead of the graph dump.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompressorArg {
    Xz,
    Bzip2,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    orig: PathBuf,
    #[arg(long)]
    obf: PathBuf,
    /// Also write the full report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "xz")]
    compressor: CompressorArg,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    orig: PathBuf,
    #[arg(long)]
    obf: PathBuf,
    /// JSON array of test cases.
    #[arg(long)]
    cases: PathBuf,
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// Write one JSON verdict per line to this path.
    #[arg(long)]
    verdicts: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Working directory for the generated corpus and outputs.
    #[arg(long)]
    dir: PathBuf,
    /// Total corpus size in bytes.
    #[arg(long, default_value_t = 10 << 20)]
    bytes: usize,
    /// Size of each generated file in bytes.
    #[arg(long, default_value_t = 64 << 10)]
    file_bytes: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![1, 2, 4, 8])]
    workers: Vec<usize>,
    /// Also time a corpus this many times larger at the first worker count.
    #[arg(long)]
    scale: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Print the results as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Serialize)]
struct BenchRow {
    workers: usize,
    wall_ms: f64,
    speedup: f64,
    identical: bool,
    peak_memory_bytes: u64,
}

#[derive(Debug, Serialize)]
struct ScaleRow {
    factor: usize,
    bytes: u64,
    wall_ms: f64,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    corpus_bytes: u64,
    files: usize,
    rows: Vec<BenchRow>,
    scale: Option<ScaleRow>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_help());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FATAL)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Obfuscate(a) => obfuscate(&a.config.resolve()?),
        Command::Analyze(a) => analyze(&a),
        Command::Metrics(a) => metrics(&a),
        Command::Verify(a) => verify(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn obfuscate(config: &ObfuscationConfig) -> Result<u8> {
    let report = obfuscate_project(config)?;
    let path = write_report(config, &report)?;
    for issue in &report.errors {
        eprintln!("warning: {}: {}", issue.path, issue.message);
    }
    println!("{}", path.display());
    Ok(if report.has_file_errors() { EXIT_FILE_ERRORS } else { 0 })
}

fn analyze(a: &AnalyzeArgs) -> Result<u8> {
    let config = a.config.resolve()?;
    let analysis = analyze_project(&config)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&analysis)?);
    } else {
        print!("{}", analysis.graph_dump);
        println!(
            "# files={} edges={} unresolved={} markers={} cut_weight={}",
            analysis.files, analysis.edges, analysis.unresolved, analysis.markers, analysis.cut_weight
        );
    }
    for issue in &analysis.errors {
        eprintln!("warning: {}: {}", issue.path, issue.message);
    }
    Ok(if analysis.errors.is_empty() { 0 } else { EXIT_FILE_ERRORS })
}

fn metrics(a: &MetricsArgs) -> Result<u8> {
    let compressor = match a.compressor {
        CompressorArg::Xz => Compressor::Xz,
        CompressorArg::Bzip2 => Compressor::Bzip2,
    };
    let threads = a.threads.unwrap_or_else(|| ObfuscationConfig::default().threads);
    let report = compare_trees(&a.orig, &a.obf, threads, compressor)?;
    print!("{}", report.table());
    let json = serde_json::to_string_pretty(&report)?;
    match &a.json {
        Some(p) => std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    Ok(0)
}

fn verify(a: &VerifyArgs) -> Result<u8> {
    let base = match &a.config {
        Some(p) => ObfuscationConfig::load(p)?,
        None => ObfuscationConfig::default(),
    };
    let engine = a.engine.clone().unwrap_or(base.engine);
    let threads = a.threads.unwrap_or(base.threads);
    let cases = load_cases(&a.cases)?;
    let report = run_differential(&a.orig, &a.obf, &cases, &engine, threads)?;
    if let Some(p) = &a.verdicts {
        std::fs::write(p, report.to_jsonl()).with_context(|| format!("writing {}", p.display()))?;
    }
    for d in report.divergences() {
        eprintln!("{}", serde_json::to_string(d)?);
    }
    println!("equivalent {}/{} ({:.2}%)", report.equivalent, report.total, report.equivalence_rate * 100.0);
    Ok(if report.equivalent == report.total { 0 } else { EXIT_FILE_ERRORS })
}

fn read_tree(root: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for rel in list_files(root, None)? {
        let bytes = std::fs::read(root.join(&rel)).with_context(|| format!("reading {}", rel.display()))?;
        out.insert(rel, bytes);
    }
    Ok(out)
}

fn tree_bytes(root: &Path) -> Result<u64> {
    let mut total = 0;
    for rel in list_files(root, None)? {
        total += std::fs::metadata(root.join(&rel))?.len();
    }
    Ok(total)
}

fn timed_run(input: &Path, output: &Path, threads: usize) -> Result<(f64, u64)> {
    if output.exists() {
        std::fs::remove_dir_all(output).with_context(|| format!("clearing {}", output.display()))?;
    }
    let config =
        ObfuscationConfig { input: input.to_path_buf(), output: output.to_path_buf(), threads, ..Default::default() };
    let start = Instant::now();
    let report = obfuscate_project(&config)?;
    let wall = start.elapsed().as_secs_f64() * 1000.0;
    if report.has_file_errors() {
        anyhow::bail!("bench corpus produced file errors: {:?}", report.errors);
    }
    Ok((wall, report.peak_memory_bytes))
}

fn bench(a: &BenchArgs) -> Result<u8> {
    if a.workers.is_empty() || a.workers.contains(&0) {
        anyhow::bail!("worker counts must be at least 1");
    }
    let input = a.dir.join("corpus");
    if input.exists() {
        std::fs::remove_dir_all(&input)?;
    }
    let files = write_bench_corpus(&input, a.bytes, a.file_bytes, a.seed, false)?;
    let corpus_bytes = tree_bytes(&input)?;

    let mut rows: Vec<BenchRow> = Vec::new();
    let mut reference: Option<BTreeMap<PathBuf, Vec<u8>>> = None;
    for &w in &a.workers {
        let out = a.dir.join(format!("out-{w}"));
        let (wall_ms, peak) = timed_run(&input, &out, w)?;
        let tree = read_tree(&out)?;
        let identical = match &reference {
            Some(r) => *r == tree,
            None => {
                reference = Some(tree);
                true
            }
        };
        let base = rows.first().map_or(wall_ms, |r| r.wall_ms);
        rows.push(BenchRow { workers: w, wall_ms, speedup: base / wall_ms, identical, peak_memory_bytes: peak });
    }

    let scale = match a.scale {
        Some(k) if k > 1 => {
            let big = a.dir.join("corpus-scaled");
            if big.exists() {
                std::fs::remove_dir_all(&big)?;
            }
            write_bench_corpus(&big, a.bytes * k, a.file_bytes, a.seed, false)?;
            let bytes = tree_bytes(&big)?;
            let (wall_ms, _) = timed_run(&big, &a.dir.join("out-scaled"), a.workers[0])?;
            Some(ScaleRow { factor: k, bytes, wall_ms, ratio: wall_ms / rows[0].wall_ms })
        }
        _ => None,
    };

    let report = BenchReport { corpus_bytes, files: files.len(), rows, scale };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("corpus: {} files, {} bytes", report.files, report.corpus_bytes);
        println!("{:>8} {:>12} {:>8} {:>10} {:>12}", "workers", "wall_ms", "speedup", "identical", "peak_mb");
        for r in &report.rows {
            println!(
                "{:>8} {:>12.1} {:>8.2} {:>10} {:>12.1}",
                r.workers,
                r.wall_ms,
                r.speedup,
                r.identical,
                r.peak_memory_bytes as f64 / (1 << 20) as f64
            );
        }
        if let Some(s) = &report.scale {
            println!("scaled x{}: {} bytes, {:.1} ms, time ratio {:.2}", s.factor, s.bytes, s.wall_ms, s.ratio);
        }
    }
    Ok(if report.rows.iter().all(|r| r.identical) { 0 } else { EXIT_FILE_ERRORS })
}
