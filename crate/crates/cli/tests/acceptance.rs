//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails for a reason other than host hardware.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use scopeshield::corpus::{write_equivalence_corpus, write_sized_corpus};
use scopeshield::equivharness::run_differential;
use scopeshield::jsparse::{parse_source, FileId};
use scopeshield::metrics::{compare_trees, nid, Compressor};
use scopeshield::pasa::{build_scope_tree, ScopeId, ScopeKind, ScopeTree, ScopeTreeBuilder};
use scopeshield::pipeline::{list_files, obfuscate_project, ObfuscationConfig};
use scopeshield::renamer::{check_safety, cost, pool_iter, rename_tree, RenameContext, RenameMap};

const SEED: u64 = 0x5c09e;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failure caused by the host (core count), not by the implementation.
    hardware_bound: bool,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into(), hardware_bound: false }
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn node_available() -> bool {
    Command::new("node").arg("--version").output().map(|o| o.status.success()).unwrap_or(false)
}

fn read_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    list_files(root, None)
        .unwrap()
        .into_iter()
        .map(|rel| {
            let bytes = fs::read(root.join(&rel)).unwrap();
            (rel, bytes)
        })
        .collect()
}

fn obfuscate(
    input: &Path,
    output: &Path,
    threads: usize,
    edit: impl FnOnce(&mut ObfuscationConfig),
) -> scopeshield::pipeline::RunReport {
    let _ = fs::remove_dir_all(output);
    let mut c = ObfuscationConfig { input: input.into(), output: output.into(), threads, ..Default::default() };
    edit(&mut c);
    obfuscate_project(&c).expect("pipeline run")
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Workspace { _dir: dir, root }
    }

    fn equivalence(&self) -> PathBuf {
        self.root.join("equiv")
    }

    fn sized(&self) -> PathBuf {
        self.root.join("sized")
    }
}

// Criterion 1.
fn equivalence(ws: &Workspace) -> Outcome {
    if !node_available() {
        return outcome(false, "node is not installed");
    }
    let orig = ws.equivalence();
    let cases = write_equivalence_corpus(&orig, 208, SEED).unwrap();
    let obf = ws.root.join("equiv-out");
    let report = obfuscate(&orig, &obf, threads(), |_| {});
    if report.has_file_errors() {
        return outcome(false, format!("pipeline errors: {:?}", report.errors));
    }
    let r = run_differential(&orig, &obf, &cases, "node {file}", threads()).unwrap();
    let first =
        r.divergences().next().map(|d| format!("; first: {}", serde_json::to_string(d).unwrap())).unwrap_or_default();
    outcome(
        r.total >= 200 && r.equivalent == r.total,
        format!("{}/{} programs equivalent{first}", r.equivalent, r.total),
    )
}

// A scope tree shape: per scope its parent (by index), kind, declared
// names, referenced names and flags.
#[derive(Debug, Clone)]
struct ScopeSpec {
    parent: usize,
    block: bool,
    decls: Vec<usize>,
    refs: Vec<usize>,
    dynamic: bool,
    export: bool,
}

const NAMES: &[&str] = &["a", "b", "c", "x", "y", "z", "aa", "n", "$", "_", "e", "f"];

fn scope_specs(max_scopes: usize, max_decls: usize, dynamic: bool) -> impl Strategy<Value = Vec<ScopeSpec>> {
    let one = (
        any::<prop::sample::Index>(),
        any::<bool>(),
        prop::collection::vec(0..NAMES.len(), 0..=max_decls),
        prop::collection::vec(0..NAMES.len(), 0..5),
        prop::bool::weighted(if dynamic { 0.05 } else { 0.0 }),
        prop::bool::weighted(if dynamic { 0.1 } else { 0.0 }),
    );
    prop::collection::vec(one, 1..=max_scopes).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (p, block, decls, refs, dynamic, export))| ScopeSpec {
                parent: if i == 0 { 0 } else { p.index(i) },
                block,
                decls,
                refs,
                dynamic,
                export,
            })
            .collect()
    })
}

/// Builds the tree, keeping nesting depth at most `max_depth` and at most
/// `max_bindings` declarations overall.
fn build_tree(specs: &[ScopeSpec], max_depth: usize, max_bindings: usize) -> ScopeTree {
    let mut b = ScopeTreeBuilder::new(FileId(0));
    let mut ids: Vec<ScopeId> = Vec::new();
    let mut depth: Vec<usize> = Vec::new();
    let mut bindings = 0;
    for (i, s) in specs.iter().enumerate() {
        let (id, d) = if i == 0 {
            (b.root(), 0)
        } else {
            let mut p = s.parent;
            while depth[p] + 1 > max_depth {
                p = specs[p].parent;
            }
            let kind = if s.block { ScopeKind::Block } else { ScopeKind::Function };
            (b.add_scope(ids[p], kind), depth[p] + 1)
        };
        ids.push(id);
        depth.push(d);
        for &n in &s.decls {
            if bindings < max_bindings {
                b.declare(id, NAMES[n]);
                bindings += 1;
            }
        }
    }
    // References after all declarations so every scope sees its own.
    for (i, s) in specs.iter().enumerate() {
        for &n in &s.refs {
            b.reference(ids[i], NAMES[n]);
        }
        if s.export && i == 0 {
            for &n in &s.decls {
                b.mark_exported(ids[0], NAMES[n]);
            }
        }
        if s.dynamic {
            b.mark_dynamic(ids[i]);
        }
    }
    b.finish()
}

fn binding_count(t: &ScopeTree) -> usize {
    t.nodes.iter().map(|n| n.declarations.len()).sum()
}

fn max_depth(t: &ScopeTree) -> usize {
    t.nodes.iter().map(|n| t.depth(n.id)).max().unwrap_or(0)
}

// Criterion 2.
fn safety_oracle() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 10_000, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let (checked, deepest, most) = (Cell::new(0usize), Cell::new(0usize), Cell::new(0usize));
    let result = runner.run(&scope_specs(14, 4, true), |specs| {
        let t = build_tree(&specs, 6, 30);
        prop_assert!(max_depth(&t) <= 6 && binding_count(&t) <= 30);
        let map = rename_tree(&t, &RenameContext::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let v = check_safety(std::slice::from_ref(&t), &map);
        prop_assert!(v.is_safe(), "{:?}", v.violations);
        checked.set(checked.get() + 1);
        deepest.set(deepest.get().max(max_depth(&t)));
        most.set(most.get().max(binding_count(&t)));
        Ok(())
    });
    if let Err(e) = result {
        return outcome(false, format!("unsafe renaming: {e}"));
    }

    let src =
        "function outer(){var x=1;function mid(){var y=2;function inner(){return x+y}return inner()}return mid()}";
    let (p, _) = parse_source(src, FileId(0)).unwrap();
    let t = build_scope_tree(&p, FileId(0));
    let loose = rename_tree(&t, &RenameContext { tighten: false, ..Default::default() }).unwrap();
    let flagged = !check_safety(std::slice::from_ref(&t), &loose).is_safe();
    let (checked, deepest, most) = (checked.get(), deepest.get(), most.get());
    let tight_ok =
        check_safety(std::slice::from_ref(&t), &rename_tree(&t, &RenameContext::default()).unwrap()).is_safe();
    outcome(
        checked >= 10_000 && flagged && tight_ok,
        format!(
            "{checked} random trees safe (max depth {deepest}, max {most} bindings); capture counterexample flagged: {flagged}"
        ),
    )
}

/// Minimum cost over every safe assignment of `candidates` to the map's
/// bindings.
fn brute_force_min(t: &ScopeTree, greedy: &RenameMap, candidates: &[String]) -> Option<u64> {
    let keys: Vec<_> = greedy.entries.iter().map(|(b, e)| (b.clone(), e.usage)).collect();
    let k = candidates.len();
    let total = k.pow(keys.len() as u32);
    let mut best: Option<u64> = None;
    for mut code in 0..total {
        let mut m = RenameMap::new();
        for (b, usage) in &keys {
            m.insert(b.clone(), candidates[code % k].clone(), *usage);
            code /= k;
        }
        let c = cost(&m);
        if best.is_some_and(|b| c >= b) {
            continue;
        }
        if check_safety(std::slice::from_ref(t), &m).is_safe() {
            best = Some(c);
        }
    }
    best
}

// Criterion 3.
fn greedy_optimality() -> Outcome {
    let mut runner = TestRunner::new_with_rng(
        Config { cases: 3_000, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    let compared = Cell::new(0usize);
    let result = runner.run(&scope_specs(5, 2, false), |specs| {
        let t = build_tree(&specs, 6, 4);
        let greedy = rename_tree(&t, &RenameContext::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(check_safety(std::slice::from_ref(&t), &greedy).is_safe());
        if greedy.is_empty() {
            return Ok(());
        }
        // Every name greedy could have picked, plus each binding's own
        // name and two two-letter names.
        let globals = t.free_names().len();
        let mut candidates: Vec<String> = pool_iter(|_| false).take(greedy.len() + globals + 2).collect();
        for b in greedy.entries.keys() {
            candidates.push(b.name().to_string());
        }
        candidates.sort();
        candidates.dedup();
        let min = brute_force_min(&t, &greedy, &candidates);
        prop_assert_eq!(Some(cost(&greedy)), min, "tree {:?}", specs);
        compared.set(compared.get() + 1);
        Ok(())
    });
    let compared = compared.get();
    match result {
        Ok(()) => outcome(
            compared > 1000,
            format!("greedy cost equals brute-force minimum on {compared} trees with <= 4 bindings"),
        ),
        Err(e) => outcome(false, format!("greedy above optimum: {e}")),
    }
}

const SIZES: [usize; 4] = [50 << 10, 200 << 10, 1 << 20, 5 << 20];

// Criterion 4.
fn inflation(ws: &Workspace) -> Outcome {
    let orig = ws.sized();
    write_sized_corpus(&orig, &SIZES, SEED, true).unwrap();
    let all = obfuscate(&orig, &ws.root.join("sized-all"), threads(), |_| {});
    let rename = obfuscate(&orig, &ws.root.join("sized-rename"), threads(), |c| {
        c.strings = false;
        c.prop_access = false;
        c.minify = false;
    });
    if all.has_file_errors() || rename.has_file_errors() {
        return outcome(false, format!("pipeline errors: {:?} {:?}", all.errors, rename.errors));
    }
    let pct = |r: &scopeshield::pipeline::RunReport| {
        (r.output_bytes as f64 - r.input_bytes as f64) / r.input_bytes as f64 * 100.0
    };
    outcome(
        pct(&all) <= 100.0 && rename.output_bytes <= rename.input_bytes,
        format!(
            "input {} B; all transforms {} B ({:+.1}%); rename only {} B ({:+.1}%)",
            all.input_bytes,
            all.output_bytes,
            pct(&all),
            rename.output_bytes,
            pct(&rename)
        ),
    )
}

// Criterion 5.
fn scaling(ws: &Workspace) -> Outcome {
    let dir = ws.root.join("bench");
    let out = Command::new(env!("CARGO_BIN_EXE_scopeshield"))
        .args(["bench", "--dir"])
        .arg(&dir)
        .args(["--bytes", &(10usize << 20).to_string(), "--workers", "1,8", "--scale", "4", "--json"])
        .output()
        .unwrap();
    if !out.status.success() {
        return outcome(false, format!("bench failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let speedup = v["rows"][1]["speedup"].as_f64().unwrap();
    let ratio = v["scale"]["ratio"].as_f64().unwrap();
    let identical = v["rows"][1]["identical"].as_bool().unwrap();
    let detail = format!(
        "{} B corpus; 1 worker {:.0} ms, 8 workers {:.0} ms, speedup {speedup:.2}x (need >= 3); 4x corpus time ratio {ratio:.2} (need <= 6); host cores {}",
        v["corpus_bytes"],
        v["rows"][0]["wall_ms"].as_f64().unwrap(),
        v["rows"][1]["wall_ms"].as_f64().unwrap(),
        threads()
    );
    let speedup_ok = speedup >= 3.0;
    let ratio_ok = ratio <= 6.0 && identical;
    Outcome {
        pass: speedup_ok && ratio_ok,
        // Eight workers cannot run three times faster on fewer than four
        // cores; only the speedup half is excused, and only then.
        hardware_bound: !speedup_ok && ratio_ok && threads() < 4,
        detail,
    }
}

// Criterion 6.
fn determinism(ws: &Workspace) -> Outcome {
    let mut diffs = 0;
    let mut files = 0;
    for root in [ws.equivalence(), ws.sized()] {
        let mut reference: Option<BTreeMap<PathBuf, Vec<u8>>> = None;
        for w in [1, 2, 4, 8] {
            let out = ws.root.join(format!("det-{w}"));
            obfuscate(&root, &out, w, |_| {});
            let tree = read_tree(&out);
            match &reference {
                None => {
                    files += tree.len();
                    reference = Some(tree);
                }
                Some(r) => {
                    diffs += r.iter().filter(|(k, v)| tree.get(*k) != Some(*v)).count();
                    diffs += tree.keys().filter(|k| !r.contains_key(*k)).count();
                }
            }
        }
    }
    outcome(files > 0 && diffs == 0, format!("{files} files at 1/2/4/8 workers, {diffs} differing"))
}

const MEMO: &str = "\
function describe(i) {
  const kind = i % 2 === 0 ? 'even number' : 'odd number';
  return 'item ' + i + ' is an ' + kind;
}
let total = 0;
for (let i = 0; i < 1000; i++) total += describe(i).length;
console.log(total);
console.log(String(globalThis.__ssDecodes));
";

// Criterion 7.
fn memoization(ws: &Workspace) -> Outcome {
    if !node_available() {
        return outcome(false, "node is not installed");
    }
    let src = ws.root.join("memo");
    fs::create_dir_all(&src).unwrap();
    fs::write(src.join("main.js"), MEMO).unwrap();
    let out = ws.root.join("memo-out");
    let report = obfuscate(&src, &out, 1, |c| c.instrument_decoder = true);
    let obf = fs::read_to_string(out.join("main.js")).unwrap();
    let run = Command::new("node").arg(out.join("main.js")).output().unwrap();
    let orig = Command::new("node").arg(src.join("main.js")).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    let expected_total = String::from_utf8_lossy(&orig.stdout).lines().next().unwrap_or("").to_string();
    let decodes = lines.get(1).copied().unwrap_or("");
    let encoded = !obf.contains("even number");
    outcome(
        report.units == 1 && encoded && lines.first() == Some(&expected_total.as_str()) && decodes == "1",
        format!("1000 calls, {decodes} table decode(s), strings encoded: {encoded}, units: {}", report.units),
    )
}

// Criterion 8.
fn nid_criterion(ws: &Workspace) -> Outcome {
    let c = Compressor::default();
    let report = compare_trees(&ws.sized(), &ws.root.join("sized-all"), threads(), c).unwrap();
    let agg = report.aggregate.nid;
    let mut worst_self: f64 = 0.0;
    let mut checked = 0;
    for (_, bytes) in read_tree(&ws.sized()).into_iter().chain(read_tree(&ws.equivalence())) {
        if bytes.len() >= 4096 {
            worst_self = worst_self.max(nid(&bytes, &bytes, c).unwrap());
            checked += 1;
        }
    }
    let example = scopeshield::metrics::nid_from_sizes(100, 120, 180);
    let example_ok = (example - 0.6667).abs() < 5e-5;
    outcome(
        agg >= 0.75 && checked > 0 && worst_self <= 0.1 && example_ok,
        format!("aggregate NID {agg:.3} (need >= 0.75); max nid(x,x) {worst_self:.3} over {checked} files >= 4 KB; worked example {example:.4}"),
    )
}

fn peak_for(dir: &Path, bytes: usize) -> u64 {
    let bench = Command::new(env!("CARGO_BIN_EXE_scopeshield"))
        .args(["bench", "--dir"])
        .arg(dir)
        .args(["--bytes", &bytes.to_string(), "--workers", "1", "--json"])
        .output()
        .unwrap();
    assert!(bench.status.success(), "{}", String::from_utf8_lossy(&bench.stderr));
    let v: serde_json::Value = serde_json::from_slice(&bench.stdout).unwrap();
    v["rows"][0]["peak_memory_bytes"].as_u64().unwrap()
}

// Peak memory grows sub-linearly with corpus size.
fn memory(ws: &Workspace) -> Outcome {
    let n = 8 << 20;
    let small = peak_for(&ws.root.join("mem-1"), n);
    let large = peak_for(&ws.root.join("mem-2"), 2 * n);
    outcome(
        (large as f64) < 1.8 * small as f64,
        format!(
            "peak RSS {:.1} MB at {} MB, {:.1} MB at {} MB",
            small as f64 / 1e6,
            n >> 20,
            large as f64 / 1e6,
            (2 * n) >> 20
        ),
    )
}

fn main() {
    // Honour `cargo test -- <filter>` style invocations that list tests.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let ws = Workspace::new();
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("1 semantic equivalence", Box::new(|| equivalence(&ws))),
        ("2 renaming safety oracle", Box::new(safety_oracle)),
        ("3 greedy cost optimality", Box::new(greedy_optimality)),
        ("4 size inflation", Box::new(|| inflation(&ws))),
        ("5 parallel scaling", Box::new(|| scaling(&ws))),
        ("6 determinism", Box::new(|| determinism(&ws))),
        ("7 decoder memoization", Box::new(|| memoization(&ws))),
        ("8 normalized information distance", Box::new(|| nid_criterion(&ws))),
        ("- peak memory sub-linearity", Box::new(|| memory(&ws))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        let status = match (o.pass, o.hardware_bound) {
            (true, _) => "PASS",
            (false, true) => "FAIL (host hardware)",
            (false, false) => {
                failed += 1;
                "FAIL"
            }
        };
        println!("criterion {name}: {status} [{secs:.1}s] {}", o.detail);
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
