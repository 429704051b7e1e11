//! Generated JavaScript for tests and benchmarks: deterministic,
//! self-checking programs for differential testing, and large independent
//! files for size and scaling measurements.

mod programs;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equivharness::TestCase;
use crate::jsparse::minify::minify;
use programs::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Arithmetic,
    Closures,
    Recursion,
    Classes,
    Strings,
    Objects,
    Scoping,
    Async,
    Arrays,
    Dynamic,
    With,
    Esm,
    CommonJs,
    Globals,
    Syntax,
    Mixed,
}

const FAMILIES: [Family; 16] = [
    Family::Arithmetic,
    Family::Closures,
    Family::Recursion,
    Family::Classes,
    Family::Strings,
    Family::Objects,
    Family::Scoping,
    Family::Async,
    Family::Arrays,
    Family::Dynamic,
    Family::With,
    Family::Esm,
    Family::CommonJs,
    Family::Globals,
    Family::Syntax,
    Family::Mixed,
];

impl Family {
    fn slug(self) -> &'static str {
        match self {
            Family::Arithmetic => "arithmetic",
            Family::Closures => "closures",
            Family::Recursion => "recursion",
            Family::Classes => "classes",
            Family::Strings => "strings",
            Family::Objects => "objects",
            Family::Scoping => "scoping",
            Family::Async => "async",
            Family::Arrays => "arrays",
            Family::Dynamic => "eval",
            Family::With => "with",
            Family::Esm => "esm",
            Family::CommonJs => "commonjs",
            Family::Globals => "globals",
            Family::Syntax => "syntax",
            Family::Mixed => "mixed",
        }
    }

    fn body(self) -> &'static str {
        match self {
            Family::Arithmetic => ARITHMETIC,
            Family::Closures => CLOSURES,
            Family::Recursion => RECURSION,
            Family::Classes => CLASSES,
            Family::Strings => STRINGS,
            Family::Objects => OBJECTS,
            Family::Scoping => SCOPING,
            Family::Async => ASYNC,
            Family::Arrays => ARRAYS,
            Family::Dynamic => DYNAMIC,
            Family::With => WITH_SCOPE,
            Family::Esm => ESM_MAIN,
            Family::CommonJs => CJS_MAIN,
            Family::Globals => GLOBALS_MAIN,
            Family::Syntax => SYNTAX,
            Family::Mixed => MIXED,
        }
    }
}

/// One generated program: files relative to its own directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusProgram {
    pub name: String,
    pub entry: PathBuf,
    pub files: Vec<(PathBuf, String)>,
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_ascii_uppercase().to_string() + c.as_str()).unwrap_or_default()
}

/// Replaces every `@key@` using `value`, memoizing per key.
fn fill(template: &str, values: &mut dyn FnMut(&str) -> String) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(i) = rest.find('@') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        match after.find('@') {
            Some(j) if j > 0 && after[..j].chars().all(|c| c.is_ascii_alphanumeric()) => {
                out.push_str(&values(&after[..j]));
                rest = &after[j + 1..];
            }
            _ => {
                out.push('@');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

struct Variant {
    rng: ChaCha8Rng,
    family: Family,
    chosen: std::collections::HashMap<String, String>,
}

impl Variant {
    fn value(&mut self, key: &str) -> String {
        if let Some(v) = self.chosen.get(key) {
            return v.clone();
        }
        let rng = &mut self.rng;
        let v = match key {
            "h" => ["checksumState", "digest", "runningHash", "outputHash"].choose(rng).unwrap().to_string(),
            "out" => ["emitLine", "reportLine", "printLine", "logResult"].choose(rng).unwrap().to_string(),
            "check" => ["assertThat", "verify", "ensure", "expectTrue"].choose(rng).unwrap().to_string(),
            "a" => rng.gen_range(3..40).to_string(),
            "b" => rng.gen_range(2..30).to_string(),
            "c" => rng.gen_range(1..10).to_string(),
            "d" => rng.gen_range(3..8).to_string(),
            "m" => rng.gen_range(1..5).to_string(),
            "p" => rng.gen_range(10..40).to_string(),
            "s" => rng.gen_range(1..10).to_string(),
            "n" => match self.family {
                Family::Arithmetic => rng.gen_range(50..400),
                Family::Recursion => rng.gen_range(10..24),
                Family::Arrays | Family::Mixed => rng.gen_range(20..80),
                _ => rng.gen_range(5..30),
            }
            .to_string(),
            k if k.starts_with('w') => WORDS.choose(rng).unwrap().to_string(),
            k if k.starts_with(|c: char| c.is_ascii_uppercase()) => capitalize(WORDS.choose(rng).unwrap()) + k,
            k => NAME_STEMS.choose(rng).unwrap().to_string() + &capitalize(k),
        };
        self.chosen.insert(key.to_string(), v.clone());
        v
    }

    fn render(&mut self, template: &str) -> String {
        fill(template, &mut |k| self.value(k))
    }
}

const MODULE_PACKAGE: &str = "{\n  \"type\": \"module\"\n}\n";

/// The `index`-th program of the corpus for `seed`. Programs cycle through
/// the template families; every family appears once per 16 programs.
pub fn program(seed: u64, index: usize) -> CorpusProgram {
    let family = FAMILIES[index % FAMILIES.len()];
    let rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut v = Variant { rng, family, chosen: Default::default() };
    let mut main = v.render(PRELUDE);
    main.push_str(&v.render(family.body()));
    if family != Family::Async {
        main.push_str(&v.render(EPILOGUE));
    }
    let mut files = vec![(PathBuf::from("main.js"), main)];
    match family {
        Family::Esm => {
            files.push(("package.json".into(), MODULE_PACKAGE.into()));
            files.push(("lib/math.js".into(), v.render(ESM_MATH)));
            files.push(("lib/shapes.js".into(), v.render(ESM_SHAPES)));
            files.push(("lib/index.js".into(), v.render(ESM_INDEX)));
            files.push(("lib/strings.js".into(), v.render(ESM_STRINGS)));
        }
        Family::CommonJs => files.push(("lib.js".into(), v.render(CJS_LIB))),
        Family::Globals => {
            files.push(("package.json".into(), MODULE_PACKAGE.into()));
            files.push(("setup.js".into(), v.render(GLOBALS_SETUP)));
        }
        _ => {}
    }
    CorpusProgram { name: format!("p{index:03}_{}", family.slug()), entry: "main.js".into(), files }
}

fn write_files(root: &Path, files: &[(PathBuf, String)]) -> io::Result<()> {
    for (rel, text) in files {
        let path = root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, text)?;
    }
    Ok(())
}

/// Writes `count` programs under `root`, one directory each, and returns
/// a test case per program.
pub fn write_equivalence_corpus(root: &Path, count: usize, seed: u64) -> io::Result<Vec<TestCase>> {
    let mut cases = Vec::with_capacity(count);
    for i in 0..count {
        let p = program(seed, i);
        let dir = root.join(&p.name);
        write_files(&dir, &p.files)?;
        cases.push(TestCase::new(Path::new(&p.name).join(&p.entry)));
    }
    Ok(cases)
}

pub fn write_manifest(path: &Path, cases: &[TestCase]) -> io::Result<()> {
    let json = serde_json::to_string_pretty(cases).map_err(io::Error::other)?;
    fs::write(path, json)
}

const BENCH_HEAD: &str = "var benchChecksum = 0;\n";
const BENCH_TAIL: &str = "console.log(\"bench \" + benchChecksum);\n";

const BENCH_CHUNK: &str = r#"function @p@Accumulate(items, weight) {
  var total = 0;
  for (var index = 0; index < items.length; index++) {
    total += items[index] * weight + @k1@;
  }
  return total;
}
class @P@Inventory {
  constructor(label) {
    this.label = label;
    this.entries = [];
  }
  add(name, quantity) {
    this.entries.push({ name: name, quantity: quantity });
    return this;
  }
  get size() {
    return this.entries.length;
  }
  describe() {
    return this.label + ":" + this.entries.map(function (entry) { return entry.name + "x" + entry.quantity; }).join(",");
  }
}
function @p@Run(seed) {
  var inventory = new @P@Inventory("@w1@-@w2@");
  var names = ["@w3@", "@w4@", "@w5@"];
  for (var step = 0; step < 4; step++) {
    inventory.add(names[step % names.length], (seed + step * @k2@) % 13);
  }
  var message = inventory.describe();
  var weights = [@k1@, @k2@, @k3@].map(function (value) { return value * 2; });
  var score = @p@Accumulate(weights, seed % 7) + message.length;
  var settings = { mode: "@w1@", threshold: @k3@, enabled: score % 2 === 0 };
  if (settings.enabled && settings.threshold > 10) {
    score += settings.threshold;
  } else {
    score -= 1;
  }
  return score + inventory.size;
}
benchChecksum = (benchChecksum * 31 + @p@Run(@k1@)) % 1000000007;
"#;

/// A runnable, self-contained script of at least `target_bytes`, made of
/// independent chunks with distinct top-level names. With `minified`, each
/// chunk is minified before it counts towards the size.
pub fn bench_file(seed: u64, index: usize, target_bytes: usize, minified: bool) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(index as u64));
    let mut out = String::from(BENCH_HEAD);
    let mut chunk = 0usize;
    while out.len() + BENCH_TAIL.len() < target_bytes {
        let prefix = format!("{}{chunk}", WORDS.choose(&mut rng).unwrap());
        let ks: Vec<u32> = (0..3).map(|_| rng.gen_range(2..60)).collect();
        let words: Vec<&str> = (0..5).map(|_| *WORDS.choose(&mut rng).unwrap()).collect();
        let text = fill(BENCH_CHUNK, &mut |k| match k {
            "p" => prefix.clone(),
            "P" => capitalize(&prefix),
            "k1" => ks[0].to_string(),
            "k2" => ks[1].to_string(),
            "k3" => ks[2].to_string(),
            w => words[w[1..].parse::<usize>().unwrap() - 1].to_string(),
        });
        if minified {
            out.push_str(&minify(&text));
            out.push('\n');
        } else {
            out.push_str(&text);
        }
        chunk += 1;
    }
    out.push_str(BENCH_TAIL);
    out
}

/// Writes independent bench files of `file_bytes` each until `total_bytes`
/// is reached. Returns the written paths relative to `root`.
pub fn write_bench_corpus(
    root: &Path,
    total_bytes: usize,
    file_bytes: usize,
    seed: u64,
    minified: bool,
) -> io::Result<Vec<PathBuf>> {
    let mut written = 0usize;
    let mut paths = Vec::new();
    let mut i = 0;
    while written < total_bytes {
        let text = bench_file(seed, i, file_bytes.min(total_bytes - written).max(1), minified);
        let rel = PathBuf::from(format!("bench/m{:02}/file{i:04}.js", i % 16));
        write_files(root, &[(rel.clone(), text.clone())])?;
        written += text.len();
        paths.push(rel);
        i += 1;
    }
    Ok(paths)
}

/// One bench file per requested size, for size-class measurements.
pub fn write_sized_corpus(root: &Path, sizes: &[usize], seed: u64, minified: bool) -> io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        let text = bench_file(seed, i, size, minified);
        let mut name = String::new();
        let _ = write!(name, "sized/file{i}_{}k.js", size / 1024);
        write_files(root, &[(PathBuf::from(&name), text)])?;
        paths.push(PathBuf::from(name));
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::{parse_source, FileId};

    #[test]
    fn fill_replaces_keys_and_keeps_other_at_signs() {
        let s = fill("a@x@b@x@ c@ d@@", &mut |k| format!("<{k}>"));
        assert_eq!(s, "a<x>b<x> c@ d@@");
    }

    #[test]
    fn programs_are_deterministic_and_parse() {
        for i in 0..FAMILIES.len() * 2 {
            let p = program(3, i);
            assert_eq!(p, program(3, i));
            for (path, text) in &p.files {
                assert!(!text.contains("@out@") && !text.contains("@h@"), "{}", p.name);
                if path.extension().is_some_and(|e| e == "js") {
                    parse_source(text, FileId(0)).unwrap_or_else(|e| panic!("{} {}: {e}", p.name, path.display()));
                }
            }
        }
    }

    #[test]
    fn bench_files_reach_their_size_and_parse() {
        for minified in [false, true] {
            let f = bench_file(1, 0, 20_000, minified);
            assert!(f.len() >= 20_000 && f.len() < 22_000);
            parse_source(&f, FileId(0)).unwrap();
            assert_eq!(f, bench_file(1, 0, 20_000, minified));
            assert_ne!(f, bench_file(1, 1, 20_000, minified));
        }
    }
}
