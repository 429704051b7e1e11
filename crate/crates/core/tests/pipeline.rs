use std::fs;
use std::path::Path;

use scopeshield::pipeline::{analyze_project, obfuscate_project, ObfuscationConfig};

fn config(root: &Path) -> ObfuscationConfig {
    ObfuscationConfig { input: root.join("src"), output: root.join("dist"), threads: 2, ..Default::default() }
}

fn write(root: &Path, rel: &str, text: &str) {
    let p = root.join("src").join(rel);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(p, text).unwrap();
}

#[test]
fn rename_only_shortens_a_top_level_var() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.js", "var x=1;");
    let c = ObfuscationConfig { strings: false, prop_access: false, minify: false, ..config(dir.path()) };
    let report = obfuscate_project(&c).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("dist/a.js")).unwrap(), "var a=1;");
    assert_eq!(report.files_transformed, 1);
    assert!(!report.has_file_errors());
}

#[test]
fn empty_file_is_copied_through() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "empty.js", "");
    write(dir.path(), "main.js", "let total = 0; for (let i = 0; i < 3; i++) total += i; console.log(total);");
    let report = obfuscate_project(&config(dir.path())).unwrap();
    assert_eq!(fs::read(dir.path().join("dist/empty.js")).unwrap(), b"");
    assert!(report.copied.contains(&"empty.js".to_string()));
    assert_eq!(report.files_transformed, 1);
}

#[test]
fn syntax_error_is_reported_and_copied() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.js", "function (");
    write(dir.path(), "lib.mjs", "export function twice(value) { return value * 2 }");
    write(dir.path(), "main.mjs", "import { twice } from './lib.mjs'; console.log(twice(21));");
    let report = obfuscate_project(&config(dir.path())).unwrap();
    assert!(report.has_file_errors());
    assert_eq!(report.errors[0].path, "bad.js");
    assert_eq!(fs::read_to_string(dir.path().join("dist/bad.js")).unwrap(), "function (");
    let main = fs::read_to_string(dir.path().join("dist/main.mjs")).unwrap();
    assert!(main.contains("twice"), "imported name must keep its spelling: {main}");
    assert_eq!(report.files_transformed, 2);
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..12 {
        write(
            dir.path(),
            &format!("m{}/f{i}.js", i % 3),
            &format!("function greet{i}(name) {{ const prefix = 'hello {i} '; return prefix + name.toUpperCase() }}\nconsole.log(greet{i}('w'));"),
        );
    }
    let mut trees = Vec::new();
    for threads in [1, 3, 8] {
        let out = dir.path().join(format!("out{threads}"));
        let c = ObfuscationConfig { threads, output: out.clone(), ..config(dir.path()) };
        obfuscate_project(&c).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = walk(&out);
        files.sort();
        trees.push(files);
    }
    assert_eq!(trees[0], trees[1]);
    assert_eq!(trees[0], trees[2]);
}

fn walk(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for e in fs::read_dir(root).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(
                walk(&p).into_iter().map(|(n, b)| (format!("{}/{n}", p.file_name().unwrap().to_string_lossy()), b)),
            );
        } else {
            out.push((p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()));
        }
    }
    out
}

#[test]
fn analysis_reports_import_edges() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lib.mjs", "export const base = 10; export function add(a, b) { return a + b }");
    write(dir.path(), "main.mjs", "import { add, base } from './lib.mjs'; console.log(add(base, 1));");
    write(dir.path(), "lone.js", "console.log(1)");
    let a = analyze_project(&ObfuscationConfig { threads: 1, ..config(dir.path()) }).unwrap();
    assert_eq!(a.files, 3);
    assert_eq!(a.edges, 1);
    assert_eq!(a.cut_weight, 0);
    assert_eq!(a.markers, 2);
    assert!(a.graph_dump.contains("edge import main.mjs -> lib.mjs {add, base}"), "{}", a.graph_dump);
}

#[test]
fn missing_input_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    assert!(obfuscate_project(&config(dir.path())).is_err());
}
