use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::jsparse::{FileId, FileSummary};

use super::Allowlist;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileNode {
    pub id: FileId,
    /// Project-relative path with `/` separators.
    pub path: String,
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    Import,
    ImplicitGlobal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyEdge {
    /// Importer, or the lower-id file of an implicit-global pair.
    pub from: FileId,
    /// Exporter, or the higher-id file of an implicit-global pair.
    pub to: FileId,
    pub names: BTreeSet<String>,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnresolvedImport {
    pub file: FileId,
    pub source: String,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    pub files: Vec<FileNode>,
    pub edges: Vec<DependencyEdge>,
    /// Imports treated as external; their names are frozen.
    pub unresolved: Vec<UnresolvedImport>,
    /// Import edges resolved per (importer, source text).
    pub resolved_sources: BTreeMap<(FileId, String), FileId>,
}

impl DependencyGraph {
    pub fn path(&self, id: FileId) -> &str {
        self.files.iter().find(|f| f.id == id).map(|f| f.path.as_str()).unwrap_or("")
    }

    pub fn size(&self, id: FileId) -> usize {
        self.files.iter().find(|f| f.id == id).map(|f| f.size).unwrap_or(0)
    }
}

/// Joins a relative import specifier onto the importer's directory.
fn join_relative(importer: &str, spec: &str) -> Option<String> {
    if !(spec.starts_with("./") || spec.starts_with("../") || spec.starts_with('/')) {
        return None;
    }
    let mut parts: Vec<&str> = if spec.starts_with('/') {
        Vec::new()
    } else {
        let mut p: Vec<&str> = importer.split('/').collect();
        p.pop();
        p
    };
    for seg in spec.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                parts.pop()?;
            }
            s => parts.push(s),
        }
    }
    Some(parts.join("/"))
}

/// Candidate file paths an import specifier may name, in lookup order.
fn candidates(joined: &str) -> [String; 5] {
    [
        joined.to_string(),
        format!("{joined}.js"),
        format!("{joined}.mjs"),
        format!("{joined}.cjs"),
        format!("{joined}/index.js"),
    ]
}

/// Builds the file dependency graph. `paths[i]` is the project-relative
/// path of `summaries[i]`. Names on the allowlist never create edges.
pub fn build_dependency_graph(summaries: &[FileSummary], paths: &[String], allowlist: &Allowlist) -> DependencyGraph {
    assert_eq!(summaries.len(), paths.len());
    let by_path: HashMap<&str, FileId> = summaries.iter().zip(paths).map(|(s, p)| (p.as_str(), s.file)).collect();
    let mut g = DependencyGraph {
        files: summaries
            .iter()
            .zip(paths)
            .map(|(s, p)| FileNode { id: s.file, path: p.clone(), size: s.byte_len })
            .collect(),
        ..Default::default()
    };

    let mut import_edges: BTreeMap<(FileId, FileId), BTreeSet<String>> = BTreeMap::new();
    for (s, path) in summaries.iter().zip(paths) {
        for rec in &s.imports {
            let target = join_relative(path, &rec.source)
                .and_then(|j| candidates(&j).into_iter().find_map(|c| by_path.get(c.as_str()).copied()));
            match target {
                Some(t) => {
                    g.resolved_sources.insert((s.file, rec.source.clone()), t);
                    if !rec.names.is_empty() && t != s.file {
                        import_edges.entry((s.file, t)).or_default().extend(rec.names.iter().cloned());
                    }
                }
                None => g.unresolved.push(UnresolvedImport {
                    file: s.file,
                    source: rec.source.clone(),
                    names: rec.names.clone(),
                }),
            }
        }
    }
    for ((from, to), names) in import_edges {
        g.edges.push(DependencyEdge { from, to, names, kind: EdgeKind::Import });
    }

    // Implicit globals: a free name shared by two files, or a free name in
    // one file that a non-module file declares at top level.
    let mut readers: BTreeMap<&str, Vec<FileId>> = BTreeMap::new();
    let mut writers: BTreeMap<&str, Vec<FileId>> = BTreeMap::new();
    for s in summaries {
        for n in &s.free_names {
            if !allowlist.contains(n) {
                readers.entry(n).or_default().push(s.file);
            }
        }
        if !s.is_module {
            for n in &s.declared_globals {
                if !allowlist.contains(n) {
                    writers.entry(n).or_default().push(s.file);
                }
            }
        }
    }
    let mut pairs: BTreeMap<(FileId, FileId), BTreeSet<String>> = BTreeMap::new();
    for (name, rs) in &readers {
        let ws = writers.get(name).map(Vec::as_slice).unwrap_or(&[]);
        let mut add = |a: FileId, b: FileId| {
            if a != b {
                pairs.entry((a.min(b), a.max(b))).or_default().insert(name.to_string());
            }
        };
        for (i, &a) in rs.iter().enumerate() {
            for &b in &rs[i + 1..] {
                add(a, b);
            }
            for &w in ws {
                add(a, w);
            }
        }
    }
    for ((from, to), names) in pairs {
        g.edges.push(DependencyEdge { from, to, names, kind: EdgeKind::ImplicitGlobal });
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::parse_source;

    fn summaries(files: &[(&str, &str)]) -> (Vec<FileSummary>, Vec<String>) {
        let s = files.iter().enumerate().map(|(i, (_, src))| parse_source(src, FileId(i as u32)).unwrap().1).collect();
        (s, files.iter().map(|(p, _)| p.to_string()).collect())
    }

    #[test]
    fn import_edge() {
        let (s, p) = summaries(&[("a.js", "import {f} from './b.js'; f()"), ("b.js", "export function f(){}")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        assert_eq!(g.edges.len(), 1);
        let e = &g.edges[0];
        assert_eq!((e.from, e.to, e.kind), (FileId(0), FileId(1), EdgeKind::Import));
        assert_eq!(e.names.iter().collect::<Vec<_>>(), vec!["f"]);
    }

    #[test]
    fn extensionless_and_parent_paths_resolve() {
        let (s, p) =
            summaries(&[("lib/util.js", "export const k = 1"), ("app/main.js", "import {k} from '../lib/util'; k")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        assert_eq!(g.edges.len(), 1);
        assert!(g.unresolved.is_empty());
    }

    #[test]
    fn shared_undeclared_global() {
        let (s, p) =
            summaries(&[("a.js", "GameGlobal.x = 1; console.log(1)"), ("b.js", "GameGlobal.y = 2; console.log(2)")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        // Oracle: pairwise intersection of free names minus host names.
        let a: BTreeSet<_> = s[0].free_names.iter().cloned().collect();
        let b: BTreeSet<_> = s[1].free_names.iter().cloned().collect();
        let expected: BTreeSet<String> =
            a.intersection(&b).filter(|n| !Allowlist::default().contains(n)).cloned().collect();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].kind, EdgeKind::ImplicitGlobal);
        assert_eq!(g.edges[0].names, expected);
        assert_eq!(expected.into_iter().collect::<Vec<_>>(), vec!["GameGlobal".to_string()]);
    }

    #[test]
    fn independent_files_have_no_edges() {
        let (s, p) = summaries(&[("a.js", "var x = 1; console.log(x)"), ("b.js", "var x = 2; console.log(x)")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        assert!(g.edges.is_empty());
    }

    #[test]
    fn unresolved_import_recorded() {
        let (s, p) = summaries(&[("a.js", "import {z} from './missing.js'; import fs from 'fs'; z(fs)")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        assert_eq!(g.unresolved.len(), 2);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn script_declaration_read_elsewhere() {
        let (s, p) = summaries(&[("a.js", "var shared = 1;"), ("b.js", "console.log(shared)")]);
        let g = build_dependency_graph(&s, &p, &Allowlist::default());
        assert_eq!(g.edges.len(), 1);
        assert!(g.edges[0].names.contains("shared"));
    }
}
