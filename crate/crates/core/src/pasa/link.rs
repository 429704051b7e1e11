use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::jsparse::{FileId, FileSummary, Span};

use super::{Binding, DependencyGraph, EdgeKind, IndependenceMap, PasaError, ScopeId, ScopeTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MarkerKind {
    /// An exported binding imported by another file.
    Export,
    /// A global name read by several files or declared by a script and read elsewhere.
    ImplicitGlobal,
    /// A name imported from a module outside the project.
    External,
}

/// A name visible across files, pinned to its frozen output name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryMarker {
    pub identifier: String,
    pub kind: MarkerKind,
    /// Partition of the declaring file; `None` for globals and externals.
    pub owner: Option<usize>,
    pub consumers: BTreeSet<usize>,
    pub binding: Binding,
    pub frozen_name: Option<String>,
    /// Files that declare or use the name.
    pub files: BTreeSet<FileId>,
    /// Whether the involved files span more than one partition.
    pub crosses_partition: bool,
}

fn root_of(file: FileId) -> ScopeId {
    ScopeId { file, index: 0 }
}

/// Merges per-file results into the marker list. Markers do not depend on
/// the partition count: only `owner`, `consumers` and `crosses_partition`
/// change with it.
pub fn link_cross_file(
    summaries: &[FileSummary],
    g: &DependencyGraph,
    map: &IndependenceMap,
) -> Result<Vec<BoundaryMarker>, PasaError> {
    let by_id: BTreeMap<FileId, &FileSummary> = summaries.iter().map(|s| (s.file, s)).collect();
    let mut markers: BTreeMap<(String, Binding), BoundaryMarker> = BTreeMap::new();
    let mut add = |identifier: &str, kind: MarkerKind, binding: Binding, owner_file: Option<FileId>, user: FileId| {
        let m = markers.entry((identifier.to_string(), binding.clone())).or_insert_with(|| BoundaryMarker {
            identifier: identifier.to_string(),
            kind,
            owner: owner_file.map(|f| map.partition(f)),
            consumers: BTreeSet::new(),
            frozen_name: Some(binding.name().to_string()),
            binding,
            files: owner_file.into_iter().collect(),
            crosses_partition: false,
        });
        if Some(user) != owner_file {
            m.consumers.insert(map.partition(user));
        }
        m.files.insert(user);
    };

    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::Import) {
        let exporter = by_id[&e.to];
        for name in &e.names {
            let local = exporter
                .exports
                .iter()
                .zip(&exporter.export_locals)
                .find(|(x, _)| *x == name)
                .and_then(|(_, l)| l.clone());
            if let Some(local) = local {
                add(name, MarkerKind::Export, Binding::Local(root_of(e.to), local), Some(e.to), e.from);
            }
        }
    }

    for u in &g.unresolved {
        for name in u.names.iter().filter(|n| *n != "*" && *n != "default") {
            add(name, MarkerKind::External, Binding::Global(name.clone()), None, u.file);
        }
    }

    let mut globals: BTreeMap<&str, BTreeSet<FileId>> = BTreeMap::new();
    for e in g.edges.iter().filter(|e| e.kind == EdgeKind::ImplicitGlobal) {
        for name in &e.names {
            globals.entry(name).or_default().extend([e.from, e.to]);
        }
    }
    for (name, files) in globals {
        let writers: Vec<FileId> = files
            .iter()
            .copied()
            .filter(|f| {
                let s = by_id[f];
                !s.is_module && s.declared_globals.iter().any(|d| d == name)
            })
            .collect();
        if writers.len() > 1 {
            let has_reader = files.iter().any(|f| by_id[f].free_names.iter().any(|n| n == name));
            if has_reader {
                return Err(PasaError::ConflictingExport {
                    name: name.to_string(),
                    files: writers.iter().map(|f| g.path(*f).to_string()).collect(),
                });
            }
        }
        let (binding, owner) = match writers.as_slice() {
            [w] => (Binding::Local(root_of(*w), name.to_string()), Some(*w)),
            _ => (Binding::Global(name.to_string()), None),
        };
        for &f in &files {
            add(name, MarkerKind::ImplicitGlobal, binding.clone(), owner, f);
        }
    }

    let mut out: Vec<BoundaryMarker> = markers.into_values().collect();
    for m in &mut out {
        let parts: BTreeSet<usize> = m.files.iter().map(|f| map.partition(*f)).collect();
        m.crosses_partition = parts.len() > 1;
    }
    Ok(out)
}

/// Program-wide resolution of every occurrence: per-file resolution, with
/// global names upgraded to the script declaration a marker pins them to.
pub fn resolve_program(trees: &[ScopeTree], markers: &[BoundaryMarker]) -> BTreeMap<(FileId, Span), Binding> {
    let pinned: BTreeMap<&str, &Binding> = markers
        .iter()
        .filter(|m| m.kind == MarkerKind::ImplicitGlobal)
        .map(|m| (m.identifier.as_str(), &m.binding))
        .collect();
    let mut out = BTreeMap::new();
    for t in trees {
        for o in &t.occurrences {
            let b = match &o.binding {
                Binding::Global(n) => pinned.get(n.as_str()).map(|b| (*b).clone()).unwrap_or_else(|| o.binding.clone()),
                b => b.clone(),
            };
            out.insert((t.file, o.span), b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::parse_source;
    use crate::pasa::{build_dependency_graph, build_scope_tree, partition_graph, Allowlist};

    fn setup(files: &[(&str, &str)], k: usize) -> Result<(Vec<ScopeTree>, Vec<BoundaryMarker>), PasaError> {
        let mut trees = Vec::new();
        let mut sums = Vec::new();
        for (i, (_, src)) in files.iter().enumerate() {
            let (prog, sum) = parse_source(src, FileId(i as u32)).unwrap();
            trees.push(build_scope_tree(&prog, FileId(i as u32)));
            sums.push(sum);
        }
        let paths: Vec<String> = files.iter().map(|(p, _)| p.to_string()).collect();
        let g = build_dependency_graph(&sums, &paths, &Allowlist::default());
        let map = partition_graph(&g, k);
        Ok((trees, link_cross_file(&sums, &g, &map)?))
    }

    #[test]
    fn export_consumed_elsewhere() {
        let files = [("a.js", "import {f} from './b.js'; f()"), ("b.js", "export function f(){}")];
        let (_, ms) = setup(&files, 2).unwrap();
        assert_eq!(ms.len(), 1);
        let m = &ms[0];
        assert_eq!(m.identifier, "f");
        assert_eq!(m.binding, Binding::Local(root_of(FileId(1)), "f".into()));
        assert_eq!(m.frozen_name.as_deref(), Some("f"));
        assert_eq!(m.consumers.len(), 1);
        assert!(m.crosses_partition);
    }

    #[test]
    fn shared_global_is_frozen_under_its_name() {
        let files = [("a.js", "GameGlobal.a = 1"), ("b.js", "GameGlobal.b = 2")];
        let (_, ms) = setup(&files, 2).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].binding, Binding::Global("GameGlobal".into()));
        assert_eq!(ms[0].frozen_name.as_deref(), Some("GameGlobal"));
    }

    #[test]
    fn independent_files_have_no_markers() {
        let (_, ms) = setup(&[("a.js", "var x = 1"), ("b.js", "var y = 2")], 2).unwrap();
        assert!(ms.is_empty());
    }

    #[test]
    fn ambiguous_script_global_is_rejected() {
        let files = [("a.js", "var cfg = 1"), ("b.js", "var cfg = 2"), ("c.js", "console.log(cfg)")];
        assert!(matches!(setup(&files, 2), Err(PasaError::ConflictingExport { .. })));
    }

    #[test]
    fn resolution_independent_of_partition_count() {
        let files = [
            ("a.js", "var shared = 1; function f(){ return shared + GameGlobal }"),
            ("b.js", "function g(){ return shared * 2 }"),
            ("c.js", "import {h} from './d.js'; GameGlobal.v = h()"),
            ("d.js", "export function h(){ return 3 }"),
        ];
        let (t1, m1) = setup(&files, 1).unwrap();
        let (t4, m4) = setup(&files, 4).unwrap();
        assert_eq!(resolve_program(&t1, &m1), resolve_program(&t4, &m4));
        let strip =
            |ms: &[BoundaryMarker]| ms.iter().map(|m| (m.identifier.clone(), m.binding.clone())).collect::<Vec<_>>();
        assert_eq!(strip(&m1), strip(&m4));
        let r = resolve_program(&t4, &m4);
        let in_b = r.iter().find(|((f, _), b)| *f == FileId(1) && b.name() == "shared").unwrap();
        assert_eq!(in_b.1, &Binding::Local(root_of(FileId(0)), "shared".into()));
    }
}
