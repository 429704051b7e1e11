use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::jsparse::ast::{Program, Stmt};
use crate::jsparse::{FileId, Span};
use crate::pasa::{Binding, BoundaryMarker, DeclKind, ScopeId, ScopeTree};

/// Units smaller than this are merged with a neighbour.
pub const MIN_UNIT_BYTES: usize = 4096;

/// A contiguous run of top-level statements plus the names it reaches
/// outside itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentUnit {
    pub id: usize,
    pub file: FileId,
    pub span: Span,
    /// Boundary markers referenced from the unit.
    pub markers: Vec<String>,
    /// Module-scope bindings of the same file declared in another unit.
    pub module_refs: Vec<String>,
    /// Unresolved names that no marker pins (host globals).
    pub globals: Vec<String>,
    /// Scopes lying entirely inside the unit.
    pub scopes: Vec<ScopeId>,
}

/// Cross-file facts a unit planner needs about one file.
#[derive(Debug, Clone, Default)]
pub struct LinkView<'a> {
    pub markers: &'a [BoundaryMarker],
    /// Import specifier text to the file it resolved to.
    pub resolved: BTreeMap<String, FileId>,
}

/// For every import local of the file, the marker identifier it reaches.
fn import_markers(program: &Program, file: FileId, link: &LinkView<'_>) -> HashMap<String, String> {
    let mut out = HashMap::new();
    for s in &program.body {
        let Stmt::Import(i) = s else { continue };
        let source = i.source.value_string();
        let target = link.resolved.get(&source).copied();
        for spec in &i.specifiers {
            let imported = spec.imported_name();
            let hit = link.markers.iter().find(|m| {
                m.identifier == imported
                    && match (target, m.binding.scope()) {
                        (Some(t), Some(s)) => s.file == t,
                        (None, None) => true,
                        _ => false,
                    }
                    && m.files.contains(&file)
            });
            if let Some(m) = hit {
                out.insert(spec.local().name.clone(), m.identifier.clone());
            }
        }
    }
    out
}

/// Splits a file into units covering `[0, len)` exactly.
pub fn plan_units(
    file: FileId,
    len: usize,
    program: &Program,
    tree: &ScopeTree,
    link: &LinkView<'_>,
) -> Vec<IndependentUnit> {
    if program.body.is_empty() || len == 0 {
        return Vec::new();
    }
    let root = tree.root;
    let pinned: BTreeSet<&str> = link
        .markers
        .iter()
        .filter(|m| m.binding.scope() == Some(root) || m.binding.scope().is_none())
        .map(|m| m.binding.name())
        .collect();

    // Statement groups: a new group starts at each statement declaring a
    // marker-pinned module binding.
    let declares_pinned = |s: &Stmt| {
        let span = s.span();
        tree.nodes[root.index as usize]
            .declarations
            .iter()
            .any(|d| span.contains(d.site) && pinned.contains(d.name.as_str()))
    };
    let mut starts: Vec<usize> = vec![0];
    for s in program.body.iter().skip(1) {
        if declares_pinned(s) {
            starts.push(s.span().start);
        }
    }
    let mut spans: Vec<Span> =
        starts.iter().zip(starts.iter().skip(1).chain(std::iter::once(&len))).map(|(&a, &b)| Span::new(a, b)).collect();

    // Coalesce forward, then fold a short tail into its predecessor.
    let mut merged: Vec<Span> = Vec::new();
    for s in spans.drain(..) {
        match merged.last_mut() {
            Some(last) if last.len() < MIN_UNIT_BYTES => last.end = s.end,
            _ => merged.push(s),
        }
    }
    if merged.len() > 1 && merged.last().unwrap().len() < MIN_UNIT_BYTES {
        let tail = merged.pop().unwrap();
        merged.last_mut().unwrap().end = tail.end;
    }

    let import_of = import_markers(program, file, link);
    let marker_names: BTreeSet<&str> = link.markers.iter().map(|m| m.identifier.as_str()).collect();
    let mut units: Vec<IndependentUnit> = merged
        .iter()
        .enumerate()
        .map(|(id, &span)| IndependentUnit {
            id,
            file,
            span,
            markers: Vec::new(),
            module_refs: Vec::new(),
            globals: Vec::new(),
            scopes: tree.nodes.iter().filter(|n| n.parent.is_some() && span.contains(n.span)).map(|n| n.id).collect(),
        })
        .collect();
    let mut sets: Vec<[BTreeSet<String>; 3]> = vec![Default::default(); units.len()];
    for o in &tree.occurrences {
        let u = merged.partition_point(|s| s.end <= o.span.start);
        if u >= units.len() {
            continue;
        }
        let span = merged[u];
        match &o.binding {
            Binding::Global(n) => {
                if marker_names.contains(n.as_str()) {
                    sets[u][0].insert(n.clone());
                } else {
                    sets[u][2].insert(n.clone());
                }
            }
            Binding::Local(s, n) if *s == root => {
                let decl = tree.declaration(&o.binding);
                if decl.map(|d| d.kind) == Some(DeclKind::Import) {
                    if let Some(m) = import_of.get(n) {
                        sets[u][0].insert(m.clone());
                        continue;
                    }
                }
                if pinned.contains(n.as_str()) && link.markers.iter().any(|m| m.binding == o.binding) {
                    sets[u][0].insert(n.clone());
                } else if decl.is_some_and(|d| !span.contains(d.site)) {
                    sets[u][1].insert(n.clone());
                }
            }
            Binding::Local(..) => {}
        }
    }
    for (unit, [m, r, g]) in units.iter_mut().zip(sets) {
        unit.markers = m.into_iter().collect();
        unit.module_refs = r.into_iter().collect();
        unit.globals = g.into_iter().collect();
    }
    units
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::parse_source;
    use crate::pasa::{build_dependency_graph, build_scope_tree, link_cross_file, partition_graph, Allowlist};

    #[test]
    fn single_self_contained_file() {
        let src = "function f(){ return 1 } f()";
        let (p, _) = parse_source(src, FileId(0)).unwrap();
        let t = build_scope_tree(&p, FileId(0));
        let u = plan_units(FileId(0), src.len(), &p, &t, &LinkView::default());
        assert_eq!(u.len(), 1);
        assert_eq!(u[0].span, Span::new(0, src.len()));
        assert!(u[0].markers.is_empty() && u[0].module_refs.is_empty() && u[0].globals.is_empty());
    }

    #[test]
    fn empty_file_has_no_units() {
        let (p, _) = parse_source("", FileId(0)).unwrap();
        let t = build_scope_tree(&p, FileId(0));
        assert!(plan_units(FileId(0), 0, &p, &t, &LinkView::default()).is_empty());
    }

    #[test]
    fn import_marker_in_metadata() {
        let a = "import {f} from './b.js'; function g(){ return f() } function h(){ return g() }";
        let b = "export function f(){ return 2 }";
        let (pa, sa) = parse_source(a, FileId(0)).unwrap();
        let (_, sb) = parse_source(b, FileId(1)).unwrap();
        let sums = vec![sa, sb];
        let g = build_dependency_graph(&sums, &["a.js".into(), "b.js".into()], &Allowlist::default());
        let map = partition_graph(&g, 2);
        let markers = link_cross_file(&sums, &g, &map).unwrap();
        let link = LinkView {
            markers: &markers,
            resolved: g
                .resolved_sources
                .iter()
                .filter(|((f, _), _)| *f == FileId(0))
                .map(|((_, s), t)| (s.clone(), *t))
                .collect(),
        };
        let t = build_scope_tree(&pa, FileId(0));
        let units = plan_units(FileId(0), a.len(), &pa, &t, &link);
        assert_eq!(units.len(), 1);
        assert_eq!(units[0].markers, vec!["f".to_string()]);
        assert!(units[0].globals.is_empty());
    }

    #[test]
    fn large_files_split_and_cover() {
        let mut src = String::new();
        for i in 0..200 {
            src.push_str(&format!(
                "function f{i}(a, b) {{ var total = a + b * {i}; return total + f{}(a, b); }}\n",
                i.max(1) - 1
            ));
        }
        let (p, _) = parse_source(&src, FileId(0)).unwrap();
        let t = build_scope_tree(&p, FileId(0));
        // Pin every third function so boundaries exist.
        let markers: Vec<BoundaryMarker> = (0..200)
            .step_by(3)
            .map(|i| BoundaryMarker {
                identifier: format!("f{i}"),
                kind: crate::pasa::MarkerKind::Export,
                owner: Some(0),
                consumers: BTreeSet::new(),
                binding: Binding::Local(t.root, format!("f{i}")),
                frozen_name: Some(format!("f{i}")),
                files: [FileId(0)].into_iter().collect(),
                crosses_partition: false,
            })
            .collect();
        let link = LinkView { markers: &markers, resolved: BTreeMap::new() };
        let units = plan_units(FileId(0), src.len(), &p, &t, &link);
        assert!(units.len() > 1);
        assert_eq!(units[0].span.start, 0);
        assert_eq!(units.last().unwrap().span.end, src.len());
        for w in units.windows(2) {
            assert_eq!(w[0].span.end, w[1].span.start);
        }
        assert!(units.iter().all(|u| u.span.len() >= MIN_UNIT_BYTES));
        // Oracle: every reference resolves inside its unit or is listed.
        for o in &t.occurrences {
            let u = units.iter().find(|u| u.span.contains(o.span)).unwrap();
            if let Binding::Local(s, n) = &o.binding {
                if *s == t.root {
                    let d = t.declaration(&o.binding).unwrap();
                    assert!(
                        u.span.contains(d.site) || u.markers.contains(n) || u.module_refs.contains(n),
                        "{n} in unit {}",
                        u.id
                    );
                }
            }
        }
    }
}
