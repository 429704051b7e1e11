//! Parallel-aware scope analysis.
//!
//! Per file: a [`ScopeTree`] and a [`FileSummary`]. Across files: a
//! [`DependencyGraph`], its partitioning into worker groups, and the
//! [`BoundaryMarker`]s that pin every cross-file-visible name.

mod allowlist;
mod dump;
mod graph;
mod link;
mod partition;
mod scope;

use thiserror::Error;

use crate::jsparse::ast::{Program, Stmt};
use crate::jsparse::{FileId, FileSummary, ImportRecord};

pub use allowlist::{Allowlist, DEFAULT_HOST_NAMES};
pub use dump::{dump_graph, dump_scopes};
pub use graph::{build_dependency_graph, DependencyEdge, DependencyGraph, EdgeKind, FileNode, UnresolvedImport};
pub use link::{link_cross_file, resolve_program, BoundaryMarker, MarkerKind};
pub use partition::{partition_graph, IndependenceMap};
pub use scope::{
    build_scope_tree, Binding, DeclKind, Declaration, Occurrence, OccurrenceKind, ScopeId, ScopeKind, ScopeNode,
    ScopeTree, ScopeTreeBuilder,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PasaError {
    #[error("unknown scope {0}")]
    UnknownScope(ScopeId),
    #[error("{file}: import \"{specifier}\" matches no input file")]
    UnresolvedImport { file: FileId, specifier: String },
    #[error("global `{name}` is declared by several files ({files:?}) and read by others; its owner is ambiguous")]
    ConflictingExport { name: String, files: Vec<String> },
}

/// Extracts the cross-file facts of one file from its AST and scope tree.
pub fn summarize(program: &Program, tree: &ScopeTree, byte_len: usize) -> FileSummary {
    let mut globals: Vec<&Declaration> = tree.module_declarations().collect();
    globals.sort_by_key(|d| d.site.start);
    let imports = program
        .body
        .iter()
        .filter_map(|s| match s {
            Stmt::Import(i) => Some(ImportRecord {
                source: i.source.value_string(),
                names: i.specifiers.iter().map(|s| s.imported_name().to_string()).collect(),
            }),
            _ => None,
        })
        .collect();
    FileSummary {
        file: tree.file,
        declared_globals: globals.iter().map(|d| d.name.clone()).collect(),
        free_names: tree.free_names().into_iter().map(str::to_string).collect(),
        imports,
        exports: tree.exports.iter().map(|(e, _)| e.clone()).collect(),
        export_locals: tree.exports.iter().map(|(_, l)| l.clone()).collect(),
        dynamic_sites: tree.dynamic_sites.clone(),
        is_module: program.is_module,
        byte_len,
    }
}

/// Independently-renameable flag per scope (indexed like `tree.nodes`):
/// false when the scope contains a dynamic site, lies inside the scope of one, or declares a binding that
/// is visible across files.
pub fn independent_scopes(tree: &ScopeTree, markers: &[BoundaryMarker]) -> Vec<bool> {
    let mut flags: Vec<bool> = tree.nodes.iter().map(|n| !n.is_dynamic).collect();
    for site in &tree.dynamic_sites {
        // Everything inside the scope holding a dynamic site is contained in it.
        let mut stack = vec![tree.scope_at(*site)];
        while let Some(c) = stack.pop() {
            flags[c.index as usize] = false;
            stack.extend(tree.nodes[c.index as usize].children.iter().copied());
        }
    }
    for m in markers {
        if let Some(s) = m.binding.scope() {
            if s.file == tree.file {
                flags[s.index as usize] = false;
            }
        }
    }
    for n in &tree.nodes {
        if n.declarations.iter().any(|d| d.exported) {
            flags[n.id.index as usize] = false;
        }
    }
    flags
}
