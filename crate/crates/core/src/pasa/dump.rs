use std::fmt::Write;

use super::{DependencyGraph, EdgeKind, IndependenceMap, ScopeKind, ScopeTree};

fn kind_name(k: ScopeKind) -> &'static str {
    match k {
        ScopeKind::Global => "global",
        ScopeKind::Module => "module",
        ScopeKind::Function => "function",
        ScopeKind::Block => "block",
    }
}

/// Indented scope tree, one scope per line:
/// `<indent><kind> <id> [decl, ...]` followed by ` dynamic` when flagged.
pub fn dump_scopes(path: &str, tree: &ScopeTree) -> String {
    let mut out = format!("# {path}\n");
    let mut stack = vec![(tree.root, 0usize)];
    while let Some((id, depth)) = stack.pop() {
        let n = &tree.nodes[id.index as usize];
        let decls: Vec<&str> = n.declarations.iter().map(|d| d.name.as_str()).collect();
        let _ = write!(out, "{}{} {} [{}]", "  ".repeat(depth), kind_name(n.kind), id, decls.join(", "));
        if n.is_dynamic {
            out.push_str(" dynamic");
        }
        out.push('\n');
        for c in n.children.iter().rev() {
            stack.push((*c, depth + 1));
        }
    }
    out
}

/// Dependency graph and partition summary.
pub fn dump_graph(g: &DependencyGraph, map: &IndependenceMap) -> String {
    let mut out = format!("# partitions k={} cut_weight={}\n", map.k, map.cut_weight);
    for f in &g.files {
        let _ = writeln!(out, "file {} {} size={} partition={}", f.id.0, f.path, f.size, map.partition(f.id));
    }
    for e in &g.edges {
        let kind = match e.kind {
            EdgeKind::Import => "import",
            EdgeKind::ImplicitGlobal => "global",
        };
        let names: Vec<&str> = e.names.iter().map(String::as_str).collect();
        let _ = writeln!(out, "edge {} {} -> {} {{{}}}", kind, g.path(e.from), g.path(e.to), names.join(", "));
    }
    for u in &g.unresolved {
        let _ = writeln!(out, "unresolved {} \"{}\"", g.path(u.file), u.source);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::{parse_source, FileId};
    use crate::pasa::build_scope_tree;

    #[test]
    fn indented_scope_dump() {
        let (p, _) = parse_source("function f(a){ { let b; } eval(a) }", FileId(2)).unwrap();
        let t = build_scope_tree(&p, FileId(2));
        let d = dump_scopes("x.js", &t);
        assert_eq!(d, "# x.js\nmodule 2:0 [f] dynamic\n  function 2:1 [a] dynamic\n    block 2:2 [b]\n");
    }
}
