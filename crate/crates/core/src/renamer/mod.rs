//! Scope-aware shortest-name renaming with an executable safety checker.
//!
//! Scopes are visited parents first. Each scope restarts at the front of
//! the name pool and takes the first names that are neither used by a
//! sibling declaration nor forbidden. A name is forbidden in scope `s` when
//! a binding from outside `s` that is referenced anywhere inside `s`
//! already carries it; taking it would capture that reference.

mod pool;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsparse::{FileId, Patch, Span};
use crate::pasa::{Binding, BoundaryMarker, DeclKind, OccurrenceKind, ScopeId, ScopeTree};

pub use pool::{base26, is_reserved, pool_iter, pool_name, RESERVED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("scope {scope} visited before ancestor binding {binding} was renamed")]
    OrderViolation { scope: ScopeId, binding: Binding },
    #[error("binding {binding} renamed to both `{first}` and `{second}`")]
    MarkerConflict { binding: Binding, first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenameEntry {
    pub name: String,
    pub usage: u32,
}

/// Binding to output name. Bindings absent from the map keep their name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenameMap {
    pub entries: BTreeMap<Binding, RenameEntry>,
}

impl RenameMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, binding: Binding, name: impl Into<String>, usage: u32) {
        self.entries.insert(binding, RenameEntry { name: name.into(), usage });
    }

    pub fn get(&self, binding: &Binding) -> Option<&str> {
        self.entries.get(binding).map(|e| e.name.as_str())
    }

    /// Output name of `binding`: its entry, or its original name.
    pub fn name_of<'a>(&'a self, binding: &'a Binding) -> &'a str {
        self.get(binding).unwrap_or(binding.name())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Line-oriented dump: `scopeId<TAB>original<TAB>renamed`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (b, e) in &self.entries {
            let scope = b.scope().map(|s| s.to_string()).unwrap_or_else(|| "global".into());
            let _ = writeln!(out, "{}\t{}\t{}", scope, b.name(), e.name);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RenameContext {
    /// Names pinned by boundary markers; no scope may take them.
    pub marker_names: BTreeSet<String>,
    /// Bindings pinned by boundary markers.
    pub frozen: HashSet<Binding>,
    /// Extra names the module scope may not take (program-wide globals).
    pub module_forbidden: BTreeSet<String>,
    /// Forbid names of outer bindings referenced anywhere below a scope,
    /// rather than only those referenced directly in it.
    pub tighten: bool,
    /// When false only transform-introduced bindings are renamed.
    pub rename_locals: bool,
}

impl Default for RenameContext {
    fn default() -> Self {
        RenameContext {
            marker_names: BTreeSet::new(),
            frozen: HashSet::new(),
            module_forbidden: BTreeSet::new(),
            tighten: true,
            rename_locals: true,
        }
    }
}

impl RenameContext {
    pub fn from_markers(markers: &[BoundaryMarker]) -> Self {
        let mut ctx = RenameContext::default();
        for m in markers {
            if let Some(n) = &m.frozen_name {
                ctx.marker_names.insert(n.clone());
            }
            ctx.frozen.insert(m.binding.clone());
        }
        ctx
    }
}

/// Per-scope facts derived once per tree, indexed like `tree.nodes`.
struct ScopeFacts {
    /// Outside bindings referenced in the scope's subtree.
    outward: Vec<BTreeSet<Binding>>,
    /// Outside bindings referenced directly in the scope.
    direct: Vec<BTreeSet<Binding>>,
    /// Frozen declaration names in proper descendants.
    frozen_below: Vec<BTreeSet<String>>,
}

fn is_frozen(tree: &ScopeTree, s: ScopeId, d: &crate::pasa::Declaration, ctx: &RenameContext) -> bool {
    if d.kind == DeclKind::Synthetic {
        return false;
    }
    !ctx.rename_locals
        || tree.nodes[s.index as usize].is_dynamic
        || d.exported
        || d.kind == DeclKind::Import
        || ctx.frozen.contains(&Binding::Local(s, d.name.clone()))
}

fn scope_facts(tree: &ScopeTree, ctx: &RenameContext) -> ScopeFacts {
    let n = tree.nodes.len();
    let mut direct: Vec<BTreeSet<Binding>> = vec![BTreeSet::new(); n];
    for o in &tree.occurrences {
        if o.binding.scope() != Some(o.scope) {
            direct[o.scope.index as usize].insert(o.binding.clone());
        }
    }
    let mut outward = direct.clone();
    let mut frozen_below: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n];
    // Children always have larger indices than their parents.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tree.depth(tree.nodes[i].id)));
    for i in order {
        let node = &tree.nodes[i];
        let Some(p) = node.parent else { continue };
        let p = p.index as usize;
        let up: Vec<Binding> = outward[i].iter().filter(|b| b.scope() != Some(tree.nodes[p].id)).cloned().collect();
        outward[p].extend(up);
        let mut names: Vec<String> = frozen_below[i].iter().cloned().collect();
        names.extend(node.declarations.iter().filter(|d| is_frozen(tree, node.id, d, ctx)).map(|d| d.name.clone()));
        frozen_below[p].extend(names);
    }
    ScopeFacts { outward, direct, frozen_below }
}

fn forbidden_with(
    s: ScopeId,
    state: &RenameMap,
    tree: &ScopeTree,
    facts: &ScopeFacts,
    ctx: &RenameContext,
) -> Result<BTreeSet<String>, RenameError> {
    let i = s.index as usize;
    let refs = if ctx.tighten { &facts.outward[i] } else { &facts.direct[i] };
    let mut out = ctx.marker_names.clone();
    for b in refs {
        match b {
            Binding::Global(n) => {
                out.insert(n.clone());
            }
            Binding::Local(..) => match state.get(b) {
                Some(n) => {
                    out.insert(n.to_string());
                }
                None => return Err(RenameError::OrderViolation { scope: s, binding: b.clone() }),
            },
        }
    }
    if s == tree.root {
        out.extend(ctx.module_forbidden.iter().cloned());
    }
    Ok(out)
}

/// Names scope `s` may not assign, given the renaming of its ancestors.
pub fn forbidden_set(
    s: ScopeId,
    state: &RenameMap,
    tree: &ScopeTree,
    ctx: &RenameContext,
) -> Result<BTreeSet<String>, RenameError> {
    forbidden_with(s, state, tree, &scope_facts(tree, ctx), ctx)
}

/// Renames every declaration of `scopes`, which must list ancestors first.
pub fn rename_partition(scopes: &[ScopeId], tree: &ScopeTree, ctx: &RenameContext) -> Result<RenameMap, RenameError> {
    let facts = scope_facts(tree, ctx);
    let mut map = RenameMap::new();
    for &s in scopes {
        let node = &tree.nodes[s.index as usize];
        let mut blocked = forbidden_with(s, &map, tree, &facts, ctx)?;
        blocked.extend(facts.frozen_below[s.index as usize].iter().cloned());
        let mut used: HashSet<String> = HashSet::new();
        for d in node.declarations.iter().filter(|d| is_frozen(tree, s, d, ctx)) {
            used.insert(d.name.clone());
            map.insert(Binding::Local(s, d.name.clone()), d.name.clone(), d.usage);
        }
        let mut names = pool_iter(|n| blocked.contains(n) || used.contains(n));
        for d in node.declarations.iter().filter(|d| !is_frozen(tree, s, d, ctx)) {
            // `used` only grows with names the iterator has already passed.
            let name = names.next().unwrap();
            map.insert(Binding::Local(s, d.name.clone()), name, d.usage);
        }
    }
    Ok(map)
}

/// Renames a whole file tree.
pub fn rename_tree(tree: &ScopeTree, ctx: &RenameContext) -> Result<RenameMap, RenameError> {
    rename_partition(&tree.topological_order(), tree, ctx)
}

/// Unions per-partition maps, pinning every marker binding to its frozen
/// name.
pub fn merge_maps(maps: Vec<RenameMap>, markers: &[BoundaryMarker]) -> Result<RenameMap, RenameError> {
    let mut out = RenameMap::new();
    for m in maps {
        for (b, e) in m.entries {
            if let Some(prev) = out.entries.get(&b) {
                if prev.name != e.name {
                    return Err(RenameError::MarkerConflict { binding: b, first: prev.name.clone(), second: e.name });
                }
                continue;
            }
            out.entries.insert(b, e);
        }
    }
    for m in markers {
        let Some(frozen) = &m.frozen_name else { continue };
        if let Some(e) = out.entries.get(&m.binding) {
            if &e.name != frozen {
                return Err(RenameError::MarkerConflict {
                    binding: m.binding.clone(),
                    first: frozen.clone(),
                    second: e.name.clone(),
                });
            }
        } else if m.binding.scope().is_some() {
            out.insert(m.binding.clone(), frozen.clone(), 0);
        }
    }
    Ok(out)
}

/// Σ |name| × usage over all entries.
pub fn cost(map: &RenameMap) -> u64 {
    map.entries.values().map(|e| e.name.len() as u64 * e.usage as u64).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub file: FileId,
    pub span: Span,
    pub original: String,
    pub renamed: String,
    pub expected: Binding,
    /// Binding the renamed occurrence actually reaches; `None` when two
    /// declarations of one scope collide on the renamed name.
    pub actual: Option<Binding>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SafetyVerdict {
    pub violations: Vec<Violation>,
}

impl SafetyVerdict {
    pub fn is_safe(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-resolves every occurrence under the renamed scope structure and
/// reports each one that no longer reaches the image of its original
/// binding.
pub fn check_safety(trees: &[ScopeTree], map: &RenameMap) -> SafetyVerdict {
    let mut verdict = SafetyVerdict::default();
    for tree in trees {
        // Renamed declarations per scope; `None` marks a collision.
        let mut renamed: Vec<HashMap<&str, Option<Binding>>> = vec![HashMap::new(); tree.nodes.len()];
        for node in &tree.nodes {
            for d in &node.declarations {
                let b = Binding::Local(node.id, d.name.clone());
                let new = map.get(&b).unwrap_or(d.name.as_str());
                let slot = renamed[node.id.index as usize].entry(new).or_insert_with(|| Some(b.clone()));
                if slot.as_ref() != Some(&b) {
                    *slot = None;
                }
            }
        }
        for o in &tree.occurrences {
            let new = map.name_of(&o.binding);
            let mut actual = Some(Binding::Global(new.to_string()));
            for s in tree.chain(o.scope) {
                if let Some(hit) = renamed[s.index as usize].get(new) {
                    actual = hit.clone();
                    break;
                }
            }
            let expected_image = match &o.binding {
                Binding::Global(n) => Binding::Global(n.clone()),
                b => b.clone(),
            };
            let ok = match (&actual, &expected_image) {
                (Some(Binding::Global(a)), Binding::Global(e)) => a == e,
                (Some(a), e) => a == e,
                (None, _) => false,
            };
            if !ok {
                verdict.violations.push(Violation {
                    file: tree.file,
                    span: o.span,
                    original: o.name.clone(),
                    renamed: new.to_string(),
                    expected: o.binding.clone(),
                    actual,
                });
            }
        }
    }
    verdict
}

/// Source patches applying `map` to the occurrences of one file.
pub fn rename_patches(tree: &ScopeTree, map: &RenameMap) -> Vec<Patch> {
    let mut patches: Vec<Patch> = tree
        .occurrences
        .iter()
        .filter_map(|o| {
            let new = map.name_of(&o.binding);
            if new == o.name {
                return None;
            }
            let text = match o.kind {
                OccurrenceKind::Plain => new.to_string(),
                OccurrenceKind::Shorthand => format!("{}: {}", o.name, new),
                OccurrenceKind::ExportLocal => format!("{} as {}", new, o.name),
                OccurrenceKind::Synthetic => return None,
            };
            Some(Patch::new(o.span, text))
        })
        .collect();
    patches.sort();
    patches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::{emit, parse_source};
    use crate::pasa::{build_scope_tree, ScopeKind, ScopeTreeBuilder};

    fn tree_of(src: &str) -> ScopeTree {
        let (p, _) = parse_source(src, FileId(0)).unwrap();
        build_scope_tree(&p, FileId(0))
    }

    fn renamed(src: &str) -> String {
        let t = tree_of(src);
        let map = rename_tree(&t, &RenameContext::default()).unwrap();
        assert!(check_safety(std::slice::from_ref(&t), &map).is_safe());
        emit(src, &rename_patches(&t, &map)).unwrap()
    }

    #[test]
    fn params_then_vars() {
        assert_eq!(renamed("function f(alpha){var beta=alpha; return beta}"), "function a(a){var b=a; return b}");
    }

    #[test]
    fn exported_function_keeps_name() {
        assert_eq!(
            renamed("export function f(alpha){var beta=alpha; return beta}"),
            "export function f(a){var b=a; return b}"
        );
    }

    #[test]
    fn siblings_share_names() {
        let out = renamed("function f(){var one=1;return one} function g(){var two=2;return two}");
        assert_eq!(out, "function a(){var a=1;return a} function b(){var a=2;return a}");
    }

    #[test]
    fn dynamic_scope_preserved() {
        let out = renamed("function f(p){ var q = p; return eval('q') }");
        assert_eq!(out, "function f(p){ var q = p; return eval('q') }");
    }

    #[test]
    fn root_scope_without_markers_has_empty_forbidden_set() {
        let t = tree_of("var x = 1; function g(){ return x }");
        let f = forbidden_set(t.root, &RenameMap::new(), &t, &RenameContext::default()).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn referenced_outer_name_is_forbidden_unreferenced_is_free() {
        let t = tree_of("var x = 1; function g(){ return x } function h(){ var y; return y }");
        let mut state = RenameMap::new();
        state.insert(Binding::Local(t.root, "x".into()), "a", 2);
        state.insert(Binding::Local(t.root, "g".into()), "b", 1);
        state.insert(Binding::Local(t.root, "h".into()), "c", 1);
        let ctx = RenameContext::default();
        let g = forbidden_set(t.nodes[1].id, &state, &t, &ctx).unwrap();
        let h = forbidden_set(t.nodes[2].id, &state, &t, &ctx).unwrap();
        assert!(g.contains("a"));
        assert!(!h.contains("a"));
    }

    #[test]
    fn order_violation_detected() {
        let t = tree_of("var x = 1; function g(){ return x }");
        let r = forbidden_set(t.nodes[1].id, &RenameMap::new(), &t, &RenameContext::default());
        assert!(matches!(r, Err(RenameError::OrderViolation { .. })));
    }

    #[test]
    fn identity_map_is_safe() {
        let t = tree_of("function f(a){ let b = a; { let a = b; return a } }");
        assert!(check_safety(&[t], &RenameMap::new()).is_safe());
    }

    #[test]
    fn capture_is_flagged() {
        // outer x -> "a" while the inner scope declares "a" and reads x.
        let src = "function f(){\n  var x = 1;\n  function g(){ var a = 2; return x + a }\n  return g()\n}";
        let t = tree_of(src);
        let f = t.nodes[1].id;
        let mut map = RenameMap::new();
        map.insert(Binding::Local(f, "x".into()), "a", 2);
        let v = check_safety(&[t], &map);
        assert!(!v.is_safe());
        assert_eq!(v.violations[0].original, "x");
    }

    #[test]
    fn loosened_forbidden_sets_allow_capture() {
        let src =
            "function outer(){var x=1;function mid(){var y=2;function inner(){return x+y}return inner()}return mid()}";
        let t = tree_of(src);
        let loose = RenameContext { tighten: false, ..Default::default() };
        let bad = rename_tree(&t, &loose).unwrap();
        assert!(!check_safety(std::slice::from_ref(&t), &bad).is_safe());
        let good = rename_tree(&t, &RenameContext::default()).unwrap();
        assert!(check_safety(&[t], &good).is_safe());
    }

    #[test]
    fn loop_head_sees_its_own_bindings() {
        let out = renamed("function t(items){ let s = 0; for (const item of items) s += item; return s }");
        assert_eq!(out, "function a(a){ let b = 0; for (const c of a) b += c; return b }");
    }

    #[test]
    fn shorthand_properties_expand() {
        assert_eq!(
            renamed("function f(){ const value = 1; return {value} }"),
            "function a(){ const a = 1; return {value: a} }"
        );
        assert_eq!(
            renamed("function f(o){ const {key} = o; return key }"),
            "function a(a){ const {key: b} = a; return b }"
        );
    }

    #[test]
    fn cost_formula() {
        let mut m = RenameMap::new();
        m.insert(Binding::Global("x".into()), "a", 3);
        assert_eq!(cost(&m), 3);
        let mut m = RenameMap::new();
        m.insert(Binding::Global("x".into()), "a", 2);
        m.insert(Binding::Global("y".into()), "aa", 1);
        assert_eq!(cost(&m), 4);
    }

    #[test]
    fn merge_disjoint_and_conflicting() {
        let s0 = ScopeId { file: FileId(0), index: 0 };
        let s1 = ScopeId { file: FileId(1), index: 0 };
        let mut a = RenameMap::new();
        a.insert(Binding::Local(s0, "p".into()), "a", 1);
        let mut b = RenameMap::new();
        b.insert(Binding::Local(s1, "q".into()), "a", 1);
        let merged = merge_maps(vec![a.clone(), b], &[]).unwrap();
        assert_eq!(merged.len(), 2);

        let marker = BoundaryMarker {
            identifier: "f".into(),
            kind: crate::pasa::MarkerKind::Export,
            owner: Some(0),
            consumers: [1].into_iter().collect(),
            binding: Binding::Local(s0, "f".into()),
            frozen_name: Some("f".into()),
            files: [FileId(0), FileId(1)].into_iter().collect(),
            crosses_partition: true,
        };
        let merged = merge_maps(vec![a.clone()], std::slice::from_ref(&marker)).unwrap();
        assert_eq!(merged.get(&marker.binding), Some("f"));

        let mut c = RenameMap::new();
        c.insert(Binding::Local(s0, "f".into()), "b", 1);
        assert!(matches!(merge_maps(vec![a, c], &[marker]), Err(RenameError::MarkerConflict { .. })));
    }

    #[test]
    fn rename_map_dump_format() {
        let t = tree_of("function f(x){ return x }");
        let m = rename_tree(&t, &RenameContext::default()).unwrap();
        assert_eq!(m.dump(), "0:0\tf\ta\n0:1\tx\ta\n");
    }

    #[test]
    fn builder_tree_renames_safely() {
        let mut b = ScopeTreeBuilder::new(FileId(0));
        let root = b.root();
        let f = b.add_scope(root, ScopeKind::Function);
        let g = b.add_scope(f, ScopeKind::Block);
        b.declare(root, "x").declare(f, "y").declare(g, "z").reference(g, "x").reference(g, "y");
        let t = b.finish();
        let m = rename_tree(&t, &RenameContext::default()).unwrap();
        assert!(check_safety(&[t], &m).is_safe());
        assert_eq!(m.get(&Binding::Local(g, "z".into())), Some("c"));
    }
}
