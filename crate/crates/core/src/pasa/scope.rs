//! Lexical scope tree: declarations, references and dynamic flags per scope,
//! plus every identifier occurrence resolved to its binding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::jsparse::ast::*;
use crate::jsparse::{FileId, Span};

use super::PasaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScopeId {
    pub file: FileId,
    pub index: u32,
}

impl fmt::Display for ScopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file.0, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScopeKind {
    Global,
    Module,
    Function,
    Block,
}

/// The declaration a name resolves to; `Global` for unresolved names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Binding {
    Global(String),
    Local(ScopeId, String),
}

impl Binding {
    pub fn name(&self) -> &str {
        match self {
            Binding::Global(n) | Binding::Local(_, n) => n,
        }
    }

    pub fn scope(&self) -> Option<ScopeId> {
        match self {
            Binding::Global(_) => None,
            Binding::Local(s, _) => Some(*s),
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Global(n) => write!(f, "<global, {n}>"),
            Binding::Local(s, n) => write!(f, "<{s}, {n}>"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeclKind {
    Param,
    Function,
    Var,
    Lexical,
    Import,
    /// Introduced by a transform (decoder functions, property slots).
    Synthetic,
}

impl DeclKind {
    /// Assignment order: params, hoisted functions, vars, then the rest.
    fn rank(self) -> u8 {
        match self {
            DeclKind::Param => 0,
            DeclKind::Function => 1,
            DeclKind::Var => 2,
            DeclKind::Lexical | DeclKind::Import => 3,
            DeclKind::Synthetic => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub name: String,
    pub site: Span,
    pub kind: DeclKind,
    /// Number of occurrences (declaration sites included) resolving here.
    pub usage: u32,
    /// Visible to other modules through an export.
    pub exported: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScopeNode {
    pub id: ScopeId,
    pub kind: ScopeKind,
    pub parent: Option<ScopeId>,
    pub children: Vec<ScopeId>,
    pub span: Span,
    /// In renaming order.
    pub declarations: Vec<Declaration>,
    /// Reference occurrences appearing directly in this scope.
    pub references: BTreeMap<String, Vec<Span>>,
    pub is_dynamic: bool,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl ScopeNode {
    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.index.get(name).map(|&i| &self.declarations[i])
    }

    pub fn declares(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn rebuild_index(&mut self) {
        self.index = self.declarations.iter().enumerate().map(|(i, d)| (d.name.clone(), i)).collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OccurrenceKind {
    Plain,
    /// `{ x }` in an object literal or pattern; renaming must expand it.
    Shorthand,
    /// Local name in `export { x }`; renaming must keep the exported name.
    ExportLocal,
    /// Reference planted by a transform; no rename patch is generated.
    Synthetic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Occurrence {
    pub name: String,
    pub span: Span,
    /// Scope the occurrence appears in.
    pub scope: ScopeId,
    pub is_declaration: bool,
    pub kind: OccurrenceKind,
    pub binding: Binding,
}

/// Lexical scope tree of one file, rooted at its module scope. The program
/// level global scope is implicit: resolution falls through to
/// [`Binding::Global`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScopeTree {
    pub file: FileId,
    pub nodes: Vec<ScopeNode>,
    pub root: ScopeId,
    pub occurrences: Vec<Occurrence>,
    pub dynamic_sites: Vec<Span>,
    /// (exported name, local binding name) pairs; local is `None` for
    /// re-exports and anonymous defaults.
    pub exports: Vec<(String, Option<String>)>,
}

impl ScopeTree {
    pub fn node(&self, id: ScopeId) -> Option<&ScopeNode> {
        if id.file != self.file {
            return None;
        }
        self.nodes.get(id.index as usize)
    }

    fn node_mut(&mut self, id: ScopeId) -> &mut ScopeNode {
        &mut self.nodes[id.index as usize]
    }

    pub fn parent(&self, id: ScopeId) -> Option<ScopeId> {
        self.node(id).and_then(|n| n.parent)
    }

    /// `id` and its ancestors, innermost first.
    pub fn chain(&self, id: ScopeId) -> impl Iterator<Item = ScopeId> + '_ {
        std::iter::successors(Some(id), move |s| self.parent(*s))
    }

    pub fn is_ancestor_or_self(&self, ancestor: ScopeId, id: ScopeId) -> bool {
        self.chain(id).any(|s| s == ancestor)
    }

    pub fn depth(&self, id: ScopeId) -> usize {
        self.chain(id).count() - 1
    }

    /// Resolves `name` as referenced from `scope`.
    pub fn resolve(&self, name: &str, scope: ScopeId) -> Result<Binding, PasaError> {
        if self.node(scope).is_none() {
            return Err(PasaError::UnknownScope(scope));
        }
        Ok(self.resolve_unchecked(name, scope))
    }

    fn resolve_unchecked(&self, name: &str, scope: ScopeId) -> Binding {
        for s in self.chain(scope) {
            if self.nodes[s.index as usize].declares(name) {
                return Binding::Local(s, name.to_string());
            }
        }
        Binding::Global(name.to_string())
    }

    pub fn declaration(&self, binding: &Binding) -> Option<&Declaration> {
        match binding {
            Binding::Global(_) => None,
            Binding::Local(s, n) => self.node(*s)?.declaration(n),
        }
    }

    /// Scope ids, parents before children.
    pub fn topological_order(&self) -> Vec<ScopeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(s) = stack.pop() {
            out.push(s);
            let node = &self.nodes[s.index as usize];
            stack.extend(node.children.iter().rev().copied());
        }
        out
    }

    /// Names of declarations in the module scope.
    pub fn module_declarations(&self) -> impl Iterator<Item = &Declaration> {
        self.nodes[self.root.index as usize].declarations.iter()
    }

    /// Distinct unresolved names, sorted.
    pub fn free_names(&self) -> BTreeSet<&str> {
        self.occurrences
            .iter()
            .filter_map(|o| match &o.binding {
                Binding::Global(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Adds a transform-introduced declaration to `scope` together with
    /// the scopes it will be referenced from. Returns its binding.
    pub fn add_synthetic(&mut self, scope: ScopeId, name: &str, site: Span, refs: &[(ScopeId, Span)]) -> Binding {
        assert!(!self.node(scope).expect("scope exists").declares(name), "synthetic name already declared");
        let binding = Binding::Local(scope, name.to_string());
        let node = self.node_mut(scope);
        node.declarations.push(Declaration {
            name: name.to_string(),
            site,
            kind: DeclKind::Synthetic,
            usage: 1 + refs.len() as u32,
            exported: false,
        });
        node.index.insert(name.to_string(), node.declarations.len() - 1);
        self.occurrences.push(Occurrence {
            name: name.to_string(),
            span: site,
            scope,
            is_declaration: true,
            kind: OccurrenceKind::Synthetic,
            binding: binding.clone(),
        });
        for &(s, span) in refs {
            self.occurrences.push(Occurrence {
                name: name.to_string(),
                span,
                scope: s,
                is_declaration: false,
                kind: OccurrenceKind::Synthetic,
                binding: binding.clone(),
            });
        }
        binding
    }

    /// Innermost scope whose span contains `span`.
    pub fn scope_at(&self, span: Span) -> ScopeId {
        let mut cur = self.root;
        'descend: loop {
            // Siblings are disjoint and in source order.
            let children = &self.nodes[cur.index as usize].children;
            let i = children.partition_point(|c| self.nodes[c.index as usize].span.start <= span.start);
            if i > 0 {
                let c = children[i - 1];
                if self.nodes[c.index as usize].span.contains(span) {
                    cur = c;
                    continue 'descend;
                }
            }
            return cur;
        }
    }
}

/// Builder for hand-made trees, used by tests and the random-tree generators.
pub struct ScopeTreeBuilder {
    tree: ScopeTree,
    next_offset: usize,
}

impl ScopeTreeBuilder {
    pub fn new(file: FileId) -> Self {
        let root = ScopeId { file, index: 0 };
        let mut tree = ScopeTree {
            file,
            nodes: Vec::new(),
            root,
            occurrences: Vec::new(),
            dynamic_sites: Vec::new(),
            exports: Vec::new(),
        };
        tree.nodes.push(new_node(root, ScopeKind::Module, None, Span::default()));
        ScopeTreeBuilder { tree, next_offset: 0 }
    }

    pub fn root(&self) -> ScopeId {
        self.tree.root
    }

    pub fn add_scope(&mut self, parent: ScopeId, kind: ScopeKind) -> ScopeId {
        let id = ScopeId { file: self.tree.file, index: self.tree.nodes.len() as u32 };
        self.tree.nodes.push(new_node(id, kind, Some(parent), Span::default()));
        self.tree.node_mut(parent).children.push(id);
        id
    }

    fn fresh_span(&mut self, name: &str) -> Span {
        let s = Span::new(self.next_offset, self.next_offset + name.len());
        self.next_offset = s.end + 1;
        s
    }

    pub fn declare(&mut self, scope: ScopeId, name: &str) -> &mut Self {
        let span = self.fresh_span(name);
        add_decl(&mut self.tree, scope, name, span, DeclKind::Lexical);
        self.tree.occurrences.push(Occurrence {
            name: name.to_string(),
            span,
            scope,
            is_declaration: true,
            kind: OccurrenceKind::Plain,
            binding: Binding::Global(String::new()),
        });
        self
    }

    pub fn reference(&mut self, scope: ScopeId, name: &str) -> &mut Self {
        let span = self.fresh_span(name);
        self.tree.occurrences.push(Occurrence {
            name: name.to_string(),
            span,
            scope,
            is_declaration: false,
            kind: OccurrenceKind::Plain,
            binding: Binding::Global(String::new()),
        });
        self
    }

    pub fn mark_exported(&mut self, scope: ScopeId, name: &str) -> &mut Self {
        let node = self.tree.node_mut(scope);
        if let Some(&i) = node.index.get(name) {
            node.declarations[i].exported = true;
            self.tree.exports.push((name.to_string(), Some(name.to_string())));
        }
        self
    }

    pub fn mark_dynamic(&mut self, scope: ScopeId) -> &mut Self {
        let span = self.fresh_span("eval");
        self.tree.dynamic_sites.push(span);
        let chain: Vec<_> = self.tree.chain(scope).collect();
        for s in chain {
            self.tree.node_mut(s).is_dynamic = true;
        }
        self
    }

    pub fn finish(mut self) -> ScopeTree {
        let end = self.next_offset;
        for n in &mut self.tree.nodes {
            n.span = Span::new(0, end);
        }
        finalize(&mut self.tree);
        self.tree
    }
}

fn new_node(id: ScopeId, kind: ScopeKind, parent: Option<ScopeId>, span: Span) -> ScopeNode {
    ScopeNode {
        id,
        kind,
        parent,
        children: Vec::new(),
        span,
        declarations: Vec::new(),
        references: BTreeMap::new(),
        is_dynamic: false,
        index: HashMap::new(),
    }
}

fn add_decl(tree: &mut ScopeTree, scope: ScopeId, name: &str, site: Span, kind: DeclKind) {
    let node = tree.node_mut(scope);
    if node.index.contains_key(name) {
        return;
    }
    node.index.insert(name.to_string(), node.declarations.len());
    node.declarations.push(Declaration { name: name.to_string(), site, kind, usage: 0, exported: false });
}

/// Resolves all occurrences, counts usage, sorts declarations into
/// renaming order and fills per-scope reference lists.
fn finalize(tree: &mut ScopeTree) {
    for node in &mut tree.nodes {
        node.declarations.sort_by_key(|d| (d.kind.rank(), d.site.start));
        node.rebuild_index();
        node.references.clear();
        for d in &mut node.declarations {
            d.usage = 0;
        }
    }
    let mut occurrences = std::mem::take(&mut tree.occurrences);
    for occ in &mut occurrences {
        occ.binding = tree.resolve_unchecked(&occ.name, occ.scope);
        if let Binding::Local(s, n) = &occ.binding {
            let node = tree.node_mut(*s);
            let i = node.index[n.as_str()];
            node.declarations[i].usage += 1;
        }
        if !occ.is_declaration {
            tree.node_mut(occ.scope).references.entry(occ.name.clone()).or_default().push(occ.span);
        }
    }
    tree.occurrences = occurrences;
}

// ---------------------------------------------------------------------------
// AST walker
// ---------------------------------------------------------------------------

struct Walker {
    tree: ScopeTree,
    current: ScopeId,
    strict: bool,
    dynamic_scopes: Vec<ScopeId>,
}

/// Builds the scope tree of one parsed file.
pub fn build_scope_tree(program: &Program, file: FileId) -> ScopeTree {
    let root = ScopeId { file, index: 0 };
    let mut tree = ScopeTree {
        file,
        nodes: vec![new_node(root, ScopeKind::Module, None, program.span)],
        root,
        occurrences: Vec::new(),
        dynamic_sites: Vec::new(),
        exports: Vec::new(),
    };
    tree.nodes[0].span = program.span;
    let strict = program.is_module
        || program.body.iter().any(|s| matches!(s, Stmt::Directive { lit, .. } if lit.value_string() == "use strict"));
    let mut w = Walker { tree, current: root, strict, dynamic_scopes: Vec::new() };
    w.statements(&program.body);
    let exported: Vec<String> = w.tree.exports.iter().filter_map(|(_, l)| l.clone()).collect();
    for name in exported {
        let node = w.tree.node_mut(root);
        if let Some(&i) = node.index.get(name.as_str()) {
            node.declarations[i].exported = true;
        }
    }
    for s in std::mem::take(&mut w.dynamic_scopes) {
        let chain: Vec<_> = w.tree.chain(s).collect();
        for c in chain {
            w.tree.node_mut(c).is_dynamic = true;
        }
    }
    finalize(&mut w.tree);
    w.tree
}

fn has_lexical(stmts: &[Stmt], strict: bool) -> bool {
    stmts.iter().any(|s| match s {
        Stmt::Var(v) => v.kind != VarKind::Var,
        Stmt::Class(_) => true,
        Stmt::Function(_) => strict,
        _ => false,
    })
}

impl Walker {
    fn push_scope(&mut self, kind: ScopeKind, span: Span) -> ScopeId {
        let id = ScopeId { file: self.tree.file, index: self.tree.nodes.len() as u32 };
        self.tree.nodes.push(new_node(id, kind, Some(self.current), span));
        self.tree.node_mut(self.current).children.push(id);
        let prev = self.current;
        self.current = id;
        prev
    }

    fn hoist_target(&self) -> ScopeId {
        self.tree
            .chain(self.current)
            .find(|s| matches!(self.tree.nodes[s.index as usize].kind, ScopeKind::Function | ScopeKind::Module))
            .unwrap_or(self.tree.root)
    }

    fn occurrence(&mut self, id: &Ident, is_declaration: bool, kind: OccurrenceKind) {
        self.tree.occurrences.push(Occurrence {
            name: id.name.clone(),
            span: id.span,
            scope: self.current,
            is_declaration,
            kind,
            binding: Binding::Global(String::new()),
        });
    }

    fn declare(&mut self, id: &Ident, kind: DeclKind, target: ScopeId) {
        add_decl(&mut self.tree, target, &id.name, id.span, kind);
        self.occurrence(id, true, OccurrenceKind::Plain);
    }

    fn reference(&mut self, id: &Ident) {
        self.occurrence(id, false, OccurrenceKind::Plain);
    }

    fn dynamic_site(&mut self, span: Span) {
        self.tree.dynamic_sites.push(span);
        self.dynamic_scopes.push(self.current);
    }

    fn statements(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.statement(s);
        }
    }

    fn block(&mut self, body: &[Stmt], span: Span) {
        if has_lexical(body, self.strict) {
            let prev = self.push_scope(ScopeKind::Block, span);
            self.statements(body);
            self.current = prev;
        } else {
            self.statements(body);
        }
    }

    fn var_decl(&mut self, v: &VarDecl) {
        let (kind, target) = match v.kind {
            VarKind::Var => (DeclKind::Var, self.hoist_target()),
            _ => (DeclKind::Lexical, self.current),
        };
        for d in &v.decls {
            self.pattern(&d.target, kind, target);
            if let Some(init) = &d.init {
                self.expr(init);
            }
        }
    }

    fn statement(&mut self, s: &Stmt) {
        match s {
            Stmt::Var(v) => self.var_decl(v),
            Stmt::Function(f) => {
                if let Some(name) = &f.name {
                    let target = if self.strict { self.current } else { self.hoist_target() };
                    self.declare(name, DeclKind::Function, target);
                }
                self.function(f, false);
            }
            Stmt::Class(c) => {
                if let Some(name) = &c.name {
                    self.declare(name, DeclKind::Lexical, self.current);
                }
                self.class(c, false);
            }
            Stmt::Expr { expr, .. } => self.expr(expr),
            Stmt::Directive { .. } | Stmt::Empty(_) | Stmt::Debugger(_) => {}
            Stmt::Block { body, span } => self.block(body, *span),
            Stmt::If { test, cons, alt, .. } => {
                self.expr(test);
                self.statement(cons);
                if let Some(a) = alt {
                    self.statement(a);
                }
            }
            Stmt::For { init, test, update, body, span } => {
                let lexical = matches!(init, Some(ForInit::Var(v)) if v.kind != VarKind::Var);
                let prev = lexical.then(|| self.push_scope(ScopeKind::Block, *span));
                match init {
                    Some(ForInit::Var(v)) => self.var_decl(v),
                    Some(ForInit::Expr(e)) => self.expr(e),
                    None => {}
                }
                if let Some(t) = test {
                    self.expr(t);
                }
                if let Some(u) = update {
                    self.expr(u);
                }
                self.statement(body);
                if let Some(p) = prev {
                    self.current = p;
                }
            }
            Stmt::ForIn { head, right, body, span, .. } => {
                // The iterated expression sees the head's lexical bindings
                // (in their dead zone), so it belongs to the loop scope.
                let lexical = matches!(head, ForHead::Var { kind, .. } if *kind != VarKind::Var);
                let prev = lexical.then(|| self.push_scope(ScopeKind::Block, *span));
                match head {
                    ForHead::Var { kind: VarKind::Var, target } => {
                        let t = self.hoist_target();
                        self.pattern(target, DeclKind::Var, t);
                    }
                    ForHead::Var { target, .. } => {
                        let t = self.current;
                        self.pattern(target, DeclKind::Lexical, t);
                    }
                    ForHead::Expr(e) => self.expr(e),
                }
                self.expr(right);
                self.statement(body);
                if let Some(p) = prev {
                    self.current = p;
                }
            }
            Stmt::While { test, body, .. } | Stmt::DoWhile { body, test, .. } => {
                self.expr(test);
                self.statement(body);
            }
            Stmt::Return { arg, .. } => {
                if let Some(a) = arg {
                    self.expr(a);
                }
            }
            Stmt::Break { .. } | Stmt::Continue { .. } => {}
            Stmt::Throw { arg, .. } => self.expr(arg),
            Stmt::Try { block, handler, finalizer, span } => {
                self.block(block, *span);
                if let Some(h) = handler {
                    let prev = self.push_scope(ScopeKind::Block, h.span);
                    if let Some(p) = &h.param {
                        let t = self.current;
                        self.pattern(p, DeclKind::Lexical, t);
                    }
                    self.statements(&h.body);
                    self.current = prev;
                }
                if let Some(f) = finalizer {
                    self.block(f, *span);
                }
            }
            Stmt::Switch { disc, cases, span } => {
                self.expr(disc);
                let lexical = cases.iter().any(|c| has_lexical(&c.body, self.strict));
                let prev = lexical.then(|| self.push_scope(ScopeKind::Block, *span));
                for c in cases {
                    if let Some(t) = &c.test {
                        self.expr(t);
                    }
                    self.statements(&c.body);
                }
                if let Some(p) = prev {
                    self.current = p;
                }
            }
            Stmt::Labeled { body, .. } => self.statement(body),
            Stmt::With { object, body, span } => {
                self.expr(object);
                self.dynamic_site(*span);
                self.statement(body);
            }
            Stmt::Import(i) => {
                let root = self.tree.root;
                for spec in &i.specifiers {
                    self.declare(spec.local(), DeclKind::Import, root);
                }
            }
            Stmt::Export(e) => self.export(e),
        }
    }

    fn export(&mut self, e: &ExportDecl) {
        match e {
            ExportDecl::Decl { decl, .. } => {
                let names: Vec<String> = match decl.as_ref() {
                    Stmt::Var(v) => {
                        let mut out = Vec::new();
                        for d in &v.decls {
                            pattern_names(&d.target, &mut out);
                        }
                        out
                    }
                    Stmt::Function(f) => f.name.iter().map(|n| n.name.clone()).collect(),
                    Stmt::Class(c) => c.name.iter().map(|n| n.name.clone()).collect(),
                    _ => Vec::new(),
                };
                for n in names {
                    self.tree.exports.push((n.clone(), Some(n)));
                }
                self.statement(decl);
            }
            ExportDecl::Default { body, .. } => match body {
                ExportDefault::Expr(x) => {
                    self.tree.exports.push(("default".into(), None));
                    self.expr(x);
                }
                ExportDefault::Function(f) => {
                    let local = f.name.as_ref().map(|n| n.name.clone());
                    if let Some(name) = &f.name {
                        let root = self.tree.root;
                        self.declare(name, DeclKind::Function, root);
                    }
                    self.tree.exports.push(("default".into(), local));
                    self.function(f, false);
                }
                ExportDefault::Class(c) => {
                    let local = c.name.as_ref().map(|n| n.name.clone());
                    if let Some(name) = &c.name {
                        let root = self.tree.root;
                        self.declare(name, DeclKind::Lexical, root);
                    }
                    self.tree.exports.push(("default".into(), local));
                    self.class(c, false);
                }
            },
            ExportDecl::Named { specifiers, source, .. } => {
                for s in specifiers {
                    if source.is_some() {
                        self.tree.exports.push((s.exported.clone(), None));
                    } else {
                        self.occurrence(&s.local, false, OccurrenceKind::ExportLocal);
                        self.tree.exports.push((s.exported.clone(), Some(s.local.name.clone())));
                    }
                }
            }
            ExportDecl::All { alias, .. } => {
                self.tree.exports.push((alias.clone().unwrap_or_else(|| "*".into()), None));
            }
        }
    }

    fn pattern(&mut self, p: &Pattern, kind: DeclKind, target: ScopeId) {
        match p {
            Pattern::Ident(id) => self.declare(id, kind, target),
            Pattern::Object { props, .. } => {
                for prop in props {
                    match prop {
                        PatProp::KeyValue { key, value } => {
                            self.prop_key(key);
                            self.pattern(value, kind, target);
                        }
                        PatProp::Shorthand { id, default } => {
                            add_decl(&mut self.tree, target, &id.name, id.span, kind);
                            self.occurrence(id, true, OccurrenceKind::Shorthand);
                            if let Some(d) = default {
                                self.expr(d);
                            }
                        }
                        PatProp::Rest(r) => self.pattern(r, kind, target),
                    }
                }
            }
            Pattern::Array { elems, .. } => {
                for e in elems.iter().flatten() {
                    self.pattern(e, kind, target);
                }
            }
            Pattern::Assign { target: t, default, .. } => {
                self.pattern(t, kind, target);
                self.expr(default);
            }
            Pattern::Rest { arg, .. } => self.pattern(arg, kind, target),
            Pattern::Expr(e) => self.expr(e),
        }
    }

    fn function(&mut self, f: &Function, name_in_own_scope: bool) {
        let prev = self.push_scope(ScopeKind::Function, f.span);
        let me = self.current;
        if name_in_own_scope {
            if let Some(name) = &f.name {
                self.declare(name, DeclKind::Function, me);
            }
        }
        for p in &f.params {
            self.pattern(p, DeclKind::Param, me);
        }
        match &f.body {
            FunctionBody::Block(body) => self.statements(body),
            FunctionBody::Expr(e) => self.expr(e),
        }
        self.current = prev;
    }

    fn class(&mut self, c: &Class, is_expr: bool) {
        if let Some(sc) = &c.super_class {
            self.expr(sc);
        }
        let named_expr = is_expr && c.name.is_some();
        let prev = named_expr.then(|| self.push_scope(ScopeKind::Block, c.span));
        if named_expr {
            let me = self.current;
            self.declare(c.name.as_ref().unwrap(), DeclKind::Lexical, me);
        }
        for m in &c.members {
            match m {
                ClassMember::Method { key, func, .. } => {
                    self.prop_key(key);
                    self.function(func, false);
                }
                ClassMember::Field { key, value, .. } => {
                    self.prop_key(key);
                    if let Some(v) = value {
                        self.expr(v);
                    }
                }
                ClassMember::StaticBlock { body, span } => {
                    let p = self.push_scope(ScopeKind::Function, *span);
                    self.statements(body);
                    self.current = p;
                }
            }
        }
        if let Some(p) = prev {
            self.current = p;
        }
    }

    fn prop_key(&mut self, key: &PropKey) {
        if let PropKey::Computed(e) = key {
            self.expr(e);
        }
    }

    fn template(&mut self, t: &Template) {
        for e in &t.exprs {
            self.expr(e);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Ident(id) => self.reference(id),
            Expr::Str(_) | Expr::Num(_) | Expr::Regex(_) | Expr::Keyword(_) => {}
            Expr::Template(t) => self.template(t),
            Expr::TaggedTemplate { tag, quasi, .. } => {
                self.expr(tag);
                self.template(quasi);
            }
            Expr::Array { elems, .. } => {
                for x in elems.iter().flatten() {
                    self.expr(x);
                }
            }
            Expr::Object { props, .. } => {
                for p in props {
                    match p {
                        Prop::KeyValue { key, value } => {
                            self.prop_key(key);
                            self.expr(value);
                        }
                        Prop::Shorthand { id, default } => {
                            self.occurrence(id, false, OccurrenceKind::Shorthand);
                            if let Some(d) = default {
                                self.expr(d);
                            }
                        }
                        Prop::Method { key, func, .. } => {
                            self.prop_key(key);
                            self.function(func, false);
                        }
                        Prop::Spread(x) => self.expr(x),
                    }
                }
            }
            Expr::Function(f) => self.function(f, !f.is_arrow),
            Expr::Class(c) => self.class(c, true),
            Expr::Unary { arg, .. } | Expr::Update { arg, .. } | Expr::Await { arg, .. } | Expr::Spread { arg, .. } => {
                self.expr(arg)
            }
            Expr::Binary { left, right, .. } | Expr::Logical { left, right, .. } => {
                self.expr(left);
                self.expr(right);
            }
            Expr::Assign { target, value, .. } => {
                self.expr(target);
                self.expr(value);
            }
            Expr::Cond { test, cons, alt, .. } => {
                self.expr(test);
                self.expr(cons);
                self.expr(alt);
            }
            Expr::Call { callee, args, span, .. } | Expr::New { callee, args, span } => {
                if let Expr::Ident(id) = callee.as_ref() {
                    let is_call = matches!(e, Expr::Call { .. });
                    if (id.name == "eval" && is_call) || id.name == "Function" {
                        self.dynamic_site(*span);
                    }
                }
                self.expr(callee);
                for a in args {
                    self.expr(a);
                }
            }
            Expr::Member { object, prop, .. } => {
                self.expr(object);
                if let MemberProp::Computed(p) = prop {
                    self.expr(p);
                }
            }
            Expr::Seq { exprs, .. } => {
                for x in exprs {
                    self.expr(x);
                }
            }
            Expr::Yield { arg, .. } => {
                if let Some(a) = arg {
                    self.expr(a);
                }
            }
            Expr::Paren { expr, .. } => self.expr(expr),
            Expr::ImportCall { arg, .. } => self.expr(arg),
        }
    }
}

pub(crate) fn pattern_names(p: &Pattern, out: &mut Vec<String>) {
    match p {
        Pattern::Ident(id) => out.push(id.name.clone()),
        Pattern::Object { props, .. } => {
            for prop in props {
                match prop {
                    PatProp::KeyValue { value, .. } => pattern_names(value, out),
                    PatProp::Shorthand { id, .. } => out.push(id.name.clone()),
                    PatProp::Rest(r) => pattern_names(r, out),
                }
            }
        }
        Pattern::Array { elems, .. } => {
            for e in elems.iter().flatten() {
                pattern_names(e, out);
            }
        }
        Pattern::Assign { target, .. } => pattern_names(target, out),
        Pattern::Rest { arg, .. } => pattern_names(arg, out),
        Pattern::Expr(_) => {}
    }
}
