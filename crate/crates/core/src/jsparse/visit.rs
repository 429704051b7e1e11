//! Pre-order traversal over statements and expressions.

use super::ast::*;

/// Hooks called before children are visited. All default to no-ops.
pub trait Visitor {
    fn stmt(&mut self, _s: &Stmt) {}
    fn expr(&mut self, _e: &Expr) {}
    fn function(&mut self, _f: &Function) {}
    fn catch_clause(&mut self, _c: &CatchClause) {}
    fn switch_case(&mut self, _c: &SwitchCase) {}
}

pub fn walk_program<V: Visitor>(v: &mut V, p: &Program) {
    walk_stmts(v, &p.body);
}

pub fn walk_stmts<V: Visitor>(v: &mut V, stmts: &[Stmt]) {
    for s in stmts {
        walk_stmt(v, s);
    }
}

fn walk_var<V: Visitor>(v: &mut V, d: &VarDecl) {
    for decl in &d.decls {
        walk_pattern(v, &decl.target);
        if let Some(i) = &decl.init {
            walk_expr(v, i);
        }
    }
}

pub fn walk_stmt<V: Visitor>(v: &mut V, s: &Stmt) {
    v.stmt(s);
    match s {
        Stmt::Var(d) => walk_var(v, d),
        Stmt::Function(f) => walk_function(v, f),
        Stmt::Class(c) => walk_class(v, c),
        Stmt::Expr { expr, .. } => walk_expr(v, expr),
        Stmt::Directive { .. } | Stmt::Empty(_) | Stmt::Debugger(_) => {}
        Stmt::Break { .. } | Stmt::Continue { .. } | Stmt::Import(_) => {}
        Stmt::Block { body, .. } => walk_stmts(v, body),
        Stmt::If { test, cons, alt, .. } => {
            walk_expr(v, test);
            walk_stmt(v, cons);
            if let Some(a) = alt {
                walk_stmt(v, a);
            }
        }
        Stmt::For { init, test, update, body, .. } => {
            match init {
                Some(ForInit::Var(d)) => walk_var(v, d),
                Some(ForInit::Expr(e)) => walk_expr(v, e),
                None => {}
            }
            for e in [test, update].into_iter().flatten() {
                walk_expr(v, e);
            }
            walk_stmt(v, body);
        }
        Stmt::ForIn { head, right, body, .. } => {
            match head {
                ForHead::Var { target, .. } => walk_pattern(v, target),
                ForHead::Expr(e) => walk_expr(v, e),
            }
            walk_expr(v, right);
            walk_stmt(v, body);
        }
        Stmt::While { test, body, .. } | Stmt::DoWhile { body, test, .. } => {
            walk_expr(v, test);
            walk_stmt(v, body);
        }
        Stmt::Return { arg, .. } => {
            if let Some(a) = arg {
                walk_expr(v, a);
            }
        }
        Stmt::Throw { arg, .. } => walk_expr(v, arg),
        Stmt::Try { block, handler, finalizer, .. } => {
            walk_stmts(v, block);
            if let Some(h) = handler {
                v.catch_clause(h);
                if let Some(p) = &h.param {
                    walk_pattern(v, p);
                }
                walk_stmts(v, &h.body);
            }
            if let Some(f) = finalizer {
                walk_stmts(v, f);
            }
        }
        Stmt::Switch { disc, cases, .. } => {
            walk_expr(v, disc);
            for c in cases {
                v.switch_case(c);
                if let Some(t) = &c.test {
                    walk_expr(v, t);
                }
                walk_stmts(v, &c.body);
            }
        }
        Stmt::Labeled { body, .. } => walk_stmt(v, body),
        Stmt::With { object, body, .. } => {
            walk_expr(v, object);
            walk_stmt(v, body);
        }
        Stmt::Export(e) => match e {
            ExportDecl::Decl { decl, .. } => walk_stmt(v, decl),
            ExportDecl::Default { body, .. } => match body {
                ExportDefault::Expr(x) => walk_expr(v, x),
                ExportDefault::Function(f) => walk_function(v, f),
                ExportDefault::Class(c) => walk_class(v, c),
            },
            ExportDecl::Named { .. } | ExportDecl::All { .. } => {}
        },
    }
}

pub fn walk_function<V: Visitor>(v: &mut V, f: &Function) {
    v.function(f);
    for p in &f.params {
        walk_pattern(v, p);
    }
    match &f.body {
        FunctionBody::Block(b) => walk_stmts(v, b),
        FunctionBody::Expr(e) => walk_expr(v, e),
    }
}

pub fn walk_class<V: Visitor>(v: &mut V, c: &Class) {
    if let Some(s) = &c.super_class {
        walk_expr(v, s);
    }
    for m in &c.members {
        match m {
            ClassMember::Method { key, func, .. } => {
                walk_key(v, key);
                walk_function(v, func);
            }
            ClassMember::Field { key, value, .. } => {
                walk_key(v, key);
                if let Some(x) = value {
                    walk_expr(v, x);
                }
            }
            ClassMember::StaticBlock { body, .. } => walk_stmts(v, body),
        }
    }
}

fn walk_key<V: Visitor>(v: &mut V, k: &PropKey) {
    if let PropKey::Computed(e) = k {
        walk_expr(v, e);
    }
}

pub fn walk_pattern<V: Visitor>(v: &mut V, p: &Pattern) {
    match p {
        Pattern::Ident(_) => {}
        Pattern::Object { props, .. } => {
            for prop in props {
                match prop {
                    PatProp::KeyValue { key, value } => {
                        walk_key(v, key);
                        walk_pattern(v, value);
                    }
                    PatProp::Shorthand { default, .. } => {
                        if let Some(d) = default {
                            walk_expr(v, d);
                        }
                    }
                    PatProp::Rest(r) => walk_pattern(v, r),
                }
            }
        }
        Pattern::Array { elems, .. } => {
            for e in elems.iter().flatten() {
                walk_pattern(v, e);
            }
        }
        Pattern::Assign { target, default, .. } => {
            walk_pattern(v, target);
            walk_expr(v, default);
        }
        Pattern::Rest { arg, .. } => walk_pattern(v, arg),
        Pattern::Expr(e) => walk_expr(v, e),
    }
}

pub fn walk_expr<V: Visitor>(v: &mut V, e: &Expr) {
    v.expr(e);
    match e {
        Expr::Ident(_) | Expr::Str(_) | Expr::Num(_) | Expr::Regex(_) | Expr::Keyword(_) => {}
        Expr::Template(t) => {
            for x in &t.exprs {
                walk_expr(v, x);
            }
        }
        Expr::TaggedTemplate { tag, quasi, .. } => {
            walk_expr(v, tag);
            for x in &quasi.exprs {
                walk_expr(v, x);
            }
        }
        Expr::Array { elems, .. } => {
            for x in elems.iter().flatten() {
                walk_expr(v, x);
            }
        }
        Expr::Object { props, .. } => {
            for p in props {
                match p {
                    Prop::KeyValue { key, value } => {
                        walk_key(v, key);
                        walk_expr(v, value);
                    }
                    Prop::Shorthand { default, .. } => {
                        if let Some(d) = default {
                            walk_expr(v, d);
                        }
                    }
                    Prop::Method { key, func, .. } => {
                        walk_key(v, key);
                        walk_function(v, func);
                    }
                    Prop::Spread(x) => walk_expr(v, x),
                }
            }
        }
        Expr::Function(f) => walk_function(v, f),
        Expr::Class(c) => walk_class(v, c),
        Expr::Unary { arg, .. } | Expr::Update { arg, .. } | Expr::Spread { arg, .. } | Expr::Await { arg, .. } => {
            walk_expr(v, arg)
        }
        Expr::Binary { left, right, .. } | Expr::Logical { left, right, .. } => {
            walk_expr(v, left);
            walk_expr(v, right);
        }
        Expr::Assign { target, value, .. } => {
            walk_expr(v, target);
            walk_expr(v, value);
        }
        Expr::Cond { test, cons, alt, .. } => {
            walk_expr(v, test);
            walk_expr(v, cons);
            walk_expr(v, alt);
        }
        Expr::Call { callee, args, .. } | Expr::New { callee, args, .. } => {
            walk_expr(v, callee);
            for a in args {
                walk_expr(v, a);
            }
        }
        Expr::Member { object, prop, .. } => {
            walk_expr(v, object);
            if let MemberProp::Computed(p) = prop {
                walk_expr(v, p);
            }
        }
        Expr::Seq { exprs, .. } => {
            for x in exprs {
                walk_expr(v, x);
            }
        }
        Expr::Yield { arg, .. } => {
            if let Some(a) = arg {
                walk_expr(v, a);
            }
        }
        Expr::Paren { expr, .. } => walk_expr(v, expr),
        Expr::ImportCall { arg, .. } => walk_expr(v, arg),
    }
}
