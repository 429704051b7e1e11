//! Typed syntax tree. Every node keeps its byte span so later passes can
//! patch the original text instead of re-printing it.

use super::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Program {
    pub span: Span,
    pub body: Vec<Stmt>,
    /// Contains `import`/`export` declarations.
    pub is_module: bool,
    /// Byte offset just past the directive prologue (and hashbang line).
    pub prologue_end: usize,
    /// Whether the last directive ended with an explicit `;`.
    pub prologue_terminated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Var,
    Let,
    Const,
}

#[derive(Debug, Clone)]
pub struct VarDecl {
    pub kind: VarKind,
    pub decls: Vec<VarDeclarator>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct VarDeclarator {
    pub target: Pattern,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone)]
pub enum Stmt {
    Var(VarDecl),
    Function(Box<Function>),
    Class(Box<Class>),
    Expr {
        expr: Expr,
        span: Span,
    },
    /// A string-literal expression statement in a directive prologue.
    Directive {
        lit: StrLit,
        span: Span,
    },
    Block {
        body: Vec<Stmt>,
        span: Span,
    },
    If {
        test: Expr,
        cons: Box<Stmt>,
        alt: Option<Box<Stmt>>,
        span: Span,
    },
    For {
        init: Option<ForInit>,
        test: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
        span: Span,
    },
    ForIn {
        head: ForHead,
        right: Expr,
        body: Box<Stmt>,
        of: bool,
        span: Span,
    },
    While {
        test: Expr,
        body: Box<Stmt>,
        span: Span,
    },
    DoWhile {
        body: Box<Stmt>,
        test: Expr,
        span: Span,
    },
    Return {
        arg: Option<Expr>,
        span: Span,
    },
    Break {
        label: Option<Ident>,
        span: Span,
    },
    Continue {
        label: Option<Ident>,
        span: Span,
    },
    Throw {
        arg: Expr,
        span: Span,
    },
    Try {
        block: Vec<Stmt>,
        handler: Option<CatchClause>,
        finalizer: Option<Vec<Stmt>>,
        span: Span,
    },
    Switch {
        disc: Expr,
        cases: Vec<SwitchCase>,
        span: Span,
    },
    Labeled {
        label: Ident,
        body: Box<Stmt>,
        span: Span,
    },
    With {
        object: Expr,
        body: Box<Stmt>,
        span: Span,
    },
    Import(ImportDecl),
    Export(ExportDecl),
    Empty(Span),
    Debugger(Span),
}

#[derive(Debug, Clone)]
pub enum ForInit {
    Var(VarDecl),
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub enum ForHead {
    Var { kind: VarKind, target: Pattern },
    Expr(Expr),
}

#[derive(Debug, Clone)]
pub struct CatchClause {
    pub param: Option<Pattern>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct SwitchCase {
    pub test: Option<Expr>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct ImportDecl {
    pub source: StrLit,
    pub specifiers: Vec<ImportSpec>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ImportSpec {
    Default(Ident),
    Namespace(Ident),
    /// `{ imported as local }`; `imported` equals `local` for the shorthand form.
    Named {
        imported: String,
        local: Ident,
    },
}

impl ImportSpec {
    pub fn local(&self) -> &Ident {
        match self {
            ImportSpec::Default(l) | ImportSpec::Namespace(l) | ImportSpec::Named { local: l, .. } => l,
        }
    }

    /// Name as seen in the exporting module.
    pub fn imported_name(&self) -> &str {
        match self {
            ImportSpec::Default(_) => "default",
            ImportSpec::Namespace(_) => "*",
            ImportSpec::Named { imported, .. } => imported,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExportDecl {
    /// `export var|let|const|function|class ...`
    Decl { decl: Box<Stmt>, span: Span },
    /// `export default <expr>` or `export default function/class`.
    Default { body: ExportDefault, span: Span },
    /// `export { a, b as c } [from "..."]`
    Named { specifiers: Vec<ExportSpec>, source: Option<StrLit>, span: Span },
    /// `export * [as ns] from "..."`
    All { alias: Option<String>, source: StrLit, span: Span },
}

#[derive(Debug, Clone)]
pub enum ExportDefault {
    Expr(Expr),
    Function(Box<Function>),
    Class(Box<Class>),
}

#[derive(Debug, Clone)]
pub struct ExportSpec {
    /// Local binding (or the re-exported name when `source` is set).
    pub local: Ident,
    pub exported: String,
}

#[derive(Debug, Clone)]
pub struct Function {
    pub name: Option<Ident>,
    pub params: Vec<Pattern>,
    pub body: FunctionBody,
    pub is_arrow: bool,
    pub is_async: bool,
    pub is_generator: bool,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum FunctionBody {
    Block(Vec<Stmt>),
    /// Concise arrow body.
    Expr(Box<Expr>),
}

#[derive(Debug, Clone)]
pub struct Class {
    pub name: Option<Ident>,
    pub super_class: Option<Expr>,
    pub members: Vec<ClassMember>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum ClassMember {
    Method { key: PropKey, func: Box<Function>, is_static: bool, kind: MethodKind },
    Field { key: PropKey, value: Option<Expr>, is_static: bool, span: Span },
    StaticBlock { body: Vec<Stmt>, span: Span },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Method,
    Get,
    Set,
    Constructor,
}

#[derive(Debug, Clone)]
pub enum PropKey {
    Ident(Ident),
    Str(StrLit),
    Num(Span),
    Private(Ident),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrLit {
    /// Cooked value as UTF-16 code units.
    pub value: Vec<u16>,
    pub span: Span,
}

impl StrLit {
    pub fn value_string(&self) -> String {
        String::from_utf16_lossy(&self.value)
    }
}

#[derive(Debug, Clone)]
pub struct Template {
    /// Raw quasi spans, one more than `exprs`.
    pub quasis: Vec<Span>,
    pub exprs: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub enum Prop {
    KeyValue {
        key: PropKey,
        value: Expr,
    },
    /// `{ x }`, or `{ x = 1 }` when the literal is reinterpreted as a pattern.
    Shorthand {
        id: Ident,
        default: Option<Expr>,
    },
    Method {
        key: PropKey,
        func: Box<Function>,
        kind: MethodKind,
    },
    Spread(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalOp {
    And,
    Or,
    Nullish,
}

#[derive(Debug, Clone)]
pub enum MemberProp {
    /// `.name`; `dot_span` covers the `.` (or `?.`) through the end of the name.
    Static {
        name: Ident,
        dot_span: Span,
    },
    Private(Ident),
    Computed(Box<Expr>),
}

#[derive(Debug, Clone)]
pub enum Expr {
    Ident(Ident),
    Str(StrLit),
    Num(Span),
    Regex(Span),
    Template(Box<Template>),
    TaggedTemplate {
        tag: Box<Expr>,
        quasi: Box<Template>,
        span: Span,
    },
    /// `this`, `super`, `null`, `true`, `false`, `new.target`, `import.meta`.
    Keyword(Span),
    Array {
        elems: Vec<Option<Expr>>,
        span: Span,
    },
    Object {
        props: Vec<Prop>,
        span: Span,
    },
    Function(Box<Function>),
    Class(Box<Class>),
    Unary {
        op: String,
        arg: Box<Expr>,
        span: Span,
    },
    Update {
        arg: Box<Expr>,
        span: Span,
    },
    Binary {
        op: String,
        left: Box<Expr>,
        right: Box<Expr>,
        span: Span,
    },
    Logical {
        op: LogicalOp,
        left: Box<Expr>,
        right: Box<Expr>,
        span: Span,
    },
    Assign {
        op: String,
        target: Box<Expr>,
        value: Box<Expr>,
        span: Span,
    },
    Cond {
        test: Box<Expr>,
        cons: Box<Expr>,
        alt: Box<Expr>,
        span: Span,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        optional: bool,
        span: Span,
    },
    New {
        callee: Box<Expr>,
        args: Vec<Expr>,
        span: Span,
    },
    Member {
        object: Box<Expr>,
        prop: MemberProp,
        optional: bool,
        span: Span,
    },
    Seq {
        exprs: Vec<Expr>,
        span: Span,
    },
    Spread {
        arg: Box<Expr>,
        span: Span,
    },
    Yield {
        arg: Option<Box<Expr>>,
        span: Span,
    },
    Await {
        arg: Box<Expr>,
        span: Span,
    },
    Paren {
        expr: Box<Expr>,
        span: Span,
    },
    /// Dynamic `import(...)`.
    ImportCall {
        arg: Box<Expr>,
        span: Span,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident(i) => i.span,
            Expr::Str(s) => s.span,
            Expr::Num(s) | Expr::Regex(s) | Expr::Keyword(s) => *s,
            Expr::Template(t) => t.span,
            Expr::Function(f) => f.span,
            Expr::Class(c) => c.span,
            Expr::TaggedTemplate { span, .. }
            | Expr::Array { span, .. }
            | Expr::Object { span, .. }
            | Expr::Unary { span, .. }
            | Expr::Update { span, .. }
            | Expr::Binary { span, .. }
            | Expr::Logical { span, .. }
            | Expr::Assign { span, .. }
            | Expr::Cond { span, .. }
            | Expr::Call { span, .. }
            | Expr::New { span, .. }
            | Expr::Member { span, .. }
            | Expr::Seq { span, .. }
            | Expr::Spread { span, .. }
            | Expr::Yield { span, .. }
            | Expr::Await { span, .. }
            | Expr::Paren { span, .. }
            | Expr::ImportCall { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Pattern {
    Ident(Ident),
    Object {
        props: Vec<PatProp>,
        span: Span,
    },
    Array {
        elems: Vec<Option<Pattern>>,
        span: Span,
    },
    Assign {
        target: Box<Pattern>,
        default: Box<Expr>,
        span: Span,
    },
    Rest {
        arg: Box<Pattern>,
        span: Span,
    },
    /// Member expression target; only legal in assignment positions.
    Expr(Box<Expr>),
}

impl Pattern {
    pub fn span(&self) -> Span {
        match self {
            Pattern::Ident(i) => i.span,
            Pattern::Object { span, .. }
            | Pattern::Array { span, .. }
            | Pattern::Assign { span, .. }
            | Pattern::Rest { span, .. } => *span,
            Pattern::Expr(e) => e.span(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PatProp {
    KeyValue { key: PropKey, value: Pattern },
    Shorthand { id: Ident, default: Option<Expr> },
    Rest(Pattern),
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Var(v) => v.span,
            Stmt::Function(f) => f.span,
            Stmt::Class(c) => c.span,
            Stmt::Import(i) => i.span,
            Stmt::Export(e) => match e {
                ExportDecl::Decl { span, .. }
                | ExportDecl::Default { span, .. }
                | ExportDecl::Named { span, .. }
                | ExportDecl::All { span, .. } => *span,
            },
            Stmt::Empty(s) | Stmt::Debugger(s) => *s,
            Stmt::Expr { span, .. }
            | Stmt::Directive { span, .. }
            | Stmt::Block { span, .. }
            | Stmt::If { span, .. }
            | Stmt::For { span, .. }
            | Stmt::ForIn { span, .. }
            | Stmt::While { span, .. }
            | Stmt::DoWhile { span, .. }
            | Stmt::Return { span, .. }
            | Stmt::Break { span, .. }
            | Stmt::Continue { span, .. }
            | Stmt::Throw { span, .. }
            | Stmt::Try { span, .. }
            | Stmt::Switch { span, .. }
            | Stmt::Labeled { span, .. }
            | Stmt::With { span, .. } => *span,
        }
    }
}

/// Coarse node classification used by diagnostics and generic walkers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Program,
    FunctionDecl,
    FunctionExpr,
    Arrow,
    Class,
    Block,
    VarDecl,
    Param,
    IdentifierRef,
    MemberAccess,
    StringLit,
    Call,
    ImportDecl,
    ExportDecl,
    OtherStatement,
}

impl Stmt {
    pub fn node_kind(&self) -> NodeKind {
        match self {
            Stmt::Var(_) => NodeKind::VarDecl,
            Stmt::Function(_) => NodeKind::FunctionDecl,
            Stmt::Class(_) => NodeKind::Class,
            Stmt::Block { .. } => NodeKind::Block,
            Stmt::Import(_) => NodeKind::ImportDecl,
            Stmt::Export(_) => NodeKind::ExportDecl,
            _ => NodeKind::OtherStatement,
        }
    }
}
