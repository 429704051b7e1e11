//! Recursive-descent parser over the significant tokens from the lexer.

use super::ast::*;
use super::lexer::{TemplatePart, Token, TokenKind};
use super::{FileId, ParseError, Span};

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    kind: TokenKind,
    text: &'a str,
    span: Span,
    nl_before: bool,
}

const EOF_TEXT: &str = "";

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    file: FileId,
    src_len: usize,
    prev_end: usize,
    in_async: bool,
    in_generator: bool,
    is_module: bool,
}

type PResult<T> = Result<T, ParseError>;

const ASSIGN_OPS: &[&str] =
    &["=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "??="];

fn binary_precedence(op: &str, no_in: bool) -> Option<u8> {
    Some(match op {
        "||" | "??" => 1,
        "&&" => 2,
        "|" => 3,
        "^" => 4,
        "&" => 5,
        "==" | "!=" | "===" | "!==" => 6,
        "<" | ">" | "<=" | ">=" | "instanceof" => 7,
        "in" if !no_in => 7,
        "<<" | ">>" | ">>>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        "**" => 11,
        _ => return None,
    })
}

/// Parses a token stream (trivia included) into a [`Program`].
pub fn parse_tokens(tokens: &[Token<'_>], file: FileId, src_len: usize) -> PResult<Program> {
    let mut toks = Vec::with_capacity(tokens.len() / 2 + 1);
    let mut nl = false;
    let mut hashbang_end = 0;
    for t in tokens {
        if t.is_trivia() {
            if t.span.start == 0 && t.text.starts_with("#!") {
                hashbang_end = t.span.end;
            }
            nl |= t.has_newline();
            continue;
        }
        toks.push(Tok { kind: t.kind, text: t.text, span: t.span, nl_before: nl });
        nl = false;
    }
    let is_module = toks.iter().enumerate().any(|(i, t)| {
        t.kind == TokenKind::Keyword
            && (t.text == "export"
                || (t.text == "import" && toks.get(i + 1).is_some_and(|n| n.text != "(" && n.text != ".")))
    });
    let mut p = Parser {
        toks,
        pos: 0,
        file,
        src_len,
        prev_end: 0,
        // Module top level allows `await`.
        in_async: is_module,
        in_generator: false,
        is_module,
    };
    p.parse_program(hashbang_end)
}

impl<'a> Parser<'a> {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> Tok<'a> {
        self.peek_at(0)
    }

    fn peek_at(&self, n: usize) -> Tok<'a> {
        self.toks.get(self.pos + n).copied().unwrap_or(Tok {
            kind: TokenKind::Whitespace,
            text: EOF_TEXT,
            span: Span::new(self.src_len, self.src_len),
            nl_before: true,
        })
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn start(&self) -> usize {
        self.peek().span.start
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.peek();
        if !self.at_eof() {
            self.pos += 1;
            self.prev_end = t.span.end;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Punct && t.text == p
    }

    fn is_kw(&self, k: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Keyword && t.text == k
    }

    fn is_ident_named(&self, name: &str) -> bool {
        let t = self.peek();
        t.kind == TokenKind::Identifier && t.text == name
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { file: self.file, offset: self.start(), message: msg.into() })
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            let t = self.peek();
            let found = if self.at_eof() { "end of input" } else { t.text };
            self.error(format!("expected `{p}`, found `{found}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{k}`"))
        }
    }

    fn consume_semicolon(&mut self) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        if self.is_punct("}") || self.at_eof() || self.peek().nl_before {
            return Ok(());
        }
        self.error(format!("unexpected token `{}`", self.peek().text))
    }

    fn binding_ident(&mut self) -> PResult<Ident> {
        let t = self.peek();
        if t.kind == TokenKind::Identifier {
            self.bump();
            Ok(Ident { name: t.text.to_string(), span: t.span })
        } else {
            self.error(format!("expected identifier, found `{}`", t.text))
        }
    }

    /// Any identifier or keyword, as used after `.` and in property keys.
    fn identifier_name(&mut self) -> PResult<Ident> {
        let t = self.peek();
        if matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) {
            self.bump();
            Ok(Ident { name: t.text.to_string(), span: t.span })
        } else {
            self.error(format!("expected property name, found `{}`", t.text))
        }
    }

    // ---- program & statements -----------------------------------------

    fn parse_program(&mut self, hashbang_end: usize) -> PResult<Program> {
        let (directives, prologue) = self.parse_directives()?;
        let mut body = directives;
        let (prologue_end, prologue_terminated) = prologue.unwrap_or((hashbang_end, true));
        while !self.at_eof() {
            body.push(self.parse_statement_list_item()?);
        }
        Ok(Program {
            span: Span::new(0, self.src_len),
            body,
            is_module: self.is_module,
            prologue_end,
            prologue_terminated,
        })
    }

    /// Leading string-literal statements. Returns them plus (end offset,
    /// ended-with-semicolon) of the last one.
    #[allow(clippy::type_complexity)]
    fn parse_directives(&mut self) -> PResult<(Vec<Stmt>, Option<(usize, bool)>)> {
        let mut out = Vec::new();
        let mut last = None;
        loop {
            let t = self.peek();
            if t.kind != TokenKind::String {
                break;
            }
            let next = self.peek_at(1);
            let ends = (next.kind == TokenKind::Punct && (next.text == ";" || next.text == "}"))
                || self.pos + 1 >= self.toks.len()
                || (next.nl_before
                    && matches!(next.kind, TokenKind::Identifier | TokenKind::Keyword | TokenKind::String));
            if !ends {
                break;
            }
            self.bump();
            let lit = StrLit { value: cook_string(t.text), span: t.span };
            let terminated = self.eat_punct(";");
            let span = self.span_from(t.span.start);
            last = Some((span.end, terminated));
            out.push(Stmt::Directive { lit, span });
        }
        Ok((out, last))
    }

    fn parse_statement_list_item(&mut self) -> PResult<Stmt> {
        let t = self.peek();
        match (t.kind, t.text) {
            (TokenKind::Keyword, "function") => {
                Ok(Stmt::Function(Box::new(self.parse_function(false, true, t.span.start)?)))
            }
            (TokenKind::Identifier, "async") if self.peek_at(1).text == "function" && !self.peek_at(1).nl_before => {
                let start = t.span.start;
                self.bump();
                Ok(Stmt::Function(Box::new(self.parse_function(true, true, start)?)))
            }
            (TokenKind::Keyword, "class") => Ok(Stmt::Class(Box::new(self.parse_class(true)?))),
            (TokenKind::Keyword, "const") => self.parse_var_statement(VarKind::Const),
            (TokenKind::Identifier, "let") if self.let_starts_declaration() => self.parse_var_statement(VarKind::Let),
            (TokenKind::Keyword, "import") if !matches!(self.peek_at(1).text, "(" | ".") => self.parse_import(),
            (TokenKind::Keyword, "export") => self.parse_export(),
            _ => self.parse_statement(),
        }
    }

    fn let_starts_declaration(&self) -> bool {
        let n = self.peek_at(1);
        n.kind == TokenKind::Identifier
            || (n.kind == TokenKind::Punct && (n.text == "[" || n.text == "{"))
            || (n.kind == TokenKind::Keyword && matches!(n.text, "yield" | "await"))
    }

    fn parse_statement(&mut self) -> PResult<Stmt> {
        let t = self.peek();
        let start = t.span.start;
        if self.at_eof() {
            return self.error("unexpected end of input");
        }
        match (t.kind, t.text) {
            (TokenKind::Punct, "{") => {
                let body = self.parse_block_body()?;
                Ok(Stmt::Block { body, span: self.span_from(start) })
            }
            (TokenKind::Punct, ";") => {
                self.bump();
                Ok(Stmt::Empty(t.span))
            }
            (TokenKind::Keyword, "var") => self.parse_var_statement(VarKind::Var),
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.expect_punct("(")?;
                let test = self.parse_expression(false)?;
                self.expect_punct(")")?;
                let cons = Box::new(self.parse_statement()?);
                let alt = if self.is_kw("else") {
                    self.bump();
                    Some(Box::new(self.parse_statement()?))
                } else {
                    None
                };
                Ok(Stmt::If { test, cons, alt, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "for") => self.parse_for(),
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.expect_punct("(")?;
                let test = self.parse_expression(false)?;
                self.expect_punct(")")?;
                let body = Box::new(self.parse_statement()?);
                Ok(Stmt::While { test, body, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "do") => {
                self.bump();
                let body = Box::new(self.parse_statement()?);
                self.expect_kw("while")?;
                self.expect_punct("(")?;
                let test = self.parse_expression(false)?;
                self.expect_punct(")")?;
                self.eat_punct(";");
                Ok(Stmt::DoWhile { body, test, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let arg = if self.is_punct(";") || self.is_punct("}") || self.at_eof() || self.peek().nl_before {
                    None
                } else {
                    Some(self.parse_expression(false)?)
                };
                self.consume_semicolon()?;
                Ok(Stmt::Return { arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, kw @ ("break" | "continue")) => {
                self.bump();
                let label = if self.peek().kind == TokenKind::Identifier && !self.peek().nl_before {
                    Some(self.binding_ident()?)
                } else {
                    None
                };
                self.consume_semicolon()?;
                let span = self.span_from(start);
                Ok(if kw == "break" { Stmt::Break { label, span } } else { Stmt::Continue { label, span } })
            }
            (TokenKind::Keyword, "throw") => {
                self.bump();
                if self.peek().nl_before {
                    return self.error("newline after throw");
                }
                let arg = self.parse_expression(false)?;
                self.consume_semicolon()?;
                Ok(Stmt::Throw { arg, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "try") => self.parse_try(),
            (TokenKind::Keyword, "switch") => self.parse_switch(),
            (TokenKind::Keyword, "with") => {
                self.bump();
                self.expect_punct("(")?;
                let object = self.parse_expression(false)?;
                self.expect_punct(")")?;
                let body = Box::new(self.parse_statement()?);
                Ok(Stmt::With { object, body, span: self.span_from(start) })
            }
            (TokenKind::Keyword, "debugger") => {
                self.bump();
                self.consume_semicolon()?;
                Ok(Stmt::Debugger(self.span_from(start)))
            }
            (TokenKind::Keyword, "function") | (TokenKind::Keyword, "class") => self.parse_statement_list_item(),
            (TokenKind::Keyword, "const") => self.parse_var_statement(VarKind::Const),
            (TokenKind::Identifier, _) if self.peek_at(1).text == ":" && self.peek_at(1).kind == TokenKind::Punct => {
                let label = self.binding_ident()?;
                self.bump();
                let body = Box::new(self.parse_statement()?);
                Ok(Stmt::Labeled { label, body, span: self.span_from(start) })
            }
            (TokenKind::Identifier, "let") if self.let_starts_declaration() => self.parse_var_statement(VarKind::Let),
            (TokenKind::Identifier, "async") if self.peek_at(1).text == "function" && !self.peek_at(1).nl_before => {
                self.parse_statement_list_item()
            }
            _ => {
                let expr = self.parse_expression(false)?;
                self.consume_semicolon()?;
                Ok(Stmt::Expr { expr, span: self.span_from(start) })
            }
        }
    }

    fn parse_block_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.error("unterminated block");
            }
            body.push(self.parse_statement_list_item()?);
        }
        self.bump();
        Ok(body)
    }

    fn parse_var_statement(&mut self, kind: VarKind) -> PResult<Stmt> {
        let decl = self.parse_var_decl(kind, false)?;
        self.consume_semicolon()?;
        let span = self.span_from(decl.span.start);
        Ok(Stmt::Var(VarDecl { span, ..decl }))
    }

    fn parse_var_decl(&mut self, kind: VarKind, no_in: bool) -> PResult<VarDecl> {
        let start = self.start();
        self.bump();
        let mut decls = Vec::new();
        loop {
            let target = self.parse_binding_target()?;
            let init = if self.eat_punct("=") { Some(self.parse_assign(no_in)?) } else { None };
            decls.push(VarDeclarator { target, init });
            if !self.eat_punct(",") {
                break;
            }
        }
        Ok(VarDecl { kind, decls, span: self.span_from(start) })
    }

    fn parse_for(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.bump();
        let is_await = self.is_ident_named("await");
        if is_await {
            self.bump();
        }
        let stmt = self.parse_for_rest(start)?;
        match stmt {
            Stmt::ForIn { of: false, .. } | Stmt::For { .. } if is_await => self.error("for await requires `of`"),
            s => Ok(s),
        }
    }

    fn parse_for_rest(&mut self, start: usize) -> PResult<Stmt> {
        self.expect_punct("(")?;
        let mut init = None;
        if self.is_punct(";") {
            // no init
        } else {
            let var_kind = if self.is_kw("var") {
                Some(VarKind::Var)
            } else if self.is_kw("const") {
                Some(VarKind::Const)
            } else if self.is_ident_named("let") && self.let_starts_declaration() {
                Some(VarKind::Let)
            } else {
                None
            };
            if let Some(kind) = var_kind {
                let decl = self.parse_var_decl(kind, true)?;
                let of = self.is_ident_named("of");
                if (of || self.is_kw("in")) && decl.decls.len() == 1 && decl.decls[0].init.is_none() {
                    self.bump();
                    let right = if of { self.parse_assign(false)? } else { self.parse_expression(false)? };
                    self.expect_punct(")")?;
                    let body = Box::new(self.parse_statement()?);
                    let target = decl.decls.into_iter().next().unwrap().target;
                    return Ok(Stmt::ForIn {
                        head: ForHead::Var { kind, target },
                        right,
                        body,
                        of,
                        span: self.span_from(start),
                    });
                }
                init = Some(ForInit::Var(decl));
            } else {
                let expr = self.parse_expression(true)?;
                let of = self.is_ident_named("of");
                if of || self.is_kw("in") {
                    self.bump();
                    let right = if of { self.parse_assign(false)? } else { self.parse_expression(false)? };
                    self.expect_punct(")")?;
                    let body = Box::new(self.parse_statement()?);
                    return Ok(Stmt::ForIn { head: ForHead::Expr(expr), right, body, of, span: self.span_from(start) });
                }
                init = Some(ForInit::Expr(expr));
            }
        }
        self.expect_punct(";")?;
        let test = if self.is_punct(";") { None } else { Some(self.parse_expression(false)?) };
        self.expect_punct(";")?;
        let update = if self.is_punct(")") { None } else { Some(self.parse_expression(false)?) };
        self.expect_punct(")")?;
        let body = Box::new(self.parse_statement()?);
        Ok(Stmt::For { init, test, update, body, span: self.span_from(start) })
    }

    fn parse_try(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.bump();
        let block = self.parse_block_body()?;
        let mut handler = None;
        let mut finalizer = None;
        if self.is_kw("catch") {
            let cstart = self.start();
            self.bump();
            let param = if self.eat_punct("(") {
                let p = self.parse_binding_target()?;
                self.expect_punct(")")?;
                Some(p)
            } else {
                None
            };
            let body = self.parse_block_body()?;
            handler = Some(CatchClause { param, body, span: self.span_from(cstart) });
        }
        if self.is_kw("finally") {
            self.bump();
            finalizer = Some(self.parse_block_body()?);
        }
        if handler.is_none() && finalizer.is_none() {
            return self.error("try without catch or finally");
        }
        Ok(Stmt::Try { block, handler, finalizer, span: self.span_from(start) })
    }

    fn parse_switch(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.bump();
        self.expect_punct("(")?;
        let disc = self.parse_expression(false)?;
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut cases = Vec::new();
        while !self.eat_punct("}") {
            let cstart = self.start();
            let test = if self.is_kw("case") {
                self.bump();
                Some(self.parse_expression(false)?)
            } else if self.is_kw("default") {
                self.bump();
                None
            } else {
                return self.error("expected `case` or `default`");
            };
            self.expect_punct(":")?;
            let mut body = Vec::new();
            while !(self.is_kw("case") || self.is_kw("default") || self.is_punct("}")) {
                if self.at_eof() {
                    return self.error("unterminated switch");
                }
                body.push(self.parse_statement_list_item()?);
            }
            cases.push(SwitchCase { test, body, span: self.span_from(cstart) });
        }
        Ok(Stmt::Switch { disc, cases, span: self.span_from(start) })
    }

    // ---- modules ---------------------------------------------------------

    fn module_string(&mut self) -> PResult<StrLit> {
        let t = self.peek();
        if t.kind != TokenKind::String {
            return self.error("expected module specifier string");
        }
        self.bump();
        Ok(StrLit { value: cook_string(t.text), span: t.span })
    }

    /// Export/import names may be identifiers, keywords or strings.
    fn module_export_name(&mut self) -> PResult<Ident> {
        let t = self.peek();
        if t.kind == TokenKind::String {
            self.bump();
            return Ok(Ident { name: String::from_utf16_lossy(&cook_string(t.text)), span: t.span });
        }
        self.identifier_name()
    }

    fn parse_import(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.bump();
        let mut specifiers = Vec::new();
        if self.peek().kind == TokenKind::String {
            let source = self.module_string()?;
            self.consume_semicolon()?;
            return Ok(Stmt::Import(ImportDecl { source, specifiers, span: self.span_from(start) }));
        }
        if self.peek().kind == TokenKind::Identifier {
            specifiers.push(ImportSpec::Default(self.binding_ident()?));
            if !self.eat_punct(",") {
                return self.finish_import(start, specifiers);
            }
        }
        if self.eat_punct("*") {
            if !self.is_ident_named("as") {
                return self.error("expected `as`");
            }
            self.bump();
            specifiers.push(ImportSpec::Namespace(self.binding_ident()?));
        } else if self.eat_punct("{") {
            while !self.eat_punct("}") {
                let imported = self.module_export_name()?;
                let local = if self.is_ident_named("as") {
                    self.bump();
                    self.binding_ident()?
                } else {
                    imported.clone()
                };
                specifiers.push(ImportSpec::Named { imported: imported.name, local });
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
        }
        self.finish_import(start, specifiers)
    }

    fn finish_import(&mut self, start: usize, specifiers: Vec<ImportSpec>) -> PResult<Stmt> {
        if !self.is_ident_named("from") {
            return self.error("expected `from`");
        }
        self.bump();
        let source = self.module_string()?;
        self.consume_semicolon()?;
        Ok(Stmt::Import(ImportDecl { source, specifiers, span: self.span_from(start) }))
    }

    fn parse_export(&mut self) -> PResult<Stmt> {
        let start = self.start();
        self.bump();
        if self.is_kw("default") {
            self.bump();
            let t = self.peek();
            let body = if t.text == "function" && t.kind == TokenKind::Keyword {
                ExportDefault::Function(Box::new(self.parse_function(false, false, t.span.start)?))
            } else if t.text == "async" && self.peek_at(1).text == "function" && !self.peek_at(1).nl_before {
                self.bump();
                ExportDefault::Function(Box::new(self.parse_function(true, false, t.span.start)?))
            } else if t.text == "class" && t.kind == TokenKind::Keyword {
                ExportDefault::Class(Box::new(self.parse_class(false)?))
            } else {
                let e = self.parse_assign(false)?;
                self.consume_semicolon()?;
                ExportDefault::Expr(e)
            };
            return Ok(Stmt::Export(ExportDecl::Default { body, span: self.span_from(start) }));
        }
        if self.eat_punct("*") {
            let alias = if self.is_ident_named("as") {
                self.bump();
                Some(self.module_export_name()?.name)
            } else {
                None
            };
            if !self.is_ident_named("from") {
                return self.error("expected `from`");
            }
            self.bump();
            let source = self.module_string()?;
            self.consume_semicolon()?;
            return Ok(Stmt::Export(ExportDecl::All { alias, source, span: self.span_from(start) }));
        }
        if self.eat_punct("{") {
            let mut specifiers = Vec::new();
            while !self.eat_punct("}") {
                let local = self.module_export_name()?;
                let exported = if self.is_ident_named("as") {
                    self.bump();
                    self.module_export_name()?.name
                } else {
                    local.name.clone()
                };
                specifiers.push(ExportSpec { local, exported });
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            let source = if self.is_ident_named("from") {
                self.bump();
                Some(self.module_string()?)
            } else {
                None
            };
            self.consume_semicolon()?;
            return Ok(Stmt::Export(ExportDecl::Named { specifiers, source, span: self.span_from(start) }));
        }
        let decl = match self.peek().text {
            "var" | "let" | "const" | "function" | "class" | "async" => self.parse_statement_list_item()?,
            _ => return self.error("unsupported export form"),
        };
        if !matches!(decl, Stmt::Var(_) | Stmt::Function(_) | Stmt::Class(_)) {
            return self.error("unsupported export form");
        }
        Ok(Stmt::Export(ExportDecl::Decl { decl: Box::new(decl), span: self.span_from(start) }))
    }

    // ---- functions & classes --------------------------------------------

    /// Parses from the `function` keyword. `start` may point at a preceding `async`.
    fn parse_function(&mut self, is_async: bool, require_name: bool, start: usize) -> PResult<Function> {
        self.expect_kw("function")?;
        let is_generator = self.eat_punct("*");
        let name = if self.peek().kind == TokenKind::Identifier {
            Some(self.binding_ident()?)
        } else if require_name {
            return self.error("function declaration requires a name");
        } else {
            None
        };
        let (params, body) = self.parse_function_rest(is_async, is_generator)?;
        Ok(Function {
            name,
            params,
            body: FunctionBody::Block(body),
            is_arrow: false,
            is_async,
            is_generator,
            span: self.span_from(start),
        })
    }

    fn parse_function_rest(&mut self, is_async: bool, is_generator: bool) -> PResult<(Vec<Pattern>, Vec<Stmt>)> {
        let saved = (self.in_async, self.in_generator);
        self.in_async = is_async;
        self.in_generator = is_generator;
        let params = self.parse_params()?;
        let body = self.parse_function_body();
        (self.in_async, self.in_generator) = saved;
        Ok((params, body?))
    }

    fn parse_function_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let (mut body, _) = self.parse_directives()?;
        while !self.is_punct("}") {
            if self.at_eof() {
                return self.error("unterminated function body");
            }
            body.push(self.parse_statement_list_item()?);
        }
        self.bump();
        Ok(body)
    }

    fn parse_params(&mut self) -> PResult<Vec<Pattern>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.eat_punct(")") {
            if self.is_punct("...") {
                let start = self.start();
                self.bump();
                let arg = Box::new(self.parse_binding_target()?);
                params.push(Pattern::Rest { arg, span: self.span_from(start) });
            } else {
                params.push(self.parse_binding_element()?);
            }
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(params)
    }

    fn parse_class(&mut self, require_name: bool) -> PResult<Class> {
        let start = self.start();
        self.expect_kw("class")?;
        let name = if self.peek().kind == TokenKind::Identifier && !self.is_ident_named("extends") {
            Some(self.binding_ident()?)
        } else if require_name {
            return self.error("class declaration requires a name");
        } else {
            None
        };
        let super_class = if self.is_kw("extends") {
            self.bump();
            Some(self.parse_lhs()?)
        } else {
            None
        };
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.eat_punct("}") {
            if self.eat_punct(";") {
                continue;
            }
            if self.at_eof() {
                return self.error("unterminated class body");
            }
            members.push(self.parse_class_member()?);
        }
        Ok(Class { name, super_class, members, span: self.span_from(start) })
    }

    /// True when the current identifier is a modifier rather than a key.
    fn modifier_applies(&self) -> bool {
        let n = self.peek_at(1);
        !(n.kind == TokenKind::Punct && matches!(n.text, "(" | "=" | ";" | "}" | ":" | ","))
    }

    fn parse_class_member(&mut self) -> PResult<ClassMember> {
        let start = self.start();
        let mut is_static = false;
        if self.is_ident_named("static") && self.modifier_applies() {
            self.bump();
            is_static = true;
            if self.is_punct("{") {
                let saved = (self.in_async, self.in_generator);
                self.in_async = false;
                self.in_generator = false;
                let body = self.parse_block_body();
                (self.in_async, self.in_generator) = saved;
                return Ok(ClassMember::StaticBlock { body: body?, span: self.span_from(start) });
            }
        }
        let (is_async, is_generator, accessor) = self.parse_method_modifiers();
        let key = self.parse_prop_key()?;
        if self.is_punct("(") {
            let kind = match accessor {
                Some(k) => k,
                None if !is_static && matches!(&key, PropKey::Ident(i) if i.name == "constructor") => {
                    MethodKind::Constructor
                }
                None => MethodKind::Method,
            };
            let fstart = self.start();
            let (params, body) = self.parse_function_rest(is_async, is_generator)?;
            let func = Function {
                name: None,
                params,
                body: FunctionBody::Block(body),
                is_arrow: false,
                is_async,
                is_generator,
                span: self.span_from(fstart),
            };
            return Ok(ClassMember::Method { key, func: Box::new(func), is_static, kind });
        }
        let value = if self.eat_punct("=") {
            let saved = (self.in_async, self.in_generator);
            self.in_async = false;
            self.in_generator = false;
            let v = self.parse_assign(false);
            (self.in_async, self.in_generator) = saved;
            Some(v?)
        } else {
            None
        };
        self.consume_semicolon()?;
        Ok(ClassMember::Field { key, value, is_static, span: self.span_from(start) })
    }

    /// `async`, `*`, `get`, `set` prefixes on methods.
    fn parse_method_modifiers(&mut self) -> (bool, bool, Option<MethodKind>) {
        let mut is_async = false;
        let mut accessor = None;
        if self.is_ident_named("async") && self.modifier_applies() && !self.peek_at(1).nl_before {
            self.bump();
            is_async = true;
        }
        let is_generator = self.eat_punct("*");
        if !is_async && !is_generator {
            for (word, kind) in [("get", MethodKind::Get), ("set", MethodKind::Set)] {
                if self.is_ident_named(word) && self.modifier_applies() && self.peek_at(1).text != "," {
                    self.bump();
                    accessor = Some(kind);
                    break;
                }
            }
        }
        (is_async, is_generator, accessor)
    }

    fn parse_prop_key(&mut self) -> PResult<PropKey> {
        let t = self.peek();
        match t.kind {
            TokenKind::Identifier | TokenKind::Keyword => Ok(PropKey::Ident(self.identifier_name()?)),
            TokenKind::String => {
                self.bump();
                Ok(PropKey::Str(StrLit { value: cook_string(t.text), span: t.span }))
            }
            TokenKind::Number => {
                self.bump();
                Ok(PropKey::Num(t.span))
            }
            TokenKind::PrivateName => {
                self.bump();
                Ok(PropKey::Private(Ident { name: t.text.to_string(), span: t.span }))
            }
            TokenKind::Punct if t.text == "[" => {
                self.bump();
                let e = self.parse_assign(false)?;
                self.expect_punct("]")?;
                Ok(PropKey::Computed(Box::new(e)))
            }
            _ => self.error(format!("unexpected `{}` in property key", t.text)),
        }
    }

    // ---- patterns ----------------------------------------------------------

    fn parse_binding_target(&mut self) -> PResult<Pattern> {
        let start = self.start();
        if self.eat_punct("{") {
            let mut props = Vec::new();
            while !self.eat_punct("}") {
                if self.is_punct("...") {
                    self.bump();
                    props.push(PatProp::Rest(self.parse_binding_target()?));
                } else {
                    let key = self.parse_prop_key()?;
                    if self.eat_punct(":") {
                        let value = self.parse_binding_element()?;
                        props.push(PatProp::KeyValue { key, value });
                    } else {
                        let PropKey::Ident(id) = key else {
                            return self.error("expected `:` in object pattern");
                        };
                        if id.name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                            && super::lexer::is_keyword(&id.name)
                        {
                            return self.error("keyword used as binding");
                        }
                        let default = if self.eat_punct("=") { Some(self.parse_assign(false)?) } else { None };
                        props.push(PatProp::Shorthand { id, default });
                    }
                }
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            return Ok(Pattern::Object { props, span: self.span_from(start) });
        }
        if self.eat_punct("[") {
            let mut elems = Vec::new();
            loop {
                if self.eat_punct("]") {
                    break;
                }
                if self.eat_punct(",") {
                    elems.push(None);
                    continue;
                }
                if self.is_punct("...") {
                    let rstart = self.start();
                    self.bump();
                    let arg = Box::new(self.parse_binding_target()?);
                    elems.push(Some(Pattern::Rest { arg, span: self.span_from(rstart) }));
                } else {
                    elems.push(Some(self.parse_binding_element()?));
                }
                if !self.eat_punct(",") {
                    self.expect_punct("]")?;
                    break;
                }
            }
            return Ok(Pattern::Array { elems, span: self.span_from(start) });
        }
        Ok(Pattern::Ident(self.binding_ident()?))
    }

    fn parse_binding_element(&mut self) -> PResult<Pattern> {
        let start = self.start();
        let target = self.parse_binding_target()?;
        if self.eat_punct("=") {
            let default = Box::new(self.parse_assign(false)?);
            return Ok(Pattern::Assign { target: Box::new(target), default, span: self.span_from(start) });
        }
        Ok(target)
    }

    // ---- expressions -----------------------------------------------------

    fn parse_expression(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.start();
        let first = self.parse_assign(no_in)?;
        if !self.is_punct(",") {
            return Ok(first);
        }
        let mut exprs = vec![first];
        while self.eat_punct(",") {
            exprs.push(self.parse_assign(no_in)?);
        }
        Ok(Expr::Seq { exprs, span: self.span_from(start) })
    }

    /// Index of the `)` matching the `(` at token offset `open`.
    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0usize;
        for (i, t) in self.toks[open..].iter().enumerate() {
            if t.kind == TokenKind::Punct {
                match t.text {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth -= 1;
                        if depth == 0 {
                            return Some(open + i);
                        }
                    }
                    _ => {}
                }
            } else if let TokenKind::Template(TemplatePart::Head) = t.kind {
                depth += 1;
            } else if let TokenKind::Template(TemplatePart::Tail) = t.kind {
                depth = depth.saturating_sub(1);
            }
        }
        None
    }

    fn arrow_follows_paren(&self, open: usize) -> bool {
        match self.matching_paren(open) {
            Some(close) => {
                self.toks.get(close + 1).is_some_and(|t| t.kind == TokenKind::Punct && t.text == "=>" && !t.nl_before)
            }
            None => false,
        }
    }

    fn parse_assign(&mut self, no_in: bool) -> PResult<Expr> {
        let t = self.peek();
        let start = t.span.start;
        // Arrow functions.
        if t.kind == TokenKind::Identifier {
            let n = self.peek_at(1);
            if n.kind == TokenKind::Punct && n.text == "=>" && !n.nl_before {
                let param = self.binding_ident()?;
                return self.parse_arrow_body(vec![Pattern::Ident(param)], false, start, no_in);
            }
            if t.text == "async" && !n.nl_before {
                let n2 = self.peek_at(2);
                if n.kind == TokenKind::Identifier && n2.text == "=>" && !n2.nl_before {
                    self.bump();
                    let param = self.binding_ident()?;
                    return self.parse_arrow_body(vec![Pattern::Ident(param)], true, start, no_in);
                }
                if n.kind == TokenKind::Punct && n.text == "(" && self.arrow_follows_paren(self.pos + 1) {
                    self.bump();
                    let params = self.with_async(true, |p| p.parse_params())?;
                    return self.parse_arrow_body(params, true, start, no_in);
                }
            }
            if t.text == "yield" && self.in_generator {
                return self.parse_yield(no_in);
            }
        }
        if t.kind == TokenKind::Punct && t.text == "(" && self.arrow_follows_paren(self.pos) {
            let params = self.with_async(false, |p| p.parse_params())?;
            return self.parse_arrow_body(params, false, start, no_in);
        }

        let left = self.parse_conditional(no_in)?;
        let op = self.peek();
        if op.kind == TokenKind::Punct && ASSIGN_OPS.contains(&op.text) {
            self.bump();
            let value = self.parse_assign(no_in)?;
            return Ok(Expr::Assign {
                op: op.text.to_string(),
                target: Box::new(left),
                value: Box::new(value),
                span: self.span_from(start),
            });
        }
        Ok(left)
    }

    fn with_async<T>(&mut self, is_async: bool, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = (self.in_async, self.in_generator);
        self.in_async = is_async;
        self.in_generator = false;
        let r = f(self);
        (self.in_async, self.in_generator) = saved;
        r
    }

    fn parse_arrow_body(&mut self, params: Vec<Pattern>, is_async: bool, start: usize, no_in: bool) -> PResult<Expr> {
        self.expect_punct("=>")?;
        let body = if self.is_punct("{") {
            FunctionBody::Block(self.with_async(is_async, |p| p.parse_function_body())?)
        } else {
            FunctionBody::Expr(Box::new(self.with_async(is_async, |p| p.parse_assign(no_in))?))
        };
        Ok(Expr::Function(Box::new(Function {
            name: None,
            params,
            body,
            is_arrow: true,
            is_async,
            is_generator: false,
            span: self.span_from(start),
        })))
    }

    fn parse_yield(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.start();
        self.bump();
        let delegate = !self.peek().nl_before && self.eat_punct("*");
        let t = self.peek();
        let ends = self.at_eof()
            || (t.nl_before && !delegate)
            || (t.kind == TokenKind::Punct && matches!(t.text, ")" | "]" | "}" | "," | ";" | ":"));
        let arg = if ends && !delegate { None } else { Some(Box::new(self.parse_assign(no_in)?)) };
        Ok(Expr::Yield { arg, span: self.span_from(start) })
    }

    fn parse_conditional(&mut self, no_in: bool) -> PResult<Expr> {
        let start = self.start();
        let test = self.parse_binary(0, no_in)?;
        if !self.eat_punct("?") {
            return Ok(test);
        }
        let cons = self.parse_assign(false)?;
        self.expect_punct(":")?;
        let alt = self.parse_assign(no_in)?;
        Ok(Expr::Cond { test: Box::new(test), cons: Box::new(cons), alt: Box::new(alt), span: self.span_from(start) })
    }

    fn parse_binary(&mut self, min_prec: u8, no_in: bool) -> PResult<Expr> {
        let start = self.start();
        let mut left = self.parse_unary()?;
        loop {
            let t = self.peek();
            if !matches!(t.kind, TokenKind::Punct | TokenKind::Keyword) {
                break;
            }
            let Some(prec) = binary_precedence(t.text, no_in) else { break };
            if prec <= min_prec {
                break;
            }
            self.bump();
            // `**` is right-associative.
            let right =
                if t.text == "**" { self.parse_binary(prec - 1, no_in)? } else { self.parse_binary(prec, no_in)? };
            let span = self.span_from(start);
            left = match t.text {
                "&&" => Expr::Logical { op: LogicalOp::And, left: Box::new(left), right: Box::new(right), span },
                "||" => Expr::Logical { op: LogicalOp::Or, left: Box::new(left), right: Box::new(right), span },
                "??" => Expr::Logical { op: LogicalOp::Nullish, left: Box::new(left), right: Box::new(right), span },
                op => Expr::Binary { op: op.to_string(), left: Box::new(left), right: Box::new(right), span },
            };
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        let start = t.span.start;
        let is_unary_op = (t.kind == TokenKind::Punct && matches!(t.text, "!" | "~" | "+" | "-"))
            || (t.kind == TokenKind::Keyword && matches!(t.text, "typeof" | "void" | "delete"));
        if is_unary_op {
            self.bump();
            let arg = self.parse_unary()?;
            return Ok(Expr::Unary { op: t.text.to_string(), arg: Box::new(arg), span: self.span_from(start) });
        }
        if t.kind == TokenKind::Punct && matches!(t.text, "++" | "--") {
            self.bump();
            let arg = self.parse_unary()?;
            return Ok(Expr::Update { arg: Box::new(arg), span: self.span_from(start) });
        }
        if t.kind == TokenKind::Identifier && t.text == "await" && self.in_async {
            self.bump();
            let arg = self.parse_unary()?;
            return Ok(Expr::Await { arg: Box::new(arg), span: self.span_from(start) });
        }
        let expr = self.parse_lhs()?;
        let n = self.peek();
        if n.kind == TokenKind::Punct && matches!(n.text, "++" | "--") && !n.nl_before {
            self.bump();
            return Ok(Expr::Update { arg: Box::new(expr), span: self.span_from(start) });
        }
        Ok(expr)
    }

    /// Call/member chains, `new`, and primaries.
    fn parse_lhs(&mut self) -> PResult<Expr> {
        let start = self.start();
        let mut expr = if self.is_kw("new") { self.parse_new()? } else { self.parse_primary()? };
        loop {
            let t = self.peek();
            if t.kind == TokenKind::Punct {
                match t.text {
                    "." => {
                        self.bump();
                        expr = self.member_after_dot(expr, start, t.span.start, false)?;
                    }
                    "?." => {
                        self.bump();
                        if self.is_punct("(") {
                            let args = self.parse_args()?;
                            expr = Expr::Call {
                                callee: Box::new(expr),
                                args,
                                optional: true,
                                span: self.span_from(start),
                            };
                        } else if self.eat_punct("[") {
                            let prop = self.parse_expression(false)?;
                            self.expect_punct("]")?;
                            expr = Expr::Member {
                                object: Box::new(expr),
                                prop: MemberProp::Computed(Box::new(prop)),
                                optional: true,
                                span: self.span_from(start),
                            };
                        } else {
                            expr = self.member_after_dot(expr, start, t.span.start, true)?;
                        }
                    }
                    "[" => {
                        self.bump();
                        let prop = self.parse_expression(false)?;
                        self.expect_punct("]")?;
                        expr = Expr::Member {
                            object: Box::new(expr),
                            prop: MemberProp::Computed(Box::new(prop)),
                            optional: false,
                            span: self.span_from(start),
                        };
                    }
                    "(" => {
                        let args = self.parse_args()?;
                        expr =
                            Expr::Call { callee: Box::new(expr), args, optional: false, span: self.span_from(start) };
                    }
                    _ => break,
                }
            } else if let TokenKind::Template(TemplatePart::Full | TemplatePart::Head) = t.kind {
                let quasi = self.parse_template()?;
                expr =
                    Expr::TaggedTemplate { tag: Box::new(expr), quasi: Box::new(quasi), span: self.span_from(start) };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn member_after_dot(&mut self, object: Expr, start: usize, dot_start: usize, optional: bool) -> PResult<Expr> {
        let t = self.peek();
        let prop = if t.kind == TokenKind::PrivateName {
            self.bump();
            MemberProp::Private(Ident { name: t.text.to_string(), span: t.span })
        } else {
            let name = self.identifier_name()?;
            let dot_span = Span::new(dot_start, name.span.end);
            MemberProp::Static { name, dot_span }
        };
        Ok(Expr::Member { object: Box::new(object), prop, optional, span: self.span_from(start) })
    }

    fn parse_new(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.bump();
        if self.eat_punct(".") {
            let id = self.identifier_name()?;
            if id.name != "target" {
                return self.error("expected `new.target`");
            }
            return Ok(Expr::Keyword(self.span_from(start)));
        }
        let mut callee = if self.is_kw("new") { self.parse_new()? } else { self.parse_primary()? };
        let cstart = callee.span().start;
        // Member accesses bind tighter than `new`, calls do not.
        loop {
            if self.is_punct(".") {
                let dot = self.bump();
                callee = self.member_after_dot(callee, cstart, dot.span.start, false)?;
            } else if self.eat_punct("[") {
                let prop = self.parse_expression(false)?;
                self.expect_punct("]")?;
                callee = Expr::Member {
                    object: Box::new(callee),
                    prop: MemberProp::Computed(Box::new(prop)),
                    optional: false,
                    span: self.span_from(cstart),
                };
            } else if matches!(self.peek().kind, TokenKind::Template(TemplatePart::Full | TemplatePart::Head)) {
                let quasi = self.parse_template()?;
                callee = Expr::TaggedTemplate {
                    tag: Box::new(callee),
                    quasi: Box::new(quasi),
                    span: self.span_from(cstart),
                };
            } else {
                break;
            }
        }
        let args = if self.is_punct("(") { self.parse_args()? } else { Vec::new() };
        Ok(Expr::New { callee: Box::new(callee), args, span: self.span_from(start) })
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        while !self.eat_punct(")") {
            if self.is_punct("...") {
                let start = self.start();
                self.bump();
                let arg = self.parse_assign(false)?;
                args.push(Expr::Spread { arg: Box::new(arg), span: self.span_from(start) });
            } else {
                args.push(self.parse_assign(false)?);
            }
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(args)
    }

    fn parse_template(&mut self) -> PResult<Template> {
        let first = self.bump();
        let start = first.span.start;
        let mut quasis = vec![first.span];
        let mut exprs = Vec::new();
        if first.kind == TokenKind::Template(TemplatePart::Full) {
            return Ok(Template { quasis, exprs, span: first.span });
        }
        loop {
            exprs.push(self.parse_expression(false)?);
            let t = self.peek();
            match t.kind {
                TokenKind::Template(TemplatePart::Middle) => {
                    self.bump();
                    quasis.push(t.span);
                }
                TokenKind::Template(TemplatePart::Tail) => {
                    self.bump();
                    quasis.push(t.span);
                    break;
                }
                _ => return self.error("expected template continuation"),
            }
        }
        Ok(Template { quasis, exprs, span: self.span_from(start) })
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        let start = t.span.start;
        match t.kind {
            TokenKind::Identifier => {
                if t.text == "async" && self.peek_at(1).text == "function" && !self.peek_at(1).nl_before {
                    self.bump();
                    return Ok(Expr::Function(Box::new(self.parse_function(true, false, start)?)));
                }
                self.bump();
                Ok(Expr::Ident(Ident { name: t.text.to_string(), span: t.span }))
            }
            TokenKind::Number => {
                self.bump();
                Ok(Expr::Num(t.span))
            }
            TokenKind::String => {
                self.bump();
                Ok(Expr::Str(StrLit { value: cook_string(t.text), span: t.span }))
            }
            TokenKind::Regex => {
                self.bump();
                Ok(Expr::Regex(t.span))
            }
            TokenKind::Template(TemplatePart::Full | TemplatePart::Head) => {
                Ok(Expr::Template(Box::new(self.parse_template()?)))
            }
            TokenKind::Keyword => match t.text {
                "this" | "null" | "true" | "false" | "super" => {
                    self.bump();
                    Ok(Expr::Keyword(t.span))
                }
                "function" => Ok(Expr::Function(Box::new(self.parse_function(false, false, start)?))),
                "class" => Ok(Expr::Class(Box::new(self.parse_class(false)?))),
                "new" => self.parse_new(),
                "import" => {
                    self.bump();
                    if self.eat_punct(".") {
                        let id = self.identifier_name()?;
                        if id.name != "meta" {
                            return self.error("expected `import.meta`");
                        }
                        return Ok(Expr::Keyword(self.span_from(start)));
                    }
                    self.expect_punct("(")?;
                    let arg = self.parse_assign(false)?;
                    self.expect_punct(")")?;
                    Ok(Expr::ImportCall { arg: Box::new(arg), span: self.span_from(start) })
                }
                _ => self.error(format!("unexpected keyword `{}`", t.text)),
            },
            TokenKind::Punct => match t.text {
                "(" => {
                    self.bump();
                    let expr = self.parse_expression(false)?;
                    self.expect_punct(")")?;
                    Ok(Expr::Paren { expr: Box::new(expr), span: self.span_from(start) })
                }
                "[" => self.parse_array(),
                "{" => self.parse_object(),
                _ => self.error(format!("unexpected `{}`", t.text)),
            },
            _ if self.at_eof() => self.error("unexpected end of input"),
            _ => self.error(format!("unexpected `{}`", t.text)),
        }
    }

    fn parse_array(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.bump();
        let mut elems = Vec::new();
        loop {
            if self.eat_punct("]") {
                break;
            }
            if self.eat_punct(",") {
                elems.push(None);
                continue;
            }
            if self.is_punct("...") {
                let sstart = self.start();
                self.bump();
                let arg = self.parse_assign(false)?;
                elems.push(Some(Expr::Spread { arg: Box::new(arg), span: self.span_from(sstart) }));
            } else {
                elems.push(Some(self.parse_assign(false)?));
            }
            if !self.eat_punct(",") {
                self.expect_punct("]")?;
                break;
            }
        }
        Ok(Expr::Array { elems, span: self.span_from(start) })
    }

    fn parse_object(&mut self) -> PResult<Expr> {
        let start = self.start();
        self.bump();
        let mut props = Vec::new();
        while !self.eat_punct("}") {
            if self.at_eof() {
                return self.error("unterminated object literal");
            }
            props.push(self.parse_object_prop()?);
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        Ok(Expr::Object { props, span: self.span_from(start) })
    }

    fn parse_object_prop(&mut self) -> PResult<Prop> {
        if self.is_punct("...") {
            self.bump();
            return Ok(Prop::Spread(self.parse_assign(false)?));
        }
        let (is_async, is_generator, accessor) = self.parse_method_modifiers();
        let key_tok = self.peek();
        let key = self.parse_prop_key()?;
        if self.is_punct("(") {
            let fstart = self.start();
            let (params, body) = self.parse_function_rest(is_async, is_generator)?;
            let func = Function {
                name: None,
                params,
                body: FunctionBody::Block(body),
                is_arrow: false,
                is_async,
                is_generator,
                span: self.span_from(fstart),
            };
            return Ok(Prop::Method { key, func: Box::new(func), kind: accessor.unwrap_or(MethodKind::Method) });
        }
        if is_async || is_generator || accessor.is_some() {
            return self.error("expected method parameters");
        }
        if self.eat_punct(":") {
            let value = self.parse_assign(false)?;
            return Ok(Prop::KeyValue { key, value });
        }
        match key {
            PropKey::Ident(id) if key_tok.kind == TokenKind::Identifier => {
                let default = if self.eat_punct("=") { Some(self.parse_assign(false)?) } else { None };
                Ok(Prop::Shorthand { id, default })
            }
            _ => self.error("expected `:` after property key"),
        }
    }
}

/// Decodes the escapes of a quoted string literal (quotes included in `raw`)
/// into UTF-16 code units.
pub fn cook_string(raw: &str) -> Vec<u16> {
    let inner = if raw.len() >= 2 { &raw[1..raw.len() - 1] } else { "" };
    let mut out = Vec::with_capacity(inner.len());
    let mut chars = inner.chars().peekable();
    let push_char = |out: &mut Vec<u16>, c: char| {
        let mut buf = [0u16; 2];
        out.extend_from_slice(c.encode_utf16(&mut buf));
    };
    while let Some(c) = chars.next() {
        if c != '\\' {
            push_char(&mut out, c);
            continue;
        }
        let Some(e) = chars.next() else { break };
        match e {
            'n' => out.push(0x0A),
            't' => out.push(0x09),
            'r' => out.push(0x0D),
            'b' => out.push(0x08),
            'f' => out.push(0x0C),
            'v' => out.push(0x0B),
            '\r' => {
                if chars.peek() == Some(&'\n') {
                    chars.next();
                }
            }
            '\n' | '\u{2028}' | '\u{2029}' => {}
            'x' => {
                let h: String = chars.by_ref().take(2).collect();
                out.push(u16::from_str_radix(&h, 16).unwrap_or(0));
            }
            'u' => {
                if chars.peek() == Some(&'{') {
                    chars.next();
                    let h: String = chars.by_ref().take_while(|c| *c != '}').collect();
                    let cp = u32::from_str_radix(&h, 16).unwrap_or(0xFFFD);
                    match char::from_u32(cp) {
                        Some(ch) => push_char(&mut out, ch),
                        None => out.push(cp as u16),
                    }
                } else {
                    let h: String = chars.by_ref().take(4).collect();
                    out.push(u16::from_str_radix(&h, 16).unwrap_or(0xFFFD));
                }
            }
            '0'..='7' => {
                // Legacy octal escape; `\0` alone is NUL.
                let mut v = e.to_digit(8).unwrap();
                let max_len = if e <= '3' { 3 } else { 2 };
                let mut len = 1;
                while len < max_len {
                    match chars.peek().and_then(|c| c.to_digit(8)) {
                        Some(d) => {
                            v = v * 8 + d;
                            chars.next();
                            len += 1;
                        }
                        None => break,
                    }
                }
                out.push(v as u16);
            }
            other => push_char(&mut out, other),
        }
    }
    out
}
