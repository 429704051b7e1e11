//! Lexing, parsing and span-faithful re-emission for the supported
//! JavaScript subset.
//!
//! The parser never re-prints code. Later stages describe their edits as
//! [`Patch`]es against the original text and [`emit`] splices them in, so
//! every byte outside a patch survives untouched.

pub mod ast;
pub mod lexer;
pub mod minify;
pub mod parser;
pub mod visit;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::Program;
pub use lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FileId(pub u32);

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "file#{}", self.0)
    }
}

/// Half-open byte range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexErrorKind {
    UnterminatedString,
    UnterminatedTemplate,
    UnterminatedComment,
    UnterminatedRegex,
    InvalidCharacter(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}: lexical error at byte {offset}: {kind:?}")]
pub struct LexError {
    pub file: FileId,
    pub offset: usize,
    pub kind: LexErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file}: parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub file: FileId,
    pub offset: usize,
    pub message: String,
}

/// Either failure that makes a file ineligible for transformation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn offset(&self) -> usize {
        match self {
            SyntaxError::Lex(e) => e.offset,
            SyntaxError::Parse(e) => e.offset,
        }
    }
}

/// One imported module and the names taken from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportRecord {
    pub source: String,
    /// Names as exported by the source module (`default`, `*` for namespaces).
    pub names: Vec<String>,
}

/// Per-file facts extracted during parsing, consumed by the cross-file
/// dependency analysis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileSummary {
    pub file: FileId,
    /// Module-scope declarations in declaration order.
    pub declared_globals: Vec<String>,
    /// Names that resolve to no declaration in the file, sorted.
    pub free_names: Vec<String>,
    pub imports: Vec<ImportRecord>,
    pub exports: Vec<String>,
    /// Local binding behind each export, parallel to `exports`; `None` for
    /// re-exports and anonymous default exports.
    pub export_locals: Vec<Option<String>>,
    pub dynamic_sites: Vec<Span>,
    pub is_module: bool,
    pub byte_len: usize,
}

/// Replace `span` of the original text with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Patch {
    pub span: Span,
    pub replacement: String,
}

impl Patch {
    pub fn new(span: Span, replacement: impl Into<String>) -> Self {
        Patch { span, replacement: replacement.into() }
    }

    pub fn insert(at: usize, text: impl Into<String>) -> Self {
        Patch { span: Span::new(at, at), replacement: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("patches overlap: {0:?} and {1:?}")]
    OverlappingPatches(Span, Span),
    #[error("patches not sorted at {0:?}")]
    Unsorted(Span),
    #[error("patch {0:?} outside source of length {1}")]
    OutOfBounds(Span, usize),
}

/// Tokenizes and parses one file, also producing its [`FileSummary`].
pub fn parse(tokens: &[Token<'_>], file: FileId) -> Result<(Program, FileSummary), ParseError> {
    let src_len = tokens.last().map(|t| t.span.end).unwrap_or(0);
    let program = parser::parse_tokens(tokens, file, src_len)?;
    let tree = crate::pasa::build_scope_tree(&program, file);
    let summary = crate::pasa::summarize(&program, &tree, src_len);
    Ok((program, summary))
}

/// Convenience: tokenize + parse.
pub fn parse_source(source: &str, file: FileId) -> Result<(Program, FileSummary), SyntaxError> {
    let tokens = tokenize(source, file)?;
    Ok(parse(&tokens, file)?)
}

/// Splices sorted, non-overlapping patches into `source`.
pub fn emit(source: &str, patches: &[Patch]) -> Result<String, EmitError> {
    let extra: usize = patches.iter().map(|p| p.replacement.len()).sum();
    let mut out = String::with_capacity(source.len() + extra);
    let mut cursor = 0usize;
    let mut prev: Option<Span> = None;
    for p in patches {
        if p.span.end > source.len() {
            return Err(EmitError::OutOfBounds(p.span, source.len()));
        }
        if let Some(prev) = prev {
            if prev.overlaps(p.span) {
                return Err(EmitError::OverlappingPatches(prev, p.span));
            }
            if p.span.start < prev.end || (p.span.start, p.span.end) < (prev.start, prev.end) {
                return Err(EmitError::Unsorted(p.span));
            }
        }
        out.push_str(&source[cursor..p.span.start]);
        out.push_str(&p.replacement);
        cursor = p.span.end;
        prev = Some(p.span);
    }
    out.push_str(&source[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_substitution() {
        let out = emit("var alpha;", &[Patch::new(Span::new(4, 9), "a")]).unwrap();
        assert_eq!(out, "var a;");
    }

    #[test]
    fn empty_patch_list_is_identity() {
        assert_eq!(emit("let x = 1;\n", &[]).unwrap(), "let x = 1;\n");
    }

    #[test]
    fn overlapping_patches_rejected() {
        let r = emit("abcdef", &[Patch::new(Span::new(0, 3), "x"), Patch::new(Span::new(2, 4), "y")]);
        assert!(matches!(r, Err(EmitError::OverlappingPatches(..))));
    }

    #[test]
    fn insertion_before_replacement_at_same_offset() {
        let out = emit("\"s\";", &[Patch::insert(0, "var d;"), Patch::new(Span::new(0, 3), "d(0)")]).unwrap();
        assert_eq!(out, "var d;d(0);");
    }

    #[test]
    fn summary_of_module() {
        let (_, s) = parse_source("import {x} from \"./a.js\"; export function f(){}", FileId(0)).unwrap();
        assert_eq!(s.imports, vec![ImportRecord { source: "./a.js".into(), names: vec!["x".into()] }]);
        assert_eq!(s.exports, vec!["f".to_string()]);
        assert!(s.is_module);
    }

    #[test]
    fn summary_records_eval() {
        let src = "function g(){ eval(s) }";
        let (_, s) = parse_source(src, FileId(0)).unwrap();
        assert_eq!(s.dynamic_sites.len(), 1);
        let site = s.dynamic_sites[0];
        assert_eq!(&src[site.start..site.end], "eval(s)");
    }

    #[test]
    fn summary_globals_and_free_names() {
        // Oracle: `q` is declared at module level; `console` has no
        // declaration anywhere; `log` is a property name, not a reference.
        let (_, s) = parse_source("var q = 1; console.log(q)", FileId(0)).unwrap();
        assert_eq!(s.declared_globals, vec!["q".to_string()]);
        assert_eq!(s.free_names, vec!["console".to_string()]);
        assert!(s.dynamic_sites.is_empty());
    }

    fn naive_apply(source: &str, patches: &[Patch]) -> String {
        // Apply back to front so earlier offsets stay valid.
        let mut s = source.to_string();
        for p in patches.iter().rev() {
            s.replace_range(p.span.start..p.span.end, &p.replacement);
        }
        s
    }

    proptest! {
        #[test]
        fn emit_matches_one_at_a_time(
            src in "[a-z ;=]{0,40}",
            cuts in proptest::collection::vec((0usize..40, 0usize..4, "[A-Z]{0,3}"), 0..6),
        ) {
            let mut patches: Vec<Patch> = Vec::new();
            let mut cursor = 0;
            let mut sorted: Vec<_> = cuts.into_iter().map(|(s, l, r)| (s.min(src.len()), l, r)).collect();
            sorted.sort();
            for (start, len, rep) in sorted {
                if start < cursor { continue; }
                let end = (start + len).min(src.len());
                patches.push(Patch::new(Span::new(start, end), rep));
                cursor = end.max(start + 1);
            }
            prop_assert_eq!(emit(&src, &patches).unwrap(), naive_apply(&src, &patches));
        }
    }
}
