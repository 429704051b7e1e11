//! Lossless tokenizer for the supported JavaScript subset.
//!
//! Every byte of the input ends up in exactly one token, trivia included, so
//! concatenating token texts reproduces the source.

use super::{FileId, LexError, LexErrorKind, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    String,
    Number,
    /// Whole template or one piece of a template split at `${` / `}`.
    Template(TemplatePart),
    Punct,
    Regex,
    PrivateName,
    Comment,
    Whitespace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplatePart {
    /// `` `...` `` with no substitutions.
    Full,
    /// `` `...${ ``
    Head,
    /// `}...${`
    Middle,
    /// `` }...` ``
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub span: Span,
}

impl Token<'_> {
    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Comment | TokenKind::Whitespace)
    }

    /// True for whitespace/comments that contain a line terminator.
    pub fn has_newline(&self) -> bool {
        self.is_trivia() && self.text.chars().any(is_line_terminator)
    }
}

const KEYWORDS: &[&str] = &[
    "break",
    "case",
    "catch",
    "class",
    "const",
    "continue",
    "debugger",
    "default",
    "delete",
    "do",
    "else",
    "enum",
    "export",
    "extends",
    "false",
    "finally",
    "for",
    "function",
    "if",
    "import",
    "in",
    "instanceof",
    "new",
    "null",
    "return",
    "super",
    "switch",
    "this",
    "throw",
    "true",
    "try",
    "typeof",
    "var",
    "void",
    "while",
    "with",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

// Keywords after which a `/` starts a regular expression.
const REGEX_AFTER_KEYWORD: &[&str] =
    &["return", "typeof", "instanceof", "in", "new", "delete", "void", "throw", "case", "do", "else", "extends"];

// Punctuators, longest first so greedy matching works.
const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=", "<=", ">=", "&&",
    "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "**", "<<", ">>", "{", "}", "(", ")",
    "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "?", ":", "=", ".", "@",
];

pub fn is_line_terminator(c: char) -> bool {
    matches!(c, '\n' | '\r' | '\u{2028}' | '\u{2029}')
}

fn is_js_whitespace(c: char) -> bool {
    matches!(
        c,
        ' ' | '\t' | '\u{0B}' | '\u{0C}' | '\u{A0}' | '\u{FEFF}' | '\u{1680}' | '\u{2000}'
            ..='\u{200A}' | '\u{202F}' | '\u{205F}' | '\u{3000}'
    ) || is_line_terminator(c)
}

pub fn is_id_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_ascii_alphabetic() || (!c.is_ascii() && c.is_alphabetic())
}

pub fn is_id_continue(c: char) -> bool {
    is_id_start(c) || c.is_ascii_digit() || (!c.is_ascii() && c.is_alphanumeric()) || c == '\u{200C}' || c == '\u{200D}'
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Brace {
    Plain,
    Template,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    file: FileId,
    braces: Vec<Brace>,
    tokens: Vec<Token<'a>>,
    /// Index of the last non-trivia token, for regex/division disambiguation.
    last_significant: Option<usize>,
}

/// Splits `source` into tokens. Trivia is kept.
pub fn tokenize(source: &str, file: FileId) -> Result<Vec<Token<'_>>, LexError> {
    let mut lx = Lexer {
        src: source,
        bytes: source.as_bytes(),
        pos: 0,
        file,
        braces: Vec::new(),
        tokens: Vec::new(),
        last_significant: None,
    };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn err(&self, kind: LexErrorKind, offset: usize) -> LexError {
        LexError { file: self.file, offset, kind }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn char_at(&self, pos: usize) -> Option<char> {
        self.src.get(pos..).and_then(|s| s.chars().next())
    }

    fn push(&mut self, kind: TokenKind, start: usize) {
        let tok = Token { kind, text: &self.src[start..self.pos], span: Span::new(start, self.pos) };
        if !tok.is_trivia() {
            self.last_significant = Some(self.tokens.len());
        }
        self.tokens.push(tok);
    }

    fn run(&mut self) -> Result<(), LexError> {
        if self.src.starts_with("#!") {
            let end = self.src.find(is_line_terminator).unwrap_or(self.src.len());
            self.pos = end;
            self.push(TokenKind::Comment, 0);
        }
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.peek_char().unwrap();
            if is_js_whitespace(c) {
                while let Some(c) = self.peek_char() {
                    if !is_js_whitespace(c) {
                        break;
                    }
                    self.pos += c.len_utf8();
                }
                self.push(TokenKind::Whitespace, start);
            } else if self.src[start..].starts_with("//") {
                let end = self.src[start..].find(is_line_terminator).map(|i| start + i).unwrap_or(self.src.len());
                self.pos = end;
                self.push(TokenKind::Comment, start);
            } else if self.src[start..].starts_with("/*") {
                match self.src[start + 2..].find("*/") {
                    Some(i) => self.pos = start + 2 + i + 2,
                    None => return Err(self.err(LexErrorKind::UnterminatedComment, start)),
                }
                self.push(TokenKind::Comment, start);
            } else if c == '"' || c == '\'' {
                self.lex_string(c)?;
            } else if c == '`' {
                self.pos += 1;
                self.lex_template_body(start, true)?;
            } else if c.is_ascii_digit() || (c == '.' && self.char_at(start + 1).is_some_and(|d| d.is_ascii_digit())) {
                self.lex_number()?;
            } else if is_id_start(c) || c == '\\' {
                self.lex_word()?;
            } else if c == '#' {
                self.pos += 1;
                if !self.peek_char().is_some_and(is_id_start) {
                    return Err(self.err(LexErrorKind::InvalidCharacter('#'), start));
                }
                self.eat_id_continue();
                self.push(TokenKind::PrivateName, start);
            } else if c == '}' && self.braces.last() == Some(&Brace::Template) {
                self.braces.pop();
                self.pos += 1;
                self.lex_template_body(start, false)?;
            } else if c == '/' && self.regex_allowed() {
                self.lex_regex()?;
            } else {
                self.lex_punct(c)?;
            }
        }
        if self.braces.contains(&Brace::Template) {
            return Err(self.err(LexErrorKind::UnterminatedTemplate, self.src.len()));
        }
        Ok(())
    }

    fn eat_id_continue(&mut self) {
        while let Some(c) = self.peek_char() {
            if !is_id_continue(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn lex_word(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        if self.peek_char() == Some('\\') {
            // Unicode escapes in identifiers are outside the supported subset.
            return Err(self.err(LexErrorKind::InvalidCharacter('\\'), start));
        }
        self.eat_id_continue();
        if self.peek_char() == Some('\\') {
            return Err(self.err(LexErrorKind::InvalidCharacter('\\'), self.pos));
        }
        let word = &self.src[start..self.pos];
        let kind = if is_keyword(word) && !self.after_dot() { TokenKind::Keyword } else { TokenKind::Identifier };
        self.push(kind, start);
        Ok(())
    }

    fn after_dot(&self) -> bool {
        self.last_significant
            .map(|i| {
                let t = &self.tokens[i];
                t.kind == TokenKind::Punct && (t.text == "." || t.text == "?.")
            })
            .unwrap_or(false)
    }

    fn regex_allowed(&self) -> bool {
        let Some(i) = self.last_significant else {
            return true;
        };
        let t = &self.tokens[i];
        match t.kind {
            TokenKind::Punct => !matches!(t.text, ")" | "]" | "++" | "--"),
            TokenKind::Keyword => REGEX_AFTER_KEYWORD.contains(&t.text),
            TokenKind::Template(TemplatePart::Head | TemplatePart::Middle) => true,
            _ => false,
        }
    }

    fn lex_punct(&mut self, c: char) -> Result<(), LexError> {
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(p) = PUNCTUATORS.iter().find(|p| rest.starts_with(**p)) else {
            return Err(self.err(LexErrorKind::InvalidCharacter(c), start));
        };
        // `?.` followed by a digit is a conditional, not optional chaining.
        let p = if *p == "?." && rest[2..].starts_with(|d: char| d.is_ascii_digit()) { "?" } else { p };
        self.pos += p.len();
        match p {
            "{" => self.braces.push(Brace::Plain),
            "}" => {
                self.braces.pop();
            }
            _ => {}
        }
        self.push(TokenKind::Punct, start);
        Ok(())
    }

    fn lex_string(&mut self, quote: char) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 1;
        loop {
            let Some(c) = self.peek_char() else {
                return Err(self.err(LexErrorKind::UnterminatedString, start));
            };
            self.pos += c.len_utf8();
            if c == quote {
                break;
            }
            match c {
                '\\' => {
                    let Some(n) = self.peek_char() else {
                        return Err(self.err(LexErrorKind::UnterminatedString, start));
                    };
                    self.pos += n.len_utf8();
                    if n == '\r' && self.peek_char() == Some('\n') {
                        self.pos += 1;
                    }
                }
                '\n' | '\r' => return Err(self.err(LexErrorKind::UnterminatedString, start)),
                _ => {}
            }
        }
        self.push(TokenKind::String, start);
        Ok(())
    }

    /// Lexes template characters after the opening `` ` `` or `}`.
    fn lex_template_body(&mut self, start: usize, opened: bool) -> Result<(), LexError> {
        loop {
            let Some(c) = self.peek_char() else {
                return Err(self.err(LexErrorKind::UnterminatedTemplate, start));
            };
            match c {
                '`' => {
                    self.pos += 1;
                    let part = if opened { TemplatePart::Full } else { TemplatePart::Tail };
                    self.push(TokenKind::Template(part), start);
                    return Ok(());
                }
                '$' if self.src[self.pos..].starts_with("${") => {
                    self.pos += 2;
                    self.braces.push(Brace::Template);
                    let part = if opened { TemplatePart::Head } else { TemplatePart::Middle };
                    self.push(TokenKind::Template(part), start);
                    return Ok(());
                }
                '\\' => {
                    self.pos += 1;
                    match self.peek_char() {
                        Some(n) => self.pos += n.len_utf8(),
                        None => return Err(self.err(LexErrorKind::UnterminatedTemplate, start)),
                    }
                }
                _ => self.pos += c.len_utf8(),
            }
        }
    }

    fn lex_number(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        let b = self.bytes;
        let radix_prefix =
            b[start] == b'0' && matches!(b.get(start + 1), Some(b'x' | b'X' | b'o' | b'O' | b'b' | b'B'));
        if radix_prefix {
            self.pos += 2;
            while self.pos < b.len() && (b[self.pos].is_ascii_hexdigit() || b[self.pos] == b'_') {
                self.pos += 1;
            }
        } else {
            while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'_') {
                self.pos += 1;
            }
            if self.pos < b.len() && b[self.pos] == b'.' {
                self.pos += 1;
                while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'_') {
                    self.pos += 1;
                }
            }
            if self.pos < b.len() && matches!(b[self.pos], b'e' | b'E') {
                let mut p = self.pos + 1;
                if p < b.len() && matches!(b[p], b'+' | b'-') {
                    p += 1;
                }
                if p < b.len() && b[p].is_ascii_digit() {
                    self.pos = p;
                    while self.pos < b.len() && b[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
            }
        }
        if self.pos < b.len() && b[self.pos] == b'n' {
            self.pos += 1;
        }
        if self.peek_char().is_some_and(is_id_start) {
            return Err(self.err(LexErrorKind::InvalidCharacter(self.peek_char().unwrap()), self.pos));
        }
        self.push(TokenKind::Number, start);
        Ok(())
    }

    fn lex_regex(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 1;
        let mut in_class = false;
        loop {
            let Some(c) = self.peek_char() else {
                return Err(self.err(LexErrorKind::UnterminatedRegex, start));
            };
            if is_line_terminator(c) {
                return Err(self.err(LexErrorKind::UnterminatedRegex, start));
            }
            self.pos += c.len_utf8();
            match c {
                '\\' => match self.peek_char() {
                    Some(n) if !is_line_terminator(n) => self.pos += n.len_utf8(),
                    _ => return Err(self.err(LexErrorKind::UnterminatedRegex, start)),
                },
                '[' => in_class = true,
                ']' => in_class = false,
                '/' if !in_class => break,
                _ => {}
            }
        }
        self.eat_id_continue();
        self.push(TokenKind::Regex, start);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, &str)> {
        tokenize(src, FileId(0)).unwrap().into_iter().map(|t| (t.kind, t.text)).collect()
    }

    #[test]
    fn var_statement() {
        use TokenKind::*;
        assert_eq!(
            kinds("var a=1;"),
            vec![(Keyword, "var"), (Whitespace, " "), (Identifier, "a"), (Punct, "="), (Number, "1"), (Punct, ";")]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("", FileId(0)).unwrap().is_empty());
    }

    #[test]
    fn regex_versus_division() {
        let toks = kinds("a = b / c; x = /re/g.test(s); if (y) z = (1) / 2");
        assert!(toks.contains(&(TokenKind::Regex, "/re/g")));
        assert_eq!(toks.iter().filter(|(k, _)| *k == TokenKind::Regex).count(), 1);
        let toks = kinds("return /a[/]b/.test(q)");
        assert!(toks.contains(&(TokenKind::Regex, "/a[/]b/")));
    }

    #[test]
    fn nested_templates() {
        let src = "`a${ {x:1}.x + `in${y}` }b`";
        let toks = kinds(src);
        assert_eq!(toks[0], (TokenKind::Template(TemplatePart::Head), "`a${"));
        assert!(toks.contains(&(TokenKind::Template(TemplatePart::Tail), "}b`")));
        assert!(toks.contains(&(TokenKind::Template(TemplatePart::Head), "`in${")));
        let joined: String = toks.iter().map(|(_, t)| *t).collect();
        assert_eq!(joined, src);
    }

    #[test]
    fn keywords_after_dot_are_identifiers() {
        let toks = kinds("a.default.new");
        assert_eq!(toks[2], (TokenKind::Identifier, "default"));
        assert_eq!(toks[4], (TokenKind::Identifier, "new"));
    }

    #[test]
    fn numbers() {
        for n in ["0x1F", "1e-3", ".5", "10n", "1_000", "0b101", "3.14"] {
            assert_eq!(kinds(n), vec![(TokenKind::Number, n)], "{n}");
        }
        assert_eq!(kinds("1..toString")[0], (TokenKind::Number, "1."));
    }

    #[test]
    fn lexical_errors_carry_offsets() {
        let e = tokenize("var s = 'abc", FileId(3)).unwrap_err();
        assert_eq!(e.kind, LexErrorKind::UnterminatedString);
        assert_eq!((e.file, e.offset), (FileId(3), 8));
        let e = tokenize("x = `abc${1}", FileId(0)).unwrap_err();
        assert_eq!(e.kind, LexErrorKind::UnterminatedTemplate);
        let e = tokenize("a ¬ b", FileId(0)).unwrap_err();
        assert!(matches!(e.kind, LexErrorKind::InvalidCharacter('¬')));
    }

    #[test]
    fn hashbang_and_private_names() {
        let toks = kinds("#!/usr/bin/env node\nclass A { #x = 1 }");
        assert_eq!(toks[0].0, TokenKind::Comment);
        assert!(toks.contains(&(TokenKind::PrivateName, "#x")));
    }
}
