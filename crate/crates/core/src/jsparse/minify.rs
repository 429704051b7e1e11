//! Whitespace and comment stripping.
//!
//! Line breaks survive only where removing them could change automatic
//! semicolon insertion. The result is re-lexed; if the significant token
//! sequence differs from the input the original text is returned unchanged.

use super::lexer::{is_id_continue, tokenize, TemplatePart, Token, TokenKind};
use super::FileId;

/// Keywords whose following line break is significant.
const RESTRICTED: &[&str] = &["return", "throw", "break", "continue", "yield", "async", "let"];

fn can_end_statement(t: &Token<'_>) -> bool {
    match t.kind {
        TokenKind::Identifier
        | TokenKind::Keyword
        | TokenKind::Number
        | TokenKind::String
        | TokenKind::Regex
        | TokenKind::PrivateName
        | TokenKind::Template(TemplatePart::Full | TemplatePart::Tail) => true,
        TokenKind::Punct => matches!(t.text, ")" | "]" | "}" | "++" | "--"),
        _ => false,
    }
}

fn can_start_after_asi(t: &Token<'_>) -> bool {
    match t.kind {
        TokenKind::Identifier | TokenKind::Keyword | TokenKind::Number | TokenKind::String | TokenKind::PrivateName => {
            true
        }
        TokenKind::Punct => matches!(t.text, "{" | "!" | "~" | "++" | "--"),
        _ => false,
    }
}

fn needs_newline(prev: &Token<'_>, next: &Token<'_>) -> bool {
    if matches!(prev.kind, TokenKind::Identifier | TokenKind::Keyword) && RESTRICTED.contains(&prev.text) {
        return true;
    }
    can_end_statement(prev) && can_start_after_asi(next)
}

fn needs_space(prev: &Token<'_>, next: &Token<'_>) -> bool {
    let (Some(a), Some(b)) = (prev.text.chars().last(), next.text.chars().next()) else {
        return false;
    };
    if is_id_continue(a) && (is_id_continue(b) || b == '\\') {
        return true;
    }
    if prev.kind == TokenKind::Regex && is_id_continue(b) {
        return true;
    }
    if prev.kind == TokenKind::Number && b == '.' {
        return true;
    }
    matches!((a, b), ('+', '+') | ('-', '-') | ('/', '/') | ('/', '*') | ('<', '!'))
        || (prev.kind == TokenKind::Punct && prev.text == "/" && next.kind == TokenKind::Regex)
}

/// Strips comments and redundant whitespace. Hashbang lines are kept.
pub fn minify(source: &str) -> String {
    let Ok(tokens) = tokenize(source, FileId(0)) else {
        return source.to_string();
    };
    let mut out = String::with_capacity(source.len());
    let mut prev: Option<Token<'_>> = None;
    let mut saw_newline = false;
    let mut saw_gap = false;
    for t in &tokens {
        if t.is_trivia() {
            if t.kind == TokenKind::Comment && t.span.start == 0 && t.text.starts_with("#!") {
                out.push_str(t.text);
                out.push('\n');
                continue;
            }
            saw_newline |= t.has_newline();
            saw_gap = true;
            continue;
        }
        if let Some(p) = &prev {
            if saw_newline && needs_newline(p, t) {
                out.push('\n');
            } else if needs_space(p, t)
                || (saw_gap && p.kind == TokenKind::Punct && t.kind == TokenKind::Punct && joins(p.text, t.text))
            {
                out.push(' ');
            }
        }
        out.push_str(t.text);
        prev = Some(*t);
        saw_newline = false;
        saw_gap = false;
    }
    if same_tokens(&tokens, &out) {
        out
    } else {
        source.to_string()
    }
}

/// Would these two punctuators lex as one longer punctuator when adjacent?
fn joins(a: &str, b: &str) -> bool {
    let mut s = String::with_capacity(a.len() + b.len());
    s.push_str(a);
    s.push_str(b);
    match tokenize(&s, FileId(0)) {
        Ok(t) => t.len() != 2 || t[0].text != a,
        Err(_) => true,
    }
}

fn same_tokens(original: &[Token<'_>], minified: &str) -> bool {
    let Ok(again) = tokenize(minified, FileId(0)) else {
        return false;
    };
    let a = original.iter().filter(|t| !t.is_trivia()).map(|t| (t.kind, t.text));
    let b = again.iter().filter(|t| !t.is_trivia()).map(|t| (t.kind, t.text));
    a.eq(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_comments_and_spaces() {
        let src = "// header\nvar  a = 1 ; /* c */ function f ( x ) { return x + 1 ; }\n";
        assert_eq!(minify(src), "var a=1;function f(x){return x+1;}");
    }

    #[test]
    fn keeps_asi_newlines() {
        assert_eq!(minify("let a = 1\nlet b = 2\n"), "let a=1\nlet b=2");
        assert_eq!(minify("return\nx"), "return\nx");
        assert_eq!(minify("a\n++b"), "a\n++b");
        assert_eq!(minify("x = y\n(z)"), "x=y(z)");
    }

    #[test]
    fn separates_ambiguous_operators() {
        assert_eq!(minify("a + +b"), "a+ +b");
        assert_eq!(minify("a - -b"), "a- -b");
        assert_eq!(minify("1 .toString()"), "1 .toString()");
        assert_eq!(minify("x = /re/ instanceof RegExp"), "x=/re/ instanceof RegExp");
    }

    #[test]
    fn keeps_templates_verbatim() {
        let src = "const s = `a  b\n ${ x }  c`;";
        assert_eq!(minify(src), "const s=`a  b\n ${x}  c`;");
    }

    #[test]
    fn unlexable_input_is_returned_unchanged() {
        assert_eq!(minify("var s = 'oops"), "var s = 'oops");
    }
}
