use std::collections::BTreeSet;

/// Words that can never be binding names, plus globals whose shadowing
/// would change meaning.
pub const RESERVED: &[&str] = &[
    "Infinity",
    "NaN",
    "arguments",
    "as",
    "async",
    "await",
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
    "eval",
    "export",
    "extends",
    "false",
    "finally",
    "for",
    "from",
    "function",
    "get",
    "if",
    "implements",
    "import",
    "in",
    "instanceof",
    "interface",
    "let",
    "new",
    "null",
    "of",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "set",
    "static",
    "super",
    "switch",
    "this",
    "throw",
    "true",
    "try",
    "typeof",
    "undefined",
    "var",
    "void",
    "while",
    "with",
    "yield",
];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// The `i`-th word of the unfiltered sequence a..z, aa, ab, .., zz, aaa, ..
pub fn base26(mut i: usize) -> String {
    let mut rev = Vec::new();
    loop {
        rev.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    rev.reverse();
    String::from_utf8(rev).unwrap()
}

/// Short names in pool order, skipping reserved words and `excluded`.
pub fn pool_iter<'a>(excluded: impl Fn(&str) -> bool + 'a) -> impl Iterator<Item = String> + 'a {
    (0..).map(base26).filter(move |n| !is_reserved(n) && !excluded(n))
}

/// The `i`-th name of the pool after filtering `excluded` and reserved words.
pub fn pool_name(i: usize, excluded: &BTreeSet<String>) -> String {
    pool_iter(|n| excluded.contains(n)).nth(i).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_names() {
        let none = BTreeSet::new();
        assert_eq!(pool_name(0, &none), "a");
        assert_eq!(pool_name(25, &none), "z");
        assert_eq!(pool_name(26, &none), "aa");
        assert_eq!(base26(26 + 26 * 26), "aaa");
    }

    #[test]
    fn excluded_names_are_skipped() {
        let ex: BTreeSet<String> = ["a", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(pool_name(0, &ex), "b");
        assert_eq!(pool_name(1, &ex), "d");
    }

    #[test]
    fn no_reserved_words_and_lengths_non_decreasing() {
        let names: Vec<String> = pool_iter(|_| false).take(1000).collect();
        for w in ["do", "if", "in", "for", "new", "var", "let", "try"] {
            assert!(!names.iter().any(|n| n == w), "{w}");
        }
        assert!(names.windows(2).all(|w| w[0].len() <= w[1].len()));
        let distinct: BTreeSet<_> = names.iter().collect();
        assert_eq!(distinct.len(), names.len());
    }
}
