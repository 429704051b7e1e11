use std::collections::BTreeSet;
use std::io;
use std::path::Path;

/// Host-provided globals that are never renamed and never create
/// dependency edges between files.
pub const DEFAULT_HOST_NAMES: &[&str] = &[
    "AbortController",
    "AggregateError",
    "Array",
    "ArrayBuffer",
    "Atomics",
    "BigInt",
    "BigInt64Array",
    "BigUint64Array",
    "Boolean",
    "Buffer",
    "DataView",
    "Date",
    "Error",
    "EvalError",
    "FinalizationRegistry",
    "Float32Array",
    "Float64Array",
    "Function",
    "Infinity",
    "Int16Array",
    "Int32Array",
    "Int8Array",
    "Intl",
    "JSON",
    "Map",
    "Math",
    "NaN",
    "Number",
    "Object",
    "Promise",
    "Proxy",
    "RangeError",
    "ReferenceError",
    "Reflect",
    "RegExp",
    "Set",
    "SharedArrayBuffer",
    "String",
    "Symbol",
    "SyntaxError",
    "TextDecoder",
    "TextEncoder",
    "TypeError",
    "URIError",
    "URL",
    "URLSearchParams",
    "Uint16Array",
    "Uint32Array",
    "Uint8Array",
    "Uint8ClampedArray",
    "WeakMap",
    "WeakRef",
    "WeakSet",
    "__dirname",
    "__filename",
    "arguments",
    "atob",
    "btoa",
    "clearImmediate",
    "clearInterval",
    "clearTimeout",
    "console",
    "decodeURI",
    "decodeURIComponent",
    "document",
    "encodeURI",
    "encodeURIComponent",
    "escape",
    "eval",
    "exports",
    "fetch",
    "global",
    "globalThis",
    "isFinite",
    "isNaN",
    "location",
    "module",
    "navigator",
    "parseFloat",
    "parseInt",
    "performance",
    "print",
    "process",
    "queueMicrotask",
    "require",
    "self",
    "setImmediate",
    "setInterval",
    "setTimeout",
    "structuredClone",
    "undefined",
    "unescape",
    "window",
    "wx",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allowlist {
    names: BTreeSet<String>,
}

impl Default for Allowlist {
    fn default() -> Self {
        Allowlist { names: DEFAULT_HOST_NAMES.iter().map(|s| s.to_string()).collect() }
    }
}

impl Allowlist {
    pub fn empty() -> Self {
        Allowlist { names: BTreeSet::new() }
    }

    /// One name per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        let names = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        Allowlist { names }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn extend<I: IntoIterator<Item = String>>(&mut self, names: I) {
        self.names.extend(names);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let a = Allowlist::parse("# hosts\nGameGlobal\n\n  cc  # engine\n");
        assert!(a.contains("GameGlobal"));
        assert!(a.contains("cc"));
        assert_eq!(a.names().count(), 2);
    }

    #[test]
    fn default_covers_common_hosts() {
        let a = Allowlist::default();
        for n in ["console", "Math", "window", "wx", "require"] {
            assert!(a.contains(n), "{n}");
        }
        assert!(!a.contains("GameGlobal"));
    }
}
