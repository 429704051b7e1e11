//! Per-unit obfuscation transforms, expressed as patches.
//!
//! String literals become calls to a unit-local decoder function whose
//! first call decodes the whole table into a cache stored on the function
//! itself; later calls only index the cache. Static member accesses
//! `obj.prop` become `obj[v]` with `v` a hoisted variable holding `"prop"`.
//!
//! Decoders and slot variables are registered in the scope tree as
//! synthetic declarations before renaming, so the renamer names them and
//! the safety checker covers them. Their text is rendered afterwards.

use std::collections::HashMap;
use std::fmt::Write as _;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;

use crate::jsparse::ast::*;
use crate::jsparse::lexer::is_id_continue;
use crate::jsparse::visit::{walk_program, Visitor};
use crate::jsparse::{Patch, Span};
use crate::pasa::{Binding, ScopeId, ScopeTree};
use crate::renamer::RenameMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformOptions {
    pub strings: bool,
    pub properties: bool,
    /// Count table decodes in `globalThis.__ssDecodes` (testing aid).
    pub instrument: bool,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { strings: true, properties: true, instrument: false }
    }
}

/// Shortest string (in UTF-16 code units) worth encoding.
pub const MIN_STRING_LEN: usize = 2;

const ALPHABET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

fn next_key(k: u16) -> u16 {
    k.wrapping_mul(33).wrapping_add(7)
}

/// UTF-16 code units as little-endian bytes, XORed with a rolling key
/// seeded by `key`, then base-64.
pub fn encode_payload(value: &[u16], key: u16) -> String {
    let mut k = key;
    let mut bytes = Vec::with_capacity(value.len() * 2);
    for &u in value {
        for b in u.to_le_bytes() {
            bytes.push(b ^ (k & 0xff) as u8);
            k = next_key(k);
        }
    }
    STANDARD.encode(bytes)
}

pub fn decode_payload(payload: &str, key: u16) -> Option<Vec<u16>> {
    let bytes = STANDARD.decode(payload).ok()?;
    if bytes.len() % 2 != 0 {
        return None;
    }
    let mut k = key;
    let plain: Vec<u8> = bytes
        .iter()
        .map(|b| {
            let out = b ^ (k & 0xff) as u8;
            k = next_key(k);
            out
        })
        .collect();
    Some(plain.chunks(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect())
}

/// Stable 16-bit key for a unit.
pub fn unit_key(path: &str, unit: usize) -> u16 {
    // FNV-1a over the path and unit index.
    let mut h: u32 = 0x811c_9dc5;
    for b in path.bytes().chain(unit.to_le_bytes()) {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    (h ^ (h >> 16)) as u16
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StringTable {
    pub key: u16,
    /// Distinct original strings in first-use order.
    pub entries: Vec<Vec<u16>>,
    pub payloads: Vec<String>,
    index: HashMap<Vec<u16>, usize>,
}

impl StringTable {
    pub fn new(key: u16) -> Self {
        StringTable { key, ..Default::default() }
    }

    pub fn intern(&mut self, value: &[u16]) -> usize {
        if let Some(&i) = self.index.get(value) {
            return i;
        }
        let i = self.entries.len();
        self.entries.push(value.to_vec());
        self.payloads.push(encode_payload(value, self.key));
        self.index.insert(value.to_vec(), i);
        i
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Decoder function declaration. Guard and cache live on the function
    /// object, so the declaration is fully hoisted and needs no
    /// initialization order.
    pub fn decoder_source(&self, name: &str, instrument: bool) -> String {
        let mut table = String::new();
        for (i, p) in self.payloads.iter().enumerate() {
            if i > 0 {
                table.push(',');
            }
            let _ = write!(table, "\"{p}\"");
        }
        let count = if instrument { "globalThis.__ssDecodes=(globalThis.__ssDecodes||0)+1;" } else { "" };
        format!(
            "function {name}($i){{var $c={name}.$c;if(!$c){{$c={name}.$c=[];{count}\
             var $t=[{table}],$A=\"{ALPHABET}\",$F=\"\".constructor.fromCharCode;\
             for(var $j=0;$j<$t.length;$j++){{for(var $s=$t[$j],$k={key},$v=0,$n=0,$b=[],$r=\"\",$m=0,$p;$m<$s.length;$m++)\
             {{$p=$A.indexOf($s.charAt($m));if($p<0)continue;$v=($v<<6|$p)&65535;$n+=6;\
             if($n>=8){{$n-=8;$b.push($v>>$n&255^$k&255);$k=$k*33+7&65535}}}}\
             for($m=0;$m+1<$b.length;$m+=2)$r+=$F($b[$m]|$b[$m+1]<<8);$c[$j]=$r}}}}return $c[$i]}}",
            key = self.key
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySlot {
    pub property: String,
    pub binding: Binding,
    /// Table entry holding the name when strings are encoded too.
    pub string_index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SiteKind {
    Str(usize),
    Prop(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Site {
    span: Span,
    kind: SiteKind,
    space_before: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitTransform {
    pub span: Span,
    pub table: StringTable,
    pub decoder: Option<Binding>,
    pub slots: Vec<PropertySlot>,
    sites: Vec<Site>,
}

impl UnitTransform {
    pub fn string_sites(&self) -> usize {
        self.sites.iter().filter(|s| matches!(s.kind, SiteKind::Str(_))).count()
    }

    pub fn property_sites(&self) -> usize {
        self.sites.iter().filter(|s| matches!(s.kind, SiteKind::Prop(_))).count()
    }

    /// Declarations to hoist for this unit, using final names from `map`.
    pub fn preamble(&self, map: &RenameMap, instrument: bool) -> String {
        let mut out = String::new();
        let decoder = self.decoder.as_ref().map(|b| map.name_of(b).to_string());
        if let Some(d) = &decoder {
            out.push_str(&self.table.decoder_source(d, instrument));
        }
        if !self.slots.is_empty() {
            out.push_str("var ");
            for (i, s) in self.slots.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let name = map.name_of(&s.binding);
                match (s.string_index, &decoder) {
                    (Some(idx), Some(d)) => {
                        let _ = write!(out, "{name}={d}({idx})");
                    }
                    _ => {
                        let _ = write!(out, "{name}=\"{}\"", s.property);
                    }
                }
            }
            out.push(';');
        }
        out
    }

    fn site_patches(&self, map: &RenameMap, out: &mut Vec<Patch>) {
        let decoder = self.decoder.as_ref().map(|b| map.name_of(b));
        for s in &self.sites {
            let space = if s.space_before { " " } else { "" };
            let text = match s.kind {
                SiteKind::Str(i) => format!("{space}{}({i})", decoder.expect("decoder for string site")),
                SiteKind::Prop(i) => format!("[{}]", map.name_of(&self.slots[i].binding)),
            };
            out.push(Patch::new(s.span, text));
        }
    }
}

/// All transform work planned for one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileTransform {
    pub insert_at: usize,
    /// Emit `;` before the preamble (unterminated directive prologue).
    pub leading_semicolon: bool,
    pub units: Vec<UnitTransform>,
}

impl FileTransform {
    pub fn is_empty(&self) -> bool {
        self.units.iter().all(|u| u.sites.is_empty())
    }

    /// Site replacements plus one insertion holding every preamble.
    pub fn patches(&self, map: &RenameMap, instrument: bool) -> Vec<Patch> {
        let mut out = Vec::new();
        let mut pre = String::new();
        for u in &self.units {
            pre.push_str(&u.preamble(map, instrument));
            u.site_patches(map, &mut out);
        }
        if !pre.is_empty() {
            if self.leading_semicolon {
                pre.insert(0, ';');
            }
            out.push(Patch::insert(self.insert_at, pre));
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone)]
enum Candidate {
    Str { span: Span, value: Vec<u16> },
    Prop { span: Span, name: String },
}

impl Candidate {
    fn span(&self) -> Span {
        match self {
            Candidate::Str { span, .. } | Candidate::Prop { span, .. } => *span,
        }
    }
}

#[derive(Default)]
struct Collector {
    out: Vec<Candidate>,
    skip: Vec<Span>,
}

impl Visitor for Collector {
    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Unary { op, arg, .. } if op == "delete" => {
                if let Expr::Member { span, .. } = arg.as_ref() {
                    self.skip.push(*span);
                }
            }
            Expr::ImportCall { arg, .. } => self.skip.push(arg.span()),
            Expr::Str(s) if !self.skip.contains(&s.span) => {
                self.out.push(Candidate::Str { span: s.span, value: s.value.clone() });
            }
            Expr::Member { prop: MemberProp::Static { name, dot_span }, optional: false, span, .. }
                if !self.skip.contains(span) =>
            {
                self.out.push(Candidate::Prop { span: *dot_span, name: name.name.clone() });
            }
            _ => {}
        }
    }
}

/// Plans string encoding and property rewriting for every unit of a file,
/// registering decoders and slots in `tree`. `units` must be sorted,
/// disjoint and cover the file.
pub fn plan_file(
    source: &str,
    program: &Program,
    tree: &mut ScopeTree,
    units: &[Span],
    key_seed: &str,
    opts: TransformOptions,
) -> FileTransform {
    let (insert_at, leading_semicolon) = (program.prologue_end, !program.prologue_terminated);
    let mut plan = FileTransform { insert_at, leading_semicolon, units: Vec::new() };
    let root_dynamic = tree.nodes[tree.root.index as usize].is_dynamic;
    let mut per_unit: Vec<Vec<Candidate>> = vec![Vec::new(); units.len()];
    if !root_dynamic && (opts.strings || opts.properties) {
        let mut c = Collector::default();
        walk_program(&mut c, program);
        for cand in c.out {
            let span = cand.span();
            let i = units.partition_point(|u| u.end <= span.start);
            if i < units.len() && units[i].contains(span) {
                per_unit[i].push(cand);
            }
        }
    }
    for (i, (span, cands)) in units.iter().zip(per_unit).enumerate() {
        let mut unit = UnitTransform {
            span: *span,
            table: StringTable::new(unit_key(key_seed, i)),
            decoder: None,
            slots: Vec::new(),
            sites: Vec::new(),
        };
        if opts.strings {
            encode_strings(source, tree, &mut unit, &cands);
        }
        if opts.properties {
            rewrite_property_access(tree, &mut unit, i, &cands, opts.strings);
        }
        let site_spans: Vec<(ScopeId, Span)> = unit
            .sites
            .iter()
            .filter(|s| matches!(s.kind, SiteKind::Str(_)))
            .map(|s| (tree.scope_at(s.span), s.span))
            .collect();
        let needs_decoder = !unit.table.is_empty();
        if needs_decoder {
            let site = Span::new(insert_at, insert_at);
            unit.decoder = Some(tree.add_synthetic(tree.root, &format!("#d{i}"), site, &site_spans));
        }
        unit.sites.sort_by_key(|s| s.span);
        plan.units.push(unit);
    }
    plan
}

/// Selects eligible string literals of one unit and assigns table slots.
fn encode_strings(source: &str, tree: &ScopeTree, unit: &mut UnitTransform, cands: &[Candidate]) {
    for c in cands {
        let Candidate::Str { span, value } = c else { continue };
        if value.len() < MIN_STRING_LEN || tree.nodes[tree.scope_at(*span).index as usize].is_dynamic {
            continue;
        }
        let idx = unit.table.intern(value);
        let space_before = source[..span.start].chars().next_back().is_some_and(is_id_continue);
        unit.sites.push(Site { span: *span, kind: SiteKind::Str(idx), space_before });
    }
}

/// Rewrites static member accesses of one unit to slot lookups.
fn rewrite_property_access(
    tree: &mut ScopeTree,
    unit: &mut UnitTransform,
    unit_index: usize,
    cands: &[Candidate],
    strings: bool,
) {
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    let mut refs: Vec<Vec<(ScopeId, Span)>> = Vec::new();
    for c in cands {
        let Candidate::Prop { span, name } = c else { continue };
        let scope = tree.scope_at(*span);
        if tree.nodes[scope.index as usize].is_dynamic {
            continue;
        }
        let slot = *by_name.entry(name.as_str()).or_insert_with(|| {
            refs.push(Vec::new());
            refs.len() - 1
        });
        refs[slot].push((scope, *span));
        unit.sites.push(Site { span: *span, kind: SiteKind::Prop(slot), space_before: false });
    }
    let mut names: Vec<(&str, usize)> = by_name.into_iter().collect();
    names.sort_by_key(|&(_, i)| i);
    for (name, i) in names {
        let string_index = strings.then(|| unit.table.intern(&name.encode_utf16().collect::<Vec<_>>()));
        let site = Span::new(unit.span.start, unit.span.start);
        let binding = tree.add_synthetic(tree.root, &format!("#p{unit_index}_{i}"), site, &refs[i]);
        unit.slots.push(PropertySlot { property: name.to_string(), binding, string_index });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jsparse::{emit, parse_source, FileId};
    use crate::pasa::build_scope_tree;
    use crate::renamer::{check_safety, rename_tree, RenameContext};
    use proptest::prelude::*;

    fn run(src: &str, opts: TransformOptions) -> (String, FileTransform) {
        let (p, _) = parse_source(src, FileId(0)).unwrap();
        let mut t = build_scope_tree(&p, FileId(0));
        let plan = plan_file(src, &p, &mut t, &[Span::new(0, src.len())], "t.js", opts);
        let map = rename_tree(&t, &RenameContext { rename_locals: false, ..Default::default() }).unwrap();
        assert!(check_safety(std::slice::from_ref(&t), &map).is_safe());
        (emit(src, &plan.patches(&map, false)).unwrap(), plan)
    }

    #[test]
    fn no_strings_no_preamble() {
        let opts = TransformOptions { properties: false, ..Default::default() };
        let (out, plan) = run("var x = 1 + 2;", opts);
        assert_eq!(out, "var x = 1 + 2;");
        assert!(plan.is_empty());
    }

    #[test]
    fn duplicate_literals_share_an_entry() {
        let opts = TransformOptions { properties: false, ..Default::default() };
        let (_, plan) = run("log('hi'); log('hi'); log('yo'); log('x')", opts);
        let u = &plan.units[0];
        // Oracle: distinct eligible literals are "hi" and "yo".
        assert_eq!(u.table.entries.len(), 2);
        assert_eq!(u.string_sites(), 3);
    }

    #[test]
    fn call_site_shape() {
        let opts = TransformOptions { properties: false, ..Default::default() };
        let (out, _) = run("log(\"hi\")", opts);
        assert!(out.starts_with("function a($i)"), "{out}");
        assert!(out.ends_with("log(a(0))"), "{out}");
    }

    #[test]
    fn property_slots() {
        let opts = TransformOptions { strings: false, ..Default::default() };
        let (out, plan) = run("player.score += 1", opts);
        assert_eq!(out, "var a=\"score\";player[a] += 1");
        let (_, plan5) = run("p.score; p.score; p.level; q.score; q.level", opts);
        assert!(plan.units[0].slots.len() == 1);
        assert_eq!(plan5.units[0].slots.len(), 2);
        assert_eq!(plan5.units[0].property_sites(), 5);
    }

    #[test]
    fn skipped_member_forms() {
        let opts = TransformOptions { strings: false, ..Default::default() };
        let (out, _) = run("delete o.k; o?.k; import('./m.js')", opts);
        assert_eq!(out, "delete o.k; o?.k; import('./m.js')");
    }

    #[test]
    fn dynamic_file_untouched() {
        let (out, _) = run("var s = 'text'; eval(s).prop", TransformOptions::default());
        assert_eq!(out, "var s = 'text'; eval(s).prop");
    }

    #[test]
    fn keyword_adjacent_literal_gets_space() {
        let opts = TransformOptions { properties: false, ..Default::default() };
        let (out, _) = run("function f(){return\"ok\"}", opts);
        assert!(out.ends_with("function f(){return a(0)}"), "{out}");
    }

    #[test]
    fn directive_prologue_kept_first() {
        let (out, _) = run("'use strict'\nlog('hello')", TransformOptions::default());
        assert!(out.starts_with("'use strict';function a($i)"), "{out}");
    }

    proptest! {
        #[test]
        fn payload_round_trip(s in "\\PC{0,40}", key in any::<u16>()) {
            let units: Vec<u16> = s.encode_utf16().collect();
            prop_assert_eq!(decode_payload(&encode_payload(&units, key), key), Some(units));
        }

        #[test]
        fn lone_surrogates_round_trip(units in proptest::collection::vec(any::<u16>(), 0..20), key in any::<u16>()) {
            prop_assert_eq!(decode_payload(&encode_payload(&units, key), key), Some(units));
        }
    }
}
