//! JavaScript program templates for the equivalence corpus.
//!
//! Every program writes its results through a hashing `out` helper and ends
//! by printing the hash, so any behavioural change shows up in stdout.
//! `@key@` placeholders are filled per variant.

pub(super) const PRELUDE: &str = r#"let @h@ = 2166136261;
function @out@(...parts) {
  const line = parts.join(" ");
  for (let i = 0; i < line.length; i++) @h@ = Math.imul(@h@ ^ line.charCodeAt(i), 16777619) >>> 0;
  console.log(line);
}
function @check@(condition, what) {
  if (!condition) throw new Error("self-check failed: " + what);
}
"#;

pub(super) const EPILOGUE: &str = r#"console.log("checksum " + @h@.toString(16));
"#;

pub(super) const ARITHMETIC: &str = r#"const LIMIT = @n@;
function @sumSquares@(limit) {
  let total = 0;
  for (let i = 1; i <= limit; i++) total += i * i;
  return total;
}
function @collatz@(start) {
  let steps = 0;
  let value = start;
  while (value !== 1 && steps < 1000) {
    value = value % 2 === 0 ? value / 2 : 3 * value + 1;
    steps++;
  }
  return steps;
}
@check@(@sumSquares@(LIMIT) === LIMIT * (LIMIT + 1) * (2 * LIMIT + 1) / 6, "closed form");
let running = 0;
for (let k = 1; k < LIMIT; k++) {
  running = (running * 31 + @collatz@(k) + @sumSquares@(k % 50)) % 1000003;
}
@out@("sum", @sumSquares@(LIMIT));
@out@("running", running);
@out@((0.1 + 0.2).toFixed(@d@), Math.max(@a@, @b@), 2 ** 10, -7 % 3, 7 >>> 1, ~@a@ & 0xff, @a@ / 4);
let bits = 0;
for (let shift = 0; shift < 31; shift += 3) bits ^= (@b@ << shift) | (@a@ >> 1);
@out@("bits", bits, bits.toString(2).length);
const primes = [];
outer: for (let candidate = 2; primes.length < @p@; candidate++) {
  for (const q of primes) {
    if (q * q > candidate) break;
    if (candidate % q === 0) continue outer;
  }
  primes.push(candidate);
}
@out@("primes", primes.slice(-5).join(","), primes.reduce((x, y) => x + y, 0));
"#;

pub(super) const CLOSURES: &str = r#"function @makeCounter@(step) {
  let count = 0;
  return {
    next() { count += step; return count; },
    reset: () => { count = 0; },
    get current() { return count; },
  };
}
function @makeAdder@(base) {
  return function (value) { return base + value; };
}
function @memoize@(fn) {
  const cache = new Map();
  let misses = 0;
  const wrapped = function (n) {
    if (cache.has(n)) return cache.get(n);
    misses++;
    const result = fn(n);
    cache.set(n, result);
    return result;
  };
  wrapped.misses = () => misses;
  return wrapped;
}
const counter = @makeCounter@(@s@);
const seen = [];
for (let i = 0; i < @n@; i++) seen.push(counter.next());
@out@(seen.join(","), counter.current);
counter.reset();
@out@("after reset", counter.current, counter.next());
const adders = [];
for (let i = 0; i < 5; i++) adders.push(@makeAdder@(i * @s@));
@out@(adders.map((f) => f(10)).join(" "));
const square = @memoize@(function (n) { return n * n; });
let acc = 0;
for (let j = 0; j < 100; j++) acc += square(j % 10);
@check@(square.misses() === 10, "memo misses");
@out@("acc", acc, square.misses());
var legacy = [];
for (var v = 0; v < 3; v++) legacy.push(function () { return v; });
const modern = [];
for (let w = 0; w < 3; w++) modern.push(() => w);
@out@(legacy.map((f) => f()).join(""), modern.map((f) => f()).join(""));
const compose = (...fns) => (x) => fns.reduceRight((value, f) => f(value), x);
@out@(compose((x) => x + 1, (x) => x * @s@)(7));
function @once@(fn) {
  let done = false, value;
  return (...args) => done ? value : (done = true, value = fn(...args));
}
const init = @once@((a, b) => a * b + @s@);
@out@(init(3, 4), init(100, 100));
"#;

pub(super) const RECURSION: &str = r#"function @fib@(n) {
  return n < 2 ? n : @fib@(n - 1) + @fib@(n - 2);
}
function @ackermann@(m, n) {
  if (m === 0) return n + 1;
  if (n === 0) return @ackermann@(m - 1, 1);
  return @ackermann@(m - 1, @ackermann@(m, n - 1));
}
function @hanoi@(disks, from, to, via, moves) {
  if (disks === 0) return moves;
  moves = @hanoi@(disks - 1, from, via, to, moves);
  moves.push(from + to);
  return @hanoi@(disks - 1, via, to, from, moves);
}
function @permutations@(items) {
  if (items.length <= 1) return [items];
  const result = [];
  items.forEach((item, index) => {
    const rest = items.slice(0, index).concat(items.slice(index + 1));
    for (const tail of @permutations@(rest)) result.push([item].concat(tail));
  });
  return result;
}
const gcd = (a, b) => (b === 0 ? a : gcd(b, a % b));
function isEven(n) { return n === 0 ? true : isOdd(n - 1); }
function isOdd(n) { return n === 0 ? false : isEven(n - 1); }
function buildTree(depth, label) {
  if (depth === 0) return { label, children: [] };
  return { label, children: [buildTree(depth - 1, label * 2), buildTree(depth - 1, label * 2 + 1)] };
}
function sumTree(node) {
  return node.children.reduce((total, child) => total + sumTree(child), node.label);
}
@check@(@fib@(10) === 55, "fib");
@out@("fib", @fib@(@n@));
@out@("ackermann", @ackermann@(2, @m@));
const moves = @hanoi@(@d@, "A", "C", "B", []);
@check@(moves.length === 2 ** @d@ - 1, "hanoi");
@out@("hanoi", moves.length, moves.slice(0, 4).join(" "));
const perms = @permutations@([1, 2, 3, @m@]);
@out@("perms", perms.length, perms[perms.length - 1].join(""));
@out@("gcd", gcd(@a@, @b@), isEven(@m@), isOdd(@m@));
@out@("tree", sumTree(buildTree(@d@, 1)));
"#;

pub(super) const CLASSES: &str = r#"class @Shape@ {
  static created = 0;
  #id;
  constructor(name) {
    this.name = name;
    this.#id = ++@Shape@.created;
  }
  get id() { return this.#id; }
  area() { return 0; }
  describe() { return `${this.name}#${this.#id} area=${this.area().toFixed(2)}`; }
  static compare(a, b) { return a.area() - b.area(); }
}
class @Rect@ extends @Shape@ {
  constructor(width, height) {
    super("rect");
    this.width = width;
    this.height = height;
  }
  area() { return this.width * this.height; }
  set size(value) { this.width = value; this.height = value; }
}
class @Circle@ extends @Shape@ {
  constructor(radius) { super("circle"); this.radius = radius; }
  area() { return Math.PI * this.radius * this.radius; }
  describe() { return "round " + super.describe(); }
}
const Triangle = class extends @Shape@ {
  constructor(base, height) { super("triangle"); Object.assign(this, { base, height }); }
  area() { return this.base * this.height / 2; }
};
class @Stack@ {
  constructor() { this.items = []; }
  push(...values) { this.items.push(...values); return this; }
  pop() { return this.items.pop(); }
  *[Symbol.iterator]() { for (let i = this.items.length - 1; i >= 0; i--) yield this.items[i]; }
  toString() { return "Stack(" + this.items.length + ")"; }
}
const shapes = [new @Rect@(@a@, @b@), new @Circle@(@c@), new Triangle(@b@, @c@), new @Rect@(1, 1)];
shapes[3].size = @c@;
shapes.sort(@Shape@.compare);
for (const shape of shapes) @out@(shape.describe(), shape instanceof @Rect@, shape.id);
@check@(@Shape@.created === 4, "instance count");
const stack = new @Stack@().push(1, 2, 3).push(@a@);
@out@(String(stack), [...stack].join("-"), stack.pop(), `${stack}`);
@out@(typeof @Shape@, Object.getPrototypeOf(@Circle@) === @Shape@, shapes.length);
"#;

pub(super) const STRINGS: &str = r#"const phrase = "@w1@ @w2@ the @w3@";
const words = phrase.split(" ");
@out@(words.length, words.map((w) => w[0].toUpperCase() + w.slice(1)).join(""));
@out@(phrase.replace(/e/g, "3").padStart(30, "."), phrase.indexOf("the"));
let codes = 0;
for (const ch of phrase) codes = (codes * 7 + ch.charCodeAt(0)) % 65521;
@out@("codes", codes);
const escaped = "tab\tquote\"single\'back\\slashé\x41";
@out@(escaped, escaped.length, JSON.stringify(escaped));
const emoji = "smile 😀 wave \u{1F44B}";
@out@(emoji.length, [...emoji].length, emoji.codePointAt(6).toString(16));
const table = { "first key": @a@, second: "@w2@", "3rd": [1, 2], "@w3@": true };
@out@(table["first key"], table.second, table["3rd"].length, Object.keys(table).join("|"));
@out@(JSON.stringify({ alpha: 1, beta: ["x", { gamma: null }], delta: "@w1@" }));
const template = `${words[0]}-${words.length * @a@}-${`nested ${phrase.length}`}`;
@out@(template, String.raw`a\nb${1 + 1}`, "ab".repeat(@b@ % 4 + 1));
const reversed = phrase.split("").reverse().join("");
@check@(reversed.split("").reverse().join("") === phrase, "reverse twice");
@out@(reversed.toUpperCase(), phrase.localeCompare("@w1@") > 0, "x".concat("y", @a@));
const parts = "k1=v1;k2=v2;k3=@w2@".split(";").map((kv) => kv.split("="));
const fromEntries = Object.fromEntries(parts);
@out@(fromEntries.k3, Object.entries(fromEntries).length, "  trim me ".trim() + "!");
@out@("a" < "b", "10" + 1, "10" - 1, +"3.5", `${null}${undefined}`);
"#;

pub(super) const OBJECTS: &str = r#"const @config@ = { name: "@w1@", depth: @a@, nested: { ratio: @b@ / 10, tags: ["x", "y"] } };
const { name, depth = 1, nested: { ratio, tags: [firstTag, ...otherTags] }, missing = "fallback" } = @config@;
@out@(name, depth, ratio, firstTag, otherTags.length, missing);
const value = @a@, label = "@w2@";
const shorthand = { value, label, [label + "Key"]: value * 2, ["n" + @b@]: true };
@out@(JSON.stringify(shorthand));
const merged = { ...@config@, depth: @b@, extra: { ...shorthand } };
@out@(merged.depth, merged.extra.value, Object.keys(merged).join(","));
const maybe = { inner: { deep: null } };
@out@(maybe?.inner?.deep?.value, maybe.nope?.value ?? "nullish", maybe.inner.deep ?? @a@);
@out@("value" in shorthand, "toString" in shorthand, Object.hasOwn(shorthand, "label"));
delete shorthand.value;
@out@(Object.keys(shorthand).length, shorthand.value === undefined);
const keys = [];
for (const key in merged) keys.push(key);
@out@(keys.join(" "));
function @update@({ x = 0, y = 0 } = {}, ...rest) {
  return [x + y, rest.length];
}
@out@(@update@().join(), @update@({ x: @a@ }, 1, 2).join(), @update@({ y: 2, x: 1 }).join());
const [first, , third = "t", ...remaining] = [@a@, @b@, undefined, 4, 5];
@out@(first, third, remaining.join(""));
let swapA = 1, swapB = 2;
[swapA, swapB] = [swapB, swapA];
@out@(swapA, swapB);
const accessor = {
  _hidden: @a@,
  get doubled() { return this._hidden * 2; },
  set doubled(v) { this._hidden = v / 2; },
};
accessor.doubled = @b@ * 2;
@out@(accessor.doubled, accessor._hidden);
const frozen = Object.freeze({ fixed: 1 });
@check@(Object.isFrozen(frozen), "freeze");
const counts = {};
for (const word of "a b a c b a".split(" ")) counts[word] = (counts[word] || 0) + 1;
@out@(JSON.stringify(counts));
"#;

pub(super) const SCOPING: &str = r#"var hoisted = typeof later;
function later() { return "later"; }
@out@(hoisted, typeof notYet, notYet);
var notYet = @a@;
let shadow = "outer";
{
  let shadow = "block";
  @out@(shadow);
  {
    const shadow = "inner";
    @out@(shadow);
  }
}
@out@(shadow);
function @args@(a, b = a * 2, c = a + b) {
  return [arguments.length, a, b, c].join(":");
}
@out@(@args@(@a@), @args@(1, 2), @args@(1, 2, 3, 4));
try {
  throw new Error("boom @w1@");
} catch (shadow) {
  @out@("caught", shadow.message);
}
try { null.field; } catch { @out@("optional catch binding"); } finally { @out@("finally"); }
function @classify@(n) {
  switch (n % 4) {
    case 0: return "zero";
    case 1:
    case 2: { let tag = "low"; return tag + n; }
    default: return "high";
  }
}
@out@([0, 1, 2, 3, 4].map(@classify@).join(","));
const self = {
  base: @a@,
  regular() { return this.base; },
  arrow: () => typeof this,
  nested() { return [1, 2].map((x) => x + this.base); },
};
@out@(self.regular(), self.arrow(), self.nested().join());
const @factorial@ = function fact(n) { return n <= 1 ? 1 : n * fact(n - 1); };
var fact = "unrelated";
@out@(@factorial@(@d@), fact);
let total = 0;
loop: for (let i = 0; i < 5; i++) {
  for (let j = 0; j < 5; j++) {
    if (j > i) continue loop;
    if (i * j > @b@) break loop;
    total += i * j;
  }
}
@out@("total", total);
let x = 1;
function readX() { return x; }
function withLocal() { let x = 2; return readX() + x; }
@out@(withLocal(), typeof undeclaredThing);
var counter = 0;
const inc = () => ++counter;
[1, 2, 3].forEach(inc);
@out@(counter, (() => { var counter = 100; return counter; })(), counter);
do { x *= 3; } while (x < @b@ * 10);
@out@(x, void 0, (1, 2, @a@));
"#;

pub(super) const ASYNC: &str = r#"function* @range@(start, end, step = 1) {
  for (let i = start; i < end; i += step) yield i;
}
function* @fibs@() {
  let [a, b] = [0, 1];
  while (true) { yield a; [a, b] = [b, a + b]; }
}
const firstFibs = [];
for (const f of @fibs@()) { if (firstFibs.length >= @n@) break; firstFibs.push(f); }
@out@([...@range@(0, @a@, 3)].join(","), firstFibs.join(" "));
const gen = @range@(0, 3);
@out@(JSON.stringify(gen.next()), JSON.stringify([...gen]));
const delay = (value) => new Promise((resolve) => resolve(value));
async function @pipeline@(values) {
  const results = [];
  for (const v of values) results.push(await delay(v * @b@));
  return results;
}
async function* @stream@(limit) {
  for (let i = 0; i < limit; i++) yield await delay(i);
}
async function @main@() {
  const order = [];
  const first = delay("a").then((v) => order.push(v));
  order.push("sync");
  await first;
  @out@(order.join(""));
  @out@((await @pipeline@([1, 2, 3])).join("|"));
  const settled = await Promise.allSettled([delay(1), Promise.reject(new Error("nope"))]);
  @out@(settled.map((s) => s.status).join(","));
  let streamed = 0;
  for await (const v of @stream@(@d@)) streamed += v;
  @out@("streamed", streamed);
  try {
    await Promise.reject(new Error("rejected @w1@"));
  } catch (err) {
    @out@(err.message);
  }
  const all = await Promise.all([@pipeline@([@a@]), delay("x")]);
  @out@(JSON.stringify(all));
}
@main@().then(() => {
  console.log("checksum " + @h@.toString(16));
});
"#;

pub(super) const ARRAYS: &str = r#"const data = Array.from({ length: @n@ }, (_, i) => (i * @a@ + @b@) % 97);
const sorted = [...data].sort((a, b) => a - b);
@check@(sorted.every((v, i) => i === 0 || sorted[i - 1] <= v), "sorted");
@out@(sorted.slice(0, 5).join(","), Math.min(...data), Math.max(...data));
const evens = data.filter((v) => v % 2 === 0);
const doubled = evens.map((v) => v * 2);
const total = doubled.reduce((sum, v) => sum + v, 0);
@out@(evens.length, total, data.some((v) => v > 90), data.every((v) => v >= 0));
@out@(data.indexOf(@b@), data.includes(0), data.find((v) => v > 50), data.findIndex((v) => v > 50));
const nested = [[1, [2]], [3, [4, [5]]]];
@out@(nested.flat(2).join(), nested.flat(Infinity).length, [1, 2].flatMap((x) => [x, x * 10]).join());
const grouped = data.reduce((groups, v) => {
  const key = v % 3 === 0 ? "three" : "other";
  (groups[key] = groups[key] || []).push(v);
  return groups;
}, {});
@out@(grouped.three.length, grouped.other.length);
const matrix = [];
for (let r = 0; r < 4; r++) {
  matrix.push([]);
  for (let c = 0; c < 4; c++) matrix[r].push(r * 4 + c);
}
const transposed = matrix[0].map((_, c) => matrix.map((row) => row[c]));
@out@(transposed.map((row) => row.join("")).join("/"));
const typed = new Int32Array(8).map((_, i) => i * i - @a@);
@out@(Array.from(typed).join(","), typed.length);
const words = ["pear", "apple", "fig", "@w1@", "kiwi"];
words.sort();
@out@(words.join(" "), words.map((w) => w.length).join(""));
words.splice(1, 2, "inserted");
@out@(words.join(" "), words.at(-1), [3, 1, 2].reverse().join(""));
const set = new Set(data);
const map = new Map(words.map((w, i) => [w, i]));
@out@(set.size, map.get("inserted"), [...map.keys()].join("+"));
"#;

pub(super) const DYNAMIC: &str = r#"function @evaluate@(expression) {
  const factor = @a@;
  let localState = @b@;
  return eval(expression);
}
@out@(@evaluate@("factor * 2 + localState"), @evaluate@("typeof localState"));
function @outerHelper@(n) { return n + 1; }
function @caller@() {
  const offset = @b@;
  return eval("@outerHelper@(offset)");
}
@out@(@caller@());
const makeAdder = new Function("a", "b", "return a + b + @a@;");
@out@(makeAdder(1, 2));
var indirect = eval;
var globalValue = indirect("typeof globalThis");
@out@(globalValue);
function @untouched@(input) {
  var renamedLater = input * 3;
  return renamedLater - 1;
}
@out@(@untouched@(@a@));
"#;

pub(super) const WITH_SCOPE: &str = r#"function @lookup@(record) {
  var fallback = "outer-@w1@";
  with (record) {
    return typeof title !== "undefined" ? title + ":" + fallback : fallback;
  }
}
@out@(@lookup@({ title: "@w2@" }), @lookup@({}));
function @plain@(items) {
  let accumulated = 0;
  for (const item of items) accumulated += item * @a@;
  return accumulated;
}
@out@(@plain@([1, 2, 3]));
"#;

pub(super) const ESM_MATH: &str = r#"export const SCALE = @a@;
export function square(n) {
  return n * n;
}
function helper(value) {
  return value * SCALE;
}
export function scaled(n) {
  return helper(n) + square(n);
}
export let counter = 0;
export function bump() {
  counter += 1;
  return counter;
}
export default function describe(n) {
  return "n=" + n + " scaled=" + scaled(n);
}
"#;

pub(super) const ESM_SHAPES: &str = r#"import { square, SCALE } from "./math.js";
export default class Box {
  constructor(side) {
    this.side = side;
  }
  area() {
    return square(this.side) * SCALE;
  }
}
export class Label {
  constructor(text) { this.text = text; }
  render() { return `[${this.text}]`; }
}
const helper = (x) => x + "!";
export { helper as shout };
"#;

pub(super) const ESM_INDEX: &str = r#"export { square as sq, scaled } from "./math.js";
export * from "./strings.js";
export { default as Box, Label } from "./shapes.js";
"#;

pub(super) const ESM_STRINGS: &str = r#"export function capitalize(word) {
  return word.charAt(0).toUpperCase() + word.slice(1);
}
export const GREETING = "@w1@";
const internal = ["@w2@", "@w3@"];
export function phrase() {
  return internal.map(capitalize).join(" ");
}
"#;

pub(super) const ESM_MAIN: &str = r#"import describe, { counter, bump, SCALE as scaleFactor } from "./lib/math.js";
import * as everything from "./lib/index.js";
import { shout } from "./lib/shapes.js";
const helper = (n) => n * 100;
@out@(describe(@b@), scaleFactor, helper(2));
@out@("counter", counter, bump(), bump(), counter);
const box = new everything.Box(@c@);
@out@(box.area(), everything.sq(@c@), everything.scaled(2));
@out@(new everything.Label(everything.GREETING).render(), everything.phrase(), shout("hey"));
@out@(Object.keys(everything).sort().join(","));
const dynamicModule = await import("./lib/strings.js");
@out@(dynamicModule.capitalize("@w3@"));
"#;

pub(super) const CJS_LIB: &str = r#"const PREFIX = "@w1@";
function format(value) {
  return PREFIX + ":" + value;
}
function total(items) {
  let sum = 0;
  for (const item of items) sum += item.amount;
  return sum;
}
module.exports = { format, total };
module.exports.version = @a@;
exports.unused = "never exported because module.exports was replaced";
"#;

pub(super) const CJS_MAIN: &str = r#"const { format, total } = require("./lib.js");
const lib = require("./lib.js");
const items = [{ amount: @a@ }, { amount: @b@ }, { amount: @c@ }];
@out@(format(total(items)), lib.version, lib.unused === undefined);
@out@(typeof module, typeof exports, typeof require);
"#;

pub(super) const GLOBALS_SETUP: &str = r#"globalThis.sharedTotal = @a@;
globalThis.sharedLog = [];
export function record(entry) {
  sharedLog.push(entry);
  sharedTotal += entry.length;
}
"#;

pub(super) const GLOBALS_MAIN: &str = r#"import { record } from "./setup.js";
record("@w1@");
record("@w2@");
@out@(sharedTotal, sharedLog.join("/"), typeof globalThis.sharedTotal);
function sharedTotalLocal() {
  const sharedTotal = -1;
  return sharedTotal;
}
@out@(sharedTotalLocal(), sharedTotal);
"#;

pub(super) const SYNTAX: &str = r#"const ratio = @a@ / 2 / 1;
const pattern = /ab+c\/[/]?/gi;
@out@(ratio, pattern.test("xABBC/"), "a/b".split(/\//).length, 10 / 2 / 5);
let n = @a@
let m = n
++m
@out@(n, m)
const fn = function () {
  return (
    n * 2
  )
}
@out@(fn())
const big = 2n ** 64n + @b@n;
@out@(big.toString(), typeof big, 1_000_000 + @b@, 0x1f, 0o17, 0b101, 1e3, .5);
let value = null;
value ??= @a@;
value ||= 0;
value &&= value + 1;
@out@(value, !!value, -(-value), +!value, typeof typeof value);
const obj = { if: 1, class: 2, new: 3, get: 4, set: 5, static: 6, of: 7, let: 8 };
@out@(obj.if + obj.class + obj.new + obj.get + obj.set + obj.static + obj.of + obj.let);
const a = 1, b = 2;
const result = a
  ? b
    ? "both"
    : "a"
  : "none";
@out@(result, a < b > false, a in [1, 2]);
var i = 0, s = "";
while (i < 3) s += i++ + "-" + --i + i++ + ";";
@out@(s);
@out@([1, 2, 3].map((x) => ({ x })).map(({ x }) => x * @b@).join());
label1: {
  @out@("inside block label");
  break label1;
}
if (a) @out@("no braces"); else @out@("else");
@out@(`line1
line2`.split("\n").length, (function () { return new.target === undefined ? "call" : "new"; })());
"#;

pub(super) const MIXED: &str = r#"const @inventory@ = new Map();
function @addItem@(name, qty, price) {
  const existing = @inventory@.get(name) || { qty: 0, price };
  existing.qty += qty;
  existing.price = price;
  @inventory@.set(name, existing);
  return existing.qty;
}
function @report@() {
  const lines = [];
  let grand = 0;
  for (const [name, { qty, price }] of @inventory@) {
    const lineTotal = Math.round(qty * price * 100) / 100;
    grand += lineTotal;
    lines.push(`${name.padEnd(8)}${String(qty).padStart(4)}${lineTotal.toFixed(2).padStart(10)}`);
  }
  lines.push("total " + grand.toFixed(2));
  return lines;
}
const catalog = ["@w1@", "@w2@", "@w3@", "widget", "gadget"];
for (let round = 0; round < @n@; round++) {
  const name = catalog[(round * @a@) % catalog.length];
  @addItem@(name, (round % 5) + 1, ((round * @b@) % 17) + 0.25);
}
for (const line of @report@()) @out@(line);
class @Ledger@ {
  #entries = [];
  record(kind, amount) {
    this.#entries.push({ kind, amount });
    return this;
  }
  balance() {
    return this.#entries.reduce((b, e) => (e.kind === "credit" ? b + e.amount : b - e.amount), 0);
  }
  static from(pairs) {
    const ledger = new @Ledger@();
    for (const [k, a] of pairs) ledger.record(k, a);
    return ledger;
  }
}
const ledger = @Ledger@.from([["credit", @a@], ["debit", @b@], ["credit", @c@]]);
@out@("balance", ledger.balance());
const text = catalog.join(" ").replace(/(\w+)/g, (match, word) => word.length + word[0]);
@out@(text);
"#;

/// Identifier choices substituted for `@key@` placeholders.
pub(super) const WORDS: &[&str] = &[
    "apple", "river", "stone", "cloud", "ember", "maple", "delta", "orbit", "pixel", "quartz", "raven", "sable",
    "tidal", "umber", "vivid", "willow", "zephyr", "amber", "bronze", "cedar", "dune", "fjord", "grove", "harbor",
];

pub(super) const NAME_STEMS: &[&str] =
    &["compute", "process", "collect", "render", "resolve", "measure", "combine", "transform", "evaluate", "gather"];
