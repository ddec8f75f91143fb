//! The category algebra: primitive categories, left/right divisions,
//! text syntax, structural queries (numerators, denominators, counts),
//! and the splitting maps `phi` and `psi`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors from category construction and parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    /// Malformed category text (unbalanced parentheses, chained divisions
    /// without parentheses, empty atoms, stray tokens).
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    /// A primitive name that is not available to user input: names starting
    /// with `_` are reserved for machine-generated primitives.
    #[error("primitive name `{name}` is reserved (names starting with `_` are machine-generated)")]
    Name { name: String },
    /// A name that is not a valid identifier at all.
    #[error("`{name}` is not a valid primitive name")]
    InvalidName { name: String },
    /// A category string must contain at least one category.
    #[error("a category string must be non-empty")]
    Empty,
}

fn syntax(pos: usize, msg: impl Into<String>) -> CategoryError {
    CategoryError::Syntax {
        pos,
        msg: msg.into(),
    }
}

/// Where a primitive category comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimOrigin {
    /// Named by the user (grammar nonterminals, hand-written categories).
    User,
    /// Allocated by a gadget builder; name starts with `_`.
    Auxiliary,
    /// One of the two global delimiters `_l` and `_r`.
    Sentinel,
}

impl fmt::Display for PrimOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimOrigin::User => write!(f, "user"),
            PrimOrigin::Auxiliary => write!(f, "auxiliary"),
            PrimOrigin::Sentinel => write!(f, "sentinel"),
        }
    }
}

/// Name of the left sentinel primitive.
pub const SENTINEL_LEFT: &str = "_l";
/// Name of the right sentinel primitive.
pub const SENTINEL_RIGHT: &str = "_r";

/// A primitive category. Two primitives are equal iff their names are equal;
/// the origin is fully determined by the name (`_l`/`_r` are the sentinels,
/// any other `_`-prefixed name is auxiliary).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prim {
    name: Arc<str>,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '\'')
}

fn is_valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => chars.all(is_ident_continue),
        _ => false,
    }
}

impl Prim {
    /// Creates a primitive from a name. The name must be an identifier
    /// (letter or `_`, then letters, digits, `_`, `.`, `-`, `'`).
    pub fn new(name: &str) -> Result<Prim, CategoryError> {
        if !is_valid_ident(name) {
            return Err(CategoryError::InvalidName {
                name: name.to_string(),
            });
        }
        Ok(Prim { name: name.into() })
    }

    /// The left sentinel `_l`.
    pub fn sentinel_left() -> Prim {
        Prim {
            name: SENTINEL_LEFT.into(),
        }
    }

    /// The right sentinel `_r`.
    pub fn sentinel_right() -> Prim {
        Prim {
            name: SENTINEL_RIGHT.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn origin(&self) -> PrimOrigin {
        match self.name() {
            SENTINEL_LEFT | SENTINEL_RIGHT => PrimOrigin::Sentinel,
            n if n.starts_with('_') => PrimOrigin::Auxiliary,
            _ => PrimOrigin::User,
        }
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl fmt::Debug for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prim({})", self.name)
    }
}

/// A category: a primitive, a right division `A/B`, or a left division `B\A`.
///
/// In `A/B` and `B\A`, `A` is the numerator and `B` the denominator.
/// Equality is structural; values are immutable and cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Prim(Prim),
    /// `A/B`, stored as (numerator, denominator).
    Right(Arc<Category>, Arc<Category>),
    /// `B\A`, stored as (denominator, numerator).
    Left(Arc<Category>, Arc<Category>),
}

impl Category {
    pub fn prim(p: Prim) -> Category {
        Category::Prim(p)
    }

    /// Builds `num/den`.
    pub fn rdiv(num: Category, den: Category) -> Category {
        Category::Right(Arc::new(num), Arc::new(den))
    }

    /// Builds `den\num`.
    pub fn ldiv(den: Category, num: Category) -> Category {
        Category::Left(Arc::new(den), Arc::new(num))
    }

    /// Parses user-written category text. Primitive names starting with `_`
    /// are rejected; see [`Category::parse_machine`] for machine input.
    pub fn parse(text: &str) -> Result<Category, CategoryError> {
        Parser::new(text, false).parse_single()
    }

    /// Parses machine-generated category text, where `_`-prefixed primitives
    /// (auxiliaries and the sentinels) are allowed.
    pub fn parse_machine(text: &str) -> Result<Category, CategoryError> {
        Parser::new(text, true).parse_single()
    }

    /// The numerator, for a division.
    pub fn numerator(&self) -> Option<&Category> {
        match self {
            Category::Prim(_) => None,
            Category::Right(num, _) | Category::Left(_, num) => Some(num),
        }
    }

    /// The denominator, for a division.
    pub fn denominator(&self) -> Option<&Category> {
        match self {
            Category::Prim(_) => None,
            Category::Right(_, den) | Category::Left(den, _) => Some(den),
        }
    }

    /// All categories occurring as numerators: empty for a primitive, and
    /// `{A} ∪ numerators(A)` for both `A/B` and `B\A`.
    pub fn numerators(&self) -> BTreeSet<Category> {
        let mut out = BTreeSet::new();
        let mut cur = self;
        while let Some(num) = cur.numerator() {
            out.insert(num.clone());
            cur = num;
        }
        out
    }

    /// All categories occurring as denominators: empty for a primitive, and
    /// `{B} ∪ denominators(A)` for both `A/B` and `B\A`.
    pub fn denominators(&self) -> BTreeSet<Category> {
        let mut out = BTreeSet::new();
        let mut cur = self;
        while let (Some(num), Some(den)) = (cur.numerator(), cur.denominator()) {
            out.insert(den.clone());
            cur = num;
        }
        out
    }

    /// The count of `p`: `1` on `p` itself, `0` on other primitives, and
    /// `count(A) - count(B)` on both `A/B` and `B\A`. Invariant under
    /// reduction.
    pub fn count(&self, p: &Prim) -> i64 {
        match self {
            Category::Prim(q) => i64::from(q == p),
            Category::Right(num, den) | Category::Left(den, num) => {
                num.count(p) - den.count(p)
            }
        }
    }

    /// Counts of every primitive occurring in this category.
    pub fn counts(&self) -> CountVector {
        let mut v = CountVector::default();
        self.accumulate_counts(1, &mut v);
        v
    }

    fn accumulate_counts(&self, sign: i64, v: &mut CountVector) {
        match self {
            Category::Prim(p) => v.add(p, sign),
            Category::Right(num, den) | Category::Left(den, num) => {
                num.accumulate_counts(sign, v);
                den.accumulate_counts(-sign, v);
            }
        }
    }

    /// All primitives occurring anywhere in this category.
    pub fn prims(&self) -> BTreeSet<Prim> {
        let mut out = BTreeSet::new();
        self.collect_prims(&mut out);
        out
    }

    fn collect_prims(&self, out: &mut BTreeSet<Prim>) {
        match self {
            Category::Prim(p) => {
                out.insert(p.clone());
            }
            Category::Right(a, b) | Category::Left(a, b) => {
                a.collect_prims(out);
                b.collect_prims(out);
            }
        }
    }

    /// True iff the primitive `p` occurs anywhere in this category.
    pub fn mentions(&self, p: &Prim) -> bool {
        match self {
            Category::Prim(q) => q == p,
            Category::Right(a, b) | Category::Left(a, b) => {
                a.mentions(p) || b.mentions(p)
            }
        }
    }

    /// The splitting map: every primitive `p` becomes `p/p`, divisions are
    /// mapped structurally. The image has zero count of every primitive.
    pub fn phi(&self) -> Category {
        match self {
            Category::Prim(p) => {
                Category::rdiv(Category::Prim(p.clone()), Category::Prim(p.clone()))
            }
            Category::Right(num, den) => Category::rdiv(num.phi(), den.phi()),
            Category::Left(den, num) => Category::ldiv(den.phi(), num.phi()),
        }
    }

    /// The sentinel-wrapped splitting map `_l\(phi(A)/_r)`.
    pub fn psi(&self) -> Category {
        Category::ldiv(
            Category::Prim(Prim::sentinel_left()),
            Category::rdiv(self.phi(), Category::Prim(Prim::sentinel_right())),
        )
    }

    /// Height of the category tree; a primitive has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Category::Prim(_) => 0,
            Category::Right(a, b) | Category::Left(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Prim(p) => write!(f, "{p}"),
            _ => write!(f, "({self})"),
        }
    }
}

/// Canonical text with minimal parentheses: the outermost pair is omitted,
/// every nested division is parenthesized. `Category::parse` inverts this.
impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Prim(p) => write!(f, "{p}"),
            Category::Right(num, den) => {
                num.fmt_atom(f)?;
                write!(f, "/")?;
                den.fmt_atom(f)
            }
            Category::Left(den, num) => {
                den.fmt_atom(f)?;
                write!(f, "\\")?;
                num.fmt_atom(f)
            }
        }
    }
}

impl fmt::Debug for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<Prim> for Category {
    fn from(p: Prim) -> Category {
        Category::Prim(p)
    }
}

/// A map from primitives to integer counts; absent entries are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountVector {
    entries: BTreeMap<Prim, i64>,
}

impl CountVector {
    pub fn get(&self, p: &Prim) -> i64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn add(&mut self, p: &Prim, delta: i64) {
        if delta == 0 {
            return;
        }
        let e = self.entries.entry(p.clone()).or_insert(0);
        *e += delta;
        if *e == 0 {
            self.entries.remove(p);
        }
    }

    pub fn add_all(&mut self, other: &CountVector) {
        for (p, n) in &other.entries {
            self.add(p, *n);
        }
    }

    /// True iff every primitive has count zero.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Prim, i64)> {
        self.entries.iter().map(|(p, n)| (p, *n))
    }
}

/// A non-empty, order-significant sequence of categories: the objects the
/// reduction calculus works on. Written `C1; C2; ...; Cn`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryString {
    items: Vec<Category>,
}

impl CategoryString {
    pub fn new(items: Vec<Category>) -> Result<CategoryString, CategoryError> {
        if items.is_empty() {
            return Err(CategoryError::Empty);
        }
        Ok(CategoryString { items })
    }

    pub fn singleton(item: Category) -> CategoryString {
        CategoryString { items: vec![item] }
    }

    /// Parses `C1; C2; ...; Cn` with user-named primitives.
    pub fn parse(text: &str) -> Result<CategoryString, CategoryError> {
        Self::parse_with(text, false)
    }

    /// Parses `C1; C2; ...; Cn` allowing `_`-prefixed primitives.
    pub fn parse_machine(text: &str) -> Result<CategoryString, CategoryError> {
        Self::parse_with(text, true)
    }

    fn parse_with(text: &str, machine: bool) -> Result<CategoryString, CategoryError> {
        if text.trim().is_empty() {
            return Err(CategoryError::Empty);
        }
        let mut items = Vec::new();
        for part in text.split(';') {
            items.push(Parser::new(part, machine).parse_single()?);
        }
        CategoryString::new(items)
    }

    pub fn items(&self) -> &[Category] {
        &self.items
    }

    /// Number of items; category strings are never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Category> {
        self.items.iter()
    }

    pub fn concat(&self, other: &CategoryString) -> CategoryString {
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        CategoryString { items }
    }

    /// The sub-sequence `[from, to)`; `None` when empty or out of range.
    pub fn slice(&self, from: usize, to: usize) -> Option<CategoryString> {
        if from >= to || to > self.items.len() {
            return None;
        }
        Some(CategoryString {
            items: self.items[from..to].to_vec(),
        })
    }

    pub fn count(&self, p: &Prim) -> i64 {
        self.items.iter().map(|c| c.count(p)).sum()
    }

    pub fn counts(&self) -> CountVector {
        let mut v = CountVector::default();
        for c in &self.items {
            c.accumulate_counts(1, &mut v);
        }
        v
    }

    pub fn numerators(&self) -> BTreeSet<Category> {
        self.items.iter().flat_map(|c| c.numerators()).collect()
    }

    pub fn denominators(&self) -> BTreeSet<Category> {
        self.items.iter().flat_map(|c| c.denominators()).collect()
    }

    pub fn prims(&self) -> BTreeSet<Prim> {
        let mut out = BTreeSet::new();
        for c in &self.items {
            c.collect_prims(&mut out);
        }
        out
    }
}

impl fmt::Display for CategoryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.items.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CategoryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Category> for CategoryString {
    fn from(c: Category) -> CategoryString {
        CategoryString::singleton(c)
    }
}

impl FromIterator<Category> for CategoryString {
    /// Panics when the iterator is empty; use [`CategoryString::new`] for
    /// fallible construction.
    fn from_iter<I: IntoIterator<Item = Category>>(iter: I) -> CategoryString {
        CategoryString::new(iter.into_iter().collect()).expect("empty category string")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Ident(usize, usize), // byte range into the source
    Slash,
    Backslash,
    Open,
    Close,
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    machine: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, machine: bool) -> Parser<'a> {
        Parser {
            src,
            tokens: Vec::new(),
            pos: 0,
            machine,
        }
    }

    fn tokenize(&mut self) -> Result<(), CategoryError> {
        let bytes = self.src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let rest = &self.src[i..];
            let c = rest.chars().next().unwrap();
            if c.is_whitespace() {
                i += c.len_utf8();
                continue;
            }
            let tok = match c {
                '/' => Token::Slash,
                '\\' => Token::Backslash,
                '(' => Token::Open,
                ')' => Token::Close,
                _ if is_ident_start(c) => {
                    let start = i;
                    let mut end = i + c.len_utf8();
                    while let Some(n) = self.src[end..].chars().next() {
                        if is_ident_continue(n) {
                            end += n.len_utf8();
                        } else {
                            break;
                        }
                    }
                    self.tokens.push((start, Token::Ident(start, end)));
                    i = end;
                    continue;
                }
                _ => return Err(syntax(i, format!("unexpected character `{c}`"))),
            };
            self.tokens.push((i, tok));
            i += c.len_utf8();
        }
        Ok(())
    }

    fn peek(&self) -> Option<(usize, Token)> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.peek();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_single(mut self) -> Result<Category, CategoryError> {
        self.tokenize()?;
        if self.tokens.is_empty() {
            return Err(syntax(0, "empty category"));
        }
        let cat = self.parse_cat()?;
        if let Some((at, tok)) = self.peek() {
            let msg = match tok {
                Token::Slash | Token::Backslash => {
                    "chained divisions are not associative; parenthesize".to_string()
                }
                _ => "trailing input after category".to_string(),
            };
            return Err(syntax(at, msg));
        }
        Ok(cat)
    }

    // Cat := Atom | Atom '/' Atom | Atom '\' Atom
    fn parse_cat(&mut self) -> Result<Category, CategoryError> {
        let first = self.parse_atom()?;
        match self.peek() {
            Some((_, Token::Slash)) => {
                self.bump();
                let den = self.parse_atom()?;
                Ok(Category::rdiv(first, den))
            }
            Some((_, Token::Backslash)) => {
                self.bump();
                let num = self.parse_atom()?;
                Ok(Category::ldiv(first, num))
            }
            _ => Ok(first),
        }
    }

    // Atom := Prim | '(' Cat ')'
    fn parse_atom(&mut self) -> Result<Category, CategoryError> {
        match self.bump() {
            Some((_, Token::Ident(start, end))) => {
                let name = &self.src[start..end];
                if !self.machine && name.starts_with('_') {
                    return Err(CategoryError::Name {
                        name: name.to_string(),
                    });
                }
                Ok(Category::Prim(Prim::new(name)?))
            }
            Some((open_at, Token::Open)) => {
                let inner = self.parse_cat()?;
                match self.bump() {
                    Some((_, Token::Close)) => Ok(inner),
                    Some((at, Token::Slash | Token::Backslash)) => Err(syntax(
                        at,
                        "chained divisions are not associative; parenthesize",
                    )),
                    Some((at, _)) => Err(syntax(at, "expected `)`")),
                    None => Err(syntax(open_at, "unclosed `(`")),
                }
            }
            Some((at, Token::Close)) => Err(syntax(at, "unexpected `)`")),
            Some((at, _)) => Err(syntax(at, "expected a primitive or `(`")),
            None => Err(syntax(self.src.len(), "expected a category, found end of input")),
        }
    }
}
