//! Simulating multiple category assignment with a unique one.
//!
//! A string of categories can be reducible to several different categories,
//! and that is the only freedom a grammar with one category per symbol has.
//! This module builds the gadget strings that exploit it:
//!
//! - `x`/`y`: reducible to `phi(A)` and `t/t` (resp. `t/t` and `phi(B)`);
//! - `z`: combines them, reducible to `phi(A)` and `phi(B)`;
//! - `z'`: `z` guarded by a right sentinel division, reducible to
//!   `phi(A)/_r` and `phi(B)/_r`;
//! - `u`: `z'` guarded by the left sentinel, reducible to `psi(A)` and
//!   `psi(B)`;
//! - `w`: a chain of `u` blocks, reducible to `psi(A_i)` for every `i`.
//!
//! On top of them, [`encode_grammar`] maps a 2-GNF grammar to a categorial
//! grammar with unique category assignment over a fresh alphabet, together
//! with a homomorphism `h` such that a word is generated by the grammar iff
//! the image `h(word)` reduces to the target `S/S`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{Category, CategoryString, Prim, PrimOrigin};
use crate::grammar::{self, Cfg, GrammarError};
use crate::reduce;

/// Errors from gadget construction and encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    /// Gadget parameters must be of shape `p`, `p/q` or `(p/q)/s` with
    /// primitive `p`, `q`, `s`.
    #[error("category `{cat}` does not have shape p, p/q or (p/q)/s")]
    Shape { cat: String },
    /// A designated-fresh primitive occurs in a parameter category.
    #[error("primitive `{prim}` is not fresh: it occurs in `{cat}`")]
    Freshness { prim: String, cat: String },
    /// The designated-fresh primitives of one gadget must be pairwise
    /// distinct.
    #[error("fresh primitive `{prim}` is used twice in one gadget")]
    DuplicateFresh { prim: String },
    #[error("the two gadget categories must be distinct, got `{cat}` twice")]
    EqualCategories { cat: String },
    #[error("gadget categories must be pairwise distinct, got `{cat}` twice")]
    DuplicateCategory { cat: String },
    #[error("grammar is not in 2-GNF (rules X -> a, X -> a Y, X -> a Y Z)")]
    NotGnf2,
    /// A terminal of the alphabet has no rule, so its image under `h`
    /// would be undefined.
    #[error("terminal `{name}` has no rule; its homomorphic image is undefined")]
    UncoveredTerminal { name: String },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("invalid encoding bundle: {msg}")]
    Bundle { msg: String },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

/// The three category shapes a 2-GNF rule can induce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape<'a> {
    Atom(&'a Prim),
    Frac(&'a Prim, &'a Prim),
    DoubleFrac(&'a Prim, &'a Prim, &'a Prim),
}

fn shape_of(c: &Category) -> Result<Shape<'_>, EncodeError> {
    let shape_err = || EncodeError::Shape { cat: c.to_string() };
    match c {
        Category::Prim(p) => Ok(Shape::Atom(p)),
        Category::Right(num, den) => {
            let Category::Prim(den) = &**den else {
                return Err(shape_err());
            };
            match &**num {
                Category::Prim(p) => Ok(Shape::Frac(p, den)),
                Category::Right(p, q) => match (&**p, &**q) {
                    (Category::Prim(p), Category::Prim(q)) => Ok(Shape::DoubleFrac(p, q, den)),
                    _ => Err(shape_err()),
                },
                _ => Err(shape_err()),
            }
        }
        Category::Left(..) => Err(shape_err()),
    }
}

/// Which gadget a [`GadgetString`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetKind {
    X,
    Y,
    Z,
    ZPrime,
    U,
    W,
}

impl std::fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GadgetKind::X => "x",
            GadgetKind::Y => "y",
            GadgetKind::Z => "z",
            GadgetKind::ZPrime => "zprime",
            GadgetKind::U => "u",
            GadgetKind::W => "w",
        };
        write!(f, "{s}")
    }
}

/// A span of a `w` gadget: either a connector block of divided `psi`
/// categories, or an embedded `u` gadget for two adjacent list entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WSegment {
    /// The single-item `psi(A_1)` form of a one-category `w`.
    Psi,
    /// Connector block number `index` (0-based, left to right).
    Connector { index: usize },
    /// The `u` gadget between list entries `instance` and `instance + 1`.
    U { instance: usize },
}

/// Where a segment sits inside a `w` gadget's item list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WSpan {
    pub segment: WSegment,
    pub start: usize,
    pub len: usize,
}

/// A constructed gadget: its items, the parameter categories, and the
/// fresh primitives it introduced (in order of introduction).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetString {
    pub kind: GadgetKind,
    pub items: CategoryString,
    pub cats: Vec<Category>,
    pub fresh: Vec<Prim>,
    layout: Vec<WSpan>,
}

impl GadgetString {
    /// Number of items; gadget strings are never empty.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Segment layout; populated for `w` gadgets, empty otherwise.
    pub fn layout(&self) -> &[WSpan] {
        &self.layout
    }
}

/// The fresh primitives one `z`/`z'`/`u` instance draws on: `t`, `k1..k4`
/// for `z`, plus `o1`/`o2` for `z'` and `o3`/`o4` for `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetFresh {
    pub t: Prim,
    pub k: [Prim; 4],
    pub o: [Prim; 4],
}

impl GadgetFresh {
    /// Auxiliary names scoped by owner and instance: `_t.<scope>.<n>`,
    /// `_k1.<scope>.<n>`, ... (or `_t.<n>` with an empty scope).
    pub fn scoped(scope: &str, instance: usize) -> GadgetFresh {
        let name = |base: &str| {
            let text = if scope.is_empty() {
                format!("_{base}.{instance}")
            } else {
                format!("_{base}.{scope}.{instance}")
            };
            Prim::new(&text).expect("generated fresh names are valid identifiers")
        };
        GadgetFresh {
            t: name("t"),
            k: [name("k1"), name("k2"), name("k3"), name("k4")],
            o: [name("o1"), name("o2"), name("o3"), name("o4")],
        }
    }

    /// Short user-level names `t`, `k1..k4`, `o1..o4`, matching the letters
    /// conventionally used for these roles. Only valid when none of them
    /// occurs in the parameter categories.
    pub fn plain() -> GadgetFresh {
        let name = |s: &str| Prim::new(s).unwrap();
        GadgetFresh {
            t: name("t"),
            k: [name("k1"), name("k2"), name("k3"), name("k4")],
            o: [name("o1"), name("o2"), name("o3"), name("o4")],
        }
    }

    fn z_prims(&self) -> Vec<&Prim> {
        vec![&self.t, &self.k[0], &self.k[1], &self.k[2], &self.k[3]]
    }

    fn z_prime_prims(&self) -> Vec<&Prim> {
        let mut v = self.z_prims();
        v.push(&self.o[0]);
        v.push(&self.o[1]);
        v
    }

    fn u_prims(&self) -> Vec<&Prim> {
        let mut v = self.z_prime_prims();
        v.push(&self.o[2]);
        v.push(&self.o[3]);
        v
    }
}

/// Deterministic allocator for the fresh primitives of one letter's
/// gadgets: per-instance [`GadgetFresh`] bundles and the `w`-level
/// connector primitives `_e1..`.
#[derive(Debug, Clone)]
pub struct FreshNamer {
    scope: String,
}

impl FreshNamer {
    /// `scope` is usually the letter whose image is being built; it may be
    /// empty for stand-alone gadgets.
    pub fn new(scope: &str) -> FreshNamer {
        FreshNamer {
            scope: scope.to_string(),
        }
    }

    pub fn gadget(&self, instance: usize) -> GadgetFresh {
        GadgetFresh::scoped(&self.scope, instance)
    }

    /// The `w` connector primitive `_e<index>` (1-based index).
    pub fn connector(&self, index: usize) -> Prim {
        let text = if self.scope.is_empty() {
            format!("_e{index}")
        } else {
            format!("_e{index}.{}", self.scope)
        };
        Prim::new(&text).expect("generated fresh names are valid identifiers")
    }
}

fn ensure_distinct(prims: &[&Prim]) -> Result<(), EncodeError> {
    for (i, p) in prims.iter().enumerate() {
        if prims[..i].contains(p) {
            return Err(EncodeError::DuplicateFresh {
                prim: p.name().to_string(),
            });
        }
    }
    Ok(())
}

fn ensure_fresh(prims: &[&Prim], cats: &[&Category]) -> Result<(), EncodeError> {
    ensure_distinct(prims)?;
    for p in prims {
        for c in cats {
            if c.mentions(p) {
                return Err(EncodeError::Freshness {
                    prim: p.name().to_string(),
                    cat: c.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn prim(p: &Prim) -> Category {
    Category::Prim(p.clone())
}

/// `p/p` for a primitive.
fn split(p: &Prim) -> Category {
    Category::rdiv(prim(p), prim(p))
}

fn gadget(
    kind: GadgetKind,
    items: Vec<Category>,
    cats: Vec<Category>,
    fresh: Vec<Prim>,
) -> GadgetString {
    GadgetString {
        kind,
        items: CategoryString::new(items).expect("gadget templates are non-empty"),
        cats,
        fresh,
        layout: Vec::new(),
    }
}

/// The string `x_{A,t}`, reducible to `phi(A)` and to `t/t`. `A` must have
/// one of the three rule shapes and `t` must not occur in it.
pub fn build_x(a: &Category, t: &Prim) -> Result<GadgetString, EncodeError> {
    let shape = shape_of(a)?;
    ensure_fresh(&[t], &[a])?;
    let tt = split(t);
    let phi_a = a.phi();
    let head = Category::rdiv(phi_a, tt.clone());
    let mut items = vec![head, tt.clone(), prim(t)];
    match shape {
        Shape::Atom(p) => {
            items.push(Category::ldiv(prim(t), prim(p)));
            items.push(Category::ldiv(prim(p), tt));
        }
        Shape::Frac(p, q) => {
            items.push(Category::ldiv(prim(t), split(q)));
            items.push(prim(q));
            items.push(Category::ldiv(prim(q), prim(p)));
            items.push(Category::ldiv(prim(p), tt));
        }
        Shape::DoubleFrac(p, q, s) => {
            items.push(Category::ldiv(prim(t), split(s)));
            items.push(prim(s));
            items.push(Category::ldiv(prim(s), split(q)));
            items.push(prim(q));
            items.push(Category::ldiv(prim(q), prim(p)));
            items.push(Category::ldiv(prim(p), tt));
        }
    }
    Ok(gadget(GadgetKind::X, items, vec![a.clone()], vec![t.clone()]))
}

/// The string `y_{t,B}`, reducible to `t/t` and to `phi(B)`; the mirror
/// companion of [`build_x`], with its distinguished categories at the
/// opposite ends.
pub fn build_y(t: &Prim, b: &Category) -> Result<GadgetString, EncodeError> {
    let shape = shape_of(b)?;
    ensure_fresh(&[t], &[b])?;
    let tt = split(t);
    let phi_b = b.phi();
    let mut items = vec![Category::rdiv(tt, phi_b.clone()), phi_b.clone()];
    match shape {
        Shape::Atom(p) => {
            items.push(prim(p));
            items.push(Category::ldiv(prim(p), prim(t)));
        }
        Shape::Frac(p, q) => {
            items.push(split(q));
            items.push(prim(q));
            items.push(Category::ldiv(prim(q), prim(p)));
            items.push(Category::ldiv(prim(p), prim(t)));
        }
        Shape::DoubleFrac(p, q, s) => {
            items.push(split(s));
            items.push(prim(s));
            items.push(Category::ldiv(prim(s), split(q)));
            items.push(prim(q));
            items.push(Category::ldiv(prim(q), prim(p)));
            items.push(Category::ldiv(prim(p), prim(t)));
        }
    }
    items.push(Category::ldiv(prim(t), phi_b));
    Ok(gadget(GadgetKind::Y, items, vec![b.clone()], vec![t.clone()]))
}

/// The string `z_{A,B}`, reducible to `phi(A)` and to `phi(B)` (and also to
/// `t/t`, which downstream constructions never rely on). `A` and `B` must
/// be distinct shaped categories; `fresh` supplies `t` and `k1..k4`.
pub fn build_z(
    a: &Category,
    b: &Category,
    fresh: &GadgetFresh,
) -> Result<GadgetString, EncodeError> {
    shape_of(a)?;
    shape_of(b)?;
    if a == b {
        return Err(EncodeError::EqualCategories { cat: a.to_string() });
    }
    ensure_fresh(&fresh.z_prims(), &[a, b])?;
    let x = build_x(a, &fresh.t)?;
    let y = build_y(&fresh.t, b)?;
    let tt = split(&fresh.t);
    let [k1, k2, k3, k4] = &fresh.k;
    let phi_a = a.phi();
    let phi_b = b.phi();

    let mut items = vec![
        Category::rdiv(phi_a.clone(), prim(k1)),
        Category::rdiv(prim(k1), tt.clone()),
    ];
    items.extend(x.items.iter().cloned());
    items.push(Category::ldiv(phi_a, prim(k2)));
    items.push(Category::ldiv(prim(k2), Category::rdiv(tt.clone(), prim(k3))));
    items.push(Category::rdiv(prim(k3), phi_b.clone()));
    items.extend(y.items.iter().cloned());
    items.push(Category::ldiv(tt, prim(k4)));
    items.push(Category::ldiv(prim(k4), phi_b));

    let fresh_list = fresh.z_prims().into_iter().cloned().collect();
    Ok(gadget(
        GadgetKind::Z,
        items,
        vec![a.clone(), b.clone()],
        fresh_list,
    ))
}

/// The intermediate string `z'_{A,B}`: `z_{A,B}` with division by the
/// right sentinel applied, reducible to `phi(A)/_r` and `phi(B)/_r`.
/// Uses `o1`/`o2` from `fresh` on top of the `z` primitives.
pub fn build_z_prime(
    a: &Category,
    b: &Category,
    fresh: &GadgetFresh,
) -> Result<GadgetString, EncodeError> {
    let r = Prim::sentinel_right();
    ensure_fresh(&[&r], &[a, b])?;
    ensure_fresh(&fresh.z_prime_prims(), &[a, b])?;
    let z = build_z(a, b, fresh)?;
    let o1 = &fresh.o[0];
    let o2 = &fresh.o[1];
    let phi_a = a.phi();
    let phi_b = b.phi();
    let phi_a_r = Category::rdiv(phi_a.clone(), prim(&r));
    let phi_b_r = Category::rdiv(phi_b.clone(), prim(&r));

    let mut items = vec![
        Category::rdiv(phi_a_r, phi_b_r.clone()),
        Category::rdiv(phi_a.clone(), prim(o1)),
        Category::rdiv(prim(o1), phi_b.clone()),
    ];
    items.extend(z.items.iter().cloned());
    items.push(Category::ldiv(phi_a.clone(), prim(o2)));
    items.push(Category::ldiv(prim(o2), phi_b_r.clone()));
    items.push(prim(&r));
    items.push(Category::ldiv(phi_a, phi_b_r));

    let fresh_list = fresh.z_prime_prims().into_iter().cloned().collect();
    Ok(gadget(
        GadgetKind::ZPrime,
        items,
        vec![a.clone(), b.clone()],
        fresh_list,
    ))
}

/// The string `u_{A,B}`: `z'_{A,B}` with division by the left sentinel
/// applied, reducible to `psi(A)` and `psi(B)`; the building block for
/// multi-category simulation. Uses `o3`/`o4` on top of the `z'`
/// primitives.
pub fn build_u(
    a: &Category,
    b: &Category,
    fresh: &GadgetFresh,
) -> Result<GadgetString, EncodeError> {
    let l = Prim::sentinel_left();
    ensure_fresh(&[&l], &[a, b])?;
    ensure_fresh(&fresh.u_prims(), &[a, b])?;
    let zp = build_z_prime(a, b, fresh)?;
    let o3 = &fresh.o[2];
    let o4 = &fresh.o[3];
    let r = Prim::sentinel_right();
    let psi_a = a.psi();
    let psi_b = b.psi();
    let phi_a_r = Category::rdiv(a.phi(), prim(&r));
    let phi_b_r = Category::rdiv(b.phi(), prim(&r));

    let mut items = vec![
        Category::rdiv(psi_a.clone(), phi_b_r.clone()),
        prim(&l),
        Category::rdiv(psi_a.clone(), prim(o3)),
        Category::rdiv(prim(o3), phi_b_r.clone()),
    ];
    items.extend(zp.items.iter().cloned());
    items.push(Category::ldiv(phi_a_r, prim(o4)));
    items.push(Category::ldiv(prim(o4), phi_b_r));
    items.push(Category::ldiv(psi_a, psi_b));

    let fresh_list = fresh.u_prims().into_iter().cloned().collect();
    Ok(gadget(
        GadgetKind::U,
        items,
        vec![a.clone(), b.clone()],
        fresh_list,
    ))
}

/// The string `w_{A_1,...,A_n}`, reducible to `psi(A_i)` for every `i`.
/// For a single category this is just `psi(A_1)`; otherwise the `u` blocks
/// of adjacent pairs are chained with connector primitives `e_1..e_{2n-2}`
/// so that exactly one block survives to the end.
pub fn build_w(cats: &[Category], namer: &FreshNamer) -> Result<GadgetString, EncodeError> {
    if cats.is_empty() {
        return Err(EncodeError::Shape {
            cat: "(empty category list)".to_string(),
        });
    }
    for (i, c) in cats.iter().enumerate() {
        shape_of(c)?;
        if cats[..i].contains(c) {
            return Err(EncodeError::DuplicateCategory { cat: c.to_string() });
        }
    }
    let cat_refs: Vec<&Category> = cats.iter().collect();
    let n = cats.len();
    if n == 1 {
        let mut g = gadget(
            GadgetKind::W,
            vec![cats[0].psi()],
            cats.to_vec(),
            Vec::new(),
        );
        g.layout = vec![WSpan {
            segment: WSegment::Psi,
            start: 0,
            len: 1,
        }];
        return Ok(g);
    }

    let psi: Vec<Category> = cats.iter().map(Category::psi).collect();
    let e: Vec<Prim> = (1..=2 * (n - 1)).map(|i| namer.connector(i)).collect();
    ensure_fresh(&e.iter().collect::<Vec<_>>(), &cat_refs)?;

    let mut items: Vec<Category> = Vec::new();
    let mut layout: Vec<WSpan> = Vec::new();
    let mut fresh: Vec<Prim> = Vec::new();
    let push_segment = |items: &mut Vec<Category>,
                            layout: &mut Vec<WSpan>,
                            segment: WSegment,
                            block: Vec<Category>| {
        layout.push(WSpan {
            segment,
            start: items.len(),
            len: block.len(),
        });
        items.extend(block);
    };

    // Connector block i (1-based as in the construction): the first and
    // last are two items, inner ones three. e-index bookkeeping follows
    // e_{2i-2}, e_{2i-1} for block i.
    for i in 1..=n {
        let block = if i == 1 {
            vec![
                Category::rdiv(psi[0].clone(), prim(&e[0])),
                Category::rdiv(prim(&e[0]), psi[1].clone()),
            ]
        } else if i < n {
            let e_prev = &e[2 * i - 3]; // e_{2i-2}
            let e_next = &e[2 * i - 2]; // e_{2i-1}
            vec![
                Category::ldiv(psi[i - 2].clone(), prim(e_prev)),
                Category::rdiv(
                    Category::ldiv(prim(e_prev), psi[i - 1].clone()),
                    prim(e_next),
                ),
                Category::rdiv(prim(e_next), psi[i].clone()),
            ]
        } else {
            let e_last = &e[2 * (n - 1) - 1]; // e_{2(n-1)}
            vec![
                Category::ldiv(psi[n - 2].clone(), prim(e_last)),
                Category::ldiv(prim(e_last), psi[n - 1].clone()),
            ]
        };
        push_segment(&mut items, &mut layout, WSegment::Connector { index: i - 1 }, block);
        match i {
            1 => fresh.push(e[0].clone()),
            _ if i < n => {
                fresh.push(e[2 * i - 3].clone());
                fresh.push(e[2 * i - 2].clone());
            }
            _ => fresh.push(e[2 * (n - 1) - 1].clone()),
        }

        if i < n {
            let instance = i - 1;
            let gf = namer.gadget(instance);
            // Connector freshness vs. the u primitives is by naming
            // pattern; the u builder checks its own primitives against the
            // parameter categories.
            let u = build_u(&cats[instance], &cats[instance + 1], &gf)?;
            fresh.extend(u.fresh.iter().cloned());
            push_segment(
                &mut items,
                &mut layout,
                WSegment::U { instance },
                u.items.iter().cloned().collect(),
            );
        }
    }

    let mut g = gadget(GadgetKind::W, items, cats.to_vec(), fresh);
    g.layout = layout;
    Ok(g)
}

/// The category transcribing a 2-GNF rule: `X` for `X -> a`, `X/Y` for
/// `X -> a Y`, and `(X/Y)/Z` for `X -> a Z Y` — the first tail nonterminal
/// is consumed first, so it becomes the outer denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleCategory {
    pub category: Category,
    /// Index into the source grammar's rule list.
    pub source_rule: usize,
}

fn nt_prim(name: &str) -> Result<Prim, EncodeError> {
    Prim::new(name).map_err(|_| EncodeError::Bundle {
        msg: format!("nonterminal `{name}` is not a valid primitive name"),
    })
}

/// Rule categories of a grammar, grouped per terminal in grammar rule
/// order, de-duplicated preserving first occurrence.
pub fn rule_categories(g: &Cfg) -> Result<IndexMap<String, Vec<RuleCategory>>, EncodeError> {
    let rules = grammar::gnf2_rules(g).ok_or(EncodeError::NotGnf2)?;
    let mut per_letter: IndexMap<String, Vec<RuleCategory>> = IndexMap::new();
    for t in g.terminals() {
        per_letter.insert(t.clone(), Vec::new());
    }
    for (idx, r) in rules.iter().enumerate() {
        let lhs = Category::Prim(nt_prim(&r.lhs)?);
        let category = match r.tail.as_slice() {
            [] => lhs,
            [y] => Category::rdiv(lhs, Category::Prim(nt_prim(y)?)),
            [z, y] => Category::rdiv(
                Category::rdiv(lhs, Category::Prim(nt_prim(y)?)),
                Category::Prim(nt_prim(z)?),
            ),
            _ => unreachable!("gnf2 tails have at most two nonterminals"),
        };
        let cats = per_letter
            .get_mut(&r.terminal)
            .expect("rule terminals are in the alphabet");
        if !cats.iter().any(|rc| rc.category == category) {
            cats.push(RuleCategory {
                category,
                source_rule: idx,
            });
        }
    }
    Ok(per_letter)
}

/// A categorial grammar in which every alphabet symbol has exactly one
/// assigned category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UcaGrammar {
    assignment: IndexMap<String, Category>,
    target: Category,
}

impl UcaGrammar {
    /// Builds a grammar from symbol/category pairs; symbols must be
    /// distinct (that is the whole point).
    pub fn new(
        assignment: Vec<(String, Category)>,
        target: Category,
    ) -> Result<UcaGrammar, EncodeError> {
        let mut map = IndexMap::new();
        for (sym, cat) in assignment {
            if map.insert(sym.clone(), cat).is_some() {
                return Err(EncodeError::Bundle {
                    msg: format!("symbol `{sym}` is assigned twice"),
                });
            }
        }
        Ok(UcaGrammar {
            assignment: map,
            target,
        })
    }

    pub fn alphabet(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(String::as_str)
    }

    pub fn alphabet_len(&self) -> usize {
        self.assignment.len()
    }

    pub fn category_of(&self, symbol: &str) -> Option<&Category> {
        self.assignment.get(symbol)
    }

    pub fn target(&self) -> &Category {
        &self.target
    }

    /// The category string a word denotes; deterministic because the
    /// assignment is single-valued. Errors on symbols outside the
    /// alphabet; `None` for the empty word.
    pub fn word_categories<S: AsRef<str>>(
        &self,
        word: &[S],
    ) -> Result<Option<CategoryString>, EncodeError> {
        let mut items = Vec::with_capacity(word.len());
        for s in word {
            let cat =
                self.assignment
                    .get(s.as_ref())
                    .ok_or_else(|| EncodeError::UnknownSymbol {
                        name: s.as_ref().to_string(),
                    })?;
            items.push(cat.clone());
        }
        Ok(CategoryString::new(items).ok())
    }
}

/// True iff the word's assigned category string reduces to the grammar's
/// target category. The empty word is never in the language.
pub fn uca_member<S: AsRef<str>>(g: &UcaGrammar, word: &[S]) -> Result<bool, EncodeError> {
    match g.word_categories(word)? {
        Some(items) => Ok(reduce::reducible_to(&items, g.target())),
        None => Ok(false),
    }
}

/// A letter-to-symbol-sequence map `h`; images of words are concatenations
/// of letter images, so `h(uv) = h(u)h(v)` holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    map: IndexMap<String, Vec<String>>,
}

impl Homomorphism {
    pub fn letters(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    pub fn image_of_letter(&self, letter: &str) -> Option<&[String]> {
        self.map.get(letter).map(Vec::as_slice)
    }

    /// The image of a word, letterwise.
    pub fn image<S: AsRef<str>>(&self, word: &[S]) -> Result<Vec<String>, EncodeError> {
        let mut out = Vec::new();
        for a in word {
            let img = self
                .map
                .get(a.as_ref())
                .ok_or_else(|| EncodeError::UnknownSymbol {
                    name: a.as_ref().to_string(),
                })?;
            out.extend(img.iter().cloned());
        }
        Ok(out)
    }
}

/// Provenance of one encoded alphabet symbol: which letter block and
/// position it occupies and which gadget part produced its category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolProvenance {
    pub letter: String,
    pub position: usize,
    pub gadget: String,
    pub params: serde_json::Value,
}

/// The result of encoding a 2-GNF grammar: the unique-assignment grammar
/// over the fresh alphabet, the homomorphism, per-nonterminal targets for
/// testing, and per-symbol provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub uca: UcaGrammar,
    pub hom: Homomorphism,
    /// `phi(X)` per nonterminal; `phi(start)` is the grammar target.
    pub targets: IndexMap<String, Category>,
    pub primitives: Vec<Prim>,
    pub provenance: IndexMap<String, SymbolProvenance>,
}

impl Encoding {
    /// The assigned category string of a word's image; `None` for the
    /// empty word.
    pub fn image_categories<S: AsRef<str>>(
        &self,
        word: &[S],
    ) -> Result<Option<CategoryString>, EncodeError> {
        let img = self.hom.image(word)?;
        self.uca.word_categories(&img)
    }

    /// Whether the image of `word` is in the encoded language.
    pub fn member<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, EncodeError> {
        match self.image_categories(word)? {
            Some(items) => Ok(reduce::reducible_to(&items, self.uca.target())),
            None => Ok(false),
        }
    }
}

/// Encodes a 2-GNF grammar: for each terminal `a`, the categories of its
/// rules (in rule order) are chained into one `w` gadget, and
/// `h(a) = _l; w; _r`. Every position of every image gets a dedicated
/// alphabet symbol `<letter>.<position>` carrying exactly one category.
/// The target is `phi(S) = S/S`.
pub fn encode_grammar(g: &Cfg) -> Result<Encoding, EncodeError> {
    if !grammar::is_gnf2(g) {
        return Err(EncodeError::NotGnf2);
    }
    let per_letter = rule_categories(g)?;
    let ell = Prim::sentinel_left();
    let arr = Prim::sentinel_right();

    let mut assignment: Vec<(String, Category)> = Vec::new();
    let mut hom: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut provenance: IndexMap<String, SymbolProvenance> = IndexMap::new();
    let mut auxiliaries: Vec<Prim> = Vec::new();

    for (letter, rule_cats) in &per_letter {
        if rule_cats.is_empty() {
            return Err(EncodeError::UncoveredTerminal {
                name: letter.clone(),
            });
        }
        let cats: Vec<Category> = rule_cats.iter().map(|rc| rc.category.clone()).collect();
        let w = build_w(&cats, &FreshNamer::new(letter))?;
        auxiliaries.extend(w.fresh.iter().cloned());

        let mut items = vec![prim(&ell)];
        items.extend(w.items.iter().cloned());
        items.push(prim(&arr));

        let mut symbols = Vec::with_capacity(items.len());
        for (pos, cat) in items.into_iter().enumerate() {
            let symbol = format!("{letter}.{pos}");
            let (gadget_name, params) = describe_position(&w, pos, &cats);
            provenance.insert(
                symbol.clone(),
                SymbolProvenance {
                    letter: letter.clone(),
                    position: pos,
                    gadget: gadget_name,
                    params,
                },
            );
            assignment.push((symbol.clone(), cat));
            symbols.push(symbol);
        }
        hom.insert(letter.clone(), symbols);
    }

    let target = Category::Prim(nt_prim(g.start())?).phi();
    let mut targets = IndexMap::new();
    let mut primitives: Vec<Prim> = Vec::new();
    for nt in g.nonterminals() {
        let p = nt_prim(nt)?;
        targets.insert(nt.clone(), Category::Prim(p.clone()).phi());
        primitives.push(p);
    }
    primitives.push(ell);
    primitives.push(arr);
    let mut seen_aux = std::collections::HashSet::new();
    for p in auxiliaries {
        if seen_aux.insert(p.clone()) {
            primitives.push(p);
        }
    }

    Ok(Encoding {
        uca: UcaGrammar::new(assignment, target)?,
        hom: Homomorphism { map: hom },
        targets,
        primitives,
        provenance,
    })
}

/// Names the gadget part an image position belongs to, for provenance.
/// Position 0 is the left sentinel, the last position the right one, and
/// everything in between is located through the `w` layout.
fn describe_position(
    w: &GadgetString,
    pos: usize,
    cats: &[Category],
) -> (String, serde_json::Value) {
    use serde_json::json;
    if pos == 0 {
        return ("sentinel-l".to_string(), json!({}));
    }
    if pos == w.len() + 1 {
        return ("sentinel-r".to_string(), json!({}));
    }
    let inner = pos - 1;
    for span in w.layout() {
        if inner < span.start || inner >= span.start + span.len {
            continue;
        }
        return match &span.segment {
            WSegment::Psi => ("psi".to_string(), json!({ "cat": cats[0].to_string() })),
            WSegment::Connector { index } => {
                ("connector".to_string(), json!({ "index": index }))
            }
            WSegment::U { instance } => (
                "u".to_string(),
                json!({
                    "instance": instance,
                    "a": cats[*instance].to_string(),
                    "b": cats[*instance + 1].to_string(),
                }),
            ),
        };
    }
    ("w".to_string(), serde_json::json!({}))
}

/// Decides membership through the encoding: converts to 2-GNF when
/// needed, encodes, maps the word through `h`, and asks whether the image
/// reduces to the target. Agrees with CYK membership on the source
/// grammar.
pub fn member_via_encoding<S: AsRef<str>>(g: &Cfg, word: &[S]) -> Result<bool, EncodeError> {
    for s in word {
        if !g.is_terminal(s.as_ref()) {
            return Err(EncodeError::UnknownSymbol {
                name: s.as_ref().to_string(),
            });
        }
    }
    let gnf = grammar::to_gnf2(g)?;
    let enc = encode_grammar(&gnf)?;
    enc.member(word)
}

/// The machine-readable encode bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub alphabet: Vec<BundleSymbol>,
    pub target: String,
    pub homomorphism: IndexMap<String, Vec<String>>,
    pub primitives: Vec<BundlePrim>,
    pub provenance: IndexMap<String, SymbolProvenance>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSymbol {
    pub symbol: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundlePrim {
    pub name: String,
    pub origin: String,
}

impl Bundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Bundle, EncodeError> {
        serde_json::from_str(text).map_err(|e| EncodeError::Bundle { msg: e.to_string() })
    }

    /// Reconstructs the grammar and homomorphism carried by the bundle.
    pub fn to_grammar(&self) -> Result<(UcaGrammar, Homomorphism), EncodeError> {
        let parse = |text: &str| {
            Category::parse_machine(text).map_err(|e| EncodeError::Bundle {
                msg: format!("bad category `{text}`: {e}"),
            })
        };
        let mut assignment = Vec::new();
        for s in &self.alphabet {
            assignment.push((s.symbol.clone(), parse(&s.category)?));
        }
        let uca = UcaGrammar::new(assignment, parse(&self.target)?)?;
        Ok((
            uca,
            Homomorphism {
                map: self.homomorphism.clone(),
            },
        ))
    }
}

impl Encoding {
    pub fn bundle(&self) -> Bundle {
        let origin = |o: PrimOrigin| o.to_string();
        Bundle {
            alphabet: self
                .uca
                .assignment
                .iter()
                .map(|(sym, cat)| BundleSymbol {
                    symbol: sym.clone(),
                    category: cat.to_string(),
                })
                .collect(),
            target: self.uca.target.to_string(),
            homomorphism: self.hom.map.clone(),
            primitives: self
                .primitives
                .iter()
                .map(|p| BundlePrim {
                    name: p.name().to_string(),
                    origin: origin(p.origin()),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }
}
