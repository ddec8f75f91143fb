//! # catgram
//!
//! Basic (AB) categorial grammars with a focus on *unique category
//! assignment*: every alphabet symbol carries exactly one category, and all
//! remaining ambiguity lives in the order the two reduction rules
//! `A/B; B -> A` and `B; B\A -> A` are applied.
//!
//! The crate provides:
//!
//! - the category algebra ([`category`]): parsing/printing, numerator and
//!   denominator sets, primitive counts, and the splitting maps `phi`/`psi`;
//! - the reduction calculus ([`reduce`]): one-step reduction, an exact
//!   CYK-style decision procedure for reducibility, enumeration of reduction
//!   trees, and a brute-force oracle;
//! - context-free grammars ([`grammar`]): a small text format, CYK
//!   membership, and a normal-form pipeline ending in 2-GNF
//!   (rules `X -> a`, `X -> a Y`, `X -> a Y Z`);
//! - the encoder ([`encode`]): gadget strings that simulate the assignment
//!   of several categories to one symbol, and the homomorphic encoding of a
//!   2-GNF grammar into a categorial grammar with unique category
//!   assignment, such that `w` is in the source language iff `h(w)` is
//!   accepted by the encoded grammar;
//! - a command-line front end ([`cli`], binary `catgram`).
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example two_faced_string      # one string, two reductions
//! cargo run --example unique_assignment     # a^n c b^n with one category per symbol
//! cargo run --example gadget_tour           # the x/y/z/z'/u/w gadget ladder
//! cargo run --example gnf_pipeline          # CFG -> CNF -> 2-GNF
//! cargo run --example encode_grammar        # homomorphic encoding bundle
//! cargo run --example membership_equivalence # CYK vs. encoding, differentially
//! cargo run --example ambiguous_parse       # two reduction trees for one image
//! ```

pub mod category;
pub mod cli;
pub mod encode;
pub mod grammar;
pub mod reduce;

pub use category::{Category, CategoryError, CategoryString, CountVector, Prim, PrimOrigin};
pub use encode::{
    build_u, build_w, build_x, build_y, build_z, build_z_prime, encode_grammar,
    member_via_encoding, uca_member, EncodeError, Encoding, FreshNamer, GadgetFresh,
    GadgetString, Homomorphism, RuleCategory, UcaGrammar,
};
pub use grammar::{
    cyk_member, is_gnf2, member_of, to_cnf, to_gnf2, Cfg, CykMatcher, Gnf2Rule, GrammarError,
    Rule, Symbol,
};
pub use reduce::{
    brute_force_derivable, count_preserved_check, derivable_singletons, one_step,
    reducible_to, reduction_trees, ReduceError, ReductionTree, ReductionUniverse,
};

