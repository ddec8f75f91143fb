//! Shared helpers for the integration suites. Each test target compiles
//! its own copy, so not every helper is used everywhere.
#![allow(dead_code)]

use std::path::PathBuf;

use catgram::{Category, CategoryString, Cfg, Prim};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn cat(text: &str) -> Category {
    Category::parse(text).unwrap()
}

pub fn cs(text: &str) -> CategoryString {
    CategoryString::parse(text).unwrap()
}

pub fn prim(name: &str) -> Prim {
    Prim::new(name).unwrap()
}

/// The six-category shape pool used by the gadget suites.
pub fn shape_pool() -> Vec<Category> {
    ["p", "p/q", "(p/q)/s", "q", "q/p", "(q/s)/p"]
        .into_iter()
        .map(cat)
        .collect()
}

pub fn grammar_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("grammars")
        .join(name)
}

pub fn load_grammar(name: &str) -> Cfg {
    let path = grammar_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    Cfg::parse(&text).unwrap_or_else(|e| panic!("cannot parse {}: {e}", path.display()))
}

/// All non-empty words over `alphabet` of length at most `max_len`.
pub fn all_words(alphabet: &[&str], max_len: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for w in &frontier {
            for a in alphabet {
                let mut w2 = w.clone();
                w2.push((*a).to_string());
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random category over `p`, `q`, `s` of depth at most `max_depth`.
pub fn random_category(rng: &mut ChaCha8Rng, max_depth: usize) -> Category {
    if max_depth == 0 || rng.gen_bool(0.4) {
        let name = ["p", "q", "s"][rng.gen_range(0..3)];
        Category::Prim(prim(name))
    } else {
        let left = random_category(rng, max_depth - 1);
        let right = random_category(rng, max_depth - 1);
        if rng.gen_bool(0.5) {
            Category::rdiv(left, right)
        } else {
            Category::ldiv(left, right)
        }
    }
}

/// A random category string of the given maximum length and depth.
pub fn random_string(rng: &mut ChaCha8Rng, max_len: usize, max_depth: usize) -> CategoryString {
    let len = rng.gen_range(1..=max_len);
    CategoryString::new((0..len).map(|_| random_category(rng, max_depth)).collect()).unwrap()
}

/// All categories over `p`, `q`, `s` of depth at most `max_depth`. The 885
/// categories of depth <= 2 pair up into the full depth <= 3 space (about
/// 1.57 million), which callers enumerate as pairs over this set instead
/// of materializing it.
pub fn cats_up_to_depth(max_depth: usize) -> Vec<Category> {
    let mut all: Vec<Category> = ["p", "q", "s"]
        .into_iter()
        .map(|n| Category::Prim(prim(n)))
        .collect();
    let mut seen: std::collections::HashSet<Category> = all.iter().cloned().collect();
    for _ in 0..max_depth {
        let prev = all.clone();
        for l in &prev {
            for r in &prev {
                for c in [
                    Category::rdiv(l.clone(), r.clone()),
                    Category::ldiv(l.clone(), r.clone()),
                ] {
                    if seen.insert(c.clone()) {
                        all.push(c);
                    }
                }
            }
        }
    }
    all
}
