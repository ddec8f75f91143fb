//! Cross-module properties of the encoder that go beyond single-gadget
//! unit tests: orderly reductions, freshness discipline, and the
//! homomorphism law on the wire format.

mod common;

use std::collections::BTreeSet;

use catgram::encode::{encode_grammar, rule_categories};
use catgram::grammar::CykMatcher;
use catgram::reduce::reducible_to;
use catgram::{Category, CategoryString, Prim, PrimOrigin};

use common::{all_words, load_grammar};

/// For every accepted word there is a choice of one rule category per
/// letter whose phi-images alone reduce to the per-nonterminal target;
/// the image reduction can always be carried out block by block.
#[test]
fn orderly_reduction_choices_exist_for_accepted_words() {
    for name in ["anbn_gnf.cfg", "ancbn_gnf.cfg"] {
        let g = load_grammar(name);
        let per_letter = rule_categories(&g).unwrap();
        let matcher = CykMatcher::new(&g);
        let alphabet: Vec<&str> = g.terminals().iter().map(String::as_str).collect();
        for word in all_words(&alphabet, 4) {
            for nt in g.nonterminals() {
                if !matcher.member_of(nt, &word).unwrap() {
                    continue;
                }
                let target = Category::Prim(Prim::new(nt).unwrap()).phi();
                let choices: Vec<Vec<Category>> = word
                    .iter()
                    .map(|a| {
                        per_letter[a.as_str()]
                            .iter()
                            .map(|rc| rc.category.phi())
                            .collect()
                    })
                    .collect();
                assert!(
                    some_choice_reduces(&choices, &target),
                    "{name}: no orderly reduction for {word:?} at {nt}"
                );
            }
        }
    }
}

fn some_choice_reduces(choices: &[Vec<Category>], target: &Category) -> bool {
    fn rec(
        choices: &[Vec<Category>],
        picked: &mut Vec<Category>,
        target: &Category,
    ) -> bool {
        let Some(options) = choices.get(picked.len()) else {
            let s = CategoryString::new(picked.clone()).unwrap();
            return reducible_to(&s, target);
        };
        for option in options {
            picked.push(option.clone());
            if rec(choices, picked, target) {
                return true;
            }
            picked.pop();
        }
        false
    }
    rec(choices, &mut Vec::new(), target)
}

/// Auxiliary primitives of different letters never overlap, and none of
/// them occurs in a user category.
#[test]
fn auxiliary_primitives_are_disjoint_across_letters() {
    let g = load_grammar("union.cfg");
    let gnf = catgram::to_gnf2(&g).unwrap();
    let enc = encode_grammar(&gnf).unwrap();

    let mut per_letter: Vec<(String, BTreeSet<String>)> = Vec::new();
    for letter in enc.hom.letters() {
        let mut aux = BTreeSet::new();
        for symbol in enc.hom.image_of_letter(letter).unwrap() {
            let cat = enc.uca.category_of(symbol).unwrap();
            for p in cat.prims() {
                if p.origin() == PrimOrigin::Auxiliary {
                    aux.insert(p.name().to_string());
                }
            }
        }
        per_letter.push((letter.to_string(), aux));
    }
    for (i, (la, a)) in per_letter.iter().enumerate() {
        for (lb, b) in &per_letter[..i] {
            assert!(
                a.is_disjoint(b),
                "letters {la} and {lb} share auxiliary primitives"
            );
        }
    }

    let user_prims: BTreeSet<String> = gnf
        .nonterminals()
        .iter()
        .map(|nt| nt.to_string())
        .collect();
    for (_, aux) in &per_letter {
        for name in aux {
            assert!(!user_prims.contains(name));
            assert!(name.starts_with('_'));
        }
    }
}

/// The image of a concatenation is the concatenation of images, as exact
/// symbol sequences.
#[test]
fn homomorphism_law_holds_on_symbol_sequences() {
    let g = load_grammar("ancbn_gnf.cfg");
    let enc = encode_grammar(&g).unwrap();
    let words = [vec!["a", "c", "b"], vec!["c"], vec!["a", "a"], vec!["b", "c", "a"]];
    for u in &words {
        for v in &words {
            let mut uv: Vec<&str> = u.clone();
            uv.extend(v);
            let left = enc.hom.image(&uv).unwrap();
            let mut right = enc.hom.image(u).unwrap();
            right.extend(enc.hom.image(v).unwrap());
            assert_eq!(left, right, "h({u:?} ++ {v:?})");
        }
    }
}

/// A bundle written to JSON and read back decides membership identically.
#[test]
fn bundle_reload_preserves_membership() {
    let g = load_grammar("anbn_gnf.cfg");
    let enc = encode_grammar(&g).unwrap();
    let bundle = catgram::encode::Bundle::from_json(&enc.bundle().to_json()).unwrap();
    let (uca, hom) = bundle.to_grammar().unwrap();
    let alphabet: Vec<&str> = g.terminals().iter().map(String::as_str).collect();
    for word in all_words(&alphabet, 4) {
        let image = hom.image(&word).unwrap();
        assert_eq!(
            catgram::uca_member(&uca, &image).unwrap(),
            enc.member(&word).unwrap(),
            "reloaded bundle differs on {word:?}"
        );
    }
}
