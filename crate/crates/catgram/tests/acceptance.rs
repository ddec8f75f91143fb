//! Acceptance suite: one test per criterion, each printing a pass line and
//! holding to its runtime budget. Run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the timing lines).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use catgram::encode::{build_u, build_w, build_x, build_z, encode_grammar, uca_member, FreshNamer, UcaGrammar};
use catgram::grammar::{is_gnf2, to_gnf2, CykMatcher};
use catgram::reduce::{
    brute_force_derivable, count_preserved_check, derivable_singletons, one_step,
    reducible_to, reduction_trees,
};
use catgram::{member_via_encoding, Category, CategoryString};

use common::{
    all_words, cat, cats_up_to_depth, cs, load_grammar, prim, random_string, seeded_rng,
    shape_pool,
};

fn finish(criterion: usize, label: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "criterion {criterion} overran its budget: {elapsed:?} >= {budget:?}"
    );
    println!("PASS criterion {criterion} ({label}) in {elapsed:.2?}");
}

/// Words a^n c b^n for n >= 0 are exactly the members of the example
/// grammar's language.
fn is_ancbn(word: &[String]) -> bool {
    let n = word.len();
    if n.is_multiple_of(2) {
        return false;
    }
    let mid = n / 2;
    word[..mid].iter().all(|s| s == "a")
        && word[mid] == "c"
        && word[mid + 1..].iter().all(|s| s == "b")
}

#[test]
fn criterion_1_paper_golden_reductions() {
    let started = Instant::now();

    let four = cs("(p/p)/p; p; p; p\\(p\\p)");
    let got = derivable_singletons(&four);
    assert_eq!(got, BTreeSet::from([cat("p/p"), cat("p\\p")]));

    let x = build_x(&cat("p"), &prim("t")).unwrap();
    assert!(reducible_to(&x.items, &cat("p/p")));
    assert!(reducible_to(&x.items, &cat("t/t")));

    // The unique-assignment grammar c |> p, a |> q/p, b |> q\p with target
    // p accepts exactly a^n c b^n among all words over {a, b, c}.
    let g = UcaGrammar::new(
        vec![
            ("a".to_string(), cat("q/p")),
            ("b".to_string(), cat("q\\p")),
            ("c".to_string(), cat("p")),
        ],
        cat("p"),
    )
    .unwrap();
    let alphabet = ["a", "b", "c"];
    for len in 1..=11usize {
        let total = 3usize.pow(len as u32);
        (0..total).into_par_iter().for_each(|mut idx| {
            let mut word = Vec::with_capacity(len);
            for _ in 0..len {
                word.push(alphabet[idx % 3].to_string());
                idx /= 3;
            }
            let expected = is_ancbn(&word);
            let got = uca_member(&g, &word).unwrap();
            assert_eq!(got, expected, "example grammar on {word:?}");
        });
    }

    // a |> S with target S accepts exactly the one-letter word.
    let g = UcaGrammar::new(vec![("a".to_string(), cat("S"))], cat("S")).unwrap();
    for k in 1..=6usize {
        let word = vec!["a".to_string(); k];
        assert_eq!(uca_member(&g, &word).unwrap(), k == 1, "a^{k}");
    }

    finish(1, "paper golden reductions", started, Duration::from_secs(10));
}

#[test]
fn criterion_2_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = seeded_rng(0xCA71);
    let strings: Vec<CategoryString> =
        (0..1000).map(|_| random_string(&mut rng, 6, 3)).collect();
    strings.par_iter().for_each(|s| {
        let fast = derivable_singletons(s);
        let slow = brute_force_derivable(s, 6).unwrap();
        assert_eq!(fast, slow, "oracle disagreement on {s}");
    });
    finish(2, "oracle equivalence, 1000 trials", started, Duration::from_secs(120));
}

#[test]
fn criterion_3_count_invariance_and_phi_zero_counts() {
    let started = Instant::now();

    let mut rng = seeded_rng(0xCA72);
    let strings: Vec<CategoryString> =
        (0..1000).map(|_| random_string(&mut rng, 6, 3)).collect();
    strings.par_iter().for_each(|s| {
        for next in one_step(s) {
            assert!(count_preserved_check(s, &next), "{s} -> {next}");
        }
    });

    // phi has zero count of every primitive, over the whole depth <= 3
    // space on three primitives: the 885 categories of depth <= 2 plus
    // every division of two of them.
    let prims = [prim("p"), prim("q"), prim("s")];
    let small = cats_up_to_depth(2);
    assert_eq!(small.len(), 885);
    let phi_small: Vec<Category> = small.iter().map(Category::phi).collect();
    for c in &phi_small {
        for p in &prims {
            assert_eq!(c.count(p), 0);
        }
    }
    phi_small.par_iter().for_each(|left| {
        for right in &phi_small {
            for image in [
                Category::rdiv(left.clone(), right.clone()),
                Category::ldiv(left.clone(), right.clone()),
            ] {
                for p in &prims {
                    assert_eq!(image.count(p), 0, "nonzero count in a phi image");
                }
            }
        }
    });

    finish(3, "count invariance + phi zero counts", started, Duration::from_secs(60));
}

#[test]
fn criterion_4_gadget_lemma_suite() {
    let started = Instant::now();
    let pool = shape_pool();
    let namer = FreshNamer::new("");
    let mut pairs = Vec::new();
    for a in &pool {
        for b in &pool {
            if a != b {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    assert_eq!(pairs.len(), 30);

    pairs.par_iter().enumerate().for_each(|(i, (a, b))| {
        let fresh = namer.gadget(i);
        let phi_a = a.phi();
        let phi_b = b.phi();
        let z = build_z(a, b, &fresh).unwrap();
        assert!(reducible_to(&z.items, &phi_a), "z({a},{b}) -> phi(A)");
        assert!(reducible_to(&z.items, &phi_b), "z({a},{b}) -> phi(B)");
        for end in 1..z.len() {
            let prefix = z.items.slice(0, end).unwrap();
            assert!(
                !reducible_to(&prefix, &phi_b),
                "proper prefix of z({a},{b}) reduces to phi(B)"
            );
        }
        for start in 1..z.len() {
            let suffix = z.items.slice(start, z.len()).unwrap();
            assert!(
                !reducible_to(&suffix, &phi_a),
                "proper suffix of z({a},{b}) reduces to phi(A)"
            );
        }

        let psi_a = a.psi();
        let psi_b = b.psi();
        let u = build_u(a, b, &fresh).unwrap();
        assert!(reducible_to(&u.items, &psi_a), "u({a},{b}) -> psi(A)");
        assert!(reducible_to(&u.items, &psi_b), "u({a},{b}) -> psi(B)");
        for end in 1..u.len() {
            let prefix = u.items.slice(0, end).unwrap();
            assert!(
                !reducible_to(&prefix, &psi_b),
                "proper prefix of u({a},{b}) reduces to psi(B)"
            );
        }
        for start in 1..u.len() {
            let suffix = u.items.slice(start, u.len()).unwrap();
            assert!(
                !reducible_to(&suffix, &psi_a),
                "proper suffix of u({a},{b}) reduces to psi(A)"
            );
        }
    });

    finish(4, "z and u lemma suite, 30 pairs", started, Duration::from_secs(300));
}

#[test]
fn criterion_5_w_coverage() {
    let started = Instant::now();
    let pool = shape_pool();
    let mut sequences: Vec<Vec<Category>> = Vec::new();
    for i in 0..pool.len() {
        for j in 0..pool.len() {
            if i == j {
                continue;
            }
            sequences.push(vec![pool[i].clone(), pool[j].clone()]);
            for k in 0..pool.len() {
                if k != i && k != j {
                    sequences.push(vec![pool[i].clone(), pool[j].clone(), pool[k].clone()]);
                }
            }
        }
    }
    assert_eq!(sequences.len(), 30 + 120);

    let namer = FreshNamer::new("");
    sequences.par_iter().for_each(|seq| {
        let w = build_w(seq, &namer).unwrap();
        for a in seq {
            assert!(
                reducible_to(&w.items, &a.psi()),
                "w over {seq:?} does not reduce to psi({a})"
            );
        }
    });

    finish(5, "w coverage, 150 sequences", started, Duration::from_secs(300));
}

const PIPELINE_GRAMMARS: [&str; 4] = ["anbn.cfg", "ancbn.cfg", "dyck.cfg", "union.cfg"];

#[test]
fn criterion_6_normal_form_differential() {
    let started = Instant::now();
    for name in PIPELINE_GRAMMARS {
        let g = load_grammar(name);
        let gnf = to_gnf2(&g).unwrap();
        assert!(is_gnf2(&gnf), "{name}: output not in 2-GNF");
        let alphabet: Vec<&str> = g.terminals().iter().map(String::as_str).collect();
        let mg = CykMatcher::new(&g);
        let mgnf = CykMatcher::new(&gnf);
        all_words(&alphabet, 8).par_iter().for_each(|w| {
            assert_eq!(
                mg.member(w).unwrap(),
                mgnf.member(w).unwrap(),
                "{name}: membership differs on {w:?}"
            );
        });
    }
    finish(6, "2-GNF differential, 4 grammars", started, Duration::from_secs(120));
}

#[test]
fn criterion_7_theorem_end_to_end() {
    let started = Instant::now();
    for name in PIPELINE_GRAMMARS {
        let g = load_grammar(name);
        let gnf = to_gnf2(&g).unwrap();
        let enc = encode_grammar(&gnf).unwrap();
        let matcher = CykMatcher::new(&g);
        let alphabet: Vec<&str> = g.terminals().iter().map(String::as_str).collect();
        let words = all_words(&alphabet, 6);
        words.par_iter().for_each(|w| {
            let by_cyk = matcher.member(w).unwrap();
            let by_encoding = enc.member(w).unwrap();
            assert_eq!(by_cyk, by_encoding, "{name}: deciders disagree on {w:?}");
        });
        // The one-shot operation (which re-runs the whole pipeline) agrees
        // with the reused encoding.
        for w in words.iter().take(3) {
            assert_eq!(
                member_via_encoding(&g, w).unwrap(),
                matcher.member(w).unwrap(),
                "{name}: one-shot pipeline disagrees on {w:?}"
            );
        }
    }
    finish(7, "membership equivalence, 4 grammars", started, Duration::from_secs(600));
}

#[test]
fn criterion_8_main_lemma_per_nonterminal() {
    let started = Instant::now();
    for name in ["anbn_gnf.cfg", "ancbn_gnf.cfg"] {
        let g = load_grammar(name);
        assert!(is_gnf2(&g));
        let enc = encode_grammar(&g).unwrap();
        let matcher = CykMatcher::new(&g);
        let alphabet: Vec<&str> = g.terminals().iter().map(String::as_str).collect();
        all_words(&alphabet, 5).par_iter().for_each(|w| {
            let image = enc
                .image_categories(w)
                .unwrap()
                .expect("words here are non-empty");
            let derivable = derivable_singletons(&image);
            for nt in g.nonterminals() {
                let in_language = matcher.member_of(nt, w).unwrap();
                let reduces = derivable.contains(&enc.targets[nt]);
                assert_eq!(
                    in_language, reduces,
                    "{name}: h({w:?}) vs phi({nt}) disagree with membership"
                );
            }
        });
    }
    finish(8, "per-nonterminal image equivalence", started, Duration::from_secs(300));
}

#[test]
fn criterion_9_ambiguity_demonstration() {
    let started = Instant::now();
    let g = load_grammar("union.cfg");
    let gnf = to_gnf2(&g).unwrap();
    let enc = encode_grammar(&gnf).unwrap();

    // `abc` is the shortest word lying in both branches of the union.
    let word = ["a", "b", "c"];
    let image = enc.image_categories(&word).unwrap().unwrap();
    let trees = reduction_trees(&image, enc.uca.target(), 10);
    assert!(
        trees.len() >= 2,
        "expected at least two reduction trees, got {}",
        trees.len()
    );
    for (i, t) in trees.iter().enumerate() {
        assert!(t.is_well_formed(), "tree {i} does not replay");
        assert_eq!(t.frontier(), image, "tree {i} frontier mismatch");
        for other in &trees[..i] {
            assert_ne!(t, other, "trees {i} duplicates an earlier one");
        }
    }

    finish(9, "two parses for one image", started, Duration::from_secs(120));
}
