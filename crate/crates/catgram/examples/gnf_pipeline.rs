//! Grammar normal forms: CFG -> CNF -> 2-GNF.
//!
//! The 2-GNF shape (every rule `X -> a`, `X -> a Y` or `X -> a Y Z`) is
//! what the encoder consumes: each rule then transcribes into a category
//! of shape `X`, `X/Y` or `(X/Y)/Z`.
//!
//! ```bash
//! cargo run --example gnf_pipeline
//! ```

use catgram::grammar::{is_gnf2, to_cnf, to_gnf2, Cfg, CykMatcher};

fn main() {
    let source = "\
start: S
S -> a S b | a b
";
    let g = Cfg::parse(source).unwrap();
    println!("input:\n{g}");

    let cnf = to_cnf(&g).unwrap();
    println!("Chomsky normal form:\n{cnf}");

    let gnf = to_gnf2(&g).unwrap();
    assert!(is_gnf2(&gnf));
    println!("2-GNF:\n{gnf}");

    // The three grammars decide the same words.
    let matchers = [
        CykMatcher::new(&g),
        CykMatcher::new(&cnf),
        CykMatcher::new(&gnf),
    ];
    println!("membership (input / CNF / 2-GNF):");
    for word in ["ab", "aabb", "aab", "ba", "aaabbb"] {
        let tokens: Vec<String> = word.chars().map(|c| c.to_string()).collect();
        let verdicts: Vec<bool> = matchers.iter().map(|m| m.member(&tokens).unwrap()).collect();
        assert!(verdicts.windows(2).all(|w| w[0] == w[1]));
        println!("  {word:>7}: {}", if verdicts[0] { "yes" } else { "no" });
    }
}
