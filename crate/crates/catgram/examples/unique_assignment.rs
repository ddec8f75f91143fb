//! A categorial grammar with one category per symbol.
//!
//! With `c |> p`, `a |> q/p`, `b |> q\p` and target `p`, the accepted
//! language is exactly `a^n c b^n`. The flip side of unique assignment:
//! assigning `a |> S` makes `a` the only accepted word, because `S; S`
//! cannot reduce — so even the regular language `a+` is out of reach.
//!
//! ```bash
//! cargo run --example unique_assignment
//! ```

use catgram::encode::{uca_member, UcaGrammar};
use catgram::reduce::one_step;
use catgram::{Category, CategoryString};

fn main() {
    let cat = |s: &str| Category::parse(s).unwrap();
    let grammar = UcaGrammar::new(
        vec![
            ("a".to_string(), cat("q/p")),
            ("b".to_string(), cat(r"q\p")),
            ("c".to_string(), cat("p")),
        ],
        cat("p"),
    )
    .unwrap();

    println!("assignments: a |> q/p, b |> q\\p, c |> p; target p");
    for word in ["c", "acb", "aacbb", "ab", "cc", "acbb"] {
        let tokens: Vec<String> = word.chars().map(|ch| ch.to_string()).collect();
        let verdict = uca_member(&grammar, &tokens).unwrap();
        println!("  {word:>6}: {}", if verdict { "in the language" } else { "rejected" });
    }

    // a+ needs two roles for `a`, but `a |> S` admits only one.
    let singleton = UcaGrammar::new(vec![("a".to_string(), cat("S"))], cat("S")).unwrap();
    println!("\nassignments: a |> S; target S");
    for k in 1..=4 {
        let word = vec!["a".to_string(); k];
        let verdict = uca_member(&singleton, &word).unwrap();
        println!("  a^{k}: {}", if verdict { "in the language" } else { "rejected" });
    }
    let stuck = CategoryString::parse("S; S").unwrap();
    println!("\none-step successors of `S; S`: {:?}", one_step(&stuck));
}
