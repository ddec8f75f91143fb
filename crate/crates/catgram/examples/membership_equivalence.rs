//! A word is in the grammar's language iff its image is in the encoded
//! language — checked here differentially, CYK against the encoding.
//!
//! ```bash
//! cargo run --example membership_equivalence
//! ```

use catgram::encode::encode_grammar;
use catgram::grammar::{to_gnf2, Cfg, CykMatcher};

fn main() {
    let path = format!("{}/grammars/union.cfg", env!("CARGO_MANIFEST_DIR"));
    let g = Cfg::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    println!("language: a^i b^n c^n  union  a^m b^m c^j\n");

    let matcher = CykMatcher::new(&g);
    let enc = encode_grammar(&to_gnf2(&g).unwrap()).unwrap();

    println!("{:>10}  {:>4}  {:>8}  image length", "word", "cyk", "encoding");
    for word in ["abc", "abbcc", "aabbc", "aabcc", "abbc", "cba", "aabbcc"] {
        let tokens: Vec<String> = word.chars().map(|c| c.to_string()).collect();
        let by_cyk = matcher.member(&tokens).unwrap();
        let by_encoding = enc.member(&tokens).unwrap();
        let image_len = enc.hom.image(&tokens).unwrap().len();
        assert_eq!(by_cyk, by_encoding, "deciders disagree on {word}");
        println!(
            "{word:>10}  {:>4}  {:>8}  {image_len}",
            if by_cyk { "yes" } else { "no" },
            if by_encoding { "yes" } else { "no" },
        );
    }
    println!("\nno disagreements.");
}
