//! Unique category assignment does not make parsing unambiguous.
//!
//! The union language `a^i b^n c^n ∪ a^m b^m c^j` is inherently ambiguous;
//! `abc` lies in both branches, and the image of `abc` under the encoding
//! admits several distinct reduction trees to the target.
//!
//! ```bash
//! cargo run --example ambiguous_parse
//! ```

use catgram::encode::encode_grammar;
use catgram::grammar::{to_gnf2, Cfg};
use catgram::reduce::reduction_trees;

fn main() {
    let path = format!("{}/grammars/union.cfg", env!("CARGO_MANIFEST_DIR"));
    let g = Cfg::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    let enc = encode_grammar(&to_gnf2(&g).unwrap()).unwrap();

    let word = ["a", "b", "c"];
    let image = enc.image_categories(&word).unwrap().unwrap();
    println!("word: abc");
    println!("image: {} categories, target {}", image.len(), enc.uca.target());

    let trees = reduction_trees(&image, enc.uca.target(), 4);
    println!("distinct reduction trees found (asked for up to 4): {}", trees.len());
    assert!(trees.len() >= 2);

    for (i, tree) in trees.iter().take(2).enumerate() {
        assert!(tree.is_well_formed());
        println!(
            "tree {}: {} leaves, root {}",
            i + 1,
            tree.leaf_count(),
            tree.root()
        );
    }
    println!("\nevery tree replays the two reduction rules leaf to root.");
}
