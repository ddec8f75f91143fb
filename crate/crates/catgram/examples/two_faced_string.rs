//! One string of categories, two different reductions.
//!
//! `(p/p)/p; p; p; p\(p\p)` reduces to `p/p` or to `p\p` depending on the
//! order the two reduction rules are applied — even though every position
//! holds a fixed category.
//!
//! ```bash
//! cargo run --example two_faced_string
//! ```

use catgram::cli::render_tree_text;
use catgram::reduce::{derivable_singletons, reduction_trees};
use catgram::{Category, CategoryString};

fn main() {
    let s = CategoryString::parse(r"(p/p)/p; p; p; p\(p\p)").unwrap();
    println!("string: {s}\n");

    let all = derivable_singletons(&s);
    println!("reduces to exactly:");
    for c in &all {
        println!("  {c}");
    }

    for target in &all {
        let trees = reduction_trees(&s, target, 10);
        println!("\n{} tree(s) for {target}:", trees.len());
        for tree in &trees {
            print!("{}", render_tree_text(tree));
        }
    }

    // No single-category target other than those two works.
    let p = Category::parse("p").unwrap();
    assert!(!catgram::reducible_to(&s, &p));
    println!("\n(and it does not reduce to p)");
}
