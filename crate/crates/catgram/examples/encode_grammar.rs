//! Encoding a 2-GNF grammar into a unique-assignment categorial grammar.
//!
//! Every terminal `a` maps to a block `_l; w; _r` of fresh alphabet
//! symbols, where `w` is the gadget chain over the categories of the rules
//! that start with `a`. The block reduces to `phi(C)` for exactly the rule
//! categories `C` of that letter, so the images self-assemble into parses.
//!
//! ```bash
//! cargo run --example encode_grammar
//! ```

use catgram::encode::{encode_grammar, rule_categories};
use catgram::grammar::Cfg;

fn main() {
    let path = format!("{}/grammars/anbn_gnf.cfg", env!("CARGO_MANIFEST_DIR"));
    let g = Cfg::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    println!("grammar:\n{g}");

    println!("rule categories per letter:");
    for (letter, cats) in rule_categories(&g).unwrap() {
        let texts: Vec<String> = cats.iter().map(|rc| rc.category.to_string()).collect();
        println!("  {letter}: {}", texts.join(", "));
    }

    let enc = encode_grammar(&g).unwrap();
    println!("\ntarget category: {}", enc.uca.target());
    println!("alphabet size |Omega|: {}", enc.uca.alphabet_len());
    for letter in enc.hom.letters() {
        println!("|h({letter})|: {}", enc.hom.image_of_letter(letter).unwrap().len());
    }
    println!("primitives: {}", enc.primitives.len());

    // The b block is small enough to show whole.
    println!("\nh(b), symbol by symbol:");
    for symbol in enc.hom.image_of_letter("b").unwrap() {
        let category = enc.uca.category_of(symbol).unwrap();
        println!("  {symbol} |> {category}");
    }

    let bundle = enc.bundle();
    let json = bundle.to_json();
    println!("\nbundle: {} bytes of JSON; fields:", json.len());
    for line in json.lines().filter(|l| l.starts_with("  \"")) {
        println!("  {}", line.trim().trim_end_matches([':', '{', '[', ' ']));
    }
}
