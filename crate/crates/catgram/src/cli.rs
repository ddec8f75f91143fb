//! Command-line front end: reducibility queries, derivation rendering,
//! normal forms, encoding, and differential membership checking.
//!
//! Exit codes: `0` affirmative/success, `1` negative answer, `2` usage or
//! input error, `3` resource cap exceeded or decider mismatch.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::category::{Category, CategoryError, CategoryString};
use crate::encode::{self, EncodeError, FreshNamer, GadgetFresh, GadgetString};
use crate::grammar::{self, Cfg, CykMatcher, GrammarError};
use crate::reduce::{self, ReduceError, ReductionTree, ReductionUniverse};

/// Affirmative answer / success.
pub const EXIT_YES: i32 = 0;
/// Negative answer (not reducible, not a member).
pub const EXIT_NO: i32 = 1;
/// Usage or input error.
pub const EXIT_INPUT: i32 = 2;
/// Resource cap exceeded, or the two deciders of `member --via both`
/// disagree.
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Cap(_) => EXIT_CAP,
        }
    }
}

impl From<CategoryError> for CliError {
    fn from(e: CategoryError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<GrammarError> for CliError {
    fn from(e: GrammarError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<EncodeError> for CliError {
    fn from(e: EncodeError) -> CliError {
        CliError::Input(e.to_string())
    }
}

impl From<ReduceError> for CliError {
    fn from(e: ReduceError) -> CliError {
        match e {
            ReduceError::BudgetExceeded { .. } => CliError::Cap(e.to_string()),
            ReduceError::InputTooLong { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "catgram",
    version,
    about = "Basic categorial grammars: reduction queries, 2-GNF conversion, and homomorphic encodings with unique category assignment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a category string reduces to a target category.
    Reduce(ReduceArgs),
    /// Convert a grammar file to 2-GNF (rules X -> a, X -> a Y, X -> a Y Z).
    Gnf(GnfArgs),
    /// Encode a grammar as a categorial grammar with unique category
    /// assignment plus a homomorphism.
    Encode(EncodeArgs),
    /// Decide word membership, by CYK, by the encoding, or both.
    Member(MemberArgs),
    /// Print one of the gadget category strings.
    Gadget(GadgetArgs),
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum TreeFormat {
    Text,
    Latex,
}

#[derive(Args)]
struct ReduceArgs {
    /// Category string, e.g. "(p/p)/p; p; p; p\(p\p)".
    input: Option<String>,
    /// Read the category string from a file instead.
    #[arg(long, short = 'f', conflicts_with = "input")]
    file: Option<PathBuf>,
    /// Target category to decide reducibility against.
    #[arg(long, short = 't')]
    target: Option<String>,
    /// Print every category the string reduces to.
    #[arg(long)]
    all: bool,
    /// Render up to N reduction trees for the target.
    #[arg(long, value_name = "N")]
    trees: Option<usize>,
    /// Tree rendering format.
    #[arg(long, value_enum, default_value = "text")]
    format: TreeFormat,
    /// Abort (exit 3) when the reduction universe grows past N categories.
    #[arg(long, value_name = "N")]
    cap: Option<usize>,
}

#[derive(Args)]
struct GnfArgs {
    /// Grammar file.
    grammar: PathBuf,
    /// Output file; written in the grammar file format. Prints to stdout
    /// when omitted.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Grammar file.
    grammar: PathBuf,
    /// Bundle output path (JSON). Prints to stdout when omitted.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Require the input to already be in 2-GNF instead of converting.
    #[arg(long)]
    assume_gnf2: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Via {
    Cyk,
    Encoding,
    Both,
}

#[derive(Args)]
struct MemberArgs {
    /// Grammar file.
    #[arg(long, short = 'g')]
    grammar: PathBuf,
    /// Words to test; tokens are whitespace-separated within each word.
    #[arg(required = true)]
    words: Vec<String>,
    /// Treat each word as a sequence of single-character terminals.
    #[arg(long)]
    chars: bool,
    /// Which decider(s) to run.
    #[arg(long, value_enum, default_value = "both")]
    via: Via,
    /// Require the input to already be in 2-GNF instead of converting.
    #[arg(long)]
    assume_gnf2: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum GadgetKindArg {
    X,
    Y,
    Z,
    Zprime,
    U,
    W,
}

#[derive(Args)]
struct GadgetArgs {
    /// Which gadget to build.
    #[arg(value_enum)]
    kind: GadgetKindArg,
    /// First category parameter (x, z, zprime, u).
    #[arg(long)]
    a: Option<String>,
    /// Second category parameter (y, z, zprime, u).
    #[arg(long)]
    b: Option<String>,
    /// Comma-separated category list (w).
    #[arg(long)]
    cats: Option<String>,
    /// Name for the fresh primitive t of x and y (default `_t.0`).
    #[arg(long)]
    t: Option<String>,
    /// Use the short conventional fresh names t, k1..k4, o1..o4 instead of
    /// scoped `_`-names; fails if they occur in the parameters.
    #[arg(long)]
    plain_fresh: bool,
}

/// Parses arguments from the process environment, runs the command, and
/// returns the exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Reduce(args) => cmd_reduce(args),
        Command::Gnf(args) => cmd_gnf(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Member(args) => cmd_member(args),
        Command::Gadget(args) => cmd_gadget(args),
    }
}

fn cmd_reduce(args: ReduceArgs) -> Result<i32, CliError> {
    let text = match (&args.input, &args.file) {
        (Some(inline), None) => inline.clone(),
        (None, Some(path)) => fs::read_to_string(path)?,
        _ => {
            return Err(CliError::Input(
                "provide a category string inline or with --file".to_string(),
            ))
        }
    };
    let input = CategoryString::parse_machine(&text)?;
    if let Some(cap) = args.cap {
        let size = ReductionUniverse::build(&input).len();
        if size > cap {
            return Err(CliError::Cap(format!(
                "reduction universe has {size} categories, over the cap of {cap}"
            )));
        }
    }
    let target = match &args.target {
        Some(t) => Some(Category::parse_machine(t)?),
        None => None,
    };
    if target.is_none() && !args.all {
        return Err(CliError::Input(
            "provide --target and/or --all".to_string(),
        ));
    }

    let mut verdict = EXIT_YES;
    if let Some(target) = &target {
        let yes = reduce::reducible_to(&input, target);
        println!("{}", if yes { "yes" } else { "no" });
        verdict = if yes { EXIT_YES } else { EXIT_NO };
        if let Some(limit) = args.trees {
            let trees = reduce::reduction_trees(&input, target, limit.max(1));
            for (i, tree) in trees.iter().enumerate() {
                println!("tree {}:", i + 1);
                match args.format {
                    TreeFormat::Text => print!("{}", render_tree_text(tree)),
                    TreeFormat::Latex => print!("{}", render_tree_latex(tree)),
                }
            }
        }
    }
    if args.all {
        let all = reduce::derivable_singletons(&input);
        for c in &all {
            println!("{c}");
        }
        if target.is_none() {
            verdict = if all.is_empty() { EXIT_NO } else { EXIT_YES };
        }
    }
    Ok(verdict)
}

fn cmd_gnf(args: GnfArgs) -> Result<i32, CliError> {
    let g = Cfg::parse(&fs::read_to_string(&args.grammar)?)?;
    let gnf = grammar::to_gnf2(&g)?;
    let text = gnf.to_string();
    match &args.out {
        Some(path) => {
            fs::write(path, &text)?;
            println!("{} rules", gnf.rules().len());
        }
        None => {
            print!("{text}");
            eprintln!("{} rules", gnf.rules().len());
        }
    }
    Ok(EXIT_YES)
}

fn cmd_encode(args: EncodeArgs) -> Result<i32, CliError> {
    let g = Cfg::parse(&fs::read_to_string(&args.grammar)?)?;
    let gnf = if args.assume_gnf2 {
        if !grammar::is_gnf2(&g) {
            return Err(CliError::Input(
                "--assume-gnf2 given, but the grammar is not in 2-GNF".to_string(),
            ));
        }
        g
    } else {
        grammar::to_gnf2(&g)?
    };
    let enc = encode::encode_grammar(&gnf)?;
    let json = enc.bundle().to_json();

    let mut stats = format!("alphabet: {} symbols\n", enc.uca.alphabet_len());
    for letter in enc.hom.letters() {
        let len = enc.hom.image_of_letter(letter).map_or(0, <[String]>::len);
        stats.push_str(&format!("h({letter}): {len}\n"));
    }
    stats.push_str(&format!("primitives: {}\n", enc.primitives.len()));

    match &args.out {
        Some(path) => {
            fs::write(path, json)?;
            print!("{stats}");
        }
        None => {
            println!("{json}");
            eprint!("{stats}");
        }
    }
    Ok(EXIT_YES)
}

fn cmd_member(args: MemberArgs) -> Result<i32, CliError> {
    let g = Cfg::parse(&fs::read_to_string(&args.grammar)?)?;
    if args.assume_gnf2 && !grammar::is_gnf2(&g) {
        return Err(CliError::Input(
            "--assume-gnf2 given, but the grammar is not in 2-GNF".to_string(),
        ));
    }

    let words: Vec<Vec<String>> = args
        .words
        .iter()
        .map(|w| {
            if args.chars {
                w.chars().map(|c| c.to_string()).collect()
            } else {
                w.split_whitespace().map(str::to_string).collect()
            }
        })
        .collect();
    for (raw, word) in args.words.iter().zip(&words) {
        if word.is_empty() {
            return Err(CliError::Input(format!("word `{raw}` is empty")));
        }
    }

    let matcher = match args.via {
        Via::Encoding => None,
        _ => Some(CykMatcher::new(&g)),
    };
    let encoding = match args.via {
        Via::Cyk => None,
        _ => Some(encode::encode_grammar(&grammar::to_gnf2(&g)?)?),
    };

    let mut any_reject = false;
    let mut any_mismatch = false;
    for (raw, word) in args.words.iter().zip(&words) {
        let by_cyk = match &matcher {
            Some(m) => Some(m.member(word)?),
            None => None,
        };
        let by_encoding = match &encoding {
            Some(enc) => Some(enc.member(word)?),
            None => None,
        };
        match (by_cyk, by_encoding) {
            (Some(c), Some(e)) if c != e => {
                any_mismatch = true;
                println!("{raw}: MISMATCH (cyk: {c}, encoding: {e})");
            }
            (c, e) => {
                let yes = c.or(e).expect("at least one decider ran");
                if !yes {
                    any_reject = true;
                }
                println!("{raw}: {}", if yes { "yes" } else { "no" });
            }
        }
    }
    if any_mismatch {
        eprintln!("MISMATCH: the two deciders disagree; this is a bug, please report it");
        return Ok(EXIT_CAP);
    }
    Ok(if any_reject { EXIT_NO } else { EXIT_YES })
}

fn cmd_gadget(args: GadgetArgs) -> Result<i32, CliError> {
    let parse_cat = |text: &Option<String>, name: &str| -> Result<Category, CliError> {
        let Some(text) = text else {
            return Err(CliError::Input(format!(
                "this gadget needs --{name} <CATEGORY>"
            )));
        };
        Ok(Category::parse(text)?)
    };
    let namer = FreshNamer::new("");
    let fresh = if args.plain_fresh {
        GadgetFresh::plain()
    } else {
        namer.gadget(0)
    };
    let t = match &args.t {
        Some(name) => crate::category::Prim::new(name)
            .map_err(|e| CliError::Input(e.to_string()))?,
        None => fresh.t.clone(),
    };

    let g: GadgetString = match args.kind {
        GadgetKindArg::X => encode::build_x(&parse_cat(&args.a, "a")?, &t)?,
        GadgetKindArg::Y => encode::build_y(&t, &parse_cat(&args.b, "b")?)?,
        GadgetKindArg::Z => {
            encode::build_z(&parse_cat(&args.a, "a")?, &parse_cat(&args.b, "b")?, &fresh)?
        }
        GadgetKindArg::Zprime => {
            encode::build_z_prime(&parse_cat(&args.a, "a")?, &parse_cat(&args.b, "b")?, &fresh)?
        }
        GadgetKindArg::U => {
            encode::build_u(&parse_cat(&args.a, "a")?, &parse_cat(&args.b, "b")?, &fresh)?
        }
        GadgetKindArg::W => {
            let Some(list) = &args.cats else {
                return Err(CliError::Input(
                    "gadget w needs --cats <C1,C2,...>".to_string(),
                ));
            };
            let cats = list
                .split(',')
                .map(|part| Category::parse(part.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            encode::build_w(&cats, &namer)?
        }
    };

    let n = g.len();
    for (i, item) in g.items.iter().enumerate() {
        if i + 1 < n {
            println!("{item};");
        } else {
            println!("{item}");
        }
    }
    println!("# gadget: {} over {} item(s)", g.kind, n);
    if g.fresh.is_empty() {
        println!("# fresh primitives: none");
    } else {
        let names: Vec<&str> = g.fresh.iter().map(|p| p.name()).collect();
        println!("# fresh primitives: {}", names.join(", "));
    }
    Ok(EXIT_YES)
}

/// Indented text rendering: one node per line, children indented below,
/// internal nodes tagged with the rule that produced them (`/E` for
/// `A/B; B -> A`, `\E` for `B; B\A -> A`).
pub fn render_tree_text(tree: &ReductionTree) -> String {
    let mut out = String::new();
    render_text_into(tree, 0, &mut out);
    out
}

fn render_text_into(tree: &ReductionTree, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    match tree {
        ReductionTree::Leaf(c) => {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        ReductionTree::ApplyRight { root, left, right } => {
            out.push_str(&format!("/E {root}\n"));
            render_text_into(left, depth + 1, out);
            render_text_into(right, depth + 1, out);
        }
        ReductionTree::ApplyLeft { root, left, right } => {
            out.push_str(&format!("\\E {root}\n"));
            render_text_into(left, depth + 1, out);
            render_text_into(right, depth + 1, out);
        }
    }
}

/// Proof-tree macros in the style of inference figures: nested
/// `\infer{conclusion}{left & right}` with `\BS` for the left division.
pub fn render_tree_latex(tree: &ReductionTree) -> String {
    let mut out = String::new();
    render_latex_into(tree, 0, &mut out);
    out.push('\n');
    out
}

fn render_latex_into(tree: &ReductionTree, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match tree {
        ReductionTree::Leaf(c) => {
            out.push_str(&pad);
            out.push_str(&latex_category(c));
        }
        ReductionTree::ApplyRight { root, left, right }
        | ReductionTree::ApplyLeft { root, left, right } => {
            out.push_str(&format!("{pad}\\infer{{{}}}{{\n", latex_category(root)));
            render_latex_into(left, depth + 1, out);
            out.push('\n');
            out.push_str(&format!("{pad}  &\n"));
            render_latex_into(right, depth + 1, out);
            out.push('\n');
            out.push_str(&format!("{pad}}}"));
        }
    }
}

/// Math-mode category text: `\BS` for `\`, underscores escaped.
pub fn latex_category(c: &Category) -> String {
    fn atom(c: &Category, out: &mut String) {
        match c {
            Category::Prim(_) => full(c, out),
            _ => {
                out.push('(');
                full(c, out);
                out.push(')');
            }
        }
    }
    fn full(c: &Category, out: &mut String) {
        match c {
            Category::Prim(p) => out.push_str(&p.name().replace('_', "\\_")),
            Category::Right(num, den) => {
                atom(num, out);
                out.push_str(" / ");
                atom(den, out);
            }
            Category::Left(den, num) => {
                atom(den, out);
                out.push_str(" \\BS ");
                atom(num, out);
            }
        }
    }
    let mut out = String::new();
    full(c, &mut out);
    out
}
