//! The gadget ladder, bottom to top.
//!
//! Each level wraps the previous one and upgrades what the string can
//! reduce to:
//!
//! - `x_{A,t}`: `phi(A)` and `t/t`
//! - `y_{t,B}`: `t/t` and `phi(B)`
//! - `z_{A,B}`: `phi(A)` and `phi(B)`
//! - `z'_{A,B}`: `phi(A)/_r` and `phi(B)/_r`
//! - `u_{A,B}`: `psi(A)` and `psi(B)`
//! - `w_{A_1..A_n}`: every `psi(A_i)`
//!
//! ```bash
//! cargo run --example gadget_tour
//! ```

use catgram::encode::{build_u, build_w, build_x, build_y, build_z, build_z_prime, FreshNamer, GadgetFresh};
use catgram::reduce::reducible_to;
use catgram::Category;

fn main() {
    let cat = |s: &str| Category::parse(s).unwrap();
    let a = cat("p");
    let b = cat("q/s");
    let fresh = GadgetFresh::plain();

    let x = build_x(&a, &fresh.t).unwrap();
    report("x", &x.items.to_string(), &[a.phi(), cat("t/t")], &x.items);

    let y = build_y(&fresh.t, &b).unwrap();
    report("y", &y.items.to_string(), &[cat("t/t"), b.phi()], &y.items);

    let z = build_z(&a, &b, &fresh).unwrap();
    report("z", &format!("{} items", z.len()), &[a.phi(), b.phi()], &z.items);

    let zp = build_z_prime(&a, &b, &fresh).unwrap();
    let div_r = |c: &Category| {
        Category::rdiv(c.phi(), Category::Prim(catgram::Prim::sentinel_right()))
    };
    report("z'", &format!("{} items", zp.len()), &[div_r(&a), div_r(&b)], &zp.items);

    let u = build_u(&a, &b, &fresh).unwrap();
    report("u", &format!("{} items", u.len()), &[a.psi(), b.psi()], &u.items);

    let cats = vec![cat("p"), cat("q/s"), cat("(q/p)/s")];
    let w = build_w(&cats, &FreshNamer::new("demo")).unwrap();
    let targets: Vec<Category> = cats.iter().map(Category::psi).collect();
    report("w", &format!("{} items over 3 categories", w.len()), &targets, &w.items);
}

fn report(
    name: &str,
    shown: &str,
    targets: &[Category],
    items: &catgram::CategoryString,
) {
    println!("{name}: {shown}");
    for t in targets {
        let ok = reducible_to(items, t);
        println!("  -> {t}: {}", if ok { "yes" } else { "NO (bug!)" });
        assert!(ok);
    }
    println!();
}
