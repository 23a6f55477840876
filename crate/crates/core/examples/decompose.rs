//! Inspect the sliver decomposition of a polynomial from the command line:
//!
//!   cargo run --release -p hsurf-core --example decompose -- "y^2 + x^4"

use hsurf_core::adapt;
use hsurf_core::classify;
use hsurf_core::parser::parse;
use hsurf_core::rat;
use hsurf_core::slivers::{decompose, SearchConfig};

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "y^2 + x^4".into());
    let p = parse(&src).expect("parse");
    let ar = match adapt::adapt(&p, 32) {
        Ok(ar) if ar.generic_adapted => ar,
        _ => adapt::generic_adapt(&p, classify::DEFAULT_TRIAL_BUDGET, 32).expect("adapt"),
    };
    println!("F   = {}", ar.f);
    println!(
        "psi = {}",
        ar.psi
            .shifts
            .iter()
            .map(|(c, m)| format!("{} x^{}", rat::rat_str(c), rat::rat_str(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    );
    match decompose(&ar, &rat::rat(1, 4), &SearchConfig::default()) {
        Ok(dec) => {
            println!(
                "N0 = {}, radius = {}, d = {}, d* = {}",
                rat::rat_str(&dec.n0),
                rat::rat_str(&dec.radius),
                rat::rat_str(&dec.d),
                rat::rat_str(&dec.d_star)
            );
            for (i, s) in dec.slivers.iter().enumerate() {
                println!(
                    "  [{i:>2}] {:?} {:?} band {} center {:?} width {:?} k {:?} ({} bounds)",
                    s.kind,
                    s.side,
                    s.index,
                    s.center.as_ref().map(rat::rat_str),
                    s.half_width.as_ref().map(rat::rat_str),
                    s.k,
                    s.bounds.len()
                );
            }
        }
        Err(e) => println!("decomposition unavailable: {e}"),
    }
}
