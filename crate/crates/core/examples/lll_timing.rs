//! Times the reduction engines on one attack lattice.
//!
//! `cargo run --release -p cprime-core --example lll_timing -- 512 102 50 2 1 [exact]`

use std::time::Instant;

use cprime_core::keygen::generate_instance;
use cprime_core::lattice::{bit_size_bounds, build_attack_polynomial, build_basis, make_plan};
use cprime_core::lll::{lll_reduce_with, FloatKind, LllOptions, Method};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, d: u32| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (bits, gamma_bits, delta_bits, s, t) = (num(0, 512), num(1, 102), num(2, 50), num(3, 2), num(4, 1));
    let inst = generate_instance(bits, gamma_bits, delta_bits, 1).expect("instance");
    let plan = make_plan(&inst.n, &inst.e, s, t, &bit_size_bounds(bits, gamma_bits, delta_bits)).unwrap();
    let f = build_attack_polynomial(&inst.n, &inst.e);
    let mut lat = build_basis(&plan, &f).unwrap();
    if std::env::var("SORT").is_ok() {
        lat.rows.sort_by_key(|r| r.iter().map(|x| x.significant_bits()).max().unwrap());
    }
    println!("omega = {}, max entry bits = {}", lat.dim(),
        lat.rows.iter().flatten().map(|x| x.significant_bits()).max().unwrap());
    let mut methods = vec![(Method::Float, FloatKind::Dpe), (Method::Float, FloatKind::Mpfr), (Method::Auto, FloatKind::Dpe)];
    if args.get(5).map(String::as_str) == Some("exact") {
        methods.push((Method::Exact, FloatKind::Mpfr));
    }
    for (method, float) in methods {
        let t0 = Instant::now();
        let r = lll_reduce_with(&lat.rows, &LllOptions { method, float, ..Default::default() }).unwrap();
        println!("{method:?}/{float:?}: {:.2?} {:?}", t0.elapsed(), r.report);
    }
}
