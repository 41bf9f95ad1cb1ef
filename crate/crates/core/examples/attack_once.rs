//! Runs one planted attack and prints the report.
//!
//! `cargo run --release -p cprime-core --example attack_once -- 512 102 50 2 1 [seed]`

use cprime_core::attack::{run_attack, AttackConfig};
use cprime_core::keygen::generate_instance;
use cprime_core::lattice::bit_size_bounds;
use cprime_core::lll::FloatKind;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let num = |i: usize, d: u32| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (bits, gamma_bits, delta_bits, s, t) = (num(0, 512), num(1, 102), num(2, 50), num(3, 2), num(4, 1));
    let seed = num(5, 1) as u64;
    let inst = generate_instance(bits, gamma_bits, delta_bits, seed).expect("instance");
    let mut cfg = AttackConfig::new(s, t, bit_size_bounds(bits, gamma_bits, delta_bits));
    cfg.lll.float = FloatKind::Dpe;
    cfg.planted = Some(inst.planted_root());
    let report = run_attack(&inst.n, &inst.e, &cfg).expect("attack");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
