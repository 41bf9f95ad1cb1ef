use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde_json::{json, Value};

use cprime_core::attack::{run_attack, AttackConfig};
use cprime_core::bounds::{optimal_tau, region_csv, region_sweep, uniform_grid, BoundCurve};
use cprime_core::experiment::{run_cells, write_csv, CellConfig};
use cprime_core::keygen::{generate_instance, verify_instance, CommonPrimeInstance};
use cprime_core::lattice::{basis_from_text, basis_to_text, bit_size_bounds, t_from_tau, BoundSource};
use cprime_core::lll::{lll_reduce_with, verify_certificate, FloatKind, LllOptions, Method};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure that is not an attack outcome: bad input, infeasible parameters,
/// I/O. Usage errors are reported by clap with exit code 2.
const EXIT_ERROR: u8 = 1;

#[derive(Parser)]
#[command(name = "cprime", version, about = "Small private key lattice attack on common prime RSA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a common prime RSA instance with a small private exponent.
    Keygen(KeygenArgs),
    /// Re-check the structural invariants of an instance file.
    Verify {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run the lattice attack on an instance or a raw public key.
    Attack(AttackArgs),
    /// Export all attack bounds over a grid of gamma values as CSV.
    Region(RegionArgs),
    /// Print every bound at the given gamma values.
    Bounds {
        /// Decimal or fraction, e.g. 0.2 or 1/5. Repeatable.
        #[arg(long = "gamma", required = true, value_parser = parse_rational)]
        gammas: Vec<Rational>,
        #[arg(long)]
        json: bool,
    },
    /// Search the largest attackable delta per (bits, gamma) cell.
    Experiment(ExperimentArgs),
    /// LLL-reduce a basis given in the lattice text format.
    Reduce(ReduceArgs),
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long)]
    bits: u32,
    #[arg(long)]
    gamma_bits: u32,
    #[arg(long)]
    delta_bits: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the instance JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Float,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FloatArg {
    Mpfr,
    Dpe,
}

#[derive(Args, Clone)]
struct LllArgs {
    /// `float` skips the exact certifying pass and is not certified.
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "dpe")]
    float: FloatArg,
    /// MPFR mantissa bits (default: max(128, 2 omega + 64)).
    #[arg(long)]
    precision: Option<u32>,
}

impl LllArgs {
    fn options(&self) -> LllOptions {
        LllOptions {
            method: match self.method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Float => Method::Float,
                MethodArg::Auto => Method::Auto,
            },
            float: match self.float {
                FloatArg::Mpfr => FloatKind::Mpfr,
                FloatArg::Dpe => FloatKind::Dpe,
            },
            precision: self.precision,
            ..LllOptions::default()
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    /// Instance JSON from `keygen` (planted mode: bounds from the bit sizes,
    /// filtered polynomials audited against the planted root).
    #[arg(long, conflicts_with_all = ["n", "e"])]
    instance: Option<PathBuf>,
    #[arg(long, requires_all = ["e", "gamma", "delta"])]
    n: Option<String>,
    #[arg(long)]
    e: Option<String>,
    /// Size hint gamma for raw keys, g ~ N^gamma.
    #[arg(long, value_parser = parse_rational)]
    gamma: Option<Rational>,
    /// Size hint delta for raw keys, d <= N^delta.
    #[arg(long, value_parser = parse_rational)]
    delta: Option<Rational>,
    #[arg(long, default_value_t = 2)]
    s: u32,
    #[arg(long, default_value_t = 1, conflicts_with = "auto_tau")]
    t: u32,
    /// t = round(optimal_tau(gamma, delta) * s).
    #[arg(long)]
    auto_tau: bool,
    #[command(flatten)]
    lll: LllArgs,
    /// Skip the certificate and Lemma 1 checks of the reduced basis.
    #[arg(long)]
    no_verify: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, default_value_t = 500)]
    grid_points: usize,
    /// Explicit gamma values instead of the uniform grid. Repeatable.
    #[arg(long = "gamma", value_parser = parse_rational)]
    gammas: Vec<Rational>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    bits: Vec<u32>,
    /// gamma fractions; gamma_bits = round(gamma * bits).
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_rational)]
    gammas: Vec<Rational>,
    #[arg(long, default_value_t = 2)]
    s: u32,
    #[arg(long, default_value_t = 1)]
    t: u32,
    #[arg(long, default_value_t = 3)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Per-cell time limit in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// First delta_bits to probe.
    #[arg(long)]
    start_hint: Option<u32>,
    #[command(flatten)]
    lll: LllArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write full records, including every probe, as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    lll: LllArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Accepts `p/q`, integers and finite decimals, exactly.
fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("not a rational number: {s:?}");
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: Integer = digits.parse().map_err(|_| bad())?;
        let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let q = Rational::from((num, den));
        return Ok(if neg { -q } else { q });
    }
    s.parse::<Rational>().map_err(|_| bad())
}

fn parse_integer(s: &str) -> Result<Integer, String> {
    s.trim().parse::<Integer>().map_err(|_| format!("not a decimal integer: {s:?}"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_instance(path: &Path) -> Result<CommonPrimeInstance, String> {
    CommonPrimeInstance::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn rational_string(q: &Rational) -> String {
    q.to_string()
}

fn cmd_keygen(a: &KeygenArgs) -> Result<u8, String> {
    let inst = generate_instance(a.bits, a.gamma_bits, a.delta_bits, a.seed).map_err(|e| e.to_string())?;
    let check = verify_instance(&inst);
    if !check.all_passed() {
        return Err(format!("generated instance failed checks: {:?}", check.failures()));
    }
    let mut text = inst.to_json().map_err(|e| e.to_string())?;
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_verify(path: &Path) -> Result<u8, String> {
    let report = verify_instance(&load_instance(path)?);
    println!("{report}");
    Ok(if report.all_passed() { 0 } else { EXIT_ERROR })
}

fn cmd_attack(a: &AttackArgs) -> Result<u8, String> {
    let (n, e, bounds, planted, gamma, delta, seed, mode) = match (&a.instance, &a.n) {
        (Some(path), _) => {
            let inst = load_instance(path)?;
            let gamma = Rational::from((inst.gamma_bits, inst.bits));
            let delta = Rational::from((inst.delta_bits, inst.bits));
            let bounds = bit_size_bounds(inst.bits, inst.gamma_bits, inst.delta_bits);
            let root = inst.planted_root();
            (inst.n, inst.e, bounds, Some(root), gamma, delta, Some(inst.seed), "planted")
        }
        (None, Some(n)) => {
            let n = parse_integer(n)?;
            let e = parse_integer(a.e.as_deref().unwrap_or_default())?;
            let gamma = a.gamma.clone().ok_or("--gamma is required with --n")?;
            let delta = a.delta.clone().ok_or("--delta is required with --n")?;
            let bounds = BoundSource::Exponents { delta: delta.clone(), gamma: gamma.clone() };
            (n, e, bounds, None, gamma, delta, None, "raw")
        }
        (None, None) => return Err("either --instance or --n/--e/--gamma/--delta is required".into()),
    };
    let t = if a.auto_tau {
        let choice = optimal_tau(&gamma, &delta).map_err(|e| e.to_string())?;
        t_from_tau(&choice.tau, a.s)
    } else {
        a.t
    };
    let mut cfg = AttackConfig::new(a.s, t, bounds);
    cfg.lll = a.lll.options();
    cfg.planted = planted;
    cfg.verify_reduction = !a.no_verify;
    let report = run_attack(&n, &e, &cfg).map_err(|e| e.to_string())?;
    if !report.condition.holds() {
        eprintln!(
            "warning: lattice solving condition not satisfied (margin {:.1} bits); attempting anyway",
            report.condition.margin_bits()
        );
    }
    let doc = json!({
        "tool": "cprime",
        "version": VERSION,
        "command": "attack",
        "mode": mode,
        "seed": seed.map(|s| s.to_string()),
        "parameters": {
            "n": n.to_string(),
            "e": e.to_string(),
            "gamma": rational_string(&gamma),
            "delta": rational_string(&delta),
            "s": a.s,
            "t": t,
            "auto_tau": a.auto_tau,
            "lll": format!("{:?}", cfg.lll),
        },
        "condition_satisfied": report.condition.holds(),
        "report": report,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n";
    emit(a.out.as_deref(), &text)?;
    eprintln!(
        "{:?}: omega = {}, {} filtered, {} pair(s) tried, {:.2} s",
        report.outcome,
        report.plan.omega,
        report.filtered.len(),
        report.pairs_tried,
        report.timings.total
    );
    if let Some(f) = &report.factors {
        eprintln!("p = {}\nq = {}", f.p, f.q);
    }
    Ok(report.outcome.exit_code() as u8)
}

fn cmd_region(a: &RegionArgs) -> Result<u8, String> {
    let gammas = if a.gammas.is_empty() { uniform_grid(a.grid_points) } else { a.gammas.clone() };
    let curves = region_sweep(&gammas).map_err(|e| e.to_string())?;
    emit(a.out.as_deref(), &region_csv(&curves))?;
    Ok(0)
}

fn cmd_bounds(gammas: &[Rational], as_json: bool) -> Result<u8, String> {
    let curves: Vec<BoundCurve> = region_sweep(gammas).map_err(|e| e.to_string())?;
    if as_json {
        let doc = json!({ "tool": "cprime", "version": VERSION, "command": "bounds", "bounds": curves });
        println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?);
        return Ok(0);
    }
    for c in &curves {
        println!("gamma = {} ({:.6})", c.gamma, c.gamma.to_f64());
        for (name, v) in c.values() {
            match v {
                Some(v) => println!("  {name:<16} {v}"),
                None => println!("  {name:<16} (out of scope)"),
            }
        }
        println!("  {:<16} {:?}", "corrected branch", c.corrected_branch);
    }
    Ok(0)
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<u8, String> {
    let mut cells = Vec::new();
    for &bits in &a.bits {
        for gamma in &a.gammas {
            let gamma_bits = Rational::from(gamma * bits)
                .round()
                .numer()
                .to_u32()
                .ok_or_else(|| format!("gamma {gamma} out of range"))?;
            let mut cell = CellConfig::new(bits, gamma_bits, a.s, a.t);
            cell.trials = a.trials;
            cell.seed = a.seed;
            cell.lll = a.lll.options();
            cell.timeout = a.timeout.map(Duration::from_secs);
            cell.start_hint = a.start_hint;
            cells.push(cell);
        }
    }
    let results = run_cells(&cells, a.jobs).map_err(|e| e.to_string())?;
    let mut records = Vec::new();
    let mut failed = false;
    for (cell, r) in cells.iter().zip(results) {
        match r {
            Ok(rec) => {
                if rec.timed_out {
                    eprintln!("cell bits={} gamma_bits={} timed out", cell.bits, cell.gamma_bits);
                }
                records.push(rec);
            }
            Err(e) => {
                eprintln!("cell bits={} gamma_bits={}: {e}", cell.bits, cell.gamma_bits);
                failed = true;
            }
        }
    }
    let mut csv = Vec::new();
    write_csv(&mut csv, &records).map_err(|e| e.to_string())?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&csv))?;
    if let Some(path) = &a.json {
        let doc = json!({
            "tool": "cprime",
            "version": VERSION,
            "command": "experiment",
            "search": "majority-vote bracketing search over delta_bits (artifact's procedure)",
            "parameters": {
                "s": a.s, "t": a.t, "trials": a.trials, "seed": a.seed,
                "timeout": a.timeout, "start_hint": a.start_hint,
            },
            "records": records,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n";
        emit(Some(path), &text)?;
    }
    Ok(if failed { EXIT_ERROR } else { 0 })
}

fn cmd_reduce(a: &ReduceArgs) -> Result<u8, String> {
    let rows = basis_from_text(&read(&a.input)?).map_err(|e| e.to_string())?;
    let reduced = lll_reduce_with(&rows, &a.lll.options()).map_err(|e| e.to_string())?;
    let certified = verify_certificate(&rows, &reduced);
    emit(a.out.as_deref(), &basis_to_text(&reduced.vectors))?;
    let summary: Value = json!({ "certificate_ok": certified, "report": reduced.report });
    eprintln!("{summary}");
    Ok(if certified { 0 } else { EXIT_ERROR })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Keygen(a) => cmd_keygen(a),
        Command::Verify { instance } => cmd_verify(instance),
        Command::Attack(a) => cmd_attack(a),
        Command::Region(a) => cmd_region(a),
        Command::Bounds { gammas, json } => cmd_bounds(gammas, *json),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Reduce(a) => cmd_reduce(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
