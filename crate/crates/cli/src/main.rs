//! Command-line workbench for cellular integrals on the moduli spaces
//! M_{0,n}: enumeration and classification of convergent configurations,
//! exact integrands, Apery-type recurrences, high-precision evaluation and
//! integer-relation recovery.
//!
//! Exit codes: 0 success, 1 usage error, 2 precondition violation,
//! 3 refused fit (insufficient precision).

use clap::{Args, Parser, Subcommand};
use std::io::Read;
use std::process::ExitCode;

use cellint_core::dihedral::{
    canonical_config, convergence_witness, enumerate_convergent, is_convergent, product,
    DihedralPair, DihedralStructure, Perm,
};
use cellint_core::eval::{
    eval_basic, eval_general, eval_montecarlo_basic, eval_montecarlo_general, max_on_cell,
};
use cellint_core::forms::{
    basic_integrand_cubical, build_basic, build_general, general_integrand_cubical, in_region_c,
    is_convergent_params, pullback_check_basic, solve_homogeneity, to_cubical, to_cubical_form,
    ParamSet,
};
use cellint_core::num::{bits_for_digits, parse_decimal, to_decimal};
use cellint_core::recur::{
    apery_zeta2_forms, apery_zeta3_forms, diagnostics, discover, PolyRecurrence, QPoly,
    RationalSequence,
};
use cellint_core::relations::{fit_linear_form, ConstantBasis};

#[derive(Parser)]
#[command(name = "cellint", version, about = "cellular integrals workbench")]
struct Cli {
    /// Cap the worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all convergent configuration classes on n points.
    Enumerate { n: usize },
    /// Canonical class data for a permutation (rep, dual, self-duality).
    Classify { perm: String },
    /// Canonical representative of the dual class.
    Dual { perm: String },
    /// Convergence of the configuration (with a witness block on failure).
    Convergent { perm: String },
    /// Exact integrand of a configuration.
    Integrand(IntegrandArgs),
    /// Check a parameter point against the convergence region.
    RegionCheck(RegionArgs),
    /// Generate Apery-type sequences by recurrence.
    Recur(RecurArgs),
    /// Guess a recurrence from exact terms read on stdin.
    Discover(DiscoverArgs),
    /// Evaluate a cellular integral by tanh-sinh quadrature.
    Eval(EvalArgs),
    /// Evaluate by quasi-Monte Carlo.
    Mc(McArgs),
    /// Numeric maximum of |f| on the closed cell.
    MaxCell { perm: String },
    /// Fit a value over a basis of period constants.
    Fit(FitArgs),
    /// Reproduce the golden structure tables for n = 5..8.
    ReportAppendix2 { n: usize },
    /// Multiply two configurations along triples.
    Product(ProductArgs),
}

#[derive(Args)]
struct IntegrandArgs {
    /// Permutation word, comma separated.
    perm: String,
    #[arg(long, default_value = "simplicial")]
    frame: String,
    /// Power N of the basic integrand.
    #[arg(long, default_value_t = 1)]
    n_power: i64,
    /// Generalised parameters a_1,...,a_n (overrides --n-power).
    #[arg(long)]
    params: Option<String>,
    /// Designated b edge and value for even n: "i,j=v".
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct RegionArgs {
    /// Permutation word.
    #[arg(long)]
    sigma: String,
    /// Parameters a_1,...,a_n.
    #[arg(long)]
    a: String,
    /// Designated b edge and value for even n: "i,j=v".
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct RecurArgs {
    /// zeta2 | zeta3 | a path to a recurrence JSON file with init values.
    which: String,
    #[arg(long, default_value_t = 10)]
    terms: usize,
    #[arg(long)]
    diagnostics: bool,
    #[arg(long, default_value_t = 60)]
    digits: usize,
}

#[derive(Args)]
struct DiscoverArgs {
    #[arg(long)]
    order: usize,
    #[arg(long)]
    degree: usize,
    /// First index of the supplied terms.
    #[arg(long, default_value_t = 0)]
    n0: i64,
}

#[derive(Args)]
struct EvalArgs {
    /// Permutation word of the configuration.
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 0)]
    n_power: i64,
    #[arg(long)]
    digits: Option<usize>,
    /// Generalised parameters a_1,...,a_n (overrides --n-power).
    #[arg(long)]
    params: Option<String>,
    /// Designated b edge and value for even n: "i,j=v".
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 0)]
    n_power: i64,
    #[arg(long, default_value_t = 1 << 22)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    /// Decimal value; "-" reads one from stdin.
    #[arg(long)]
    value: String,
    /// Comma-separated constant names, e.g. 1,zeta2,zeta3.
    #[arg(long)]
    basis: String,
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args)]
struct ProductArgs {
    /// First pair as "cycle;cycle", e.g. "1,2,3,4,5;2,4,1,3,5".
    #[arg(long)]
    pair1: String,
    /// Second pair as "cycle;cycle".
    #[arg(long)]
    pair2: String,
    /// Triple in the first factor, e.g. "3,4,5".
    #[arg(long)]
    t1: String,
    /// Triple in the second factor.
    #[arg(long)]
    t2: String,
    /// Also verify the pullback identity for all parameters equal to N.
    #[arg(long)]
    check_pullback: Option<i64>,
}

const USAGE: u8 = 1;
const PRECONDITION: u8 = 2;
const REFUSED: u8 = 3;

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn default_digits() -> usize {
    std::env::var("CELLINT_DIGITS").ok().and_then(|v| v.parse().ok()).unwrap_or(30)
}

fn parse_perm(s: &str) -> Result<Perm, String> {
    Perm::parse(s).map_err(|e| e.to_string())
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|e| e.to_string())).collect()
}

/// "i,j=v" for the designated b edge of even-n parameter sets.
fn parse_b(s: &str) -> Result<((u8, u8), i64), String> {
    let (edge, val) = s.split_once('=').ok_or("expected i,j=v")?;
    let idx: Vec<u8> = edge
        .split(',')
        .map(|t| t.trim().parse::<u8>().map_err(|e| e.to_string()))
        .collect::<Result<_, String>>()?;
    if idx.len() != 2 {
        return Err("edge needs two labels".into());
    }
    let v: i64 = val.trim().parse().map_err(|_| "bad b value")?;
    Ok(((idx[0], idx[1]), v))
}

fn parse_params(sigma: &Perm, a: &str, b: Option<&str>) -> Result<ParamSet, String> {
    let a = parse_i64_list(a)?;
    let b = match b {
        Some(s) => Some(parse_b(s)?),
        None => None,
    };
    solve_homogeneity(sigma, &a, b).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if benign { ExitCode::SUCCESS } else { ExitCode::from(USAGE) };
        }
    };
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err((code, msg)) => fail(code, &msg),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, (u8, String)> {
    let json = cli.json;
    match &cli.command {
        Command::Enumerate { n } => {
            let classes = enumerate_convergent(*n).map_err(|e| (PRECONDITION, e.to_string()))?;
            for c in &classes {
                if json {
                    let dual = c.dual();
                    println!(
                        "{}",
                        serde_json::json!({
                            "n": n,
                            "rep": c.rep().to_string(),
                            "dual_rep": dual.rep().to_string(),
                            "self_dual": *c == dual,
                        })
                    );
                } else {
                    println!("{};{}", n, c.rep());
                }
            }
            eprintln!("{} convergent classes", classes.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { perm } => {
            let p = parse_perm(perm).map_err(|e| (USAGE, e))?;
            let c = canonical_config(&p).map_err(|e| (PRECONDITION, e.to_string()))?;
            let dual = c.dual();
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "n": c.n(),
                        "rep": c.rep().to_string(),
                        "dual_rep": dual.rep().to_string(),
                        "self_dual": c == dual,
                        "convergent": c.is_convergent(),
                    })
                );
            } else {
                println!("class   {}", c.rep());
                println!("dual    {}", dual.rep());
                println!("self-dual: {}; convergent: {}", c == dual, c.is_convergent());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dual { perm } => {
            let p = parse_perm(perm).map_err(|e| (USAGE, e))?;
            let c = canonical_config(&p).map_err(|e| (PRECONDITION, e.to_string()))?;
            println!("{}", c.dual().rep());
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergent { perm } => {
            let p = parse_perm(perm).map_err(|e| (USAGE, e))?;
            if p.n() < 4 {
                return Err((PRECONDITION, "need n >= 4".into()));
            }
            if is_convergent(&p) {
                println!("true");
            } else {
                let witness = convergence_witness(&p).unwrap();
                let labels: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
                println!("false (witness block {{{}}})", labels.join(","));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Integrand(args) => cmd_integrand(args, json),
        Command::RegionCheck(args) => cmd_region(args, json),
        Command::Recur(args) => cmd_recur(args, json),
        Command::Discover(args) => cmd_discover(args, json),
        Command::Eval(args) => cmd_eval(args, json),
        Command::Mc(args) => cmd_mc(args, json),
        Command::MaxCell { perm } => {
            let p = parse_perm(perm).map_err(|e| (USAGE, e))?;
            let c = canonical_config(&p).map_err(|e| (PRECONDITION, e.to_string()))?;
            if !c.is_convergent() {
                return Err((PRECONDITION, "configuration is not convergent".into()));
            }
            let (m, at) = max_on_cell(&c);
            let pass = m.to_f64() < 1.0 - 1e-6;
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "max": m.to_f64(), "at": at, "below_one": pass })
                );
            } else {
                println!("max |f| = {} at {:?}; below 1: {}", m.to_f64(), at, pass);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit(args) => cmd_fit(args, json),
        Command::ReportAppendix2 { n } => cmd_report(*n, json),
        Command::Product(args) => cmd_product(args, json),
    }
}

fn cmd_integrand(args: &IntegrandArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let sigma = parse_perm(&args.perm).map_err(|e| (USAGE, e))?;
    let ell = sigma.ell();
    let (f, w, integrand) = match &args.params {
        Some(a) => {
            let params =
                parse_params(&sigma, a, args.b.as_deref()).map_err(|e| (PRECONDITION, e))?;
            let (f, w) = build_general(&params);
            let g = general_integrand_cubical(&params);
            (f, w, g)
        }
        None => {
            let (f, w) = build_basic(&sigma);
            let g = basic_integrand_cubical(&sigma, args.n_power);
            (f, w, g)
        }
    };
    let (f_out, w_out) = match args.frame.as_str() {
        "simplicial" => (f.clone(), w.coeff.clone()),
        "cubical" => (to_cubical(&f, ell), to_cubical_form(&w).coeff),
        other => return Err((USAGE, format!("unknown frame {other}"))),
    };
    if json {
        println!(
            "{}",
            serde_json::json!({
                "f": f_out.to_json(),
                "omega": w_out.to_json(),
                "integrand_cubical": integrand.to_json(),
            })
        );
    } else {
        println!("f        = {f_out}");
        println!("omega    = {w_out}  (coefficient of the measure)");
        println!("integrand (cubical, with Jacobian) = {integrand}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_region(args: &RegionArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let sigma = parse_perm(&args.sigma).map_err(|e| (USAGE, e))?;
    let a = parse_i64_list(&args.a).map_err(|e| (USAGE, e))?;
    let params =
        parse_params(&sigma, &args.a, args.b.as_deref()).map_err(|e| (PRECONDITION, e))?;
    let mut point = a.clone();
    if sigma.n() % 2 == 0 {
        if let Some(b) = &args.b {
            let (_, v) = parse_b(b).map_err(|e| (USAGE, e))?;
            point.push(v);
        }
    }
    let in_c = in_region_c(&point);
    let convergent = is_convergent_params(&params);
    if json {
        println!(
            "{}",
            serde_json::json!({
                "in_region_c": in_c,
                "convergent": convergent.is_ok(),
                "witness": convergent.as_ref().err().map(|d| d.to_string()),
            })
        );
    } else {
        println!("in C^n: {in_c}");
        match convergent {
            Ok(()) => println!("convergent: true"),
            Err(d) => println!("convergent: false (witness {d})"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_recur(args: &RecurArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let digits = args.digits;
    let (rec, spec, powers) = match args.which.as_str() {
        "zeta2" => (
            PolyRecurrence::apery_zeta2(),
            apery_zeta2_forms(args.terms, digits),
            vec![0u32, 2],
        ),
        "zeta3" => (
            PolyRecurrence::apery_zeta3(),
            apery_zeta3_forms(args.terms, digits),
            vec![0u32, 3],
        ),
        path => {
            let raw = std::fs::read_to_string(path)
                .map_err(|e| (USAGE, format!("cannot read {path}: {e}")))?;
            let (rec, init) = recurrence_from_json(&raw).map_err(|e| (USAGE, e))?;
            let seq =
                rec.extend(&init, args.terms).map_err(|e| (PRECONDITION, e.to_string()))?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({ "recurrence": rec.to_json(), "terms": seq.to_json() })
                );
            } else {
                for n in seq.n0()..seq.n0() + seq.len() as i64 {
                    println!("u_{n} = {}", seq.at(n));
                }
            }
            return Ok(ExitCode::SUCCESS);
        }
    };
    let a = &spec.coeffs[0];
    let b = &spec.coeffs[1];
    if json {
        println!(
            "{}",
            serde_json::json!({
                "recurrence": rec.to_json(),
                "a": a.to_json(),
                "b": b.to_json(),
            })
        );
    } else {
        for n in 0..=(args.terms as i64) {
            println!("N = {n}: a = {}, b = {}", a.at(n), b.at(n));
        }
    }
    if args.diagnostics {
        let report = diagnostics(&spec, &powers, digits);
        let eps = to_decimal(&report.epsilon, 12);
        let e3 = to_decimal(&report.e3_epsilon, 12);
        let dn = to_decimal(&report.dn_root, 12);
        if json {
            let rows: Vec<serde_json::Value> = report
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "n": r.n,
                        "integral": r.integral,
                        "abs_I": to_decimal(&r.abs_i, 15),
                        "ratio": r.ratio.as_ref().map(|x| to_decimal(x, 12)),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::json!({
                    "rows": rows, "d_N_root": dn, "epsilon": eps,
                    "e3_epsilon": e3, "e3_epsilon_below_one": report.e3_epsilon_below_one,
                })
            );
        } else {
            for r in &report.rows {
                println!(
                    "N = {:3}  integral: {:?}  |I_N| = {}  ratio = {}",
                    r.n,
                    r.integral,
                    to_decimal(&r.abs_i, 12),
                    r.ratio.as_ref().map(|x| to_decimal(x, 8)).unwrap_or_default(),
                );
            }
            println!("d_N^(1/N) = {dn}");
            println!("epsilon = (sqrt2 - 1)^4 = {eps}");
            println!("e^3 epsilon = {e3} (< 1: {})", report.e3_epsilon_below_one);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn recurrence_from_json(
    raw: &str,
) -> Result<(PolyRecurrence, Vec<num_rational::BigRational>), String> {
    let v: serde_json::Value = serde_json::from_str(raw).map_err(|e| e.to_string())?;
    let n0 = v["n0"].as_i64().unwrap_or(0);
    let coeffs = v["coeffs"]
        .as_array()
        .ok_or("coeffs must be an array of arrays")?
        .iter()
        .map(|poly| {
            poly.as_array()
                .ok_or("polynomial must be an array".to_string())
                .and_then(|cs| {
                    cs.iter()
                        .map(|c| {
                            c.as_str()
                                .ok_or("coefficient must be a 'p/q' string".to_string())
                                .and_then(|s| {
                                    s.parse().map_err(|_| format!("bad rational {s}"))
                                })
                        })
                        .collect::<Result<Vec<num_rational::BigRational>, String>>()
                })
                .map(QPoly::new)
        })
        .collect::<Result<Vec<QPoly>, String>>()?;
    let init = v["init"]
        .as_array()
        .ok_or("init values required")?
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or("init must be 'p/q' strings".to_string())
                .and_then(|s| s.parse().map_err(|_| format!("bad rational {s}")))
        })
        .collect::<Result<Vec<num_rational::BigRational>, String>>()?;
    Ok((PolyRecurrence::new(coeffs, n0), init))
}

fn cmd_discover(args: &DiscoverArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let mut input = String::new();
    std::io::stdin().read_to_string(&mut input).map_err(|e| (USAGE, e.to_string()))?;
    let values: Vec<num_rational::BigRational> = input
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| (USAGE, format!("bad rational {t}"))))
        .collect::<Result<_, _>>()?;
    let seq = RationalSequence::new(args.n0, values);
    match discover(&seq, args.order, args.degree) {
        Some(rec) => {
            if json {
                println!("{}", rec.to_json());
            } else {
                for (i, p) in rec.coeffs().iter().enumerate() {
                    println!("p_{i}(n) = {p}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        None => Err((PRECONDITION, "no recurrence within the given order/degree".into())),
    }
}

fn cmd_eval(args: &EvalArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let digits = args.digits.unwrap_or_else(default_digits);
    let sigma = parse_perm(&args.config).map_err(|e| (USAGE, e))?;
    let result = match &args.params {
        Some(a) => {
            let params =
                parse_params(&sigma, a, args.b.as_deref()).map_err(|e| (PRECONDITION, e))?;
            eval_general(&params, digits)
        }
        None => {
            let c = canonical_config(&sigma).map_err(|e| (PRECONDITION, e.to_string()))?;
            eval_basic(&c, args.n_power, digits)
        }
    }
    .map_err(|e| (PRECONDITION, e.to_string()))?;
    if json {
        println!("{}", result.to_json(&args.config, &format!("N={}", args.n_power)));
    } else {
        println!(
            "{}  (err < {}, {:?})",
            to_decimal(&result.value, digits),
            to_decimal(&result.error_estimate, 3),
            result.method
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_mc(args: &McArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let sigma = parse_perm(&args.config).map_err(|e| (USAGE, e))?;
    let result = match &args.params {
        Some(a) => {
            let params =
                parse_params(&sigma, a, args.b.as_deref()).map_err(|e| (PRECONDITION, e))?;
            eval_montecarlo_general(&params, args.samples, args.seed)
        }
        None => {
            let c = canonical_config(&sigma).map_err(|e| (PRECONDITION, e.to_string()))?;
            eval_montecarlo_basic(&c, args.n_power, args.samples, args.seed)
        }
    }
    .map_err(|e| (PRECONDITION, e.to_string()))?;
    if json {
        println!("{}", result.to_json(&args.config, &format!("N={}", args.n_power)));
    } else {
        println!(
            "{} +- {}  ({:?})",
            to_decimal(&result.value, 8),
            to_decimal(&result.error_estimate, 3),
            result.method
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(args: &FitArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let digits = args.digits.unwrap_or_else(default_digits);
    let prec = bits_for_digits(digits + 10);
    let raw = if args.value == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| (USAGE, e.to_string()))?;
        s.trim().to_string()
    } else {
        args.value.clone()
    };
    let value = parse_decimal(&raw, prec).ok_or((USAGE, format!("cannot parse value '{raw}'")))?;
    let names: Vec<&str> = args.basis.split(',').map(|s| s.trim()).collect();
    let basis = ConstantBasis::from_names(&names, prec)
        .ok_or((USAGE, "unknown constant in basis".to_string()))?;
    match fit_linear_form(&value, &basis, digits) {
        Ok((coeffs, rel)) => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "basis": names,
                        "coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "residual": to_decimal(&rel.residual, 3),
                        "accepted": true,
                    })
                );
            } else {
                for (n, c) in names.iter().zip(&coeffs) {
                    println!("{n}: {c}");
                }
                println!("residual {}", to_decimal(&rel.residual, 3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => Err((REFUSED, e.to_string())),
    }
}

fn cmd_report(n: usize, json: bool) -> Result<ExitCode, (u8, String)> {
    if !(5..=8).contains(&n) {
        return Err((USAGE, "report covers n = 5..8".into()));
    }
    let classes = enumerate_convergent(n).map_err(|e| (PRECONDITION, e.to_string()))?;
    let self_dual = classes.iter().filter(|c| c.is_self_dual()).count();
    if json {
        let list: Vec<serde_json::Value> = classes
            .iter()
            .map(|c| {
                serde_json::json!({
                    "rep": c.rep().to_string(),
                    "dual": c.dual().rep().to_string(),
                    "self_dual": c.is_self_dual(),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "n": n, "count": classes.len(), "self_dual": self_dual, "classes": list,
            })
        );
    } else {
        println!("n = {n}: {} convergent classes, {self_dual} self-dual", classes.len());
        for c in &classes {
            let tag = if c.is_self_dual() { " (self-dual)" } else { "" };
            println!("  {} | dual {}{}", c.rep(), c.dual().rep(), tag);
        }
        if n == 5 || n == 6 {
            let (rec, init_a, init_b, scale, zeta) = if n == 5 {
                (PolyRecurrence::apery_zeta2(), [1i64, 3], [0i64, 5], 1, "zeta(2)")
            } else {
                (PolyRecurrence::apery_zeta3(), [1, 5], [0, 6], 2, "zeta(3)")
            };
            let a = rec.extend_i64(&init_a, 5).unwrap();
            let b = rec.extend_i64(&init_b, 5).unwrap();
            println!("linear forms I(N) = {scale} (a_N {zeta} - b_N):");
            for m in 0..=5i64 {
                println!("  N = {m}: a = {}, b = {}", a.at(m), b.at(m));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_cycle(s: &str) -> Result<Vec<u8>, String> {
    s.split(',').map(|t| t.trim().parse::<u8>().map_err(|e| e.to_string())).collect()
}

fn cmd_product(args: &ProductArgs, json: bool) -> Result<ExitCode, (u8, String)> {
    let parse_pair = |s: &str| -> Result<DihedralPair, String> {
        let (a, b) = s.split_once(';').ok_or("pair must be 'cycle;cycle'")?;
        Ok(DihedralPair::new(
            DihedralStructure::from_cycle(&parse_cycle(a)?),
            DihedralStructure::from_cycle(&parse_cycle(b)?),
        ))
    };
    let p1 = parse_pair(&args.pair1).map_err(|e| (USAGE, e))?;
    let p2 = parse_pair(&args.pair2).map_err(|e| (USAGE, e))?;
    let t1v = parse_cycle(&args.t1).map_err(|e| (USAGE, e))?;
    let t2v = parse_cycle(&args.t2).map_err(|e| (USAGE, e))?;
    if t1v.len() != 3 || t2v.len() != 3 {
        return Err((USAGE, "triples need exactly three labels".into()));
    }
    let t1 = [t1v[0], t1v[1], t1v[2]];
    let t2 = [t2v[0], t2v[1], t2v[2]];
    let prod = product(&p1, &p2, &t1, &t2).map_err(|e| (PRECONDITION, e.to_string()))?;
    let class = prod.config_class();
    let pullback = match args.check_pullback {
        Some(npow) => Some(
            pullback_check_basic(&p1, &p2, &t1, &t2, npow, 20)
                .map_err(|e| (PRECONDITION, e.to_string()))?,
        ),
        None => None,
    };
    if json {
        println!(
            "{}",
            serde_json::json!({
                "alpha": prod.delta.word(),
                "alpha_prime": prod.deltap.word(),
                "class": class.rep().to_string(),
                "pullback_sign": pullback,
            })
        );
    } else {
        println!("alpha  = {:?}", prod.delta.word());
        println!("alpha' = {:?}", prod.deltap.word());
        println!("class  = {}", class.rep());
        if let Some(sign) = pullback {
            println!("pullback identity holds with sign {sign:+}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
