//! Command-line front end: expected invariants of random complexes,
//! reduced-polynomial coefficients, equal-probability polynomials,
//! Vietoris–Rips construction, and the cross-method verification suite.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input error,
//! 3 resource guard exceeded.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stochom::complex::{Cell, RandomComplex, Rat, SimplicialComplex};
use stochom::format::{parse_complex, parse_pattern, serialize_complex};
use stochom::geometry::{
    assign_probabilities, load_points, vr_complex, ProbFamily, ProbModel, RadiusMode,
};
use stochom::oracle::{
    expected_betti_exact, expected_euler_exact, mc_estimate, symbolic_expected_betti,
};
use stochom::pattern::Pattern;
use stochom::poly::p_n_polynomial;
use stochom::reduction::{c_direct, c_recursive, deletion_level_sums, CoefficientCache};

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(name = "stochom", version, about = "Expected Betti numbers of random simplicial complexes")]
struct Cli {
    /// Cap the number of worker threads (default: all cores). Results are
    /// identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expected Betti number or Euler characteristic of a complex file
    Expect(ExpectArgs),
    /// Reduced-polynomial coefficient c_k of a pattern file
    Coeff(CoeffArgs),
    /// Equal-probability polynomial p_n^E for the maximal complex
    Poly(PolyArgs),
    /// Build a Vietoris-Rips complex with heuristic probabilities
    Vr(VrArgs),
    /// Cross-check all identities on random instances
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpectMode {
    Exact,
    Mc,
    Euler,
}

#[derive(Args)]
struct ExpectArgs {
    /// Complex file
    file: PathBuf,
    /// Betti dimension k
    #[arg(long, default_value_t = 0)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = ExpectMode::Exact)]
    mode: ExpectMode,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffMethod {
    Direct,
    Recursive,
}

#[derive(Args)]
struct CoeffArgs {
    /// Pattern file (probabilities optional and ignored)
    file: PathBuf,
    /// Cell dimension k of the coefficient
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = CoeffMethod::Recursive)]
    method: CoeffMethod,
    /// Compute by both methods and fail on disagreement
    #[arg(long)]
    verify: bool,
    /// Coefficient cache file
    #[arg(long, default_value = "coefficients.cache")]
    cache: PathBuf,
    /// Disable cache persistence
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct PolyArgs {
    /// Point count m
    #[arg(long)]
    points: u32,
    /// Cell dimension n
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbArg {
    Root,
    Power,
    Quadratic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RmArg {
    Max,
    Min,
    Mean,
}

#[derive(Args)]
struct VrArgs {
    /// CSV of points, one row per point
    file: PathBuf,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long, value_enum, default_value_t = ProbArg::Root)]
    prob: ProbArg,
    /// Exponent parameter of the probability model
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Which centroid-to-vertex distance is the cell radius
    #[arg(long, value_enum, default_value_t = RmArg::Max)]
    rm: RmArg,
    /// Output complex file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    max_cells: usize,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Exact rational followed by its decimal value, 15 significant digits.
fn show_rat(r: &Rat) -> String {
    let approx = r.to_f64().unwrap_or(f64::NAN);
    if r.is_integer() {
        format!("{r}")
    } else {
        format!("{r} = {approx:.15}")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match cli.command {
        Command::Expect(args) => cmd_expect(args),
        Command::Coeff(args) => cmd_coeff(args),
        Command::Poly(args) => cmd_poly(args),
        Command::Vr(args) => cmd_vr(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn read_file(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_INPUT)
    })
}

fn cmd_expect(args: ExpectArgs) -> ExitCode {
    let text = match read_file(&args.file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let rc = match parse_complex(&text) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    match args.mode {
        ExpectMode::Exact => match expected_betti_exact(&rc, args.dim) {
            Ok(value) => {
                println!("{}", show_rat(&value));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_GUARD)
            }
        },
        ExpectMode::Euler => {
            println!("{}", show_rat(&expected_euler_exact(&rc)));
            ExitCode::SUCCESS
        }
        ExpectMode::Mc => {
            let est = mc_estimate(&rc, args.dim, args.samples, args.seed);
            println!(
                "mean {:.15} stderr {:.15} samples {} seed {}",
                est.mean, est.std_error, est.samples, est.seed
            );
            ExitCode::SUCCESS
        }
    }
}

fn cmd_coeff(args: CoeffArgs) -> ExitCode {
    let text = match read_file(&args.file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let pattern = match parse_pattern(&text, args.dim) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let cache = if args.no_cache {
        CoefficientCache::in_memory()
    } else {
        match CoefficientCache::open(&args.cache) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
        }
    };
    let guard = |e: stochom::reduction::ReductionError| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_GUARD)
    };
    let value = match args.method {
        CoeffMethod::Direct => match c_direct(&pattern, args.dim) {
            Ok(v) => v,
            Err(e) => return guard(e),
        },
        CoeffMethod::Recursive => match c_recursive(&pattern, args.dim, &cache) {
            Ok(v) => v,
            Err(e) => return guard(e),
        },
    };
    if args.verify {
        let other = match args.method {
            CoeffMethod::Direct => c_recursive(&pattern, args.dim, &cache),
            CoeffMethod::Recursive => c_direct(&pattern, args.dim),
        };
        match other {
            Ok(o) if o == value => {}
            Ok(o) => {
                eprintln!("mismatch: methods disagree ({value} vs {o})");
                return ExitCode::from(EXIT_MISMATCH);
            }
            Err(e) => return guard(e),
        }
    }
    println!("{value}");
    ExitCode::SUCCESS
}

fn cmd_poly(args: PolyArgs) -> ExitCode {
    match p_n_polynomial(args.points, args.dim) {
        Ok(p) => {
            println!("{p}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_GUARD)
        }
    }
}

fn cmd_vr(args: VrArgs) -> ExitCode {
    let text = match read_file(&args.file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let pc = match load_points(&text) {
        Ok(pc) => pc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let complex = vr_complex(&pc, args.radius, args.max_dim);
    let family = match args.prob {
        ProbArg::Root => ProbFamily::Root,
        ProbArg::Power => ProbFamily::Power,
        ProbArg::Quadratic => ProbFamily::Quadratic,
    };
    let mode = match args.rm {
        RmArg::Max => RadiusMode::Max,
        RmArg::Min => RadiusMode::Min,
        RmArg::Mean => RadiusMode::Mean,
    };
    let rc = match assign_probabilities(&complex, &pc, ProbModel::new(family, args.k), mode) {
        Ok(rc) => rc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let out = serialize_complex(&rc);
    match args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}

// --- verification suite ---------------------------------------------------

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    let den = *[2i64, 3, 4, 5, 6].get(rng.gen_range(0..5)).unwrap();
    let num = rng.gen_range(0..=den);
    Rat::new(num.into(), den.into())
}

/// Random complex: a random graph on a few vertices, with triangles filled
/// at random where all edges exist, every cell with a random probability.
fn random_complex(rng: &mut ChaCha8Rng, max_cells: usize) -> RandomComplex {
    loop {
        let m: u32 = rng.gen_range(2..=4);
        let mut cells: BTreeSet<Cell> = (1..=m).map(|v| Cell::of(&[v])).collect();
        for i in 1..=m {
            for j in (i + 1)..=m {
                if rng.gen_bool(0.6) {
                    cells.insert(Cell::of(&[i, j]));
                }
            }
        }
        for i in 1..=m {
            for j in (i + 1)..=m {
                for l in (j + 1)..=m {
                    let closed = cells.contains(&Cell::of(&[i, j]))
                        && cells.contains(&Cell::of(&[i, l]))
                        && cells.contains(&Cell::of(&[j, l]));
                    if closed && rng.gen_bool(0.5) {
                        cells.insert(Cell::of(&[i, j, l]));
                    }
                }
            }
        }
        if cells.len() > max_cells {
            continue;
        }
        let complex = SimplicialComplex::new(cells).expect("built face-closed");
        let prob: BTreeMap<Cell, Rat> = complex
            .cells()
            .map(|c| (c.clone(), random_rat(rng)))
            .collect();
        return RandomComplex::new(complex, prob).expect("probabilities in range");
    }
}

fn random_edge_pattern(rng: &mut ChaCha8Rng, max_edges: usize) -> Pattern {
    loop {
        let m: u32 = rng.gen_range(3..=6);
        let mut edges = Vec::new();
        for i in 1..=m {
            for j in (i + 1)..=m {
                if rng.gen_bool(0.5) {
                    edges.push((i, j));
                }
            }
        }
        if !edges.is_empty() && edges.len() <= max_edges {
            return Pattern::from_edges(&edges);
        }
    }
}

fn report_failure(label: &str, rc: &RandomComplex) -> ExitCode {
    eprintln!("mismatch in {label}; offending complex:");
    eprint!("{}", serialize_complex(rc));
    ExitCode::from(EXIT_MISMATCH)
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let cache = CoefficientCache::in_memory();

    // Euler-Poincare and symbolic-vs-enumeration on random complexes
    let mut euler_checked = 0u64;
    let mut symbolic_checked = 0u64;
    for _ in 0..args.trials {
        let rc = random_complex(&mut rng, args.max_cells);
        let dim = rc.complex().dimension().unwrap_or(0);
        let mut alternating = Rat::zero();
        for k in 0..=dim {
            let b = expected_betti_exact(&rc, k).expect("within guard");
            if k % 2 == 0 {
                alternating += &b;
            } else {
                alternating -= &b;
            }
        }
        if alternating != expected_euler_exact(&rc) {
            return report_failure("expected Euler-Poincare", &rc);
        }
        euler_checked += 1;
        let assignment: BTreeMap<Cell, Rat> = rc
            .ordered_cells()
            .iter()
            .map(|c| ((*c).clone(), rc.prob(c).clone()))
            .collect();
        for k in 0..=dim.min(1) {
            let poly = symbolic_expected_betti(&rc, k).expect("within guard");
            if poly.eval(&assignment) != expected_betti_exact(&rc, k).expect("within guard") {
                return report_failure("symbolic expansion", &rc);
            }
        }
        symbolic_checked += 1;
    }

    // coefficient identities on random edge patterns
    let mut coeff_checked = 0u64;
    for _ in 0..args.trials {
        let p = random_edge_pattern(&mut rng, 7);
        let direct = c_direct(&p, 1).expect("within guard");
        let recursive = c_recursive(&p, 1, &cache).expect("within guard");
        let sums = deletion_level_sums(&p, 1, &cache).expect("within guard");
        let b1 = stochom::reduction::betti_of_cells(p.cell_set(), 1);
        if direct != recursive || sums.iter().sum::<i64>() != b1 {
            eprintln!("mismatch in coefficient recursion; offending pattern:");
            for cell in p.cells() {
                let vs: Vec<String> = cell.vertices().iter().map(|v| v.to_string()).collect();
                eprintln!("e {}", vs.join(" "));
            }
            return ExitCode::from(EXIT_MISMATCH);
        }
        coeff_checked += 1;
    }

    // zero-sum decompositions: remove all-but-one edge of a random cycle
    let mut zero_sum_checked = 0u64;
    for _ in 0..args.trials / 4 {
        let len = rng.gen_range(4..=6u32);
        let edges: Vec<(u32, u32)> = (1..=len)
            .map(|i| (i, if i == len { 1 } else { i + 1 }))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let base = Pattern::from_edges(&edges);
        let decomposed: Vec<Cell> = edges[1..]
            .iter()
            .map(|&(a, b)| Cell::of(&[a, b]))
            .collect();
        match stochom::reduction::zero_sum_decomposition(&base, &decomposed) {
            Ok(0) => zero_sum_checked += 1,
            Ok(v) => {
                eprintln!("mismatch in zero-sum decomposition (sum {v}) on a {len}-cycle");
                return ExitCode::from(EXIT_MISMATCH);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_GUARD);
            }
        }
    }

    println!(
        "verify pass: euler-poincare {euler_checked}, symbolic {symbolic_checked}, \
         coefficients {coeff_checked}, zero-sum {zero_sum_checked}"
    );
    ExitCode::SUCCESS
}
