//! Command-line front end: edge-list ingestion, structure census,
//! PageRank, mass curve, c -> 1 limit, and damping-factor reports.
//!
//! Exit codes: 0 success, 2 usage, 3 input/output or parse failure,
//! 4 convergence failure, 5 degenerate structure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergorank_core::damping::{
    bound_formulas, mass_bounds, solve_cstar_pagerank, solve_cstar_quasi, solve_cstar_uniform,
    DampingReport,
};
use ergorank_core::error::Error;
use ergorank_core::pagerank::{
    default_max_iterations, escc_mass_curve, mass_of, pagerank, MassCurve, PageRankVector,
    DEFAULT_TAIL_TOL, DEFAULT_TOLERANCE,
};
use ergorank_core::perturbation::{class_stationary, limit_pagerank};
use ergorank_core::spectral::lambda_sequence;
use ergorank_core::structure::{census, decompose, pure_out_scc_sizes, StructureDecomposition};
use ergorank_core::{SpectralSummary, TransitionOperator, WebGraph};

#[derive(Parser)]
#[command(name = "ergorank", version, disable_help_subcommand = true)]
/// Link-structure analysis and damping-factor selection for sparse
/// directed graphs in edge-list form.
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bow-tie and block-structure census of the graph.
    Census {
        /// Edge-list file: a node-count header line, then "src dst" lines.
        input: PathBuf,
        /// Write the census as CSV (component,size).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a histogram of Pure-OUT SCC sizes as CSV (size,count).
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Write per-node block labels as CSV (node_id,block_label).
        #[arg(long)]
        blocks: Option<PathBuf>,
    },
    /// Power-iteration PageRank with a block-mass summary.
    Pagerank {
        input: PathBuf,
        /// Damping factor in [0,1).
        #[arg(long, default_value_t = 0.85)]
        c: f64,
        /// L1 stopping tolerance on the iteration step.
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Iteration budget; derived from c and tol when omitted.
        #[arg(long)]
        max_iter: Option<u32>,
        /// Write the vector as CSV (node_id,score).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retained-mass curve of the extended SCC over a damping grid.
    Masscurve {
        input: PathBuf,
        /// Grid as lo:hi:step, all within [0,1].
        #[arg(long, default_value = "0:1:0.01")]
        grid: String,
        /// Series truncation length.
        #[arg(long = "K", default_value_t = 5000)]
        k: usize,
        /// Write the curve as CSV (c,mass,lower,upper,r_of_c,truncation_bound).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the coefficient diagnostics as CSV (k,a_k,lambda1_k).
        #[arg(long)]
        spectral: Option<PathBuf>,
    },
    /// The c -> 1 limit of PageRank and its per-class composition.
    Limit {
        input: PathBuf,
        /// Write the limit vector as CSV (node_id,score).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-class table as CSV
        /// (class_id,size,mu_entropy,limit_mass,fair_share,ratio).
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Fair damping factors under the three reference distributions.
    Cstar {
        /// Edge-list input; omit when using --from-scalars.
        input: Option<PathBuf>,
        /// Run the bound formulas on "alpha,p1,lambda1" without a graph.
        #[arg(long)]
        from_scalars: Option<String>,
        /// Series truncation length for the graph mode.
        #[arg(long = "K", default_value_t = 5000)]
        k: usize,
        /// Write the reports as CSV (v,bound,value).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse { .. } | Error::NodeOutOfRange { .. } => 3,
            Error::InvalidDamping { .. }
            | Error::DimensionMismatch { .. }
            | Error::TooFewCoefficients { .. } => 2,
            Error::Convergence { .. } | Error::SingularSystem => 4,
            Error::DegenerateStructure { .. } => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure { code: 3, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Census { input, out, histogram, blocks } => cmd_census(&input, out, histogram, blocks),
        Command::Pagerank { input, c, tol, max_iter, out } => cmd_pagerank(&input, c, tol, max_iter, out),
        Command::Masscurve { input, grid, k, out, spectral } => cmd_masscurve(&input, &grid, k, out, spectral),
        Command::Limit { input, out, classes } => cmd_limit(&input, out, classes),
        Command::Cstar { input, from_scalars, k, out } => cmd_cstar(input, from_scalars, k, out),
    }
}

fn load_graph(path: &Path) -> Result<WebGraph, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })?;
    Ok(WebGraph::parse_edge_list(&bytes)?)
}

/// All file output goes through a temp file in the target directory and a
/// rename, so failures never leave partial files behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Failure { code: 3, message: format!("{}: {e}", path.display()) })?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Failure { code: 3, message: e.to_string() })?;
    Ok(())
}

/// CSV cells use lower-exponent float form: shortest digits that
/// round-trip, stable across runs, no locale involvement.
fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn cmd_census(
    input: &Path,
    out: Option<PathBuf>,
    histogram: Option<PathBuf>,
    blocks: Option<PathBuf>,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let c = census(&g);

    println!("{:<18} {:>10}", "component", "size");
    for (label, size) in c.rows() {
        println!("{label:<18} {size:>10}");
    }

    if let Some(path) = out {
        let mut csv = String::from("component,size\n");
        for (label, size) in c.rows() {
            let _ = writeln!(csv, "{label},{size}");
        }
        write_atomic(&path, &csv)?;
    }

    if let Some(path) = histogram {
        let sizes = pure_out_scc_sizes(&g);
        let mut csv = String::from("size,count\n");
        let mut i = 0;
        while i < sizes.len() {
            let mut j = i;
            while j < sizes.len() && sizes[j] == sizes[i] {
                j += 1;
            }
            let _ = writeln!(csv, "{},{}", sizes[i], j - i);
            i = j;
        }
        write_atomic(&path, &csv)?;
    }

    if let Some(path) = blocks {
        let dec = decompose(&g);
        let mut label = vec![String::new(); g.node_count()];
        for &v in &dec.escc {
            label[v as usize] = "ESCC".to_string();
        }
        for &v in &dec.transient_out {
            label[v as usize] = "S".to_string();
        }
        for (k, class) in dec.ergodic_classes.iter().enumerate() {
            for &v in class {
                label[v as usize] = format!("Q{}", k + 1);
            }
        }
        let mut csv = String::from("node_id,block_label\n");
        for (v, l) in label.iter().enumerate() {
            let _ = writeln!(csv, "{v},{l}");
        }
        write_atomic(&path, &csv)?;
    }
    Ok(())
}

fn pure_out_nodes(dec: &StructureDecomposition) -> Vec<u32> {
    let mut nodes = dec.transient_out.clone();
    for class in &dec.ergodic_classes {
        nodes.extend_from_slice(class);
    }
    nodes
}

fn cmd_pagerank(
    input: &Path,
    c: f64,
    tol: f64,
    max_iter: Option<u32>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&c) {
        return Err(Failure::usage(format!("--c must lie in [0,1), got {c}")));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
    }
    let g = load_graph(input)?;
    let op = TransitionOperator::new(&g, c)?;
    let budget = max_iter.unwrap_or_else(|| default_max_iterations(c, tol));
    let pr = pagerank(&op, tol, budget)?;

    let dec = decompose(&g);
    let escc = mass_of(&dec.escc, &pr);
    let pure = mass_of(&pure_out_nodes(&dec), &pr);
    println!(
        "nodes {}  edges {}  c {}  iterations {}  residual {:e}",
        g.node_count(),
        g.edge_count(),
        c,
        pr.iterations,
        pr.residual
    );
    println!("{:<10} {:>14} {:>14} {:>10}", "set", "mass", "fair_share", "ratio");
    println!("{:<10} {:>14.8} {:>14.8} {:>10.4}", "escc", escc.mass, escc.fair_share, escc.ratio);
    println!("{:<10} {:>14.8} {:>14.8} {:>10.4}", "pure_out", pure.mass, pure.fair_share, pure.ratio);

    if let Some(path) = out {
        write_atomic(&path, &scores_csv(&pr))?;
    }
    Ok(())
}

fn scores_csv(pr: &PageRankVector) -> String {
    let mut csv = String::from("node_id,score\n");
    for (v, &x) in pr.values.iter().enumerate() {
        let _ = writeln!(csv, "{v},{}", fmt(x));
    }
    csv
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("--grid wants lo:hi:step, got \"{spec}\"")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::usage(format!("--grid \"{spec}\": {e}")))?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi || !step.is_finite() || step <= 0.0 {
        return Err(Failure::usage(format!(
            "--grid endpoints must satisfy 0 <= lo <= hi <= 1 with step > 0, got \"{spec}\""
        )));
    }
    let mut points = Vec::new();
    let mut i = 0u64;
    loop {
        let c = lo + i as f64 * step;
        if c > hi + 1e-12 {
            break;
        }
        points.push(c.min(1.0));
        i += 1;
    }
    Ok(points)
}

/// The normalized-PageRank fairness target: alpha for c <= 1/2, then
/// alpha(1-c)/c. Both branches meet at 1/2.
fn r_of_c(alpha: f64, c: f64) -> f64 {
    if c <= 0.5 {
        alpha
    } else {
        alpha * (1.0 - c) / c
    }
}

fn curve_and_spectrum(
    g: &WebGraph,
    k: usize,
) -> Result<(StructureDecomposition, MassCurve, SpectralSummary), Failure> {
    let dec = decompose(g);
    let curve = escc_mass_curve(g, &dec, k, DEFAULT_TAIL_TOL);
    let spec = lambda_sequence(&curve)?;
    Ok((dec, curve, spec))
}

fn cmd_masscurve(
    input: &Path,
    grid: &str,
    k: usize,
    out: Option<PathBuf>,
    spectral: Option<PathBuf>,
) -> Result<(), Failure> {
    let points = parse_grid(grid)?;
    let g = load_graph(input)?;
    let (_, curve, spec) = curve_and_spectrum(&g, k)?;

    println!(
        "alpha {:e}  p1 {:e}  lambda1 {:e}  terms {}  ratios_monotone {}  converged {}",
        curve.alpha(),
        spec.p1,
        spec.lambda1,
        curve.k_max(),
        spec.monotone_flag,
        spec.converged
    );

    if let Some(path) = out {
        let mut csv = String::from("c,mass,lower,upper,r_of_c,truncation_bound\n");
        for &c in &points {
            let (lo, hi) = mass_bounds(curve.alpha(), spec.p1, spec.lambda1, c);
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt(c),
                fmt(curve.evaluate(c)),
                fmt(lo),
                fmt(hi),
                fmt(r_of_c(curve.alpha(), c)),
                fmt(curve.truncation_bound(c))
            );
        }
        write_atomic(&path, &csv)?;
    }

    if let Some(path) = spectral {
        let mut csv = String::from("k,a_k,lambda1_k\n");
        for (k, &a) in curve.coefficients().iter().enumerate() {
            if k == 0 {
                let _ = writeln!(csv, "0,{},", fmt(a));
            } else {
                let _ = writeln!(csv, "{k},{},{}", fmt(a), fmt(spec.lambda_seq[k - 1]));
            }
        }
        write_atomic(&path, &csv)?;
    }
    Ok(())
}

fn cmd_limit(input: &Path, out: Option<PathBuf>, classes: Option<PathBuf>) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let dec = decompose(&g);
    let limit = limit_pagerank(&g, &dec)?;
    let n = g.node_count() as f64;

    let header = format!(
        "{:<9} {:>6} {:>12} {:>12} {:>12} {:>10}",
        "class_id", "size", "mu_entropy", "limit_mass", "fair_share", "ratio"
    );
    println!("{header}");
    let mut csv = String::from("class_id,size,mu_entropy,limit_mass,fair_share,ratio\n");
    for (i, class) in dec.ergodic_classes.iter().enumerate() {
        let mu = class_stationary(&g, &dec, i)?;
        let entropy: f64 = mu.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
        let mass = limit.per_class_mass[i];
        let share = class.len() as f64 / n;
        println!(
            "{:<9} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>10.4}",
            i + 1,
            class.len(),
            entropy,
            mass,
            share,
            mass / share
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            i + 1,
            class.len(),
            fmt(entropy),
            fmt(mass),
            fmt(share),
            fmt(mass / share)
        );
    }

    if let Some(path) = out {
        let mut scores = String::from("node_id,score\n");
        for (v, &x) in limit.values.iter().enumerate() {
            let _ = writeln!(scores, "{v},{}", fmt(x));
        }
        write_atomic(&path, &scores)?;
    }
    if let Some(path) = classes {
        write_atomic(&path, &csv)?;
    }
    Ok(())
}

fn parse_scalars(spec: &str) -> Result<(f64, f64, f64), Failure> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!("--from-scalars wants alpha,p1,lambda1, got \"{spec}\"")));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::usage(format!("--from-scalars \"{spec}\": {e}")))?;
    let (alpha, p1, lambda1) = (nums[0], nums[1], nums[2]);
    for (name, v) in [("alpha", alpha), ("p1", p1), ("lambda1", lambda1)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Failure::usage(format!("{name} must lie in (0,1], got {v}")));
        }
    }
    Ok((alpha, p1, lambda1))
}

fn cmd_cstar(
    input: Option<PathBuf>,
    from_scalars: Option<String>,
    k: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    match (input, from_scalars) {
        (Some(_), Some(_)) => {
            Err(Failure::usage("give either an input file or --from-scalars, not both"))
        }
        (None, None) => Err(Failure::usage("an input file or --from-scalars is required")),
        (None, Some(spec)) => {
            let (alpha, p1, lambda1) = parse_scalars(&spec)?;
            let b = bound_formulas(p1, lambda1);
            println!("alpha {alpha:e}  p1 {p1:e}  lambda1 {lambda1:e}");
            println!("{:<21} {:>12} {:>12}", "reference", "lower", "upper");
            println!("{:<21} {:>12.6} {:>12.6}", "quasi_stationary", b.c1, b.c2);
            println!("{:<21} {:>12.6} {:>12.6}", "uniform", b.c3, b.c4);
            println!(
                "{:<21} {:>12.6} {:>12.6}",
                "normalized_pagerank", b.pagerank_lower, b.pagerank_upper
            );
            if let Some(path) = out {
                let mut csv = String::from("v,bound,value\n");
                for (v, lo, hi) in [
                    ("quasi_stationary", b.c1, b.c2),
                    ("uniform", b.c3, b.c4),
                    ("normalized_pagerank", b.pagerank_lower, b.pagerank_upper),
                ] {
                    let _ = writeln!(csv, "{v},lower,{}", fmt(lo));
                    let _ = writeln!(csv, "{v},upper,{}", fmt(hi));
                }
                write_atomic(&path, &csv)?;
            }
            Ok(())
        }
        (Some(path), None) => {
            let g = load_graph(&path)?;
            let (_, curve, spec) = curve_and_spectrum(&g, k)?;
            let reports = [
                solve_cstar_quasi(&spec, &curve),
                solve_cstar_uniform(&spec, &curve),
                solve_cstar_pagerank(&spec, &curve),
            ];
            if let Some(r) = reports.iter().find(|r| r.degenerate) {
                return Err(Failure {
                    code: 5,
                    message: format!(
                        "the extended SCC never leaks (lambda1 = {:e}); no fair damping \
                         factor exists for the {} reference",
                        spec.lambda1,
                        r.choice.label()
                    ),
                });
            }

            println!(
                "alpha {:e}  p1 {:e}  lambda1 {:e}  hypotheses_held {}",
                curve.alpha(),
                spec.p1,
                spec.lambda1,
                reports[0].hypotheses_held
            );
            println!(
                "{:<21} {:>10} {:>12} {:>12} {:>12}",
                "reference", "gamma", "c_star", "lower", "upper"
            );
            for r in &reports {
                let gamma = r.gamma.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
                println!(
                    "{:<21} {:>10} {:>12.6} {:>12.6} {:>12.6}",
                    r.choice.label(),
                    gamma,
                    r.c_star,
                    r.lower_bound,
                    r.upper_bound
                );
            }
            if let Some(path) = out {
                write_atomic(&path, &reports_csv(&reports))?;
            }
            Ok(())
        }
    }
}

fn reports_csv(reports: &[DampingReport]) -> String {
    let mut csv = String::from("v,bound,value\n");
    for r in reports {
        let _ = writeln!(csv, "{},lower,{}", r.choice.label(), fmt(r.lower_bound));
        let _ = writeln!(csv, "{},c_star,{}", r.choice.label(), fmt(r.c_star));
        let _ = writeln!(csv, "{},upper,{}", r.choice.label(), fmt(r.upper_bound));
    }
    csv
}
