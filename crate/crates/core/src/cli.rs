//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 unbounded region,
//! 3 undecided integer feasibility, 4 cell cap exceeded.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::arrangement::{cell_cap_from_env, Arrangement};
use crate::circuit::{parse_circuit, PolyhedraCircuit, Severity};
use crate::coverage::{load_manifest, random_classical, reduce_classical, CoverageInstance, GreedyTrace, Mode, Objective, Solver, BRUTE_FORCE_LIMIT};
use crate::error::{Error, Result};
use crate::measure::Measurer;
use crate::oracles::plugin::serve_request;
use crate::oracles::{OracleSuite, ProcessOracle};
use crate::render::render_svg;
use crate::scalar::{greedy_ratio, ln_upper, parse_fraction, to_decimal};

type Q = BigRational;

#[derive(Parser, Debug)]
#[command(name = "polycirc", version, about = "Exact measures of polyhedra circuits and greedy polyhedral coverage")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a circuit file and report problems.
    Validate { file: PathBuf },
    /// List the cells of the circuit's hyperplane arrangement.
    Decompose {
        file: PathBuf,
        /// Attach an integer witness to every cell.
        #[arg(long)]
        lattice: bool,
        /// Print arrangement statistics after the cells.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Exact volume of the circuit region.
    Volume(MeasureArgs),
    /// Exact number of integer points in the circuit region.
    Count(MeasureArgs),
    /// Greedy maximum coverage with budget `k` from a manifest.
    CoverMax(CoverArgs),
    /// Greedy partial set cover with `alpha`/`beta` from a manifest.
    CoverSet(CoverArgs),
    /// Turn a classical set-cover instance into a planar coverage manifest.
    Reduce(ReduceArgs),
    /// Draw a planar circuit as SVG.
    Render {
        file: PathBuf,
        /// Bounding box `x1lo x1hi x2lo x2hi`.
        #[arg(long, num_args = 4, allow_negative_numbers = true, required = true, value_names = ["X1LO", "X1HI", "X2LO", "X2HI"])]
        bbox: Vec<String>,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        cell_cap: Option<usize>,
    },
    /// Answer one oracle request on standard input (plugin protocol).
    #[command(hide = true)]
    OracleServe,
}

#[derive(Args, Debug)]
struct EngineArgs {
    /// Backend override: `volume=tri|CMD`, `count=enum|CMD`, `ilp=bb|CMD`.
    #[arg(long = "oracle", value_name = "KIND=BACKEND")]
    oracles: Vec<String>,
    /// Maximum number of arrangement cells (default from POLYCIRC_CELL_CAP, else 1000000).
    #[arg(long)]
    cell_cap: Option<usize>,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    file: PathBuf,
    /// Print cell and oracle statistics.
    #[arg(long)]
    report: bool,
    /// Intersect with the closed box `x1lo x1hi ... xdlo xdhi` first.
    #[arg(long, num_args = 2.., allow_negative_numbers = true, value_name = "BOUND")]
    clip: Vec<String>,
    /// Also print a rounded decimal with N digits, marked approximate.
    #[arg(long, value_name = "N")]
    decimal: Option<usize>,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct CoverArgs {
    manifest: PathBuf,
    /// Compare against the brute-force optimum when it is small enough.
    #[arg(long)]
    verify_ratio: bool,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// JSON file `{"n": N, "sets": [[..], ..]}`.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    sets: Option<PathBuf>,
    /// Generate `N M`: M random sets over 1..=N.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    random: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Budget written to the manifest (default: number of sets).
    #[arg(short, long)]
    k: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalInstance {
    n: usize,
    sets: Vec<Vec<i64>>,
}

/// Runs the CLI with process streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut std::io::stdin(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI against the given streams. Output is written only after the
/// command completes.
pub fn run_with<I, T>(argv: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = String::new();
    let mut diag = String::new();
    let result = dispatch(cli.command, stdin, &mut buf, &mut diag);
    let _ = out.write_all(buf.as_bytes());
    let _ = err.write_all(diag.as_bytes());
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnboundedRegion | Error::UnboundedPolytope => 2,
        Error::IlpIncomplete(_) => 3,
        Error::CellCapExceeded { .. } => 4,
        _ => 1,
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn Read, out: &mut String, diag: &mut String) -> Result<()> {
    use std::fmt::Write as _;
    match cmd {
        Command::Validate { file } => {
            let c = load_circuit(&file, diag)?;
            let inputs = c.leaves().count();
            writeln!(out, "ok: dim {}, {} gates, {} inputs", c.dim(), c.gates().len(), inputs).unwrap();
        }
        Command::Decompose { file, lattice, stats, engine } => {
            let c = load_circuit(&file, diag)?;
            let measurer = measurer(&engine)?;
            let leaves: Vec<_> = c.leaves().cloned().collect();
            let arr = Arrangement::new(c.dim(), &leaves)?;
            let (cells, st) = if lattice {
                arr.decompose_integer(measurer.suite(), measurer.cell_cap())?
            } else {
                arr.decompose_interior::<Q>(measurer.cell_cap())?
            };
            for cell in &cells {
                write!(out, "{} {}", cell.signs, cell.interior_witness).unwrap();
                if lattice {
                    match &cell.integer_witness {
                        Some(z) => write!(out, " int {z}").unwrap(),
                        None => write!(out, " int none").unwrap(),
                    }
                }
                writeln!(out).unwrap();
            }
            if stats {
                for (i, k) in arr.keys().iter().enumerate() {
                    writeln!(out, "hyperplane {} {}", i + 1, k).unwrap();
                }
                writeln!(out, "{st}").unwrap();
            }
        }
        Command::Volume(args) => measure(&args, Mode::Volume, out, diag)?,
        Command::Count(args) => measure(&args, Mode::Lattice, out, diag)?,
        Command::CoverMax(args) => cover(&args, true, out)?,
        Command::CoverSet(args) => cover(&args, false, out)?,
        Command::Reduce(args) => reduce(&args, out)?,
        Command::Render { file, bbox, output, cell_cap } => {
            let c = load_circuit(&file, diag)?;
            let b = bbox.iter().map(|s| parse_fraction::<Q>(s)).collect::<Result<Vec<_>>>()?;
            let svg = render_svg(&c, &[b[0].clone(), b[2].clone()], &[b[1].clone(), b[3].clone()], cell_cap.unwrap_or_else(cell_cap_from_env))?;
            match output {
                Some(path) => std::fs::write(path, svg)?,
                None => out.push_str(&svg),
            }
        }
        Command::OracleServe => {
            let mut req = String::new();
            stdin.read_to_string(&mut req)?;
            writeln!(out, "{}", serve_request(&req, &OracleSuite::<Q>::default())).unwrap();
        }
    }
    Ok(())
}

fn load_circuit(path: &Path, diag: &mut String) -> Result<PolyhedraCircuit> {
    use std::fmt::Write as _;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    match parse_circuit(&text) {
        Ok(parsed) => {
            for w in parsed.warnings {
                writeln!(diag, "{}:{w}", path.display()).unwrap();
            }
            Ok(parsed.circuit)
        }
        Err(diags) => {
            for d in diags.iter().filter(|d| d.severity == Severity::Error) {
                writeln!(diag, "{}:{d}", path.display()).unwrap();
            }
            Err(Error::InvalidCircuit(format!("{} has {} error(s)", path.display(), diags.len())))
        }
    }
}

fn measurer(engine: &EngineArgs) -> Result<Measurer<Q>> {
    let mut suite = OracleSuite::<Q>::default();
    for spec in &engine.oracles {
        let (kind, backend) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("--oracle expects KIND=BACKEND, got `{spec}`")))?;
        let plugin = || ProcessOracle::from_command_line(backend).map(Arc::new);
        suite = match (kind, backend) {
            ("volume", "tri") | ("count", "enum") | ("ilp", "bb") => suite,
            ("volume", _) => suite.with_volume(plugin()?),
            ("count", _) => suite.with_lattice(plugin()?),
            ("ilp", _) => suite.with_ilp(plugin()?),
            _ => return Err(Error::InvalidParams(format!("unknown oracle kind `{kind}`"))),
        };
    }
    Ok(Measurer::new(suite, engine.cell_cap.unwrap_or_else(cell_cap_from_env)))
}

fn measure(args: &MeasureArgs, mode: Mode, out: &mut String, diag: &mut String) -> Result<()> {
    use std::fmt::Write as _;
    let mut c = load_circuit(&args.file, diag)?;
    if !args.clip.is_empty() {
        if args.clip.len() != 2 * c.dim() {
            return Err(Error::InvalidParams(format!("--clip needs {} bounds for dim {}", 2 * c.dim(), c.dim())));
        }
        let b = args.clip.iter().map(|s| parse_fraction::<Q>(s)).collect::<Result<Vec<_>>>()?;
        let lo: Vec<Q> = b.iter().step_by(2).cloned().collect();
        let hi: Vec<Q> = b.iter().skip(1).step_by(2).cloned().collect();
        c = c.clipped(&lo, &hi)?;
    }
    let m = measurer(&args.engine)?;
    let (value, total, selected, calls) = match mode {
        Mode::Volume => {
            let r = m.circuit_volume(&c)?;
            (r.value, r.cells_total, r.cells_selected, r.oracle_calls)
        }
        Mode::Lattice => {
            let r = m.circuit_lattice_count(&c)?;
            (Q::from_integer(BigInt::from(r.value)), r.cells_total, r.cells_selected, r.oracle_calls)
        }
    };
    match args.decimal {
        Some(n) => writeln!(out, "{value} approx {}", to_decimal(&value, n)).unwrap(),
        None => writeln!(out, "{value}").unwrap(),
    }
    if args.report {
        writeln!(out, "cells_total {total}").unwrap();
        writeln!(out, "cells_selected {selected}").unwrap();
        writeln!(out, "oracle_calls {calls}").unwrap();
    }
    Ok(())
}

fn write_trace(out: &mut String, inst: &CoverageInstance, t: &GreedyTrace<Q>) {
    use std::fmt::Write as _;
    for (step, ((pick, gain), cum)) in t.picks.iter().zip(&t.gains).zip(&t.cumulative).enumerate() {
        let name = &inst.regions()[pick - 1].name;
        writeln!(out, "{} {} {} {} {}", step + 1, pick, name, gain, cum).unwrap();
    }
    writeln!(out, "# stop {}", t.stop).unwrap();
}

fn cover(args: &CoverArgs, max: bool, out: &mut String) -> Result<()> {
    use std::fmt::Write as _;
    let manifest = load_manifest::<Q>(&args.manifest)?;
    let solver = Solver::new(measurer(&args.engine)?);
    let inst = &manifest.instance;
    match (max, manifest.objective) {
        (true, Objective::Budget(k)) => {
            let t = solver.greedy_max(inst, k)?;
            write_trace(out, inst, &t);
            if args.verify_ratio {
                if binomial_fits(inst.len(), k) {
                    let opt = solver.brute_force_opt(inst, k)?;
                    let bound = greedy_ratio::<Q>(k);
                    let ratio = if opt.is_zero() { Q::from_integer(1.into()) } else { t.value() / &opt };
                    let verdict = if ratio >= bound { "ok" } else { "VIOLATED" };
                    writeln!(out, "# opt {opt} ratio {ratio} bound {bound} {verdict}").unwrap();
                } else {
                    writeln!(out, "# opt skipped: instance too large for brute force").unwrap();
                }
            }
        }
        (false, Objective::Cover(params)) => {
            let t = solver.greedy_cover(inst, &params)?;
            write_trace(out, inst, &t);
            if let Some(target) = &t.target {
                writeln!(out, "# target {target}").unwrap();
            }
            if args.verify_ratio {
                if inst.len() < 64 && 1u64 << inst.len() <= BRUTE_FORCE_LIMIT {
                    let h = solver.brute_force_min_cover(inst, &params)?;
                    let bound = (Q::from_integer(1.into()) + ln_upper(&(Q::from_integer(1.into()) / params.alpha())))
                        * Q::from_integer(h.into());
                    let verdict = if Q::from_integer(t.k().into()) <= bound { "ok" } else { "VIOLATED" };
                    writeln!(out, "# H {h} k {} bound {} {verdict}", t.k(), to_decimal(&bound, 6)).unwrap();
                } else {
                    writeln!(out, "# H skipped: instance too large for brute force").unwrap();
                }
            }
        }
        (true, Objective::Cover(_)) => return Err(Error::Manifest("cover-max needs `k`".into())),
        (false, Objective::Budget(_)) => return Err(Error::Manifest("cover-set needs `alpha`".into())),
    }
    Ok(())
}

fn binomial_fits(m: usize, k: usize) -> bool {
    let mut acc: u128 = 1;
    for i in 0..k.min(m) {
        acc = acc * (m - i) as u128 / (i as u128 + 1);
    }
    acc <= BRUTE_FORCE_LIMIT as u128
}

fn reduce(args: &ReduceArgs, out: &mut String) -> Result<()> {
    let (n, sets) = match (&args.sets, &args.random) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            let inst: ClassicalInstance = serde_json::from_str(&text).map_err(|e| Error::Manifest(e.to_string()))?;
            (inst.n, inst.sets)
        }
        (None, Some(nm)) => (nm[0], random_classical(nm[0], nm[1], args.seed)),
        (None, None) => unreachable!("clap requires one source"),
    };
    let inst = reduce_classical(&sets, n)?;
    let k = args.k.unwrap_or(inst.len());
    let regions: Vec<serde_json::Value> = inst
        .regions()
        .iter()
        .map(|r| serde_json::json!({"name": r.name, "circuit": r.circuit.to_string()}))
        .collect();
    let manifest = serde_json::json!({"dim": 2, "mode": "volume", "regions": regions, "k": k});
    out.push_str(&serde_json::to_string_pretty(&manifest).expect("serializable"));
    out.push('\n');
    Ok(())
}
