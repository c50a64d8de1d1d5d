use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hypercech::complexes::{cech_filtration, check_inclusions, vr_filtration, FilteredComplex, Schedule};
use hypercech::extremal::{extremal_minorant, half_max_start, is_extremal, sweep_order, RadiusFunction};
use hypercech::persistence::compute_persistence;
use hypercech::profile::{curvature_profile, write_profile_csv_path, write_profile_svg_path};
use hypercech::rho::{expansion_constant_estimate, rho_triple};
use hypercech::spaces::descriptor::SpaceDescriptor;
use hypercech::spaces::metric::validate_metric;
use hypercech::triples::default_bins;
use hypercech::{Error, Result, Space, WitnessMode};

const EXTREMAL_TOL: f64 = 1e-10;

/// Ball-intersection curvature, Čech / Vietoris-Rips persistence and
/// curvature profiles of a metric space given as a JSON descriptor.
#[derive(Parser, Debug)]
#[command(name = "hypercech", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Space descriptor (JSON).
    #[arg(long, short)]
    input: PathBuf,
    /// Where witnesses may lie [default: ambient, or intrinsic-sample for finite metrics]
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Ambient,
    IntrinsicSample,
}

impl From<Mode> for WitnessMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ambient => WitnessMode::Ambient,
            Mode::IntrinsicSample => WitnessMode::IntrinsicSample,
        }
    }
}

#[derive(Args, Debug)]
struct ComplexArgs {
    /// Highest simplex dimension built (1 to 5).
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=5))]
    dim_cap: u8,
    /// Filtration cutoff [default: diameter / smallest weight]
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlavorArg {
    Cech,
    Vr,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Uniform,
    Weighted,
}

#[derive(Clone, Debug)]
enum Start {
    HalfMax,
    Constant(f64),
}

fn parse_start(s: &str) -> std::result::Result<Start, String> {
    if s == "half-max" {
        return Ok(Start::HalfMax);
    }
    match s.strip_prefix("constant:").map(str::parse::<f64>) {
        Some(Ok(c)) if c.is_finite() && c >= 0.0 => Ok(Start::Constant(c)),
        _ => Err("expected half-max or constant:C with C >= 0".into()),
    }
}

fn parse_triple(s: &str) -> std::result::Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| e.to_string())?;
    <[usize; 3]>::try_from(parts).map_err(|_| "expected three indices i,j,k".to_string())
}

fn parse_weights(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err("expected a positive number".into()),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the metric axioms on the descriptor's distance matrix.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// ρ of one triple, with its witness and Gromov radii.
    Rho {
        #[command(flatten)]
        common: Common,
        /// Point indices `i,j,k`.
        #[arg(long, value_parser = parse_triple)]
        triple: [usize; 3],
    },
    /// (r, ρ) profile over sampled triples; summary JSON on stdout.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Triples evaluated; every triple when there are at most this many.
        #[arg(long, default_value_t = 10_000)]
        n_triples: usize,
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Profile CSV.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Profile scatter plot (SVG).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Barcode of a Čech or Vietoris-Rips filtration. The barcode CSV goes to
    /// --output, or to stdout when it is absent.
    Persist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        complex: ComplexArgs,
        /// Čech nerve or Vietoris-Rips flag complex.
        #[arg(long, value_enum, default_value_t = FlavorArg::Cech)]
        flavor: FlavorArg,
        /// Radii `t · w_i`: unit weights, or weights from --weights, or else
        /// the extremal radii reached from the half-max start.
        #[arg(long, value_enum, default_value_t = ScheduleArg::Uniform)]
        schedule: ScheduleArg,
        /// Comma-separated positive weights, one per point.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<::std::vec::Vec<f64>>,
        /// Highest homology dimension reported.
        #[arg(long, default_value_t = 1)]
        max_dim: usize,
        /// Barcode CSV; a JSON summary then goes to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Sampled lower bound for the expansion constant.
    Expansion {
        #[command(flatten)]
        common: Common,
        /// Largest tuple size sampled.
        #[arg(long, default_value_t = 4)]
        arity: usize,
        /// Number of tuples sampled.
        #[arg(long, default_value_t = 1000)]
        tuples: usize,
        /// Sampling seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extremal radius function below a starting admissible one.
    Extremal {
        #[command(flatten)]
        common: Common,
        /// `half-max` or `constant:C`.
        #[arg(long, value_parser = parse_start, default_value = "half-max")]
        start: Start,
        /// Convergence and extremality tolerance.
        #[arg(long, default_value = "1e-10")]
        tol: f64,
        /// Shuffle the sweep order with this seed; index order if absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check Rips births ≤ Čech births ≤ μ · Rips births.
    Inclusions {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        complex: ComplexArgs,
        /// Expansion factor μ.
        #[arg(long, value_parser = positive)]
        mu: f64,
        /// Additive slack on the comparisons.
        #[arg(long, default_value = "1e-9")]
        tol: f64,
    },
}

fn load(common: &Common) -> Result<(Space, WitnessMode)> {
    let desc = SpaceDescriptor::from_path(&common.input)?;
    let space = Space::from_descriptor(&desc)?;
    let mode = common.mode.map_or_else(|| space.default_mode(), WitnessMode::from);
    Ok((space, mode))
}

fn emit(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out).map_err(|e| Error::io("<stdout>", e))
}

fn all_points(space: &Space) -> Vec<usize> {
    (0..space.len()).collect()
}

fn schedule(space: &Space, points: &[usize], kind: ScheduleArg, weights: Option<Vec<f64>>) -> Result<Schedule> {
    match (kind, weights) {
        (ScheduleArg::Uniform, _) => Ok(Schedule::Uniform),
        (ScheduleArg::Weighted, Some(w)) => Ok(Schedule::Weighted(RadiusFunction::new(points.to_vec(), w)?)),
        (ScheduleArg::Weighted, None) => {
            let start = half_max_start(space, points)?;
            let order: Vec<usize> = (0..points.len()).collect();
            Ok(Schedule::Weighted(extremal_minorant(
                space,
                &start,
                &order,
                EXTREMAL_TOL,
            )?))
        }
    }
}

fn filtration(
    space: &Space,
    mode: WitnessMode,
    complex: &ComplexArgs,
    flavor: FlavorArg,
    sched: &Schedule,
) -> Result<FilteredComplex> {
    let points = all_points(space);
    let cap = usize::from(complex.dim_cap);
    match flavor {
        FlavorArg::Cech => cech_filtration(space, &points, sched, mode, cap, complex.t_max),
        FlavorArg::Vr => vr_filtration(space, &points, sched, cap, complex.t_max),
    }
}

fn validate(common: &Common) -> Result<()> {
    let desc = SpaceDescriptor::from_path(&common.input)?;
    let matrix = match &desc {
        SpaceDescriptor::Finite { matrix } => matrix.clone(),
        _ => {
            let space = Space::from_descriptor(&desc)?;
            let n = space.len();
            let mut m = vec![vec![0.0; n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = space.distance(i, j)?;
                }
            }
            m
        }
    };
    let report = validate_metric(&matrix)?;
    emit(&json!({
        "points": matrix.len(),
        "valid": report.is_ok(),
        "violations": report.violations,
    }))?;
    if report.is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidMetric(report.violations))
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Validate { common } => validate(&common),
        Command::Rho { common, triple } => {
            let (space, mode) = load(&common)?;
            let r = rho_triple(&space, triple, mode)?;
            let mut v = r.to_json(&space);
            v["triple"] = json!(triple);
            v["mode"] = json!(mode);
            emit(&v)
        }
        Command::Profile {
            common,
            n_triples,
            seed,
            output,
            svg,
        } => {
            let (space, mode) = load(&common)?;
            let bins = default_bins();
            let p = curvature_profile(&space, &all_points(&space), &bins, n_triples, mode, seed)?;
            if let Some(path) = &output {
                write_profile_csv_path(&p.records, path)?;
            }
            if let Some(path) = &svg {
                write_profile_svg_path(&p.records, &bins, path)?;
            }
            emit(&json!({
                "examined": p.examined,
                "exhaustive": p.exhaustive,
                "records": p.records.len(),
                "bins": bins.iter().zip(p.bin_counts()).map(|(b, c)| json!({
                    "center": b.center,
                    "half_width": b.half_width,
                    "count": c,
                })).collect::<Vec<_>>(),
                "degenerate": p.degenerate,
                "mode": mode,
            }))
        }
        Command::Persist {
            common,
            complex,
            flavor,
            schedule: kind,
            weights,
            max_dim,
            output,
        } => {
            let (space, mode) = load(&common)?;
            let sched = schedule(&space, &all_points(&space), kind, weights)?;
            let f = filtration(&space, mode, &complex, flavor, &sched)?;
            let bars = compute_persistence(&f, max_dim)?;
            match &output {
                Some(path) => {
                    bars.write_csv_path(path)?;
                    emit(&json!({
                        "simplices": f.len(),
                        "t_max": f.t_max,
                        "bars": bars.pairs.len(),
                        "max_dim": bars.max_dim,
                        "weights": weights_json(&sched, &space),
                    }))
                }
                None => bars.write_csv(std::io::stdout().lock()),
            }
        }
        Command::Expansion {
            common,
            arity,
            tuples,
            seed,
        } => {
            let (space, mode) = load(&common)?;
            let e = expansion_constant_estimate(&space, &all_points(&space), arity, tuples, seed, mode)?;
            emit(&serde_json::to_value(e)?)
        }
        Command::Extremal {
            common,
            start,
            tol,
            seed,
        } => {
            let (space, _) = load(&common)?;
            let points = all_points(&space);
            let r0 = match start {
                Start::HalfMax => half_max_start(&space, &points)?,
                Start::Constant(c) => RadiusFunction::new(points.clone(), vec![c; points.len()])?,
            };
            let r = extremal_minorant(&space, &r0, &sweep_order(points.len(), seed), tol)?;
            emit(&json!({
                "start": r0,
                "radii": r,
                "extremal": is_extremal(&space, &r, tol)?,
            }))
        }
        Command::Inclusions {
            common,
            complex,
            mu,
            tol,
        } => {
            let (space, mode) = load(&common)?;
            let sched = Schedule::Uniform;
            let cech = filtration(&space, mode, &complex, FlavorArg::Cech, &sched)?;
            let vr = filtration(&space, mode, &complex, FlavorArg::Vr, &sched)?;
            let report = check_inclusions(&cech, &vr, mu, tol, None)?;
            let mut v = serde_json::to_value(&report)?;
            v["ok"] = json!(report.ok());
            emit(&v)
        }
    }
}

fn weights_json(sched: &Schedule, space: &Space) -> Value {
    match sched {
        Schedule::Uniform => json!(vec![1.0; space.len()]),
        Schedule::Weighted(r) => json!(r.values()),
    }
}

/// Prints clap's message followed by the usage line of the subcommand named
/// on the command line, if any.
fn usage_error(e: clap::Error) -> ! {
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        e.exit();
    }
    let _ = e.print();
    if !e.to_string().contains("Usage:") {
        let mut cmd = Cli::command();
        cmd.build();
        let name = std::env::args().nth(1).unwrap_or_default();
        let usage = match cmd.find_subcommand_mut(&name) {
            Some(sub) => sub.render_usage(),
            None => cmd.render_usage(),
        };
        eprintln!("\n{usage}");
    }
    std::process::exit(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => usage_error(e),
    };
    if let Command::Persist {
        schedule: ScheduleArg::Uniform,
        weights: Some(_),
        ..
    } = &cli.command
    {
        Cli::command()
            .error(ErrorKind::ArgumentConflict, "--weights needs --schedule weighted")
            .exit();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
