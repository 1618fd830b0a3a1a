use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tentqmc::exact::{format_fraction, sqrt_to_digits};
use tentqmc::experiment::{run_experiment, ExperimentConfig};
use tentqmc::faber::{analyze, besov_1inf_norm, dyadic_h2_norm, LevelReport, NonPeriodic, Periodic};
use tentqmc::kernels::{wce_squared_with, KernelId, Mode, WceOptions};
use tentqmc::net::{minimal_t_with_budget, net_points, DEFAULT_T_BUDGET};
use tentqmc::pointsets::{apply_digital_shift, fibonacci_lattice, halton2d, random_shift, zaremba_shift};
use tentqmc::quadrature::{bspline_cutout, random_piecewise_linear_tensor};
use tentqmc::tent::{tent_coefficient_map, tent_compose, tent_pullback};
use tentqmc::{Error, GeneratorMatrixSet, PointSet, Rational};

#[derive(Parser)]
#[command(name = "tentqmc", version, about = "Digital nets, tent transforms and exact QMC worst-case errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a point set as CSV with exact fractions.
    GenPoints {
        #[command(flatten)]
        points: PointArgs,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the quality parameter t of a set of generator matrices.
    TParam {
        /// Generator-matrix file.
        #[arg(long)]
        matrix_file: PathBuf,
        /// Use only the first d matrices.
        #[arg(long)]
        d: Option<usize>,
        /// Use only the leading n columns.
        #[arg(long)]
        n: Option<usize>,
        /// Interlace the (order 1) matrices with this factor first.
        #[arg(long, default_value_t = 1)]
        alpha: usize,
        /// Search nodes before refusing.
        #[arg(long, default_value_t = DEFAULT_T_BUDGET)]
        budget: u64,
    },
    /// Squared and plain worst-case error of a point set.
    Wce {
        #[command(flatten)]
        points: PointArgs,
        /// Read the points from a CSV file written by gen-points instead.
        #[arg(long, conflicts_with = "construction")]
        points_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = KernelArg::K1)]
        kernel: KernelArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Decimal digits of the reported error.
        #[arg(long, default_value_t = 30)]
        digits: u32,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Faber-Schauder coefficients and dyadic norms of a test function.
    Faber {
        #[arg(long, value_enum, default_value_t = FunctionArg::Square)]
        function: FunctionArg,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Highest level analyzed.
        #[arg(long, default_value_t = 6)]
        level: i32,
        /// Analyze f composed with the tent map on the torus, via the
        /// coefficient map.
        #[arg(long)]
        tent: bool,
        /// Interior nodes of the random piecewise-linear function.
        #[arg(long, default_value_t = 3)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the coefficient table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sweep described by a key = value config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Directory for results.csv and plot.gp; CSV to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, value_enum)]
    construction: Option<ConstructionArg>,
    /// Digits n (N = 2^n), or the Fibonacci index m.
    #[arg(long)]
    n: Option<u32>,
    /// Generator-matrix file for --construction net.
    #[arg(long)]
    matrix_file: Option<PathBuf>,
    /// Interlacing factor for --construction net.
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    /// Dimension for --construction net.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Seed of --construction shifted.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Apply the tent transform.
    #[arg(long)]
    tent: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Net,
    Fibonacci,
    Halton,
    Zaremba,
    Shifted,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    K1,
    K2,
    K3,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Fixed60,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionArg {
    /// prod x_i^2
    Square,
    /// prod x_i^2 (1 - x_i)^2
    Bump,
    /// Quadratic B-spline cutout.
    Bspline,
    /// Random piecewise-linear tensor product.
    Pwlinear,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn build_points(a: &PointArgs) -> tentqmc::Result<PointSet> {
    let c = a.construction.ok_or_else(|| config_err("--construction is required"))?;
    let n = a.n.ok_or_else(|| config_err("--n is required"))?;
    let p = match c {
        ConstructionArg::Fibonacci => fibonacci_lattice(n)?,
        ConstructionArg::Halton => halton2d(n)?,
        ConstructionArg::Zaremba => zaremba_shift(&halton2d(n)?, n)?,
        ConstructionArg::Shifted => apply_digital_shift(&halton2d(n)?, &random_shift(2, n, a.seed)?)?,
        ConstructionArg::Net => {
            let path = a.matrix_file.as_ref().ok_or_else(|| config_err("--matrix-file is required"))?;
            let g = GeneratorMatrixSet::load(path)?;
            let n = n as usize;
            let g = if a.alpha > 1 {
                g.take_dims(a.alpha * a.d)?.leading(n)?.interlace(a.alpha)?
            } else {
                g.take_dims(a.d)?.leading(n)?
            };
            net_points(&g)?
        }
    };
    Ok(if a.tent { tent_pullback(&p) } else { p })
}

fn print_report(name: &str, r: &LevelReport) {
    println!("{name} (levels up to {}):", r.max_level);
    for (j, v) in &r.levels {
        println!("  j={j:?} {}", format_fraction(v));
    }
    println!("  sup {} at j={:?}", format_fraction(&r.sup), r.argmax);
}

fn run(cli: Cli) -> tentqmc::Result<()> {
    match cli.command {
        Command::GenPoints { points, out } => {
            let csv = build_points(&points)?.to_csv();
            match out {
                Some(path) => fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Command::TParam { matrix_file, d, n, alpha, budget } => {
            let mut g = GeneratorMatrixSet::load(&matrix_file)?;
            if let Some(n) = n {
                g = g.leading(n)?;
            }
            if alpha > 1 {
                let dims = d.map(|d| d * alpha).unwrap_or(g.dim() - g.dim() % alpha);
                g = g.take_dims(dims)?.interlace(alpha)?;
            } else if let Some(d) = d {
                g = g.take_dims(d)?;
            }
            let t = minimal_t_with_budget(&g, budget)?;
            println!("d={} n={} alpha={} t={t}", g.dim(), g.digits(), g.alpha());
        }
        Command::Wce { points, points_file, kernel, mode, digits, threads } => {
            let p = match points_file {
                Some(path) => {
                    let text = fs::read_to_string(&path)?;
                    let p = PointSet::from_csv(&text, path.display().to_string())?;
                    if points.tent { tent_pullback(&p) } else { p }
                }
                None => build_points(&points)?,
            };
            let id = match kernel {
                KernelArg::K1 => KernelId::K1,
                KernelArg::K2 => KernelId::K2,
                KernelArg::K3 => KernelId::K3,
            };
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Fixed60 => Mode::Fixed60,
                ModeArg::Auto => Mode::Auto,
            };
            let r = wce_squared_with(id, &p, &WceOptions { mode, threads, digits })?;
            println!("points {} N={} d={}", p.label(), r.n, r.d);
            println!("kernel {} mode {}", r.kernel, r.mode);
            println!("squared_error {}", format_fraction(&r.squared_error));
            println!("error {}", r.error_digits);
        }
        Command::Faber { function, d, level, tent, nodes, seed, out } => {
            let pw = match function {
                FunctionArg::Pwlinear => Some(random_piecewise_linear_tensor(d, nodes, seed)?),
                _ => None,
            };
            let f = |x: &[Rational]| -> tentqmc::Result<Rational> {
                let one = Rational::from_integer(1.into());
                match function {
                    FunctionArg::Square => Ok(x.iter().fold(one, |acc, xi| acc * xi * xi)),
                    FunctionArg::Bump => Ok(x.iter().fold(one.clone(), |acc, xi| {
                        let w = xi * (&one - xi);
                        acc * &w * &w
                    })),
                    FunctionArg::Bspline => {
                        x.iter().try_fold(one, |acc, xi| Ok(acc * bspline_cutout(xi)?))
                    }
                    FunctionArg::Pwlinear => pw.as_ref().expect("drawn above").eval(x),
                }
            };
            let c = analyze::<NonPeriodic, _>(f, d, level)?;
            if tent {
                let r = tent_coefficient_map(&c, level)?;
                let direct = analyze::<Periodic, _>(tent_compose(f), d, level + 1)?;
                if direct != r {
                    return Err(Error::Invariant("coefficient map disagrees with direct analysis".into()));
                }
                println!("tent coefficient map verified against direct analysis");
                print_report("dyadic H2 (squared)", &dyadic_h2_norm(&r));
                print_report("B11inf", &besov_1inf_norm(&r));
                if let Some(path) = out {
                    fs::write(path, r.to_csv())?;
                }
            } else {
                print_report("dyadic H2 (squared)", &dyadic_h2_norm(&c));
                println!("  sqrt(sup) {}", sqrt_to_digits(&dyadic_h2_norm(&c).sup, 12)?);
                print_report("B11inf", &besov_1inf_norm(&c));
                if let Some(path) = out {
                    fs::write(path, c.to_csv())?;
                }
            }
        }
        Command::Experiment { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let result = run_experiment(&cfg)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join("results.csv"), &result.csv)?;
                    fs::write(dir.join("plot.gp"), result.gnuplot_script("results.csv"))?;
                    println!("wrote {} records to {}", result.records.len(), dir.display());
                }
                None => print!("{}", result.csv),
            }
            for (label, fit) in &result.fits {
                eprintln!(
                    "slope {label}: {:.4} over N in [{}, {}] ({} points)",
                    fit.slope, fit.window.0, fit.window.1, fit.points
                );
            }
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded(_) => 3,
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::Parse { .. }
        | Error::MalformedMatrix(_)
        | Error::OutOfRange(_)
        | Error::DimensionMismatch { .. }
        | Error::LengthMismatch { .. }
        | Error::NonDyadic(_)
        | Error::NegativeInput(_)
        | Error::EmptyPointSet
        | Error::InvalidIndex { .. }
        | Error::IncompleteCoefficients { .. }
        | Error::NoClosedFormIntegral
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
