//! Configuration-driven sweeps over point-set sizes, CSV output, plot
//! scripts and log-log slope fits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::exact::{decimal_string, sqrt_decimal, Rational};
use crate::kernels::{wce_squared_with, KernelId, Mode, WceOptions};
use crate::net::{net_points, sequence_to_net, GeneratorMatrixSet, PointSet};
use crate::pointsets::{apply_digital_shift, fibonacci_lattice, halton2d, random_shift, zaremba_shift};
use crate::quadrature::{integration_error, random_piecewise_linear_tensor, TestFunction};
use crate::tent::tent_pullback;
use crate::{Error, Result};

/// Header of the results CSV.
pub const CSV_HEADER: &str =
    "construction,transform,kernel_or_function,d,N,error,squared_error_num,squared_error_den,seconds";

/// Default cap on the number of points per cell.
pub const DEFAULT_MAX_POINTS: usize = 1 << 17;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Net,
    Fibonacci,
    Halton,
    Zaremba,
    HaltonShifted,
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "net" => Construction::Net,
            "fibonacci" => Construction::Fibonacci,
            "halton" => Construction::Halton,
            "zaremba" => Construction::Zaremba,
            "halton_shifted" => Construction::HaltonShifted,
            other => return Err(Error::Config(format!("unknown construction {other:?}"))),
        })
    }
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Net => "net",
            Construction::Fibonacci => "fibonacci",
            Construction::Halton => "halton",
            Construction::Zaremba => "zaremba",
            Construction::HaltonShifted => "halton_shifted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunctionKind {
    PiecewiseLinear,
    Bspline,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub construction: Construction,
    pub matrix_file: Option<PathBuf>,
    /// Interlacing factor applied to the matrices of `matrix_file`.
    pub alpha: usize,
    pub tent: bool,
    pub kernel: Option<KernelId>,
    pub test_function: Option<TestFunctionKind>,
    pub d: usize,
    /// Inclusive range of `n` (`N = 2^n`), or of `m` (`N = F_m`) for Fibonacci.
    pub range: (u32, u32),
    pub replicates: usize,
    pub seed: u64,
    pub precision_digits: u32,
    pub mode: Mode,
    /// Interior nodes of each random piecewise-linear factor.
    pub nodes: usize,
    /// Seed of the random test function.
    pub function_seed: u64,
    /// Inclusive `N` window of the slope fit.
    pub fit_window: Option<(usize, usize)>,
    pub timing: bool,
    pub threads: Option<usize>,
    pub max_points: usize,
}

const KEYS: &[&str] = &[
    "construction",
    "matrix_file",
    "alpha",
    "tent",
    "kernel",
    "test_function",
    "d",
    "n_min",
    "n_max",
    "m_min",
    "m_max",
    "replicates",
    "seed",
    "precision_digits",
    "mode",
    "nodes",
    "function_seed",
    "fit_min",
    "fit_max",
    "timing",
    "threads",
    "max_points",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid value {value:?} for {key}"))),
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key {key:?}", no + 1)));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", no + 1)));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let construction: Construction =
            get("construction").ok_or_else(|| Error::Config("missing construction".into()))?.parse()?;
        let test_function = match get("test_function").unwrap_or("none") {
            "none" => None,
            "pwlinear" => Some(TestFunctionKind::PiecewiseLinear),
            "bspline" => Some(TestFunctionKind::Bspline),
            other => return Err(Error::Config(format!("unknown test_function {other:?}"))),
        };
        // Without a test function the kernel defaults to K1.
        let kernel = match get("kernel") {
            None if test_function.is_none() => Some(KernelId::K1),
            None | Some("none") => None,
            Some(k) => Some(k.parse::<KernelId>().map_err(|e| Error::Config(e.to_string()))?),
        };
        if kernel.is_none() && test_function.is_none() {
            return Err(Error::Config("set a kernel or a test_function".into()));
        }
        let (lo_key, hi_key) =
            if construction == Construction::Fibonacci { ("m_min", "m_max") } else { ("n_min", "n_max") };
        let lo: u32 = parse_value(lo_key, get(lo_key).ok_or_else(|| Error::Config(format!("missing {lo_key}")))?)?;
        let hi: u32 = match get(hi_key) {
            Some(v) => parse_value(hi_key, v)?,
            None => lo,
        };
        if lo > hi {
            return Err(Error::Config(format!("{lo_key} = {lo} exceeds {hi_key} = {hi}")));
        }
        let opt = |k: &str| -> Result<Option<usize>> { get(k).map(|v| parse_value(k, v)).transpose() };
        let fit_window = match (opt("fit_min")?, opt("fit_max")?) {
            (None, None) => None,
            (a, b) => Some((a.unwrap_or(0), b.unwrap_or(usize::MAX))),
        };
        let seed: u64 = get("seed").map(|v| parse_value("seed", v)).transpose()?.unwrap_or(0);
        let cfg = Self {
            construction,
            matrix_file: get("matrix_file").map(PathBuf::from),
            alpha: opt("alpha")?.unwrap_or(1),
            tent: get("tent").map(|v| parse_bool("tent", v)).transpose()?.unwrap_or(false),
            kernel,
            test_function,
            d: opt("d")?.unwrap_or(2),
            range: (lo, hi),
            replicates: opt("replicates")?.unwrap_or(1),
            seed,
            precision_digits: get("precision_digits")
                .map(|v| parse_value("precision_digits", v))
                .transpose()?
                .unwrap_or(30),
            mode: get("mode")
                .map(|v| v.parse::<Mode>().map_err(|e| Error::Config(e.to_string())))
                .transpose()?
                .unwrap_or(Mode::Auto),
            nodes: opt("nodes")?.unwrap_or(3),
            function_seed: get("function_seed")
                .map(|v| parse_value("function_seed", v))
                .transpose()?
                .unwrap_or(seed),
            fit_window,
            timing: get("timing").map(|v| parse_bool("timing", v)).transpose()?.unwrap_or(false),
            threads: opt("threads")?,
            max_points: opt("max_points")?.unwrap_or(DEFAULT_MAX_POINTS),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative `matrix_file` is resolved against the
    /// directory of the config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(file), Some(dir)) = (&cfg.matrix_file, path.parent()) {
            if file.is_relative() {
                cfg.matrix_file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.alpha == 0 || self.replicates == 0 || self.precision_digits == 0 || self.d == 0 {
            return Err(Error::Config("alpha, replicates, precision_digits and d must be positive".into()));
        }
        match self.construction {
            Construction::Net => {
                if self.matrix_file.is_none() {
                    return Err(Error::Config("construction = net needs matrix_file".into()));
                }
            }
            _ if self.d != 2 => {
                return Err(Error::Config(format!(
                    "{} point sets are two-dimensional, got d = {}",
                    self.construction.name(),
                    self.d
                )))
            }
            _ => {}
        }
        if self.replicates > 1 && self.construction != Construction::HaltonShifted {
            return Err(Error::Config("replicates > 1 needs construction = halton_shifted".into()));
        }
        if self.range.0 == 0 {
            return Err(Error::Config("sizes start at 1".into()));
        }
        Ok(())
    }

    fn transform_label(&self) -> String {
        let mut parts = Vec::new();
        if self.construction == Construction::HaltonShifted {
            parts.push(format!("shift(seed={},R={})", self.seed, self.replicates));
        }
        if self.tent {
            parts.push("tent".to_string());
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }

    fn construction_label(&self) -> String {
        match self.construction {
            Construction::Net => format!("net(alpha={})", self.alpha),
            c => c.name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub construction: String,
    pub transform: String,
    pub kernel_or_function: String,
    pub d: usize,
    pub n: usize,
    /// Decimal error with `precision_digits` digits after the point.
    pub error: String,
    /// Exact (mean) squared worst-case error; absent for integration errors.
    pub squared_error: Option<Rational>,
    pub seconds: f64,
}

impl ExperimentRecord {
    pub fn error_f64(&self) -> f64 {
        self.error.parse().unwrap_or(f64::NAN)
    }

    fn csv_row(&self, timing: bool) -> String {
        let (num, den) = match &self.squared_error {
            Some(q) => (q.numer().to_string(), q.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let seconds = if timing { format!("{:.3}", self.seconds) } else { "0".into() };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.construction, self.transform, self.kernel_or_function, self.d, self.n, self.error, num, den, seconds
        )
    }
}

/// Least-squares line through `(log2 N, log2 error)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Smallest and largest `N` used.
    pub window: (usize, usize),
    pub points: usize,
}

/// Fits `log2(error) = intercept + slope * log2(N)`; `None` with fewer than
/// two usable points.
pub fn fit_slope(data: &[(usize, f64)]) -> Option<SlopeFit> {
    let pts: Vec<(usize, f64, f64)> = data
        .iter()
        .filter(|(n, e)| *n > 0 && *e > 0.0 && e.is_finite())
        .map(|&(n, e)| (n, (n as f64).log2(), e.log2()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.2).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.1 - mx) * (p.1 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.1 - mx) * (p.2 - my)).sum();
    let slope = sxy / sxx;
    let lo = pts.iter().map(|p| p.0).min().expect("nonempty");
    let hi = pts.iter().map(|p| p.0).max().expect("nonempty");
    Some(SlopeFit { slope, intercept: my - slope * mx, window: (lo, hi), points: pts.len() })
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub csv: String,
    /// One fit per kernel or test function label.
    pub fits: Vec<(String, SlopeFit)>,
}

impl ExperimentOutput {
    /// Gnuplot script plotting `csv_path` on log-log axes.
    pub fn gnuplot_script(&self, csv_path: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set logscale xy 2");
        let _ = writeln!(s, "set xlabel 'N'");
        let _ = writeln!(s, "set ylabel 'error'");
        let _ = writeln!(s, "set key top right");
        let labels: Vec<String> = self.fits_labels();
        let plots: Vec<String> = labels
            .iter()
            .map(|l| {
                format!(
                    "'{csv_path}' using 5:(strcol(3) eq '{l}' ? $6 : 1/0) every ::1 with linespoints title '{l}'"
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
        s
    }

    fn fits_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = Vec::new();
        for r in &self.records {
            if !labels.contains(&r.kernel_or_function) {
                labels.push(r.kernel_or_function.clone());
            }
        }
        labels
    }
}

/// Loads the matrices and builds the `2^n`-point net of `d` dimensions with
/// interlacing factor `alpha`.
fn net_for(g: &GeneratorMatrixSet, alpha: usize, d: usize, n: usize) -> Result<PointSet> {
    if n > g.digits() {
        return Err(Error::Config(format!("matrices have {} columns, n = {n} requested", g.digits())));
    }
    let wanted = alpha * d;
    if g.alpha() == alpha && g.dim() >= d {
        // The file already holds interlaced matrices.
        return net_points(&g.take_dims(d)?.leading(n)?);
    }
    if g.alpha() != 1 {
        return Err(Error::Config(format!(
            "matrix file has alpha = {}, config asks for {alpha}",
            g.alpha()
        )));
    }
    if g.dim() >= wanted {
        let base = g.take_dims(wanted)?.leading(n)?;
        return net_points(&base.interlace(alpha)?);
    }
    if g.dim() + 1 == wanted {
        // Sequence of `alpha d - 1` dimensions plus the coordinate k / 2^n.
        let seq = net_points(&g.leading(n)?)?;
        let full = sequence_to_net(&seq, n as u32)?;
        return crate::net::interlace(&full, alpha, n as u32);
    }
    Err(Error::Config(format!(
        "matrix file has {} dimensions, alpha * d = {wanted} needed",
        g.dim()
    )))
}

struct Cell {
    n: usize,
    /// One point set per replicate.
    sets: Vec<PointSet>,
}

fn build_cell(cfg: &ExperimentConfig, g: Option<&GeneratorMatrixSet>, size: u32) -> Result<Cell> {
    let count = match cfg.construction {
        Construction::Fibonacci => {
            if size > crate::pointsets::MAX_FIBONACCI_INDEX {
                return Err(Error::Config(format!("m = {size} is too large")));
            }
            crate::pointsets::fibonacci(size) as usize
        }
        _ => {
            if size as usize > crate::net::MAX_POINT_DIGITS {
                return Err(Error::BudgetExceeded(format!("2^{size} points")));
            }
            1usize << size
        }
    };
    if count > cfg.max_points {
        return Err(Error::BudgetExceeded(format!(
            "N = {count} exceeds max_points = {}",
            cfg.max_points
        )));
    }
    let base = match cfg.construction {
        Construction::Net => net_for(g.expect("loaded"), cfg.alpha, cfg.d, size as usize)?,
        Construction::Fibonacci => fibonacci_lattice(size)?,
        Construction::Halton | Construction::HaltonShifted => halton2d(size)?,
        Construction::Zaremba => zaremba_shift(&halton2d(size)?, size)?,
    };
    let sets = if cfg.construction == Construction::HaltonShifted {
        (0..cfg.replicates as u64)
            .map(|r| apply_digital_shift(&base, &random_shift(2, size, cfg.seed.wrapping_add(r))?))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![base]
    };
    let sets = if cfg.tent { sets.iter().map(tent_pullback).collect() } else { sets };
    Ok(Cell { n: count, sets })
}

fn mean(values: &[Rational]) -> Rational {
    let total: Rational = values.iter().cloned().sum();
    total / Rational::from_integer(BigInt::from(values.len()))
}

/// Runs the sweep. Cells run in order-preserving parallel; the records and
/// the CSV are identical for identical configs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let matrices = match (&cfg.construction, &cfg.matrix_file) {
        (Construction::Net, Some(path)) => Some(
            GeneratorMatrixSet::load(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        ),
        _ => None,
    };
    let function = match cfg.test_function {
        Some(TestFunctionKind::PiecewiseLinear) => {
            Some(random_piecewise_linear_tensor(cfg.d, cfg.nodes, cfg.function_seed)?)
        }
        Some(TestFunctionKind::Bspline) => Some(TestFunction::BsplineCutoutTensor { dim: cfg.d }),
        None => None,
    };
    let opts = WceOptions { mode: cfg.mode, threads: None, digits: cfg.precision_digits };
    let sizes: Vec<u32> = (cfg.range.0..=cfg.range.1).collect();

    let run = || -> Result<Vec<Vec<ExperimentRecord>>> {
        sizes
            .par_iter()
            .map(|&size| {
                let cell = build_cell(cfg, matrices.as_ref(), size)?;
                let mut out = Vec::new();
                let base = |label: String, error: String, squared: Option<Rational>, secs: f64| {
                    ExperimentRecord {
                        construction: cfg.construction_label(),
                        transform: cfg.transform_label(),
                        kernel_or_function: label,
                        d: cfg.d,
                        n: cell.n,
                        error,
                        squared_error: squared,
                        seconds: secs,
                    }
                };
                if let Some(id) = cfg.kernel {
                    let start = Instant::now();
                    let mut errors = Vec::new();
                    let mut squares = Vec::new();
                    for set in &cell.sets {
                        let r = wce_squared_with(id, set, &opts)?;
                        errors.push(sqrt_decimal(&r.squared_error, cfg.precision_digits)?);
                        squares.push(r.squared_error);
                    }
                    let error = decimal_string(&mean(&errors), cfg.precision_digits);
                    out.push(base(id.to_string(), error, Some(mean(&squares)), start.elapsed().as_secs_f64()));
                }
                if let Some(f) = &function {
                    let start = Instant::now();
                    let errors = cell
                        .sets
                        .iter()
                        .map(|set| integration_error(f, set))
                        .collect::<Result<Vec<_>>>()?;
                    let error = decimal_string(&mean(&errors), cfg.precision_digits);
                    out.push(base(f.label(), error, None, start.elapsed().as_secs_f64()));
                }
                Ok(out)
            })
            .collect()
    };
    let cells = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let records: Vec<ExperimentRecord> = cells.into_iter().flatten().collect();

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &records {
        csv.push_str(&r.csv_row(cfg.timing));
        csv.push('\n');
    }
    let mut fits = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    for r in &records {
        if !labels.contains(&r.kernel_or_function) {
            labels.push(r.kernel_or_function.clone());
        }
    }
    let (lo, hi) = cfg.fit_window.unwrap_or((0, usize::MAX));
    for label in labels {
        let data: Vec<(usize, f64)> = records
            .iter()
            .filter(|r| r.kernel_or_function == label && (lo..=hi).contains(&r.n))
            .map(|r| (r.n, r.error_f64()))
            .collect();
        if let Some(fit) = fit_slope(&data) {
            fits.push((label, fit));
        }
    }
    Ok(ExperimentOutput { records, csv, fits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_slope() {
        let data: Vec<(usize, f64)> = (4..12).map(|n| (1usize << n, 3.0 / ((1u64 << (2 * n)) as f64))).collect();
        let fit = fit_slope(&data).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12, "{}", fit.slope);
        assert_eq!(fit.window, (16, 2048));
        assert!(fit_slope(&data[..1]).is_none());
    }

    #[test]
    fn config_errors() {
        assert!(matches!(ExperimentConfig::parse("kernel = K1"), Err(Error::Config(_))));
        assert!(ExperimentConfig::parse("construction = halton\nn_min = 2\nbogus = 1").is_err());
        assert!(ExperimentConfig::parse("construction = halton\nn_min = 2\nkernel = none").is_err());
        assert!(ExperimentConfig::parse("construction = net\nn_min = 2").is_err());
        assert!(ExperimentConfig::parse("construction = halton\nn_min = 2\nn_min = 3").is_err());
        assert!(ExperimentConfig::parse("construction = halton\nn_min = 4\nn_max = 3").is_err());
        assert!(ExperimentConfig::parse("construction = zaremba\nn_min = 2\nd = 3").is_err());
    }

    #[test]
    fn config_defaults() {
        let c = ExperimentConfig::parse("# sweep\nconstruction = fibonacci\nm_min = 6 # first\nm_max = 9\n").unwrap();
        assert_eq!(c.range, (6, 9));
        assert_eq!(c.kernel, Some(KernelId::K1));
        assert_eq!(c.mode, Mode::Auto);
        assert!(!c.tent);
    }

    #[test]
    fn budget_refusal() {
        let c = ExperimentConfig::parse("construction = halton\nn_min = 5\nmax_points = 16").unwrap();
        assert!(matches!(run_experiment(&c), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn csv_layout() {
        let c = ExperimentConfig::parse("construction = halton\nn_min = 1\nn_max = 2\ntent = true\nkernel = K1\ntest_function = bspline").unwrap();
        let out = run_experiment(&c).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("halton,tent,K1,2,2,"));
        assert!(lines[2].starts_with("halton,tent,bspline,2,2,"));
        assert!(lines[2].ends_with(",,,0"));
        assert!(out.gnuplot_script("r.csv").contains("'r.csv' using 5"));
    }
}
