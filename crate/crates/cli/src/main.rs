use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use gmtlab::caratheodory::{
    approx_measure_ladder, exact_measure_ladder, resolve_sample_count, CoverConfig, CoverStrategy,
    CoverTarget, MeasureLadder, SizeFunction,
};
use gmtlab::density::{centered_density, federer_density, MeasureRep, SearchBudget};
use gmtlab::experiments::{self, ExperimentConfig, ExperimentKind, Report};
use gmtlab::heisenberg::{
    alpha_beta, cc_origin_distance, koranyi_distance, unit_ball_profile, HCurve, HMetric, HPoint,
    DEFAULT_CC_TOL,
};
use gmtlab::metric::{FiniteSpace, MetricSpace, Point, SampledCurve, SetRep};

#[derive(Parser)]
#[command(
    name = "gmtlab",
    version,
    about = "Measure construction by coverings, densities, and first Heisenberg group geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a measure by ball covers along a shrinking delta ladder
    MeasureEstimate(MeasureEstimateArgs),
    /// Estimate a density of a measure at a point
    Density(DensityArgs),
    /// First Heisenberg group utilities
    Heisenberg {
        #[command(subcommand)]
        action: HeisenbergAction,
    },
    /// Run one experiment and emit its report
    Run(RunArgs),
    /// Run the full experiment suite
    All(AllArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    GreedyNet,
    ArcAdvance,
}

impl From<StrategyArg> for CoverStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => CoverStrategy::Auto,
            StrategyArg::GreedyNet => CoverStrategy::GreedyNet,
            StrategyArg::ArcAdvance => CoverStrategy::ArcAdvance,
        }
    }
}

#[derive(Args)]
struct MeasureEstimateArgs {
    /// euclidean:<dim>, koranyi, cc, or finite:<path.json>
    #[arg(long)]
    space: String,
    /// Target set as JSON (prefix with @ to read from a file); curve targets
    /// are resampled as needed for the finest delta
    #[arg(long)]
    target: String,
    /// Size of a set is c * diam^alpha over all closed sets
    #[arg(long, conflicts_with = "spherical")]
    hausdorff: bool,
    /// Size of a ball is c * (2r)^alpha, closed balls only
    #[arg(long)]
    spherical: bool,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Defaults to 1 for --hausdorff and 1/4 for --spherical
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated strictly decreasing deltas
    #[arg(long)]
    delta_ladder: String,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Federer,
    Centered,
}

#[derive(Args)]
struct DensityArgs {
    /// euclidean:<dim>, koranyi, cc, or finite:<path.json>
    #[arg(long)]
    space: String,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Measure as JSON (prefix with @ to read from a file)
    #[arg(long)]
    measure: String,
    /// Comma-separated coordinates, or label:<name> in a finite space
    #[arg(long)]
    point: String,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Spherical size constant for federer mode (default 1/4)
    #[arg(long)]
    c: Option<f64>,
    /// Comma-separated strictly decreasing scales
    #[arg(long)]
    ladder: String,
    /// Search budget overrides as JSON, e.g. {"radius_grid": 32}
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Koranyi,
    Cc,
}

impl From<MetricArg> for HMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Koranyi => HMetric::Koranyi,
            MetricArg::Cc => HMetric::Cc,
        }
    }
}

#[derive(Subcommand)]
enum HeisenbergAction {
    /// Distance between two group points
    Distance {
        #[arg(long, value_enum)]
        metric: MetricArg,
        /// x,y,t
        #[arg(long)]
        from: String,
        /// x,y,t
        #[arg(long)]
        to: String,
    },
    /// Unit ball vertical chord endpoints per planar radius, as CSV
    Profile {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, default_value_t = 96)]
        radial: usize,
        #[arg(long, default_value_t = 384)]
        t_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chord constants of the unit ball, as JSON
    AlphaBeta {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long, default_value_t = 96)]
        radial: usize,
        #[arg(long, default_value_t = 384)]
        t_samples: usize,
    },
    /// Intrinsic measure of a group curve supplied as JSON
    CurveMeasure {
        /// {"vertical_segment": {...}} or {"sampled": {...}} (@file supported)
        #[arg(long)]
        curve: String,
        /// Restrict to a parameter interval a,b
        #[arg(long)]
        interval: Option<String>,
        /// Also report parameter intervals where |v| exceeds this threshold
        #[arg(long)]
        threshold: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// One of the experiment names (see `gmtlab all --help`)
    experiment: String,
    /// Full experiment configuration as JSON (@file supported)
    #[arg(long)]
    config: Option<String>,
    /// Overrides the seed from the config
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the checks as a flat CSV table
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AllArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for per-experiment reports and summary.json
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-experiment CSV tables (requires --out)
    #[arg(long)]
    csv: bool,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::MeasureEstimate(args) => measure_estimate(args),
        Command::Density(args) => density(args),
        Command::Heisenberg { action } => heisenberg(action),
        Command::Run(args) => run_one(args),
        Command::All(args) => run_suite(args),
    }
}

fn json_text(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_space(s: &str) -> Result<MetricSpace> {
    if let Some(dim) = s.strip_prefix("euclidean:") {
        let dim: usize = dim.parse().context("euclidean dimension")?;
        return Ok(MetricSpace::euclidean(dim)?);
    }
    if let Some(path) = s.strip_prefix("finite:") {
        return Ok(MetricSpace::finite(FiniteSpace::from_json_file(Path::new(path))?));
    }
    match s {
        "koranyi" => Ok(MetricSpace::koranyi()),
        "cc" => Ok(MetricSpace::cc_heisenberg()),
        _ => bail!("space must be euclidean:<dim>, koranyi, cc, or finite:<path>"),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("parsing '{p}' as a number")))
        .collect()
}

fn parse_point(space: &MetricSpace, s: &str) -> Result<Point> {
    if let Some(name) = s.strip_prefix("label:") {
        let f = space.as_finite().context("label points need a finite space")?;
        let idx = f.label_index(name).with_context(|| format!("unknown label '{name}'"))?;
        return Ok(Point::Label(idx));
    }
    Ok(Point::Coords(parse_floats(s)?))
}

fn emit(text: String, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn measure_estimate(args: MeasureEstimateArgs) -> Result<ExitCode> {
    let space = parse_space(&args.space)?;
    let z = if args.spherical {
        SizeFunction::spherical(args.alpha, args.c.unwrap_or(0.25))?
    } else if args.hausdorff {
        SizeFunction::hausdorff(args.alpha, args.c.unwrap_or(1.0))?
    } else {
        bail!("pick a size function: --hausdorff or --spherical");
    };
    let deltas = parse_floats(&args.delta_ladder)?;
    let text = json_text(&args.target)?;
    let target = match serde_json::from_str::<SetRep>(&text) {
        Ok(set) => CoverTarget::Set(set),
        Err(set_err) => serde_json::from_str::<CoverTarget>(&text)
            .map_err(|_| set_err)
            .context("parsing --target as a set")?,
    };
    // raise curve sampling to what the finest delta needs
    let target = match target {
        CoverTarget::Set(SetRep::CurveSegment { curve, interval, samples }) => {
            let finest = deltas.iter().copied().fold(f64::INFINITY, f64::min);
            let needed = resolve_sample_count(&space, &curve, interval, finest, 1 << 20)?;
            CoverTarget::Set(SetRep::curve_segment(curve, interval, samples.max(needed))?)
        }
        other => other,
    };
    let ladder = match space.as_finite() {
        Some(fs) => finite_exact_ladder(fs, &target, &z, &deltas)?,
        None => {
            let config = CoverConfig { strategy: args.strategy.into(), ..CoverConfig::default() };
            approx_measure_ladder(&space, &target, &z, &deltas, &config)?
        }
    };
    emit(pretty(&ladder)?, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

/// Finite spaces are solved exactly over every nonempty subset, so the space
/// must stay small enough to enumerate.
const MAX_EXACT_POINTS: usize = 12;

fn finite_exact_ladder(
    fs: &FiniteSpace,
    target: &CoverTarget,
    z: &SizeFunction,
    deltas: &[f64],
) -> Result<MeasureLadder> {
    let labels: Vec<usize> = match target {
        CoverTarget::Empty => Vec::new(),
        CoverTarget::Set(SetRep::Cloud(points)) => points
            .iter()
            .map(|p| p.as_label())
            .collect::<gmtlab::Result<_>>()
            .context("finite-space targets are clouds of label points")?,
        CoverTarget::Set(_) => bail!("finite-space targets must be point clouds"),
    };
    let n = fs.len();
    if n > MAX_EXACT_POINTS {
        bail!("exact solves enumerate all subsets; {n} points exceeds the cap of {MAX_EXACT_POINTS}");
    }
    let candidates: Vec<Vec<usize>> = (1usize..1 << n)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    Ok(exact_measure_ladder(fs, &labels, &candidates, z, deltas)?)
}

fn density(args: DensityArgs) -> Result<ExitCode> {
    let space = parse_space(&args.space)?;
    let mu: MeasureRep = serde_json::from_str(&json_text(&args.measure)?)
        .context("parsing --measure as a measure")?;
    let point = parse_point(&space, &args.point)?;
    let ladder = parse_floats(&args.ladder)?;
    let budget: SearchBudget = match &args.budget {
        Some(text) => serde_json::from_str(&json_text(text)?).context("parsing --budget")?,
        None => SearchBudget::default(),
    };
    let estimate = match args.mode {
        ModeArg::Federer => {
            let z = SizeFunction::spherical(args.alpha, args.c.unwrap_or(0.25))?;
            federer_density(&space, &mu, &z, &point, &ladder, &budget)?
        }
        ModeArg::Centered => {
            centered_density(&space, &mu, &point, args.alpha, &ladder, budget.trend_tol)?
        }
    };
    emit(pretty(&estimate)?, args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum CurveSpec {
    VerticalSegment {
        t0: f64,
        t1: f64,
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
    Sampled {
        nodes: Vec<f64>,
        positions: Vec<Vec<f64>>,
        derivatives: Vec<Vec<f64>>,
    },
}

fn default_nodes() -> usize {
    129
}

impl CurveSpec {
    fn build(self) -> Result<HCurve> {
        match self {
            CurveSpec::VerticalSegment { t0, t1, nodes } => {
                Ok(HCurve::vertical_segment(t0, t1, nodes)?)
            }
            CurveSpec::Sampled { nodes, positions, derivatives } => {
                let curve = SampledCurve::new(nodes, positions, derivatives)?;
                Ok(HCurve::from_curve(Arc::new(curve))?)
            }
        }
    }
}

fn heisenberg(action: HeisenbergAction) -> Result<ExitCode> {
    match action {
        HeisenbergAction::Distance { metric, from, to } => {
            let a = parse_floats(&from)?;
            let b = parse_floats(&to)?;
            if a.len() != 3 || b.len() != 3 {
                bail!("points need exactly three coordinates x,y,t");
            }
            let p = HPoint::new(a[0], a[1], a[2]);
            let q = HPoint::new(b[0], b[1], b[2]);
            let value = match HMetric::from(metric) {
                HMetric::Koranyi => serde_json::json!({
                    "metric": "koranyi",
                    "distance": koranyi_distance(&p, &q),
                }),
                HMetric::Cc => {
                    let w = p.inverse().mul(&q);
                    let solve = cc_origin_distance(w.planar_radius(), w.t, DEFAULT_CC_TOL);
                    serde_json::json!({
                        "metric": "cc",
                        "distance": solve.distance,
                        "phase": solve.phase,
                        "residual": solve.residual,
                    })
                }
            };
            print!("{}", pretty(&value)?);
        }
        HeisenbergAction::Profile { metric, radial, t_samples, out } => {
            let profile = unit_ball_profile(metric.into(), radial, t_samples)?;
            let mut csv = String::from("planar_radius,chord_lo,chord_hi\n");
            for (r, chord) in profile.radii.iter().zip(&profile.chords) {
                csv.push_str(&format!("{},{},{}\n", r, -0.5 * chord, 0.5 * chord));
            }
            emit(csv, out.as_ref())?;
        }
        HeisenbergAction::AlphaBeta { metric, radial, t_samples } => {
            let profile = unit_ball_profile(metric.into(), radial, t_samples)?;
            let constants = alpha_beta(&profile)?;
            print!("{}", pretty(&constants)?);
        }
        HeisenbergAction::CurveMeasure { curve, interval, threshold } => {
            let spec: CurveSpec =
                serde_json::from_str(&json_text(&curve)?).context("parsing --curve")?;
            let hcurve = spec.build()?;
            let domain = hcurve.domain();
            let range = match interval {
                Some(s) => {
                    let v = parse_floats(&s)?;
                    if v.len() != 2 {
                        bail!("--interval needs two numbers a,b");
                    }
                    [v[0], v[1]]
                }
                None => domain,
            };
            let mut value = serde_json::json!({
                "domain": domain,
                "interval": range,
                "measure": hcurve.intrinsic_measure(range)?,
            });
            if let Some(th) = threshold {
                let intervals = hcurve.nonhorizontal_set(th, 4097)?;
                value["nonhorizontal_intervals"] = serde_json::json!(intervals);
            }
            print!("{}", pretty(&value)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_one(args: RunArgs) -> Result<ExitCode> {
    let kind = ExperimentKind::parse(&args.experiment)?;
    let mut config = match &args.config {
        Some(text) => {
            let cfg: ExperimentConfig = serde_json::from_str(&json_text(text)?)
                .context("parsing --config")?;
            if cfg.experiment != kind {
                bail!(
                    "config describes '{}' but the command names '{}'",
                    cfg.experiment.name(),
                    kind.name()
                );
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = experiments::run(&config);
    if let Some(path) = &args.csv {
        fs::write(path, report.csv_rows()).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(report.to_json(), args.out.as_ref())?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_suite(args: AllArgs) -> Result<ExitCode> {
    if args.csv && args.out.is_none() {
        bail!("--csv needs --out to know where to write");
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let reports = experiments::run_all(args.seed);
    let mut all_passed = true;
    for report in &reports {
        all_passed &= report.passed;
        println!(
            "{:<24} {}  ({} ms)",
            report.experiment,
            if report.passed { "PASS" } else { "FAIL" },
            report.wall_clock_ms
        );
        if let Some(dir) = &args.out {
            let path = dir.join(format!("{}.json", report.experiment));
            fs::write(&path, report.to_json())
                .with_context(|| format!("writing {}", path.display()))?;
            if args.csv {
                let path = dir.join(format!("{}.csv", report.experiment));
                fs::write(&path, report.csv_rows())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    if let Some(dir) = &args.out {
        let summary = suite_summary(args.seed, &reports);
        let path = dir.join("summary.json");
        fs::write(&path, pretty(&summary)?).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{}",
        if all_passed {
            "all experiments passed".to_string()
        } else {
            let failed = reports.iter().filter(|r| !r.passed).count();
            format!("{failed} experiment(s) failed")
        }
    );
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn suite_summary(seed: u64, reports: &[Report]) -> serde_json::Value {
    serde_json::json!({
        "schema_version": experiments::SCHEMA_VERSION,
        "seed": seed,
        "passed": reports.iter().all(|r| r.passed),
        "experiments": reports.iter().map(|r| serde_json::json!({
            "experiment": r.experiment,
            "passed": r.passed,
            "wall_clock_ms": r.wall_clock_ms,
        })).collect::<Vec<_>>(),
    })
}
