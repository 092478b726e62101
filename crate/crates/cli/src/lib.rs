//! Command-line front end: reads point clouds or distance tables, builds
//! cluster hierarchies, exports layer posets and runs the stability checks.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 violations.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use riplayer_core::hierarchy::SegmentForest;
use riplayer_core::layers::{layers_dot, layers_json};
use riplayer_core::metric::io::{parse_distance_matrix, parse_points_csv, PointCloud};
use riplayer_core::metric::{Inclusion, MetricKind, MetricSpace, DEFAULT_TUPLE_BUDGET};
use riplayer_core::stability::{check_all, make_pair, PairOptions};

pub mod generate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "riplayer",
    version,
    about = "Degree-Rips cluster hierarchies, layer points and stability checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the hierarchy of X and export it.
    Build(SpaceArgs),
    /// Export the layer and branch points of X.
    Layers(SpaceArgs),
    /// Check the stability claims for an inclusion X ⊂ Y.
    Stability(StabilityArgs),
    /// Run the invariant suite on seeded random instances.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl From<Metric> for MetricKind {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Euclidean => MetricKind::Euclidean,
            Metric::Manhattan => MetricKind::Manhattan,
            Metric::Chebyshev => MetricKind::Chebyshev,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct XInput {
    /// CSV point cloud for X.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Lower-triangular distance table for X.
    #[arg(long)]
    pub dist_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Density parameter: minimum number of neighbours of a vertex.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    pub metric: Metric,
    /// Merge events closer than this into one scale.
    #[arg(long, default_value_t = 0.0)]
    pub snap_eps: f64,
    /// Merge duplicate points instead of rejecting them.
    #[arg(long)]
    pub dedup: bool,
    /// Write the artifact here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub x: XInput,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub x: XInput,
    /// CSV point cloud for Y.
    #[arg(
        long,
        conflicts_with = "dist_matrix_y",
        required_unless_present = "dist_matrix_y"
    )]
    pub points_y: Option<PathBuf>,
    /// Lower-triangular distance table for Y.
    #[arg(long)]
    pub dist_matrix_y: Option<PathBuf>,
    /// Whitespace-separated Y index of every X point, in X order.
    #[arg(long)]
    pub index_map: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    /// Interleaving radius; must exceed the Hausdorff distance.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
    pub tuple_budget: u64,
    /// Only check the theta window for Y layer points with s > r.
    #[arg(long)]
    pub strict_l16: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_TUPLE_BUDGET)]
    pub tuple_budget: u64,
    #[arg(long)]
    pub strict_l16: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed run: exit code and message for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn invalid(message: impl fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }
}

/// The artifact a successful command produced and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub artifact: String,
}

type Run = Result<Outcome, Failure>;

/// Parses `args` (including the program name) and runs the command,
/// writing the artifact to `out` (or the `--output` file) and diagnostics
/// to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let target = match &cli.command {
        Command::Build(a) | Command::Layers(a) => a.common.output.clone(),
        Command::Stability(a) => a.common.output.clone(),
        Command::Generate(a) => a.output.clone(),
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(&a),
        Command::Layers(a) => cmd_layers(&a),
        Command::Stability(a) => cmd_stability(&a),
        Command::Generate(a) => cmd_generate(&a),
    };
    match result {
        Ok(outcome) => {
            let written = match target {
                Some(path) => std::fs::write(&path, &outcome.artifact)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out
                    .write_all(outcome.artifact.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INVALID
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_cloud(path: &Path, dedup: bool) -> Result<PointCloud, Failure> {
    let mut cloud = parse_points_csv(&read(path)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    if dedup {
        let mut keep = Vec::new();
        for (i, p) in cloud.points.iter().enumerate() {
            if !cloud.points[..i].contains(p) {
                keep.push(i);
            }
        }
        cloud = PointCloud {
            labels: keep.iter().map(|&i| cloud.labels[i].clone()).collect(),
            points: keep.iter().map(|&i| cloud.points[i].clone()).collect(),
        };
    }
    Ok(cloud)
}

/// A loaded space together with its coordinates when it came from points.
struct Loaded {
    space: MetricSpace,
    coords: Option<Vec<Vec<f64>>>,
}

fn load(points: Option<&Path>, matrix: Option<&Path>, common: &Common) -> Result<Loaded, Failure> {
    match (points, matrix) {
        (Some(path), None) => {
            let cloud = load_cloud(path, common.dedup)?;
            let coords = cloud.points.clone();
            let space = cloud
                .into_space(common.metric.into(), false)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            Ok(Loaded {
                space,
                coords: Some(coords),
            })
        }
        (None, Some(path)) => {
            let space = parse_distance_matrix(&read(path)?)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            Ok(Loaded {
                space,
                coords: None,
            })
        }
        _ => Err(Failure::usage("give exactly one input per space")),
    }
}

fn check_snap(eps: f64) -> Result<(), Failure> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Failure::usage("--snap-eps must be a non-negative number"))
    }
}

fn load_x(x: &XInput, common: &Common) -> Result<Loaded, Failure> {
    check_snap(common.snap_eps)?;
    let loaded = load(x.points.as_deref(), x.dist_matrix.as_deref(), common)?;
    if loaded.space.is_empty() {
        return Err(Failure::invalid("input has no points"));
    }
    Ok(loaded)
}

fn forest_of(space: &MetricSpace, common: &Common) -> SegmentForest {
    let grid = riplayer_core::filtration::ParameterGrid::snapped(space, common.snap_eps);
    SegmentForest::build_on_grid(space, common.k, grid)
}

pub fn cmd_build(args: &SpaceArgs) -> Run {
    let x = load_x(&args.x, &args.common)?;
    let forest = forest_of(&x.space, &args.common);
    let artifact = match args.format {
        Format::Json => forest.to_json() + "\n",
        Format::Dot => layers_dot(&forest),
        Format::Md => return Err(Failure::usage("build emits json or dot")),
    };
    Ok(Outcome {
        code: EXIT_OK,
        artifact,
    })
}

pub fn cmd_layers(args: &SpaceArgs) -> Run {
    let x = load_x(&args.x, &args.common)?;
    let forest = forest_of(&x.space, &args.common);
    let artifact = match args.format {
        Format::Json => layers_json(&forest) + "\n",
        Format::Dot => layers_dot(&forest),
        Format::Md => return Err(Failure::usage("layers emits json or dot")),
    };
    Ok(Outcome {
        code: EXIT_OK,
        artifact,
    })
}

fn parse_index_map(text: &str, len: usize) -> Result<Vec<usize>, Failure> {
    let map: Vec<usize> = text
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Failure::invalid(format!("index map: bad entry {t:?}")))
        })
        .collect::<Result<_, _>>()?;
    if map.len() != len {
        return Err(Failure::invalid(format!(
            "index map has {} entries for {len} points of X",
            map.len()
        )));
    }
    Ok(map)
}

/// The Y index of every X point by exact coordinate equality.
fn match_coordinates(x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<Vec<usize>, Failure> {
    x.iter()
        .enumerate()
        .map(|(i, p)| {
            y.iter().position(|q| q == p).ok_or_else(|| {
                Failure::invalid(format!("point {i} of X {p:?} does not occur in Y"))
            })
        })
        .collect()
}

pub fn cmd_stability(args: &StabilityArgs) -> Run {
    if let Some(r) = args.r {
        if !(r.is_finite() && r > 0.0) {
            return Err(Failure::usage("--r must be a positive number"));
        }
    }
    if args.format == Format::Dot {
        return Err(Failure::usage("stability emits json or md"));
    }
    let x = load_x(&args.x, &args.common)?;
    let y = load(
        args.points_y.as_deref(),
        args.dist_matrix_y.as_deref(),
        &args.common,
    )?;
    let embed = match (&args.index_map, &x.coords, &y.coords) {
        (Some(path), _, _) => parse_index_map(&read(path)?, x.space.len())?,
        (None, Some(xc), Some(yc)) => match_coordinates(xc, yc)?,
        _ => return Err(Failure::invalid("distance-table inputs need --index-map")),
    };
    let inclusion = Inclusion::new(x.space, y.space, embed)
        .map_err(|e| Failure::invalid(format!("X is not a subspace of Y: {e}")))?;
    let options = PairOptions {
        r: args.r,
        snap_eps: args.common.snap_eps,
        tuple_budget: args.tuple_budget,
        strict_l16: args.strict_l16,
    };
    let pair = make_pair(inclusion, args.common.k, options).map_err(Failure::invalid)?;
    let report = check_all(&pair);
    let artifact = match args.format {
        Format::Md => report.to_markdown(),
        _ => report.to_json() + "\n",
    };
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    };
    Ok(Outcome { code, artifact })
}

pub fn cmd_generate(args: &GenerateArgs) -> Run {
    if args.format == Format::Dot {
        return Err(Failure::usage("generate emits json or md"));
    }
    let threads = std::env::var("RIPLAYER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let corpus = generate::run_corpus(
        args.seed,
        args.trials,
        args.tuple_budget,
        args.strict_l16,
        threads,
    );
    let artifact = match args.format {
        Format::Md => corpus.to_markdown(),
        _ => corpus.to_json() + "\n",
    };
    let code = if corpus.robust_violations == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATIONS
    };
    Ok(Outcome { code, artifact })
}
