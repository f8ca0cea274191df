//! `cellfps`: point-cloud downsampling, Chamfer metrics, cropping,
//! normalization and sampling benchmarks from the command line.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use cellfps::bench::{format_summary, run_sampling_bench, summarize, emit_report, DEFAULT_SIZES, MIN_REPEATS};
use cellfps::dataio::{
    crop_missing, format_cloud, format_transform, infer_format, parse_transform, read_cloud, Format,
};
use cellfps::sampling::cell_sample;
use cellfps::{cell_ifps, chamfer, ifps, normalize, CellIfpsConfig, Point3, PointCloud, RemovalMode};
use clap::{Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

#[derive(Parser)]
#[command(name = "cellfps", version, about = "Uniform point-cloud downsampling and completion metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Downsample a point cloud.
    Sample(SampleArgs),
    /// Print pred->gt, gt->pred and Chamfer distance, one per line.
    Metrics(MetricsArgs),
    /// Split a cloud into a partial scan and the missing region nearest a point.
    Crop(CropArgs),
    /// Time IFPS against Cell-IFPS on the two-stage pipeline.
    Bench(BenchArgs),
    /// Center a cloud on its centroid and scale it into the unit sphere.
    Normalize(NormalizeArgs),
    /// Undo `normalize` using its recorded transform.
    Denormalize(DenormalizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Ifps,
    Cell,
    #[value(name = "cell_ifps", alias = "cell-ifps")]
    CellIfps,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Xyz,
    Ply,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Self {
        match f {
            FileFormat::Xyz => Format::Xyz,
            FileFormat::Ply => Format::PlyAscii,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Removal {
    Literal,
    KeepFps,
}

#[derive(clap::Args)]
struct SampleArgs {
    /// Input cloud (.xyz or .ply).
    #[arg(long, short)]
    input: PathBuf,
    /// Where to write the selected points.
    #[arg(long, short)]
    output: PathBuf,
    /// Sampling method.
    #[arg(long, short, value_enum)]
    algorithm: Algorithm,
    /// Number of samples (ifps, cell_ifps).
    #[arg(long, short)]
    n: Option<usize>,
    /// Sphere radius; the cell edge is 2r/sqrt(3) (cell).
    #[arg(long, short)]
    radius: Option<f64>,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output format; inferred from the output extension if omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
    /// What cell_ifps does with surplus cells.
    #[arg(long, value_enum, default_value = "literal")]
    removal: Removal,
    /// Upper bound on cell_ifps edge-search passes.
    #[arg(long, default_value_t = 8)]
    max_resize_rounds: usize,
}

#[derive(clap::Args)]
struct MetricsArgs {
    /// Predicted cloud.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth cloud.
    #[arg(long)]
    gt: PathBuf,
}

#[derive(clap::Args)]
struct CropArgs {
    /// Complete input cloud.
    #[arg(long, short)]
    input: PathBuf,
    /// Destination of the kept points.
    #[arg(long)]
    out_partial: PathBuf,
    /// Destination of the removed points.
    #[arg(long)]
    out_missing: PathBuf,
    /// Crop center, x coordinate.
    #[arg(long, allow_negative_numbers = true)]
    cx: f64,
    /// Crop center, y coordinate.
    #[arg(long, allow_negative_numbers = true)]
    cy: f64,
    /// Crop center, z coordinate.
    #[arg(long, allow_negative_numbers = true)]
    cz: f64,
    /// Share of points removed, in (0, 1).
    #[arg(long, default_value_t = 0.25)]
    fraction: f64,
    /// Output format; inferred from each output extension if omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(clap::Args)]
struct BenchArgs {
    /// Comma-separated input sizes.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES)]
    sizes: Vec<usize>,
    /// Timed runs per size and algorithm (at least 3).
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Seed for cloud generation and sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV report destination.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct NormalizeArgs {
    /// Input cloud.
    #[arg(long, short)]
    input: PathBuf,
    /// Output cloud.
    #[arg(long, short)]
    output: PathBuf,
    /// Where to record the translation and scale.
    #[arg(long)]
    transform_out: PathBuf,
    /// Output format; inferred from the output extension if omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

#[derive(clap::Args)]
struct DenormalizeArgs {
    /// Input cloud.
    #[arg(long, short)]
    input: PathBuf,
    /// Output cloud.
    #[arg(long, short)]
    output: PathBuf,
    /// Transform record written by `normalize`.
    #[arg(long)]
    transform: PathBuf,
    /// Output format; inferred from the output extension if omitted.
    #[arg(long, value_enum)]
    format: Option<FileFormat>,
}

fn load(path: &Path) -> Result<PointCloud> {
    read_cloud(path, Format::from_path(path)).with_context(|| format!("reading {}", path.display()))
}

/// A file written next to its destination and moved into place on commit,
/// so a failed run never leaves a partial file behind.
struct Pending {
    file: NamedTempFile,
    dest: PathBuf,
}

fn stage(dest: &Path, contents: &str) -> Result<Pending> {
    let dir = match dest.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut file = NamedTempFile::new_in(dir).with_context(|| format!("creating {}", dest.display()))?;
    file.write_all(contents.as_bytes())
        .and_then(|()| file.as_file().sync_all())
        .with_context(|| format!("writing {}", dest.display()))?;
    Ok(Pending {
        file,
        dest: dest.to_path_buf(),
    })
}

fn commit(pending: Vec<Pending>) -> Result<()> {
    let mut done: Vec<PathBuf> = Vec::new();
    for p in pending {
        if let Err(e) = p.file.persist(&p.dest) {
            for path in &done {
                let _ = fs::remove_file(path);
            }
            return Err(e.error).with_context(|| format!("writing {}", p.dest.display()));
        }
        done.push(p.dest);
    }
    Ok(())
}

fn stage_cloud(cloud: &PointCloud, dest: &Path, format: Option<FileFormat>) -> Result<Pending> {
    stage(dest, &format_cloud(cloud, infer_format(dest, format.map(Format::from)))?)
}

fn sample(args: SampleArgs) -> Result<()> {
    let cloud = load(&args.input)?;
    let started = Instant::now();
    let selection = match args.algorithm {
        Algorithm::Ifps | Algorithm::CellIfps => {
            let Some(n) = args.n else {
                bail!("--n is required for this algorithm");
            };
            if let Algorithm::Ifps = args.algorithm {
                ifps(&cloud, n, args.seed)?
            } else {
                let config = CellIfpsConfig {
                    removal: match args.removal {
                        Removal::Literal => RemovalMode::Literal,
                        Removal::KeepFps => RemovalMode::KeepFps,
                    },
                    max_resize_rounds: args.max_resize_rounds,
                    ..CellIfpsConfig::with_seed(args.seed)
                };
                cell_ifps(&cloud, n, &config)?
            }
        }
        Algorithm::Cell => {
            let Some(radius) = args.radius else {
                bail!("--radius is required for the cell algorithm");
            };
            cell_sample(&cloud, radius)?
        }
    };
    let elapsed = started.elapsed();
    let out = cloud.select(&selection);
    commit(vec![stage_cloud(&out, &args.output, args.format)?])?;
    eprintln!(
        "selected {} of {} points in {:.3} ms",
        out.len(),
        cloud.len(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(())
}

fn metrics(args: MetricsArgs) -> Result<()> {
    let report = chamfer(&load(&args.pred)?, &load(&args.gt)?)?;
    for value in [report.pred_to_gt, report.gt_to_pred, report.chamfer] {
        println!("{}", significant(value, 12));
    }
    Ok(())
}

/// Plain decimal rendering of `value` with `digits` significant digits.
fn significant(value: f64, digits: i32) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

fn crop(args: CropArgs) -> Result<()> {
    let cloud = load(&args.input)?;
    let pair = crop_missing(&cloud, Point3::new(args.cx, args.cy, args.cz), args.fraction)?;
    commit(vec![
        stage_cloud(&pair.partial, &args.out_partial, args.format)?,
        stage_cloud(&pair.missing, &args.out_missing, args.format)?,
    ])?;
    eprintln!("partial {} points, missing {} points", pair.partial.len(), pair.missing.len());
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    if args.repeats < MIN_REPEATS {
        bail!("--repeats must be at least {MIN_REPEATS}");
    }
    let records = run_sampling_bench(&args.sizes, args.repeats, args.seed)?;
    let dir = tempfile::tempdir_in(args.out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new(".")))
        .with_context(|| format!("writing {}", args.out.display()))?;
    let scratch = dir.path().join("report.csv");
    emit_report(&records, &scratch)?;
    fs::rename(&scratch, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    print!("{}", format_summary(&summarize(&records)));
    Ok(())
}

fn normalize_cmd(args: NormalizeArgs) -> Result<()> {
    let cloud = load(&args.input)?;
    let (unit, transform) = normalize(&cloud)?;
    commit(vec![
        stage_cloud(&unit, &args.output, args.format)?,
        stage(&args.transform_out, &format_transform(&transform))?,
    ])
}

fn denormalize(args: DenormalizeArgs) -> Result<()> {
    let cloud = load(&args.input)?;
    let text = fs::read_to_string(&args.transform).with_context(|| format!("reading {}", args.transform.display()))?;
    let transform = parse_transform(&text, &args.transform)?;
    let restored = transform.apply_inverse(&cloud)?;
    commit(vec![stage_cloud(&restored, &args.output, args.format)?])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Metrics(a) => metrics(a),
        Command::Crop(a) => crop(a),
        Command::Bench(a) => bench(a),
        Command::Normalize(a) => normalize_cmd(a),
        Command::Denormalize(a) => denormalize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
