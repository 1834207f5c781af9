use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use planeseg::bench::{format_bench_csv, format_bench_table, prepare_suite, run_bench, voxel_reduce, BenchConfig, BenchRecord, Method, Sampler};
use planeseg::classify::{classify_cloud, inject_labels};
use planeseg::config::parse_vector;
use planeseg::io::{
    furthest_point_indices, read_cloud, read_planes, read_ply, write_cloud, write_planes, CloudFormat, PlaneRecord,
};
use planeseg::metrics::{evaluate_scene, format_csv, format_table, EvalReport, Segmentation};
use planeseg::ransac::{ransac_segment, RansacConfig};
use planeseg::segmenter::{segment_traced, LabelSource, SegmentationResult};
use planeseg::synth::{
    add_noise, gen_box, gen_eval_suite, gen_plane, gen_staircase, read_ground_truth, write_ground_truth,
    GroundTruthScene, DEFAULT_DENSITY,
};
use planeseg::{Category, LabeledCloud, Point3, SegmenterConfig, Vector3};

#[derive(Parser)]
#[command(name = "planeseg", version, about = "Planar region extraction from point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every point as horizontal (h) or vertical (v) leaning.
    Classify(ClassifyArgs),
    /// Extract planes from a cloud.
    Segment(SegmentArgs),
    /// Generate a synthetic scene with ground truth.
    Synth(SynthArgs),
    /// Score segmentations against ground truth.
    Eval(EvalArgs),
    /// Time a method over a suite of scenes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` segmenter configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Neighborhood size for normal estimation.
    #[arg(long)]
    k: Option<usize>,
    /// Gravity direction, e.g. `0,0,1`.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    gravity: Option<Vector3>,
}

impl ConfigArgs {
    fn load(&self) -> Result<SegmenterConfig> {
        let mut cfg = match &self.config {
            Some(path) => SegmenterConfig::load(path)?,
            None => SegmenterConfig::default(),
        };
        if let Some(k) = self.k {
            cfg.classify_k = k;
        }
        if let Some(g) = self.gravity {
            cfg.gravity = g.try_normalize(0.0).ok_or_else(|| anyhow!("gravity must be nonzero"))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ours,
    Ransac,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BenchMethodArg {
    Ours,
    Ransac,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    None,
    Fps,
    Voxel,
}

#[derive(Clone, Debug, PartialEq)]
enum Labels {
    Geometric,
    Uniform,
    /// Categories stored in the input PLY.
    Provided,
    File(PathBuf),
}

fn parse_labels(s: &str) -> std::result::Result<Labels, String> {
    match s {
        "geometric" => Ok(Labels::Geometric),
        "uniform" => Ok(Labels::Uniform),
        "provided" => Ok(Labels::Provided),
        _ => match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(Labels::File(PathBuf::from(p))),
            _ => Err(format!("expected geometric, uniform, provided or file:<path>, got `{s}`")),
        },
    }
}

#[derive(Args)]
struct SegmentArgs {
    #[arg(long)]
    input: PathBuf,
    /// Colored PLY with a plane id per point; plane summaries go to
    /// `<output>.planes.txt`.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Ours)]
    method: MethodArg,
    /// Point categories: geometric, uniform, provided or file:<path>.
    #[arg(long, value_parser = parse_labels, default_value = "geometric")]
    labels: Labels,
    /// RANSAC inlier threshold, m.
    #[arg(long, default_value_t = 0.01)]
    theta_pf: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Octree min corner `x,y,z`; defaults to centering on the bounding box.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    origin: Option<Vector3>,
    #[arg(long, value_enum, default_value_t = SamplerArg::None)]
    sampler: SamplerArg,
    /// Point count for the fps sampler.
    #[arg(long)]
    points: Option<usize>,
    /// Print per-stage times in ms.
    #[arg(long)]
    timings: bool,
    /// Write one line per occupied octree node.
    #[arg(long)]
    dump_octree: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Shape {
    Staircase,
    Box,
    Plane,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene PLY; ground truth goes to `<output>.gt`. With `--suite` this is
    /// a directory.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Shape::Staircase)]
    shape: Shape,
    /// Write the n-scene evaluation suite instead of a single shape.
    #[arg(long)]
    suite: Option<usize>,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    #[arg(long, default_value_t = 0.3)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 0.2)]
    height: f64,
    /// z component of the plane normal for `--shape plane`.
    #[arg(long, default_value_t = 1.0)]
    nz: f64,
    /// Points per square meter.
    #[arg(long, default_value_t = DEFAULT_DENSITY)]
    density: f64,
    /// Gaussian noise standard deviation, cm.
    #[arg(long, default_value_t = 0.0)]
    noise_cm: f64,
    #[arg(long, value_enum, default_value_t = SamplerArg::None)]
    sampler: SamplerArg,
    #[arg(long)]
    points: Option<usize>,
    /// Voxel size for the voxel sampler, m.
    #[arg(long, default_value_t = 0.02)]
    voxel: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write ascii instead of binary PLY.
    #[arg(long)]
    ascii: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Segmented PLY written by `segment`; repeat for a suite.
    #[arg(long, required = true)]
    result: Vec<PathBuf>,
    /// Ground-truth sidecar, one per `--result`.
    #[arg(long, required = true)]
    gt: Vec<PathBuf>,
    /// Column name in the table.
    #[arg(long, default_value = "ours")]
    name: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of scene PLYs with `.gt` sidecars. Without it the synthetic
    /// evaluation suite is generated.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Size of the generated suite.
    #[arg(long, default_value_t = 100)]
    suite: usize,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = BenchMethodArg::Both)]
    method: BenchMethodArg,
    #[arg(long, value_parser = parse_labels, default_value = "geometric")]
    labels: Labels,
    #[arg(long, default_value_t = 0.01)]
    theta_pf: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    noise_cm: f64,
    /// fps samples each scene once up front; voxel downsampling is timed.
    #[arg(long, value_enum, default_value_t = SamplerArg::Fps)]
    sampler: SamplerArg,
    #[arg(long, default_value_t = 8192)]
    points: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Print per-stage times.
    #[arg(long)]
    timings: bool,
    /// Per-scene records, one file per method: `<csv>` gets a `.<method>`
    /// infix before the extension.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Classify(a) => classify(a),
        Command::Segment(a) => segment(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("PLANESEG_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow!("PLANESEG_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn is_ply(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ply"))
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let cloud = read_cloud(&a.input, CloudFormat::from_path(&a.input)).with_context(|| format!("reading {}", a.input.display()))?;
    let labeled = classify_cloud(&cloud, &cfg)?;
    let labels = labeled.labels().unwrap_or_default();
    let h = labels.iter().filter(|&&c| c == Category::H).count();
    write_cloud(&labeled, None, &a.output, CloudFormat::from_path(&a.output))?;
    println!("{} points: {} h, {} v", labeled.len(), h, labeled.len() - h);
    Ok(())
}

/// Reads per-point categories from a PLY `category` property or from a text
/// file with one `h`/`v` (or `0`/`1`) per line.
fn read_labels(path: &Path) -> Result<Vec<Category>> {
    if is_ply(path) {
        let data = read_ply(path)?;
        return data
            .cloud
            .labels()
            .map(<[Category]>::to_vec)
            .ok_or_else(|| anyhow!("{} has no category property", path.display()));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| match l.trim() {
            "h" | "H" | "0" => Ok(Category::H),
            "v" | "V" | "1" => Ok(Category::V),
            other => bail!("{} line {}: bad category `{other}`", path.display(), i + 1),
        })
        .collect()
}

fn reduce(cloud: LabeledCloud, sampler: SamplerArg, points: Option<usize>, voxel: f64, seed: u64) -> Result<LabeledCloud> {
    Ok(match sampler {
        SamplerArg::None => cloud,
        SamplerArg::Fps => {
            let n = points.ok_or_else(|| anyhow!("--sampler fps needs --points"))?;
            cloud.select(&furthest_point_indices(cloud.points(), n, seed)?)
        }
        SamplerArg::Voxel => planeseg::io::voxel_downsample(&cloud, voxel)?,
    })
}

fn segment(a: SegmentArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let input = read_cloud(&a.input, CloudFormat::from_path(&a.input)).with_context(|| format!("reading {}", a.input.display()))?;

    let start = Instant::now();
    let cloud = reduce(input, a.sampler, a.points, cfg.voxel_size, a.seed)?;
    let t_d = start.elapsed();

    let mut result: SegmentationResult = match a.method {
        MethodArg::Ransac => {
            if a.dump_octree.is_some() {
                bail!("--dump-octree needs --method ours");
            }
            let rc = RansacConfig {
                theta_pf: a.theta_pf,
                seed: a.seed,
                ..Default::default()
            };
            ransac_segment(&cloud, &rc)?
        }
        MethodArg::Ours => {
            let start = Instant::now();
            let labeled = match &a.labels {
                Labels::Geometric => classify_cloud(&cloud, &cfg)?,
                Labels::Uniform => cloud.clone().with_uniform_labels(Category::H),
                Labels::Provided => {
                    if cloud.labels().is_none() {
                        bail!("{} has no category property", a.input.display());
                    }
                    cloud.clone()
                }
                Labels::File(path) => {
                    if a.sampler != SamplerArg::None {
                        bail!("--labels file:<path> cannot be combined with a sampler");
                    }
                    inject_labels(&cloud, read_labels(path)?)?
                }
            };
            let t_c = start.elapsed();
            let origin = a.origin.map(Point3::from);
            let (mut r, trace) = segment_traced(&labeled, &cfg, origin)?;
            if let Some(path) = &a.dump_octree {
                std::fs::write(path, trace.tree.dump()).with_context(|| format!("writing {}", path.display()))?;
            }
            r.timings.classify = t_c;
            r
        }
    };
    result.timings.downsample = t_d;

    write_cloud(&cloud, Some(&result.assignment), &a.output, CloudFormat::from_path(&a.output))?;
    let records: Vec<PlaneRecord> = result.planes.iter().map(PlaneRecord::from).collect();
    write_planes(&records, &with_suffix(&a.output, ".planes.txt"))?;

    println!(
        "{} planes, {} of {} points assigned",
        result.planes.len(),
        result.assigned_count(),
        cloud.len()
    );
    if a.timings {
        let t = &result.timings;
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1000.0;
        println!(
            "t_d {:.3} ms  t_c {:.3} ms  t_b {:.3} ms  t_s {:.3} ms  total {:.3} ms",
            ms(t.downsample),
            ms(t.classify),
            ms(t.build),
            ms(t.traverse),
            ms(t.total())
        );
    }
    Ok(())
}

fn sample_scene(scene: GroundTruthScene, a: &SynthArgs, seed: u64) -> Result<GroundTruthScene> {
    let sampled = match a.sampler {
        SamplerArg::None => scene,
        SamplerArg::Fps => {
            let n = a.points.ok_or_else(|| anyhow!("--sampler fps needs --points"))?;
            scene.select(&furthest_point_indices(scene.cloud.points(), n, seed)?)
        }
        SamplerArg::Voxel => voxel_reduce(&scene, a.voxel)?,
    };
    Ok(add_noise(&sampled, a.noise_cm / 100.0, seed.rotate_left(32))?)
}

fn write_scene(scene: &GroundTruthScene, path: &Path, ascii: bool) -> Result<()> {
    let format = if ascii { CloudFormat::PlyAscii } else { CloudFormat::PlyBinaryLe };
    write_cloud(&scene.cloud, None, path, format)?;
    write_ground_truth(scene, &with_suffix(path, ".gt"))?;
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    if !(a.noise_cm.is_finite() && a.noise_cm >= 0.0) {
        bail!("--noise-cm must be non-negative");
    }
    if let Some(n) = a.suite {
        std::fs::create_dir_all(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
        let scenes = gen_eval_suite(n, a.seed)?;
        for (i, scene) in scenes.into_iter().enumerate() {
            let scene = sample_scene(scene, &a, a.seed.wrapping_add(i as u64))?;
            write_scene(&scene, &a.output.join(format!("scene_{i:03}.ply")), a.ascii)?;
        }
        println!("wrote {n} scenes to {}", a.output.display());
        return Ok(());
    }
    let scene = match a.shape {
        Shape::Staircase => gen_staircase(a.steps, a.length, a.width, a.height, a.density, a.seed)?,
        Shape::Box => gen_box(a.length, a.width, a.height, a.density, a.seed)?,
        Shape::Plane => gen_plane(a.length, a.width, a.nz, a.density, a.seed)?,
    };
    let scene = sample_scene(scene, &a, a.seed)?;
    write_scene(&scene, &a.output, a.ascii)?;
    println!("{} points, {} planes", scene.cloud.len(), scene.plane_count());
    Ok(())
}

fn load_scene(cloud_path: &Path, gt_path: &Path) -> Result<GroundTruthScene> {
    let cloud = read_cloud(cloud_path, CloudFormat::from_path(cloud_path))
        .with_context(|| format!("reading {}", cloud_path.display()))?;
    let gt = read_ground_truth(gt_path).with_context(|| format!("reading {}", gt_path.display()))?;
    Ok(gt.into_scene(cloud)?)
}

fn eval(a: EvalArgs) -> Result<()> {
    if a.result.len() != a.gt.len() {
        bail!("got {} --result files but {} --gt files", a.result.len(), a.gt.len());
    }
    let mut metrics = Vec::with_capacity(a.result.len());
    for (result, gt) in a.result.iter().zip(&a.gt) {
        let data = read_ply(result).with_context(|| format!("reading {}", result.display()))?;
        let assignment = data
            .plane_ids
            .ok_or_else(|| anyhow!("{} has no plane_id property", result.display()))?;
        let planes_path = with_suffix(result, ".planes.txt");
        let planes = read_planes(&planes_path).with_context(|| format!("reading {}", planes_path.display()))?;
        let seg = Segmentation::new(planes.iter().map(|p| p.normal).collect(), assignment)?;
        let truth = read_ground_truth(gt).with_context(|| format!("reading {}", gt.display()))?;
        let scene = truth.into_scene(data.cloud)?;
        metrics.push(evaluate_scene(&seg, &scene).with_context(|| format!("evaluating {}", result.display()))?);
    }
    let report = EvalReport::from_scenes(metrics)?;
    print!("{}", format_table(&[(a.name.as_str(), &report)]));
    if let Some(path) = &a.csv {
        std::fs::write(path, format_csv(&[(a.name.as_str(), &report)])).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn load_suite_dir(dir: &Path) -> Result<(Vec<GroundTruthScene>, Vec<String>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_ply(p))
        .collect();
    paths.sort();
    let mut scenes = Vec::new();
    let mut errors = Vec::new();
    for p in paths {
        match load_scene(&p, &with_suffix(&p, ".gt")) {
            Ok(s) => scenes.push(s),
            Err(e) => errors.push(format!("{}: {e:#}", p.display())),
        }
    }
    Ok((scenes, errors))
}

fn bench(a: BenchArgs) -> Result<()> {
    let cfg = a.config.load()?;
    if !(a.noise_cm.is_finite() && a.noise_cm >= 0.0) {
        bail!("--noise-cm must be non-negative");
    }
    let sigma = a.noise_cm / 100.0;
    let (raw, mut errors) = match &a.input {
        Some(dir) => load_suite_dir(dir)?,
        None => (gen_eval_suite(a.suite, a.seed)?, Vec::new()),
    };
    let (scenes, sampler) = match a.sampler {
        SamplerArg::Fps => (prepare_suite(&raw, a.points, sigma, a.seed)?, Sampler::None),
        SamplerArg::Voxel | SamplerArg::None => {
            let noisy = raw
                .iter()
                .enumerate()
                .map(|(i, s)| add_noise(s, sigma, a.seed.wrapping_add(i as u64).rotate_left(32)))
                .collect::<planeseg::Result<Vec<_>>>()?;
            let sampler = if a.sampler == SamplerArg::Voxel { Sampler::Voxel } else { Sampler::None };
            (noisy, sampler)
        }
    };
    let labels = match a.labels {
        Labels::Geometric => LabelSource::Geometric,
        Labels::Uniform => LabelSource::Uniform,
        Labels::Provided => LabelSource::Provided,
        Labels::File(_) => bail!("bench takes geometric, uniform or provided labels"),
    };
    let ransac = RansacConfig {
        theta_pf: a.theta_pf,
        seed: a.seed,
        ..Default::default()
    };
    let methods = match a.method {
        BenchMethodArg::Ours => vec![Method::Ours],
        BenchMethodArg::Ransac => vec![Method::Ransac(ransac)],
        BenchMethodArg::Both => vec![Method::Ours, Method::Ransac(ransac)],
    };

    let mut reports = Vec::new();
    for method in methods {
        let bc = BenchConfig {
            segmenter: cfg.clone(),
            method,
            labels,
            sampler,
            repeats: a.repeats,
        };
        let mut records: Vec<BenchRecord> = Vec::new();
        let mut metrics = Vec::new();
        for (i, scene) in scenes.iter().enumerate() {
            match run_bench(std::slice::from_ref(scene), &bc) {
                Ok((mut r, report)) => {
                    r[0].scene = i;
                    records.extend(r);
                    metrics.extend(report.per_scene);
                }
                Err(e) => errors.push(format!("{} scene {i}: {e}", method.name())),
            }
        }
        if records.is_empty() {
            continue;
        }
        println!("{}", method.name());
        if a.timings {
            print!("{}", format_bench_table(&records));
        }
        let fps = records.len() as f64 * 1000.0 / records.iter().map(BenchRecord::total_ms).sum::<f64>();
        println!("suite FPS {fps:.1}\n");
        if let Some(path) = &a.csv {
            let out = method_csv_path(path, method.name());
            std::fs::write(&out, format_bench_csv(&records)).with_context(|| format!("writing {}", out.display()))?;
        }
        reports.push((method.name(), EvalReport::from_scenes(metrics)?, fps));
    }
    if !reports.is_empty() {
        let columns: Vec<(&str, &EvalReport)> = reports.iter().map(|(n, r, _)| (*n, r)).collect();
        print!("{}", format_table(&columns));
        if let [(_, _, ours), (_, _, ransac)] = reports.as_slice() {
            println!("FPS ratio ours/ransac {:.2}", ours / ransac);
        }
    }
    if !errors.is_empty() {
        eprintln!("{} scene(s) failed:", errors.len());
        for e in &errors {
            eprintln!("  {e}");
        }
        bail!("benchmark incomplete");
    }
    Ok(())
}

fn method_csv_path(path: &Path, method: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{method}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{method}"),
    };
    path.with_file_name(name)
}
