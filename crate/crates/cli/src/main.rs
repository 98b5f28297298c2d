mod config;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordgamma::experiments::{
    henon_sweep, mixed_segmentation, mixed_signal, synthetic_textures, texture_matrices, MixtureKind,
};
use ordgamma::io::{
    load_image, load_results_json, load_series, save_image, save_results, save_series, Cell, DistributionRecord,
    ImageMatrix, MatrixRecord, OutputFormat, ProfileRecord, ResultMeta, ResultRecord, SeriesFile, Table,
};
use ordgamma::{
    cubic, detect_change, divergence_profile, gamma_divergence, henon_with_redraw, image_distribution, logistic,
    series_distribution, weighted_brc, white_noise, Distribution, GammaGenerator, GeneratorTag, HenonForm,
    HenonParams, ImageEmbedding, MapParams, ProfileMode, ProfileOptions, SeriesEmbedding, WeightVector,
};
use serde::Serialize;

use config::{ExperimentConfig, ExperimentTag, TextureConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(ordgamma::Error),
}

impl From<ordgamma::Error> for CliError {
    fn from(e: ordgamma::Error) -> Self {
        CliError::Data(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(ordgamma::Error::NumericalEscape { .. }) => 3,
            CliError::Data(_) => 2,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Ordinal-pattern distributions and gamma-divergences.
#[derive(Parser)]
#[command(name = "ordgamma", version, about)]
struct Cli {
    /// Directory for outputs written without an explicit path.
    #[arg(long, global = true, env = "ORDGAMMA_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ordinal-pattern distribution of a series or image.
    Encode(EncodeArgs),
    /// Gamma-divergence between two inputs.
    Divergence(DivergenceArgs),
    /// Divergence profile and change point of a series.
    Segment(SegmentArgs),
    /// Write a simulated series.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Write the synthetic texture corpus as PGM files.
    MakeTextures(TexturesArgs),
    /// Run a full experiment and write its result tables.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct SeriesSource {
    /// Delimited text file holding the series.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Zero-based column to read.
    #[arg(long, default_value_t = 0)]
    column: usize,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Skip the first line.
    #[arg(long)]
    skip_header: bool,
}

impl SeriesSource {
    fn file(&self, path: &Path) -> CliResult<SeriesFile> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::Usage(format!("delimiter '{}' must be ASCII", self.delimiter)));
        }
        Ok(SeriesFile::new(path)
            .column(self.column)
            .delimiter(self.delimiter as u8)
            .skip_header(self.skip_header))
    }

    fn load(&self, path: &Path) -> CliResult<Vec<f64>> {
        Ok(load_series(&self.file(path)?)?)
    }
}

#[derive(Args)]
struct SeriesEmbeddingArgs {
    /// Pattern length.
    #[arg(long, default_value_t = 4)]
    d: usize,
    /// Embedding delay.
    #[arg(long, default_value_t = 1)]
    tau: usize,
}

impl SeriesEmbeddingArgs {
    fn embedding(&self) -> CliResult<SeriesEmbedding> {
        Ok(SeriesEmbedding::new(self.d, self.tau)?)
    }
}

#[derive(Args)]
struct ImageEmbeddingArgs {
    #[arg(long, default_value_t = 2)]
    dx: usize,
    #[arg(long, default_value_t = 2)]
    dy: usize,
    #[arg(long, default_value_t = 1)]
    tau_x: usize,
    #[arg(long, default_value_t = 1)]
    tau_y: usize,
}

impl ImageEmbeddingArgs {
    fn embedding(&self) -> CliResult<ImageEmbedding> {
        Ok(ImageEmbedding::new(self.dx, self.dy, self.tau_x, self.tau_y)?)
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    source: SeriesSource,
    /// PGM image to encode instead of a series.
    #[arg(long, conflicts_with = "input")]
    image: Option<PathBuf>,
    #[command(flatten)]
    series: SeriesEmbeddingArgs,
    #[command(flatten)]
    image_emb: ImageEmbeddingArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct DivergenceArgs {
    /// Series file, PGM image or distribution JSON.
    a: PathBuf,
    b: PathBuf,
    #[command(flatten)]
    source: SeriesSource,
    #[command(flatten)]
    series: SeriesEmbeddingArgs,
    #[command(flatten)]
    image_emb: ImageEmbeddingArgs,
    #[arg(long, default_value = "log")]
    g: GeneratorTag,
    /// Weights of the two inputs; computes the weighted centroid divergence.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// JSON record with the value and metadata.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    source: SeriesSource,
    /// Pattern length [default: 4].
    #[arg(long)]
    d: Option<usize>,
    /// Embedding delay [default: 1].
    #[arg(long)]
    tau: Option<usize>,
    /// Generator [default: log].
    #[arg(long)]
    g: Option<GeneratorTag>,
    /// Pointer step [default: 1].
    #[arg(long)]
    stride: Option<usize>,
    /// Compare adjacent windows of this width instead of the whole halves.
    #[arg(long)]
    window: Option<usize>,
    /// Minimum maximum value reported as a change [default: 0].
    #[arg(long)]
    threshold: Option<f64>,
    /// TOML file whose [segment] table supplies defaults for the flags above.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Re-encode both halves at every pointer.
    #[arg(long)]
    naive: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum SimulateCommand {
    /// Coupled Hénon maps; columns x (response) and y (driver).
    Henon {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        b: f64,
        #[arg(long, default_value_t = 1000)]
        transient: usize,
        #[arg(long, value_enum, default_value = "standard")]
        form: FormArg,
        /// Escaping realizations redrawn with the next seed.
        #[arg(long, default_value_t = 0)]
        redraws: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Logistic map.
    Logistic {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 4.0)]
        r: f64,
    },
    /// Cubic map.
    Cubic {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 3.0)]
        a: f64,
    },
    /// Standard Gaussian white noise.
    Noise {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two concatenated segments with a change at `segment`.
    Mixed {
        #[arg(long, value_enum, default_value = "noise-logistic")]
        kind: KindArg,
        #[arg(long, default_value_t = 2000)]
        segment: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MapArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial condition; drawn from the seed when omitted.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    transient: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl MapArgs {
    fn params(&self) -> MapParams<f64> {
        let mut p = MapParams::new(self.n, self.seed);
        p.x0 = self.x0;
        p.transient = self.transient;
        p
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Standard,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    NoiseLogistic,
    CubicLogistic,
}

#[derive(Args)]
struct TexturesArgs {
    #[arg(long, default_value_t = 640)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write plain-text P2 files instead of binary P5.
    #[arg(long)]
    ascii: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment to run; may instead come from the config file.
    #[arg(value_enum)]
    experiment: Option<ExperimentTag>,
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Divide lengths and realization counts by 10.
    #[arg(long)]
    desk_scale: bool,
    /// Base seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Realization count, overriding the config.
    #[arg(long)]
    realizations: Option<usize>,
    /// Directory of PGM images for texture-matrix.
    #[arg(long)]
    images: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn resolve_format(explicit: Option<Format>, out: Option<&Path>, default: OutputFormat) -> OutputFormat {
    explicit
        .map(Into::into)
        .or_else(|| out.and_then(OutputFormat::from_path))
        .unwrap_or(default)
}

fn output_path(out: Option<PathBuf>, out_dir: &Path, stem: &str, format: OutputFormat) -> PathBuf {
    out.unwrap_or_else(|| out_dir.join(format!("{stem}.{format}")))
}

fn cmd_encode(args: EncodeArgs, out_dir: &Path) -> CliResult {
    let format = resolve_format(args.format, args.out.as_deref(), OutputFormat::Json);
    let (dist, meta): (Distribution, ResultMeta) = match (&args.source.input, &args.image) {
        (Some(path), None) => {
            let emb = args.series.embedding()?;
            let s = args.source.load(path)?;
            (
                series_distribution(&s, &emb)?,
                ResultMeta::series(emb.d, emb.tau).with_source(path.display().to_string()),
            )
        }
        (None, Some(path)) => {
            let emb = args.image_emb.embedding()?;
            let img = load_image(path)?;
            (
                image_distribution(img.to_array::<f64>().view(), &emb)?,
                ResultMeta::image(emb.dx, emb.dy, emb.tau_x, emb.tau_y).with_source(path.display().to_string()),
            )
        }
        _ => return Err(CliError::Usage("encode needs exactly one of --input or --image".into())),
    };
    let path = output_path(args.out, out_dir, "distribution", format);
    save_results(&ResultRecord::Distribution(DistributionRecord::new(&dist, meta)), &path, format)?;
    println!("{}", path.display());
    Ok(())
}

fn load_distribution(
    path: &Path,
    source: &SeriesSource,
    series: &SeriesEmbeddingArgs,
    image: &ImageEmbeddingArgs,
) -> CliResult<(Distribution, ResultMeta)> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "json" => match load_results_json(path)? {
            ResultRecord::Distribution(rec) => {
                let d = rec.to_distribution()?;
                Ok((d, rec.meta))
            }
            _ => Err(CliError::Data(ordgamma::Error::format(path, "not a distribution record"))),
        },
        "pgm" => {
            let emb = image.embedding()?;
            let img = load_image(path)?;
            Ok((
                image_distribution(img.to_array::<f64>().view(), &emb)?,
                ResultMeta::image(emb.dx, emb.dy, emb.tau_x, emb.tau_y),
            ))
        }
        _ => {
            let emb = series.embedding()?;
            let s = source.load(path)?;
            Ok((series_distribution(&s, &emb)?, ResultMeta::series(emb.d, emb.tau)))
        }
    }
}

#[derive(Serialize)]
struct DivergenceOutput {
    kind: &'static str,
    value: f64,
    #[serde(flatten)]
    meta: ResultMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    inputs: [String; 2],
}

fn cmd_divergence(args: DivergenceArgs) -> CliResult {
    let (p, ma) = load_distribution(&args.a, &args.source, &args.series, &args.image_emb)?;
    let (q, mb) = load_distribution(&args.b, &args.source, &args.series, &args.image_emb)?;
    if ma.embedding_key() != mb.embedding_key() || p.len() != q.len() {
        return Err(CliError::Data(ordgamma::Error::invalid(format!(
            "incompatible embeddings: {} has {:?}, {} has {:?}",
            args.a.display(),
            ma.embedding_key(),
            args.b.display(),
            mb.embedding_key()
        ))));
    }
    let g = GammaGenerator::builtin(args.g)?;
    let value = match &args.weights {
        Some(w) => weighted_brc(p.probs(), q.probs(), &WeightVector::new(w.clone())?, &g)?,
        None => gamma_divergence(p.probs(), q.probs(), &g)?,
    };
    println!("{value}");
    if let Some(out) = args.out {
        let rec = DivergenceOutput {
            kind: "divergence",
            value,
            meta: ResultMeta { g: Some(args.g.to_string()), ..ma },
            weights: args.weights,
            inputs: [args.a.display().to_string(), args.b.display().to_string()],
        };
        write_json(&out, &rec)?;
    }
    Ok(())
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| ordgamma::Error::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| ordgamma::Error::format(path, e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| ordgamma::Error::io(path, e))?;
    Ok(())
}

fn cmd_segment(args: SegmentArgs, out_dir: &Path) -> CliResult {
    let path = args
        .source
        .input
        .clone()
        .ok_or_else(|| CliError::Usage("segment needs --input".into()))?;
    let defaults = match &args.config {
        Some(c) => ExperimentConfig::load(c)?.segment,
        None => Default::default(),
    };
    let emb = SeriesEmbedding::new(
        args.d.or(defaults.d).unwrap_or(4),
        args.tau.or(defaults.tau).unwrap_or(1),
    )?;
    let tag = args.g.or(defaults.g).unwrap_or(GeneratorTag::Log);
    let threshold = args.threshold.or(defaults.threshold).unwrap_or(0.0);
    let opts = ProfileOptions {
        stride: args.stride.or(defaults.stride).unwrap_or(1),
        mode: match args.window.or(defaults.window) {
            Some(width) => ProfileMode::RunningWindow { width },
            None => ProfileMode::Pointer,
        },
        incremental: !args.naive,
    };
    let series = args.source.load(&path)?;
    let profile = divergence_profile(&series, &emb, &GammaGenerator::builtin(tag)?, &opts)?;
    let format = resolve_format(args.format, args.out.as_deref(), OutputFormat::Csv);
    let out = output_path(args.out, out_dir, "profile", format);
    let meta = ResultMeta::series(emb.d, emb.tau)
        .with_g(tag.to_string())
        .with_source(path.display().to_string());
    save_results(&ResultRecord::Profile(ProfileRecord::new(&profile, meta)), &out, format)?;
    match detect_change(&profile, threshold)? {
        Some(p) => println!("{p}"),
        None => println!("none"),
    }
    Ok(())
}

fn write_series(values: &[f64], out: Option<PathBuf>, out_dir: &Path, stem: &str) -> CliResult {
    let path = out.unwrap_or_else(|| out_dir.join(format!("{stem}.csv")));
    save_series(values, &path)?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_simulate(cmd: SimulateCommand, out_dir: &Path) -> CliResult {
    match cmd {
        SimulateCommand::Henon {
            epsilon,
            n,
            seed,
            b,
            transient,
            form,
            redraws,
            out,
        } => {
            let mut p = HenonParams::new(epsilon, n, seed);
            p.b = b;
            p.transient = transient;
            p.form = match form {
                FormArg::Standard => HenonForm::Standard,
                FormArg::Literal => HenonForm::Literal,
            };
            let (s, used) = henon_with_redraw(&p, redraws)?;
            if used != seed {
                eprintln!("seed {seed} escaped; used seed {used}");
            }
            let mut t = Table::new(["x", "y"]);
            for (x, y) in s.response.iter().zip(&s.driver) {
                t.push(vec![Cell::Num(*x), Cell::Num(*y)]);
            }
            let path = out.unwrap_or_else(|| out_dir.join("henon.csv"));
            t.save(&path, OutputFormat::Csv)?;
            println!("{}", path.display());
            Ok(())
        }
        SimulateCommand::Logistic { map, r } => {
            let mut p = map.params();
            p.r = r;
            write_series(&logistic(&p)?, map.out, out_dir, "logistic")
        }
        SimulateCommand::Cubic { map, a } => {
            let mut p = map.params();
            p.a = a;
            write_series(&cubic(&p)?, map.out, out_dir, "cubic")
        }
        SimulateCommand::Noise { n, seed, out } => write_series(&white_noise(n, seed), out, out_dir, "noise"),
        SimulateCommand::Mixed {
            kind,
            segment,
            seed,
            out,
        } => {
            let kind = match kind {
                KindArg::NoiseLogistic => MixtureKind::NoiseLogistic,
                KindArg::CubicLogistic => MixtureKind::CubicLogistic,
            };
            write_series(&mixed_signal(kind, segment, seed)?, out, out_dir, kind.as_str())
        }
    }
}

fn cmd_make_textures(args: TexturesArgs, out_dir: &Path) -> CliResult {
    for t in synthetic_textures(args.size, args.seed) {
        let path = out_dir.join(format!("{}.pgm", t.label));
        save_image(&t.image, &path, !args.ascii)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn load_image_dir(dir: &Path) -> CliResult<(Vec<String>, Vec<ImageMatrix>)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| ordgamma::Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Data(ordgamma::Error::invalid(format!(
            "no .pgm files in {}",
            dir.display()
        ))));
    }
    let labels = paths
        .iter()
        .map(|p| p.file_stem().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let images = paths.iter().map(load_image).collect::<Result<Vec<_>, _>>()?;
    Ok((labels, images))
}

fn report(name: &str, completed: usize, attempted: usize, failures: usize) {
    eprintln!("{name}: {completed}/{attempted} realizations completed, {failures} failed");
}

fn cmd_experiment(args: ExperimentArgs, out_dir: &Path) -> CliResult {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let tag = args
        .experiment
        .or(cfg.experiment)
        .ok_or_else(|| CliError::Usage("no experiment given on the command line or in the config".into()))?;
    let out_dir = cfg.out_dir.clone().unwrap_or_else(|| out_dir.to_path_buf());
    let format = resolve_format(args.format, None, OutputFormat::Csv);
    let save = |t: &Table, stem: &str| -> CliResult {
        let path = out_dir.join(format!("{stem}.{format}"));
        t.save(&path, format)?;
        println!("{}", path.display());
        Ok(())
    };
    match tag {
        ExperimentTag::HenonSweep => {
            let mut c = cfg.henon;
            if args.desk_scale {
                c = c.desk_scale();
            }
            c.seed = args.seed.unwrap_or(c.seed);
            c.realizations = args.realizations.unwrap_or(c.realizations);
            let res = henon_sweep(&c)?;
            report("henon-sweep", res.completed, res.attempted, res.failures.len());
            let all = res.table();
            save(&all, "henon_sweep")?;
            for g in &c.generators {
                let mut t = Table::new(all.headers.clone());
                t.rows = all.rows.iter().filter(|r| r[1] == Cell::from(g.as_str())).cloned().collect();
                save(&t, &format!("henon_sweep_{g}"))?;
            }
            write_json(&out_dir.join("henon_sweep_failures.json"), &res.failures)?;
        }
        ExperimentTag::MixedSegmentation => {
            let mut c = cfg.mixed;
            if args.desk_scale {
                c = c.desk_scale();
            }
            c.seed = args.seed.unwrap_or(c.seed);
            c.realizations = args.realizations.unwrap_or(c.realizations);
            let res = mixed_segmentation(&c)?;
            report("mixed-segmentation", res.completed, res.attempted, res.failures.len());
            save(&res.profile_table(), "mixed_profiles")?;
            save(&res.summary_table(), "mixed_summary")?;
            write_json(&out_dir.join("mixed_failures.json"), &res.failures)?;
        }
        ExperimentTag::TextureMatrix => {
            let c: &mut TextureConfig = &mut cfg.texture;
            if args.images.is_some() {
                c.images_dir = args.images.clone();
            }
            if args.desk_scale {
                c.size = (c.size / 10).max(16);
            }
            c.seed = args.seed.unwrap_or(c.seed);
            let (labels, images) = match &c.images_dir {
                Some(dir) => load_image_dir(dir)?,
                None => synthetic_textures(c.size, c.seed)
                    .into_iter()
                    .map(|t| (t.label, t.image))
                    .unzip(),
            };
            let emb = ImageEmbedding::new(c.dx, c.dy, c.tau_x, c.tau_y)?;
            let mats = texture_matrices(&images, &emb, &c.generators)?;
            let mut index = Table::new(["index", "label"]);
            for (i, l) in labels.iter().enumerate() {
                index.push(vec![i.into(), l.as_str().into()]);
            }
            save(&index, "texture_labels")?;
            for (g, m) in mats {
                let meta = ResultMeta::image(c.dx, c.dy, c.tau_x, c.tau_y).with_g(g.to_string());
                let meta = match c.images_dir {
                    Some(_) => meta,
                    None => meta.with_seed(c.seed),
                };
                let path = out_dir.join(format!("texture_{g}.{format}"));
                save_results(
                    &ResultRecord::Matrix(MatrixRecord::new(&m, labels.clone(), meta)),
                    &path,
                    format,
                )?;
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Encode(a) => cmd_encode(a, &out_dir),
        Command::Divergence(a) => cmd_divergence(a),
        Command::Segment(a) => cmd_segment(a, &out_dir),
        Command::Simulate(c) => cmd_simulate(c, &out_dir),
        Command::MakeTextures(a) => cmd_make_textures(a, &out_dir),
        Command::Experiment(a) => cmd_experiment(a, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
