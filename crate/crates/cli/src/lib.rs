//! `sigver` command line: synth, preprocess, features, train, verify,
//! evaluate and sweep.
//!
//! Exit codes: 0 success, 1 verification rejected, 2 usage error,
//! 3 data or model error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use sigver::eval::{self, SignerFeatures, SweepConfig};
use sigver::features::{self, Layout, RawFeatures, SCALING_VERSION};
use sigver::label::Label;
use sigver::mlp::{self, MlpModel, TrainConfig};
use sigver::preprocess::{render_grid, run_stages};
use sigver::raster::{load_pgm, save_pgm, to_gray};
use sigver::syndata;
use sigver::{Error, Model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sigver",
    version,
    about = "Offline signature verification toolkit"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Seed for every random choice (data synthesis, splits, initialization).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic signature dataset (PGM files + manifest.txt).
    Synth(SynthArgs),
    /// Run the preprocessing pipeline and dump every stage as PGM.
    Preprocess(PreprocessArgs),
    /// Extract one scaled feature vector to CSV.
    Features(FeaturesArgs),
    /// Train a per-signer model on a balanced split of a manifest.
    Train(TrainArgs),
    /// Classify one signature image; exit 0 for GENUINE, 1 for FORGERY.
    Verify(VerifyArgs),
    /// Score a model on the held-out 50+50 test split of a signer.
    Evaluate(EvaluateArgs),
    /// Training-size sweep over feature methods; writes a CSV report.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub signers: usize,
    /// Genuine samples per signer.
    #[arg(long, default_value_t = 110)]
    pub genuine: usize,
    /// Forgery samples per signer.
    #[arg(long, default_value_t = 110)]
    pub forgery: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Input PGM (P2 or P5).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Receives 01_binary.pgm … 06_segmented.pgm and aspect.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// energy (101), direction (400) or combined (501).
    #[arg(long, value_parser = parse_layout)]
    pub layout: Layout,
    /// CSV: a `<layout>,<version>` row, then one row of scaled values.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset manifest.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_parser = parse_layout)]
    pub layout: Layout,
    /// Training samples, half genuine and half forgery.
    #[arg(long, value_parser = parse_even)]
    pub n_train: usize,
    /// Signer to train on; defaults to the first one in the manifest.
    #[arg(long)]
    pub signer: Option<String>,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub signer: String,
    /// Training size the model was trained with; with the same --seed this
    /// reproduces its split so only held-out samples are scored.
    #[arg(long, value_parser = parse_even, default_value_t = 100)]
    pub n_train: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub signer: String,
    /// Comma-separated subset of energy,direction,combined.
    #[arg(long, value_parser = parse_layout, value_delimiter = ',', default_value = "energy,direction,combined")]
    pub methods: Vec<Layout>,
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, value_parser = parse_sizes, default_value = "10:100:10")]
    pub sizes: Sizes,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<usize>);

fn parse_layout(s: &str) -> Result<Layout, String> {
    s.parse::<Layout>().map_err(|e| e.to_string())
}

fn parse_even(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(format!("{n} must be a positive even number"));
    }
    Ok(n)
}

pub fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let sizes: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, step] = parts.as_slice() else {
            return Err(format!("expected start:end:step, got {s:?}"));
        };
        let start = parse_even(start)?;
        let end: usize = end.parse().map_err(|_| format!("bad end in {s:?}"))?;
        let step = parse_even(step)?;
        (start..=end).step_by(step).collect()
    } else {
        s.split(',')
            .map(|t| parse_even(t.trim()))
            .collect::<Result<_, _>>()?
    };
    if sizes.is_empty() {
        return Err(format!("{s:?} selects no sizes"));
    }
    Ok(Sizes(sizes))
}

/// `%.9g`-style rendering: nine significant digits, trailing zeros dropped.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct Ctx {
    seed: u64,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let ctx = Ctx {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    let outcome = match cli.command {
        Command::Synth(a) => synth(&ctx, a),
        Command::Preprocess(a) => preprocess(&ctx, a),
        Command::Features(a) => extract_features(&ctx, a),
        Command::Train(a) => train(&ctx, a),
        Command::Verify(a) => verify(a),
        Command::Evaluate(a) => evaluate(&ctx, a),
        Command::Sweep(a) => sweep(&ctx, a),
    };
    match outcome {
        Ok(code) => code,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

type Outcome = sigver::Result<i32>;

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> sigver::Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn synth(ctx: &Ctx, a: SynthArgs) -> Outcome {
    let manifest = syndata::gen_dataset(a.signers, a.genuine, a.forgery, ctx.seed, &a.out_dir)?;
    ctx.note(format!(
        "wrote {} signers × ({} + {}) samples and {} to {}",
        manifest.signers().len(),
        a.genuine,
        a.forgery,
        syndata::MANIFEST_NAME,
        a.out_dir.display()
    ));
    Ok(EXIT_OK)
}

fn preprocess(ctx: &Ctx, a: PreprocessArgs) -> Outcome {
    let gray = load_pgm(&a.input)?;
    let s = run_stages(&gray)?;
    fs::create_dir_all(&a.out_dir).map_err(|source| Error::Io {
        path: a.out_dir.clone(),
        source,
    })?;
    let stages = [
        ("01_binary.pgm", to_gray(&s.binary)),
        ("02_denoised.pgm", to_gray(&s.denoised)),
        ("03_thinned.pgm", to_gray(&s.thinned)),
        ("04_deskewed.pgm", to_gray(&s.deskewed)),
        ("05_cropped.pgm", to_gray(&s.cropped)),
        ("06_segmented.pgm", render_grid(&s.resized)),
    ];
    for (name, img) in &stages {
        save_pgm(img, a.out_dir.join(name))?;
    }
    write_file(&a.out_dir.join("aspect.txt"), format!("{}\n", s.aspect))?;
    ctx.note(format!(
        "threshold {}, skew {:.3} deg, aspect {}",
        s.threshold,
        s.skew.degrees(),
        s.aspect
    ));
    Ok(EXIT_OK)
}

fn extract_features(ctx: &Ctx, a: FeaturesArgs) -> Outcome {
    let v = features::extract::<f64>(&load_pgm(&a.input)?, a.layout)?;
    let row: Vec<String> = v.values().iter().map(|&x| format_sig9(x)).collect();
    let text = format!("{},{}\n{}\n", a.layout, SCALING_VERSION, row.join(","));
    write_file(&a.out, text)?;
    ctx.note(format!(
        "wrote {} {} features to {}",
        v.len(),
        a.layout,
        a.out.display()
    ));
    Ok(EXIT_OK)
}

fn signer_data(manifest: &eval::DatasetManifest, signer: &str) -> sigver::Result<SignerFeatures> {
    SignerFeatures::from_entry(manifest.signer(signer)?)
}

fn train(ctx: &Ctx, a: TrainArgs) -> Outcome {
    let manifest = eval::load_manifest(&a.data)?;
    let signer = match a.signer {
        Some(s) => s,
        None => manifest.signers()[0].id.clone(),
    };
    let entry = manifest.signer(&signer)?;
    let config = SweepConfig::<f64>::new(ctx.seed);
    let spec = eval::SplitSpec {
        n_train: a.n_train,
        n_test_genuine: 0,
        n_test_forgery: 0,
        seed: config.split_seed(a.n_train),
    };
    let idx = eval::split_indices(&signer, entry.genuine.len(), entry.forgery.len(), &spec)?;
    let mut data = Vec::with_capacity(a.n_train);
    for (paths, ids, label) in [
        (&entry.genuine, &idx.train_genuine, Label::Genuine),
        (&entry.forgery, &idx.train_forgery, Label::Forgery),
    ] {
        for &i in ids {
            let v = RawFeatures::from_image(&load_pgm(&paths[i])?)?.vector::<f64>(a.layout)?;
            data.push(mlp::Sample::labelled(v, label));
        }
    }
    let mut model = MlpModel::for_layout(a.layout, config.init_seed(a.layout, a.n_train))?;
    let history = mlp::train(&mut model, &data, &TrainConfig::default())?;
    mlp::save_model(&model, &a.out)?;
    ctx.note(format!(
        "signer {signer}: {} epochs, stop {:?}, mse {:.6}; model written to {}",
        history.epochs(),
        history.stop_reason,
        history.final_mse(),
        a.out.display()
    ));
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> Outcome {
    let model: Model = mlp::load_model(&a.model)?;
    let layout = model.layout().ok_or_else(|| {
        Error::LayoutMismatch("model input width matches no feature layout".into())
    })?;
    let x = features::extract::<f64>(&load_pgm(&a.input)?, layout)?;
    let (score, _) = model.forward(&x)?;
    let verdict = model.decide(score);
    println!("{verdict} {score:.6}");
    Ok(match verdict {
        Label::Genuine => EXIT_OK,
        Label::Forgery => EXIT_REJECTED,
    })
}

fn evaluate(ctx: &Ctx, a: EvaluateArgs) -> Outcome {
    let model: Model = mlp::load_model(&a.model)?;
    let layout = model.layout().ok_or_else(|| {
        Error::LayoutMismatch("model input width matches no feature layout".into())
    })?;
    let manifest = eval::load_manifest(&a.manifest)?;
    let data = signer_data(&manifest, &a.signer)?;
    let config = SweepConfig::<f64>::new(ctx.seed);
    let spec = eval::SplitSpec {
        n_train: a.n_train,
        n_test_genuine: config.n_test_genuine,
        n_test_forgery: config.n_test_forgery,
        seed: config.split_seed(a.n_train),
    };
    let idx = eval::split_indices(&a.signer, data.genuine.len(), data.forgery.len(), &spec)?;
    let mut test = Vec::new();
    for (raw, ids, label) in [
        (&data.genuine, &idx.test_genuine, Label::Genuine),
        (&data.forgery, &idx.test_forgery, Label::Forgery),
    ] {
        for &i in ids {
            test.push(eval::Example {
                features: raw[i].vector(layout)?,
                label,
            });
        }
    }
    let mut report = eval::evaluate(&model, &test)?;
    report.n_train = a.n_train;
    print!("{}", eval::reports_to_csv(&[report]));
    Ok(EXIT_OK)
}

fn sweep(ctx: &Ctx, a: SweepArgs) -> Outcome {
    let manifest = eval::load_manifest(&a.manifest)?;
    let data = signer_data(&manifest, &a.signer)?;
    let mut config = SweepConfig::<f64>::new(ctx.seed);
    config.methods = a.methods;
    config.sizes = a.sizes.0;
    let mut reports = Vec::new();
    for &method in &config.methods {
        for &size in &config.sizes {
            let r = eval::run_cell(&data, method, size, &config)?;
            ctx.note(eval::csv_row(&r));
            reports.push(r);
        }
    }
    let csv = eval::reports_to_csv(&reports);
    match a.out {
        Some(path) => write_file(&path, csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}
