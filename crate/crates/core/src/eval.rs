//! Experiment protocol: manifests, balanced per-signer splits, FAR/FRR
//! metrics and the training-size sweep.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, Layout, RawFeatures};
use crate::label::Label;
use crate::mlp::{train, MlpModel, Sample, TrainConfig};
use crate::raster::load_pgm;
use crate::scalar::Scalar;
use crate::seed::{derive_seed, rng_for};

pub const DEFAULT_TEST_PER_CLASS: usize = 50;

/// Training sizes of the reference protocol: 10, 20, …, 100.
pub fn default_sizes() -> Vec<usize> {
    (1..=10).map(|k| k * 10).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignerEntry {
    pub id: String,
    pub genuine: Vec<PathBuf>,
    pub forgery: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    signers: Vec<SignerEntry>,
}

impl DatasetManifest {
    /// Validates uniqueness of ids and paths and that every signer has
    /// both classes.
    pub fn new(signers: Vec<SignerEntry>) -> Result<Self> {
        let mut ids = HashSet::new();
        let mut paths = HashSet::new();
        for s in &signers {
            if !ids.insert(s.id.as_str()) {
                return Err(Error::MalformedManifest(format!(
                    "signer {} listed twice",
                    s.id
                )));
            }
            if s.genuine.is_empty() || s.forgery.is_empty() {
                return Err(Error::MalformedManifest(format!(
                    "signer {} needs at least one genuine and one forgery sample",
                    s.id
                )));
            }
            for p in s.genuine.iter().chain(&s.forgery) {
                if !paths.insert(p.as_path()) {
                    return Err(Error::DuplicatePath(p.clone()));
                }
            }
        }
        Ok(Self { signers })
    }

    pub fn signers(&self) -> &[SignerEntry] {
        &self.signers
    }

    pub fn signer(&self, id: &str) -> Result<&SignerEntry> {
        self.signers
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::UnknownSigner(id.to_string()))
    }

    /// Renders the manifest; paths under `relative_to` are written relative.
    pub fn to_text(&self, relative_to: Option<&Path>) -> String {
        let show = |p: &Path| {
            relative_to
                .and_then(|base| p.strip_prefix(base).ok())
                .unwrap_or(p)
                .display()
                .to_string()
        };
        let mut out = String::new();
        for s in &self.signers {
            let _ = writeln!(out, "signer {}", s.id);
            for p in &s.genuine {
                let _ = writeln!(out, "genuine {}", show(p));
            }
            for p in &s.forgery {
                let _ = writeln!(out, "forgery {}", show(p));
            }
        }
        out
    }
}

/// Parses manifest text. Relative paths are resolved against `base_dir`.
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<DatasetManifest> {
    let mut signers: Vec<SignerEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .ok_or_else(|| Error::MalformedManifest(format!("line {}: {raw:?}", i + 1)))?;
        match key {
            "signer" => signers.push(SignerEntry {
                id: value.to_string(),
                genuine: Vec::new(),
                forgery: Vec::new(),
            }),
            "genuine" | "forgery" => {
                let entry = signers.last_mut().ok_or_else(|| {
                    Error::MalformedManifest(format!("line {}: sample before any signer", i + 1))
                })?;
                let path = base_dir.join(value);
                if key == "genuine" {
                    entry.genuine.push(path);
                } else {
                    entry.forgery.push(path);
                }
            }
            other => {
                return Err(Error::MalformedManifest(format!(
                    "line {}: unknown keyword {other:?}",
                    i + 1
                )))
            }
        }
    }
    if signers.is_empty() {
        return Err(Error::MalformedManifest("no signers".into()));
    }
    DatasetManifest::new(signers)
}

/// Reads, parses and validates a manifest; every listed file must exist.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let manifest = parse_manifest(&text, base)?;
    for s in manifest.signers() {
        for p in s.genuine.iter().chain(&s.forgery) {
            if !p.is_file() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
    }
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    /// Total training samples, half of each class.
    pub n_train: usize,
    pub n_test_genuine: usize,
    pub n_test_forgery: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(n_train: usize, seed: u64) -> Self {
        Self {
            n_train,
            n_test_genuine: DEFAULT_TEST_PER_CLASS,
            n_test_forgery: DEFAULT_TEST_PER_CLASS,
            seed,
        }
    }
}

/// Indices chosen by a split, per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train_genuine: Vec<usize>,
    pub train_forgery: Vec<usize>,
    pub test_genuine: Vec<usize>,
    pub test_forgery: Vec<usize>,
}

/// Seeded per-class shuffle; the first `n_train/2` go to training and the
/// next test-count go to testing.
pub fn split_indices(
    signer: &str,
    n_genuine: usize,
    n_forgery: usize,
    spec: &SplitSpec,
) -> Result<SplitIndices> {
    if spec.n_train == 0 || !spec.n_train.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "training size must be a positive even number, got {}",
            spec.n_train
        )));
    }
    let half = spec.n_train / 2;
    let mut rng = rng_for(spec.seed, 0);
    let mut pick = |available: usize, n_test: usize, class: &'static str| {
        let needed = half + n_test;
        if available < needed {
            return Err(Error::InsufficientSamples {
                signer: signer.to_string(),
                class,
                available,
                needed,
            });
        }
        let mut idx: Vec<usize> = (0..available).collect();
        idx.shuffle(&mut rng);
        idx.truncate(needed);
        let test = idx.split_off(half);
        Ok((idx, test))
    };
    let (train_genuine, test_genuine) = pick(n_genuine, spec.n_test_genuine, "genuine")?;
    let (train_forgery, test_forgery) = pick(n_forgery, spec.n_test_forgery, "forgery")?;
    Ok(SplitIndices {
        train_genuine,
        train_forgery,
        test_genuine,
        test_forgery,
    })
}

pub type LabelledPaths = Vec<(PathBuf, Label)>;

/// Train and test lists of labelled paths for one signer.
pub fn make_split(
    manifest: &DatasetManifest,
    signer: &str,
    spec: &SplitSpec,
) -> Result<(LabelledPaths, LabelledPaths)> {
    let entry = manifest.signer(signer)?;
    let idx = split_indices(signer, entry.genuine.len(), entry.forgery.len(), spec)?;
    let take = |gen: &[usize], forg: &[usize]| {
        gen.iter()
            .map(|&i| (entry.genuine[i].clone(), Label::Genuine))
            .chain(
                forg.iter()
                    .map(|&i| (entry.forgery[i].clone(), Label::Forgery)),
            )
            .collect::<Vec<_>>()
    };
    Ok((
        take(&idx.train_genuine, &idx.train_forgery),
        take(&idx.test_genuine, &idx.test_forgery),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example<T> {
    pub features: FeatureVector<T>,
    pub label: Label,
}

impl<T: Scalar> Example<T> {
    pub fn to_sample(&self) -> Sample<T> {
        Sample::labelled(self.features.clone(), self.label)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub method: Layout,
    pub n_train: usize,
    pub accuracy_pct: f64,
    pub far_pct: f64,
    pub frr_pct: f64,
    pub train_seconds: f64,
    pub n_genuine: usize,
    pub n_forgery: usize,
    pub false_accepts: usize,
    pub false_rejects: usize,
}

/// Accuracy, FAR (forgeries accepted) and FRR (genuine rejected), in
/// percent. `n_train` and `train_seconds` are left at zero for the caller.
pub fn evaluate<T: Scalar>(model: &MlpModel<T>, test: &[Example<T>]) -> Result<MetricsReport> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let method = test[0].features.layout();
    let (mut n_gen, mut n_forg, mut fa, mut fr) = (0, 0, 0, 0);
    for ex in test {
        let verdict = model.classify(&ex.features)?;
        match (ex.label, verdict) {
            (Label::Genuine, v) => {
                n_gen += 1;
                fr += (v == Label::Forgery) as usize;
            }
            (Label::Forgery, v) => {
                n_forg += 1;
                fa += (v == Label::Genuine) as usize;
            }
        }
    }
    if n_gen == 0 || n_forg == 0 {
        return Err(Error::SingleClassTestSet);
    }
    let total = (n_gen + n_forg) as f64;
    Ok(MetricsReport {
        method,
        n_train: 0,
        accuracy_pct: 100.0 * (total - (fa + fr) as f64) / total,
        far_pct: 100.0 * fa as f64 / n_forg as f64,
        frr_pct: 100.0 * fr as f64 / n_gen as f64,
        train_seconds: 0.0,
        n_genuine: n_gen,
        n_forgery: n_forg,
        false_accepts: fa,
        false_rejects: fr,
    })
}

pub const CSV_HEADER: &str = "method,n_train,accuracy_pct,far_pct,frr_pct,train_seconds";

pub fn csv_row(r: &MetricsReport) -> String {
    format!(
        "{},{},{:.2},{:.2},{:.2},{:.3}",
        r.method, r.n_train, r.accuracy_pct, r.far_pct, r.frr_pct, r.train_seconds
    )
}

pub fn reports_to_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct SweepConfig<T> {
    pub methods: Vec<Layout>,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub n_test_genuine: usize,
    pub n_test_forgery: usize,
    pub train: TrainConfig<T>,
}

impl<T: Scalar> SweepConfig<T> {
    pub fn new(seed: u64) -> Self {
        Self {
            methods: Layout::ALL.to_vec(),
            sizes: default_sizes(),
            seed,
            n_test_genuine: DEFAULT_TEST_PER_CLASS,
            n_test_forgery: DEFAULT_TEST_PER_CLASS,
            train: TrainConfig::default(),
        }
    }

    /// Split seed for a training size; shared by all methods so they see
    /// the same samples.
    pub fn split_seed(&self, size: usize) -> u64 {
        derive_seed(self.seed, size as u64)
    }

    /// Weight-initialization seed of one (method, size) cell.
    pub fn init_seed(&self, method: Layout, size: usize) -> u64 {
        let method_tag = Layout::ALL.iter().position(|&l| l == method).unwrap_or(0) as u64 + 1;
        derive_seed(self.seed, (method_tag << 32) | size as u64)
    }
}

/// Unscaled features of one signer's samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SignerFeatures {
    pub id: String,
    pub genuine: Vec<RawFeatures>,
    pub forgery: Vec<RawFeatures>,
}

impl SignerFeatures {
    pub fn from_entry(entry: &SignerEntry) -> Result<Self> {
        let extract = |paths: &[PathBuf]| {
            paths
                .iter()
                .map(|p| RawFeatures::from_image(&load_pgm(p)?))
                .collect::<Result<Vec<_>>>()
        };
        Ok(Self {
            id: entry.id.clone(),
            genuine: extract(&entry.genuine)?,
            forgery: extract(&entry.forgery)?,
        })
    }

    fn examples<T: Scalar>(
        &self,
        layout: Layout,
        gen: &[usize],
        forg: &[usize],
    ) -> Result<Vec<Example<T>>> {
        let mut out = Vec::with_capacity(gen.len() + forg.len());
        for &i in gen {
            out.push(Example {
                features: self.genuine[i].vector(layout)?,
                label: Label::Genuine,
            });
        }
        for &i in forg {
            out.push(Example {
                features: self.forgery[i].vector(layout)?,
                label: Label::Forgery,
            });
        }
        Ok(out)
    }
}

/// Split → train → evaluate for one (method, size) cell.
pub fn run_cell<T: Scalar>(
    data: &SignerFeatures,
    method: Layout,
    size: usize,
    config: &SweepConfig<T>,
) -> Result<MetricsReport> {
    let spec = SplitSpec {
        n_train: size,
        n_test_genuine: config.n_test_genuine,
        n_test_forgery: config.n_test_forgery,
        seed: config.split_seed(size),
    };
    let idx = split_indices(&data.id, data.genuine.len(), data.forgery.len(), &spec)?;
    let train_set: Vec<Sample<T>> = data
        .examples::<T>(method, &idx.train_genuine, &idx.train_forgery)?
        .iter()
        .map(Example::to_sample)
        .collect();
    let test_set = data.examples::<T>(method, &idx.test_genuine, &idx.test_forgery)?;

    let mut model = MlpModel::for_layout(method, config.init_seed(method, size))?;
    let started = Instant::now();
    train(&mut model, &train_set, &config.train)?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut report = evaluate(&model, &test_set)?;
    report.n_train = size;
    report.train_seconds = elapsed;
    Ok(report)
}

/// Every (method, size) cell in method-major order.
pub fn sweep_features<T: Scalar>(
    data: &SignerFeatures,
    config: &SweepConfig<T>,
) -> Result<Vec<MetricsReport>> {
    let mut reports = Vec::with_capacity(config.methods.len() * config.sizes.len());
    for &method in &config.methods {
        for &size in &config.sizes {
            reports.push(run_cell(data, method, size, config)?);
        }
    }
    Ok(reports)
}

/// Loads one signer's images from a manifest and runs the sweep.
pub fn sweep<T: Scalar>(
    manifest: &DatasetManifest,
    signer: &str,
    config: &SweepConfig<T>,
) -> Result<Vec<MetricsReport>> {
    let data = SignerFeatures::from_entry(manifest.signer(signer)?)?;
    sweep_features(&data, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, g: usize, f: usize) -> SignerEntry {
        SignerEntry {
            id: id.into(),
            genuine: (0..g)
                .map(|i| PathBuf::from(format!("{id}_g{i}")))
                .collect(),
            forgery: (0..f)
                .map(|i| PathBuf::from(format!("{id}_f{i}")))
                .collect(),
        }
    }

    #[test]
    fn parse_basic_manifest() {
        let text = "# demo\nsigner 7\ngenuine a.pgm\ngenuine b.pgm # trailing\nforgery c.pgm\nforgery d.pgm\n";
        let m = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(m.signers().len(), 1);
        let s = m.signer("7").unwrap();
        assert_eq!(
            s.genuine,
            vec![PathBuf::from("/data/a.pgm"), PathBuf::from("/data/b.pgm")]
        );
        assert_eq!(s.forgery.len(), 2);
    }

    #[test]
    fn manifest_errors() {
        let dup = "signer 1\ngenuine a.pgm\nforgery a.pgm\n";
        assert!(matches!(
            parse_manifest(dup, Path::new(".")),
            Err(Error::DuplicatePath(_))
        ));
        let no_forgery = "signer 1\ngenuine a.pgm\n";
        assert!(matches!(
            parse_manifest(no_forgery, Path::new(".")),
            Err(Error::MalformedManifest(_))
        ));
        let orphan = "genuine a.pgm\n";
        assert!(matches!(
            parse_manifest(orphan, Path::new(".")),
            Err(Error::MalformedManifest(_))
        ));
        let junk = "signer 1\nblah x\n";
        assert!(matches!(
            parse_manifest(junk, Path::new(".")),
            Err(Error::MalformedManifest(_))
        ));
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let m = DatasetManifest::new(vec![entry("a", 110, 110)]).unwrap();
        let (train, test) = make_split(&m, "a", &SplitSpec::new(10, 3)).unwrap();
        assert_eq!(
            train.iter().filter(|(_, l)| *l == Label::Genuine).count(),
            5
        );
        assert_eq!(
            train.iter().filter(|(_, l)| *l == Label::Forgery).count(),
            5
        );
        assert_eq!(
            test.iter().filter(|(_, l)| *l == Label::Genuine).count(),
            50
        );
        assert_eq!(
            test.iter().filter(|(_, l)| *l == Label::Forgery).count(),
            50
        );
        let train_paths: HashSet<_> = train.iter().map(|(p, _)| p).collect();
        assert!(test.iter().all(|(p, _)| !train_paths.contains(p)));
        assert_eq!(
            make_split(&m, "a", &SplitSpec::new(10, 3)).unwrap(),
            (train, test)
        );
    }

    #[test]
    fn split_needs_enough_samples() {
        let m = DatasetManifest::new(vec![entry("a", 20, 110)]).unwrap();
        assert!(matches!(
            make_split(&m, "a", &SplitSpec::new(10, 0)),
            Err(Error::InsufficientSamples {
                available: 20,
                needed: 55,
                ..
            })
        ));
        assert!(matches!(
            make_split(&m, "zz", &SplitSpec::new(10, 0)),
            Err(Error::UnknownSigner(_))
        ));
        assert!(make_split(&m, "a", &SplitSpec::new(7, 0)).is_err());
    }

    fn fixed_model(out: f64) -> MlpModel<f64> {
        let mut m = MlpModel::<f64>::for_layout(Layout::Energy, 0).unwrap();
        for l in m.layers_mut() {
            l.params_mut().for_each(|p| *p = 0.0);
        }
        m.layers_mut()[2].biases_mut()[0] = out.atanh();
        m
    }

    /// Model whose score is the sign of the first input.
    fn sign_model() -> MlpModel<f64> {
        let mut m = fixed_model(0.0);
        m.layers_mut()[0].weights_mut()[0] = 20.0;
        m.layers_mut()[1].weights_mut()[0] = 20.0;
        m.layers_mut()[2].weights_mut()[0] = 20.0;
        m
    }

    fn example(first: f64, label: Label) -> Example<f64> {
        let mut v = vec![0.0; 101];
        v[0] = first;
        Example {
            features: FeatureVector::new(Layout::Energy, v).unwrap(),
            label,
        }
    }

    #[test]
    fn perfect_classifier() {
        let m = sign_model();
        let test: Vec<_> = (0..50)
            .map(|_| example(0.5, Label::Genuine))
            .chain((0..50).map(|_| example(-0.5, Label::Forgery)))
            .collect();
        let r = evaluate(&m, &test).unwrap();
        assert_eq!((r.accuracy_pct, r.far_pct, r.frr_pct), (100.0, 0.0, 0.0));
    }

    #[test]
    fn some_forgeries_accepted() {
        let m = sign_model();
        let test: Vec<_> = (0..50)
            .map(|_| example(0.5, Label::Genuine))
            .chain((0..50).map(|i| example(if i < 5 { 0.5 } else { -0.5 }, Label::Forgery)))
            .collect();
        let r = evaluate(&m, &test).unwrap();
        assert_eq!((r.accuracy_pct, r.far_pct, r.frr_pct), (95.0, 10.0, 0.0));
        assert_eq!(r.accuracy_pct, 100.0 - (r.far_pct + r.frr_pct) / 2.0);
    }

    #[test]
    fn evaluate_errors() {
        let m = fixed_model(0.5);
        assert!(matches!(evaluate(&m, &[]), Err(Error::EmptyTestSet)));
        let one_class = vec![example(0.1, Label::Genuine)];
        assert!(matches!(
            evaluate(&m, &one_class),
            Err(Error::SingleClassTestSet)
        ));
    }

    #[test]
    fn csv_format() {
        let r = MetricsReport {
            method: Layout::Combined,
            n_train: 100,
            accuracy_pct: 100.0,
            far_pct: 0.0,
            frr_pct: 0.0,
            train_seconds: 1.23456,
            n_genuine: 50,
            n_forgery: 50,
            false_accepts: 0,
            false_rejects: 0,
        };
        assert_eq!(
            reports_to_csv(&[r]),
            "method,n_train,accuracy_pct,far_pct,frr_pct,train_seconds\ncombined,100,100.00,0.00,0.00,1.235\n"
        );
    }

    #[test]
    fn cell_seeds_are_distinct() {
        let c = SweepConfig::<f64>::new(5);
        let mut seen = HashSet::new();
        for m in Layout::ALL {
            for s in default_sizes() {
                assert!(seen.insert(c.init_seed(m, s)));
            }
        }
        assert_eq!(c.split_seed(10), SweepConfig::<f64>::new(5).split_seed(10));
    }
}
