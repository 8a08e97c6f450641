use std::collections::HashSet;
use std::fs;

use sigver::eval::{
    self, evaluate, load_manifest, make_split, split_indices, Example, SplitSpec, SweepConfig,
};
use sigver::features::{Layout, RawFeatures};
use sigver::mlp::MlpModel;
use sigver::preprocess::preprocess_pipeline;
use sigver::syndata::{gen_dataset, gen_signer_samples, MANIFEST_NAME};
use sigver::{Error, Label};

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[test]
fn genuine_samples_cluster_closer_than_forgeries() {
    for id in 1..=3 {
        let (g, f) = gen_signer_samples(5, id, 20, 20);
        let vec = |img| -> Vec<f64> {
            RawFeatures::from_image(img)
                .unwrap()
                .vector(Layout::Combined)
                .unwrap()
                .into_values()
        };
        let g: Vec<Vec<f64>> = g.iter().map(vec).collect();
        let f: Vec<Vec<f64>> = f.iter().map(vec).collect();
        let mean_pairwise = |a: &[Vec<f64>], b: &[Vec<f64>], same: bool| {
            let mut total = 0.0;
            let mut n = 0;
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    if !(same && i >= j) {
                        total += distance(x, y);
                        n += 1;
                    }
                }
            }
            total / n as f64
        };
        let within = mean_pairwise(&g, &g, true);
        let across = mean_pairwise(&g, &f, false);
        assert!(
            within < across,
            "signer {id}: genuine {within:.3} vs forgery {across:.3}"
        );
    }
}

#[test]
fn generated_images_survive_the_pipeline() {
    for id in 1..=4 {
        let (g, f) = gen_signer_samples(11, id, 8, 8);
        for img in g.iter().chain(&f) {
            let (grid, aspect) = preprocess_pipeline(img).unwrap();
            assert!(aspect > 0.0);
            assert!(grid.segments().iter().map(|s| s.ink_count()).sum::<usize>() > 0);
        }
    }
}

#[test]
fn dataset_generation_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = gen_dataset(2, 3, 2, 42, a.path()).unwrap();
    gen_dataset(2, 3, 2, 42, b.path()).unwrap();
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 2 * 5 + 1);
    for name in &names {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
    let reloaded = load_manifest(a.path().join(MANIFEST_NAME)).unwrap();
    assert_eq!(reloaded, ma);
    assert_eq!(reloaded.signer("2").unwrap().forgery.len(), 2);

    let c = tempfile::tempdir().unwrap();
    gen_dataset(2, 3, 2, 43, c.path()).unwrap();
    assert_ne!(
        fs::read(a.path().join("s1_g1.pgm")).unwrap(),
        fs::read(c.path().join("s1_g1.pgm")).unwrap()
    );
}

#[test]
fn splits_are_disjoint_balanced_and_seeded() {
    for n_train in [2, 10, 50, 100] {
        let spec = SplitSpec::new(n_train, 9);
        let idx = split_indices("s", 110, 120, &spec).unwrap();
        assert_eq!(idx.train_genuine.len(), n_train / 2);
        assert_eq!(idx.train_forgery.len(), n_train / 2);
        assert_eq!(idx.test_genuine.len(), 50);
        assert_eq!(idx.test_forgery.len(), 50);
        let train: HashSet<_> = idx.train_genuine.iter().collect();
        assert!(idx.test_genuine.iter().all(|i| !train.contains(i)));
        let train: HashSet<_> = idx.train_forgery.iter().collect();
        assert!(idx.test_forgery.iter().all(|i| !train.contains(i)));
        assert!(idx.test_forgery.iter().all(|&i| i < 120));
        assert_eq!(split_indices("s", 110, 120, &spec).unwrap(), idx);
        assert_ne!(
            split_indices("s", 110, 120, &SplitSpec::new(n_train, 10)).unwrap(),
            idx
        );
    }
    match split_indices("s", 59, 110, &SplitSpec::new(20, 0)) {
        Err(Error::InsufficientSamples {
            class,
            available,
            needed,
            ..
        }) => {
            assert_eq!((class, available, needed), ("genuine", 59, 60));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn manifest_splits_carry_labels() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen_dataset(1, 8, 8, 3, dir.path()).unwrap();
    let spec = SplitSpec {
        n_train: 6,
        n_test_genuine: 4,
        n_test_forgery: 5,
        seed: 1,
    };
    let (train, test) = make_split(&manifest, "1", &spec).unwrap();
    assert_eq!(train.len(), 6);
    assert_eq!(test.iter().filter(|(_, l)| *l == Label::Genuine).count(), 4);
    assert_eq!(test.iter().filter(|(_, l)| *l == Label::Forgery).count(), 5);
    for (path, label) in train.iter().chain(&test) {
        let name = path.file_name().unwrap().to_str().unwrap();
        assert_eq!(name.contains("_g"), *label == Label::Genuine, "{name}");
    }
    let all: HashSet<_> = train.iter().chain(&test).map(|(p, _)| p).collect();
    assert_eq!(all.len(), 15);
}

#[test]
fn metrics_identity_holds_for_balanced_tests() {
    let (g, f) = gen_signer_samples(3, 1, 10, 10);
    let examples: Vec<Example<f64>> = g
        .iter()
        .map(|i| (i, Label::Genuine))
        .chain(f.iter().map(|i| (i, Label::Forgery)))
        .map(|(img, label)| Example {
            features: RawFeatures::from_image(img)
                .unwrap()
                .vector(Layout::Energy)
                .unwrap(),
            label,
        })
        .collect();
    for seed in 0..10 {
        let mut model = MlpModel::<f64>::for_layout(Layout::Energy, seed).unwrap();
        model.set_decision_threshold((seed as f64 - 5.0) / 10.0);
        let r = evaluate(&model, &examples).unwrap();
        assert_eq!((r.n_genuine, r.n_forgery), (10, 10));
        assert!((r.accuracy_pct - (100.0 - (r.far_pct + r.frr_pct) / 2.0)).abs() < 1e-9);
        assert_eq!(r.far_pct, 10.0 * r.false_accepts as f64);
        assert_eq!(r.frr_pct, 10.0 * r.false_rejects as f64);
    }
}

#[test]
fn sweep_is_reproducible_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = gen_dataset(1, 12, 12, 8, dir.path()).unwrap();
    let mut config = SweepConfig::<f64>::new(5);
    config.sizes = vec![4, 8];
    config.n_test_genuine = 6;
    config.n_test_forgery = 6;
    config.train.max_epochs = 300;
    let strip = |csv: String| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let first = eval::sweep(&manifest, "1", &config).unwrap();
    assert_eq!(first.len(), 6);
    let order: Vec<_> = first.iter().map(|r| (r.method, r.n_train)).collect();
    assert_eq!(
        order,
        [
            (Layout::Energy, 4),
            (Layout::Energy, 8),
            (Layout::Direction, 4),
            (Layout::Direction, 8),
            (Layout::Combined, 4),
            (Layout::Combined, 8)
        ]
    );
    let again = eval::sweep(&manifest, "1", &config).unwrap();
    assert_eq!(
        strip(eval::reports_to_csv(&first)),
        strip(eval::reports_to_csv(&again))
    );

    config.seed = 6;
    let other = eval::sweep(&manifest, "1", &config).unwrap();
    assert_eq!(other.len(), 6);
    assert!(matches!(
        eval::sweep(&manifest, "9", &config),
        Err(Error::UnknownSigner(_))
    ));
}
