mod common;

use std::fs;
use std::path::Path;

use common::*;
use varnoise::experiment::{cmd_run_experiment, process_shape, shape_seed, ExperimentConfig};
use varnoise::results::{write_results, CurveRecord, ShapeReport, MANIFEST_NAME};
use varnoise::Error;
use varnoise_core::{Method, PrCurve};

fn three_shapes(root: &Path) {
    write_dataset(
        root,
        &[
            ("polys", "square", square(120.0, 100)),
            ("polys", "pentagon", regular(5, 70.0, 100)),
            ("stars", "star5", star(5, 90.0, 40.0, 100)),
        ],
    );
}

fn config(root: &Path, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        dataset_root: root.to_path_buf(),
        out_dir: out.to_path_buf(),
        seed: 17,
        jobs: 2,
        ..Default::default()
    }
}

fn csv_tables(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut found = Vec::new();
    let mut stack = vec![out.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let rel = path.strip_prefix(out).unwrap().display().to_string();
                found.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    found.sort();
    found
}

#[test]
fn full_run_layout_and_determinism() {
    let data = tempfile::tempdir().unwrap();
    three_shapes(data.path());
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = cmd_run_experiment(&config(data.path(), a.path())).unwrap();
    assert!(first.success(), "{:?}", first.failures);
    assert_eq!(first.processed, 3);

    let per_shape: Vec<_> = csv_tables(a.path())
        .into_iter()
        .filter(|(name, _)| !name.ends_with("average.csv"))
        .collect();
    assert_eq!(per_shape.len(), 5 * 4 * 3);
    for method in ["Vo", "V", "AI", "K", "SK"] {
        for points in [200, 400, 800, 1600] {
            assert!(a.path().join(format!("stars/star5/{method}_{points}.csv")).is_file());
        }
    }
    let table = fs::read_to_string(a.path().join("stars/star5/Vo_1600.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("shape,method,points,recall_pos,precision"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows[0].starts_with("star5,Vo,1600,1,"));
    for class in ["polys", "stars"] {
        assert!(a.path().join(class).join("average.csv").is_file());
        assert!(a.path().join(class).join("pr.svg").is_file());
    }
    let manifest = fs::read_to_string(a.path().join(MANIFEST_NAME)).unwrap();
    assert_eq!(manifest.lines().count(), first.manifest.files.len());

    cmd_run_experiment(&config(data.path(), b.path())).unwrap();
    assert_eq!(csv_tables(a.path()), csv_tables(b.path()));
}

#[test]
fn method_filter_and_order_independence() {
    let data = tempfile::tempdir().unwrap();
    three_shapes(data.path());
    let out = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        methods: vec![Method::Vo],
        ..config(data.path(), out.path())
    };
    assert!(cmd_run_experiment(&cfg).unwrap().success());
    let tables = csv_tables(out.path());
    for (name, bytes) in &tables {
        let text = String::from_utf8_lossy(bytes);
        assert!(text.lines().skip(1).all(|l| l.contains(",Vo,")), "{name}");
    }

    // the same shape alone in another dataset draws the same noise
    let lone = tempfile::tempdir().unwrap();
    write_dataset(lone.path(), &[("stars", "star5", star(5, 90.0, 40.0, 100))]);
    let lone_out = tempfile::tempdir().unwrap();
    cmd_run_experiment(&ExperimentConfig {
        methods: vec![Method::Vo],
        ..config(lone.path(), lone_out.path())
    })
    .unwrap();
    let pick = |t: &[(String, Vec<u8>)]| t.iter().find(|(n, _)| n.ends_with("star5/Vo_1600.csv")).cloned();
    assert_eq!(pick(&tables), pick(&csv_tables(lone_out.path())));
}

#[test]
fn bad_shapes_are_isolated() {
    let data = tempfile::tempdir().unwrap();
    three_shapes(data.path());
    fs::write(data.path().join("polys/broken.csv"), "0,0\n1,0\n").unwrap();
    fs::write(data.path().join("polys/notes.txt"), "ignored").unwrap();
    let out = tempfile::tempdir().unwrap();
    let summary = cmd_run_experiment(&config(data.path(), out.path())).unwrap();
    assert_eq!(summary.processed, 3);
    assert_eq!(summary.failures.len(), 1);
    assert!(summary.failures[0].0.ends_with("broken.csv"));
    assert!(!summary.success());
}

#[test]
fn circle_has_nothing_to_score() {
    let data = tempfile::tempdir().unwrap();
    write_dataset(data.path(), &[("round", "circle", circle(60.0, 100))]);
    let out = tempfile::tempdir().unwrap();
    let summary = cmd_run_experiment(&config(data.path(), out.path())).unwrap();
    assert!(summary.success());
    assert!(csv_tables(out.path()).is_empty());
    assert!(out.path().join("round/circle/descriptors.svg").is_file());
}

#[test]
fn missing_dataset_and_bad_config() {
    let out = tempfile::tempdir().unwrap();
    let missing = config(&out.path().join("nope"), out.path());
    assert!(matches!(cmd_run_experiment(&missing), Err(Error::MissingDataset(_))));
    let bad = ExperimentConfig {
        perturbation_ratio: 0.7,
        ..config(out.path(), out.path())
    };
    assert!(cmd_run_experiment(&bad).is_err());
    let gt = ExperimentConfig {
        methods: vec![Method::GT],
        ..config(out.path(), out.path())
    };
    assert!(cmd_run_experiment(&gt).is_err());
}

#[test]
fn shape_level_pipeline() {
    let record = varnoise::dataset::ShapeRecord {
        class_name: "stars".into(),
        shape_name: "s".into(),
        contour: star(6, 100.0, 50.0, 333),
        source: "s.csv".into(),
    };
    let cfg = ExperimentConfig::default();
    let report = process_shape(&record, &cfg).unwrap();
    assert_eq!(report.curves.len(), 5 * 4);
    let gt_len = report.series[0].marks.len();
    assert_eq!(gt_len, 12);
    for curve in &report.curves {
        assert_eq!(curve.pr.len(), gt_len);
        assert!(curve.pr.values.windows(2).all(|w| w[1] <= w[0]));
    }
    assert_ne!(shape_seed(1, "a/b"), shape_seed(1, "a/c"));
    assert_ne!(shape_seed(1, "a/b"), shape_seed(2, "a/b"));
}

fn report(class: &str, shape: &str, values: Vec<f64>) -> ShapeReport {
    ShapeReport {
        class: class.into(),
        shape: shape.into(),
        curves: vec![CurveRecord {
            method: Method::K,
            points: 200,
            pr: PrCurve { values },
        }],
        series: Vec::new(),
    }
}

#[test]
fn writer_cases() {
    let out = tempfile::tempdir().unwrap();
    let manifest = write_results(&[], out.path()).unwrap();
    assert!(manifest.files.is_empty());

    let one = report("a", "x", vec![0.9, 0.7, 0.2]);
    write_results(std::slice::from_ref(&one), out.path()).unwrap();
    let rows = fs::read_to_string(out.path().join("a/x/K_200.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
    assert_eq!(rows.lines().nth(3), Some("x,K,200,3,0.2"));

    let two = tempfile::tempdir().unwrap();
    let manifest = write_results(
        &[one, report("a", "y", vec![0.5, 0.3]), report("b", "z", vec![1.0])],
        two.path(),
    )
    .unwrap();
    let svgs: Vec<_> = manifest
        .files
        .iter()
        .filter(|f| f.file_name().is_some_and(|n| n == "pr.svg"))
        .collect();
    assert_eq!(svgs.len(), 2);
    let avg = fs::read_to_string(two.path().join("a/average.csv")).unwrap();
    assert_eq!(avg, "class,method,points,recall_pos,precision\na,K,200,1,0.7\na,K,200,2,0.5\n");

    let blocker = two.path().join("file");
    fs::write(&blocker, "").unwrap();
    assert!(matches!(
        write_results(&[report("a", "x", vec![1.0])], &blocker),
        Err(Error::Io { .. })
    ));
}
