use std::path::Path;
use std::process::{Command, Output};

use arnoldi_lsq::report::read_report;
use arnoldi_lsq::{save_dataset, DenseVector, NodeSet, ReportFormat, RowFlag};
use num_complex::Complex64;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arnoldi-lsq")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn experiment_tables_are_reproducible_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        stdout(&run(&["experiment", "example4", "--no-timing", "--out", path_str(path)]));
    }
    let (bytes_a, bytes_b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(bytes_a, bytes_b);
    let rows = read_report(bytes_a.as_slice(), ReportFormat::Csv).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![10, 20, 40, 80]);
    assert!(rows.iter().all(|r| r.flag == RowFlag::Ok && r.runtime_ms.is_none()));
    assert!(rows[3].errors[0].unwrap() <= 1e-5);

    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 20240601);
    assert_eq!(meta["config"]["problem"], "sobolev-rational");
}

#[test]
fn experiment_overrides_and_formats() {
    let text = stdout(&run(&["experiment", "example1", "--n", "60", "--seed", "3", "--no-timing", "--format", "tsv"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n\terr0\terr1\terr2\truntime_ms\tflag"));
    assert!(lines.next().unwrap().starts_with("60\t"));
    assert_eq!(lines.next(), None);
}

#[test]
fn experiment_from_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = arnoldi_lsq::preset("example2").unwrap();
    config.degrees = vec![15];
    config.timing = false;
    let path = dir.path().join("c.json");
    std::fs::write(&path, config.to_json()).unwrap();
    let text = stdout(&run(&["experiment", path_str(&path), "--format", "csv"]));
    let rows = read_report(text.as_bytes(), ReportFormat::Csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].errors[0].unwrap() <= 1e-3);
}

#[test]
fn fit_commands_write_sampled_values() {
    let cases: [&[&str]; 4] = [
        &["fit-poly", "--target", "runge", "--n", "20"],
        &["fit-sobolev-poly", "--target", "runge", "--n", "20", "--max-order", "2"],
        &["fit-rational", "--target", "sqrt", "--n", "15", "--nodes", "clustered"],
        &["fit-sobolev-rational", "--target", "t-sqrt", "--n", "10", "--nodes", "clustered", "--max-order", "1"],
    ];
    for args in cases {
        let out = run(&[args, &["--samples", "5"]].concat());
        let text = stdout(&out);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x_re,x_im,order,value_re,value_im"));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
        assert!(rows.len() >= 5, "{args:?}");
        assert!(rows.iter().flatten().all(|v| v.is_finite()));
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains("err0 = ") && stderr.contains("flag = ok"), "{args:?}: {stderr}");
    }
}

#[test]
fn fit_from_dataset_file_reproduces_a_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let xs = [-0.9, -0.5, -0.1, 0.2, 0.6, 1.0];
    let nodes =
        NodeSet::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect(), vec![Complex64::new(1.0, 0.0); xs.len()])
            .unwrap()
            .with_orders(vec![1, 0, 1, 0, 1, 0])
            .unwrap();
    let f: DenseVector = xs
        .iter()
        .zip(nodes.orders())
        .flat_map(|(&x, &s)| {
            let value = 3.0 * x * x - x + 0.5;
            let slope = 6.0 * x - 1.0;
            if s == 1 {
                vec![slope, value]
            } else {
                vec![value]
            }
        })
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    save_dataset(&path, &nodes, &f).unwrap();
    let source = format!("file:{}", path_str(&path));
    let text = stdout(&run(&["fit-sobolev-poly", "--nodes", &source, "--n", "2", "--samples", "4"]));
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let (x, order, value) = (cols[0], cols[2], cols[3]);
        assert_eq!(order, 0.0);
        assert!((value - (3.0 * x * x - x + 0.5)).abs() < 1e-12, "{line}");
    }
}

#[test]
fn displacement_check_reports_ranks() {
    let text = stdout(&run(&["displacement-check", "--n", "5", "--nodes", "chebyshev", "--sigma", "12"]));
    assert_eq!(text, "matrix,rank\nvandermonde,1\ncauchy-with-ones,2\nkrylov,1\nrational-krylov,2\n");
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        &["experiment", "example9"][..],
        &["fit-poly", "--n", "10"],
        &["fit-poly", "--target", "runge", "--reorth", "3"],
        &["fit-poly", "--target", "runge", "--nodes", "file:/nonexistent.csv"],
        &["baseline", "--basis", "vandermonde", "--target", "runge", "--max-order", "1"],
    ] {
        let out = run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn shipped_configs_match_the_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["example1", "example2", "example3", "example4"] {
        let config = arnoldi_lsq::ExperimentConfig::load(&dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(Some(config), arnoldi_lsq::preset(name), "{name}");
    }
}
