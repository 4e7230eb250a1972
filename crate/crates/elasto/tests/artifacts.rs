use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use elasto::config;
use elasto::formats::{self, SpectrumRow, StatisticsRow};
use elasto::pipeline;
use elasto_core::experiment::{ExperimentConfig, FrequencySet, GridSize, ReceiverLayout, SpectrumSettings};
use elasto_core::stochastic::DataSource;

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        inversion_grid: GridSize { nx: 6, ny: 6 },
        simulation_grid: GridSize { nx: 13, ny: 13 },
        receivers: ReceiverLayout { radius: 2.0, count: 8, angular_offset: 0.05 },
        mean_frequencies: FrequencySet::range(0.5 * PI, 2.5 * PI, 3),
        variance_frequencies: FrequencySet::List(vec![0.5 * PI, 0.8 * PI]),
        realizations: 30,
        spectrum: SpectrumSettings { frequency: PI, grid: GridSize { nx: 4, ny: 3 } },
        output_dir: out.to_string_lossy().into_owned(),
        ..ExperimentConfig::default()
    }
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_all_writes_every_schema() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(dir.path());
    let out = pipeline::prepare_output(&config).unwrap();
    let summary = pipeline::run_all(&config, &out).unwrap();

    assert_eq!(
        header(&out.join("statistics.csv")),
        "freq,receiver_index,rx,ry,meanRe1,meanIm1,meanRe2,meanIm2,varRe1,varIm1,varRe2,varIm2,n"
    );
    assert_eq!(header(&out.join("spectra.csv")), "family,freq,index,sigma");
    for name in ["g1", "g2", "h1sq", "h2sq", "h1sq_clamped", "h2sq_clamped"] {
        assert_eq!(header(&out.join(format!("field_{name}.csv"))), "ix,iy,x,y,exact,reconstructed");
    }
    for problem in ["mean", "variance"] {
        assert_eq!(header(&out.join(format!("residuals_{problem}.csv"))), "outer_loop,freq_index,residual_norm");
        assert_eq!(header(&out.join(format!("errors_{problem}.csv"))), "field,variant,relative_l2,max_abs");
    }
    assert_eq!(header(&out.join("blocks.csv")), "problem,freq_index,freq,rows,cols,frobenius_norm");
    for entry in fs::read_dir(&out).unwrap() {
        let bytes = fs::read(entry.unwrap().path()).unwrap();
        assert!(!bytes.contains(&b'\r'));
        assert!(std::str::from_utf8(&bytes).is_ok());
    }

    let residuals: Vec<formats::ResidualRow> = formats::read_rows(&out.join("residuals_mean.csv")).unwrap();
    assert_eq!(residuals.len(), config.outer_loops * 3);
    assert_eq!(summary.mean.result.residuals.len(), residuals.len());
}

#[test]
fn spectra_rows_per_family_equal_min_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(dir.path());
    let out = pipeline::prepare_output(&config).unwrap();
    let rows: Vec<SpectrumRow> = {
        pipeline::spectra(&config, &out).unwrap();
        formats::read_rows(&out.join("spectra.csv")).unwrap()
    };
    let expected = config.receivers.count.min(2 * 4 * 3);
    for family in ["MeanRe1", "MeanIm2", "VarRe1", "VarIm2", "VarDiff1", "VarDiff2"] {
        let n = rows.iter().filter(|r| r.family == family).count();
        assert_eq!(n, expected, "{family}");
    }
    assert_eq!(rows.len(), 10 * expected);
    assert!(rows.windows(2).all(|w| w[0].family != w[1].family || w[0].sigma >= w[1].sigma));
}

#[test]
fn error_report_recomputed_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(dir.path());
    let out = pipeline::prepare_output(&config).unwrap();
    let summary = pipeline::run_all(&config, &out).unwrap();
    for f in &summary.mean.report.fields {
        let again = formats::field_error_from_file(&f.name, &out.join(format!("field_{}.csv", f.name))).unwrap();
        assert_eq!(&again, f);
    }
    for f in &summary.variance.raw_report.fields {
        let again = formats::field_error_from_file(&f.name, &out.join(format!("field_{}.csv", f.name))).unwrap();
        assert_eq!(&again, f);
    }
    for f in &summary.variance.report.fields {
        let path = out.join(format!("field_{}_clamped.csv", f.name));
        assert_eq!(&formats::field_error_from_file(&f.name, &path).unwrap(), f);
    }
    let rows: Vec<formats::ErrorRow> = formats::read_rows(&out.join("errors_variance.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2].variant, "clamped");
}

#[test]
fn staged_commands_match_single_pass() {
    let dir = tempfile::tempdir().unwrap();
    let config = small(dir.path());
    let out = pipeline::prepare_output(&config).unwrap();
    let summary = pipeline::run_all(&config, &out).unwrap();
    let stats = formats::read_statistics(&out.join("statistics.csv")).unwrap();
    assert_eq!(stats.frequencies.len(), config.all_frequencies().len());
    assert_eq!(stats.realizations, 30);
    let staged = pipeline::reconstruct_mean(&config, &out, None).unwrap();
    assert_eq!(staged.result.q, summary.mean.result.q);
    let staged = pipeline::reconstruct_variance(&config, &out, None).unwrap();
    assert_eq!(staged.result.q, summary.variance.result.q);
}

#[test]
fn statistics_round_trip_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig { data: DataSource::Quadrature, ..small(dir.path()) };
    let out = pipeline::prepare_output(&config).unwrap();
    let stats = pipeline::simulate(&config, &out).unwrap();
    let back = formats::read_statistics(&out.join("statistics.csv")).unwrap();
    assert_eq!(back.frequencies, stats.frequencies);
    assert_eq!(back.receivers, stats.receivers);
    assert_eq!(back.source, DataSource::Quadrature);
    let rows: Vec<StatisticsRow> = formats::read_rows(&out.join("statistics.csv")).unwrap();
    assert!(rows.iter().all(|r| r.n == 0));
}

#[test]
fn malformed_statistics_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("statistics.csv");
    fs::write(&path, "freq,receiver_index,rx\n1.0,1,2.0\n").unwrap();
    let err = formats::read_statistics(&path).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    fs::write(
        &path,
        "freq,receiver_index,rx,ry,meanRe1,meanIm1,meanRe2,meanIm2,varRe1,varIm1,varRe2,varIm2,n\n1,2,2,0,0,0,0,0,0,0,0,0,5\n",
    )
    .unwrap();
    assert!(formats::read_statistics(&path).is_err());
}

#[test]
fn config_round_trips_and_rejects_unknown_keys() {
    let config = small(Path::new("out"));
    let text = config::to_toml(&config);
    assert_eq!(config::parse(&text).unwrap(), config);
    let default = ExperimentConfig::default();
    assert_eq!(config::parse(&config::to_toml(&default)).unwrap(), default);

    let unknown = format!("{text}\nextra = 1\n");
    assert_eq!(config::parse(&unknown).unwrap_err().exit_code(), 2);
    let nested = text.replace("[medium]", "[medium]\nrho = 1.0");
    assert!(config::parse(&nested).is_err());
    let range = text.replace("[mean_frequencies]", "[mean_frequencies]\nstep = 1.0");
    assert!(config::parse(&range).is_err());
    let crime = text.replace("[simulation_grid]\nnx = 13\nny = 13", "[simulation_grid]\nnx = 18\nny = 18");
    assert!(matches!(config::parse(&crime), Err(elasto::AppError::Config(_))));
}

fn elasto(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_elasto")).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "seed = 1\n").unwrap();
    let code = |o: std::process::Output| o.status.code().unwrap();
    assert_eq!(code(elasto(&["simulate", "--config", bad.to_str().unwrap()])), 2);
    assert_eq!(code(elasto(&["simulate", "--config", dir.path().join("missing.toml").to_str().unwrap()])), 4);
    assert_eq!(code(elasto(&["frobnicate"])), 2);

    let good = dir.path().join("good.toml");
    config::save(&small(&dir.path().join("run")), &good).unwrap();
    let out = dir.path().join("empty");
    let args = ["reconstruct-mean", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(code(elasto(&args)), 4);
    let args = ["simulate", "--config", good.to_str().unwrap(), "--realizations", "1"];
    assert_eq!(code(elasto(&args)), 2);

    let args = ["simulate", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "9"];
    assert_eq!(code(elasto(&args)), 0);
    let echoed = config::load(&out.join("config.toml")).unwrap();
    assert_eq!(echoed.seed, 9);
    assert_eq!(echoed.output_dir, out.to_string_lossy());
    let args = ["reconstruct-variance", "--config", good.to_str().unwrap(), "--out", out.to_str().unwrap()];
    assert_eq!(code(elasto(&args)), 0);
    assert!(out.join("field_h2sq.csv").exists());
}

#[test]
fn numeric_errors_map_to_exit_three() {
    let e: elasto::AppError = elasto_core::Error::Numeric("x".into()).into();
    assert_eq!(e.exit_code(), 3);
    let e: elasto::AppError = elasto_core::Error::Singular(1.0, 2.0).into();
    assert_eq!(e.exit_code(), 3);
    let e: elasto::AppError = elasto_core::Error::Geometry("x".into()).into();
    assert_eq!(e.exit_code(), 2);
}
